"""Matplotlib figure rendering for construction dumps and sweep reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .coupling import CouplingTriple, Variant

__all__ = ["render_construction", "render_sweep", "render_limits"]


def render_construction(triple: CouplingTriple, table: dict, path) -> None:
    """Three stacked panels: the block psi, the envelope eta, and f, g, h."""
    x = np.asarray(table["x"])
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 9.0))
    k2 = triple.params.k2

    ax = axes[0]
    if triple.variant is Variant.DYADIC:
        ax.plot(x, table["psi"], lw=1.2, label="piecewise block")
        ax.plot(x, k2 * x, ls="--", lw=0.8, color="gray", label="anchor line")
        ax.set_xlim(-1.5, 0.5)
    ax.set_ylabel("psi(x)")
    ax.legend(loc="lower right", fontsize=8)

    ax = axes[1]
    ax.plot(x, table["eta"], lw=1.2, label="envelope")
    ax.plot(x, k2 * x, ls="--", lw=0.8, color="gray", label="anchor line")
    near = (x >= -1.1) & (x <= 0.3)
    if np.any(near):
        ax.set_xlim(-1.1, 0.3)
        lo = min(float(np.min(np.asarray(table["eta"])[near])), float(np.min(k2 * x[near])))
        ax.set_ylim(1.1 * lo, 0.35 * abs(lo) + 0.05)
    ax.set_ylabel("eta(x)")
    ax.legend(loc="lower right", fontsize=8)

    ax = axes[2]
    ax.plot(x, table["f"], lw=1.0, label="f")
    ax.plot(x, table["g"], lw=1.0, label="g")
    ax.plot(x, table["h"], lw=1.0, label="h")
    ax.axhline(0.0, color="gray", lw=0.6)
    ax.set_xlabel("x")
    ax.set_ylabel("coupling")
    ax.legend(loc="lower right", fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep(report, triple: CouplingTriple, path, targets=None) -> None:
    """u and v against the discount level, one marker set per schedule tag."""
    fig, (ax_u, ax_v) = plt.subplots(2, 1, figsize=(7.0, 6.5), sharex=True)
    tags = sorted({row.tag for row in report.rows})
    for tag in tags:
        rows = [r for r in report.rows if r.tag == tag]
        lams = [r.lam for r in rows]
        ax_u.semilogx(lams, [r.u for r in rows], "o-", ms=3, lw=0.8, label=tag)
        ax_v.semilogx(lams, [r.v for r in rows], "o-", ms=3, lw=0.8, label=tag)
    if targets:
        for value in targets:
            ax_u.axhline(value, ls=":", lw=0.8, color="gray")
    ax_u.set_ylabel("u")
    ax_v.set_ylabel("v")
    ax_v.set_xlabel("discount factor")
    ax_u.invert_xaxis()
    ax_u.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_limits(result, path) -> None:
    """Trailing convergence of the two tagged subsequences toward their limits."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for tag in sorted({row.tag for row in result.report.rows}):
        rows = [r for r in result.report.rows if r.tag == tag]
        ax.plot([r.j for r in rows], [r.u for r in rows], "o-", ms=3, lw=0.8, label=tag)
    ax.axhline(result.target_lo, ls=":", lw=0.8, color="gray")
    ax.axhline(result.target_hi, ls=":", lw=0.8, color="gray")
    ax.set_xlabel("sequence index")
    ax.set_ylabel("u")
    ax.set_title(f"cluster gap {result.gap:.6g}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
