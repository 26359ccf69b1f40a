"""Solvers for the discounted two-equation coupling system.

For a coupling triple (f, g, h) with h(x) = f(x) - g(-x), the pair system

    lam*u + f(u - v) = 0,      lam*v + g(v - u) = 0

reduces through z = u - v to the scalar equation lam*z + h(z) = 0.  The map
x -> lam*x + h(x) is increasing and surjective, so the root z_lam is unique;
both built-in variants vanish exactly at the anchor z = d, and for lam > 0
the root sits strictly inside (0, d).

Root finding happens in the gap variable t = d - z.  The residual

    G(t) = lam*(d - t) + h(d - t)

is strictly decreasing with G(0) = lam*d > 0 > G(d) = h(0) < 0, so [0, d]
always brackets, and bisection run to bracket exhaustion resolves t to its
floating-point spacing.  Solving for t rather than z matters: the root
approaches d like lam*d/k as lam -> 0, and a z-space solver cannot see below
ulp(d) =~ 2e-16, which would wreck the recovered u = k0*t/lam for small lam.

The pair solver mirrors the monotone (Perron-style) construction: a damped
fixed-point iteration

    (u, v) <- (u - alpha*(lam*u + f(u-v)), v - alpha*(lam*v + g(v-u)))

with alpha = 1/(lam + L), L the largest coupling slope, which is order
preserving and contracts onto the unique solution.  The difference mode
u - v contracts at a rate bounded away from 1, but the common-shift mode
(the kernel direction of the coupling) only contracts like 1 - alpha*lam,
so once the difference mode has converged the solver closes the remaining
geometric tail of each component's affine recursion in one step from its own
residual (u <- u - r_u/lam).  The gap is carried as its own state variable so
residuals keep full relative precision near the anchor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coupling import CouplingTriple, RawCoupling
from .errors import BracketError, PreconditionError, ToleranceError

__all__ = [
    "SolverConfig",
    "DiscountedSolution",
    "DEFAULT_CONFIG",
    "solve_scalar",
    "solve_reduced",
    "solve_system_iterative",
    "check_comparison",
]


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets for the scalar and pair solvers."""

    tol_root: float = 1e-12
    tol_res: float = 1e-10
    max_iter: int = 2000
    bracket_expand: float = 2.0

    def __post_init__(self):
        if not self.tol_root > 0.0:
            raise PreconditionError(f"tol_root must be positive, got {self.tol_root}")
        if not self.tol_res > 0.0:
            raise PreconditionError(f"tol_res must be positive, got {self.tol_res}")
        if self.max_iter < 1:
            raise PreconditionError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.bracket_expand > 1.0:
            raise PreconditionError(f"bracket_expand must exceed 1, got {self.bracket_expand}")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class DiscountedSolution:
    """One solved discount level: (lam, u, v, z) plus both residuals.

    z equals u - v exactly as stored, and the residuals are recomputed from
    the stored fields, so external checkers reproduce them bit for bit.
    """

    lam: float
    u: float
    v: float
    z: float
    residual_u: float
    residual_v: float
    iterations: int


def _gap_residual(coupling, lam: float, t: float) -> float:
    """G(t) = lam*(d - t) + h(d - t), evaluated through the offset form."""
    return lam * (coupling.d - t) + coupling.h_offset(-t)


def _bisect_gap(coupling, lam, cfg, lo, hi, g_lo, g_hi):
    """Bisection on G over [lo, hi] with G(lo) > 0 > G(hi), run to exhaustion.

    Stops when the midpoint is no longer strictly inside the bracket, i.e.
    the bracket has collapsed to adjacent floats, or on an exact zero.
    Returns (t, iterations); the endpoint with the smaller |G| wins.
    """
    iters = 0
    while iters < cfg.max_iter:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        iters += 1
        g_mid = _gap_residual(coupling, lam, mid)
        if g_mid > 0.0:
            lo, g_lo = mid, g_mid
        elif g_mid < 0.0:
            hi, g_hi = mid, g_mid
        else:
            return mid, iters
    if hi - lo > cfg.tol_root:
        raise ToleranceError(
            f"bisection stopped with bracket width {hi - lo:.3e} > tol_root "
            f"after {iters} iterations (lam={lam})"
        )
    return (lo, iters) if abs(g_lo) <= abs(g_hi) else (hi, iters)


def _solve_gap(coupling, lam, cfg, t_bracket=None):
    """Root of G(t) on a validated (expanded if necessary) bracket."""
    d = coupling.d
    if t_bracket is None:
        lo, hi = 0.0, d
    else:
        lo, hi = t_bracket
    g_lo = _gap_residual(coupling, lam, lo)
    g_hi = _gap_residual(coupling, lam, hi)
    if g_lo == 0.0:
        return lo, 0
    if g_hi == 0.0:
        return hi, 0
    expansions = 0
    span = max(hi - lo, d if d > 0 else 1.0)
    while not (g_lo > 0.0 > g_hi):
        # G decreases in t, so grow the end whose sign is wrong.
        if expansions >= cfg.max_iter:
            raise BracketError(
                f"no sign change after {expansions} expansions "
                f"(G({lo})={g_lo:.3g}, G({hi})={g_hi:.3g}); broken coupling callback?"
            )
        expansions += 1
        span *= cfg.bracket_expand
        if g_lo <= 0.0:
            lo -= span
            g_lo = _gap_residual(coupling, lam, lo)
        elif g_hi >= 0.0:
            hi += span
            g_hi = _gap_residual(coupling, lam, hi)
    t, iters = _bisect_gap(coupling, lam, cfg, lo, hi, g_lo, g_hi)
    return t, iters + expansions


def solve_scalar(coupling, lam: float, cfg: SolverConfig = DEFAULT_CONFIG, z_bracket=None) -> float:
    """Unique root z of lam*z + h(z) = 0.

    lam = 0 returns the anchor d directly for the built-in variants (the exact
    zero of h).  ``z_bracket`` optionally overrides the initial bracket (in z
    coordinates); the bracket is expanded geometrically until the residual
    changes sign, then bisected.
    """
    if lam < 0.0 or not math.isfinite(lam):
        raise PreconditionError(f"discount factor must be >= 0 and finite, got {lam}")
    if isinstance(coupling, CouplingTriple) and lam == 0.0 and z_bracket is None:
        return coupling.d
    t_bracket = None
    if z_bracket is not None:
        z_lo, z_hi = sorted(z_bracket)
        t_bracket = (coupling.d - z_hi, coupling.d - z_lo)
    elif isinstance(coupling, RawCoupling):
        t_bracket = (-coupling.d, coupling.d)  # z in [0, 2d]; expanded on demand
    t, _ = _solve_gap(coupling, lam, cfg, t_bracket)
    return coupling.d - t


def _pair_residuals(coupling, lam, u, v):
    """Residuals of both equations, computed naively from the pair state.

    g(v - u) = g(-w) = f(w) - h(w), so both couplings evaluate at the offset
    w - d, which is an exact subtraction for w in [d/2, 2d] (Sterbenz).
    """
    s = (u - v) - coupling.d
    r_u = lam * u + coupling.f_offset(s)
    r_v = lam * v + coupling.f_offset(s) - coupling.h_offset(s)
    return r_u, r_v


def solve_reduced(coupling, lam: float, cfg: SolverConfig = DEFAULT_CONFIG) -> DiscountedSolution:
    """Solve the pair system through the scalar reduction z = u - v.

    Recovers u = -f(z)/lam from the gap (u = k0*t/lam for the built-ins, which
    keeps full relative precision even when z is within an ulp of d), then
    v = u - z, and verifies both residuals against tol_res.
    """
    if not lam > 0.0 or not math.isfinite(lam):
        raise PreconditionError(f"discount factor must be positive and finite, got {lam}")
    t, iters = _solve_gap(coupling, lam, cfg)
    u = -coupling.f_offset(-t) / lam
    v = u - (coupling.d - t)
    z = u - v  # restored so the stored triple satisfies z == u - v exactly
    r_u, r_v = _pair_residuals(coupling, lam, u, v)
    if max(abs(r_u), abs(r_v)) > cfg.tol_res:
        raise ToleranceError(
            f"reduced solve left residuals ({r_u:.3e}, {r_v:.3e}) above tol_res (lam={lam})"
        )
    return DiscountedSolution(lam=lam, u=u, v=v, z=z, residual_u=r_u, residual_v=r_v, iterations=iters)


def _subsolution_level(coupling, lam: float) -> float:
    """C such that (-C, -C) is a subsolution and (C, C) a supersolution."""
    d = coupling.d
    slope = getattr(coupling, "h_slope_max", None)
    if slope is None:
        slope = coupling.lipschitz + 1.0
    return d * max(1.0, slope / lam)


def solve_system_iterative(coupling, lam: float, cfg: SolverConfig = DEFAULT_CONFIG,
                           start=None) -> DiscountedSolution:
    """Solve the pair system without the z-reduction, by damped monotone iteration.

    Runs the order-preserving update from the subsolution corner (-C, -C)
    (or ``start``), carrying the gap tau = d - (u - v) as its own state so
    residual evaluation keeps relative precision near the anchor.  Once tau
    reaches its fixed point the per-component affine tails are closed exactly
    from their own residuals, then verified against tol_res.
    """
    if not lam > 0.0 or not math.isfinite(lam):
        raise PreconditionError(f"discount factor must be positive and finite, got {lam}")
    alpha = 1.0 / (lam + coupling.lipschitz)
    d = coupling.d
    if start is None:
        c0 = _subsolution_level(coupling, lam)
        u, v = -c0, -c0
    else:
        u, v = float(start[0]), float(start[1])
    tau = d - (u - v)

    iters = 0
    prev_tau = math.nan
    converged = False
    while iters < cfg.max_iter:
        iters += 1
        h_gap = coupling.h_offset(-tau)
        f_gap = coupling.f_offset(-tau)
        new_tau = tau + alpha * (lam * (d - tau) + h_gap)
        u -= alpha * (lam * u + f_gap)
        v -= alpha * (lam * v + f_gap - h_gap)
        if new_tau == tau or new_tau == prev_tau:  # fixed point or 2-cycle of the gap map
            converged = True
            break
        prev_tau, tau = tau, new_tau
    if not converged:
        raise ToleranceError(
            f"gap iteration did not settle within max_iter={cfg.max_iter} (lam={lam})"
        )

    # Close the geometric tail of each affine component recursion; the second
    # pass absorbs the rounding of the first.
    for _ in range(2):
        iters += 1
        h_gap = coupling.h_offset(-tau)
        f_gap = coupling.f_offset(-tau)
        u -= (lam * u + f_gap) / lam
        v -= (lam * v + f_gap - h_gap) / lam

    z = u - v
    r_u, r_v = _pair_residuals(coupling, lam, u, v)
    if max(abs(r_u), abs(r_v)) > cfg.tol_res:
        raise ToleranceError(
            f"iterative solve left residuals ({r_u:.3e}, {r_v:.3e}) above tol_res (lam={lam})"
        )
    return DiscountedSolution(lam=lam, u=u, v=v, z=z, residual_u=r_u, residual_v=r_v, iterations=iters)


def check_comparison(coupling, lam: float, sub, sup, slack: float = 1e-12) -> bool:
    """Comparison predicate: a subsolution lies below a supersolution componentwise.

    Verifies the sub/supersolution inequalities first (up to ``slack``, so an
    exact solution qualifies on both sides despite rounding) and raises
    PreconditionError if either pair fails them.
    """
    if not lam > 0.0:
        raise PreconditionError(f"discount factor must be positive, got {lam}")
    u1, v1 = sub
    u2, v2 = sup
    r1u, r1v = _pair_residuals(coupling, lam, u1, v1)
    if r1u > slack or r1v > slack:
        raise PreconditionError(f"sub={sub} is not a subsolution: residuals ({r1u:.3g}, {r1v:.3g})")
    r2u, r2v = _pair_residuals(coupling, lam, u2, v2)
    if r2u < -slack or r2v < -slack:
        raise PreconditionError(f"sup={sup} is not a supersolution: residuals ({r2u:.3g}, {r2v:.3g})")
    return u1 <= u2 and v1 <= v2
