"""Discount schedules, sweeps toward lam -> 0, and non-convergence certification.

Two families of discount levels make the solved pair land on closed-form
points of the construction:

    mu_j = k2 * 2^{-j} / (d - 2^{-j})          ->  z = k2*d/(k2 + mu_j),
    nu_j = 2^{-j} |y*| / (d - 2^{-j} |x*|)     ->  z = k*d/(k* + nu_j),

so u = k0*d/(k2 + mu_j) tends to k0*d/k2 along the first sequence while
u = k0*d/(k* + nu_j) tends to the strictly larger k0*d/k* along the second.
The positive gap between the two trailing values certifies that the full
family of solutions cannot converge as the discount vanishes.

The sin-log variant plays the same game with the slope-2 and slope-3
crossings at offsets -exp(-2 pi n) and -exp(-2 pi n + pi/2), giving cluster
values k0*d/2 and k0*d/3.

Reports carry per-row closed-form deviations and serialize to CSV (17
significant digits, deterministic bytes) and JSON summaries.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Sequence

from .coupling import CouplingParams, CouplingTriple, Variant, derive_geometry
from .errors import PartialReportError, PreconditionError, ScheduleDomainError, SolverError
from .solver import DEFAULT_CONFIG, SolverConfig, solve_reduced

__all__ = [
    "ScheduleTag",
    "DiscountSchedule",
    "SweepRow",
    "SweepReport",
    "NonconvergenceResult",
    "make_schedule",
    "run_sweep",
    "verify_nonconvergence",
    "write_sweep_csv",
    "sweep_summary",
]

CSV_COLUMNS = ("tag", "j", "lambda", "z", "u", "v", "residual_u", "residual_v", "closed_form_err")


class ScheduleTag(enum.Enum):
    MU = "mu"
    NU = "nu"
    LOG_UNIFORM = "loguniform"
    SINLOG2 = "sinlog2"
    SINLOG3 = "sinlog3"


@dataclass(frozen=True)
class DiscountSchedule:
    """Strictly decreasing positive discount levels with their index range."""

    values: tuple
    tag: ScheduleTag
    j_lo: int
    j_hi: int

    def __post_init__(self):
        if len(self.values) != self.j_hi - self.j_lo + 1:
            raise ScheduleDomainError("schedule length does not match its index range")
        if any(not (v > 0.0 and math.isfinite(v)) for v in self.values):
            raise ScheduleDomainError(f"{self.tag.value}: all discount levels must be finite and positive")
        if any(a <= b for a, b in zip(self.values, self.values[1:])):
            raise ScheduleDomainError(f"{self.tag.value}: discount levels must be strictly decreasing")

    def __len__(self):
        return len(self.values)

    def indexed(self):
        """Pairs (j, lambda_j) in schedule order."""
        return list(zip(range(self.j_lo, self.j_hi + 1), self.values))


def make_schedule(params: CouplingParams, tag: ScheduleTag, j_lo: int = 1, j_hi: int = 40,
                  lam_min: float | None = None, lam_max: float | None = None) -> DiscountSchedule:
    """Build the discount sequence for ``tag`` over indices j_lo..j_hi.

    LOG_UNIFORM ignores the closed forms and spaces j_hi - j_lo + 1 points
    geometrically between lam_max and lam_min (decreasing).
    """
    if not 1 <= j_lo <= j_hi:
        raise ScheduleDomainError(f"need 1 <= j_lo <= j_hi, got ({j_lo}, {j_hi})")
    d = params.d
    values = []
    if tag is ScheduleTag.MU:
        for j in range(j_lo, j_hi + 1):
            step = math.ldexp(1.0, -j)
            denom = d - step
            if denom <= 0.0:
                raise ScheduleDomainError(f"mu_{j} needs 2^-j < d, got d={d}")
            values.append(params.k2 * step / denom)
    elif tag is ScheduleTag.NU:
        geometry = derive_geometry(params)
        ax, ay = -geometry.x_star, -geometry.y_star
        for j in range(j_lo, j_hi + 1):
            denom = d - math.ldexp(ax, -j)
            if denom <= 0.0:
                raise ScheduleDomainError(f"nu_{j} needs 2^-j |x*| < d, got d={d}")
            values.append(math.ldexp(ay, -j) / denom)
    elif tag in (ScheduleTag.SINLOG2, ScheduleTag.SINLOG3):
        slope = 2.0 if tag is ScheduleTag.SINLOG2 else 3.0
        shift = 0.0 if tag is ScheduleTag.SINLOG2 else 0.5 * math.pi
        for n in range(j_lo, j_hi + 1):
            offset = math.exp(-2.0 * math.pi * n + shift)
            denom = d - offset
            if denom <= 0.0:
                raise ScheduleDomainError(f"{tag.value} index {n} needs its offset below d={d}")
            values.append(slope * offset / denom)
    elif tag is ScheduleTag.LOG_UNIFORM:
        if lam_min is None or lam_max is None:
            raise ScheduleDomainError("loguniform schedule needs lam_min and lam_max")
        if not 0.0 < lam_min < lam_max:
            raise ScheduleDomainError(f"need 0 < lam_min < lam_max, got ({lam_min}, {lam_max})")
        count = j_hi - j_lo + 1
        if count == 1:
            values.append(lam_max)
        else:
            ratio = lam_min / lam_max
            values = [lam_max * ratio ** (i / (count - 1)) for i in range(count)]
    else:  # pragma: no cover - exhaustive enum
        raise ScheduleDomainError(f"unknown schedule tag {tag}")
    return DiscountSchedule(values=tuple(values), tag=tag, j_lo=j_lo, j_hi=j_hi)


@dataclass(frozen=True)
class SweepRow:
    tag: str
    j: int
    lam: float
    z: float
    u: float
    v: float
    residual_u: float
    residual_v: float
    closed_form_err: float | None = None
    constancy: float | None = None


@dataclass(frozen=True)
class SweepReport:
    """Per-level solutions plus the two estimated cluster values of u."""

    rows: tuple
    cluster_lo: float
    cluster_hi: float
    gap: float

    def bounds_ok(self, d: float) -> bool:
        """Whether every row sits inside the comparison box [0, d] x [-d, 0]."""
        return all(0.0 <= r.u <= d and -d <= r.v <= 0.0 for r in self.rows)


def _closed_form_slope(tag: ScheduleTag, triple: CouplingTriple) -> float | None:
    """Effective line slope k with z = k*d/(k + lam) along the tagged sequence."""
    if triple.variant is Variant.DYADIC:
        if tag is ScheduleTag.MU:
            return triple.params.k2
        if tag is ScheduleTag.NU:
            return triple.params.k_star
    else:
        if tag is ScheduleTag.SINLOG2:
            return 2.0
        if tag is ScheduleTag.SINLOG3:
            return 3.0
    return None


def _assemble_report(rows: Sequence[SweepRow]) -> SweepReport:
    per_tag_last = {}
    for row in rows:
        per_tag_last[row.tag] = row.u
    if len(per_tag_last) >= 2:
        lo = min(per_tag_last.values())
        hi = max(per_tag_last.values())
    else:
        trailing = [r.u for r in rows[-max(1, len(rows) // 4):]]
        lo, hi = min(trailing), max(trailing)
    return SweepReport(rows=tuple(rows), cluster_lo=lo, cluster_hi=hi, gap=hi - lo)


def run_sweep(triple: CouplingTriple, schedule, cfg: SolverConfig = DEFAULT_CONFIG) -> SweepReport:
    """Solve every level of one schedule (or a sequence of schedules).

    Rows of tagged closed-form sequences carry the larger of the z- and
    u-deviations from the line-crossing formulas.  Cluster estimates come from
    the last row of each tag when several tags are present, otherwise from the
    trailing quarter of the single schedule.
    """
    schedules = [schedule] if isinstance(schedule, DiscountSchedule) else list(schedule)
    if not schedules or any(len(s) == 0 for s in schedules):
        raise PreconditionError("run_sweep needs at least one nonempty schedule")
    k0, d = triple.k0, triple.d
    rows, failures = [], []
    for sched in schedules:
        k_eff = _closed_form_slope(sched.tag, triple)
        for j, lam in sched.indexed():
            try:
                sol = solve_reduced(triple, lam, cfg)
            except SolverError as err:
                failures.append((sched.tag.value, j, lam, err))
                continue
            cf_err = None
            if k_eff is not None:
                z_cf = k_eff * d / (k_eff + lam)
                u_cf = k0 * d / (k_eff + lam)
                cf_err = max(abs(sol.z - z_cf), abs(sol.u - u_cf))
            rows.append(SweepRow(tag=sched.tag.value, j=j, lam=lam, z=sol.z, u=sol.u, v=sol.v,
                                 residual_u=sol.residual_u, residual_v=sol.residual_v,
                                 closed_form_err=cf_err))
    if failures:
        raise PartialReportError(failures, rows)
    return _assemble_report(rows)


@dataclass(frozen=True)
class NonconvergenceResult:
    """Cluster estimates, their gap, and the box check over both sequences."""

    liminf_est: float
    limsup_est: float
    gap: float
    bounds_ok: bool
    v_liminf_est: float
    v_limsup_est: float
    target_lo: float
    target_hi: float
    j_max: int
    report: SweepReport


def verify_nonconvergence(triple: CouplingTriple, j_max: int = 40,
                          cfg: SolverConfig = DEFAULT_CONFIG) -> NonconvergenceResult:
    """Run both tagged sequences to j_max and certify the two distinct limits.

    A strictly positive gap between the trailing values of u along the two
    sequences, inside the comparison box, is the finite-resolution witness
    that the solution family cannot converge as the discount vanishes.
    """
    if j_max < 5:
        raise PreconditionError(f"j_max must be at least 5, got {j_max}")
    params, d, k0 = triple.params, triple.d, triple.k0
    if triple.variant is Variant.DYADIC:
        tag_lo, tag_hi = ScheduleTag.MU, ScheduleTag.NU
        target_lo, target_hi = k0 * d / params.k2, k0 * d / params.k_star
    else:
        tag_lo, tag_hi = ScheduleTag.SINLOG3, ScheduleTag.SINLOG2
        target_lo, target_hi = k0 * d / 3.0, k0 * d / 2.0
    sched_lo = make_schedule(params, tag_lo, 1, j_max)
    sched_hi = make_schedule(params, tag_hi, 1, j_max)
    report = run_sweep(triple, [sched_lo, sched_hi], cfg)
    last = {row.tag: row for row in report.rows}
    row_lo, row_hi = last[tag_lo.value], last[tag_hi.value]
    return NonconvergenceResult(
        liminf_est=row_lo.u,
        limsup_est=row_hi.u,
        gap=row_hi.u - row_lo.u,
        bounds_ok=report.bounds_ok(d),
        v_liminf_est=row_lo.v,
        v_limsup_est=row_hi.v,
        target_lo=target_lo,
        target_hi=target_hi,
        j_max=j_max,
        report=report,
    )


def _fmt(value: float | None) -> str:
    if value is None:
        return "nan"
    return format(value, ".17g")


def write_sweep_csv(report: SweepReport, path) -> None:
    """Write rows with 17 significant digits; byte-deterministic for a given report."""
    with_constancy = any(r.constancy is not None for r in report.rows)
    columns = CSV_COLUMNS + (("constancy",) if with_constancy else ())
    lines = [",".join(columns)]
    for r in report.rows:
        cells = [r.tag, str(r.j), _fmt(r.lam), _fmt(r.z), _fmt(r.u), _fmt(r.v),
                 _fmt(r.residual_u), _fmt(r.residual_v), _fmt(r.closed_form_err)]
        if with_constancy:
            cells.append(_fmt(r.constancy))
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def sweep_summary(report: SweepReport, triple: CouplingTriple, extra: dict | None = None) -> dict:
    """JSON-ready summary: clusters, gap, box check, and a parameter echo."""
    p = triple.params
    summary = {
        "params": {"k0": p.k0, "k1": p.k1, "k2": p.k2, "k_star": p.k_star, "d": p.d},
        "variant": triple.variant.value,
        "rows": len(report.rows),
        "tags": sorted({r.tag for r in report.rows}),
        "cluster_lo": report.cluster_lo,
        "cluster_hi": report.cluster_hi,
        "gap": report.gap,
        "bounds_ok": report.bounds_ok(p.d),
    }
    if extra:
        summary.update(extra)
    return summary


def write_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
