"""Monotone coupling functions built on a self-similar piecewise-linear envelope.

The construction lives on the xy-plane.  Fix slopes 0 < k0 < k1 < k2 and a
fourth slope k_star with (k1+k2)/2 < k_star < k2.  A piecewise-linear block
``psi`` equals k2*x outside (-1, -1/2); inside, it is the lower of the line
through R = (-1, -k2) with slope k_plus and the line through Q = (-1/2, -k2/2)
with slope k1.  Those two lines cross at S = (x_star, y_star) on the ray
y = k_star * x, which pins down the derived geometry:

    x_star = (k1 - k2) / (2 (k_star - k1))        in (-1, -1/2),
    y_star = k_star * x_star,
    k_plus = (y_star + k2) / (x_star + 1) > k2.

Dyadic rescalings psi_j(x) = 2^{-j} psi(2^j x), j >= 1, bump the graph above
the ray y = k2*x on each interval (-2^{-j}, -2^{-j-1}); their upper envelope
``eta`` equals k2*x everywhere else.  Because x -> psi(x) - k1*x is
nondecreasing, so is eta(x) - k1*x, and (2^{-j} x_star, 2^{-j} y_star) lies on
the graph of eta for every j.

The coupling triple anchored at an offset d is then

    h(x) = eta(x - d),   f(x) = k0 (x - d),   g(x) = f(-x) - h(-x),

so that h(x) = f(x) - g(-x) identically, f(d) = h(d) = g(-d) = 0, f and g are
increasing, and g(x) - (k1 - k0) x is nondecreasing.

A second variant replaces the dyadic envelope with x (sin(log|x|) + 2), whose
derivative sin(log|x|) + cos(log|x|) + 2 stays inside [2 - sqrt 2, 2 + sqrt 2];
then the graph of h meets the lines of slope 2 and 3 through (d, 0) at
argument offsets -exp(-2 pi n) and -exp(-2 pi n + pi/2) respectively.

Evaluation never scans the rescaling index: the unique j with
x in (-2^{-j}, -2^{-j-1}) is read off the binary exponent of -x (math.frexp)
and the rescaling uses math.ldexp, both exact in binary floating point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParamDomainError

__all__ = [
    "Variant",
    "CouplingParams",
    "DerivedGeometry",
    "CouplingTriple",
    "RawCoupling",
    "DEFAULT_PARAMS",
    "DEFAULT_SINLOG_PARAMS",
    "SINLOG_SLOPE_MIN",
    "SINLOG_SLOPE_MAX",
    "derive_geometry",
    "make_triple",
    "psi_eval",
    "eta_eval",
    "h_eval",
    "f_eval",
    "g_eval",
    "sinlog_envelope",
]

SINLOG_SLOPE_MIN = 2.0 - math.sqrt(2.0)
SINLOG_SLOPE_MAX = 2.0 + math.sqrt(2.0)

# Below this dyadic depth the envelope correction falls under the resolution
# of subnormal floats; returning the anchor line keeps eta monotone.
_MAX_DYADIC_DEPTH = 1060


class Variant(enum.Enum):
    DYADIC = "dyadic"
    SINLOG = "sinlog"


@dataclass(frozen=True)
class CouplingParams:
    """Slope quadruple plus anchor offset for the coupling construction.

    ``d >= 1`` is required by default; pass ``allow_small_d=True`` to accept
    any d > 0 (the construction itself only needs positivity).
    """

    k0: float
    k1: float
    k2: float
    k_star: float
    d: float
    allow_small_d: bool = field(default=False, compare=False)

    def __post_init__(self):
        vals = (self.k0, self.k1, self.k2, self.k_star, self.d)
        if not all(math.isfinite(v) for v in vals):
            raise ParamDomainError(f"parameters must be finite, got {vals}")
        if not 0.0 < self.k0 < self.k1 < self.k2:
            raise ParamDomainError(
                f"slope ordering 0 < k0 < k1 < k2 violated: "
                f"k0={self.k0}, k1={self.k1}, k2={self.k2}"
            )
        if not 0.5 * (self.k1 + self.k2) < self.k_star < self.k2:
            raise ParamDomainError(
                f"k_star={self.k_star} outside ((k1+k2)/2, k2) = "
                f"({0.5 * (self.k1 + self.k2)}, {self.k2})"
            )
        if self.allow_small_d:
            if not self.d > 0.0:
                raise ParamDomainError(f"d={self.d} must be positive")
        elif not self.d >= 1.0:
            raise ParamDomainError(
                f"d={self.d} < 1; pass allow_small_d=True to permit any d > 0"
            )


@dataclass(frozen=True)
class DerivedGeometry:
    """Crossing point S = (x_star, y_star) and the induced steep slope k_plus."""

    x_star: float
    y_star: float
    k_plus: float


def derive_geometry(params: CouplingParams) -> DerivedGeometry:
    """Intersect y = k_star*x with y = -k2/2 + k1 (x + 1/2) and derive k_plus.

    Raises ParamDomainError if the crossing leaves (-1, -1/2) or k_plus <= k2,
    which would mean the piecewise construction degenerates.
    """
    k1, k2, ks = params.k1, params.k2, params.k_star
    x_star = (k1 - k2) / (2.0 * (ks - k1))
    y_star = ks * x_star
    k_plus = (y_star + k2) / (x_star + 1.0)
    if not -1.0 < x_star < -0.5:
        raise ParamDomainError(f"crossing abscissa x_star={x_star} outside (-1, -1/2)")
    if not k_plus > k2:
        raise ParamDomainError(f"derived slope k_plus={k_plus} not above k2={k2}")
    return DerivedGeometry(x_star=x_star, y_star=y_star, k_plus=k_plus)


def psi_eval(params: CouplingParams, geometry: DerivedGeometry, x: float) -> float:
    """Piecewise-linear block: k2*x outside (-1, -1/2), min of the two chords inside."""
    k2 = params.k2
    if x <= -1.0 or x >= -0.5:
        return k2 * x
    # x + 1 and x + 0.5 are exact here (Sterbenz), so each chord costs one rounding.
    steep = -k2 + geometry.k_plus * (x + 1.0)
    shallow = -0.5 * k2 + params.k1 * (x + 0.5)
    return steep if steep < shallow else shallow


def eta_eval(params: CouplingParams, geometry: DerivedGeometry, x: float) -> float:
    """Upper envelope of the dyadic rescalings of psi.

    Resolves the active index j from the binary exponent of -x instead of
    maximizing over j; dyadic endpoints (where all branches agree) and depths
    beyond subnormal resolution return the anchor value k2*x.
    """
    k2 = params.k2
    if x >= 0.0 or x <= -0.5:
        return k2 * x
    m, e = math.frexp(-x)  # -x = m * 2**e with m in [0.5, 1)
    j = -e
    if m == 0.5 or j > _MAX_DYADIC_DEPTH:
        return k2 * x
    return math.ldexp(psi_eval(params, geometry, math.ldexp(x, j)), -j)


def sinlog_envelope(s: float) -> float:
    """x (sin(log|x|) + 2) with value 0 at 0; slope stays in [2-sqrt2, 2+sqrt2]."""
    if s == 0.0:
        return 0.0
    return s * (math.sin(math.log(abs(s))) + 2.0)


@dataclass(frozen=True)
class CouplingTriple:
    """Evaluable monotone triple (f, g, h) with its structural metadata.

    Immutable and stateless after construction; safe to share across threads.
    """

    params: CouplingParams
    geometry: DerivedGeometry
    variant: Variant

    @property
    def d(self) -> float:
        return self.params.d

    @property
    def k0(self) -> float:
        return self.params.k0

    @property
    def h_slope_min(self) -> float:
        """Lower bound on the slope of h (hence on eta)."""
        return self.params.k1 if self.variant is Variant.DYADIC else SINLOG_SLOPE_MIN

    @property
    def h_slope_max(self) -> float:
        """Upper bound on the slope of h."""
        return self.geometry.k_plus if self.variant is Variant.DYADIC else SINLOG_SLOPE_MAX

    @property
    def lipschitz(self) -> float:
        """Largest slope among the couplings f and g."""
        return max(self.k0, self.h_slope_max - self.k0)

    # -- scalar evaluation ---------------------------------------------------

    def h_offset(self, s: float) -> float:
        """h(d + s) evaluated directly from the offset s, with no cancellation."""
        if self.variant is Variant.DYADIC:
            return eta_eval(self.params, self.geometry, s)
        return sinlog_envelope(s)

    def f_offset(self, s: float) -> float:
        """f(d + s) = k0 * s."""
        return self.k0 * s

    def psi(self, x: float) -> float:
        return psi_eval(self.params, self.geometry, x)

    def eta(self, x: float) -> float:
        if self.variant is Variant.DYADIC:
            return eta_eval(self.params, self.geometry, x)
        return sinlog_envelope(x)

    def h(self, x: float) -> float:
        return self.h_offset(x - self.d)

    def f(self, x: float) -> float:
        return self.k0 * (x - self.d)

    def g(self, x: float) -> float:
        return self.f(-x) - self.h(-x)

    # -- vectorized evaluation (numpy) ----------------------------------------

    def eta_many(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.variant is Variant.SINLOG:
            safe = np.where(x == 0.0, 1.0, np.abs(x))
            return x * (np.sin(np.log(safe)) + 2.0)
        k2 = self.params.k2
        m, e = np.frexp(-x)
        j = -e
        active = (x < 0.0) & (x > -0.5) & (m > 0.5) & (j <= _MAX_DYADIC_DEPTH)
        j = np.where(active, j, 0)
        y = np.ldexp(x, j)
        steep = -k2 + self.geometry.k_plus * (y + 1.0)
        shallow = -0.5 * k2 + self.params.k1 * (y + 0.5)
        return np.where(active, np.ldexp(np.minimum(steep, shallow), -j), k2 * x)

    def h_many(self, x) -> np.ndarray:
        return self.eta_many(np.asarray(x, dtype=float) - self.d)

    def f_many(self, x) -> np.ndarray:
        return self.k0 * (np.asarray(x, dtype=float) - self.d)

    def g_many(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.f_many(-x) - self.h_many(-x)


def make_triple(params: CouplingParams, variant: Variant = Variant.DYADIC) -> CouplingTriple:
    """Validate parameters for the requested variant and assemble the triple."""
    if variant is Variant.SINLOG and not params.k0 < SINLOG_SLOPE_MIN:
        raise ParamDomainError(
            f"sin-log variant needs k0 < 2 - sqrt(2) = {SINLOG_SLOPE_MIN:.6f} "
            f"to keep g increasing, got k0={params.k0}"
        )
    return CouplingTriple(params=params, geometry=derive_geometry(params), variant=variant)


def h_eval(triple: CouplingTriple, x: float) -> float:
    """h(x) = envelope(x - d) for the triple's variant."""
    return triple.h(x)


def f_eval(triple: CouplingTriple, x: float) -> float:
    """f(x) = k0 (x - d)."""
    return triple.f(x)


def g_eval(triple: CouplingTriple, x: float) -> float:
    """g(x) = f(-x) - h(-x); increasing, with g(x) - (k1 - k0) x nondecreasing."""
    return triple.g(x)


@dataclass(frozen=True)
class RawCoupling:
    """Escape hatch handing the solver arbitrary nondecreasing callables f, g.

    Only used to exercise solver error paths and genericity in tests; carries
    the anchor and a Lipschitz hint instead of structural metadata.
    """

    f: Callable[[float], float]
    g: Callable[[float], float]
    d: float = 1.0
    lipschitz: float = 1.0

    def h(self, x: float) -> float:
        return self.f(x) - self.g(-x)

    def h_offset(self, s: float) -> float:
        return self.h(self.d + s)

    def f_offset(self, s: float) -> float:
        return self.f(self.d + s)


DEFAULT_PARAMS = CouplingParams(k0=0.5, k1=1.0, k2=2.0, k_star=1.6, d=1.0)
DEFAULT_SINLOG_PARAMS = CouplingParams(k0=0.25, k1=1.0, k2=2.0, k_star=1.6, d=1.0)
