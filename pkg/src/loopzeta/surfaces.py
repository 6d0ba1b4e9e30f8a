"""Model surfaces with explicit Laplace spectra and certified heat traces.

Five closed-form geometries are supported: the Dirichlet interval (a 1-D
calibration case), the Dirichlet rectangle, the rectangular flat torus, the
round sphere and the Dirichlet disk.  Each surface knows its geometric
constants, its spectrum below a cutoff, and how to evaluate tr(e^{-t Lap})
with a truncation error far below 1e-13.  For the lattice-type surfaces
(interval, rectangle, torus) the trace switches to dual theta sums at small
t; the sphere and disk always use eigenvalue sums with adaptive cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

# exponent beyond which dropped terms are < 1e-22 relative
_TAIL_EXPONENT = 50.0
# crossover between eigen-sum and theta-dual evaluation for lattice surfaces
_T_CROSSOVER = 0.05


class EnumerationBudgetError(RuntimeError):
    """Raised when a spectral enumeration would exceed its budget."""

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"spectral enumeration needs ~{required} eigenvalues, budget is {budget}"
        )
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class HeatCoefficients:
    """Coefficients (a, b, c) of the small-t trace expansion a/t + b/sqrt(t) + c."""

    a_coef: float
    b_coef: float
    c_coef: float


@dataclass(frozen=True)
class EigenStream:
    """All eigenvalues of a surface up to a cutoff, with multiplicities."""

    surface: "ModelSurface"
    cutoff: float
    eigenvalues: np.ndarray
    multiplicities: np.ndarray

    def count(self) -> int:
        return int(self.multiplicities.sum())


class ModelSurface:
    """Base class; concrete surfaces implement the spectral primitives."""

    #: zero-eigenvalue multiplicity (1 for closed surfaces)
    zero_modes = 0

    @property
    def volume(self) -> float:
        raise NotImplementedError

    @property
    def boundary_length(self) -> float:
        raise NotImplementedError

    @property
    def euler_char(self) -> int:
        raise NotImplementedError

    @property
    def is_closed(self) -> bool:
        return self.zero_modes == 1

    def heat_coefficients(self) -> HeatCoefficients:
        raise NotImplementedError

    def spectral_gap(self) -> float:
        """Smallest nonzero eigenvalue."""
        stream = self.eigen_stream(self._gap_cutoff())
        lam = stream.eigenvalues
        return float(lam[lam > 1e-14][0])

    def _gap_cutoff(self) -> float:
        return 200.0

    def eigen_stream(self, cutoff: float, budget: int = 5_000_000) -> EigenStream:
        if cutoff <= 0:
            raise ValueError("cutoff must be positive")
        lam, mult = self._enumerate(cutoff, budget)
        order = np.argsort(lam, kind="stable")
        return EigenStream(self, cutoff, lam[order], mult[order])

    def _enumerate(self, cutoff: float, budget: int):
        raise NotImplementedError

    def heat_trace(self, t: float) -> float:
        """tr e^{-t Lap}, including the zero mode on closed surfaces."""
        raise NotImplementedError

    def short_time_prediction(self, t: float) -> float:
        hc = self.heat_coefficients()
        return hc.a_coef / t + hc.b_coef / math.sqrt(t) + hc.c_coef


def _interval_trace(t: float, length: float) -> float:
    """Dirichlet trace sum_{n>=1} exp(-t (n pi / L)^2), by theta duality at small t."""
    if t < _T_CROSSOVER * length * length:
        # Poisson-summed form: L/(2 sqrt(pi t)) * theta - 1/2
        theta = 1.0
        k = 1
        while length * length * k * k / t < _TAIL_EXPONENT:
            theta += 2.0 * math.exp(-length * length * k * k / t)
            k += 1
        return length / (2.0 * math.sqrt(math.pi * t)) * theta - 0.5
    n_max = int(math.ceil(length / math.pi * math.sqrt(_TAIL_EXPONENT / t))) + 1
    n = np.arange(1, n_max + 1)
    return float(np.exp(-t * (n * math.pi / length) ** 2).sum())


def _torus_factor(t: float, period: float) -> float:
    """sum_{m in Z} exp(-4 pi^2 t m^2 / a^2), by theta duality at small t."""
    if t < _T_CROSSOVER * period * period:
        theta = 1.0
        k = 1
        while period * period * k * k / (4.0 * t) < _TAIL_EXPONENT:
            theta += 2.0 * math.exp(-period * period * k * k / (4.0 * t))
            k += 1
        return period / (2.0 * math.sqrt(math.pi * t)) * theta
    m_max = int(math.ceil(period / (2 * math.pi) * math.sqrt(_TAIL_EXPONENT / t))) + 1
    m = np.arange(1, m_max + 1)
    return float(1.0 + 2.0 * np.exp(-4.0 * math.pi**2 * t * m**2 / period**2).sum())


@dataclass(frozen=True)
class IntervalDirichlet(ModelSurface):
    length: float = 1.0

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("length must be positive")

    @property
    def volume(self) -> float:
        return self.length

    @property
    def boundary_length(self) -> float:
        return 0.0

    @property
    def euler_char(self) -> int:
        return 1

    def heat_coefficients(self) -> HeatCoefficients:
        return HeatCoefficients(0.0, self.length / (2.0 * math.sqrt(math.pi)), -0.5)

    def _enumerate(self, cutoff, budget):
        n_max = int(math.floor(self.length / math.pi * math.sqrt(cutoff)))
        if n_max > budget:
            raise EnumerationBudgetError(n_max, budget)
        n = np.arange(1, n_max + 1, dtype=float)
        lam = (n * math.pi / self.length) ** 2
        return lam, np.ones_like(lam)

    def heat_trace(self, t: float) -> float:
        return _interval_trace(t, self.length)


@dataclass(frozen=True)
class RectangleDirichlet(ModelSurface):
    side_a: float = 1.0
    side_b: float = 1.0

    def __post_init__(self):
        if self.side_a <= 0 or self.side_b <= 0:
            raise ValueError("sides must be positive")

    @property
    def volume(self) -> float:
        return self.side_a * self.side_b

    @property
    def boundary_length(self) -> float:
        return 2.0 * (self.side_a + self.side_b)

    @property
    def euler_char(self) -> int:
        return 1

    def heat_coefficients(self) -> HeatCoefficients:
        # constant term 1/4, not chi/6: four right-angle corners, forced by
        # the exact product structure of the interval traces
        return HeatCoefficients(
            self.side_a * self.side_b / (4.0 * math.pi),
            -(self.side_a + self.side_b) / (4.0 * math.sqrt(math.pi)),
            0.25,
        )

    def _enumerate(self, cutoff, budget):
        a, b = self.side_a, self.side_b
        m_max = int(math.floor(a / math.pi * math.sqrt(cutoff)))
        n_max = int(math.floor(b / math.pi * math.sqrt(cutoff)))
        if m_max * n_max > budget:
            raise EnumerationBudgetError(m_max * n_max, budget)
        m = np.arange(1, m_max + 1, dtype=float)
        n = np.arange(1, n_max + 1, dtype=float)
        lam = (math.pi**2 * (m[:, None] ** 2 / a**2 + n[None, :] ** 2 / b**2)).ravel()
        lam = lam[lam <= cutoff]
        return lam, np.ones_like(lam)

    def heat_trace(self, t: float) -> float:
        return _interval_trace(t, self.side_a) * _interval_trace(t, self.side_b)


@dataclass(frozen=True)
class FlatTorus(ModelSurface):
    side_a: float = 1.0
    side_b: float = 1.0
    zero_modes = 1

    def __post_init__(self):
        if self.side_a <= 0 or self.side_b <= 0:
            raise ValueError("sides must be positive")

    @property
    def volume(self) -> float:
        return self.side_a * self.side_b

    @property
    def boundary_length(self) -> float:
        return 0.0

    @property
    def euler_char(self) -> int:
        return 0

    def heat_coefficients(self) -> HeatCoefficients:
        return HeatCoefficients(self.side_a * self.side_b / (4.0 * math.pi), 0.0, 0.0)

    def _enumerate(self, cutoff, budget):
        a, b = self.side_a, self.side_b
        m_max = int(math.floor(a / (2 * math.pi) * math.sqrt(cutoff)))
        n_max = int(math.floor(b / (2 * math.pi) * math.sqrt(cutoff)))
        if (2 * m_max + 1) * (2 * n_max + 1) > budget:
            raise EnumerationBudgetError((2 * m_max + 1) * (2 * n_max + 1), budget)
        m = np.arange(-m_max, m_max + 1, dtype=float)
        n = np.arange(-n_max, n_max + 1, dtype=float)
        lam = (
            4.0 * math.pi**2 * (m[:, None] ** 2 / a**2 + n[None, :] ** 2 / b**2)
        ).ravel()
        lam = lam[lam <= cutoff]
        return lam, np.ones_like(lam)

    def heat_trace(self, t: float) -> float:
        return _torus_factor(t, self.side_a) * _torus_factor(t, self.side_b)


@dataclass(frozen=True)
class RoundSphere(ModelSurface):
    radius: float = 1.0
    zero_modes = 1

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def volume(self) -> float:
        return 4.0 * math.pi * self.radius**2

    @property
    def boundary_length(self) -> float:
        return 0.0

    @property
    def euler_char(self) -> int:
        return 2

    def heat_coefficients(self) -> HeatCoefficients:
        return HeatCoefficients(self.radius**2, 0.0, 1.0 / 3.0)

    def _enumerate(self, cutoff, budget):
        # l(l+1)/r^2 <= cutoff
        ell_max = int(math.floor((math.sqrt(1.0 + 4.0 * cutoff * self.radius**2) - 1) / 2))
        if ell_max + 1 > budget:
            raise EnumerationBudgetError(ell_max + 1, budget)
        ell = np.arange(0, ell_max + 1, dtype=float)
        return ell * (ell + 1) / self.radius**2, 2.0 * ell + 1.0

    def heat_trace(self, t: float) -> float:
        r2 = self.radius**2
        ell_max = int(math.ceil(math.sqrt(_TAIL_EXPONENT * r2 / t))) + 2
        ell = np.arange(0, ell_max + 1, dtype=float)
        return float(((2 * ell + 1) * np.exp(-t * ell * (ell + 1) / r2)).sum())


class _BesselZeroCache:
    """Zeros of J_nu shared across disk instances; grown on demand."""

    def __init__(self):
        self.j_max = 0.0
        self.zeros = np.empty(0)  # zero values
        self.orders = np.empty(0, dtype=int)  # corresponding nu

    def ensure(self, j_max: float, budget: int):
        if j_max <= self.j_max:
            return
        j_max = max(j_max * 1.05, 25.0)
        est = int(j_max * j_max / 8.0) + 100
        if est > budget:
            raise EnumerationBudgetError(est, budget)
        zeros, orders = [], []
        nu = 0
        while nu < j_max:
            # zeros of J_nu below J number ~ (sqrt(J^2-nu^2) - nu arccos(nu/J))/pi
            x = min(nu / j_max, 1.0)
            uniform = (j_max * math.sqrt(1 - x * x) - nu * math.acos(x)) / math.pi
            nt = max(1, int(uniform) + 3)
            z = special.jn_zeros(nu, nt)
            z = z[z <= j_max]
            if z.size == 0 and nu > 0:
                break
            zeros.append(z)
            orders.append(np.full(z.size, nu))
            nu += 1
        self.zeros = np.concatenate(zeros)
        self.orders = np.concatenate(orders)
        self.j_max = j_max


_BESSEL_CACHE = _BesselZeroCache()


@dataclass(frozen=True)
class DiskDirichlet(ModelSurface):
    radius: float = 1.0
    _trace_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def volume(self) -> float:
        return math.pi * self.radius**2

    @property
    def boundary_length(self) -> float:
        return 2.0 * math.pi * self.radius

    @property
    def euler_char(self) -> int:
        return 1

    def heat_coefficients(self) -> HeatCoefficients:
        # smooth boundary: constant term is chi/6 = 1/6 literally
        return HeatCoefficients(
            self.radius**2 / 4.0,
            -math.sqrt(math.pi) * self.radius / 4.0,
            1.0 / 6.0,
        )

    def _enumerate(self, cutoff, budget):
        j_max = self.radius * math.sqrt(cutoff)
        _BESSEL_CACHE.ensure(j_max, budget)
        sel = _BESSEL_CACHE.zeros <= j_max
        lam = (_BESSEL_CACHE.zeros[sel] / self.radius) ** 2
        mult = np.where(_BESSEL_CACHE.orders[sel] == 0, 1.0, 2.0)
        return lam, mult

    def _spectrum_for_t(self, t: float, budget: int = 5_000_000):
        cutoff = _TAIL_EXPONENT / t
        key = self._trace_cache.get("cutoff", 0.0)
        if cutoff > key:
            lam, mult = self._enumerate(cutoff, budget)
            self._trace_cache["cutoff"] = cutoff
            self._trace_cache["lam"] = lam
            self._trace_cache["mult"] = mult
        return self._trace_cache["lam"], self._trace_cache["mult"]

    def heat_trace(self, t: float) -> float:
        lam, mult = self._spectrum_for_t(t)
        sel = lam * t < _TAIL_EXPONENT
        return float((mult[sel] * np.exp(-t * lam[sel])).sum())


def parse_surface(spec: str) -> ModelSurface:
    """Parse CLI surface specs like 'torus:1.0x2.0', 'disk:1.0', 'interval:1.0'."""
    try:
        kind, _, params = spec.partition(":")
        kind = kind.strip().lower()
        if kind in ("rect", "rectangle"):
            a, b = (float(x) for x in params.split("x"))
            return RectangleDirichlet(a, b)
        if kind == "torus":
            a, b = (float(x) for x in params.split("x"))
            return FlatTorus(a, b)
        if kind == "sphere":
            return RoundSphere(float(params))
        if kind == "disk":
            return DiskDirichlet(float(params))
        if kind == "interval":
            return IntervalDirichlet(float(params))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"cannot parse surface spec {spec!r}") from exc
    raise ValueError(f"unknown surface kind in {spec!r}")
