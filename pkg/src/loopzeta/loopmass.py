"""Brownian loop masses on model surfaces and the determinant expansions.

The mass of loops in a quadratic-variation window reduces, per eigenvalue, to
differences of exponential integrals; the expansion residuals subtract the
volume, boundary and constant terms together with the zeta determinant and
should vanish at the theorem's stated rates as the window opens up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .surfaces import ModelSurface
from .zeta import (
    EULER_GAMMA,
    _E1_CUT,
    _geometric_quadrature,
    log_det_zeta,
    mellin_zeta,
)


@dataclass(frozen=True)
class LoopMassQuery:
    """Mass of loops with quadratic variation in (qv_low, qv_high), penalized
    by exp(-kappa/4 * QV)."""

    surface: ModelSurface
    qv_low: float
    qv_high: float = math.inf
    kappa: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.qv_low < self.qv_high:
            raise ValueError("require 0 < qv_low < qv_high")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if (
            self.surface.is_closed
            and math.isinf(self.qv_high)
            and self.kappa == 0.0
        ):
            raise ValueError(
                "divergent query: closed surface, no cap, no penalization"
            )


def _window_exp1(x_lo: float, x_hi: float) -> float:
    """int_{x_lo}^{x_hi} v^-1 e^-v dv, window of the exponential integral."""
    lo = special.exp1(x_lo) if x_lo < 700 else 0.0
    hi = special.exp1(x_hi) if x_hi < 700 else 0.0
    return float(lo - hi)


def loop_mass(query: LoopMassQuery) -> float:
    """Loop mass in the QV window, summed exactly per eigenvalue.

    The window (qv_low, qv_high) = (4 delta, 4 C) corresponds to the time
    integral int_delta^C t^-1 e^{-kappa t} tr(e^{-t Lap}) dt; each eigenvalue
    contributes E1((lam+kappa) delta) - E1((lam+kappa) C).
    """
    delta = query.qv_low / 4.0
    cap = query.qv_high / 4.0
    surface = query.surface
    kappa = query.kappa

    cutoff = _E1_CUT / delta
    stream = surface.eigen_stream(cutoff)
    lam, mult = stream.eigenvalues, stream.multiplicities
    total = 0.0
    nz = lam > 1e-14
    shifted = lam[nz] + kappa
    x_lo = shifted * delta
    keep = x_lo < 700.0
    lo = special.exp1(x_lo[keep])
    if math.isinf(cap):
        hi = np.zeros_like(lo)
    else:
        x_hi = shifted[keep] * cap
        hi = np.where(x_hi < 700.0, special.exp1(np.minimum(x_hi, 700.0)), 0.0)
    total += float(np.sum(mult[nz][keep] * (lo - hi)))
    if surface.zero_modes:
        if kappa > 0.0:
            total += _window_exp1(kappa * delta, kappa * cap) if not math.isinf(
                cap
            ) else float(special.exp1(kappa * delta))
        else:
            total += math.log(cap / delta)
    return total


def loop_mass_quadrature(query: LoopMassQuery, panels_per_octave: int = 1) -> float:
    """The same QV-window integral by direct quadrature over the heat trace;
    kept as an independent cross-check of loop_mass."""
    delta = query.qv_low / 4.0
    cap = query.qv_high / 4.0
    surface = query.surface
    kappa = query.kappa
    if math.isinf(cap):
        rate = surface.spectral_gap() + kappa
        if surface.zero_modes and kappa > 0.0:
            rate = kappa  # the zero mode decays only through the penalty
        cap = delta + _E1_CUT / rate

    def integrand(t):
        tr = np.array([surface.heat_trace(ti) for ti in np.atleast_1d(t)])
        return np.exp(-kappa * t) * tr / t

    n = 24 * panels_per_octave
    value, _ = _geometric_quadrature(integrand, delta, cap, n=n)
    return value


def theorem_residual_boundary(
    surface: ModelSurface, delta: float, delta_split: float = 0.05
) -> float:
    """Residual of the boundary-case expansion of the mass of loops with
    QV > 4 delta; should be O(sqrt(delta))."""
    if surface.is_closed:
        raise ValueError("boundary-case residual needs a surface with boundary")
    hc = surface.heat_coefficients()
    lhs = loop_mass(LoopMassQuery(surface, 4.0 * delta))
    log_det = log_det_zeta(surface, delta_split).log_det
    # volume and boundary terms written via the signed heat coefficients:
    # a/delta = Vol/(4 pi delta); 2b/sqrt(delta) = -Len/(4 sqrt(pi delta))
    # since b < 0 for Dirichlet boundary; the constant uses c_coef (chi/6 for
    # smooth boundary, corner-corrected for the rectangle)
    rhs = (
        hc.a_coef / delta
        + 2.0 * hc.b_coef / math.sqrt(delta)
        - log_det
        - hc.c_coef * (math.log(delta) + EULER_GAMMA)
    )
    return lhs - rhs


def theorem_residual_closed(
    surface: ModelSurface, delta: float, cap_c: float, delta_split: float = 0.05
) -> float:
    """Residual of the closed-case expansion of the mass of loops with QV in
    (4 delta, 4 C); should be O(delta) + O(e^{-alpha C})."""
    if not surface.is_closed:
        raise ValueError("closed-case residual needs a closed surface")
    hc = surface.heat_coefficients()
    lhs = loop_mass(LoopMassQuery(surface, 4.0 * delta, 4.0 * cap_c))
    log_det = log_det_zeta(surface, delta_split).log_det
    rhs = (
        hc.a_coef / delta
        - hc.c_coef * (math.log(delta) + EULER_GAMMA)
        + math.log(cap_c)
        + EULER_GAMMA
        - log_det
    )
    return lhs - rhs


def decay_residual(
    surface: ModelSurface, delta: float, kappa: float, delta_split: float = 0.05
) -> float:
    """Residual of the exponentially penalized loop-mass expansion on a closed
    surface; tends to zero as kappa then delta go to zero."""
    if not surface.is_closed:
        raise ValueError("decay residual needs a closed surface")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    hc = surface.heat_coefficients()
    lhs = loop_mass(LoopMassQuery(surface, 4.0 * delta, math.inf, kappa))
    log_det = log_det_zeta(surface, delta_split).log_det
    rhs = (
        hc.a_coef / delta
        - hc.c_coef * (math.log(delta) + EULER_GAMMA)
        - math.log(kappa)
        - log_det
    )
    return lhs - rhs


def zeta_from_weighted_loops(surface: ModelSurface, s: float) -> float:
    """zeta(s) as the loop mass with each loop weighted by QV^s / (4^s Gamma(s)).

    With QV = 2u for a loop of time-length u this is the Mellin transform of
    the heat trace, evaluated by quadrature.
    """
    if surface.is_closed:
        raise ValueError("weighted-loop zeta requires a surface with boundary")
    if s <= 1.0:
        raise ValueError("require s > 1")
    return mellin_zeta(surface, s)


def fit_log_slope(xs, ys) -> float:
    """Least-squares slope of log|y| against log x."""
    xs = np.asarray(xs, dtype=float)
    ys = np.abs(np.asarray(ys, dtype=float))
    if np.any(ys == 0):
        raise ValueError("zero residual in slope fit")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
