"""Semiclassical (JWKB) dwell, traversal and transmission quantities.

All times are in atomic units of time; with M = hbar = 1 the classical
under-barrier speed equals the wavenumber k(x) = sqrt(2 (V(x) - E)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ROOT_TOL, BarrierGeometry, find_turning_points
from .quadrature import DEFAULT_RTOL, BarrierIntegrals, ConvergenceFailure, converged_integrals

__all__ = [
    "ConvergenceFailure",
    "TimeResult",
    "dwell_time",
    "evaluate",
    "split_dwell_times",
    "transmission",
    "traversal_time",
    "wkb_k",
]


@dataclass(frozen=True)
class TimeResult:
    """Times and coefficients for one (model, F, gamma) evaluation.

    ``tau_dr`` is ``math.inf`` when the barrier reflects nothing.
    """

    tau_d: float
    tau_traversal: float
    t2: float
    tau_dt: float
    tau_dr: float
    geometry: BarrierGeometry
    gamma: float = 0.0
    delta_e: float = 0.0
    action: float = 0.0
    panels: int = 0

    @property
    def r2(self) -> float:
        return 1.0 - self.t2

    @property
    def no_reflection(self) -> bool:
        return math.isinf(self.tau_dr)


def _kfun(model, f, e):
    def k(x):
        d = np.asarray(model.potential(x, f), dtype=float) - e
        # round-off right at a turning point
        return np.sqrt(2.0 * np.maximum(d, 0.0))

    return k


def wkb_k(model, f, e, x, tol=ROOT_TOL):
    """Under-barrier wavenumber sqrt(2 (V(x) - E)) in inverse bohr."""
    d = np.asarray(model.potential(x, f), dtype=float) - e
    if np.any(d < -tol):
        raise ValueError("wkb_k is only defined where V(x) >= E")
    k = np.sqrt(2.0 * np.maximum(d, 0.0))
    return float(k) if k.ndim == 0 else k


def barrier_integrals(model, f, e, geometry: BarrierGeometry, rtol=DEFAULT_RTOL, panels=None) -> BarrierIntegrals:
    return converged_integrals(
        _kfun(model, f, e), geometry.x1, geometry.x_max, geometry.x2, rtol=rtol, panels=panels
    )


def dwell_time(model, f, e, geometry: BarrierGeometry, rtol=DEFAULT_RTOL, panels=None) -> float:
    """Average JWKB dwell time inside [x1, x2].

    tau_D = int_{x1}^{x2} dx / k(x) * exp(-2 int_{x1}^{x} k(x') dx')
    """
    return barrier_integrals(model, f, e, geometry, rtol, panels).dwell


def traversal_time(model, f, e, geometry: BarrierGeometry, rtol=DEFAULT_RTOL, panels=None) -> float:
    """Semiclassical traversal time int dx / v(x) with v = k."""
    return barrier_integrals(model, f, e, geometry, rtol, panels).traversal


def transmission(model, f, e, geometry: BarrierGeometry, rtol=DEFAULT_RTOL, panels=None) -> float:
    """JWKB transmission probability exp(-2 int k dx)."""
    if geometry.x2 <= geometry.x1:
        return 1.0
    return barrier_integrals(model, f, e, geometry, rtol, panels).transmission


def split_dwell_times(tau_d: float, t2: float) -> tuple[float, float]:
    """Transmission and reflection dwell times tau_D/|T|^2 and tau_D/|R|^2.

    The reflection dwell time is ``math.inf`` when |T|^2 = 1.
    """
    if not tau_d > 0:
        raise ValueError(f"tau_d must be positive, got {tau_d}")
    if not 0.0 < t2 <= 1.0:
        raise ValueError(f"transmission probability must lie in (0, 1], got {t2}")
    r2 = 1.0 - t2
    return tau_d / t2, (tau_d / r2 if r2 > 0 else math.inf)


def time_result(integrals: BarrierIntegrals, geometry, gamma=0.0, delta_e=0.0) -> TimeResult:
    t2 = integrals.transmission
    tau_dt, tau_dr = split_dwell_times(integrals.dwell, t2)
    return TimeResult(
        tau_d=integrals.dwell,
        tau_traversal=integrals.traversal,
        t2=t2,
        tau_dt=tau_dt,
        tau_dr=tau_dr,
        geometry=geometry,
        gamma=gamma,
        delta_e=delta_e,
        action=integrals.action,
        panels=integrals.panels,
    )


def evaluate(model, f, e=None, rtol=DEFAULT_RTOL, panels=None, tol=0.0) -> TimeResult:
    """Full non-dissipative pipeline: turning points, then all times."""
    if e is None:
        e = model.energy(f)
    geometry = find_turning_points(model, f, e, tol=tol)
    return time_result(barrier_integrals(model, f, e, geometry, rtol, panels), geometry)
