"""Velocity-dependent friction acting on the tunneling electron.

The energy exchanged while crossing the barrier is gamma times the
integral of the under-barrier speed, evaluated on the unperturbed barrier
(first order in gamma). It is folded back into an effective potential
whose turning points are solved afresh, and the dwell time is evaluated on
that effective barrier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import BarrierGeometry, find_turning_points
from .quadrature import DEFAULT_RTOL, gauss_rule
from .times import _kfun, barrier_integrals, time_result, TimeResult

TOTAL_SHIFT = "total-shift"
CUMULATIVE = "cumulative"
MODES = (TOTAL_SHIFT, CUMULATIVE)

#: Sub-panels per half used when the running loss is evaluated pointwise.
_RUNNING_PANELS = 4
_CHUNK = 4096


@dataclass(frozen=True)
class FrictionSpec:
    """Friction coefficient and how the energy loss is accumulated.

    Positive gamma removes energy from the electron, negative gamma feeds
    it energy.
    """

    gamma: float = 0.0
    mode: str = TOTAL_SHIFT

    def __post_init__(self):
        if not abs(self.gamma) < 1:
            raise ValueError(f"|gamma| must be below 1, got {self.gamma}")
        if self.mode not in MODES:
            raise ValueError(f"unknown accumulation mode {self.mode!r}; use one of {MODES}")


def dissipated_energy(model, f, e, geometry: BarrierGeometry, gamma: float, rtol=DEFAULT_RTOL, panels=None) -> float:
    """Energy lost across the barrier, gamma * int_{x1}^{x2} k dx (hartree)."""
    if gamma == 0:
        return 0.0
    return gamma * barrier_integrals(model, f, e, geometry, rtol, panels).action


class RunningAction:
    """Pointwise action int_{x1}^{x} k dx' across a fixed barrier.

    Each evaluation point gets its own Gauss-Legendre sum in the square-root
    variable measured from the nearer turning point, so the result is a
    smooth function of x with no interpolation table.
    """

    def __init__(self, kfun, geometry: BarrierGeometry, total: float):
        self.kfun = kfun
        self.x1 = geometry.x1
        self.x2 = geometry.x2
        self.apex = geometry.x_max
        self.total = total

    def _from(self, turning, sign, x):
        if x.size > _CHUNK:
            return np.concatenate([self._from(turning, sign, x[i : i + _CHUNK]) for i in range(0, x.size, _CHUNK)])
        t, w, _ = gauss_rule()
        span = np.sqrt(np.abs(x - turning))
        frac = (np.arange(_RUNNING_PANELS)[:, None] + 0.5 * (t + 1.0)) / _RUNNING_PANELS
        u = span[:, None, None] * frac[None, :, :]
        dens = np.asarray(self.kfun(turning + sign * u * u), dtype=float) * 2.0 * u
        return np.sum(dens * w, axis=(1, 2)) * span / (2.0 * _RUNNING_PANELS)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        out = np.where(flat <= self.x1, 0.0, self.total)
        left = (flat > self.x1) & (flat <= self.apex)
        right = (flat > self.apex) & (flat < self.x2)
        if left.any():
            out[left] = self._from(self.x1, +1.0, flat[left])
        if right.any():
            out[right] = self.total - self._from(self.x2, -1.0, flat[right])
        return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


class EffectivePotential:
    """Base potential plus the friction energy shift.

    ``total-shift`` adds the full loss Delta E everywhere. ``cumulative``
    adds gamma times the running action from the inner turning point, i.e.
    the energy lost so far at each point of the unperturbed barrier.
    """

    def __init__(self, base, f, e, geometry, gamma, mode, action):
        self.base = base
        self.f = f
        self.e = e
        self.gamma = gamma
        self.mode = mode
        self.delta_e = gamma * action
        if mode == CUMULATIVE:
            self._running = RunningAction(_kfun(base, f, e), geometry, action)

    def shift(self, x):
        if self.mode == TOTAL_SHIFT:
            return self.delta_e + 0.0 * np.asarray(x, dtype=float)
        return self.gamma * self._running(x)

    def potential(self, x, f=None):
        return self.base.potential(x, self.f) + self.shift(x)

    def energy(self, f=None):
        return self.e

    def scan_window(self, f, e):
        if hasattr(self.base, "scan_window"):
            return self.base.scan_window(self.f, e)
        return 1e-3, 50.0


def effective_geometry_and_k(model, f, e, gamma, mode=TOTAL_SHIFT, rtol=DEFAULT_RTOL, tol=0.0):
    """Effective barrier geometry and wavenumber sqrt(2 (V_eff - E)).

    Returns ``(geometry, k_eff, effective_potential)``. Raises
    :class:`~tunneldwell.geometry.NoBarrier` when an energy gain lifts the
    electron over the barrier.
    """
    FrictionSpec(gamma, mode)
    geometry = find_turning_points(model, f, e, tol=tol)
    action = barrier_integrals(model, f, e, geometry, rtol).action
    veff = EffectivePotential(model, f, e, geometry, gamma, mode, action)
    if gamma == 0:
        eff_geometry = geometry
    else:
        eff_geometry = find_turning_points(veff, f, e, tol=tol)
    return eff_geometry, _kfun(veff, f, e), veff


def dissipative_dwell_time(model, f, e=None, gamma=0.0, mode=TOTAL_SHIFT, rtol=DEFAULT_RTOL, panels=None, tol=0.0) -> TimeResult:
    """Dwell time on the friction-modified barrier.

    The result carries gamma, Delta E and the effective turning points;
    its transmission and split dwell times refer to the effective barrier.
    """
    if e is None:
        e = model.energy(f)
    geometry, _, veff = effective_geometry_and_k(model, f, e, gamma, mode, rtol, tol)
    integrals = barrier_integrals(veff, f, e, geometry, rtol, panels)
    return time_result(integrals, geometry, gamma=gamma, delta_e=veff.delta_e)
