"""One-dimensional barrier potentials for a helium-like atom in a static field.

Two reductions of the 3-D problem are provided:

* ``spherical``: the radial potential along the direction opposite to the
  field (angle 180 degrees between field and position vector), so the dot
  product F.r equals -F r.
* ``parabolic``: the effective potential of the eta equation after the
  separation in parabolic coordinates (xi << eta).

Either may carry the exponentially damped screening correction of the
remaining 1s electron, and the parabolic curve may be replaced by a
piecewise-linear triangle with the same turning points.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .params import (
    BINDING,
    COORDINATE_SYSTEMS,
    HELIUM,
    PARABOLIC,
    SPHERICAL,
    AtomParams,
    separation_constants,
    tunneling_energy,
)

#: Range of the e^{-c/eta} regularization of the induced-dipole term.
POLARIZATION_CUTOFF = 3.0

TRIANGLE_RULES = ("area", "height")


def _positive(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError(f"{name} must be strictly positive")
    return x


def _scalar_or_array(v):
    return float(v) if np.ndim(v) == 0 else v


def spherical_terms(p: AtomParams, f, r) -> dict:
    """Term-by-term decomposition of the field-direction radial potential."""
    r = _positive(r, "r")
    return {
        "coulomb": -(p.Z - 1) / r,
        "screening": -(1.0 + r / (2.0 * p.r0)) * np.exp(-r / p.r0) / r,
        "polarization": p.alpha_i * f / r**2,
        "field": -f * r,
    }


def v_spherical(p: AtomParams, f, r, screening: bool = False):
    """Radial potential along the field direction (hartree).

    Unscreened: -(Z-1)/r + alpha_I F / r^2 - F r. The screened form adds
    -(1/r)(1 + r/(2 r0)) exp(-r/r0), which restores the bare charge Z at
    the nucleus.
    """
    t = spherical_terms(p, f, r)
    v = t["coulomb"] + t["polarization"] + t["field"]
    if screening:
        v = v + t["screening"]
    return _scalar_or_array(v)


def parabolic_terms(p: AtomParams, f, eta) -> dict:
    """Term-by-term decomposition of the eta-equation potential.

    ``polarization_bare`` is the induced-dipole term without the
    exponential regularization; it is not part of the total.
    """
    eta = _positive(eta, "eta")
    _, beta2 = separation_constants(p, f)
    bare = p.alpha_i * f / eta**2
    return {
        "coulomb": -beta2 / (2.0 * eta),
        "centrifugal": (p.m**2 - 1) / (8.0 * eta**2),
        "field": -f * eta / 8.0,
        "polarization": bare * np.exp(-POLARIZATION_CUTOFF / eta),
        "polarization_bare": bare,
        "screening": -(1.0 / eta + 1.0 / (4.0 * p.r0)) * np.exp(-eta / (2.0 * p.r0)),
    }


def v_parabolic(p: AtomParams, f, eta, screening: bool = False):
    """Effective eta potential (hartree).

    -beta2/(2 eta) + (m^2-1)/(8 eta^2) - F eta/8 + alpha_I F e^{-3/eta}/eta^2,
    plus -(1/eta + 1/(4 r0)) exp(-eta/(2 r0)) when screened.
    """
    t = parabolic_terms(p, f, eta)
    v = t["coulomb"] + t["centrifugal"] + t["field"] + t["polarization"]
    if screening:
        v = v + t["screening"]
    return _scalar_or_array(v)


@dataclass(frozen=True)
class PotentialModel:
    """A selected 1-D potential curve, evaluable for any field strength.

    Any object with ``potential(x, f)`` and ``energy(f)`` methods can be
    used wherever a ``PotentialModel`` is expected; ``scan_window(f, e)``
    is optional.
    """

    coords: str = PARABOLIC
    screening: bool = False
    triangle: bool = False
    params: AtomParams = HELIUM
    spherical_energy: str = BINDING
    triangle_rule: str = "area"

    def __post_init__(self):
        if self.coords not in COORDINATE_SYSTEMS:
            raise ValueError(f"unknown coordinate system {self.coords!r}")
        if self.triangle and self.coords != PARABOLIC:
            raise ValueError("the triangle approximation is only defined for the parabolic potential")
        if self.triangle_rule not in TRIANGLE_RULES:
            raise ValueError(f"unknown triangle rule {self.triangle_rule!r}")
        if self.screening and self.coords == SPHERICAL and self.params.Z - 1 != 1:
            raise ValueError("the screened radial potential assumes Z - 1 = 1")

    @property
    def smooth(self) -> "PotentialModel":
        """The same model without the triangle replacement."""
        if not self.triangle:
            return self
        return PotentialModel(self.coords, self.screening, False, self.params, self.spherical_energy)

    def potential(self, x, f):
        if self.triangle:
            return _cached_triangle(self.smooth, float(f), self.triangle_rule).potential(x, f)
        if self.coords == PARABOLIC:
            return v_parabolic(self.params, f, x, self.screening)
        return v_spherical(self.params, f, x, self.screening)

    def energy(self, f) -> float:
        return float(tunneling_energy(self.params, f, self.coords, self.spherical_energy))

    def terms(self, x, f) -> dict:
        if self.coords == PARABOLIC:
            return parabolic_terms(self.params, f, x)
        return spherical_terms(self.params, f, x)

    def field_crossing(self, f, e) -> float:
        """Abscissa where the linear field term alone reaches ``e``."""
        slope = f / 8.0 if self.coords == PARABOLIC else f
        return abs(e) / slope

    def scan_window(self, f, e) -> tuple[float, float]:
        return 1e-3, max(50.0, 4.0 * self.field_crossing(f, e))

    def label(self) -> str:
        parts = [self.coords, "screened" if self.screening else "unscreened"]
        if self.triangle:
            parts.append(f"triangle-{self.triangle_rule}")
        return "/".join(parts)


@dataclass(frozen=True)
class TriangleBarrier:
    """Piecewise-linear barrier through (x1, E), (x_apex, height), (x2, E).

    Outside [x1, x2] the two legs are extended linearly, so the curve
    crosses ``energy`` exactly at x1 and x2 and nowhere else.
    """

    x1: float
    x_apex: float
    x2: float
    height: float
    energy_level: float

    def __post_init__(self):
        if not self.x1 < self.x_apex < self.x2:
            raise ValueError("triangle needs x1 < x_apex < x2")
        if not self.height > self.energy_level:
            raise ValueError("triangle apex must lie above the energy")

    @property
    def rise(self) -> float:
        return (self.height - self.energy_level) / (self.x_apex - self.x1)

    @property
    def fall(self) -> float:
        return (self.height - self.energy_level) / (self.x2 - self.x_apex)

    def potential(self, x, f=None):
        x = np.asarray(x, dtype=float)
        left = self.energy_level + self.rise * (x - self.x1)
        right = self.energy_level + self.fall * (self.x2 - x)
        return _scalar_or_array(np.where(x <= self.x_apex, left, right))

    def energy(self, f=None) -> float:
        return self.energy_level

    def area(self) -> float:
        return 0.5 * (self.x2 - self.x1) * (self.height - self.energy_level)

    def scan_window(self, f=None, e=None) -> tuple[float, float]:
        pad = self.x2 - self.x1
        return self.x1 - pad, self.x2 + pad


def barrier_area(model, f, geometry) -> float:
    """Area enclosed between the barrier and the energy line."""
    e = geometry.energy
    g = lambda x: float(model.potential(x, f)) - e
    left, _ = quad(g, geometry.x1, geometry.x_max, epsabs=0.0, epsrel=1e-12, limit=200)
    right, _ = quad(g, geometry.x_max, geometry.x2, epsabs=0.0, epsrel=1e-12, limit=200)
    return left + right


def triangle_approximation(model, f, geometry, rule: str = "area") -> TriangleBarrier:
    """Replace a smooth barrier by a triangle of identical width.

    The apex sits above the true maximum. With ``rule="area"`` its height
    makes the triangle's area above E equal to the true barrier's; with
    ``rule="height"`` it equals the true maximum.
    """
    if geometry is None or not geometry.x1 < geometry.x_max < geometry.x2:
        from .geometry import GeometryError

        raise GeometryError("triangle approximation needs valid turning points x1 < x_max < x2")
    if rule == "area":
        height = geometry.energy + 2.0 * barrier_area(model, f, geometry) / (geometry.x2 - geometry.x1)
    elif rule == "height":
        height = geometry.v_max
    else:
        raise ValueError(f"unknown triangle rule {rule!r}")
    return TriangleBarrier(geometry.x1, geometry.x_max, geometry.x2, height, geometry.energy)


@functools.lru_cache(maxsize=512)
def _cached_triangle(model: PotentialModel, f: float, rule: str) -> TriangleBarrier:
    from .geometry import find_turning_points

    geometry = find_turning_points(model, f, model.energy(f))
    return triangle_approximation(model, f, geometry, rule)
