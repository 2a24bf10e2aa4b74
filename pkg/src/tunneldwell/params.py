"""Target-atom constants and field-dependent derived quantities.

Everything is in Hartree atomic units (hbar = m_e = e = a_0 = 1).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

#: One atomic unit of time expressed in attoseconds (CODATA 2018).
AU_TIME_IN_AS = 24.18884326505

PARABOLIC = "parabolic"
SPHERICAL = "spherical"
COORDINATE_SYSTEMS = (PARABOLIC, SPHERICAL)

#: Tunneling-energy conventions for the radial (field-direction) model.
BINDING = "binding"  # E = -Ip(F)
QUARTER = "quarter"  # E = -Ip(F)/4, same as the parabolic eta problem


@dataclass(frozen=True)
class AtomParams:
    """Atomic and ionic constants of the tunneling target.

    Attributes
    ----------
    Z : int
        Nuclear charge.
    ip0 : float
        Zero-field ionization energy (hartree).
    alpha_n, alpha_i : float
        Static polarizabilities of the neutral atom and of the ion (a.u.).
    m : int
        Magnetic quantum number of the tunneling electron.
    r0 : float
        Screening radius of the remaining bound electron (bohr).
    """

    Z: int = 2
    ip0: float = 0.904
    alpha_n: float = 1.38
    alpha_i: float = 9.0 / 32.0
    m: int = 0
    r0: float = 0.25

    def __post_init__(self):
        if self.Z < 1:
            raise ValueError(f"Z must be >= 1, got {self.Z}")
        if not self.ip0 > 0:
            raise ValueError(f"ip0 must be positive, got {self.ip0}")
        if not self.r0 > 0:
            raise ValueError(f"r0 must be positive, got {self.r0}")

    def with_overrides(self, **changes) -> "AtomParams":
        return replace(self, **changes)


HELIUM = AtomParams(Z=2, ip0=0.904, alpha_n=1.38, alpha_i=9.0 / 32.0, m=0, r0=1.0 / (2 * 2))

PARAMETER_SETS = {"he4": HELIUM}


def get_atom(name: str) -> AtomParams:
    """Look up a named parameter set (case-insensitive)."""
    try:
        return PARAMETER_SETS[name.strip().lower()]
    except KeyError:
        known = ", ".join(sorted(PARAMETER_SETS))
        raise KeyError(f"unknown parameter set {name!r}; known: {known}") from None


def _check_field(f):
    if np.any(np.asarray(f) < 0):
        raise ValueError(f"field strength must be non-negative, got {f}")


def ionization_energy(p: AtomParams, f):
    """Field-dressed ionization energy Ip(F) = Ip(0) + (alpha_N - alpha_I) F^2 / 2."""
    _check_field(f)
    return p.ip0 + 0.5 * (p.alpha_n - p.alpha_i) * f * f


def separation_constants(p: AtomParams, f):
    """Parabolic separation constants (beta1, beta2) with beta1 + beta2 = 1.

    beta1 uses the usual ground-state estimate (1 + |m|) sqrt(2 Ip(F)) / 2.
    """
    beta1 = (1 + abs(p.m)) * np.sqrt(2.0 * ionization_energy(p, f)) / 2.0
    return beta1, 1.0 - beta1


def tunneling_energy(p: AtomParams, f, coords: str, spherical_energy: str = BINDING):
    """Energy of the tunneling electron for the given coordinate system.

    The eta equation of the parabolic problem carries -Ip(F)/4. For the
    radial model the full binding energy -Ip(F) is used unless
    ``spherical_energy="quarter"`` is requested.
    """
    ip = ionization_energy(p, f)
    if coords == PARABOLIC:
        return -ip / 4.0
    if coords == SPHERICAL:
        if spherical_energy == BINDING:
            return -ip
        if spherical_energy == QUARTER:
            return -ip / 4.0
        raise ValueError(f"unknown spherical energy convention {spherical_energy!r}")
    raise ValueError(f"unknown coordinate system {coords!r}")


def au_to_attoseconds(t):
    return t * AU_TIME_IN_AS


def convert_time(t, unit: str):
    """Convert a time given in a.u. into ``unit`` ("au" or "as")."""
    if unit == "au":
        return t
    if unit == "as":
        return au_to_attoseconds(t)
    raise ValueError(f"unknown time unit {unit!r}")
