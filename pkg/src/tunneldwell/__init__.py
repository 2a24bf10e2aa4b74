"""Semiclassical dwell times of an electron tunneling out of a helium atom in a static field."""

__version__ = "0.1.0"

from .params import HELIUM, AtomParams, ionization_energy, separation_constants, tunneling_energy
from .potentials import PotentialModel, TriangleBarrier, triangle_approximation, v_parabolic, v_spherical
from .geometry import BarrierGeometry, NoBarrier, NoExitPoint, barrier_maximum, find_turning_points
from .times import TimeResult, dwell_time, evaluate, split_dwell_times, transmission, traversal_time, wkb_k
from .dissipation import FrictionSpec, dissipated_energy, dissipative_dwell_time, effective_geometry_and_k

__all__ = [
    "AtomParams",
    "BarrierGeometry",
    "FrictionSpec",
    "HELIUM",
    "NoBarrier",
    "NoExitPoint",
    "PotentialModel",
    "TimeResult",
    "TriangleBarrier",
    "barrier_maximum",
    "dissipated_energy",
    "dissipative_dwell_time",
    "dwell_time",
    "effective_geometry_and_k",
    "evaluate",
    "find_turning_points",
    "ionization_energy",
    "separation_constants",
    "split_dwell_times",
    "transmission",
    "traversal_time",
    "triangle_approximation",
    "tunneling_energy",
    "v_parabolic",
    "v_spherical",
    "wkb_k",
]
