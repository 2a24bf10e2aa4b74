"""Classical turning points and barrier maximum."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SCAN_SAMPLES = 4096
#: Bound on |V(x_i) - E| guaranteed at the turning points (hartree).
ROOT_TOL = 1e-12
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class GeometryError(ValueError):
    """No usable barrier could be constructed."""


class NoBarrier(GeometryError):
    """The energy lies above the barrier maximum (over-the-barrier escape)."""


class NoExitPoint(GeometryError):
    """A turning point is missing from the scan window."""


@dataclass(frozen=True)
class BarrierGeometry:
    x1: float
    x2: float
    x_max: float
    v_max: float
    energy: float
    f: float

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        """Barrier height above the tunneling energy."""
        return self.v_max - self.energy


def _window(model, f, e, window):
    if window is not None:
        return window
    if hasattr(model, "scan_window"):
        return model.scan_window(f, e)
    return 1e-3, 50.0


def _scan(model, f, window, samples):
    lo, hi = window
    if lo > 0:
        x = np.geomspace(lo, hi, samples)
    else:
        x = np.linspace(lo, hi, samples)
    return x, np.asarray(model.potential(x, f), dtype=float)


def _peak_index(v):
    """Index of the highest interior local maximum of the samples, or None."""
    inner = v[1:-1]
    peaks = np.flatnonzero((inner > v[:-2]) & (inner >= v[2:])) + 1
    if peaks.size == 0:
        return None
    return int(peaks[np.argmax(v[peaks])])


def _golden_max(fun, a, b, max_iter=200):
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if b - a <= 4 * np.spacing(max(abs(a), abs(b))):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return (c, fc) if fc >= fd else (d, fd)


def bisect_root(fun, a, b, tol=0.0, max_iter=200):
    """Root of ``fun`` in [a, b] by bisection; ``fun(a)`` and ``fun(b)`` differ in sign.

    Stops when |fun(x)| <= tol or the bracket collapses to adjacent floats.
    """
    fa, fb = fun(a), fun(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise ValueError("root is not bracketed")
    x = a
    for _ in range(max_iter):
        x = 0.5 * (a + b)
        fx = fun(x)
        if abs(fx) <= tol or x in (a, b):
            return x
        if np.sign(fx) == np.sign(fa):
            a, fa = x, fx
        else:
            b = x
    return x


def _locate_max(model, f, x, v):
    j = _peak_index(v)
    if j is None:
        raise NoBarrier(f"no interior maximum in the scan window at F={f}")
    fun = lambda t: float(model.potential(t, f))
    x_max, v_max = _golden_max(fun, x[j - 1], x[j + 1])
    if v[j] > v_max:
        x_max, v_max = float(x[j]), float(v[j])
    return j, x_max, v_max


def barrier_maximum(model, f, window=None, samples=SCAN_SAMPLES):
    """Abscissa and value of the barrier top.

    The highest interior local maximum of a logarithmic scan is refined by
    golden-section search.
    """
    if not f > 0:
        raise ValueError(f"field must be positive, got {f}")
    e = model.energy(f) if hasattr(model, "energy") else 0.0
    x, v = _scan(model, f, _window(model, f, e, window), samples)
    _, x_max, v_max = _locate_max(model, f, x, v)
    return x_max, v_max


def find_turning_points(model, f, e, window=None, samples=SCAN_SAMPLES, tol=0.0) -> BarrierGeometry:
    """Bracket and refine the roots of V(x) - e on either side of the barrier top.

    Bisection runs until the bracket collapses to adjacent floats, or until
    |V - e| <= ``tol`` when a positive residual tolerance is given. The
    under-barrier integrals are sensitive to the square root of any
    turning-point error, so the default keeps full double precision.

    Raises
    ------
    NoBarrier
        If ``e`` is not below the barrier maximum.
    NoExitPoint
        If V - e does not change sign inside the scan window on one side.
    """
    if not f > 0:
        raise ValueError(f"field must be positive, got {f}")
    x, v = _scan(model, f, _window(model, f, e, window), samples)
    j, x_max, v_max = _locate_max(model, f, x, v)
    if not v_max > e:
        raise NoBarrier(f"energy {e:.6g} is above the barrier maximum {v_max:.6g} at F={f}")

    y = v - e
    below_left = np.flatnonzero(y[:j] < 0)
    below_right = np.flatnonzero(y[j:] < 0)
    if below_left.size == 0:
        raise NoExitPoint(f"no inner turning point inside the scan window at F={f}")
    if below_right.size == 0:
        raise NoExitPoint(f"no outer turning point inside the scan window at F={f}")

    fun = lambda t: float(model.potential(t, f)) - e
    a = below_left[-1]
    b = j + below_right[0]
    # the refined maximum may sit between the scan sample and its neighbour
    x1 = bisect_root(fun, x[a], min(x[a + 1], x_max), tol)
    x2 = bisect_root(fun, max(x[b - 1], x_max), x[b], tol)
    return BarrierGeometry(
        x1=float(x1), x2=float(x2), x_max=float(x_max), v_max=float(v_max), energy=float(e), f=float(f)
    )
