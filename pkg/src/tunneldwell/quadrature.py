"""Panel Gauss-Legendre integration of the under-barrier integrals.

The barrier [x1, x2] is split at the apex. On the inner half
x = x1 + u^2 and on the outer half x = x2 - w^2; since k vanishes like
the square root of the distance to a turning point, both dx/k and k dx
become smooth in u and w. Each half is cut into equal panels carrying a
fixed Gauss-Legendre rule, and the running action at every node comes
from an exact polynomial integration matrix on the panel nodes, so no
interpolation enters the dwell-time integrand.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

NODES_PER_PANEL = 16
START_PANELS = 4
MAX_PANELS = 2**20
DEFAULT_RTOL = 1e-8


class ConvergenceFailure(RuntimeError):
    """Panel doubling did not reach the requested tolerance."""


@functools.lru_cache(maxsize=8)
def gauss_rule(q: int = NODES_PER_PANEL):
    """Nodes, weights and running-integral matrix on [-1, 1].

    ``S @ g`` gives the integral from -1 to each node of the degree q-1
    interpolant of the samples ``g``.
    """
    t, w = legendre.leggauss(q)
    vander = legendre.legvander(t, q - 1)
    coef_of_samples = np.linalg.inv(vander)
    running = np.empty((q, q))
    for j in range(q):
        c = legendre.legint(coef_of_samples[:, j], lbnd=-1.0)
        running[:, j] = legendre.legval(t, c)
    return t, w, running


@dataclass(frozen=True)
class HalfBarrier:
    """Node data on one half of the barrier (ordered away from the turning point)."""

    x: np.ndarray  # abscissae
    jac: np.ndarray  # quadrature weight times dx/du
    k: np.ndarray  # wavenumber at the nodes
    action: np.ndarray  # integral of k from the turning point to each node

    @property
    def total_action(self) -> float:
        return float(np.sum(self.k * self.jac))


def _half(kfun, turning, apex, sign, panels, q):
    t, w, running = gauss_rule(q)
    span = np.sqrt(abs(apex - turning))
    edges = np.linspace(0.0, span, panels + 1)
    a = edges[:-1, None]
    h = (edges[1:] - edges[:-1])[:, None]
    u = a + 0.5 * h * (t + 1.0)
    x = turning + sign * u * u
    k = np.asarray(kfun(x), dtype=float)
    dxdu = 2.0 * u
    jac = 0.5 * h * w * dxdu
    # running action: within-panel part plus the sum over completed panels
    dens = k * dxdu
    within = 0.5 * h * (dens @ running.T)
    per_panel = 0.5 * h[:, 0] * (dens @ w)
    before = np.concatenate(([0.0], np.cumsum(per_panel)[:-1]))
    action = within + before[:, None]
    return HalfBarrier(x.ravel(), jac.ravel(), k.ravel(), action.ravel())


@dataclass(frozen=True)
class BarrierIntegrals:
    """Under-barrier integrals for one (potential, energy) pair, in a.u."""

    action: float  # int k dx
    dwell: float  # int dx/k exp(-2 int_{x1}^{x} k)
    traversal: float  # int dx/k
    panels: int  # panels per half

    @property
    def transmission(self) -> float:
        return float(np.exp(-2.0 * self.action))


def barrier_integrals(kfun, x1, x_apex, x2, panels, q=NODES_PER_PANEL) -> BarrierIntegrals:
    """Evaluate all under-barrier integrals on a fixed panel count per half."""
    inner = _half(kfun, x1, x_apex, +1.0, panels, q)
    outer = _half(kfun, x2, x_apex, -1.0, panels, q)
    total = inner.total_action + outer.total_action
    inv_in = inner.jac / inner.k
    inv_out = outer.jac / outer.k
    dwell = np.sum(inv_in * np.exp(-2.0 * inner.action)) + np.sum(
        inv_out * np.exp(-2.0 * (total - outer.action))
    )
    traversal = np.sum(inv_in) + np.sum(inv_out)
    return BarrierIntegrals(total, float(dwell), float(traversal), panels)


def node_action(kfun, x1, x_apex, x2, panels, q=NODES_PER_PANEL):
    """Running action at the quadrature nodes, ordered by x.

    Returns ``(x, A)`` including the end points (x1, 0) and (x2, A_total).
    """
    inner = _half(kfun, x1, x_apex, +1.0, panels, q)
    outer = _half(kfun, x2, x_apex, -1.0, panels, q)
    total = inner.total_action + outer.total_action
    x = np.concatenate(([x1], inner.x, outer.x[::-1], [x2]))
    a = np.concatenate(([0.0], inner.action, (total - outer.action)[::-1], [total]))
    return x, a


def _rel_change(new, old):
    scale = max(abs(new), 1e-300)
    return abs(new - old) / scale


def converged_integrals(
    kfun,
    x1,
    x_apex,
    x2,
    rtol=DEFAULT_RTOL,
    panels=None,
    max_panels=MAX_PANELS,
) -> BarrierIntegrals:
    """Barrier integrals refined by panel doubling.

    With ``panels`` given the result is returned at that resolution without
    refinement. Otherwise the panel count per half doubles from
    ``START_PANELS`` until action, dwell and traversal integrals all change
    by less than ``rtol`` relative.
    """
    if panels is not None:
        return barrier_integrals(kfun, x1, x_apex, x2, panels)
    n = START_PANELS
    prev = barrier_integrals(kfun, x1, x_apex, x2, n)
    while True:
        n *= 2
        if 2 * n > max_panels:
            raise ConvergenceFailure(
                f"under-barrier quadrature not converged to rtol={rtol} with {max_panels} panels"
            )
        cur = barrier_integrals(kfun, x1, x_apex, x2, n)
        change = max(
            _rel_change(cur.dwell, prev.dwell),
            _rel_change(cur.traversal, prev.traversal),
            abs(cur.action - prev.action) / max(cur.action, 1.0),
        )
        if change < rtol:
            return cur
        prev = cur
