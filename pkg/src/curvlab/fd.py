"""Finite-difference backend.

All derivatives use central stencils whose leading truncation error is O(h^2),
sharpened to O(h^4) by a single Richardson level (combine evaluations at h and
h/2 with weights (4*fine - coarse)/3).  Fields are batched: a field maps an
(m, n) array of points to an (m, ...) array of values, so one stencil pass
differentiates an entire grid at once.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import StencilOutOfDomain

DEFAULT_STEP = 1e-3

# 1D central stencils: order -> (offsets, weights, h_power).
_STENCILS = {
    0: ((0,), (1.0,), 0),
    1: ((-1, 1), (-0.5, 0.5), 1),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0), 2),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5), 3),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0), 4),
}


def richardson(coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    """Cancel the O(h^2) term of a central-difference estimate."""
    return (4.0 * fine - coarse) / 3.0


def stencil_reach(orders: Sequence[int]) -> int:
    """Widest offset (in units of h) used by the product stencil for `orders`."""
    return max(max(abs(o) for o in _STENCILS[k][0]) for k in orders)


def _product_stencil(orders: Sequence[int]):
    """Tensor product of 1D stencils; yields (offset_vector, weight, h_power)."""
    combos = [((), 1.0, 0)]
    for k in orders:
        offs, wts, power = _STENCILS[k]
        combos = [
            (vec + (o,), w * wo, p + power)
            for (vec, w, p) in combos
            for o, wo in zip(offs, wts)
        ]
    return combos


def _apply_stencil(field, points, orders, h):
    acc = None
    for vec, w, _power in _product_stencil(orders):
        shifted = points + h * np.asarray(vec, dtype=float)
        term = w * np.asarray(field(shifted), dtype=float)
        acc = term if acc is None else acc + term
    return acc / h ** sum(orders)


def partial_fd(field, points: np.ndarray, orders: Sequence[int], h: float = DEFAULT_STEP,
               domain=None) -> np.ndarray:
    """Mixed partial of a batched field by finite differences.

    orders has one entry per coordinate (each <= 4, total order <= 4).  One
    Richardson level is applied, so first/second derivatives are O(h^4)
    accurate on smooth fields.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(orders) != points.shape[1]:
        raise ValueError("orders must have one entry per coordinate")
    if any(k < 0 or k > 4 for k in orders) or sum(orders) > 4:
        raise ValueError("per-coordinate order <= 4 and total order <= 4 required")
    if sum(orders) == 0:
        return np.asarray(field(points), dtype=float)
    if domain is not None:
        check_stencil_room(points, domain, h * stencil_reach(orders))
    coarse = _apply_stencil(field, points, orders, h)
    fine = _apply_stencil(field, points, orders, h / 2.0)
    return richardson(coarse, fine)


def check_stencil_room(points: np.ndarray, domain, reach: float) -> None:
    """Raise StencilOutOfDomain unless points +- reach stay inside the closed domain."""
    lo = np.asarray([d[0] for d in domain])
    hi = np.asarray([d[1] for d in domain])
    if np.any(points - reach < lo - 1e-15) or np.any(points + reach > hi + 1e-15):
        bad = np.where(
            np.any((points - reach < lo - 1e-15) | (points + reach > hi + 1e-15), axis=1)
        )[0]
        raise StencilOutOfDomain(
            f"stencil of reach {reach:g} leaves the domain at point index {bad[0]}"
        )


def gradient(field, points: np.ndarray, h: float, domain=None) -> np.ndarray:
    """First partials of a batched field: out[x, k, ...] = d_k field(x).

    Uses 4 evaluations per direction (+-h, +-h/2) and Richardson.
    """
    points = np.atleast_2d(points)
    m, n = points.shape
    if domain is not None:
        check_stencil_room(points, domain, h)
    parts = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        d_h = (np.asarray(field(points + h * e)) - np.asarray(field(points - h * e))) / (2 * h)
        d_h2 = (np.asarray(field(points + 0.5 * h * e)) - np.asarray(field(points - 0.5 * h * e))) / h
        parts.append(richardson(d_h, d_h2))
    return np.stack(parts, axis=1)


class ScalarJet2:
    """Value, gradient and coordinate Hessian of a batched scalar field.

    Evaluations along the axes are shared between the gradient and the
    diagonal second differences.  Mixed second partials cost four corner
    evaluations per (pair, level); pairs listed in `skip_pairs` are left at
    zero (used when the caller contracts with a weight known to vanish).
    """

    def __init__(self, field, points, h, domain=None, skip_pairs=frozenset()):
        points = np.atleast_2d(points)
        m, n = points.shape
        if domain is not None:
            check_stencil_room(points, domain, h)
        f0 = np.asarray(field(points), dtype=float)
        grad = np.empty((m, n))
        hess = np.zeros((m, n, n))
        axis_vals = {}
        for k in range(n):
            e = np.zeros(n)
            e[k] = 1.0
            for s in (h, h / 2, -h / 2, -h):
                axis_vals[(k, s)] = np.asarray(field(points + s * e), dtype=float)
            d_h = (axis_vals[(k, h)] - axis_vals[(k, -h)]) / (2 * h)
            d_h2 = (axis_vals[(k, h / 2)] - axis_vals[(k, -h / 2)]) / h
            grad[:, k] = richardson(d_h, d_h2)
            s_h = (axis_vals[(k, h)] - 2 * f0 + axis_vals[(k, -h)]) / h**2
            s_h2 = (axis_vals[(k, h / 2)] - 2 * f0 + axis_vals[(k, -h / 2)]) / (h / 2) ** 2
            hess[:, k, k] = richardson(s_h, s_h2)
        for a in range(n):
            for b in range(a + 1, n):
                if (a, b) in skip_pairs:
                    continue
                mixed = None
                for step, weight in ((h, -1.0 / 3.0), (h / 2, 4.0 / 3.0)):
                    ea = np.zeros(n); ea[a] = step
                    eb = np.zeros(n); eb[b] = step
                    c = (
                        np.asarray(field(points + ea + eb))
                        - np.asarray(field(points + ea - eb))
                        - np.asarray(field(points - ea + eb))
                        + np.asarray(field(points - ea - eb))
                    ) / (4 * step**2)
                    mixed = weight * c if mixed is None else mixed + weight * c
                hess[:, a, b] = mixed
                hess[:, b, a] = mixed
        self.value = f0
        self.gradient = grad
        self.hessian = hess
