"""Coordinate charts, sampling grids, and the shared test metrics.

A Chart owns a single fixed coordinate box.  The metric is a batched callable
(points (m, n) -> components (m, n, n)); analytic first and second partials
may be registered alongside it and take precedence over finite differences.
The `margin` keeps sampling away from singular loci (polar axes, potential
zero sets); finite-difference stencils may enter the margin ring but must
stay inside the domain box itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fd
from .errors import PointOutOfDomain, SingularMetric, UnsupportedDimension

MetricFn = Callable[[np.ndarray], np.ndarray]
# Returns (d1, d2) with d1[x, k, i, j] = d_k g_ij and d2[x, l, k, i, j] = d_l d_k g_ij.
PartialsFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def as_points(point, dim: int) -> np.ndarray:
    pts = np.asarray(point, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {pts.shape}")
    return pts


@dataclass(frozen=True)
class Chart:
    coords: tuple[str, ...]
    domain: tuple[tuple[float, float], ...]
    metric_fn: MetricFn
    metric_partials: PartialsFn | None = None
    margin: tuple[float, ...] = ()
    name: str = ""

    def __post_init__(self):
        n = len(self.coords)
        if n < 3:
            raise UnsupportedDimension(f"charts require dimension >= 3, got {n}")
        if len(self.domain) != n:
            raise ValueError("domain must have one interval per coordinate")
        if not self.margin:
            object.__setattr__(self, "margin", (0.05,) * n)
        if len(self.margin) != n or any(m < 0 for m in self.margin):
            raise ValueError("margin must be one nonnegative value per coordinate")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def interior_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([d[0] + m for d, m in zip(self.domain, self.margin)])
        hi = np.array([d[1] - m for d, m in zip(self.domain, self.margin)])
        return lo, hi

    def require_interior(self, points: np.ndarray) -> None:
        lo, hi = self.interior_bounds()
        ok = np.all((points >= lo - 1e-12) & (points <= hi + 1e-12), axis=1)
        if not np.all(ok):
            bad = points[np.argmin(ok)]
            raise PointOutOfDomain(f"point {bad} outside margin-shrunk domain of {self.name!r}")

    def metric(self, points: np.ndarray) -> np.ndarray:
        g = np.asarray(self.metric_fn(points), dtype=float)
        asym = np.max(np.abs(g - np.swapaxes(g, -1, -2)))
        if asym > 1e-14:
            raise SingularMetric(f"metric of {self.name!r} asymmetric by {asym:.3e}")
        return g

    def partials(self, points: np.ndarray, h: float = fd.DEFAULT_STEP,
                 backend: str = "auto") -> tuple[np.ndarray, np.ndarray]:
        """Metric first/second partials: analytic when registered, else FD."""
        if backend not in ("auto", "analytic", "fd"):
            raise ValueError(f"unknown backend {backend!r}")
        if backend != "fd" and self.metric_partials is not None:
            return self.metric_partials(points)
        if backend == "analytic":
            raise ValueError(f"chart {self.name!r} has no analytic partials registered")
        return self._fd_partials(points, h)

    def _fd_partials(self, points, h):
        m, n = points.shape
        fd.check_stencil_room(points, self.domain, 2 * h)
        d1 = fd.gradient(self.metric_fn, points, h)
        d2 = np.empty((m, n, n, n, n))
        for a in range(n):
            orders = [0] * n
            orders[a] = 2
            d2[:, a, a] = fd.partial_fd(self.metric_fn, points, orders, h)
            for b in range(a + 1, n):
                orders = [0] * n
                orders[a] = 1
                orders[b] = 1
                mixed = fd.partial_fd(self.metric_fn, points, orders, h)
                d2[:, a, b] = mixed
                d2[:, b, a] = mixed
        return d1, d2


@dataclass(frozen=True)
class SampleGrid:
    """Margin-respecting interior sample points of a chart.

    Uniform points are cell midpoints of a per-coordinate lattice, so they are
    strictly interior; random points are uniform in the shrunk box and
    bit-reproducible for a fixed seed.
    """

    chart: Chart
    counts: tuple[int, ...]
    seed: int | None = None

    def __post_init__(self):
        if len(self.counts) != self.chart.dim:
            raise ValueError("counts must have one entry per coordinate")
        if any(c < 1 for c in self.counts):
            raise ValueError("counts must be positive")

    def uniform_points(self) -> np.ndarray:
        lo, hi = self.chart.interior_bounds()
        axes = [
            lo[k] + (np.arange(c) + 0.5) * (hi[k] - lo[k]) / c
            for k, c in enumerate(self.counts)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def random_points(self, count: int) -> np.ndarray:
        if self.seed is None:
            raise ValueError("random_points requires a seed")
        lo, hi = self.chart.interior_bounds()
        rng = np.random.default_rng(self.seed)
        return rng.uniform(lo, hi, size=(count, self.chart.dim))


def euclidean_chart(n: int, side: float = 1.0) -> Chart:
    """Flat box chart with the identity metric."""

    def metric_fn(pts):
        m = pts.shape[0]
        return np.broadcast_to(np.eye(n), (m, n, n)).copy()

    def partials_fn(pts):
        m = pts.shape[0]
        return np.zeros((m, n, n, n)), np.zeros((m, n, n, n, n))

    return Chart(
        coords=tuple(f"x{i+1}" for i in range(n)),
        domain=((0.0, side),) * n,
        metric_fn=metric_fn,
        metric_partials=partials_fn,
        name=f"euclidean{n}",
    )


def perturbed_flat_chart(n: int, seed: int = 42, amplitude: float = 0.05) -> Chart:
    """Seeded trigonometric perturbation of the flat metric.

    g_ij(x) = delta_ij + a * sum_k c_k^(ij) sin(x_k + phi_k^(ij)) on the unit
    box.  Coefficients are drawn from numpy's default_rng(seed): first
    c ~ U(-1, 1) with shape (n, n, n), then phi ~ U(0, 2*pi) with the same
    shape; both are then symmetrized by copying the i<=j entries.  This fixes
    the metric completely given (n, seed, amplitude).
    """
    rng = np.random.default_rng(seed)
    coef = rng.uniform(-1.0, 1.0, size=(n, n, n))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(n, n, n))
    iu = np.triu_indices(n)
    for arr in (coef, phase):
        sym = arr.copy()
        sym[iu[1], iu[0], :] = arr[iu[0], iu[1], :]
        arr[:] = sym

    def metric_fn(pts):
        pts = np.asarray(pts, dtype=float)
        # s[x, i, j, k] = sin(x_k + phi_k^(ij))
        s = np.sin(pts[:, None, None, :] + phase[None])
        g = np.einsum("ijk,xijk->xij", coef, s)
        return np.eye(n)[None] + amplitude * g

    def partials_fn(pts):
        pts = np.asarray(pts, dtype=float)
        arg = pts[:, None, None, :] + phase[None]
        cos_term = amplitude * coef[None] * np.cos(arg)   # [x, i, j, k]
        sin_term = amplitude * coef[None] * np.sin(arg)
        m = pts.shape[0]
        d1 = np.transpose(cos_term, (0, 3, 1, 2))
        d2 = np.zeros((m, n, n, n, n))
        for k in range(n):
            d2[:, k, k] = -sin_term[:, :, :, k]
        return d1, d2

    return Chart(
        coords=tuple(f"x{i+1}" for i in range(n)),
        domain=((0.0, 1.0),) * n,
        metric_fn=metric_fn,
        metric_partials=partials_fn,
        name=f"perturbed_flat{n}[seed={seed},a={amplitude:g}]",
    )
