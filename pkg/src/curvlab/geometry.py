"""Curvature pipeline: metric components -> connection -> curvature tensors.

Everything is batched: points are (m, n) arrays and tensors carry a leading
batch axis.  Index conventions, pinned operationally by the test suite:

* Christoffel  Gamma[x, k, i, j] = Gamma^k_ij (upper index first).
* Riemann      riem[x, i, j, k, l] = R_ijkl with R_ijij > 0 on the round
  sphere, antisymmetric in (i, j) and (k, l), symmetric under pair exchange.
* Ricci        ric[x, i, j] = g^kl R_kilj, positive on the round sphere.
* Covariant derivatives put the derivative index first: (grad T)[x, a, ...].

With these choices the Weyl decomposition
R_ijkl = W_ijkl + (Ric wedge g)/(n-2) - R (g wedge g)/((n-1)(n-2))
closes identically, which is the arbiter used whenever a sign is ambiguous.
"""
from __future__ import annotations

from functools import cached_property
from typing import Callable

import numpy as np

from . import fd
from .charts import Chart, as_points
from .errors import DegeneratePlane, SingularMetric, StencilOutOfDomain
from .tensors import TensorValue


class TensorField:
    """Batched map from points to dense covariant components.

    `partials`, when given, returns the coordinate first partials with the
    derivative axis first; otherwise they are obtained by central finite
    differences with one Richardson level.
    """

    def __init__(self, fn: Callable, rank: int, partials: Callable | None = None,
                 name: str = ""):
        self.fn = fn
        self.rank = rank
        self.partials = partials
        self.name = name

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(pts), dtype=float)


class ScalarField(TensorField):
    """Rank-0 field; may also carry analytic second partials for Hessians."""

    def __init__(self, fn, partials=None, second_partials=None, name=""):
        super().__init__(fn, 0, partials, name)
        self.second_partials = second_partials


class Frame:
    """All curvature data of one chart at one batch of points, lazily computed."""

    def __init__(self, geom: "Geometry", pts: np.ndarray):
        self.geom = geom
        self.pts = pts
        self.n = geom.chart.dim

    @cached_property
    def g(self):
        return self.geom.chart.metric(self.pts)

    @cached_property
    def ginv(self):
        return np.linalg.inv(self.g)

    @cached_property
    def _partials(self):
        return self.geom.chart.partials(self.pts, self.geom.fd_step, self.geom.backend)

    @property
    def d1(self):
        return self._partials[0]

    @property
    def d2(self):
        return self._partials[1]

    @cached_property
    def gamma(self):
        # S[x,l,i,j] = d_i g_jl + d_j g_il - d_l g_ij
        d1 = self.d1
        S = np.einsum("xijl->xlij", d1) + np.einsum("xjil->xlij", d1) - d1
        return 0.5 * np.einsum("xkl,xlij->xkij", self.ginv, S)

    @cached_property
    def dgamma(self):
        d1, d2 = self.d1, self.d2
        S = np.einsum("xijl->xlij", d1) + np.einsum("xjil->xlij", d1) - d1
        dS = (
            np.einsum("xmijl->xmlij", d2)
            + np.einsum("xmjil->xmlij", d2)
            - d2
        )
        dginv = -np.einsum("xkp,xmpq,xql->xmkl", self.ginv, d1, self.ginv)
        return 0.5 * (
            np.einsum("xmkl,xlij->xmkij", dginv, S)
            + np.einsum("xkl,xmlij->xmkij", self.ginv, dS)
        )

    @cached_property
    def riemann(self):
        gamma, dgamma = self.gamma, self.dgamma
        rup = (
            np.einsum("xkalj->xajkl", dgamma)
            - np.einsum("xlakj->xajkl", dgamma)
            + np.einsum("xaks,xslj->xajkl", gamma, gamma)
            - np.einsum("xals,xskj->xajkl", gamma, gamma)
        )
        return np.einsum("xia,xajkl->xijkl", self.g, rup)

    @cached_property
    def ricci(self):
        # Direct trace of the curvature formula; avoids rank-5 intermediates.
        gamma, dgamma = self.gamma, self.dgamma
        trg = np.einsum("xkks->xs", gamma)
        return (
            np.einsum("xkklj->xjl", dgamma)
            - np.einsum("xlkkj->xjl", dgamma)
            + np.einsum("xs,xslj->xjl", trg, gamma)
            - np.einsum("xkls,xskj->xjl", gamma, gamma)
        )

    @cached_property
    def scalar(self):
        return np.einsum("xij,xij->x", self.ginv, self.ricci)

    @cached_property
    def traceless_ricci(self):
        return self.ricci - (self.scalar / self.n)[:, None, None] * self.g

    @cached_property
    def weyl(self):
        n, g, ric = self.n, self.g, self.ricci
        ric_wedge = (
            np.einsum("xik,xjl->xijkl", ric, g)
            + np.einsum("xjl,xik->xijkl", ric, g)
            - np.einsum("xil,xjk->xijkl", ric, g)
            - np.einsum("xjk,xil->xijkl", ric, g)
        )
        g_wedge = np.einsum("xjl,xik->xijkl", g, g) - np.einsum("xil,xjk->xijkl", g, g)
        return (
            self.riemann
            - ric_wedge / (n - 2)
            + (self.scalar / ((n - 1) * (n - 2)))[:, None, None, None, None] * g_wedge
        )


class Geometry:
    """Curvature engine bound to one chart, FD step, and partials backend."""

    def __init__(self, chart: Chart, fd_step: float = fd.DEFAULT_STEP,
                 backend: str = "auto"):
        self.chart = chart
        self.fd_step = fd_step
        self.backend = backend

    def frame(self, pts) -> Frame:
        return Frame(self, as_points(pts, self.chart.dim))

    # -- fields over the chart -------------------------------------------------

    def ricci_field(self) -> TensorField:
        return TensorField(lambda p: self.frame(p).ricci, 2, name="ricci")

    def riemann_field(self) -> TensorField:
        return TensorField(lambda p: self.frame(p).riemann, 4, name="riemann")

    def weyl_field(self) -> TensorField:
        return TensorField(lambda p: self.frame(p).weyl, 4, name="weyl")

    def metric_field(self) -> TensorField:
        return TensorField(
            lambda p: self.chart.metric(as_points(p, self.chart.dim)),
            2,
            partials=lambda p: self.chart.partials(
                as_points(p, self.chart.dim), self.fd_step, self.backend)[0],
            name="metric",
        )

    # -- covariant differentiation ----------------------------------------------

    def _field_partials(self, field: TensorField, pts: np.ndarray) -> np.ndarray:
        if field.partials is not None:
            return np.asarray(field.partials(pts), dtype=float)
        fd.check_stencil_room(pts, self.chart.domain, self.fd_step)
        return fd.gradient(field, pts, self.fd_step)

    def covariant_derivative(self, field: TensorField, pts) -> np.ndarray:
        """(grad T)[x, a, i1..ir] = nabla_a T_{i1..ir} for all-covariant T."""
        pts = as_points(pts, self.chart.dim)
        pd = self._field_partials(field, pts)
        if field.rank == 0:
            return pd
        gamma = self.frame(pts).gamma
        vals = field(pts)
        letters = "ijklpq"[: field.rank]
        out = pd
        for m in range(field.rank):
            slot = letters[:m] + "s" + letters[m + 1:]
            out = out - np.einsum(f"xsa{letters[m]},x{slot}->xa{letters}", gamma, vals)
        return out

    def covariant_field(self, field: TensorField) -> TensorField:
        """Wrap grad T as a field of its own, for nested derivatives."""
        return TensorField(
            lambda p: self.covariant_derivative(field, p),
            field.rank + 1,
            name=f"cov({field.name})",
        )

    def scalar_gradient(self, field: ScalarField, pts) -> np.ndarray:
        pts = as_points(pts, self.chart.dim)
        return self._field_partials(field, pts)

    def scalar_hessian(self, field: ScalarField, pts) -> np.ndarray:
        pts = as_points(pts, self.chart.dim)
        df = self._field_partials(field, pts)
        if field.second_partials is not None:
            ddf = np.asarray(field.second_partials(pts), dtype=float)
        else:
            jet = fd.ScalarJet2(field, pts, self.fd_step, domain=self.chart.domain)
            df, ddf = jet.gradient, jet.hessian
        gamma = self.frame(pts).gamma
        return ddf - np.einsum("xsij,xs->xij", gamma, df)

    def scalar_laplacian(self, field: ScalarField, pts) -> np.ndarray:
        pts = as_points(pts, self.chart.dim)
        return np.einsum(
            "xij,xij->x", self.frame(pts).ginv, self.scalar_hessian(field, pts)
        )

    # -- pointwise invariant residuals -------------------------------------------

    def sectional(self, pts, u, v) -> np.ndarray:
        pts = as_points(pts, self.chart.dim)
        fr = self.frame(pts)
        U = np.broadcast_to(np.asarray(u, dtype=float), (pts.shape[0], fr.n))
        V = np.broadcast_to(np.asarray(v, dtype=float), (pts.shape[0], fr.n))
        num = np.einsum("xijkl,xi,xj,xk,xl->x", fr.riemann, U, V, U, V)
        uu = np.einsum("xij,xi,xj->x", fr.g, U, U)
        vv = np.einsum("xij,xi,xj->x", fr.g, V, V)
        uv = np.einsum("xij,xi,xj->x", fr.g, U, V)
        gram = uu * vv - uv**2
        if np.any(gram <= 1e-12):
            raise DegeneratePlane(f"plane Gram determinant {gram.min():.3e} <= 1e-12")
        return num / gram

    def ricci_identity_residual(self, pts) -> np.ndarray:
        """Max residual of the second-derivative commutator on the Ricci tensor."""
        pts = as_points(pts, self.chart.dim)
        fr = self.frame(pts)
        dd = self.covariant_derivative(self.covariant_field(self.ricci_field()), pts)
        comm = dd - np.einsum("xabkl->xbakl", dd)
        ric_up = np.einsum("xst,xtl->xsl", fr.ginv, fr.ricci)
        rhs = np.einsum("xijks,xsl->xijkl", fr.riemann, ric_up)
        rhs = rhs + np.einsum("xijls,xsk->xijkl", fr.riemann, ric_up)
        return np.max(np.abs(comm - rhs), axis=(1, 2, 3, 4))

    def riemann_divergence_residual(self, pts) -> np.ndarray:
        """Contracted-Bianchi check: div Rm against the antisymmetrized grad Ric."""
        pts = as_points(pts, self.chart.dim)
        fr = self.frame(pts)
        driem = self.covariant_derivative(self.riemann_field(), pts)
        div_rm = np.einsum("xma,xmajkl->xjkl", fr.ginv, driem)
        dric = self.covariant_derivative(self.ricci_field(), pts)
        rhs = np.einsum("xkjl->xjkl", dric) - np.einsum("xljk->xjkl", dric)
        return np.max(np.abs(div_rm - rhs), axis=(1, 2, 3))

    def metric_compatibility_residual(self, pts) -> np.ndarray:
        dg = self.covariant_derivative(self.metric_field(), pts)
        return np.max(np.abs(dg), axis=(1, 2, 3))

    def contracted_bianchi_residual(self, pts) -> np.ndarray:
        """g^jk nabla_k R_ij - (1/2) d_i R."""
        pts = as_points(pts, self.chart.dim)
        fr = self.frame(pts)
        dric = self.covariant_derivative(self.ricci_field(), pts)
        div_ric = np.einsum("xjk,xkij->xi", fr.ginv, dric)
        dR = fd.gradient(lambda p: self.frame(p).scalar, pts, self.fd_step)
        return np.max(np.abs(div_ric - 0.5 * dR), axis=1)


class RicciJet:
    """Gradient-level data for fields derived from the Ricci tensor.

    One stencil pass (+-h, +-h/2 per axis) yields the coordinate partials of
    Ric, R and q = |Ric|^2 simultaneously, plus the diagonal second
    differences of q; covariant corrections are applied at the base point.
    Mixed second partials of q are only evaluated for coordinate pairs whose
    inverse-metric weight is not identically zero over the batch, which keeps
    the Laplacian exact while skipping dead work on diagonal charts.
    """

    def __init__(self, geom: Geometry, pts: np.ndarray, h: float | None = None):
        self.geom = geom
        self.pts = as_points(pts, geom.chart.dim)
        self.h = geom.fd_step if h is None else h
        fd.check_stencil_room(self.pts, geom.chart.domain, self.h)
        self.frame = geom.frame(self.pts)
        m, n = self.pts.shape
        h = self.h
        self.q0 = ricci_norm_squared(self.frame)
        dric = np.empty((m, n, n, n))
        dscal = np.empty((m, n))
        dq = np.empty((m, n))
        d2q_diag = np.empty((m, n))
        for k in range(n):
            e = np.zeros(n)
            e[k] = 1.0
            vals = {}
            for s in (h, h / 2, -h / 2, -h):
                fr = geom.frame(self.pts + s * e)
                vals[s] = (fr.ricci, fr.scalar, ricci_norm_squared(fr))
            for slot, out in ((0, dric), (1, dscal), (2, dq)):
                c = (vals[h][slot] - vals[-h][slot]) / (2 * h)
                f = (vals[h / 2][slot] - vals[-h / 2][slot]) / h
                out[:, k] = fd.richardson(c, f)
            c2 = (vals[h][2] - 2 * self.q0 + vals[-h][2]) / h**2
            f2 = (vals[h / 2][2] - 2 * self.q0 + vals[-h / 2][2]) / (h / 2) ** 2
            d2q_diag[:, k] = fd.richardson(c2, f2)
        self.dric_partial = dric
        self.dscal = dscal
        self.dq = dq
        self._d2q_diag = d2q_diag

    @cached_property
    def dric(self):
        """Covariant gradient of the Ricci tensor, derivative index first."""
        gamma, ric = self.frame.gamma, self.frame.ricci
        return (
            self.dric_partial
            - np.einsum("xsai,xsj->xaij", gamma, ric)
            - np.einsum("xsaj,xis->xaij", gamma, ric)
        )

    def q_laplacian(self) -> np.ndarray:
        """Laplace-Beltrami of q = |Ric|^2 at the base points."""
        fr = self.frame
        m, n = self.pts.shape
        h = self.h
        d2q = np.zeros((m, n, n))
        d2q[:, np.arange(n), np.arange(n)] = self._d2q_diag
        for a in range(n):
            for b in range(a + 1, n):
                if np.max(np.abs(fr.ginv[:, a, b])) == 0.0:
                    continue
                mixed = None
                for step, w in ((h, -1.0 / 3.0), (h / 2, 4.0 / 3.0)):
                    ea = np.zeros(n); ea[a] = step
                    eb = np.zeros(n); eb[b] = step
                    quad = (
                        ricci_norm_squared(self.geom.frame(self.pts + ea + eb))
                        - ricci_norm_squared(self.geom.frame(self.pts + ea - eb))
                        - ricci_norm_squared(self.geom.frame(self.pts - ea + eb))
                        + ricci_norm_squared(self.geom.frame(self.pts - ea - eb))
                    ) / (4 * step**2)
                    mixed = w * quad if mixed is None else mixed + w * quad
                d2q[:, a, b] = mixed
                d2q[:, b, a] = mixed
        hess = d2q - np.einsum("xsab,xs->xab", fr.gamma, self.dq)
        return np.einsum("xab,xab->x", fr.ginv, hess)


def ricci_norm_squared(frame: Frame) -> np.ndarray:
    ric_mixed = np.einsum("xia,xaj->xij", frame.ginv, frame.ricci)
    return np.einsum("xij,xji->x", ric_mixed, ric_mixed)


def pair_symmetry_residual(riem: np.ndarray) -> np.ndarray:
    """Worst violation of the algebraic Riemann symmetries, per point."""
    r1 = np.abs(riem + np.einsum("xjikl->xijkl", riem))
    r2 = np.abs(riem + np.einsum("xijlk->xijkl", riem))
    r3 = np.abs(riem - np.einsum("xklij->xijkl", riem))
    return np.max(np.maximum(np.maximum(r1, r2), r3), axis=(1, 2, 3, 4))


def first_bianchi_residual(riem: np.ndarray) -> np.ndarray:
    cyc = riem + np.einsum("xiklj->xijkl", riem) + np.einsum("xiljk->xijkl", riem)
    return np.max(np.abs(cyc), axis=(1, 2, 3, 4))


# -- pointwise wrappers matching the operation surface ---------------------------

RIEMANN_SYMMETRIES = (
    ("antisym", 0, 1),
    ("antisym", 2, 3),
    ("pair", 0, 1, 2, 3),
)


def require_spd(g: np.ndarray, context: str = "") -> None:
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise SingularMetric(f"metric not positive definite {context}".strip())


def metric_at(chart: Chart, point) -> TensorValue:
    pts = as_points(point, chart.dim)
    chart.require_interior(pts)
    g = chart.metric(pts)
    require_spd(g, f"at {np.asarray(point)}")
    return TensorValue(g[0], ("l", "l"), (("sym", 0, 1),))


def inverse_metric_at(chart: Chart, point) -> TensorValue:
    g = metric_at(chart, point).components
    ginv = np.linalg.inv(g)
    if np.max(np.abs(g @ ginv - np.eye(chart.dim))) > 1e-12:
        raise SingularMetric("inverse check g @ g^-1 = I failed beyond 1e-12")
    return TensorValue(ginv, ("u", "u"), (("sym", 0, 1),))


def christoffel(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
                backend: str = "auto") -> TensorValue:
    fr = Geometry(chart, fd_step, backend).frame(point)
    return TensorValue(fr.gamma[0], ("u", "l", "l"), (("sym", 1, 2),))


def riemann(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
            backend: str = "auto") -> TensorValue:
    fr = Geometry(chart, fd_step, backend).frame(point)
    syms = RIEMANN_SYMMETRIES if backend != "fd" and chart.metric_partials else ()
    return TensorValue(fr.riemann[0], ("l",) * 4, syms)


def ricci(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
          backend: str = "auto") -> TensorValue:
    fr = Geometry(chart, fd_step, backend).frame(point)
    return TensorValue(fr.ricci[0], ("l", "l"))


def scalar_curvature(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
                     backend: str = "auto") -> float:
    return float(Geometry(chart, fd_step, backend).frame(point).scalar[0])


def traceless_ricci(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
                    backend: str = "auto") -> TensorValue:
    fr = Geometry(chart, fd_step, backend).frame(point)
    return TensorValue(fr.traceless_ricci[0], ("l", "l"))


def sectional_curvature(chart: Chart, point, u, v,
                        fd_step: float = fd.DEFAULT_STEP,
                        backend: str = "auto") -> float:
    return float(Geometry(chart, fd_step, backend).sectional(point, u, v)[0])


def covariant_derivative(field: TensorField, chart: Chart, point,
                         fd_step: float = fd.DEFAULT_STEP,
                         backend: str = "auto") -> TensorValue:
    vals = Geometry(chart, fd_step, backend).covariant_derivative(field, point)
    return TensorValue(vals[0], ("l",) * (field.rank + 1))


def hessian(field: ScalarField, chart: Chart, point,
            fd_step: float = fd.DEFAULT_STEP, backend: str = "auto") -> TensorValue:
    vals = Geometry(chart, fd_step, backend).scalar_hessian(field, point)
    return TensorValue(vals[0], ("l", "l"))


def laplacian(field: ScalarField, chart: Chart, point,
              fd_step: float = fd.DEFAULT_STEP, backend: str = "auto") -> float:
    return float(Geometry(chart, fd_step, backend).scalar_laplacian(field, point)[0])


def ricci_identity_residual(chart: Chart, point,
                            fd_step: float = fd.DEFAULT_STEP,
                            backend: str = "auto") -> float:
    return float(Geometry(chart, fd_step, backend).ricci_identity_residual(point)[0])


def partial(field, point, multi_index, h: float = fd.DEFAULT_STEP,
            chart: Chart | None = None) -> float:
    """Mixed partial of a field at a point.

    Analytic partials registered on the field are used for total order <= 2;
    anything else falls back to central differences with one Richardson level.
    """
    orders = tuple(int(k) for k in multi_index)
    point = np.asarray(point, dtype=float)
    pts = point[None, :] if point.ndim == 1 else point
    total = sum(orders)
    if isinstance(field, TensorField) and total <= 2:
        if total == 1 and field.partials is not None:
            k = orders.index(1)
            return float(np.asarray(field.partials(pts))[0, k])
        if total == 2 and isinstance(field, ScalarField) and field.second_partials is not None:
            axes = [i for i, k in enumerate(orders) for _ in range(k)]
            return float(np.asarray(field.second_partials(pts))[0, axes[0], axes[1]])
    fn = field if callable(field) else field.fn
    domain = chart.domain if chart is not None else None
    return float(fd.partial_fd(fn, pts, orders, h, domain=domain)[0])
