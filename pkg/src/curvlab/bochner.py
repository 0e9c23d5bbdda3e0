"""Divergence formulas for f grad |Ric|^2, the Bochner-type identity and its
zero-radial-Weyl reduction, the inequality machinery (Okumura gap, pinching
gap, Berger commutator), the universal cubic-curvature identity, and radial
integration of the associated integrands.

Residual conventions: identities are compared in max norm; each residual
also reports the largest |individual term| so callers can normalize
(components of these identities range over orders of magnitude across a
band).  The divergence term grad_i(f C_ijk R_jk) is differentiated as one
contracted field rather than by expanding the product rule, which keeps the
finite-difference depth at one level above the Cotton tensor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from . import fd, quadrature
from .charts import Chart, SampleGrid, as_points
from .conformal import cotton_values, radial_weyl_values
from .errors import (
    DegenerateEigenbasis,
    DimensionUnsupported,
    HypothesisViolated,
    NonConstantScalarCurvature,
    NotWarpedProduct,
)
from .geometry import Geometry, RicciJet, ScalarField, TensorField, ricci_norm_squared
from .vstatic import HYPOTHESIS_TOL, Potential, VStaticTriple

RADIAL_WEYL_TOL = 1e-6
CONSTANT_R_TOL = 1e-5


def _raise_all(t: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    letters = "ijkl"[: t.ndim - 1]
    for m, letter in enumerate(letters):
        spec = letters[:m] + "a" + letters[m + 1:]
        t = np.einsum(f"x{letter}a,x{spec}->x{letters}", ginv, t)
    return t


def tensor_norm_squared(t: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    flat = "ijkl"[: t.ndim - 1]
    return np.einsum(f"x{flat},x{flat}->x", t, _raise_all(t, ginv))


class Workspace:
    """Shared evaluations for the divergence-formula family at one batch.

    `f_field` may be any smooth scalar field; `kappa` is only consulted by
    the identities that assume the potential equation.
    """

    def __init__(self, geom: Geometry, f_field: ScalarField, pts, h: float | None = None):
        self.geom = geom
        self.pts = as_points(pts, geom.chart.dim)
        self.h = geom.fd_step if h is None else h
        self.jet = RicciJet(geom, self.pts, self.h)
        self.frame = self.jet.frame
        self.f_field = f_field
        self.n = geom.chart.dim

    @classmethod
    def for_triple(cls, triple: VStaticTriple, pts, fd_step: float = fd.DEFAULT_STEP,
                   backend: str = "auto") -> "Workspace":
        return cls(Geometry(triple.chart, fd_step, backend), triple.potential, pts)

    @property
    def kappa(self) -> float:
        return getattr(self.f_field, "kappa", 0.0)

    @cached_property
    def f(self):
        return self.f_field(self.pts)

    @cached_property
    def df(self):
        return self.geom.scalar_gradient(self.f_field, self.pts)

    @cached_property
    def gradf_up(self):
        return np.einsum("xij,xj->xi", self.frame.ginv, self.df)

    @cached_property
    def cotton(self):
        return cotton_values(self.jet)

    @cached_property
    def ric_up(self):
        return np.einsum("xia,xab,xbj->xij", self.frame.ginv, self.frame.ricci,
                         self.frame.ginv)

    @cached_property
    def cotton_norm_sq(self):
        return tensor_norm_squared(self.cotton, self.frame.ginv)

    @cached_property
    def grad_ric_norm_sq(self):
        return tensor_norm_squared(self.jet.dric, self.frame.ginv)

    @cached_property
    def ric0_mixed(self):
        return np.einsum("xia,xaj->xij", self.frame.ginv, self.frame.traceless_ricci)

    @cached_property
    def ric0_norm_sq(self):
        return np.einsum("xij,xji->x", self.ric0_mixed, self.ric0_mixed)

    @cached_property
    def tr_ric0_cubed(self):
        return np.einsum("xij,xjk,xki->x", self.ric0_mixed, self.ric0_mixed,
                         self.ric0_mixed)

    @cached_property
    def ric_cubed(self):
        mixed = np.einsum("xia,xaj->xij", self.frame.ginv, self.frame.ricci)
        return np.einsum("xij,xjk,xki->x", mixed, mixed, mixed)

    @cached_property
    def weyl_ric_ric(self):
        return np.einsum("xijkl,xik,xjl->x", self.frame.weyl, self.ric_up, self.ric_up)

    @cached_property
    def weyl_gradf_cotton(self):
        contracted = np.einsum("xijkl,xl->xijk", self.frame.weyl, self.gradf_up)
        return np.einsum("xijk,xijk->x", contracted,
                         _raise_all(self.cotton, self.frame.ginv))

    @cached_property
    def radial_weyl_norm(self):
        vals = radial_weyl_values(self.frame, self.df)
        return np.sqrt(np.maximum(tensor_norm_squared(vals, self.frame.ginv), 0.0))

    @cached_property
    def cotton_gradf_ric(self):
        # C_ijk grad_j f R_ik with both free pairs raised.
        cu = _raise_all(self.cotton, self.frame.ginv)
        return np.einsum("xijk,xj,xik->x", cu, self.df, self.frame.ricci)

    @cached_property
    def grad_f_dot_grad_q(self):
        return np.einsum("xi,xi->x", self.gradf_up, self.jet.dq)

    @cached_property
    def div_f_grad_q(self):
        """div(f grad |Ric|^2), the unhalved divergence."""
        return self.grad_f_dot_grad_q + self.f * self.jet.q_laplacian()

    @cached_property
    def div_f_cotton_ric(self):
        """grad_i (f C_ijk R_jk), differentiated as one contracted field."""

        def x_field(p):
            p = as_points(p, self.n)
            local = RicciJet(self.geom, p, self.h)
            cot = cotton_values(local)
            ric_up = np.einsum("xia,xab,xbj->xij", local.frame.ginv,
                               local.frame.ricci, local.frame.ginv)
            return self.f_field(p)[:, None] * np.einsum("xijk,xjk->xi", cot, ric_up)

        dx = self.geom.covariant_derivative(TensorField(x_field, 1, name="fCR"), self.pts)
        return np.einsum("xab,xab->x", self.frame.ginv, dx)

    # -- gates ---------------------------------------------------------------------

    @cached_property
    def vstatic_residual(self):
        hess = self.geom.scalar_hessian(self.f_field, self.pts)
        lap = np.einsum("xij,xij->x", self.frame.ginv, hess)
        tensor = (
            -lap[:, None, None] * self.frame.g
            + hess
            - self.f[:, None, None] * self.frame.ricci
            - self.kappa * self.frame.g
        )
        return np.max(np.abs(tensor), axis=(1, 2))

    def require_vstatic(self, what: str):
        worst = float(np.max(self.vstatic_residual))
        if worst > HYPOTHESIS_TOL:
            raise HypothesisViolated(
                f"{what} requested where the potential equation fails by {worst:.3e}"
            )

    def require_radial_weyl_flat(self, what: str):
        worst = float(np.max(self.radial_weyl_norm))
        if worst > RADIAL_WEYL_TOL:
            raise HypothesisViolated(
                f"{what} requires zero radial Weyl curvature; norm reaches {worst:.3e}"
            )

    # -- identities ------------------------------------------------------------------

    def constant_r_divergence_terms(self):
        """RHS terms of the divergence formula valid for any constant-R metric."""
        n, f = self.n, self.f
        scal = self.frame.scalar
        return {
            "cotton": -f * self.cotton_norm_sq,
            "gradric": 2.0 * f * self.grad_ric_norm_sq,
            "transport": self.grad_f_dot_grad_q,
            "cubic": (2.0 * n / (n - 2)) * f * self.ric_cubed,
            "ricci0": -((4.0 * n - 2) / ((n - 1) * (n - 2))) * f * scal * self.ric0_norm_sq,
            "scalar_cubed": -(2.0 / (n * (n - 2))) * f * scal**3,
            "divergence": 2.0 * self.div_f_cotton_ric,
            "cotton_gradf": 2.0 * self.cotton_gradf_ric,
            "weyl_ricci": -2.0 * f * self.weyl_ric_ric,
        }

    def constant_r_divergence_residual(self):
        terms = self.constant_r_divergence_terms()
        rhs = sum(terms.values())
        resid = np.abs(self.div_f_grad_q - rhs)
        scale = np.max(np.abs(np.stack(list(terms.values()) + [self.div_f_grad_q])), axis=0)
        return resid, scale

    def vstatic_divergence_residual(self):
        """Halved divergence against the potential-equation form of the identity."""
        self.require_vstatic("V-static divergence formula")
        n = self.n
        terms = [
            -self.f * self.cotton_norm_sq,
            self.f * self.grad_ric_norm_sq,
            self.grad_f_dot_grad_q,
            -(n * self.kappa / (n - 1)) * self.ric0_norm_sq,
            2.0 * self.div_f_cotton_ric,
        ]
        lhs = 0.5 * self.div_f_grad_q
        rhs = sum(terms)
        scale = np.max(np.abs(np.stack(terms + [lhs])), axis=0)
        return np.abs(lhs - rhs), scale

    def breakdown(self) -> "BochnerBreakdown":
        self.require_vstatic("Bochner formula")
        n, f = self.n, self.f
        scal = self.frame.scalar
        lhs = 0.5 * self.div_f_grad_q
        term_cotton = ((n - 2) / (n - 1)) * f * self.cotton_norm_sq
        term_gradric = f * self.grad_ric_norm_sq
        term_kappa = (n * self.kappa / (n - 1)) * self.ric0_norm_sq
        term_cubic = f * (
            2.0 * scal * self.ric0_norm_sq / (n - 1)
            + (2.0 * n / (n - 2)) * self.tr_ric0_cubed
        )
        term_weyl_cotton = -((n - 2) / (n - 1)) * self.weyl_gradf_cotton
        term_weyl_ricci = -2.0 * f * self.weyl_ric_ric
        residual = lhs - (
            term_cotton + term_gradric + term_kappa + term_cubic
            + term_weyl_cotton + term_weyl_ricci
        )
        return BochnerBreakdown(
            lhs=lhs,
            term_cotton=term_cotton,
            term_gradric=term_gradric,
            term_kappa=term_kappa,
            term_cubic=term_cubic,
            term_weyl_cotton=term_weyl_cotton,
            term_weyl_ricci=term_weyl_ricci,
            residual=residual,
        )

    def reduced_rhs(self):
        """RHS of the Bochner formula after the radial-Weyl terms collapse."""
        n, f = self.n, self.f
        scal = self.frame.scalar
        return (
            (self.cotton_norm_sq / (n - 1) + self.grad_ric_norm_sq) * f
            + (n * self.kappa / (n - 1)) * self.ric0_norm_sq
            + f * (
                2.0 * scal * self.ric0_norm_sq / (n - 1)
                + (2.0 * n / (n - 2)) * self.tr_ric0_cubed
            )
        )

    def reduced_residual(self):
        self.require_vstatic("reduced Bochner formula")
        self.require_radial_weyl_flat("reduced Bochner formula")
        lhs = 0.5 * self.div_f_grad_q
        rhs = self.reduced_rhs()
        scale = np.maximum(np.abs(lhs), np.abs(rhs))
        return np.abs(lhs - rhs), scale

    def weyl_cotton_collapse_residual(self):
        """f W_ijkl R_ik R_jl against its |C|^2 multiple under zero radial Weyl."""
        if self.n < 4:
            raise DimensionUnsupported(
                "the Weyl-Cotton collapse is trivial at n=3; defined for n >= 4"
            )
        self.require_vstatic("Weyl-Cotton collapse")
        self.require_radial_weyl_flat("Weyl-Cotton collapse")
        n = self.n
        lhs = self.f * self.weyl_ric_ric
        rhs = ((n - 3) / (2.0 * (n - 1))) * self.f * self.cotton_norm_sq
        return np.abs(lhs - rhs), np.maximum(np.abs(lhs), np.abs(rhs))

    def inequality_integrand(self):
        """Integrand of the integrated inequality: reduced RHS with the cubic
        term replaced by its Okumura lower bound."""
        n, f = self.n, self.f
        scal = self.frame.scalar
        root = math.sqrt(n * (n - 1))
        ric0 = np.sqrt(np.maximum(self.ric0_norm_sq, 0.0))
        return (
            (self.cotton_norm_sq / (n - 1) + self.grad_ric_norm_sq) * f
            + (n * self.kappa / (n - 1)) * self.ric0_norm_sq
            + (2.0 * n / root) * self.ric0_norm_sq * (scal / root - ric0) * f
        )


@dataclass(frozen=True)
class BochnerBreakdown:
    """Per-point values of every term of the Bochner-type divergence identity."""

    lhs: np.ndarray
    term_cotton: np.ndarray
    term_gradric: np.ndarray
    term_kappa: np.ndarray
    term_cubic: np.ndarray
    term_weyl_cotton: np.ndarray
    term_weyl_ricci: np.ndarray
    residual: np.ndarray

    def terms(self) -> dict[str, np.ndarray]:
        return {
            "lhs": self.lhs,
            "term_cotton": self.term_cotton,
            "term_gradric": self.term_gradric,
            "term_kappa": self.term_kappa,
            "term_cubic": self.term_cubic,
            "term_weyl_cotton": self.term_weyl_cotton,
            "term_weyl_ricci": self.term_weyl_ricci,
        }

    def scale(self) -> np.ndarray:
        return np.max(np.abs(np.stack(list(self.terms().values()))), axis=0)


# -- identities not tied to a potential ---------------------------------------------

def okumura_gap_values(geom: Geometry, pts) -> np.ndarray:
    pts = as_points(pts, geom.chart.dim)
    fr = geom.frame(pts)
    n = fr.n
    mixed = np.einsum("xia,xaj->xij", fr.ginv, fr.traceless_ricci)
    norm_sq = np.einsum("xij,xji->x", mixed, mixed)
    tr3 = np.einsum("xij,xjk,xki->x", mixed, mixed, mixed)
    return tr3 + (n - 2) / math.sqrt(n * (n - 1)) * norm_sq**1.5


def pinching_gap_values(geom: Geometry, pts) -> np.ndarray:
    pts = as_points(pts, geom.chart.dim)
    fr = geom.frame(pts)
    n = fr.n
    mixed = np.einsum("xia,xaj->xij", fr.ginv, fr.traceless_ricci)
    norm_sq = np.einsum("xij,xji->x", mixed, mixed)
    return fr.scalar**2 / (n * (n - 1)) - norm_sq


def cubic_identity_residual_values(geom: Geometry, pts):
    """Universal identity rewriting Ric^3 - Rm:Ric^2 via traceless quantities."""
    pts = as_points(pts, geom.chart.dim)
    fr = geom.frame(pts)
    n = fr.n
    ginv = fr.ginv
    ric_up = np.einsum("xia,xab,xbj->xij", ginv, fr.ricci, ginv)
    mixed = np.einsum("xia,xaj->xij", ginv, fr.ricci)
    lhs = np.einsum("xij,xjk,xki->x", mixed, mixed, mixed) - np.einsum(
        "xijkl,xjl,xik->x", fr.riemann, ric_up, ric_up
    )
    mixed0 = np.einsum("xia,xaj->xij", ginv, fr.traceless_ricci)
    norm_sq = np.einsum("xij,xji->x", mixed0, mixed0)
    tr3 = np.einsum("xij,xjk,xki->x", mixed0, mixed0, mixed0)
    weyl_rr = np.einsum("xijkl,xik,xjl->x", fr.weyl, ric_up, ric_up)
    rhs = fr.scalar * norm_sq / (n - 1) + n * tr3 / (n - 2) - weyl_rr
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    return np.abs(lhs - rhs), scale


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues and g-orthonormal eigenbasis of a symmetric 2-tensor."""

    eigenvalues: np.ndarray
    eigenbasis: np.ndarray   # columns are eigenvectors

    @classmethod
    def of(cls, tensor: np.ndarray, metric: np.ndarray) -> "SpectralData":
        vals, vecs = scipy.linalg.eigh(tensor, metric)
        ortho = vecs.T @ metric @ vecs - np.eye(len(vals))
        if np.max(np.abs(ortho)) > 1e-10:
            raise DegenerateEigenbasis(
                f"eigenbasis fails g-orthonormality by {np.max(np.abs(ortho)):.3e}"
            )
        rebuilt = metric @ vecs @ np.diag(vals) @ vecs.T @ metric
        if np.max(np.abs(rebuilt - tensor)) > 1e-9:
            raise DegenerateEigenbasis("spectral reconstruction fails beyond 1e-9")
        return cls(vals, vecs)


def berger_check_values(geom: Geometry, pts, tensor_field: TensorField):
    """Both sides of the commutator identity for a symmetric 2-tensor field.

    Returns (commutator contraction, curvature-weighted eigenvalue sum); the
    second expression evaluates plane curvatures in the g-orthonormal
    eigenbasis of the tensor, where eigenvalue ties contribute nothing.
    """
    pts = as_points(pts, geom.chart.dim)
    fr = geom.frame(pts)
    dd = geom.covariant_derivative(geom.covariant_field(tensor_field), pts)
    x = np.einsum("xab,xajbk->xjk", fr.ginv, dd)
    y = np.einsum("xab,xjabk->xjk", fr.ginv, dd)
    t_vals = tensor_field(pts)
    t_up = np.einsum("xja,xab,xbk->xjk", fr.ginv, t_vals, fr.ginv)
    e1 = np.einsum("xjk,xjk->x", x - y, t_up)
    m, n = pts.shape
    e2 = np.empty(m)
    for p in range(m):
        spec = SpectralData.of(t_vals[p], fr.g[p])
        lam, vecs = spec.eigenvalues, spec.eigenbasis
        total = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                if lam[i] == lam[j]:
                    continue
                k_plane = np.einsum(
                    "ijkl,i,j,k,l->", fr.riemann[p], vecs[:, i], vecs[:, j],
                    vecs[:, i], vecs[:, j]
                )
                total += k_plane * (lam[i] - lam[j]) ** 2
        e2[p] = total
    return e1, e2


# -- radial integration ---------------------------------------------------------------

INTEGRANDS = ("div_f_grad_ricnorm", "eq313_rhs", "eq315_integrand")


def reference_fiber_point(chart: Chart) -> np.ndarray:
    """Interior fiber angles at which radial integrands are evaluated."""
    lo, hi = chart.interior_bounds()
    return 0.5 * (lo[1:] + hi[1:])


INTEGRATION_FD_STEP = 2.5e-4


def integrate_radial(space, integrand_id: str, order: int = 32,
                     delta: float | None = None, levels: int = 4,
                     fd_step: float | None = None) -> quadrature.RadialIntegral:
    """Integrate a radial scalar invariant over a warped catalog space.

    The integrand is evaluated at (t, fixed interior fiber angles); for the
    divergence integrand the result must vanish up to quadrature and clip
    error because the potential kills the boundary flux.  The clip ladder
    starts at an eighth of the sampling margin - integrands vary on the scale
    of the band near its ends, so the extrapolation must sample well inside
    that scale - and the finite-difference step is correspondingly finer than
    the pointwise default so stencils keep room at the smallest clip.
    """
    if getattr(space, "warp", None) is None or space.triple is None:
        raise NotWarpedProduct(
            f"{getattr(space, 'id', space)!r} is not a warped-product triple"
        )
    if integrand_id not in INTEGRANDS:
        raise ValueError(f"unknown integrand {integrand_id!r}; choose from {INTEGRANDS}")
    chart = space.chart
    n = chart.dim
    a, b = chart.domain[0]
    delta = chart.margin[0] / 8.0 if delta is None else delta
    fd_step = INTEGRATION_FD_STEP if fd_step is None else fd_step
    if delta / 2 ** (levels - 1) < 2.0 * fd_step:
        raise ValueError("clip ladder leaves no stencil room; raise delta or fd_step")
    fiber = reference_fiber_point(chart)
    geom = Geometry(chart, fd_step)
    area = quadrature.sphere_volume(n - 1)

    def integrand(ts):
        pts = np.column_stack([ts, np.broadcast_to(fiber, (len(ts), n - 1))])
        ws = Workspace(geom, space.triple.potential, pts)
        if integrand_id == "div_f_grad_ricnorm":
            vals = 0.5 * ws.div_f_grad_q
        elif integrand_id == "eq313_rhs":
            vals = ws.reduced_rhs()
        else:
            vals = ws.inequality_integrand()
        measure = area * space.warp.phi(ts) * space.warp.h(ts) ** (n - 1)
        return vals * measure

    return quadrature.radial_integral(integrand, a, b, delta, order, levels)


TRIVIAL_INTEGRAND_TOL = 1e-8
COARSE_PROBE_STEP = 2e-2


def integrate_radial_auto(space, integrand_id: str, order: int = 32) -> quadrature.RadialIntegral:
    """integrate_radial with step-size selection by triviality probe.

    A coarse-step pass runs first (second differences at a coarse step have
    no truncation error on an identically vanishing integrand, and far less
    rounding amplification).  If even |integrand| integrates below
    TRIVIAL_INTEGRAND_TOL there, the integrand is zero within resolution and
    the coarse result is returned; otherwise the fine clip ladder tuned for
    nontrivial bands runs with the defaults.
    """
    margin = space.chart.margin[0] if space.warp is not None else DEFAULT_MARGIN_FALLBACK
    coarse = integrate_radial(space, integrand_id, order=order, delta=margin,
                              levels=1, fd_step=COARSE_PROBE_STEP)
    if coarse.abs_integral <= TRIVIAL_INTEGRAND_TOL:
        return coarse
    return integrate_radial(space, integrand_id, order=order)


DEFAULT_MARGIN_FALLBACK = 0.05


# -- pointwise wrappers ----------------------------------------------------------------

def div_f_grad_ricnorm(triple: VStaticTriple, point,
                       fd_step: float = fd.DEFAULT_STEP, backend: str = "auto") -> float:
    ws = Workspace.for_triple(triple, point, fd_step, backend)
    return float(0.5 * ws.div_f_grad_q[0])


def lemma2_residual(chart: Chart, f_field: ScalarField, point,
                    fd_step: float = fd.DEFAULT_STEP, backend: str = "auto",
                    constancy_points: np.ndarray | None = None) -> float:
    """Divergence-formula residual for any constant-scalar-curvature metric."""
    geom = Geometry(chart, fd_step, backend)
    if constancy_points is None:
        counts = (5,) + (2,) * (chart.dim - 1)
        constancy_points = SampleGrid(chart, counts).uniform_points()
    scal = geom.frame(constancy_points).scalar
    spread = float(scal.max() - scal.min())
    if spread > CONSTANT_R_TOL:
        raise NonConstantScalarCurvature(
            f"scalar curvature varies by {spread:.3e} over the probe grid"
        )
    resid, _scale = Workspace(geom, f_field, point).constant_r_divergence_residual()
    return float(resid[0])


def lemma3_residual(triple: VStaticTriple, point,
                    fd_step: float = fd.DEFAULT_STEP, backend: str = "auto") -> float:
    resid, _ = Workspace.for_triple(triple, point, fd_step, backend).vstatic_divergence_residual()
    return float(resid[0])


def theorem2_breakdown(triple: VStaticTriple, point,
                       fd_step: float = fd.DEFAULT_STEP,
                       backend: str = "auto") -> BochnerBreakdown:
    return Workspace.for_triple(triple, point, fd_step, backend).breakdown()


def radial_weyl_specialization_residual(triple: VStaticTriple, point,
                                        fd_step: float = fd.DEFAULT_STEP,
                                        backend: str = "auto") -> float:
    resid, _ = Workspace.for_triple(triple, point, fd_step, backend).reduced_residual()
    return float(resid[0])


def eq312_residual(triple: VStaticTriple, point,
                   fd_step: float = fd.DEFAULT_STEP, backend: str = "auto") -> float:
    resid, _ = Workspace.for_triple(triple, point, fd_step, backend).weyl_cotton_collapse_residual()
    return float(resid[0])


def okumura_gap(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
                backend: str = "auto") -> float:
    return float(okumura_gap_values(Geometry(chart, fd_step, backend), point)[0])


def pinching_gap(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
                 backend: str = "auto") -> float:
    return float(pinching_gap_values(Geometry(chart, fd_step, backend), point)[0])


def lemma4_residual(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
                    backend: str = "auto") -> float:
    resid, _ = cubic_identity_residual_values(Geometry(chart, fd_step, backend), point)
    return float(resid[0])


def berger_check(chart: Chart, point, tensor_field: TensorField,
                 fd_step: float = fd.DEFAULT_STEP,
                 backend: str = "auto") -> tuple[float, float]:
    e1, e2 = berger_check_values(Geometry(chart, fd_step, backend), point, tensor_field)
    return float(e1[0]), float(e2[0])
