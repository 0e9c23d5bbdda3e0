"""The potential equation -(lap f) g + Hess f - f Ric = kappa g and its
first-order consequences: trace and traceless forms, the gradient identity
for the Ricci tensor, the auxiliary antisymmetric tensor, and the split of
f * Cotton into the auxiliary part plus the radial Weyl contraction.

Identities that only hold on solutions are gated: if the defining residual
itself exceeds HYPOTHESIS_TOL at a point, asking for a downstream residual
there raises HypothesisViolated instead of returning a meaningless number.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import fd
from .charts import Chart, as_points
from .conformal import cotton_values, radial_weyl_values
from .errors import HypothesisViolated
from .geometry import Geometry, RicciJet, ScalarField
from .tensors import TensorValue

HYPOTHESIS_TOL = 1e-5


class Potential(ScalarField):
    """Scalar potential together with the constant on the equation's right side."""

    def __init__(self, fn, kappa: float, partials=None, second_partials=None,
                 name: str = ""):
        super().__init__(fn, partials, second_partials, name)
        self.kappa = float(kappa)


@dataclass(frozen=True)
class VStaticTriple:
    chart: Chart
    potential: Potential
    declared_scalar_curvature: float | None = None
    name: str = ""


class TripleFrame:
    """Curvature frame plus potential jets for one batch of points."""

    def __init__(self, triple: VStaticTriple, pts, fd_step: float = fd.DEFAULT_STEP,
                 backend: str = "auto"):
        self.triple = triple
        self.geom = Geometry(triple.chart, fd_step, backend)
        self.pts = as_points(pts, triple.chart.dim)
        self.frame = self.geom.frame(self.pts)

    @cached_property
    def f(self):
        return self.triple.potential(self.pts)

    @cached_property
    def df(self):
        return self.geom.scalar_gradient(self.triple.potential, self.pts)

    @cached_property
    def gradf_up(self):
        return np.einsum("xij,xj->xi", self.frame.ginv, self.df)

    @cached_property
    def hess_f(self):
        return self.geom.scalar_hessian(self.triple.potential, self.pts)

    @cached_property
    def lap_f(self):
        return np.einsum("xij,xij->x", self.frame.ginv, self.hess_f)

    @cached_property
    def jet(self) -> RicciJet:
        return RicciJet(self.geom, self.pts)

    @cached_property
    def equation_tensor(self):
        """-(lap f) g + Hess f - f Ric - kappa g, componentwise."""
        fr = self.frame
        kappa = self.triple.potential.kappa
        return (
            -self.lap_f[:, None, None] * fr.g
            + self.hess_f
            - self.f[:, None, None] * fr.ricci
            - kappa * fr.g
        )

    @cached_property
    def vstatic_residual(self):
        return np.max(np.abs(self.equation_tensor), axis=(1, 2))

    def require_vstatic(self, what: str):
        worst = float(np.max(self.vstatic_residual))
        if worst > HYPOTHESIS_TOL:
            raise HypothesisViolated(
                f"{what} requested where the potential equation fails by "
                f"{worst:.3e} > {HYPOTHESIS_TOL:g}"
            )

    @cached_property
    def trace_residual(self):
        n = self.frame.n
        kappa = self.triple.potential.kappa
        return np.abs(
            self.lap_f
            + self.frame.scalar * self.f / (n - 1)
            + n * kappa / (n - 1)
        )

    @cached_property
    def traceless_residual(self):
        fr = self.frame
        n = fr.n
        hess0 = self.hess_f - (self.lap_f / n)[:, None, None] * fr.g
        lhs = self.f[:, None, None] * fr.traceless_ricci
        return np.max(np.abs(lhs - hess0), axis=(1, 2))

    @cached_property
    def ricci_gradient_residual(self):
        """f (grad_i R_jk - grad_j R_ik) against its curvature expression."""
        self.require_vstatic("Ricci gradient identity")
        fr = self.frame
        n = fr.n
        dric = self.jet.dric
        lhs = self.f[:, None, None, None] * (
            dric - np.einsum("xjik->xijk", dric)
        )
        rhs = np.einsum("xijkl,xl->xijk", fr.riemann, self.gradf_up)
        rhs = rhs + (fr.scalar / (n - 1))[:, None, None, None] * (
            np.einsum("xi,xjk->xijk", self.df, fr.g)
            - np.einsum("xj,xik->xijk", self.df, fr.g)
        )
        rhs = rhs - (
            np.einsum("xi,xjk->xijk", self.df, fr.ricci)
            - np.einsum("xj,xik->xijk", self.df, fr.ricci)
        )
        return np.max(np.abs(lhs - rhs), axis=(1, 2, 3))

    @cached_property
    def auxiliary_tensor(self):
        """Antisymmetric tensor carrying the non-Weyl part of f * Cotton."""
        fr = self.frame
        n = fr.n
        ric_gradf = np.einsum("xjs,xs->xj", fr.ricci, self.gradf_up)
        t = (n - 1) / (n - 2) * (
            np.einsum("xik,xj->xijk", fr.ricci, self.df)
            - np.einsum("xjk,xi->xijk", fr.ricci, self.df)
        )
        t = t + (
            np.einsum("xik,xj->xijk", fr.g, ric_gradf)
            - np.einsum("xjk,xi->xijk", fr.g, ric_gradf)
        ) / (n - 2)
        t = t - (fr.scalar / (n - 2))[:, None, None, None] * (
            np.einsum("xik,xj->xijk", fr.g, self.df)
            - np.einsum("xjk,xi->xijk", fr.g, self.df)
        )
        return t

    @cached_property
    def cotton(self):
        return cotton_values(self.jet)

    @cached_property
    def radial_weyl(self):
        return radial_weyl_values(self.frame, self.df)

    @cached_property
    def decomposition_residual(self):
        """f C - (auxiliary tensor + W(., ., ., grad f)), max component."""
        self.require_vstatic("Cotton split")
        lhs = self.f[:, None, None, None] * self.cotton
        rhs = self.auxiliary_tensor + self.radial_weyl
        return np.max(np.abs(lhs - rhs), axis=(1, 2, 3))


# -- pointwise wrappers -----------------------------------------------------------


def vstatic_residual(triple: VStaticTriple, point, fd_step: float = fd.DEFAULT_STEP,
                     backend: str = "auto") -> float:
    return float(TripleFrame(triple, point, fd_step, backend).vstatic_residual[0])


def trace_residual(triple: VStaticTriple, point, fd_step: float = fd.DEFAULT_STEP,
                   backend: str = "auto") -> float:
    return float(TripleFrame(triple, point, fd_step, backend).trace_residual[0])


def traceless_residual(triple: VStaticTriple, point,
                       fd_step: float = fd.DEFAULT_STEP,
                       backend: str = "auto") -> float:
    return float(TripleFrame(triple, point, fd_step, backend).traceless_residual[0])


def lemma1_residual(triple: VStaticTriple, point, fd_step: float = fd.DEFAULT_STEP,
                    backend: str = "auto") -> float:
    """Residual of the gradient identity for the Ricci tensor on solutions."""
    return float(
        TripleFrame(triple, point, fd_step, backend).ricci_gradient_residual[0]
    )


def tensor_T(triple: VStaticTriple, point, fd_step: float = fd.DEFAULT_STEP,
             backend: str = "auto") -> TensorValue:
    vals = TripleFrame(triple, point, fd_step, backend).auxiliary_tensor
    return TensorValue(vals[0], ("l",) * 3, (("antisym", 0, 1),))


def decomposition_residual(triple: VStaticTriple, point,
                           fd_step: float = fd.DEFAULT_STEP,
                           backend: str = "auto") -> float:
    return float(
        TripleFrame(triple, point, fd_step, backend).decomposition_residual[0]
    )
