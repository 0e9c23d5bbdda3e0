"""Weyl, Cotton and Bach tensors and their interrelations.

The Weyl tensor is always obtained by subtracting the Ricci part of the
curvature decomposition from the full Riemann tensor, never from a separate
formula: that makes the decomposition closure exact up to rounding and
confines finite-difference error to the derivative-bearing quantities
(Cotton, Bach, divergence of Weyl).

Mixed-index contractions raise with the inverse metric at the same point.
For the second-derivative Bach contraction the divergence slots are the
second and fourth of the reordered Weyl block W_{ikjl}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fd
from .charts import Chart, as_points
from .errors import DimensionUnsupported
from .geometry import Geometry, RicciJet, ScalarField, TensorField
from .tensors import TensorValue


def weyl_values(frame) -> np.ndarray:
    return frame.weyl


def cotton_values(jet: RicciJet) -> np.ndarray:
    """C_ijk = grad_i R_jk - grad_j R_ik - (d_i R g_jk - d_j R g_ik)/(2(n-1))."""
    n = jet.frame.n
    dric, dscal, g = jet.dric, jet.dscal, jet.frame.g
    antisym = dric - np.einsum("xjik->xijk", dric)
    trace_part = np.einsum("xi,xjk->xijk", dscal, g) - np.einsum(
        "xj,xik->xijk", dscal, g
    )
    return antisym - trace_part / (2 * (n - 1))


def cotton_field(geom: Geometry) -> TensorField:
    return TensorField(lambda p: cotton_values(RicciJet(geom, p)), 3, name="cotton")


def bach_values(geom: Geometry, pts: np.ndarray) -> np.ndarray:
    """Bach tensor; second-order conformal curvature, dimension-dispatched."""
    pts = as_points(pts, geom.chart.dim)
    n = geom.chart.dim
    fr = geom.frame(pts)
    if n == 3:
        dcot = geom.covariant_derivative(cotton_field(geom), pts)
        return np.einsum("xak,xakij->xij", fr.ginv, dcot)
    weyl_f = geom.weyl_field()

    def div_weyl_reordered(p):
        # Z_ikj = grad^l W_ikjl, evaluated as a field for the outer derivative.
        local = geom.frame(as_points(p, n))
        dw = geom.covariant_derivative(weyl_f, p)
        return np.einsum("xbd,xbikjd->xikj", local.ginv, dw)

    dz = geom.covariant_derivative(TensorField(div_weyl_reordered, 3, name="divW"), pts)
    term1 = np.einsum("xak,xaikj->xij", fr.ginv, dz)
    ric_up = np.einsum("xka,xkl,xlb->xab", fr.ginv, fr.ricci, fr.ginv)
    term2 = np.einsum("xab,xiajb->xij", ric_up, fr.weyl)
    return term1 / (n - 3) + term2 / (n - 2)


def cotton_weyl_relation_values(geom: Geometry, pts: np.ndarray) -> np.ndarray:
    """Residual of C_ijk = -((n-2)/(n-3)) grad^l W_ijkl, per point."""
    n = geom.chart.dim
    if n < 4:
        raise DimensionUnsupported("Cotton-Weyl divergence relation requires n >= 4")
    pts = as_points(pts, n)
    fr = geom.frame(pts)
    dw = geom.covariant_derivative(geom.weyl_field(), pts)
    div_w = np.einsum("xbl,xbijkl->xijk", fr.ginv, dw)
    cot = cotton_values(RicciJet(geom, pts))
    return np.max(np.abs(cot + ((n - 2) / (n - 3)) * div_w), axis=(1, 2, 3))


def radial_weyl_values(frame, grad_f: np.ndarray) -> np.ndarray:
    """W(., ., ., grad f): contraction of Weyl with the raised gradient."""
    gradf_up = np.einsum("xlb,xb->xl", frame.ginv, grad_f)
    return np.einsum("xijkl,xl->xijk", frame.weyl, gradf_up)


def weyl_trace_residual(frame) -> np.ndarray:
    """Largest g-contraction of the Weyl tensor over all index pairs."""
    w, ginv = frame.weyl, frame.ginv
    traces = [
        np.einsum("xik,xijkl->xjl", ginv, w),
        np.einsum("xil,xijkl->xjk", ginv, w),
        np.einsum("xjk,xijkl->xil", ginv, w),
        np.einsum("xjl,xijkl->xik", ginv, w),
        np.einsum("xij,xijkl->xkl", ginv, w),
        np.einsum("xkl,xijkl->xij", ginv, w),
    ]
    return np.max([np.max(np.abs(t), axis=(1, 2)) for t in traces], axis=0)


def decomposition_closure_residual(frame) -> np.ndarray:
    """Re-add the Ricci part of the decomposition to Weyl; compare with Riemann."""
    n, g, ric = frame.n, frame.g, frame.ricci
    ric_wedge = (
        np.einsum("xik,xjl->xijkl", ric, g)
        + np.einsum("xjl,xik->xijkl", ric, g)
        - np.einsum("xil,xjk->xijkl", ric, g)
        - np.einsum("xjk,xil->xijkl", ric, g)
    )
    g_wedge = np.einsum("xjl,xik->xijkl", g, g) - np.einsum("xil,xjk->xijkl", g, g)
    rebuilt = (
        frame.weyl
        + ric_wedge / (n - 2)
        - (frame.scalar / ((n - 1) * (n - 2)))[:, None, None, None, None] * g_wedge
    )
    return np.max(np.abs(rebuilt - frame.riemann), axis=(1, 2, 3, 4))


def cotton_symmetry_residuals(cot: np.ndarray, ginv: np.ndarray):
    """(antisymmetry, worst trace) of the Cotton tensor, per point."""
    antisym = np.max(np.abs(cot + np.einsum("xjik->xijk", cot)), axis=(1, 2, 3))
    traces = [
        np.einsum("xij,xijk->xk", ginv, cot),
        np.einsum("xik,xijk->xj", ginv, cot),
        np.einsum("xjk,xijk->xi", ginv, cot),
    ]
    worst = np.max([np.max(np.abs(t), axis=1) for t in traces], axis=0)
    return antisym, worst


@dataclass(frozen=True)
class ConformalBundle:
    weyl: TensorValue
    cotton: TensorValue
    bach: TensorValue
    evaluated_at: np.ndarray


def weyl(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
         backend: str = "auto") -> TensorValue:
    fr = Geometry(chart, fd_step, backend).frame(point)
    return TensorValue(fr.weyl[0], ("l",) * 4)


def cotton(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
           backend: str = "auto") -> TensorValue:
    jet = RicciJet(Geometry(chart, fd_step, backend), as_points(point, chart.dim))
    return TensorValue(cotton_values(jet)[0], ("l",) * 3, (("antisym", 0, 1),))


def bach(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
         backend: str = "auto") -> TensorValue:
    vals = bach_values(Geometry(chart, fd_step, backend), as_points(point, chart.dim))
    return TensorValue(vals[0], ("l", "l"))


def cotton_weyl_relation_residual(chart: Chart, point,
                                  fd_step: float = fd.DEFAULT_STEP,
                                  backend: str = "auto") -> float:
    geom = Geometry(chart, fd_step, backend)
    return float(cotton_weyl_relation_values(geom, as_points(point, chart.dim))[0])


def radial_weyl(chart: Chart, potential: ScalarField, point,
                fd_step: float = fd.DEFAULT_STEP, backend: str = "auto") -> TensorValue:
    geom = Geometry(chart, fd_step, backend)
    pts = as_points(point, chart.dim)
    grad_f = geom.scalar_gradient(potential, pts)
    vals = radial_weyl_values(geom.frame(pts), grad_f)
    return TensorValue(vals[0], ("l",) * 3)


def conformal_bundle(chart: Chart, point, fd_step: float = fd.DEFAULT_STEP,
                     backend: str = "auto") -> ConformalBundle:
    pts = as_points(point, chart.dim)
    return ConformalBundle(
        weyl=weyl(chart, point, fd_step, backend),
        cotton=cotton(chart, point, fd_step, backend),
        bach=bach(chart, point, fd_step, backend),
        evaluated_at=pts[0],
    )
