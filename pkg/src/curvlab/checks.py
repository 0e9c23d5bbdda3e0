"""Named residual checks over sampling grids, producing ResidualReports.

Each check evaluates one identity (or inequality) pointwise over a grid and
reduces to (max_abs, mean_abs, max_rel).  Relative residuals divide by the
largest |individual term| of the identity at the same point, clamped below
by floor/tolerance so the pass rule

    pass  <=>  max_rel <= tolerance  or  max_abs <= floor

never divides by a vanishing scale.  Absolute checks use scale 1 and
floor = tolerance.  Grids are evaluated in fixed-size chunks (optionally on
a thread pool); per-point values do not depend on the chunking, and reports
are assembled in point order, so results are identical for any thread count.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bochner, fd
from .catalog import CatalogSpace, default_counts
from .charts import SampleGrid
from .conformal import (
    cotton_symmetry_residuals,
    cotton_values,
    cotton_weyl_relation_values,
    decomposition_closure_residual,
    radial_weyl_values,
    weyl_trace_residual,
)
from .errors import CurvlabError, DimensionUnsupported
from .geometry import (
    Geometry,
    RicciJet,
    first_bianchi_residual,
    pair_symmetry_residual,
)
from .vstatic import TripleFrame

CHUNK = 2048


@dataclass(frozen=True)
class CheckOptions:
    counts: tuple[int, ...] | None = None
    random_points: int = 0
    point_seed: int = 1234
    fd_step: float = fd.DEFAULT_STEP
    backend: str = "auto"
    threads: int = 1
    quad_order: int = 32


@dataclass(frozen=True)
class SubResult:
    sub: str
    residual: np.ndarray
    scale: np.ndarray | None = None
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ResidualReport:
    space: str
    params: dict
    check: str
    grid: str
    max_abs: float
    mean_abs: float
    max_rel: float
    points: int
    tolerance: float
    floor: float
    passed: bool
    runtime_ms: int
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CheckRun:
    report: ResidualReport
    points: np.ndarray
    residual: np.ndarray
    rel: np.ndarray

    def failing_points(self, limit: int = 20):
        bad = np.where(self.rel > self.report.tolerance)[0]
        if self.report.max_abs <= self.report.floor:
            bad = np.array([], dtype=int)
        return [(self.points[i], float(self.residual[i])) for i in bad[:limit]]


@dataclass(frozen=True)
class CheckDef:
    id: str
    description: str
    tolerance: float
    floor: float
    mode: str                     # "abs" | "rel"
    needs_triple: bool
    min_dim: int
    runner: Callable


def _require_triple(space: CatalogSpace, check_id: str):
    if space.triple is None:
        raise CurvlabError(f"check {check_id!r} needs a potential; "
                           f"{space.id!r} carries none")


def _lemma2_field(space: CatalogSpace):
    if space.triple is not None:
        return space.triple.potential
    if space.test_potential is not None:
        return space.test_potential
    raise CurvlabError(f"{space.id!r} has no scalar field for the divergence formula")


# -- runners (space, pts, opts) -> list[SubResult] ---------------------------------

def _run_vstatic(space, pts, opts):
    _require_triple(space, "vstatic")
    tf = TripleFrame(space.triple, pts, opts.fd_step, opts.backend)
    return [SubResult("", tf.vstatic_residual)]


def _run_trace(space, pts, opts):
    _require_triple(space, "trace")
    tf = TripleFrame(space.triple, pts, opts.fd_step, opts.backend)
    return [SubResult("", tf.trace_residual)]


def _run_traceless(space, pts, opts):
    _require_triple(space, "traceless")
    tf = TripleFrame(space.triple, pts, opts.fd_step, opts.backend)
    return [SubResult("", tf.traceless_residual)]


def _run_lemma1(space, pts, opts):
    _require_triple(space, "lemma1")
    tf = TripleFrame(space.triple, pts, opts.fd_step, opts.backend)
    return [SubResult("", tf.ricci_gradient_residual)]


def _run_decomposition(space, pts, opts):
    _require_triple(space, "decomposition")
    tf = TripleFrame(space.triple, pts, opts.fd_step, opts.backend)
    return [SubResult("", tf.decomposition_residual)]


def _run_lemma2(space, pts, opts):
    f_field = _lemma2_field(space)
    geom = Geometry(space.chart, opts.fd_step, opts.backend)
    scal = geom.frame(pts).scalar
    spread = float(scal.max() - scal.min())
    if spread > bochner.CONSTANT_R_TOL:
        from .errors import NonConstantScalarCurvature

        raise NonConstantScalarCurvature(
            f"scalar curvature varies by {spread:.3e} over the grid"
        )
    ws = bochner.Workspace(geom, f_field, pts)
    resid, scale = ws.constant_r_divergence_residual()
    return [SubResult("", resid, scale)]


def _run_lemma3(space, pts, opts):
    _require_triple(space, "lemma3")
    ws = bochner.Workspace.for_triple(space.triple, pts, opts.fd_step, opts.backend)
    resid, scale = ws.vstatic_divergence_residual()
    return [SubResult("", resid, scale)]


def _run_theorem2(space, pts, opts):
    _require_triple(space, "theorem2")
    ws = bochner.Workspace.for_triple(space.triple, pts, opts.fd_step, opts.backend)
    bd = ws.breakdown()
    return [SubResult("", np.abs(bd.residual), bd.scale())]


def _run_eq312(space, pts, opts):
    _require_triple(space, "eq312")
    ws = bochner.Workspace.for_triple(space.triple, pts, opts.fd_step, opts.backend)
    resid, scale = ws.weyl_cotton_collapse_residual()
    return [SubResult("", resid, scale)]


def _run_eq313(space, pts, opts):
    _require_triple(space, "eq313")
    ws = bochner.Workspace.for_triple(space.triple, pts, opts.fd_step, opts.backend)
    resid, scale = ws.reduced_residual()
    return [SubResult("", resid, scale)]


def _run_lemma4(space, pts, opts):
    geom = Geometry(space.chart, opts.fd_step, opts.backend)
    resid, _scale = bochner.cubic_identity_residual_values(geom, pts)
    return [SubResult("", resid)]


def _run_okumura(space, pts, opts):
    geom = Geometry(space.chart, opts.fd_step, opts.backend)
    gap = bochner.okumura_gap_values(geom, pts)
    return [SubResult("", np.maximum(0.0, -gap),
                      extras={"min_gap": gap, "max_gap": gap})]


def _run_pinching(space, pts, opts):
    geom = Geometry(space.chart, opts.fd_step, opts.backend)
    gap = bochner.pinching_gap_values(geom, pts)
    declared = space.declared.pinching_gap
    if declared is None:
        resid = np.zeros_like(gap)
    else:
        resid = np.abs(gap - declared)
    return [SubResult("", resid, extras={"min_gap": gap, "max_gap": gap})]


def _run_berger(space, pts, opts):
    geom = Geometry(space.chart, opts.fd_step, opts.backend)
    e1, e2 = bochner.berger_check_values(geom, pts, geom.ricci_field())
    scale = np.maximum(np.abs(e1), np.abs(e2))
    return [SubResult("", np.abs(e1 - e2), scale,
                      extras={"min_e1": e1, "min_e2": e2})]


WEYL_SUB_TOLS = {
    "trace": 1e-8,
    "closure": 1e-10,
    "riemann-symmetry": 1e-9,
    "cotton-symmetry": 1e-9,
    "cotton-weyl": 1e-4,
    "second-bianchi": 1e-5,
    "ricci-identity": 1e-4,
    "radial-weyl": 1e-6,
}


def _run_weyl_identities(space, pts, opts):
    geom = Geometry(space.chart, opts.fd_step, opts.backend)
    fr = geom.frame(pts)
    out = [
        SubResult("trace", weyl_trace_residual(fr)),
        SubResult("closure", decomposition_closure_residual(fr)),
        SubResult("riemann-symmetry",
                  np.maximum(pair_symmetry_residual(fr.riemann),
                             first_bianchi_residual(fr.riemann))),
    ]
    jet = RicciJet(geom, pts)
    cot = cotton_values(jet)
    antisym, trace = cotton_symmetry_residuals(cot, fr.ginv)
    out.append(SubResult("cotton-symmetry", np.maximum(antisym, trace)))
    if space.n >= 4:
        out.append(SubResult("cotton-weyl", cotton_weyl_relation_values(geom, pts)))
    out.append(SubResult("second-bianchi", geom.riemann_divergence_residual(pts)))
    out.append(SubResult("ricci-identity", geom.ricci_identity_residual(pts)))
    if space.declared.conformally_flat and space.potential is not None:
        grad_f = geom.scalar_gradient(space.potential, pts)
        rw = radial_weyl_values(fr, grad_f)
        out.append(SubResult("radial-weyl", np.max(np.abs(rw), axis=(1, 2, 3))))
    return out


CHECKS: dict[str, CheckDef] = {
    "vstatic": CheckDef("vstatic", "potential equation residual", 1e-6, 1e-6, "abs",
                        True, 3, _run_vstatic),
    "trace": CheckDef("trace", "trace of the potential equation", 1e-6, 1e-6, "abs",
                      True, 3, _run_trace),
    "traceless": CheckDef("traceless", "traceless potential equation", 1e-6, 1e-6,
                          "abs", True, 3, _run_traceless),
    "lemma1": CheckDef("lemma1", "Ricci gradient identity on solutions", 1e-5, 1e-5,
                       "abs", True, 3, _run_lemma1),
    "decomposition": CheckDef("decomposition",
                              "f Cotton = auxiliary + radial Weyl split", 1e-5, 1e-5,
                              "abs", True, 3, _run_decomposition),
    "lemma2": CheckDef("lemma2", "divergence formula at constant scalar curvature",
                       1e-4, 1e-8, "rel", False, 3, _run_lemma2),
    "lemma3": CheckDef("lemma3", "divergence formula on solutions", 1e-4, 1e-8,
                       "rel", True, 3, _run_lemma3),
    "theorem2": CheckDef("theorem2", "Bochner-type divergence identity", 1e-4, 1e-8,
                         "rel", True, 3, _run_theorem2),
    "eq312": CheckDef("eq312", "Weyl-Ricci collapse under zero radial Weyl", 1e-4,
                      1e-8, "rel", True, 4, _run_eq312),
    "eq313": CheckDef("eq313", "reduced Bochner identity", 1e-4, 1e-8, "rel", True,
                      3, _run_eq313),
    "lemma4": CheckDef("lemma4", "cubic curvature identity", 1e-6, 1e-6, "abs",
                       False, 3, _run_lemma4),
    "okumura": CheckDef("okumura", "Okumura inequality gap >= 0", 1e-9, 1e-9, "abs",
                        False, 3, _run_okumura),
    "pinching": CheckDef("pinching", "pinching gap against declared value", 1e-6,
                         1e-6, "abs", False, 3, _run_pinching),
    "berger": CheckDef("berger", "commutator vs eigenvalue form (T = Ric)", 1e-4,
                       1e-8, "rel", False, 3, _run_berger),
    "weyl-identities": CheckDef("weyl-identities",
                                "conformal tensor symmetries and relations", 1e-4,
                                1e-10, "abs", False, 3, _run_weyl_identities),
    "integral": CheckDef("integral", "divergence-theorem radial integral", 1e-4,
                         bochner.TRIVIAL_INTEGRAND_TOL, "rel", True, 3, None),
}

CHECK_IDS = tuple(CHECKS)


def supported_checks(space: CatalogSpace) -> tuple[str, ...]:
    out = []
    for cid, cdef in CHECKS.items():
        if cdef.needs_triple and space.triple is None:
            if cid == "lemma2" and space.test_potential is not None:
                pass
            else:
                continue
        if space.n < cdef.min_dim:
            continue
        if cid == "lemma2" and not _has_constant_r(space):
            continue
        if cid == "integral" and space.warp is None:
            continue
        out.append(cid)
    return tuple(out)


def _has_constant_r(space: CatalogSpace) -> bool:
    return space.declared.scalar_curvature is not None


def grid_points(space: CatalogSpace, opts: CheckOptions) -> tuple[np.ndarray, str]:
    if opts.random_points:
        grid = SampleGrid(space.chart, (1,) * space.n, seed=opts.point_seed)
        pts = grid.random_points(opts.random_points)
        return pts, f"random{opts.random_points}[seed={opts.point_seed}]"
    counts = opts.counts or default_counts(space)
    pts = SampleGrid(space.chart, counts).uniform_points()
    return pts, "x".join(str(c) for c in counts)


def _chunked(runner, space, pts, opts):
    chunks = [pts[i:i + CHUNK] for i in range(0, len(pts), CHUNK)]
    if opts.threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            results = list(pool.map(lambda c: runner(space, c, opts), chunks))
    else:
        results = [runner(space, c, opts) for c in chunks]
    merged: dict[str, list[SubResult]] = {}
    for subs in results:
        for s in subs:
            merged.setdefault(s.sub, []).append(s)
    out = []
    for sub, parts in merged.items():
        resid = np.concatenate([p.residual for p in parts])
        scale = (np.concatenate([p.scale for p in parts])
                 if parts[0].scale is not None else None)
        extras = {}
        for key in parts[0].extras:
            vals = np.concatenate([np.atleast_1d(p.extras[key]) for p in parts])
            extras[key] = float(vals.min() if key.startswith("min") else vals.max())
        out.append(SubResult(sub, resid, scale, extras))
    return out


def _assemble(space, cdef, sub, pts, grid_label, elapsed_ms, tолerance=None):
    tol = cdef.tolerance if tолerance is None else tолerance
    floor = cdef.floor
    resid = sub.residual
    if cdef.mode == "rel" and sub.scale is not None:
        rel = resid / np.maximum(sub.scale, floor / tol)
    else:
        rel = resid
    max_abs = float(resid.max()) if len(resid) else 0.0
    mean_abs = float(resid.mean()) if len(resid) else 0.0
    max_rel = float(rel.max()) if len(rel) else 0.0
    passed = bool(max_rel <= tol or max_abs <= floor)
    check_name = cdef.id if not sub.sub else f"{cdef.id}/{sub.sub}"
    report = ResidualReport(
        space=space.id,
        params=dict(space.params, n=space.n),
        check=check_name,
        grid=grid_label,
        max_abs=max_abs,
        mean_abs=mean_abs,
        max_rel=max_rel,
        points=len(resid),
        tolerance=tol,
        floor=floor,
        passed=passed,
        runtime_ms=elapsed_ms,
        extras=sub.extras,
    )
    return CheckRun(report, pts, resid, rel)


def _run_integral(space, cdef, opts, grid_label) -> list[CheckRun]:
    t0 = time.perf_counter()
    res = bochner.integrate_radial_auto(space, "div_f_grad_ricnorm",
                                        order=opts.quad_order)
    elapsed = int((time.perf_counter() - t0) * 1000)
    resid = np.array([abs(res.value)])
    scale = np.array([res.abs_integral])
    extras = {
        "value": res.value,
        "abs_integral": res.abs_integral,
        "order_estimate": res.order_estimate,
        "quad_order": float(res.quad_order),
        "delta": res.delta,
    }
    for i, c in enumerate(res.clipped):
        extras[f"clipped{i}"] = c
    sub = SubResult("", resid, scale, extras)
    run = _assemble(space, cdef, sub, np.zeros((1, space.n)), grid_label, elapsed)
    # Trivial integrands (zero within coarse-step noise) verify the theorem
    # outright; the ratio rule only applies to resolvable integrands.
    if res.abs_integral <= bochner.TRIVIAL_INTEGRAND_TOL:
        report = run.report
        object.__setattr__(report, "passed", True)
        object.__setattr__(report, "max_rel", 0.0)
    return [run]


def run_check(space: CatalogSpace, check_id: str,
              opts: CheckOptions = CheckOptions()) -> list[CheckRun]:
    if check_id not in CHECKS:
        raise CurvlabError(f"unknown check {check_id!r}; expected one of {CHECK_IDS}")
    cdef = CHECKS[check_id]
    if space.n < cdef.min_dim:
        raise DimensionUnsupported(
            f"check {check_id!r} requires n >= {cdef.min_dim}, space has n = {space.n}"
        )
    pts, grid_label = grid_points(space, opts)
    if check_id == "integral":
        return _run_integral(space, cdef, opts, grid_label)
    t0 = time.perf_counter()
    subs = _chunked(cdef.runner, space, pts, opts)
    elapsed = int((time.perf_counter() - t0) * 1000)
    runs = []
    for sub in subs:
        tol = WEYL_SUB_TOLS.get(sub.sub) if check_id == "weyl-identities" else None
        runs.append(_assemble(space, cdef, sub, pts, grid_label, elapsed, tол=tol)
                    if False else
                    _assemble(space, cdef, sub, pts, grid_label, elapsed, tol))
    return runs
