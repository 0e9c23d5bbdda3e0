"""Ready-made example spaces with analytic metric and potential partials.

All triple-carrying spaces are warped products over the unit round sphere,
g = phi(t)^2 dt^2 + h(t)^2 g_sphere, realized in hyperspherical fiber
coordinates (theta_1 .. theta_{n-1}).  Fiber components are products of
per-coordinate factors, so first and second partials come from closed-form
product rules rather than finite differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fd
from .charts import Chart, SampleGrid, perturbed_flat_chart
from .errors import (
    CurvlabError,
    InadmissibleMass,
    NonpositiveWarp,
    UnsupportedDimension,
)
from .geometry import Geometry
from .vstatic import Potential, TripleFrame, VStaticTriple

CATALOG_IDS = (
    "hemisphere",
    "cylinder",
    "schwarzschild",
    "euclidean_ball",
    "spherical_ball",
    "product_spheres",
    "perturbed_flat",
)

MAX_GENERAL_DIM = 6
DEFAULT_MARGIN = 0.05
LOAD_TOL_SCALAR = 1e-6
LOAD_TOL_VSTATIC = 1e-6
LOAD_TOL_WEYL = 1e-6
LOAD_TOL_BACH = 1e-4


# -- per-coordinate metric factors --------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """Scalar profile of one variable with two closed-form derivatives."""

    value: Callable[[np.ndarray], np.ndarray]
    d1: Callable[[np.ndarray], np.ndarray]
    d2: Callable[[np.ndarray], np.ndarray]


SIN_SQUARED = Profile(
    lambda x: np.sin(x) ** 2,
    lambda x: np.sin(2.0 * x),
    lambda x: 2.0 * np.cos(2.0 * x),
)
SQUARED = Profile(lambda x: x**2, lambda x: 2.0 * x, lambda x: np.full_like(x, 2.0))


def diagonal_chart(coords, domain, entries, name, margin=DEFAULT_MARGIN) -> Chart:
    """Chart whose metric is diagonal with g_ii = coeff_i * prod of profiles.

    entries[i] = (coeff, ((coord_index, Profile), ...)); at most one profile
    per coordinate per entry so the product rule stays first-order in each
    variable.
    """
    n = len(coords)

    def metric_fn(pts):
        m = pts.shape[0]
        g = np.zeros((m, n, n))
        for i, (coeff, factors) in enumerate(entries):
            val = np.full(m, coeff)
            for c, prof in factors:
                val = val * prof.value(pts[:, c])
            g[:, i, i] = val
        return g

    def partials_fn(pts):
        m = pts.shape[0]
        d1 = np.zeros((m, n, n, n))
        d2 = np.zeros((m, n, n, n, n))
        for i, (coeff, factors) in enumerate(entries):
            vals = [prof.value(pts[:, c]) for c, prof in factors]
            for a, (ca, prof_a) in enumerate(factors):
                others = np.full(m, coeff)
                for b, v in enumerate(vals):
                    if b != a:
                        others = others * v
                d1[:, ca, i, i] = prof_a.d1(pts[:, ca]) * others
                d2[:, ca, ca, i, i] = prof_a.d2(pts[:, ca]) * others
                for b in range(a + 1, len(factors)):
                    cb, prof_b = factors[b]
                    rest = np.full(m, coeff)
                    for k, v in enumerate(vals):
                        if k != a and k != b:
                            rest = rest * v
                    mixed = prof_a.d1(pts[:, ca]) * prof_b.d1(pts[:, cb]) * rest
                    d2[:, ca, cb, i, i] = mixed
                    d2[:, cb, ca, i, i] = mixed
        return d1, d2

    return Chart(
        coords=tuple(coords),
        domain=tuple(domain),
        metric_fn=metric_fn,
        metric_partials=partials_fn,
        margin=(margin,) * n,
        name=name,
    )


def _warped_chart(n, t_interval, radial_entry, fiber_radial, name) -> Chart:
    """g = (radial entry) dt^2 + fiber_radial(t) * round-sphere components."""
    coords = ["t"] + [f"th{j}" for j in range(1, n)]
    domain = [t_interval] + [(0.0, math.pi)] * (n - 2) + [(0.0, 2.0 * math.pi)]
    entries = [radial_entry]
    for j in range(1, n):
        factors = [(0, fiber_radial)] + [(b, SIN_SQUARED) for b in range(1, j)]
        entries.append((1.0, tuple(factors)))
    return diagonal_chart(coords, domain, entries, name)


# -- warped-product closed-form curvature -------------------------------------------

@dataclass(frozen=True)
class WarpProfile:
    """Radial data of g = phi(t)^2 dt^2 + h(t)^2 g_sphere."""

    phi: Callable
    dphi: Callable
    h: Callable
    dh: Callable
    d2h: Callable

    def curvatures(self, t: np.ndarray):
        """(radial, fiber) plane curvatures as functions of t."""
        phi, dphi = self.phi(t), self.dphi(t)
        h, dh, d2h = self.h(t), self.dh(t), self.d2h(t)
        if np.any(h <= 0):
            raise NonpositiveWarp("warp factor h must be positive")
        if np.any(phi <= 0):
            raise NonpositiveWarp("radial factor phi must be positive")
        # H = dh/ds with ds = phi dt (arclength reparameterization).
        H_prime = (d2h * phi - dh * dphi) / phi**2
        k_rad = -(H_prime / phi) / h
        k_fib = (1.0 - (dh / phi) ** 2) / h**2
        return k_rad, k_fib


def geodesic_warp(h, dh, d2h) -> WarpProfile:
    one = lambda t: np.ones_like(t)
    zero = lambda t: np.zeros_like(t)
    return WarpProfile(one, zero, h, dh, d2h)


def warped_curvature(warp: WarpProfile, points, n: int) -> dict:
    """Closed-form Riemann/Ricci/scalar of a warped product over the round sphere.

    Points are full chart coordinates (t, theta_1 .. theta_{n-1}); components
    are returned in those coordinates so they compare directly against the
    general engine.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != n:
        raise ValueError(f"points must have {n} coordinates")
    m = pts.shape[0]
    t = pts[:, 0]
    k_rad, k_fib = warp.curvatures(t)
    # Unit-sphere components in hyperspherical coordinates.
    ghat = np.zeros((m, n - 1, n - 1))
    acc = np.ones(m)
    for j in range(n - 1):
        ghat[:, j, j] = acc
        acc = acc * np.sin(pts[:, 1 + j]) ** 2
    g = np.zeros((m, n, n))
    g[:, 0, 0] = warp.phi(t) ** 2
    g[:, 1:, 1:] = warp.h(t)[:, None, None] ** 2 * ghat

    riem = np.zeros((m, n, n, n, n))
    g00 = g[:, 0, 0]
    gf = g[:, 1:, 1:]
    rad_block = k_rad[:, None, None] * g00[:, None, None] * gf
    riem[:, 0, 1:, 0, 1:] = rad_block
    riem[:, 1:, 0, 1:, 0] = rad_block
    riem[:, 0, 1:, 1:, 0] = -np.swapaxes(rad_block, 1, 2)
    riem[:, 1:, 0, 0, 1:] = -np.swapaxes(rad_block, 1, 2)
    fib_block = k_fib[:, None, None, None, None] * (
        np.einsum("xac,xbd->xabcd", gf, gf) - np.einsum("xad,xbc->xabcd", gf, gf)
    )
    riem[:, 1:, 1:, 1:, 1:] = fib_block

    ric = np.zeros((m, n, n))
    ric[:, 0, 0] = (n - 1) * k_rad * g00
    ric[:, 1:, 1:] = (k_rad + (n - 2) * k_fib)[:, None, None] * gf
    scal = 2 * (n - 1) * k_rad + (n - 1) * (n - 2) * k_fib
    return {"metric": g, "riemann": riem, "ricci": ric, "scalar": scal}


# -- Schwarzschild band --------------------------------------------------------------

def mass_bound(n: int) -> float:
    """Supremum of admissible masses: sqrt((n-2)^(n-2) / n^n)."""
    return math.sqrt((n - 2) ** (n - 2) / n**n)


def schwarzschild_profile(n: int, m: float):
    """w(t) = 1 - 2 m t^(2-n) - t^2 and its first two derivatives."""
    w = lambda t: 1.0 - 2.0 * m * t ** (2.0 - n) - t**2
    dw = lambda t: 2.0 * m * (n - 2) * t ** (1.0 - n) - 2.0 * t
    d2w = lambda t: -2.0 * m * (n - 2) * (n - 1) * t ** (-float(n)) - 2.0
    return w, dw, d2w


def schwarzschild_roots(n: int, m: float, scan_points: int = 4096) -> tuple[float, float]:
    """Two positive zeros of w(t) on (0, 1], by sign scan plus bisection.

    The scan locates sign changes of w; brackets fall back to the analytic
    maximizer t* = (m (n-2))^(1/n) when the roots are too close for the scan
    resolution.  Bisection runs to interval width 1e-15, leaving |w| at the
    returned roots at the 1e-14 level or below.
    """
    if not (0.0 < m < mass_bound(n)):
        raise InadmissibleMass(
            f"mass {m:g} outside admissible interval (0, {mass_bound(n):.6g}) for n={n}"
        )
    w, _, _ = schwarzschild_profile(n, m)
    ts = np.linspace(1e-6, 1.0, scan_points)
    ws = w(ts)
    signs = np.sign(ws)
    flips = np.where(signs[:-1] * signs[1:] < 0)[0]
    if len(flips) >= 2:
        brackets = [(ts[flips[0]], ts[flips[0] + 1]), (ts[flips[-1]], ts[flips[-1] + 1])]
    else:
        t_star = (m * (n - 2)) ** (1.0 / n)
        if w(t_star) <= 0:
            raise InadmissibleMass(f"no positive root pair for mass {m:g} at n={n}")
        brackets = [(1e-6, t_star), (t_star, 1.0)]
    roots = []
    for a, b in brackets:
        fa = w(a)
        while b - a > 1e-15:
            mid = 0.5 * (a + b)
            fm = w(mid)
            if fa * fm <= 0:
                b = mid
            else:
                a, fa = mid, fm
        roots.append(0.5 * (a + b))
    r1, r2 = sorted(roots)
    return float(r1), float(r2)


# -- catalog spaces ------------------------------------------------------------------

@dataclass(frozen=True)
class Declared:
    scalar_curvature: float | None = None
    kappa: float | None = None
    f_nonnegative: bool = False
    conformally_flat: bool = False
    bach_flat: bool = False
    pinching_gap: float | None = None
    nonneg_sectional: bool = False


@dataclass(frozen=True)
class CatalogSpace:
    id: str
    n: int
    params: dict
    chart: Chart
    potential: Potential | None
    triple: VStaticTriple | None
    declared: Declared
    warp: WarpProfile | None = None
    test_potential: Potential | None = None

    def grid(self, counts, seed: int | None = None) -> SampleGrid:
        return SampleGrid(self.chart, tuple(counts), seed)


def default_counts(space: CatalogSpace, radial: int = 64, fiber: int = 8):
    """Default per-coordinate sample counts: radial x fiber^（n-1) for warped
    charts, a uniform modest lattice otherwise."""
    n = space.n
    if space.warp is not None:
        return (radial,) + (fiber,) * (n - 1)
    if space.id == "perturbed_flat":
        return (3,) * n
    return (6,) * n


def _radial_potential(n, kappa, F, F1, F2, name) -> Potential:
    def fn(pts):
        return F(np.asarray(pts, dtype=float)[:, 0])

    def partials(pts):
        pts = np.asarray(pts, dtype=float)
        d = np.zeros_like(pts)
        d[:, 0] = F1(pts[:, 0])
        return d

    def second(pts):
        pts = np.asarray(pts, dtype=float)
        m = pts.shape[0]
        dd = np.zeros((m, n, n))
        dd[:, 0, 0] = F2(pts[:, 0])
        return dd

    return Potential(fn, kappa, partials, second, name=name)


def _build_hemisphere(n, params):
    chart = _warped_chart(
        n, (0.0, math.pi / 2), (1.0, ()), SIN_SQUARED, f"hemisphere{n}"
    )
    pot = _radial_potential(n, 0.0, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t),
                            "cos t")
    warp = geodesic_warp(np.sin, np.cos, lambda t: -np.sin(t))
    declared = Declared(
        scalar_curvature=float(n * (n - 1)),
        kappa=0.0,
        f_nonnegative=True,
        conformally_flat=True,
        bach_flat=True,
        pinching_gap=float(n * (n - 1)),
        nonneg_sectional=True,
    )
    return chart, pot, warp, declared


def _build_cylinder(n, params):
    radius_sq = (n - 2) / n
    length = math.pi / math.sqrt(n)
    const_profile = Profile(
        lambda x: np.full_like(x, radius_sq),
        lambda x: np.zeros_like(x),
        lambda x: np.zeros_like(x),
    )
    chart = _warped_chart(n, (0.0, length), (1.0, ()), const_profile, f"cylinder{n}")
    root_n = math.sqrt(n)
    pot = _radial_potential(
        n, 0.0,
        lambda t: np.sin(root_n * t),
        lambda t: root_n * np.cos(root_n * t),
        lambda t: -n * np.sin(root_n * t),
        "sin(sqrt(n) t)",
    )
    r = math.sqrt(radius_sq)
    warp = geodesic_warp(
        lambda t: np.full_like(t, r),
        lambda t: np.zeros_like(t),
        lambda t: np.zeros_like(t),
    )
    declared = Declared(
        scalar_curvature=float(n * (n - 1)),
        kappa=0.0,
        f_nonnegative=True,
        conformally_flat=True,
        bach_flat=True,
        pinching_gap=0.0,
        nonneg_sectional=True,
    )
    return chart, pot, warp, declared


def _build_schwarzschild(n, params):
    m = float(params.get("m", 0.1))
    r1, r2 = schwarzschild_roots(n, m)
    w, dw, d2w = schwarzschild_profile(n, m)
    inv_w = Profile(
        lambda t: 1.0 / w(t),
        lambda t: -dw(t) / w(t) ** 2,
        lambda t: (2.0 * dw(t) ** 2 - w(t) * d2w(t)) / w(t) ** 3,
    )
    chart = _warped_chart(n, (r1, r2), (1.0, ((0, inv_w),)), SQUARED,
                          f"schwarzschild{n}[m={m:g}]")
    pot = _radial_potential(
        n, 0.0,
        lambda t: np.sqrt(w(t)),
        lambda t: dw(t) / (2.0 * np.sqrt(w(t))),
        lambda t: d2w(t) / (2.0 * np.sqrt(w(t))) - dw(t) ** 2 / (4.0 * w(t) ** 1.5),
        "sqrt(1 - 2m t^(2-n) - t^2)",
    )
    warp = WarpProfile(
        phi=lambda t: 1.0 / np.sqrt(w(t)),
        dphi=lambda t: -0.5 * dw(t) * w(t) ** -1.5,
        h=lambda t: t,
        dh=lambda t: np.ones_like(t),
        d2h=lambda t: np.zeros_like(t),
    )
    declared = Declared(
        scalar_curvature=float(n * (n - 1)),
        kappa=0.0,
        f_nonnegative=True,
        conformally_flat=True,
        bach_flat=True,
    )
    return chart, pot, warp, declared


def _build_euclidean_ball(n, params):
    r0 = float(params.get("r0", 1.0))
    chart = _warped_chart(n, (0.0, r0), (1.0, ()), SQUARED, f"euclidean_ball{n}[r0={r0:g}]")
    c = 2.0 * (n - 1)
    pot = _radial_potential(
        n, 1.0,
        lambda t: (r0**2 - t**2) / c,
        lambda t: -2.0 * t / c,
        lambda t: np.full_like(t, -2.0 / c),
        "(r0^2 - r^2) / (2(n-1))",
    )
    warp = geodesic_warp(lambda t: t, lambda t: np.ones_like(t),
                         lambda t: np.zeros_like(t))
    declared = Declared(
        scalar_curvature=0.0,
        kappa=1.0,
        f_nonnegative=True,
        conformally_flat=True,
        bach_flat=True,
        pinching_gap=0.0,
        nonneg_sectional=True,
    )
    return chart, pot, warp, declared


def _build_spherical_ball(n, params):
    r0 = float(params.get("r0", math.pi / 3))
    if not (0.0 < r0 < math.pi / 2):
        raise CurvlabError("spherical ball requires boundary radius in (0, pi/2)")
    chart = _warped_chart(n, (0.0, r0), (1.0, ()), SIN_SQUARED,
                          f"spherical_ball{n}[r0={r0:g}]")
    c = (n - 1) * math.cos(r0)
    pot = _radial_potential(
        n, 1.0,
        lambda t: (np.cos(t) - math.cos(r0)) / c,
        lambda t: -np.sin(t) / c,
        lambda t: -np.cos(t) / c,
        "(cos r - cos r0) / ((n-1) cos r0)",
    )
    warp = geodesic_warp(np.sin, np.cos, lambda t: -np.sin(t))
    declared = Declared(
        scalar_curvature=float(n * (n - 1)),
        kappa=1.0,
        f_nonnegative=True,
        conformally_flat=True,
        bach_flat=True,
        pinching_gap=float(n * (n - 1)),
        nonneg_sectional=True,
    )
    return chart, pot, warp, declared


def _build_product_spheres(n, params):
    if n != 4:
        raise UnsupportedDimension("product of two 2-spheres is a 4-dimensional space")
    r2 = float(params.get("radius2", 1.0 / math.sqrt(2.0)))
    rho_sq = r2**2
    entries = (
        (1.0, ()),
        (1.0, ((0, SIN_SQUARED),)),
        (rho_sq, ()),
        (rho_sq, ((2, SIN_SQUARED),)),
    )
    chart = diagonal_chart(
        ("a1", "b1", "a2", "b2"),
        ((0.0, math.pi), (0.0, 2 * math.pi), (0.0, math.pi), (0.0, 2 * math.pi)),
        entries,
        f"product_spheres[r2={r2:g}]",
    )
    scal = 2.0 + 2.0 / rho_sq

    def test_fn(pts):
        return np.sin(pts[:, 0]) * np.cos(pts[:, 2])

    def test_d1(pts):
        d = np.zeros_like(pts)
        d[:, 0] = np.cos(pts[:, 0]) * np.cos(pts[:, 2])
        d[:, 2] = -np.sin(pts[:, 0]) * np.sin(pts[:, 2])
        return d

    def test_d2(pts):
        m = pts.shape[0]
        dd = np.zeros((m, 4, 4))
        f = test_fn(pts)
        dd[:, 0, 0] = -f
        dd[:, 2, 2] = -f
        mixed = -np.cos(pts[:, 0]) * np.sin(pts[:, 2])
        dd[:, 0, 2] = mixed
        dd[:, 2, 0] = mixed
        return dd

    test_pot = Potential(test_fn, 0.0, test_d1, test_d2, name="sin(a1) cos(a2)")
    ric0_sq = 4 * (0.5 * (1.0 / rho_sq - 1.0)) ** 2
    declared = Declared(
        scalar_curvature=scal,
        pinching_gap=scal**2 / 12.0 - ric0_sq,
        nonneg_sectional=True,
    )
    return chart, None, None, declared, test_pot


_BUILDERS = {
    "hemisphere": _build_hemisphere,
    "cylinder": _build_cylinder,
    "schwarzschild": _build_schwarzschild,
    "euclidean_ball": _build_euclidean_ball,
    "spherical_ball": _build_spherical_ball,
}


def build(space_id: str, n: int = 3, params: dict | None = None,
          verify: bool = True, fd_step: float = fd.DEFAULT_STEP) -> CatalogSpace:
    """Construct a catalog space and verify its declared constants.

    Verification samples a small margin-respecting probe grid: declared
    scalar curvature within 1e-6, the potential-equation residual within
    1e-6, Weyl within 1e-6 where conformal flatness is declared, and the
    Bach tensor within 1e-4 at two probe points where Bach flatness is
    declared.
    """
    params = dict(params or {})
    if space_id not in CATALOG_IDS:
        raise CurvlabError(f"unknown catalog id {space_id!r}; expected one of {CATALOG_IDS}")
    if n < 3:
        raise UnsupportedDimension("catalog spaces require n >= 3")
    if n > MAX_GENERAL_DIM:
        raise UnsupportedDimension(f"general chart engine is capped at n = {MAX_GENERAL_DIM}")

    test_pot = None
    if space_id == "perturbed_flat":
        seed = int(params.get("seed", 42))
        amplitude = float(params.get("amplitude", 0.05))
        chart = perturbed_flat_chart(n, seed, amplitude)
        space = CatalogSpace(space_id, n, {"seed": seed, "amplitude": amplitude},
                             chart, None, None, Declared(), None)
        return space
    if space_id == "product_spheres":
        chart, pot, warp, declared, test_pot = _build_product_spheres(n, params)
        params.setdefault("radius2", 1.0 / math.sqrt(2.0))
    else:
        chart, pot, warp, declared = _BUILDERS[space_id](n, params)
        if space_id == "schwarzschild":
            params.setdefault("m", 0.1)
        elif space_id == "euclidean_ball":
            params.setdefault("r0", 1.0)
        elif space_id == "spherical_ball":
            params.setdefault("r0", math.pi / 3)

    triple = None
    if pot is not None:
        triple = VStaticTriple(chart, pot, declared.scalar_curvature, name=chart.name)
    space = CatalogSpace(space_id, n, params, chart, pot, triple, declared, warp,
                         test_potential=test_pot)
    if verify:
        verify_declared(space, fd_step)
    return space


def probe_points(space: CatalogSpace, radial: int = 5, fiber: int = 2) -> np.ndarray:
    counts = default_counts(space, radial=radial, fiber=fiber)
    if space.warp is None:
        counts = (2,) * space.n
    return SampleGrid(space.chart, counts).uniform_points()


def verify_declared(space: CatalogSpace, fd_step: float = fd.DEFAULT_STEP) -> None:
    pts = probe_points(space)
    geom = Geometry(space.chart, fd_step)
    decl = space.declared
    if decl.scalar_curvature is not None:
        fr = geom.frame(pts)
        err = float(np.max(np.abs(fr.scalar - decl.scalar_curvature)))
        if err > LOAD_TOL_SCALAR:
            raise CurvlabError(
                f"{space.chart.name}: scalar curvature off declared value by {err:.3e}"
            )
    if space.triple is not None:
        tf = TripleFrame(space.triple, pts, fd_step)
        resid = float(np.max(tf.vstatic_residual))
        if resid > LOAD_TOL_VSTATIC:
            raise CurvlabError(
                f"{space.chart.name}: potential-equation residual {resid:.3e}"
            )
        if decl.f_nonnegative and float(np.min(tf.f)) < -1e-12:
            raise CurvlabError(f"{space.chart.name}: declared-nonnegative f dips negative")
    if decl.conformally_flat:
        fr = geom.frame(pts)
        werr = float(np.max(np.abs(fr.weyl)))
        if werr > LOAD_TOL_WEYL:
            raise CurvlabError(f"{space.chart.name}: Weyl tensor {werr:.3e} though "
                               "declared conformally flat")
    if decl.bach_flat:
        from .conformal import bach_values

        berr = float(np.max(np.abs(bach_values(geom, pts[:: max(1, len(pts) // 2)][:2]))))
        if berr > LOAD_TOL_BACH:
            raise CurvlabError(f"{space.chart.name}: Bach tensor {berr:.3e} though "
                               "declared Bach-flat")
