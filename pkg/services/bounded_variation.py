import itertools
import logging
import math

import numpy as np

from errors import DomainError
from models import BVBox, Cube, FieldSampler, QuadConfig, VerificationReport
from services import catalog
from services.field_ops import finite_difference
from services.quadrature import integrate_cube

logger = logging.getLogger("sdspace.bounded_variation")

# cells per axis drops with dimension so the corner table stays small
GRID_CAP = {1: 4096, 2: 128, 3: 16}


def _scalar_values(f, points):
    values = np.asarray(f.evaluate(points))
    if values.ndim > 1:
        raise DomainError(f"field {f.label} must be scalar here")
    return values


def _breakpoints(fields, cube):
    lower, upper = cube.lower, cube.upper
    out = []
    for j in range(cube.dimension):
        points = set()
        for f in fields:
            points.update(f.axis_breakpoints(j, lower[j], upper[j]))
        out.append(sorted(points))
    return out


def mixed_partial(g: FieldSampler, points):
    alpha = (1,) * g.n
    if g.derivative_provider is not None:
        return np.asarray(g.derivative(points, alpha))
    return g.scale * finite_difference(g, points, alpha)


def vitali_variation_result(g: FieldSampler, box: BVBox, cfg: QuadConfig = None):
    if g.n != box.n:
        raise DomainError("box and field dimensions differ")
    cube = box.as_cube()
    return integrate_cube(
        lambda points: np.abs(mixed_partial(g, points)), cube, cfg or QuadConfig(), _breakpoints([g], cube)
    )


def vitali_variation(g: FieldSampler, box: BVBox, cfg: QuadConfig = None) -> float:
    """Integral of |d^n g / dx_1 ... dx_n| over the box"""
    result = vitali_variation_result(g, box, cfg)
    if not result.converged:
        logger.warning(f"Vitali variation of {g.label} is unconverged, err_est={result.err_est:.3e}")
    return float(np.real(result.value))


def corner_integrals(f: FieldSampler, box: BVBox, cfg: QuadConfig = None, grid=64):
    """Integrals of f over [a, x] for x on a uniform grid, from cell integrals and cumulative sums"""
    cfg = cfg or QuadConfig()
    grid = min(int(grid), GRID_CAP.get(box.n, 8))
    edges = [np.linspace(a, b, grid + 1) for a, b in box.bounds]
    cells = np.zeros((grid,) * box.n, dtype=complex)
    converged = True
    for index in itertools.product(range(grid), repeat=box.n):
        lower = [edges[j][i] for j, i in enumerate(index)]
        upper = [edges[j][i + 1] for j, i in enumerate(index)]
        cell = Cube.from_bounds(lower, upper)
        result = integrate_cube(lambda p: _scalar_values(f, p), cell, cfg, _breakpoints([f], cell))
        converged = converged and result.converged
        cells[index] = result.value
    corners = cells
    for axis in range(box.n):
        corners = np.cumsum(corners, axis=axis)
    return corners, converged


def alexiewicz_norm(f: FieldSampler, box: BVBox, cfg: QuadConfig = None, grid=64) -> float:
    """Grid lower bound of sup_x |integral of f over [a, x]|"""
    if f.n != box.n:
        raise DomainError("box and field dimensions differ")
    corners, converged = corner_integrals(f, box, cfg, grid)
    if not converged:
        logger.warning(f"Alexiewicz norm of {f.label} used unconverged cell integrals")
    return float(np.max(np.abs(corners)))


def hk_bound_check(f, g, box: BVBox, cfg: QuadConfig = None, tolerance=1e-9, grid=64, label=None, report=None):
    """|integral of f g| <= ||f||_D * V(g) for g vanishing at the lower corner"""
    cfg = cfg or QuadConfig()
    report = report or VerificationReport("hk_bv")
    label = label or f"{f.label} x {g.label}"

    corner_value = abs(complex(np.asarray(g.evaluate(box.lower.reshape(1, -1))).ravel()[0]))
    precondition = report.check(f"{label}: g(a)", corner_value, 0.0, tolerance)
    if not precondition.passed:
        logger.warning(f"{label}: g does not vanish at the lower corner (|g(a)|={corner_value:.3e})")

    cube = box.as_cube()
    product = integrate_cube(
        lambda p: _scalar_values(f, p) * _scalar_values(g, p), cube, cfg, _breakpoints([f, g], cube)
    )
    norm_d = alexiewicz_norm(f, box, cfg, grid)
    variation = vitali_variation(g, box, cfg)
    lhs = abs(complex(product.value))
    rhs = norm_d * variation
    report.bound(label, lhs, rhs, tolerance, alexiewicz=norm_d, variation=variation)
    report.converged = report.converged and product.converged
    return report


def hk_catalog_pairs():
    """(label, f, g, box) pairs covering the multiplier bound"""
    one = lambda fam, **kw: catalog.build_field(fam, 1, **kw)  # noqa: E731
    x = one("monomial")
    return [
        ("sin x . x on [0, 2pi]", one("sine"), x, BVBox(((0.0, 2 * math.pi),))),
        ("alternating step . x on [0, 4]", one("alternating-step"), x, BVBox(((0.0, 4.0),))),
        ("sinc . x on [0, 20]", one("sinc"), x, BVBox(((0.0, 20.0),))),
        ("cos x^2 . x on [0, 10]", one("cosine-chirp"), x, BVBox(((0.0, 10.0),))),
        ("sin x . 0 on [0, 2pi]", one("sine"), one("zero"), BVBox(((0.0, 2 * math.pi),))),
        (
            "sin x sin y . xy on [0, pi]^2",
            catalog.build_field("sine-product", 2),
            catalog.build_field("monomial", 2),
            BVBox(((0.0, math.pi), (0.0, math.pi))),
        ),
    ]
