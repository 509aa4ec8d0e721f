"""Panel Gauss-Legendre quadrature over intervals, boxes and the half line.

Integrands are vectorized: an interval integrand takes an (N,) array of
abscissae, a cube integrand an (N, n) array of points, and both return (N,)
or (N, c) complex arrays.
"""

from functools import lru_cache
import logging
import math

import numpy as np

from errors import DomainError
from models import Cube, QuadConfig, QuadResult
from services.reduction import tree_sum, tree_sum_array

logger = logging.getLogger("sdspace.quadrature")

MAX_CUBE_DIMENSION = 4
CHUNK_NODES = 1 << 16


@lru_cache(maxsize=32)
def gauss_legendre(npts):
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_cuts(lo, hi, breakpoints=(), max_width=math.inf):
    """Sorted panel edges on [lo, hi]: the breakpoints inside plus width capping"""
    edges = [lo] + sorted(b for b in set(breakpoints) if lo < b < hi) + [hi]
    cuts = [lo]
    for left, right in zip(edges[:-1], edges[1:]):
        pieces = max(1, int(math.ceil((right - left) / max_width)))
        step = (right - left) / pieces
        cuts.extend(left + step * j for j in range(1, pieces))
        cuts.append(right)
    return cuts


def _rule(f, lo, hi, npts):
    nodes, weights = gauss_legendre(npts)
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo) + half * nodes
    values = np.asarray(f(x), dtype=complex)
    w = half * weights
    if values.ndim > 1:
        w = w[:, None]
    weighted = w * values
    return weighted.sum(axis=0), float(np.abs(weighted).sum())


def _diff(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def integrate_interval(f, bounds, cfg: QuadConfig = None) -> QuadResult:
    cfg = cfg or QuadConfig()
    a, b = float(bounds[0]), float(bounds[1])
    if not a < b:
        raise DomainError(f"integration bounds must satisfy a < b, got [{a}, {b}]")
    total_width = b - a
    npts = cfg.points_per_panel

    cuts = panel_cuts(a, b, cfg.breakpoints, cfg.max_panel_width)
    # stack holds (lo, hi, coarse value); popped left to right
    stack = []
    for lo, hi in reversed(list(zip(cuts[:-1], cuts[1:]))):
        stack.append((lo, hi, _rule(f, lo, hi, npts)[0]))

    accepted, errors = [], []
    panels = len(stack)
    converged = True
    while stack:
        lo, hi, coarse = stack.pop()
        mid = 0.5 * (lo + hi)
        left, left_abs = _rule(f, lo, mid, npts)
        right, right_abs = _rule(f, mid, hi, npts)
        fine = left + right
        diff = _diff(coarse, fine)
        allowed = max(cfg.abs_tol * (hi - lo) / total_width, cfg.rel_tol * (left_abs + right_abs))
        if diff <= allowed:
            accepted.append(fine)
            errors.append(diff)
            continue
        if panels + 1 > cfg.max_panels_per_axis:
            converged = False
            accepted.append(fine)
            errors.append(diff)
            continue
        panels += 1
        stack.append((mid, hi, right))
        stack.append((lo, mid, left))

    value = tree_sum(accepted)
    err_est = tree_sum(errors)
    if not converged:
        logger.warning(
            f"Interval [{a}, {b}] hit the panel cap {cfg.max_panels_per_axis}, err_est={err_est:.3e}"
        )
    return QuadResult(value, err_est, len(accepted), converged)


def integrate_semi_infinite(f, cfg: QuadConfig = None) -> QuadResult:
    """Integral over [0, inf) through y = t / (1 - t)"""
    cfg = cfg or QuadConfig()

    def mapped(t):
        one_minus = 1.0 - t
        y = t / one_minus
        values = np.asarray(f(y), dtype=complex)
        jac = 1.0 / one_minus ** 2
        if values.ndim > 1:
            jac = jac[:, None]
        return np.nan_to_num(values * jac, nan=0.0, posinf=0.0, neginf=0.0)

    return integrate_interval(mapped, (0.0, 1.0), cfg.with_breakpoints(()))


def _axis_rule(cuts, refinement, npts):
    nodes, weights = gauss_legendre(npts)
    xs, ws = [], []
    pieces = 1 << refinement
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        step = (hi - lo) / pieces
        for j in range(pieces):
            left = lo + j * step
            half = 0.5 * step
            xs.append(left + half + half * nodes)
            ws.append(half * weights)
    return np.concatenate(xs), np.concatenate(ws)


def _tensor_sum(f, axes):
    """Sum of w * f over the tensor grid, chunked along axis 0 and tree-reduced"""
    (x0, w0), rest = axes[0], axes[1:]
    rest_x = [x for x, _ in rest]
    rest_w = [w for _, w in rest]
    rest_grid = np.stack(np.meshgrid(*rest_x, indexing="ij"), axis=-1).reshape(-1, len(rest))
    rest_weight = np.ones(1)
    for w in rest_w:
        rest_weight = np.multiply.outer(rest_weight, w).ravel()
    rows = max(1, CHUNK_NODES // rest_grid.shape[0])

    partials = []
    for start in range(0, x0.shape[0], rows):
        xs = x0[start : start + rows]
        ws = w0[start : start + rows]
        points = np.concatenate(
            [np.repeat(xs, rest_grid.shape[0])[:, None], np.tile(rest_grid, (xs.shape[0], 1))],
            axis=1,
        )
        weight = np.multiply.outer(ws, rest_weight).ravel()
        values = np.asarray(f(points), dtype=complex)
        if values.ndim > 1:
            weight = weight[:, None]
        partials.append((weight * values).sum(axis=0))
    return tree_sum_array(np.asarray(partials))


def integrate_cube(f, cube: Cube, cfg: QuadConfig = None, axis_breakpoints=None) -> QuadResult:
    """Tensor Gauss-Legendre over an axis-aligned box.

    ``axis_breakpoints[j]`` lists coordinates on axis j where the integrand may jump.
    The error estimate is the change under one global bisection of every panel.
    """
    cfg = cfg or QuadConfig()
    n = cube.dimension
    if n > MAX_CUBE_DIMENSION:
        raise DomainError(f"tensor cubature supports n <= {MAX_CUBE_DIMENSION}, got {n}")
    lower, upper = cube.lower, cube.upper
    axis_breakpoints = axis_breakpoints or [()] * n

    if n == 1:

        def line(x):
            return f(x.reshape(-1, 1))

        return integrate_interval(
            line,
            (lower[0], upper[0]),
            cfg.with_breakpoints(tuple(cfg.breakpoints) + tuple(axis_breakpoints[0])),
        )

    cuts = [
        panel_cuts(lower[j], upper[j], axis_breakpoints[j], cfg.max_panel_width) for j in range(n)
    ]
    npts = cfg.points_per_panel

    def nodes_at(level):
        return int(np.prod([(len(c) - 1) * npts * (1 << level) for c in cuts]))

    def evaluate(level):
        return _tensor_sum(f, [_axis_rule(c, level, npts) for c in cuts])

    coarse = evaluate(0)
    if nodes_at(1) > cfg.max_cube_nodes:
        logger.warning(
            f"Cube cubature at n={n} cannot refine within {cfg.max_cube_nodes} nodes; reporting one level"
        )
        return QuadResult(coarse, float(np.max(np.abs(coarse))), nodes_at(0), False)

    level = 1
    while True:
        fine = evaluate(level)
        diff = _diff(coarse, fine)
        if diff <= max(cfg.abs_tol, cfg.rel_tol * float(np.max(np.abs(fine)))):
            return QuadResult(fine, diff, nodes_at(level), True)
        if nodes_at(level + 1) > cfg.max_cube_nodes:
            logger.warning(f"Cube cubature at n={n} stopped at {nodes_at(level)} nodes, err_est={diff:.3e}")
            return QuadResult(fine, diff, nodes_at(level), False)
        coarse = fine
        level += 1
