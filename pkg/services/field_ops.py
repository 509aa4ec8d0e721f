"""Algebra on FieldSampler objects: promotion, sums, derivatives and dilations."""

from dataclasses import replace
import logging

import numpy as np

from errors import DimensionMismatch, DomainError, FiniteDifferenceError
from models import Cube, FieldSampler

logger = logging.getLogger("sdspace.field_ops")

MAX_FD_ORDER = 3


def unit_index(n, axis, order=1):
    alpha = [0] * n
    alpha[axis] = order
    return tuple(alpha)


def zero_field(n, components=1):
    def evaluate(points):
        shape = (points.shape[0],) if components == 1 else (points.shape[0], components)
        return np.zeros(shape, dtype=complex)

    return FieldSampler(
        n=n,
        components=components,
        eval=evaluate,
        label="zero",
        support=None,
        derivative_provider=lambda points, alpha: evaluate(points),
        sup_norm=0.0,
    )


def promote_scalar(f: FieldSampler) -> FieldSampler:
    """Replicate a scalar field into every component"""
    if f.is_vector:
        raise DomainError(f"field {f.label} is already a vector field")
    if f.n == 1:
        return f
    n = f.n

    def evaluate(points):
        return np.repeat(np.asarray(f.eval(points))[:, None], n, axis=1)

    provider = None
    if f.derivative_provider is not None:

        def provider(points, alpha):
            return np.repeat(np.asarray(f.derivative_provider(points, alpha))[:, None], n, axis=1)

    return replace(
        f,
        components=n,
        eval=evaluate,
        derivative_provider=provider,
        label=f"vec({f.label})",
        params={**f.params, "vector": True},
    )


def as_vector(f: FieldSampler) -> FieldSampler:
    return f if f.is_vector or f.n == 1 else promote_scalar(f)


def _merge_breakpoints(*fields, extra=None):
    sources = [g.breakpoints for g in fields if g.breakpoints is not None]
    if extra is not None:
        sources.append(extra)
    if not sources:
        return None

    def breakpoints(axis, lo, hi):
        points = set()
        for source in sources:
            points.update(source(axis, lo, hi))
        return sorted(points)

    return breakpoints


def _bounding(supports):
    if any(s is None for s in supports):
        return None
    lower = np.min([s.lower for s in supports], axis=0)
    upper = np.max([s.upper for s in supports], axis=0)
    return Cube.from_bounds(lower, upper)


def field_sum(f: FieldSampler, g: FieldSampler, label=None) -> FieldSampler:
    if f.n != g.n:
        raise DimensionMismatch("cannot add fields on different spaces")
    if f.components != g.components:
        f, g = as_vector(f), as_vector(g)

    def evaluate(points):
        return f.evaluate(points) + g.evaluate(points)

    provider = None
    if f.derivative_provider is not None and g.derivative_provider is not None:

        def provider(points, alpha):
            return f.derivative(points, alpha) + g.derivative(points, alpha)

    sup = None
    if f.sup_norm is not None and g.sup_norm is not None:
        sup = abs(f.scale) * f.sup_norm + abs(g.scale) * g.sup_norm
    return FieldSampler(
        n=f.n,
        components=f.components,
        eval=evaluate,
        label=label or f"({f.label}+{g.label})",
        support=_bounding([f.support, g.support]),
        derivative_provider=provider,
        breakpoints=_merge_breakpoints(f, g),
        sup_norm=sup,
        params={"vector": f.is_vector or g.is_vector},
    )


def fd_step(length_scale=1.0):
    return np.finfo(float).eps ** (1.0 / 3.0) * length_scale


def finite_difference(f: FieldSampler, points, alpha, length_scale=None):
    """Nested central differences of the unscaled field, |alpha| <= 3"""
    alpha = tuple(int(a) for a in alpha)
    if sum(alpha) > MAX_FD_ORDER:
        raise FiniteDifferenceError(f"finite differences support order <= {MAX_FD_ORDER}")
    points = np.asarray(points, dtype=float)
    if sum(alpha) == 0:
        return f.evaluate_unscaled(points)
    scale = length_scale or f.params.get("length_scale", 1.0)
    h = fd_step(scale)
    axis = next(j for j, a in enumerate(alpha) if a > 0)
    shift = np.zeros(f.n)
    shift[axis] = h
    if np.any(points + shift == points):
        raise FiniteDifferenceError(f"step {h:.3e} underflows at the sampled points")
    lower = list(alpha)
    lower[axis] -= 1
    ahead = finite_difference(f, points + shift, lower, scale)
    behind = finite_difference(f, points - shift, lower, scale)
    return (ahead - behind) / (2.0 * h)


def derivative_field(f: FieldSampler, alpha) -> FieldSampler:
    """D^alpha f, from the closed-form provider when present"""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != f.n:
        raise DimensionMismatch(f"multi-index {alpha} does not match n={f.n}")
    if sum(alpha) == 0:
        return f

    if f.derivative_provider is not None:

        def evaluate(points):
            return f.derivative_provider(points, alpha)

        def provider(points, beta):
            return f.derivative_provider(points, tuple(a + b for a, b in zip(alpha, beta)))

    else:
        logger.warning(f"Field {f.label} has no derivative provider; using finite differences")

        def evaluate(points):
            return finite_difference(f, points, alpha)

        provider = None

    return replace(
        f,
        eval=evaluate,
        derivative_provider=provider,
        label=f"D{list(alpha)}{f.label}",
        sup_norm=None,
    )


def laplacian_field(f: FieldSampler) -> FieldSampler:
    if f.derivative_provider is None:
        raise DomainError(f"field {f.label} needs a derivative provider for its Laplacian")
    n = f.n

    def evaluate(points):
        return sum(f.derivative_provider(points, unit_index(n, j, 2)) for j in range(n))

    def provider(points, beta):
        return sum(
            f.derivative_provider(points, tuple(b + a for b, a in zip(beta, unit_index(n, j, 2))))
            for j in range(n)
        )

    return replace(f, eval=evaluate, derivative_provider=provider, label=f"lap({f.label})", sup_norm=None)


def negate(f: FieldSampler) -> FieldSampler:
    return replace(f, scale=-f.scale, label=f"-{f.label}")


def dilate(f: FieldSampler, lam) -> FieldSampler:
    """u_lam(x) = lam * u(lam x)"""
    lam = float(lam)
    if lam <= 0:
        raise DomainError("dilation factor must be positive")

    def evaluate(points):
        return lam * np.asarray(f.eval(lam * points))

    provider = None
    if f.derivative_provider is not None:

        def provider(points, alpha):
            return lam ** (1 + sum(alpha)) * np.asarray(f.derivative_provider(lam * points, alpha))

    support = None
    if f.support is not None:
        support = Cube(
            tuple(c / lam for c in f.support.center), tuple(h / lam for h in f.support.half_widths)
        )
    breakpoints = None
    if f.breakpoints is not None:

        def breakpoints(axis, lo, hi):
            return [b / lam for b in f.breakpoints(axis, lam * lo, lam * hi)]

    return replace(
        f,
        eval=evaluate,
        derivative_provider=provider,
        support=support,
        breakpoints=breakpoints,
        sup_norm=None if f.sup_norm is None else lam * f.sup_norm,
        label=f"{f.label}@{lam:g}",
        params={**f.params, "length_scale": f.params.get("length_scale", 1.0) / lam},
    )


def restrict(f: FieldSampler, cube: Cube) -> FieldSampler:
    """f times the indicator of the cube"""
    support = cube if f.support is None else f.support.intersect(cube)
    if support is None:
        return zero_field(f.n, f.components)
    lower, upper = cube.lower, cube.upper

    def faces(axis, lo, hi):
        return [b for b in (lower[axis], upper[axis]) if lo < b < hi]

    return replace(
        f,
        support=support,
        breakpoints=_merge_breakpoints(f, extra=faces),
        label=f"{f.label}|{cube.radius:g}",
    )


def convective_field(u: FieldSampler, v: FieldSampler) -> FieldSampler:
    """(u . grad) v"""
    if u.n != v.n:
        raise DimensionMismatch("convective term needs fields on the same space")
    u, v = as_vector(u), as_vector(v)
    if u.sup_norm == 0 or v.sup_norm == 0:
        return zero_field(u.n, v.components)
    if v.derivative_provider is None:
        raise DomainError(f"field {v.label} needs gradient providers")
    n = u.n

    def evaluate(points):
        uu = np.asarray(u.evaluate_unscaled(points)).reshape(points.shape[0], -1)
        total = 0.0
        for j in range(n):
            dv = np.asarray(v.derivative_unscaled(points, unit_index(n, j))).reshape(points.shape[0], -1)
            total = total + uu[:, j : j + 1] * dv
        return total if n > 1 else total[:, 0]

    support = None
    if u.support is not None and v.support is not None:
        support = u.support.intersect(v.support)
        if support is None:
            return zero_field(n, v.components)
    else:
        support = u.support or v.support
    return FieldSampler(
        n=n,
        components=v.components,
        eval=evaluate,
        label=f"({u.label}.grad){v.label}",
        support=support,
        breakpoints=_merge_breakpoints(u, v),
        scale=u.scale * v.scale,
        params={"vector": True},
    )


def divergence(f: FieldSampler, points):
    points = np.asarray(points, dtype=float)
    f = as_vector(f)
    total = 0.0
    for j in range(f.n):
        d = np.asarray(f.derivative(points, unit_index(f.n, j))).reshape(points.shape[0], -1)
        total = total + d[:, j]
    return total
