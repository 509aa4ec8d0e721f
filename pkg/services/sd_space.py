from dataclasses import dataclass
from functools import partial
import logging
import math

import numpy as np

from errors import DimensionMismatch, DomainError
from models import (
    AtomicMeasure,
    Cube,
    FieldSampler,
    JonesParams,
    QuadConfig,
    QuadResult,
    SDNormResult,
    TestFunctionalSpec,
    TruncationConfig,
)
from services.field_ops import as_vector
from services.indexing import functional_specs, level_counts, level_weight
from services.jones_kernel import eval_E
from services.quadrature import integrate_cube
from services.reduction import tree_sum
from services.workers import default_pool

logger = logging.getLogger("sdspace.sd_space")

SUP_SAMPLES = {1: 4001, 2: 201, 3: 61, 4: 21}


@dataclass
class FunctionalTable:
    """F_m values of one field over a spec list, in m order"""

    specs: list
    values: np.ndarray
    errors: np.ndarray
    converged: bool
    weights: np.ndarray

    @property
    def levels(self):
        return [s.k for s in self.specs]


def _check_exponent(p):
    if not (p == math.inf or p >= 1):
        raise DomainError(f"exponent p must satisfy 1 <= p <= inf, got {p}")


def _as_points(f, points):
    values = np.asarray(f.evaluate_unscaled(points))
    return values.reshape(points.shape[0], -1)


def functional_F_result(spec: TestFunctionalSpec, f: FieldSampler, cfg: QuadConfig = None) -> QuadResult:
    if isinstance(f, AtomicMeasure):
        return QuadResult(functional_F_measure(spec, f), 0.0, 0, True)
    if f.n != spec.n:
        raise DimensionMismatch(f"field {f.label} lives in R^{f.n}, functional in R^{spec.n}")
    cfg = cfg or QuadConfig()
    f = as_vector(f)
    region = spec.support_box
    if f.support is not None:
        region = region.intersect(f.support)
        if region is None:
            return QuadResult(0j, 0.0, 0, True)

    def integrand(points):
        return np.sum(eval_E(spec, points) * _as_points(f, points), axis=1)

    lower, upper = region.lower, region.upper
    breakpoints = [f.axis_breakpoints(j, lower[j], upper[j]) for j in range(spec.n)]
    result = integrate_cube(integrand, region, cfg, breakpoints)
    return result.scaled(f.scale)


def functional_F(spec, f, cfg=None):
    return complex(functional_F_result(spec, f, cfg).value)


def functional_F_measure(spec: TestFunctionalSpec, mu: AtomicMeasure) -> complex:
    if mu.atoms and mu.n != spec.n:
        raise DimensionMismatch("measure and functional live in different dimensions")
    terms = [complex(np.dot(eval_E(spec, point), weight)) for point, weight in mu.atoms]
    return complex(tree_sum(terms))


def dirac_vector(n, point=None):
    """One unit atom per coordinate direction at the given point"""
    point = np.zeros(n) if point is None else np.asarray(point, dtype=float)
    return AtomicMeasure(tuple((point, np.eye(n)[j]) for j in range(n)), label="delta")


def spec_weights(specs, weighting="level"):
    if weighting == "level":
        return np.array([s.t_k for s in specs])
    counts = {}
    for s in specs:
        counts[s.k] = counts.get(s.k, 0) + 1
    return np.array([s.t_k / counts[s.k] for s in specs])


def truncation_specs(n, trunc: TruncationConfig):
    specs = functional_specs(n, trunc.box_radius, trunc.k_max, trunc.m_max)
    if not specs:
        raise DomainError("truncation yields an empty functional list")
    return specs


def functional_table(f, trunc: TruncationConfig, pool=None, specs=None) -> FunctionalTable:
    n = f.n
    specs = specs if specs is not None else truncation_specs(n, trunc)
    pool = pool or default_pool()
    results = pool.map(partial(functional_F_result, f=f, cfg=trunc.quad), specs)
    converged = all(r.converged for r in results)
    if not converged:
        missed = sum(1 for r in results if not r.converged)
        logger.warning(f"{missed} functional(s) of {getattr(f, 'label', 'field')} did not converge")
    return FunctionalTable(
        specs=specs,
        values=np.array([complex(r.value) for r in results]),
        errors=np.array([r.err_est for r in results]),
        converged=converged,
        weights=spec_weights(specs, trunc.weighting),
    )


def norm_from_table(table: FunctionalTable, p, trunc: TruncationConfig, f=None, label=""):
    _check_exponent(p)
    moduli = np.abs(table.values)
    if p == math.inf:
        contributions = [float(a) for a in moduli]
        value = max(contributions)
    else:
        contributions = [float(w * a ** p) for w, a in zip(table.weights, moduli)]
        value = tree_sum(contributions) ** (1.0 / p)

    levels = {}
    for spec, c in zip(table.specs, contributions):
        levels.setdefault(spec.k, []).append(c)
    if p == math.inf:
        level_contributions = {k: max(v) for k, v in sorted(levels.items())}
    else:
        level_contributions = {k: tree_sum(v) for k, v in sorted(levels.items())}

    return SDNormResult(
        value=float(value),
        p=p,
        contributions=contributions,
        tail_bound=tail_bound(f, trunc.k_max, trunc, p) if f is not None else 0.0,
        quad_err=float(tree_sum(list(table.errors))),
        converged=table.converged,
        spec_indices=[s.m for s in table.specs],
        level_contributions=level_contributions,
        k_max=trunc.k_max,
        m_max=trunc.m_max,
        label=label or getattr(f, "label", ""),
    )


def sd_norm(f, p, trunc: TruncationConfig = None, pool=None) -> SDNormResult:
    trunc = trunc or TruncationConfig()
    _check_exponent(p)
    table = functional_table(f, trunc, pool)
    result = norm_from_table(table, p, trunc, f)
    logger.debug(f"||{result.label}||_SD^{p} = {result.value:.12g} over {len(table.specs)} functionals")
    return result


def inner_from_tables(ta: FunctionalTable, tb: FunctionalTable):
    if len(ta.specs) != len(tb.specs):
        raise DimensionMismatch("functional tables cover different spec lists")
    terms = [complex(w * a * np.conj(b)) for w, a, b in zip(ta.weights, ta.values, tb.values)]
    return complex(tree_sum(terms))


def sd_inner(f, g, trunc: TruncationConfig = None, pool=None) -> complex:
    trunc = trunc or TruncationConfig()
    if f.n != g.n:
        raise DimensionMismatch("sd_inner needs fields on the same space")
    specs = truncation_specs(f.n, trunc)
    return inner_from_tables(
        functional_table(f, trunc, pool, specs), functional_table(g, trunc, pool, specs)
    )


def sampled_sup(f: FieldSampler, region: Cube):
    """Largest sampled vector magnitude on a uniform grid over the region"""
    count = SUP_SAMPLES.get(f.n, 11)
    axes = [np.linspace(lo, hi, count) for lo, hi in zip(region.lower, region.upper)]
    points = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.n)
    values = np.asarray(f.evaluate(points)).reshape(points.shape[0], -1)
    return float(np.max(np.linalg.norm(values, axis=1)))


def lattice_box(trunc: TruncationConfig, n):
    return Cube.around(np.zeros(n), trunc.box_radius + level_eps(1))


def level_eps(k):
    return JonesParams.for_level(k).eps_k


def vector_sup(f, trunc: TruncationConfig):
    """sup |f(x)| of the field as the functionals see it (scalars replicated)"""
    if isinstance(f, AtomicMeasure):
        return f.total_mass
    if f.sup_norm is not None:
        sup = abs(f.scale) * f.sup_norm
        return sup if f.is_vector else sup * math.sqrt(f.n)
    region = f.support or lattice_box(trunc, f.n)
    sup = sampled_sup(f, region)
    return sup * math.sqrt(f.n) if not f.is_vector and f.n > 1 else sup


def tail_bound(f, K, trunc: TruncationConfig = None, p=2) -> float:
    """Upper bound on the weighted functionals above level K"""
    trunc = trunc or TruncationConfig()
    _check_exponent(p)
    sup = vector_sup(f, trunc)
    if sup == 0:
        return 0.0
    n = f.n
    counts = level_counts(trunc.m_max)
    terms = []
    for k in sorted(counts):
        if k <= K:
            continue
        if isinstance(f, AtomicMeasure):
            bracket = sup / math.sqrt(n)
        else:
            bracket = (2.0 * level_eps(k)) ** n * sup / math.sqrt(n)
        if p == math.inf:
            terms.append(bracket)
        else:
            weight = level_weight(k) * (counts[k] if trunc.weighting == "level" else 1.0)
            terms.append(weight * bracket ** p)
    if not terms:
        return 0.0
    if p == math.inf:
        return float(max(terms))
    return float(tree_sum(terms) ** (1.0 / p))


def lq_norm(f: FieldSampler, q, region: Cube = None, cfg: QuadConfig = None) -> QuadResult:
    """Lebesgue q-norm of |f| (vector magnitude) over a box"""
    _check_exponent(q)
    region = region or f.support
    if region is None:
        raise DomainError(f"field {f.label} is unbounded; pass an integration box")
    if f.support is not None:
        region = region.intersect(f.support)
        if region is None:
            return QuadResult(0.0, 0.0, 0, True)
    if q == math.inf:
        return QuadResult(sampled_sup(f, region), 0.0, 0, True)
    cfg = cfg or QuadConfig()

    def integrand(points):
        values = np.asarray(f.evaluate_unscaled(points)).reshape(points.shape[0], -1)
        return np.linalg.norm(values, axis=1) ** q

    lower, upper = region.lower, region.upper
    breakpoints = [f.axis_breakpoints(j, lower[j], upper[j]) for j in range(f.n)]
    mass = integrate_cube(integrand, region, cfg, breakpoints)
    integral = max(float(np.real(mass.value)), 0.0)
    value = abs(f.scale) * integral ** (1.0 / q)
    err = abs(f.scale) * (mass.err_est / q) * integral ** (1.0 / q - 1.0) if integral > 0 else mass.err_est
    return QuadResult(value, err, mass.panels_used, mass.converged)


def classify_support(spec: TestFunctionalSpec, f):
    """'interior' when f vanishes near the faces of the functional's box, else 'disjoint' or 'straddle'"""
    if isinstance(f, AtomicMeasure) or getattr(f, "sup_norm", None) == 0:
        return "disjoint"
    if f.support is None:
        return "straddle"
    box = spec.support_box
    if box.strictly_contains(f.support):
        return "interior"
    if box.intersect(f.support) is None:
        return "disjoint"
    return "straddle"
