"""Divergence-free fields, the Stokes identity and the convective trilinear form."""

import logging
import math

import numpy as np

from errors import DimensionMismatch, DomainError, MissingDerivativeError
from models import Cube, FieldSampler, QuadConfig, TestFunctionalSpec, TruncationConfig, VerificationReport
from services import catalog
from services.field_ops import as_vector, convective_field, dilate, divergence, laplacian_field, negate
from services.jones_kernel import eval_E
from services.quadrature import integrate_cube
from services.sd_space import (
    classify_support,
    dirac_vector,
    functional_table,
    inner_from_tables,
    lq_norm,
    norm_from_table,
    sd_norm,
    truncation_specs,
)

logger = logging.getLogger("sdspace.navier_stokes")

# (component of u) = sum of sign * d_axis psi_component
CURL_TERMS = {
    3: (((1, 1, 2), (-1, 2, 1)), ((1, 2, 0), (-1, 0, 2)), ((1, 0, 1), (-1, 1, 0))),
    2: (((1, 1, None),), ((-1, 0, None),)),
}


def _potential_parts(psi, n):
    if isinstance(psi, FieldSampler):
        if psi.n != n:
            raise DimensionMismatch("potential and target dimension differ")
        return {2: psi} if n == 3 else {None: psi}
    parts = {c: p for c, p in enumerate(psi) if p is not None}
    if n != 3 or len(psi) != 3:
        raise DomainError("a vector potential needs three components in R^3")
    return parts


def curl_field(psi, n=3) -> FieldSampler:
    """u = curl psi; a scalar psi in R^3 stands for (0, 0, psi), in R^2 for the stream function"""
    if n not in CURL_TERMS:
        raise DomainError("curl fields are built in R^2 or R^3")
    parts = _potential_parts(psi, n)
    for p in parts.values():
        if p.derivative_provider is None:
            raise MissingDerivativeError(f"potential {p.label} needs derivative providers")

    def component(points, i, beta):
        total = np.zeros(points.shape[0], dtype=complex)
        for sign, axis, c in CURL_TERMS[n][i]:
            if c not in parts:
                continue
            order = list(beta)
            order[axis] += 1
            total = total + sign * parts[c].derivative(points, tuple(order))
        return total

    def provider(points, beta):
        return np.stack([component(points, i, beta) for i in range(n)], axis=1)

    supports = [p.support for p in parts.values()]
    support = None
    if supports and all(s is not None for s in supports):
        lower = np.min([s.lower for s in supports], axis=0)
        upper = np.max([s.upper for s in supports], axis=0)
        support = Cube.from_bounds(lower, upper)
    labels = ",".join(p.label for p in parts.values())
    return FieldSampler(
        n=n,
        components=n,
        eval=lambda points: provider(points, (0,) * n),
        label=f"curl({labels})",
        support=support,
        derivative_provider=provider,
        params={"vector": True, "length_scale": min(p.params.get("length_scale", 1.0) for p in parts.values())},
    )


def max_divergence(u: FieldSampler, samples=1000, seed=0):
    rng = np.random.default_rng(seed)
    box = u.support
    if box is None:
        raise DomainError("sampled divergence needs a bounded support")
    points = box.lower + (box.upper - box.lower) * rng.random((samples, u.n))
    return float(np.max(np.abs(divergence(u, points))))


def default_flow(n=3, radius=0.06):
    """Compactly supported divergence-free pair (u, v) near the origin"""
    first = catalog.bump(n, 0.0, radius, profile="polynomial")
    shifted = catalog.bump(n, [0.01] + [0.0] * (n - 1), radius * 0.8, profile="polynomial")
    u = curl_field(first, n)
    v = curl_field((shifted, None, None), n) if n == 3 else curl_field(shifted, n)
    return u, v


def scaling_flow(n=3, radius=40.0):
    """Divergence-free pair (u, v) whose potentials are anisotropic quadratic bumps.

    The supports are much wider than the lattice center cloud, so every functional
    box sits inside the flow and the fields are close to linear on each box. The
    convective ratios then barely move under u -> lam * u(lam x).
    """
    r = float(radius)
    if r <= 0:
        raise DomainError("flow radius must be positive")
    amplitude = r * r / 4.0
    first = catalog.bump(n, 0.0, [r, 2.0 * r, 1.5 * r][:n], profile="polynomial", power=2)
    second = catalog.bump(n, 0.0, [2.0 * r, r, 1.5 * r][:n], profile="polynomial", power=2)
    first, second = first.with_scale(amplitude), second.with_scale(amplitude)
    u = curl_field(first, n)
    v = curl_field((second, None, None), n) if n == 3 else curl_field(second, n)
    return u, v


def trilinear_b_result(u, v, w, cfg: QuadConfig = None):
    cfg = cfg or QuadConfig()
    conv = convective_field(u, v)
    if isinstance(w, TestFunctionalSpec):
        region = w.support_box

        def pairing(points):
            return eval_E(w, points)

    else:
        w = as_vector(w)
        region = w.support

        def pairing(points):
            return np.asarray(w.evaluate(points)).reshape(points.shape[0], -1)

    if conv.sup_norm == 0:
        return 0j, 0.0, True
    if conv.support is not None:
        region = conv.support if region is None else region.intersect(conv.support)
    elif region is None:
        raise DomainError("trilinear form needs a bounded common support")
    if region is None:
        return 0j, 0.0, True

    def integrand(points):
        values = np.asarray(conv.evaluate(points)).reshape(points.shape[0], -1)
        return np.sum(values * pairing(points), axis=1)

    result = integrate_cube(integrand, region, cfg)
    return complex(result.value), result.err_est, result.converged


def trilinear_b(u, v, w, cfg: QuadConfig = None) -> complex:
    """b(u, v, w) = integral of (u . grad) v . w"""
    return trilinear_b_result(u, v, w, cfg)[0]


def integrated_by_parts_b(u, spec: TestFunctionalSpec, cfg: QuadConfig = None) -> complex:
    """-i * integral of sum_j u_j^2 E_j, equal to b(u, u, E) when u sits inside the box"""
    cfg = cfg or QuadConfig()
    u = as_vector(u)
    region = spec.support_box if u.support is None else spec.support_box.intersect(u.support)
    if region is None:
        return 0j

    def integrand(points):
        values = np.asarray(u.evaluate(points)).reshape(points.shape[0], -1)
        return np.sum(values ** 2 * eval_E(spec, points), axis=1)

    return -1j * complex(integrate_cube(integrand, region, cfg).value)


def stokes_identity_residual(u: FieldSampler, trunc: TruncationConfig = None, pool=None, tolerance=1e-6):
    """<-lap u, u>_SD against <u, u>_SD, per functional and globally"""
    trunc = trunc or TruncationConfig()
    report = VerificationReport("stokes")
    specs = truncation_specs(u.n, trunc)
    stokes_u = negate(laplacian_field(u))
    t_au = functional_table(stokes_u, trunc, pool, specs)
    t_u = functional_table(u, trunc, pool, specs)

    kinds = [classify_support(spec, u) for spec in specs]
    for spec, kind, fa, fu in zip(specs, kinds, t_au.values, t_u.values):
        report.check(
            f"F_{spec.m:05d}(Au) - F(u) [{kind}]",
            complex(fa),
            complex(fu),
            tolerance,
            asserted=kind != "straddle",
            k=spec.k,
        )

    lhs = inner_from_tables(t_au, t_u)
    rhs = inner_from_tables(t_u, t_u)
    report.check(
        "global <Au,u> - <u,u>",
        lhs,
        rhs,
        tolerance,
        asserted="straddle" not in kinds,
        straddling=kinds.count("straddle"),
    )
    if u.support is not None:
        energy = float(lq_norm(u, 2, cfg=trunc.quad).value)
        report.holds("0 < ||u||_L2 < inf", math.isfinite(energy) and energy > 0, energy)
    report.converged = t_au.converged and t_u.converged
    interior = [abs(complex(fu)) for kind, fu in zip(kinds, t_u.values) if kind == "interior"]
    report.notes = (
        f"{kinds.count('interior')} interior, {kinds.count('disjoint')} disjoint and "
        f"{kinds.count('straddle')} straddling functionals; straddling ones are reported only; "
        f"largest interior |F(u)| = {max(interior, default=0.0):.3e} "
        "(interior functionals vanish on divergence-free fields)"
    )
    logger.info(f"Stokes identity on {u.label}: global residual {abs(lhs - rhs):.3e}")
    return report


def _ratio(num, den):
    return 0.0 if num == 0 else (num / den if den > 0 else math.inf)


def resolved_norm(table, trunc: TruncationConfig, field, lam=1.0):
    """SD2 norm of a field, refused when a nonzero field sits at the quadrature floor"""
    value = norm_from_table(table, 2, trunc).value
    if field.sup_norm == 0:
        return value
    errors = np.maximum(np.asarray(table.errors, dtype=float), trunc.quad.abs_tol)
    floor = 10.0 * math.sqrt(float(np.sum(table.weights * errors ** 2)))
    if value <= floor:
        raise DomainError(
            f"{field.label} has SD norm {value:.3e} at lambda={lam:g}, within the quadrature floor {floor:.3e}"
        )
    return value


def ns_ratio_report(
    u,
    v,
    trunc: TruncationConfig = None,
    lambdas=(0.5, 1.0, 2.0, 4.0),
    pool=None,
    tolerance=1e-8,
    max_spread=10.0,
    assert_spread=True,
    interior_pair=None,
):
    """Convective ratios of (u, v) over the scaling family u_lam(x) = lam * u(lam x).

    ``interior_pair`` supplies the compactly supported flow used for the
    antisymmetry and integration-by-parts cases; (u, v) themselves by default.
    """
    trunc = trunc or TruncationConfig()
    report = VerificationReport("ns_ratio")
    specs = truncation_specs(u.n, trunc)
    ratios = {"r2": [], "r3": [], "r4": []}
    converged = True

    for lam in lambdas:
        ul, vl = dilate(u, lam), dilate(v, lam)
        tables = {
            "u": functional_table(ul, trunc, pool, specs),
            "v": functional_table(vl, trunc, pool, specs),
            "Buu": functional_table(convective_field(ul, ul), trunc, pool, specs),
            "Buv": functional_table(convective_field(ul, vl), trunc, pool, specs),
            "Bvu": functional_table(convective_field(vl, ul), trunc, pool, specs),
        }
        converged = converged and all(t.converged for t in tables.values())
        nu = resolved_norm(tables["u"], trunc, ul, lam)
        nv = resolved_norm(tables["v"], trunc, vl, lam)
        norm = {key: norm_from_table(tables[key], 2, trunc).value for key in ("Buv", "Bvu")}
        values = {
            "r2": _ratio(abs(inner_from_tables(tables["Buu"], tables["u"])), nu ** 3),
            "r3": _ratio(abs(inner_from_tables(tables["Buv"], tables["u"])), nu * nv * nu),
            "r4": _ratio(max(norm["Buv"], norm["Bvu"]), nu * nv),
        }
        for key, value in values.items():
            ratios[key].append(value)
            report.finite(f"{key} lambda={lam:g}", value, lam=lam, norm_u=nu, norm_v=nv)

    for key, series in ratios.items():
        positive = [r for r in series if r > 0]
        spread = max(positive) / min(positive) if positive else 1.0
        report.bound(f"{key} spread", spread, max_spread, 0.0, asserted=assert_spread, series=series)

    cu, cv = interior_pair or (u, v)
    antisym = trilinear_b(cu, cv, cu, trunc.quad) + trilinear_b(cu, cu, cv, trunc.quad)
    report.check("b(u,v,u) + b(u,u,v)", antisym, 0.0, tolerance)
    for spec in specs:
        if classify_support(spec, cu) != "interior":
            continue
        direct = trilinear_b(cu, cu, spec, trunc.quad)
        by_parts = integrated_by_parts_b(cu, spec, trunc.quad)
        report.check(f"b(u,u,E_{spec.m:05d}) by parts", direct, by_parts, tolerance, k=spec.k)

    delta_norm = sd_norm(dirac_vector(u.n), 2, trunc, pool).value
    report.empirical_constant = max(max(series) for series in ratios.values())
    report.converged = converged
    report.notes = (
        f"eps_hat = ||delta||_SD2 = {delta_norm:.12g}; spreads are compared with {max_spread:g}"
        + ("" if assert_spread else " and reported only")
    )
    logger.info(f"ns ratios of {u.label}: constant {report.empirical_constant:.6g}")
    return report
