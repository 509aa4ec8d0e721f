import math

import numpy as np
import pytest

from errors import DimensionMismatch, DomainError
from models import Cube, TruncationConfig
from services import catalog
from services.field_ops import field_sum, zero_field
from services.indexing import functional_specs
from services.sd_space import (
    classify_support,
    dirac_vector,
    functional_F,
    functional_F_measure,
    functional_table,
    lq_norm,
    sd_inner,
    sd_norm,
    spec_weights,
    tail_bound,
    truncation_specs,
)


@pytest.fixture
def spec():
    return functional_specs(1, 2.0, 4, 60)[5]


def test_constant_field_functional(spec):
    expected = 2.0 * math.sin(spec.eps_k)
    assert abs(functional_F(spec, catalog.constant(1, 1.0)) - expected) <= 1e-12


def test_promoted_constant_in_two_dimensions():
    spec = functional_specs(2, 2.0, 3, 10)[0]
    value = functional_F(spec, catalog.constant(2, 1.0))
    # two equal components, each (2 sin eps) * 2 eps / 2
    expected = 2.0 * math.sin(spec.eps_k) * 2.0 * spec.eps_k
    assert abs(value - expected) <= 1e-12


def test_dimension_mismatch(spec):
    with pytest.raises(DimensionMismatch):
        functional_F(spec, catalog.gaussian(2))


def test_dirac_at_center(spec):
    delta = dirac_vector(1, spec.center_array)
    assert abs(functional_F_measure(spec, delta) - 1.0) <= 1e-15
    far = dirac_vector(1, spec.center_array + 3 * spec.eps_k)
    assert functional_F_measure(spec, far) == 0


def test_zero_field_norm(small_trunc):
    result = sd_norm(zero_field(1), 2, small_trunc)
    assert result.value == 0.0
    assert result.tail_bound == 0.0
    assert result.converged


def test_homogeneity(small_trunc):
    f = catalog.bump(1, 0.3, 0.8)
    base = sd_norm(f, 2, small_trunc).value
    for c in (2.0, -4.0, 1j, 0.5):
        assert abs(sd_norm(f.with_scale(c), 2, small_trunc).value - abs(c) * base) <= 1e-12 * max(1.0, base)


@pytest.mark.parametrize("p", [1, 2, 4, math.inf])
def test_triangle_inequality(small_trunc, p):
    f = catalog.bump(1, -0.5, 0.6)
    g = catalog.oscillating_pack(1, frequency=3, radius=1.2)
    lhs = sd_norm(field_sum(f, g), p, small_trunc).value
    assert lhs <= sd_norm(f, p, small_trunc).value + sd_norm(g, p, small_trunc).value + 1e-12


def test_norm_squared_is_weighted_sum(small_trunc):
    f = catalog.gaussian(1, sigma=0.7)
    result = sd_norm(f, 2, small_trunc)
    assert abs(result.value ** 2 - sum(result.contributions)) <= 1e-12
    assert set(result.level_contributions) == {1, 2, 3, 4}
    assert not result.to_dict()["lower_bound_only"]


def test_sup_norm_is_lower_bound(small_trunc):
    result = sd_norm(catalog.gaussian(1), math.inf, small_trunc)
    assert result.value == max(result.contributions)
    assert result.to_dict()["lower_bound_only"]
    assert "contributions" not in result.to_dict(contributions=False)


def test_bad_exponent(small_trunc):
    with pytest.raises(DomainError):
        sd_norm(catalog.gaussian(1), 0.5, small_trunc)


def test_inner_product_symmetry(small_trunc):
    f = catalog.fresnel_chirp(1)
    g = catalog.bump(1, 0.2, 1.0)
    fg = sd_inner(f, g, small_trunc)
    gf = sd_inner(g, f, small_trunc)
    assert abs(fg - np.conj(gf)) <= 1e-14
    ff = sd_inner(f, f, small_trunc)
    assert abs(ff.imag) <= 1e-14
    assert abs(ff.real - sd_norm(f, 2, small_trunc).value ** 2) <= 1e-12


def test_parallel_map_is_bit_identical(small_trunc, pool):
    f = catalog.sinc(1)
    serial = functional_table(f, small_trunc)
    parallel = functional_table(f, small_trunc, pool)
    assert np.array_equal(serial.values, parallel.values)


def test_tail_bound_controls_truncation():
    f = catalog.gaussian(1)
    fine = TruncationConfig(k_max=5, m_max=80, box_radius=2.0)
    coarse = TruncationConfig(k_max=3, m_max=80, box_radius=2.0)
    gap = sd_norm(f, 2, fine).value - sd_norm(f, 2, coarse).value
    assert 0 <= gap <= tail_bound(f, 3, fine, 2)
    assert tail_bound(f, 4, fine, 2) <= tail_bound(f, 3, fine, 2)


def test_tail_bound_of_zero_and_measure(small_trunc):
    assert tail_bound(zero_field(1), 1, small_trunc) == 0.0
    assert tail_bound(dirac_vector(1), 1, small_trunc) > 0.0


def test_normalized_weighting_totals(small_trunc):
    specs = truncation_specs(1, small_trunc)
    weights = spec_weights(specs, "normalized")
    per_level = {}
    for s, w in zip(specs, weights):
        per_level[s.k] = per_level.get(s.k, 0.0) + w
    for k, total in per_level.items():
        assert abs(total - 2.0 ** -k) <= 1e-15


def test_lq_norms():
    g = catalog.gaussian(1)
    box = Cube.around([0.0], 8.0)
    l2 = lq_norm(g, 2, box)
    assert l2.converged
    assert abs(l2.value - (math.pi / 2) ** 0.25) <= 1e-9
    assert abs(lq_norm(g, 1, box).value - math.sqrt(math.pi)) <= 1e-9
    assert abs(lq_norm(g, math.inf, box).value - 1.0) <= 1e-12
    with pytest.raises(DomainError):
        lq_norm(g, 2)


def test_classify_support():
    specs = functional_specs(1, 2.0, 4, 60)
    spec = next(s for s in specs if s.k == 3 and s.center_array[0] == 0.0)
    assert classify_support(spec, catalog.bump(1, 0.0, 0.5 * spec.eps_k)) == "interior"
    assert classify_support(spec, catalog.bump(1, 1.5, 0.1)) == "disjoint"
    assert classify_support(spec, catalog.bump(1, 0.0, 2.0)) == "straddle"
    assert classify_support(spec, catalog.gaussian(1)) == "straddle"
    assert classify_support(spec, zero_field(1)) == "disjoint"
