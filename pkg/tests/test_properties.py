import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from models import TruncationConfig
from services import indexing
from services.sd_space import (
    FunctionalTable,
    inner_from_tables,
    norm_from_table,
    spec_weights,
    truncation_specs,
)

TRUNC = TruncationConfig(k_max=3, m_max=15, box_radius=1.0)
SPECS = truncation_specs(1, TRUNC)

_complex = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)
_exponents = st.sampled_from([1.0, 1.5, 2.0, 4.0, math.inf])


@st.composite
def tables(draw, weighting="level"):
    """Arbitrary F_m values over the tiny lattice"""
    values = draw(st.lists(_complex, min_size=len(SPECS), max_size=len(SPECS)))
    return FunctionalTable(
        specs=SPECS,
        values=np.array(values, dtype=complex),
        errors=np.zeros(len(SPECS)),
        converged=True,
        weights=spec_weights(SPECS, weighting),
    )


def _scaled(table, c):
    return FunctionalTable(table.specs, c * table.values, table.errors, table.converged, table.weights)


def _sum(a, b):
    return FunctionalTable(a.specs, a.values + b.values, a.errors, True, a.weights)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 12))
def test_serpentine_inverts_any_index(m):
    k, i = indexing.serpentine_index(m)
    assert k >= 1 and i >= 1
    assert indexing.inverse_serpentine(k, i) == m


@settings(max_examples=100, deadline=None)
@given(tables(), _complex, _exponents)
def test_norm_is_absolutely_homogeneous(table, c, p):
    lhs = norm_from_table(_scaled(table, c), p, TRUNC).value
    rhs = abs(c) * norm_from_table(table, p, TRUNC).value
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)


@settings(max_examples=100, deadline=None)
@given(tables(), tables(), _exponents)
def test_norm_satisfies_triangle_inequality(a, b, p):
    together = norm_from_table(_sum(a, b), p, TRUNC).value
    apart = norm_from_table(a, p, TRUNC).value + norm_from_table(b, p, TRUNC).value
    assert together <= apart * (1.0 + 1e-12) + 1e-12


@settings(max_examples=100, deadline=None)
@given(tables(), tables())
def test_inner_product_obeys_cauchy_schwarz(a, b):
    value = inner_from_tables(a, b)
    bound = norm_from_table(a, 2.0, TRUNC).value * norm_from_table(b, 2.0, TRUNC).value
    assert abs(value) <= bound * (1.0 + 1e-12) + 1e-12
    assert abs(inner_from_tables(b, a) - value.conjugate()) <= 1e-12 * max(1.0, bound)


@settings(max_examples=50, deadline=None)
@given(tables(weighting="normalized"), _exponents)
def test_normalized_norm_is_below_largest_functional(table, p):
    largest = float(np.max(np.abs(table.values)))
    assert norm_from_table(table, p, TRUNC).value <= largest * (1.0 + 1e-12) + 1e-12
