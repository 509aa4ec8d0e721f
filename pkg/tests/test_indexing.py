from fractions import Fraction
import math

import pytest

from errors import DomainError
from services import indexing


def test_serpentine_prefix():
    listed = [(1, 1), (2, 1), (1, 2), (1, 3), (2, 2), (3, 1), (3, 2), (2, 3), (1, 4), (4, 1)]
    assert [indexing.serpentine_index(m) for m in range(1, 11)] == listed


def test_serpentine_round_trip():
    for m in range(1, 20001):
        assert indexing.inverse_serpentine(*indexing.serpentine_index(m)) == m


def test_serpentine_covers_each_diagonal_once():
    pairs = [indexing.serpentine_index(m) for m in range(1, 1 + 45)]
    assert len(set(pairs)) == 45
    assert {k + i for k, i in pairs} == set(range(2, 11))


def test_serpentine_rejects_non_positive():
    with pytest.raises(DomainError):
        indexing.serpentine_index(0)
    with pytest.raises(DomainError):
        indexing.inverse_serpentine(0, 3)


def test_calkin_wilf_start():
    source = indexing.calkin_wilf()
    first = [next(source) for _ in range(7)]
    assert first == [Fraction(1), Fraction(1, 2), Fraction(2), Fraction(1, 3), Fraction(3, 2), Fraction(2, 3), Fraction(3)]


def test_first_centers():
    centers = indexing.enumerate_centers(1, 8.0, 5)
    assert [str(c) for c in centers] == ["(0)", "(1)", "(-1)", "(1/2)", "(-1/2)"]


def test_centers_distinct_and_inside_box():
    centers = indexing.enumerate_centers(1, 2.0, 1500)
    assert len(set(centers)) == len(centers)
    assert max(abs(c.coords[0]) for c in centers) <= 2


def test_dyadics_appear():
    values = {c.coords[0] for c in indexing.enumerate_centers(1, 2.0, 4000)}
    for j in range(4):
        for p in range(-2 * 2 ** j, 2 * 2 ** j + 1):
            assert Fraction(p, 2 ** j) in values


def test_product_enumeration_starts_at_origin():
    centers = indexing.enumerate_centers(3, 8.0, 4)
    assert str(centers[0]) == "(0, 0, 0)"
    assert len(set(centers)) == 4


def test_digest_is_stable():
    first = indexing.centers_digest(indexing.enumerate_centers(2, 8.0, 300))
    second = indexing.centers_digest(indexing.enumerate_centers(2, 8.0, 300))
    assert first == second
    assert first != indexing.centers_digest(indexing.enumerate_centers(2, 8.0, 299))


def test_exhausted_depth():
    with pytest.raises(DomainError):
        indexing.center_at(1, 0.01, 50, depth=20)


def test_single_functional():
    (spec,) = indexing.functional_specs(1, 8.0, 12, 1)
    assert (spec.m, spec.k, spec.i) == (1, 1, 1)
    assert spec.t_k == 0.5
    assert spec.a_k == 3
    assert abs(spec.eps_k - math.pi / 12) <= 1e-16
    assert str(spec.center) == "(0)"


def test_k_max_filters_levels():
    specs = indexing.functional_specs(1, 8.0, 2, 100)
    assert {s.k for s in specs} == {1, 2}
    assert [s.m for s in specs] == sorted(s.m for s in specs)


def test_level_counts_sum():
    counts = indexing.level_counts(55)
    assert sum(counts.values()) == 55
    assert counts[1] == 10


def test_specs_frame_columns(tmp_path):
    specs = indexing.functional_specs(2, 1.0, 3, 12)
    frame = indexing.specs_frame(specs)
    assert list(frame.columns[:3]) == ["m", "k", "i"]
    assert len(frame) == len(specs)
    assert all(abs(edge - 4.0 * eps) <= 1e-15 for edge, eps in zip(frame["cube_edge"], frame["eps"]))
    path = tmp_path / "specs.csv"
    indexing.export_specs_csv(specs, path)
    assert path.read_text().startswith("m,k,i")
