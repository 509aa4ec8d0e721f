import math

import numpy as np
import pytest

from errors import ConfigError, DimensionMismatch, DomainError, MissingDerivativeError
from services import catalog


def points(*rows):
    return np.array(rows, dtype=float)


def test_every_family_builds_and_evaluates():
    for name in catalog.FAMILIES:
        for n in (1, 2):
            f = catalog.build_field(name, n)
            values = np.asarray(f.evaluate(np.zeros((3, n))))
            assert values.shape[0] == 3
            assert np.all(np.isfinite(values))


def test_describe_catalog_lists_defaults():
    rows = {row["family"]: row for row in catalog.describe_catalog()}
    assert set(rows) == set(catalog.FAMILIES)
    assert rows["gaussian"]["parameters"] == {"center": 0.0, "sigma": 1.0}


def test_unknown_family_and_parameter():
    with pytest.raises(ConfigError):
        catalog.build_field("no-such-field", 1)
    with pytest.raises(ConfigError):
        catalog.build_field("gaussian", 1, width=2.0)


def test_field_refs():
    assert catalog.parse_field_ref("bump:radius=0.5,profile=polynomial") == (
        "bump",
        {"radius": 0.5, "profile": "polynomial"},
    )
    name, params = catalog.parse_field_ref("gaussian:center=[0, 1];sigma=2")
    assert name == "gaussian" and params == {"center": [0, 1], "sigma": 2}
    f = catalog.field_from_ref("gaussian:sigma=2", 2, {"gaussian": {"center": [1.0, 0.0]}})
    assert abs(f.evaluate(points([1.0, 0.0]))[0] - 1.0) <= 1e-15
    with pytest.raises(ConfigError):
        catalog.parse_field_ref("gaussian:sigma")


def test_center_dimension_checked():
    with pytest.raises(DimensionMismatch):
        catalog.gaussian(2, center=[0.0, 1.0, 2.0])


def test_gaussian_derivatives_match_finite_differences():
    f = catalog.gaussian(1, center=0.2, sigma=0.8)
    x = points([0.5], [-0.3])
    h = 1e-5
    fd = (f.evaluate(x + h) - f.evaluate(x - h)) / (2 * h)
    assert np.allclose(f.derivative(x, (1,)), fd, atol=1e-9)
    fd2 = (f.evaluate(x + h) - 2 * f.evaluate(x) + f.evaluate(x - h)) / h ** 2
    assert np.allclose(f.derivative(x, (2,)), fd2, atol=1e-4)


@pytest.mark.parametrize("profile", ["smooth", "polynomial"])
def test_bump_profile(profile):
    f = catalog.bump(1, 0.0, 2.0, profile=profile)
    assert abs(f.evaluate(points([0.0]))[0] - 1.0) <= 1e-15
    assert f.evaluate(points([2.0], [-2.5]))[1] == 0
    x = points([0.7])
    h = 1e-5
    fd = (f.evaluate(x + h) - f.evaluate(x - h)) / (2 * h)
    assert abs(f.derivative(x, (1,))[0] - fd[0]) <= 1e-8
    assert f.axis_breakpoints(0, -3.0, 3.0) == [-2.0, 2.0]


def test_anisotropic_bump():
    f = catalog.bump(2, 0.0, [1.0, 4.0], profile="polynomial", power=2)
    assert f.support.half_widths == (1.0, 4.0)
    assert f.label == "bump(r=1x4,polynomial)"
    assert f.params["radius"] == [1.0, 4.0] and f.params["length_scale"] == 1.0
    assert f.evaluate(points([1.5, 0.0], [0.0, 3.5]))[0] == 0
    assert abs(f.evaluate(points([0.0, 2.0]))[0] - 0.5625) <= 1e-15
    # (1 - s^2)^2 has second derivative -4 at the center, scaled by 1/r^2 per axis
    assert abs(f.derivative(points([0.0, 0.0]), (2, 0))[0] + 4.0) <= 1e-12
    assert abs(f.derivative(points([0.0, 0.0]), (0, 2))[0] + 0.25) <= 1e-12
    with pytest.raises(DomainError):
        catalog.bump(2, 0.0, [1.0, -1.0])


def test_smooth_bump_third_derivative_limit():
    f = catalog.bump(1)
    with pytest.raises(MissingDerivativeError):
        f.derivative(points([0.1]), (4,))


def test_oscillating_pack_zero_frequency_is_bump():
    pack = catalog.oscillating_pack(1, frequency=0, radius=1.5)
    bare = catalog.bump(1, 0.0, 1.5)
    x = points([0.3], [-1.2], [1.4])
    assert np.allclose(pack.evaluate(x), bare.evaluate(x))
    assert np.allclose(pack.derivative(x, (1,)), bare.derivative(x, (1,)))


def test_oscillating_pack_leibniz():
    f = catalog.oscillating_pack(1, frequency=4, radius=1.0)
    x = points([0.37])
    h = 1e-6
    fd = (f.evaluate(x + h) - f.evaluate(x - h)) / (2 * h)
    assert abs(f.derivative(x, (1,))[0] - fd[0]) <= 1e-6


def test_chirp_and_coulomb():
    chirp = catalog.fresnel_chirp(1, beta=2.0)
    assert abs(abs(chirp.evaluate(points([3.1]))[0]) - 1.0) <= 1e-15
    tail = catalog.coulomb_tail(2, gamma=2.0)
    assert abs(tail.evaluate(points([1.0, 1.0]))[0] - 1.0 / 3.0) <= 1e-15
    with pytest.raises(MissingDerivativeError):
        tail.derivative(points([0.0, 0.0]), (1, 1))


def test_sinc_and_truncation():
    f = catalog.sinc(1)
    assert abs(f.evaluate(points([0.0]))[0] - 1.0) <= 1e-15
    assert abs(f.evaluate(points([math.pi]))[0]) <= 1e-15
    cut = catalog.sinc(1, truncate=10)
    assert cut.evaluate(points([10.5]))[0] == 0
    assert cut.axis_breakpoints(0, -20.0, 20.0) == [-10.0, 10.0]


def test_alternating_step_breakpoints():
    f = catalog.alternating_step(1, width=1.0)
    assert list(f.evaluate(points([0.5], [1.5], [-0.5]))) == [1.0, -1.0, -1.0]
    assert f.axis_breakpoints(0, 0.0, 3.0) == [1.0, 2.0]


def test_monomial_derivatives():
    f = catalog.monomial(2, powers=[2, 1], coefficient=3.0)
    x = points([2.0, 5.0])
    assert f.evaluate(x)[0] == 60.0
    assert f.derivative(x, (1, 1))[0] == 12.0
    assert f.derivative(x, (3, 0))[0] == 0.0


def write_grid(path, header, rows):
    lines = ["n,components,spacing,origin", header] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_grid_csv_1d(tmp_path):
    xs = np.linspace(0.0, 1.0, 11)
    path = write_grid(tmp_path / "line.csv", "1,1,0.1,0.0", [[x * x] for x in xs])
    f = catalog.load_grid_csv(path)
    assert f.n == 1 and f.components == 1
    assert abs(f.evaluate(points([0.5]))[0] - 0.25) <= 1e-12
    assert f.evaluate(points([1.5]))[0] == 0
    assert f.support.lower[0] == 0.0 and abs(f.support.upper[0] - 1.0) <= 1e-12
    assert catalog.field_from_ref(path, 1).label == "line.csv"


def test_grid_csv_complex_pairs(tmp_path):
    rows = [[1.0, 2.0]] * 9
    f = catalog.load_grid_csv(write_grid(tmp_path / "square.csv", "2,1,0.5,0.0", rows))
    assert f.n == 2
    assert abs(f.evaluate(points([0.25, 0.75]))[0] - (1.0 + 2.0j)) <= 1e-12


def test_grid_csv_vector_sup_norm(tmp_path):
    rows = [[3.0, 4.0]] * 4
    f = catalog.load_grid_csv(write_grid(tmp_path / "vec.csv", "2,2,1.0,0.0", rows))
    assert f.components == 2
    # magnitude of (3, 4), not the larger component
    assert f.sup_norm == 5.0


def test_grid_csv_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        catalog.load_grid_csv(str(tmp_path / "missing.csv"))
    bad = tmp_path / "bad.csv"
    bad.write_text("n,spacing\n1,0.1\n0.0\n")
    with pytest.raises(ConfigError):
        catalog.load_grid_csv(str(bad))
    with pytest.raises(ConfigError):
        catalog.load_grid_csv(write_grid(tmp_path / "ragged.csv", "2,1,0.5,0.0", [[1.0]] * 5))
