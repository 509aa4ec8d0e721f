import json
import os
import signal

import pytest

import app
from errors import ConvergenceError
from models import VerificationReport

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(autouse=True)
def keep_sigint():
    previous = signal.getsignal(signal.SIGINT)
    yield
    signal.signal(signal.SIGINT, previous)


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text("truncation:\n  k_max: 3\n  m_max: 15\n  box_radius: 1.0\nworkers: 2\n")
    return str(path)


def test_catalog_lists_families(tmp_path, capsys):
    assert app.main(["catalog", "--out", str(tmp_path)]) == 0
    families = {row["family"] for row in json.loads(capsys.readouterr().out)}
    assert {"gaussian", "bump", "sinc"} <= families
    assert (tmp_path / "sdspace.log").exists()


def test_norm_prints_json(tmp_path, capsys, small_config):
    code = app.main(["norm", "gaussian:sigma=0.5", "--config", small_config, "--out", str(tmp_path)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["k_max"] == 3 and payload["p"] == 2.0
    assert payload["value"] > 0
    assert "contributions" not in payload
    assert payload["support_radius"] == "inf"
    meta = json.loads((tmp_path / "run.json").read_text())
    assert meta["exit_code"] == 0 and meta["command"].startswith("norm")


def test_norm_sup_exponent(tmp_path, capsys, small_config):
    assert app.main(["norm", "bump", "--p", "inf", "--config", small_config, "--out", str(tmp_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["lower_bound_only"]
    assert payload["support_radius"] == 1.0


def test_norm_rejects_bad_input(tmp_path, small_config):
    assert app.main(["norm", "gaussian", "--p", "0.5", "--config", small_config, "--out", str(tmp_path)]) == 1
    assert app.main(["norm", "no-such-field", "--config", small_config, "--out", str(tmp_path)]) == 1


def test_inner_product(tmp_path, capsys, small_config):
    code = app.main(["inner", "gaussian", "bump", "--config", small_config, "--out", str(tmp_path)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["a"] and payload["b"]
    assert payload["value"]["real"] > 0


def test_verify_writes_reports(tmp_path, capsys, small_config):
    code = app.main(["verify", "--suite", "indexing", "--config", small_config, "--out", str(tmp_path)])
    assert code == 0
    assert "indexing" in capsys.readouterr().out
    for name in ("indexing.json", "indexing.csv", "summary.csv", "run.json"):
        assert (tmp_path / name).exists()


def test_verify_unknown_suite(tmp_path, small_config):
    code = app.main(["verify", "--suite", "no-such-suite", "--config", small_config, "--out", str(tmp_path)])
    assert code == 1


def test_bad_config_file(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("dimension: 9\n")
    assert app.main(["catalog", "--config", str(path), "--out", str(tmp_path)]) == 1


def test_output_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SDSPACE_OUT", str(tmp_path / "env-out"))
    assert app.main(["catalog"]) == 0
    assert (tmp_path / "env-out" / "sdspace.log").exists()


def _inner(capsys, tmp_path, config, a, b):
    code = app.main(["inner", a, b, "--config", config, "--out", str(tmp_path)])
    payload = json.loads(capsys.readouterr().out)
    return code, payload, complex(payload["value"]["real"], payload["value"]["imag"])


def test_inner_matches_stored_bump_pair(tmp_path, capsys, small_config):
    with open(os.path.join(FIXTURES, "inner_bump_pair.json")) as handle:
        fixture = json.load(handle)
    code, payload, value = _inner(capsys, tmp_path, small_config, fixture["a"], fixture["b"])
    assert code == 0
    assert payload["k_max"] == fixture["truncation"]["k_max"]
    assert payload["m_max"] == fixture["truncation"]["m_max"]
    assert value.real == pytest.approx(fixture["value"]["real"], rel=1e-9)
    assert abs(value.imag) < 1e-12
    assert payload["holder"]["norm_a"] ** 2 == pytest.approx(fixture["norm_a_squared"], rel=1e-9)
    assert payload["holder"]["holds"]


def test_inner_of_a_field_with_itself_is_its_squared_norm(tmp_path, capsys, small_config):
    code, payload, value = _inner(capsys, tmp_path, small_config, "gaussian:center=0.3", "gaussian:center=0.3")
    assert code == 0
    assert abs(value.imag) < 1e-12 * abs(value)
    assert value.real == pytest.approx(payload["holder"]["norm_a"] ** 2, rel=1e-12)
    assert payload["holder"]["bound"] == pytest.approx(value.real, rel=1e-12)


def test_inner_is_conjugate_symmetric(tmp_path, capsys, small_config):
    _, forward, ab = _inner(capsys, tmp_path, small_config, "gaussian", "fresnel-chirp:center=0.3")
    _, backward, ba = _inner(capsys, tmp_path, small_config, "fresnel-chirp:center=0.3", "gaussian")
    assert abs(ab.imag) > 1e-3
    assert ab == pytest.approx(ba.conjugate(), rel=1e-12)
    assert forward["holder"]["holds"] and backward["holder"]["holds"]
    assert abs(ab) <= forward["holder"]["bound"]


def test_usage_errors_exit_with_config_code(tmp_path):
    for argv in (["norm"], ["no-such-command"], ["inner", "gaussian"], ["verify", "--no-such-flag"]):
        with pytest.raises(SystemExit) as excinfo:
            app.main(argv + ["--out", str(tmp_path)])
        assert excinfo.value.code == 1


def test_divergent_norm_exits_unconverged(tmp_path, monkeypatch, small_config):
    def diverge(*args, **kwargs):
        raise ConvergenceError("integrand outside the Jones window", err_est=1.0)

    monkeypatch.setattr("routes.fields.functional_table", diverge)
    assert app.main(["norm", "gaussian", "--config", small_config, "--out", str(tmp_path)]) == 2
    assert json.loads((tmp_path / "run.json").read_text())["exit_code"] == 2
    assert app.main(["inner", "gaussian", "bump", "--config", small_config, "--out", str(tmp_path)]) == 2


def test_divergent_suite_exits_unconverged(tmp_path, monkeypatch, small_config):
    def diverge(names, ctx):
        raise ConvergenceError("no panel count reached the tolerance")

    monkeypatch.setattr("routes.verify.run_suites", diverge)
    code = app.main(["verify", "--suite", "indexing", "--config", small_config, "--out", str(tmp_path)])
    assert code == 2
    assert json.loads((tmp_path / "run.json").read_text())["exit_code"] == 2


def test_failed_assertion_exits_three(tmp_path, monkeypatch, small_config):
    def failing(names, ctx):
        report = VerificationReport("indexing")
        report.check("one equals two", 1.0, 2.0, 1e-12)
        return [report]

    monkeypatch.setattr("routes.verify.run_suites", failing)
    code = app.main(["verify", "--suite", "indexing", "--config", small_config, "--out", str(tmp_path)])
    assert code == 3
    assert (tmp_path / "indexing.json").exists()


def test_unconverged_report_exits_two(tmp_path, monkeypatch, small_config):
    def unconverged(names, ctx):
        report = VerificationReport("indexing", converged=False)
        report.check("one equals one", 1.0, 1.0, 1e-12)
        return [report]

    monkeypatch.setattr("routes.verify.run_suites", unconverged)
    code = app.main(["verify", "--suite", "indexing", "--config", small_config, "--out", str(tmp_path)])
    assert code == 2


def test_verify_is_reproducible(tmp_path, capsys, small_config):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        argv = ["verify", "--suite", "indexing", "norm_axioms", "--config", small_config, "--out", str(out)]
        assert app.main(argv) == 0
    for name in ("indexing.json", "indexing.csv", "norm_axioms.json", "norm_axioms.csv", "summary.csv"):
        assert (first / name).read_text() == (second / name).read_text()
    meta = [json.loads((out / "run.json").read_text()) for out in (first, second)]
    assert meta[0]["command"] == meta[1]["command"]
    assert meta[0]["exit_code"] == meta[1]["exit_code"]


@pytest.fixture
def lattice_config(tmp_path):
    path = tmp_path / "lattice.yaml"
    path.write_text("truncation:\n  k_max: 4\n  m_max: 60\n  box_radius: 2.0\nworkers: 2\n")
    return str(path)


@pytest.mark.slow
@pytest.mark.parametrize(
    "suite_name, config_name",
    [
        ("norm_axioms", "lattice_config"),
        ("embedding", "lattice_config"),
        ("compactness", "lattice_config"),
        ("hk_bv", "small_config"),
        ("stokes", "small_config"),
    ],
)
def test_verify_suite_through_cli(tmp_path, capsys, request, suite_name, config_name):
    config = request.getfixturevalue(config_name)
    code = app.main(["verify", "--suite", suite_name, "--config", config, "--out", str(tmp_path / "out")])
    assert code == 0
    report = json.loads((tmp_path / "out" / f"{suite_name}.json").read_text())
    assert report["passed"] and report["cases"]
