import numpy as np
import pandas as pd
import pytest

from app.cli import main, run_verification
from app.core.errors import EXIT_NUMERICAL, EXIT_OK, EXIT_PARSE_IO, EXIT_VALIDATION
from app.core.nevanlinna import AffineTerm, ConstantTerm, NevanlinnaModel
from app.core.numerics_config import DEFAULT_RUN_CONFIG
from app.storage.sweep_types import MODE_SELFADJOINT
from tests.conftest import scalar, theta


def test_eval_prints_boundary_value(fixture_path, capsys):
    assert main(["eval", "--model", fixture_path("sqrt.json"), "--lambda", "4"]) == EXIT_OK
    assert capsys.readouterr().out == "[[[0,2]]]\n"


def test_eval_off_axis(fixture_path, capsys):
    assert main(["eval", "--model", fixture_path("constant_i.json"), "--lambda", "0,1"]) == EXIT_OK
    assert capsys.readouterr().out == "[[[0,1]]]\n"


def test_eval_at_pole_is_numerical_failure(fixture_path, capsys):
    assert main(["eval", "--model", fixture_path("pole.json"), "--lambda", "0"]) == EXIT_NUMERICAL
    assert capsys.readouterr().out == ""


def test_exit_codes_for_bad_inputs(tmp_path, fixture_path):
    assert main(["eval", "--model", str(tmp_path / "missing.json"), "--lambda", "1"]) == EXIT_PARSE_IO

    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert main(["eval", "--model", str(broken), "--lambda", "1"]) == EXIT_PARSE_IO

    invalid = tmp_path / "invalid.json"
    invalid.write_text(
        '{"schema_version": "1", "name": "bad", "dim": 1, "terms": [{"kind": "constant", "C": [[[0, -1]]]}]}',
        encoding="utf-8",
    )
    assert main(["eval", "--model", str(invalid), "--lambda", "1"]) == EXIT_VALIDATION

    nan_pole = tmp_path / "nan_pole.json"
    nan_pole.write_text(
        '{"schema_version": "1", "name": "p", "dim": 1, "terms": [{"kind": "pole", "t": NaN, "G": [[[1, 0]]]}]}',
        encoding="utf-8",
    )
    assert main(["eval", "--model", str(nan_pole), "--lambda", "1"]) == EXIT_PARSE_IO

    assert main(["eval", "--model", fixture_path("sqrt.json"), "--lambda", "x"]) == EXIT_PARSE_IO
    assert main(["bogus"]) == EXIT_PARSE_IO


def _sweep(fixture_path, out, model, param, mode, grid):
    return main([
        "sweep", "--model", fixture_path(model), "--param", fixture_path(param),
        "--mode", mode, f"--grid={grid}", "--out", str(out),
    ])


def test_selfadjoint_sweep(tmp_path, fixture_path):
    out = tmp_path / "sa.csv"
    assert _sweep(fixture_path, out, "sqrt.json", "theta_0.json", "sa", "1:9:5") == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame["lambda"]) == [1, 3, 5, 7, 9]
    np.testing.assert_allclose(frame["ssf"], 0.5, atol=1e-12)
    assert (frame["skipped"] == 0).all()


def test_sweep_is_byte_identical_across_runs(tmp_path, fixture_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _sweep(fixture_path, first, "box_pole_2d.json", "theta_2d_subspace.json", "sa", "-2:4:25") == EXIT_OK
    assert _sweep(fixture_path, second, "box_pole_2d.json", "theta_2d_subspace.json", "sa", "-2:4:25") == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_dissipative_sweep_spot_values(tmp_path, fixture_path):
    out = tmp_path / "diss.csv"
    assert _sweep(fixture_path, out, "sqrt.json", "dissipative_half.json", "dissipative", "1:1:1") == EXIT_OK
    row = pd.read_csv(out).iloc[0]
    assert row["det_sd_re"] == pytest.approx(-1.0 / 3.0, abs=1e-12)
    assert row["det_slp_re"] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert row["eta"] == pytest.approx(0.5, abs=1e-12)
    assert row["rank_d"] == 1


def test_coupled_sweep_spot_values(tmp_path, fixture_path):
    out = tmp_path / "coupled.csv"
    assert _sweep(fixture_path, out, "constant_i.json", "coupled_2i.json", "coupled", "0:1:3") == EXIT_OK
    frame = pd.read_csv(out)
    np.testing.assert_allclose(frame["det_sh_re"], 1.0 / 3.0, atol=1e-12)
    np.testing.assert_allclose(frame["det_sg_re"], -1.0 / 3.0, atol=1e-12)
    np.testing.assert_allclose(frame["xi"], 0.5, atol=1e-12)


def test_sweep_rejects_mismatched_parameter(tmp_path, fixture_path):
    out = tmp_path / "x.csv"
    assert _sweep(fixture_path, out, "sqrt.json", "theta_0.json", "dissipative", "1:2:2") == EXIT_VALIDATION
    assert _sweep(fixture_path, out, "sqrt.json", "theta_0.json", "sa", "2:1:2") == EXIT_VALIDATION
    assert _sweep(fixture_path, out, "sqrt.json", "theta_0.json", "sa", "1:2") == EXIT_PARSE_IO
    assert _sweep(fixture_path, out, "sqrt.json", "theta_0.json", "unknown", "1:2:2") == EXIT_PARSE_IO


def test_sweep_write_failure(tmp_path, fixture_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("x", encoding="utf-8")
    code = _sweep(fixture_path, blocker / "out.csv", "sqrt.json", "theta_0.json", "sa", "1:2:2")
    assert code == EXIT_PARSE_IO


def test_verify_passes_on_half_line(fixture_path, capsys):
    code = main([
        "verify", "--model", fixture_path("sqrt.json"), "--param", fixture_path("theta_2.json"),
        "--mode", "sa", "--grid", "1:16:8",
    ])
    lines = capsys.readouterr().out.splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith("birman_krein max_residual=") and lines[0].endswith("PASS")
    assert any(line.startswith("trace_formula") and line.endswith("PASS") for line in lines)
    assert lines[-1] == "skipped: 0"


def test_verify_failure_prints_report_and_exits_numerical(fixture_path, capsys):
    code = main([
        "verify", "--model", fixture_path("sqrt.json"), "--param", fixture_path("theta_2.json"),
        "--mode", "sa", "--grid", "1:16:8", "--tol", "1e-30",
    ])
    lines = capsys.readouterr().out.splitlines()
    assert code == EXIT_NUMERICAL
    assert any(line.startswith("trace_formula") and line.endswith("FAIL") for line in lines)
    assert lines[-1] == "skipped: 0"


def test_verify_reports_skipped_exceptional_points(fixture_path, capsys):
    code = main([
        "verify", "--model", fixture_path("pole.json"), "--param", fixture_path("theta_0.json"),
        "--mode", "sa", "--grid=-1:1:3",
    ])
    assert code == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1] == "skipped: 1"


@pytest.mark.parametrize("model, param, mode", [
    ("sqrt.json", "dissipative_half.json", "dissipative"),
    ("constant_i.json", "coupled_2i.json", "coupled"),
    ("box_pole_2d.json", "relation.json", "sa"),
])
def test_verify_other_modes(fixture_path, capsys, model, param, mode):
    code = main([
        "verify", "--model", fixture_path(model), "--param", fixture_path(param),
        "--mode", mode, "--grid=-0.5:1.5:9", "--z", "0.5,1",
    ])
    out = capsys.readouterr().out
    assert code == EXIT_OK, out
    assert "FAIL" not in out


def test_verify_rejects_real_spectral_point(fixture_path):
    code = main([
        "verify", "--model", fixture_path("sqrt.json"), "--param", fixture_path("theta_0.json"),
        "--mode", "sa", "--grid", "1:2:2", "--z", "1,0",
    ])
    assert code == EXIT_VALIDATION


def test_corrupted_model_fails_trace_formula_only():
    # the affine term has B = −1, so the model is not Nevanlinna
    corrupted = NevanlinnaModel(
        dim=1,
        terms=(ConstantTerm(scalar(1j)), AffineTerm(scalar(0.0), scalar(-1.0))),
        name="corrupted",
    )
    config = DEFAULT_RUN_CONFIG.with_overrides(z=1 + 2j)
    report = run_verification(MODE_SELFADJOINT, corrupted, theta(0.0), [-1.0, 0.0, 1.0], config)
    verdicts = {result.identity: result.passed for result in report.results}
    assert verdicts["birman_krein"]
    assert not verdicts["trace_formula"]
    assert not report.passed
