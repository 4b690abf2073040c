import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from secrecysim.cli import main
from secrecysim.errors import ConfigError, InsufficientResolutionError
from secrecysim.estimator import Estimate, direct_intercept_closed_form
from secrecysim.sweep import (
    CSV_COLUMNS,
    ScenarioConfig,
    SweepResult,
    SweepRow,
    diversity_slopes,
    emit_csv,
    estimate_diversity_slope,
    parse_csv_text,
    read_csv,
    run_sweep,
    to_csv_text,
)

SMALL = ScenarioConfig(mer_grid_db=(0.0, 6.0), relay_counts=(2, 3), n_trials=5000, master_seed=3)


def test_default_config_matches_case_study():
    c = ScenarioConfig()
    assert (c.gamma_s_db, c.sigma2_sd, c.sigma2_sr, c.sigma2_rd) == (12.0, 0.5, 2.0, 2.0)
    assert c.relay_counts == (2, 4, 8)
    assert c.mer_grid_db == tuple(float(x) for x in range(0, 31, 3))
    assert c.gamma_s == pytest.approx(15.848931924611133)


def test_cardinality_single_point():
    r = run_sweep(ScenarioConfig(schemes=("direct",), mer_grid_db=(0.0,), n_trials=1000))
    assert len(r) == 2
    assert {row.metric for row in r.rows} == {"ergodic_secrecy_capacity", "intercept_probability"}


def test_sweep_rows_unique_and_complete():
    r = run_sweep(SMALL)
    # direct once, relay for each M; two metrics, two MER points
    assert len(r) == (1 + 2) * 2 * 2
    assert len({row.key for row in r.rows}) == len(r)


def test_default_sweep_has_eight_curves():
    c = ScenarioConfig(n_trials=1000, mer_grid_db=(0.0, 10.0))
    r = run_sweep(c)
    curves = r.curves("ergodic_secrecy_capacity") + r.curves("intercept_probability")
    assert len(curves) == 8


def test_direct_rows_match_closed_form():
    c = ScenarioConfig(schemes=("direct",), mer_grid_db=(0.0, 3.0, 6.0, 10.0), n_trials=200_000)
    for mer, e in run_sweep(c).curve("direct", 0, "intercept_probability"):
        p = c.fading_params(mer)
        assert abs(e.mean - direct_intercept_closed_form(p.sigma2_sd, p.sigma2_se)) <= 3 * e.std_err


def test_explicit_sigma2_re():
    c = ScenarioConfig(sigma2_re=0.01, mer_grid_db=(0.0,), n_trials=1000)
    assert c.fading_params(0.0).re == 0.01
    assert ScenarioConfig().fading_params(10.0).re == pytest.approx(0.05)


def test_sweep_threads_identical():
    assert to_csv_text(run_sweep(SMALL, threads=1)) == to_csv_text(run_sweep(SMALL, threads=4))


# -- slopes -------------------------------------------------------------------


def test_slope_exact_line():
    assert estimate_diversity_slope([(20.0, 1e-2), (30.0, 1e-3)]) == pytest.approx(-1.0, abs=1e-12)


def test_slope_closed_form_points():
    pts = [(20.0, 1 / 101), (30.0, 1 / 1001)]
    assert estimate_diversity_slope(pts) == pytest.approx(-0.99611, abs=1e-5)


def test_slope_uses_top_window():
    pts = [(0.0, 0.9), (10.0, 1e-1), (20.0, 1e-2), (30.0, 1e-3)]
    assert estimate_diversity_slope(pts, window=3) == pytest.approx(-1.0)
    assert estimate_diversity_slope(list(reversed(pts)), window=2) == pytest.approx(-1.0)


def test_slope_needs_two_points():
    with pytest.raises(InsufficientResolutionError):
        estimate_diversity_slope([(10.0, 0.1)])


def test_slope_zero_probability():
    with pytest.raises(InsufficientResolutionError):
        estimate_diversity_slope([(10.0, 0.1), (20.0, 0.0)])


def test_diversity_slopes_per_curve():
    r = run_sweep(ScenarioConfig(schemes=("direct",), mer_grid_db=(20.0, 25.0, 30.0), n_trials=200_000))
    slopes = diversity_slopes(r)
    assert list(slopes) == [("direct", 0)]
    assert slopes[("direct", 0)] == pytest.approx(-1.0, abs=0.15)


# -- CSV ------------------------------------------------------------------------


def test_empty_result_header_only(tmp_path):
    path = emit_csv(SweepResult(), tmp_path / "e.csv")
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_two_rows_three_lines(tmp_path):
    r = run_sweep(ScenarioConfig(schemes=("direct",), mer_grid_db=(0.0,), n_trials=1000))
    text = emit_csv(r, tmp_path / "r.csv").read_text()
    assert len(text.splitlines()) == 3


def test_reemit_byte_identical(tmp_path):
    r = run_sweep(SMALL)
    a = emit_csv(r, tmp_path / "a.csv").read_bytes()
    b = emit_csv(r, tmp_path / "b.csv").read_bytes()
    assert a == b


def test_roundtrip(tmp_path):
    r = run_sweep(SMALL)
    assert read_csv(emit_csv(r, tmp_path / "r.csv")) == r


def test_rows_sorted(tmp_path):
    lines = to_csv_text(run_sweep(SMALL)).splitlines()[1:]
    keys = [(f[3], f[0], int(f[1]), float(f[2])) for f in (line.split(",") for line in lines)]
    assert keys == sorted(keys)


finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(
    vals=st.lists(
        st.tuples(st.sampled_from(["direct", "relay_selection"]), st.integers(0, 16), finite, finite, finite),
        max_size=20,
        unique_by=lambda t: (t[0], t[1], t[2]),
    )
)
def test_roundtrip_arbitrary_floats(vals):
    rows = tuple(
        SweepRow(s, m, mer, "intercept_probability", Estimate(mean, abs(se), mean - se, mean + se, 7))
        for s, m, mer, mean, se in vals
    )
    r = SweepResult(rows)
    assert parse_csv_text(to_csv_text(r)) == r


def test_duplicate_rows_rejected():
    e = Estimate.from_moments(0.1, 0.01, 10)
    row = SweepRow("direct", 0, 0.0, "intercept_probability", e)
    with pytest.raises(ValueError):
        SweepResult((row, row))


def test_emit_error_has_path(tmp_path):
    bad = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError) as ei:
        emit_csv(SweepResult(), bad)
    assert str(bad) in str(ei.value)


# -- config -------------------------------------------------------------------


def test_config_json_roundtrip():
    c = ScenarioConfig(sigma2_re=0.3, schemes=("direct", "tas_global"), master_seed=2**63)
    assert ScenarioConfig.from_json(c.to_json()) == c


def test_config_missing_keys_take_defaults():
    assert ScenarioConfig.from_json("{}") == ScenarioConfig()


@pytest.mark.parametrize(
    "text,line",
    [
        ('{\n  "n_trials": 10\n}', 2),
        ('{\n  "gamma_s_db": 12,\n  "mer_grid_db": [3, 0]\n}', 3),
        ('{\n  "bogus": 1\n}', 2),
        ('{\n  "schemes": ["direct",\n  "jamming"]\n}', 2),
        ('{\n\n  "sigma2_re": "half"\n}', 3),
        ('{\n  "relay_counts": [0]\n}', 2),
        ('{\n  "n_trials": 1000,\n  "sigma2_sd": -1\n}', 3),
        ('{\n  "n_trials": 1000\n  "x": 1}', 3),
        ('{\n  "mer_grid_db": []\n}', 2),
    ],
)
def test_config_errors_have_lines(text, line):
    with pytest.raises(ConfigError) as ei:
        ScenarioConfig.from_json(text)
    assert ei.value.line == line
    assert f"line {line}" in str(ei.value)


def test_config_rejects_non_object():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_json("[1, 2]")


# -- CLI ----------------------------------------------------------------------


def _write_config(tmp_path, **kw):
    doc = {"n_trials": 2000, "mer_grid_db": [0, 6], "relay_counts": [2]}
    doc.update(kw)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc, indent=1))
    return p


def test_cli_run(tmp_path):
    cfg = _write_config(tmp_path)
    out = tmp_path / "out.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    r = read_csv(out)
    assert len(r) == 2 * 2 * 2
    assert all(row.estimate.n_trials == 2000 for row in r.rows)


def test_cli_overrides(tmp_path):
    cfg = _write_config(tmp_path)
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(["run", "--config", str(cfg), "--out", str(a), "--trials", "3000", "--seed", "5"]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(b), "--trials", "3000", "--seed", "5", "--threads", "2"]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(c), "--trials", "3000", "--seed", "6"]) == 0
    assert a.read_bytes() == b.read_bytes() != c.read_bytes()
    assert read_csv(a).rows[0].estimate.n_trials == 3000


def test_cli_config_error_exit_2(tmp_path, capsys):
    cfg = _write_config(tmp_path, eve_mode="loud")
    out = tmp_path / "out.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 2
    assert "eve_mode" in capsys.readouterr().err
    assert not out.exists()


def test_cli_missing_config_exit_2(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o.csv")]) == 2


def test_cli_bad_override_exit_2(tmp_path):
    cfg = _write_config(tmp_path)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o.csv"), "--trials", "10"]) == 2
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o.csv"), "--threads", "0"]) == 2


def test_cli_insufficient_resolution_exit_3(tmp_path):
    cfg = _write_config(tmp_path, mer_grid_db=[0, 20, 30], relay_counts=[8])
    out = tmp_path / "out.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--slopes"]) == 3
    assert not out.exists()


def test_cli_slopes(tmp_path, capsys):
    cfg = _write_config(tmp_path, schemes=["direct"], mer_grid_db=[20, 25, 30], n_trials=100_000)
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o.csv"), "--slopes"]) == 0
    line = capsys.readouterr().out.strip()
    slope = float(line.split("slope=")[1])
    assert math.isfinite(slope) and -1.3 < slope < -0.7


def test_cli_threads_env(tmp_path, monkeypatch):
    cfg = _write_config(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--config", str(cfg), "--out", str(a)]) == 0
    monkeypatch.setenv("SECRECYSIM_THREADS", "4")
    assert main(["run", "--config", str(cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_default_config(capsys):
    assert main(["default-config"]) == 0
    assert ScenarioConfig.from_json(capsys.readouterr().out) == ScenarioConfig()
