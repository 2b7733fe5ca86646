"""Command-line interface: exit codes, CSV contracts, reproducibility."""

import csv
import io
import re

import pytest

from smoothqmc.cli import ExperimentConfig, main, parse_config
from smoothqmc.errors import ConfigError


def _write(tmp_path, text, name="exp.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


FAST_BS = """
model: {kind: black-scholes, m: 4}
n: 64
reps: 3
seed: 99
"""


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _rows(out):
    return list(csv.reader(io.StringIO(out)))


# ---------------------------------------------------------------------------
# config parsing


def test_defaults_without_config_file():
    cfg = parse_config(None)
    assert cfg.model_kind == "black-scholes"
    assert cfg.m_values == (16,)
    assert cfg.methods == ("MC", "QMC-I", "QMC-II", "sQMC-I", "sQMC-II")
    assert cfg.n == 4096 and cfg.reps == 100 and cfg.seed == 12345
    assert isinstance(cfg, ExperimentConfig)


def test_config_round_trip(tmp_path):
    path = _write(tmp_path, """
model: {kind: nig, m: [4, 8], alpha: 100.0}
payoffs:
  - {kind: binary-asian, strike: 95.0}
  - {kind: barrier-down-out, strike: 100.0, barrier: 85.0}
methods: [MC, sQMC-II]
n: 512
reps: 5
seed: 7
effdim: {n: 1024, p: 0.95}
sweep: {n: [16, 64]}
""")
    cfg = parse_config(path)
    assert cfg.model_kind == "nig"
    assert cfg.m_values == (4, 8)
    assert cfg.model_params["alpha"] == 100.0
    assert cfg.model_params["beta"] == -26.15  # default preserved
    assert len(cfg.payoffs) == 2
    assert cfg.methods == ("MC", "sQMC-II")
    assert cfg.effdim_n == 1024 and cfg.effdim_p == 0.95
    assert cfg.sweep_n == (16, 64)


@pytest.mark.parametrize("snippet,fragment", [
    ("bogus: 1", "unknown config keys"),
    ("model: {kind: vg}", "model.kind"),
    ("model: {kind: black-scholes, vol: 0.2}", "unknown black-scholes parameters"),
    ("model: {m: 0}", "model.m"),
    ("model: {m: []}", "model.m"),
    ("payoff: {kind: binary-asian}\npayoffs: [{kind: binary-asian}]", "not both"),
    ("payoff: {kind: lookback}", "payoff.kind"),
    ("payoff: {notional: 5}", "unknown payoff keys"),
    ("methods: [MC, QMC-9]", "unknown method"),
    ("methods: []", "methods"),
    ("n: 1", "n must be >= 2"),
    ("reps: 1", "reps must be >= 2"),
    ("seed: -3", "seed"),
    ("effdim: {p: 1.5}", "effdim.p"),
    ("effdim: {q: 1}", "unknown effdim keys"),
    ("sweep: {n: [1000]}", "powers of two"),
    ("sweep: {n: []}", "sweep.n"),
])
def test_config_rejections(tmp_path, snippet, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(_write(tmp_path, snippet))
    assert fragment in str(exc.value)


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(str(tmp_path / "absent.yaml"))
    with pytest.raises(ConfigError):
        parse_config(_write(tmp_path, "model: [unclosed"))


# ---------------------------------------------------------------------------
# price


def test_price_csv_contract(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS)
    code, out, err = _run(capsys, ["price", "--config", path])
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["case", "method", "estimate", "variance", "vrf",
                       "time_ms", "n", "reps", "seed"]
    assert len(rows) == 1 + 5  # five methods, one cell
    for row in rows[1:]:
        assert row[0] == "binary-asian|black-scholes|m=4"
        assert row[5] == "0.0"  # timing off by default
        assert row[6] == "64" and row[7] == "3" and row[8] == "99"
        float(row[2]), float(row[3])
    by_method = {row[1]: row for row in rows[1:]}
    assert float(by_method["MC"][4]) == pytest.approx(1.0)


def test_price_without_baseline_leaves_vrf_blank(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS + "methods: [QMC-I]\n")
    code, out, _ = _run(capsys, ["price", "--config", path])
    assert code == 0
    rows = _rows(out)
    assert len(rows) == 2
    assert rows[1][4] == ""


def test_price_byte_reproducible_and_thread_invariant(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS)
    _, first, _ = _run(capsys, ["price", "--config", path])
    _, second, _ = _run(capsys, ["price", "--config", path])
    _, threaded, _ = _run(capsys, ["price", "--config", path, "--threads", "4"])
    assert first == second == threaded


def test_price_seed_override_changes_output(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS)
    _, base, _ = _run(capsys, ["price", "--config", path])
    _, other, _ = _run(capsys, ["price", "--config", path, "--seed", "100"])
    assert base != other
    _, same, _ = _run(capsys, ["price", "--config", path, "--seed", "99"])
    assert base == same


def test_price_timing_flag_fills_column(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS)
    _, out, _ = _run(capsys, ["price", "--config", path, "--timing"])
    times = [row[5] for row in _rows(out)[1:]]
    assert all(re.fullmatch(r"\d+\.\d{3}", t) for t in times)


def test_price_out_file_matches_stdout(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS)
    _, out, _ = _run(capsys, ["price", "--config", path])
    target = tmp_path / "result.csv"
    code, silent, _ = _run(capsys, ["price", "--config", path, "--out", str(target)])
    assert code == 0 and silent == ""
    assert target.read_text(encoding="utf-8") == out


def test_price_multiple_m_values(tmp_path, capsys):
    path = _write(tmp_path, """
model: {kind: black-scholes, m: [2, 4]}
methods: [MC, QMC-I]
n: 32
reps: 2
""")
    _, out, _ = _run(capsys, ["price", "--config", path])
    cases = {row[0] for row in _rows(out)[1:]}
    assert cases == {"binary-asian|black-scholes|m=2", "binary-asian|black-scholes|m=4"}


def test_heston_case_label_carries_rho(tmp_path, capsys):
    path = _write(tmp_path, """
model: {kind: heston, m: 2, rho: -0.5}
methods: [MC]
n: 32
reps: 2
""")
    _, out, _ = _run(capsys, ["price", "--config", path])
    assert _rows(out)[1][0] == "binary-asian|heston|m=2|rho=-0.5"


def test_nig_logs_esscher_theta_to_stderr(tmp_path, capsys):
    path = _write(tmp_path, """
model: {kind: nig, m: 4}
methods: [MC]
n: 32
reps: 2
""")
    code, out, err = _run(capsys, ["price", "--config", path])
    assert code == 0
    assert "# nig m=4: esscher theta = -4.87" in err
    assert "esscher" not in out  # the log line stays out of the CSV


# ---------------------------------------------------------------------------
# vrf


def test_vrf_csv_contract(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS + "methods: [MC, sQMC-I]\n")
    code, out, _ = _run(capsys, ["vrf", "--config", path])
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["case", "d", "method", "estimate", "vrf", "time_ms"]
    assert [row[2] for row in rows[1:]] == ["MC", "sQMC-I"]
    assert rows[1][1] == "4"
    assert float(rows[1][4]) == pytest.approx(1.0)


def test_vrf_needs_baseline(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS + "methods: [QMC-I, sQMC-I]\n")
    code, _, err = _run(capsys, ["vrf", "--config", path])
    assert code == 2
    assert "MC baseline" in err


# ---------------------------------------------------------------------------
# effdim


def test_effdim_csv_contract(tmp_path, capsys):
    path = _write(tmp_path, """
model: {kind: black-scholes, m: 4}
methods: [MC, sQMC-I, sQMC-II]
effdim: {n: 512}
""")
    code, out, _ = _run(capsys, ["effdim", "--config", path])
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["case", "d", "method", "R1", "R12", "Rorder1", "d_t",
                       "d_ms", "R1_raw", "R12_raw", "Rorder1_raw", "d_ms_raw"]
    assert [row[2] for row in rows[1:]] == ["sQMC-I", "sQMC-II"]  # raw methods filtered
    for row in rows[1:]:
        assert row[1] == "3"  # binary payoff: pushed coordinate dropped
        for cell in row[3:6]:
            assert re.fullmatch(r"\d+\.\d{2}", cell)
        int(row[6])
        assert re.fullmatch(r"\d+\.\d{2}", row[7])
        for cell in row[8:]:
            float(cell)


def test_effdim_needs_smoothed_method(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS + "methods: [MC, QMC-II]\n")
    code, _, err = _run(capsys, ["effdim", "--config", path])
    assert code == 2
    assert "smoothed method" in err


def test_effdim_constant_integrand_is_a_numerical_failure(tmp_path, capsys):
    # a strike no path can miss makes the smoothed binary integrand
    # constant, so the variance normalization has nothing to divide by
    path = _write(tmp_path, """
model: {kind: black-scholes, m: 4}
payoff: {kind: binary-asian, strike: 1.0e-06}
methods: [sQMC-I]
effdim: {n: 256}
""")
    code, out, err = _run(capsys, ["effdim", "--config", path])
    assert code == 3
    assert "numerical failure" in err
    assert out == ""


# ---------------------------------------------------------------------------
# sweep


def test_sweep_csv_contract(tmp_path, capsys):
    path = _write(tmp_path, """
model: {kind: black-scholes, m: 4}
methods: [MC, sQMC-II]
reps: 3
sweep: {n: [16, 32]}
""")
    code, out, _ = _run(capsys, ["sweep", "--config", path])
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["case", "method", "n", "variance", "time_ms"]
    assert [(r[1], r[2]) for r in rows[1:]] == [("MC", "16"), ("MC", "32"),
                                                ("sQMC-II", "16"), ("sQMC-II", "32")]
    for row in rows[1:]:
        assert float(row[3]) >= 0.0


# ---------------------------------------------------------------------------
# top-level argument handling


def test_exit_code_for_bad_config(tmp_path, capsys):
    path = _write(tmp_path, "reps: 1")
    code, out, err = _run(capsys, ["price", "--config", path])
    assert code == 2
    assert out == ""
    assert "error:" in err


def test_exit_code_for_missing_config(tmp_path, capsys):
    code, _, err = _run(capsys, ["price", "--config", str(tmp_path / "nope.yaml")])
    assert code == 2
    assert "cannot read config" in err


def test_threads_and_seed_validation(tmp_path, capsys):
    path = _write(tmp_path, FAST_BS)
    code, _, _ = _run(capsys, ["price", "--config", path, "--threads", "0"])
    assert code == 2
    code, _, _ = _run(capsys, ["price", "--config", path, "--seed", "-1"])
    assert code == 2
