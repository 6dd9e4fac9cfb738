import csv
import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilwgp.cli import ExperimentConfig, negative_control, planted_coset, planted_report, run
from nilwgp.cli.main import main
from nilwgp.errors import ConfigError
from nilwgp.nilgroup import heisenberg

SMALL = ExperimentConfig(group="abelian:1,0", ell=1, ns=(64, 128, 256, 512), alpha=2, annihilator=None)


def test_config_round_trip_default():
    cfg = ExperimentConfig()
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg
    assert ExperimentConfig.from_text(cfg.to_text()).to_text() == cfg.to_text()


@settings(max_examples=50)
@given(st.lists(st.integers(1, 40), min_size=1, max_size=5, unique=True), st.integers(0, 10 ** 9),
       st.booleans(), st.floats(0.05, 1.0), st.sampled_from(["nilbox", "nilprog", "ball"]))
def test_config_round_trip(ns, seed, ann, theta, kind):
    cfg = ExperimentConfig(ns=tuple(sorted(ns)), seed=seed, kind=kind,
                           annihilator=(2, theta, 16) if ann else None)
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg


@pytest.mark.parametrize("text", ["", "bogus=1\n", "ell=2\nell=3\n", "no equals sign\n"])
def test_config_rejects_bad_text(text):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_text(ExperimentConfig().to_text() + text if text else text)


@pytest.mark.parametrize("change", [dict(kind="cube"), dict(mode="x"), dict(ell=0), dict(ns=(3, 2)),
                                    dict(ns=()), dict(tau=0), dict(annihilator=(2, 1.5, 4)),
                                    dict(experiment_id="a b")])
def test_config_rejects_bad_values(change):
    with pytest.raises(ConfigError):
        ExperimentConfig().with_(**change)


def test_unknown_group_is_config_error():
    assert run(ExperimentConfig(group="nope")).exit_code == 1
    assert run(ExperimentConfig(mode="symbolic")).exit_code == 1


def test_budget_exit_code(monkeypatch):
    monkeypatch.setenv("NILWGP_BUDGET", "10")
    res = run(SMALL)
    assert res.exit_code == 2 and "budget" in res.message
    monkeypatch.setenv("NILWGP_BUDGET", "zero")
    assert run(SMALL).exit_code == 1


def test_budget_from_config():
    assert run(SMALL.with_(budget=50)).exit_code == 2


def test_abelian_sweep_csv(tmp_path):
    cfg = SMALL.with_(csv_path=str(tmp_path / "a.csv"), report_path=str(tmp_path / "a.txt"))
    res = run(cfg, assert_mode=True)
    assert res.exit_code == 0 and res.passed
    rows = list(csv.DictReader(io.StringIO(res.csv_text)))
    assert [int(r["N"]) for r in rows] == [64, 128, 256, 512]
    for r in rows:
        N = int(r["N"])
        assert int(r["set_size"]) == 2 * N + 1
        assert int(r["triples"]) == (2 * N + 1) ** 2 - N * (N + 1)
        assert (int(r["doubling_num"]), int(r["doubling_den"])) == (4 * N + 1, 2 * N + 1)
    first = (tmp_path / "a.csv").read_bytes()
    run(cfg)
    assert (tmp_path / "a.csv").read_bytes() == first
    assert "verdict: pass" in (tmp_path / "a.txt").read_text()


def test_assert_mode_exit_code():
    res = run(SMALL.with_(min_slope=2.5), assert_mode=True)
    assert res.exit_code == 3 and res.passed is False
    assert run(SMALL.with_(min_slope=2.5)).exit_code == 0


def test_negative_control_defaults():
    cfg = ExperimentConfig(experiment_id="negative", group="affine", kind="ball", ns=(1, 2, 3, 4),
                           bit_size=16, annihilator=None)
    res = negative_control(cfg)
    d = [row.doubling for row in res.detail]
    assert all(b > a for a, b in zip(d, d[1:]))
    assert res.passed
    assert run(cfg, assert_mode=True, experiment="negative").exit_code == 0


def test_negative_control_needs_nonnilpotent():
    with pytest.raises(ConfigError):
        negative_control(ExperimentConfig())
    assert run(ExperimentConfig(), experiment="negative").exit_code == 1


def test_planted_coset_is_caught():
    H = heisenberg()
    X = planted_coset(H, {0: 2}, 3)
    assert len(X) == 49
    rep, full = planted_report(H, {0: 2}, 3)
    assert not rep.wgp
    assert "hyperplane:x12 - 2" in full
    with pytest.raises(ConfigError):
        planted_coset(H, {5: 1}, 1)


def test_cli_hall_basis(capsys):
    assert main(["hall-basis", "--generators", "2", "--class", "3", "--validate"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 5


def test_cli_group_and_catalog(capsys):
    assert main(["group", "--spec", "heisenberg"]) == 0
    out = capsys.readouterr().out
    assert "x12 x13 x23" in out and "G_1" in out
    assert main(["catalog", "--group", "heisenberg", "--alpha", "2"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 259


def test_cli_build_and_measure(capsys):
    assert main(["build", "--group", "abelian:1,0", "--gens", "1", "--length", "1,2", "--kind", "ap"]) == 0
    assert capsys.readouterr().out.split() == ["N=1", "size=3", "N=2", "size=5"]
    assert main(["measure", "--group", "abelian:1,0", "--gens", "1", "--ns", "1", "--kind", "ap"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[1].split("\t") == ["1", "3", "5", "5/3", "19", "7"]


def test_cli_es_stdout(capsys):
    argv = ["es", "--group", "abelian:1,0", "--ell", "1", "--ns", "8,16", "--alpha", "2", "--annihilator", "off"]
    assert main(argv) == 0
    out1 = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == out1
    assert out1.startswith("experiment_id,")


def test_cli_exit_codes(capsys, tmp_path):
    assert main(["es", "--group", "heisenberg", "--kind", "cube"]) == 1
    assert main(["es", "--config", str(tmp_path / "missing.cfg")]) == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("ell=2\n")
    assert main(["es", "--config", str(bad)]) == 1
    assert main(["es", "--group", "abelian:1,0", "--ell", "1", "--ns", "64,128", "--budget", "10"]) == 2
    assert main(["es", "--group", "abelian:1,0", "--ell", "1", "--ns", "8,16", "--alpha", "2",
                 "--annihilator", "off", "--min-slope", "3", "--assert"]) == 3
    capsys.readouterr()


def test_cli_config_file(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text(SMALL.with_(ns=(8, 16)).to_text())
    assert main(["es", "--config", str(path)]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["N"] for r in rows] == ["8", "16"]


def test_cli_negative(capsys):
    assert main(["negative", "--assert", "--csv-stdout"]) == 0
    out = capsys.readouterr().out
    assert "doubling_strictly_increasing: true" in out and "verdict: pass" in out
    assert main(["negative", "--group", "heisenberg"]) == 1


def test_cli_control_small(capsys):
    assert main(["control", "--ns", "1,2", "--transfer", "--assert"]) == 0
    out = capsys.readouterr().out
    assert "K_range prog_by_box" in out and "K_range box_by_prog" in out
