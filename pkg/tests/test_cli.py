import json
from pathlib import Path

import jsonschema
import pytest

from mecoffload.cli import main
from mecoffload.config import ConfigError, CliConfig, bundled_configs, load_config, parse_config
from mecoffload.taskmodel import Scenario, SystemConfig, UserTask

DOCS = Path(__file__).resolve().parents[1] / "docs"


def _json_prefix(out: str) -> dict:
    return json.loads(out[: out.index("\n}\n") + 2])


@pytest.fixture
def single_user(tmp_path):
    s = Scenario(SystemConfig(tau=100.0), (UserTask(L=2, B=0, C=1, Y=0.2, g=0.5, beta=1),))
    path = tmp_path / "one.json"
    s.save(path)
    return path


@pytest.fixture
def tight(tmp_path):
    users = (UserTask(L=1, B=3, C=1, Y=3.5, g=1, beta=1), UserTask(L=2, B=1, C=1, Y=1.2, g=5, beta=0.5))
    path = tmp_path / "tight.json"
    Scenario(SystemConfig(tau=1.0), users).save(path)
    return path


def test_config_defaults():
    cfg = CliConfig()
    assert cfg["distribution.K"] == 10
    assert cfg.system().radio.gamma_BS == 3.0
    assert cfg.system().radio.gamma_user == 6.0
    assert cfg.distribution().output_map.c1 == 0.1
    assert cfg.distribution().fading.epsilon == 0.05


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="system.bogus"):
        parse_config("[system]\nbogus = 1\n")
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config("[plots]\nx = 1\n")
    with pytest.raises(ConfigError, match="distribution.K"):
        parse_config('distribution.K = "ten"\n')
    with pytest.raises(ConfigError):
        parse_config("system.tau = -1\n")


def test_dotted_keys_and_sections_agree():
    a = parse_config("system.tau = 20\ndistribution.mean_B = 2\n")
    b = parse_config("[system]\ntau = 20\n[distribution]\nmean_B = 2\n")
    assert a.values == b.values
    assert a.system().tau == 20


def test_bundled_configs():
    assert {"fig_bbar", "fig_tau"} <= set(bundled_configs())
    bbar = load_config("fig_bbar").sweep()
    assert bbar.param == "mean_B" and bbar.values == (1.0, 2.0, 4.0, 8.0)
    assert bbar.config.tau == 35.63
    tau = load_config("fig_tau").sweep()
    assert tau.param == "tau" and tau.distribution.mean_B == 4.0
    assert tau.values == pytest.approx([f * 35.63 for f in (0.4, 0.6, 0.8, 1.0)], abs=1e-3)


def test_solve_forced_offload(single_user, capsys):
    assert main(["solve", "--input", str(single_user), "--force-n", "1"]) == 0
    doc = _json_prefix(capsys.readouterr().out)
    assert doc["energy"] == pytest.approx(4.4274, abs=1e-4)
    assert doc["decision"] == [1]


def test_solve_force_zero_gives_E0(single_user, capsys):
    assert main(["solve", "--input", str(single_user), "--force-n", "0"]) == 0
    assert _json_prefix(capsys.readouterr().out)["energy"] == 0.5


def test_solve_output_matches_schema(single_user, tight, capsys):
    schema = json.loads((DOCS / "solve_outcome.schema.json").read_text())
    for path in (single_user, tight):
        main(["solve", "--input", str(path)])
        jsonschema.validate(_json_prefix(capsys.readouterr().out), schema)


def test_solve_infeasible_exit_code(tight, capsys):
    assert main(["solve", "--input", str(tight)]) == 2
    out = capsys.readouterr().out
    doc = _json_prefix(out)
    assert doc["status"] == "infeasible"
    assert doc["min_feasible_tau"] > 1.0
    assert "min tau" in out


def test_solve_tau_override(tight, capsys):
    assert main(["solve", "--input", str(tight), "--tau", "50"]) == 0


def test_solve_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"config": {}, "users": []}')
    assert main(["solve", "--input", str(bad)]) == 1
    assert "bad.json" in capsys.readouterr().err
    assert main(["solve", "--input", str(tmp_path / "missing.json")]) == 1


def test_sweep_creates_out_dir_and_is_worker_independent(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[distribution]\nK = 5\n[sweep]\nparam = "tau"\nvalues = [8.0, 20.0]\ntrials = 5\nseed = 4\n')
    out1, out8 = tmp_path / "a" / "b", tmp_path / "c"
    assert main(["sweep", "--config", str(cfg), "--out", str(out1), "--workers", "1"]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(out8), "--workers", "8"]) == 0
    for name in ("sweep_tau.csv", "sweep_tau.aggregate.csv"):
        assert (out1 / name).read_bytes() == (out8 / name).read_bytes()


def test_sweep_seed_override_and_json(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[distribution]\nK = 4\n[sweep]\nparam = "mean_B"\nvalues = [1.0]\ntrials = 3\n')
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o"), "--seed", "9",
                 "--format", "json"]) == 0
    doc = json.loads((tmp_path / "o" / "sweep_mean_B.json").read_text())
    assert len(doc["rows"]) == 3


def test_sweep_bad_config(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[sweep]\nparam = 'N0'\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert main(["sweep", "--config", "no_such_config", "--out", str(tmp_path)]) == 1


def test_validate_guards(capsys):
    assert main(["validate", "--k", "15", "--trials", "1", "--seed", "0"]) == 1
    assert main(["validate", "--k", "5", "--trials", "0", "--seed", "0"]) == 1


def test_validate_small_run(capsys):
    assert main(["validate", "--k", "8", "--trials", "60", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "exact matches" in out and "unexplained           0" in out


def test_analyze(capsys, tmp_path):
    assert main(["analyze"]) == 0
    out = capsys.readouterr().out
    assert "E[L_max]   5.857937" in out
    assert "theta      2.849" in out
    line_k1 = [l for l in out.splitlines() if l.strip().startswith("1  ")][-1].split()
    assert line_k1[1] == line_k1[2]
    cfg = tmp_path / "a.toml"
    cfg.write_text("[analyze]\nKs = [1, 1000]\nreceived_power = 1000.0\n")
    assert main(["analyze", "--config", str(cfg)]) == 0
    bad = tmp_path / "b.toml"
    bad.write_text("[analyze]\nnope = 1\n")
    assert main(["analyze", "--config", str(bad)]) == 1


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "mecoffload", "analyze"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "theta" in proc.stdout
