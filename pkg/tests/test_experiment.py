import json
from pathlib import Path

import pytest
import yaml

from maxineq import cli
from maxineq import experiment as ex

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


def write(tmp_path, doc, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(doc))
    return p


# -- catalog ---------------------------------------------------------------------------

def test_catalog_sorted_and_large():
    names = [c.name for c in ex.list_checks()]
    assert names == sorted(names)
    assert len(names) >= 15


def test_every_check_has_citation():
    for info in ex.list_checks():
        assert info.citation


def test_chandra_ghosal_registered():
    assert "Chandra & Ghosal" in ex.CATALOG["check_chandra_ghosal"].citation


def test_list_checks_command(capsys):
    assert cli.main(["list-checks"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == len(ex.CATALOG)
    assert out[0].split()[0] == ex.list_checks()[0].name


def test_describe_command(capsys):
    assert cli.main(["describe", "check_serfling"]) == 0
    assert "Serfling" in capsys.readouterr().out
    assert cli.main(["describe", "no_such_check"]) == 2


# -- config validation ------------------------------------------------------------------

def test_empty_checks_exit_two(tmp_path):
    p = write(tmp_path, {"seed": 1, "models": {}, "checks": []})
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


@pytest.mark.parametrize(
    "doc",
    [
        {"models": {}, "checks": [{"check": "constant_transfer", "K": 1, "r": 2}]},
        {"seed": -1, "checks": [{"check": "constant_transfer", "K": 1, "r": 2}]},
        {"seed": 1, "checks": [{"check": "nope"}]},
        {"seed": 1, "checks": [{"check": "check_kolmogorov", "model": "missing"}]},
        {"seed": 1, "bogus": 3, "checks": [{"check": "constant_transfer"}]},
        {"seed": 1, "models": {"m": {"kind": "AR1", "n": 10, "a": 1.5}},
         "checks": [{"check": "check_kolmogorov", "model": "m"}]},
        {"seed": 1, "paths": 10, "models": {"m": {"kind": "IID", "n": 10}},
         "checks": [{"check": "check_kolmogorov", "model": "m"}]},
        {"seed": 1, "checks": [{"check": "constant_transfer", "K": 1, "r": 2, "colour": "red"}]},
    ],
)
def test_invalid_configs_rejected(doc):
    with pytest.raises(ex.ConfigError):
        ex.parse_config(doc)


def test_missing_file_exit_two(tmp_path):
    assert cli.main(["run", "--config", str(tmp_path / "absent.yaml")]) == 2


def test_overrides_win(tmp_path):
    p = write(tmp_path, {"seed": 1, "paths": 200, "checks": [{"check": "constant_transfer", "K": 1, "r": 2}]})
    cfg = ex.load_config(p, seed=7, paths=300, out=str(tmp_path), fmt="table")
    assert (cfg.seed, cfg.paths, cfg.fmt) == (7, 300, "table")


# -- runs --------------------------------------------------------------------------------

def test_rademacher_battery_exit_zero(tmp_path):
    out = tmp_path / "rb"
    assert cli.main(["run", "--config", str(CONFIGS / "rademacher_battery.yaml"), "--out", str(out)]) == 0
    doc = json.loads((out / "report.json").read_text())
    assert len(doc["rows"]) >= 40
    assert {r["verdict"] for r in doc["rows"]} == {"Holds"}
    assert doc["seed"] == 20240601


def test_negative_control_exit_one(tmp_path):
    out = tmp_path / "nc"
    assert cli.main(["run", "--config", str(CONFIGS / "negative_control.yaml"), "--out", str(out)]) == 1
    doc = json.loads((out / "report.json").read_text())
    assert doc["summary"]["Violated"] >= 1


def test_table_carries_seed(tmp_path):
    out = tmp_path / "t"
    cli.main(["run", "--config", str(CONFIGS / "sequence_checks.yaml"), "--out", str(out),
              "--format", "table", "--seed", "99"])
    lines = (out / "report.csv").read_text().splitlines()
    assert lines[0].split(",")[:2] == ["check_id", "check"]
    assert all(",99," in line for line in lines[1:])
    assert not (out / "report.json").exists()


def test_report_rows_map_to_catalog(tmp_path):
    cfg = ex.load_config(CONFIGS / "sequence_checks.yaml")
    result = ex.run_config(cfg)
    for row in result.rows:
        assert row.check in ex.CATALOG


def test_config_echo_round_trips(tmp_path):
    out = tmp_path / "echo"
    cfg_path = CONFIGS / "rademacher_battery.yaml"
    cli.main(["run", "--config", str(cfg_path), "--out", str(out), "--format", "structured"])
    doc = json.loads((out / "report.json").read_text())
    raw = yaml.safe_load(cfg_path.read_text())
    raw.pop("output", None)
    raw.pop("workers", None)
    assert doc["config"] == json.loads(json.dumps(ex._jsonable(raw), sort_keys=True))


@pytest.mark.parametrize("name", ["rademacher_battery.yaml", "negative_control.yaml", "transfer_trials.yaml"])
def test_reports_byte_identical_across_workers(tmp_path, name):
    outs = []
    for w in (1, 3):
        out = tmp_path / f"w{w}"
        cli.main(["run", "--config", str(CONFIGS / name), "--out", str(out), "--workers", str(w)])
        outs.append(((out / "report.csv").read_bytes(), (out / "report.json").read_bytes()))
    assert outs[0] == outs[1]
