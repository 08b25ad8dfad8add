import csv
import json

import pytest

from wellopt.cli import main
from wellopt.errors import ConfigError, SchemaMismatch
from wellopt.experiment import compare, load_config, parse_config, run_experiment


def _write(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


CAMEL_MCS = {"scenario": "benchmark", "function": "six_hump_camel", "algorithm": "mcs-1", "budget": 200}
CAMEL_PSO = {"scenario": "benchmark", "function": "six_hump_camel", "algorithm": "pso", "budget": 120,
             "trials": 10, "seeds": list(range(1, 11))}


def test_deterministic_run_files(tmp_path):
    cfg = _write(tmp_path, "c.json", CAMEL_MCS)
    assert main(["run", str(cfg), "--out", str(tmp_path / "r")]) == 0
    out = tmp_path / "r"
    names = sorted(p.name for p in out.iterdir())
    assert names == ["beanplot.csv", "budget_snapshots.csv", "experiment.json", "summary.csv",
                     "trace_trial01.csv"]
    header, row = _rows(out / "summary.csv")
    assert header == ["algorithm", "Max", "Min", "Mean", "Median", "Std", "Trials"]
    assert row[1] == row[2] and row[6] == "1"
    assert len(_rows(out / "trace_trial01.csv")) == 201
    assert not any(p.name.startswith(".") for p in tmp_path.iterdir())


def test_stochastic_run_ten_traces_parallel(tmp_path):
    cfg = _write(tmp_path, "p.json", CAMEL_PSO)
    assert main(["run", str(cfg), "--out", str(tmp_path / "a"), "--jobs", "3"]) == 0
    traces = sorted((tmp_path / "a").glob("trace_trial*.csv"))
    assert len(traces) == 10
    header, row = _rows(tmp_path / "a" / "summary.csv")
    assert float(row[5]) >= 0 and row[6] == "10"


def test_reruns_byte_identical(tmp_path):
    cfg = _write(tmp_path, "p.json", CAMEL_PSO)
    main(["run", str(cfg), "--out", str(tmp_path / "a"), "--jobs", "2"])
    main(["run", str(cfg), "--out", str(tmp_path / "b")])
    for f in (tmp_path / "a").glob("*.csv"):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_deterministic_trials_forced_to_one():
    cfg = parse_config(dict(CAMEL_MCS, trials=5))
    assert cfg.trials == 1 and cfg.notes


@pytest.mark.parametrize("bad,where", [
    ({"algorithm": "nope"}, "algorithm"),
    ({"budget": 0}, "budget"),
    ({"algorithm": "pso", "trials": 3, "seeds": [1]}, "seeds"),
    ({"algorithm": "mcs-1-gps"}, "algorithm"),
    ({"colour": "red"}, "colour"),
    ({"function": "nope"}, "function"),
])
def test_config_errors_name_field(bad, where):
    with pytest.raises(ConfigError) as exc:
        parse_config(dict(CAMEL_MCS, **bad))
    assert exc.value.location == where


def test_json_error_has_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"scenario": "benchmark",\n "budget": }\n')
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert "line 2" in exc.value.location


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["validate", str(bad)]) == 2
    assert main(["validate", str(_write(tmp_path, "ok.json", CAMEL_MCS))]) == 0
    (tmp_path / "x").mkdir()
    assert main(["compare", str(tmp_path / "x"), str(tmp_path / "x")]) == 3
    assert main(["list-algorithms"]) == 0
    assert "cmaes" in capsys.readouterr().out


def test_compare_orders_by_median(tmp_path):
    dirs = []
    for name, c in (("m", CAMEL_MCS), ("g", dict(CAMEL_MCS, algorithm="gps", budget=30)),
                    ("p", dict(CAMEL_PSO, trials=3, seeds=[1, 2, 3]))):
        run_experiment(parse_config(c), tmp_path / name)
        dirs.append(tmp_path / name)
    rows = compare(dirs, tmp_path / "cmp.csv")
    medians = [float(r[4]) for r in rows]
    assert medians == sorted(medians, reverse=True)
    assert {r[0]: r[6] for r in rows}["mcs-1"] == "1"
    assert _rows(tmp_path / "cmp.csv")[1:] == rows


def test_compare_schema_mismatch(tmp_path):
    for d in ("a", "b"):
        (tmp_path / d).mkdir()
        (tmp_path / d / "summary.csv").write_text("x,y\n1,2\n")
    with pytest.raises(SchemaMismatch):
        compare([tmp_path / "a", tmp_path / "b"])


def test_joint_sequential_trace_length(tmp_path):
    cfg = {"scenario": "joint-sequential", "model": "builtin:joint_4", "algorithm": "mcs-1",
           "budget": 50, "placement_budget": 10, "control_budget": 15}
    results = run_experiment(parse_config(cfg), tmp_path / "j")
    assert len(results[0].trace) == 50
    assert len(_rows(tmp_path / "j" / "trace_trial01.csv")) == 51
