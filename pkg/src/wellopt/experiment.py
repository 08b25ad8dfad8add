"""Declarative experiments: config parsing, multi-trial runs and CSV outputs."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import shutil
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .algorithms import ALGORITHMS, is_stochastic, parse_algorithm, run_algorithm
from .core import RunResult, best_at_budget, statistics_of
from .errors import ConfigError, SchemaMismatch
from .objectives.benchmarks import BENCHMARKS, benchmark_problem

BENCHMARK = "benchmark"
RESERVOIR_SCENARIOS = {"placement": "placement", "control": "control",
                       "joint-simultaneous": "joint", "joint-sequential": "joint"}
SCENARIOS = (BENCHMARK,) + tuple(RESERVOIR_SCENARIOS)
SNAPSHOT_FRACTION = 0.15
SUMMARY_HEADER = ["algorithm", "Max", "Min", "Mean", "Median", "Std", "Trials"]
TRACE_HEADER = ["eval_index", "value", "best_so_far"]
KNOWN_KEYS = {"scenario", "function", "dimension", "model", "algorithm", "budget", "trials", "seeds",
              "output_dir", "x0", "placement_budget", "control_budget", "backend", "name"}


@dataclass
class ExperimentConfig:
    scenario: str
    algorithm: str
    budget: int
    trials: int = 1
    seeds: list = field(default_factory=list)
    function: Optional[str] = None
    dimension: Optional[int] = None
    model: Optional[str] = None
    output_dir: Optional[str] = None
    x0: Optional[list] = None
    placement_budget: int = 60
    control_budget: int = 140
    backend: Optional[str] = None
    name: Optional[str] = None
    base_dir: str = "."
    notes: list = field(default_factory=list)

    @property
    def algorithms(self):
        return parse_algorithm(self.algorithm)

    @property
    def algorithm_id(self) -> str:
        return "-".join(self.algorithms)

    @property
    def stochastic(self) -> bool:
        return any(is_stochastic(a) for a in self.algorithms)

    def model_source(self) -> str:
        src = str(self.model)
        if src.startswith("builtin:") or os.path.isabs(src):
            return src
        return os.path.join(self.base_dir, src)

    def to_dict(self) -> dict:
        keys = ["scenario", "algorithm", "budget", "trials", "seeds", "function", "dimension", "model",
                "x0", "placement_budget", "control_budget", "backend", "name"]
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}


def _require(d, key, kind, where=None):
    if key not in d:
        raise ConfigError(f"missing required field {key!r}", where or key)
    return _typed(d[key], key, kind)


def _typed(value, key, kind):
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", key)
    elif kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", key)
    elif kind is list:
        if not isinstance(value, list):
            raise ConfigError(f"expected a list, got {value!r}", key)
    return value


def parse_config(data: dict, base_dir=".") -> ExperimentConfig:
    """Validate a config mapping. Field errors carry the field name as location."""
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", "line 1")
    unknown = sorted(set(data) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown field(s) {', '.join(unknown)}", unknown[0])
    scenario = _require(data, "scenario", str)
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {', '.join(SCENARIOS)}", "scenario")
    algorithm = _require(data, "algorithm", str)
    try:
        algs = parse_algorithm(algorithm)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0]), "algorithm") from None
    if scenario == "joint-sequential" and len(algs) != 2:
        algs = algs * 2 if len(algs) == 1 else algs
    elif scenario != "joint-sequential" and len(algs) != 1:
        raise ConfigError("algorithm pairs are only valid for joint-sequential", "algorithm")
    budget = _require(data, "budget", int)
    if budget < 1:
        raise ConfigError("budget must be at least 1", "budget")
    trials = _typed(data.get("trials", 1), "trials", int)
    if trials < 1:
        raise ConfigError("trials must be at least 1", "trials")
    seeds = _typed(data.get("seeds", []), "seeds", list)
    if any(isinstance(s, bool) or not isinstance(s, int) for s in seeds):
        raise ConfigError("seeds must be integers", "seeds")
    cfg = ExperimentConfig(scenario=scenario, algorithm="-".join(algs), budget=budget, trials=trials,
                           seeds=list(seeds), base_dir=str(base_dir))
    for key in ("function", "model", "output_dir", "backend", "name"):
        if key in data:
            setattr(cfg, key, _typed(data[key], key, str))
    for key in ("dimension", "placement_budget", "control_budget"):
        if key in data:
            value = _typed(data[key], key, int)
            if value < 1:
                raise ConfigError("must be at least 1", key)
            setattr(cfg, key, value)
    if "x0" in data:
        x0 = _typed(data["x0"], "x0", list)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x0):
            raise ConfigError("x0 must be a list of numbers", "x0")
        cfg.x0 = [float(v) for v in x0]
    if cfg.backend not in (None, "python", "compiled"):
        raise ConfigError("backend must be 'python' or 'compiled'", "backend")
    if scenario == BENCHMARK:
        if cfg.function is None:
            raise ConfigError("benchmark scenario needs 'function'", "function")
        if cfg.function not in BENCHMARKS:
            raise ConfigError(f"unknown function; choose from {', '.join(sorted(BENCHMARKS))}", "function")
        try:
            benchmark_problem(cfg.function, 1, cfg.dimension, cfg.x0)
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc), "dimension" if cfg.x0 is None else "x0") from None
    elif cfg.model is None:
        raise ConfigError(f"scenario {scenario!r} needs 'model'", "model")
    if scenario == "joint-sequential" and budget < cfg.placement_budget + cfg.control_budget:
        raise ConfigError("budget must cover one placement and one control stage", "budget")
    if cfg.stochastic:
        if len(cfg.seeds) != cfg.trials:
            raise ConfigError(f"stochastic algorithm needs {cfg.trials} seed(s), got {len(cfg.seeds)}", "seeds")
    else:
        if cfg.trials != 1:
            cfg.notes.append(f"deterministic algorithm: trials forced from {cfg.trials} to 1")
        cfg.trials = 1
        cfg.seeds = cfg.seeds[:1]
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    cfg = parse_config(data, base_dir=path.parent)
    if cfg.model is not None and not cfg.model.startswith("builtin:") and not Path(cfg.model_source()).is_file():
        raise ConfigError(f"model file {cfg.model_source()!r} not found", "model")
    return cfg


def build_problem(cfg: ExperimentConfig):
    """The problem for one trial (each worker rebuilds it from the config)."""
    if cfg.scenario == BENCHMARK:
        return benchmark_problem(cfg.function, cfg.budget, cfg.dimension, cfg.x0)
    from .objectives.scenarios import load_case
    case = load_case(cfg.model_source())
    problem = case.problem(RESERVOIR_SCENARIOS[cfg.scenario], cfg.budget, backend=cfg.backend)
    if cfg.x0 is not None:
        if len(cfg.x0) != problem.dimension:
            raise ConfigError(f"x0 has {len(cfg.x0)} entries, problem has {problem.dimension}", "x0")
        problem.initial_guess = problem.clip(np.asarray(cfg.x0, dtype=float))
    return problem


def run_trial(cfg: ExperimentConfig, trial: int) -> RunResult:
    seed = cfg.seeds[trial] if trial < len(cfg.seeds) else None
    problem = build_problem(cfg)
    if cfg.scenario == "joint-sequential":
        from .joint import SequentialPlan, run_sequential
        first, second = cfg.algorithms
        plan = SequentialPlan(first, second, cfg.placement_budget, cfg.control_budget, cfg.budget,
                              seed=seed or 0)
        return run_sequential(problem, plan, seed=seed)
    return run_algorithm(cfg.algorithms[0], problem, seed=seed)


def _run_trial_packed(args):
    cfg, trial = args
    return run_trial(cfg, trial)


def _fmt(v) -> str:
    return repr(float(v))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_rows(result: RunResult):
    return [(r.eval_index, _fmt(r.value), _fmt(r.best_so_far)) for r in result.trace]


def summary_row(alg_id, stats):
    return [alg_id, _fmt(stats.max), _fmt(stats.min), _fmt(stats.mean), _fmt(stats.median),
            _fmt(stats.std), stats.trials]


def snapshot_budget(budget: int) -> int:
    return max(1, int(math.floor(SNAPSHOT_FRACTION * budget + 0.5)))


def run_experiment(cfg: ExperimentConfig, out_dir=None, jobs: int = 1):
    """Run all trials and write the CSV outputs into ``out_dir``.

    Files are staged in a temporary directory next to the target and moved
    in one by one with atomic renames; on failure nothing is left behind.
    Returns the per-trial results.
    """
    out = Path(out_dir or cfg.output_dir or "results")
    out.parent.mkdir(parents=True, exist_ok=True)
    existed = out.exists()
    args = [(cfg, k) for k in range(cfg.trials)]
    if jobs > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial_packed, args))
    else:
        results = [_run_trial_packed(a) for a in args]
    alg = cfg.algorithm_id
    finals = [r.best_value for r in results]
    stats = statistics_of(finals)
    k = snapshot_budget(cfg.budget)
    seeds = [cfg.seeds[t] if t < len(cfg.seeds) else "" for t in range(cfg.trials)]
    files = {}
    for t, r in enumerate(results):
        files[f"trace_trial{t + 1:02d}.csv"] = _csv_text(TRACE_HEADER, trace_rows(r))
    files["summary.csv"] = _csv_text(SUMMARY_HEADER, [summary_row(alg, stats)])
    files["budget_snapshots.csv"] = _csv_text(
        ["algorithm", "trial", "seed", "snapshot_eval", "best_so_far"],
        [(alg, t + 1, seeds[t], k, _fmt(best_at_budget(r.trace, k))) for t, r in enumerate(results)])
    files["beanplot.csv"] = _csv_text(["algorithm", "trial", "seed", "final_best"],
                                      [(alg, t + 1, seeds[t], _fmt(v)) for t, v in enumerate(finals)])
    files["experiment.json"] = json.dumps(cfg.to_dict(), indent=1, sort_keys=True) + "\n"
    stage = Path(tempfile.mkdtemp(dir=out.parent, prefix=f".{out.name}.staging."))
    moved = []
    try:
        for name, text in files.items():
            _atomic_write(stage / name, text)
        out.mkdir(exist_ok=True)
        for name in files:
            os.replace(stage / name, out / name)
            moved.append(out / name)
    except BaseException:
        for p in moved:
            p.unlink(missing_ok=True)
        if not existed and out.exists() and not any(out.iterdir()):
            out.rmdir()
        raise
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    return results


def _read_csv(path: Path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaMismatch(f"{path} is empty")
    return rows[0], rows[1:]


def compare(dirs, out_path=None):
    """Collect ``summary.csv`` rows from experiment directories into one table.

    Rows are sorted by median in descending order, ties by algorithm id.
    """
    if len(dirs) < 2:
        raise SchemaMismatch("compare needs at least two experiment directories")
    rows = []
    for d in dirs:
        path = Path(d) / "summary.csv"
        if not path.is_file():
            raise SchemaMismatch(f"{d} has no summary.csv")
        header, body = _read_csv(path)
        if header != SUMMARY_HEADER:
            raise SchemaMismatch(f"{path}: header {header} differs from {SUMMARY_HEADER}")
        for row in body:
            if len(row) != len(SUMMARY_HEADER):
                raise SchemaMismatch(f"{path}: row has {len(row)} fields")
            try:
                [float(v) for v in row[1:6]]
                int(row[6])
            except ValueError:
                raise SchemaMismatch(f"{path}: non-numeric statistics") from None
            rows.append(row)
    rows.sort(key=lambda r: (-float(r[4]), r[0]))
    text = _csv_text(SUMMARY_HEADER, rows)
    if out_path is not None:
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(out_path, text)
    return rows


def algorithm_table():
    return [(a.id, "stochastic" if a.stochastic else "deterministic", a.description)
            for a in ALGORITHMS.values()]
