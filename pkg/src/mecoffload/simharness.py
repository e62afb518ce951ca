"""Monte Carlo sweeps over one scenario parameter.

Every trial draws its own scenario from a seed derived from
``(base seed, value index, trial index)``, so results do not depend on the
number of workers or on scheduling.  Recorded floats are rounded to 12
significant digits when the row is built, which makes the emitted files
round-trip exactly.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import RadioParams
from .optimizer import optimize
from .taskmodel import ScenarioDistribution, SystemConfig, sample_scenario

SWEEPABLE = ("mean_B", "tau", "mean_L", "gamma_BS", "gamma_user", "K")
ROW_FIELDS = ("param", "value", "trial", "seed", "n_star", "total_energy", "total_time", "feasible", "linearization_gap")
AGGREGATE_NOTE = (
    "mean_energy and se_energy average feasible trials only (n_excluded infeasible trials left out); "
    "mean_n, se_n and the n0..nK histogram cover all trials"
)


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    trials: int
    seed: int = 0
    distribution: ScenarioDistribution = field(default_factory=ScenarioDistribution)
    config: SystemConfig = field(default_factory=SystemConfig)

    def __post_init__(self):
        if self.param not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.param!r}; choose one of {', '.join(SWEEPABLE)}")
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("a sweep needs at least one value")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.param == "K" and any(int(v) != v or v < 1 for v in self.values):
            raise ValueError("K values must be positive integers")

    def at(self, value) -> tuple[ScenarioDistribution, SystemConfig]:
        """Distribution and config with the swept parameter set to ``value``."""
        dist, cfg = self.distribution, self.config
        if self.param in ("mean_B", "mean_L"):
            dist = replace(dist, **{self.param: float(value)})
        elif self.param == "K":
            dist = replace(dist, K=int(value))
        elif self.param == "tau":
            cfg = cfg.with_tau(float(value))
        else:
            r = cfg.radio
            snr = {"gamma_BS": r.gamma_BS, "gamma_user": r.gamma_user, self.param: float(value)}
            cfg = replace(cfg, radio=RadioParams.from_snr(snr["gamma_BS"], snr["gamma_user"], W=r.W, N0=r.N0))
        return dist, cfg


@dataclass(frozen=True)
class Aggregate:
    value: float
    K: int
    trials: int
    mean_energy: float
    se_energy: float
    mean_n: float
    se_n: float
    feasibility_rate: float
    n_excluded: int
    histogram: tuple[int, ...]


@dataclass(frozen=True)
class SweepResult:
    param: str
    rows: tuple[dict, ...]
    aggregates: tuple[Aggregate, ...]


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


def trial_seed(base_seed: int, value_index: int, trial: int) -> int:
    """64-bit seed for one trial, hashed from the three indices."""
    ss = np.random.SeedSequence([int(base_seed), int(value_index), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def trial_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def run_trial(spec: SweepSpec, value_index: int, trial: int) -> dict:
    value = spec.values[value_index]
    dist, cfg = spec.at(value)
    seed = trial_seed(spec.seed, value_index, trial)
    scenario = sample_scenario(dist, cfg, trial_rng(seed))
    out = optimize(scenario)
    return {
        "param": spec.param,
        "value": _sig12(float(value)),
        "trial": trial,
        "seed": seed,
        "n_star": out.n_star,
        "total_energy": _sig12(out.energy),
        "total_time": _sig12(out.time),
        "feasible": out.optimal,
        "linearization_gap": _sig12(out.linearization_gap),
    }


def _run_chunk(args):
    spec, jobs = args
    return [run_trial(spec, vi, t) for vi, t in jobs]


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    jobs = [(vi, t) for vi in range(len(spec.values)) for t in range(spec.trials)]
    if workers <= 1:
        rows = _run_chunk((spec, jobs))
    else:
        size = max(1, math.ceil(len(jobs) / (4 * workers)))
        chunks = [(spec, jobs[i:i + size]) for i in range(0, len(jobs), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [row for part in pool.map(_run_chunk, chunks) for row in part]
    ks = [spec.at(v)[0].K for v in spec.values]
    return SweepResult(spec.param, tuple(rows), aggregate_rows(rows, ks))


def _mean_se(xs) -> tuple[float, float]:
    if not xs:
        return math.nan, math.nan
    m = math.fsum(xs) / len(xs)
    if len(xs) < 2:
        return m, math.nan
    var = math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1)
    return m, math.sqrt(var / len(xs))


def aggregate_rows(rows, ks) -> tuple[Aggregate, ...]:
    """Fold raw rows (in trial order) into per-value aggregates.

    ``ks`` gives the user count for each swept value, in first-appearance order.
    """
    groups: dict[float, list[dict]] = {}
    for row in rows:
        groups.setdefault(row["value"], []).append(row)
    if len(groups) != len(ks):
        raise ValueError(f"{len(groups)} distinct values but {len(ks)} user counts")
    out = []
    for (value, group), K in zip(groups.items(), ks):
        energies = [r["total_energy"] for r in group if r["feasible"]]
        ns = [r["n_star"] for r in group]
        hist = [0] * (K + 1)
        for n in ns:
            hist[n] += 1
        mean_e, se_e = _mean_se(energies)
        mean_n, se_n = _mean_se(ns)
        out.append(
            Aggregate(
                value=value,
                K=K,
                trials=len(group),
                mean_energy=_sig12(mean_e),
                se_energy=_sig12(se_e),
                mean_n=_sig12(mean_n),
                se_n=_sig12(se_n),
                feasibility_rate=_sig12(len(energies) / len(group)),
                n_excluded=len(group) - len(energies),
                histogram=tuple(hist),
            )
        )
    return tuple(out)


# --- file formats ------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def aggregate_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".aggregate" + path.suffix)


def emit(result: SweepResult, fmt: str, path) -> list[Path]:
    """Write ``result`` as CSV (rows plus a companion aggregate file) or JSON."""
    path = Path(path)
    if not result.rows:
        raise ValueError("refusing to emit an empty sweep")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(ROW_FIELDS)
                for row in result.rows:
                    writer.writerow([row["param"]] + [_fmt(row[k]) for k in ROW_FIELDS[1:]])
            agg = aggregate_path(path)
            kmax = max(a.K for a in result.aggregates)
            with open(agg, "w", encoding="utf-8", newline="") as fh:
                fh.write(f"# {AGGREGATE_NOTE}\n")
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(
                    ["param", "value", "K", "trials", "mean_energy", "se_energy", "mean_n", "se_n",
                     "feasibility_rate", "n_excluded"] + [f"n{i}" for i in range(kmax + 1)]
                )
                for a in result.aggregates:
                    hist = list(a.histogram) + [0] * (kmax + 1 - len(a.histogram))
                    writer.writerow(
                        [result.param] + [_fmt(x) for x in (a.value, a.K, a.trials, a.mean_energy, a.se_energy,
                                                             a.mean_n, a.se_n, a.feasibility_rate, a.n_excluded)]
                        + [str(h) for h in hist]
                    )
            return [path, agg]
        if fmt == "json":
            doc = {
                "param": result.param,
                "note": AGGREGATE_NOTE,
                "rows": [{k: _json_num(r[k]) for k in ROW_FIELDS} for r in result.rows],
                "aggregates": [
                    {k: _json_num(v) if not isinstance(v, tuple) else list(v) for k, v in a.__dict__.items()}
                    for a in result.aggregates
                ],
            }
            path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
            return [path]
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {path}: {exc}") from exc
    raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")


def _json_num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def read_rows_csv(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append({
                "param": rec["param"],
                "value": float(rec["value"]),
                "trial": int(rec["trial"]),
                "seed": int(rec["seed"]),
                "n_star": int(rec["n_star"]),
                "total_energy": float(rec["total_energy"]),
                "total_time": float(rec["total_time"]),
                "feasible": rec["feasible"] == "1",
                "linearization_gap": float(rec["linearization_gap"]),
            })
    return rows


def read_aggregates_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    out = []
    for rec in csv.DictReader(lines):
        hist = [int(rec[k]) for k in rec if k.startswith("n") and k[1:].isdigit()]
        K = int(rec["K"])
        out.append({
            "value": float(rec["value"]),
            "K": K,
            "trials": int(rec["trials"]),
            "mean_energy": float(rec["mean_energy"]),
            "se_energy": float(rec["se_energy"]),
            "mean_n": float(rec["mean_n"]),
            "se_n": float(rec["se_n"]),
            "feasibility_rate": float(rec["feasibility_rate"]),
            "n_excluded": int(rec["n_excluded"]),
            "histogram": tuple(hist[:K + 1]),
        })
    return out
