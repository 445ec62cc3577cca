"""Solver traces, quantile targets, ERT with PAR10 imputation and portfolio scores."""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .sampling import draw_assignment, rng_for
from .space import Problem, check_space, evaluate

TARGET_QUANTILE = 0.01
PAR_FACTOR = 10
DEFAULT_BUDGET_FACTOR = 100

RS_STREAM = 3

TRACE_CSV_HEADER = ["instance_id", "algorithm", "run_id", "fe", "y"]
PERF_CSV_HEADER = ["instance_id", "algorithm", "ert", "successes", "runs", "target"]


class TraceFormatError(ValueError):
    pass


@dataclass
class RunTrace:
    instance_id: str
    algorithm: str
    run_id: int
    fe: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.fe = np.asarray(self.fe, dtype=int)
        self.y = np.asarray(self.y, dtype=float)
        if self.fe.shape != self.y.shape:
            raise ValueError("fe and y differ in length")
        if self.fe.size:
            if self.fe[0] != 1 or np.any(np.diff(self.fe) <= 0):
                raise ValueError(f"{self.instance_id}/{self.algorithm}/{self.run_id}: "
                                 "fe must start at 1 and strictly increase")
            if not np.all(np.isfinite(self.y)):
                raise ValueError("trace values must be finite")

    @property
    def evaluations(self) -> list[tuple[int, float]]:
        return list(zip(self.fe.tolist(), self.y.tolist()))

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.y)

    def first_hit(self, target: float) -> int | None:
        hits = np.flatnonzero(self.y <= target)
        return int(self.fe[hits[0]]) if hits.size else None


@dataclass
class PerfRecord:
    instance_id: str
    algorithm: str
    ert: float
    successes: int
    runs: int
    budget: int
    target: float


def run_random_search(problem: Problem, budget: int, seed: int, run_id: int = 0,
                      algorithm: str = "RS") -> RunTrace:
    """Evaluate ``budget`` uniform feasible points in order."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    space = check_space(problem.space)
    rng = rng_for(seed, RS_STREAM)
    ys = [evaluate(problem, draw_assignment(space, rng)) for _ in range(budget)]
    return RunTrace(problem.instance_id, algorithm, run_id, np.arange(1, budget + 1), ys)


def determine_target(traces: Iterable[RunTrace], quantile: float = TARGET_QUANTILE) -> float:
    """Quantile (linear interpolation) of every value in every trace of an instance."""
    values = [t.y for t in traces if t.y.size]
    if not values:
        raise ValueError("no evaluations to derive a target from")
    return float(np.quantile(np.concatenate(values), quantile))


def ert(traces: list[RunTrace], target: float, budget: int) -> PerfRecord:
    """Expected running time over the runs of one (instance, algorithm).

    Successful runs contribute the evaluation that first reached the target,
    unsuccessful ones the whole budget. With no success the score is PAR10,
    i.e. ten times ``runs * budget``.
    """
    if not traces:
        raise ValueError("no runs given")
    total, successes = 0, 0
    for t in traces:
        if t.fe.size and t.fe[-1] > budget:
            raise ValueError(f"run {t.run_id} of {t.algorithm} on {t.instance_id} "
                             f"used {t.fe[-1]} evaluations, budget is {budget}")
        hit = t.first_hit(target)
        if hit is None:
            total += budget
        else:
            total += hit
            successes += 1
    runs = len(traces)
    value = total / successes if successes else float(PAR_FACTOR * runs * budget)
    return PerfRecord(traces[0].instance_id, traces[0].algorithm, float(value), successes, runs, budget, target)


def performance_table(traces: Iterable[RunTrace], budgets: Mapping[str, int] | None = None) -> list[PerfRecord]:
    """One record per (instance, algorithm); targets come from all of an instance's traces.

    Without an explicit budget, an instance's budget is the largest evaluation
    index seen in any of its traces.
    """
    by_instance: dict[str, list[RunTrace]] = defaultdict(list)
    for t in traces:
        by_instance[t.instance_id].append(t)
    records = []
    for inst in sorted(by_instance):
        runs = by_instance[inst]
        target = determine_target(runs)
        if budgets and inst in budgets:
            budget = int(budgets[inst])
        else:
            budget = max(int(t.fe[-1]) for t in runs if t.fe.size)
        by_alg: dict[str, list[RunTrace]] = defaultdict(list)
        for t in runs:
            by_alg[t.algorithm].append(t)
        for alg in sorted(by_alg):
            records.append(ert(by_alg[alg], target, budget))
    return records


@dataclass
class PortfolioSummary:
    sbs: str
    sbs_ert: float
    vbs_ert: float
    best_per_instance: dict[str, str]
    mean_ert: dict[str, float]


def ert_lookup(records: Iterable[PerfRecord]) -> dict[tuple[str, str], float]:
    return {(r.instance_id, r.algorithm): r.ert for r in records}


def portfolio_summary(records: Iterable[PerfRecord]) -> PortfolioSummary:
    table = ert_lookup(records)
    if not table:
        raise ValueError("empty performance table")
    instances = sorted({i for i, _ in table})
    algorithms = sorted({a for _, a in table})
    absent = [(i, a) for i in instances for a in algorithms if (i, a) not in table]
    if absent:
        raise ValueError(f"performance table lacks pairs such as {absent[0]}")
    mean_ert = {a: float(np.mean([table[i, a] for i in instances])) for a in algorithms}
    # min() keeps the first minimum, and algorithms are sorted, so ties go lexicographically
    sbs = min(algorithms, key=lambda a: mean_ert[a])
    best = {i: min(algorithms, key=lambda a: table[i, a]) for i in instances}
    vbs = float(np.mean([table[i, best[i]] for i in instances]))
    return PortfolioSummary(sbs, mean_ert[sbs], vbs, best, mean_ert)


def gap_closure(sbs_ert: float, vbs_ert: float, model_ert: float) -> float:
    if not sbs_ert > vbs_ert:
        raise ValueError("degenerate portfolio: SBS is not worse than VBS, the gap is empty")
    return (sbs_ert - model_ert) / (sbs_ert - vbs_ert)


# --- CSV ----------------------------------------------------------------

def write_traces(traces: Iterable[RunTrace], path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_CSV_HEADER)
        for t in traces:
            for fe, y in zip(t.fe, t.y):
                w.writerow([t.instance_id, t.algorithm, t.run_id, int(fe), repr(float(y))])


def read_traces(path) -> list[RunTrace]:
    """Parse a trace CSV. Rows of one run must be contiguous and in fe order."""
    runs: dict[tuple[str, str, int], tuple[list, list]] = {}
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRACE_CSV_HEADER:
            raise TraceFormatError(f"{path}:1: expected header {TRACE_CSV_HEADER}, got {header}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 5:
                raise TraceFormatError(f"{path}:{lineno}: expected 5 fields, got {len(rec)}")
            try:
                key = (rec[0], rec[1], int(rec[2]))
                fe, y = int(rec[3]), float(rec[4])
            except ValueError as exc:
                raise TraceFormatError(f"{path}:{lineno}: {exc}") from exc
            if not np.isfinite(y):
                raise TraceFormatError(f"{path}:{lineno}: non-finite objective value")
            fes, ys = runs.setdefault(key, ([], []))
            if (fes and fe <= fes[-1]) or (not fes and fe != 1):
                raise TraceFormatError(f"{path}:{lineno}: fe {fe} breaks the 1, 2, ... ordering")
            fes.append(fe)
            ys.append(y)
    if not runs:
        raise TraceFormatError(f"{path}: no trace rows")
    return [RunTrace(i, a, r, fes, ys) for (i, a, r), (fes, ys) in runs.items()]


def write_perf(records: Iterable[PerfRecord], path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PERF_CSV_HEADER)
        for r in records:
            w.writerow([r.instance_id, r.algorithm, repr(r.ert), r.successes, r.runs, repr(float(r.target))])


def read_perf(path) -> list[PerfRecord]:
    out = []
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != PERF_CSV_HEADER:
            raise TraceFormatError(f"{path}:1: expected header {PERF_CSV_HEADER}, got {header}")
        for lineno, rec in enumerate(reader, start=2):
            try:
                inst, alg, e, s, runs, target = rec
                out.append(PerfRecord(inst, alg, float(e), int(s), int(runs), 0, float(target)))
            except ValueError as exc:
                raise TraceFormatError(f"{path}:{lineno}: {exc}") from exc
    if not out:
        raise TraceFormatError(f"{path}: no performance rows")
    return out
