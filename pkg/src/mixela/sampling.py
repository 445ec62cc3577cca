"""Uniform random initial designs and imputation of inactive entries."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .space import (
    CATEGORICAL,
    INTEGER,
    NA,
    Problem,
    SearchSpace,
    SpaceError,
    VariableSpec,
    check_space,
    evaluate,
)

DEFAULT_SAMPLE_FACTOR = 50

# stream keys mixed into the user seed; one stream per consumer
SAMPLE_STREAM = 0
IMPUTE_STREAM = 1


def rng_for(seed: int, stream: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seeds must be non-negative")
    return np.random.default_rng([int(seed), stream])


@dataclass
class Design:
    space_ref: str
    rows: list[tuple]
    y: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        self.rows = [tuple(r) for r in self.rows]
        self.y = np.asarray(self.y, dtype=float)
        if len(self.rows) != len(self.y):
            raise ValueError("rows and y differ in length")
        if len(self.rows) < 2:
            raise ValueError("a design needs at least two rows")
        if not np.all(np.isfinite(self.y)):
            raise ValueError("objective values must be finite")

    @property
    def n(self) -> int:
        return len(self.rows)

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def has_na(self) -> bool:
        return any(v is NA for r in self.rows for v in r)


def draw_value(var: VariableSpec, rng: np.random.Generator):
    if var.kind == CATEGORICAL:
        return var.categories[int(rng.integers(len(var.categories)))]
    if var.kind == INTEGER:
        return int(rng.integers(int(var.lower), int(var.upper) + 1))
    return float(rng.uniform(var.lower, var.upper))


def draw_assignment(space: SearchSpace, rng: np.random.Generator) -> tuple:
    """One uniform feasible assignment; conditioned variables drawn top-down."""
    values = [NA] * space.dim
    for i in space.topological_order():
        var = space.variables[i]
        cond = var.condition
        if cond is not None:
            p = space.index(cond.parent)
            if values[p] is NA or values[p] not in cond.values:
                continue
        values[i] = draw_value(var, rng)
    return tuple(values)


def sample_design(problem: Problem, n: int, seed: int) -> Design:
    if n < 2:
        raise ValueError("sample size must be at least 2")
    space = check_space(problem.space)
    rng = rng_for(seed, SAMPLE_STREAM)
    rows = [draw_assignment(space, rng) for _ in range(n)]
    y = np.array([evaluate(problem, r) for r in rows])
    return Design(space.name, rows, y, seed)


def impute_inactive(design: Design, space: SearchSpace, seed: int) -> Design:
    """Replace every NA by one uniform draw from the variable's full domain.

    ``y`` is carried over untouched: it belongs to the feasible assignment.
    """
    if not design.has_na():
        return design
    rng = rng_for(seed, IMPUTE_STREAM)
    rows = []
    for row in design.rows:
        rows.append(tuple(
            draw_value(var, rng) if v is NA else v
            for var, v in zip(space.variables, row)
        ))
    return Design(design.space_ref, rows, design.y.copy(), design.seed)


# --- CSV ----------------------------------------------------------------

def format_value(v) -> str:
    if v is NA:
        return "NA"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_design(design: Design, space: SearchSpace, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(space.ids + ["y"])
        for row, y in zip(design.rows, design.y):
            w.writerow([format_value(v) for v in row] + [repr(float(y))])


def _parse_value(var: VariableSpec, text: str):
    if text == "NA":
        return NA
    if var.kind == CATEGORICAL:
        return text
    x = float(text)
    if var.kind == INTEGER:
        if x != math.floor(x):
            raise ValueError(f"{text!r} is not an integer")
        return int(x)
    return x


def read_design(path, space: SearchSpace) -> Design:
    """Parse a design CSV written by :func:`write_design` (or by hand)."""
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SpaceError(f"{path}: empty design file")
        if header != space.ids + ["y"]:
            raise SpaceError(f"{path}: header {header} does not match space {space.ids + ['y']}")
        rows, ys = [], []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise SpaceError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            try:
                rows.append(tuple(_parse_value(v, t) for v, t in zip(space.variables, rec)))
                ys.append(float(rec[-1]))
            except ValueError as exc:
                raise SpaceError(f"{path}:{lineno}: {exc}") from exc
    return Design(space.name, rows, np.array(ys))
