"""Mixed-variable search spaces with hierarchical activation conditions.

Categorical values are kept as string labels. Inactive (conditioned-off)
entries carry the ``NA`` marker, which is ``None``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

NA = None

CONTINUOUS = "continuous"
INTEGER = "integer"
CATEGORICAL = "categorical"
KINDS = (CONTINUOUS, INTEGER, CATEGORICAL)


class SpaceError(ValueError):
    """Raised for malformed spaces or assignments that do not fit a space."""


class InfeasibleError(ValueError):
    """Raised when an assignment violates bounds, domains or activity."""


@dataclass(frozen=True)
class Condition:
    parent: str
    values: frozenset

    def __init__(self, parent: str, values):
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "values", frozenset(values))


@dataclass(frozen=True)
class VariableSpec:
    id: str
    kind: str
    lower: float | None = None
    upper: float | None = None
    categories: tuple[str, ...] = ()
    condition: Condition | None = None

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))

    @property
    def is_categorical(self) -> bool:
        return self.kind == CATEGORICAL

    def contains(self, value) -> bool:
        """Domain membership test, ignoring activity."""
        if value is NA:
            return False
        if self.kind == CATEGORICAL:
            return value in self.categories
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return False
        if not math.isfinite(value):
            return False
        if self.kind == INTEGER and float(value) != math.floor(value):
            return False
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class SearchSpace:
    variables: tuple[VariableSpec, ...]
    name: str = "space"
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "_index", {v.id: i for i, v in enumerate(self.variables)})

    @property
    def ids(self) -> list[str]:
        return [v.id for v in self.variables]

    @property
    def dim(self) -> int:
        return len(self.variables)

    @property
    def n_categorical(self) -> int:
        return sum(v.is_categorical for v in self.variables)

    def index(self, var_id: str) -> int:
        return self._index[var_id]

    def __getitem__(self, var_id: str) -> VariableSpec:
        return self.variables[self._index[var_id]]

    def topological_order(self) -> list[int]:
        """Variable indices ordered so every parent precedes its children.

        Assumes the space is valid (acyclic, parents exist).
        """
        order: list[int] = []
        seen: set[int] = set()
        on_path: set[int] = set()

        def visit(i: int):
            if i in seen:
                return
            if i in on_path:
                raise SpaceError(f"condition cycle through {self.variables[i].id!r}")
            on_path.add(i)
            cond = self.variables[i].condition
            if cond is not None:
                if cond.parent not in self._index:
                    raise SpaceError(f"unknown parent {cond.parent!r}")
                visit(self._index[cond.parent])
            on_path.discard(i)
            seen.add(i)
            order.append(i)

        for i in range(self.dim):
            visit(i)
        return order


@dataclass(frozen=True)
class Problem:
    space: SearchSpace
    objective: Callable[[Mapping[str, Any]], float]
    name: str = ""

    @property
    def instance_id(self) -> str:
        return self.name or self.space.name


def validate_space(space: SearchSpace) -> list[str]:
    """Return every invariant violation of ``space``; an empty list means ok.

    Each message starts with a short tag: ``empty``, ``duplicate``, ``kind``,
    ``bounds``, ``cardinality``, ``categories``, ``parent``, ``values`` or
    ``cycle``.
    """
    problems: list[str] = []
    if not space.variables:
        problems.append("empty: a space needs at least one variable")
    ids = [v.id for v in space.variables]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    for d in dupes:
        problems.append(f"duplicate: variable id {d!r} appears more than once")
    by_id = {v.id: v for v in space.variables}

    for v in space.variables:
        if v.kind not in KINDS:
            problems.append(f"kind: {v.id!r} has unknown kind {v.kind!r}")
            continue
        if v.kind in (CONTINUOUS, INTEGER):
            if v.lower is None or v.upper is None:
                problems.append(f"bounds: {v.id!r} is missing a bound")
            elif not (math.isfinite(v.lower) and math.isfinite(v.upper)):
                problems.append(f"bounds: {v.id!r} has non-finite bounds")
            elif v.kind == CONTINUOUS and not v.lower < v.upper:
                problems.append(f"bounds: {v.id!r} needs lower < upper")
            elif v.kind == INTEGER and not v.lower <= v.upper:
                problems.append(f"bounds: {v.id!r} needs lower <= upper")
            elif v.kind == INTEGER and (v.lower != int(v.lower) or v.upper != int(v.upper)):
                problems.append(f"bounds: integer {v.id!r} needs integral bounds")
        else:
            if len(v.categories) < 2:
                problems.append(f"cardinality: {v.id!r} needs at least 2 categories")
            if len(set(v.categories)) != len(v.categories):
                problems.append(f"categories: {v.id!r} has repeated categories")
        if v.condition is not None:
            parent = by_id.get(v.condition.parent)
            if parent is None:
                problems.append(f"parent: {v.id!r} is conditioned on unknown {v.condition.parent!r}")
            elif not v.condition.values:
                problems.append(f"values: {v.id!r} has an empty activating set")
            elif parent.kind in KINDS and not all(parent.contains(x) for x in v.condition.values):
                problems.append(f"values: activating values of {v.id!r} lie outside {parent.id!r}'s domain")

    # condition edges child -> parent; follow each chain looking for a repeat
    reported: set[str] = set()
    for v in space.variables:
        chain = [v.id]
        cur = v
        while cur.condition is not None and cur.condition.parent in by_id:
            nxt = cur.condition.parent
            if nxt in chain:
                loop = chain[chain.index(nxt):]
                key = min(loop)
                if key not in reported:
                    reported.add(key)
                    problems.append("cycle: " + " -> ".join(loop + [nxt]))
                break
            chain.append(nxt)
            cur = by_id[nxt]
    return problems


def check_space(space: SearchSpace) -> SearchSpace:
    problems = validate_space(space)
    if problems:
        raise SpaceError("; ".join(problems))
    return space


def active_variables(space: SearchSpace, assignment: Sequence) -> set[str]:
    """Ids of the variables that are active under ``assignment``.

    A conditioned variable is active only if its parent is active and holds
    one of the activating values; this is applied along the whole chain.
    """
    if len(assignment) != space.dim:
        raise SpaceError(f"assignment has {len(assignment)} entries, space has {space.dim}")
    for v, value in zip(space.variables, assignment):
        if v.condition is None and value is NA:
            raise SpaceError(f"unconditioned variable {v.id!r} is NA")

    active: set[str] = set()
    for i in space.topological_order():
        v = space.variables[i]
        cond = v.condition
        if cond is None:
            active.add(v.id)
        elif cond.parent in active and assignment[space.index(cond.parent)] in cond.values:
            active.add(v.id)
    return active


def check_feasible(space: SearchSpace, assignment: Sequence) -> None:
    active = active_variables(space, assignment)
    for v, value in zip(space.variables, assignment):
        if v.id in active:
            if value is NA:
                raise InfeasibleError(f"active variable {v.id!r} is NA")
            if not v.contains(value):
                raise InfeasibleError(f"value {value!r} outside the domain of {v.id!r}")
        elif value is not NA:
            raise InfeasibleError(f"inactive variable {v.id!r} was given {value!r}")


def evaluate(problem: Problem, assignment: Sequence) -> float:
    """Objective value of a feasible assignment (NA exactly on inactive entries)."""
    space = problem.space
    check_feasible(space, assignment)
    value = float(problem.objective(dict(zip(space.ids, assignment))))
    if not math.isfinite(value):
        raise ValueError(f"objective of {problem.instance_id!r} returned {value}")
    return value


# --- JSON ---------------------------------------------------------------

def space_to_dict(space: SearchSpace) -> dict:
    out = []
    for v in space.variables:
        d: dict[str, Any] = {"id": v.id, "kind": v.kind}
        if v.kind == CATEGORICAL:
            d["categories"] = list(v.categories)
        else:
            d["lower"] = v.lower
            d["upper"] = v.upper
        if v.condition is not None:
            vals = v.condition.values
            d["condition"] = {"parent": v.condition.parent, "values": sorted(vals, key=repr)}
        out.append(d)
    return {"name": space.name, "variables": out}


def space_from_dict(data: Mapping) -> SearchSpace:
    try:
        variables = []
        for d in data["variables"]:
            cond = d.get("condition")
            kind = d["kind"]
            lower, upper = d.get("lower"), d.get("upper")
            if kind == INTEGER:
                lower = None if lower is None else int(lower)
                upper = None if upper is None else int(upper)
            elif lower is not None or upper is not None:
                lower = None if lower is None else float(lower)
                upper = None if upper is None else float(upper)
            variables.append(VariableSpec(
                id=str(d["id"]),
                kind=kind,
                lower=lower,
                upper=upper,
                categories=tuple(str(c) for c in d.get("categories", ())),
                condition=None if cond is None else Condition(cond["parent"], cond["values"]),
            ))
        return SearchSpace(tuple(variables), name=str(data.get("name", "space")))
    except (KeyError, TypeError) as exc:
        raise SpaceError(f"malformed space description: {exc!r}") from exc


def load_space(path) -> SearchSpace:
    with open(Path(path)) as fh:
        return check_space(space_from_dict(json.load(fh)))


def dump_space(space: SearchSpace, path) -> None:
    with open(Path(path), "w") as fh:
        json.dump(space_to_dict(space), fh, indent=2)
        fh.write("\n")
