"""Built-in closed-form test problems.

``hier1``
    Two variables: ``X_cat`` in {a, b} and ``X_cont`` in [-5, 5], active
    only when ``X_cat == "b"``.  f = 1 for ``a`` and (X_cont / 5)**2 for ``b``.

``sphere``
    Two continuous variables in [-5, 5], one integer in [-5, 5] and three
    categoricals with labels c0, c1, c2.  A quadratic bowl around an
    instance-specific centre plus an additive offset per category.

``rugged``
    ``sphere`` plus a cosine term of amplitude 10 per numeric variable.

``sphere`` and ``rugged`` take an instance number (``"sphere:7"``) that
shifts the centre and permutes the category offsets.
"""

from __future__ import annotations

import math

import numpy as np

from .space import (
    CATEGORICAL,
    CONTINUOUS,
    INTEGER,
    Condition,
    Problem,
    SearchSpace,
    VariableSpec,
)

CATEGORY_OFFSET = 10.0
RUGGED_AMPLITUDE = 10.0


def hier1_space() -> SearchSpace:
    return SearchSpace(
        (
            VariableSpec("X_cat", CATEGORICAL, categories=("a", "b")),
            VariableSpec("X_cont", CONTINUOUS, -5.0, 5.0, condition=Condition("X_cat", {"b"})),
        ),
        name="hier1",
    )


def _hier1(x) -> float:
    if x["X_cat"] == "a":
        return 1.0
    return (x["X_cont"] / 5.0) ** 2


def hier1() -> Problem:
    return Problem(hier1_space(), _hier1, name="hier1")


def mixed_space(name: str) -> SearchSpace:
    labels = ("c0", "c1", "c2")
    return SearchSpace(
        (
            VariableSpec("x0", CONTINUOUS, -5.0, 5.0),
            VariableSpec("x1", CONTINUOUS, -5.0, 5.0),
            VariableSpec("z0", INTEGER, -5, 5),
            VariableSpec("k0", CATEGORICAL, categories=labels),
            VariableSpec("k1", CATEGORICAL, categories=labels),
            VariableSpec("k2", CATEGORICAL, categories=labels),
        ),
        name=name,
    )


class _MixedBowl:
    """Callable objective shared by the sphere and rugged families."""

    def __init__(self, space: SearchSpace, instance: int, amplitude: float):
        rng = np.random.default_rng([instance, 20231])
        self.numeric = [v.id for v in space.variables if not v.is_categorical]
        self.centre = {k: float(c) for k, c in zip(self.numeric, rng.uniform(-2.0, 2.0, len(self.numeric)))}
        self.offsets = {}
        for v in space.variables:
            if v.is_categorical:
                perm = rng.permutation(len(v.categories))
                self.offsets[v.id] = {c: CATEGORY_OFFSET * int(p) for c, p in zip(v.categories, perm)}
        self.amplitude = amplitude

    def __call__(self, x) -> float:
        total = 0.0
        for k in self.numeric:
            d = float(x[k]) - self.centre[k]
            total += d * d
            if self.amplitude:
                total += self.amplitude * (1.0 - math.cos(2.0 * math.pi * d))
        for k, table in self.offsets.items():
            total += table[x[k]]
        return total


def mixed_sphere(instance: int = 0) -> Problem:
    space = mixed_space("sphere")
    return Problem(space, _MixedBowl(space, instance, 0.0), name=f"sphere:{instance}")


def mixed_rugged(instance: int = 0) -> Problem:
    space = mixed_space("rugged")
    return Problem(space, _MixedBowl(space, instance, RUGGED_AMPLITUDE), name=f"rugged:{instance}")


BUILTINS = {
    "hier1": lambda instance: hier1(),
    "sphere": mixed_sphere,
    "rugged": mixed_rugged,
}


def get_problem(label: str) -> Problem:
    """Look up a built-in problem by ``name`` or ``name:instance``."""
    name, _, inst = label.partition(":")
    if name not in BUILTINS:
        raise KeyError(f"unknown built-in problem {name!r}; choose from {sorted(BUILTINS)}")
    if name == "hier1":
        if inst:
            raise KeyError("hier1 has no instances")
        return hier1()
    try:
        instance = int(inst) if inst else 0
    except ValueError:
        raise KeyError(f"bad instance number in {label!r}") from None
    return BUILTINS[name](instance)
