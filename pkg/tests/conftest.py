from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from nbox.formula import BOT, Box, Neg, Or, Var, box_iter, relevance_closure
from nbox.semantics import ExtensionalModel, Policy

NAMES = ("p", "q")

formulas = st.recursive(
    st.one_of(st.just(BOT), st.sampled_from(NAMES).map(Var)),
    lambda kids: st.one_of(
        kids.map(Neg),
        kids.map(Box),
        st.tuples(kids, kids).map(lambda t: Or(*t)),
    ),
    max_leaves=8,
)


def random_model(rng: random.Random, formulas_to_table, max_worlds: int = 4,
                 density: float | None = None, names=NAMES) -> ExtensionalModel:
    """Random finite model with a relation table over ``formulas_to_table``."""
    k = rng.randint(1, max_worlds)
    worlds = tuple("abcdefgh"[:k])
    dens = rng.random() if density is None else density
    rels = {}
    for f in formulas_to_table:
        if rng.random() < 0.85:
            rels[f] = [(x, y) for x in worlds for y in worlds if rng.random() < dens]
    default = rng.choice(list(Policy))
    valuation = {w: [p for p in names if rng.random() < 0.5] for w in worlds}
    return ExtensionalModel(worlds, rels, default, valuation)


def table_pool(f, k: int = 3):
    """Formulas whose relations matter for f and its box iterates up to k."""
    return sorted(relevance_closure(box_iter(k, f), 0, 0) | {box_iter(i, f) for i in range(k + 1)},
                  key=str)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def _report(label: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else ""))
        assert ok, f"{label}: {detail}"

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
