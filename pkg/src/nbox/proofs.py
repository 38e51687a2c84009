"""Hilbert-style proofs and their checker.

Axioms are propositional tautologies (box formulas treated as atoms) and
instances of ``[]^n rho -> []^m rho``.  Rules are modus ponens, necessitation,
and, when the logic enables them, ``~[]phi / ~[][]phi`` (RosBox) and
``~phi / ~[]phi`` (Ros).  Line indices are 1-based throughout, matching the
JSON wire format.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Union

from .formula import (
    Bottom,
    Box,
    Formula,
    Neg,
    Or,
    Var,
    box_iter,
    parse,
    prop_value,
    strip_boxes,
    to_text,
)
from .logic import LogicId


@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class AxiomA:
    pass


@dataclass(frozen=True)
class MP:
    """From line ``i`` (phi) and line ``j`` (phi -> current)."""

    i: int
    j: int


@dataclass(frozen=True)
class Nec:
    i: int


@dataclass(frozen=True)
class RosBox:
    i: int


@dataclass(frozen=True)
class Ros:
    i: int


Justification = Union[Taut, AxiomA, MP, Nec, RosBox, Ros]


@dataclass(frozen=True)
class Line:
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class Proof:
    lines: tuple[Line, ...]
    logic: LogicId | None = None

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula


class ProofError(Exception):
    """A proof line fails a side condition."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


def modal_atoms(f: Formula) -> list[Formula]:
    """Maximal subformulas that are variables or box formulas."""
    atoms: dict[Formula, None] = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Var, Box)):
            atoms.setdefault(g, None)
        elif isinstance(g, Neg):
            stack.append(g.child)
        elif isinstance(g, Or):
            stack.append(g.right)
            stack.append(g.left)
    return list(atoms)


def is_tautology(f: Formula) -> bool:
    """Truth-table check with variables and box formulas as atoms."""
    atoms = modal_atoms(f)
    for bits in itertools.product((False, True), repeat=len(atoms)):
        if not prop_value(f, dict(zip(atoms, bits))):
            return False
    return True


def axiom_instance_witness(f: Formula, m: int, n: int) -> Formula | None:
    """The rho with ``f == []^n rho -> []^m rho``, if there is one.

    Stripping n boxes from the antecedent determines rho, so it is unique.
    """
    if not (isinstance(f, Or) and isinstance(f.left, Neg)):
        return None
    rho = strip_boxes(f.left.child, n)
    if rho is None or box_iter(m, rho) != f.right:
        return None
    return rho


def _premise(proof: Proof, at: int, ref: int) -> Formula:
    if not isinstance(ref, int) or isinstance(ref, bool) or not 1 <= ref < at:
        raise ProofError(at, f"bad index {ref!r}: must refer to an earlier line")
    return proof.lines[ref - 1].formula


def check_line(proof: Proof, at: int, logic: LogicId) -> None:
    line = proof.lines[at - 1]
    f, just = line.formula, line.just
    if isinstance(just, Taut):
        if not is_tautology(f):
            raise ProofError(at, f"not a tautology: {to_text(f)}")
    elif isinstance(just, AxiomA):
        if axiom_instance_witness(f, logic.m, logic.n) is None:
            raise ProofError(at, f"not an instance of []^{logic.n}rho -> []^{logic.m}rho: {to_text(f)}")
    elif isinstance(just, MP):
        a = _premise(proof, at, just.i)
        imp = _premise(proof, at, just.j)
        if imp != Or(Neg(a), f):
            raise ProofError(at, f"shape mismatch: line {just.j} is not line {just.i} -> {to_text(f)}")
    elif isinstance(just, Nec):
        a = _premise(proof, at, just.i)
        if f != Box(a):
            raise ProofError(at, f"shape mismatch: expected []({to_text(a)})")
    elif isinstance(just, RosBox):
        if not logic.rosbox:
            raise ProofError(at, f"rule disabled: RosBox is not a rule of {logic.name}")
        a = _premise(proof, at, just.i)
        if not (isinstance(a, Neg) and isinstance(a.child, Box)):
            raise ProofError(at, f"shape mismatch: line {just.i} is not of the form ~[]phi")
        if f != Neg(Box(a.child)):
            raise ProofError(at, "shape mismatch: expected ~[][]phi")
    elif isinstance(just, Ros):
        if not logic.ros:
            raise ProofError(at, f"rule disabled: Ros is not a rule of {logic.name}")
        a = _premise(proof, at, just.i)
        if not isinstance(a, Neg):
            raise ProofError(at, f"shape mismatch: line {just.i} is not of the form ~phi")
        if f != Neg(Box(a.child)):
            raise ProofError(at, "shape mismatch: expected ~[]phi")
    else:
        raise ProofError(at, f"unknown justification {just!r}")


def check_proof(proof: Proof, logic: LogicId | None = None) -> Formula:
    """Check every line; return the proved formula (the last line).

    Raises :class:`ProofError` for the first line that fails.
    """
    logic = logic or proof.logic
    if logic is None:
        raise ValueError("no logic given")
    if not proof.lines:
        raise ProofError(0, "empty proof")
    for at in range(1, len(proof.lines) + 1):
        check_line(proof, at, logic)
    return proof.conclusion


# ---------------------------------------------------------------------------
# JSON

_SIMPLE = {"taut": Taut(), "axA": AxiomA()}
_UNARY = {"nec": Nec, "rosbox": RosBox, "ros": Ros}


def just_from_json(obj) -> Justification:
    if isinstance(obj, str):
        if obj in _SIMPLE:
            return _SIMPLE[obj]
        raise ValueError(f"unknown justification {obj!r}")
    if isinstance(obj, dict) and len(obj) == 1:
        (key, arg), = obj.items()
        if key == "mp" and isinstance(arg, list) and len(arg) == 2:
            return MP(*arg)
        if key in _UNARY:
            return _UNARY[key](arg)
    raise ValueError(f"unknown justification {obj!r}")


def just_to_json(just: Justification):
    if isinstance(just, Taut):
        return "taut"
    if isinstance(just, AxiomA):
        return "axA"
    if isinstance(just, MP):
        return {"mp": [just.i, just.j]}
    for key, cls in _UNARY.items():
        if isinstance(just, cls):
            return {key: just.i}
    raise TypeError(just)


def proof_from_json(obj: dict) -> Proof:
    try:
        logic = LogicId.from_json(obj["logic"]) if "logic" in obj else None
        lines = tuple(Line(parse(l["formula"]), just_from_json(l["just"])) for l in obj["lines"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed proof JSON: {exc}") from exc
    return Proof(lines, logic)


def proof_to_json(proof: Proof) -> dict:
    out = {"lines": [{"formula": to_text(l.formula), "just": just_to_json(l.just)} for l in proof.lines]}
    if proof.logic is not None:
        out = {"logic": proof.logic.to_json(), **out}
    return out


def load_proof(text: str) -> Proof:
    return proof_from_json(json.loads(text))


def make_proof(*lines: tuple[str | Formula, Justification], logic: LogicId | None = None) -> Proof:
    """Build a proof from (formula, justification) pairs; formulas may be text."""
    return Proof(tuple(Line(parse(f) if isinstance(f, str) else f, j) for f, j in lines), logic)


def not_box_bottom_proof(n: int, extra: int = 0) -> Proof:
    """Derive ``~[]^n #f`` from the axiom ``[]^n #f -> #f``, then apply RosBox ``extra`` times."""
    bn = box_iter(n, Bottom())
    ax = Or(Neg(bn), Bottom())
    lines = [
        Line(ax, AxiomA()),
        Line(Or(Neg(ax), Neg(bn)), Taut()),
        Line(Neg(bn), MP(1, 2)),
    ]
    for k in range(extra):
        lines.append(Line(Neg(box_iter(n + k + 1, Bottom())), RosBox(len(lines))))
    return Proof(tuple(lines), LogicId(0, n, rosbox=extra > 0))

