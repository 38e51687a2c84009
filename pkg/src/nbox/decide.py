"""Decision procedure for N+A_{m,n} with countermodel certificates.

A formula psi is a theorem iff it holds on every finite N-frame that is
(m,n)-accessible for the subformulas of psi.  When psi is not a theorem, the
canonical model over the consistent maximal subsets of NSub(psi) is such a
frame and falsifies psi.  Consistency is what we are trying to decide, so the
search runs over every nonempty set S of propositionally coherent maximal
sets ("world types") instead, builds the canonical relations over S and
accepts S only when the resulting model passes the accessibility check and
falsifies psi.  Any accepted S is a genuine countermodel, and the true
canonical world set is one of the candidates, so exhaustion proves psi.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .formula import (
    Box,
    Bottom,
    Formula,
    Neg,
    Or,
    Var,
    accessibility_targets,
    big_conj,
    box_iter,
    generators,
    nsub,
    prop_value,
    sort_key,
    sub,
    sub_ordered,
    to_text,
    variables,
)
from .logic import LogicId
from .semantics import (
    ExtensionalModel,
    Model,
    Policy,
    is_set_accessible,
    satisfies,
    set_accessibility_violation,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_GENERATORS = 4
DEFAULT_BUDGET_MS = 60_000
BRUTE_MAX_WORLDS = 2
BRUTE_MAX_RELATIONS = 4


class ConfigError(ValueError):
    """The requested logic is outside what the procedure decides."""


class ResourceLimitError(RuntimeError):
    pass


class FrameExtensionError(ValueError):
    def __init__(self, rho: Formula, pair: tuple[str, str], m: int, n: int):
        self.rho = rho
        self.pair = pair
        super().__init__(
            f"frame is not Sub(psi)-({m},{n})-accessible: {pair[0]} reaches {pair[1]} "
            f"by a {to_text(rho)}-path of length {m} but not of length {n}"
        )


@dataclass(frozen=True)
class WorldType:
    """A maximal, propositionally coherent subset of NSub(psi)."""

    index: int
    members: frozenset[Formula]

    @property
    def label(self) -> str:
        return f"t{self.index}"

    def __contains__(self, f: Formula) -> bool:
        return f in self.members


@dataclass(frozen=True)
class Provable:
    explored: int = 0
    status = "provable"

    def to_json(self) -> dict:
        return {"status": self.status}


@dataclass(frozen=True)
class Unprovable:
    model: ExtensionalModel
    world: str
    explored: int = 0
    status = "unprovable"

    def to_json(self) -> dict:
        from .semantics import model_to_json

        return {"status": self.status, "world": self.world, "model": model_to_json(self.model)}


@dataclass(frozen=True)
class ResourceLimit:
    explored: int
    reason: str = ""
    status = "resource_limit"

    def to_json(self) -> dict:
        return {"status": self.status, "explored": self.explored, "reason": self.reason}


DecisionResult = Union[Provable, Unprovable, ResourceLimit]


def world_types(psi: Formula, max_generators: int = DEFAULT_MAX_GENERATORS) -> list[WorldType]:
    """Enumerate the psi-maximal coherent subsets of NSub(psi).

    Each truth assignment to the generators (variables and box subformulas)
    fixes the value of every member of NSub(psi); the type is the set of
    members that come out true.  Distinct assignments give distinct types
    because the generators themselves belong to NSub(psi).
    """
    gens = generators(psi)
    if len(gens) > max_generators:
        raise ResourceLimitError(f"{len(gens)} generators exceeds the cap of {max_generators}")
    closure = sorted(nsub(psi), key=sort_key)
    out = []
    for bits in itertools.product((True, False), repeat=len(gens)):
        assignment = dict(zip(gens, bits))
        members = frozenset(r for r in closure if prop_value(r, assignment))
        out.append(WorldType(len(out), members))
    return out


def canonical_model(types: Iterable[WorldType], psi: Formula) -> ExtensionalModel:
    """Canonical relations over the given world types.

    ``X R_phi Y`` iff ``[]phi`` is not in X or phi is in Y.  Only formulas
    with ``[]phi`` in NSub(psi) can have ``[]phi`` in a type, so every other
    relation is total and is left to the default.
    """
    types = list(types)
    if not types:
        raise ValueError("canonical model needs at least one world type")
    rels = {}
    for g in nsub(psi):
        if isinstance(g, Box):
            phi = g.child
            rels[phi] = [
                (x.label, y.label) for x in types for y in types if g not in x or phi in y
            ]
    valuation = {x.label: [f.name for f in x.members if isinstance(f, Var)] for x in types}
    return ExtensionalModel(tuple(x.label for x in types), rels, Policy.TOTAL, valuation)


def check_logic(logic: LogicId) -> None:
    if logic.ros:
        raise ConfigError("the Ros rule is supported by the proof checker only")
    if not logic.rosbox and not logic.rosbox_admissible:
        raise ConfigError(
            f"NA_{{0,{logic.n}}} without RosBox is a proper sublogic of N+A_{{0,{logic.n}}} "
            "and is not decided here; pass rosbox=True"
        )


class _CandidateChecker:
    """Evaluate the canonical model over a subset of types, encoded as a bitmask."""

    def __init__(self, psi: Formula, types: Sequence[WorldType], m: int, n: int):
        self.psi = psi
        self.m, self.n = m, n
        self.full = (1 << len(types)) - 1
        closure = nsub(psi)
        self.has: dict[Formula, int] = {}
        for f in closure:
            self.has[f] = sum(1 << t.index for t in types if f in t.members)
        self.order = sub_ordered(psi)
        top = max(m, n)
        self.chains = []
        for rho in sorted(accessibility_targets(sub(psi), m), key=sort_key):
            # level i: which types contain []^i rho (0 when outside NSub)
            self.chains.append([self.has.get(box_iter(i, rho), 0) for i in range(top + 1)])

    def truth(self, s: int) -> dict[Formula, int]:
        has = self.has
        t: dict[Formula, int] = {}
        for g in self.order:
            if isinstance(g, Bottom):
                t[g] = 0
            elif isinstance(g, Var):
                t[g] = s & has[g]
            elif isinstance(g, Neg):
                t[g] = s & ~t[g.child]
            elif isinstance(g, Or):
                t[g] = t[g.left] | t[g.right]
            else:
                inner = t[g.child]
                boxed = has[g]
                v = 0
                if s & ~inner == 0:
                    v |= s & ~boxed
                if s & has[g.child] & ~inner == 0:
                    v |= s & boxed
                t[g] = v
        return t

    def _reach(self, s: int, chain: list[int], k: int):
        """Reach sets of length-k paths, as (value if x lacks []^k rho, value if x has it)."""
        outside, inside = s, s & chain[0]
        for j in range(2, k + 1):
            b = chain[j - 1]
            # a world holding []^j rho only steps to worlds holding []^(j-1) rho
            outside, inside = (
                (inside if s & b else 0) | (outside if s & ~b else 0),
                inside if s & b else 0,
            )
        return outside, inside

    def accessible(self, s: int) -> bool:
        m, n = self.m, self.n
        bits = [i for i in range(self.full.bit_length()) if s >> i & 1]
        for chain in self.chains:
            rm = self._reach(s, chain, m) if m else None
            rn = self._reach(s, chain, n) if n else None
            for x in bits:
                bx = 1 << x
                long_ = bx if rm is None else (rm[1] if chain[m] & bx else rm[0])
                short = bx if rn is None else (rn[1] if chain[n] & bx else rn[0])
                if long_ & ~short:
                    return False
        return True

    def falsifier(self, s: int) -> int | None:
        """Index of the first type in s where psi fails, if psi fails somewhere."""
        bad = s & ~self.truth(s)[self.psi]
        return (bad & -bad).bit_length() - 1 if bad else None


def _subsets_by_size(count: int):
    for size in range(count, 0, -1):
        for combo in itertools.combinations(range(count), size):
            yield sum(1 << i for i in combo)


def decide(
    logic: LogicId,
    psi: Formula,
    *,
    max_generators: int = DEFAULT_MAX_GENERATORS,
    budget_ms: int | None = DEFAULT_BUDGET_MS,
    max_subsets: int | None = None,
) -> DecisionResult:
    """Decide whether ``logic`` proves ``psi``.

    Subsets are visited largest first in a fixed order, so the certificate
    returned for a given input is deterministic.
    """
    check_logic(logic)
    try:
        types = world_types(psi, max_generators)
    except ResourceLimitError as exc:
        return ResourceLimit(0, str(exc))
    checker = _CandidateChecker(psi, types, logic.m, logic.n)
    deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000
    explored = 0
    for s in _subsets_by_size(len(types)):
        if max_subsets is not None and explored >= max_subsets:
            return ResourceLimit(explored, f"subset budget of {max_subsets} exhausted")
        if deadline is not None and explored % 256 == 0 and time.monotonic() > deadline:
            return ResourceLimit(explored, f"time budget of {budget_ms} ms exhausted")
        explored += 1
        bad = checker.falsifier(s)
        if bad is None or not checker.accessible(s):
            continue
        chosen = [t for t in types if s >> t.index & 1]
        model = canonical_model(chosen, psi)
        world = types[bad].label
        _verify_certificate(model, world, psi, logic)
        log.debug("countermodel for %s after %d candidates", to_text(psi), explored)
        return Unprovable(model, world, explored)
    return Provable(explored)


def _verify_certificate(model: ExtensionalModel, world: str, psi: Formula, logic: LogicId) -> None:
    if satisfies(model, world, psi) or not is_set_accessible(model, sub(psi), logic.m, logic.n):
        raise AssertionError(f"internal error: certificate for {to_text(psi)} does not re-verify")


def verify_certificate(model: Model, world: str, psi: Formula, m: int, n: int) -> bool:
    """Re-check an Unprovable certificate: psi fails at ``world`` and the frame is
    (m,n)-accessible for the subformulas of psi."""
    return not satisfies(model, world, psi) and is_set_accessible(model, sub(psi), m, n)


def extend_frame(model: Model, psi: Formula, m: int, n: int) -> ExtensionalModel:
    """Turn a Sub(psi)-(m,n)-accessible model into an (m,n)-accessible one.

    Relations for ``phi`` with ``[]phi`` in Sub(psi) are kept, so psi keeps its
    truth values.  A subformula whose box is not a subformula gets the total
    relation when n > m and the empty one when m > n; everything else gets
    the identity.
    """
    bad = set_accessibility_violation(model, sub(psi), m, n)
    if bad is not None:
        raise FrameExtensionError(bad[0], bad[1], m, n)
    s = sub(psi)
    worlds = model.worlds
    rels = {}
    for phi in s:
        if Box(phi) in s:
            rels[phi] = [(x, y) for x in worlds for y in model.successors(x, phi)]
        elif n > m:
            rels[phi] = [(x, y) for x in worlds for y in worlds]
        elif m > n:
            rels[phi] = []
    if isinstance(model, ExtensionalModel):
        valuation = model.valuation
    else:
        names = sorted(variables(psi))
        valuation = {w: [p for p in names if model.holds_var(w, p)] for w in worlds}
    return ExtensionalModel(worlds, rels, Policy.IDENTITY, valuation)


def relation_indices(psi: Formula, m: int, n: int) -> list[Formula]:
    """Formulas whose relations can affect psi or its (m,n)-path checks."""
    s = sub(psi)
    idx = {g.child for g in s if isinstance(g, Box)}
    for rho in accessibility_targets(s, m):
        idx.update(box_iter(i, rho) for i in range(max(m, n)))
    return sorted(idx, key=sort_key)


def brute_force_countermodel(
    logic: LogicId, psi: Formula, max_worlds: int = BRUTE_MAX_WORLDS
) -> tuple[ExtensionalModel, str] | None:
    """Exhaustive search for a small Sub(psi)-(m,n)-accessible countermodel.

    Every relation table over :func:`relation_indices` is tried on 1..max_worlds
    worlds with the identity relation for all other formulas, together with
    every valuation of the variables of psi.  Meant as an independent oracle
    for :func:`decide` on tiny inputs.
    """
    if logic.ros:
        raise ConfigError("the Ros rule is supported by the proof checker only")
    if max_worlds > BRUTE_MAX_WORLDS:
        raise ResourceLimitError(f"max_worlds is capped at {BRUTE_MAX_WORLDS}")
    m, n = logic.m, logic.n
    idx = relation_indices(psi, m, n)
    if len(idx) > BRUTE_MAX_RELATIONS:
        raise ResourceLimitError(f"{len(idx)} relations exceeds the cap of {BRUTE_MAX_RELATIONS}")
    names = sorted(variables(psi))
    order = sub_ordered(psi)
    targets = sorted(accessibility_targets(sub(psi), m), key=sort_key)
    for k in range(1, max_worlds + 1):
        found = _brute_force_k(k, psi, order, idx, names, targets, m, n)
        if found is not None:
            return found
    return None


def _brute_force_k(k, psi, order, idx, names, targets, m, n):
    worlds = tuple(f"w{i}" for i in range(k))
    # each relation is a tuple of successor bitmasks, one per world
    all_rels = list(itertools.product(range(1 << k), repeat=k))
    nv = len(names)
    nvals = 1 << (k * nv)
    every = (1 << nvals) - 1
    # var_mask[w][p]: bit v set iff valuation number v makes p true at w
    var_mask = [[sum(1 << v for v in range(nvals) if v >> (w * nv + i) & 1) for i in range(nv)]
                for w in range(k)]
    pos = {p: i for i, p in enumerate(names)}
    ident = tuple(1 << w for w in range(k))
    for choice in itertools.product(all_rels, repeat=len(idx)):
        table = dict(zip(idx, choice))
        if not _brute_accessible(table, ident, targets, m, n, k):
            continue
        truth: dict[Formula, list[int]] = {}
        for g in order:
            if isinstance(g, Bottom):
                truth[g] = [0] * k
            elif isinstance(g, Var):
                truth[g] = [var_mask[w][pos[g.name]] for w in range(k)]
            elif isinstance(g, Neg):
                truth[g] = [every & ~t for t in truth[g.child]]
            elif isinstance(g, Or):
                truth[g] = [a | b for a, b in zip(truth[g.left], truth[g.right])]
            else:
                rel = table.get(g.child, ident)
                inner = truth[g.child]
                row = []
                for w in range(k):
                    acc = every
                    for y in range(k):
                        if rel[w] >> y & 1:
                            acc &= inner[y]
                    row.append(acc)
                truth[g] = row
        for w in range(k):
            bad = every & ~truth[psi][w]
            if bad:
                v = (bad & -bad).bit_length() - 1
                valuation = {worlds[x]: [p for i, p in enumerate(names) if v >> (x * nv + i) & 1]
                             for x in range(k)}
                rels = {f: [(worlds[x], worlds[y]) for x in range(k) for y in range(k) if r[x] >> y & 1]
                        for f, r in table.items()}
                return ExtensionalModel(worlds, rels, Policy.IDENTITY, valuation), worlds[w]
    return None


def _brute_accessible(table, ident, targets, m, n, k) -> bool:
    for rho in targets:
        reach = {}
        cur = [1 << x for x in range(k)]
        reach[0] = cur
        for j in range(1, max(m, n) + 1):
            rel = table.get(box_iter(j - 1, rho), ident)
            prev = cur
            cur = []
            for x in range(k):
                acc = 0
                for w in range(k):
                    if rel[x] >> w & 1:
                        acc |= prev[w]
                cur.append(acc)
            reach[j] = cur
        if any(reach[m][x] & ~reach[n][x] for x in range(k)):
            return False
    return True


def consistent_types(psi: Formula, logic: LogicId, **kw) -> list[WorldType]:
    """World types X whose conjunction is consistent, i.e. ``~/\\X`` is unprovable."""
    out = []
    for t in world_types(psi, kw.get("max_generators", DEFAULT_MAX_GENERATORS)):
        res = decide(logic, Neg(big_conj(sorted(t.members, key=sort_key))), **kw)
        if isinstance(res, ResourceLimit):
            raise ResourceLimitError(f"deciding consistency of {t.label}: {res.reason}")
        if isinstance(res, Unprovable):
            out.append(t)
    return out


def truth_lemma_check(psi: Formula, logic: LogicId, **kw) -> bool:
    """Build the canonical model on the consistent types and compare membership
    with satisfaction for every member of NSub(psi) at every world."""
    worlds = consistent_types(psi, logic, **kw)
    model = canonical_model(worlds, psi)
    closure = sorted(nsub(psi), key=sort_key)
    for x in worlds:
        for rho in closure:
            if satisfies(model, x.label, rho) != (rho in x.members):
                log.info("truth lemma fails at %s for %s", x.label, to_text(rho))
                return False
    return True


__all__ = [
    "ConfigError", "DecisionResult", "FrameExtensionError", "Provable", "ResourceLimit",
    "ResourceLimitError", "Unprovable", "WorldType", "brute_force_countermodel",
    "canonical_model", "check_logic", "consistent_types", "decide", "extend_frame",
    "relation_indices", "truth_lemma_check", "verify_certificate", "world_types",
]

