"""N-models: one accessibility relation per formula, and satisfaction over them.

A box formula ``[]f`` is evaluated along the relation indexed by ``f``.
Finite models come in two flavours:

* :class:`ExtensionalModel` lists relations for finitely many formulas and
  gives every other formula the same default relation (empty, total or the
  identity).
* :class:`IntensionalModel` decides ``x R_f y`` with a function, for models
  whose relation family is defined by recursion on formulas.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .formula import (
    Bottom,
    Box,
    Formula,
    Neg,
    Or,
    Var,
    accessibility_targets,
    box_iter,
    parse,
    sort_key,
    strip_boxes,
    sub_ordered,
    to_text,
)

Pair = tuple[str, str]


class ModelError(ValueError):
    pass


class Policy(str, enum.Enum):
    EMPTY = "empty"
    TOTAL = "total"
    IDENTITY = "identity"


class Model:
    """Common interface used by the checker."""

    worlds: tuple[str, ...]

    def successors(self, w: str, f: Formula) -> frozenset[str]:
        raise NotImplementedError

    def holds_var(self, w: str, name: str) -> bool:
        raise NotImplementedError

    def related(self, x: str, f: Formula, y: str) -> bool:
        return y in self.successors(x, f)

    def check_world(self, w: str) -> None:
        if w not in self._world_set:
            raise ModelError(f"unknown world {w!r}")

    @property
    def _world_set(self) -> frozenset[str]:
        return frozenset(self.worlds)


def _policy_successors(policy: Policy, w: str, worlds: tuple[str, ...]) -> frozenset[str]:
    if policy is Policy.TOTAL:
        return frozenset(worlds)
    if policy is Policy.IDENTITY:
        return frozenset((w,))
    return frozenset()


@dataclass(frozen=True)
class ExtensionalModel(Model):
    worlds: tuple[str, ...]
    relations: Mapping[Formula, frozenset[Pair]] = field(default_factory=dict)
    default: Policy = Policy.EMPTY
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict)
    _succ: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        worlds = tuple(self.worlds)
        if not worlds:
            raise ModelError("a model needs at least one world")
        if len(set(worlds)) != len(worlds):
            raise ModelError("duplicate world identifiers")
        ws = frozenset(worlds)
        rels = {}
        for f, pairs in self.relations.items():
            pairs = frozenset((x, y) for x, y in pairs)
            for x, y in pairs:
                if x not in ws or y not in ws:
                    raise ModelError(f"relation for {to_text(f)} mentions unknown world in {(x, y)}")
            rels[f] = pairs
        val = {}
        for w, names in self.valuation.items():
            if w not in ws:
                raise ModelError(f"valuation mentions unknown world {w!r}")
            names = frozenset(names)
            if names:
                val[w] = names
        succ = {}
        for f, pairs in rels.items():
            table = {w: set() for w in worlds}
            for x, y in pairs:
                table[x].add(y)
            succ[f] = {w: frozenset(s) for w, s in table.items()}
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "default", Policy(self.default))
        object.__setattr__(self, "valuation", val)
        object.__setattr__(self, "_succ", succ)

    def successors(self, w: str, f: Formula) -> frozenset[str]:
        table = self._succ.get(f)
        if table is None:
            return _policy_successors(self.default, w, self.worlds)
        return table[w]

    def holds_var(self, w: str, name: str) -> bool:
        return name in self.valuation.get(w, ())

    def relation(self, f: Formula) -> frozenset[Pair]:
        """The full relation indexed by ``f`` (table entry or default)."""
        if f in self.relations:
            return self.relations[f]
        return frozenset((x, y) for x in self.worlds for y in self.successors(x, f))

    def with_relations(self, updates: Mapping[Formula, Iterable[Pair]]) -> "ExtensionalModel":
        rels = dict(self.relations)
        rels.update({f: frozenset(p) for f, p in updates.items()})
        return ExtensionalModel(self.worlds, rels, self.default, self.valuation)


class IntensionalModel(Model):
    """Relations and valuation given by total, terminating predicates.

    Every formula asked about is remembered in :attr:`queried`, so the finite
    part of the model that a computation touched can be exported.
    """

    def __init__(
        self,
        worlds: Iterable[str],
        rel: Callable[[str, Formula, str], bool],
        valuation: Callable[[str, str], bool],
        name: str = "",
    ):
        self.worlds = tuple(worlds)
        if not self.worlds:
            raise ModelError("a model needs at least one world")
        self.rel = rel
        self.valuation = valuation
        self.name = name
        self.queried: dict[Formula, None] = {}
        self._cache: dict[tuple[str, Formula], frozenset[str]] = {}

    def successors(self, w: str, f: Formula) -> frozenset[str]:
        key = (w, f)
        hit = self._cache.get(key)
        if hit is None:
            hit = frozenset(y for y in self.worlds if self.rel(w, f, y))
            self._cache[key] = hit
            self.queried.setdefault(f, None)
        return hit

    def holds_var(self, w: str, name: str) -> bool:
        return bool(self.valuation(w, name))

    def fragment(self, formulas: Iterable[Formula] | None = None,
                 names: Iterable[str] = ()) -> ExtensionalModel:
        """Materialize the relations for ``formulas`` (default: all queried)."""
        fs = list(self.queried) if formulas is None else list(formulas)
        rels = {f: [(x, y) for x in self.worlds for y in self.successors(x, f)] for f in fs}
        val = {w: [p for p in names if self.holds_var(w, p)] for w in self.worlds}
        return ExtensionalModel(self.worlds, rels, Policy.EMPTY, val)

    def __repr__(self) -> str:
        return f"IntensionalModel({self.name or 'anonymous'}, worlds={self.worlds})"


# ---------------------------------------------------------------------------
# Satisfaction

def truth_set(model: Model, f: Formula) -> frozenset[str]:
    """All worlds of ``model`` where ``f`` holds."""
    worlds = frozenset(model.worlds)
    memo: dict[Formula, frozenset[str]] = {}
    for g in sub_ordered(f):
        if isinstance(g, Bottom):
            memo[g] = frozenset()
        elif isinstance(g, Var):
            memo[g] = frozenset(w for w in model.worlds if model.holds_var(w, g.name))
        elif isinstance(g, Neg):
            memo[g] = worlds - memo[g.child]
        elif isinstance(g, Or):
            memo[g] = memo[g.left] | memo[g.right]
        elif isinstance(g, Box):
            inner = memo[g.child]
            memo[g] = frozenset(w for w in model.worlds if model.successors(w, g.child) <= inner)
        else:
            raise TypeError(f"not a formula: {g!r}")
    return memo[f]


def satisfies(model: Model, w: str, f: Formula) -> bool:
    model.check_world(w)
    return w in truth_set(model, f)


def valid(model: Model, f: Formula) -> bool:
    return len(truth_set(model, f)) == len(model.worlds)


def falsifying_worlds(model: Model, f: Formula) -> list[str]:
    t = truth_set(model, f)
    return [w for w in model.worlds if w not in t]


# ---------------------------------------------------------------------------
# Paths and frame properties

def path_image(model: Model, f: Formula, k: int) -> dict[str, frozenset[str]]:
    """Map each world x to the worlds reachable from x by an f-path of length k.

    The first step of a length-k path follows the relation for ``[]^(k-1) f``,
    the last one the relation for ``f``.
    """
    image = {w: frozenset((w,)) for w in model.worlds}
    for j in range(1, k + 1):
        step = box_iter(j - 1, f)
        prev = image
        image = {}
        for x in model.worlds:
            out: set[str] = set()
            for w in model.successors(x, step):
                out |= prev[w]
            image[x] = frozenset(out)
    return image


def path_relation(model: Model, f: Formula, k: int) -> frozenset[Pair]:
    return frozenset((x, y) for x, ys in path_image(model, f, k).items() for y in ys)


def path_rel(model: Model, f: Formula, k: int, x: str, y: str) -> bool:
    model.check_world(x)
    model.check_world(y)
    return y in path_image(model, f, k)[x]


def is_serial(model: Model, f: Formula) -> bool:
    return all(model.successors(w, f) for w in model.worlds)


def is_transitive(model: Model, f: Formula) -> bool:
    """x R_[]f y and y R_f z imply x R_f z."""
    bf = Box(f)
    for x in model.worlds:
        direct = model.successors(x, f)
        for y in model.successors(x, bf):
            if not model.successors(y, f) <= direct:
                return False
    return True


def accessibility_violation(model: Model, f: Formula, m: int, n: int) -> Pair | None:
    """A pair joined by an f-path of length m but none of length n, if any."""
    long_ = path_image(model, f, m)
    short = path_image(model, f, n)
    for x in model.worlds:
        missing = long_[x] - short[x]
        if missing:
            return (x, min(missing))
    return None


def is_accessible(model: Model, f: Formula, m: int, n: int) -> bool:
    return accessibility_violation(model, f, m, n) is None


def is_set_accessible(model: Model, gamma: Iterable[Formula], m: int, n: int) -> bool:
    """(m,n)-accessibility for every rho with ``[]^m rho`` in gamma."""
    return all(is_accessible(model, rho, m, n) for rho in accessibility_targets(gamma, m))


def set_accessibility_violation(model: Model, gamma: Iterable[Formula], m: int, n: int):
    """First (rho, (x, y)) witnessing failure of set accessibility, else None."""
    for rho in sorted(accessibility_targets(gamma, m), key=sort_key):
        bad = accessibility_violation(model, rho, m, n)
        if bad is not None:
            return rho, bad
    return None


def tail_accessible(policy: Policy, m: int, n: int, num_worlds: int) -> bool:
    """Whether a frame giving *every* formula the ``policy`` relation is (m,n)-accessible.

    Path relations of length k >= 1 are then empty, total or the identity,
    and length 0 is always the identity.
    """
    policy = Policy(policy)
    if policy is Policy.IDENTITY:
        return True
    if policy is Policy.EMPTY:
        return m >= 1 or n == 0
    return n >= 1 or m == 0 or num_worlds == 1


def is_fully_accessible(model: ExtensionalModel, m: int, n: int) -> bool:
    """(m,n)-accessibility for every formula, not just a finite set.

    A formula whose paths of length up to max(m, n) avoid the table only sees
    the default relation, which :func:`tail_accessible` settles; the finitely
    many other formulas are checked one by one.
    """
    top = max(m, n)
    if top == 0:
        return True
    if not tail_accessible(model.default, m, n, len(model.worlds)):
        return False
    targets = set()
    for f in model.relations:
        for i in range(top):
            rho = strip_boxes(f, i)
            if rho is None:
                break
            targets.add(rho)
    return all(is_accessible(model, rho, m, n) for rho in targets)


def box_k_semantics_check(model: Model, w: str, f: Formula, k: int) -> bool:
    """Compare ``w |= []^k f`` with "f holds at every end of an f-path of length k from w"."""
    model.check_world(w)
    lhs = satisfies(model, w, box_iter(k, f))
    t = truth_set(model, f)
    rhs = path_image(model, f, k)[w] <= t
    return lhs == rhs


# ---------------------------------------------------------------------------
# Serialization

def model_to_json(model: ExtensionalModel, fragment_of: str | None = None) -> dict:
    rels = []
    for f in sorted(model.relations, key=sort_key):
        pairs = sorted(model.relations[f], key=lambda p: (model.worlds.index(p[0]), model.worlds.index(p[1])))
        rels.append({"formula": to_text(f), "pairs": [list(p) for p in pairs]})
    out = {
        "worlds": list(model.worlds),
        "default": model.default.value,
        "relations": rels,
        "valuation": {w: sorted(model.valuation[w]) for w in model.worlds if w in model.valuation},
    }
    if fragment_of:
        out["fragment_of"] = fragment_of
    return out


def model_from_json(obj: dict) -> ExtensionalModel:
    try:
        worlds = obj["worlds"]
        if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
            raise ModelError("worlds must be a list of strings")
        default = Policy(obj.get("default", "empty"))
        rels: dict[Formula, set[Pair]] = {}
        for entry in obj.get("relations", []):
            f = parse(entry["formula"])
            pairs = rels.setdefault(f, set())
            for pair in entry["pairs"]:
                x, y = pair
                pairs.add((str(x), str(y)))
        valuation = {str(w): frozenset(map(str, names)) for w, names in obj.get("valuation", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"malformed model JSON: {exc}") from exc
    return ExtensionalModel(tuple(worlds), rels, default, valuation)


def dump_model(model: ExtensionalModel, **kw) -> str:
    return json.dumps(model_to_json(model, **kw), indent=2)


def load_model(text: str) -> ExtensionalModel:
    return model_from_json(json.loads(text))


def to_dot(model: ExtensionalModel) -> str:
    """One digraph per tabulated relation, edges labelled with the formula."""
    chunks = []
    for i, f in enumerate(sorted(model.relations, key=sort_key)):
        label = to_text(f).replace('"', '\\"')
        lines = [f'digraph R{i} {{', f'  label="R[{label}]";']
        for w in model.worlds:
            props = ",".join(sorted(model.valuation.get(w, ())))
            lines.append(f'  "{w}" [label="{w}\\n{{{props}}}"];')
        for x, y in sorted(model.relations[f]):
            lines.append(f'  "{x}" -> "{y}" [label="{label}"];')
        lines.append("}")
        chunks.append("\n".join(lines))
    chunks.append(f"// default relation for every other formula: {model.default.value}")
    return "\n".join(chunks) + "\n"


def all_relations(worlds: tuple[str, ...]) -> list[frozenset[Pair]]:
    """Every binary relation on ``worlds`` (2^(|W|^2) of them)."""
    pairs = list(itertools.product(worlds, repeat=2))
    return [frozenset(p for p, bit in zip(pairs, bits) if bit)
            for bits in itertools.product((False, True), repeat=len(pairs))]
