"""Modal formulas over the core connectives: bottom, variables, negation,
disjunction and a single box.

Sugar (top, conjunction, implication, diamond) is expanded as soon as it is
built, so two formulas are the same formula exactly when they are
structurally equal.  Relations in models are keyed by that equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union


class Formula:
    """Base class of the five core constructors."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    def __repr__(self) -> str:
        return "Bottom()"


@dataclass(frozen=True, slots=True)
class Var(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Neg(Formula):
    child: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    child: Formula


BOT = Bottom()
TOP = Neg(BOT)

FormulaLike = Union[Formula, str]


def var(name: str) -> Var:
    return Var(name)


def neg(f: Formula) -> Neg:
    return Neg(f)


def disj(a: Formula, b: Formula) -> Or:
    return Or(a, b)


def conj(a: Formula, b: Formula) -> Formula:
    return Neg(Or(Neg(a), Neg(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Neg(a), b)


def diamond(f: Formula) -> Formula:
    return Neg(Box(Neg(f)))


def big_conj(fs: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is top."""
    out = None
    for f in fs:
        out = f if out is None else conj(out, f)
    return TOP if out is None else out


def box_iter(k: int, f: Formula) -> Formula:
    """Prefix ``k`` boxes to ``f``."""
    if k < 0:
        raise ValueError("box count must be non-negative")
    for _ in range(k):
        f = Box(f)
    return f


def leading_boxes(f: Formula) -> int:
    k = 0
    while isinstance(f, Box):
        f = f.child
        k += 1
    return k


def strip_boxes(f: Formula, k: int) -> Formula | None:
    """Remove exactly ``k`` leading boxes, or return None if there are fewer."""
    for _ in range(k):
        if not isinstance(f, Box):
            return None
        f = f.child
    return f


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Neg, Box)):
        return (f.child,)
    if isinstance(f, Or):
        return (f.left, f.right)
    return ()


def iter_sub(f: Formula) -> Iterator[Formula]:
    """Subformula occurrences in post-order (children before parents)."""
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if expanded:
            yield g
            continue
        stack.append((g, True))
        for c in reversed(children(g)):
            stack.append((c, False))


def sub(f: Formula) -> frozenset[Formula]:
    return frozenset(iter_sub(f))


def sub_ordered(f: Formula) -> list[Formula]:
    """Distinct subformulas, children before parents."""
    seen: dict[Formula, None] = {}
    for g in iter_sub(f):
        seen.setdefault(g, None)
    return list(seen)


def negg(f: Formula) -> Formula:
    """Strip one leading negation if present, otherwise add one."""
    return f.child if isinstance(f, Neg) else Neg(f)


def nsub(f: Formula) -> frozenset[Formula]:
    s = sub(f)
    return s | {negg(g) for g in s}


def variables(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in iter_sub(f) if isinstance(g, Var))


def generators(f: Formula) -> list[Formula]:
    """Variables and box formulas occurring in ``f``, in a fixed order.

    These are the propositional atoms of ``f``; every other subformula is a
    Boolean combination of them.
    """
    gens = {g for g in iter_sub(f) if isinstance(g, (Var, Box))}
    return sorted(gens, key=sort_key)


def relevance_closure(psi: Formula, m: int, n: int) -> frozenset[Formula]:
    """Formulas whose relations can matter when checking (m,n)-paths for psi.

    Adds ``[]^i rho`` for ``0 <= i < max(m, n)`` whenever ``[]^m rho`` is a
    subformula of ``psi``.
    """
    s = sub(psi)
    top = max(m, n)
    out = set(s)
    for rho in accessibility_targets(s, m):
        out.update(box_iter(i, rho) for i in range(top))
    return frozenset(out)


def accessibility_targets(gamma: Iterable[Formula], m: int) -> frozenset[Formula]:
    """All rho with ``[]^m rho`` in gamma."""
    out = set()
    for g in gamma:
        rho = strip_boxes(g, m)
        if rho is not None:
            out.add(rho)
    return frozenset(out)


def prop_value(f: Formula, assignment: Mapping[Formula, bool]) -> bool:
    """Truth value of ``f`` with variables and box formulas read off ``assignment``."""
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Neg):
        return not prop_value(f.child, assignment)
    if isinstance(f, Or):
        return prop_value(f.left, assignment) or prop_value(f.right, assignment)
    return assignment[f]


def depth(f: Formula) -> int:
    cs = children(f)
    return 0 if not cs else 1 + max(depth(c) for c in cs)


def size(f: Formula) -> int:
    return sum(1 for _ in iter_sub(f))


def sort_key(f: Formula) -> tuple[int, str]:
    return (size(f), to_text(f))


# ---------------------------------------------------------------------------
# Concrete syntax
#
# Precedence, tightest first: unary (~ [] <>), &, |, -> (right-assoc).
# & and | associate to the left.

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def to_text(f: Formula) -> str:
    """Render in the ASCII grammar using only the core connectives."""
    return _print(f, 0)


def _print(f: Formula, ctx: int) -> str:
    if isinstance(f, Bottom):
        return "#f"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Neg):
        return "~" + _print(f.child, _PREC_UNARY)
    if isinstance(f, Box):
        return "[]" + _print(f.child, _PREC_UNARY)
    if isinstance(f, Or):
        # left operand may itself be an Or; the right one needs parens
        s = f"{_print(f.left, _PREC_OR)} | {_print(f.right, _PREC_OR + 1)}"
        return f"({s})" if ctx > _PREC_OR else s
    raise TypeError(f"not a formula: {f!r}")


class ParseError(ValueError):
    """Syntax error at a byte offset into the UTF-8 input."""

    def __init__(self, offset: int, expected: Iterable[str], found: str):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        self.found = found
        super().__init__(
            f"syntax error at offset {offset}: expected one of "
            f"{', '.join(self.expected)}; found {found}"
        )


_SYMBOLS = [
    ("->", "->"), ("<>", "<>"), ("[]", "[]"), ("#f", "#f"), ("#t", "#t"),
    ("~", "~"), ("!", "~"), ("|", "|"), ("&", "&"), ("(", "("), (")", ")"),
    ("⊥", "#f"), ("⊤", "#t"), ("¬", "~"), ("∨", "|"), ("∧", "&"),
    ("→", "->"), ("□", "[]"), ("◇", "<>"),
]

_OPERAND_START = ("#f", "#t", "~", "[]", "<>", "(", "identifier")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return (kind, lexeme, byte_offset) triples ending with an 'end' token."""
    toks = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        offset = len(text[:i].encode("utf-8"))
        if c.isascii() and c.isalpha():
            j = i + 1
            while j < len(text) and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("identifier", text[i:j], offset))
            i = j
            continue
        for sym, kind in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append((kind, sym, offset))
                i += len(sym)
                break
        else:
            raise ParseError(offset, _OPERAND_START, repr(c))
    toks.append(("end", "", len(text.encode("utf-8"))))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> str:
        return self.toks[self.pos][0]

    def advance(self) -> tuple[str, str, int]:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: Iterable[str]) -> ParseError:
        kind, lexeme, offset = self.toks[self.pos]
        if kind == "end" and self.pos > 0:
            # point at the token left waiting for more input
            offset = self.toks[self.pos - 1][2]
            return ParseError(offset, expected, "end of input")
        return ParseError(offset, expected, repr(lexeme) if lexeme else "end of input")

    def parse(self) -> Formula:
        f = self.implication()
        if self.peek() != "end":
            raise self.fail(("&", "|", "->", "end of input"))
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.advance()
            return implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.advance()
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind = self.peek()
        if kind == "~":
            self.advance()
            return Neg(self.unary())
        if kind == "[]":
            self.advance()
            return Box(self.unary())
        if kind == "<>":
            self.advance()
            return diamond(self.unary())
        if kind == "#f":
            self.advance()
            return BOT
        if kind == "#t":
            self.advance()
            return TOP
        if kind == "identifier":
            return Var(self.advance()[1])
        if kind == "(":
            self.advance()
            f = self.implication()
            if self.peek() != ")":
                raise self.fail((")", "&", "|", "->"))
            self.advance()
            return f
        raise self.fail(_OPERAND_START)


def parse(text: str) -> Formula:
    """Parse the ASCII (or Unicode symbol) grammar into a core formula.

    >>> to_text(parse("[]p -> [][]p"))
    '~[]p | [][]p'
    """
    return _Parser(text).parse()


def as_formula(f: FormulaLike) -> Formula:
    return parse(f) if isinstance(f, str) else f


# ---------------------------------------------------------------------------
# JSON AST form: {"op": "bot"|"var"|"neg"|"or"|"box", "name"?, "args"?}

def to_json(f: Formula) -> dict:
    if isinstance(f, Bottom):
        return {"op": "bot"}
    if isinstance(f, Var):
        return {"op": "var", "name": f.name}
    if isinstance(f, Neg):
        return {"op": "neg", "args": [to_json(f.child)]}
    if isinstance(f, Box):
        return {"op": "box", "args": [to_json(f.child)]}
    if isinstance(f, Or):
        return {"op": "or", "args": [to_json(f.left), to_json(f.right)]}
    raise TypeError(f"not a formula: {f!r}")


def from_json(obj: dict) -> Formula:
    try:
        op = obj["op"]
        if op == "bot":
            return BOT
        if op == "var":
            name = obj["name"]
            if not isinstance(name, str) or not name:
                raise ValueError("variable name must be a nonempty string")
            return Var(name)
        args = [from_json(a) for a in obj["args"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed formula JSON: {obj!r}") from exc
    arity = {"neg": 1, "box": 1, "or": 2}.get(op)
    if arity is None or len(args) != arity:
        raise ValueError(f"malformed formula JSON: {obj!r}")
    if op == "neg":
        return Neg(args[0])
    if op == "box":
        return Box(args[0])
    return Or(args[0], args[1])


def all_formulas(max_depth: int, names: Iterable[str] = ("p",)) -> list[Formula]:
    """Every core formula of depth at most ``max_depth`` over the given variables."""
    out: list[Formula] = [BOT, *(Var(v) for v in names)]
    for _ in range(max_depth):
        seen = set(out)
        new = [g for f in out for g in (Neg(f), Box(f))]
        new += [Or(a, b) for a, b in itertools.product(out, repeat=2)]
        out += [g for g in dict.fromkeys(new) if g not in seen]
    return out


def random_formula(rng, max_depth: int, names: Iterable[str] = ("p", "q")) -> Formula:
    """Random core formula of depth at most ``max_depth``; ``rng`` is a ``random.Random``."""
    names = tuple(names)
    if max_depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.15:
            return BOT
        return Var(rng.choice(names))
    r = rng.random()
    if r < 0.3:
        return Neg(random_formula(rng, max_depth - 1, names))
    if r < 0.65:
        return Box(random_formula(rng, max_depth - 1, names))
    return Or(random_formula(rng, max_depth - 1, names), random_formula(rng, max_depth - 1, names))
