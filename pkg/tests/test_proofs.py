import random

import pytest
import sympy
from hypothesis import given, settings

from nbox.formula import BOT, Bottom, Box, Neg, Or, Var, box_iter, implies, parse
from nbox.logic import LogicId
from nbox.proofs import (
    MP,
    AxiomA,
    Nec,
    ProofError,
    Ros,
    RosBox,
    Taut,
    axiom_instance_witness,
    check_proof,
    is_tautology,
    load_proof,
    make_proof,
    modal_atoms,
    not_box_bottom_proof,
    proof_from_json,
    proof_to_json,
)
from nbox.semantics import is_fully_accessible, valid

from conftest import formulas, random_model, table_pool

p = Var("p")


@pytest.mark.parametrize("text, expected", [
    ("[]p -> []p", True),
    ("[]p -> [][]p", False),
    ("([][]#f -> #f) -> ~[][]#f", True),
    ("p | ~p", True),
    ("[](p | ~p)", False),
    ("#t", True),
    ("#f", False),
])
def test_tautology_examples(text, expected):
    assert is_tautology(parse(text)) is expected


def _sympy_tautology(f):
    # independent route: hand the formula to sympy with fresh symbols per atom
    atoms = modal_atoms(f)
    syms = {a: sympy.Symbol(f"a{i}") for i, a in enumerate(atoms)}

    def conv(g):
        if isinstance(g, Bottom):
            return sympy.false
        if isinstance(g, Neg):
            return sympy.Not(conv(g.child))
        if isinstance(g, Or):
            return sympy.Or(conv(g.left), conv(g.right))
        return syms[g]

    return not sympy.satisfiable(sympy.Not(conv(f)))


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_tautology_agrees_with_sympy(f):
    assert len(modal_atoms(f)) <= 10
    assert is_tautology(f) == _sympy_tautology(f)
    g = Or(f, Neg(f))
    assert is_tautology(g) and _sympy_tautology(g)


@pytest.mark.parametrize("text, m, n, rho", [
    ("[][]#f -> #f", 0, 2, "#f"),
    ("[]p -> [][]p", 2, 1, "p"),
    ("[][][]p -> []p", 0, 2, "[]p"),
    ("[]p -> []p", 1, 1, "p"),
])
def test_axiom_witness(text, m, n, rho):
    assert axiom_instance_witness(parse(text), m, n) == parse(rho)


@pytest.mark.parametrize("text, m, n", [
    ("[]p -> p", 2, 1),
    ("[]p | [][]p", 2, 1),
    ("p -> [][]p", 2, 1),
])
def test_axiom_witness_absent(text, m, n):
    assert axiom_instance_witness(parse(text), m, n) is None


def test_derivation_of_not_box2_bottom():
    proof = make_proof(
        ("[][]#f -> #f", AxiomA()),
        ("([][]#f -> #f) -> ~[][]#f", Taut()),
        ("~[][]#f", MP(1, 2)),
    )
    assert check_proof(proof, LogicId(0, 2)) == parse("~[][]#f")
    assert not_box_bottom_proof(2) == proof.__class__(proof.lines, LogicId(0, 2))


def test_rosbox_extension():
    proof = not_box_bottom_proof(2, extra=1)
    assert len(proof.lines) == 4 and proof.lines[3].just == RosBox(3)
    assert check_proof(proof, LogicId(0, 2, rosbox=True)) == Neg(box_iter(3, BOT))
    with pytest.raises(ProofError, match="rule disabled") as info:
        check_proof(proof, LogicId(0, 2))
    assert info.value.line == 4


def test_nec_on_tautology():
    proof = make_proof(("p -> p", Taut()), ("[](p -> p)", Nec(1)))
    assert check_proof(proof, LogicId(1, 1)) == parse("[](p -> p)")


def test_ros_rule():
    proof = make_proof(("~#f", Taut()), ("~[]#f", Ros(2 - 1)))
    with pytest.raises(ProofError, match="rule disabled"):
        check_proof(proof, LogicId(1, 1))
    assert check_proof(proof, LogicId(1, 1, ros=True)) == parse("~[]#f")


@pytest.mark.parametrize("lines, line, needle", [
    ([("p", Taut())], 1, "not a tautology"),
    ([("[]p -> p", AxiomA())], 1, "not an instance"),
    ([("p -> p", Taut()), ("[]p", Nec(1))], 2, "shape mismatch"),
    ([("p -> p", Taut()), ("[](p -> p)", Nec(2))], 2, "bad index"),
    ([("p -> p", Taut()), ("[](p -> p)", Nec(0))], 2, "bad index"),
    ([("p -> p", Taut()), ("p", MP(1, 1))], 2, "shape mismatch"),
    ([("~[]p", Taut())], 1, "not a tautology"),
    ([("p | ~p", Taut()), ("~[][](p | ~p)", RosBox(1))], 2, "shape mismatch"),
])
def test_rejections(lines, line, needle):
    with pytest.raises(ProofError, match=needle) as info:
        check_proof(make_proof(*lines), LogicId(1, 1, rosbox=True))
    assert info.value.line == line


FIXTURES = [
    not_box_bottom_proof(2),
    not_box_bottom_proof(2, extra=1),
    not_box_bottom_proof(3, extra=2),
    make_proof(("p -> p", Taut()), ("[](p -> p)", Nec(1)), ("[][](p -> p)", Nec(2)), logic=LogicId(1, 1)),
    make_proof(("[]p -> [][]p", AxiomA()), logic=LogicId(2, 1)),
    make_proof(("[][]q -> []q", AxiomA()), ("[]([][]q -> []q)", Nec(1)), logic=LogicId(1, 2)),
]


@pytest.mark.parametrize("proof", FIXTURES)
def test_flag_monotonicity(proof):
    logic = proof.logic
    check_proof(proof, logic)
    check_proof(proof, LogicId(logic.m, logic.n, rosbox=True))


@pytest.mark.parametrize("proof", FIXTURES)
def test_soundness_cross_check(proof):
    # accepted theorems hold on every (m,n)-accessible model we can generate
    theorem = check_proof(proof)
    m, n = proof.logic.m, proof.logic.n
    rng = random.Random(hash(str(theorem)) & 0xFFFF)
    checked = 0
    for _ in range(300):
        model = random_model(rng, table_pool(theorem, max(m, n) + 1), density=0.8)
        if is_fully_accessible(model, m, n):
            checked += 1
            assert valid(model, theorem)
    assert checked >= 10


def test_json_roundtrip():
    proof = not_box_bottom_proof(2, extra=1)
    obj = proof_to_json(proof)
    assert obj["logic"] == {"m": 0, "n": 2, "rosbox": True, "ros": False}
    assert obj["lines"][2]["just"] == {"mp": [1, 2]}
    assert obj["lines"][3]["just"] == {"rosbox": 3}
    assert proof_from_json(obj) == proof
    assert load_proof('{"lines":[{"formula":"p|~p","just":"taut"}]}').logic is None


@pytest.mark.parametrize("bad", [
    {"lines": [{"formula": "p", "just": "axiom"}]},
    {"lines": [{"formula": "p", "just": {"mp": [1]}}]},
    {"lines": [{"just": "taut"}]},
    {"logic": {"m": "x", "n": 1}, "lines": []},
])
def test_json_rejects_malformed(bad):
    with pytest.raises(ValueError):
        proof_from_json(bad)


def test_implication_shape_is_structural():
    # MP matches the desugared form exactly; ~p | q is p -> q
    proof = make_proof(("p | ~p", Taut()), ("~(p | ~p) | (p | ~p)", Taut()), ("p | ~p", MP(1, 2)))
    check_proof(proof, LogicId(1, 1))
    assert implies(p, p) == Or(Neg(p), p)
    assert Box(p) != p
