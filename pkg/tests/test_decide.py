import itertools
import json
import random

import pytest

from nbox.decide import (
    ConfigError,
    FrameExtensionError,
    Provable,
    ResourceLimit,
    ResourceLimitError,
    Unprovable,
    _CandidateChecker,
    brute_force_countermodel,
    canonical_model,
    decide,
    extend_frame,
    relation_indices,
    truth_lemma_check,
    verify_certificate,
    world_types,
)
from nbox.formula import BOT, Box, Neg, Or, Var, box_iter, implies, negg, nsub, parse, sub
from nbox.logic import N, N4, LogicId
from nbox.semantics import (
    ExtensionalModel,
    Policy,
    is_fully_accessible,
    is_set_accessible,
    model_from_json,
    satisfies,
    truth_set,
    valid,
)

from conftest import random_model, table_pool

p, q = Var("p"), Var("q")


def _maximal_coherent_by_brute_force(psi):
    # subsets of NSub(psi) that pick exactly one of each rho / negg(rho) and
    # respect the boolean connectives; checked member by member
    closure = sorted(nsub(psi), key=str)
    pairs = sorted({frozenset((r, negg(r))) for r in closure}, key=lambda s: sorted(map(str, s)))
    found = set()
    for picks in itertools.product(*[sorted(pr, key=str) for pr in pairs]):
        x = set(picks)
        ok = BOT not in x
        for r in closure:
            if isinstance(r, Neg) and r.child in closure:
                ok &= (r in x) != (r.child in x)
            if isinstance(r, Or):
                ok &= (r in x) == (r.left in x or r.right in x)
        if ok:
            found.add(frozenset(x))
    return found


@pytest.mark.parametrize("text", ["p", "[]p", "p | ~p", "[]p -> p", "[](p | q) -> []p", "~[][]#f"])
def test_world_types_match_brute_force(text):
    psi = parse(text)
    assert {t.members for t in world_types(psi)} == _maximal_coherent_by_brute_force(psi)


def test_world_type_counts():
    assert len(world_types(parse("[]p"))) == 4
    assert len(world_types(parse("p | ~p"))) == 2
    with pytest.raises(ResourceLimitError):
        world_types(parse("[]p | []q | [][]p | r"))


def test_canonical_model_examples():
    psi = Box(p)
    types = world_types(psi)
    m = canonical_model(types, psi)
    assert m.default is Policy.TOTAL
    for x, y in itertools.product(types, repeat=2):
        expected = psi not in x or p in y
        assert (y.label in m.successors(x.label, p)) == expected
    with pytest.raises(ValueError):
        canonical_model([], psi)


@pytest.mark.parametrize("logic, text, status", [
    (N, "[](p -> p)", "provable"),
    (N, "[][](p | ~p)", "provable"),
    (N, "[]p -> p", "unprovable"),
    (N, "[]p -> [][]p", "unprovable"),
    (N, "p -> []p", "unprovable"),
    (N, "[](p & q) -> []p", "unprovable"),
    (N4, "[]p -> [][]p", "provable"),
    (N4, "[]p -> p", "unprovable"),
    (LogicId(0, 1), "[]p -> p", "provable"),
    (LogicId(0, 0), "[](p -> p)", "provable"),
    (LogicId(0, 2, rosbox=True), "~[][]#f", "provable"),
    (LogicId(0, 2, rosbox=True), "~[][][]#f", "provable"),
    (LogicId(1, 2), "~[][]#f", "unprovable"),
])
def test_decide_examples(logic, text, status):
    res = decide(logic, parse(text))
    assert res.status == status
    if isinstance(res, Unprovable):
        assert verify_certificate(res.model, res.world, parse(text), logic.m, logic.n)


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (1, 2), (0, 1), (2, 2)])
def test_axiom_is_its_own_theorem(m, n):
    for rho in (p, Box(p), Or(p, q)):
        assert decide(LogicId(m, n), implies(box_iter(n, rho), box_iter(m, rho))).status == "provable"


def test_fast_checker_matches_generic_semantics():
    # the bitmask evaluator and the generic model checker are two routes to
    # the same numbers: compare on every subset for a few formulas
    rng = random.Random(5)
    for text in ["[]p -> p", "[]p -> [][]p", "[](p | []q)", "~[][]#f | p"]:
        psi = parse(text)
        types = world_types(psi)
        for m, n in [(1, 1), (2, 1), (0, 2), (1, 2)]:
            checker = _CandidateChecker(psi, types, m, n)
            subsets = range(1, 1 << len(types))
            for s in rng.sample(list(subsets), min(40, len(subsets))):
                chosen = [t for t in types if s >> t.index & 1]
                model = canonical_model(chosen, psi)
                truth = checker.truth(s)
                for g in sub(psi):
                    expected = {t.label for t in chosen if t.index >= 0 and truth[g] >> t.index & 1}
                    assert truth_set(model, g) == expected
                assert checker.accessible(s) == is_set_accessible(model, sub(psi), m, n)


def test_certificate_survives_serialization():
    psi = parse("[]p -> [][]p")
    res = decide(N, psi)
    obj = json.loads(json.dumps(res.to_json()))
    assert obj["status"] == "unprovable"
    model = model_from_json(obj["model"])
    assert not satisfies(model, obj["world"], psi)
    assert is_set_accessible(model, sub(psi), 1, 1)


def test_decide_is_deterministic():
    psi = parse("[]p -> p")
    a, b = decide(N, psi), decide(N, psi)
    assert a.to_json() == b.to_json()


def test_resource_limits():
    res = decide(N, parse("[]p | []q | [][]p | r"))
    assert isinstance(res, ResourceLimit) and "generators" in res.reason
    res = decide(N, parse("[](p -> p)"), max_subsets=3)
    assert isinstance(res, ResourceLimit) and res.explored == 3
    assert decide(N, parse("[]p | []q | [][]p | r"), max_generators=6).status == "unprovable"


def test_config_errors():
    with pytest.raises(ConfigError):
        decide(LogicId(1, 1, ros=True), p)
    with pytest.raises(ConfigError):
        decide(LogicId(0, 2), p)
    with pytest.raises(ConfigError):
        brute_force_countermodel(LogicId(1, 1, ros=True), p)


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (1, 2), (0, 1), (0, 0), (3, 2)])
def test_rosbox_changes_nothing_when_admissible(m, n):
    for text in ["[]p -> p", "~[]#f", "~[][]#f", "[]p -> [][]p", "[]~[]#f"]:
        psi = parse(text)
        plain = decide(LogicId(m, n), psi).status
        assert decide(LogicId(m, n, rosbox=True), psi).status == plain


def test_n_and_na00_agree():
    for text in ["[]p -> p", "[](p -> p)", "~[]#f", "[]p -> [][]p", "[](p & q) -> []q"]:
        psi = parse(text)
        assert decide(LogicId(0, 0), psi).status == decide(N, psi).status


def test_extend_frame_examples():
    psi = parse("[]p -> p")
    res = decide(N4, psi)
    ext = extend_frame(res.model, psi, 2, 1)
    assert is_fully_accessible(ext, 2, 1)
    assert truth_set(ext, psi) == truth_set(res.model, psi)
    # n > m: the untouched subformula relation becomes total
    m = ExtensionalModel(("a", "b"), {p: [("a", "a"), ("b", "b")], Box(p): [("a", "a"), ("b", "b")]},
                       Policy.EMPTY, {})
    ext = extend_frame(m, Box(p), 1, 2)
    assert ext.relation(Box(p)) == {(x, y) for x in "ab" for y in "ab"}
    assert is_fully_accessible(ext, 1, 2)


def test_extend_frame_rejects_inaccessible():
    m = ExtensionalModel(("a", "b"), {Box(p): [("a", "b")], p: [("b", "a")]}, Policy.TOTAL, {})
    with pytest.raises(FrameExtensionError) as info:
        extend_frame(m, box_iter(2, p), 2, 1)
    assert info.value.rho == p


def test_extend_frame_random():
    rng = random.Random(17)
    done = 0
    for _ in range(400):
        m_, n_ = rng.choice([(2, 1), (1, 2), (0, 2), (2, 2)])
        psi = rng.choice([parse("[]p -> p"), parse("[][]p | q"), parse("~[][]#f"), parse("[](p | []q)")])
        model = random_model(rng, table_pool(psi), density=0.85)
        if not is_set_accessible(model, sub(psi), m_, n_):
            continue
        ext = extend_frame(model, psi, m_, n_)
        assert is_fully_accessible(ext, m_, n_)
        assert truth_set(ext, psi) == truth_set(model, psi)
        done += 1
    assert done >= 50


def test_relation_indices():
    assert relation_indices(parse("[]p -> p"), 1, 1) == [p]
    assert relation_indices(parse("[][]p"), 2, 1) == [p, Box(p)]
    assert relation_indices(parse("[][]p"), 0, 2) == [p, Box(p), box_iter(2, p), box_iter(3, p)]


def test_brute_force_examples():
    found = brute_force_countermodel(N, parse("[]p -> p"))
    assert found is not None
    model, world = found
    assert verify_certificate(model, world, parse("[]p -> p"), 1, 1)
    assert brute_force_countermodel(N, parse("[](p -> p)")) is None
    assert brute_force_countermodel(LogicId(0, 1), parse("[]p -> p")) is None
    with pytest.raises(ResourceLimitError):
        brute_force_countermodel(LogicId(0, 2), parse("~[][][]#f"))
    with pytest.raises(ResourceLimitError):
        brute_force_countermodel(N, p, max_worlds=3)


@pytest.mark.parametrize("logic", [N, N4, LogicId(0, 2, rosbox=True)])
@pytest.mark.parametrize("text", ["p", "[]p", "[]p -> p", "[]p -> [][]p"])
def test_truth_lemma(logic, text):
    assert truth_lemma_check(parse(text), logic)


def test_provable_results_hold_on_small_accessible_models():
    rng = random.Random(23)
    for text in ["[]p -> [][]p", "~[][]#f"]:
        psi = parse(text)
        logic = N4 if "p" in text else LogicId(0, 2, rosbox=True)
        assert isinstance(decide(logic, psi), Provable)
        hits = 0
        for _ in range(300):
            model = random_model(rng, table_pool(psi), density=0.85)
            if is_fully_accessible(model, logic.m, logic.n):
                hits += 1
                assert valid(model, psi)
        assert hits
