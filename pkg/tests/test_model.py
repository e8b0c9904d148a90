import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from dpl.errors import ModelError, PreconditionError
from dpl.formula import And, Atom, Not, T
from dpl.harness import random_formula, random_model
from dpl.model import (FIXTURES, PreferenceModel, dump_model, extension, fixture, from_json,
                       implausibility_degree, is_total, load_model, min_worlds,
                       propositional_extensions, strict, to_json, validate)
from dpl.semantics import DynamicModel, satisfies

SEEDS = st.integers(min_value=0, max_value=10**6)
SIZES = st.integers(min_value=1, max_value=6)


def model_of(n, seed, atoms=("p", "q")):
    return random_model(n, atoms, seed)


# -- oracle values on the shipped fixtures --------------------------------

def test_e1_shape():
    e1 = fixture("E1")
    assert e1.worlds == ("w1", "w2", "w3")
    assert e1.valuation == {"p": {"w1", "w3"}, "q": {"w3"}}
    assert strict(e1) == {("w1", "w2"), ("w1", "w3"), ("w2", "w3")}
    assert is_total(e1)
    assert validate(e1) == []


def test_e1_minima_and_extensions():
    e1 = fixture("E1")
    assert min_worlds(e1, set()) == set()
    assert min_worlds(e1, {"w1", "w3"}) == {"w1"}
    assert extension(e1, Atom("p")) == {"w1", "w3"}
    assert extension(e1, T) == set(e1.worlds)
    assert extension(e1, And(Atom("p"), Not(Atom("p")))) == set()
    assert len(propositional_extensions(e1)) == 8


def test_e1_degrees():
    e1 = fixture("E1")
    p_worlds = {"w1", "w3"}
    assert implausibility_degree(e1, p_worlds, "w1") == 1
    assert implausibility_degree(e1, p_worlds, "w3") == 2
    assert implausibility_degree(e1, {"w2"}, "w2") == 1
    with pytest.raises(PreconditionError):
        implausibility_degree(e1, p_worlds, "w2")


def test_f1_fixtures():
    m1, m2 = fixture("F1_M1"), fixture("F1_M2")
    assert fixture("F1") == m1
    assert m1.leq == {("w1", "w1"), ("w2", "w2")}
    assert m2.leq == {(u, w) for u in m2.worlds for w in m2.worlds}
    assert m1.valuation == m2.valuation
    assert [e.worlds for e in propositional_extensions(m1)] == [set(), {"w1", "w2"}]
    assert not is_total(m1) and is_total(m2)


def test_single_world_extensions():
    m = PreferenceModel.build(["w"], ["p"], {"p": ["w"]}, [("w", "w")])
    assert [e.worlds for e in propositional_extensions(m)] == [set(), {"w"}]


def test_unknown_fixture():
    with pytest.raises(ModelError):
        fixture("nope")


# -- validation -----------------------------------------------------------

def test_validate_reports_everything():
    ident = PreferenceModel.build(["w1", "w2"], [], {}, [("w1", "w1"), ("w2", "w2")])
    assert validate(ident) == []
    missing = PreferenceModel.build(["w1", "w2"], [], {}, [("w2", "w2")])
    assert validate(missing) == ["irreflexive at w1"]
    chain = PreferenceModel.build(["a", "b", "c"], [], {},
                                  [("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")])
    assert validate(chain) == ["non-transitive (a,b,c)"]
    both = PreferenceModel.build(["a", "b", "c"], [], {}, [("a", "b"), ("b", "c")])
    assert len(validate(both)) == 4


def test_build_rejects_bad_input():
    with pytest.raises(ModelError):
        PreferenceModel.build(["w1", "w1"], [], {}, [])
    with pytest.raises(ModelError):
        PreferenceModel.build(["w1"], ["p"], {"p": ["w9"]}, [])
    with pytest.raises(ModelError):
        PreferenceModel.build(["w1"], [], {"p": ["w1"]}, [])
    with pytest.raises(ModelError):
        PreferenceModel.build(["w1"], [], {}, [("w1", "w2")])


# -- JSON -----------------------------------------------------------------

def test_json_round_trip(tmp_path):
    for name in FIXTURES:
        m = fixture(name)
        assert from_json(to_json(m)) == m
        path = tmp_path / f"{name}.json"
        dump_model(m, path)
        assert load_model(path) == m


def test_json_closure_and_errors():
    doc = {"worlds": ["a", "b", "c"], "atoms": ["p"], "valuation": {"p": ["a"]},
           "leq": [["a", "b"], ["b", "c"]], "closure": "reflexive_transitive"}
    m = from_json(doc)
    assert ("a", "c") in m.leq
    with pytest.raises(ModelError, match="non-transitive"):
        from_json({**doc, "closure": "none", "leq": [["a", "a"], ["b", "b"], ["c", "c"],
                                                      ["a", "b"], ["b", "c"]]})
    with pytest.raises(ModelError):
        from_json({**doc, "closure": "sometimes"})
    with pytest.raises(ModelError):
        from_json({"atoms": []})


def test_bad_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ nope")
    with pytest.raises(ModelError):
        load_model(path)


# -- properties -----------------------------------------------------------

@given(SIZES, SEEDS, st.data())
def test_min_worlds_properties(n, seed, data):
    m = model_of(n, seed)
    s = data.draw(st.sets(st.sampled_from(m.worlds)))
    low = min_worlds(m, s)
    assert low <= s
    assert (low == set()) == (s == set())
    for w in s:
        assert (implausibility_degree(m, s, w) == 1) == (w in low)


@given(SIZES, SEEDS)
def test_strict_is_irreflexive_and_transitive(n, seed):
    m = model_of(n, seed)
    lt = strict(m)
    assert all(u != w for u, w in lt)
    assert all((a, d) in lt for a, b in lt for c, d in lt if b == c)


@given(SIZES, SEEDS)
def test_extensions_closed_under_boolean_operations(n, seed):
    m = model_of(n, seed)
    sets = {e.worlds for e in propositional_extensions(m)}
    everything = frozenset(m.worlds)
    for a in sets:
        assert everything - a in sets
        for b in sets:
            assert a | b in sets and a & b in sets
    for e in propositional_extensions(m):
        assert extension(m, e.witness) == e.worlds


def test_extension_agrees_with_evaluator():
    rng = random.Random(5)
    for _ in range(1000):
        m = model_of(rng.randint(1, 5), rng.randrange(10**6))
        f = random_formula(rng, ("p", "q"), depth=4, propositional=True)
        d = DynamicModel(m, "id")
        truth = extension(m, f)
        for w in m.worlds:
            assert satisfies(d, w, f) == (w in truth)


def test_undeclared_atoms_are_false():
    e1 = fixture("E1")
    assert extension(e1, Atom("zzz")) == set()


def test_extension_rejects_modal_formula():
    from dpl.formula import BoxLeq
    with pytest.raises(ValueError):
        extension(fixture("E1"), BoxLeq(Atom("p")))


def test_key_and_fingerprint_are_stable():
    e1 = fixture("E1")
    assert e1.key() == "{w1<=w2,w1<=w3,w2<=w3}[p:w1/w3;q:w3]"
    assert list(e1.fingerprint()) == sorted(e1.leq)
    assert json.loads(json.dumps(to_json(e1)))["leq"][0] == ["w1", "w1"]
