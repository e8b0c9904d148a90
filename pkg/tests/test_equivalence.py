import random

import pytest
from hypothesis import given, settings, strategies as st

from dpl.equivalence import (Bisimulation, characteristic_formula, dynamic_equivalence,
                             modally_equivalent_models, refines, union_formula)
from dpl.errors import ModelError
from dpl.formula import And, Atom, T, parse, render
from dpl.harness import random_formula, random_model, universe
from dpl.model import PreferenceModel, fixture
from dpl.operators import DEFAULT_REGISTRY, make_table_operator, table_from_json
from dpl.semantics import DynamicModel, reachable_orders, truth_set

SEEDS = st.integers(min_value=0, max_value=10**6)
OPS = st.sampled_from(["rev", "ctr", "id"])


def blocks(d):
    return set(dynamic_equivalence(d).blocks)


def test_fixture_partitions():
    m1 = fixture("F1_M1")
    assert blocks(DynamicModel(m1, "id")) == {frozenset({"w1", "w2"})}
    assert blocks(DynamicModel(m1, "fact41_star")) == {frozenset({"w1", "w2"})}
    e1 = fixture("E1")
    assert blocks(DynamicModel(e1, "rev")) == {frozenset({w}) for w in e1.worlds}


def test_characteristic_formulas_on_fixtures():
    p = dynamic_equivalence(DynamicModel(fixture("F1_M1"), "id"))
    assert characteristic_formula(p, 0) == T
    d = DynamicModel(fixture("E1"), "rev")
    part = dynamic_equivalence(d)
    i = part.block_index("w3")
    chi = characteristic_formula(part, {"w3"})
    assert chi == characteristic_formula(part, i)
    assert truth_set(d, chi) == {"w3"}
    # valuation separators suffice for E1, so p & q implies the formula
    assert truth_set(DynamicModel(fixture("E1"), "id"), And(Atom("p"), Atom("q"))) <= truth_set(d, chi)


def test_modally_equivalent_models():
    m1, m2 = fixture("F1_M1"), fixture("F1_M2")
    ident = {"w1": "w1", "w2": "w2"}
    assert modally_equivalent_models(DynamicModel(m1, "fact41_star"), DynamicModel(m1, "id"), ident)
    assert modally_equivalent_models(DynamicModel(m1, "fact41_star"), DynamicModel(m2, "id"), ident)
    e1 = fixture("E1")
    same = {w: w for w in e1.worlds}
    assert modally_equivalent_models(DynamicModel(e1, "id"), DynamicModel(e1, "id"), same)
    flipped = PreferenceModel.build(e1.worlds, e1.atoms, {"p": ["w1", "w3"], "q": ["w2", "w3"]},
                                    e1.leq)
    assert not modally_equivalent_models(DynamicModel(e1, "rev"), DynamicModel(flipped, "rev"), same)


def test_modally_equivalent_models_with_swapped_names():
    m1 = fixture("F1_M1")
    swap = {"w1": "w2", "w2": "w1"}
    assert modally_equivalent_models(DynamicModel(m1, "id"), DynamicModel(m1, "id"), swap)
    e1 = fixture("E1")
    with pytest.raises(ModelError):
        modally_equivalent_models(DynamicModel(e1, "id"), DynamicModel(e1, "id"), {"w1": "w1"})


def test_rev_and_id_differ_after_updates():
    # same static model, different operators: rev can separate what id cannot
    e1 = fixture("E1")
    same = {w: w for w in e1.worlds}
    assert not modally_equivalent_models(DynamicModel(e1, "rev"), DynamicModel(e1, "id"), same)


@given(st.integers(min_value=1, max_value=4), SEEDS, OPS)
@settings(max_examples=60, deadline=None)
def test_separators_and_characteristic_formulas_verified(n, seed, op):
    m = random_model(n, ("p",), seed)
    d = DynamicModel(m, op)
    part = dynamic_equivalence(d)
    assert frozenset().union(*part.blocks) == set(m.worlds)
    assert sum(len(b) for b in part.blocks) == m.n
    for (i, j), f in part.separators.items():
        truth = truth_set(d, f)
        assert part.blocks[i] <= truth and not part.blocks[j] & truth
    for i, b in enumerate(part.blocks):
        assert truth_set(d, part.characteristic(i)) == b
    assert truth_set(d, union_formula(part, range(len(part)))) == set(m.worlds)


def test_blocks_agree_on_random_formulas():
    rng = random.Random(17)
    for _ in range(40):
        m = random_model(rng.randint(2, 4), ("p",), rng.randrange(10**6))
        op = rng.choice(["rev", "ctr", "id"])
        d = DynamicModel(m, op)
        part = dynamic_equivalence(d)
        for _ in range(25):
            f = random_formula(rng, ("p",), (op,), depth=4)
            truth = truth_set(d, f)
            for b in part.blocks:
                assert b <= truth or not b & truth


def test_equivalence_in_every_reachable_model():
    u = universe(3, ("p",))
    op = make_table_operator(4, u)
    reg = DEFAULT_REGISTRY.copy()
    reg.register(op)
    for m in u[::7]:
        d = DynamicModel(m, op.name, reg)
        bisim = Bisimulation(m, [(op.name, m.down)], reg)
        for down in reachable_orders(d):
            part = bisim.partition(op.name, down)
            here = d.at(down)
            for i, b in enumerate(part.blocks):
                assert truth_set(here, part.characteristic(i)) == b


def test_statically_bisimilar_worlds_split_by_update():
    # w1, w2 share their valuation and are incomparable; the operator makes
    # w1 strictly more plausible once updated by T
    m = fixture("F1_M1")
    lift = table_from_json("lift", [{"model": [["w1", "w1"], ["w2", "w2"]],
                                     "extension": ["w1", "w2"],
                                     "output": [["w1", "w1"], ["w1", "w2"], ["w2", "w2"]]}])
    reg = DEFAULT_REGISTRY.copy()
    reg.register(lift)
    static = dynamic_equivalence(DynamicModel(m, "id"))
    d = DynamicModel(m, "lift", reg)
    part = dynamic_equivalence(d)
    assert set(static.blocks) == {frozenset({"w1", "w2"})}
    assert set(part.blocks) == {frozenset({"w1"}), frozenset({"w2"})}
    assert refines(part.blocks, static.blocks) and not refines(static.blocks, part.blocks)
    sep = part.separator(part.block_index("w2"), part.block_index("w1"))
    assert "[lift" in render(sep)
    assert truth_set(d, sep) == {"w2"}


def test_distinguish_rejects_equivalent_states():
    m = fixture("F1_M1")
    b = Bisimulation(m, [("id", m.down)])
    with pytest.raises(ValueError):
        b.distinguish(b.state("id", m.down, 0), b.state("id", m.down, 1))


def test_rendered_separator_is_parseable():
    d = DynamicModel(random_model(4, ("p",), 12), "rev")
    part = dynamic_equivalence(d)
    for f in part.separators.values():
        assert parse(render(f)) == f
