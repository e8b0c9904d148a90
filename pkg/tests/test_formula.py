import pytest
from hypothesis import given, settings, strategies as st

from dpl.errors import FormulaSyntaxError
from dpl.formula import (And, Atom, BoxAll, BoxLeq, BoxLt, DiamAll, DiamLeq, DiamLt, Dyn, F,
                         Hole, Iff, Implies, Not, Or, T, atoms_of, belief, conj, degree, disj,
                         holes_of, is_propositional, mu, operators_of, parse, render, substitute,
                         subformulas)

ATOMS = st.sampled_from(["p", "q", "r1", "long_name"]).map(Atom)
LEAVES = st.one_of(ATOMS, st.just(T), st.just(F))
UNARY = [Not, BoxAll, DiamAll, BoxLeq, DiamLeq, BoxLt, DiamLt]
BINARY = [And, Or, Implies, Iff]


def _props(children):
    return st.one_of(
        st.builds(Not, children),
        st.builds(lambda c, a, b: c(a, b), st.sampled_from(BINARY), children, children),
    )


PROPS = st.recursive(LEAVES, _props, max_leaves=6)


def _formulas(children):
    return st.one_of(
        st.builds(lambda c, a: c(a), st.sampled_from(UNARY), children),
        st.builds(lambda c, a, b: c(a, b), st.sampled_from(BINARY), children, children),
        st.builds(Dyn, st.sampled_from(["rev", "ctr", "id", "tbl3"]), PROPS, children),
    )


FORMULAS = st.recursive(LEAVES, _formulas, max_leaves=12)


@settings(max_examples=400)
@given(FORMULAS)
def test_parse_inverts_render(f):
    assert parse(render(f)) == f


@settings(max_examples=200)
@given(FORMULAS)
def test_render_is_stable_under_whitespace(f):
    text = render(f)
    spaced = text.replace("(", " ( ").replace(")", " ) ")
    assert render(parse(spaced)) == text


@given(FORMULAS)
def test_dyn_arguments_stay_propositional(f):
    for g in subformulas(f):
        if isinstance(g, Dyn):
            assert is_propositional(g.arg)


@pytest.mark.parametrize("text, expected", [
    ("p & ~q", And(Atom("p"), Not(Atom("q")))),
    ("[rev q][leq] p", Dyn("rev", Atom("q"), BoxLeq(Atom("p")))),
    ("p -> q -> r", Implies(Atom("p"), Implies(Atom("q"), Atom("r")))),
    ("p | q & r", Or(Atom("p"), And(Atom("q"), Atom("r")))),
    ("p <-> q <-> r", Iff(Iff(Atom("p"), Atom("q")), Atom("r"))),
    ("~p & q", And(Not(Atom("p")), Atom("q"))),
    ("A p -> E q", Implies(BoxAll(Atom("p")), DiamAll(Atom("q")))),
    ("<lt> <leq> [lt] T", DiamLt(DiamLeq(BoxLt(T)))),
    ("[ctr p | q] F", Dyn("ctr", Or(Atom("p"), Atom("q")), F)),
])
def test_parse_cases(text, expected):
    assert parse(text) == expected


@pytest.mark.parametrize("f, text", [
    (And(Atom("p"), Atom("q")), "(p & q)"),
    (mu(Atom("p")), "(p & ~(<lt> p))"),
    (Dyn("ctr", Atom("p"), DiamAll(Atom("q"))), "[ctr p](E q)"),
    (Not(Not(Atom("p"))), "~~p"),
    (BoxAll(And(Atom("p"), T)), "A(p & T)"),
])
def test_render_cases(f, text):
    assert render(f) == text


@pytest.mark.parametrize("text, position", [
    ("p &", 3),
    ("(p & q", 6),
    ("p q", 2),
    ("p $ q", 2),
    ("[leq p", 6),
])
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(text)
    assert info.value.position == position


def test_modal_operator_argument_rejected():
    with pytest.raises(FormulaSyntaxError, match="non-propositional operator argument"):
        parse("[rev ([leq] p)] q")
    with pytest.raises(ValueError, match="non-propositional operator argument"):
        Dyn("rev", BoxLeq(Atom("p")), Atom("q"))


def test_bad_identifiers():
    with pytest.raises(ValueError):
        Atom("P")
    with pytest.raises(ValueError):
        Dyn("Rev", T, T)


def test_mu_and_belief_shapes():
    assert mu(T) == And(T, Not(DiamLt(T)))
    assert mu(mu(Atom("p"))) == And(mu(Atom("p")), Not(DiamLt(mu(Atom("p")))))
    assert belief(Atom("p"), T) == BoxAll(Implies(mu(T), Atom("p")))


def test_degree_unrolling():
    p = Atom("p")
    assert degree(p, 1) == p
    assert degree(p, 2) == And(p, DiamLt(p))
    assert degree(p, 3) == And(p, DiamLt(And(p, DiamLt(p))))
    with pytest.raises(ValueError):
        degree(p, 0)
    with pytest.raises(ValueError):
        degree(BoxLeq(p), 2)


@given(PROPS, st.integers(min_value=1, max_value=6))
def test_degree_has_i_occurrences(f, i):
    g = degree(f, i)
    count = 0
    stack = [g]
    while stack:
        h = stack.pop()
        if h == f:
            count += 1
            continue
        stack.extend(h.children())
    assert count == i


def test_is_propositional_cases():
    assert is_propositional(parse("p & ~q"))
    assert not is_propositional(parse("[leq] p"))
    assert not is_propositional(parse("[rev p] q"))


def test_helpers():
    f = parse("[rev p](q & [ctr r] A s)")
    assert atoms_of(f) == {"p", "q", "r", "s"}
    assert operators_of(f) == {"rev", "ctr"}
    assert conj([]) == T and disj([]) == F
    assert conj([Atom("p")]) == Atom("p")
    assert disj([Atom("p"), Atom("q")]) == Or(Atom("p"), Atom("q"))


def test_holes_and_substitution():
    xi = Hole("xi")
    f = Dyn("rev", Atom("p"), And(xi, BoxLeq(Hole("other"))))
    assert not f.closed
    assert holes_of(f) == ("xi", "other")
    g = substitute(f, {"xi": Atom("q"), "other": T})
    assert g.closed and g == parse("[rev p](q & [leq] T)")


def test_formulas_are_hashable_values():
    a = parse("[rev p]([leq] q)")
    b = parse("[rev p] [leq] q")
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
