"""Rationality postulates for upgrade operators at three levels:

* world level: direct conditions relating the old order and the upgraded one;
* compliance: the same conditions up to modal indistinguishability of
  worlds in the upgraded dynamic model;
* axiom schemata: validity of formula templates in a dynamic model.

Quantification over propositional formulas is finitised by the definable
extensions of the model.  Quantification over arbitrary information ``xi``
is finitised by the modal-equivalence blocks of the upgraded model: in
compliance clauses the characteristic formula of a world's block is the
strongest ``xi`` true there, and in schemata ``xi`` ranges over all unions
of blocks (it only ever occurs under the dynamic modality).
"""

from __future__ import annotations

import enum
import itertools
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from dpl import kernels
from dpl.equivalence import Bisimulation, Partition
from dpl.errors import InstanceSpaceTooLarge, PreconditionError
from dpl.formula import (And, BoxAll, BoxLeq, BoxLt, DiamAll, Dyn, Formula, Hole, Iff, Implies,
                         Not, Or, T, Atom, belief, conj, degree, holes_of, mu, render,
                         substitute)
from dpl.model import Extension, PreferenceModel, propositional_extensions
from dpl.operators import DEFAULT_REGISTRY, OperatorDefinition, OperatorRegistry
from dpl.semantics import DynamicModel, Evaluator, evaluator_for

DEFAULT_MAX_BLOCKS = 8


class PostulateId(enum.Enum):
    Faith = "Faith"
    GR = "GR"
    DP1 = "DP1"
    DP2 = "DP2"
    DP3 = "DP3"
    DP4 = "DP4"
    REC = "REC"
    CR1 = "CR1"
    CR2 = "CR2"
    CR3 = "CR3"
    CR4 = "CR4"
    LC = "LC"
    LCprime = "LCprime"
    DP1prime = "DP1prime"
    DP2prime = "DP2prime"
    DP1comp = "DP1comp"
    DP2comp = "DP2comp"
    DP3comp = "DP3comp"
    DP4comp = "DP4comp"
    RECcomp = "RECcomp"
    CR3comp = "CR3comp"
    CR4comp = "CR4comp"
    LCcomp = "LCcomp"

    @classmethod
    def parse(cls, text: str) -> "PostulateId":
        return _lookup(cls, text)

    @property
    def is_compliance(self) -> bool:
        return self.value.endswith("comp")


class SchemaId(enum.Enum):
    Basic = "Basic"
    FaithAx = "FaithAx"
    DP1Ax = "DP1Ax"
    DP2Ax = "DP2Ax"
    DP3Ax = "DP3Ax"
    DP4Ax = "DP4Ax"
    RECAx = "RECAx"
    GRAx = "GRAx"
    CR3Ax = "CR3Ax"
    CR4Ax = "CR4Ax"
    LCAx = "LCAx"
    LexRevSystem = "LexRevSystem"
    LexRevReduction = "LexRevReduction"

    @classmethod
    def parse(cls, text: str) -> "SchemaId":
        return _lookup(cls, text)


def _lookup(enum_cls, text):
    key = text.strip().lower().replace("-", "").replace("_", "")
    for member in enum_cls:
        if member.value.lower() == key:
            return member
    raise ValueError(f"unknown {enum_cls.__name__} {text!r}")


ALIASES = {PostulateId.CR1: PostulateId.DP2, PostulateId.CR2: PostulateId.DP1}

# Each compliance notion paired with the schema that characterises it.
REPRESENTATION_PAIRS: tuple[tuple[PostulateId, SchemaId], ...] = (
    (PostulateId.Faith, SchemaId.FaithAx),
    (PostulateId.DP1comp, SchemaId.DP1Ax),
    (PostulateId.DP2comp, SchemaId.DP2Ax),
    (PostulateId.DP3comp, SchemaId.DP3Ax),
    (PostulateId.DP4comp, SchemaId.DP4Ax),
    (PostulateId.RECcomp, SchemaId.RECAx),
    (PostulateId.CR3comp, SchemaId.CR3Ax),
    (PostulateId.CR4comp, SchemaId.CR4Ax),
)


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class Witness:
    """A counterexample that can be re-checked independently.

    ``checks`` are (formula, world, expected truth value) triples evaluated
    in the original dynamic model; ``relations`` are (kind, u, w, expected)
    facts where kind is one of ``le``, ``lt`` (old order) or ``le*``,
    ``lt*`` (order after upgrading by ``phi``).
    """

    model: PreferenceModel
    op: str
    phi: Formula | None
    clause: str
    worlds: tuple[str, ...]
    formula: Formula | None = None
    checks: tuple[tuple[Formula, str, bool], ...] = ()
    relations: tuple[tuple[str, str, str, bool], ...] = ()

    def verify(self, registry: OperatorRegistry | None = None) -> bool:
        reg = registry or DEFAULT_REGISTRY
        d = DynamicModel(self.model, self.op, reg)
        ev = d.evaluator
        m = self.model
        for f, w, expected in self.checks:
            if bool(ev.ext(m.down, f) >> m.index(w) & 1) != expected:
                return False
        if self.relations:
            s = ev.ext(m.down, self.phi) if self.phi is not None else m.full
            rows = {"le": m.down, "le*": ev.apply(self.op, m.down, s)}
            rows["lt"] = ev.strict(rows["le"])
            rows["lt*"] = ev.strict(rows["le*"])
            for kind, u, w, expected in self.relations:
                if bool(rows[kind][m.index(w)] >> m.index(u) & 1) != expected:
                    return False
        return True

    def to_json(self) -> dict:
        ext = None
        if self.phi is not None:
            ev = evaluator_for(self.model)
            ext = self.model.sorted_names(ev.ext(self.model.down, self.phi))
        return {
            "clause": self.clause,
            "extension": ext,
            "worlds": list(self.worlds),
            "formula": render(self.formula) if self.formula is not None else None,
        }


@dataclass
class ComplianceReport:
    check: str
    verdict: str = "pass"
    witnesses: list[Witness] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    message: str = ""
    registry: OperatorRegistry | None = field(default=None, repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def fail(self, w: Witness) -> None:
        self.verdict = "fail"
        self.witnesses.append(w)

    def count(self, key: str, k: int = 1) -> None:
        self.stats[key] = self.stats.get(key, 0) + k

    def verify(self, registry: OperatorRegistry | None = None) -> bool:
        reg = registry or self.registry
        return all(w.verify(reg) for w in self.witnesses)


# ----------------------------------------------------------- shared views


class _Upgrade:
    """Old and new orders (with strict parts) for one extension."""

    __slots__ = ("s", "phi", "le", "lt", "le2", "lt2", "deg")

    def __init__(self, ev: Evaluator, op: str, m: PreferenceModel, e: Extension):
        self.s = e.mask
        self.phi = e.witness
        self.le = m.down
        self.lt = ev.strict(m.down)
        self.le2 = ev.apply(op, m.down, e.mask)
        self.lt2 = ev.strict(self.le2)
        self.deg = None

    def degrees(self, n):
        if self.deg is None:
            self.deg = kernels.degrees(self.le, n, self.s)
        return self.deg


def _extensions(m: PreferenceModel, f: Formula | None) -> list[Extension]:
    exts = propositional_extensions(m)
    if f is None:
        return list(exts)
    if not f.propositional:
        raise PreconditionError("postulates take a propositional formula")
    mask = evaluator_for(m).ext(m.down, f)
    return [Extension(mask, m.names(mask), f)]


def _rel(rows, u, w):
    return bool(rows[w] >> u & 1)


# ------------------------------------------------------------ world level


def check_world_postulate(
    op: str | OperatorDefinition,
    m: PreferenceModel,
    f: Formula | None,
    pid: PostulateId,
    registry: OperatorRegistry | None = None,
    first_only: bool = True,
) -> ComplianceReport:
    """Check a world-level postulate for the upgrade by ``f`` (or by every
    definable extension when ``f`` is None)."""
    registry, name = _registry_with(op, registry)
    opdef = registry[name]
    pid = ALIASES.get(pid, pid)
    if pid.is_compliance:
        raise PreconditionError(f"{pid.value} is a compliance notion; use check_compliance")
    if pid is PostulateId.LC and not _total(m):
        raise PreconditionError("LC requires total preorder")
    ev = evaluator_for(m, registry)
    report = ComplianceReport(pid.value, registry=registry)
    for e in _extensions(m, f):
        up = _Upgrade(ev, opdef.name, m, e)
        _WORLD_CHECKS[pid](report, m, opdef.name, up, ev)
        if first_only and not report.passed:
            break
    return report


def _total(m):
    return all(_rel(m.down, u, w) or _rel(m.down, w, u) for u in range(m.n) for w in range(m.n))


def _minima_check(report, m, op, up, ev, formula, clause):
    """Shared by Faith and GR: their world-level condition coincides world by
    world with a formula about minima, which doubles as the witness."""
    mask = ev.ext(m.down, formula)
    report.count("worlds", m.n)
    if mask != m.full:
        bad = m.worlds[kernels.bits(m.full & ~mask)[0]]
        report.fail(Witness(m, op, up.phi, clause, (bad,), formula, ((formula, bad, False),)))


def _faith(report, m, op, up, ev):
    if up.s == 0:
        report.count("skipped_empty")
        return
    phi = up.phi
    _minima_check(report, m, op, up, ev, Iff(mu(phi), Dyn(op, phi, mu(T))), "Faith")


def _gr(report, m, op, up, ev):
    phi = up.phi
    _minima_check(report, m, op, up, ev, Iff(Or(mu(Not(phi)), mu(T)), Dyn(op, phi, mu(T))), "GR")


def _pairs(m, up, zone_u, zone_w):
    """Index pairs (u, w) with u in zone_u and w in zone_w."""
    full = m.full
    zu = up.s if zone_u else full & ~up.s
    zw = up.s if zone_w else full & ~up.s
    return [(u, w) for u in kernels.bits(zu) for w in kernels.bits(zw)]


def _order_fail(report, m, op, up, clause, u, w, facts):
    names = m.worlds
    rel = tuple((k, names[a], names[b], v) for k, a, b, v in facts)
    report.fail(Witness(m, op, up.phi, clause, (names[u], names[w]), relations=rel))


def _preserve(zone_u, zone_w, clause):
    """u <= w iff u <=* w for pairs drawn from the given zones."""

    def check(report, m, op, up, ev):
        for u, w in _pairs(m, up, zone_u, zone_w):
            report.count("pairs")
            a, b = _rel(up.le, u, w), _rel(up.le2, u, w)
            if a != b:
                _order_fail(report, m, op, up, clause, u, w, (("le", u, w, a), ("le*", u, w, b)))
                return

    return check


def _implication(zone_u, zone_w, old, new, clause):
    """u R w implies u R* w for pairs from the given zones."""

    def check(report, m, op, up, ev):
        rows_old = getattr(up, old)
        rows_new = getattr(up, new)
        for u, w in _pairs(m, up, zone_u, zone_w):
            report.count("pairs")
            if _rel(rows_old, u, w) and not _rel(rows_new, u, w):
                _order_fail(report, m, op, up, clause, u, w,
                            ((old, u, w, True), (new.replace("2", "*"), u, w, False)))
                return

    return check


def _rec(report, m, op, up, ev):
    for u, w in _pairs(m, up, True, False):
        report.count("pairs")
        if not _rel(up.lt2, u, w):
            _order_fail(report, m, op, up, "REC", u, w, (("lt*", u, w, False),))
            return


def _degree_checks(m, op, up, worlds):
    """Formula checks pinning down the degree of each listed world."""
    out = []
    for x in worlds:
        zone_phi = bool(up.s >> x & 1)
        base = up.phi if zone_phi else Not(up.phi)
        out.append((mu(degree(base, up.degrees(m.n)[x])), m.worlds[x], True))
    return tuple(out)


def _ranking(pairs_of, clause):
    """u <=* w iff deg(u) <= deg(w), degrees taken within each world's zone."""

    def check(report, m, op, up, ev):
        deg = up.degrees(m.n)
        for u, w in pairs_of(m, up):
            report.count("pairs")
            expected = deg[u] <= deg[w]
            if _rel(up.le2, u, w) != expected:
                names = m.worlds
                report.fail(Witness(m, op, up.phi, clause, (names[u], names[w]),
                                    checks=_degree_checks(m, op, up, (u, w)),
                                    relations=(("le*", names[u], names[w], not expected),)))
                return

    return check


def _cross(m, up):
    return _pairs(m, up, True, False) + _pairs(m, up, False, True)


def _everything(m, up):
    return [(u, w) for u in range(m.n) for w in range(m.n)]


_WORLD_CHECKS: dict[PostulateId, Callable] = {
    PostulateId.Faith: _faith,
    PostulateId.GR: _gr,
    PostulateId.DP1: _preserve(True, True, "DP1"),
    PostulateId.DP2: _preserve(False, False, "DP2"),
    PostulateId.DP3: _implication(True, False, "lt", "lt2", "DP3"),
    PostulateId.DP4: _implication(True, False, "le", "le2", "DP4"),
    PostulateId.REC: _rec,
    PostulateId.CR3: _implication(False, True, "lt", "lt2", "CR3"),
    PostulateId.CR4: _implication(False, True, "le", "le2", "CR4"),
    PostulateId.LC: _ranking(_cross, "LC"),
    PostulateId.LCprime: _ranking(_everything, "LCprime"),
    PostulateId.DP1prime: _ranking(lambda m, up: _pairs(m, up, True, True), "DP1prime"),
    PostulateId.DP2prime: _ranking(lambda m, up: _pairs(m, up, False, False), "DP2prime"),
}


# ------------------------------------------------------------- compliance

# Clause table: (label, zone of u, zone of w, premise relation, premise on
# the new order?, required relation of the witness world, on the new order?).
# A clause reads: for u, w in their zones, if premise(u, w) then some u2 in
# u's zone and u's block of the upgraded model satisfies required(u2, w).
_CLAUSES: dict[PostulateId, tuple] = {
    PostulateId.DP1comp: (
        ("DP1a<=", True, True, "le2", "le"),
        ("DP1a<", True, True, "lt2", "lt"),
        ("DP1b<=", True, True, "le", "le2"),
        ("DP1b<", True, True, "lt", "lt2"),
    ),
    PostulateId.DP2comp: (
        ("DP2a<=", False, False, "le2", "le"),
        ("DP2a<", False, False, "lt2", "lt"),
        ("DP2b<=", False, False, "le", "le2"),
        ("DP2b<", False, False, "lt", "lt2"),
    ),
    PostulateId.DP3comp: (("DP3a", True, False, "lt", "lt2"),),
    PostulateId.DP4comp: (("DP4a", True, False, "le", "le2"),),
    PostulateId.RECcomp: (("REC'", True, False, None, "le2"),),
    PostulateId.CR3comp: (("CR3a", False, True, "lt", "lt2"),),
    PostulateId.CR4comp: (("CR4a", False, True, "le", "le2"),),
}

_KIND = {"le": "le", "lt": "lt", "le2": "le*", "lt2": "lt*"}


def bisimulation_for_models(
    models: Sequence[PreferenceModel],
    op: str,
    registry: OperatorRegistry | None = None,
) -> Bisimulation:
    """One equivalence computation covering every listed model (all must
    share worlds, atoms and valuation) and everything reachable from them."""
    return Bisimulation(models[0], [(op, m.down) for m in models], registry)


def check_compliance(
    op: str | OperatorDefinition,
    m: PreferenceModel,
    pid: PostulateId,
    registry: OperatorRegistry | None = None,
    bisim: Bisimulation | None = None,
    first_only: bool = True,
) -> ComplianceReport:
    registry, name = _registry_with(op, registry)
    pid = ALIASES.get(pid, pid)
    if pid is PostulateId.Faith or pid is PostulateId.GR:
        # no xi inside: compliance and the world-level notion coincide
        return check_world_postulate(name, m, None, pid, registry, first_only)
    if pid is PostulateId.LCcomp:
        report = check_world_postulate(name, m, None, PostulateId.LCprime, registry, first_only)
        report.check = pid.value
        return report
    if pid not in _CLAUSES:
        raise PreconditionError(f"{pid.value} is not a compliance notion")
    ev = evaluator_for(m, registry)
    if bisim is None:
        bisim = Bisimulation(m, [(name, m.down)], registry, ev)
    report = ComplianceReport(pid.value, registry=registry)
    full = m.full
    for e in propositional_extensions(m):
        up = _Upgrade(ev, name, m, e)
        part = bisim.partition(name, up.le2)
        block_of = [0] * m.n
        for i, mask in enumerate(part.masks):
            for x in kernels.bits(mask):
                block_of[x] = i
        for clause, zu, zw, premise, need in _CLAUSES[pid]:
            region_u = up.s if zu else full & ~up.s
            region_w = up.s if zw else full & ~up.s
            need_rows = getattr(up, need)
            for u in kernels.bits(region_u):
                same = part.masks[block_of[u]] & region_u
                for w in kernels.bits(region_w):
                    report.count("clauses")
                    if premise is not None and not _rel(getattr(up, premise), u, w):
                        continue
                    if pid is PostulateId.RECcomp and _rel(up.le2, w, u):
                        names = m.worlds
                        report.fail(Witness(
                            m, name, e.witness, "REC'", (names[w], names[u]),
                            Implies(e.witness, Dyn(name, e.witness, BoxLeq(e.witness))),
                            relations=(("le*", names[w], names[u], True),),
                        ))
                    elif not same & need_rows[w]:
                        report.fail(_block_witness(m, up, name, e.witness, part, block_of[u], clause,
                                                   u, w, region_u, premise, need))
                    if first_only and not report.passed:
                        return report
    return report


def _block_witness(m, up, op, phi, part, block, clause, u, w, region, premise, need):
    """The characteristic formula of u's block is information true at u
    after the upgrade that no world of the required kind carries."""
    names = m.worlds
    xi = part.characteristic(block)
    after = Dyn(op, phi, xi)
    checks = [(after, names[u], True)]
    for x in kernels.bits(getattr(up, need)[w] & region):
        checks.append((after, names[x], False))
    rel = ((_KIND[premise], names[u], names[w], True),) if premise is not None else ()
    return Witness(m, op, phi, clause, (names[u], names[w]), xi, tuple(checks), rel)


def _registry_with(op, registry):
    registry = registry or DEFAULT_REGISTRY
    if isinstance(op, OperatorDefinition):
        if op.name not in registry or registry[op.name] is not op:
            registry = registry.copy()
            registry.register(op, replace=True)
        return registry, op.name
    registry[op]
    return registry, op


# ---------------------------------------------------------------- schemata

XI = Hole("xi")
XI2 = Hole("xi2")


def _dp_family(o, phi, zone):
    """Four schemata saying the upgrade keeps ``zone`` internally ordered."""
    out = []
    for box in (BoxLeq, BoxLt):
        out.append(Implies(Dyn(o, phi, box(XI)), Implies(zone, box(Implies(zone, Dyn(o, phi, XI))))))
        out.append(Implies(box(Dyn(o, phi, XI)), Implies(zone, Dyn(o, phi, box(Implies(zone, XI))))))
    return out


def _basic(o, phi, atoms):
    out = [Iff(Dyn(o, phi, Atom(a)), Atom(a)) for a in atoms]
    out.append(Iff(Dyn(o, phi, And(XI, XI2)), And(Dyn(o, phi, XI), Dyn(o, phi, XI2))))
    out.append(Iff(Dyn(o, phi, Not(XI)), Not(Dyn(o, phi, XI))))
    out.append(Iff(Dyn(o, phi, BoxAll(XI)), BoxAll(Dyn(o, phi, XI))))
    return out


def _rec_ax(o, phi):
    return [
        Implies(Dyn(o, phi, BoxLt(XI)), Implies(Not(phi), BoxAll(Implies(phi, Dyn(o, phi, XI))))),
        Implies(phi, Dyn(o, phi, BoxLeq(phi))),
    ]


def _cross_ax(o, phi, box, lower, upper):
    """``lower``-worlds below an ``upper``-world stay below it (up to xi)."""
    guarded = Implies(lower, XI)
    return [Implies(Dyn(o, phi, box(guarded)), Implies(upper, box(Dyn(o, phi, guarded))))]


def _lc_ax(o, phi, n):
    zones = (phi, Not(phi))
    after = Dyn(o, phi, XI)

    def level(i, j):
        return [Implies(mu(degree(x, j)), BoxAll(Implies(mu(degree(y, i)), after)))
                for x in zones for y in zones]

    le_pairs = [(i, j) for j in range(1, n + 1) for i in range(1, j + 1)]
    lt_pairs = [(i, j) for j in range(1, n + 1) for i in range(1, j)]
    top = Or(mu(degree(Not(phi), n)), mu(degree(phi, n)))

    def below(k):
        return [And(BoxAll(Implies(mu(degree(phi, i)), after)),
                    BoxAll(Implies(mu(degree(Not(phi), i)), after))) for i in range(1, k + 1)]

    return [
        Implies(Dyn(o, phi, BoxLeq(XI)), conj(f for i, j in le_pairs for f in level(i, j))),
        Implies(Dyn(o, phi, BoxLt(XI)), conj(f for i, j in lt_pairs for f in level(i, j))),
        Implies(conj([top] + below(n)), Dyn(o, phi, BoxLeq(XI))),
        Implies(conj([top] + below(n - 1)), Dyn(o, phi, BoxLt(XI))),
    ]


def _reduction(o, phi, box):
    inner = Dyn(o, phi, XI)
    return Iff(
        Dyn(o, phi, box(XI)),
        And(
            Implies(phi, box(Implies(phi, inner))),
            Implies(Not(phi), And(BoxAll(Implies(phi, inner)), box(Implies(Not(phi), inner)))),
        ),
    )


@lru_cache(maxsize=8192)
def schema_instances(sid: SchemaId, o: str, phi: Formula, atoms: tuple[str, ...] = (),
                     n_bound: int = 1) -> tuple[Formula, ...]:
    """Template formulas for one schema with the operator and ``phi`` filled
    in; ``xi`` (and ``xi2`` for conjunction) remain as holes."""
    return tuple(_templates(sid, o, phi, atoms, n_bound))


def _templates(sid, o, phi, atoms, n_bound):
    if sid is SchemaId.Basic:
        return _basic(o, phi, atoms)
    if sid is SchemaId.FaithAx:
        return [Implies(DiamAll(phi), Iff(mu(phi), Dyn(o, phi, mu(T))))]
    if sid is SchemaId.DP1Ax:
        return _dp_family(o, phi, phi)
    if sid is SchemaId.DP2Ax:
        return _dp_family(o, phi, Not(phi))
    if sid is SchemaId.DP3Ax:
        return _cross_ax(o, phi, BoxLt, phi, Not(phi))
    if sid is SchemaId.DP4Ax:
        return _cross_ax(o, phi, BoxLeq, phi, Not(phi))
    if sid is SchemaId.CR3Ax:
        return _cross_ax(o, phi, BoxLt, Not(phi), phi)
    if sid is SchemaId.CR4Ax:
        return _cross_ax(o, phi, BoxLeq, Not(phi), phi)
    if sid is SchemaId.RECAx:
        return _rec_ax(o, phi)
    if sid is SchemaId.GRAx:
        return [Iff(Or(mu(Not(phi)), mu(T)), Dyn(o, phi, mu(T)))]
    if sid is SchemaId.LCAx:
        return [f for n in range(1, n_bound + 1) for f in _lc_ax(o, phi, n)]
    if sid is SchemaId.LexRevSystem:
        return (_basic(o, phi, atoms) + _dp_family(o, phi, phi) + _dp_family(o, phi, Not(phi))
                + _rec_ax(o, phi))
    if sid is SchemaId.LexRevReduction:
        return _basic(o, phi, atoms) + [_reduction(o, phi, BoxLeq), _reduction(o, phi, BoxLt)]
    raise ValueError(sid)


def _unions(part: Partition) -> list[tuple[tuple[int, ...], int]]:
    out = []
    k = len(part.masks)
    for pick in range(1 << k):
        idx = tuple(i for i in range(k) if pick >> i & 1)
        mask = 0
        for i in idx:
            mask |= part.masks[i]
        out.append((idx, mask))
    return out


def check_schema(
    d: DynamicModel,
    sid: SchemaId,
    n_bound: int | None = None,
    max_blocks: int = DEFAULT_MAX_BLOCKS,
    bisim: Bisimulation | None = None,
    first_only: bool = True,
    extensions: Iterable[Extension] | None = None,
) -> ComplianceReport:
    """Validity of every instance of schema ``sid`` in ``d``."""
    m = d.base
    ev = d.evaluator
    o = d.operator
    if bisim is None:
        bisim = Bisimulation(m, [(o, m.down)], d.registry, ev)
    bound = m.n if n_bound is None else n_bound
    if bound < 1:
        raise PreconditionError("the chain bound must be at least 1")
    report = ComplianceReport(sid.value, registry=d.registry)
    for e in (propositional_extensions(m) if extensions is None else extensions):
        after = ev.apply(o, m.down, e.mask)
        part = bisim.partition(o, after)
        if len(part) > max_blocks:
            raise InstanceSpaceTooLarge(
                f"instance space too large: {len(part)} blocks exceed the cap of {max_blocks}")
        unions = _unions(part)
        for template in schema_instances(sid, o, e.witness, m.atoms, bound):
            names = holes_of(template)
            for assignment in itertools.product(unions, repeat=len(names)):
                env = {h: mask for h, (_, mask) in zip(names, assignment)}
                report.count("instances")
                mask = ev.ext(m.down, template, env)
                if mask != m.full:
                    real = substitute(template, {h: part.union_formula(idx)
                                                 for h, (idx, _) in zip(names, assignment)})
                    bad = m.worlds[kernels.bits(m.full & ~mask)[0]]
                    report.fail(Witness(m, o, e.witness, sid.value, (bad,), real, ((real, bad, False),)))
                    if first_only:
                        return report
    return report


# ----------------------------------------------------- representation check


def representation_crosscheck(
    universe: Iterable[PreferenceModel],
    op: str | OperatorDefinition,
    pair: tuple[PostulateId, SchemaId],
    registry: OperatorRegistry | None = None,
    max_blocks: int = DEFAULT_MAX_BLOCKS,
) -> ComplianceReport:
    """Compare a compliance notion with the schema that should characterise
    it, model by model.  The verdict is ``pass`` when they agree everywhere;
    a disagreement points at a bug in this package."""
    return crosscheck_pairs(universe, op, (pair,), registry, max_blocks)[0]


def crosscheck_pairs(
    universe: Iterable[PreferenceModel],
    op: str | OperatorDefinition,
    pairs: Sequence[tuple[PostulateId, SchemaId]] = REPRESENTATION_PAIRS,
    registry: OperatorRegistry | None = None,
    max_blocks: int = DEFAULT_MAX_BLOCKS,
) -> list[ComplianceReport]:
    """``representation_crosscheck`` for several pairs, sharing the
    equivalence computation between them."""
    registry, name = _registry_with(op, registry)
    reports = []
    for pid, sid in pairs:
        rep = ComplianceReport(f"{pid.value}~{sid.value}", registry=registry)
        rep.stats.update(models=0, compliant=0, valid=0, disagreements=0)
        reports.append(rep)
    for group in _carrier_groups(universe):
        bisim = bisimulation_for_models(group, name, registry)
        for m in group:
            d = DynamicModel(m, name, registry)
            for (pid, sid), rep in zip(pairs, reports):
                comp = check_compliance(name, m, pid, registry, bisim)
                sch = check_schema(d, sid, max_blocks=max_blocks, bisim=bisim)
                rep.stats["models"] += 1
                rep.stats["compliant"] += comp.passed
                rep.stats["valid"] += sch.passed
                if comp.passed != sch.passed:
                    rep.stats["disagreements"] += 1
                    rep.fail((comp.witnesses or sch.witnesses)[0])
    for rep in reports:
        rep.stats["compliant_everywhere"] = rep.stats["compliant"] == rep.stats["models"]
        rep.stats["valid_everywhere"] = rep.stats["valid"] == rep.stats["models"]
    return reports


def _carrier_groups(models: Iterable[PreferenceModel]) -> list[list[PreferenceModel]]:
    groups: dict[tuple, list[PreferenceModel]] = {}
    for m in models:
        groups.setdefault(m.carrier, []).append(m)
    return list(groups.values())


# -------------------------------------------------- conditional belief facts

BELIEF_FACTS = ("dp1syn", "dp2syn", "dp3syn", "dp4syn", "recsyn")


def _belief_templates(fact, o, phi, psi):
    if fact in ("dp1syn", "dp2syn"):
        return [Iff(Dyn(o, psi, belief(XI, phi)), belief(Dyn(o, psi, XI), phi))]
    if fact == "dp3syn":
        return [Implies(belief(phi, Dyn(o, phi, XI)), Dyn(o, phi, belief(phi, XI)))]
    if fact == "dp4syn":
        return [Implies(Not(belief(Not(phi), Dyn(o, phi, XI))), Not(Dyn(o, phi, belief(Not(phi), XI))))]
    if fact == "recsyn":
        return [Implies(DiamAll(And(phi, Dyn(o, phi, XI))), Dyn(o, phi, belief(phi, XI)))]
    raise ValueError(f"unknown fact {fact!r}; expected one of {BELIEF_FACTS}")


def conditional_belief_properties(
    d: DynamicModel,
    fact: str,
    phi: Formula | None = None,
    psi: Formula | None = None,
    max_blocks: int = DEFAULT_MAX_BLOCKS,
    bisim: Bisimulation | None = None,
) -> ComplianceReport:
    """Validity of a conditional-belief consequence of compliance.

    For the two-formula facts, ``phi``/``psi`` range over all definable
    extensions meeting the side condition (inclusion for dp1syn, disjointness
    for dp2syn) unless given explicitly; ``xi`` ranges over unions of blocks
    of the model upgraded by the formula under the dynamic modality.
    """
    if fact not in BELIEF_FACTS:
        raise ValueError(f"unknown fact {fact!r}; expected one of {BELIEF_FACTS}")
    m = d.base
    ev = d.evaluator
    o = d.operator
    if bisim is None:
        bisim = Bisimulation(m, [(o, m.down)], d.registry, ev)
    report = ComplianceReport(fact, registry=d.registry)
    phis = _extensions(m, phi)
    two = fact in ("dp1syn", "dp2syn")
    psis = _extensions(m, psi) if two else [None]
    for ep in phis:
        for eq in psis:
            if two:
                side = ep.mask & ~eq.mask if fact == "dp1syn" else ep.mask & eq.mask
                if side:
                    continue
                upgrade_by = eq
            else:
                upgrade_by = ep
            part = bisim.partition(o, ev.apply(o, m.down, upgrade_by.mask))
            if len(part) > max_blocks:
                raise InstanceSpaceTooLarge(
                    f"instance space too large: {len(part)} blocks exceed the cap of {max_blocks}")
            for template in _belief_templates(fact, o, ep.witness, eq.witness if eq else None):
                for idx, mask in _unions(part):
                    report.count("instances")
                    got = ev.ext(m.down, template, {"xi": mask})
                    if got != m.full:
                        real = substitute(template, {"xi": part.union_formula(idx)})
                        bad = m.worlds[kernels.bits(m.full & ~got)[0]]
                        report.fail(Witness(m, o, upgrade_by.witness, fact, (bad,), real,
                                            ((real, bad, False),)))
                        return report
    return report
