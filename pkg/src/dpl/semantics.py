"""Truth of formulas in dynamic preference models."""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from dpl import kernels
from dpl.formula import (And, Atom, BoxAll, BoxLeq, BoxLt, Bot, DiamAll, DiamLeq, DiamLt, Dyn,
                         Formula, Hole, Iff, Implies, Not, Or, Top)
from dpl.model import PreferenceModel, propositional_extensions
from dpl.operators import DEFAULT_REGISTRY, OperatorRegistry, transform_checked


class Evaluator:
    """Computes extensions (as bitmasks) over all orders on one carrier.

    Results for hole-free formulas are memoised per order, as are operator
    applications, so repeated checks over a closure of models stay cheap.
    """

    def __init__(self, worlds, atoms, val, registry: OperatorRegistry):
        self.worlds = tuple(worlds)
        self.n = len(self.worlds)
        self.full = (1 << self.n) - 1
        self.atom_masks = dict(zip(atoms, val))
        self.registry = registry
        self._memo: dict = {}
        self._strict: dict = {}
        self._applied: dict = {}

    @classmethod
    def for_model(cls, m: PreferenceModel, registry: OperatorRegistry | None = None) -> "Evaluator":
        return cls(m.worlds, m.atoms, m.val, registry or DEFAULT_REGISTRY)

    def strict(self, down):
        sd = self._strict.get(down)
        if sd is None:
            sd = self._strict[down] = kernels.strict_down(down, self.n)
        return sd

    def apply(self, op_name: str, down, s: int):
        key = (op_name, down, s)
        out = self._applied.get(key)
        if out is None:
            out = transform_checked(self.registry[op_name], self.worlds, down, s)
            self._applied[key] = out
        return out

    def ext(self, down, f: Formula, env: Mapping[str, int] | None = None) -> int:
        if f.closed:
            key = (down, f)
            hit = self._memo.get(key)
            if hit is None:
                hit = self._memo[key] = self._eval(down, f, env)
            return hit
        return self._eval(down, f, env)

    def _eval(self, down, f, env):
        n, full, ext = self.n, self.full, self.ext
        t = type(f)
        if t is Atom:
            return self.atom_masks.get(f.name, 0)
        if t is Top:
            return full
        if t is Bot:
            return 0
        if t is Hole:
            if env is None or f.name not in env:
                raise KeyError(f"unbound hole {f.name!r}")
            return env[f.name]
        if t is Not:
            return full & ~ext(down, f.sub, env)
        if t is And:
            return ext(down, f.left, env) & ext(down, f.right, env)
        if t is Or:
            return ext(down, f.left, env) | ext(down, f.right, env)
        if t is Implies:
            return (full & ~ext(down, f.left, env)) | ext(down, f.right, env)
        if t is Iff:
            return full & ~(ext(down, f.left, env) ^ ext(down, f.right, env))
        if t is BoxAll:
            return full if ext(down, f.sub, env) == full else 0
        if t is DiamAll:
            return full if ext(down, f.sub, env) else 0
        if t is BoxLeq:
            return kernels.box(down, n, ext(down, f.sub, env))
        if t is DiamLeq:
            return kernels.diamond(down, n, ext(down, f.sub, env))
        if t is BoxLt:
            return kernels.box(self.strict(down), n, ext(down, f.sub, env))
        if t is DiamLt:
            return kernels.diamond(self.strict(down), n, ext(down, f.sub, env))
        if t is Dyn:
            s = ext(down, f.arg, env)
            return ext(self.apply(f.operator, down, s), f.body, env)
        raise TypeError(f"not a formula: {f!r}")


_EVALUATORS: "weakref.WeakKeyDictionary[OperatorRegistry, dict]" = weakref.WeakKeyDictionary()


def evaluator_for(m: PreferenceModel, registry: OperatorRegistry | None = None) -> Evaluator:
    """Shared evaluator for the carrier of ``m`` (memo tables are reused)."""
    registry = registry or DEFAULT_REGISTRY
    per_reg = _EVALUATORS.setdefault(registry, {})
    ev = per_reg.get(m.carrier)
    if ev is None:
        if len(per_reg) > 256:
            per_reg.clear()
        ev = per_reg[m.carrier] = Evaluator.for_model(m, registry)
    return ev


@dataclass(frozen=True)
class DynamicModel:
    """A preference model paired with its designated upgrade operator.

    Dynamic modalities inside formulas name their own operator, looked up in
    ``registry``; ``operator`` is the one used by equivalence, compliance and
    schema checks.
    """

    base: PreferenceModel
    operator: str
    registry: OperatorRegistry = field(default=DEFAULT_REGISTRY, compare=False, repr=False)

    def __post_init__(self):
        self.registry[self.operator]  # raises for unknown names

    @property
    def evaluator(self) -> Evaluator:
        return evaluator_for(self.base, self.registry)

    def at(self, down) -> "DynamicModel":
        return DynamicModel(self.base.with_relation(down), self.operator, self.registry)


def truth_set(d: DynamicModel, f: Formula) -> frozenset[str]:
    return d.base.names(d.evaluator.ext(d.base.down, f))


def satisfies(d: DynamicModel, world: str, f: Formula) -> bool:
    i = d.base.index(world)
    return bool(d.evaluator.ext(d.base.down, f) >> i & 1)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    counterexample: str | None = None
    model: PreferenceModel | None = None

    def __bool__(self):
        return self.valid


def valid_in_model(d: DynamicModel, f: Formula) -> Verdict:
    m = d.base
    mask = d.evaluator.ext(m.down, f)
    if mask == m.full:
        return Verdict(True)
    bad = kernels.bits(m.full & ~mask)[0]
    return Verdict(False, m.worlds[bad], m)


@dataclass(frozen=True)
class ModelClass:
    members: tuple[DynamicModel, ...]

    @classmethod
    def of(cls, models: Iterable[PreferenceModel], operator: str,
           registry: OperatorRegistry | None = None) -> "ModelClass":
        reg = registry or DEFAULT_REGISTRY
        return cls(tuple(DynamicModel(m, operator, reg) for m in models))


def valid_in_class(c: ModelClass, f: Formula) -> Verdict:
    for d in c.members:
        v = valid_in_model(d, f)
        if not v:
            return v
    return Verdict(True)


def reachable_models(d: DynamicModel) -> frozenset[PreferenceModel]:
    """Every model obtained from ``d.base`` by finitely many upgrades with
    ``d.operator`` by propositionally definable sets (``d.base`` included)."""
    return frozenset(d.base.with_relation(r) for r in reachable_orders(d))


def reachable_orders(d: DynamicModel) -> list[tuple[int, ...]]:
    ev = d.evaluator
    masks = [e.mask for e in propositional_extensions(d.base)]
    seen = {d.base.down: None}
    order = [d.base.down]
    i = 0
    while i < len(order):
        cur = order[i]
        i += 1
        for s in masks:
            nxt = ev.apply(d.operator, cur, s)
            if nxt not in seen:
                seen[nxt] = None
                order.append(nxt)
    return order
