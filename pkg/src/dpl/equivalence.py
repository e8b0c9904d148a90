"""Modal equivalence of worlds in dynamic preference models.

States are pairs (model, world) over the closure of a model under its
operator.  Partition refinement on the transition system with edges for
``<=`` and ``<`` predecessors, the global modality, and one upgrade edge per
definable extension computes modal equivalence exactly (the system is
finite, so bisimilarity and modal equivalence coincide).  Every split is
recorded together with the component that caused it, which yields concrete
distinguishing formulas afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from dpl import kernels
from dpl.errors import ModelError
from dpl.formula import (Atom, DiamAll, DiamLeq, DiamLt, Dyn, Formula, Not, T, conj, disj)
from dpl.model import PreferenceModel, propositional_extensions
from dpl.operators import DEFAULT_REGISTRY, OperatorRegistry
from dpl.semantics import DynamicModel, Evaluator, evaluator_for


class Bisimulation:
    """Modal equivalence classes for every state reachable from ``roots``.

    ``roots`` are ``(operator name, order rows)`` pairs over the carrier of
    ``model``.  Different roots may use different operators.
    """

    def __init__(
        self,
        model: PreferenceModel,
        roots: Iterable[tuple[str, tuple[int, ...]]],
        registry: OperatorRegistry | None = None,
        evaluator: Evaluator | None = None,
    ):
        self.carrier = model
        self.n = model.n
        self.ev = evaluator or evaluator_for(model, registry)
        exts = propositional_extensions(model)
        self.ext_masks = [e.mask for e in exts]
        self.ext_witness = [e.witness for e in exts]
        self._explore(list(roots))
        self._refine()
        self._dist: dict[tuple[int, int], Formula] = {}

    # -- construction --------------------------------------------------
    def _explore(self, roots):
        ev = self.ev
        self.models: list[tuple[str, tuple[int, ...]]] = []
        self.index: dict[tuple[str, tuple[int, ...]], int] = {}
        self.succ: list[list[int]] = []
        for r in roots:
            if r not in self.index:
                self.index[r] = len(self.models)
                self.models.append(r)
        i = 0
        while i < len(self.models):
            op, down = self.models[i]
            row = []
            for s in self.ext_masks:
                key = (op, ev.apply(op, down, s))
                j = self.index.get(key)
                if j is None:
                    j = self.index[key] = len(self.models)
                    self.models.append(key)
                row.append(j)
            self.succ.append(row)
            i += 1
        n = self.n
        self.preds = []
        self.spreds = []
        for op, down in self.models:
            sd = ev.strict(down)
            self.preds.extend(kernels.bits(down[w]) for w in range(n))
            self.spreds.extend(kernels.bits(sd[w]) for w in range(n))

    def _refine(self):
        n = self.n
        count = len(self.models) * n
        vals = self.carrier.val
        ids: dict = {}
        cls = []
        for st in range(count):
            w = st % n
            sig = tuple(v >> w & 1 for v in vals)
            cls.append(ids.setdefault(sig, len(ids)))
        self.history = [cls]
        while True:
            classes_of_model = [frozenset(cls[m * n:(m + 1) * n]) for m in range(len(self.models))]
            ids = {}
            new = []
            for st in range(count):
                m, w = divmod(st, n)
                base = m * n
                sig = (
                    cls[st],
                    frozenset(cls[base + u] for u in self.preds[st]),
                    frozenset(cls[base + u] for u in self.spreds[st]),
                    tuple(cls[j * n + w] for j in self.succ[m]),
                    classes_of_model[m],
                )
                new.append(ids.setdefault(sig, len(ids)))
            if len(ids) == len(set(cls)):
                break
            self.history.append(new)
            cls = new
        self.final = cls

    # -- queries -------------------------------------------------------
    def state(self, op: str, down: tuple[int, ...], world: int) -> int:
        return self.index[(op, down)] * self.n + world

    def classes(self, op: str, down: tuple[int, ...]) -> list[int]:
        m = self.index[(op, down)]
        return self.final[m * self.n:(m + 1) * self.n]

    def partition(self, op: str, down: tuple[int, ...]) -> "Partition":
        cls = self.classes(op, down)
        groups: dict[int, int] = {}
        for w, c in enumerate(cls):
            groups[c] = groups.get(c, 0) | 1 << w
        masks = sorted(groups.values(), key=lambda m: m & -m)
        blocks = tuple(self.carrier.names(m) for m in masks)
        return Partition(blocks, tuple(masks), self, (op, down))

    def equivalent(self, s: int, t: int) -> bool:
        return self.final[s] == self.final[t]

    def distinguish(self, s: int, t: int) -> Formula:
        """A formula true at state ``s`` and false at state ``t``."""
        if self.final[s] == self.final[t]:
            raise ValueError("states are modally equivalent")
        key = (s, t)
        f = self._dist.get(key)
        if f is None:
            f = self._dist[key] = self._build(s, t)
        return f

    def _build(self, s, t):
        n = self.n
        r = next(i for i, h in enumerate(self.history) if h[s] != h[t])
        ms, ws = divmod(s, n)
        mt, wt = divmod(t, n)
        if r == 0:
            for a, v in zip(self.carrier.atoms, self.carrier.val):
                if (v >> ws & 1) != (v >> wt & 1):
                    return Atom(a) if v >> ws & 1 else Not(Atom(a))
            raise AssertionError("states split at round 0 must differ on an atom")
        prev = self.history[r - 1]
        bs, bt = ms * n, mt * n
        for edges, diamond in ((self.preds, DiamLeq), (self.spreds, DiamLt)):
            ps = [bs + u for u in edges[s]]
            pt = [bt + v for v in edges[t]]
            cs = {prev[x] for x in ps}
            ct = {prev[y] for y in pt}
            for x in ps:
                if prev[x] not in ct:
                    return diamond(conj(dict.fromkeys(self.distinguish(x, y) for y in pt)))
            for y in pt:
                if prev[y] not in cs:
                    return Not(diamond(conj(dict.fromkeys(self.distinguish(y, x) for x in ps))))
        for k, (js, jt) in enumerate(zip(self.succ[ms], self.succ[mt])):
            s2, t2 = js * n + ws, jt * n + wt
            if prev[s2] != prev[t2]:
                return Dyn(self.models[ms][0], self.ext_witness[k], self.distinguish(s2, t2))
        world_s = range(bs, bs + n)
        world_t = range(bt, bt + n)
        cs = {prev[x] for x in world_s}
        ct = {prev[y] for y in world_t}
        for x in world_s:
            if prev[x] not in ct:
                return DiamAll(conj(dict.fromkeys(self.distinguish(x, y) for y in world_t)))
        for y in world_t:
            if prev[y] not in cs:
                return Not(DiamAll(conj(dict.fromkeys(self.distinguish(y, x) for x in world_s))))
        raise AssertionError("no component explains the split")


@dataclass(frozen=True)
class Partition:
    """Modal-equivalence blocks of one dynamic model, ordered by their first
    world.  Separators and characteristic formulas are built on demand."""

    blocks: tuple[frozenset[str], ...]
    masks: tuple[int, ...] = field(repr=False)
    _bisim: Bisimulation = field(repr=False, compare=False)
    _key: tuple = field(repr=False, compare=False)

    def __len__(self):
        return len(self.blocks)

    def block_index(self, world: str) -> int:
        for i, b in enumerate(self.blocks):
            if world in b:
                return i
        raise ModelError(f"unknown world {world!r}")

    def _rep_state(self, i: int) -> int:
        b = self._bisim
        return b.index[self._key] * b.n + kernels.bits(self.masks[i])[0]

    def separator(self, i: int, j: int) -> Formula:
        """True throughout block ``i`` and false throughout block ``j``."""
        return self._bisim.distinguish(self._rep_state(i), self._rep_state(j))

    @property
    def separators(self) -> dict[tuple[int, int], Formula]:
        k = len(self.blocks)
        return {(i, j): self.separator(i, j) for i in range(k) for j in range(k) if i != j}

    def characteristic(self, i: int) -> Formula:
        seps = dict.fromkeys(self.separator(i, j) for j in range(len(self.blocks)) if j != i)
        return conj(seps)

    def union_formula(self, picks: Iterable[int]) -> Formula:
        picks = sorted(set(picks))
        if len(picks) == len(self.blocks):
            return T
        return disj(self.characteristic(i) for i in picks)


_BISIM_CACHE: dict = {}


def bisimulation_for(d: DynamicModel) -> Bisimulation:
    key = (d.base.carrier, d.operator, d.base.down, id(d.registry))
    b = _BISIM_CACHE.get(key)
    if b is None:
        if len(_BISIM_CACHE) > 64:
            _BISIM_CACHE.clear()
        b = _BISIM_CACHE[key] = Bisimulation(d.base, [(d.operator, d.base.down)], d.registry)
    return b


def dynamic_equivalence(d: DynamicModel, bisim: Bisimulation | None = None) -> Partition:
    b = bisim or bisimulation_for(d)
    return b.partition(d.operator, d.base.down)


def characteristic_formula(p: Partition, block: int | Iterable[str]) -> Formula:
    if not isinstance(block, int):
        block = p.blocks.index(frozenset(block))
    return p.characteristic(block)


def union_formula(p: Partition, blocks: Iterable[int]) -> Formula:
    return p.union_formula(blocks)


def _renamed(m: PreferenceModel, pairing: Mapping[str, str], target: PreferenceModel) -> PreferenceModel:
    back = {v: k for k, v in pairing.items()}
    valuation = {a: [back[w] for w in ws] for a, ws in m.valuation.items()}
    leq = [(back[u], back[w]) for u, w in m.leq]
    return PreferenceModel.build(target.worlds, m.atoms, valuation, leq)


def modally_equivalent_models(
    d1: DynamicModel,
    d2: DynamicModel,
    pairing: Mapping[str, str],
) -> bool:
    """True iff every world of ``d1`` satisfies exactly the formulas that its
    partner under ``pairing`` satisfies in ``d2``.  Each side interprets the
    dynamic modality with its own operator."""
    m1, m2 = d1.base, d2.base
    if set(pairing) != set(m1.worlds) or sorted(pairing.values()) != sorted(m2.worlds):
        raise ModelError("pairing must be a bijection between the two world sets")
    if set(m1.atoms) != set(m2.atoms):
        raise ModelError("models must share their atoms")
    m2r = _renamed(m2, pairing, m1)
    if m2r.valuation != {a: m1.valuation[a] for a in m2r.atoms}:
        return False
    m2r = PreferenceModel(m1.worlds, m1.atoms, m1.val, m2r.down)
    if d1.registry is not d2.registry:
        registry = d1.registry.copy()
        for name in d2.registry.names():
            if name not in registry:
                registry.register(d2.registry[name])
            elif registry[name] is not d2.registry[name]:
                raise ModelError(f"operator name {name!r} means different things in the two models")
    else:
        registry = d1.registry
    b = Bisimulation(m1, [(d1.operator, m1.down), (d2.operator, m2r.down)], registry)
    c1 = b.classes(d1.operator, m1.down)
    c2 = b.classes(d2.operator, m2r.down)
    return c1 == c2


def refines(fine: Sequence[frozenset], coarse: Sequence[frozenset]) -> bool:
    return all(any(b <= c for c in coarse) for b in fine)
