"""Upgrade operators: lexicographic revision and contraction, the identity,
and finite lookup tables, all resolved through a named registry."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping

from dpl import kernels
from dpl.errors import ModelError, OperatorNotClosedError, UnknownOperatorError
from dpl.formula import IDENT, Formula
from dpl.model import PreferenceModel, prop_mask


def _identity(down, n, s):
    return down


BUILTIN_KERNELS: dict[str, Callable] = {
    "rev": kernels.lex_revise,
    "ctr": kernels.lex_contract,
    "id": _identity,
}


@dataclass(frozen=True)
class OperatorDefinition:
    """A named map from (order, extension) to a new order on the same worlds.

    ``kind`` is ``"builtin"`` or ``"table"``.  A table is keyed by
    ``(worlds, order rows, extension mask)``; keys it does not list map to
    the identity.
    """

    name: str
    kind: str
    table: Mapping[tuple, tuple] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not IDENT.match(self.name):
            raise ValueError(f"bad operator name {self.name!r}")
        if self.kind == "builtin" and self.name not in BUILTIN_KERNELS:
            raise ValueError(f"no builtin operator called {self.name!r}")

    def transform(self, worlds: tuple[str, ...], down: tuple[int, ...], s: int) -> tuple[int, ...]:
        if self.kind == "builtin":
            return BUILTIN_KERNELS[self.name](down, len(worlds), s)
        canon = tuple(sorted(worlds))
        if canon == worlds:
            return self.table.get((worlds, down, s), down)
        perm = [worlds.index(w) for w in canon]  # canonical slot -> local index
        cdown, cs = _permute(down, s, perm)
        out = self.table.get((canon, cdown, cs))
        if out is None:
            return down
        inverse = [0] * len(perm)
        for slot, local in enumerate(perm):
            inverse[local] = slot
        return _permute(out, 0, inverse)[0]


def _permute(down, s, perm):
    """Re-index rows so that new index ``i`` is old index ``perm[i]``."""
    where = {old: new for new, old in enumerate(perm)}
    rows = []
    for old in perm:
        row = 0
        for u in kernels.bits(down[old]):
            row |= 1 << where[u]
        rows.append(row)
    ns = 0
    for u in kernels.bits(s):
        ns |= 1 << where[u]
    return tuple(rows), ns


class OperatorRegistry:
    def __init__(self, ops: Iterable[OperatorDefinition] = ()):
        self._ops: dict[str, OperatorDefinition] = {}
        for op in ops:
            self.register(op)

    def register(self, op: OperatorDefinition, replace: bool = False) -> None:
        if op.name in self._ops and not replace:
            raise ValueError(f"operator {op.name!r} already registered")
        self._ops[op.name] = op

    def __getitem__(self, name: str) -> OperatorDefinition:
        try:
            return self._ops[name]
        except KeyError:
            raise UnknownOperatorError(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._ops

    def names(self) -> list[str]:
        return sorted(self._ops)

    def copy(self) -> "OperatorRegistry":
        return OperatorRegistry(self._ops.values())


def default_registry() -> OperatorRegistry:
    reg = OperatorRegistry(OperatorDefinition(name, "builtin") for name in BUILTIN_KERNELS)
    text = resources.files("dpl").joinpath("fixtures").joinpath("fact41_star.json").read_text()
    reg.register(table_from_json("fact41_star", json.loads(text)))
    return reg


def resolve(op: str | OperatorDefinition, registry: OperatorRegistry | None = None) -> OperatorDefinition:
    if isinstance(op, OperatorDefinition):
        return op
    return (registry or DEFAULT_REGISTRY)[op]


def transform_checked(op: OperatorDefinition, worlds, down, s) -> tuple[int, ...]:
    out = op.transform(worlds, down, s)
    if len(out) != len(worlds) or not kernels.is_preorder(out, len(worlds)):
        raise OperatorNotClosedError(
            f"operator not closed: {op.name!r} did not return a preorder on the same worlds")
    return out


def apply(
    op: str | OperatorDefinition,
    m: PreferenceModel,
    f: Formula,
    registry: OperatorRegistry | None = None,
) -> PreferenceModel:
    """Upgrade ``m`` by the propositional formula ``f``."""
    if not f.propositional:
        raise ValueError("non-propositional operator argument")
    opdef = resolve(op, registry)
    return m.with_relation(transform_checked(opdef, m.worlds, m.down, prop_mask(m, f)))


def lex_revise(m: PreferenceModel, f: Formula) -> PreferenceModel:
    return apply(DEFAULT_REGISTRY["rev"], m, f)


def lex_contract(m: PreferenceModel, f: Formula) -> PreferenceModel:
    return apply(DEFAULT_REGISTRY["ctr"], m, f)


# ------------------------------------------------------------------ tables


def _rows(worlds: tuple[str, ...], pairs: Iterable) -> tuple[int, ...]:
    index = {w: i for i, w in enumerate(worlds)}
    rows = [0] * len(worlds)
    for pair in pairs:
        if len(pair) != 2:
            raise ModelError("order entries must be pairs")
        u, w = pair
        if u not in index or w not in index:
            raise ModelError(f"pair ({u}, {w}) mentions a world outside {list(worlds)}")
        rows[index[w]] |= 1 << index[u]
    return tuple(rows)


def _pairs(worlds: tuple[str, ...], rows: tuple[int, ...]) -> list[list[str]]:
    return sorted([worlds[u], worlds[w]] for w in range(len(worlds)) for u in kernels.bits(rows[w]))


def table_from_json(name: str, entries: list[Mapping]) -> OperatorDefinition:
    table = {}
    for entry in entries:
        try:
            model_pairs, ext, out_pairs = entry["model"], entry["extension"], entry["output"]
        except (KeyError, TypeError):
            raise ModelError("table entries need model, extension and output") from None
        names = {w for p in model_pairs for w in p}
        worlds = tuple(sorted(names))
        if set(ext) - names:
            raise ModelError(f"extension {ext} mentions unknown worlds")
        down = _rows(worlds, model_pairs)
        out = _rows(worlds, out_pairs)
        if not kernels.is_preorder(down, len(worlds)) or not kernels.is_preorder(out, len(worlds)):
            raise ModelError("table entries must map preorders to preorders")
        s = 0
        for w in ext:
            s |= 1 << worlds.index(w)
        table[(worlds, down, s)] = out
    return OperatorDefinition(name, "table", table)


def table_to_json(op: OperatorDefinition) -> list[dict]:
    entries = []
    for (worlds, down, s), out in op.table.items():
        entries.append(
            {
                "model": _pairs(worlds, down),
                "extension": sorted(worlds[i] for i in kernels.bits(s)),
                "output": _pairs(worlds, out),
            }
        )
    entries.sort(key=lambda e: (e["model"], e["extension"]))
    return entries


def load_table(name: str, path: str | Path) -> OperatorDefinition:
    with open(path) as fh:
        return table_from_json(name, json.load(fh))


NOISE_LEVELS = (0.0, 0.05, 0.15, 0.4, 1.0)


def make_table_operator(
    seed: int,
    universe: Iterable[PreferenceModel],
    name: str | None = None,
) -> OperatorDefinition:
    """A pseudo-random table operator closed over the orders of ``universe``.

    Each seed picks a base behaviour (identity, revision or contraction) and
    a noise rate; every (order, extension) entry follows the base behaviour
    except that, at the noise rate, it is replaced by a random order of the
    universe or by the base output with one extra pair added and re-closed.
    """
    rng = random.Random(seed)
    base = rng.choice(("id", "rev", "ctr"))
    noise = rng.choice(NOISE_LEVELS)
    orders: dict[tuple[str, ...], set[tuple[int, ...]]] = {}
    for m in universe:
        canon = tuple(sorted(m.worlds))
        down, _ = _permute(m.down, 0, [m.worlds.index(w) for w in canon])
        orders.setdefault(canon, set()).add(down)
    table = {}
    for worlds in sorted(orders):
        n = len(worlds)
        pool = sorted(orders[worlds])
        for down in pool:
            for s in range(1 << n):
                out = BUILTIN_KERNELS[base](down, n, s)
                if rng.random() < noise:
                    if rng.random() < 0.5 or n < 2:
                        out = rng.choice(pool)
                    else:
                        u, w = rng.sample(range(n), 2)
                        rows = list(out)
                        rows[w] |= 1 << u
                        out = kernels.closure(tuple(rows), n)
                if out != down:
                    table[(worlds, down, s)] = out
    return OperatorDefinition(name or f"tbl{seed}", "table", table)


DEFAULT_REGISTRY = default_registry()
