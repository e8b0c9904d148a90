"""Finite preference models: worlds, a valuation and a plausibility preorder.

``u <= w`` reads "u is at least as plausible as w".  Internally the order is
kept as a tuple of bitmask rows (``down[w]`` holds every ``u <= w``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from dpl import kernels
from dpl.errors import ModelError, PreconditionError
from dpl.formula import (And, Atom, Bot, Formula, Iff, Implies, Not, Or, Top, conj, disj, F,
                         T)


@dataclass(frozen=True)
class PreferenceModel:
    worlds: tuple[str, ...]
    atoms: tuple[str, ...]
    val: tuple[int, ...]
    down: tuple[int, ...]

    # -- construction --------------------------------------------------
    @classmethod
    def build(
        cls,
        worlds: Iterable[str],
        atoms: Iterable[str],
        valuation: Mapping[str, Iterable[str]],
        leq: Iterable[tuple[str, str]],
        close: bool = False,
    ) -> "PreferenceModel":
        worlds = tuple(worlds)
        atoms = tuple(atoms)
        if len(set(worlds)) != len(worlds):
            raise ModelError("duplicate world names")
        if len(set(atoms)) != len(atoms):
            raise ModelError("duplicate atom names")
        index = {w: i for i, w in enumerate(worlds)}
        unknown = set(valuation) - set(atoms)
        if unknown:
            raise ModelError(f"valuation mentions undeclared atoms {sorted(unknown)}")
        val = []
        for a in atoms:
            mask = 0
            for w in valuation.get(a, ()):
                if w not in index:
                    raise ModelError(f"valuation of {a} mentions unknown world {w!r}")
                mask |= 1 << index[w]
            val.append(mask)
        down = [0] * len(worlds)
        for u, w in leq:
            if u not in index or w not in index:
                raise ModelError(f"order pair ({u}, {w}) mentions an unknown world")
            down[index[w]] |= 1 << index[u]
        down = tuple(down)
        if close:
            down = kernels.closure(down, len(worlds))
        return cls(worlds, atoms, tuple(val), down)

    def with_relation(self, down: tuple[int, ...]) -> "PreferenceModel":
        return PreferenceModel(self.worlds, self.atoms, self.val, down)

    # -- basic views ---------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.worlds)

    @property
    def full(self) -> int:
        return (1 << len(self.worlds)) - 1

    @property
    def carrier(self) -> tuple:
        """Everything except the order; models sharing it share extensions."""
        return (self.worlds, self.atoms, self.val)

    def index(self, world: str) -> int:
        try:
            return self.worlds.index(world)
        except ValueError:
            raise ModelError(f"unknown world {world!r}") from None

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for w in names:
            m |= 1 << self.index(w)
        return m

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.worlds[i] for i in kernels.bits(mask))

    def sorted_names(self, mask: int) -> list[str]:
        return [self.worlds[i] for i in kernels.bits(mask)]

    @property
    def leq(self) -> frozenset[tuple[str, str]]:
        return frozenset(
            (self.worlds[u], self.worlds[w]) for w in range(self.n) for u in kernels.bits(self.down[w])
        )

    @property
    def valuation(self) -> dict[str, frozenset[str]]:
        return {a: self.names(m) for a, m in zip(self.atoms, self.val)}

    def fingerprint(self) -> tuple[tuple[str, str], ...]:
        """Canonical sorted pair list of the order (used as a table key)."""
        return tuple(sorted(self.leq))

    def key(self) -> str:
        """Compact, stable identifier including the valuation."""
        order = ",".join(f"{u}<={w}" for u, w in self.fingerprint() if u != w)
        val = ";".join(f"{a}:{'/'.join(self.sorted_names(m))}" for a, m in zip(self.atoms, self.val))
        return f"{{{order}}}[{val}]"

    def le(self, u: int, w: int) -> bool:
        return bool(self.down[w] >> u & 1)


# ------------------------------------------------------------- validation


def validate(m: PreferenceModel) -> list[str]:
    """Violations of reflexivity and transitivity; empty when ``m`` is fine."""
    out = []
    for w in range(m.n):
        if not m.down[w] >> w & 1:
            out.append(f"irreflexive at {m.worlds[w]}")
    for w in range(m.n):
        for v in kernels.bits(m.down[w]):
            for u in kernels.bits(m.down[v] & ~m.down[w]):
                out.append(f"non-transitive ({m.worlds[u]},{m.worlds[v]},{m.worlds[w]})")
    return out


def strict(m: PreferenceModel) -> frozenset[tuple[str, str]]:
    sd = kernels.strict_down(m.down, m.n)
    return frozenset((m.worlds[u], m.worlds[w]) for w in range(m.n) for u in kernels.bits(sd[w]))


def is_total(m: PreferenceModel) -> bool:
    for u in range(m.n):
        for w in range(m.n):
            if not (m.le(u, w) or m.le(w, u)):
                return False
    return True


def min_worlds(m: PreferenceModel, s: Iterable[str]) -> frozenset[str]:
    return m.names(kernels.minimal(m.down, m.n, m.mask(s)))


def implausibility_degree(m: PreferenceModel, s: Iterable[str], w: str) -> int:
    """Length of the longest strict chain of ``s``-worlds ending at ``w``."""
    mask = m.mask(s)
    if not mask >> m.index(w) & 1:
        raise PreconditionError(f"{w} is not in the given set")
    deg = kernels.degrees(m.down, m.n, mask)
    return deg[m.index(w)]


# ------------------------------------------------------------- extensions


def prop_mask(m: PreferenceModel, f: Formula) -> int:
    if isinstance(f, Atom):
        if f.name not in m.atoms:
            return 0
        return m.val[m.atoms.index(f.name)]
    if isinstance(f, Top):
        return m.full
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Not):
        return m.full & ~prop_mask(m, f.sub)
    if isinstance(f, And):
        return prop_mask(m, f.left) & prop_mask(m, f.right)
    if isinstance(f, Or):
        return prop_mask(m, f.left) | prop_mask(m, f.right)
    if isinstance(f, Implies):
        return (m.full & ~prop_mask(m, f.left)) | prop_mask(m, f.right)
    if isinstance(f, Iff):
        return m.full & ~(prop_mask(m, f.left) ^ prop_mask(m, f.right))
    raise ValueError(f"not a propositional formula: {f}")


def extension(m: PreferenceModel, f: Formula) -> frozenset[str]:
    if not f.propositional:
        raise ValueError(f"not a propositional formula: {f}")
    return m.names(prop_mask(m, f))


@dataclass(frozen=True)
class Extension:
    mask: int
    worlds: frozenset[str]
    witness: Formula


def _literal_conj(m: PreferenceModel, w: int) -> Formula:
    lits = []
    for a, mask in zip(m.atoms, m.val):
        lits.append(Atom(a) if mask >> w & 1 else Not(Atom(a)))
    return conj(lits)


def propositional_extensions(m: PreferenceModel) -> tuple[Extension, ...]:
    """Every world set definable by a propositional formula, ordered by mask,
    each with a DNF witness (``T`` and ``F`` for the full and empty sets)."""
    return _extensions_of(m.worlds, m.atoms, m.val)


@lru_cache(maxsize=1024)
def _extensions_of(worlds, atoms, val) -> tuple[Extension, ...]:
    m = PreferenceModel(worlds, atoms, val, tuple(1 << i for i in range(len(worlds))))
    types: dict[int, int] = {}
    for w in range(m.n):
        sig = tuple(mask >> w & 1 for mask in m.val)
        types.setdefault(sig, 0)
        types[sig] |= 1 << w
    classes = sorted(types.values())
    reps = {c: kernels.bits(c)[0] for c in classes}
    out = []
    for r in range(len(classes) + 1):
        for pick in itertools.combinations(classes, r):
            mask = 0
            for c in pick:
                mask |= c
            if mask == m.full:
                witness = T
            elif mask == 0:
                witness = F
            else:
                witness = disj(_literal_conj(m, reps[c]) for c in pick)
            out.append(Extension(mask, m.names(mask), witness))
    out.sort(key=lambda e: e.mask)
    return tuple(out)


# --------------------------------------------------------------------- IO


def from_json(data: Mapping) -> PreferenceModel:
    try:
        worlds = data["worlds"]
        atoms = data.get("atoms", [])
        valuation = data.get("valuation", {})
        leq = [tuple(p) for p in data.get("leq", [])]
        closure = data.get("closure", "none")
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed model: {exc}") from None
    if closure not in ("none", "reflexive_transitive"):
        raise ModelError(f"unknown closure mode {closure!r}")
    if any(len(p) != 2 for p in leq):
        raise ModelError("order entries must be pairs")
    m = PreferenceModel.build(worlds, atoms, valuation, leq, close=closure == "reflexive_transitive")
    problems = validate(m)
    if problems:
        raise ModelError("; ".join(problems[:5]))
    return m


def to_json(m: PreferenceModel) -> dict:
    return {
        "worlds": list(m.worlds),
        "atoms": list(m.atoms),
        "valuation": {a: m.sorted_names(mask) for a, mask in zip(m.atoms, m.val)},
        "leq": [list(p) for p in m.fingerprint()],
        "closure": "none",
    }


def load_model(path: str | Path) -> PreferenceModel:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: {exc}") from None
    return from_json(data)


def dump_model(m: PreferenceModel, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json(m), fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------- fixtures

FIXTURES = {"E1": "E1.json", "F1_M1": "F1_M1.json", "F1_M2": "F1_M2.json"}
FIXTURE_ALIASES = {"F1": "F1_M1"}


def fixture_text(name: str) -> str:
    name = FIXTURE_ALIASES.get(name, name)
    if name not in FIXTURES:
        raise ModelError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}")
    return resources.files("dpl").joinpath("fixtures").joinpath(FIXTURES[name]).read_text()


def fixture(name: str) -> PreferenceModel:
    return from_json(json.loads(fixture_text(name)))
