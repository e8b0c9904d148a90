"""Model universes, random generation and batch audits."""

from __future__ import annotations

import hashlib
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from dpl import kernels
from dpl.equivalence import Bisimulation
from dpl.errors import ConfigError, DplError
from dpl.formula import (And, Atom, BoxAll, BoxLeq, BoxLt, DiamAll, DiamLeq, DiamLt, Dyn,
                         Formula, Iff, Implies, Not, Or, T, F, render)
from dpl.model import FIXTURES, PreferenceModel, fixture, fixture_text, load_model
from dpl.operators import DEFAULT_REGISTRY, OperatorRegistry, load_table
from dpl.postulates import (DEFAULT_MAX_BLOCKS, ComplianceReport, PostulateId, SchemaId,
                            check_compliance, check_schema, check_world_postulate)
from dpl.semantics import DynamicModel

MAX_ENUM_WORLDS = 5
MAX_RANDOM_WORLDS = 8


def world_names(n: int) -> tuple[str, ...]:
    return tuple(f"w{i + 1}" for i in range(n))


def valuations(n: int, atoms: Sequence[str], scheme: str = "all") -> list[tuple[int, ...]]:
    """Valuations as per-atom masks.  ``all`` lists every one; ``canonical``
    gives world ``i`` the atoms picked out by the binary digits of ``i``."""
    k = len(atoms)
    if scheme == "all":
        out = []
        for code in range(1 << (n * k)):
            out.append(tuple((code >> (a * n)) & ((1 << n) - 1) for a in range(k)))
        return out
    if scheme == "canonical":
        masks = [0] * k
        for w in range(n):
            for a in range(k):
                if w >> a & 1:
                    masks[a] |= 1 << w
        return [tuple(masks)]
    raise ConfigError(f"unknown valuation scheme {scheme!r}")


def enumerate_preorders(
    n: int,
    atoms: Sequence[str] = (),
    scheme: str = "all",
    max_worlds: int = MAX_ENUM_WORLDS,
) -> Iterator[PreferenceModel]:
    """Every preorder on ``n`` labelled worlds exactly once, crossed with the
    valuations of ``scheme``."""
    if n < 1:
        raise ConfigError("need at least one world")
    if n > max_worlds:
        raise ConfigError(f"n={n} is above the enumeration cap of {max_worlds}")
    worlds = world_names(n)
    atoms = tuple(atoms)
    vals = valuations(n, atoms, scheme)
    for down in kernels.preorders(n):
        for val in vals:
            yield PreferenceModel(worlds, atoms, val, down)


def universe(max_n: int, atoms: Sequence[str] = ("p",), scheme: str = "all",
             max_worlds: int = MAX_ENUM_WORLDS) -> list[PreferenceModel]:
    """All models with 1..max_n worlds."""
    out = []
    for n in range(1, max_n + 1):
        out.extend(enumerate_preorders(n, atoms, scheme, max_worlds))
    return out


def random_model(n: int, atoms: Sequence[str] = ("p",), seed: int = 0,
                 max_worlds: int = MAX_RANDOM_WORLDS) -> PreferenceModel:
    """Closure of a random sparse relation; the density itself is drawn per
    seed so that both total and partial orders turn up."""
    if n < 1:
        raise ConfigError("need at least one world")
    if n > max_worlds:
        raise ConfigError(f"n={n} is above the random-model cap of {max_worlds}")
    rng = random.Random(seed)
    density = rng.random() * 0.6
    rows = [1 << w for w in range(n)]
    for w in range(n):
        for u in range(n):
            if u != w and rng.random() < density:
                rows[w] |= 1 << u
    down = kernels.closure(tuple(rows), n)
    val = tuple(rng.getrandbits(n) for _ in atoms)
    return PreferenceModel(world_names(n), tuple(atoms), val, down)


_UNARY = (Not, BoxAll, DiamAll, BoxLeq, DiamLeq, BoxLt, DiamLt)
_BINARY = (And, Or, Implies, Iff)


def random_formula(rng: random.Random, atoms: Sequence[str], ops: Sequence[str] = (),
                   depth: int = 3, propositional: bool = False) -> Formula:
    """A random formula; dynamic modalities use operators from ``ops``."""
    if depth <= 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.08:
            return T
        if r < 0.16:
            return F
        return Atom(rng.choice(list(atoms)))
    choices = ["not", "bin"]
    if not propositional:
        choices += ["modal", "modal"]
        if ops:
            choices.append("dyn")
    kind = rng.choice(choices)
    if kind == "not":
        return Not(random_formula(rng, atoms, ops, depth - 1, propositional))
    if kind == "bin":
        ctor = rng.choice(_BINARY)
        return ctor(random_formula(rng, atoms, ops, depth - 1, propositional),
                    random_formula(rng, atoms, ops, depth - 1, propositional))
    if kind == "modal":
        return rng.choice(_UNARY[1:])(random_formula(rng, atoms, ops, depth - 1))
    arg = random_formula(rng, atoms, (), 2, propositional=True)
    return Dyn(rng.choice(list(ops)), arg, random_formula(rng, atoms, ops, depth - 1))


# ------------------------------------------------------------------ audits


@dataclass(frozen=True)
class UniverseSpec:
    kind: str  # enumerate | random | models | fixtures
    worlds: int = 3
    atoms: tuple[str, ...] = ("p",)
    scheme: str = "all"
    count: int = 0
    seed: int = 0
    paths: tuple[str, ...] = ()
    names: tuple[str, ...] = ()

    def models(self, max_worlds: int) -> list[PreferenceModel]:
        if self.kind == "enumerate":
            return universe(self.worlds, self.atoms, self.scheme, max_worlds)
        if self.kind == "random":
            return [random_model(self.worlds, self.atoms, self.seed + i) for i in range(self.count)]
        if self.kind == "models":
            return [load_model(p) for p in self.paths]
        if self.kind == "fixtures":
            return [fixture(name) for name in self.names]
        raise ConfigError(f"unknown universe kind {self.kind!r}")


@dataclass(frozen=True)
class AuditConfig:
    universe: UniverseSpec
    operators: tuple[str, ...] = ("rev",)
    postulates: tuple[PostulateId, ...] = ()
    schemas: tuple[SchemaId, ...] = ()
    tables: tuple[tuple[str, str], ...] = ()
    max_blocks: int = DEFAULT_MAX_BLOCKS
    max_worlds: int = MAX_ENUM_WORLDS
    output: str | None = None
    jobs: int = 1
    seed: int = 0

    def __post_init__(self):
        # "fact41-star" style spellings map onto identifier-safe names
        object.__setattr__(self, "operators", tuple(op.replace("-", "_") for op in self.operators))
        if self.max_blocks < 1 or self.max_worlds < 1:
            raise ConfigError("caps must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")
        reg = self.registry()
        for name in self.operators:
            if name not in reg:
                raise ConfigError(f"unknown operator {name!r}")

    def registry(self) -> OperatorRegistry:
        if not self.tables:
            return DEFAULT_REGISTRY
        reg = DEFAULT_REGISTRY.copy()
        for name, path in self.tables:
            try:
                reg.register(load_table(name, path), replace=True)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot load table {name!r} from {path}: {exc}") from None
        return reg


def _ids(kind, items):
    try:
        return tuple(kind.parse(x) if isinstance(x, str) else x for x in items)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def config_from_dict(data: Mapping, base_dir: str | Path = ".") -> AuditConfig:
    base = Path(base_dir)
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a JSON object")
    uni = data.get("universe")
    if not isinstance(uni, Mapping):
        raise ConfigError("config needs a 'universe' object")
    atoms = tuple(uni.get("atoms", ["p"]))
    if "enumerate" in uni:
        spec = UniverseSpec("enumerate", int(uni["enumerate"]), atoms, uni.get("valuations", "all"))
    elif "random" in uni:
        r = uni["random"]
        spec = UniverseSpec("random", int(r.get("worlds", 5)), atoms, count=int(r.get("count", 10)),
                            seed=int(r.get("seed", data.get("seed", 0))))
    elif "models" in uni:
        spec = UniverseSpec("models", paths=tuple(str(base / p) for p in uni["models"]))
    elif "fixtures" in uni:
        spec = UniverseSpec("fixtures", names=tuple(uni["fixtures"]))
    else:
        raise ConfigError("universe needs one of enumerate, random, models, fixtures")
    caps = data.get("caps", {})
    ops = data.get("operators", ["rev"])
    if isinstance(ops, str):
        ops = [ops]
    tables = tuple((k, str(base / v)) for k, v in sorted(data.get("tables", {}).items()))
    return AuditConfig(
        universe=spec,
        operators=tuple(ops),
        postulates=_ids(PostulateId, data.get("postulates", [])),
        schemas=_ids(SchemaId, data.get("schemas", [])),
        tables=tables,
        max_blocks=int(caps.get("max_blocks", DEFAULT_MAX_BLOCKS)),
        max_worlds=int(caps.get("max_worlds", MAX_ENUM_WORLDS)),
        output=data.get("output"),
        jobs=int(data.get("jobs", 1)),
        seed=int(data.get("seed", 0)),
    )


def load_config(path: str | Path) -> AuditConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_dict(data, Path(path).parent)


@dataclass
class AuditReport:
    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=lambda: {"pass": 0, "fail": 0, "error": 0})
    environment: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        if self.summary["error"]:
            return 2
        return 1 if self.summary["fail"] else 0

    def lines(self) -> list[str]:
        out = [json.dumps(r) for r in self.records]
        out.append(json.dumps({"summary": self.summary, "environment": self.environment}))
        return out

    def text_lines(self) -> list[str]:
        out = []
        for r in self.records:
            line = f"{r['verdict'].upper():5} {r['check']:<15} op={r['op']} model={r['model']} phi={r['phi']}"
            if r["witness"]:
                w = r["witness"]
                line += f"  [{w.get('clause')}] worlds={','.join(w.get('worlds', []))}"
                if w.get("formula"):
                    line += f" xi={w['formula']}"
                if w.get("message"):
                    line += f" {w['message']}"
            out.append(line)
        s = self.summary
        out.append(f"summary: {s['pass']} pass, {s['fail']} fail, {s['error']} error")
        return out

    def write(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.lines()) + "\n")


def _record(check: str, op: str, m: PreferenceModel, rep: ComplianceReport | None,
            error: str | None = None) -> dict:
    if error is not None:
        return {"check": check, "op": op, "model": m.key(), "phi": "*", "verdict": "error",
                "witness": {"message": error}}
    witness = None
    phi = "*"
    if rep.witnesses:
        w = rep.witnesses[0]
        witness = w.to_json()
        phi = render(w.phi) if w.phi is not None else "*"
    return {"check": check, "op": op, "model": m.key(), "phi": phi, "verdict": rep.verdict,
            "witness": witness}


def _audit_group(cfg: AuditConfig, group: list[tuple[int, PreferenceModel]]) -> list[tuple[int, list[dict]]]:
    reg = cfg.registry()
    models = [m for _, m in group]
    out = []
    bisims: dict[str, Bisimulation | None] = {}
    for op in cfg.operators:
        try:
            bisims[op] = Bisimulation(models[0], [(op, m.down) for m in models], reg)
        except DplError:
            bisims[op] = None  # reported per check below
    for idx, m in group:
        recs = []
        for op in cfg.operators:
            for pid in cfg.postulates:
                recs.append(_run_check(pid.value, op, m, reg, lambda: (
                    check_compliance(op, m, pid, reg, bisims[op]) if pid.is_compliance
                    else check_world_postulate(op, m, None, pid, reg))))
            for sid in cfg.schemas:
                recs.append(_run_check(sid.value, op, m, reg, lambda: check_schema(
                    DynamicModel(m, op, reg), sid, max_blocks=cfg.max_blocks, bisim=bisims[op])))
        out.append((idx, recs))
    return out


def _run_check(check, op, m, reg, thunk) -> dict:
    try:
        rep = thunk()
    except DplError as exc:
        return _record(check, op, m, None, str(exc))
    if not rep.verify(reg):
        raise AssertionError(f"witness for {check} on {m.key()} failed re-verification")
    return _record(check, op, m, rep)


def _fixture_digest() -> str:
    h = hashlib.sha256()
    for name in sorted(FIXTURES):
        h.update(fixture_text(name).encode())
    return h.hexdigest()[:16]


def _package_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def run_audit(cfg: AuditConfig) -> AuditReport:
    models = cfg.universe.models(cfg.max_worlds)
    groups: dict[tuple, list[tuple[int, PreferenceModel]]] = {}
    for i, m in enumerate(models):
        groups.setdefault(m.carrier, []).append((i, m))
    work = list(groups.values())
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            parts = list(pool.map(_audit_group, [cfg] * len(work), work))
    else:
        parts = [_audit_group(cfg, g) for g in work]
    by_index = sorted((item for part in parts for item in part), key=lambda t: t[0])
    report = AuditReport()
    for _, recs in by_index:
        for r in recs:
            report.records.append(r)
            report.summary[r["verdict"]] += 1
    report.environment = {
        "seed": cfg.seed,
        "package": _package_version(),
        "fixtures": _fixture_digest(),
        "models": len(models),
    }
    if cfg.output:
        report.write(cfg.output)
    return report
