"""Covers of the simplex by d+1 sets, their verifiers, and collar thickening.

Set indices are 1-based labels ``1..d+1`` throughout; coordinate ``i`` of a
point ``x`` is ``x[i - 1]``.  A cover answers membership at *any* rational
simplex point, since the sphere construction queries off-grid images.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import InvariantError, SpecError
from .geometry import (
    Domain,
    GridPoint,
    Point,
    as_point,
    barycenter,
    check_limits,
    collar_pull,
    format_point,
    format_rational,
    grid_enumerate,
    linf_distance,
    parse_rational,
)

KINDS = ("ratio", "degenerate_ratio", "grid")
SPEC_SCHEMA = "antipode-bridge/cover-spec@1"


# -- specs -------------------------------------------------------------------

@dataclass(frozen=True)
class CoverSpec:
    """Serializable description of a cover.

    ``entries`` maps grid vectors of the top facet (resolution ``n``) to
    their label sets and is only used by the ``grid`` kind.
    """

    dim: int
    kind: str
    target: Optional[Point] = None
    extras: Tuple[Tuple[int, int], ...] = ()
    n: Optional[int] = None
    entries: Optional[Dict[Tuple[int, ...], FrozenSet[int]]] = None
    name: str = ""
    seed: Optional[int] = None

    def validate(self) -> "CoverSpec":
        try:
            check_limits(self.dim, self.n)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
        if self.kind not in KINDS:
            raise SpecError(f"unknown cover kind {self.kind!r}")
        m = self.dim + 1
        if self.kind in ("ratio", "degenerate_ratio"):
            if self.target is None or len(self.target) != m:
                raise SpecError(f"target must have {m} coordinates")
            if sum(self.target) != 1:
                raise SpecError("target coordinates must sum to 1")
            if any(c <= 0 for c in self.target):
                raise SpecError("target must be strictly interior (all coordinates > 0)")
        if self.kind == "degenerate_ratio":
            _check_extras(self.dim, self.extras)
        if self.kind == "grid":
            if self.n is None or self.entries is None:
                raise SpecError("grid covers need a resolution N and entries")
            expected = {g.k for g in grid_enumerate(self.dim, self.n, Domain.TOP)}
            got = set(self.entries)
            if got - expected:
                raise SpecError(f"entries outside the top grid: {sorted(got - expected)[:5]}")
            if expected - got:
                raise SpecError(f"missing grid entries: {sorted(expected - got)[:5]}")
            for k, labels in self.entries.items():
                if any(not 1 <= i <= m for i in labels):
                    raise SpecError(f"label out of range at {k}: {sorted(labels)}")
        return self

    def to_dict(self) -> dict:
        doc = {"schema": SPEC_SCHEMA, "dim": self.dim, "kind": self.kind, "name": self.name}
        if self.seed is not None:
            doc["seed"] = self.seed
        if self.target is not None:
            doc["target"] = format_point(self.target)
        if self.kind == "degenerate_ratio":
            doc["extras"] = [list(e) for e in self.extras]
        if self.kind == "grid":
            doc["N"] = self.n
            doc["entries"] = [
                {"k": list(k), "labels": sorted(self.entries[k])} for k in sorted(self.entries)
            ]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc) -> "CoverSpec":
        if not isinstance(doc, dict):
            raise SpecError("cover spec must be a JSON object")
        try:
            dim = doc["dim"]
            kind = doc["kind"]
            if not isinstance(dim, int) or isinstance(dim, bool):
                raise SpecError(f"dim must be an integer, got {dim!r}")
            target = doc.get("target")
            if target is not None:
                target = tuple(parse_rational(c) for c in target)
            extras = tuple((int(i), int(j)) for i, j in doc.get("extras", ()))
            n = doc.get("N")
            entries = None
            if doc.get("entries") is not None:
                entries = {}
                for item in doc["entries"]:
                    k = tuple(int(v) for v in item["k"])
                    if k in entries:
                        raise SpecError(f"duplicate grid entry {k}")
                    entries[k] = frozenset(int(i) for i in item["labels"])
            spec = cls(
                dim=dim,
                kind=kind,
                target=target,
                extras=extras,
                n=n,
                entries=entries,
                name=str(doc.get("name", "")),
                seed=doc.get("seed"),
            )
        except SpecError:
            raise
        except (KeyError, TypeError, ValueError, InvariantError) as exc:
            raise SpecError(f"malformed cover spec: {exc}") from exc
        return spec.validate()

    @classmethod
    def from_json(cls, text: str) -> "CoverSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)


def _check_extras(d: int, extras) -> None:
    if not extras:
        raise SpecError("a degenerate cover needs at least one extra face assignment")
    if len(set(extras)) != len(extras):
        raise SpecError("duplicate extra face assignments")
    for i, j in extras:
        if not (1 <= i <= d + 1 and 1 <= j <= d + 1):
            raise SpecError(f"extra ({i}, {j}) out of range 1..{d + 1}")
        # face x_j = 0 must contain a point with x_i = 0, else nothing degenerates
        if i != j and d == 1:
            raise SpecError(f"extra ({i}, {j}) adds only vertex e_{i}, which creates no degeneracy")


# -- covers ------------------------------------------------------------------

class Cover:
    """A family of d+1 membership predicates on the simplex."""

    thickened = False

    def __init__(self, spec: CoverSpec):
        self.spec = spec
        self.dim = spec.dim

    def members(self, x: Sequence[Fraction]) -> FrozenSet[int]:
        raise NotImplementedError

    def contains(self, i: int, x: Sequence[Fraction]) -> bool:
        return i in self.members(x)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, kind={self.spec.kind!r})"


class RatioCover(Cover):
    """``C_i = {x : x_i / p_i >= x_j / p_j for all j}``; the sets meet only at ``p``."""

    def __init__(self, spec: CoverSpec):
        super().__init__(spec)
        self.target = spec.target
        self._weights = tuple(1 / c for c in spec.target)

    def members(self, x):
        ratios = [c * w for c, w in zip(x, self._weights)]
        top = max(ratios)
        return frozenset(i for i, r in enumerate(ratios, 1) if r == top)


class DegenerateRatioCover(RatioCover):
    """A ratio cover where set ``i`` additionally swallows each face ``{x_j = 0}`` listed in ``extras``."""

    def __init__(self, spec: CoverSpec):
        super().__init__(spec)
        self.extras = spec.extras

    def members(self, x):
        base = super().members(x)
        extra = {i for i, j in self.extras if x[j - 1] == 0}
        return base | extra if extra else base


class GridCover(Cover):
    """Cover given by labels on the top grid.

    Off-grid queries take the union of the labels of all grid points at
    minimal L-infinity distance, so boundaries between labels belong to both
    sides (a closed-set convention).
    """

    def __init__(self, spec: CoverSpec):
        super().__init__(spec)
        self.n = spec.n
        self.labels = dict(spec.entries)
        self._grid = [(g.point, self.labels[g.k]) for g in grid_enumerate(self.dim, self.n, Domain.TOP)]
        self._cache: Dict[Point, FrozenSet[int]] = {}

    def members(self, x):
        x = tuple(x)
        hit = self._cache.get(x)
        if hit is not None:
            return hit
        scaled = [c * self.n for c in x]
        if all(s.denominator == 1 for s in scaled):
            result = self.labels[tuple(int(s) for s in scaled)]
        else:
            best = None
            result = set()
            for p, labels in self._grid:
                dist = linf_distance(p, x)
                if best is None or dist < best:
                    best, result = dist, set(labels)
                elif dist == best:
                    result |= labels
            result = frozenset(result)
        self._cache[x] = result
        return result


class ThickenedCover(Cover):
    """Collar thickening of ``base``.

    A point ``y`` is pulled back to ``(x, t)``; for ``t == 0`` membership is
    that of ``x``, for ``t > 0`` only indices with ``x_i > 0`` survive.
    """

    thickened = True

    def __init__(self, base: Cover):
        super().__init__(base.spec)
        self.base = base

    def members(self, y):
        c = collar_pull(y)
        found = self.base.members(c.base)
        if c.t == 0:
            return found
        return frozenset(i for i in found if c.base[i - 1] > 0)


def build_cover(spec: CoverSpec) -> Cover:
    spec.validate()
    return {"ratio": RatioCover, "degenerate_ratio": DegenerateRatioCover, "grid": GridCover}[spec.kind](spec)


def make_ratio_cover(d: int, target, name: str = "") -> Cover:
    return build_cover(CoverSpec(dim=d, kind="ratio", target=as_point(target), name=name))


def make_degenerate_ratio_cover(d: int, target, extras, name: str = "") -> Cover:
    extras = tuple((int(i), int(j)) for i, j in extras)
    return build_cover(
        CoverSpec(dim=d, kind="degenerate_ratio", target=as_point(target), extras=extras, name=name)
    )


def from_grid_labeling(spec: CoverSpec) -> Cover:
    if spec.kind != "grid":
        raise SpecError(f"expected a grid spec, got kind {spec.kind!r}")
    return build_cover(spec)


def thicken(cover: Cover) -> Cover:
    return ThickenedCover(cover)


# -- verifiers ---------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    passed: bool
    resolution: int
    checked: int
    witnesses: List = field(default_factory=list)

    def to_dict(self) -> dict:
        out = []
        for w in self.witnesses:
            if isinstance(w, GridPoint):
                out.append({"point": format_point(w.point)})
            else:
                g, i = w
                out.append({"point": format_point(g.point), "set": i})
        return {
            "check": self.name,
            "passed": self.passed,
            "N": self.resolution,
            "checked": self.checked,
            "witnesses": out,
        }


def verify_cover(cover: Cover, n: int) -> CheckReport:
    grid = grid_enumerate(cover.dim, n, Domain.TOP)
    bad = [g for g in grid if not cover.members(g.point)]
    return CheckReport("cover", not bad, n, len(grid), bad)


def verify_kkm(cover: Cover, n: int) -> CheckReport:
    grid = grid_enumerate(cover.dim, n, Domain.TOP)
    bad = [g for g in grid if not any(g.k[i - 1] > 0 for i in cover.members(g.point))]
    return CheckReport("kkm", not bad, n, len(grid), bad)


def verify_nondegenerate(cover: Cover, n: int) -> CheckReport:
    grid = grid_enumerate(cover.dim, n, Domain.TOP)
    bad = [(g, i) for g in grid for i in sorted(cover.members(g.point)) if g.k[i - 1] == 0]
    return CheckReport("nondegenerate", not bad, n, len(grid), bad)


# -- generators --------------------------------------------------------------

def random_target(rng: random.Random, d: int, max_den: int = 12) -> Point:
    """Uniformly chosen interior rational point with denominator at most ``max_den``."""
    q = rng.randint(d + 1, max_den)
    cuts = sorted(rng.sample(range(1, q), d))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [q])]
    return tuple(Fraction(v, q) for v in parts)


def random_ratio_spec(seed: int, d: int, degenerate: bool = False, max_den: int = 12) -> CoverSpec:
    rng = random.Random(seed)
    target = random_target(rng, d, max_den)
    if not degenerate:
        return CoverSpec(dim=d, kind="ratio", target=target, name=f"ratio-{seed}", seed=seed).validate()
    i = rng.randint(1, d + 1)
    return CoverSpec(
        dim=d,
        kind="degenerate_ratio",
        target=target,
        extras=((i, i),),
        name=f"degenerate-{seed}",
        seed=seed,
    ).validate()


def random_grid_spec(seed: int, d: int, n: int) -> CoverSpec:
    """Random non-degenerate KKM labeling: each grid point gets a nonempty subset of its support."""
    rng = random.Random(seed)
    entries = {}
    for g in grid_enumerate(d, n, Domain.TOP):
        support = [i for i, v in enumerate(g.k, 1) if v > 0]
        size = rng.randint(1, len(support))
        entries[g.k] = frozenset(rng.sample(support, size))
    return CoverSpec(dim=d, kind="grid", n=n, entries=entries, name=f"grid-{seed}", seed=seed).validate()


def barycenter_spec(d: int) -> CoverSpec:
    return CoverSpec(dim=d, kind="ratio", target=barycenter(d), name="barycenter")


__all__ = [
    "CheckReport",
    "Cover",
    "CoverSpec",
    "DegenerateRatioCover",
    "GridCover",
    "RatioCover",
    "ThickenedCover",
    "barycenter_spec",
    "build_cover",
    "format_rational",
    "from_grid_labeling",
    "make_degenerate_ratio_cover",
    "make_ratio_cover",
    "random_grid_spec",
    "random_ratio_spec",
    "random_target",
    "thicken",
    "verify_cover",
    "verify_kkm",
    "verify_nondegenerate",
]
