"""Extension of a simplex cover to an antipode-free cover of the L1 sphere.

Given a non-degenerate cover ``C`` of the top facet, the bottom facet is
covered by ``B_i = F_bot minus -C_i`` (taken as ``E_i`` unchanged at grid
scale), the rest of the sphere by ``D_i``, the preimage of ``C_i`` under
the projection :func:`~antipode_bridge.geometry.f_map`, and ``A_i = D_i | E_i``.
If the ``C_i`` have no common grid point, the ``A_i`` cover every sphere grid
point and no ``A_i`` holds an antipodal pair; otherwise the bottom points
left uncovered by every ``B_i`` are exactly the antipodes of the common points.
"""

from __future__ import annotations

import enum
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from .cover import CheckReport, Cover, thicken, verify_kkm, verify_nondegenerate
from .errors import ExposureNonEmpty, PreconditionError
from .geometry import (
    Domain,
    GridPoint,
    Region,
    antipode,
    collar_pull,
    format_point,
    f_map,
    grid_enumerate,
    region,
)

REPORT_SCHEMA = "antipode-bridge/pipeline-report@1"
THREADS_ENV = "ANTIPODE_BRIDGE_THREADS"
_PARALLEL_MIN_POINTS = 2000

IndexSets = Dict[GridPoint, FrozenSet[int]]


class Source(enum.Flag):
    """Where an A-membership came from."""

    D = enum.auto()
    E = enum.auto()


# -- parallel membership evaluation ------------------------------------------

def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _d_chunk(cover: Cover, chunk: List[GridPoint]) -> List[FrozenSet[int]]:
    return [cover.members(f_map(g.point)) for g in chunk]


def _members_of_images(cover: Cover, points: List[GridPoint]) -> List[FrozenSet[int]]:
    workers = worker_count()
    if workers == 1 or len(points) < _PARALLEL_MIN_POINTS:
        return _d_chunk(cover, points)
    size = -(-len(points) // workers)
    chunks = [points[i:i + size] for i in range(0, len(points), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_d_chunk, [cover] * len(chunks), chunks))
    return [m for part in parts for m in part]


# -- the sets B, E, D --------------------------------------------------------

def build_B(cover: Cover, n: int) -> IndexSets:
    """Bottom grid point ``y`` lies in ``B_i`` iff ``-y`` is not in ``C_i``."""
    every = frozenset(range(1, cover.dim + 2))
    return {
        g: every - cover.members(antipode(g.point))
        for g in grid_enumerate(cover.dim, n, Domain.BOTTOM)
    }


def e_nondegeneracy_witnesses(sets: IndexSets) -> List[Tuple[GridPoint, int]]:
    """Pairs ``(y, i)`` with ``y_i == 0`` but ``y`` missing from ``E_i``."""
    return [
        (g, i)
        for g, idx in sets.items()
        for i, v in enumerate(g.k, 1)
        if v == 0 and i not in idx
    ]


def build_E(cover: Cover, n: int, strict: bool = True) -> IndexSets:
    # shrinking the open B_i to closed E_i is the identity on a finite grid
    sets = dict(build_B(cover, n))
    if strict:
        bad = e_nondegeneracy_witnesses(sets)
        if bad:
            g, i = bad[0]
            raise PreconditionError(f"E is degenerate: {g} has coordinate {i} = 0 but is not in E_{i}")
    return sets


def exposure_set(cover: Cover, n: int) -> List[GridPoint]:
    """Bottom grid points in no ``B_i``; their antipodes are the common points of the cover."""
    return [g for g, idx in build_B(cover, n).items() if not idx]


def build_D(cover: Cover, n: int) -> IndexSets:
    points = [g for g in grid_enumerate(cover.dim, n, Domain.SPHERE) if any(v > 0 for v in g.k)]
    return dict(zip(points, _members_of_images(cover, points)))


# -- extended cover ----------------------------------------------------------

@dataclass
class ExtendedCover:
    """Index sets of the ``A_i`` on every sphere grid point, with provenance."""

    n: int
    dim: int
    entries: Dict[GridPoint, Dict[int, Source]]
    cover: Optional[Cover] = None

    def sets(self, g: GridPoint) -> FrozenSet[int]:
        return frozenset(self.entries.get(g, {}))

    def points(self) -> List[GridPoint]:
        return grid_enumerate(self.dim, self.n, Domain.SPHERE)

    def provenance_witnesses(self) -> List[Tuple[GridPoint, int]]:
        bad = []
        for g, idx in self.entries.items():
            bottom = region(g.point) is Region.BOTTOM
            for i, src in idx.items():
                if (Source.E in src and not bottom) or (Source.D in src and bottom):
                    bad.append((g, i))
        return sorted(bad)

    def stats(self) -> dict:
        counts = {r.value: 0 for r in Region}
        for g in self.points():
            counts[region(g.point).value] += 1
        sizes = {str(i): 0 for i in range(1, self.dim + 2)}
        from_d = from_e = 0
        for idx in self.entries.values():
            for i, src in idx.items():
                sizes[str(i)] += 1
                from_d += Source.D in src
                from_e += Source.E in src
        return {
            "spherePoints": sum(counts.values()),
            "topPoints": counts["Top"],
            "middlePoints": counts["Middle"],
            "bottomPoints": counts["Bottom"],
            "setSizes": sizes,
            "fromD": from_d,
            "fromE": from_e,
        }


def build_extended(cover: Cover, n: int, d_sets: IndexSets = None, e_sets: IndexSets = None) -> ExtendedCover:
    """Union ``A_i = D_i | E_i`` without insisting that it covers the sphere."""
    d_sets = build_D(cover, n) if d_sets is None else d_sets
    e_sets = build_E(cover, n, strict=False) if e_sets is None else e_sets
    entries: Dict[GridPoint, Dict[int, Source]] = {}
    for source, sets in ((Source.D, d_sets), (Source.E, e_sets)):
        for g, idx in sets.items():
            slot = entries.setdefault(g, {})
            for i in idx:
                slot[i] = slot.get(i, Source(0)) | source
    return ExtendedCover(n=n, dim=cover.dim, entries=entries, cover=cover)


def assemble_A(cover: Cover, n: int) -> ExtendedCover:
    e_sets = build_E(cover, n)
    exposed = [g for g, idx in e_sets.items() if not idx]
    if exposed:
        raise ExposureNonEmpty(exposed)
    return build_extended(cover, n, e_sets=e_sets)


def antipode_pairs(ext: ExtendedCover) -> List[Tuple[int, GridPoint]]:
    """All ``(i, x)`` with ``x`` and ``-x`` both in ``A_i``.

    Each pair is listed once, represented by the point whose first nonzero
    coordinate is positive (the lexicographically larger of the two).
    """
    found = []
    for g in ext.points():
        if g.antipode() > g:
            continue
        other = g.antipode()
        for i in sorted(ext.sets(g) & ext.sets(other)):
            found.append((i, g))
    return found


def uncovered_points(ext: ExtendedCover) -> List[GridPoint]:
    return [g for g in ext.points() if not ext.sets(g)]


# -- observation checks ------------------------------------------------------

@dataclass
class PropertiesReport:
    obs1: CheckReport
    obs2: CheckReport
    obs3: CheckReport
    e_nondegenerate: CheckReport

    @property
    def checks(self) -> List[CheckReport]:
        return [self.obs1, self.obs2, self.obs3, self.e_nondegenerate]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def verify_construction_properties(cover: Cover, n: int) -> PropertiesReport:
    d_sets = build_D(cover, n)
    e_sets = build_E(cover, n, strict=False)

    no_d = [g for g, idx in d_sets.items() if not idx]
    top = [g for g in d_sets if all(v >= 0 for v in g.k)]
    mismatch = [g for g in top if d_sets[g] != cover.members(g.point)]
    # x in D_i forces x_i >= 1/N, i.e. k_i >= 1
    small = [(g, i) for g, idx in d_sets.items() for i in sorted(idx) if g.k[i - 1] < 1]
    e_bad = e_nondegeneracy_witnesses(e_sets)

    return PropertiesReport(
        obs1=CheckReport("obs1_d_covers", not no_d, n, len(d_sets), no_d),
        obs2=CheckReport("obs2_top_d_equals_c", not mismatch, n, len(top), mismatch),
        obs3=CheckReport("obs3_d_positive", not small, n, len(d_sets), small),
        e_nondegenerate=CheckReport("e_nondegenerate", not e_bad, n, len(e_sets), sorted(e_bad)),
    )


# -- pipeline ----------------------------------------------------------------

KKM_POINTS_FOUND = "KkmPointsFound"
ANTIPODE_FREE = "AntipodeFreeCoverBuilt"
VIOLATION = "Violation"


@dataclass
class PipelineReport:
    outcome: str
    resolution: int
    dim: int
    thickened: bool
    points: list = field(default_factory=list)
    source_points: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    violation_kind: Optional[str] = None
    witnesses: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.outcome == KKM_POINTS_FOUND and not self.points:
            raise ValueError("KkmPointsFound needs at least one point")
        if self.outcome == VIOLATION and not self.witnesses:
            raise ValueError("a Violation needs at least one witness")

    def to_dict(self, include_timings: bool = False) -> dict:
        outcome = {"kind": self.outcome}
        if self.outcome == KKM_POINTS_FOUND:
            outcome["points"] = [format_point(p) for p in self.points]
            if self.thickened:
                outcome["sourcePoints"] = [format_point(p) for p in self.source_points]
        elif self.outcome == ANTIPODE_FREE:
            outcome["coverStats"] = self.stats
        else:
            outcome["violationKind"] = self.violation_kind
            outcome["witnesses"] = [_witness_dict(w) for w in self.witnesses]
        doc = {
            "schema": REPORT_SCHEMA,
            "name": self.name,
            "dim": self.dim,
            "N": self.resolution,
            "thickened": self.thickened,
            "outcome": outcome,
        }
        if include_timings:
            doc["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return doc

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2, sort_keys=True) + "\n"


def _witness_dict(w) -> dict:
    if isinstance(w, GridPoint):
        return {"point": format_point(w.point)}
    i, g = w
    return {"set": i, "point": format_point(g.point)}


def run_pipeline(cover: Cover, n: int) -> PipelineReport:
    """Run the extension argument on ``cover`` at resolution ``n``.

    Degenerate covers are thickened first.  Returns the common grid points
    when the bottom facet has exposed points, otherwise a certificate that
    the assembled ``A_i`` cover the sphere grid without antipodal pairs.
    A :data:`VIOLATION` outcome means the construction itself is broken.
    """
    timings = {}
    clock = time.perf_counter()
    if not verify_kkm(cover, n).passed:
        raise PreconditionError(f"cover fails the KKM condition at N={n}")
    source = cover
    thickened = False
    if not verify_nondegenerate(cover, n).passed:
        cover = thicken(cover)
        thickened = True
    timings["verify"] = time.perf_counter() - clock

    clock = time.perf_counter()
    exposed = exposure_set(cover, n)
    timings["exposure"] = time.perf_counter() - clock
    common = dict(dim=cover.dim, resolution=n, thickened=thickened, timings=timings, name=source.spec.name)
    if exposed:
        points = sorted(antipode(g.point) for g in exposed)
        sources = []
        if thickened:
            sources = [collar_pull(p).base for p in points]
        return PipelineReport(outcome=KKM_POINTS_FOUND, points=points, source_points=sources, **common)

    clock = time.perf_counter()
    ext = assemble_A(cover, n)
    timings["assemble"] = time.perf_counter() - clock

    clock = time.perf_counter()
    holes = uncovered_points(ext)
    pairs = antipode_pairs(ext)
    provenance = ext.provenance_witnesses()
    timings["scan"] = time.perf_counter() - clock
    if holes:
        return PipelineReport(outcome=VIOLATION, violation_kind="uncovered", witnesses=holes, **common)
    if pairs:
        return PipelineReport(outcome=VIOLATION, violation_kind="antipodal_pair", witnesses=pairs, **common)
    if provenance:
        witnesses = [(i, g) for g, i in provenance]
        return PipelineReport(outcome=VIOLATION, violation_kind="provenance", witnesses=witnesses, **common)
    return PipelineReport(outcome=ANTIPODE_FREE, stats=ext.stats(), **common)
