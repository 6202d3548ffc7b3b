"""Independent oracles and grid-scale approximation of KKM points."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .construction import ExtendedCover, exposure_set
from .cover import Cover, CoverSpec, build_cover, verify_kkm
from .errors import PreconditionError
from .geometry import Domain, GridPoint, Point, format_point, format_rational, grid_enumerate, l1_distance


def brute_intersection(cover: Cover, n: int) -> List[GridPoint]:
    """Top grid points lying in every set of the cover."""
    m = cover.dim + 1
    return [g for g in grid_enumerate(cover.dim, n, Domain.TOP) if len(cover.members(g.point)) == m]


def independent_antipode_scan(ext: ExtendedCover) -> List[Tuple[int, GridPoint]]:
    # walk stored entries off the top facet; every antipodal pair has a member there
    found = set()
    for g, idx in ext.entries.items():
        if all(v >= 0 for v in g.k):
            continue
        other = ext.entries.get(GridPoint(tuple(-v for v in g.k), g.n))
        if not other:
            continue
        for i in idx:
            if i in other:
                found.add((i, max(g, g.antipode())))
    return sorted(found, key=lambda item: (item[1], item[0]))


# -- star certificates -------------------------------------------------------

@dataclass(frozen=True)
class StarCertificate:
    """A top grid point whose closed star meets every cover set.

    ``witnesses[i]`` is a star point (the center or a neighbor one grid step
    away) that lies in set ``i``.
    """

    center: GridPoint
    radius: Fraction
    covered: FrozenSet[int]
    witnesses: Tuple[Tuple[int, GridPoint], ...]

    def to_dict(self) -> dict:
        return {
            "center": format_point(self.center.point),
            "radius": format_rational(self.radius),
            "coveredIndices": sorted(self.covered),
            "witnesses": [{"set": i, "point": format_point(g.point)} for i, g in self.witnesses],
        }


def closed_star(g: GridPoint) -> List[GridPoint]:
    """``g`` and its top-facet neighbors ``g + (e_a - e_b) / N``."""
    star = [g]
    m = len(g.k)
    for a in range(m):
        for b in range(m):
            if a != b and g.k[b] > 0:
                k = list(g.k)
                k[a] += 1
                k[b] -= 1
                star.append(GridPoint(tuple(k), g.n))
    return star


def _star_certificates(cover: Cover, n: int) -> List[StarCertificate]:
    every = frozenset(range(1, cover.dim + 2))
    labels = {g: cover.members(g.point) for g in grid_enumerate(cover.dim, n, Domain.TOP)}
    certs = []
    for center in labels:
        witnesses: Dict[int, GridPoint] = {}
        for g in closed_star(center):
            for i in labels[g]:
                witnesses.setdefault(i, g)
        if frozenset(witnesses) == every:
            certs.append(
                StarCertificate(
                    center=center,
                    radius=Fraction(1, n),
                    covered=every,
                    witnesses=tuple(sorted(witnesses.items())),
                )
            )
    return certs


def approximate_kkm_cells(cover: Cover, n: int) -> List[StarCertificate]:
    if not verify_kkm(cover, n).passed:
        raise PreconditionError(f"cover fails the KKM condition at N={n}")
    return _star_certificates(cover, n)


def best_star_distance(certs: Iterable[StarCertificate], target: Point) -> Optional[Fraction]:
    dists = [l1_distance(c.center.point, target) for c in certs]
    return min(dists) if dists else None


# -- sweeps ------------------------------------------------------------------

@dataclass
class SweepRow:
    n: int
    intersection_count: int
    exposure_count: int
    star_count: int
    best_star_distance: Optional[Fraction]

    def to_dict(self) -> dict:
        best = self.best_star_distance
        return {
            "N": self.n,
            "intersectionCount": self.intersection_count,
            "exposureCount": self.exposure_count,
            "starCount": self.star_count,
            "bestStarDistance": None if best is None else format_rational(best),
        }


def resolution_sweep(spec: CoverSpec, resolutions: Iterable[int]) -> List[SweepRow]:
    cover = build_cover(spec)
    rows = []
    for n in sorted(set(resolutions)):
        certs = _star_certificates(cover, n)
        rows.append(
            SweepRow(
                n=n,
                intersection_count=len(brute_intersection(cover, n)),
                exposure_count=len(exposure_set(cover, n)),
                star_count=len(certs),
                best_star_distance=None if spec.target is None else best_star_distance(certs, spec.target),
            )
        )
    return rows


def sweep_to_json(rows: List[SweepRow]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=2, sort_keys=True) + "\n"
