import json
import random
from fractions import Fraction as F

import pytest

from antipode_bridge.analysis import (
    _star_certificates,
    approximate_kkm_cells,
    best_star_distance,
    brute_intersection,
    closed_star,
    independent_antipode_scan,
    resolution_sweep,
    sweep_to_json,
)
from antipode_bridge.construction import (
    ExtendedCover,
    Source,
    antipode_pairs,
    assemble_A,
    build_extended,
    exposure_set,
)
from antipode_bridge.cover import (
    CoverSpec,
    barycenter_spec,
    from_grid_labeling,
    make_ratio_cover,
    random_grid_spec,
    random_ratio_spec,
)
from antipode_bridge.errors import PreconditionError
from antipode_bridge.geometry import Domain, GridPoint, barycenter, grid_enumerate, l1_distance

from conftest import as_frac, brute_top_grid, in_ratio_set

P = (F(1, 2), F(1, 4), F(1, 4))


def _oracle_star_centers(target, d, n):
    """Centers whose L1 ball of radius 2/N on the top grid meets every ratio set."""
    pts = [as_frac(k, n) for k in brute_top_grid(d, n)]
    centers = []
    for c in pts:
        ball = [q for q in pts if l1_distance(c, q) <= F(2, n)]
        if all(any(in_ratio_set(q, target, i) for q in ball) for i in range(1, d + 2)):
            centers.append(c)
    return centers


@pytest.mark.parametrize(
    "target, n, expected",
    [
        (barycenter(2), 3, [(1, 1, 1)]),
        (P, 4, [(2, 1, 1)]),
        (P, 3, []),
    ],
)
def test_brute_intersection_examples(target, n, expected):
    assert [g.k for g in brute_intersection(make_ratio_cover(2, target), n)] == expected


def test_closed_star_is_l1_ball():
    g = GridPoint((2, 1, 0), 3)
    star = set(closed_star(g))
    ball = {h for h in grid_enumerate(2, 3, Domain.TOP) if l1_distance(h.point, g.point) <= F(2, 3)}
    assert star == ball


@pytest.mark.parametrize("n", [3, 4, 8])
def test_star_centers_match_oracle(n):
    certs = approximate_kkm_cells(make_ratio_cover(2, P), n)
    assert [c.center.point for c in certs] == _oracle_star_centers(P, 2, n)
    for c in certs:
        assert c.covered == {1, 2, 3}
        assert c.radius == F(1, n)
        for i, w in c.witnesses:
            assert in_ratio_set(w.point, P, i)


def test_star_certificates_on_grid_target():
    certs = approximate_kkm_cells(make_ratio_cover(2, P), 4)
    assert GridPoint((2, 1, 1), 4) in [c.center for c in certs]


def test_star_localization_at_n3_actuals():
    # frozen from the oracle enumeration above: 6 centers, distances 1/3 .. 1
    certs = approximate_kkm_cells(make_ratio_cover(2, P), 3)
    dists = sorted(l1_distance(c.center.point, P) for c in certs)
    assert len(certs) == 6
    assert dists == [F(1, 3), F(1, 2), F(1, 2), F(5, 6), F(5, 6), F(1)]
    assert best_star_distance(certs, P) == F(1, 3)


def test_stars_empty_when_an_index_is_missing():
    entries = {g.k: frozenset({1} if g.k[0] else {2}) for g in grid_enumerate(2, 3, Domain.TOP)}
    cover = from_grid_labeling(CoverSpec(dim=2, kind="grid", n=3, entries=entries))
    with pytest.raises(PreconditionError):
        approximate_kkm_cells(cover, 3)
    assert _star_certificates(cover, 3) == []


def test_independent_scan_agrees_on_pipeline_output():
    ext = assemble_A(make_ratio_cover(2, P), 3)
    assert independent_antipode_scan(ext) == antipode_pairs(ext) == []


def test_independent_scan_hand_built():
    e1, m1 = GridPoint((1, 0, 0), 1), GridPoint((-1, 0, 0), 1)
    ext = ExtendedCover(n=1, dim=2, entries={e1: {1: Source.D}, m1: {1: Source.E}})
    assert independent_antipode_scan(ext) == antipode_pairs(ext) == [(1, e1)]


@pytest.mark.parametrize("seed", range(20))
def test_independent_scan_agrees_on_random_grid_covers(seed):
    spec = random_grid_spec(seed, 2, 4)
    ext = build_extended(from_grid_labeling(spec), 4)
    assert independent_antipode_scan(ext) == antipode_pairs(ext)
    # perturb to get positives
    rng = random.Random(seed)
    for g in rng.sample(ext.points(), 10):
        ext.entries.setdefault(g, {})[rng.randint(1, 3)] = Source.D
    assert independent_antipode_scan(ext) == antipode_pairs(ext)


def test_sweep_barycenter():
    rows = resolution_sweep(barycenter_spec(2), [9, 3, 6])
    assert [r.n for r in rows] == [3, 6, 9]
    assert [r.intersection_count for r in rows] == [1, 1, 1]
    assert [r.exposure_count for r in rows] == [1, 1, 1]


def test_sweep_counts_follow_denominator():
    rows = resolution_sweep(make_ratio_cover(2, P).spec, [3, 4, 8])
    assert [r.intersection_count for r in rows] == [0, 1, 1]
    assert [r.exposure_count for r in rows] == [0, 1, 1]


def test_sweep_star_distance_non_increasing():
    rows = resolution_sweep(make_ratio_cover(2, P).spec, [4, 8, 16])
    dists = [r.best_star_distance for r in rows]
    assert all(a >= b for a, b in zip(dists, dists[1:]))


def test_sweep_json_schema():
    rows = resolution_sweep(make_ratio_cover(2, P).spec, [3, 4])
    doc = json.loads(sweep_to_json(rows))
    assert doc[0] == {
        "N": 3,
        "intersectionCount": 0,
        "exposureCount": 0,
        "starCount": 6,
        "bestStarDistance": "1/3",
    }
    grid_rows = resolution_sweep(random_grid_spec(1, 2, 3), [3])
    assert json.loads(sweep_to_json(grid_rows))[0]["bestStarDistance"] is None


@pytest.mark.parametrize("seed", range(12))
def test_brute_intersection_is_dual_to_exposure(seed):
    spec = random_ratio_spec(seed, 1 + seed % 3)
    cover = make_ratio_cover(spec.dim, spec.target)
    for n in (2, 4, 6):
        brute = brute_intersection(cover, n)
        assert {g.antipode() for g in exposure_set(cover, n)} == set(brute)
