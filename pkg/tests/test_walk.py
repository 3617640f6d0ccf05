import json

import pytest

from kunzwalk.geometry import ConeH, cone_dim, contains, double_description
from kunzwalk.nilsemigroup import betti_cone, is_kunz, is_refinement, outer_bettis
from kunzwalk.walk import (
    ClosureViolation,
    FanGraph,
    c_of,
    chamber_containing,
    cross_check_numeric,
    cross_facet,
    cross_record,
    face_nilsemigroups,
    fan_from_json,
    initial_chamber,
    oracle_keys,
    refine_to_staircase,
    walk,
    walk_all,
    wall_trade_ok,
)


@pytest.fixture(scope="module")
def fan20():
    return walk(20, (6, 11))


@pytest.fixture(scope="module")
def fan13():
    return walk(13, (1, 2, 9))


@pytest.mark.parametrize("m,atoms,count", [(20, (6, 11), 3), (13, (1, 2, 9), 5), (9, (1, 3, 4, 6, 7), 6), (2, (1,), 1)])
def test_chamber_counts_match_oracle(m, atoms, count):
    g = walk(m, atoms)
    assert len(g.chambers) == count
    assert set(g.chambers) == oracle_keys(m, atoms)


def test_middle_chamber_facets(fan20):
    # the chamber with outer Bettis (7,0), (0,4), (3,2)
    (ch,) = [c for c in fan20.chambers.values()
             if {b.members[0] for b in outer_bettis(c.nilsemigroup)} == {(7, 0), (0, 4), (3, 2)}]
    assert {f.normal for f in ch.facets} == {(7, -2), (-1, 1)}
    assert all(f.kind == "interior" for f in ch.facets)
    assert {f.outer_betti for f in ch.facets} == {(7, 0), (0, 4)}


def test_fan_boundary(fan20):
    kinds = sorted((f.normal, f.kind) for ch in fan20.chambers.values() for f in ch.facets if f.kind == "boundary")
    assert kinds == [((-1, 6), "boundary"), ((1, 0), "boundary")]


def test_c_of():
    assert c_of(13, (1, 2, 9)).halfspaces == ((-1, 0, 3), (-1, 7, 0), (1, 4, -1), (2, -1, 0))
    assert c_of(20, (6, 11)).halfspaces == ((-1, 6), (1, 0))
    assert c_of(2, (1,)).halfspaces == ((1,),)


@pytest.mark.parametrize("m,atoms", [(20, (6, 11)), (13, (1, 2, 9)), (9, (1, 3, 4, 6, 7)), (10, (1, 4, 6))])
def test_chambers_cover_c_of(m, atoms):
    g = walk(m, atoms)
    support = c_of(m, atoms)
    for ch in g.chambers.values():
        assert all(contains(support, r) for r in ch.rays)
    boundary = {f.normal for ch in g.chambers.values() for f in ch.facets if f.kind == "boundary"}
    assert boundary == set(support.halfspaces)


def test_example_fan_shares_a_face(n_inner_minimal):
    g = walk(9, (1, 3, 4, 6, 7))
    cones = [ch.cone for ch in g.chambers.values()]
    common = ConeH.make(5, [e for c in cones for e in c.equations], [h for c in cones for h in c.halfspaces])
    assert cone_dim(common) == 3
    f_n = betti_cone(n_inner_minimal)
    assert all(contains(f_n, r) for r in double_description(common))
    assert not all(contains(common, r) for r in double_description(f_n))
    assert not is_kunz(n_inner_minimal)


def test_crossing_is_an_involution(fan13):
    for ch in fan13.chambers.values():
        for f in ch.facets:
            if f.kind != "interior":
                continue
            other = cross_record(ch, f)
            assert other.key == f.neighbor
            back = [g for g in fan13.chambers[other.key].facets if g.neighbor == ch.key]
            assert len(back) == 1
            assert (back[0].outer_betti, back[0].inner) == (f.inner, f.outer_betti)
            assert cross_facet(other, f.inner, f.outer_betti) == ch.nilsemigroup
            assert cross_check_numeric(ch, f, other)
            assert wall_trade_ok(ch, f)


def test_redundant_outer_betti_leaves_an_element_dangling(fan13):
    hits = 0
    for ch in fan13.chambers.values():
        n = ch.nilsemigroup
        facet_bettis = {f.outer_betti for f in ch.facets}
        for b in outer_bettis(n):
            (z,) = b.members
            if z == (1, 2, 0) and z not in facet_bettis:
                a = min(n.fact_sets[b.residue])
                with pytest.raises(ClosureViolation, match="dangling"):
                    cross_facet(n, z, a)
                hits += 1
    assert hits >= 1


def test_edges_are_symmetric(fan13):
    for (a, b), normal in fan13.edges.items():
        assert [f.normal for f in fan13.chambers[a].facets if f.neighbor == b] == [normal]


def test_seed_does_not_change_output():
    assert walk(13, (1, 2, 9), seed=0).dumps() == walk(13, (1, 2, 9), seed=7).dumps()
    s0, s1 = initial_chamber(20, (6, 11), 0), initial_chamber(20, (6, 11), 3)
    assert s0.key in walk(20, (6, 11)).chambers and s1.key in walk(20, (6, 11)).chambers


def test_json_round_trip(fan13):
    text = fan13.dumps()
    back = fan_from_json(json.loads(text))
    assert isinstance(back, FanGraph)
    assert back.dumps() == text
    data = json.loads(text)
    assert {"m", "atoms", "chambers", "edges"} <= set(data)
    assert all("rays" in ch and "nilsemigroup" in ch for ch in data["chambers"])


def test_point_location(fan20):
    assert len(chamber_containing(fan20, (1, 2))) == 1
    # points on the walls x_6 = x_11 and 7 x_6 = 2 x_11 lie in both neighbours
    assert len(chamber_containing(fan20, (1, 1))) == 2
    assert len(chamber_containing(fan20, (2, 7))) == 2


def test_bad_atoms():
    with pytest.raises(ValueError):
        walk(12, (2, 4))
    with pytest.raises(ValueError):
        walk(12, (3, 3))
    with pytest.raises(ValueError):
        walk(12, (0, 5))


def test_refinement_of_faces(fan13):
    seen = 0
    for ch in fan13.chambers.values():
        for face in face_nilsemigroups(ch):
            finer = refine_to_staircase(face)
            assert is_refinement(face, finer.nilsemigroup)
            seen += 1
    assert seen > 5


def test_walk_all_small():
    res = walk_all(13, 3)
    rows = {s.atoms: s for s in res.summaries}
    assert rows[(1, 2, 9)].chambers == 5
    assert [s.atoms for s in res.summaries] == sorted(rows)
    assert res.violations == []
    assert res.facet_histogram == {3: 1300, 4: 864}


def test_walk_all_matches_oracle_for_two_atoms():
    res = walk_all(6, 2)
    for s in res.summaries:
        assert s.chambers == len(oracle_keys(6, s.atoms))


def test_walk_all_workers_do_not_change_results(tmp_path):
    one = walk_all(9, 3, workers=1, out_dir=tmp_path / "a")
    two = walk_all(9, 3, workers=2, out_dir=tmp_path / "b")
    assert one == two
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
