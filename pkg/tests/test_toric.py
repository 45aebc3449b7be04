from fractions import Fraction

import pytest

from gkzflop.errors import Infeasible, NonUnitDegree, NotAdjacent, \
    RankDeficient
from gkzflop.toric import (ToricData, Triangulation, adjacent_sector,
                           canonical_lift, check_triangulation, compute_box,
                           cone_index, essential_cones, essential_sectors,
                           find_circuit, interior_cones, is_interior_point,
                           star_of, star_rays, validate_toric_data)
from support import run_box_bijection

F = Fraction


def test_fixture_data_validates(pack):
    validate_toric_data(pack.data)
    for t in (pack.t_plus, pack.t_minus):
        ok, messages = check_triangulation(pack.data, t)
        assert ok, messages


def test_validation_rejects_bad_degree_and_rank():
    with pytest.raises(NonUnitDegree):
        validate_toric_data(ToricData(rank=2, points=((0, 1), (1, 2)),
                                      deg=(0, 1)))
    with pytest.raises(RankDeficient):
        validate_toric_data(ToricData(rank=2, points=((0, 1), (0, 1)),
                                      deg=(0, 1)))


def test_circuit_identification(a1, conifold):
    assert a1.circuit.h == (1, -2, 1)
    assert a1.circuit.I_plus == frozenset({0, 2})
    assert a1.circuit.I_minus == frozenset({1})
    assert conifold.circuit.h == (1, -1, -1, 1)
    assert conifold.circuit.I_minus == frozenset({1, 2})


def test_circuit_requires_adjacency(a1):
    with pytest.raises(NotAdjacent):
        find_circuit(a1.data, a1.t_plus, a1.t_plus)


def test_star_of_middle_ray(a1):
    star = star_of(a1.t_plus, {1})
    assert {frozenset(s) for s in star} == {frozenset({0, 1}),
                                           frozenset({1, 2})}
    # star_rays excludes sigma itself: these are the algebra generators
    assert star_rays(a1.t_plus, {1}) == frozenset({0, 2})


def test_box_contents(a1, conifold):
    plus = compute_box(a1.data, a1.t_plus)
    assert [g.coords for g in plus] == [(0, 0, 0)]
    minus = compute_box(a1.data, a1.t_minus)
    coords = {g.coords for g in minus}
    assert coords == {(0, 0, 0), (F(1, 2), 0, F(1, 2))}
    points = {g.point for g in minus}
    assert points == {(0, 0), (1, 1)}
    for side in (conifold.t_plus, conifold.t_minus):
        assert [g.coords for g in compute_box(conifold.data, side)] \
            == [(0, 0, 0, 0)]


def test_cone_index_values(a1, conifold):
    assert cone_index(a1.data, {0, 2}) == 2
    assert cone_index(a1.data, {0, 1}) == 1
    assert all(cone_index(conifold.data, s) == 1
               for s in conifold.t_plus.maximal)


def test_box_bijection_brute_force(pack):
    """Bounded rational solution classes match the box, per lattice point."""
    for t in (pack.t_plus, pack.t_minus):
        run_box_bijection(pack.data, t)


def test_essential_cones(a1, conifold):
    def cones(p, t):
        return {frozenset(s) for s in essential_cones(p.data, t, p.circuit)}

    assert cones(a1, a1.t_plus) == {frozenset({0, 1}), frozenset({1, 2})}
    assert cones(a1, a1.t_minus) == {frozenset({0, 2})}
    assert cones(conifold, conifold.t_plus) == {frozenset({0, 1, 2}),
                                                frozenset({1, 2, 3})}
    assert cones(conifold, conifold.t_minus) == {frozenset({0, 1, 3}),
                                                 frozenset({0, 2, 3})}


def test_essential_sectors_all_sectors_on_fixtures(pack):
    for t in (pack.t_plus, pack.t_minus):
        ess = {g.coords for g in essential_sectors(pack.data, t,
                                                   pack.circuit)}
        assert ess == {g.coords for g in compute_box(pack.data, t)}


def test_canonical_lift_properties(a1):
    box = compute_box(a1.data, a1.t_minus)
    for g in box:
        for c in [(0, 0), (1, 1), (2, 2)]:
            lift = canonical_lift(a1.data, g, c)
            assert tuple(v % 1 for v in lift.values) == g.coords
            total = a1.data.combine(lift.values)
            assert total == tuple(F(-v) for v in c)


def test_lift_infeasible_when_points_do_not_span():
    # index-2 sublattice: no integer combination of (2,) reaches -1
    from gkzflop.toric import TwistedSector
    data = ToricData(rank=1, points=((2,),), deg=(1,))
    sector = TwistedSector(coords=(0,), point=(0,))
    with pytest.raises(Infeasible):
        canonical_lift(data, sector, (1,))


def test_adjacent_sector_walk(a1):
    g0 = compute_box(a1.data, a1.t_plus)[0]
    k = 1  # the unique negative-side ray of h = (1, -2, 1)
    reached = {}
    for r in (0, 1):
        sector, _ = adjacent_sector(a1.data, a1.circuit, a1.t_minus,
                                    g0, k, r)
        reached[r] = sector.coords
    assert reached[0] == (0, 0, 0)
    assert reached[1] == (F(1, 2), 0, F(1, 2))


def test_interior_cones_and_points(a1, conifold):
    gens = {frozenset(s) for s in interior_cones(a1.data, a1.t_plus)}
    assert gens == {frozenset({1}), frozenset({0, 1}), frozenset({1, 2})}
    assert {frozenset(s) for s in interior_cones(a1.data, a1.t_minus)} \
        == {frozenset({0, 2})}
    assert is_interior_point(a1.data, a1.t_plus, (1, 1))
    assert not is_interior_point(a1.data, a1.t_plus, (0, 1))
    assert not is_interior_point(a1.data, a1.t_plus, (2, 1))
    assert is_interior_point(conifold.data, conifold.t_plus, (1, 1, 2))
    assert not is_interior_point(conifold.data, conifold.t_plus, (1, 1, 1))


def test_degenerate_triangulation_is_rejected(a1):
    bad = Triangulation(label="bad", maximal=(frozenset({0, 2}),
                                              frozenset({0, 1})))
    ok, messages = check_triangulation(a1.data, bad)
    assert not ok and messages
