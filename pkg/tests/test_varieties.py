import itertools
import random

import pytest
from gmpy2 import mpq

from nilwgp.errors import ArityError, BudgetExceeded, GuardError, PreconditionError
from nilwgp.exact import MultiPoly
from nilwgp.nilgroup import AbelianPoint, TorusSpec, abelian, group_spec, heisenberg, sample_generics, upp
from nilwgp.progressions import PointSet, arithmetic_progression, nilbox
from nilwgp.varieties import (SubvarietySpec, annihilator_search, catalog_lines, coordinate_conditions,
                              hypersurface, intersect_count, intersect_points, make_catalog, member)


def var(n, i):
    return MultiPoly.variable(n, i)


def test_member_examples():
    x1 = hypersurface(var(3, 0))
    assert member(x1, (0, 5, 7))
    assert member(hypersurface(var(3, 0) * var(3, 1) - var(3, 2)), (2, 3, 6))
    assert not member(hypersurface(var(1, 0)), (mpq(1, 2),))
    with pytest.raises(ArityError):
        member(x1, (0, 1))


def test_intersect_count_examples():
    A = arithmetic_progression([(1, 0), (0, 1)], 3)
    assert intersect_count(hypersurface(var(2, 0)), A) == 7
    H = heisenberg()
    box = nilbox(list(H.basis[::2]), 1, H).group
    assert intersect_count(hypersurface(var(3, 0)), box) == 9
    empty = SubvarietySpec((MultiPoly.constant(3, 1),), 3)
    assert intersect_count(empty, box) == 0


def test_count_matches_member_sum():
    H = heisenberg()
    box = nilbox(sample_generics(H, 2, bit_size=3, seed=2), 2, H).group
    for W in make_catalog(H, 2)[:200]:
        ref = sum(member(W, g, H) for g in box)
        assert intersect_count(W, box) == ref == intersect_count(W, box, exact_only=True)
        assert len(intersect_points(W, box)) == ref


def test_count_additive_on_disjoint_union():
    H = heisenberg()
    pts = list(nilbox(sample_generics(H, 2, bit_size=2, seed=7), 2, H).group)
    X, Y = PointSet(H, "group", pts[::2]), PointSet(H, "group", pts[1::2])
    XY = PointSet(H, "group", pts)
    for W in make_catalog(H, 2)[:100]:
        assert intersect_count(W, XY) == intersect_count(W, X) + intersect_count(W, Y)


def test_catalog_contents():
    G2 = abelian(2, 0)
    vids = [W.vid for W in make_catalog(G2, 1)]
    assert {"hyperplane:x12", "hyperplane:x13"} <= set(vids)
    H = heisenberg()
    cat = make_catalog(H, 2)
    assert len(cat) == 259
    assert all(W.within(2) for W in cat)
    centre = {(W.polys[0], W.polys[1]) for W in cat if W.family == "central"}
    for c, d in itertools.product(range(-2, 3), repeat=2):
        pair = (var(3, 0) - MultiPoly.constant(3, c), var(3, 2) - MultiPoly.constant(3, d))
        assert pair in centre
    assert len(make_catalog(H, 3)) == 1123


def test_catalog_deterministic_and_proper():
    H = heisenberg()
    a, b = make_catalog(H, 2), make_catalog(H, 2)
    assert catalog_lines(a) == catalog_lines(b)
    for W in a:
        assert W.witness is not None and not member(W, W.witness)
    assert len({W.vid for W in a}) == len(a)


def test_catalog_guard():
    with pytest.raises(GuardError):
        make_catalog(upp(4), 3, guard=1000)


def test_complexity_and_codim():
    W = coordinate_conditions(3, {0: 1, 2: -2})
    assert W.complexity == (2, 1, 2)
    assert W.codim == 2
    with pytest.raises(PreconditionError):
        SubvarietySpec((), 2)


def test_annihilator_planted_line():
    rng = random.Random(0)
    pts = [(x, 2 * x) for x in rng.sample(range(-10 ** 6, 10 ** 6), 40)]
    pts += [(rng.randint(-10 ** 6, 10 ** 6), rng.randint(-10 ** 6, 10 ** 6)) for _ in range(60)]
    S = PointSet(TorusSpec(2, 0), "group", [AbelianPoint((mpq(a), mpq(b))) for a, b in pts])
    res = annihilator_search(S, 1, 0.35, seed=0)
    assert res is not None
    assert res.variety.polys[0] == (var(2, 0) * 2 - var(2, 1)).primitive()
    assert res.support == intersect_count(res.variety, S) == 40


def test_annihilator_generic_none():
    rng = random.Random(3)
    T = TorusSpec(2, 0)
    pts = [(rng.randint(-10 ** 9, 10 ** 9), rng.randint(-10 ** 9, 10 ** 9)) for _ in range(100)]
    # oracle: no three points collinear, so no line carries more than 2 points
    for (a, b), (c, d), (e, f) in itertools.combinations(pts[:40], 3):
        assert (c - a) * (f - b) != (d - b) * (e - a)
    S = PointSet(T, "group", [AbelianPoint((mpq(a), mpq(b))) for a, b in pts])
    assert annihilator_search(S, 1, 0.5, seed=0) is None


def test_annihilator_full_hyperplane():
    H = heisenberg()
    pts = [H.from_coords([0, b, c]) for b in range(-3, 4) for c in range(-3, 4)]
    S = PointSet(H, "group", pts)
    res = annihilator_search(S, 1, 1.0, seed=1)
    assert res.variety.polys[0] == var(3, 0)
    assert res.support == len(S)
    with pytest.raises(BudgetExceeded):
        annihilator_search(S, 6, 0.5, budget=20)


def test_abelian_torus_catalog_membership():
    T = group_spec("abelian:1,1")
    cat = make_catalog(T, 1)
    assert cat
    g = AbelianPoint((mpq(0),), (mpq(1),))
    assert any(member(W, g, T) for W in cat)
