import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import word_values
from nilwgp.errors import BudgetExceeded, KindMismatchError, PreconditionError, SpanError
from nilwgp.nilgroup import NilMatrix, abelian, exp, group_spec, heisenberg, sample_generics
from nilwgp.progressions import (PointSet, ProgressionSpec, arithmetic_progression, change_basis_cover, nilbox,
                                 nilbox_raw_count, nilprogression, set_inverse, set_product, word_ball)


def values(P):
    return sorted(int(p.additive[0]) for p in P)


def test_ap_examples():
    assert values(arithmetic_progression([1], 2)) == [-2, -1, 0, 1, 2]
    assert len(arithmetic_progression([(1, 0), (0, 1)], 3)) == 49
    assert values(arithmetic_progression([2, 3], 1)) == [-5, -3, -2, -1, 0, 1, 2, 3, 5]
    with pytest.raises(PreconditionError):
        arithmetic_progression(sample_generics(heisenberg(), 1), 1, heisenberg())


def test_ap_torus_exponents():
    T = abelian(0, 1)
    from nilwgp.nilgroup import AbelianPoint
    P = arithmetic_progression([AbelianPoint((), (mpq(2),))], 2, T)
    assert sorted(p.multiplicative[0] for p in P) == [mpq(1, 4), mpq(1, 2), 1, 2, 4]


def test_nilbox_unit_generators():
    H = heisenberg()
    e12, e13, e23 = H.basis
    res = nilbox([e12, e23], 1, H)
    assert len(res.algebra) == 27 == res.raw_count
    assert res.injective
    assert nilbox_raw_count(res.orders, 1) == 27
    assert len(nilbox([e12, e23], 0, H).algebra) == 1


def test_nilbox_abelian_matches_ap():
    G = group_spec("abelian:2,0")
    X = sample_generics(G, 2, bit_size=4, seed=3)
    box = nilbox(X, 2, G).algebra
    ap = arithmetic_progression(X, 2, G)
    assert box == ap


def test_nilbox_symmetry_and_monotonicity():
    H = heisenberg()
    X = sample_generics(H, 2, seed=4)
    small = nilbox(X, 1, H)
    big = nilbox(X, 2, H)
    assert {(-x).key() for x in big.algebra} == big.algebra.keys()
    assert set_inverse(big.group) == big.group
    assert small.group.issubset(big.group)
    assert len(big.group) == len(big.algebra) == 5 * 5 * 9


def test_nilbox_budget():
    H = heisenberg()
    with pytest.raises(BudgetExceeded):
        nilbox(sample_generics(H, 2), 4, H, budget=100)


def _naive(U, N, spec):
    return set(word_values(U, N, spec.mul, spec.identity(), spec.inv, lambda g: g.key()))


@pytest.mark.parametrize("name", ["heisenberg", "upp4"])
@pytest.mark.parametrize("N", [0, 1, 2])
def test_nilprogression_matches_naive(name, N):
    spec = group_spec(name)
    U = [spec.exp(x) for x in sample_generics(spec, 2, bit_size=8, seed=1)]
    assert nilprogression(U, N, spec).keys() == _naive(U, N, spec)


def test_nilprogression_unit_generators():
    H = heisenberg()
    e12, e13, e23 = H.basis
    U = [exp(e12), exp(e23)]
    P = nilprogression(U, 1, H)
    assert P.keys() == _naive(U, 1, H)
    assert len(nilprogression(U, 0, H)) == 1
    G = abelian(1, 0)
    one = G.from_coords([1])
    assert sorted(G.coords(p)[0] for p in nilprogression([one], 2, G)) == [-2, -1, 0, 1, 2]


def test_nilprogression_separate_inverses():
    H = heisenberg()
    U = [H.exp(x) for x in sample_generics(H, 2, bit_size=8, seed=2)]
    combined = nilprogression(U, 1, H)
    separate = nilprogression(U, 1, H, separate_inverses=True)
    assert combined.issubset(separate)
    assert len(separate) > len(combined)


def test_nilprogression_structure():
    H = heisenberg()
    U = [H.exp(x) for x in sample_generics(H, 2, bit_size=8, seed=5)]
    P1, P2 = nilprogression(U, 1, H), nilprogression(U, 2, H)
    assert H.identity() in P1
    assert set_inverse(P2) == P2
    assert set_product(P1, P1).issubset(P2)
    assert P1.issubset(P2)
    with pytest.raises(BudgetExceeded):
        nilprogression(U, 6, H, budget=50)


def test_change_basis_cover():
    cert = change_basis_cover([mpq(2, 3)], [1], 1)
    assert (cert.t, cert.M_prime) == (6, 36)
    assert cert.verified_points == 3
    H = heisenberg()
    C = list(H.basis)
    same = change_basis_cover(C, C, 2, H)
    assert same.t == 1 and same.M_prime == 9 * 2
    with pytest.raises(SpanError):
        change_basis_cover([H.basis[1]], [H.basis[0]], 1, H)


def test_set_product_examples():
    H = heisenberg()
    E = PointSet(H, "group", [H.identity()])
    assert set_product(E, E) == E
    A = arithmetic_progression([1], 1)
    assert values(set_product(A, A)) == [-2, -1, 0, 1, 2]
    box = nilbox(sample_generics(H, 2, seed=6), 1, H).group
    brute = {H.mul(a, b).key() for a in box for b in box}
    assert set_product(box, box).keys() == brute
    with pytest.raises(KindMismatchError):
        set_product(nilbox(sample_generics(H, 2), 1, H).algebra, box)


def test_pointset_dedup():
    H = heisenberg()
    g = H.exp(H.basis[0])
    S = PointSet(H, "group", [g, H.exp(H.basis[0]), H.identity()])
    assert len(S) == 2
    assert S.serialize() == [x.serialize() for x in S]


def test_progression_spec():
    H = heisenberg()
    X = sample_generics(H, 2, seed=1)
    assert len(ProgressionSpec("nilbox", tuple(X), 1, H).build()) == 27
    with pytest.raises(PreconditionError):
        ProgressionSpec("nilbox", tuple(X), -1, H)


def test_word_ball_radius_one():
    A = group_spec("affine")
    from nilwgp.nilgroup import sample_group_elements
    U = sample_group_elements(A, 2, bit_size=8, seed=1)
    assert len(word_ball(U, 1, A)) == 5
    assert len(word_ball(U, 0, A)) == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 2))
def test_nilbox_contains_generators(seed, N):
    H = heisenberg()
    X = sample_generics(H, 2, bit_size=10, seed=seed)
    box = nilbox(X, N, H).algebra
    for x in X:
        assert (x in box) == (N >= 1)
    assert NilMatrix.zero(3) in box
