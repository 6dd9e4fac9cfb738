import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import product_counts
from nilwgp.covers import _ExactTranslator, _ModpTranslator, _translator, greedy_translate_cover
from nilwgp.errors import BudgetExceeded, KindMismatchError
from nilwgp.kernels import product_stats, sparse_product_stats
from nilwgp.nilgroup import group_spec, heisenberg, sample_generics, sample_group_elements
from nilwgp.progressions import PointSet, nilbox, nilprogression
from nilwgp.stats import covered


def _reference(A, B, C=None):
    r = product_counts(A, B, A.spec.mul, lambda g: g.key())
    triples = None if C is None else sum(r.get(k, 0) for k in C.keys())
    return len(r), sum(v * v for v in r.values()), triples


@pytest.mark.parametrize("name", ["heisenberg", "upp4", "upp5", "abelian:2,0", "abelian:3,0"])
@pytest.mark.parametrize("bits", [3, 32])
def test_fibered_matches_pair_loop(name, bits):
    spec = group_spec(name)
    X = sample_generics(spec, 2, bit_size=bits, seed=len(name) + bits)
    A = nilbox(X, 1, spec).group
    if len(A) > 300:
        A = PointSet(spec, "group", list(A)[::len(A) // 300])
    U = [spec.exp(x) for x in X]
    B = nilprogression(U, 1, spec)
    for S, T in ((A, A), (A, B), (B, A)):
        st_ = product_stats(S, T, B)
        size, energy, triples = _reference(S, T, B)
        assert (st_.product_size, st_.energy, st_.triples) == (size, energy, triples)
        assert st_ == sparse_product_stats(S, T, B)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["heisenberg", "upp4"]), st.integers(1, 40), st.integers(1, 40))
def test_random_subsets(seed, name, na, nb):
    spec = group_spec(name)
    rng = random.Random(seed)
    pool = list(nilbox(sample_generics(spec, 2, bit_size=2, seed=seed), 1, spec).group)
    A = PointSet(spec, "group", rng.sample(pool, min(na, len(pool))))
    B = PointSet(spec, "group", rng.sample(pool, min(nb, len(pool))))
    st_ = product_stats(A, B, A)
    assert (st_.product_size, st_.energy, st_.triples) == _reference(A, B, A)


def test_torus_and_affine_fallback():
    for name in ("abelian:1,1", "affine"):
        spec = group_spec(name)
        U = sample_group_elements(spec, 2, bit_size=5, seed=1)
        P = nilprogression(U, 1, spec) if name != "affine" else PointSet(spec, "group", list(U))
        st_ = product_stats(P, P, P)
        assert (st_.product_size, st_.energy, st_.triples) == _reference(P, P, P)


def test_kind_and_budget_errors():
    H = heisenberg()
    box = nilbox(sample_generics(H, 2), 1, H)
    with pytest.raises(KindMismatchError):
        product_stats(box.algebra, box.algebra)
    with pytest.raises(BudgetExceeded):
        sparse_product_stats(box.group, box.group, budget=10)


def test_modp_masks_match_exact():
    H = heisenberg()
    X = sample_generics(H, 2, seed=3)
    P = nilprogression([H.exp(x) for x in X], 2, H)
    B = nilbox(X, 2, H).group
    targets = list(P)
    fast = _translator(B, targets)
    slow = _ExactTranslator(B, targets)
    assert isinstance(fast, _ModpTranslator)
    for t in list(B)[:25]:
        for side in ("left", "right"):
            assert (fast.mask(t, side) == slow.mask(t, side)).all()


@pytest.mark.parametrize("sides", [("left",), ("right",), ("left", "right")])
def test_greedy_cover_is_a_cover(sides):
    H = heisenberg()
    X = sample_generics(H, 2, seed=11)
    P = nilprogression([H.exp(x) for x in X], 2, H)
    B = nilbox(X, 2, H).group
    T = greedy_translate_cover(list(B), P, sides)
    for side in sides:
        assert covered(B, T, P, side)
