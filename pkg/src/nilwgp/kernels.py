"""Exact counting of product representations r(c) = #{(a, b) in A x B : ab = c}.

For a matrix group G let Z be the last nonzero term of its descending central
series.  Writing log g = P(log g) + z(g) with z(g) in the (central) Lie ideal
of Z, products factor as

    log(ab) = bch(P log a, P log b) + z(a) + z(b),

so r is a sum, over pairs of fibers of the projection P, of convolutions of
the fibers' z-histograms shifted by the central part of the bch term.  Each
central coordinate is put on a lattice s * (n + f) with n integral and f a
rational class in [0, 1); histograms over n are convolved with numpy/scipy in
exact int64 arithmetic.  Groups without a Lie algebra (tori, the affine
group) fall back to a pair loop.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve

from .errors import BudgetExceeded, KindMismatchError
from .exact import rational_gcd
from .nilgroup import MatrixGroupSpec, central_series

BOX_LIMIT = 1 << 22
# use the pair loop when dense convolution would cost this many times more
SPARSE_FACTOR = 8


@dataclass(frozen=True)
class ProductStats:
    product_size: int  # |A B|
    pairs: int  # |A| |B|
    energy: int  # sum_c r(c)^2
    triples: int | None  # sum_{c in C} r(c), when C was given


class _Decomposition:
    def __init__(self, spec: MatrixGroupSpec):
        series = central_series(spec)
        last = series[-2]
        rows = [spec.algebra_coords(b) for b in last]
        from .exact import span_basis

        self.rows, self.pivots = span_basis(rows)
        self.spec = spec
        piv = set(self.pivots)
        self.free = [k for k in range(spec.dimension) if k not in piv]

    def split(self, coords):
        z = tuple(coords[p] for p in self.pivots)
        v = list(coords)
        for zi, row in zip(z, self.rows):
            if zi:
                v = [a - zi * b for a, b in zip(v, row)]
        return tuple(v[k] for k in self.free), z, v


def _floor_split(value, step):
    if not step:
        return 0, value
    q = value / step
    n = int(q.numerator // q.denominator)
    return n, q - n


def product_stats(A, B, C=None, *, budget: int | None = None) -> ProductStats:
    """|AB|, the energy sum r^2 and (optionally) the triple count sum_{c in C} r(c)."""
    if A.kind != "group" or B.kind != "group" or (C is not None and C.kind != "group"):
        raise KindMismatchError("product statistics need group-kind point sets")
    if A.spec is not B.spec or (C is not None and C.spec is not A.spec):
        raise KindMismatchError("point sets live in different ambients")
    spec = A.spec
    if isinstance(spec, MatrixGroupSpec) and len(A) and len(B):
        result = _fibered(A, B, C)
        if result is not None:
            return result
    return sparse_product_stats(A, B, C, budget=budget)


def sparse_product_stats(A, B, C=None, *, budget: int | None = None) -> ProductStats:
    """Pair-loop reference implementation (also the fallback)."""
    from .progressions import default_budget

    budget = budget or default_budget()
    if len(A) * len(B) > budget:
        raise BudgetExceeded(f"{len(A) * len(B)} products exceed budget {budget}")
    mul = A.spec.mul
    r = Counter()
    for a in A:
        for b in B:
            r[mul(a, b).key()] += 1
    triples = None if C is None else sum(r.get(k, 0) for k in C.keys())
    return ProductStats(len(r), len(A) * len(B), sum(v * v for v in r.values()), triples)


def _fibered(A, B, C):
    spec = A.spec
    dec = _Decomposition(spec)
    width = len(dec.pivots)

    def fibers(S):
        out = defaultdict(list)
        proj = {}
        for g in S:
            key, z, v = dec.split(spec.algebra_coords(spec.log(g)))
            out[key].append(z)
            if key not in proj:
                proj[key] = v
        return out, proj

    fa, pa = fibers(A)
    fb, pb = fibers(B)
    steps = []
    for i in range(width):
        diffs = [z[i] - zs[0][i] for f in (fa, fb) for zs in f.values() for z in zs]
        steps.append(rational_gcd(diffs))

    def histograms(f):
        out = {}
        for key, zs in f.items():
            split = [[_floor_split(z[i], steps[i]) for i in range(width)] for z in zs]
            frac = tuple(s[1] for s in split[0])
            lo = [min(row[i][0] for row in split) for i in range(width)]
            shape = tuple(max(row[i][0] for row in split) - lo[i] + 1 for i in range(width))
            if int(np.prod(shape, dtype=object)) > BOX_LIMIT:
                return None
            rel = np.array([[row[i][0] - lo[i] for i in range(width)] for row in split],
                           dtype=np.int64).reshape(len(zs), width)
            arr = np.zeros(shape, dtype=np.int64)
            np.add.at(arr, tuple(rel.T), 1)
            nz = [(tuple(int(i) for i in idx), int(arr[idx])) for idx in zip(*np.nonzero(arr))]
            out[key] = (frac, tuple(lo), arr, nz)
        return out

    ha = histograms(fa)
    hb = histograms(fb)
    if ha is None or hb is None:
        return None
    ea = {k: spec.exp(spec.from_algebra_coords(v)) for k, v in pa.items()}
    eb = {k: spec.exp(spec.from_algebra_coords(v)) for k, v in pb.items()}

    cells = defaultdict(list)
    for ka, ga in ea.items():
        frac_a, lo_a = ha[ka][:2]
        for kb, gb in eb.items():
            frac_b, lo_b = hb[kb][:2]
            key, zeta, _ = dec.split(spec.algebra_coords(spec.log(spec.mul(ga, gb))))
            frac = []
            offset = []
            for i in range(width):
                n_z, f_z = _floor_split(zeta[i], steps[i])
                total = frac_a[i] + frac_b[i] + f_z
                if steps[i]:
                    carry = int(total.numerator // total.denominator)
                    total -= carry
                else:
                    carry = 0
                frac.append(total)
                offset.append(lo_a[i] + lo_b[i] + n_z + carry)
            cells[(key, tuple(frac))].append((tuple(offset), ka, kb))

    targets = None
    if C is not None:
        targets = defaultdict(list)
        for g in C:
            key, z, _ = dec.split(spec.algebra_coords(spec.log(g)))
            split = [_floor_split(z[i], steps[i]) for i in range(width)]
            targets[(key, tuple(s[1] for s in split))].append(tuple(s[0] for s in split))

    conv = np.convolve if width == 1 else (lambda x, y: convolve(x, y, method="direct"))
    size = 0
    energy = 0
    triples = 0
    for cell, parts in cells.items():
        dense = []
        sparse = None
        for offset, ka, kb in parts:
            _, _, arr_a, nz_a = ha[ka]
            _, _, arr_b, nz_b = hb[kb]
            if len(nz_a) * len(nz_b) * SPARSE_FACTOR < arr_a.size * arr_b.size:
                sparse = Counter() if sparse is None else sparse
                for ia, ca in nz_a:
                    for ib, cb in nz_b:
                        sparse[tuple(x + y + o for x, y, o in zip(ia, ib, offset))] += ca * cb
            else:
                dense.append((offset, conv(arr_a, arr_b)))
        if dense and sparse is None:
            lo = [min(o[i] for o, _ in dense) for i in range(width)]
            hi = [max(o[i] + p.shape[i] for o, p in dense) for i in range(width)]
            if len(dense) == 1:
                merged = dense[0][1]
            elif int(np.prod([h - l for h, l in zip(hi, lo)])) <= BOX_LIMIT:
                merged = np.zeros([h - l for h, l in zip(hi, lo)], dtype=np.int64)
                for offset, p in dense:
                    sl = tuple(slice(o - l, o - l + n) for o, l, n in zip(offset, lo, p.shape))
                    merged[sl] += p
            else:
                sparse = Counter()
            if sparse is None:
                size += int(np.count_nonzero(merged))
                energy += int((merged * merged).sum())
                if targets is not None:
                    for t in targets.get(cell, ()):
                        idx = tuple(a - b for a, b in zip(t, lo))
                        if all(0 <= i < n for i, n in zip(idx, merged.shape)):
                            triples += int(merged[idx])
                continue
        for offset, p in dense:
            for idx in zip(*np.nonzero(p)):
                sparse[tuple(int(i) + o for i, o in zip(idx, offset))] += int(p[idx])
        size += len(sparse)
        energy += sum(v * v for v in sparse.values())
        if targets is not None:
            triples += sum(sparse.get(t, 0) for t in targets.get(cell, ()))
    return ProductStats(size, len(A) * len(B), energy, triples if C is not None else None)
