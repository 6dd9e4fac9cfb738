"""Greedy translate covers: find T with targets inside T·B and/or B·T.

Scoring a candidate translate t means testing t^-1 u in B (or u t^-1 in B)
for every target u.  For plain unitriangular matrix groups this is done in
bulk with numpy: entries are reduced mod a prime and the product is
fingerprinted with two random linear forms.  Fingerprints only steer the
greedy choice; callers verify the final cover with exact arithmetic.
"""

from __future__ import annotations

import random
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .nilgroup import MatrixGroupSpec, QuotientSpec, UnipotentMatrix, _layout

PRIME = (1 << 31) - 1


def spread(items: list, limit: int | None) -> list:
    """At most ``limit`` items, evenly spaced, first item kept."""
    if limit is None or len(items) <= limit:
        return list(items)
    if limit <= 0:
        return []
    step = len(items) / limit
    return [items[int(k * step)] for k in range(limit)]


def fiber_index(base):
    """Group ``base`` by its image modulo the last central-series term (matrix groups only)."""
    spec = base.spec
    if not isinstance(spec, MatrixGroupSpec):
        return None, None
    from .kernels import _Decomposition

    dec = _Decomposition(spec)

    def key(g):
        return dec.split(spec.algebra_coords(spec.log(g)))[0]

    index = {}
    for b in base:
        index.setdefault(key(b), []).append(b)
    return key, index


class _ExactTranslator:
    def __init__(self, base, targets):
        self.spec = base.spec
        self.keys = base.keys()
        self.targets = targets

    def mask(self, t, side: str, rows=None) -> np.ndarray:
        spec = self.spec
        tinv = spec.inv(t)
        targets = self.targets if rows is None else [self.targets[i] for i in rows]
        if side == "left":
            hits = [spec.mul(tinv, u).key() in self.keys for u in targets]
        else:
            hits = [spec.mul(u, tinv).key() in self.keys for u in targets]
        return np.array(hits, dtype=bool)


def _residues(entries) -> list[int] | None:
    from .varieties import _mod_p

    out = []
    for v in entries:
        try:
            r = _mod_p(v)
        except TypeError:
            return None
        if r < 0:
            return None
        out.append(r)
    return out


class _ModpTranslator:
    def __init__(self, base, targets, rows_base, rows_targets):
        n = base.spec.size
        self.table = _layout(n)[2]
        m = len(self.table)
        rng = random.Random(0xC0FE)
        self.forms = [np.array([rng.randrange(1, PRIME) for _ in range(m)], dtype=np.int64) for _ in range(2)]
        self.U = np.array(rows_targets, dtype=np.int64).reshape(len(rows_targets), m)
        self.base_keys = np.sort(self._keys(np.array(rows_base, dtype=np.int64).reshape(len(rows_base), m)))
        self.spec = base.spec

    def _keys(self, R: np.ndarray) -> np.ndarray:
        hs = []
        for form in self.forms:
            h = np.zeros(R.shape[0], dtype=np.int64)
            for k in range(R.shape[1]):
                h = (h + R[:, k] * form[k]) % PRIME
            hs.append(h)
        return (hs[0] << 31) | hs[1]

    def mask(self, t, side: str, rows=None) -> np.ndarray:
        v = _residues(self.spec.inv(t).entries)
        if v is None:
            raise ArithmeticError("translate not representable mod p")
        U = self.U if rows is None else self.U[rows]
        cols = []
        for k, pairs in enumerate(self.table):
            col = (U[:, k] + v[k]) % PRIME
            for p, q in pairs:
                if side == "left":
                    col = (col + v[p] * U[:, q]) % PRIME
                else:
                    col = (col + U[:, p] * v[q]) % PRIME
            cols.append(col)
        R = np.stack(cols, axis=1) if cols else np.zeros((U.shape[0], 0), dtype=np.int64)
        keys = self._keys(R)
        pos = np.searchsorted(self.base_keys, keys)
        pos = np.minimum(pos, len(self.base_keys) - 1)
        return self.base_keys[pos] == keys


def _translator(base, targets):
    spec = base.spec
    if isinstance(spec, MatrixGroupSpec) and not isinstance(spec, QuotientSpec) and spec.size >= 2:
        if all(isinstance(g, UnipotentMatrix) for g in targets):
            rb = [_residues(b.entries) for b in base]
            rt = [_residues(u.entries) for u in targets]
            if all(r is not None for r in rb) and all(r is not None for r in rt):
                return _ModpTranslator(base, targets, rb, rt)
    return _ExactTranslator(base, targets)


def greedy_translate_cover(targets: Sequence, base, sides: Sequence[str] = ("left", "right"), *,
                           limit: int | None = 48, anchors: int = 2, prune: bool = True) -> list:
    """Translates T so that every target lies in t·base (side "left") and in base·t
    (side "right") for some t in T, for each requested side.

    Each round takes the first uncovered target of each side plus up to
    ``anchors - 1`` evenly spaced others as anchors u; candidates are
    u·b^-1 (or b^-1·u) with b drawn evenly from ``base`` and from the part of
    ``base`` over the same point of G/Z as u.  The candidate covering most
    outstanding (target, side) pairs wins; a final pass drops redundant
    translates.
    """
    if not len(base):
        raise PreconditionError("cannot cover with an empty set")
    targets = list(targets)
    spec = base.spec
    pool = spread(base.elements(), limit)
    e = spec.identity()
    if e in base and all(b.key() != e.key() for b in pool):
        pool = [e] + pool
    key, fibers = fiber_index(base) if limit is not None else (None, None)
    tr = _translator(base, targets)
    todo = {s: np.ones(len(targets), dtype=bool) for s in sides}
    T, masks = [], []
    while any(m.any() for m in todo.values()):
        cands, seen = [], set()
        for side in sides:
            idx = np.nonzero(todo[side])[0]
            if not len(idx):
                continue
            for a in [int(idx[0])] + [int(i) for i in spread(list(idx[1:]), anchors - 1)]:
                u = targets[a]
                chosen = list(pool)
                if fibers is not None:
                    chosen += spread(fibers.get(key(u), []), limit)
                for b in chosen:
                    binv = spec.inv(b)
                    t = spec.mul(u, binv) if side == "left" else spec.mul(binv, u)
                    if t.key() not in seen:
                        seen.add(t.key())
                        cands.append(t)
        open_rows = {s: np.nonzero(todo[s])[0] for s in sides}
        best, best_score = None, 0
        for t in cands:
            score = sum(int(tr.mask(t, s, open_rows[s]).sum()) for s in sides if len(open_rows[s]))
            if score > best_score:
                best, best_score = t, score
        if best is None:
            raise ArithmeticError("no candidate translate covers its anchor")
        best_masks = {s: tr.mask(best, s) for s in sides}
        T.append(best)
        masks.append(best_masks)
        for s in sides:
            todo[s] &= ~best_masks[s]
    if prune:
        keep = list(range(len(T)))
        for i in reversed(range(len(T))):
            others = [j for j in keep if j != i]
            if others and all(np.logical_or.reduce([masks[j][s] for j in others]).all() for s in sides):
                keep = others
        T = [T[j] for j in keep]
    return T
