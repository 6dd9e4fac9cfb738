"""Arithmetic progressions, nilboxes and nilprogressions as exact point sets."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import BudgetExceeded, KindMismatchError, PreconditionError, SpanError
from .exact import solve_in_span
from .freelie import hall_basis
from .nilgroup import (AbelianPoint, GroupSpec, MatrixGroupSpec, NilMatrix, TorusSpec,
                       central_series)

DEFAULT_BUDGET = 10 ** 7


def default_budget() -> int:
    """State/point budget; ``NILWGP_BUDGET`` overrides the default of 10^7."""
    raw = os.environ.get("NILWGP_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    value = int(raw)
    if value <= 0:
        raise ValueError("NILWGP_BUDGET must be positive")
    return value


class PointSet:
    """Deduplicated finite set of group or algebra elements of one ambient.

    Elements are keyed by their canonical exact form (``element.key()``), so
    membership and dedup never depend on object identity.  Insertion order is
    kept, which makes every derived output deterministic.
    """

    def __init__(self, spec: GroupSpec, kind: str, elements: Iterable = ()):
        if kind not in ("group", "algebra"):
            raise ValueError(f"unknown point-set kind {kind!r}")
        self.spec = spec
        self.kind = kind
        self._items: dict = {}
        self._cache: dict = {}
        for e in elements:
            self.add(e)

    def _check(self, e):
        if self.kind == "algebra":
            if not isinstance(e, NilMatrix):
                raise KindMismatchError(f"algebra set given {type(e).__name__}")
        elif not self.spec.contains(e):
            raise KindMismatchError(f"{type(e).__name__} is not an element of {self.spec.name}")

    def add(self, e):
        self._check(e)
        self._items.setdefault(e.key(), e)
        self._cache.clear()

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self._items.values())

    def __contains__(self, e):
        return e.key() in self._items

    def keys(self):
        return self._items.keys()

    def elements(self) -> list:
        return list(self._items.values())

    def issubset(self, other: "PointSet") -> bool:
        return all(k in other._items for k in self._items)

    def union(self, other: "PointSet") -> "PointSet":
        self._compatible(other)
        out = PointSet._from_keyed(self.spec, self.kind, dict(self._items))
        for k, v in other._items.items():
            out._items.setdefault(k, v)
        return out

    def _compatible(self, other: "PointSet"):
        if other.kind != self.kind or other.spec is not self.spec:
            raise KindMismatchError("point sets live in different ambients or kinds")

    def coords(self) -> list[tuple]:
        """Ambient coordinates of every element, in iteration order."""
        if self.kind == "algebra":
            return [self.spec.algebra_coords(e) for e in self]
        return [self.spec.coords(e) for e in self]

    def serialize(self) -> list[str]:
        return [e.serialize() for e in self]

    def __eq__(self, other):
        return isinstance(other, PointSet) and self.kind == other.kind and self._items.keys() == other._items.keys()

    def __repr__(self):
        return f"PointSet({self.spec.name}, {self.kind}, size={len(self)})"

    @classmethod
    def _from_keyed(cls, spec, kind, mapping: dict) -> "PointSet":
        out = cls(spec, kind)
        out._items = mapping
        return out

    def cached(self, name: str, compute):
        """Memoise a derived quantity until the set changes."""
        if name not in self._cache:
            self._cache[name] = compute()
        return self._cache[name]


@dataclass(frozen=True)
class ProgressionSpec:
    kind: str  # "ap", "nilbox" or "nilprog"
    generators: tuple
    N: int
    spec: GroupSpec

    def __post_init__(self):
        if self.N < 0:
            raise PreconditionError("length N must be >= 0")
        if self.kind not in ("ap", "nilbox", "nilprog"):
            raise PreconditionError(f"unknown progression kind {self.kind!r}")

    def build(self, **kw):
        if self.kind == "ap":
            return arithmetic_progression(self.generators, self.N, self.spec, **kw)
        if self.kind == "nilbox":
            return nilbox(self.generators, self.N, self.spec, **kw).group
        return nilprogression(self.generators, self.N, self.spec, **kw)


def _vector_space(generators) -> tuple[TorusSpec, list[AbelianPoint]]:
    pts = []
    for y in generators:
        if isinstance(y, (tuple, list)):
            pts.append(tuple(mpq(v) for v in y))
        else:
            pts.append((mpq(y),))
    dims = {len(p) for p in pts}
    if len(dims) != 1:
        raise PreconditionError("generators have different lengths")
    spec = TorusSpec(dims.pop(), 0)
    return spec, [AbelianPoint(p) for p in pts]


def _require_abelian(spec: GroupSpec):
    if not spec.nilpotent:
        raise PreconditionError(f"{spec.name} is not abelian")
    if spec.has_lie_algebra and len(central_series(spec)) > 2:
        raise PreconditionError(f"{spec.name} is not abelian (class > 1)")


def arithmetic_progression(Y: Sequence, N: int, spec: GroupSpec | None = None, *,
                           budget: int | None = None) -> PointSet:
    """{ sum c_y y : c_y in [-N, N] } with exact dedup.

    ``Y`` may hold plain numbers or coordinate tuples (points of G_a^a), torus
    points (multiplicative coordinates are raised to the powers c_y), group
    elements of a commutative matrix group, or elements of its Lie algebra.
    """
    if N < 0:
        raise PreconditionError("N must be >= 0")
    budget = budget or default_budget()
    Y = list(Y)
    if spec is None:
        if Y and isinstance(Y[0], AbelianPoint):
            first = Y[0]
            spec = TorusSpec(len(first.additive), len(first.multiplicative))
        else:
            spec, Y = _vector_space(Y)
    _require_abelian(spec)
    if Y and isinstance(Y[0], NilMatrix):
        kind = "algebra"
        start = spec.zero()
        steps = [[y * c for c in range(-N, N + 1)] for y in Y]
        op = lambda a, b: a + b
    else:
        kind = "group"
        start = spec.identity()
        steps = [[spec.power(y, c) for c in range(-N, N + 1)] for y in Y]
        op = spec.mul
    current = {start.key(): start}
    for row in steps:
        if len(current) * len(row) > budget:
            raise BudgetExceeded(f"progression would visit {len(current) * len(row)} points (budget {budget})")
        nxt = {}
        for s in current.values():
            for y in row:
                v = op(s, y)
                nxt.setdefault(v.key(), v)
        current = nxt
    return PointSet._from_keyed(spec, kind, current)


@dataclass
class NilboxResult:
    algebra: PointSet
    group: PointSet
    images: list  # b_{m,j}, in basis order
    orders: list  # order m of each basis term
    raw_count: int

    @property
    def injective(self) -> bool:
        return len(self.group) == len(self.algebra)


def nilbox_raw_count(orders: Sequence[int], N: int) -> int:
    total = 1
    for m in orders:
        total *= 2 * N ** m + 1
    return total


def nilbox(X: Sequence[NilMatrix], N: int, spec: MatrixGroupSpec, *, budget: int | None = None,
           check_injective: bool = True) -> NilboxResult:
    """Integer box over basic-commutator images, coefficient of an order-m term in [-N^m, N^m].

    Returns the algebra-side set and its exp image.  Exp is injective on
    unipotent groups, so a size mismatch raises instead of being reported.
    """
    if N < 0:
        raise PreconditionError("N must be >= 0")
    if not spec.has_lie_algebra:
        raise PreconditionError(f"{spec.name} has no Lie algebra to build a nilbox in")
    budget = budget or default_budget()
    X = list(X)
    for x in X:
        if not spec.contains_algebra(x):
            raise KindMismatchError("nilbox generators must lie in the ambient Lie algebra")
    n = len(central_series(spec)) - 1
    hb = hall_basis(len(X), max(n, 1))
    images = hb.evaluate(X, spec.bracket)
    orders = [t.order for t in hb.terms]
    raw = nilbox_raw_count(orders, N)
    if raw > budget:
        raise BudgetExceeded(f"nilbox has {raw} raw coefficient tuples (budget {budget}); lower N or ell")
    dim = spec.dimension
    current = {tuple([mpq(0)] * dim)}
    for b, m in zip(images, orders):
        coords = spec.algebra_coords(b)
        if not any(coords):
            continue
        bound = N ** m
        multiples = [tuple(c * v for v in coords) for c in range(-bound, bound + 1)]
        current = {tuple(a + d for a, d in zip(s, mult)) for s in current for mult in multiples}
    ordered = sorted(current)
    alg = {}
    grp = {}
    for c in ordered:
        Xc = spec.from_algebra_coords(c)
        alg[Xc.key()] = Xc
        g = spec.exp(Xc)
        grp.setdefault(g.key(), g)
    result = NilboxResult(PointSet._from_keyed(spec, "algebra", alg), PointSet._from_keyed(spec, "group", grp),
                          images, orders, raw)
    if check_injective and not result.injective:
        raise ArithmeticError("exp failed to be injective on the nilbox")
    return result


def nilprogression(U: Sequence, N: int, spec: GroupSpec, *, separate_inverses: bool = False,
                   budget: int | None = None) -> PointSet:
    """All values of words in U and U^-1 with each letter's usage bounded by N.

    By default x_i and x_i^-1 share one budget of N; with
    ``separate_inverses`` each has its own.  Search runs over states
    (element, usage vector), layer by total usage, keeping only usage vectors
    not dominated by one already recorded for the same element.
    """
    if N < 0:
        raise PreconditionError("N must be >= 0")
    budget = budget or default_budget()
    U = list(U)
    for u in U:
        if not spec.contains(u):
            raise KindMismatchError("nilprogression generators must be group elements of the ambient")
    ell = len(U)
    letters = []
    for i, u in enumerate(U):
        inv = spec.inv(u)
        letters.append((u, i))
        letters.append((inv, ell + i if separate_inverses else i))
    width = 2 * ell if separate_inverses else ell
    e = spec.identity()
    frontier: dict = {e.key(): (e, [(0,) * width])}
    recorded: dict = {e.key(): [(0,) * width]}
    elements = {e.key(): e}
    visited = 1
    while frontier:
        nxt: dict = {}
        for key, (g, vectors) in frontier.items():
            for h, slot in letters:
                child = None
                for vec in vectors:
                    if vec[slot] >= N:
                        continue
                    if child is None:
                        child = spec.mul(g, h)
                        ckey = child.key()
                    new = vec[:slot] + (vec[slot] + 1,) + vec[slot + 1:]
                    known = recorded.get(ckey)
                    if known is not None and any(all(a <= b for a, b in zip(old, new)) for old in known):
                        continue
                    visited += 1
                    if visited > budget:
                        raise BudgetExceeded(f"nilprogression search exceeded {budget} states")
                    recorded.setdefault(ckey, []).append(new)
                    elements.setdefault(ckey, child)
                    slot_entry = nxt.get(ckey)
                    if slot_entry is None:
                        nxt[ckey] = (child, [new])
                    else:
                        slot_entry[1].append(new)
        frontier = nxt
    return PointSet._from_keyed(spec, "group", elements)


@dataclass
class CoverCertificate:
    t: int
    M_prime: int
    rewriting: list  # per d: integer coefficients of t*d in terms of C
    verified_points: int | None  # points of A_N(D) checked, None when skipped for budget


def change_basis_cover(D: Sequence, C: Sequence, N: int, spec: MatrixGroupSpec | None = None, *,
                       budget: int | None = None) -> CoverCertificate:
    """Scale t and length M' with A_N(D) contained in A_{M'}(C) / t.

    t is the product of |p| |q| over the nonzero rational coordinates p/q of
    the elements of D with respect to C; M' = t^2 |C| |D| N.  When the
    enumeration fits the budget every point of A_N(D) is checked against an
    explicit integer witness.
    """
    budget = budget or default_budget()

    def vec(x):
        if isinstance(x, NilMatrix):
            if spec is None:
                raise PreconditionError("NilMatrix inputs need the ambient spec")
            return list(spec.algebra_coords(x))
        if isinstance(x, (tuple, list)):
            return [mpq(v) for v in x]
        return [mpq(x)]

    Dv = [vec(d) for d in D]
    Cv = [vec(c) for c in C]
    if not Cv:
        raise SpanError("C is empty")
    coeffs = []
    for d in Dv:
        sol = solve_in_span(Cv, d)
        if sol is None:
            raise SpanError(f"{d} is not in the span of C")
        coeffs.append(sol)
    t = 1
    for row in coeffs:
        for q in row:
            if q:
                t *= abs(int(q.numerator)) * int(q.denominator)
    M_prime = t * t * len(Cv) * len(Dv) * N
    rewriting = [[int(q * t) for q in row] for row in coeffs]
    for row, ints in zip(coeffs, rewriting):
        if any(q * t != k for q, k in zip(row, ints)):
            raise ArithmeticError("scaled coordinates are not integral")
    verified = None
    if (2 * N + 1) ** len(Dv) <= budget:
        verified = 0
        dim = len(Cv[0])
        for ns in itertools.product(range(-N, N + 1), repeat=len(Dv)):
            witness = [sum(n * r[i] for n, r in zip(ns, rewriting)) for i in range(len(Cv))]
            if any(abs(w) > M_prime for w in witness):
                raise ArithmeticError("witness coefficient exceeds M'")
            lhs = [t * sum(n * d[k] for n, d in zip(ns, Dv)) for k in range(dim)]
            rhs = [sum(w * c[k] for w, c in zip(witness, Cv)) for k in range(dim)]
            if lhs != rhs:
                raise ArithmeticError("witness does not reproduce t * x")
            verified += 1
    return CoverCertificate(t, M_prime, rewriting, verified)


def set_product(A: PointSet, B: PointSet) -> PointSet:
    A._compatible(B)
    if A.kind != "group":
        raise KindMismatchError("set_product needs group-kind point sets")
    mul = A.spec.mul
    out = {}
    for a in A:
        for b in B:
            p = mul(a, b)
            out.setdefault(p.key(), p)
    return PointSet._from_keyed(A.spec, "group", out)


def set_inverse(A: PointSet) -> PointSet:
    if A.kind != "group":
        raise KindMismatchError("set_inverse needs a group-kind point set")
    inv = A.spec.inv
    out = {}
    for a in A:
        b = inv(a)
        out.setdefault(b.key(), b)
    return PointSet._from_keyed(A.spec, "group", out)


def word_ball(U: Sequence, radius: int, spec: GroupSpec, *, budget: int | None = None) -> PointSet:
    """Values of words of length <= radius in U and U^-1."""
    budget = budget or default_budget()
    letters = list(U) + [spec.inv(u) for u in U]
    e = spec.identity()
    ball = {e.key(): e}
    frontier = dict(ball)
    for _ in range(radius):
        nxt = {}
        for g in frontier.values():
            for h in letters:
                p = spec.mul(g, h)
                k = p.key()
                if k not in ball and k not in nxt:
                    nxt[k] = p
        ball.update(nxt)
        if len(ball) > budget:
            raise BudgetExceeded(f"word ball exceeded {budget} points")
        frontier = nxt
    return PointSet._from_keyed(spec, "group", ball)
