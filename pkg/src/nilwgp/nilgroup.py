"""Unitriangular matrix groups over exact fields.

A Lie algebra element is a :class:`NilMatrix` (strictly upper triangular) and
a group element is a :class:`UnipotentMatrix` (unit diagonal).  Both store
only the strictly-upper entries, row-major, which doubles as their canonical
key.  Group commutators follow ``[x, y] = x^-1 y^-1 x y``; Lie brackets are
``XY - YX``.  With this convention ``[exp e12, exp e23] = exp(+e13)``.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from gmpy2 import mpq
from sympy.polys.fields import FracElement

from .errors import GuardError, KindMismatchError, NotAnIdealError, PreconditionError, ShapeError
from .exact import FunctionFieldMode, format_scalar, rref, solve_in_span, span_basis

ZERO = mpq(0)
_MPQ = type(ZERO)


@lru_cache(maxsize=None)
def _layout(n: int):
    positions = [(i, j) for i in range(n) for j in range(i + 1, n)]
    index = {p: k for k, p in enumerate(positions)}
    table = []
    for i, j in positions:
        table.append(tuple((index[(i, k)], index[(k, j)]) for k in range(i + 1, j)))
    return tuple(positions), index, tuple(table)


def _canon(vals):
    """Canonical entry tuple: rationals as mpq, ground field constants demoted to mpq."""
    for x in vals:
        if type(x) is not _MPQ:
            break
    else:
        return tuple(vals)
    out = []
    for x in vals:
        if isinstance(x, FracElement):
            if x.numer.is_ground and x.denom.is_ground:
                x = mpq(x.numer.LC) / mpq(x.denom.LC)
        elif type(x) is not _MPQ:
            x = mpq(x)
        out.append(x)
    return tuple(out)


def _upper_mul(a, b, table):
    out = []
    for pairs in table:
        s = ZERO
        for p, q in pairs:
            x = a[p]
            if x:
                y = b[q]
                if y:
                    s = s + x * y
        out.append(s)
    return out


class _UpperBase:
    __slots__ = ("n", "entries", "_hash")

    def __init__(self, n: int, entries: Sequence):
        if len(entries) != n * (n - 1) // 2:
            raise ShapeError(f"{len(entries)} entries do not fill a {n}x{n} strictly upper part")
        self.n = n
        self.entries = _canon(entries)
        self._hash = None

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]):
        n = len(rows)
        positions = _layout(n)[0]
        for i in range(n):
            if len(rows[i]) != n:
                raise ShapeError("matrix is not square")
            for j in range(i):
                if rows[i][j]:
                    raise ShapeError("entry below the diagonal")
        cls._check_diagonal(rows)
        return cls(n, [mpq(rows[i][j]) if not isinstance(rows[i][j], FracElement) else rows[i][j] for i, j in positions])

    @classmethod
    def _check_diagonal(cls, rows):
        raise NotImplementedError

    def __getitem__(self, ij):
        i, j = ij
        if i >= j:
            return self._diag() if i == j else ZERO
        return self.entries[_layout(self.n)[1][(i, j)]]

    def _diag(self):
        raise NotImplementedError

    def dense(self) -> list[list]:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def key(self) -> tuple:
        return self.entries

    def serialize(self) -> str:
        return "[" + " ".join(format_scalar(x) for x in self.entries) + "]"

    def __eq__(self, other):
        return type(self) is type(other) and self.n == other.n and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.n, self.entries))
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({self.n}, {self.serialize()})"


class NilMatrix(_UpperBase):
    """Strictly upper triangular n x n matrix (a Lie algebra element)."""

    __slots__ = ()

    @classmethod
    def _check_diagonal(cls, rows):
        if any(rows[i][i] for i in range(len(rows))):
            raise ShapeError("nilpotent matrix must have zero diagonal")

    def _diag(self):
        return ZERO

    @classmethod
    def zero(cls, n: int) -> "NilMatrix":
        return cls(n, [ZERO] * (n * (n - 1) // 2))

    @classmethod
    def unit(cls, n: int, i: int, j: int, c=1) -> "NilMatrix":
        entries = [ZERO] * (n * (n - 1) // 2)
        entries[_layout(n)[1][(i, j)]] = mpq(c)
        return cls(n, entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def _check(self, other):
        if not isinstance(other, NilMatrix):
            raise KindMismatchError(f"expected NilMatrix, got {type(other).__name__}")
        if other.n != self.n:
            raise ShapeError(f"size mismatch {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return NilMatrix(self.n, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check(other)
        return NilMatrix(self.n, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return NilMatrix(self.n, [-a for a in self.entries])

    def __mul__(self, c):
        if isinstance(c, _UpperBase):
            return NotImplemented
        return NilMatrix(self.n, [a * c for a in self.entries])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return NilMatrix(self.n, [a / c for a in self.entries])

    def __matmul__(self, other):
        self._check(other)
        return NilMatrix(self.n, _upper_mul(self.entries, other.entries, _layout(self.n)[2]))

    def bracket(self, other) -> "NilMatrix":
        self._check(other)
        table = _layout(self.n)[2]
        ab = _upper_mul(self.entries, other.entries, table)
        ba = _upper_mul(other.entries, self.entries, table)
        return NilMatrix(self.n, [x - y for x, y in zip(ab, ba)])


class UnipotentMatrix(_UpperBase):
    """Unit upper triangular matrix; ``entries`` holds the strictly-upper part of g - I."""

    __slots__ = ()

    @classmethod
    def _check_diagonal(cls, rows):
        if any(rows[i][i] != 1 for i in range(len(rows))):
            raise ShapeError("unipotent matrix must have unit diagonal")

    def _diag(self):
        return mpq(1)

    @classmethod
    def identity(cls, n: int) -> "UnipotentMatrix":
        return cls(n, [ZERO] * (n * (n - 1) // 2))

    def is_identity(self) -> bool:
        return not any(self.entries)

    def __mul__(self, other):
        if not isinstance(other, UnipotentMatrix):
            return NotImplemented
        if other.n != self.n:
            raise ShapeError(f"size mismatch {self.n} vs {other.n}")
        prod = _upper_mul(self.entries, other.entries, _layout(self.n)[2])
        return UnipotentMatrix(self.n, [a + b + c for a, b, c in zip(self.entries, other.entries, prod)])

    def inverse(self) -> "UnipotentMatrix":
        table = _layout(self.n)[2]
        neg = [-a for a in self.entries]
        total = list(neg)
        power = neg
        for _ in range(self.n - 2):
            power = _upper_mul(power, neg, table)
            if not any(power):
                break
            total = [a + b for a, b in zip(total, power)]
        return UnipotentMatrix(self.n, total)


def exp(X: NilMatrix) -> UnipotentMatrix:
    """sum_{k<n} X^k / k!, exact."""
    if not isinstance(X, NilMatrix):
        raise KindMismatchError("exp expects a NilMatrix")
    table = _layout(X.n)[2]
    total = list(X.entries)
    power = list(X.entries)
    for k in range(2, X.n):
        power = _upper_mul(power, X.entries, table)
        if not any(power):
            break
        f = math.factorial(k)
        total = [a + b / f for a, b in zip(total, power)]
    return UnipotentMatrix(X.n, total)


def log(g: UnipotentMatrix) -> NilMatrix:
    """sum_{k>=1} (-1)^{k+1} (g - I)^k / k, truncated at k = n - 1."""
    if not isinstance(g, UnipotentMatrix):
        raise KindMismatchError("log expects a UnipotentMatrix")
    table = _layout(g.n)[2]
    U = g.entries
    total = list(U)
    power = list(U)
    for k in range(2, g.n):
        power = _upper_mul(power, U, table)
        if not any(power):
            break
        if k % 2:
            total = [a + b / k for a, b in zip(total, power)]
        else:
            total = [a - b / k for a, b in zip(total, power)]
    return NilMatrix(g.n, total)


def bch_star(X: NilMatrix, Y: NilMatrix) -> NilMatrix:
    """log(exp X exp Y)."""
    return log(exp(X) * exp(Y))


def group_commutator(x: UnipotentMatrix, y: UnipotentMatrix) -> UnipotentMatrix:
    return x.inverse() * y.inverse() * x * y


def iterated_commutator(elements: Sequence, mode: str | None = None, spec: "GroupSpec | None" = None):
    """Right-nested ``[X0, [X1, ..., Xk]]``; a single element is returned unchanged.

    ``mode`` is ``"algebra"`` (Lie bracket) or ``"group"`` (``x^-1 y^-1 x y``);
    when omitted it is inferred from the element types.  With ``spec`` the
    spec's own bracket / commutator is used (needed for quotients).
    """
    if not elements:
        raise PreconditionError("iterated commutator of no elements")
    types = {type(e) for e in elements}
    if len(types) != 1:
        raise KindMismatchError("mixed algebra and group elements")
    inferred = "algebra" if isinstance(elements[0], NilMatrix) else "group"
    mode = mode or inferred
    if mode != inferred:
        raise KindMismatchError(f"{mode} mode given {inferred} elements")
    if mode == "algebra":
        op = spec.bracket if spec is not None else (lambda a, b: a.bracket(b))
    else:
        op = spec.commutator if spec is not None else group_commutator
    acc = elements[-1]
    for e in reversed(elements[:-1]):
        acc = op(e, acc)
    return acc


# ---------------------------------------------------------------------------
# abelian and affine points


@dataclass(frozen=True)
class AbelianPoint:
    """Point of G_a^a x G_m^b: additive coordinates then nonzero multiplicative ones."""

    additive: tuple
    multiplicative: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "additive", tuple(mpq(x) for x in self.additive))
        object.__setattr__(self, "multiplicative", tuple(mpq(x) for x in self.multiplicative))
        if any(not x for x in self.multiplicative):
            raise ValueError("multiplicative coordinates must be nonzero")

    def key(self) -> tuple:
        return self.additive + self.multiplicative

    def serialize(self) -> str:
        return "[" + " ".join(str(x) for x in self.key()) + "]"


@dataclass(frozen=True)
class AffineMap:
    """x -> a x + b, i.e. the matrix [[a, b], [0, 1]]."""

    a: object
    b: object

    def __post_init__(self):
        object.__setattr__(self, "a", mpq(self.a))
        object.__setattr__(self, "b", mpq(self.b))
        if not self.a:
            raise ValueError("affine map needs a != 0")

    def key(self) -> tuple:
        return (self.a, self.b)

    def serialize(self) -> str:
        return f"[{self.a} {self.b}]"


# ---------------------------------------------------------------------------
# group specs


class GroupSpec:
    """Ambient group description.  Subclasses fix the element realisation."""

    name: str
    kind: str
    nilpotent = True
    has_lie_algebra = True

    # group side
    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def power(self, g, k: int):
        if k < 0:
            g, k = self.inv(g), -k
        result = self.identity()
        base = g
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def commutator(self, g, h):
        return self.mul(self.mul(self.inv(g), self.inv(h)), self.mul(g, h))

    def coords(self, g) -> tuple:
        raise NotImplementedError

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    @property
    def coordinate_names(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.dimension)]

    def group_type(self):
        raise NotImplementedError

    def describe(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "dimension": self.dimension, "nilpotent": self.nilpotent}
        if self.nilpotent and self.has_lie_algebra:
            out["class"] = self.nilpotency_class
            out["central_series_dims"] = [len(b) for b in central_series(self)]
        elif self.nilpotent:
            out["class"] = self.nilpotency_class
        return out

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class MatrixGroupSpec(GroupSpec):
    """Unitriangular matrix group whose Lie algebra is spanned by unit matrices at ``positions``."""

    def __init__(self, name: str, kind: str, size: int, positions: Sequence[tuple[int, int]]):
        self.name = name
        self.kind = kind
        self.size = size
        self.positions = tuple(positions)
        layout = _layout(size)
        self._pos_index = tuple(layout[1][p] for p in self.positions)
        self._nonpos = tuple(k for k in range(len(layout[0])) if k not in set(self._pos_index))

    # algebra side
    @property
    def dimension(self) -> int:
        return len(self.positions)

    @cached_property
    def basis(self) -> list[NilMatrix]:
        return [NilMatrix.unit(self.size, i, j) for i, j in self.positions]

    @property
    def coordinate_names(self) -> list[str]:
        return [f"x{i + 1}{j + 1}" for i, j in self.positions]

    def zero(self) -> NilMatrix:
        return NilMatrix.zero(self.size)

    def algebra_coords(self, X: NilMatrix) -> tuple:
        e = X.entries
        return tuple(e[k] for k in self._pos_index)

    def from_algebra_coords(self, values: Sequence) -> NilMatrix:
        entries = [ZERO] * len(_layout(self.size)[0])
        for k, v in zip(self._pos_index, values):
            entries[k] = v
        return NilMatrix(self.size, entries)

    def contains_algebra(self, X) -> bool:
        return isinstance(X, NilMatrix) and X.n == self.size and not any(X.entries[k] for k in self._nonpos)

    def bracket(self, X: NilMatrix, Y: NilMatrix) -> NilMatrix:
        return X.bracket(Y)

    def exp(self, X: NilMatrix) -> UnipotentMatrix:
        return exp(X)

    def log(self, g: UnipotentMatrix) -> NilMatrix:
        return log(g)

    def bch(self, X: NilMatrix, Y: NilMatrix) -> NilMatrix:
        return self.log(self.mul(self.exp(X), self.exp(Y)))

    # group side
    def identity(self) -> UnipotentMatrix:
        return UnipotentMatrix.identity(self.size)

    def mul(self, g, h):
        return g * h

    def inv(self, g):
        return g.inverse()

    def power(self, g, k: int):
        return self.exp(self.log(g) * k)

    def coords(self, g: UnipotentMatrix) -> tuple:
        e = g.entries
        return tuple(e[k] for k in self._pos_index)

    def from_coords(self, values: Sequence) -> UnipotentMatrix:
        entries = [ZERO] * len(_layout(self.size)[0])
        for k, v in zip(self._pos_index, values):
            entries[k] = v
        return UnipotentMatrix(self.size, entries)

    def contains(self, g) -> bool:
        return isinstance(g, UnipotentMatrix) and g.n == self.size and not any(g.entries[k] for k in self._nonpos)

    def group_type(self):
        return UnipotentMatrix

    @property
    def nilpotency_class(self) -> int:
        return len(central_series(self)) - 1

    @property
    def coordinates_are_entries(self) -> bool:
        return True


class QuotientSpec(MatrixGroupSpec):
    """G / exp(h) for a Lie ideal h, realised by canonical coset representatives.

    Algebra elements are projected onto the coordinate complement of ``h``
    (zero at the pivots of h's reduced basis); a group element g is
    represented by ``exp(proj(log g))``.
    """

    def __init__(self, parent: MatrixGroupSpec, ideal_rows: list[list], pivots: list[int]):
        self.parent = parent
        self.ideal_rows = [list(r) for r in ideal_rows]
        self.pivots = list(pivots)
        keep = [p for k, p in enumerate(parent.positions) if k not in set(pivots)]
        label = "0" if not pivots else ",".join(parent.coordinate_names[k] for k in pivots)
        super().__init__(f"{parent.name}/<{label}>", "quotient", parent.size, keep)
        self._parent_idx = tuple(parent.positions.index(p) for p in keep)

    def project(self, X: NilMatrix) -> NilMatrix:
        v = list(self.parent.algebra_coords(X))
        for row, p in zip(self.ideal_rows, self.pivots):
            c = v[p]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
        return self.parent.from_algebra_coords(v)

    def canon(self, g: UnipotentMatrix) -> UnipotentMatrix:
        if not self.pivots:
            return g
        return exp(self.project(log(g)))

    def bracket(self, X, Y):
        return self.project(X.bracket(Y))

    def exp(self, X):
        return exp(self.project(X))

    def log(self, g):
        return self.project(log(g))

    def mul(self, g, h):
        return self.canon(g * h)

    def inv(self, g):
        return self.canon(g.inverse())

    def coords(self, g) -> tuple:
        return self.algebra_coords(self.log(g))

    def from_coords(self, values):
        return self.exp(self.from_algebra_coords(values))

    def contains(self, g) -> bool:
        return isinstance(g, UnipotentMatrix) and g.n == self.size and self.canon(g) == g

    @property
    def coordinates_are_entries(self) -> bool:
        return False


class TorusSpec(GroupSpec):
    """G_a^a x G_m^b with :class:`AbelianPoint` elements (no algebraic exp)."""

    has_lie_algebra = False

    def __init__(self, a: int, b: int):
        self.a, self.b = a, b
        self.name = f"abelian:{a},{b}"
        self.kind = "abelian"

    @property
    def dimension(self) -> int:
        return self.a + self.b

    @property
    def nilpotency_class(self) -> int:
        return 1

    def identity(self):
        return AbelianPoint((0,) * self.a, (1,) * self.b)

    def mul(self, g, h):
        return AbelianPoint(tuple(x + y for x, y in zip(g.additive, h.additive)),
                            tuple(x * y for x, y in zip(g.multiplicative, h.multiplicative)))

    def inv(self, g):
        return AbelianPoint(tuple(-x for x in g.additive), tuple(1 / x for x in g.multiplicative))

    def power(self, g, k: int):
        return AbelianPoint(tuple(k * x for x in g.additive), tuple(x ** k for x in g.multiplicative))

    def coords(self, g) -> tuple:
        return g.key()

    def from_coords(self, values):
        return AbelianPoint(tuple(values[: self.a]), tuple(values[self.a:]))

    def contains(self, g) -> bool:
        return isinstance(g, AbelianPoint) and len(g.additive) == self.a and len(g.multiplicative) == self.b

    def group_type(self):
        return AbelianPoint

    @property
    def coordinates_are_entries(self) -> bool:
        return False


class AffineSpec(GroupSpec):
    """The solvable, non-nilpotent group {x -> a x + b}."""

    nilpotent = False
    has_lie_algebra = False

    def __init__(self):
        self.name = "affine"
        self.kind = "affine"

    @property
    def dimension(self) -> int:
        return 2

    @property
    def coordinate_names(self) -> list[str]:
        return ["a", "b"]

    def identity(self):
        return AffineMap(1, 0)

    def mul(self, g, h):
        return AffineMap(g.a * h.a, g.a * h.b + g.b)

    def inv(self, g):
        return AffineMap(1 / g.a, -g.b / g.a)

    def coords(self, g) -> tuple:
        return g.key()

    def from_coords(self, values):
        return AffineMap(values[0], values[1])

    def contains(self, g) -> bool:
        return isinstance(g, AffineMap)

    def group_type(self):
        return AffineMap

    @property
    def coordinates_are_entries(self) -> bool:
        return False


def upp(n: int) -> MatrixGroupSpec:
    if n < 2:
        raise PreconditionError("Upp(n) needs n >= 2")
    positions = _layout(n)[0]
    return MatrixGroupSpec("heisenberg" if n == 3 else f"upp{n}", "upp", n, positions)


def heisenberg() -> MatrixGroupSpec:
    return upp(3)


def abelian(a: int, b: int = 0) -> GroupSpec:
    """G_a^a (first-row unitriangular matrices) or, with b > 0, the torus product."""
    if a < 0 or b < 0 or a + b == 0:
        raise PreconditionError("abelian group needs a + b >= 1")
    if b:
        return TorusSpec(a, b)
    return MatrixGroupSpec(f"abelian:{a},0", "abelian", a + 1, [(0, j) for j in range(1, a + 1)])


def affine() -> AffineSpec:
    return AffineSpec()


def group_spec(name: str) -> GroupSpec:
    """Parse ``heisenberg``, ``upp4`` / ``upp:4``, ``abelian:2,0``, ``affine``."""
    text = name.strip().lower()
    if text in ("heisenberg", "heis", "h3"):
        return heisenberg()
    if text == "affine":
        return affine()
    m = re.fullmatch(r"upp:?(\d+)", text)
    if m:
        return upp(int(m.group(1)))
    m = re.fullmatch(r"abelian:(\d+)(?:,(\d+))?", text)
    if m:
        return abelian(int(m.group(1)), int(m.group(2) or 0))
    raise PreconditionError(f"unknown group spec {name!r}")


# ---------------------------------------------------------------------------
# structure


def _span_rows(spec: MatrixGroupSpec, elements: Iterable[NilMatrix]):
    return span_basis([spec.algebra_coords(e) for e in elements])


_SERIES_CACHE: dict = {}


def central_series(spec: MatrixGroupSpec) -> list[list[NilMatrix]]:
    """Bases of g = g_0 > g_1 > ... > g_n = 0 with g_{k+1} = [g, g_k]."""
    if not getattr(spec, "has_lie_algebra", False):
        if isinstance(spec, TorusSpec):
            # commutative: the tangent space, given by coordinate unit vectors, then 0
            return [[tuple(mpq(int(i == k)) for i in range(spec.dimension)) for k in range(spec.dimension)], []]
        raise PreconditionError(f"{spec.name} has no nilpotent Lie algebra")
    key = id(spec)
    cached = _SERIES_CACHE.get(key)
    if cached is not None and cached[0] is spec:
        return cached[1]
    rows, _ = span_basis([spec.algebra_coords(b) for b in spec.basis])
    series = [[spec.from_algebra_coords(r) for r in rows]]
    while series[-1]:
        brackets = [spec.bracket(b, c) for b in spec.basis for c in series[-1]]
        rows, _ = _span_rows(spec, brackets)
        nxt = [spec.from_algebra_coords(r) for r in rows]
        if len(nxt) == len(series[-1]):
            raise PreconditionError(f"{spec.name} is not nilpotent")
        series.append(nxt)
    _SERIES_CACHE[key] = (spec, series)
    return series


def in_span(spec: MatrixGroupSpec, X: NilMatrix, basis: Sequence[NilMatrix]) -> bool:
    if not basis:
        return X.is_zero() if isinstance(X, NilMatrix) else not any(X)
    return solve_in_span([spec.algebra_coords(b) for b in basis], spec.algebra_coords(X)) is not None


@dataclass(frozen=True)
class Projection:
    """pi : g -> g/h and G -> G/H for a quotient built by :func:`quotient`."""

    target: QuotientSpec

    def algebra(self, X: NilMatrix) -> NilMatrix:
        return self.target.project(X)

    def group(self, g: UnipotentMatrix) -> UnipotentMatrix:
        return self.target.canon(g)

    def __call__(self, x):
        return self.algebra(x) if isinstance(x, NilMatrix) else self.group(x)


def quotient(spec: MatrixGroupSpec, ideal_basis: Sequence[NilMatrix]) -> tuple[QuotientSpec, Projection]:
    """Quotient by the Lie ideal spanned by ``ideal_basis``; raises on non-ideals."""
    if isinstance(spec, QuotientSpec):
        raise PreconditionError("iterated quotients are not supported; quotient the parent once")
    for h in ideal_basis:
        if not spec.contains_algebra(h):
            raise NotAnIdealError("ideal element is not in the Lie algebra")
    rows, pivots = span_basis([spec.algebra_coords(h) for h in ideal_basis])
    hs = [spec.from_algebra_coords(r) for r in rows]
    for b in spec.basis:
        for h in hs:
            if not in_span(spec, b.bracket(h), hs):
                raise NotAnIdealError("span is not closed under brackets with the algebra")
    target = QuotientSpec(spec, rows, pivots)
    return target, Projection(target)


# ---------------------------------------------------------------------------
# sampling


SYMBOLIC_GUARD = 24


def sample_generics(spec: MatrixGroupSpec, count: int, mode: str = "random", *, bit_size: int = 32,
                    seed: int = 0, field: FunctionFieldMode | None = None) -> tuple[NilMatrix, ...]:
    """``count`` Lie algebra elements standing in for independent generics.

    ``random``: coordinates uniform in [-2^bit_size, 2^bit_size] from
    ``random.Random(seed)``.  ``symbolic``: coordinates are fresh variables
    of a rational function field.
    """
    if not spec.has_lie_algebra:
        raise PreconditionError(f"{spec.name} has no algebraic Lie algebra to sample from")
    dim = spec.dimension
    if mode == "symbolic":
        if dim * count > SYMBOLIC_GUARD:
            raise GuardError(f"symbolic sampling of {dim * count} variables exceeds guard {SYMBOLIC_GUARD}")
        field = field or FunctionFieldMode(dim * count)
        gens = field.gens
        return tuple(spec.from_algebra_coords(gens[k * dim:(k + 1) * dim]) for k in range(count))
    if mode != "random":
        raise PreconditionError(f"unknown sampling mode {mode!r}")
    rng = random.Random(seed)
    bound = 1 << bit_size
    return tuple(
        spec.from_algebra_coords([mpq(rng.randint(-bound, bound)) for _ in range(dim)]) for _ in range(count)
    )


def sample_group_elements(spec: GroupSpec, count: int, *, bit_size: int = 32, seed: int = 0) -> tuple:
    """Random group elements; for matrix groups the exp of :func:`sample_generics`."""
    if isinstance(spec, MatrixGroupSpec):
        return tuple(spec.exp(X) for X in sample_generics(spec, count, bit_size=bit_size, seed=seed))
    rng = random.Random(seed)
    bound = 1 << bit_size

    def nonzero():
        while True:
            v = rng.randint(-bound, bound)
            if v not in (0, 1, -1):
                return mpq(v)

    if isinstance(spec, TorusSpec):
        return tuple(AbelianPoint(tuple(mpq(rng.randint(-bound, bound)) for _ in range(spec.a)),
                                  tuple(nonzero() for _ in range(spec.b))) for _ in range(count))
    if isinstance(spec, AffineSpec):
        return tuple(AffineMap(nonzero(), mpq(rng.randint(-bound, bound))) for _ in range(count))
    raise PreconditionError(f"cannot sample from {spec.name}")


def lie_basis_matrices(spec: MatrixGroupSpec) -> list[NilMatrix]:
    return list(spec.basis)


def algebra_rref(spec: MatrixGroupSpec, elements: Sequence[NilMatrix]):
    return rref([spec.algebra_coords(e) for e in elements])
