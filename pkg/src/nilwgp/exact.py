"""Exact scalars, sparse multivariate polynomials and dense exact matrices.

Two scalar modes are supported:

* ``RATIONAL`` -- elements are :class:`gmpy2.mpq` (always reduced, positive
  denominator), the default and fast mode.
* ``FunctionFieldMode(m)`` -- elements of ``Q(t1, ..., tm)`` backed by sympy's
  sparse fraction field, used for exact genericity with transcendentals.

Mode is a per-experiment choice; :func:`scalar_arith` refuses to mix them.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz
from sympy import QQ
from sympy.polys.fields import FracElement, field

from .errors import ArityError, DivisionByZeroError, ModeMismatchError


class RationalMode:
    name = "rational"

    def convert(self, x) -> mpq:
        if isinstance(x, FracElement):
            raise ModeMismatchError("function-field element given to rational mode")
        return mpq(x)

    def owns(self, x) -> bool:
        return isinstance(x, (int, type(mpq(0)), type(mpz(0))))

    def __repr__(self):
        return "RATIONAL"


RATIONAL = RationalMode()
_MPQ = type(mpq(0))
_MPZ = type(mpz(0))


class FunctionFieldMode:
    """Rational function field Q(t1..tm)."""

    name = "function_field"

    def __init__(self, nvars: int, prefix: str = "t"):
        if nvars < 1:
            raise ValueError("function field needs at least one variable")
        self.nvars = nvars
        names = ",".join(f"{prefix}{i + 1}" for i in range(nvars))
        result = field(names, QQ)
        self.field = result[0]
        self.gens = tuple(result[1:])

    def convert(self, x):
        if isinstance(x, FracElement):
            if x.field != self.field:
                raise ModeMismatchError("element from a different function field")
            return x
        if isinstance(x, (_MPQ, _MPZ)):
            x = QQ(int(x.numerator), int(x.denominator))
        return self.field.convert(x)

    def owns(self, x) -> bool:
        return isinstance(x, FracElement) and x.field == self.field

    def __repr__(self):
        return f"FunctionFieldMode({self.nvars})"


def mode_of(x):
    """Return the scalar mode tag of ``x`` (``RATIONAL`` or the owning field)."""
    if isinstance(x, FracElement):
        return x.field
    if isinstance(x, (int, _MPQ, _MPZ)):
        return RATIONAL
    raise TypeError(f"not an exact scalar: {type(x).__name__}")


_OPS = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}


def scalar_arith(a, b, op: str):
    """Exact ``a op b`` with mode checking; ``op`` is one of ``+ - * /``."""
    if mode_of(a) != mode_of(b):
        raise ModeMismatchError(f"cannot combine {mode_of(a)!r} with {mode_of(b)!r}")
    if op in ("/", "÷") and not b:
        raise DivisionByZeroError("division by zero")
    fn = _OPS.get("/" if op == "÷" else "*" if op == "×" else op)
    if fn is None:
        raise ValueError(f"unknown operator {op!r}")
    if isinstance(a, int) and isinstance(b, int):
        a = mpq(a)
    return fn(a, b)


def to_scalar(x):
    """Coerce ints/strings/Fractions to mpq; leave field elements alone."""
    if isinstance(x, FracElement):
        return x
    return mpq(x)


def format_scalar(x) -> str:
    if isinstance(x, FracElement):
        return str(x).replace(" ", "")
    return str(x)


def parse_scalar(text: str) -> mpq:
    return mpq(text)


def is_zero(x) -> bool:
    return not x


# ---------------------------------------------------------------------------
# polynomials


Monomial = tuple


class MultiPoly:
    """Sparse polynomial with rational coefficients in ``nvars`` variables.

    Terms are stored as ``{exponent tuple: mpq}`` with zero coefficients
    dropped.  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean = {}
        for mono, coeff in (terms or {}).items():
            if len(mono) != nvars:
                raise ArityError(f"monomial {mono} does not have {nvars} exponents")
            coeff = mpq(coeff)
            if coeff:
                clean[tuple(int(e) for e in mono)] = coeff
        self.terms = clean
        self._hash = None

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int, coeff=1) -> "MultiPoly":
        mono = [0] * nvars
        mono[i] = 1
        return cls(nvars, {tuple(mono): coeff})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    @property
    def height(self) -> int:
        """Max over coefficients of max(|numerator|, |denominator|)."""
        return max((max(abs(int(c.numerator)), int(c.denominator)) for c in self.terms.values()), default=0)

    @property
    def arity(self) -> int:
        """1 + index of the last variable that actually occurs (0 for constants)."""
        used = 0
        for mono in self.terms:
            for i, e in enumerate(mono):
                if e:
                    used = max(used, i + 1)
        return used

    def sorted_terms(self):
        """Terms in graded reverse-lex-free canonical order: degree desc, then exponents desc."""
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = MultiPoly.constant(self.nvars, 1)
        for _ in range(k):
            result = result * self
        return result

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ArityError("polynomials over different variable counts")
            return other
        return MultiPoly.constant(self.nvars, other)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __call__(self, x):
        return eval_poly(self, x)

    def primitive(self) -> "MultiPoly":
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if not self.terms:
            return self
        den = reduce(lcm, (int(c.denominator) for c in self.terms.values()), 1)
        ints = [int(c * den) for c in self.terms.values()]
        g = reduce(gcd, ints)
        lead = self.sorted_terms()[0][1]
        sign = -1 if lead < 0 else 1
        scale = mpq(den * sign, g)
        return MultiPoly(self.nvars, {m: c * scale for m, c in self.terms.items()})

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = []
            for name, e in zip(names, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{coeff}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"MultiPoly({self.to_string()})"


def eval_poly(p: MultiPoly, x: Sequence):
    """Exact term-by-term evaluation of ``p`` at the point ``x``."""
    if p.arity > len(x):
        raise ArityError(f"polynomial uses {p.arity} variables, point has {len(x)}")
    if not p.terms:
        return mpq(0)
    x = list(x) + [0] * (p.nvars - len(x)) if len(x) < p.nvars else x
    maxdeg = [0] * p.nvars
    for mono in p.terms:
        for i, e in enumerate(mono):
            if e > maxdeg[i]:
                maxdeg[i] = e
    powers = []
    for i in range(p.nvars):
        row = [1]
        for _ in range(maxdeg[i]):
            row.append(row[-1] * x[i])
        powers.append(row)
    total = 0
    for mono, coeff in p.terms.items():
        term = coeff
        for i, e in enumerate(mono):
            if e:
                term = term * powers[i][e]
        total = total + term
    return total


def monomials_up_to(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree <= ``degree``; graded, then lex descending."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + [e], remaining - e, slots - 1)

    rec([], degree, nvars)
    out.sort(key=lambda m: (sum(m), tuple(-e for e in m)))
    return out


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class ExactMatrix:
    """Dense row-major matrix of exact scalars."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "ExactMatrix":
        return cls(tuple(tuple(to_scalar(x) for x in r) for r in rows))

    @classmethod
    def column(cls, values: Iterable) -> "ExactMatrix":
        return cls(tuple((to_scalar(v),) for v in values))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(tuple(tuple(mpq(int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(tuple(zip(*self.rows)))

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows))
        return ExactMatrix(tuple(
            tuple(sum((a * b for a, b in zip(row, col) if a and b), mpq(0)) for col in cols)
            for row in self.rows
        ))

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def column_vector(self) -> tuple:
        return tuple(r[0] for r in self.rows)


def _integer_rows(rows: Sequence[Sequence]) -> list[list]:
    out = []
    for r in rows:
        den = reduce(lcm, (int(mpq(x).denominator) for x in r), 1)
        out.append([mpz(mpq(x) * den) for x in r])
    return out


def bareiss_echelon(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Fraction-free row echelon form of a rational matrix.

    Rows are first scaled to integers; elimination then keeps every entry an
    integer (all divisions are exact).  Returns the echelon rows and pivot
    columns.
    """
    m = _integer_rows(rows)
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    prev = mpz(1)
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        for i in range(r + 1, nrows):
            mic = m[i][c]
            row_i = m[i]
            row_r = m[r]
            for j in range(c, ncols):
                row_i[j] = gmpy2.divexact(piv * row_i[j] - mic * row_r[j], prev)
        prev = piv
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _field_echelon(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(r + 1, nrows):
            f = m[i][c]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _is_symbolic(rows) -> bool:
    return any(isinstance(x, FracElement) for r in rows for x in r)


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over Q (or the function field)."""
    if not rows or not len(rows[0]):
        return [], []
    if _is_symbolic(rows):
        ech, pivots = _field_echelon(rows)
        ech = [list(r) for r in ech]
    else:
        ech, pivots = bareiss_echelon(rows)
        ech = [[mpq(x) for x in r] for r in ech]
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        inv = 1 / ech[i][c]
        ech[i] = [x * inv for x in ech[i]]
        for k in range(i):
            f = ech[k][c]
            if f:
                ech[k] = [a - f * b for a, b in zip(ech[k], ech[i])]
    return ech, pivots


def rank(M) -> int:
    rows = M.rows if isinstance(M, ExactMatrix) else M
    if not rows:
        return 0
    if _is_symbolic(rows):
        return len(_field_echelon(rows)[1])
    return len(bareiss_echelon(rows)[1])


def nullspace(M) -> list[ExactMatrix]:
    """Exact basis of ``{v : M v = 0}`` as column vectors; verified before return."""
    rows = M.rows if isinstance(M, ExactMatrix) else tuple(tuple(r) for r in M)
    if not rows or not rows[0]:
        raise ValueError("nullspace of an empty matrix")
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in set(pivots)]
    zero = 0 * rows[0][0]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = zero + 1
        for i, c in enumerate(pivots):
            v[c] = -red[i][f]
        basis.append(v)
    for v in basis:
        for r in rows:
            if sum((a * b for a, b in zip(r, v)), zero):
                raise ArithmeticError("nullspace vector failed verification")
    return [ExactMatrix(tuple((x,) for x in v)) for v in basis]


def solve_in_span(vectors: Sequence[Sequence], target: Sequence) -> list | None:
    """Coefficients ``c`` with ``sum c_i vectors[i] == target``, or None.

    Free variables are set to zero, so the answer is deterministic even when
    ``vectors`` are dependent.
    """
    k = len(vectors)
    dim = len(target)
    aug = [[vectors[i][r] for i in range(k)] + [target[r]] for r in range(dim)]
    red, pivots = rref(aug)
    if k in pivots:
        return None
    coeffs = [mpq(0)] * k
    for i, c in enumerate(pivots):
        coeffs[c] = red[i][k]
    return coeffs


def span_basis(vectors: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """RREF basis (rows) and pivot columns of the span of ``vectors``."""
    vectors = [list(v) for v in vectors if any(v)]
    if not vectors:
        return [], []
    return rref(vectors)


def rational_gcd(values: Iterable) -> mpq:
    """Largest g > 0 with every value an integer multiple of g (0 if all zero)."""
    num = mpz(0)
    den = mpz(1)
    for v in values:
        v = mpq(v)
        if not v:
            continue
        num = gmpy2.gcd(num * v.denominator, v.numerator * den)
        den = den * v.denominator
        g = gmpy2.gcd(num, den)
        num //= g
        den //= g
    return mpq(num, den) if num else mpq(0)
