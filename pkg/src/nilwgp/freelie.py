"""Basic commutators of free nilpotent Lie algebras and their evaluation in matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from sympy import divisors, mobius

from .errors import GuardError, PreconditionError, ShapeError

HALL_GUARD = 10 ** 6


@dataclass(frozen=True)
class CommutatorTerm:
    """A formal Lie monomial: a leaf ``x_i`` or a bracket ``[left, right]``."""

    generator: int | None = None
    left: "CommutatorTerm | None" = None
    right: "CommutatorTerm | None" = None
    weight: tuple = field(default=(), compare=False)

    @staticmethod
    def leaf(i: int, M: int) -> "CommutatorTerm":
        w = [0] * M
        w[i] = 1
        return CommutatorTerm(generator=i, weight=tuple(w))

    @staticmethod
    def bracket(left: "CommutatorTerm", right: "CommutatorTerm") -> "CommutatorTerm":
        if len(left.weight) != len(right.weight):
            raise ShapeError("terms over different generator counts")
        return CommutatorTerm(left=left, right=right, weight=tuple(a + b for a, b in zip(left.weight, right.weight)))

    @property
    def is_leaf(self) -> bool:
        return self.generator is not None

    @property
    def order(self) -> int:
        return sum(self.weight)

    def sexpr(self) -> str:
        if self.is_leaf:
            return f"x{self.generator}"
        return f"({self.left.sexpr()} {self.right.sexpr()})"

    def __str__(self):
        return self.sexpr()


def witt_dimension(M: int, k: int) -> int:
    """Dimension of the degree-k part of the free Lie algebra on M generators."""
    if M < 1 or k < 1:
        raise PreconditionError("witt_dimension needs M >= 1 and k >= 1")
    total = sum(int(mobius(d)) * M ** (k // d) for d in divisors(k))
    return total // k


class HallBasis:
    """Ordered basic commutators ``c_0, c_1, ...`` for M generators up to class n.

    Leaves come first (``c_i = x_i``).  Higher orders are generated from pairs
    ``(i, j)`` with ``i > j >= t``, where ``t`` is the index of the right
    factor of ``c_i`` (0 for a leaf).  Within one order, terms are grouped by
    weight vector in descending lexicographic order, ties broken by ``(i, j)``.
    """

    def __init__(self, M: int, n: int):
        if M < 1 or n < 1:
            raise PreconditionError("hall_basis needs M >= 1 and n >= 1")
        expected = sum(witt_dimension(M, k) for k in range(1, n + 1))
        if expected > HALL_GUARD:
            raise GuardError(f"basis would have {expected} terms (guard {HALL_GUARD})")
        self.M, self.n = M, n
        terms = [CommutatorTerm.leaf(i, M) for i in range(M)]
        children: list[tuple[int, int] | None] = [None] * M
        by_order: dict[int, list[int]] = {1: list(range(M))}
        for k in range(2, n + 1):
            fresh = []
            for a in range(1, k // 2 + 1):
                b = k - a
                # [c_i, c_j] with ord(c_i) = b, ord(c_j) = a and i > j
                for i in by_order.get(b, []):
                    t = 0 if children[i] is None else children[i][1]
                    for j in by_order.get(a, []):
                        if i > j >= t:
                            fresh.append((i, j))
            fresh.sort(key=lambda ij: (_desc(_wsum(terms, ij)), ij))
            start = len(terms)
            for i, j in fresh:
                terms.append(CommutatorTerm.bracket(terms[i], terms[j]))
                children.append((i, j))
            by_order[k] = list(range(start, len(terms)))
        self.terms: tuple[CommutatorTerm, ...] = tuple(terms)
        self.children: tuple = tuple(children)
        self.index_by_tree = {term: idx for idx, term in enumerate(terms)}
        self.by_order = {k: tuple(v) for k, v in by_order.items()}
        self.by_weight: dict[tuple, tuple[int, ...]] = {}
        for idx, term in enumerate(terms):
            self.by_weight.setdefault(term.weight, ())
            self.by_weight[term.weight] += (idx,)

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, i) -> CommutatorTerm:
        return self.terms[i]

    def __iter__(self):
        return iter(self.terms)

    def right_index(self, i: int) -> int:
        """The ``t`` of the closure condition: right factor index, 0 for leaves."""
        ch = self.children[i]
        return 0 if ch is None else ch[1]

    def find(self, term: CommutatorTerm) -> int | None:
        return self.index_by_tree.get(term)

    def lines(self) -> list[str]:
        return [f"{i}\t{t.sexpr()}\t{list(t.weight)}" for i, t in enumerate(self.terms)]

    def evaluate(self, assignment: Sequence, bracket: Callable | None = None) -> list:
        """Images of every basis term, reusing children (one bracket per term)."""
        if len(assignment) < self.M:
            raise ShapeError(f"assignment has {len(assignment)} entries, need {self.M}")
        br = bracket or (lambda x, y: x.bracket(y))
        out = []
        for idx, ch in enumerate(self.children):
            out.append(assignment[idx] if ch is None else br(out[ch[0]], out[ch[1]]))
        return out


def _wsum(terms, ij):
    a, b = terms[ij[0]].weight, terms[ij[1]].weight
    return tuple(x + y for x, y in zip(a, b))


def _desc(weight: tuple) -> tuple:
    return tuple(-w for w in weight)


@lru_cache(maxsize=64)
def hall_basis(M: int, n: int) -> HallBasis:
    return HallBasis(M, n)


def validate_hall_basis(hb: HallBasis) -> list[str]:
    """Structural check of the defining conditions; returns a list of violations."""
    problems = []
    terms = hb.terms
    M, n = hb.M, hb.n
    for i in range(min(M, len(terms))):
        if not (terms[i].is_leaf and terms[i].generator == i):
            problems.append(f"c_{i} is not x_{i}")
    for t in terms[M:]:
        if t.is_leaf:
            problems.append(f"leaf {t} after position {M}")
    orders = [t.order for t in terms]
    if orders != sorted(orders):
        problems.append("orders are not nondecreasing")
    seen_weights = set()
    prev = None
    for t in terms:
        if t.weight != prev:
            if t.weight in seen_weights:
                problems.append(f"weight {t.weight} is not consecutive")
            seen_weights.add(t.weight)
            prev = t.weight
        if not t.is_leaf and t.weight != tuple(a + b for a, b in zip(t.left.weight, t.right.weight)):
            problems.append(f"weight of {t} is not the sum of its children")
    position = {t: k for k, t in enumerate(terms)}
    if len(position) != len(terms):
        problems.append("duplicate terms")
    for i, ci in enumerate(terms):
        if ci.is_leaf:
            t = 0
        else:
            t = position.get(ci.right)
            if t is None:
                problems.append(f"right factor of {ci} missing")
                continue
        for j, cj in enumerate(terms):
            if ci.order + cj.order > n:
                continue
            k = position.get(CommutatorTerm.bracket(ci, cj))
            present = k is not None and k > j
            if present != (i > j >= t):
                problems.append(f"closure fails for (c_{i}, c_{j})")
    return problems


def eval_term(c: CommutatorTerm, assignment: Sequence, bracket: Callable | None = None):
    """Leaf(i) -> assignment[i]; Bracket -> XY - YX (or the supplied bracket)."""
    needed = max((i for i, w in enumerate(c.weight) if w), default=-1) + 1
    if len(assignment) < needed:
        raise ShapeError(f"assignment has {len(assignment)} entries, need {needed}")
    shapes = {getattr(a, "n", None) for a in assignment}
    if len(shapes) > 1:
        raise ShapeError("assignment matrices differ in shape")
    br = bracket or (lambda x, y: x.bracket(y))

    def rec(term):
        if term.is_leaf:
            return assignment[term.generator]
        return br(rec(term.left), rec(term.right))

    return rec(c)


def left_normed(indices: Sequence[int], M: int) -> CommutatorTerm:
    """``[...[x_{i2}, x_{i1}], x_{i3}], ..., x_{ik}]``."""
    if len(indices) == 1:
        return CommutatorTerm.leaf(indices[0], M)
    term = CommutatorTerm.bracket(CommutatorTerm.leaf(indices[1], M), CommutatorTerm.leaf(indices[0], M))
    for i in indices[2:]:
        term = CommutatorTerm.bracket(term, CommutatorTerm.leaf(i, M))
    return term


def right_nested(indices: Sequence[int], M: int) -> CommutatorTerm:
    """``[x_{j0}, [x_{j1}, ..., x_{jk}]]`` for the given index order."""
    term = CommutatorTerm.leaf(indices[-1], M)
    for i in reversed(indices[:-1]):
        term = CommutatorTerm.bracket(CommutatorTerm.leaf(i, M), term)
    return term


@dataclass
class SignCheck:
    ok: bool
    term: CommutatorTerm
    sign: int
    counterexample: tuple | None = None


def check_remark_sign(k: int, indices: Sequence[int], n: int, spec=None, *, trials: int = 3,
                      seed: int = 0, bit_size: int = 8) -> SignCheck:
    """Check that the left-normed basic commutator on ``i1 < ... < ik`` equals
    ``(-1)^(k-2) [x_ik, ..., x_i1]`` (right-nested) on random matrices of ``spec``.
    """
    from .nilgroup import sample_generics, upp

    indices = list(indices)
    if k < 2 or k > n:
        raise PreconditionError(f"need 2 <= k <= n (k={k}, n={n})")
    if len(indices) != k or indices != sorted(set(indices)):
        raise PreconditionError("indices must be k strictly increasing generator indices")
    M = indices[-1] + 1
    term = left_normed(indices, M)
    hb = hall_basis(M, n)
    if hb.find(term) is None:
        raise PreconditionError(f"{term} is not in the basic-commutator list")
    spec = spec or upp(max(k + 1, 3))
    rhs_term = right_nested(list(reversed(indices)), M)
    sign = (-1) ** (k - 2)
    for trial in range(trials):
        assignment = sample_generics(spec, M, bit_size=bit_size, seed=seed + trial)
        lhs = eval_term(term, assignment)
        rhs = eval_term(rhs_term, assignment) * sign
        if lhs != rhs:
            return SignCheck(False, term, sign, tuple(assignment))
    return SignCheck(True, term, sign)


class FreeLieElement:
    """Sparse combination of basis terms (index -> scalar), zero entries dropped."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: HallBasis, coeffs: dict):
        for i in coeffs:
            if not 0 <= i < len(basis):
                raise IndexError(f"basis index {i} out of range")
        self.basis = basis
        self.coeffs = {i: c for i, c in coeffs.items() if c}

    def evaluate(self, assignment: Sequence, images: Sequence | None = None):
        images = images if images is not None else self.basis.evaluate(assignment)
        total = None
        for i, c in sorted(self.coeffs.items()):
            term = images[i] * c
            total = term if total is None else total + term
        if total is None:
            return assignment[0] * 0
        return total

    def __eq__(self, other):
        return isinstance(other, FreeLieElement) and self.basis is other.basis and self.coeffs == other.coeffs

    def __repr__(self):
        return f"FreeLieElement({self.coeffs})"
