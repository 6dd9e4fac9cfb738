"""Subvarieties cut out by polynomial systems, catalogs of bounded complexity,
membership and exact intersection counting.

Complexity of a system is (number of polynomials, max total degree, max
coefficient height); an entry has complexity <= alpha when all three are.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .errors import ArityError, BudgetExceeded, GuardError, PreconditionError
from .exact import MultiPoly, eval_poly, monomials_up_to, nullspace, rank
from .nilgroup import AffineSpec, GroupSpec, MatrixGroupSpec, QuotientSpec, TorusSpec, central_series

PRIME = (1 << 31) - 1
CATALOG_GUARD = 10 ** 5


@dataclass(frozen=True)
class SubvarietySpec:
    polys: tuple
    nvars: int
    declared_dim: int | None = None
    family: str = "custom"
    vid: str = ""
    witness: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.polys:
            raise PreconditionError("a subvariety needs at least one polynomial")
        for p in self.polys:
            if p.nvars != self.nvars:
                raise ArityError("polynomials use a different number of variables")
        if self.declared_dim is not None and self.declared_dim >= self.nvars:
            raise PreconditionError("declared dimension must be below the ambient dimension")
        if not self.vid:
            object.__setattr__(self, "vid", self.default_id())

    @property
    def complexity(self) -> tuple[int, int, int]:
        return (len(self.polys), max(p.degree for p in self.polys), max(p.height for p in self.polys))

    def within(self, alpha: int) -> bool:
        return all(c <= alpha for c in self.complexity)

    @property
    def codim(self) -> int | None:
        return None if self.declared_dim is None else self.nvars - self.declared_dim

    def default_id(self, names: Sequence[str] | None = None) -> str:
        return "{" + "; ".join(p.to_string(names) for p in self.polys) + "}"

    def serialize(self, names: Sequence[str] | None = None) -> str:
        dim = "-" if self.declared_dim is None else str(self.declared_dim)
        return f"{self.vid}\t{self.family}\tdim={dim}\t" + "; ".join(p.to_string(names) + " = 0" for p in self.polys)


def hypersurface(poly: MultiPoly, *, family: str = "custom", vid: str = "") -> SubvarietySpec:
    return SubvarietySpec((poly,), poly.nvars, poly.nvars - 1, family, vid)


def coordinate_conditions(nvars: int, values: dict, *, family: str = "custom", vid: str = "") -> SubvarietySpec:
    """{x_i = values[i] for each i} (0-based indices)."""
    polys = tuple(MultiPoly.variable(nvars, i) - MultiPoly.constant(nvars, c) for i, c in sorted(values.items()))
    return SubvarietySpec(polys, nvars, nvars - len(values), family, vid)


# ---------------------------------------------------------------------------
# membership and counting


def _point_coords(g, spec: GroupSpec | None):
    if isinstance(g, (tuple, list)):
        return tuple(g)
    if spec is None:
        raise PreconditionError("element coordinates need the ambient spec")
    return spec.coords(g)


def member(W: SubvarietySpec, g, spec: GroupSpec | None = None) -> bool:
    x = _point_coords(g, spec)
    if len(x) != W.nvars:
        raise ArityError(f"point has {len(x)} coordinates, variety lives in {W.nvars}")
    return all(not eval_poly(p, x) for p in W.polys)


def _mod_p(v) -> int:
    v = mpq(v)
    den = int(v.denominator) % PRIME
    if not den:
        return -1
    return int(v.numerator) % PRIME * pow(den, -1, PRIME) % PRIME


def _modp_matrix(X) -> np.ndarray:
    """|X| x D residues mod p; -1 marks a coordinate whose denominator p divides."""

    def compute():
        rows = [[_mod_p(v) for v in c] for c in X.coords()]
        D = X.spec.dimension
        return np.array(rows, dtype=np.int64).reshape(len(rows), D)

    return X.cached("modp", compute)


def _poly_modp(p: MultiPoly, mat: np.ndarray) -> np.ndarray | None:
    out = np.zeros(mat.shape[0], dtype=np.int64)
    powers: dict = {}
    for mono, coeff in p.terms.items():
        c = _mod_p(coeff)
        if c < 0:
            return None
        term = np.full(mat.shape[0], c, dtype=np.int64)
        for i, e in enumerate(mono):
            if e:
                key = (i, e)
                if key not in powers:
                    base = mat[:, i]
                    acc = np.ones(mat.shape[0], dtype=np.int64)
                    for _ in range(e):
                        acc = acc * base % PRIME
                    powers[key] = acc
                term = term * powers[key] % PRIME
        out = (out + term) % PRIME
    return out


def candidate_mask(W: SubvarietySpec, X) -> np.ndarray:
    """Boolean mask of points of X that may lie on W (exact members are never excluded)."""
    mat = _modp_matrix(X)
    mask = np.ones(mat.shape[0], dtype=bool)
    bad_rows = (mat < 0).any(axis=1)
    safe = np.where(mat < 0, 0, mat)
    for p in W.polys:
        vals = _poly_modp(p, safe)
        if vals is None:
            return np.ones(mat.shape[0], dtype=bool)
        mask &= (vals == 0) | bad_rows
    return mask


def intersect_count(W: SubvarietySpec, X, *, exact_only: bool = False) -> int:
    """|W cap X|, exact.  A mod-p filter discards points that are certainly off W."""
    if X.spec.dimension != W.nvars:
        raise ArityError(f"point set has {X.spec.dimension} coordinates, variety lives in {W.nvars}")
    if not len(X):
        return 0
    coords = X.cached("coords", X.coords)
    if exact_only:
        idx = range(len(coords))
    else:
        idx = np.nonzero(candidate_mask(W, X))[0]
    return sum(1 for i in idx if all(not eval_poly(p, coords[i]) for p in W.polys))


def intersect_points(W: SubvarietySpec, X) -> list:
    coords = X.cached("coords", X.coords)
    elems = X.cached("elements", X.elements)
    idx = np.nonzero(candidate_mask(W, X))[0]
    return [elems[i] for i in idx if all(not eval_poly(p, coords[i]) for p in W.polys)]


# ---------------------------------------------------------------------------
# catalogs


def _witness_points(spec: GroupSpec, count: int = 24) -> list[tuple]:
    rng = random.Random(0x5EED)
    D = spec.dimension
    mult = set()
    if isinstance(spec, TorusSpec):
        mult = set(range(spec.a, D))
    elif isinstance(spec, AffineSpec):
        mult = {0}
    pts = []
    for _ in range(count):
        row = []
        for i in range(D):
            v = rng.randint(-97, 97)
            if i in mult and v == 0:
                v = 1
            row.append(mpq(v))
        pts.append(tuple(row))
    return pts


def _find_witness(W: SubvarietySpec, pts) -> tuple | None:
    for x in pts:
        if not member(W, x):
            return x
    return None


def _dedupe_key(polys) -> tuple:
    return tuple(sorted((tuple(sorted(p.primitive().terms.items())) for p in polys)))


def _coprime_pairs(alpha: int):
    for a in range(1, alpha + 1):
        for b in range(1, alpha + 1):
            if math.gcd(a, b) == 1:
                yield a, b
                yield a, -b


def make_catalog(spec: GroupSpec, alpha: int, *, guard: int = CATALOG_GUARD) -> list[SubvarietySpec]:
    """Deterministic catalog of proper subvarieties of complexity <= alpha.

    Families, in order: ``hyperplane`` (x_i = c), ``central`` / ``coordinate``
    (several coordinates fixed; ``central`` when the fixed set is the
    complement of a central-series term, i.e. a coset of that subgroup),
    ``hypersurface`` (monomials and binomials a m + b m' with m' in
    {1, x_j}, degree <= min(alpha, 3)), and ``centralizer`` (linear loci
    gh = hg for elementary unipotent h).  Duplicates keep their first
    occurrence; every entry carries a witness point off the variety.
    """
    if alpha < 1:
        raise PreconditionError("alpha must be >= 1")
    D = spec.dimension
    names = spec.coordinate_names
    entries: list[SubvarietySpec] = []
    seen = set()
    pts = _witness_points(spec)

    def push(polys, dim, family):
        key = _dedupe_key(polys)
        if key in seen:
            return
        W = SubvarietySpec(tuple(polys), D, dim, family, "")
        if not W.within(alpha):
            return
        wit = _find_witness(W, pts)
        if wit is None:
            return
        seen.add(key)
        vid = f"{family}:" + "; ".join(p.to_string(names) for p in polys)
        entries.append(SubvarietySpec(W.polys, D, dim, family, vid, wit))
        if len(entries) > guard:
            raise GuardError(f"catalog exceeds {guard} entries")

    var = [MultiPoly.variable(D, i) for i in range(D)]
    const = lambda c: MultiPoly.constant(D, c)

    for i in range(D):
        for c in _shifts(alpha):
            push([var[i] - const(c)], D - 1, "hyperplane")

    central_sets = []
    if isinstance(spec, MatrixGroupSpec) and not isinstance(spec, QuotientSpec):
        for term in central_series(spec)[1:-1]:
            support = {k for b in term for k, v in enumerate(spec.algebra_coords(b)) if v}
            central_sets.append(tuple(k for k in range(D) if k not in support))
    for size in range(2, min(alpha, D - 1) + 1):
        for subset in itertools.combinations(range(D), size):
            family = "central" if subset in central_sets else "coordinate"
            for shift in itertools.product(_shifts(alpha), repeat=size):
                push([var[i] - const(c) for i, c in zip(subset, shift)], D - size, family)

    dmax = min(alpha, 3)
    monos = [m for m in monomials_up_to(D, dmax) if sum(m) >= 1]
    others = [None] + list(range(D))
    for m in monos:
        mono = MultiPoly.monomial(m)
        if sum(m) >= 2:
            push([mono], D - 1, "hypersurface")
        for j in others:
            if j is not None and m[j] == sum(m) == 1:
                continue
            if j is None and sum(m) == 1:
                continue  # hyperplanes x_i = c already listed
            partner = const(1) if j is None else var[j]
            for a, b in _coprime_pairs(alpha):
                push([mono * a + partner * b], D - 1, "hypersurface")

    if isinstance(spec, MatrixGroupSpec) and spec.coordinates_are_entries:
        for W in _centralizer_loci(spec, alpha):
            push(list(W[0]), W[1], "centralizer")
    return entries


def _shifts(alpha: int):
    return sorted(range(-alpha, alpha + 1), key=lambda c: (abs(c), c))


def _centralizer_loci(spec: MatrixGroupSpec, alpha: int):
    """Linear systems {g : gh - hg = 0} for h = I + c e_p and h = I + e_p + e_q."""
    n = spec.size
    D = spec.dimension
    index = {p: k for k, p in enumerate(spec.positions)}
    hs = []
    for p in spec.positions:
        for c in range(1, alpha + 1):
            hs.append({p: c})
    for p, q in itertools.combinations(spec.positions, 2):
        hs.append({p: 1, q: 1})
    for h in hs:
        # (gh - hg)_{ij} = sum_k g_ik h_kj - h_ik g_kj, with unit diagonals cancelling
        polys = []
        for i in range(n):
            for j in range(i + 1, n):
                terms = {}
                for k in range(n):
                    hkj = h.get((k, j), 0)
                    if hkj and (i, k) in index:
                        mono = [0] * D
                        mono[index[(i, k)]] = 1
                        terms[tuple(mono)] = terms.get(tuple(mono), 0) + hkj
                    hik = h.get((i, k), 0)
                    if hik and (k, j) in index:
                        mono = [0] * D
                        mono[index[(k, j)]] = 1
                        terms[tuple(mono)] = terms.get(tuple(mono), 0) - hik
                poly = MultiPoly(D, terms)
                if not poly.is_zero():
                    polys.append(poly)
        if not polys:
            continue
        rows = [[p.terms.get(tuple(int(t == k) for t in range(D)), 0) for k in range(D)] for p in polys]
        r = rank(rows)
        if r == 0 or r >= D:
            continue
        # keep an independent subset so the count measures the codimension
        chosen = []
        for p, row in zip(polys, rows):
            if rank([rr for _, rr in chosen] + [row]) > len(chosen):
                chosen.append((p, row))
        yield [p for p, _ in chosen], D - r


def catalog_lines(catalog: Sequence[SubvarietySpec]) -> list[str]:
    return [W.serialize() for W in catalog]


# ---------------------------------------------------------------------------
# adversarial search


@dataclass
class AnnihilatorResult:
    variety: SubvarietySpec
    support: int
    size: int
    trial: int


def annihilator_search(X, degree: int, threshold: float, trials: int = 64, seed: int = 0, *,
                       budget: int = 400) -> AnnihilatorResult | None:
    """Look for a degree-<=d polynomial vanishing on a fraction >= threshold of X.

    Each trial interpolates through (monomial count - 1) sampled points, so
    the evaluation matrix always has a kernel; every kernel polynomial is
    recounted exactly over all of X.
    """
    if degree < 1:
        raise PreconditionError("degree must be >= 1")
    if not 0 < threshold <= 1:
        raise PreconditionError("threshold must lie in (0, 1]")
    D = X.spec.dimension
    monos = monomials_up_to(D, degree)
    if len(monos) > budget:
        raise BudgetExceeded(f"{len(monos)} monomials exceed the linear-algebra budget {budget}")
    coords = X.cached("coords", X.coords)
    size = len(coords)
    sample_size = min(len(monos) - 1, size)
    if sample_size < 1:
        return None
    rng = random.Random(seed)
    tried = set()
    for trial in range(trials):
        picks = rng.sample(range(size), sample_size)
        rows = [[_monomial_value(coords[i], m) for m in monos] for i in picks]
        for v in nullspace(rows):
            coeffs = v.column_vector()
            poly = MultiPoly(D, {m: c for m, c in zip(monos, coeffs)}).primitive()
            if poly.degree == 0 or poly in tried:
                continue
            tried.add(poly)
            W = hypersurface(poly, family="annihilator", vid="annihilator:" + poly.to_string(X.spec.coordinate_names))
            support = intersect_count(W, X)
            if support >= threshold * size:
                return AnnihilatorResult(W, support, size, trial)
    return None


def _monomial_value(x, mono):
    v = mpq(1)
    for xi, e in zip(x, mono):
        if e:
            v *= xi ** e
    return v
