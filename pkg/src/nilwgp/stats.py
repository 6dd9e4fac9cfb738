"""Doubling, energy, triple counts, covers, growth fits and general-position reports."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .errors import KindMismatchError, PreconditionError
from .covers import greedy_translate_cover
from .kernels import product_stats
from .nilgroup import MatrixGroupSpec, sample_generics
from .progressions import PointSet, nilbox, nilprogression, set_product
from .varieties import SubvarietySpec, annihilator_search, intersect_count, make_catalog


def _group_sets(*sets):
    for S in sets:
        if S.kind != "group":
            raise KindMismatchError("statistic needs group-kind point sets")


def doubling(X: PointSet) -> mpq:
    """|X X| / |X| as an exact rational."""
    _group_sets(X)
    if not len(X):
        raise PreconditionError("doubling of an empty set")
    return mpq(product_stats(X, X).product_size, len(X))


def energy(A: PointSet, B: PointSet) -> int:
    """#{(a, b, a', b') : ab = a'b'} = sum_c r(c)^2."""
    _group_sets(A, B)
    return product_stats(A, B).energy


def triple_count(A: PointSet, B: PointSet, C: PointSet) -> int:
    """#{(a, b) in A x B : ab in C}."""
    _group_sets(A, B, C)
    return product_stats(A, B, C).triples


# ---------------------------------------------------------------------------
# growth exponents


@dataclass(frozen=True)
class GrowthFit:
    points: tuple  # (ln size, ln quantity)
    slope: float
    intercept: float
    max_residual: float

    @classmethod
    def from_points(cls, points) -> "GrowthFit":
        xs = np.array([p[0] for p in points], dtype=float)
        ys = np.array([p[1] for p in points], dtype=float)
        slope, intercept = np.polyfit(xs, ys, 1)
        resid = ys - (slope * xs + intercept)
        return cls(tuple(points), float(slope), float(intercept), float(np.max(np.abs(resid))))


def growth_fit(samples: Sequence[tuple]) -> GrowthFit:
    """Least-squares line through (ln size, ln max(quantity, 1))."""
    if len(samples) < 2:
        raise PreconditionError("growth_fit needs at least two samples")
    if any(s <= 1 for s, _ in samples):
        raise PreconditionError("sizes must exceed 1")
    if len({s for s, _ in samples}) == 1:
        raise PreconditionError("degenerate sweep: all sizes are equal")
    return GrowthFit.from_points([(math.log(s), math.log(max(q, 1))) for s, q in samples])


# ---------------------------------------------------------------------------
# covers


def greedy_cover(targets: Sequence, base: PointSet, side: str = "left", *, limit: int | None = 48) -> list:
    """Greedy T with targets inside T·base (side "left") or base·T (side "right")."""
    return greedy_translate_cover(targets, base, (side,), limit=limit, anchors=1, prune=False)


def covered(A, T, B, side: str) -> bool:
    spec = B.spec
    keys = B.keys()
    invs = [spec.inv(t) for t in T]
    for a in A:
        if side == "left":
            ok = any(spec.mul(ti, a).key() in keys for ti in invs)
        else:
            ok = any(spec.mul(a, ti).key() in keys for ti in invs)
        if not ok:
            return False
    return True


@dataclass
class ControlCertificate:
    K: int
    T: list
    verdict: bool

    @property
    def size(self) -> int:
        return len(self.T)


def find_control(A: PointSet, B: PointSet, *, limit: int | None = 48, anchors: int = 2) -> ControlCertificate:
    """Greedy certificate that A is K-controlled by B: |B| <= K|A| and A in (T·B) ∩ (B·T), |T| <= K.

    Both inclusions are covered by one set of translates, chosen jointly so
    that nearly central translates serving both sides are preferred.  The
    returned K is an upper bound on the optimal constant; the verdict is an
    exact re-check of the inclusions.
    """
    _group_sets(A, B)
    if A.spec is not B.spec:
        raise KindMismatchError("point sets live in different ambients")
    if not len(B):
        raise PreconditionError("B is empty; nothing can be covered")
    T = greedy_translate_cover(A.elements(), B, ("left", "right"), limit=limit, anchors=anchors)
    K = max(len(T), -(-len(B) // max(len(A), 1)))
    return ControlCertificate(K, T, verify_control(A, B, K, T))


def verify_control(A: PointSet, B: PointSet, K: int, T: Sequence) -> bool:
    return len(B) <= K * len(A) and len(T) <= K and covered(A, T, B, "left") and covered(A, T, B, "right")


def exact_control_constant(A: PointSet, B: PointSet) -> tuple[int, list]:
    """Optimal K via an integer program over all translates a·b^-1 and b^-1·a (small sets only)."""
    from scipy.optimize import Bounds, LinearConstraint, milp

    spec = A.spec
    cands = {}
    for a in A:
        for b in B:
            binv = spec.inv(b)
            for t in (spec.mul(a, binv), spec.mul(binv, a)):
                cands.setdefault(t.key(), t)
    cands = list(cands.values())
    keys = B.keys()
    rows = []
    for a in A:
        rows.append([1 if spec.mul(spec.inv(t), a).key() in keys else 0 for t in cands])
        rows.append([1 if spec.mul(a, spec.inv(t)).key() in keys else 0 for t in cands])
    res = milp(c=np.ones(len(cands)), integrality=np.ones(len(cands)), bounds=Bounds(0, 1),
               constraints=LinearConstraint(np.array(rows, dtype=float), lb=1, ub=np.inf))
    if not res.success:
        raise ArithmeticError("cover program failed")
    chosen = [t for t, x in zip(cands, res.x) if x > 0.5]
    return max(len(chosen), -(-len(B) // len(A))), chosen


@dataclass
class ApproxVerdict:
    ok: bool
    symmetric: bool
    has_identity: bool
    K_achieved: int | None
    T: list
    witness: object = None


def approx_subgroup_check(X: PointSet, K: int) -> ApproxVerdict:
    """X = X^-1, e in X and a greedy cover XX in T·X with |T| <= K."""
    _group_sets(X)
    spec = X.spec
    for x in X:
        if spec.inv(x) not in X:
            return ApproxVerdict(False, False, spec.identity() in X, None, [], x)
    if spec.identity() not in X:
        return ApproxVerdict(False, True, False, None, [], spec.identity())
    XX = set_product(X, X)
    T = greedy_cover(XX.elements(), X, "left", limit=None)
    return ApproxVerdict(len(T) <= K, True, True, len(T), T)


def transfer_check(A: PointSet, B: PointSet, T: Sequence, catalog: Sequence[SubvarietySpec]) -> list:
    """For A in T·B: |W ∩ A| <= |T| max_t |W ∩ tB| for every W; returns violations (empty when sound)."""
    spec = B.spec
    translates = []
    for t in T:
        tB = {}
        for b in B:
            p = spec.mul(t, b)
            tB[p.key()] = p
        translates.append(PointSet._from_keyed(spec, "group", tB))
    bad = []
    for W in catalog:
        lhs = intersect_count(W, A)
        rhs = len(T) * max(intersect_count(W, tB) for tB in translates)
        if lhs > rhs:
            bad.append((W.vid, lhs, rhs))
    return bad


# ---------------------------------------------------------------------------
# general position


@dataclass(frozen=True)
class PositionRow:
    vid: str
    count: int
    size: int
    declared_dim: int | None

    @property
    def ratio(self) -> float:
        return math.log(max(self.count, 1)) / math.log(self.size)


def wgp_holds(count: int, size: int, alpha: int, tau: int) -> bool:
    """|X| >= alpha and count <= |X|^(1 - 1/tau), compared exactly."""
    return size >= alpha and count ** tau <= size ** (tau - 1)


@dataclass
class PositionReport:
    alpha: int
    tau: int
    dim: int
    rows: list  # PositionRow for the largest set
    fits: dict  # vid -> GrowthFit of |W ∩ X_N| against |X_N|
    wgp: bool
    witness: str | None
    static_gap: float
    gap: float  # min over W of 1 - fitted slope (static gap when only one set)
    lp: bool | None
    slp: bool | None
    lp_violations: list
    annihilator: SubvarietySpec | None = None

    def recompute(self) -> tuple:
        wgp = all(wgp_holds(r.count, r.size, self.alpha, self.tau) for r in self.rows)
        static = min(1 - r.ratio for r in self.rows)
        gap = min(1 - f.slope for f in self.fits.values()) if self.fits else static
        return wgp, static, gap

    def verify(self) -> bool:
        wgp, static, gap = self.recompute()
        return wgp == self.wgp and math.isclose(static, self.static_gap) and math.isclose(gap, self.gap)

    def worst(self) -> PositionRow:
        return min(self.rows, key=lambda r: (-r.count, r.vid))


def position_report(family: Sequence[PointSet], catalog: Sequence[SubvarietySpec], tau: int, *, alpha: int,
                    annihilator: tuple | None = None, counts: dict | None = None) -> PositionReport:
    """Rows for the largest set, growth fits over the family, wgp / gap / LP verdicts.

    ``annihilator`` is ``(degree, threshold, trials, seed)``; a found
    polynomial joins the catalog for this report.  ``counts`` may carry
    precomputed ``{(vid, index): count}`` values.
    """
    family = sorted(family, key=len)
    if not family or not catalog:
        raise PreconditionError("position_report needs a nonempty family and catalog")
    catalog = list(catalog)
    found = None
    if annihilator is not None:
        d, theta, trials, seed = annihilator
        res = annihilator_search(family[-1], d, theta, trials, seed)
        if res is not None:
            found = res.variety
            catalog.append(found)
    counts = dict(counts or {})
    for idx, X in enumerate(family):
        for W in catalog:
            if (W.vid, idx) not in counts:
                counts[(W.vid, idx)] = intersect_count(W, X)
    largest = family[-1]
    last = len(family) - 1
    rows = [PositionRow(W.vid, counts[(W.vid, last)], len(largest), W.declared_dim) for W in catalog]
    fits = {}
    sizes = [len(X) for X in family]
    if len(set(sizes)) > 1 and min(sizes) > 1:
        for W in catalog:
            fits[W.vid] = growth_fit([(len(X), counts[(W.vid, i)]) for i, X in enumerate(family)])
    wgp_rows = [r for r in rows if not wgp_holds(r.count, r.size, alpha, tau)]
    static = min(1 - r.ratio for r in rows)
    gap = min(1 - f.slope for f in fits.values()) if fits else static
    D = largest.spec.dimension
    lp = slp = None
    violations = []
    if fits:
        lp = slp = True
        for W in catalog:
            if W.declared_dim is None:
                continue
            bound = W.declared_dim / D
            slope = fits[W.vid].slope
            if slope > bound:
                lp = False
                violations.append((W.vid, slope, bound))
            if slope >= bound:
                slp = False
    witness = max(wgp_rows, key=lambda r: r.count).vid if wgp_rows else None
    return PositionReport(alpha, tau, D, rows, fits, not wgp_rows, witness, static, gap, lp, slp, violations, found)


# ---------------------------------------------------------------------------
# Elekes-Szabo sweep


CSV_COLUMNS = ["experiment_id", "group", "kind", "ell", "N", "set_size", "doubling_num", "doubling_den", "triples",
               "energy", "worst_variety_id", "worst_ratio_num_log", "worst_ratio_den_log", "wgp_tau", "wgp_pass",
               "gap_estimate"]


@dataclass
class ESResult:
    triples_fit: GrowthFit
    report: PositionReport
    rows: list  # dicts keyed by CSV_COLUMNS

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()


def build_family(spec: MatrixGroupSpec, ell: int, Ns: Sequence[int], seed: int, *, kind: str = "nilbox",
                 bit_size: int = 32, budget: int | None = None) -> list[PointSet]:
    X = sample_generics(spec, ell, bit_size=bit_size, seed=seed)
    if kind == "nilbox":
        return [nilbox(X, N, spec, budget=budget).group for N in Ns]
    if kind == "nilprog":
        U = [spec.exp(x) for x in X]
        return [nilprogression(U, N, spec, budget=budget) for N in Ns]
    raise PreconditionError(f"unknown progression kind {kind!r}")


def es_experiment(spec: MatrixGroupSpec, ell: int, Ns: Sequence[int], seed: int, *, kind: str = "nilbox",
                  bit_size: int = 32, alpha: int = 3, tau: int = 4, annihilator: tuple | None = None,
                  experiment_id: str = "es", catalog: Sequence[SubvarietySpec] | None = None,
                  budget: int | None = None) -> ESResult:
    """A = B = C = a progression of generic generators for each N; triple-count fit and position report."""
    Ns = list(Ns)
    if len(Ns) < 2 or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise PreconditionError("N schedule must be strictly increasing with at least two entries")
    family = build_family(spec, ell, Ns, seed, kind=kind, bit_size=bit_size, budget=budget)
    catalog = list(catalog) if catalog is not None else make_catalog(spec, alpha)
    counts = {}
    for idx, X in enumerate(family):
        for W in catalog:
            counts[(W.vid, idx)] = intersect_count(W, X)
    report = position_report(family, catalog, tau, alpha=alpha, annihilator=annihilator, counts=counts)
    rows = []
    samples = []
    for idx, (N, X) in enumerate(zip(Ns, family)):
        st = product_stats(X, X, X, budget=budget)
        ratio = mpq(st.product_size, len(X))
        samples.append((len(X), st.triples))
        worst_vid, worst = min(((W.vid, counts[(W.vid, idx)]) for W in catalog), key=lambda kv: (-kv[1], kv[0]))
        if report.annihilator is not None:
            extra = intersect_count(report.annihilator, X)
            if (-extra, report.annihilator.vid) < (-worst, worst_vid):
                worst_vid, worst = report.annihilator.vid, extra
        ok = all(wgp_holds(counts[(W.vid, idx)], len(X), alpha, tau) for W in catalog)
        num_log = math.log(max(worst, 1))
        den_log = math.log(len(X)) if len(X) > 1 else 0.0
        rows.append({
            "experiment_id": experiment_id,
            "group": spec.name,
            "kind": kind,
            "ell": ell,
            "N": N,
            "set_size": len(X),
            "doubling_num": int(ratio.numerator),
            "doubling_den": int(ratio.denominator),
            "triples": st.triples,
            "energy": st.energy,
            "worst_variety_id": worst_vid,
            "worst_ratio_num_log": f"{num_log:.9f}",
            "worst_ratio_den_log": f"{den_log:.9f}",
            "wgp_tau": tau,
            "wgp_pass": int(ok and wgp_holds(worst, len(X), alpha, tau)),
            "gap_estimate": f"{(1 - num_log / den_log) if den_log else 0.0:.9f}",
        })
    return ESResult(growth_fit(samples), report, rows)
