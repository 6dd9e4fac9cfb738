"""Seeded experiment runs: CSV rows, a plain-text report and an exit code."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from gmpy2 import mpq

from ..errors import BudgetExceeded, ConfigError, NilwgpError
from ..kernels import product_stats
from ..nilgroup import GroupSpec, group_spec, sample_group_elements
from ..progressions import PointSet, word_ball
from ..stats import CSV_COLUMNS, ESResult, PositionReport, es_experiment, position_report, wgp_holds
from ..varieties import intersect_count, make_catalog
from .config import ExperimentConfig

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_ASSERT = 0, 1, 2, 3


@dataclass
class RunResult:
    exit_code: int
    csv_text: str = ""
    report_text: str = ""
    passed: bool | None = None
    message: str = ""
    detail: object = field(default=None, repr=False)


def effective_budget(config: ExperimentConfig) -> int:
    """The environment override NILWGP_BUDGET wins over the config value."""
    env = os.environ.get("NILWGP_BUDGET")
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ConfigError(f"NILWGP_BUDGET={env!r} is not an integer") from exc
        if value < 1:
            raise ConfigError("NILWGP_BUDGET must be positive")
        return value
    return config.budget


def resolve_group(name: str) -> GroupSpec:
    try:
        return group_spec(name)
    except NilwgpError as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(f"unknown group {name!r}: {exc}") from exc


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.9f}"
    return str(x)


def es_report(config: ExperimentConfig, result: ESResult, passed: bool) -> str:
    fit = result.triples_fit
    rep: PositionReport = result.report
    lines = [f"experiment_id: {config.experiment_id}", f"group: {config.group}", f"kind: {config.kind}",
             f"ell: {config.ell}", f"ns: {','.join(map(str, config.ns))}", f"seed: {config.seed}",
             f"bit_size: {config.bit_size}",
             f"triples_slope: {_fmt(fit.slope)}", f"triples_intercept: {_fmt(fit.intercept)}",
             f"triples_max_residual: {_fmt(fit.max_residual)}",
             f"alpha: {rep.alpha}", f"tau: {rep.tau}", f"catalog_size: {len(rep.rows)}",
             f"wgp_pass: {_fmt(rep.wgp)}", f"wgp_witness: {rep.witness or 'none'}",
             f"gap_static: {_fmt(rep.static_gap)}", f"gap_estimate: {_fmt(rep.gap)}",
             f"larsen_pink: {_fmt(rep.lp)}", f"strict_larsen_pink: {_fmt(rep.slp)}",
             f"larsen_pink_violations: {len(rep.lp_violations)}",
             f"annihilator: {rep.annihilator.vid if rep.annihilator is not None else 'none'}"]
    worst = sorted(rep.rows, key=lambda r: (-r.count, r.vid))[:5]
    for r in worst:
        lines.append(f"worst: {r.vid}\t{r.count}/{r.size}\t{_fmt(r.ratio)}")
    lines.append(f"thresholds: slope>={config.min_slope!r} gap>={config.min_gap!r} wgp")
    lines.append(f"verdict: {'pass' if passed else 'fail'}")
    return "\n".join(lines) + "\n"


def run_es(config: ExperimentConfig, *, assert_mode: bool = False) -> RunResult:
    spec = resolve_group(config.group)
    if not spec.describe()["nilpotent"]:
        raise ConfigError(f"{config.group} is not nilpotent; use the negative control")
    if config.mode != "random":
        raise ConfigError("experiment sweeps need mode=random (exact counting kernels are rational)")
    if config.kind not in ("nilbox", "nilprog"):
        raise ConfigError("experiment sweeps use kind nilbox or nilprog")
    if len(config.ns) < 2:
        raise ConfigError("experiment sweeps need at least two N values")
    ann = None
    if config.annihilator is not None:
        d, theta, trials = config.annihilator
        ann = (d, theta, trials, config.seed)
    result = es_experiment(spec, config.ell, config.ns, config.seed, kind=config.kind, bit_size=config.bit_size,
                           alpha=config.alpha, tau=config.tau, annihilator=ann,
                           experiment_id=config.experiment_id, budget=effective_budget(config))
    passed = (result.triples_fit.slope >= config.min_slope and result.report.wgp
              and result.report.gap >= config.min_gap)
    res = RunResult(EXIT_OK, result.csv_text(), es_report(config, result, passed), passed, detail=result)
    if assert_mode and not passed:
        res.exit_code = EXIT_ASSERT
        res.message = "verdict failed"
    return res


# ---------------------------------------------------------------------------
# negative control


@dataclass
class NegativeRow:
    radius: int
    size: int
    product_size: int
    triples: int
    energy: int
    worst_vid: str
    worst_count: int
    wgp: bool

    @property
    def doubling(self) -> mpq:
        return mpq(self.product_size, self.size)


def negative_control(config: ExperimentConfig, *, assert_mode: bool = False) -> RunResult:
    """Word balls of radius N (N over the schedule) on generic elements of a non-nilpotent group.

    Reports, per radius, the exact doubling |B·B|/|B| and the weak general
    position verdict against the catalog.  The control succeeds when, at
    every radius, doubling exceeds the threshold or wgp fails.
    """
    spec = resolve_group(config.group)
    if spec.describe()["nilpotent"]:
        raise ConfigError(f"{config.group} is nilpotent; the negative control needs a non-nilpotent group")
    budget = effective_budget(config)
    U = sample_group_elements(spec, config.ell, bit_size=config.bit_size, seed=config.seed)
    catalog = make_catalog(spec, config.alpha)
    rows = []
    for r in config.ns:
        B = word_ball(U, r, spec, budget=budget)
        st = product_stats(B, B, B, budget=budget)
        counts = [(intersect_count(W, B), W.vid) for W in catalog]
        worst_count, worst_vid = min(counts, key=lambda cv: (-cv[0], cv[1]))
        ok = all(wgp_holds(c, len(B), config.alpha, config.tau) for c, _ in counts)
        rows.append(NegativeRow(r, len(B), st.product_size, st.triples, st.energy, worst_vid, worst_count, ok))
    increasing = all(b.doubling > a.doubling for a, b in zip(rows, rows[1:]))
    threshold = mpq(config.threshold)
    fails = [row.doubling > threshold or not row.wgp for row in rows]
    passed = increasing and all(fails)
    lines = [f"experiment_id: {config.experiment_id}", f"group: {config.group}", "kind: ball",
             f"ell: {config.ell}", f"seed: {config.seed}", f"bit_size: {config.bit_size}",
             f"threshold: {config.threshold!r}", f"alpha: {config.alpha}", f"tau: {config.tau}"]
    for row, fail in zip(rows, fails):
        d = row.doubling
        lines.append(f"radius {row.radius}: size {row.size} product {row.product_size} doubling {d.numerator}/"
                     f"{d.denominator} ({float(d):.6f}) wgp {_fmt(row.wgp)} worst {row.worst_vid} "
                     f"{row.worst_count} property_fails {_fmt(fail)}")
    lines.append(f"doubling_strictly_increasing: {_fmt(increasing)}")
    lines.append(f"fails_at_every_radius: {_fmt(all(fails))}")
    lines.append(f"verdict: {'pass' if passed else 'fail'}")
    csv_rows = [_negative_csv(config, row) for row in rows]
    res = RunResult(EXIT_OK, _csv(csv_rows), "\n".join(lines) + "\n", passed, detail=rows)
    if assert_mode and not passed:
        res.exit_code = EXIT_ASSERT
        res.message = "negative control did not fail as expected"
    return res


def _negative_csv(config: ExperimentConfig, row: NegativeRow) -> dict:
    d = row.doubling
    num_log = math.log(max(row.worst_count, 1))
    den_log = math.log(row.size) if row.size > 1 else 0.0
    return {"experiment_id": config.experiment_id, "group": config.group, "kind": "ball", "ell": config.ell,
            "N": row.radius, "set_size": row.size, "doubling_num": int(d.numerator),
            "doubling_den": int(d.denominator), "triples": row.triples, "energy": row.energy,
            "worst_variety_id": row.worst_vid, "worst_ratio_num_log": f"{num_log:.9f}",
            "worst_ratio_den_log": f"{den_log:.9f}", "wgp_tau": config.tau, "wgp_pass": int(row.wgp),
            "gap_estimate": f"{(1 - num_log / den_log) if den_log else 0.0:.9f}"}


def _csv(rows: list[dict]) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# planted sets


def planted_coset(spec: GroupSpec, fixed: dict, N: int) -> PointSet:
    """All points with coordinates ``fixed[i]`` at positions i and the rest in [-N, N]."""
    import itertools

    D = spec.dimension
    if any(not 0 <= i < D for i in fixed):
        raise ConfigError("fixed coordinate index out of range")
    free = [i for i in range(D) if i not in fixed]
    pts = []
    for vals in itertools.product(range(-N, N + 1), repeat=len(free)):
        c = [mpq(0)] * D
        for i, v in fixed.items():
            c[i] = mpq(v)
        for i, v in zip(free, vals):
            c[i] = mpq(v)
        pts.append(spec.from_coords(c))
    return PointSet(spec, "group", pts)


def planted_report(spec: GroupSpec, fixed: dict, N: int, *, alpha: int = 2, tau: int = 4):
    """Position report of a planted coset; returns (report, vids of catalog entries containing the coset)."""
    X = planted_coset(spec, fixed, N)
    catalog = make_catalog(spec, alpha)
    report = position_report([X], catalog, tau, alpha=alpha)
    return report, [r.vid for r in report.rows if r.count == len(X)]


def run(config: ExperimentConfig, *, assert_mode: bool = False, experiment: str | None = None) -> RunResult:
    """Run an experiment and write its artifacts; budget overruns give exit code 2.

    ``experiment`` is "es" or "negative"; by default nilpotent groups get the
    sweep and other groups the negative control.
    """
    try:
        if experiment is None:
            experiment = "es" if resolve_group(config.group).describe()["nilpotent"] else "negative"
        if experiment == "es":
            res = run_es(config, assert_mode=assert_mode)
        elif experiment == "negative":
            res = negative_control(config, assert_mode=assert_mode)
        else:
            raise ConfigError(f"unknown experiment {experiment!r}")
    except BudgetExceeded as exc:
        return RunResult(EXIT_BUDGET, message=f"budget exceeded: {exc}")
    except ConfigError as exc:
        return RunResult(EXIT_CONFIG, message=f"invalid config: {exc}")
    write_artifacts(config, res)
    return res


def write_artifacts(config: ExperimentConfig, res: RunResult) -> None:
    for path, text in ((config.csv_path, res.csv_text), (config.report_path, res.report_text)):
        if path:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
