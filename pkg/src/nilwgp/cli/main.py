"""Command line entry point: ``nilwgp <subcommand> [flags]``.

Exit codes: 0 success, 1 invalid configuration, 2 budget exceeded,
3 verdict failure under ``--assert``.
"""

from __future__ import annotations

import argparse
import sys

from gmpy2 import mpq

from ..errors import BudgetExceeded, ConfigError, NilwgpError
from ..freelie import hall_basis, validate_hall_basis
from ..kernels import product_stats
from ..nilgroup import MatrixGroupSpec, central_series, sample_generics, sample_group_elements
from ..progressions import arithmetic_progression, nilbox, nilprogression, word_ball
from ..stats import build_family, find_control, position_report, transfer_check
from ..varieties import catalog_lines, make_catalog
from . import harness
from .config import KEYS, ExperimentConfig, _parse

# flag name -> config key
_FLAGS = {k: k.replace("_", "-") for k in KEYS}
_ALIASES = {"ell": ["--gens"], "ns": ["--length"]}


def _config_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="canonical key=value config file; flags override it")
    for key, flag in _FLAGS.items():
        p.add_argument(f"--{flag}", *_ALIASES.get(key, []), dest=f"cfg_{key}", metavar=key.upper())
    p.add_argument("--assert", dest="assert_mode", action="store_true",
                   help="turn verdict failures into exit code 3")
    return p


def config_from_args(args, **defaults) -> ExperimentConfig:
    """Config file (or the defaults, updated by ``defaults``) overridden by explicit flags."""
    if getattr(args, "config", None):
        cfg = ExperimentConfig.load(args.config)
    else:
        cfg = ExperimentConfig().with_(**defaults)
    changes = {}
    for key in KEYS:
        raw = getattr(args, f"cfg_{key}", None)
        if raw is not None:
            changes[key] = _parse(key, raw)
    try:
        return cfg.with_(**changes)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")


def _family(cfg: ExperimentConfig, spec):
    budget = harness.effective_budget(cfg)
    if cfg.kind == "ap":
        U = sample_group_elements(spec, cfg.ell, bit_size=cfg.bit_size, seed=cfg.seed)
        return [arithmetic_progression(U, N, spec, budget=budget) for N in cfg.ns]
    if cfg.kind == "ball" or not isinstance(spec, MatrixGroupSpec):
        U = sample_group_elements(spec, cfg.ell, bit_size=cfg.bit_size, seed=cfg.seed)
        return [word_ball(U, r, spec, budget=budget) for r in cfg.ns]
    if cfg.mode == "symbolic":
        X = sample_generics(spec, cfg.ell, "symbolic")
        if cfg.kind == "nilbox":
            return [nilbox(X, N, spec, budget=budget).group for N in cfg.ns]
        return [nilprogression([spec.exp(x) for x in X], N, spec, budget=budget) for N in cfg.ns]
    return build_family(spec, cfg.ell, cfg.ns, cfg.seed, kind=cfg.kind, bit_size=cfg.bit_size, budget=budget)


def cmd_hall_basis(args) -> int:
    hb = hall_basis(args.M, args.n)
    for line in hb.lines():
        _out(line)
    if args.validate:
        problems = validate_hall_basis(hb)
        for p in problems:
            print(f"problem: {p}", file=sys.stderr)
        return harness.EXIT_ASSERT if problems else 0
    return 0


def cmd_group(args) -> int:
    cfg = config_from_args(args)
    spec = harness.resolve_group(cfg.group)
    info = spec.describe()
    for k, v in info.items():
        _out(f"{k}: {v}")
    _out(f"coordinates: {' '.join(spec.coordinate_names)}")
    if isinstance(spec, MatrixGroupSpec):
        for k, layer in enumerate(central_series(spec)):
            _out(f"G_{k}: " + (" ".join(x.serialize() for x in layer) if layer else "0"))
    return 0


def cmd_build(args) -> int:
    cfg = config_from_args(args)
    spec = harness.resolve_group(cfg.group)
    for N, X in zip(cfg.ns, _family(cfg, spec)):
        _out(f"N={N}\tsize={len(X)}")
        if args.dump:
            for s in sorted(X.serialize()):
                _out(f"  {s}")
    return 0


def cmd_catalog(args) -> int:
    cfg = config_from_args(args)
    spec = harness.resolve_group(cfg.group)
    for line in catalog_lines(make_catalog(spec, cfg.alpha)):
        _out(line)
    return 0


def cmd_measure(args) -> int:
    cfg = config_from_args(args)
    spec = harness.resolve_group(cfg.group)
    budget = harness.effective_budget(cfg)
    _out("N\tsize\tproduct_size\tdoubling\tenergy\ttriples")
    for N, X in zip(cfg.ns, _family(cfg, spec)):
        st = product_stats(X, X, X, budget=budget)
        d = mpq(st.product_size, len(X))
        _out(f"{N}\t{len(X)}\t{st.product_size}\t{d.numerator}/{d.denominator}\t{st.energy}\t{st.triples}")
    return 0


def cmd_wgp(args) -> int:
    cfg = config_from_args(args)
    spec = harness.resolve_group(cfg.group)
    family = _family(cfg, spec)
    ann = None if cfg.annihilator is None else (*cfg.annihilator, cfg.seed)
    rep = position_report(family, make_catalog(spec, cfg.alpha), cfg.tau, alpha=cfg.alpha, annihilator=ann)
    _out(f"size: {len(family[-1])}")
    _out(f"wgp_pass: {str(rep.wgp).lower()}")
    _out(f"wgp_witness: {rep.witness or 'none'}")
    _out(f"gap_static: {rep.static_gap:.9f}")
    _out(f"gap_estimate: {rep.gap:.9f}")
    _out(f"larsen_pink: {str(rep.lp).lower()}")
    _out(f"annihilator: {rep.annihilator.vid if rep.annihilator is not None else 'none'}")
    w = rep.worst()
    _out(f"worst: {w.vid}\t{w.count}/{w.size}")
    if args.assert_mode and not (rep.wgp and rep.gap >= cfg.min_gap):
        return harness.EXIT_ASSERT
    return 0


def cmd_es(args) -> int:
    cfg = config_from_args(args)
    res = harness.run(cfg, assert_mode=args.assert_mode, experiment="es")
    if res.exit_code in (harness.EXIT_CONFIG, harness.EXIT_BUDGET):
        print(res.message, file=sys.stderr)
        return res.exit_code
    if not cfg.csv_path:
        _out(res.csv_text)
    if not cfg.report_path:
        sys.stderr.write(res.report_text)
    return res.exit_code


def cmd_negative(args) -> int:
    cfg = config_from_args(args, experiment_id="negative", group="affine", kind="ball", ns=(1, 2, 3, 4),
                           bit_size=16, annihilator=None)
    res = harness.run(cfg, assert_mode=args.assert_mode, experiment="negative")
    if res.exit_code in (harness.EXIT_CONFIG, harness.EXIT_BUDGET):
        print(res.message, file=sys.stderr)
        return res.exit_code
    if not cfg.report_path:
        _out(res.report_text)
    if cfg.csv_path == "" and args.csv_stdout:
        _out(res.csv_text)
    return res.exit_code


def cmd_control(args) -> int:
    cfg = config_from_args(args)
    spec = harness.resolve_group(cfg.group)
    if not isinstance(spec, MatrixGroupSpec):
        raise ConfigError("control runs need a matrix group")
    budget = harness.effective_budget(cfg)
    X = sample_generics(spec, cfg.ell, bit_size=cfg.bit_size, seed=cfg.seed)
    U = [spec.exp(x) for x in X]
    catalog = make_catalog(spec, 2) if args.transfer else []
    Ks = {"prog_by_box": [], "box_by_prog": []}
    ok = True
    _out("N\tdirection\tK\t|T|\tverdict\ttransfer_violations")
    for N in cfg.ns:
        P = nilprogression(U, N, spec, budget=budget)
        B = nilbox(X, N, spec, budget=budget).group
        for name, A, Bset in (("prog_by_box", P, B), ("box_by_prog", B, P)):
            cert = find_control(A, Bset)
            bad = transfer_check(A, Bset, cert.T, catalog) if catalog else []
            Ks[name].append(cert.K)
            ok = ok and cert.verdict and not bad
            _out(f"{N}\t{name}\t{cert.K}\t{cert.size}\t{str(cert.verdict).lower()}\t{len(bad)}")
    spread_ok = True
    for name, ks in Ks.items():
        spread_ok = spread_ok and max(ks) <= 2 * min(ks)
        _out(f"K_range {name}: {min(ks)}..{max(ks)}")
    if args.assert_mode and not (ok and spread_ok):
        return harness.EXIT_ASSERT
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nilwgp", description="Exact experiments on approximate subgroups "
                                     "and general position in nilpotent matrix groups.")
    sub = parser.add_subparsers(dest="command", required=True)
    parent = _config_parent()

    p = sub.add_parser("hall-basis", help="list basic commutators")
    p.add_argument("--generators", "--M", dest="M", type=int, required=True, help="number of generators")
    p.add_argument("--class", "--n", dest="n", type=int, required=True, help="nilpotency class (maximal order)")
    p.add_argument("--validate", action="store_true")
    p.set_defaults(func=cmd_hall_basis)

    p = sub.add_parser("group", parents=[parent], help="describe a group")
    p.add_argument("--spec", dest="cfg_group", metavar="NAME", help="alias of --group")
    p.set_defaults(func=cmd_group)

    for name, func, text in (("catalog", cmd_catalog, "list the subvariety catalog"),
                             ("measure", cmd_measure, "doubling, energy and triple counts per N"),
                             ("wgp", cmd_wgp, "general position report"),
                             ("es", cmd_es, "full sweep: CSV and report")):
        p = sub.add_parser(name, parents=[parent], help=text)
        p.set_defaults(func=func)

    p = sub.add_parser("build", parents=[parent], help="build progressions and print sizes")
    p.add_argument("--dump", action="store_true", help="print every point")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("control", parents=[parent], help="mutual control of nilprogression and nilbox")
    p.add_argument("--transfer", action="store_true", help="also check intersection transfer at alpha=2")
    p.set_defaults(func=cmd_control)

    p = sub.add_parser("negative", parents=[parent], help="non-nilpotent negative control")
    p.add_argument("--csv-stdout", action="store_true", help="print the CSV after the report")
    p.set_defaults(func=cmd_negative)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return harness.EXIT_BUDGET
    except NilwgpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
