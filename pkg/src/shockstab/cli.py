"""``shockstab`` command line.

Exit codes: 0 ok, 2 invalid config or arguments, 3 event cap exceeded,
4 negative stability margin or variation-formula audit failure,
5 verification violation.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import json
import sys
from pathlib import Path

from shockstab.config import SCHEMA_VERSION, ConfigError, load_config
from shockstab.entropy import DEFAULT_C1, DEFAULT_C2
from shockstab.flux import KINDS, FluxModel
from shockstab.fronttrack import EventCapExceeded
from shockstab.measure import audit_variation_formula
from shockstab.stability import CSV_COLUMNS, run_scenario, simulate
from shockstab.verify import CASES, GridSpec, verify_dbound, verify_identities

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_THEOREM, EXIT_VERIFY = 0, 2, 3, 4, 5
MARGIN_TOL = 1e-9
VAR_TOL = 1e-9

FRONT_COLUMNS = ("id", "born_at", "died_at", "position_at_birth", "speed", "u_left", "u_right", "kind")
EVENT_COLUMNS = ("time", "position", "incoming", "outgoing")


def fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


def write_report(path: Path, payload: dict):
    """JSON with a content hash; the timestamp is added after hashing."""
    body = _jsonable(payload)
    body["schema_version"] = SCHEMA_VERSION
    digest = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()
    body["report_hash"] = digest
    body["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
    return digest


def _out_dir(args, cfg=None) -> Path:
    if args.out:
        return Path(args.out)
    if cfg is not None and cfg.output_dir:
        return Path(cfg.output_dir)
    return Path("out")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    sim = simulate(cfg)
    out = _out_dir(args, cfg)
    write_csv(out / "fronts.csv", FRONT_COLUMNS,
              [(f.id, f.born_at, f.died_at, f.position_at_birth, f.speed, f.u_left, f.u_right, f.kind)
               for f in sim.fronts])
    write_csv(out / "events.csv", EVENT_COLUMNS,
              [(e.time, e.position, " ".join(map(str, e.incoming)), " ".join(map(str, e.outgoing)))
               for e in sim.events])
    print(f"{len(sim.fronts)} fronts, {len(sim.events)} events -> {out}")
    return EXIT_OK


def cmd_stability(args) -> int:
    cfg = load_config(args.config)
    report = run_scenario(cfg)
    out = _out_dir(args, cfg)
    write_csv(out / "stability.csv", CSV_COLUMNS, report.csv_rows())
    payload = report.as_dict()
    payload["config"] = cfg.raw
    write_report(out / "stability_report.json", payload)
    worst = report.min_margin
    print(f"{cfg.id}: {len(report.rows)} rows, min margin {worst:.6g}, "
          f"drift saturation {report.drift_saturation:.6g}")
    if worst < -MARGIN_TOL:
        print("negative margin: the stability estimate failed", file=sys.stderr)
        return EXIT_THEOREM
    return EXIT_OK


def _grid_spec(args) -> GridSpec:
    params = {}
    if args.model == "quartic":
        params = {"a": args.a, "b": args.b}
    lo, hi = args.range
    try:
        model = FluxModel.from_spec({"name": args.model, "params": params})
        return GridSpec(model, ((lo, hi),) * 4, points=args.points, random=args.random,
                        seed=args.seed, case=args.case)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _finish_verify(args, report, name) -> int:
    out = Path(args.out) if args.out else Path("out")
    write_report(out / f"{name}.json", report.as_dict())
    if args.csv:
        rows = [(c.name, c.count, c.worst_margin, c.witness_index,
                 " ".join(fmt(v) for v in (c.witness or ())), c.violations, c.oracle_failures)
                for c in report.checks.values()]
        write_csv(out / f"{name}.csv",
                  ("check", "count", "worst_margin", "witness_index", "witness", "violations",
                   "oracle_failures"), rows)
    for c in report.checks.values():
        print(f"{c.name:<12} n={c.count:<9} worst={c.worst_margin:+.3e} violations={c.violations}")
    if not report.ok:
        print(f"{report.n_violations} violation(s)", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_dbound(_grid_spec(args), (args.C1, args.C2), workers=args.workers)
    return _finish_verify(args, report, "verify_report")


def cmd_verify_identities(args) -> int:
    report = verify_identities(_grid_spec(args), workers=args.workers, oracle_limit=args.oracle_limit)
    return _finish_verify(args, report, "identities_report")


def cmd_var_check(args) -> int:
    cfg = load_config(args.config)
    sim = simulate(cfg)
    pairs = args.pairs if args.pairs is not None else cfg.var_pairs
    seed = args.seed if args.seed is not None else cfg.var_seed
    errs = audit_variation_formula(sim, pairs, seed)
    out = _out_dir(args, cfg)
    write_csv(out / "var_check.csv", ("pair", "discrepancy"), list(enumerate(errs)))
    worst = max(errs, default=0.0)
    print(f"{cfg.id}: {len(errs)} path pairs, max discrepancy {worst:.3e}")
    return EXIT_THEOREM if worst > VAR_TOL else EXIT_OK


def _add_grid_flags(p):
    p.add_argument("--model", choices=KINDS, default="burgers")
    p.add_argument("--a", type=float, default=1.0, help="quartic a")
    p.add_argument("--b", type=float, default=3.0, help="quartic b")
    p.add_argument("--range", type=float, nargs=2, default=(-2.0, 2.0), metavar=("LO", "HI"))
    p.add_argument("--points", type=int, default=21, help="grid points per axis")
    p.add_argument("--random", type=int, default=0, help="extra random quadruples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--case", choices=CASES, default="all")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--csv", action="store_true", help="also write a per-check CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shockstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("simulate", cmd_simulate, "run front tracking, write fronts/events CSV"),
                            ("stability", cmd_stability, "evaluate the stability and drift margins"),
                            ("var-check", cmd_var_check, "audit the relative-entropy balance law")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True)
        p.add_argument("--out")
        p.add_argument("--workers", type=int, default=1, help="accepted for uniformity; runs are serial")
        if name == "var-check":
            p.add_argument("--seed", type=int)
            p.add_argument("--pairs", type=int)
        p.set_defaults(func=fn)

    p = sub.add_parser("verify", help="sweep the dissipation bound")
    _add_grid_flags(p)
    p.add_argument("--C1", type=float, default=DEFAULT_C1)
    p.add_argument("--C2", type=float, default=DEFAULT_C2)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("verify-identities", help="sweep the jump identities and auxiliary bounds")
    _add_grid_flags(p)
    p.add_argument("--oracle-limit", type=int, default=None,
                   help="run the quadrature oracle on the first N quadruples only")
    p.set_defaults(func=cmd_verify_identities)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EventCapExceeded as exc:
        print(f"event cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
