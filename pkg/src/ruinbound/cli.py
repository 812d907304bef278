"""Command-line front end.

    ruinbound solve     adjustment coefficient for one condition
    ruinbound bound     (m+1) exp(-R u/(m+1)) for given R, u, m
    ruinbound simulate  Monte Carlo ruin estimates with matching bounds
    ruinbound table     bound table for the reference example (CSV)
    ruinbound check     statistical self-checks, one PASS/FAIL line each

Exit codes: 0 ok, 1 invalid input, 2 solver failure, 3 failed checks.
Laws default to the reference example and can be replaced by ``--config``
(a JSON file with ``premiums``, ``claims``, ``interest``, ``model``, ``u``,
``horizon``, ``paths``, ``seed``, ``tol`` fields); flags override the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from . import presets
from .adjustment import DEFAULT_TOL, AdjustmentProblem, solve_adjustment
from .bounds import TABLE_COLUMNS, lundberg_bound, table1
from .checks import run_checks
from .errors import ConfigError, RuinBoundError, SolverError
from .risk_models import Model, RiskModelConfig, estimate_ruin_curve

logger = logging.getLogger("ruinbound")

DEFAULT_SEED = 20240601
DEFAULT_PATHS = 10_000
DEFAULT_HORIZON = 1000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x: Any) -> Any:
    """Round floats to 7 significant digits for output."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            return str(x)
        return float(f"{x:.7g}")
    if isinstance(x, dict):
        return {k: fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    return x


def _g(x: float) -> str:
    return f"{x:.7g}"


def default_run_config() -> Dict[str, Any]:
    return {
        "model": "due",
        "premiums": {"marginal": presets.PREMIUM.to_dict(), "m": presets.DEPENDENCE_ORDER},
        "claims": {"marginal": presets.CLAIM.to_dict(), "m": presets.DEPENDENCE_ORDER},
        "interest": presets.INTEREST.to_dict(),
        "u": list(presets.TABLE_U),
        "horizon": DEFAULT_HORIZON,
        "paths": DEFAULT_PATHS,
        "seed": DEFAULT_SEED,
        "tol": DEFAULT_TOL,
    }


def load_run_config(path: Optional[str]) -> Dict[str, Any]:
    cfg = default_run_config()
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {path} is not valid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        unknown = set(data) - set(cfg)
        if unknown:
            raise ConfigError(f"config: unknown field(s) {sorted(unknown)}")
        cfg.update(data)
    return cfg


def _apply_overrides(cfg: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    for name in ("model", "horizon", "paths", "seed", "tol"):
        val = getattr(args, name, None)
        if val is not None:
            cfg[name] = val
    if getattr(args, "u", None) is not None:
        cfg["u"] = list(args.u)
    if getattr(args, "interest", None) is not None:
        cfg["interest"] = {"kind": "constant", "rate": args.interest}
    if getattr(args, "m", None) is not None:
        cfg["premiums"] = dict(cfg["premiums"], m=args.m)
        cfg["claims"] = dict(cfg["claims"], m=args.m)
    return cfg


def _risk_config(cfg: Dict[str, Any], u: float = 0.0) -> RiskModelConfig:
    return RiskModelConfig.from_dict(dict(cfg, u=u))


def _problem(cfg: Dict[str, Any]) -> AdjustmentProblem:
    return _risk_config(cfg).adjustment_problem()


def _u_list(cfg: Dict[str, Any]) -> List[float]:
    u = cfg["u"]
    if not isinstance(u, (list, tuple)):
        u = [u]
    try:
        values = [float(v) for v in u]
    except (TypeError, ValueError):
        raise ConfigError(f"u: expected numbers, got {cfg['u']!r}") from None
    if not values or any(not v >= 0 for v in values):
        raise ConfigError(f"u: values must be >= 0, got {cfg['u']!r}")
    return values


def _positive_int(cfg: Dict[str, Any], name: str) -> int:
    val = cfg[name]
    if isinstance(val, bool) or not isinstance(val, int) or val < 1:
        raise ConfigError(f"{name}: expected a positive integer, got {val!r}")
    return val


def _render_record(record: Dict[str, Any], fmt_name: str) -> str:
    record = fmt(record)
    if fmt_name == "json":
        return json.dumps(record, indent=2) + "\n"
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(record.keys())
        w.writerow([json.dumps(v) if isinstance(v, (list, dict)) else v for v in record.values()])
        return buf.getvalue()
    width = max(len(k) for k in record)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in record.items())


def _render_rows(header: Sequence[str], rows: List[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_g(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# -- commands -------------------------------------------------------------------

def cmd_solve(args, cfg) -> int:
    problem = _problem(cfg)
    result = solve_adjustment(problem, float(cfg["tol"]))
    record = {"model": cfg["model"], "condition": problem.condition.value, **result.to_dict()}
    _emit(args, _render_record(record, args.format or "text"))
    return 0


def cmd_bound(args, cfg) -> int:
    reports = [lundberg_bound(args.R, u, args.m) for u in args.u]
    fmt_name = args.format or "text"
    if fmt_name == "csv":
        text = _render_rows(["u", "m", "R", "bound", "valid", "threshold"],
                            [[r.u, r.m, r.R, r.bound, str(r.valid).lower(), r.threshold] for r in reports])
    elif fmt_name == "json" and len(reports) > 1:
        text = json.dumps(fmt([r.to_dict() for r in reports]), indent=2) + "\n"
    else:
        text = "".join(_render_record(r.to_dict(), fmt_name) for r in reports)
    _emit(args, text)
    return 0


def cmd_simulate(args, cfg) -> int:
    u_values = _u_list(cfg)
    n_paths = _positive_int(cfg, "paths")
    _positive_int(cfg, "horizon")
    seed = cfg["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed: expected a nonnegative integer, got {seed!r}")
    config = _risk_config(cfg, u_values[0])
    estimates = estimate_ruin_curve(config, u_values, n_paths, seed, args.workers)
    R = None
    try:
        R = solve_adjustment(config.adjustment_problem(), float(cfg["tol"])).R
    except SolverError as exc:
        logger.warning("no adjustment coefficient, bound column omitted: %s", exc)
    results = []
    for est in estimates:
        rec = est.to_dict()
        if R is not None:
            rep = lundberg_bound(R, est.u, config.m)
            rec.update(bound=rep.bound, bound_valid=rep.valid)
        else:
            rec.update(bound=None, bound_valid=None)
        results.append(rec)
    record = {"config": config.to_dict(), "n_paths": n_paths, "seed": seed, "R": R, "m": config.m,
              "estimates": results}
    if args.format == "csv":
        _emit(args, _csv_estimates(results))
    else:
        _emit(args, json.dumps(fmt(record), indent=2) + "\n")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(_csv_estimates(results))
    return 0


def _csv_estimates(results: List[Dict[str, Any]]) -> str:
    cols = ["u", "probability", "std_error", "wilson_low", "wilson_high", "n_ruined", "bound", "bound_valid"]
    rows = [[r[c] if r[c] is not None else "" for c in cols] for r in results]
    rows = [[str(v).lower() if isinstance(v, bool) else v for v in row] for row in rows]
    return _render_rows(cols, rows)


def cmd_table(args, cfg) -> int:
    u_values = [float(u) for u in args.u] if args.u else list(presets.TABLE_U)
    table = table1(u_values, tol=float(cfg["tol"]))
    if (args.format or "csv") == "json":
        record = {
            "R_immediate": table.R_immediate,
            "R_due": table.R_due,
            "m": table.m,
            "rows": [{"u": r.u, **dict(zip(TABLE_COLUMNS, r.values)), "valid": list(r.valid)} for r in table.rows],
            "min_useful_u": dict(zip(TABLE_COLUMNS, table.thresholds)),
            "published_mismatches": [d.__dict__ for d in table.discrepancies],
        }
        _emit(args, json.dumps(fmt(record), indent=2) + "\n")
        return 0
    text = _render_rows(["u", *TABLE_COLUMNS], [[r.u, *r.values] for r in table.rows])
    text += ",".join(["min_useful_u", *map(_g, table.thresholds)]) + "\n"
    for d in table.discrepancies:
        text += (f"# published {d.column} at u={d.u:g} is {_g(d.published)}, recomputed {_g(d.recomputed)}: "
                 f"{d.note}\n")
    _emit(args, text)
    return 0


def cmd_check(args, cfg) -> int:
    results = run_checks(scale=args.scale, workers=args.workers)
    _emit(args, "".join(r.line() + "\n" for r in results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return 3
    return 0


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run config; flags override its fields")
    common.add_argument("--format", choices=["text", "json", "csv"])
    common.add_argument("--output", "-o", help="write output here instead of stdout")

    parser = _Parser(prog="ruinbound", description="Lundberg-type ruin bounds for m-dependent risk models")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve for the adjustment coefficient")
    p.add_argument("--model", choices=[m.value for m in Model])
    p.add_argument("--interest", type=float, help="constant interest rate")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bound", parents=[common], help="evaluate the ruin bound")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--u", type=float, nargs="+", required=True)
    p.add_argument("--m", type=int, default=0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo ruin probability")
    p.add_argument("--model", choices=[m.value for m in Model])
    p.add_argument("--u", type=float, nargs="+")
    p.add_argument("--m", type=int)
    p.add_argument("--interest", type=float, help="constant interest rate")
    p.add_argument("--horizon", type=int)
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--workers", type=int, help="worker processes (capped by RUINBOUND_THREADS)")
    p.add_argument("--csv", help="also write per-u results to this CSV file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table", parents=[common], help="bound table for the reference example")
    p.add_argument("--u", type=float, nargs="+")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("check", parents=[common], help="run the statistical self-checks")
    p.add_argument("--scale", type=float, default=1.0, help="sample-size multiplier")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if getattr(args, "m", None) is not None and args.m < 0:
            raise ConfigError(f"m: must be >= 0, got {args.m}")
        cfg = _apply_overrides(load_run_config(args.config), args)
        if cfg.get("model") not in [m.value for m in Model]:
            raise ConfigError(f"model: expected classical|due|immediate, got {cfg.get('model')!r}")
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    except (RuinBoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
