"""Command-line front end: run experiments, check exact states, print efficiency figures.

Exit codes: 0 success, 2 configuration error, 3 verification failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace

from .adversaries import ATTACKS
from .analysis import (
    BB84,
    LUCAMARINI_MANCINI,
    REFERENCE_SCHEMES,
    SCHEMA_VERSION,
    THIS_SCHEME,
    ExperimentPlan,
    NoCrossingError,
    VerifyParams,
    crossover_tau,
    default_seed,
    detection_curve,
    efficiency,
    practical_efficiency,
    run_checks,
    run_experiment,
    tau_grid,
)
from .protocols import FAMILIES, ConfigError, ProtocolConfig

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_IO = 0, 2, 3, 4

# flat config keys accepted in a config file, with the type each must have
RUN_KEYS = {
    "protocol": str,
    "key_dim": int,
    "carrier_dim": int,
    "theta": float,
    "alpha": float,
    "beta": float,
    "rounds": int,
    "exact_modes": bool,
    "attack": str,
    "trials": int,
    "check_fraction": float,
    "check_rounds": list,
    "seed": int,
    "ci_method": str,
    "trips_exponent": int,
}
RUN_DEFAULTS = {"protocol": "zlg", "rounds": 20, "attack": "passive", "trials": 100,
                "check_fraction": 0.25, "check_rounds": [], "ci_method": "normal", "trips_exponent": 3}


def _rounds_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated round numbers, got {text!r}") from None


def _protocol_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("protocol")
    g.add_argument("--protocol", choices=FAMILIES, help="protocol family (default zlg)")
    g.add_argument("--dim", type=int, help="key dimension (alias for --key-dim)")
    g.add_argument("--key-dim", type=int, help="dimension of each key share")
    g.add_argument("--carrier-dim", type=int, help="carrier dimension (sections k for kbb-hd)")
    g.add_argument("--theta", type=float, help="rotation angle in radians for zlg families")
    g.add_argument("--alpha", type=float, help="non-orthogonal carrier amplitude alpha")
    g.add_argument("--beta", type=float, help="non-orthogonal carrier amplitude beta")
    g.add_argument("--rounds", type=int, help="rounds per trial (default 20)")
    g.add_argument("--exact-modes", action="store_true", default=None,
                   help="check variants: exact N/N/N mode split instead of a fair coin")


def _experiment_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment")
    g.add_argument("--attack", choices=ATTACKS, help="interceptor (default passive)")
    g.add_argument("--trials", type=int, help="independent trials (default 100)")
    g.add_argument("--check-fraction", type=float, help="probability each round is a check round (default 0.25)")
    g.add_argument("--check-rounds", type=_rounds_list, help="rounds always checked, e.g. 2,3")
    g.add_argument("--seed", type=int, help="master seed (default 1729, or $QKDLAB_SEED)")
    g.add_argument("--ci-method", choices=("normal", "clopper-pearson"), help="binomial interval method")
    g.add_argument("--trips-exponent", type=int, help="transmittance exponent in practical efficiency")
    g.add_argument("--jobs", type=int, default=1, help="worker processes (default 1; output is identical)")
    g.add_argument("--config", help="flat JSON file of settings; flags override it")


def _output_flags(p: argparse.ArgumentParser, default_format="json") -> None:
    p.add_argument("--format", choices=("json", "csv", "table"), default=default_format)
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkdlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte Carlo experiment against one attack")
    _protocol_flags(run)
    _experiment_flags(run)
    _output_flags(run)
    run.add_argument("--transcript", help="write every round of every trial as JSON lines")

    ver = sub.add_parser("verify", help="exact state checks against brute-force matrices")
    ver.add_argument("--only", action="append", help="run only these checks (repeatable or comma-separated)")
    ver.add_argument("--alpha", type=float, default=0.6)
    ver.add_argument("--beta", type=float, default=0.8)
    ver.add_argument("--theta", type=float, default=math.pi / 4)
    ver.add_argument("--dim", type=int, default=3, help="qudit dimension for the d-level checks")
    ver.add_argument("--key-dim", type=int, default=4, help="key dimension D for the repaired variants")
    ver.add_argument("--carrier-dim", type=int, default=2, help="sections k for the sectioned variant")
    ver.add_argument("--list", action="store_true", help="list check names and exit")
    _output_flags(ver, "table")

    eff = sub.add_parser("efficiency", help="efficiency and transmittance-weighted efficiency")
    eff.add_argument("--tau", type=float, action="append", help="transmittance value (repeatable)")
    eff.add_argument("--trips-exponent", type=int, default=3, help="exponent for this scheme (default 3)")
    _output_flags(eff, "table")

    cur = sub.add_parser("curves", help="detection probability against number of checked rounds")
    _protocol_flags(cur)
    _experiment_flags(cur)
    cur.add_argument("--check-counts", type=_rounds_list, default=[0, 1, 2, 4, 8],
                     help="numbers of checked rounds (default 0,1,2,4,8)")
    _output_flags(cur, "csv")
    return parser


# settings


def load_config_file(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"{path} is not valid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold one flat JSON object")
    if "dim" in data:
        data.setdefault("key_dim", data.pop("dim"))
    for key, value in data.items():
        if key not in RUN_KEYS:
            raise ConfigError(key, f"unknown setting; expected one of {sorted(RUN_KEYS)}")
        want = RUN_KEYS[key]
        if want is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, want) or (want is int and isinstance(value, bool)):
            raise ConfigError(key, f"must be of type {want.__name__}; got {value!r}")
        data[key] = value
    return data


def effective_settings(args) -> dict:
    """Defaults, then the config file, then inline flags."""
    settings = dict(RUN_DEFAULTS)
    settings["seed"] = default_seed()
    if args.config:
        settings.update(load_config_file(args.config))
    if args.dim is not None and args.key_dim is not None and args.dim != args.key_dim:
        raise ConfigError("key_dim", f"--dim {args.dim} and --key-dim {args.key_dim} disagree")
    flags = {
        "protocol": args.protocol,
        "key_dim": args.key_dim if args.key_dim is not None else args.dim,
        "carrier_dim": args.carrier_dim,
        "theta": args.theta,
        "alpha": args.alpha,
        "beta": args.beta,
        "rounds": args.rounds,
        "exact_modes": args.exact_modes,
        "attack": args.attack,
        "trials": args.trials,
        "check_fraction": args.check_fraction,
        "check_rounds": args.check_rounds,
        "seed": args.seed,
        "ci_method": args.ci_method,
        "trips_exponent": args.trips_exponent,
    }
    settings.update({k: v for k, v in flags.items() if v is not None})
    return settings


def plan_from_settings(s: dict) -> ExperimentPlan:
    proto = {"family": s["protocol"], "rounds": s["rounds"]}
    for key in ("key_dim", "carrier_dim", "theta", "alpha", "beta", "exact_modes"):
        if key in s:
            proto[key] = s[key]
    config = ProtocolConfig(**proto)
    return ExperimentPlan(config, s["attack"], s["trials"], s["check_fraction"],
                          tuple(s["check_rounds"]), s["seed"], s["ci_method"],
                          trips_exponent=s["trips_exponent"])


# rendering


def _table(rows: list[dict], columns: list[str]) -> str:
    cells = [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({c: ("" if r.get(c) is None else r.get(c)) for c in columns})
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_rows(rep: dict) -> list[dict]:
    rows = []
    for key in ("attack_success", "detection", "qber"):
        r = rep[key]
        rows.append({"metric": key, "value": r["rate"], "low": r["low"], "high": r["high"],
                     "count": r["count"], "trials": r["trials"]})
    rows.append({"metric": "leak_fraction", "value": rep["leak_fraction"]})
    rows.append({"metric": "mean_rounds_to_detection", "value": rep["mean_rounds_to_detection"]})
    rows.append({"metric": "epsilon", "value": rep["efficiency"]["epsilon"]})
    if rep["key_rank"]:
        rows.append({"metric": "key_rank_min", "value": rep["key_rank"]["min"]})
    for n, q in enumerate(rep["qber_per_round"], 1):
        rows.append({"metric": f"qber_round_{n}", "value": q})
    return rows


# subcommands


def cmd_run(args) -> int:
    settings = effective_settings(args)
    plan = plan_from_settings(settings)
    report = run_experiment(plan, jobs=args.jobs, keep_transcripts=bool(args.transcript))
    rep = report.to_dict()
    rep["config"] = settings
    if args.format == "json":
        text = _json(rep)
    else:
        cols = ["metric", "value", "low", "high", "count", "trials"]
        text = (_csv if args.format == "csv" else _table)(_report_rows(rep), cols)
    emit(text, args.out)
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8", newline="") as fh:
            for i, lines in enumerate(report.transcripts):
                for line in lines.splitlines():
                    rec = json.loads(line)
                    rec["trial"] = i
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.list:
        from .analysis import CHECKS

        emit("".join(name + "\n" for name in CHECKS), args.out)
        return EXIT_OK
    only = [n.strip() for item in (args.only or []) for n in item.split(",") if n.strip()]
    params = VerifyParams(args.alpha, args.beta, args.theta, args.dim, args.key_dim, args.carrier_dim)
    if abs(args.alpha**2 + args.beta**2 - 1) > 1e-9:
        raise ConfigError("alpha/beta", f"need alpha^2 + beta^2 = 1; got {args.alpha}^2 + {args.beta}^2")
    if args.key_dim % args.carrier_dim or args.key_dim % 2:
        raise ConfigError("key_dim", f"needs to be even and a multiple of carrier_dim {args.carrier_dim}")
    try:
        results = run_checks(only or None, params)
    except KeyError as exc:
        raise ConfigError("only", exc.args[0]) from None
    rows = [r.to_dict() for r in results]
    ok = all(r.passed for r in results)
    if args.format == "json":
        text = _json({"schema_version": SCHEMA_VERSION, "passed": ok, "checks": rows})
    elif args.format == "csv":
        text = _csv([{**r, "notes": " | ".join(r["notes"])} for r in rows],
                    ["name", "passed", "deviation", "description", "notes"])
    else:
        lines = []
        for r in rows:
            mark = "PASS" if r["passed"] else "FAIL"
            lines.append(f"{mark}  {r['name']:<28} max deviation {r['deviation']:.2e}  {r['description']}")
            lines += [f"      note: {n}" for n in r["notes"]]
        lines.append(f"{sum(r['passed'] for r in rows)}/{len(rows)} checks passed")
        text = "\n".join(lines) + "\n"
    emit(text, args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_efficiency(args) -> int:
    taus = args.tau or tau_grid()
    for t in taus:
        if not 0 < t <= 1:
            raise ConfigError("tau", f"must lie in (0, 1]; got {t}")
    ours = replace(THIS_SCHEME, trips_exponent=args.trips_exponent)
    schemes = (ours,) + REFERENCE_SCHEMES[1:]
    rows = []
    for t in taus:
        row = {"tau": t}
        for s in schemes:
            row[s.name] = practical_efficiency(s.at(t))
        rows.append(row)
    crossings = {}
    for other in (BB84, LUCAMARINI_MANCINI):
        try:
            crossings[other.name] = crossover_tau(ours, other)
        except NoCrossingError:
            crossings[other.name] = None
    summary = {s.name: {"b_s": s.b_s, "q_t": s.q_t, "b_t": s.b_t, "epsilon": efficiency(s),
                        "trips_exponent": s.trips_exponent} for s in schemes}
    cols = ["tau"] + [s.name for s in schemes]
    if args.format == "json":
        text = _json({"schema_version": SCHEMA_VERSION, "schemes": summary, "crossover_tau": crossings,
                      "practical": rows})
    elif args.format == "csv":
        text = _csv(rows, cols)
    else:
        lines = [f"{name}: epsilon = {v['epsilon']:.6g}, trips exponent {v['trips_exponent']}"
                 for name, v in summary.items()]
        lines += [f"crossover vs {name}: tau = {'-' if t is None else f'{t:.4f}'}" for name, t in crossings.items()]
        text = "\n".join(lines) + "\n\n" + _table(rows, cols)
    emit(text, args.out)
    return EXIT_OK


def cmd_curves(args) -> int:
    settings = effective_settings(args)
    plan = plan_from_settings(settings)
    counts = args.check_counts
    if any(c < 0 for c in counts):
        raise ConfigError("check_counts", "must be non-negative")
    curve = detection_curve(plan, counts, jobs=args.jobs)
    rows = [{"checks": c, "detection": p} for c, p in curve]
    if args.format == "json":
        text = _json({"schema_version": SCHEMA_VERSION, "config": settings, "detection_curve": rows})
    else:
        text = (_csv if args.format == "csv" else _table)(rows, ["checks", "detection"])
    emit(text, args.out)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "verify": cmd_verify, "efficiency": cmd_efficiency, "curves": cmd_curves}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
