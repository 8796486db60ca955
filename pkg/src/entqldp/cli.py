"""Command-line surface: entropy sweeps, plots, single reports, self-test.

Verbs
-----
sweep    : evaluate epsilon*(s) over a grid of entropy levels from a JSON
           run configuration; writes sweep.csv and sweep_summary.json.
plot     : render a sweep CSV to a static SVG (epsilon curves vs s with
           the log 2 threshold marked).
report   : print the PrivacyReport for a single entropy level as JSON.
selftest : run the built-in correctness criteria (quick or full).

Global flags: --config <path>, --seed <u64>, --log-base {e,2}, --out <dir>.
Exit codes: 0 success, 1 criterion failure, 2 usage or config error.

Run configuration JSON:

    {
      "mechanism": {"channel_a": {"kind": "block_depolarizing", "beta": 0.5},
                    "channel_b": {"kind": "block_depolarizing", "beta": 0.5}},
      "s_grid": [0.0, 0.3, 0.7] | {"start": 0.0, "stop": 1.386, "count": 50},
      "povm_search": {"grid_points": 101, "refinement_iters": 40,
                      "restarts": 8, "seed": 42},
      "optimizer": {"restarts": 8, "max_iters": 2000, "tol": 1e-8, "seed": 42},
      "out_dir": ".",
      "seed": 42
    }

Kraus channels use {"kind": "kraus", "dim": 4, "operators": [[[re, im],
...], ...]}. All epsilons are in nats unless --log-base 2 is given, which
rescales the epsilon columns of the CSV and the epsilon fields of report
JSON for display.
"""

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, analyzer, channels, manifold, selftest

CSV_HEADER = ["s", "tau", "epsilon_upper", "epsilon_numeric", "j_max",
              "j_min_bound", "regime_max", "regime_min", "wall_time_ms"]
_LOG2 = np.log(2.0)


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated run configuration."""

    mechanism: channels.ProductMechanism
    s_grid: tuple
    povm_search: analyzer.PovmSearchConfig
    optimizer: manifold.OptimizerConfig
    out_dir: str
    seed: int
    raw: dict


@dataclass(frozen=True)
class SweepRow:
    s: float
    tau: object
    epsilon_upper: float
    epsilon_numeric: float
    j_max: float
    j_min_bound: float
    regime_max: str
    regime_min: str
    wall_time_ms: float
    converged: bool


def _fmt(value):
    """CSV cell: 17 significant digits, 'inf' for infinity, empty for
    not-applicable."""
    if value is None:
        return ""
    v = float(value)
    if np.isinf(v):
        return "inf"
    return f"{v:.17g}"


def _parse_s_grid(obj, s_max):
    if isinstance(obj, dict):
        missing = {"start", "stop", "count"} - set(obj)
        if missing:
            raise ValueError(f"s_grid object missing keys: {sorted(missing)}")
        count = int(obj["count"])
        if count < 1:
            raise ValueError("s_grid count must be at least 1")
        grid = np.linspace(float(obj["start"]), float(obj["stop"]), count)
    elif isinstance(obj, (list, tuple)):
        grid = np.asarray([float(v) for v in obj], dtype=float)
    else:
        raise ValueError("s_grid must be a list or a start/stop/count object")
    if grid.size == 0:
        raise ValueError("s_grid is empty")
    if grid.min() < -1e-12 or grid.max() > s_max + 1e-12:
        raise ValueError(
            f"s_grid values must lie within [0, {s_max:.6f}]")
    return tuple(float(min(max(v, 0.0), s_max)) for v in grid)


def load_run_config(path, seed_override=None, out_override=None):
    """Read, validate, and materialize a run configuration JSON file."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("run config must be a JSON object")
    known = {"mechanism", "s_grid", "povm_search", "optimizer", "out_dir",
             "seed"}
    unknown = sorted(set(obj) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {unknown}")
    if "mechanism" not in obj or "s_grid" not in obj:
        raise ValueError("config needs 'mechanism' and 's_grid'")
    mech_obj = obj["mechanism"]
    if not isinstance(mech_obj, dict) or \
            {"channel_a", "channel_b"} - set(mech_obj):
        raise ValueError("mechanism must hold 'channel_a' and 'channel_b'")
    mechanism = channels.ProductMechanism(
        channels.channel_from_json(mech_obj["channel_a"]),
        channels.channel_from_json(mech_obj["channel_b"]))
    seed = int(obj.get("seed", 42)) if seed_override is None \
        else int(seed_override)
    s_max = float(np.log(min(mechanism.dims)))
    s_grid = _parse_s_grid(obj["s_grid"], s_max)
    povm_kwargs = dict(obj.get("povm_search", {}))
    povm_kwargs.setdefault("seed", seed)
    if seed_override is not None:
        povm_kwargs["seed"] = seed
    opt_kwargs = dict(obj.get("optimizer", {}))
    opt_kwargs.setdefault("seed", seed)
    if seed_override is not None:
        opt_kwargs["seed"] = seed
    try:
        povm = analyzer.PovmSearchConfig(**povm_kwargs)
        optimizer = manifold.OptimizerConfig(**opt_kwargs)
    except TypeError as exc:
        raise ValueError(f"bad search/optimizer config: {exc}") from exc
    out_dir = out_override or obj.get("out_dir", ".")
    return RunConfig(mechanism=mechanism, s_grid=s_grid, povm_search=povm,
                     optimizer=optimizer, out_dir=str(out_dir), seed=seed,
                     raw=obj)


def _is_block_mechanism(mechanism):
    return (mechanism.channel_a.meta.get("kind") == "block_depolarizing"
            and mechanism.channel_b.meta.get("kind") == "block_depolarizing")


def _evaluate_row(config, s, scale):
    start = time.perf_counter()
    report = analyzer.epsilon_star(config.mechanism, s,
                                   config.povm_search,
                                   optimizer_config=config.optimizer)
    wall_ms = (time.perf_counter() - start) * 1000.0
    tau = analyzer.tau_for_entropy(s) if _is_block_mechanism(
        config.mechanism) else None
    return SweepRow(
        s=s, tau=tau,
        epsilon_upper=report.epsilon_upper / scale,
        epsilon_numeric=report.epsilon_numeric / scale,
        j_max=report.j_max, j_min_bound=report.j_min_bound,
        regime_max=report.regime_max.tag, regime_min=report.regime_min.tag,
        wall_time_ms=wall_ms,
        converged=bool(report.metadata.get("min_converged", True)))


def _row_json(row):
    def num(v):
        return "inf" if np.isinf(v) else float(v)

    return {
        "s": row.s,
        "tau": row.tau,
        "epsilon_upper": num(row.epsilon_upper),
        "epsilon_numeric": num(row.epsilon_numeric),
        "j_max": row.j_max,
        "j_min_bound": row.j_min_bound,
        "regime_max": row.regime_max,
        "regime_min": row.regime_min,
        "wall_time_ms": row.wall_time_ms,
        "converged": row.converged,
    }


def cmd_sweep(args):
    config = load_run_config(args.config, seed_override=args.seed,
                             out_override=args.out)
    scale = _LOG2 if args.log_base == "2" else 1.0
    rows = [_evaluate_row(config, s, scale) for s in config.s_grid]

    import os
    os.makedirs(config.out_dir, exist_ok=True)
    csv_path = os.path.join(config.out_dir, "sweep.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([
                _fmt(row.s), _fmt(row.tau), _fmt(row.epsilon_upper),
                _fmt(row.epsilon_numeric), _fmt(row.j_max),
                _fmt(row.j_min_bound), row.regime_max, row.regime_min,
                _fmt(row.wall_time_ms)])
    summary = {
        "library_version": __version__,
        "log_base": args.log_base,
        "config": config.raw,
        "seed": config.seed,
        "rows": [_row_json(r) for r in rows],
        "non_converged_rows": [i for i, r in enumerate(rows)
                               if not r.converged],
    }
    summary_path = os.path.join(config.out_dir, "sweep_summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(csv_path)
    print(summary_path)
    return 0


def _read_sweep_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("CSV is empty") from None
        if header != CSV_HEADER:
            raise ValueError(
                f"unexpected CSV header {header!r}; expected {CSV_HEADER!r}")
        rows = []
        for line, rec in enumerate(reader, start=2):
            if len(rec) != len(CSV_HEADER):
                raise ValueError(f"line {line}: expected "
                                 f"{len(CSV_HEADER)} columns, got {len(rec)}")

            def num(cell):
                if cell == "inf":
                    return np.inf
                return float(cell)

            rows.append({"s": num(rec[0]),
                         "epsilon_upper": num(rec[2]),
                         "epsilon_numeric": num(rec[3])})
    if not rows:
        raise ValueError("CSV has a header but no data rows")
    return rows


def cmd_plot(args):
    rows = _read_sweep_csv(args.csv)
    import os

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    # Keep legend/axis text as literal <text> nodes so the SVG stays
    # small and grep-able.
    plt.rcParams["svg.fonttype"] = "none"

    s = np.array([r["s"] for r in rows])
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for key, marker, style in (("epsilon_upper", "o", "-"),
                               ("epsilon_numeric", "s", "--")):
        y = np.array([r[key] for r in rows])
        finite = np.isfinite(y)
        omitted = int((~finite).sum())
        label = key if omitted == 0 else \
            f"{key} ({omitted} infinite point{'s' if omitted != 1 else ''} omitted)"
        linestyle = style if finite.sum() > 1 else "None"
        ax.plot(s[finite], y[finite], marker=marker, linestyle=linestyle,
                label=label, markersize=4)
    ax.axvline(_LOG2, color="gray", linestyle=":",
               label="threshold s = log 2")
    ax.set_xlabel("entanglement entropy s (nats)")
    ax.set_ylabel("leakage epsilon (nats)")
    ax.set_title("optimal leakage vs entanglement floor")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.splitext(os.path.basename(args.csv))[0]
    svg_path = os.path.join(out_dir, base + ".svg")
    fig.savefig(svg_path, format="svg")
    plt.close(fig)
    print(svg_path)
    return 0


def cmd_report(args):
    config = load_run_config(args.config, seed_override=args.seed,
                             out_override=args.out)
    s = config.s_grid[0] if args.s is None else float(args.s)
    report = analyzer.epsilon_star(config.mechanism, s, config.povm_search,
                                   optimizer_config=config.optimizer)
    doc = report.to_json_dict()
    doc["log_base"] = args.log_base
    if args.log_base == "2":
        for key in ("epsilon_upper", "epsilon_numeric"):
            if doc[key] != "inf":
                doc[key] = doc[key] / _LOG2
    print(json.dumps(doc, indent=2))
    return 0


def cmd_selftest(args):
    results = selftest.run(args.level)
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        if not res.passed:
            failures += 1
        print(f"{status} {res.name}: {res.detail}")
    print(f"{len(results) - failures}/{len(results)} criteria passed "
          f"(level={args.level})")
    return 0 if failures == 0 else 1


def _build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="path to run configuration JSON")
    shared.add_argument("--seed", type=int, default=None,
                        help="override every seed in the configuration")
    shared.add_argument("--log-base", choices=["e", "2"], default="e",
                        help="display base for epsilon values")
    shared.add_argument("--out", default=None,
                        help="output directory (overrides config out_dir)")
    parser = argparse.ArgumentParser(
        prog="entqldp",
        description="entanglement-constrained quantum LDP leakage analysis")
    parser.add_argument("--version", action="version",
                        version=f"entqldp {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)
    p_sweep = sub.add_parser("sweep", parents=[shared],
                             help="evaluate epsilon*(s) over an entropy grid")
    p_sweep.set_defaults(func=cmd_sweep, needs_config=True)
    p_plot = sub.add_parser("plot", parents=[shared],
                            help="render a sweep CSV to SVG")
    p_plot.add_argument("csv", help="sweep CSV path")
    p_plot.set_defaults(func=cmd_plot, needs_config=False)
    p_report = sub.add_parser("report", parents=[shared],
                              help="print a single-s PrivacyReport as JSON")
    p_report.add_argument("--s", type=float, default=None,
                          help="entropy level (default: first grid point)")
    p_report.set_defaults(func=cmd_report, needs_config=True)
    p_self = sub.add_parser("selftest", parents=[shared],
                            help="run the built-in correctness criteria")
    p_self.add_argument("--level", choices=["quick", "full"],
                        default="quick")
    p_self.set_defaults(func=cmd_selftest, needs_config=False)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.needs_config and not args.config:
        print(f"error: {args.verb} requires --config", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
