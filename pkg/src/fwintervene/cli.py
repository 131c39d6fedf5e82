"""Command-line interface.

Every subcommand reads its settings from built-in defaults, then an optional
JSON config file (``--config``), then command-line flags, in increasing
priority. The fully resolved settings are written to ``summary.json`` next
to the outputs so a run can be repeated from that file alone.

Exit status: 0 success, 2 usage or config error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__, kernels
from ._io import atomic_write_csv, atomic_write_json
from .baselines import BASELINES
from .bench import kernel_benchmark, loglog_slope, scaling_sweep
from .centrality import static_scores, timevarying_scores
from .epidemic import EpidemicParams, MetapopParams, simulate_graph, simulate_metapop
from .errors import DataError, InterventionError, NumericalError
from .graph import (
    GraphSequence,
    bipartite_to_square,
    load_bipartite,
    load_edge_list,
    load_sequence,
    save_edge_list,
    write_node_map,
)
from .optimizer import (
    BudgetSpec,
    LineSearchGrid,
    SvdOptions,
    frank_wolfe_static,
    frank_wolfe_timevarying,
    largest_singular_value,
)
from .svd import LinearOperator, truncated_svd

log = logging.getLogger("fwintervene")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

DEFAULTS = {
    "input": {
        "graph": None,
        "sequence": None,
        "bipartite": None,
        "format": "whitespace",
        "transform": "identity",
        "directed": None,
    },
    "budget": {"fraction": 0.05, "absolute": None},
    "rank": 1,
    "rank_sweep": None,
    "iterations": 30,
    "grid": {"min": 1e-3, "max": 1e-1, "count": 30},
    "svd": {"tol": 1e-9, "line_search_tol": 1e-6},
    "epidemic": {
        "model": "SEIR",
        "beta": 0.05,
        "p0": 0.01,
        "delta_e": 4.0,
        "delta_i": 5.0,
        "epochs": 50,
        "replicas": 50,
    },
    "metapop": {"psi": None, "poi_areas": None, "poi_dwell": None, "populations": None},
    "bench": {"edges": [10_000, 100_000, 1_000_000], "rank": 10, "nodes_per_edge": 0.1,
              "iterations": 2, "grid_count": 30, "kernels": False},
    "seed": 0,
    "threads": 1,
    "output": "out",
}


class ConfigError(InterventionError):
    """Invalid or unknown configuration keys (exit status 2)."""


def _merge(base, override, path=""):
    for key, value in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where!r} must be an object")
            _merge(base[key], value, where + ".")
        else:
            base[key] = value
    return base


def _check_types(cfg, ref, path=""):
    for key, default in ref.items():
        value, where = cfg[key], f"{path}{key}"
        if isinstance(default, dict):
            _check_types(value, default, where + ".")
            continue
        if value is None or default is None:
            ok = not isinstance(value, dict)
        elif isinstance(default, bool):
            ok = isinstance(value, bool)
        elif isinstance(default, int):
            ok = isinstance(value, int) and not isinstance(value, bool)
        elif isinstance(default, float):
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        else:
            ok = isinstance(value, type(default))
        if not ok:
            raise ConfigError(f"config key {where!r} has the wrong type ({type(value).__name__})")


def load_config(path) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if path is None:
        return cfg
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    if set(data) >= {"config", "versions"}:
        # a previous run's summary.json: rerun with its resolved settings
        data = data["config"]
    if isinstance(data.get("budget"), dict):
        # the two budget forms are exclusive: a configured one replaces the default
        cfg["budget"] = {"fraction": None, "absolute": None}
    return _merge(cfg, data)


def parse_rank_sweep(text):
    try:
        a, b = (int(x) for x in text.split(".."))
    except ValueError:
        raise ConfigError(f"--rank-sweep expects 'a..b', got {text!r}") from None
    if not 1 <= a <= b:
        raise ConfigError(f"--rank-sweep needs 1 <= a <= b, got {text!r}")
    return [a, b]


def _parse_grid(text):
    try:
        lo, hi, count = text.split(",")
        return {"min": float(lo), "max": float(hi), "count": int(count)}
    except ValueError:
        raise ConfigError(f"--grid expects 'min,max,count', got {text!r}") from None


def _parse_ints(text):
    try:
        return [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from None


# flag name -> (config path, converter)
_FLAG_MAP = {
    "graph": ("input.graph", str),
    "sequence": ("input.sequence", str),
    "bipartite": ("input.bipartite", str),
    "format": ("input.format", str),
    "transform": ("input.transform", str),
    "rank": ("rank", int),
    "rank_sweep": ("rank_sweep", parse_rank_sweep),
    "iters": ("iterations", int),
    "grid": ("grid", _parse_grid),
    "tol": ("svd.tol", float),
    "seed": ("seed", int),
    "threads": ("threads", int),
    "out": ("output", str),
    "model": ("epidemic.model", str),
    "beta": ("epidemic.beta", float),
    "p0": ("epidemic.p0", float),
    "epochs": ("epidemic.epochs", int),
    "replicas": ("epidemic.replicas", int),
    "delta_e": ("epidemic.delta_e", float),
    "delta_i": ("epidemic.delta_i", float),
    "edges": ("bench.edges", _parse_ints),
    "bench_iters": ("bench.iterations", int),
    "grid_count": ("bench.grid_count", int),
    "kernels": ("bench.kernels", bool),
    "bench_rank": ("bench.rank", int),
}


def _set(cfg, dotted, value):
    node = cfg
    keys = dotted.split(".")
    for k in keys[:-1]:
        node = node[k]
    node[keys[-1]] = value


def resolve_config(args) -> dict:
    cfg = load_config(getattr(args, "config", None))
    for flag, (dotted, conv) in _FLAG_MAP.items():
        value = getattr(args, flag, None)
        if value is not None:
            _set(cfg, dotted, conv(value) if isinstance(value, str) else value)
    if getattr(args, "undirected", False):
        cfg["input"]["directed"] = False
    if getattr(args, "budget_frac", None) is not None:
        cfg["budget"] = {"fraction": float(args.budget_frac), "absolute": None}
    if getattr(args, "budget_abs", None) is not None:
        cfg["budget"] = {"fraction": None, "absolute": float(args.budget_abs)}
    _check_types(cfg, DEFAULTS)
    if isinstance(cfg["rank_sweep"], str):
        cfg["rank_sweep"] = parse_rank_sweep(cfg["rank_sweep"])
    if cfg["threads"] == 0:
        cfg["threads"] = os.cpu_count() or 1
    if cfg["threads"] < 0:
        raise ConfigError("threads must be >= 0")
    return cfg


def _budget(cfg) -> BudgetSpec:
    b = cfg["budget"]
    if (b.get("absolute") is None) == (b.get("fraction") is None):
        raise ConfigError("budget needs exactly one of 'fraction' and 'absolute'")
    if b.get("absolute") is not None:
        return BudgetSpec.of_amount(b["absolute"])
    return BudgetSpec.of_fraction(b["fraction"])


def _grid(cfg) -> LineSearchGrid:
    g = cfg["grid"]
    return LineSearchGrid.log_spaced(g["min"], g["max"], int(g["count"]))


def _svd_opts(cfg) -> SvdOptions:
    return SvdOptions(tol=cfg["svd"]["tol"], line_search_tol=cfg["svd"]["line_search_tol"],
                      seed=cfg["seed"], threads=cfg["threads"])


def _epidemic(cfg, replicas=None) -> EpidemicParams:
    e = dict(cfg["epidemic"])
    if replicas is not None:
        e["replicas"] = replicas
    return EpidemicParams(seed=cfg["seed"], **e)


def _versions() -> dict:
    return {
        "fwintervene": __version__,
        "kernel_backend": kernels.BACKEND,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _summary(cfg, **extra) -> dict:
    return {"config": cfg, "versions": _versions(), **extra}


def _load_input(cfg):
    """The configured graph or sequence (exactly one must be given)."""
    inp = cfg["input"]
    given = [k for k in ("graph", "sequence") if inp.get(k)]
    if len(given) != 1:
        raise ConfigError("give exactly one of --graph and --sequence")
    if inp["graph"]:
        return load_edge_list(inp["graph"], inp["format"], inp["transform"], inp["directed"])
    return load_sequence(inp["sequence"], inp["format"], inp["transform"], inp["directed"])


def _out_dir(cfg) -> Path:
    out = Path(cfg["output"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_node_maps(obj, out: Path):
    first = obj[0] if isinstance(obj, GraphSequence) else obj
    if first.node_ids is not None:
        write_node_map(first, out / "node_map.csv")


# subcommands -------------------------------------------------------------


def cmd_convert(args) -> int:
    cfg = resolve_config(args)
    inp = cfg["input"]
    if not args.output_file:
        raise ConfigError("convert needs an output path (-o)")
    if inp["bipartite"]:
        b, left_ids, _ = load_bipartite(inp["bipartite"], inp["format"], inp["transform"])
        g = bipartite_to_square(b)
        if left_ids is not None:
            from .graph import WeightedGraph

            g = WeightedGraph.from_edges(g.node_count, g.src, g.dst, g.weights, False, left_ids)
    elif inp["graph"]:
        g = load_edge_list(inp["graph"], inp["format"], inp["transform"], inp["directed"])
    else:
        raise ConfigError("convert needs --graph or --bipartite")
    out = Path(args.output_file)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_edge_list(g, out)
    if g.node_ids is not None:
        write_node_map(g, out.with_suffix(".nodes.csv"))
    print(f"wrote {out} (n={g.node_count}, m={g.edge_count})")
    return EXIT_OK


def _fmt(x: float) -> str:
    # trims solver round-off (2.9999999999999996) without hiding real digits
    return repr(float(f"{x:.15g}"))


def cmd_svd(args) -> int:
    cfg = resolve_config(args)
    obj = _load_input(cfg)
    op = LinearOperator.from_sequence(obj) if isinstance(obj, GraphSequence) else LinearOperator.from_graph(obj)
    f = truncated_svd(op, cfg["rank"], tol=cfg["svd"]["tol"], seed=cfg["seed"])
    for lam in f.singular_values:
        print(_fmt(lam))
    if args.out:
        out = _out_dir(cfg)
        atomic_write_csv(out / "singular_values.csv", ["k", "lambda"],
                         ((k + 1, repr(float(v))) for k, v in enumerate(f.singular_values)))
        np.save(out / "left_vectors.npy", f.left_vectors)
        np.save(out / "right_vectors.npy", f.right_vectors)
        atomic_write_json(out / "summary.json", _summary(
            cfg, singular_values=f.singular_values.tolist(), gap=f.gap, residual=f.residual))
    return EXIT_OK


def cmd_scores(args) -> int:
    cfg = resolve_config(args)
    obj = _load_input(cfg)
    kw = dict(tol=cfg["svd"]["tol"], seed=cfg["seed"])
    if isinstance(obj, GraphSequence):
        sc = timevarying_scores(obj, cfg["rank"], **kw)
    else:
        sc = static_scores(obj, cfg["rank"], **kw)
    sc = sc.sorted()
    out = _out_dir(cfg)
    atomic_write_csv(out / "scores.csv", ["t", "src", "dst", "score"],
                     ((t, i, j, repr(s)) for t, i, j, s in sc.rows()))
    _write_node_maps(obj, out)
    atomic_write_json(out / "summary.json", _summary(
        cfg, edges=len(sc), singular_values=sc.factors.singular_values.tolist(),
        degenerate=bool(sc.degenerate)))
    print(f"wrote {out / 'scores.csv'} ({len(sc)} edges)")
    return EXIT_OK


def _write_intervention(res, obj, cfg, out: Path, lambda_before: float):
    out.mkdir(parents=True, exist_ok=True)
    reduced = res.reduced
    if isinstance(reduced, GraphSequence):
        for t, g in enumerate(reduced):
            save_edge_list(g, out / f"reduced_{t}.txt")
    else:
        save_edge_list(reduced, out / "reduced.txt")
    t_, s_, d_, a_ = res.reductions
    atomic_write_csv(out / "reductions.csv", ["t", "src", "dst", "amount"],
                     ((int(t), int(i), int(j), repr(float(a))) for t, i, j, a in zip(t_, s_, d_, a_)))
    rows = []
    for k, f in enumerate(res.objective_trace):
        label = "final" if k == len(res.objective_trace) - 1 else k
        step = res.step_sizes[k - 1] if 1 <= k <= len(res.step_sizes) else 0.0
        used = res.budget_trace[k] if k < len(res.budget_trace) else res.budget_used
        rows.append((label, repr(float(f)), repr(float(step)), repr(float(used))))
    atomic_write_csv(out / "trace.csv", ["iter", "objective", "step_size", "budget_used"], rows)
    _write_node_maps(obj, out)
    lam_after = res.lambda1
    atomic_write_json(out / "summary.json", _summary(
        cfg,
        rank=res.rank,
        budget=res.budget,
        budget_used=res.budget_used,
        iterations_run=res.iterations_run,
        mop_up=res.mop_up,
        objective_before=res.objective_trace[0],
        objective_after=res.objective,
        lambda1_before=lambda_before,
        lambda1_after=lam_after,
    ))
    return lam_after


def cmd_intervene(args) -> int:
    cfg = resolve_config(args)
    obj = _load_input(cfg)
    budget, grid, opts = _budget(cfg), _grid(cfg), _svd_opts(cfg)
    run = frank_wolfe_timevarying if isinstance(obj, GraphSequence) else frank_wolfe_static
    ranks = range(cfg["rank_sweep"][0], cfg["rank_sweep"][1] + 1) if cfg["rank_sweep"] else [cfg["rank"]]
    out = _out_dir(cfg)
    lam_before = largest_singular_value(obj, tol=opts.tol, seed=opts.seed)
    sweep = []
    for r in ranks:
        log.info("rank %d: running %d iterations", r, cfg["iterations"])
        res = run(obj, budget, r, cfg["iterations"], grid, opts)
        target = out / f"rank_{r}" if cfg["rank_sweep"] else out
        rcfg = dict(cfg, rank=r)
        lam = _write_intervention(res, obj, rcfg, target, lam_before)
        sweep.append((r, repr(lam), repr(res.objective), repr(res.budget_used), res.iterations_run))
        print(f"rank {r}: lambda1 {lam_before:.6g} -> {lam:.6g}, budget used {res.budget_used:.6g}")
    if cfg["rank_sweep"]:
        atomic_write_csv(out / "rank_sweep.csv",
                         ["rank", "lambda1_after", "objective_after", "budget_used", "iterations_run"], sweep)
    return EXIT_OK


def _metapop_params(cfg, b):
    m = cfg["metapop"]
    missing = [k for k, v in m.items() if v is None]
    if missing:
        raise ConfigError(f"metapopulation model needs config keys {['metapop.' + k for k in missing]}")
    return MetapopParams(psi=m["psi"], poi_areas=m["poi_areas"], poi_dwell=m["poi_dwell"],
                         populations=m["populations"], epidemic=_epidemic(cfg))


def cmd_simulate(args) -> int:
    cfg = resolve_config(args)
    params = _epidemic(cfg)
    out = _out_dir(cfg)
    runs = {}
    if params.model == "METAPOP_SEIR":
        if not cfg["input"]["bipartite"]:
            raise ConfigError("METAPOP_SEIR needs --bipartite")
        b, _, _ = load_bipartite(cfg["input"]["bipartite"], cfg["input"]["format"], cfg["input"]["transform"])
        runs[""] = simulate_metapop(b, _metapop_params(cfg, b), threads=cfg["threads"])
    elif args.before or args.after:
        if not (args.before and args.after):
            raise ConfigError("--before and --after must be given together")
        fmt, tr, dr = cfg["input"]["format"], cfg["input"]["transform"], cfg["input"]["directed"]
        for label, path in (("before", args.before), ("after", args.after)):
            runs[label] = simulate_graph(load_edge_list(path, fmt, tr, dr), params, cfg["threads"])
    else:
        g = _load_input(cfg)
        if isinstance(g, GraphSequence):
            raise ConfigError("simulate takes a single graph")
        runs[""] = simulate_graph(g, params, cfg["threads"])
    summaries = {}
    for label, trace in runs.items():
        name = f"trace_{label}.csv" if label else "trace.csv"
        atomic_write_csv(out / name, ["replica", "epoch", "S", "E", "I", "R"], trace.rows())
        summaries[label or "result"] = trace.summary()
        print(f"{label or 'result'}: total infected {trace.mean_total_infected():.2f} "
              f"+- {trace.std_total_infected():.2f} over {trace.replicas} replicas")
    atomic_write_json(out / "summary.json", _summary(cfg, **summaries))
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = resolve_config(args)
    obj = _load_input(cfg)
    budget, grid, opts = _budget(cfg), _grid(cfg), _svd_opts(cfg)
    r = cfg["rank"]
    results = {name: fn(obj, budget, r, opts) for name, fn in BASELINES.items()}
    run = frank_wolfe_timevarying if isinstance(obj, GraphSequence) else frank_wolfe_static
    results["frank_wolfe"] = run(obj, budget, r, cfg["iterations"], grid, opts)
    header = ["strategy", "lambda1_after", "objective_after", "budget_used"]
    simulate = args.simulate and not isinstance(obj, GraphSequence)
    if simulate:
        header += ["mean_infected", "std_infected"]
    rows, summary = [], {}
    for name, res in results.items():
        row = [name, repr(res.lambda1), repr(float(res.objective)), repr(res.budget_used)]
        info = {"lambda1_after": res.lambda1, "objective_after": res.objective, "budget_used": res.budget_used}
        if simulate:
            tr = simulate_graph(res.reduced, _epidemic(cfg), cfg["threads"])
            row += [repr(tr.mean_total_infected()), repr(tr.std_total_infected())]
            info.update(tr.summary())
        rows.append(row)
        summary[name] = info
    out = _out_dir(cfg)
    atomic_write_csv(out / "comparison.csv", header, rows)
    atomic_write_json(out / "summary.json", _summary(
        cfg, budget=results["frank_wolfe"].budget, strategies=summary))
    for row in rows:
        print(",".join(str(x) for x in row[:4]))
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = resolve_config(args)
    b = cfg["bench"]
    out = _out_dir(cfg)
    rows = scaling_sweep(b["edges"], r=b["rank"], nodes_per_edge=b["nodes_per_edge"],
                         iterations=b["iterations"], grid_count=b["grid_count"], seed=cfg["seed"],
                         log=print)
    atomic_write_csv(out / "bench.csv", ["m", "n", "seconds_per_iteration"],
                     ((x["m"], x["n"], repr(x["seconds_per_iteration"])) for x in rows))
    extra = {"rows": rows}
    if len(rows) >= 2:
        extra["loglog_slope"] = loglog_slope([x["m"] for x in rows], [x["seconds_per_iteration"] for x in rows])
        print(f"log-log slope {extra['loglog_slope']:.3f}")
    if b["kernels"]:
        krows = kernel_benchmark(seed=cfg["seed"])
        atomic_write_csv(out / "kernels.csv", ["backend", "kernel", "seconds"],
                         ((k["backend"], k["kernel"], repr(k["seconds"])) for k in krows))
        extra["kernels"] = krows
    atomic_write_json(out / "summary.json", _summary(cfg, **extra))
    return EXIT_OK


# argument parsing --------------------------------------------------------


def _common(p, graph_inputs=True):
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="worker threads, 0 = all cores")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    if graph_inputs:
        p.add_argument("--graph", help="edge-list file")
        p.add_argument("--sequence", help="manifest listing one edge-list file per time step")
        p.add_argument("--format", choices=["whitespace", "csv"])
        p.add_argument("--transform", help="identity or exp_div(c)")
        p.add_argument("--undirected", action="store_true", help="input is symmetric")


def _budget_flags(p):
    p.add_argument("--budget-frac", type=float, help="budget as a fraction of total weight")
    p.add_argument("--budget-abs", type=float, help="absolute budget")
    p.add_argument("--rank", type=int)
    p.add_argument("--iters", type=int, help="Frank-Wolfe iterations")
    p.add_argument("--grid", help="line-search grid 'min,max,count' (log-spaced, 0 added)")
    p.add_argument("--tol", type=float, help="SVD tolerance")


def _epidemic_flags(p):
    p.add_argument("--model", choices=["SEIR", "SIR", "SIS", "METAPOP_SEIR"])
    p.add_argument("--beta", type=float)
    p.add_argument("--p0", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--delta-e", dest="delta_e", type=float)
    p.add_argument("--delta-i", dest="delta_i", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fwintervene", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="transform weights or square a bipartite visit network")
    _common(p)
    p.add_argument("--bipartite", help="group-location edge list to convert with B @ B.T")
    p.add_argument("-o", "--output-file", help="edge-list file to write")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("svd", help="print the top singular values")
    _common(p)
    p.add_argument("--rank", type=int)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_svd)

    p = sub.add_parser("scores", help="write generalized edge centrality scores")
    _common(p)
    p.add_argument("--rank", type=int)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_scores)

    p = sub.add_parser("intervene", help="run Frank-Wolfe under a budget")
    _common(p)
    _budget_flags(p)
    p.add_argument("--rank-sweep", help="run every rank in 'a..b'")
    p.set_defaults(func=cmd_intervene)

    p = sub.add_parser("simulate", help="simulate an epidemic on a graph")
    _common(p)
    _epidemic_flags(p)
    p.add_argument("--before", help="edge list before intervention")
    p.add_argument("--after", help="edge list after intervention")
    p.add_argument("--bipartite", help="visit network for METAPOP_SEIR")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="Frank-Wolfe against the baselines at one budget")
    _common(p)
    _budget_flags(p)
    _epidemic_flags(p)
    p.add_argument("--simulate", action="store_true", help="also simulate each result")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="per-iteration runtime over growing synthetic graphs")
    _common(p, graph_inputs=False)
    p.add_argument("--rank", dest="bench_rank", type=int, help="rank (default 10)")
    p.add_argument("--edges", help="comma-separated edge counts")
    p.add_argument("--bench-iters", type=int, help="timed iterations per size")
    p.add_argument("--grid-count", type=int, help="line-search grid size")
    p.add_argument("--kernels", action="store_true", default=None, help="also compare kernel backends")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"fwintervene: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"fwintervene: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"fwintervene: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # bad values that slipped past config validation (e.g. r > n)
        print(f"fwintervene: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"fwintervene: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
