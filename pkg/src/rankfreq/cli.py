"""Command-line front end.

Exit codes: 0 success, 1 input/config error, 2 insufficient data.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import golomb
from .core import FrequencyTable, Schema, filter_min_count, load_counts, load_tokens, pool, rank
from .errors import EmptyResultError, InsufficientDataError, RankFreqError
from .fit import compare, pearson
from .infometrics import empirical_entropy, perplexity, pointwise_compare, trajectory
from .mixlab import MixtureExperimentSpec, cumulative_aggregate, run_mixture_experiment
from .models import GeometricModel, load_model_spec

SUBCOMMANDS = ("fit", "compare", "entropy", "simulate", "aggregate", "trajectory", "plotdata", "code")


class ConfigError(RankFreqError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    schema: str | None = None
    tokens_input: bool = False
    min_count: int = 1
    mode: str = "regression"
    transform: str = "transformed"
    seed: int | None = None
    format: str = "json"
    output: str | None = None
    # simulate
    spec_path: str | None = None
    k: int | None = None
    q_range: str | None = None
    n_tokens: str | None = None
    label_sharing: str | None = None
    law: str | None = None
    # trajectory
    population: str | None = None
    # plotdata
    with_model: str | None = None
    # code
    q: float | None = None
    m: int | None = None
    model_path: str | None = None


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--input", "-i", dest="inputs", action="append", default=[],
                        help="input file; repeat for ordered steps ('-' is stdin)")
    shared.add_argument("--schema", help="column mapping, e.g. type=name,count=n,group=state+decade")
    shared.add_argument("--token-stream", dest="tokens_input", action="store_true",
                        help="input is a context/type token stream, one table per context")
    shared.add_argument("--min-count", type=int, default=1)
    shared.add_argument("--mode", choices=("regression", "mle", "both"))
    shared.add_argument("--transform", choices=("transformed", "raw"), default="transformed")
    shared.add_argument("--seed", type=int)
    shared.add_argument("--format", choices=("json", "tsv"))
    shared.add_argument("--output", "-o")

    parser = argparse.ArgumentParser(prog="rankfreq", description="Rank-frequency fitting and mixture experiments.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("fit", parents=[shared], help="both families, both modes, plus entropy")
    sub.add_parser("compare", parents=[shared], help="geometric vs zipf in one mode")
    sub.add_parser("entropy", parents=[shared], help="entropy and perplexity per group")

    p = sub.add_parser("simulate", parents=[shared], help="mixture emergence experiment")
    p.add_argument("--spec", dest="spec_path", help="JSON experiment spec")
    p.add_argument("--k", type=int)
    p.add_argument("--q-range", help="LO:HI")
    p.add_argument("--tokens", "--n-tokens", dest="n_tokens", help="tokens per component, or comma list")
    p.add_argument("--label-sharing", choices=("disjoint", "shared"))
    p.add_argument("--law", choices=("log-uniform", "uniform"))

    sub.add_parser("aggregate", parents=[shared], help="per-step vs cumulative fits")
    p = sub.add_parser("trajectory", parents=[shared], help="cumulative entropy/perplexity per step")
    p.add_argument("--population", help="comma-separated population per step, or @file")
    p = sub.add_parser("plotdata", parents=[shared], help="plot-ready rank/frequency series")
    p.add_argument("--with-model", choices=("geometric", "zipf"))
    p = sub.add_parser("code", parents=[shared], help="Golomb code statistics")
    p.add_argument("--q", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--model", dest="model_path", help="JSON model spec")
    return parser


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    defaults = {"trajectory": "tsv", "plotdata": "tsv"}
    if ns.get("format") is None:
        ns["format"] = defaults.get(ns["subcommand"], "json")
    if ns.get("mode") is None:
        ns["mode"] = "both" if ns["subcommand"] == "fit" else "regression"
    return RunConfig(**ns)


# ---------------------------------------------------------------- io helpers


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return repr(int(x)) if x.is_integer() and abs(x) < 2**53 else repr(x)
    return "" if x is None else str(x)


def _tsv(rows) -> str:
    return "".join("\t".join(_fmt(v) for v in row) + "\n" for row in rows)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e


def _tables(cfg: RunConfig, path: str) -> list[FrequencyTable]:
    text = io.StringIO(_read(path))
    tables = load_tokens(text) if cfg.tokens_input else load_counts(text, Schema.parse(cfg.schema))
    if cfg.min_count > 1:
        tables = [filter_min_count(t, cfg.min_count) for t in tables]
    return tables


def _all_tables(cfg: RunConfig) -> list[FrequencyTable]:
    if not cfg.inputs:
        raise ConfigError("--input is required")
    return [t for path in cfg.inputs for t in _tables(cfg, path)]


def _steps(cfg: RunConfig) -> list[FrequencyTable]:
    """One table per input file (groups pooled), or per group when a single file is given."""
    if not cfg.inputs:
        raise ConfigError("--input is required")
    if len(cfg.inputs) == 1:
        return _tables(cfg, cfg.inputs[0])
    return [pool(_tables(cfg, path)) for path in cfg.inputs]


def _group(table: FrequencyTable):
    return table.group.as_dict() if table.group else None


def _group_str(table: FrequencyTable) -> str:
    return str(table.group) if table.group else ""


# ---------------------------------------------------------------- subcommands


def cmd_fit(cfg: RunConfig) -> str:
    modes = ("regression", "mle") if cfg.mode == "both" else (cfg.mode,)
    results = []
    tables = _all_tables(cfg)
    for table in tables:
        dist = rank(table)
        entry = {
            "group": _group(table),
            "n_types": dist.N,
            "n_tokens": dist.total_tokens,
            "entropy_bits": empirical_entropy(dist),
            "perplexity": perplexity(dist),
        }
        for mode in modes:
            entry[mode] = compare(dist, mode, cfg.transform).to_dict()
        results.append(entry)
    if cfg.format == "json":
        return _json({"groups": results})
    rows = [("group", "mode", "preferred", "n_types", "n_tokens", "geometric_q", "geometric_r2",
             "zipf_s", "zipf_r2", "entropy_bits", "perplexity")]
    for table, entry in zip(tables, results):
        for mode in modes:
            rep = entry[mode]
            rows.append((_group_str(table), mode, rep["preferred"], entry["n_types"], entry["n_tokens"],
                         rep["geometric"]["params"]["q"], rep["geometric"]["r2"],
                         rep["zipf"]["params"]["s"], rep["zipf"]["r2"],
                         entry["entropy_bits"], entry["perplexity"]))
    return _tsv(rows)


def cmd_compare(cfg: RunConfig) -> str:
    if cfg.mode == "both":
        raise ConfigError("compare takes a single --mode")
    return cmd_fit(cfg)


def cmd_entropy(cfg: RunConfig) -> str:
    rows = []
    for table in _all_tables(cfg):
        dist = rank(table)
        rows.append({"group": _group(table), "n_types": dist.N, "n_tokens": dist.total_tokens,
                     "entropy_bits": empirical_entropy(dist), "perplexity": perplexity(dist)})
    if cfg.format == "json":
        return _json({"groups": rows})
    return _tsv([("group", "n_types", "n_tokens", "entropy_bits", "perplexity")] + [
        (",".join(f"{k}={v}" for k, v in (r["group"] or {}).items()), r["n_types"], r["n_tokens"],
         r["entropy_bits"], r["perplexity"]) for r in rows])


def _experiment_spec(cfg: RunConfig) -> MixtureExperimentSpec:
    d: dict = {}
    if cfg.spec_path:
        try:
            d = json.loads(_read(cfg.spec_path))
        except json.JSONDecodeError as e:
            raise ConfigError(f"bad spec file: {e}") from e
    if cfg.k is not None:
        d["k"] = cfg.k
    if cfg.q_range:
        try:
            lo, hi = (float(x) for x in cfg.q_range.split(":"))
        except ValueError as e:
            raise ConfigError(f"--q-range must be LO:HI, got {cfg.q_range!r}") from e
        d["q_lo"], d["q_hi"] = lo, hi
    if cfg.n_tokens:
        try:
            parts = [int(x) for x in cfg.n_tokens.split(",")]
        except ValueError as e:
            raise ConfigError(f"bad --tokens {cfg.n_tokens!r}") from e
        d["tokens"] = parts[0] if len(parts) == 1 else parts
    if cfg.label_sharing:
        d["label_sharing"] = cfg.label_sharing
    if cfg.law:
        d["law"] = cfg.law
    if cfg.seed is not None:
        d["seed"] = cfg.seed
    if cfg.mode in ("regression", "mle"):
        d.setdefault("mode", cfg.mode)
    if d.get("seed") is None:
        raise ConfigError("simulate needs an explicit --seed (or a seed in the spec file)")
    if "k" not in d:
        raise ConfigError("simulate needs --k (or k in the spec file)")
    try:
        return MixtureExperimentSpec.from_dict(d)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid experiment spec: {e}") from e


def cmd_simulate(cfg: RunConfig) -> str:
    report = run_mixture_experiment(_experiment_spec(cfg))
    if cfg.format == "json":
        return _json(report.to_dict())
    return _tsv(report.tsv_rows())


def cmd_aggregate(cfg: RunConfig) -> str:
    mode = "regression" if cfg.mode == "both" else cfg.mode
    steps = cumulative_aggregate(_steps(cfg), mode)
    if cfg.format == "json":
        return _json({"steps": [{"step": s.step, "step_report": s.step_report.to_dict(),
                                 "cumulative_report": s.cumulative_report.to_dict()} for s in steps]})
    rows = [("step", "step_geometric_r2", "step_zipf_r2", "cumulative_geometric_r2",
             "cumulative_zipf_r2", "cumulative_preferred")]
    for s in steps:
        rows.append((s.step, s.step_report.geometric.r2, s.step_report.zipf.r2,
                     s.cumulative_report.geometric.r2, s.cumulative_report.zipf.r2,
                     s.cumulative_report.preferred))
    return _tsv(rows)


def _population(cfg: RunConfig, n: int) -> list[float] | None:
    if not cfg.population:
        return None
    text = _read(cfg.population[1:]) if cfg.population.startswith("@") else cfg.population
    try:
        values = [float(x) for x in text.replace("\n", ",").split(",") if x.strip()]
    except ValueError as e:
        raise ConfigError(f"bad population series: {e}") from e
    if len(values) != n:
        raise ConfigError(f"population series has {len(values)} values for {n} steps")
    return values


def cmd_trajectory(cfg: RunConfig) -> str:
    tables = _steps(cfg)
    sizes = _population(cfg, len(tables))
    mode = "regression" if cfg.mode == "both" else cfg.mode
    points = trajectory(tables, sizes, mode)
    corr = None
    if sizes is not None and len(points) >= 3:
        try:
            corr = pearson([p.population for p in points], [p.perplexity for p in points])
        except RankFreqError:
            corr = None
    if cfg.format == "json":
        return _json({
            "points": [{"step": p.step, "population": p.population, "entropy_bits": p.entropy_bits,
                        "perplexity": p.perplexity, "step_entropy_bits": p.step_entropy_bits,
                        "step_perplexity": p.step_perplexity,
                        "report": p.report.to_dict() if p.report else None} for p in points],
            "pearson_population_perplexity": corr,
        })
    rows = [("step", "population", "entropy_bits", "perplexity", "geometric_r2", "zipf_r2")]
    for p in points:
        rows.append((p.step, p.population, p.entropy_bits, p.perplexity,
                     p.report.geometric.r2 if p.report else None, p.report.zipf.r2 if p.report else None))
    out = _tsv(rows)
    if sizes is not None:
        out += _tsv([("#pearson_population_perplexity", corr)])
    return out


def cmd_plotdata(cfg: RunConfig) -> str:
    tables = _all_tables(cfg)
    multi = len(tables) > 1
    header = ["rank", "count", "prob", "log2_count", "log2_rank"]
    if cfg.with_model:
        header.append("model_prob")
    rows = [(["group"] if multi else []) + header]
    mode = "regression" if cfg.mode == "both" else cfg.mode
    for table in tables:
        dist = rank(table)
        model_probs = None
        if cfg.with_model:
            fitted = getattr(compare(dist, mode, cfg.transform), cfg.with_model)
            model_probs = pointwise_compare(dist, fitted.model(dist.N)).model
        for i, (c, p) in enumerate(zip(dist.counts.tolist(), dist.probs.tolist())):
            r = i + 1
            row = [r, c, p, math.log2(c), math.log2(r)]
            if model_probs is not None:
                row.append(float(model_probs[i]))
            rows.append(([_group_str(table)] if multi else []) + row)
    return _tsv(rows)


def cmd_code(cfg: RunConfig) -> str:
    if cfg.model_path:
        model, _ = load_model_spec(_read(cfg.model_path))
    elif cfg.q is not None:
        if not 0.0 < cfg.q < 1.0:
            raise ConfigError(f"--q must lie in (0, 1), got {cfg.q}")
        model = GeometricModel(cfg.q)
    else:
        raise ConfigError("code needs --q or --model")
    q = model.q if isinstance(model, GeometricModel) else None
    if cfg.m is not None:
        m = cfg.m
    elif q is not None:
        m = golomb.optimal_m(q)
    else:
        m = golomb.best_m(model)
    stats = golomb.code_stats(model, golomb.GolombCode(m))
    out = {"q": q, "m": stats.m, "entropy_bits": stats.entropy,
           "expected_length_bits": stats.expected_length, "efficiency": stats.efficiency}
    if cfg.format == "json":
        return _json(out)
    return _tsv([tuple(out), tuple(out.values())])


COMMANDS = {
    "fit": cmd_fit,
    "compare": cmd_compare,
    "entropy": cmd_entropy,
    "simulate": cmd_simulate,
    "aggregate": cmd_aggregate,
    "trajectory": cmd_trajectory,
    "plotdata": cmd_plotdata,
    "code": cmd_code,
}


def run(cfg: RunConfig) -> int:
    try:
        text = COMMANDS[cfg.subcommand](cfg)
    except (InsufficientDataError, EmptyResultError) as e:
        print(f"rankfreq {cfg.subcommand}: insufficient data: {e}", file=sys.stderr)
        return 2
    except (RankFreqError, ValueError) as e:
        print(f"rankfreq {cfg.subcommand}: error: {e}", file=sys.stderr)
        return 1
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    return run(parse_config(argv))


if __name__ == "__main__":
    sys.exit(main())
