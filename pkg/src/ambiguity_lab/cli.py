"""Command-line front end: ``ambiguity-lab {entropy,evaluate,sweep,oracle}``.

Every subcommand reads a JSON experiment config (``--config``).  CSV floats
use 9 significant digits; ``-inf`` is written ``NEG_INF`` and an undefined
boundary exponent ``BOUNDARY``.

Exit codes: 0 ok, 2 bad config, 3 split parameters violate the admissibility
conditions, 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .asymptotics import RatePair, sweep
from .errors import ParameterError, SizeError
from .guessing import ceil_rank_moment, min_guess_moment, optimal_guesser
from .oracles import BUDGET_ENV, Budget, brute_eve, brute_min_guess, brute_side_info, brute_task_encoder
from .pmf import DEFAULT_MAX_CONFIGS, JointPMF, arimoto_conditional_entropy, guessing_order, posterior_family
from .storage import (
    EVE_MODES,
    VERSIONS,
    SplitParams,
    build_encoder,
    eve_ambiguity_alternating,
    evaluate,
    validate_params,
)
from .task_encoding import best_v, encoder_from_guesser, list_moment

EXIT_OK, EXIT_CONFIG, EXIT_PARAMS, EXIT_BUDGET = 0, 2, 3, 4

EVALUATE_COLUMNS = [
    "version", "c_s", "c_1", "c_2", "m1", "m2", "rho", "entropy",
    "bob_guess", "bob_list", "eve_exact", "eve_lo", "eve_hi",
    "bob_achievability", "bob_converse", "eve_lower", "eve_upper", "verdict",
]
SWEEP_COLUMNS = [
    "n", "m1", "m2", "bob_guess", "bob_list", "eve_lo", "eve_hi",
    "exp_lo", "exp_hi", "exponent_target",
]
ORACLE_KINDS = ("min_guess", "eve", "side_info", "task_encoder")


class ConfigError(ValueError):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "PASS" if v else "FAIL"
    if isinstance(v, int):
        return str(v)
    if math.isnan(v):
        return "BOUNDARY"
    if v == -math.inf:
        return "NEG_INF"
    if v == math.inf:
        return "INF"
    return f"{v:.9g}"


@dataclass
class ExperimentConfig:
    source: JointPMF
    rho: float = 1.0
    version: str = "guessing"
    split: SplitParams | None = None
    rates: RatePair | None = None
    n_max: int = 1
    eve_mode: str = "heuristic"
    restarts: int = 4
    seed: int = 0
    budget: Budget = field(default_factory=Budget)
    oracle: dict = field(default_factory=dict)
    refine: bool = False


def _load_source(raw, base: Path) -> JointPMF:
    try:
        return _read_source(raw, base)
    except ParameterError as exc:
        raise ConfigError(f"invalid source: {exc}") from exc


def _read_source(raw, base: Path) -> JointPMF:
    if isinstance(raw, str):
        path = Path(raw)
        if not path.is_absolute():
            path = base / path
        if not path.exists():
            raise ConfigError(f"source file {path} does not exist")
        return JointPMF.load(path)
    if isinstance(raw, dict):
        return JointPMF.from_dict(raw)
    raise ConfigError("source must be a joint PMF object or a file path")


def parse_config(d: dict, base: Path = Path(".")) -> ExperimentConfig:
    if not isinstance(d, dict) or "source" not in d:
        raise ConfigError("config must be a JSON object with a 'source'")
    if "split" in d and "rates" in d:
        raise ConfigError("give either 'split' or 'rates', not both")
    try:
        cfg = ExperimentConfig(source=_load_source(d["source"], base))
        cfg.rho = float(d.get("rho", 1.0))
        if not cfg.rho > 0:
            raise ConfigError("rho must be positive")
        cfg.version = d.get("version", "guessing")
        if cfg.version not in VERSIONS:
            raise ConfigError(f"version must be one of {VERSIONS}")
        if "split" in d:
            s = d["split"]
            cfg.split = SplitParams(int(s["c_s"]), int(s["c_1"]), int(s["c_2"]),
                                    int(s["m1"]), int(s["m2"]), cfg.version)
        if "rates" in d:
            r = d["rates"]
            cfg.rates = RatePair(float(r["r1"]), float(r["r2"]))
            cfg.n_max = int(d.get("n_max", 1))
        cfg.eve_mode = d.get("eve_mode", "heuristic")
        cfg.restarts = int(d.get("restarts", 4))
        cfg.seed = int(d.get("seed", 0))
        cfg.refine = bool(d.get("refine", False))
        b = d.get("budget", {})
        max_configs = int(b.get("max_configs", DEFAULT_MAX_CONFIGS))
        if os.environ.get(BUDGET_ENV):
            max_configs = int(os.environ[BUDGET_ENV])
        cfg.budget = Budget(max_configs, float(b.get("max_seconds", 120.0)))
        cfg.oracle = dict(d.get("oracle", {}))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return cfg


def load_config(args) -> ExperimentConfig:
    if not args.config:
        raise ConfigError("--config is required")
    path = Path(args.config)
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = parse_config(raw, path.parent)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.eve_mode is not None:
        cfg.eve_mode = args.eve_mode
    if args.restarts is not None:
        cfg.restarts = args.restarts
    if cfg.eve_mode not in EVE_MODES:
        raise ConfigError(f"eve_mode must be one of {EVE_MODES}")
    if cfg.restarts < 1:
        raise ConfigError("restarts must be at least 1")
    return cfg


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_entropy(cfg: ExperimentConfig, args) -> int:
    h = arimoto_conditional_entropy(cfg.source, guessing_order(cfg.rho))
    print(f"H={h:.6f} bits")
    print(f"2^(rho*H)={2.0 ** (cfg.rho * h):.6f}")
    return EXIT_OK


def evaluate_row(cfg: ExperimentConfig) -> tuple[list, object]:
    p = cfg.split
    rep = evaluate(cfg.source, p, cfg.rho, cfg.eve_mode, cfg.restarts, cfg.seed, cfg.budget)
    h = arimoto_conditional_entropy(cfg.source, guessing_order(cfg.rho))
    b = rep.bound_values
    row = [p.version, p.c_s, p.c_1, p.c_2, p.m1_size, p.m2_size, cfg.rho, h,
           rep.bob_guess, rep.bob_list, rep.eve_exact, rep.eve_lower_formula,
           rep.eve_upper_feasible, b["bob_achievability"], b["bob_converse"],
           b["eve_lower"], b["eve_upper"], all(rep.checks.values())]
    return row, rep


def cmd_evaluate(cfg: ExperimentConfig, args) -> int:
    if cfg.split is None:
        raise ConfigError("evaluate needs a 'split' section")
    bad = validate_params(cfg.split, cfg.source.x_size)
    if bad:
        print("parameter violations:", file=sys.stderr)
        for v in bad:
            print(f"  {v}", file=sys.stderr)
        return EXIT_PARAMS
    row, rep = evaluate_row(cfg)
    _emit(_csv_text(EVALUATE_COLUMNS, [row]), args.out)
    out = sys.stderr if not args.out else sys.stdout
    print(f"bob: guess={fmt(rep.bob_guess)} list={fmt(rep.bob_list)}", file=out)
    print(f"eve: exact={fmt(rep.eve_exact) or '-'} in [{fmt(rep.eve_lower_formula)}, "
          f"{fmt(rep.eve_upper_feasible)}]", file=out)
    for name, value in rep.bound_values.items():
        verdict = rep.checks.get(name)
        label = fmt(verdict) if verdict is not None else (
            "MONITOR " + fmt(rep.monitors[name]) if name in rep.monitors else "")
        print(f"  {name:<18} {fmt(value):>14}  {label}", file=out)
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig, args) -> int:
    if cfg.rates is None:
        raise ConfigError("sweep needs a 'rates' section")
    rows = sweep(cfg.source, cfg.rates, cfg.rho, cfg.n_max, cfg.seed, cfg.refine,
                 cfg.restarts, cfg.budget.max_configs)
    table = [[r.n, r.m1_size, r.m2_size, r.bob_guess, r.bob_list, r.eve_lower_formula,
              r.eve_upper_feasible, r.exp_lo, r.exp_hi, r.exponent_target] for r in rows]
    _emit(_csv_text(SWEEP_COLUMNS, table), args.out)
    if len(rows) < cfg.n_max:
        print(f"warning: sweep truncated at {len(rows)} of {cfg.n_max} rows (budget)",
              file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def oracle_comparison(cfg: ExperimentConfig) -> tuple[str, float, float]:
    kind = cfg.oracle.get("kind", "min_guess")
    j, rho, b = cfg.source, cfg.rho, cfg.budget
    if kind == "min_guess":
        return kind, min_guess_moment(j, rho), brute_min_guess(j, rho, b)
    if kind == "side_info":
        z = int(cfg.oracle.get("z_size", 2))
        return kind, ceil_rank_moment(j, rho, z), brute_side_info(j, z, rho, b)
    if kind == "task_encoder":
        m = int(cfg.oracle.get("m_size", 2))
        g = optimal_guesser(posterior_family(j))
        enc = encoder_from_guesser(g, j, best_v(m, j.x_size), m)
        return kind, list_moment(enc, j, rho), brute_task_encoder(j, m, rho, b)
    if kind == "eve":
        if cfg.split is None:
            raise ConfigError("the eve oracle needs a 'split' section")
        enc = build_encoder(j, cfg.split, cfg.seed)
        fast = eve_ambiguity_alternating(enc, j, rho, cfg.restarts, cfg.seed)
        return kind, fast, brute_eve(enc, j, rho, b)
    raise ConfigError(f"oracle kind must be one of {ORACLE_KINDS}")


def cmd_oracle(cfg: ExperimentConfig, args) -> int:
    if cfg.split is not None:
        bad = validate_params(cfg.split, cfg.source.x_size)
        if bad:
            print("parameter violations: " + "; ".join(bad), file=sys.stderr)
            return EXIT_PARAMS
    kind, fast, exact = oracle_comparison(cfg)
    text = (f"{'quantity':<14}{'fast':>16}{'oracle':>16}{'abs_diff':>16}\n"
            f"{kind:<14}{fmt(fast):>16}{fmt(exact):>16}{fmt(abs(fast - exact)):>16}\n")
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {"entropy": cmd_entropy, "evaluate": cmd_evaluate,
            "sweep": cmd_sweep, "oracle": cmd_oracle}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ambiguity-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="experiment config (JSON)")
        sp.add_argument("--out", help="write CSV/table here instead of stdout")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--eve-mode", choices=EVE_MODES)
        sp.add_argument("--restarts", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SizeError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
