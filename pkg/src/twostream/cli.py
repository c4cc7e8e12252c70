"""Command-line interface.

Subcommands:
  analyze   run an e-process test or a confidence sequence over a recorded stream
  project   print the KL projection of an alternative onto a null set
  simulate  seeded type-I error / coverage Monte Carlo experiments
  trace     write the CSV traces of the illustration scenarios

Input streams are CSV rows "group,outcome" (header optional) or JSON lines
{"g": "a", "y": 1} in arrival order; rows are buffered into blocks of the
first n_a group-a and n_b group-b rows per block index.  Exit codes: 0
continue/success, 2 input or configuration error, 10 reject.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import deque
from pathlib import Path

from .confseq import ConfidenceSequence, Effect
from .eprocess import BetaPrior, DEFAULT_CLAMP, EProcessState
from .model import Block, BlockDesign, ThetaPair
from .nulls import NullSpec
from .projection import project
from .simulate import SimConfig, figure_traces, run_coverage, run_type1

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_REJECT = 10

_NULL_CHOICES = [
    "equality",
    "line",
    "halfplane-le",
    "halfplane-ge",
    "log-odds-le",
    "log-odds-ge",
]

_DEFAULTS = {
    "input": "-",
    "format": "auto",
    "null": None,
    "s": 0.0,
    "c": 1.0,
    "delta": 0.0,
    "effect": None,
    "grid_min": None,
    "grid_max": None,
    "grid_step": None,
    "alpha": 0.05,
    "n_a": 1,
    "n_b": 1,
    "gamma": 0.18,
    "prior": None,
    "clamp": DEFAULT_CLAMP,
    "lookahead": 100000,
    "output": None,
    "star_a": None,
    "star_b": None,
    "streams": 2000,
    "blocks": 200,
    "seed": 0,
    "out_dir": ".",
    "fig_delta": 0.3,
    "points": False,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twostream",
        description="Anytime-valid sequential two-sample inference for 2x2 tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *names: str) -> None:
        arg = p.add_argument
        if "design" in names:
            arg("--n-a", type=int, dest="n_a", help="group-a outcomes per block (default 1)")
            arg("--n-b", type=int, dest="n_b", help="group-b outcomes per block (default 1)")
        if "null" in names:
            arg("--null", choices=_NULL_CHOICES, help="null set shape")
            arg("--s", type=float, help="line intercept s (default 0)")
            arg("--c", type=float, help="line slope c (default 1)")
            arg("--delta", type=float, help="log-odds bound delta (default 0)")
        if "effect" in names:
            arg("--effect", choices=[e.value for e in Effect], help="effect size")
            arg("--grid-min", type=float, dest="grid_min", help="grid lower bound")
            arg("--grid-max", type=float, dest="grid_max", help="grid upper bound")
            arg("--grid-step", type=float, dest="grid_step", help="grid step")
        if "prior" in names:
            arg("--gamma", type=float, help="symmetric beta prior parameter (default 0.18)")
            arg(
                "--prior",
                help="explicit beta prior 'alpha_a,beta_a,alpha_b,beta_b' (overrides --gamma)",
            )
            arg("--clamp", type=float, help="plug-in clamp (default 1e-12)")
        arg("--alpha", type=float, help="significance level (default 0.05)")
        arg("--config", help="JSON config file; precedence: flags > file > defaults")
        arg(
            "--print-config",
            action="store_true",
            dest="print_config",
            help="print the resolved configuration as JSON and exit",
        )

    p = sub.add_parser("analyze", help="analyze a recorded stream from a file or stdin")
    p.add_argument("--input", help="input path or '-' for stdin (default '-')")
    p.add_argument("--format", choices=["auto", "csv", "jsonl"], help="input format")
    p.add_argument("--lookahead", type=int, help="max buffered rows before a block must close")
    p.add_argument("--output", help="write the per-block CSV report here instead of stdout")
    p.add_argument("--points", action="store_true", help="include per-candidate log e-values")
    common(p, "design", "null", "effect", "prior")

    p = sub.add_parser("project", help="print the projection of a point onto a null set")
    p.add_argument("--star-a", type=float, dest="star_a", help="alternative theta_a")
    p.add_argument("--star-b", type=float, dest="star_b", help="alternative theta_b")
    common(p, "design", "null")

    p = sub.add_parser("simulate", help="run a seeded Monte Carlo experiment")
    p.add_argument("kind", choices=["type1", "coverage"])
    p.add_argument("--star-a", type=float, dest="star_a", help="generating theta_a")
    p.add_argument("--star-b", type=float, dest="star_b", help="generating theta_b")
    p.add_argument("--streams", type=int, help="number of streams (default 2000)")
    p.add_argument("--blocks", type=int, help="blocks per stream (default 200)")
    p.add_argument("--seed", type=int, help="experiment seed (default 0)")
    p.add_argument("--output", help="append the JSON summary line here instead of stdout")
    common(p, "design", "null", "effect", "prior")

    p = sub.add_parser("trace", help="write the CSV trace of an illustration scenario")
    p.add_argument("scenario", choices=["fig2", "fig3", "figA1"])
    p.add_argument("--seed", type=int, help="stream seed (default 0)")
    p.add_argument("--out-dir", dest="out_dir", help="output directory (default '.')")
    p.add_argument("--delta", type=float, dest="fig_delta", help="figA1 risk difference (default 0.3)")
    common(p)

    for sp in sub.choices.values():
        for action in sp._actions:
            if action.dest not in ("help", "command", "kind", "scenario"):
                action.default = argparse.SUPPRESS
    return parser


def _resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and explicit flags (flags win)."""
    given = {k: v for k, v in vars(args).items() if k not in ("command", "kind", "scenario")}
    resolved = dict(_DEFAULTS)
    config_path = given.pop("config", None)
    if config_path:
        with open(config_path) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(_DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config file keys: {sorted(unknown)}")
        resolved.update(loaded)
    resolved.update(given)
    resolved.pop("print_config", None)
    return resolved


def _prior_from(cfg: dict) -> BetaPrior:
    if cfg.get("prior"):
        parts = [float(x) for x in str(cfg["prior"]).split(",")]
        if len(parts) != 4:
            raise ValueError("--prior needs four comma-separated values")
        return BetaPrior(*parts)
    return BetaPrior.symmetric(cfg["gamma"])


def _null_from(cfg: dict) -> NullSpec:
    kind = cfg["null"]
    if kind == "equality":
        return NullSpec.equality()
    if kind == "line":
        return NullSpec.line(cfg["s"], cfg["c"])
    if kind == "halfplane-le":
        return NullSpec.halfplane_le(cfg["s"], cfg["c"])
    if kind == "halfplane-ge":
        return NullSpec.halfplane_ge(cfg["s"], cfg["c"])
    if kind == "log-odds-le":
        return NullSpec.log_odds_le(cfg["delta"])
    if kind == "log-odds-ge":
        return NullSpec.log_odds_ge(cfg["delta"])
    raise ValueError(f"unknown null {kind!r}")


def _grid_from(cfg: dict):
    import numpy as np

    if cfg["grid_min"] is None and cfg["grid_max"] is None and cfg["grid_step"] is None:
        return None
    if None in (cfg["grid_min"], cfg["grid_max"], cfg["grid_step"]):
        raise ValueError("--grid-min, --grid-max and --grid-step must be given together")
    lo, hi, step = cfg["grid_min"], cfg["grid_max"], cfg["grid_step"]
    if step <= 0 or hi < lo:
        raise ValueError("need grid-step > 0 and grid-max >= grid-min")
    count = int(round((hi - lo) / step))
    return lo + np.arange(count + 1, dtype=np.float64) * step


class _InputError(Exception):
    pass


def _parse_rows(lines, fmt: str):
    """Yield (group, outcome, line_no) from CSV or JSON-lines text."""
    header_skipped = False
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if fmt == "auto":
            fmt = "jsonl" if line.startswith("{") else "csv"
        if fmt == "jsonl":
            try:
                obj = json.loads(line)
                group, y = obj["g"], obj["y"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise _InputError(f"malformed JSON row at line {line_no}: {exc}") from exc
        else:
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise _InputError(f"expected 'group,outcome' at line {line_no}, got {line!r}")
            group, y = parts
            if not header_skipped and group.lower() == "group" and y.lower() == "outcome":
                header_skipped = True
                continue
        header_skipped = True
        if group not in ("a", "b"):
            raise _InputError(f"unknown group {group!r} at line {line_no}")
        try:
            y = int(y)
        except (TypeError, ValueError):
            raise _InputError(f"outcome must be 0 or 1 at line {line_no}, got {y!r}") from None
        if y not in (0, 1):
            raise _InputError(f"outcome must be 0 or 1 at line {line_no}, got {y!r}")
        yield group, y, line_no


def _assemble_blocks(rows, design: BlockDesign, lookahead: int):
    """Yield completed blocks; raises when a group buffer exceeds the lookahead."""
    buf_a: deque[int] = deque()
    buf_b: deque[int] = deque()
    for group, y, line_no in rows:
        (buf_a if group == "a" else buf_b).append(y)
        if len(buf_a) > lookahead or len(buf_b) > lookahead:
            raise _InputError(
                f"cannot complete a block within lookahead={lookahead} rows "
                f"(line {line_no}: buffered a={len(buf_a)}, b={len(buf_b)})"
            )
        while len(buf_a) >= design.n_a and len(buf_b) >= design.n_b:
            ys_a = tuple(buf_a.popleft() for _ in range(design.n_a))
            ys_b = tuple(buf_b.popleft() for _ in range(design.n_b))
            yield Block(ys_a, ys_b)
    if buf_a or buf_b:
        print(
            f"warning: discarding incomplete trailing block "
            f"(a: {len(buf_a)}/{design.n_a}, b: {len(buf_b)}/{design.n_b} rows)",
            file=sys.stderr,
        )


def _cmd_analyze(cfg: dict) -> int:
    if (cfg["null"] is None) == (cfg["effect"] is None):
        raise ValueError("analyze needs exactly one of --null (test mode) or --effect (CS mode)")
    design = BlockDesign(cfg["n_a"], cfg["n_b"])
    prior = _prior_from(cfg)

    if cfg["input"] == "-":
        lines = sys.stdin
    else:
        lines = open(cfg["input"])
    out = open(cfg["output"], "w", newline="") if cfg["output"] else sys.stdout
    try:
        rows = _parse_rows(lines, cfg["format"])
        blocks = _assemble_blocks(rows, design, cfg["lookahead"])
        if cfg["null"] is not None:
            state = EProcessState(design, _null_from(cfg), prior, clamp=cfg["clamp"])
            out.write("m,log_e\n")
            rejected = False
            for block in blocks:
                state = state.update(block)
                rejected = rejected or state.decision(cfg["alpha"]) == "reject"
                out.write(f"{state.m},{state.log_e!r}\n")
            decision = "reject" if rejected else "continue"
            out.write(f"decision,{decision}\n")
            return EXIT_REJECT if rejected else EXIT_OK
        cs = ConfidenceSequence(
            Effect(cfg["effect"]),
            design,
            alpha=cfg["alpha"],
            prior=prior,
            grid=_grid_from(cfg),
            clamp=cfg["clamp"],
        )
        include = cfg["points"]
        out.write(",".join(cs.records_header(include)) + "\n")
        for block in blocks:
            cs = cs.update(block)
            out.write(",".join(cs.record_row(include)) + "\n")
        interval = cs.current_interval()
        if interval.empty:
            out.write("final_interval,,\n")
        else:
            out.write(f"final_interval,{interval.lower!r},{interval.upper!r}\n")
        return EXIT_OK
    finally:
        if lines is not sys.stdin:
            lines.close()
        if out is not sys.stdout:
            out.close()


def _cmd_project(cfg: dict) -> int:
    if cfg["null"] is None:
        raise ValueError("project needs --null")
    if cfg["star_a"] is None or cfg["star_b"] is None:
        raise ValueError("project needs --star-a and --star-b")
    design = BlockDesign(cfg["n_a"], cfg["n_b"])
    star = ThetaPair(cfg["star_a"], cfg["star_b"])
    result = project(_null_from(cfg), star, design)
    print(f"theta_a={result.theta.theta_a!r}")
    print(f"theta_b={result.theta.theta_b!r}")
    print(f"kl={result.kl!r}")
    return EXIT_OK


def _cmd_simulate(kind: str, cfg: dict) -> int:
    if cfg["star_a"] is None or cfg["star_b"] is None:
        raise ValueError("simulate needs --star-a and --star-b")
    config = SimConfig(
        star=ThetaPair(cfg["star_a"], cfg["star_b"]),
        design=BlockDesign(cfg["n_a"], cfg["n_b"]),
        m_max=cfg["blocks"],
        n_streams=cfg["streams"],
        seed=cfg["seed"],
        alpha=cfg["alpha"],
        effect=Effect(cfg["effect"]) if cfg["effect"] else None,
        null=_null_from(cfg) if cfg["null"] else None,
        prior=_prior_from(cfg),
        clamp=cfg["clamp"],
    )
    result = run_type1(config) if kind == "type1" else run_coverage(config)
    line = result.to_json()
    if cfg["output"]:
        with open(cfg["output"], "a") as fh:
            fh.write(line + "\n")
    else:
        print(line)
    return EXIT_OK


def _cmd_trace(scenario: str, cfg: dict) -> int:
    paths = figure_traces(scenario, cfg["seed"], cfg["out_dir"], delta=cfg["fig_delta"])
    for path in paths:
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        if getattr(args, "print_config", False):
            print(json.dumps({"command": args.command, **cfg}, sort_keys=True, default=str))
            return EXIT_OK
        if args.command == "analyze":
            return _cmd_analyze(cfg)
        if args.command == "project":
            return _cmd_project(cfg)
        if args.command == "simulate":
            return _cmd_simulate(args.kind, cfg)
        return _cmd_trace(args.scenario, cfg)
    except (_InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
