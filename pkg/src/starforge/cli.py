"""Command-line entry point: ``starforge {gen,synth,simulate,report,dot}``.

Exit codes: 0 success, 1 invalid input, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .architecture import (
    ArchitectureNetlist,
    ConsistencyError,
    ControlSchedule,
    DisciplineError,
    emit_dot,
    emit_rtl_text,
)
from .config import ConfigError, RunConfig, load_config, parse_emit
from .pipeline import synthesize
from .rcg import build_rcg, export_dot
from .schedule import (
    ScheduleError,
    dump_schedule,
    gen_block_interleaver,
    gen_from_permutation,
    gen_linear,
    gen_random,
    max_live,
    parse_schedule,
)
from .simulator import simulate, verify

log = logging.getLogger("starforge")

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2

REPORT_COLUMNS = ("config", "slots", "saved", "ctrl", "cost", "max_live")


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load_schedule(path: str):
    try:
        return parse_schedule(_read(path))
    except ScheduleError as exc:
        raise InputError(f"{path}: {exc}") from None


def _run_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.out is not None:
        cfg.out = args.out
    if args.emit is not None:
        cfg.emit = parse_emit(args.emit)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- subcommands ------------------------------------------------------------------

def cmd_gen(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    try:
        if args.kind == "linear":
            s = gen_linear(args.n, args.offset)
        elif args.kind == "block":
            s = gen_block_interleaver(args.rows, args.cols, args.pin, args.pout, args.offset)
        elif args.kind == "perm":
            if args.perm:
                try:
                    perm = [int(x) for x in args.perm.split(",")]
                except ValueError:
                    raise ScheduleError(f"--perm must be comma-separated integers, got {args.perm!r}") from None
            else:
                import random

                perm = list(range(args.n))
                random.Random(cfg.seed).shuffle(perm)
            s = gen_from_permutation(perm, args.pin, args.pout, args.offset)
        else:
            s = gen_random(args.n, args.horizon, args.pin, args.pout, args.max_reads, cfg.seed)
    except ScheduleError as exc:
        raise InputError(str(exc)) from None
    path = _write(Path(cfg.out or "."), args.output, dump_schedule(s))
    print(f"wrote {path}: {len(s)} tokens, max_live {max_live(s)}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    binding = cfg.binding
    if args.no_fifo:
        binding = replace(binding, enable_fifo=False)
    if args.no_lifo:
        binding = replace(binding, enable_lifo=False)
    s = _load_schedule(args.schedule)
    out = Path(cfg.out or ".")
    try:
        design = synthesize(s, binding, cfg.cost)
    except (DisciplineError, ConsistencyError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    _write(out, "report.json", _dump(design.metrics))
    if "json" in cfg.emit:
        _write(out, "netlist.json", _dump(design.netlist.to_dict()))
        _write(out, "control.json", _dump(design.control.to_list()))
        _write(out, "sim.json", design.sim.to_json())
    if "dot" in cfg.emit:
        _write(out, "rcg.dot", export_dot(design.graph))
        _write(out, "arch.dot", emit_dot(design.netlist))
    if "rtl" in cfg.emit:
        _write(out, "design.vhd.txt", emit_rtl_text(design.netlist, design.control))
    if "csv" in cfg.emit:
        _write(out, "occupancy.csv", design.sim.occupancy_csv())
    m = design.metrics
    print(f"n={m['n']} slots={m['slots']} saved={m['saved']} ctrl={m['ctrl']} max_live={m['max_live']} cost={m['cost']}")
    if not design.ok:
        for p in design.problems:
            print(f"mismatch: {p}", file=sys.stderr)
        return EXIT_VERIFY
    print("verify: ok")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    s = _load_schedule(args.schedule)
    try:
        net = ArchitectureNetlist.from_dict(json.loads(_read(args.netlist)))
        control = ControlSchedule.from_list(json.loads(_read(args.control)))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read design files: {exc}") from None
    result = simulate(net, control, s)
    problems = verify(result, s)
    if "csv" in cfg.emit and cfg.out:
        _write(Path(cfg.out), "occupancy.csv", result.occupancy_csv())
    if problems:
        print("mismatch")
        for p in problems:
            print(f"  {p}")
        return EXIT_VERIFY
    print(f"ok ({len(control)} cycles)")
    return EXIT_OK


def report_rows(schedule_path: str, config_paths: Sequence[str]) -> list[dict]:
    s = _load_schedule(schedule_path)
    graph = build_rcg(s)
    rows = []
    for path in config_paths:
        cfg = load_config(path)
        try:
            design = synthesize(s, cfg.binding, cfg.cost, graph=graph)
        except (DisciplineError, ConsistencyError) as exc:
            raise InputError(f"{path}: verification failed: {exc}") from None
        m = design.metrics
        rows.append({"config": cfg.name, "slots": m["slots"], "saved": m["saved"], "ctrl": m["ctrl"],
                     "cost": m["cost"], "max_live": m["max_live"], "verified": design.ok})
    return rows


def rows_markdown(rows: list[dict]) -> str:
    lines = ["| " + " | ".join(REPORT_COLUMNS) + " |", "|" + "---|" * len(REPORT_COLUMNS)]
    for r in rows:
        lines.append("| " + " | ".join(str(r[c]) for c in REPORT_COLUMNS) + " |")
    return "\n".join(lines) + "\n"


def rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow([r[c] for c in REPORT_COLUMNS])
    return buf.getvalue()


def cmd_report(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    rows = report_rows(args.schedule, args.configs)
    table = rows_markdown(rows)
    print(table, end="")
    if cfg.out:
        _write(Path(cfg.out), "report.md", table)
        _write(Path(cfg.out), "report.csv", rows_csv(rows))
    return EXIT_OK if all(r["verified"] for r in rows) else EXIT_VERIFY


def cmd_dot(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    text = export_dot(build_rcg(_load_schedule(args.schedule)))
    if cfg.out:
        _write(Path(cfg.out), "rcg.dot", text)
    else:
        print(text, end="")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for randomized generators")
    common.add_argument("--emit", help="comma list of json,dot,rtl,csv")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="starforge", description="Space-time adapter synthesis from I/O schedules.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a schedule file")
    g.add_argument("kind", choices=["linear", "block", "perm", "random"])
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--rows", type=int, default=6)
    g.add_argument("--cols", type=int, default=10)
    g.add_argument("--pin", type=int, default=1)
    g.add_argument("--pout", type=int, default=1)
    g.add_argument("--offset", type=int, help="first read cycle (default: smallest feasible)")
    g.add_argument("--perm", help="comma-separated read order, e.g. 2,0,1")
    g.add_argument("--horizon", type=int, default=64, help="random: cycles available")
    g.add_argument("--max-reads", type=int, default=2, help="random: reads per token")
    g.add_argument("-o", "--output", default="schedule.json", help="file name inside --out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("synth", parents=[common], help="synthesize and self-verify an adapter")
    s.add_argument("schedule")
    s.add_argument("--no-fifo", action="store_true")
    s.add_argument("--no-lifo", action="store_true")
    s.set_defaults(func=cmd_synth)

    m = sub.add_parser("simulate", parents=[common], help="replay a design against a schedule")
    m.add_argument("netlist")
    m.add_argument("control")
    m.add_argument("schedule")
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("report", parents=[common], help="compare configurations on one schedule")
    r.add_argument("schedule")
    r.add_argument("configs", nargs="+")
    r.set_defaults(func=cmd_report)

    d = sub.add_parser("dot", parents=[common], help="emit the compatibility graph as DOT")
    d.add_argument("schedule")
    d.set_defaults(func=cmd_dot)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
