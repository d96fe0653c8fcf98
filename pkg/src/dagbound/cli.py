"""Command-line front end.

    dagbound gen          write a random task file
    dagbound bound        bounds for one task file
    dagbound bench-bounds normalized-bound sweep over (m, pf), CSV
    dagbound bench-sched  federated acceptance-ratio sweep over (m, nu), CSV
    dagbound validate     simulate a task and check every bound holds

Exit codes: 0 success, 1 usage, 2 invalid input, 3 soundness violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .bounds import METHODS, TaskAnalysis, normalized_bound
from .experiments import (
    BOUNDS_COLUMNS,
    SCHED_COLUMNS,
    BoundsConfig,
    SchedConfig,
    bench_bounds,
    bench_sched,
    fmt,
    rows_to_csv,
    sweep,
    validate_task,
)
from .gen import GenConfig, assign_period, generate
from .taskgraph import CycleDetected, DagTask, MalformedInput, validate_and_normalize

EXIT_USAGE, EXIT_INPUT, EXIT_UNSOUND = 1, 2, 3


class TaskFileError(MalformedInput):
    pass


@dataclass(frozen=True)
class TaskFile:
    name: str
    vertices: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int], ...]
    period: int | None = None
    deadline: int | None = None

    def to_task(self) -> DagTask:
        wcet = [c for _, c in self.vertices]
        return validate_and_normalize(wcet, self.edges, self.name)

    @classmethod
    def from_task(cls, task: DagTask, period=None, deadline=None) -> TaskFile:
        return cls(
            task.name,
            tuple(enumerate(task.wcet)),
            task.edges,
            period,
            deadline,
        )


def _int_field(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TaskFileError(f"{where}: expected an integer, got {value!r}")
    return value


def parse_task_file(text: str) -> TaskFile:
    """Parse the JSON task format; raises TaskFileError (or CycleDetected)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TaskFileError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise TaskFileError("top level must be an object")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise TaskFileError("name: expected a string")
    raw_vertices = doc.get("vertices")
    if not isinstance(raw_vertices, list) or not raw_vertices:
        raise TaskFileError("vertices: expected a non-empty array")
    wcet = {}
    for k, item in enumerate(raw_vertices):
        if not isinstance(item, dict) or set(item) != {"id", "wcet"}:
            raise TaskFileError(f"vertices[{k}]: expected {{id, wcet}}")
        vid = _int_field(item["id"], f"vertices[{k}].id")
        c = _int_field(item["wcet"], f"vertices[{k}].wcet")
        if c < 0:
            raise TaskFileError(f"vertices[{k}].wcet: negative WCET")
        if vid in wcet:
            raise TaskFileError(f"vertices[{k}].id: duplicate id {vid}")
        wcet[vid] = c
    if sorted(wcet) != list(range(len(wcet))):
        raise TaskFileError("vertices: ids must be 0..n-1")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_edges, list):
        raise TaskFileError("edges: expected an array")
    edges = set()
    for k, e in enumerate(raw_edges):
        if not isinstance(e, list) or len(e) != 2:
            raise TaskFileError(f"edges[{k}]: expected [from, to]")
        u, v = (_int_field(x, f"edges[{k}]") for x in e)
        if u not in wcet or v not in wcet:
            raise TaskFileError(f"edges[{k}]: unknown vertex id")
        if u == v:
            raise TaskFileError(f"edges[{k}]: self-loop")
        edges.add((u, v))
    extra = {}
    for key in ("period", "deadline"):
        if doc.get(key) is not None:
            extra[key] = _int_field(doc[key], key)
    unknown = set(doc) - {"name", "vertices", "edges", "period", "deadline"}
    if unknown:
        raise TaskFileError(f"unknown fields {sorted(unknown)}")
    tf = TaskFile(name, tuple(sorted(wcet.items())), tuple(sorted(edges)), **extra)
    tf.to_task()
    return tf


def write_task_file(tf: TaskFile) -> str:
    """Canonical text: vertices and edges sorted ascending, one per line."""
    lines = ["{", f'  "name": {json.dumps(tf.name)},', '  "vertices": [']
    verts = sorted(tf.vertices)
    for k, (vid, c) in enumerate(verts):
        sep = "," if k < len(verts) - 1 else ""
        lines.append(f'    {{"id": {vid}, "wcet": {c}}}{sep}')
    lines.append("  ],")
    edges = sorted(set(tf.edges))
    tail = [(key, val) for key, val in (("period", tf.period), ("deadline", tf.deadline)) if val is not None]
    lines.append('  "edges": [')
    for k, (u, v) in enumerate(edges):
        sep = "," if k < len(edges) - 1 else ""
        lines.append(f"    [{u}, {v}]{sep}")
    lines.append("  ]" + ("," if tail else ""))
    for k, (key, val) in enumerate(tail):
        sep = "," if k < len(tail) - 1 else ""
        lines.append(f'  "{key}": {val}{sep}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_task(path: str) -> DagTask:
    return parse_task_file(Path(path).read_text(encoding="utf-8")).to_task()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ints(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if any(x < 1 for x in out):
        raise argparse.ArgumentTypeError("values must be positive")
    return out


def _sweep(text: str) -> tuple[Fraction, ...]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (Fraction(parts[0]),)
        if len(parts) == 3:
            return tuple(sweep(*parts))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))
    raise argparse.ArgumentTypeError(f"expected value or start:stop:step, got {text!r}")


def _range(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(":")
    try:
        vals = tuple(Fraction(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if len(vals) == 1:
        return vals[0], vals[0]
    if len(vals) != 2 or vals[0] > vals[1]:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    return vals


def _int_range(text: str) -> tuple[int, int]:
    lo, hi = _range(text)
    if lo.denominator != 1 or hi.denominator != 1:
        raise argparse.ArgumentTypeError("expected integers")
    return int(lo), int(hi)


def _methods(text: str) -> tuple[str, ...]:
    if text == "all":
        return METHODS
    out = tuple(x.strip() for x in text.split(","))
    bad = [x for x in out if x not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
    return out


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _gen_config(args, pf) -> GenConfig:
    return GenConfig(
        kind=args.kind,
        vertices=args.vertices,
        pf=pf,
        wcet=args.wcet,
    )


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    lo, hi = args.pf
    pf = float(lo) if lo == hi else (float(lo), float(hi))
    task = generate(_gen_config(args, pf), args.seed)
    period = None
    if args.df is not None:
        df_lo, df_hi = args.df
        if df_lo != df_hi:
            print("gen: --df takes a single value", file=sys.stderr)
            return EXIT_USAGE
        period = assign_period(task, df_lo)
    tf = TaskFile.from_task(task, period, period)
    _emit(write_task_file(tf), args.task)
    return 0


def cmd_bound(args) -> int:
    task = load_task(args.task)
    m = args.cores[0]
    analysis = TaskAnalysis(task)
    rows = []
    print(f"task {task.name or args.task}: |V|={task.vertex_count} len={task.length} "
          f"vol={task.volume} width={task.width} m={m}")
    for method in args.methods:
        rep = analysis.report(method, m)
        norm = normalized_bound(task, m, rep.bound)
        print(f"{method:12s} bound={rep.bound} ({fmt(rep.bound)}) "
              f"cardinality={rep.cardinality} normalized={fmt(norm)}")
        print(f"{'':12s} paths={[list(p) for p in rep.paths]}")
        rows.append(
            {
                "task": task.name or Path(args.task).stem,
                "m": m,
                "method": method,
                "bound": str(rep.bound),
                "bound_decimal": rep.bound,
                "cardinality": rep.cardinality,
                "normalized": norm,
            }
        )
    if args.csv:
        cols = ("task", "m", "method", "bound", "bound_decimal", "cardinality", "normalized")
        _emit(rows_to_csv(rows, cols), args.csv)
    return 0


def cmd_bench_bounds(args) -> int:
    pf = args.pf or tuple(sweep("0.05", "0.6", "0.05"))
    config = BoundsConfig(
        cores=args.cores or (4, 8, 12),
        pf=pf,
        tasks_per_point=args.tasks_per_point,
        methods=args.methods,
        seed=args.seed,
        gen=_gen_config(args, 0.0),
    )
    _emit(rows_to_csv(bench_bounds(config), BOUNDS_COLUMNS), args.csv)
    return 0


def cmd_bench_sched(args) -> int:
    lo, hi = args.pf or (Fraction(1, 10), Fraction(6, 10))
    config = SchedConfig(
        cores=args.cores or (16, 32),
        nu=args.nu or tuple(sweep("0.1", "1.0", "0.1")),
        sets_per_point=args.sets_per_point,
        methods=args.methods,
        seed=args.seed,
        df=args.df or (Fraction(0), Fraction(1, 2)),
        gen=_gen_config(args, (float(lo), float(hi))),
    )
    _emit(rows_to_csv(bench_sched(config), SCHED_COLUMNS), args.csv)
    return 0


def cmd_validate(args) -> int:
    task = load_task(args.task)
    m = args.cores[0]
    report = validate_task(task, m, args.trials, args.seed, args.methods)
    name, tight = report.tightest
    print(f"trials={report.trials} max_response={report.max_response} "
          f"tightest={name} {tight} ({fmt(tight)})")
    for method, b in report.bounds.items():
        print(f"  {method:12s} {b} ({fmt(b)})")
    if args.csv:
        rows = [
            {"m": m, "trials": report.trials, "method": meth, "bound": b,
             "max_response": report.max_response, "violations": sum(1 for v in report.violations if v[1] == meth)}
            for meth, b in report.bounds.items()
        ]
        _emit(rows_to_csv(rows, ("m", "trials", "method", "bound", "max_response", "violations")), args.csv)
    if not report.ok:
        for trial, meth, r, b in report.violations[:10]:
            print(f"VIOLATION trial {trial}: response {r} > {meth} bound {b}", file=sys.stderr)
        return EXIT_UNSOUND
    print("no violations")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dagbound", description="Response-time bounds for DAG tasks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, task=False, cores_default=None):
        if task:
            sp.add_argument("--task", required=True, help="task file (JSON)")
        sp.add_argument("--cores", type=_ints, default=cores_default,
                        help="core count(s), comma-separated")
        sp.add_argument("--methods", type=_methods, default=METHODS,
                        help="comma-separated methods or 'all'")
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--csv", help="write CSV here instead of stdout")

    def generation(sp):
        sp.add_argument("--kind", choices=("erdos-renyi", "layered"), default="erdos-renyi")
        sp.add_argument("--vertices", type=_int_range, default=(150, 250), help="lo:hi")
        sp.add_argument("--wcet", type=_int_range, default=(5, 100), help="lo:hi")

    g = sub.add_parser("gen", help="generate a random task file")
    g.add_argument("--task", help="output path (default stdout)")
    g.add_argument("--pf", type=_range, default=(Fraction(1, 10), Fraction(1, 10)))
    g.add_argument("--df", type=_range, help="set period = deadline from this df")
    g.add_argument("--seed", type=int, default=42)
    generation(g)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bound", help="bounds for one task")
    common(b, task=True, cores_default=(2,))
    b.set_defaults(func=cmd_bound)

    bb = sub.add_parser("bench-bounds", help="normalized-bound sweep")
    common(bb)
    generation(bb)
    bb.add_argument("--pf", type=_sweep, help="start:stop:step (default 0.05:0.6:0.05)")
    bb.add_argument("--tasks-per-point", type=_positive, default=50)
    bb.set_defaults(func=cmd_bench_bounds)

    bs = sub.add_parser("bench-sched", help="federated acceptance-ratio sweep")
    common(bs)
    generation(bs)
    bs.add_argument("--nu", type=_sweep, help="start:stop:step (default 0.1:1.0:0.1)")
    bs.add_argument("--pf", type=_range, help="pf range lo:hi (default 0.1:0.6)")
    bs.add_argument("--df", type=_range, help="df range lo:hi (default 0:0.5)")
    bs.add_argument("--sets-per-point", type=_positive, default=100)
    bs.set_defaults(func=cmd_bench_sched)

    v = sub.add_parser("validate", help="simulate and check every bound")
    common(v, task=True, cores_default=(2,))
    v.add_argument("--trials", type=_positive, default=1000)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MalformedInput, CycleDetected, OSError) as exc:
        print(f"dagbound: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"dagbound: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
