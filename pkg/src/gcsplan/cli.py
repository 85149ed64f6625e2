"""Command line front end: plan, bench, generate, render.

``plan`` runs the full pipeline on a problem JSON and writes the
trajectory plus a run record; ``bench`` sweeps a generator over seeds
and summarizes the optimality gaps; ``generate`` emits problem JSON for
the bundled instance families; ``render`` draws a 2D scene as SVG.

Exit codes: 0 success, 2 infeasible instance, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from gcsplan import environments
from gcsplan.gcs import GcsInfeasible, brute_force_optimum
from gcsplan.planner import PlanningProblem, RoundingConfig, Trajectory, plan_detailed
from gcsplan.render import render_svg

# δ histograms use fixed edges so summaries are reproducible and
# comparable across runs; the last bin is open-ended in spirit (every
# gap above 10% lands in it because δ values are clipped).
DELTA_BINS = (0.0, 1e-6, 1e-4, 1e-3, 1e-2, 0.1, 1.0)


@dataclass
class RunRecord:
    """One pipeline run: what was solved, how well, and how fast."""

    instance: str
    seed: int | None
    c_relax: float
    c_round: float
    delta_relax: float
    timings: dict
    toggles: dict
    c_opt: float | None = None
    delta_opt: float | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            if v is None or (isinstance(v, float) and not np.isfinite(v)):
                continue
            out[k] = float(v) if isinstance(v, float) else v
        return out


def _dump_json(obj, path: str | None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _load_problem(path: str) -> PlanningProblem:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SystemExit(f"error: {path} is not valid JSON: {exc}")
    except OSError as exc:
        raise SystemExit(f"error: cannot read {path}: {exc}")
    try:
        return PlanningProblem.from_dict(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise SystemExit(f"error: {path} is not a planning problem: {exc}")


def _rounding_config(args) -> RoundingConfig:
    return RoundingConfig(
        num_paths=args.rounding_n,
        max_trials=args.rounding_m,
        seed=args.seed,
        tol=args.tol,
    )


def _run_one(problem, args, instance: str, seed=None, oracle=False):
    result = plan_detailed(
        problem,
        rounding=_rounding_config(args),
        use_preprocess=not args.no_preprocess,
        use_two_cycle=not args.no_two_cycle,
    )
    rep = result.rounding
    record = RunRecord(
        instance=instance,
        seed=seed,
        c_relax=float(rep.c_relax),
        c_round=float(rep.best_cost),
        delta_relax=float(rep.delta_relax),
        timings={k: round(v, 6) for k, v in result.timings.items()},
        toggles={
            "preprocess": not args.no_preprocess,
            "two_cycle": not args.no_two_cycle,
        },
    )
    if oracle:
        c_opt, _path = brute_force_optimum(result.graph, path_limit=args.path_limit)
        record.c_opt = float(c_opt)
        record.delta_opt = float((rep.best_cost - c_opt) / abs(c_opt))
    return record, result


# ---------------------------------------------------------------------------
# plan


def cmd_plan(args) -> int:
    problem = _load_problem(args.problem)
    try:
        record, result = _run_one(
            problem, args, instance=args.problem, seed=args.seed, oracle=args.oracle
        )
    except GcsInfeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    _dump_json(result.trajectory.to_dict(), args.output)
    if args.record:
        _dump_json(record.to_dict(), args.record)
    print(
        f"C_relax {record.c_relax:.6f}  C_round {record.c_round:.6f}  "
        f"delta_relax {record.delta_relax:.2e}",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------------
# bench


def _bench_problem(args, seed: int):
    if args.family == "maze":
        maze = environments.generate_maze(args.size, args.size, args.removed, seed)
        return maze.planning_problem(), f"maze-{args.size}x{args.size}-r{args.removed}"
    if args.family == "building":
        building = environments.generate_building(seed)
        return building.planning_problem(), "building"
    raise SystemExit(f"error: unknown bench family {args.family!r}")


def _summary(records: list) -> dict:
    out = {"count": len(records), "failed": sum(r.error is not None for r in records)}
    for key in ("delta_relax", "delta_opt"):
        values = [getattr(r, key) for r in records if getattr(r, key) is not None]
        if not values:
            continue
        clipped = np.clip(values, DELTA_BINS[0], DELTA_BINS[-1])
        hist, _edges = np.histogram(clipped, bins=DELTA_BINS)
        out[key] = {
            "median": float(np.median(values)),
            "mean": float(np.mean(values)),
            "max": float(np.max(values)),
            "histogram": {
                f"<= {hi:g}": int(n) for hi, n in zip(DELTA_BINS[1:], hist)
            },
        }
    return out


def cmd_bench(args) -> int:
    seeds = range(args.seed, args.seed + args.count)
    records = []
    for seed in seeds:
        problem, name = _bench_problem(args, seed)
        try:
            record, _ = _run_one(problem, args, name, seed=seed, oracle=args.oracle)
        except (GcsInfeasible, ValueError, RuntimeError) as exc:
            record = RunRecord(
                instance=name,
                seed=seed,
                c_relax=float("nan"),
                c_round=float("nan"),
                delta_relax=float("nan"),
                timings={},
                toggles={},
                error=f"{type(exc).__name__}: {exc}",
            )
        records.append(record)
        tag = (
            record.error
            if record.error
            else f"C_round {record.c_round:.4f} delta_relax {record.delta_relax:.2e}"
        )
        print(f"[{seed}] {name}: {tag}", file=sys.stderr)
    _dump_json(
        {"records": [r.to_dict() for r in records], "summary": _summary(records)},
        args.output,
    )
    return 0


# ---------------------------------------------------------------------------
# generate


def cmd_generate(args) -> int:
    if args.family == "maze":
        maze = environments.generate_maze(args.size, args.size, args.removed, args.seed)
        if args.ascii:
            print(maze.ascii_art(), file=sys.stderr)
        problem = maze.planning_problem()
    elif args.family == "building":
        problem = environments.generate_building(args.seed).planning_problem()
    elif args.family == "fixture-2d":
        problem = environments.fixture_2d(args.objective)
    elif args.family == "fixture-two-route":
        problem = environments.fixture_two_route()
    else:
        raise SystemExit(f"error: unknown family {args.family!r}")
    _dump_json(problem.to_dict(), args.output)
    return 0


# ---------------------------------------------------------------------------
# render


def cmd_render(args) -> int:
    problem = _load_problem(args.problem)
    trajectory = None
    if args.trajectory:
        with open(args.trajectory) as fh:
            trajectory = Trajectory.from_dict(json.load(fh))
    svg = render_svg(problem, trajectory)
    if args.output in (None, "-"):
        print(svg)
    else:
        with open(args.output, "w") as fh:
            fh.write(svg + "\n")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing


def _add_solver_flags(p):
    p.add_argument("--no-preprocess", action="store_true", help="skip edge filtering")
    p.add_argument(
        "--no-two-cycle", action="store_true", help="skip two-cycle tightening"
    )
    p.add_argument("--seed", type=int, default=0, help="rounding seed / first seed")
    p.add_argument(
        "--rounding-n", type=int, default=10, help="distinct paths to collect"
    )
    p.add_argument("--rounding-m", type=int, default=100, help="max sampler trials")
    p.add_argument(
        "--tol", type=float, default=1e-6, help="early-stop slack against C_relax"
    )
    p.add_argument(
        "--oracle",
        action="store_true",
        help="also compute the true optimum by path enumeration",
    )
    p.add_argument(
        "--path-limit",
        type=int,
        default=10_000,
        help="refuse oracle enumeration beyond this many simple paths",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcsplan",
        description="Trajectory planning through unions of convex safe sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a trajectory for a problem JSON")
    p.add_argument("problem")
    p.add_argument("-o", "--output", default=None, help="trajectory JSON (default stdout)")
    p.add_argument("--record", default=None, help="also write a run record JSON")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="sweep a generator over seeds")
    p.add_argument("family", choices=["maze", "building"])
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--size", type=int, default=8, help="maze side length")
    p.add_argument("--removed", type=int, default=5, help="maze walls to remove")
    p.add_argument("-o", "--output", default=None, help="report JSON (default stdout)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="emit problem JSON for an instance family")
    p.add_argument(
        "family", choices=["maze", "building", "fixture-2d", "fixture-two-route"]
    )
    p.add_argument("--size", type=int, default=8)
    p.add_argument("--removed", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--objective", default="length", help="fixture-2d objective")
    p.add_argument("--ascii", action="store_true", help="print maze art to stderr")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("render", help="draw a 2D problem (and trajectory) as SVG")
    p.add_argument("problem")
    p.add_argument("trajectory", nargs="?", default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
