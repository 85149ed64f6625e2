#!/usr/bin/env python3
"""Generate one maze, plan through it, and show the route in ASCII.

Removing walls after carving opens alternative routes, which is what
makes the relaxation interesting; with zero removals the maze is a tree
and the graph has a unique simple path.  Reports C_relax, C_round and
the relative gap; ``--oracle`` additionally enumerates all simple paths
for the true optimum (feasible for small mazes only).
"""

import argparse
import pathlib
import sys

from gcsplan.environments import generate_maze
from gcsplan.gcs import brute_force_optimum
from gcsplan.planner import plan_detailed
from gcsplan.render import render_svg
from gcsplan.rounding import RoundingConfig


def route_overlay(maze, route) -> str:
    """ASCII art with ``*`` in every cell the planned route visits."""
    lines = [list(row) for row in maze.ascii_art().splitlines()]
    for region in route:
        x, y = maze.cell(region)
        lines[2 * (maze.height - 1 - y) + 1][3 * x + 1] = "*"
    return "\n".join("".join(row) for row in lines)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--width", type=int, default=15)
    ap.add_argument("--height", type=int, default=15)
    ap.add_argument("--remove", type=int, default=10, help="walls removed after carving")
    ap.add_argument("--seed", type=int, default=20)
    ap.add_argument("--oracle", action="store_true", help="brute-force the optimum")
    ap.add_argument("--svg", type=pathlib.Path, help="also write an SVG here")
    args = ap.parse_args()

    maze = generate_maze(args.width, args.height, args.remove, args.seed)
    prob = maze.planning_problem()
    res = plan_detailed(prob, rounding=RoundingConfig(seed=args.seed))

    route = [v for v in res.rounding.best_path if isinstance(v, int)]
    print(route_overlay(maze, route))
    c_relax = res.flows.objective
    c_round = res.rounding.best_cost
    print(f"route length {len(route)} cells")
    print(f"C_relax {c_relax:.6f}   C_round {c_round:.6f}   "
          f"delta_relax {(c_round - c_relax) / c_relax:.2e}")
    if args.oracle:
        c_opt, _ = brute_force_optimum(res.graph, path_limit=200_000)
        print(f"C_opt   {c_opt:.6f}   delta_opt   {(c_round - c_opt) / c_opt:.2e}")
    phases = "  ".join(f"{k} {v:.2f}s" for k, v in res.timings.items())
    print(f"timings: {phases}")
    issues = res.trajectory.validate(prob)
    if issues:
        print("validation issues:", *issues, sep="\n  ", file=sys.stderr)
        sys.exit(1)
    if args.svg:
        args.svg.parent.mkdir(parents=True, exist_ok=True)
        args.svg.write_text(render_svg(prob, res.trajectory))
        print(f"wrote {args.svg}")


if __name__ == "__main__":
    main()
