#!/usr/bin/env python3
"""Plan through the four-region 2D fixture under each objective.

The fixture admits exactly two routes: a short two-region corridor and a
longer three-region detour.  Which one wins depends on the objective mix,
so this doubles as a smoke test that the cost weights steer the planner.
Writes one SVG per objective next to a small JSON report.
"""

import argparse
import json
import pathlib

from gcsplan.environments import fixture_2d
from gcsplan.gcs import brute_force_optimum
from gcsplan.planner import plan_detailed
from gcsplan.render import render_svg
from gcsplan.rounding import RoundingConfig

OBJECTIVES = ("length", "time", "smooth_time")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("out/fixture2d"))
    ap.add_argument("--seed", type=int, default=0, help="rounding seed")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    report = {}
    for objective in OBJECTIVES:
        prob = fixture_2d(objective)
        res = plan_detailed(prob, rounding=RoundingConfig(seed=args.seed))
        c_relax = res.flows.objective
        c_round = res.rounding.best_cost
        c_opt, opt_path = brute_force_optimum(res.graph)
        route = [v for v in res.rounding.best_path if isinstance(v, int)]
        print(
            f"{objective:12s} route {route}  "
            f"C_relax {c_relax:.6f}  C_round {c_round:.6f}  C_opt {c_opt:.6f}  "
            f"T {res.trajectory.duration:.3f}s"
        )
        svg_path = args.out / f"fixture2d_{objective}.svg"
        svg_path.write_text(render_svg(prob, res.trajectory))
        report[objective] = {
            "route": route,
            "c_relax": c_relax,
            "c_round": c_round,
            "c_opt": c_opt,
            "duration": res.trajectory.duration,
            "delta_relax": (c_round - c_relax) / c_relax,
            "svg": svg_path.name,
        }

    (args.out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    print(f"wrote {args.out}/report.json and {len(OBJECTIVES)} SVGs")


if __name__ == "__main__":
    main()
