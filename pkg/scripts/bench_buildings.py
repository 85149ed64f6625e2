#!/usr/bin/env python3
"""Benchmark the planner on randomly generated 3D buildings.

Each seed yields a 5x5-cell building whose free space is decomposed into
axis-aligned boxes; the quadrotor-style spec asks for C^4 continuity
with degree-7 curves and rest-to-rest boundary conditions.  These are
the hardest instances in the repo (SOCPs with a few thousand variables),
so the default sweep is short.  Writes per-seed records and a summary.
"""

import argparse
import json
import pathlib
import time

from gcsplan.environments import generate_building
from gcsplan.planner import plan_detailed
from gcsplan.rounding import RoundingConfig


def bench_one(seed: int) -> dict:
    building = generate_building(seed)
    prob = building.planning_problem()
    t0 = time.perf_counter()
    res = plan_detailed(prob, rounding=RoundingConfig(seed=seed))
    wall = time.perf_counter() - t0
    c_relax = res.flows.objective
    c_round = res.rounding.best_cost
    return {
        "seed": seed,
        "regions": len(prob.regions),
        "edges": len(res.graph.edges),
        "segments": res.trajectory.num_segments,
        "duration": res.trajectory.duration,
        "c_relax": c_relax,
        "c_round": c_round,
        "delta_relax": (c_round - c_relax) / c_relax,
        "issues": res.trajectory.validate(prob),
        "wall_s": wall,
        "timings": res.timings,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--out", type=pathlib.Path,
                    default=pathlib.Path("out/buildings.json"))
    args = ap.parse_args()

    records = []
    for seed in args.seeds:
        rec = bench_one(seed)
        records.append(rec)
        flag = "ok" if not rec["issues"] else f"ISSUES {rec['issues']}"
        print(
            f"seed {seed:3d}  regions {rec['regions']:3d}  "
            f"segments {rec['segments']:2d}  T {rec['duration']:6.2f}s  "
            f"delta_relax {rec['delta_relax']:.2e}  "
            f"wall {rec['wall_s']:6.1f}s  {flag}"
        )

    worst = max(r["delta_relax"] for r in records)
    clean = sum(not r["issues"] for r in records)
    summary = {
        "instances": len(records),
        "validated": clean,
        "worst_delta_relax": worst,
        "total_wall_s": sum(r["wall_s"] for r in records),
    }
    print(f"{clean}/{len(records)} validated, worst delta_relax {worst:.2e}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(
        json.dumps({"records": records, "summary": summary}, indent=2, sort_keys=True)
    )
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
