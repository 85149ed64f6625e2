"""Randomized depth-first rounding of relaxed flows into paths.

Starting from the source, the sampler walks the positive-flow support,
picking among edges to unvisited vertices with probability proportional
to their flows and backtracking out of dead ends (visited vertices stay
visited).  ``round`` repeats this until enough distinct paths are found
or the trial budget runs out, prices each path, and reports the best
together with the certified gap against the relaxation bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gcsplan.gcs import FlowSolution, GcsProblem, evaluate_path

# Flows at or below this are treated as absent during sampling; anything
# smaller is indistinguishable from interior-point noise.
FLOW_FLOOR = 1e-6


class SamplingDeadEnd(RuntimeError):
    """Backtracking exhausted the support without reaching the target."""


@dataclass(frozen=True)
class RoundingConfig:
    """Knobs for the rounding loop.

    ``num_paths`` distinct candidates are collected within at most
    ``max_trials`` sampler runs; ``tol`` is the early-stop slack on
    |cost - C_relax| (scaled by 1 + |C_relax|).
    """

    num_paths: int = 10
    max_trials: int = 100
    seed: int = 0
    tol: float = 1e-6

    def __post_init__(self):
        if self.num_paths < 1:
            raise ValueError("need at least one target path")
        if self.max_trials < self.num_paths:
            raise ValueError("trial budget below target path count")


@dataclass(frozen=True)
class RoundingReport:
    best_path: tuple | None
    best_cost: float
    evaluated: tuple  # ((path, cost), ...) in evaluation order
    c_relax: float
    delta_relax: float
    early_stop: bool
    trials: int
    sample_failures: int
    seed: int

    def to_dict(self) -> dict:
        def num(x):
            return x if np.isfinite(x) else "inf"

        return {
            "best_path": None if self.best_path is None else list(self.best_path),
            "c_round": num(self.best_cost),
            "c_relax": num(self.c_relax),
            "delta_relax": num(self.delta_relax),
            "evaluated": [
                {"path": list(p), "cost": num(c)} for p, c in self.evaluated
            ],
            "early_stop": self.early_stop,
            "trials": self.trials,
            "sample_failures": self.sample_failures,
            "seed": self.seed,
        }


def _support(problem: GcsProblem, flows: FlowSolution):
    """Out-edge lists restricted to flows above the floor."""
    keep = {}
    for vid in problem.vertices:
        keep[vid] = [
            key for key in problem.out_edges(vid) if flows.phi[key] > FLOW_FLOOR
        ]
    return keep


def _walk(problem, support, flows, pick):
    """Depth-first walk from source to target; ``pick`` chooses an edge."""
    src, tgt = problem.source, problem.target
    if not support[src]:
        raise SamplingDeadEnd(
            "no flow leaves the source above the floor; the relaxation is "
            "infeasible or its support was pruned away"
        )
    path = [src]
    visited = {src}
    while path:
        here = path[-1]
        options = [key for key in support[here] if key[1] not in visited]
        if not options:
            path.pop()
            continue
        key = pick(options)
        nxt = key[1]
        if nxt == tgt:
            return path + [tgt]
        visited.add(nxt)
        path.append(nxt)
    raise SamplingDeadEnd(
        "backtracking exhausted the flow support without reaching the target"
    )


def sample_path(problem: GcsProblem, flows: FlowSolution, rng: np.random.Generator):
    """One randomized path: edges drawn with probability flow/total flow."""
    support = _support(problem, flows)

    def pick(options):
        weights = np.array([flows.phi[key] for key in options])
        total = weights.sum()
        draw = rng.random() * total
        cum = 0.0
        for key, w in zip(options, weights):
            cum += w
            if draw < cum:
                return key
        return options[-1]

    return _walk(problem, support, flows, pick)


def greedy_path(problem: GcsProblem, flows: FlowSolution):
    """Deterministic max-flow-first walk.

    Test foil only: on symmetric instances this commits to whichever
    branch carries marginally more flow, which can be strictly worse than
    what the randomized sampler finds.  Not used by the planner.
    """
    support = _support(problem, flows)

    def pick(options):
        weights = [flows.phi[key] for key in options]
        return options[int(np.argmax(weights))]

    return _walk(problem, support, flows, pick)


def round(
    problem: GcsProblem,
    flows: FlowSolution,
    config: RoundingConfig = RoundingConfig(),
) -> RoundingReport:
    """Best-of-N rounding with early stop at the relaxation bound.

    Paths are deduplicated as vertex sequences; each new one is priced
    immediately so the early-stop decision is deterministic given the
    seed.  Infeasible paths are kept in the report with infinite cost.
    """
    rng = np.random.default_rng(config.seed)
    c_relax = flows.objective
    slack = config.tol * (1.0 + abs(c_relax))
    seen: set[tuple] = set()
    evaluated: list[tuple] = []
    best_cost = float("inf")
    best_path = None
    early = False
    trials = 0
    failures = 0
    while trials < config.max_trials and len(seen) < config.num_paths:
        trials += 1
        try:
            path = tuple(sample_path(problem, flows, rng))
        except SamplingDeadEnd:
            failures += 1
            continue
        if path in seen:
            continue
        seen.add(path)
        result = evaluate_path(problem, path)
        evaluated.append((path, result.cost))
        if result.cost < best_cost:
            best_cost = result.cost
            best_path = path
        if best_cost - c_relax <= slack:
            early = True
            break
    delta = _delta_relax(c_relax, best_cost, slack)
    return RoundingReport(
        best_path=best_path,
        best_cost=best_cost,
        evaluated=tuple(evaluated),
        c_relax=c_relax,
        delta_relax=delta,
        early_stop=early,
        trials=trials,
        sample_failures=failures,
        seed=config.seed,
    )


def _delta_relax(c_relax: float, c_round: float, slack: float) -> float:
    """(C_round - C_relax) / C_relax with the zero/negative edge cases pinned."""
    if not np.isfinite(c_round):
        return float("inf")
    if c_relax <= 0.0:
        # Nonnegative lengths keep C_relax >= 0 up to solver noise; a zero
        # bound with a zero rounded cost is a closed gap, anything else
        # leaves the ratio undefined.
        return 0.0 if abs(c_round) <= slack else float("inf")
    return max((c_round - c_relax) / c_relax, 0.0)
