"""Shared instance builders and the acceptance-criteria reporter.

The builders here are deliberately independent of the planner module:
graphs are assembled by hand so the tests can state expected structure
without trusting the code under test.
"""

from __future__ import annotations

import numpy as np
import pytest

from gcsplan.gcs import EdgeConstraint, EdgeLength, GcsProblem
from gcsplan.geometry import ConvexSet

# ---------------------------------------------------------------------------
# acceptance reporting: each criterion test records one line; the terminal
# summary replays them so a plain pytest run always shows the verdicts.

ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture
def acceptance():
    def record(criterion: int, passed: bool, detail: str):
        ACCEPTANCE_LINES.append((criterion, passed, detail))
        assert passed, f"criterion {criterion}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(ACCEPTANCE_LINES):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{verdict} criterion {criterion}: {detail}")


# ---------------------------------------------------------------------------
# hand-built graphs


def _distance_length(nu: int, nv: int) -> EdgeLength:
    """Euclidean distance between the tail point and the head point."""
    C = np.hstack([-np.eye(nu), np.eye(nv)])
    return EdgeLength.l2_sum([(C, np.zeros(nu))])


def _pin_head(nu: int, point) -> EdgeConstraint:
    """Force the head point of an edge to a fixed location."""
    point = np.asarray(point, dtype=float)
    A = np.hstack([np.zeros((point.size, nu)), np.eye(point.size)])
    return EdgeConstraint.equalities(A, point)


def chain_graph(goal=(4.0, 0.0)) -> GcsProblem:
    """sigma -> A -> B -> tau with one route and Euclidean step costs."""
    prob = GcsProblem()
    prob.add_vertex("s")
    prob.add_vertex("t")
    prob.add_vertex("A", ConvexSet.box([0, -1], [2, 1]))
    prob.add_vertex("B", ConvexSet.box([1, -1], [4, 1]))
    prob.add_edge("s", "A", constraint=_pin_head(0, [0.0, 0.0]))
    prob.add_edge("A", "B", _distance_length(2, 2))
    goal_term = EdgeLength.l2_sum([(np.hstack([np.eye(2), np.zeros((2, 0))]),
                                    -np.asarray(goal, float))])
    prob.add_edge("B", "t", goal_term)
    prob.set_source("s")
    prob.set_target("t")
    return prob


def diamond_graph(shift_top=0.0, shift_bottom=0.0) -> GcsProblem:
    """Two parallel two-hop branches; shifts stretch one branch's geometry.

    With both shifts zero the branches are mirror images and the
    relaxation happily splits flow half and half.
    """
    prob = GcsProblem()
    prob.add_vertex("s")
    prob.add_vertex("t")
    prob.add_vertex("top", ConvexSet.box([1, 1 + shift_top], [3, 3 + shift_top]))
    prob.add_vertex("bot", ConvexSet.box([1, -3 - shift_bottom], [3, -1 - shift_bottom]))
    start = np.array([0.0, 0.0])
    goal = np.array([4.0, 0.0])
    for vid in ("top", "bot"):
        prob.add_edge("s", vid, EdgeLength.l2_sum([(np.eye(2), -start)]))
        prob.add_edge(vid, "t", EdgeLength.l2_sum([(np.eye(2), -goal)]))
    prob.set_source("s")
    prob.set_target("t")
    return prob


def spur_graph() -> GcsProblem:
    """A chain with a positive-flow-lookalike dead-end spur hanging off it.

    sigma -> A -> B -> tau plus B -> C where C has no way out; used to
    exercise sampler backtracking and the redundancy filter.
    """
    prob = GcsProblem()
    prob.add_vertex("s")
    prob.add_vertex("t")
    for vid, lo in (("A", 0.0), ("B", 1.0), ("C", 2.0)):
        prob.add_vertex(vid, ConvexSet.box([lo, 0], [lo + 1.5, 1]))
    prob.add_edge("s", "A", constraint=_pin_head(0, [0.2, 0.5]))
    prob.add_edge("A", "B", _distance_length(2, 2))
    prob.add_edge("B", "C", _distance_length(2, 2))
    goal_term = EdgeLength.l2_sum([(np.eye(2), -np.array([3.0, 0.5]))])
    prob.add_edge("B", "t", goal_term)
    prob.set_source("s")
    prob.set_target("t")
    return prob


def unique_path_eight() -> GcsProblem:
    """Eight vertices whose only sigma-tau route is s -> A -> B -> tau.

    A cluster C..F dangles off B with plenty of internal (partly
    reciprocal) edges, but nothing in the cluster reaches tau, so every
    one of its edges is redundant, as are the reverse edges along the
    main chain.
    """
    prob = GcsProblem()
    prob.add_vertex("s")
    prob.add_vertex("t")
    for i, vid in enumerate("ABCDEF"):
        prob.add_vertex(vid, ConvexSet.box([i, 0], [i + 1.5, 1]))
    d = _distance_length
    prob.add_edge("s", "A", constraint=_pin_head(0, [0.5, 0.5]))
    prob.add_edge("A", "B", d(2, 2))
    prob.add_edge("B", "A", d(2, 2))  # reverse of a path edge
    prob.add_edge("B", "t", EdgeLength.l2_sum([(np.eye(2), -np.array([3.0, 0.5]))]))
    prob.add_edge("B", "C", d(2, 2))
    prob.add_edge("C", "D", d(2, 2))
    prob.add_edge("D", "C", d(2, 2))
    prob.add_edge("D", "E", d(2, 2))
    prob.add_edge("E", "F", d(2, 2))
    prob.add_edge("F", "C", d(2, 2))
    prob.set_source("s")
    prob.set_target("t")
    return prob


UNIQUE_PATH = ("s", "A", "B", "t")


# ---------------------------------------------------------------------------
# seeded random instances (acceptance criteria 1 and 7)


def random_gcs(seed: int, path_cap: int = 60) -> GcsProblem:
    """A small random planar-ish instance with at most ``path_cap`` routes.

    Boxes scattered in the plane, Euclidean step costs, a pinned start
    per source edge and a goal-distance charge on every target edge.
    Edge density is retried (deterministically) until the simple-path
    count fits under the cap, so enumeration stays cheap.
    """
    from gcsplan.gcs import enumerate_simple_paths

    rng = np.random.default_rng(seed)
    for _attempt in range(64):
        n = int(rng.integers(3, 9))
        prob = GcsProblem()
        prob.add_vertex("s")
        prob.add_vertex("t")
        centers = rng.uniform(0.0, 10.0, (n, 2))
        for i in range(n):
            half = rng.uniform(0.6, 2.0, 2)
            prob.add_vertex(i, ConvexSet.box(centers[i] - half, centers[i] + half))
        p_edge = rng.uniform(0.2, 0.4)
        for i in range(n):
            for j in range(n):
                if i != j and rng.random() < p_edge:
                    prob.add_edge(i, j, _distance_length(2, 2))
        starts = rng.choice(n, size=min(n, 2), replace=False)
        for i in starts:
            prob.add_edge("s", int(i), constraint=_pin_head(0, centers[i]))
        goal = rng.uniform(0.0, 10.0, 2)
        ends = rng.choice(n, size=min(n, 2), replace=False)
        for i in ends:
            prob.add_edge(int(i), "t", EdgeLength.l2_sum([(np.eye(2), -goal)]))
        prob.set_source("s")
        prob.set_target("t")
        try:
            paths = enumerate_simple_paths(prob, limit=path_cap)
        except ValueError:
            continue
        if paths:
            return prob
    raise RuntimeError(f"no usable random instance for seed {seed}")
