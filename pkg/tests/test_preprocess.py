"""Edge redundancy filtering and two-cycle tightening."""

import json

import pytest

from conftest import (
    UNIQUE_PATH,
    _distance_length,
    chain_graph,
    diamond_graph,
    random_gcs,
    spur_graph,
    unique_path_eight,
)
from gcsplan.gcs import (
    brute_force_optimum,
    build_relaxation,
    enumerate_simple_paths,
    solve_relaxation,
)
from gcsplan.preprocess import add_two_cycle_constraints, edge_redundancy_filter


def crossed_diamond():
    """Symmetric diamond plus a reciprocal rung between the branches."""
    prob = diamond_graph()
    prob.add_edge("top", "bot", _distance_length(2, 2))
    prob.add_edge("bot", "top", _distance_length(2, 2))
    return prob


def reciprocal_pairs(prob) -> int:
    return sum(
        1 for (u, v) in prob.edges if (v, u) in prob.edges and not u > v
    )


# ---------------------------------------------------------------------------
# two-cycle tightening


def test_no_reciprocal_pairs_nothing_added():
    rel = build_relaxation(chain_graph())
    assert add_two_cycle_constraints(rel) == 0


def test_four_constraints_per_pair():
    rel = build_relaxation(crossed_diamond())
    assert add_two_cycle_constraints(rel) == 4
    rel8 = build_relaxation(unique_path_eight())
    assert reciprocal_pairs(unique_path_eight()) == 2
    assert add_two_cycle_constraints(rel8) == 8


def test_tightening_is_monotone_and_safe():
    """Adding the cuts can only raise the bound, never past the optimum."""
    checked = 0
    for prob in [crossed_diamond()] + [random_gcs(s) for s in range(10)]:
        if reciprocal_pairs(prob) == 0:
            continue
        before = solve_relaxation(prob).objective
        rel = build_relaxation(prob)
        add_two_cycle_constraints(rel)
        after = rel.solve().objective
        opt, _ = brute_force_optimum(prob)
        assert after >= before - 1e-7 * (1 + abs(before))
        assert after <= opt + 1e-6 * (1 + abs(opt))
        checked += 1
    assert checked >= 3  # the sweep actually exercised reciprocal pairs


# ---------------------------------------------------------------------------
# redundancy filter


def test_dead_spur_is_removed():
    prob = spur_graph()
    pruned, report = edge_redundancy_filter(prob)
    assert ("B", "C") not in pruned.edges
    assert report.edge_status[("B", "C")] == "removed"
    cost, path = brute_force_optimum(pruned)
    assert abs(cost - 2.8) <= 1e-6
    assert path == ["s", "A", "B", "t"]


def test_every_off_path_edge_is_removed():
    prob = unique_path_eight()
    pruned, report = edge_redundancy_filter(prob)
    path_edges = set(zip(UNIQUE_PATH, UNIQUE_PATH[1:]))
    assert set(pruned.edges) == path_edges
    assert len(report.removed) == len(prob.edges) - len(path_edges)


@pytest.mark.parametrize("seed", range(12))
def test_filter_never_shifts_the_optimum(seed):
    prob = random_gcs(seed)
    opt, _ = brute_force_optimum(prob)
    pruned, _ = edge_redundancy_filter(prob)
    opt2, _ = brute_force_optimum(pruned)
    assert abs(opt - opt2) <= 1e-8 * (1 + abs(opt))


@pytest.mark.parametrize("seed", [0, 2, 4, 6])
def test_removals_certified_against_enumeration(seed):
    """No removed edge appears on any simple source-target path."""
    prob = random_gcs(seed)
    paths = enumerate_simple_paths(prob)
    used = {pair for p in paths for pair in zip(p, p[1:])}
    _, report = edge_redundancy_filter(prob)
    for key, status in report.edge_status.items():
        if key in used:
            assert status == "kept", f"live edge {key} was removed"


def test_filter_is_idempotent():
    prob = unique_path_eight()
    pruned, _ = edge_redundancy_filter(prob)
    again, report = edge_redundancy_filter(pruned)
    assert not report.removed
    assert set(again.edges) == set(pruned.edges)


def test_report_serializes():
    _, report = edge_redundancy_filter(spur_graph())
    report.two_cycle_pairs = 1
    d = report.to_dict()
    assert d["two_cycle_pairs"] == 1
    assert {"u": "B", "v": "C", "reason": "multiflow LP infeasible"} in d["removed"]
    assert len(d["edge_status"]) == 4
    json.dumps(d)
