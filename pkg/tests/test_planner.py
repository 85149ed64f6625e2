"""Trajectory transcription and the end-to-end planning pipeline."""

import json

import numpy as np
import pytest

from gcsplan.bezier import BezierCurve
from gcsplan.gcs import GcsInfeasible
from gcsplan.geometry import ConvexSet
from gcsplan.planner import (
    HDOT_MIN_DEFAULT,
    PlanningProblem,
    PlanningSpec,
    Trajectory,
    build_graph,
    edge_constraints,
    edge_length,
    plan,
    plan_detailed,
    reconstruct,
    vertex_set,
)

ROOT10 = float(np.sqrt(10.0))

UNIT_BOX = ConvexSet.box([-1.0, -1.0], [1.0, 1.0])


def corridor_problem(**spec_kwargs) -> PlanningProblem:
    """Two overlapping boxes with a straight-line route of length 3."""
    defaults = dict(q0=(0.0, 0.5), qT=(3.0, 0.5), b=1.0, degree=1)
    defaults.update(spec_kwargs)
    return PlanningProblem(
        regions=(ConvexSet.box([0, 0], [2, 1]), ConvexSet.box([1, 0], [3, 1])),
        spec=PlanningSpec(**defaults),
    )


def elbow_problem(**spec_kwargs) -> PlanningProblem:
    """An L of two boxes; the shortest route bends at the inner corner
    (1, 2), giving length sqrt(10)."""
    defaults = dict(q0=(0.5, 0.5), qT=(2.5, 2.5), b=1.0, eta=1, degree=3)
    defaults.update(spec_kwargs)
    return PlanningProblem(
        regions=(ConvexSet.box([0, 0], [1, 3]), ConvexSet.box([0, 2], [3, 3])),
        spec=PlanningSpec(**defaults),
    )


# ---------------------------------------------------------------------------
# spec validation


class TestSpec:
    def test_defaults(self):
        spec = PlanningSpec(q0=(0, 0), qT=(1, 1))
        assert spec.hdot_min == HDOT_MIN_DEFAULT == 1e-6
        assert spec.degree == 1 and spec.eta == 0
        assert spec.dim == 2

    def test_degree_must_support_continuity(self):
        with pytest.raises(ValueError, match="too low"):
            PlanningSpec(q0=(0,), qT=(1,), eta=2, degree=2)

    def test_negative_weight(self):
        with pytest.raises(ValueError):
            PlanningSpec(q0=(0,), qT=(1,), a=-1.0)

    def test_time_window(self):
        with pytest.raises(ValueError):
            PlanningSpec(q0=(0,), qT=(1,), T_min=2.0, T_max=1.0)

    def test_hdot_floor_positive(self):
        with pytest.raises(ValueError):
            PlanningSpec(q0=(0,), qT=(1,), hdot_min=0.0)

    def test_dimension_agreement(self):
        with pytest.raises(ValueError):
            PlanningSpec(q0=(0, 0), qT=(1,))
        with pytest.raises(ValueError):
            PlanningSpec(q0=(0, 0), qT=(1, 1), qdot0=(1,))
        with pytest.raises(ValueError):
            PlanningSpec(q0=(0,), qT=(1,), velocity_set=UNIT_BOX)

    def test_regularizer_order_window(self):
        with pytest.raises(ValueError):
            PlanningSpec(q0=(0,), qT=(1,), eps=0.1, reg_order=1, degree=3)
        with pytest.raises(ValueError):
            PlanningSpec(q0=(0,), qT=(1,), eps=0.1, reg_order=4, degree=3)

    def test_zero_orders_need_pinned_velocities(self):
        with pytest.raises(ValueError, match="boundary velocities"):
            PlanningSpec(q0=(0,), qT=(1,), degree=4, zero_orders=(2,))

    def test_working_degree_takes_the_max(self):
        spec = PlanningSpec(q0=(0,), qT=(1,), degree=3, degree_h=5)
        assert spec.d == 5
        assert PlanningSpec(q0=(0,), qT=(1,), degree=3).d == 3

    def test_round_trip(self):
        spec = PlanningSpec(
            q0=(0, 0),
            qT=(1, 2),
            a=1.0,
            c=0.5,
            eta=2,
            degree=5,
            velocity_set=UNIT_BOX,
            qdot0=(0, 0),
            qdotT=(0, 0),
            zero_orders=(2,),
            eps=0.01,
            reg_order=3,
            hdot_min=0.1,
        )
        back = PlanningSpec.from_dict(spec.to_dict())
        assert back.to_dict() == spec.to_dict()
        free = PlanningSpec(q0=(0,), qT=(1,))
        assert PlanningSpec.from_dict(free.to_dict()).qdot0 is None


class TestProblem:
    def test_needs_regions(self):
        with pytest.raises(ValueError):
            PlanningProblem(regions=(), spec=PlanningSpec(q0=(0,), qT=(1,)))

    def test_region_dimensions_match_spec(self):
        with pytest.raises(ValueError):
            PlanningProblem(
                regions=(ConvexSet.box([0], [1]),),
                spec=PlanningSpec(q0=(0, 0), qT=(1, 1)),
            )

    def test_adjacency_bounds(self):
        regions = (ConvexSet.box([0], [1]), ConvexSet.box([0.5], [2]))
        spec = PlanningSpec(q0=(0.1,), qT=(1.5,))
        with pytest.raises(ValueError):
            PlanningProblem(regions=regions, spec=spec, adjacency=((0, 5),))
        with pytest.raises(ValueError):
            PlanningProblem(regions=regions, spec=spec, adjacency=((1, 1),))

    def test_round_trip(self):
        prob = corridor_problem()
        back = PlanningProblem.from_dict(prob.to_dict())
        assert back.to_dict() == prob.to_dict()


# ---------------------------------------------------------------------------
# transcription pieces


class TestVertexSet:
    SPEC = PlanningSpec(q0=(0, 0), qT=(1, 1), degree=2, hdot_min=0.1, T_max=10.0)
    REGION = ConvexSet.box([0, 0], [2, 2])

    def flat(self, r_points, h_points):
        return np.concatenate([np.ravel(r_points), np.ravel(h_points)])

    def test_accepts_a_clean_segment(self):
        vs = vertex_set(self.REGION, self.SPEC)
        assert vs.dim == 3 * 2 + 3
        x = self.flat([[0.2, 0.2], [1.0, 1.0], [1.8, 1.8]], [0.0, 1.0, 2.0])
        assert vs.contains(x)

    def test_rejects_control_point_outside_region(self):
        vs = vertex_set(self.REGION, self.SPEC)
        x = self.flat([[0.2, 0.2], [1.0, 2.5], [1.8, 1.8]], [0.0, 1.0, 2.0])
        assert not vs.contains(x)

    def test_rejects_slow_clock(self):
        vs = vertex_set(self.REGION, self.SPEC)
        # second interval rises at rate 2 * (2.0 - 1.99) = 0.02 < 0.1
        x = self.flat([[0.2, 0.2], [1.0, 1.0], [1.8, 1.8]], [0.0, 1.99, 2.0])
        assert not vs.contains(x)

    def test_rejects_overlong_clock(self):
        vs = vertex_set(self.REGION, self.SPEC)
        x = self.flat([[0.2, 0.2], [1.0, 1.0], [1.8, 1.8]], [0.0, 6.0, 12.0])
        assert not vs.contains(x)

    def test_velocity_bound_scales_with_the_clock(self):
        spec = PlanningSpec(
            q0=(0, 0), qT=(1, 1), degree=1, velocity_set=UNIT_BOX, hdot_min=0.1
        )
        vs = vertex_set(self.REGION, spec)
        # chord (2, 0) over duration 1 breaks |v| <= 1; over 2.5 it fits
        assert not vs.contains(self.flat([[0, 1], [2, 1]], [0.0, 1.0]))
        assert vs.contains(self.flat([[0, 1], [2, 1]], [0.0, 2.5]))


class TestEdgePieces:
    def test_internal_row_count_matches_continuity_order(self):
        spec = PlanningSpec(q0=(0, 0), qT=(1, 1), eta=1, degree=3)
        con = edge_constraints("internal", spec)
        assert con.A_eq.shape[0] == 2 * (2 + 1)  # (eta+1) * (n+1)
        assert con.A_ub is None

    def test_position_only_junction(self):
        spec = PlanningSpec(q0=(0, 0), qT=(1, 1), eta=0, degree=1)
        con = edge_constraints("internal", spec)
        assert con.A_eq.shape[0] == 3

    def test_source_pins_start_and_clock(self):
        spec = PlanningSpec(q0=(0, 0), qT=(1, 1), degree=2)
        con = edge_constraints("source", spec)
        assert con.A_eq.shape[0] == 3  # q0 (2 rows) + clock start (1 row)
        spec_v = PlanningSpec(q0=(0, 0), qT=(1, 1), degree=2, qdot0=(0, 0))
        assert edge_constraints("source", spec_v).A_eq.shape[0] == 5

    def test_target_window_is_inequality(self):
        spec = PlanningSpec(q0=(0, 0), qT=(1, 1), degree=2, T_min=0.5, T_max=4.0)
        con = edge_constraints("target", spec)
        assert con.A_ub.shape[0] == 2
        # a segment landing at T = 2 with the right endpoint passes
        x = np.concatenate([[0, 0, 0.5, 0.5, 1, 1], [0.0, 1.0, 2.0]])
        assert con.satisfied(x, np.zeros(0))

    def test_unknown_kind(self):
        spec = PlanningSpec(q0=(0,), qT=(1,))
        with pytest.raises(ValueError):
            edge_constraints("sideways", spec)
        with pytest.raises(ValueError):
            edge_length("sideways", spec)

    def test_source_edges_cost_nothing(self):
        spec = PlanningSpec(q0=(0,), qT=(1,), a=1.0, b=1.0)
        term = edge_length("source", spec)
        assert term.evaluate(np.zeros(0), np.arange(4.0)) == 0.0

    def test_duration_charge_reads_the_tail_clock(self):
        spec = PlanningSpec(q0=(0, 0), qT=(1, 1), a=2.0, degree=1)
        term = edge_length("internal", spec)
        xu = np.array([0.0, 0.0, 1.0, 1.0, 3.0, 5.5])  # h spans 2.5
        xv = np.zeros(6)
        assert abs(term.evaluate(xu, xv) - 5.0) <= 1e-12

    def test_length_charge_sums_chords(self):
        spec = PlanningSpec(q0=(0, 0), qT=(1, 1), b=1.0, degree=2)
        term = edge_length("target", spec)
        x = np.concatenate([[0, 0, 3, 4, 3, 16], [0.0, 0.5, 1.0]])
        assert abs(term.evaluate(x, np.zeros(0)) - 17.0) <= 1e-12


# ---------------------------------------------------------------------------
# graph construction


class TestBuildGraph:
    def test_chain_of_three_skips_terminal_reentry(self):
        spec = PlanningSpec(q0=(0.25,), qT=(2.75,), b=1.0)
        regions = (
            ConvexSet.box([0.0], [1.1]),
            ConvexSet.box([0.9], [2.1]),
            ConvexSet.box([1.9], [3.0]),
        )
        gcs = build_graph(PlanningProblem(regions=regions, spec=spec))
        assert set(gcs.edges) == {
            (gcs.source, 0),
            (0, 1),
            (1, 2),
            (2, gcs.target),
        }

    def test_shared_start_and_goal_region_keeps_both_directions(self):
        spec = PlanningSpec(q0=(0.95,), qT=(1.05,), b=1.0)
        regions = (ConvexSet.box([0.0], [1.1]), ConvexSet.box([0.9], [2.0]))
        gcs = build_graph(PlanningProblem(regions=regions, spec=spec))
        # both regions hold both endpoints: nothing can be skipped
        assert (0, 1) in gcs.edges and (1, 0) in gcs.edges
        assert len(gcs.out_edges(gcs.source)) == 2
        assert len(gcs.in_edges(gcs.target)) == 2

    def test_start_outside_every_region(self):
        spec = PlanningSpec(q0=(-5.0,), qT=(0.5,))
        with pytest.raises(GcsInfeasible, match="start point"):
            build_graph(
                PlanningProblem(regions=(ConvexSet.box([0], [1]),), spec=spec)
            )

    def test_goal_outside_every_region(self):
        spec = PlanningSpec(q0=(0.5,), qT=(9.0,))
        with pytest.raises(GcsInfeasible, match="goal point"):
            build_graph(
                PlanningProblem(regions=(ConvexSet.box([0], [1]),), spec=spec)
            )

    def test_adjacency_overrides_intersection(self):
        spec = PlanningSpec(q0=(0.25,), qT=(2.75,), b=1.0)
        regions = (
            ConvexSet.box([0.0], [1.1]),
            ConvexSet.box([0.9], [2.1]),
            ConvexSet.box([1.9], [3.0]),
        )
        prob = PlanningProblem(regions=regions, spec=spec, adjacency=((0, 1),))
        gcs = build_graph(prob)
        assert (1, 2) not in gcs.edges
        with pytest.raises(GcsInfeasible, match="disconnected"):
            plan_detailed(prob)

    def test_pure_time_objective_builds_an_lp(self):
        from gcsplan.gcs import build_relaxation

        spec = PlanningSpec(q0=(0.25,), qT=(1.75,), a=1.0)
        regions = (ConvexSet.box([0.0], [1.1]), ConvexSet.box([0.9], [2.0]))
        rel = build_relaxation(build_graph(PlanningProblem(regions=regions, spec=spec)))
        assert not rel.prog._cones


# ---------------------------------------------------------------------------
# trajectories and reconstruction


class TestTrajectory:
    def line(self, T=2.0):
        r = BezierCurve([[0.0, 0.0], [4.0, 0.0]])
        h = BezierCurve([[0.0], [T]])
        return Trajectory([(r, h)], [0])

    def test_duration_and_times(self):
        traj = self.line()
        assert traj.duration == 2.0
        assert np.allclose(traj.segment_times(), [0.0, 2.0])

    def test_position_is_time_parameterized(self):
        traj = self.line(T=2.0)
        assert np.allclose(traj.position(0.5), [1.0, 0.0])
        assert np.allclose(traj.velocity(0.5), [2.0, 0.0])

    def test_time_domain_enforced(self):
        with pytest.raises(ValueError):
            self.line().position(2.5)
        with pytest.raises(ValueError):
            self.line().path_position(1.5)

    def test_degree_agreement_enforced(self):
        r = BezierCurve([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        h = BezierCurve([[0.0], [1.0]])
        with pytest.raises(ValueError):
            Trajectory([(r, h)], [0])

    def test_round_trip(self):
        traj = self.line()
        d = traj.to_dict()
        json.dumps(d)
        back = Trajectory.from_dict(d)
        for t in np.linspace(0, 2, 9):
            assert np.allclose(back.position(t), traj.position(t))
        assert back.regions == traj.regions


class TestReconstruct:
    SPEC = PlanningSpec(q0=(0, 0), qT=(4, 0), degree=1)

    def test_single_segment(self):
        x = np.array([0.0, 0.0, 4.0, 0.0, 0.0, 2.0])
        traj = reconstruct(["s", 0, "t"], {0: x}, self.SPEC)
        assert traj.num_segments == 1
        assert np.allclose(traj.position(1.0), [2.0, 0.0])

    def test_rejects_stalled_clock(self):
        x = np.array([0.0, 0.0, 4.0, 0.0, 2.0, 2.0])
        with pytest.raises(ValueError, match="not strictly increasing"):
            reconstruct(["s", 0, "t"], {0: x}, self.SPEC)

    def test_rejects_wrong_width(self):
        with pytest.raises(ValueError, match="wrong size"):
            reconstruct(["s", 0, "t"], {0: np.zeros(5)}, self.SPEC)

    def test_rejects_empty_interior(self):
        with pytest.raises(ValueError, match="no region"):
            reconstruct(["s", "t"], {}, self.SPEC)


# ---------------------------------------------------------------------------
# the pipeline end to end


class TestPlan:
    def test_min_time_straight_run(self):
        spec = PlanningSpec(
            q0=(0.0, 0.0),
            qT=(3.0, 0.0),
            a=1.0,
            degree=1,
            velocity_set=UNIT_BOX,
        )
        prob = PlanningProblem(regions=(ConvexSet.box([-1, -1], [4, 1]),), spec=spec)
        traj, report = plan(prob)
        # unit speed limit over a 3-unit run: T = 3 exactly
        assert abs(traj.duration - 3.0) <= 1e-6
        assert abs(report.best_cost - 3.0) <= 1e-6
        assert traj.num_segments == 1
        assert np.allclose(traj.position(1.5), [1.5, 0.0], atol=1e-6)
        assert np.allclose(traj.velocity(1.5), [1.0, 0.0], atol=1e-5)

    def test_corridor_length(self):
        prob = corridor_problem()
        result = plan_detailed(prob)
        assert abs(result.rounding.best_cost - 3.0) <= 1e-6
        assert result.rounding.delta_relax <= 1e-6
        assert result.trajectory.num_segments == 2
        assert result.trajectory.validate(prob) == []

    def test_elbow_length(self):
        prob = elbow_problem()
        traj, report = plan(prob)
        # shortest route hugs the inner corner: sqrt(10)
        assert abs(report.best_cost - ROOT10) <= 1e-4 * ROOT10
        assert traj.validate(prob) == []

    def test_regularizer_weight_is_monotone(self):
        costs = [
            plan(elbow_problem(eps=eps))[1].best_cost for eps in (0.0, 0.05, 0.2)
        ]
        assert costs[0] <= costs[1] <= costs[2]
        assert costs[2] > costs[0] + 0.5  # bend curvature is actually charged

    def test_junction_continuity(self):
        prob = elbow_problem()
        traj, _ = plan(prob)
        assert traj.num_segments == 2
        (r0, h0), (r1, h1) = traj.segments
        assert np.allclose(r0.evaluate(1.0), r1.evaluate(0.0), atol=1e-6)
        d0, d1 = r0.derivative(), r1.derivative()
        assert np.allclose(d0.evaluate(1.0), d1.evaluate(0.0), atol=1e-6)
        assert abs(float(h0.evaluate(1.0)[0]) - float(h1.evaluate(0.0)[0])) <= 1e-6

    def test_speed_limit_holds_along_the_whole_run(self):
        spec_kwargs = dict(
            a=1.0,
            b=0.2,
            degree=3,
            eta=1,
            velocity_set=UNIT_BOX,
            hdot_min=1e-3,
        )
        prob = corridor_problem(**spec_kwargs)
        traj, _ = plan(prob)
        for t in np.linspace(0.0, traj.duration, 200):
            assert np.max(np.abs(traj.velocity(t))) <= 1.0 + 1e-6

    def test_toggles_do_not_move_the_answer_here(self):
        prob = corridor_problem()
        base = plan_detailed(prob).rounding.best_cost
        loose = plan_detailed(
            prob, use_preprocess=False, use_two_cycle=False
        ).rounding.best_cost
        assert abs(base - loose) <= 1e-6 * (1 + abs(base))

    def test_timings_cover_the_phases(self):
        result = plan_detailed(corridor_problem())
        assert set(result.timings) == {
            "preprocess",
            "relaxation",
            "rounding",
            "reconstruction",
        }
        assert all(v >= 0.0 for v in result.timings.values())
