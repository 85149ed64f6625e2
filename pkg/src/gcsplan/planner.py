"""Motion planning through unions of convex safe regions.

Each safe region becomes a graph vertex whose variables are the control
points of a position curve r (degree d, dimension n) and a scalar
time-scaling curve h over the same parameter; edges link overlapping
regions and carry smoothness constraints plus the travel cost of the
tail segment.  Solving the graph problem and rounding yields a region
sequence; its solved control points are reassembled into a trajectory
q(t) = r(h^-1(t)).

A vertex's flat variable layout is ``[r_0, .., r_d, h_0, .., h_d]`` with
each r_k of dimension n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from gcsplan.bezier import BezierCurve, derivative_matrix
from gcsplan.geometry import ConvexSet
from gcsplan.gcs import (
    EdgeConstraint,
    EdgeLength,
    GcsInfeasible,
    GcsProblem,
    build_relaxation,
    evaluate_path,
)
from gcsplan.preprocess import (
    PreprocessReport,
    add_two_cycle_constraints,
    edge_redundancy_filter,
)
from gcsplan.rounding import RoundingConfig, RoundingReport, round as round_flows

SOURCE = "source"
TARGET = "target"

# Default floor on the time-scaling derivative; keeps h invertible and
# the energy denominators positive without noticeably constraining
# timing unless raised on purpose.
HDOT_MIN_DEFAULT = 1e-6


@dataclass(frozen=True)
class PlanningSpec:
    """Objective weights, smoothness requirements, and boundary data.

    The objective per segment is  a * duration + b * length-bound +
    c * energy-bound + eps * high-order regularizer.  ``velocity_set``
    of None leaves velocity unconstrained; boundary velocities of None
    are free.  ``zero_orders`` lists derivative orders l >= 2 pinned to
    zero at both trajectory ends (requires fixed boundary velocities).

    ``degree_h`` requests a different degree for the time scaling; both
    curves are normalized to the larger degree before transcription, so
    it only ever raises the working degree.
    """

    q0: tuple
    qT: tuple
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    eta: int = 0
    degree: int = 1
    velocity_set: ConvexSet | None = None
    T_min: float = 1e-2
    T_max: float = 1e3
    qdot0: tuple | None = None
    qdotT: tuple | None = None
    zero_orders: tuple = ()
    hdot_min: float = HDOT_MIN_DEFAULT
    eps: float = 0.0
    reg_order: int = 2
    degree_h: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "q0", tuple(float(v) for v in self.q0))
        object.__setattr__(self, "qT", tuple(float(v) for v in self.qT))
        for name in ("qdot0", "qdotT"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, tuple(float(v) for v in val))
        object.__setattr__(
            self, "zero_orders", tuple(int(l) for l in self.zero_orders)
        )
        if min(self.a, self.b, self.c, self.eps) < 0:
            raise ValueError("objective weights must be nonnegative")
        if self.eta < 0:
            raise ValueError("smoothness order must be nonnegative")
        if self.d < self.eta + 1:
            raise ValueError(
                f"degree {self.d} too low for C^{self.eta} continuity; "
                f"need at least {self.eta + 1}"
            )
        if not (0.0 < self.T_min <= self.T_max):
            raise ValueError("need 0 < T_min <= T_max")
        if self.hdot_min <= 0:
            raise ValueError("hdot_min must be positive")
        if self.c > 0 and self.hdot_min == 0:
            raise ValueError("energy weight needs a positive hdot_min")
        if self.eps > 0:
            if self.reg_order < 2:
                raise ValueError("regularizer order starts at 2")
            if self.reg_order > self.d:
                raise ValueError(
                    f"regularizer order {self.reg_order} exceeds degree {self.d}"
                )
        n = len(self.q0)
        if len(self.qT) != n:
            raise ValueError("q0 and qT dimensions differ")
        for name in ("qdot0", "qdotT"):
            val = getattr(self, name)
            if val is not None and len(val) != n:
                raise ValueError(f"{name} has wrong dimension")
        if self.velocity_set is not None and self.velocity_set.dim != n:
            raise ValueError("velocity set dimension mismatch")
        for l in self.zero_orders:
            if l < 2 or l > self.d:
                raise ValueError(f"zero-derivative order {l} outside [2, {self.d}]")
        if self.zero_orders and (self.qdot0 is None or self.qdotT is None):
            raise ValueError(
                "zero-derivative boundary orders need fixed boundary velocities"
            )

    @property
    def d(self) -> int:
        """Working degree: r and h always share the larger request."""
        if self.degree_h is None:
            return self.degree
        return max(self.degree, self.degree_h)

    @property
    def dim(self) -> int:
        return len(self.q0)

    def to_dict(self) -> dict:
        out = {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "eta": self.eta,
            "degree": self.degree,
            "D": None if self.velocity_set is None else self.velocity_set.to_dict(),
            "Tmin": self.T_min,
            "Tmax": self.T_max,
            "q0": list(self.q0),
            "qT": list(self.qT),
            "qdot0": "free" if self.qdot0 is None else list(self.qdot0),
            "qdotT": "free" if self.qdotT is None else list(self.qdotT),
            "hdot_min": self.hdot_min,
            "eps": self.eps,
            "reg_order": self.reg_order,
        }
        if self.zero_orders:
            out["zero_orders"] = list(self.zero_orders)
        if self.degree_h is not None:
            out["degree_h"] = self.degree_h
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "PlanningSpec":
        def vel(key):
            v = d.get(key, "free")
            return None if v in (None, "free") else tuple(v)

        D = d.get("D")
        return cls(
            q0=tuple(d["q0"]),
            qT=tuple(d["qT"]),
            a=d.get("a", 0.0),
            b=d.get("b", 0.0),
            c=d.get("c", 0.0),
            eta=d.get("eta", 0),
            degree=d.get("degree", d.get("eta", 0) + 1),
            velocity_set=None if D is None else ConvexSet.from_dict(D),
            T_min=d.get("Tmin", 1e-2),
            T_max=d.get("Tmax", 1e3),
            qdot0=vel("qdot0"),
            qdotT=vel("qdotT"),
            zero_orders=tuple(d.get("zero_orders", ())),
            hdot_min=d.get("hdot_min", HDOT_MIN_DEFAULT),
            eps=d.get("eps", 0.0),
            reg_order=d.get("reg_order", 2),
            degree_h=d.get("degree_h"),
        )


@dataclass(frozen=True)
class PlanningProblem:
    """Safe regions plus the planning spec; regions share dimension n.

    ``adjacency`` optionally fixes which unordered region pairs are
    linked, overriding the default all-pairs intersection test — the
    maze generator uses this so that cells touching only through a wall
    stay unlinked.
    """

    regions: tuple
    spec: PlanningSpec
    adjacency: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        if not self.regions:
            raise ValueError("need at least one safe region")
        n = self.spec.dim
        for i, Q in enumerate(self.regions):
            if Q.dim != n:
                raise ValueError(f"region {i} has dimension {Q.dim}, spec has {n}")
        if self.adjacency is not None:
            pairs = []
            for i, j in self.adjacency:
                if not (0 <= i < len(self.regions) and 0 <= j < len(self.regions)):
                    raise ValueError(f"adjacency pair ({i},{j}) out of range")
                if i == j:
                    raise ValueError("adjacency cannot pair a region with itself")
                pairs.append((int(i), int(j)))
            object.__setattr__(self, "adjacency", tuple(pairs))

    def to_dict(self) -> dict:
        out = {
            "regions": [Q.to_dict() for Q in self.regions],
            "spec": self.spec.to_dict(),
        }
        if self.adjacency is not None:
            out["adjacency"] = [list(p) for p in self.adjacency]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "PlanningProblem":
        adj = d.get("adjacency")
        return cls(
            regions=tuple(ConvexSet.from_dict(s) for s in d["regions"]),
            spec=PlanningSpec.from_dict(d["spec"]),
            adjacency=None if adj is None else tuple(tuple(p) for p in adj),
        )


# ---------------------------------------------------------------------------
# transcription: vertex sets, edge constraints, edge lengths


def _width(d: int, n: int) -> int:
    return (d + 1) * (n + 1)


def _r_block(d: int, n: int, k: int) -> slice:
    return slice(k * n, (k + 1) * n)


def _h_col(d: int, n: int, k: int) -> int:
    return (d + 1) * n + k


def _normalize_rows(A, b):
    """Scale each constraint row of (A, b) to unit max-abs coefficient.

    Exact reformulation; keeps high-order derivative rows (factors up
    to d!/(d-l)!) and large duration bounds from spreading the
    assembled matrix over many orders of magnitude, which interior
    point solvers pay for on the bigger instances.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    s = np.maximum(np.abs(A).max(axis=1), np.abs(b))
    s[s == 0.0] = 1.0
    return A / s[:, None], b / s


def vertex_set(region: ConvexSet, spec: PlanningSpec) -> ConvexSet:
    """All constraints local to one segment, as a polytope over its
    control points: containment of every r_k in the region, the floor on
    every hdot_k, the scaled velocity bound, and the time window."""
    d, n = spec.d, region.dim
    W = _width(d, n)
    AQ, bQ = region.halfspaces()
    rows: list[np.ndarray] = []
    rhs: list[np.ndarray] = []
    for k in range(d + 1):
        block = np.zeros((AQ.shape[0], W))
        block[:, _r_block(d, n, k)] = AQ
        rows.append(block)
        rhs.append(bQ)
    D1 = derivative_matrix(d, 1)
    for k in range(d):
        row = np.zeros((1, W))
        for m in range(d + 1):
            if D1[k, m]:
                row[0, _h_col(d, n, m)] = -D1[k, m]
        rows.append(row)
        rhs.append(np.array([-spec.hdot_min]))
    if spec.velocity_set is not None:
        AD, bD = spec.velocity_set.halfspaces()
        for k in range(d):
            block = np.zeros((AD.shape[0], W))
            for m in range(d + 1):
                if D1[k, m]:
                    block[:, _r_block(d, n, m)] += D1[k, m] * AD
                    block[:, _h_col(d, n, m)] += -D1[k, m] * bD
            rows.append(block)
            rhs.append(np.zeros(AD.shape[0]))
    tail = np.zeros((2, W))
    tail[0, _h_col(d, n, 0)] = -1.0  # h_0 >= 0
    tail[1, _h_col(d, n, d)] = 1.0  # h_d <= T_max
    rows.append(tail)
    rhs.append(np.array([0.0, spec.T_max]))
    lo_r, hi_r = region.bounding_box()
    lo = np.concatenate([np.tile(lo_r, d + 1), np.zeros(d + 1)])
    hi = np.concatenate([np.tile(hi_r, d + 1), np.full(d + 1, spec.T_max)])
    A_all, b_all = _normalize_rows(np.vstack(rows), np.concatenate(rhs))
    return ConvexSet.h_polytope(A_all, b_all, bounding_box=(lo, hi))


def _deriv_row(d: int, n: int, order: int, k: int, width: int, offset: int = 0):
    """Rows picking the k-th control point of the order-th derivative of
    r (n rows) and of h (1 row) out of a width-``width`` layout."""
    Dl = derivative_matrix(d, order)
    r_rows = np.zeros((n, width))
    h_row = np.zeros((1, width))
    for m in range(d + 1):
        if Dl[k, m]:
            r_rows[:, offset + m * n : offset + (m + 1) * n] = Dl[k, m] * np.eye(n)
            h_row[0, offset + _h_col(d, n, m)] = Dl[k, m]
    return r_rows, h_row


def edge_constraints(kind: str, spec: PlanningSpec) -> EdgeConstraint:
    """Linking constraints for one edge kind.

    ``source``: clamp the first control points to the start state and
    start the clock at zero.  ``target``: clamp the last control points
    to the goal state and land inside the duration window.
    ``internal``: match position and time-scaling derivatives up to
    order eta across the junction.
    """
    d, n = spec.d, spec.dim
    W = _width(d, n)
    if kind == "internal":
        width = 2 * W
        A = []
        b = []
        for l in range(spec.eta + 1):
            r_i, h_i = _deriv_row(d, n, l, d - l, width, offset=0)
            r_j, h_j = _deriv_row(d, n, l, 0, width, offset=W)
            A.append(r_i - r_j)
            b.append(np.zeros(n))
            A.append(h_i - h_j)
            b.append(np.zeros(1))
        return EdgeConstraint.make(
            *_normalize_rows(np.vstack(A), np.concatenate(b))
        )
    if kind not in ("source", "target"):
        raise ValueError(f"unknown edge kind {kind!r}")
    at_start = kind == "source"
    q = np.asarray(spec.q0 if at_start else spec.qT)
    qdot = spec.qdot0 if at_start else spec.qdotT
    end_k = 0 if at_start else d
    A = []
    b = []
    pos = np.zeros((n, W))
    pos[:, _r_block(d, n, end_k)] = np.eye(n)
    A.append(pos)
    b.append(q)
    if qdot is not None:
        # rdot = hdot * qdot at the boundary control point.
        r1, h1 = _deriv_row(d, n, 1, 0 if at_start else d - 1, W)
        A.append(r1 - np.asarray(qdot)[:, None] * h1)
        b.append(np.zeros(n))
    for l in spec.zero_orders:
        # q^(l) = 0 maps to r^(l) = h^(l) * qdot at the boundary.
        rl, hl = _deriv_row(d, n, l, 0 if at_start else d - l, W)
        A.append(rl - np.asarray(qdot)[:, None] * hl)
        b.append(np.zeros(n))
    A_ub = b_ub = None
    if at_start:
        clock = np.zeros((1, W))
        clock[0, _h_col(d, n, 0)] = 1.0
        A.append(clock)
        b.append(np.zeros(1))
    else:
        window = np.zeros((2, W))
        window[0, _h_col(d, n, d)] = 1.0  # h_d <= T_max
        window[1, _h_col(d, n, d)] = -1.0  # h_d >= T_min
        A_ub, b_ub = _normalize_rows(window, np.array([spec.T_max, -spec.T_min]))
    A_eq, b_eq = _normalize_rows(np.vstack(A), np.concatenate(b))
    return EdgeConstraint.make(A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub)


def regularizer_terms(spec: PlanningSpec, nuv: int) -> list:
    """Weighted quad-over-lin addends penalizing orders 2..reg_order.

    Each order-l derivative curve has d-l+1 control points; the bound on
    its squared-magnitude integral is their mean of squares, entering as
    rotated cones with unit denominators.
    """
    d, n = spec.d, spec.dim
    terms = []
    for l in range(2, spec.reg_order + 1):
        blocks = []
        for k in range(d - l + 1):
            r_rows, h_row = _deriv_row(d, n, l, k, nuv)
            C = np.vstack([r_rows, h_row])
            blocks.append((C, np.zeros(n + 1), np.zeros(nuv), 1.0))
        terms.append(
            (spec.eps / (d - l + 1), EdgeLength.quad_over_lin_sum(blocks))
        )
    return terms


def edge_length(kind: str, spec: PlanningSpec) -> EdgeLength:
    """Cost of one edge: zero for source edges, otherwise the tail
    segment's duration, length bound, energy bound, and regularizer."""
    if kind == "source":
        return EdgeLength.zero()
    if kind not in ("internal", "target"):
        raise ValueError(f"unknown edge kind {kind!r}")
    d, n = spec.d, spec.dim
    W = _width(d, n)
    nuv = 2 * W if kind == "internal" else W
    terms = []
    if spec.a > 0:
        coef = np.zeros(nuv)
        coef[_h_col(d, n, d)] = 1.0
        coef[_h_col(d, n, 0)] = -1.0
        terms.append((spec.a, EdgeLength.affine(coef)))
    if spec.b > 0:
        blocks = []
        for k in range(d):
            C = np.zeros((n, nuv))
            C[:, _r_block(d, n, k + 1)] = np.eye(n)
            C[:, _r_block(d, n, k)] = -np.eye(n)
            blocks.append((C, np.zeros(n)))
        terms.append((spec.b, EdgeLength.l2_sum(blocks)))
    if spec.c > 0:
        blocks = []
        for k in range(d):
            C = np.zeros((n, nuv))
            C[:, _r_block(d, n, k + 1)] = np.eye(n)
            C[:, _r_block(d, n, k)] = -np.eye(n)
            w = np.zeros(nuv)
            w[_h_col(d, n, k + 1)] = 1.0
            w[_h_col(d, n, k)] = -1.0
            blocks.append((C, np.zeros(n), w, 0.0))
        terms.append((spec.c, EdgeLength.quad_over_lin_sum(blocks)))
    if spec.eps > 0:
        terms.extend(regularizer_terms(spec, nuv))
    if not terms:
        return EdgeLength.zero()
    return EdgeLength.weighted_sum(terms)


def build_graph(problem: PlanningProblem) -> GcsProblem:
    """Graph over regions: bidirectional edges between overlapping pairs,
    source edges into regions holding q0, target edges out of regions
    holding qT."""
    spec = problem.spec
    gcs = GcsProblem()
    gcs.add_vertex(SOURCE, None)
    for i, Q in enumerate(problem.regions):
        gcs.add_vertex(i, vertex_set(Q, spec))
    gcs.add_vertex(TARGET, None)
    gcs.set_source(SOURCE)
    gcs.set_target(TARGET)
    starts = [i for i, Q in enumerate(problem.regions) if Q.contains(spec.q0)]
    goals = [i for i, Q in enumerate(problem.regions) if Q.contains(spec.qT)]
    if not starts:
        raise GcsInfeasible(f"no safe region contains the start point {spec.q0}")
    if not goals:
        raise GcsInfeasible(f"no safe region contains the goal point {spec.qT}")
    con_src = edge_constraints("source", spec)
    con_tgt = edge_constraints("target", spec)
    con_int = edge_constraints("internal", spec)
    len_int = edge_length("internal", spec)
    len_tgt = edge_length("target", spec)
    for i in starts:
        gcs.add_edge(SOURCE, i, EdgeLength.zero(), con_src)
    if problem.adjacency is not None:
        pairs = sorted(set(tuple(sorted(p)) for p in problem.adjacency))
    else:
        pairs = [
            (i, j)
            for i in range(len(problem.regions))
            for j in range(i + 1, len(problem.regions))
            if problem.regions[i].intersects(problem.regions[j])
        ]
    # With a unique start region every path begins there, so no path
    # re-enters it; likewise no path leaves a unique goal region.
    skip_head = starts[0] if len(starts) == 1 else None
    skip_tail = goals[0] if len(goals) == 1 else None
    for i, j in pairs:
        if j != skip_head and i != skip_tail:
            gcs.add_edge(i, j, len_int, con_int)
        if i != skip_head and j != skip_tail:
            gcs.add_edge(j, i, len_int, con_int)
    for i in goals:
        gcs.add_edge(i, TARGET, len_tgt, con_tgt)
    return gcs


def _pin_terminal_lifts(rel, problem: PlanningProblem):
    """Replicate boundary rows onto every lift of unique terminal regions.

    With a single start region, every path begins there, so the start
    conditions hold on each outgoing lift (scaled by its flow); with a
    single goal region the goal conditions hold on each incoming lift.
    Fractional flow otherwise only pins the lift averages, letting
    per-branch copies collapse their chords near the terminals.
    """
    spec = problem.spec
    gcs = rel.problem

    def push(con, edges, lifts):
        for e in edges:
            cols = np.append(lifts[e], rel.phi[e])
            if con.A_eq is not None:
                rel.prog.add_eq(np.hstack([con.A_eq, -con.b_eq[:, None]]), cols)
            if con.A_ub is not None:
                rel.prog.add_ineq(np.hstack([con.A_ub, -con.b_ub[:, None]]), cols)

    starts = [i for i, Q in enumerate(problem.regions) if Q.contains(spec.q0)]
    goals = [i for i, Q in enumerate(problem.regions) if Q.contains(spec.qT)]
    if len(starts) == 1:
        push(edge_constraints("source", spec), gcs.out_edges(starts[0]), rel.y)
    if len(goals) == 1:
        push(edge_constraints("target", spec), gcs.in_edges(goals[0]), rel.z)


# ---------------------------------------------------------------------------
# trajectories


class Trajectory:
    """Piecewise Bezier trajectory with its own time scaling.

    Segment nu covers path coordinate s in [nu, nu+1]; time runs from
    h_0(0) = 0 to T = h_last(1), and q(t) = r(h^-1(t)).
    """

    def __init__(self, segments, regions):
        if not segments:
            raise ValueError("trajectory needs at least one segment")
        self.segments = tuple((r, h) for r, h in segments)
        self.regions = tuple(regions)
        if len(self.regions) != len(self.segments):
            raise ValueError("one region id per segment required")
        for r, h in self.segments:
            if h.dim != 1 or h.degree != r.degree:
                raise ValueError("h must be scalar with r's degree")

    @property
    def num_segments(self) -> int:
        return len(self.segments)

    @property
    def dim(self) -> int:
        return self.segments[0][0].dim

    @property
    def duration(self) -> float:
        return float(self.segments[-1][1].points[-1, 0])

    def segment_times(self) -> np.ndarray:
        """Times at which the trajectory hands over between segments."""
        return np.array(
            [float(h.points[0, 0]) for _, h in self.segments] + [self.duration]
        )

    def _locate(self, t: float) -> int:
        times = self.segment_times()
        if t < times[0] - 1e-9 or t > times[-1] + 1e-9:
            raise ValueError(f"time {t} outside [0, {self.duration}]")
        idx = int(np.searchsorted(times, t, side="right") - 1)
        return min(max(idx, 0), self.num_segments - 1)

    def _invert(self, nu: int, t: float) -> float:
        h = self.segments[nu][1]

        def g(s):
            return float(h.evaluate(s)[0]) - t

        g0, g1 = g(0.0), g(1.0)
        if g0 >= 0.0:
            return 0.0
        if g1 <= 0.0:
            return 1.0
        return float(brentq(g, 0.0, 1.0, xtol=1e-10))

    def position(self, t: float) -> np.ndarray:
        nu = self._locate(t)
        s = self._invert(nu, t)
        return self.segments[nu][0].evaluate(s)

    def velocity(self, t: float) -> np.ndarray:
        """qdot(t) = rdot(s) / hdot(s) at s = h^-1(t)."""
        nu = self._locate(t)
        s = self._invert(nu, t)
        r, h = self.segments[nu]
        return r.derivative().evaluate(s) / float(h.derivative().evaluate(s)[0])

    def path_position(self, s: float) -> np.ndarray:
        """r at global path coordinate s in [0, num_segments]."""
        if s < 0 or s > self.num_segments:
            raise ValueError(f"path coordinate {s} outside [0, {self.num_segments}]")
        nu = min(int(s), self.num_segments - 1)
        return self.segments[nu][0].evaluate(s - nu)

    def to_dict(self) -> dict:
        return {
            "segments": [
                {"r": r.to_dict(), "h": h.to_dict(), "region": g}
                for (r, h), g in zip(self.segments, self.regions)
            ],
            "duration": self.duration,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Trajectory":
        return cls(
            [
                (BezierCurve.from_dict(s["r"]), BezierCurve.from_dict(s["h"]))
                for s in d["segments"]
            ],
            [s["region"] for s in d["segments"]],
        )

    # ------------------------------------------------------------------
    # verification

    def validate(
        self,
        problem: PlanningProblem,
        tol_continuity: float = 1e-6,
        tol_boundary: float = 1e-6,
        tol_contain: float = 1e-7,
        tol_hdot: float = 1e-9,
        tol_T: float = 1e-6,
    ) -> list:
        """All transcription soundness checks; returns found issues."""
        spec = problem.spec
        issues = []
        for idx, ((r, h), region_id) in enumerate(zip(self.segments, self.regions)):
            Q = problem.regions[region_id]
            for k, p in enumerate(r.points):
                if not Q.contains(p, tol=tol_contain):
                    issues.append(
                        f"segment {idx}: control point {k} leaves region {region_id}"
                    )
            hd = h.derivative().points[:, 0]
            if np.any(hd < spec.hdot_min - tol_hdot):
                issues.append(f"segment {idx}: hdot drops below the floor")
        for idx in range(self.num_segments - 1):
            r0, h0 = self.segments[idx]
            r1, h1 = self.segments[idx + 1]
            for l in range(spec.eta + 1):
                for cur, nxt, name in ((r0, r1, "r"), (h0, h1, "h")):
                    cl = cur
                    nl = nxt
                    for _ in range(l):
                        cl = cl.derivative()
                        nl = nl.derivative()
                    gap = np.max(np.abs(cl.points[-1] - nl.points[0]))
                    if gap > tol_continuity:
                        issues.append(
                            f"junction {idx}: {name}^({l}) jumps by {gap:.2e}"
                        )
        first_r, first_h = self.segments[0]
        last_r, last_h = self.segments[-1]
        if np.max(np.abs(first_r.points[0] - np.asarray(spec.q0))) > tol_boundary:
            issues.append("start position misses q0")
        if np.max(np.abs(last_r.points[-1] - np.asarray(spec.qT))) > tol_boundary:
            issues.append("end position misses qT")
        if abs(float(first_h.points[0, 0])) > tol_boundary:
            issues.append("clock does not start at zero")
        for qdot, r, h, k, where in (
            (spec.qdot0, first_r, first_h, 0, "start"),
            (spec.qdotT, last_r, last_h, -1, "end"),
        ):
            if qdot is None:
                continue
            rd = r.derivative().points[k]
            hd = float(h.derivative().points[k, 0])
            if np.max(np.abs(rd - hd * np.asarray(qdot))) > tol_boundary * (1 + hd):
                issues.append(f"{where} velocity misses its boundary value")
        T = self.duration
        if not (spec.T_min - tol_T <= T <= spec.T_max + tol_T):
            issues.append(f"duration {T} outside [{spec.T_min}, {spec.T_max}]")
        return issues


def reconstruct(path, points: dict, spec: PlanningSpec) -> Trajectory:
    """Assemble the trajectory from a rounded path's solved vertex values.

    ``path`` runs source, region ids..., target; ``points`` maps each
    region id to its flat control-point vector.  Rejects a time scaling
    whose derivative control points are not strictly positive, which
    would make h non-invertible.
    """
    d, n = spec.d, spec.dim
    interior = list(path)[1:-1]
    if not interior:
        raise ValueError("path carries no region vertices")
    segments = []
    for vid in interior:
        x = np.asarray(points[vid], dtype=float)
        if x.size != _width(d, n):
            raise ValueError(f"vertex {vid} value has wrong size {x.size}")
        r = BezierCurve(x[: (d + 1) * n].reshape(d + 1, n))
        h = BezierCurve(x[(d + 1) * n :].reshape(d + 1, 1))
        if np.any(h.derivative().points[:, 0] < spec.hdot_min - 1e-9):
            raise ValueError(
                f"vertex {vid}: time scaling is not strictly increasing"
            )
        segments.append((r, h))
    return Trajectory(segments, interior)


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class PlanResult:
    trajectory: "Trajectory"
    rounding: RoundingReport
    preprocess: PreprocessReport
    graph: GcsProblem
    flows: object
    timings: dict = field(default_factory=dict)


def _reachable(gcs: GcsProblem) -> bool:
    seen = {gcs.source}
    frontier = [gcs.source]
    while frontier:
        nxt = []
        for v in frontier:
            for _, w in gcs.out_edges(v):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return gcs.target in seen


def plan_detailed(
    problem: PlanningProblem,
    rounding: RoundingConfig = RoundingConfig(),
    use_preprocess: bool = True,
    use_two_cycle: bool = True,
    backend: str = "auto",
) -> PlanResult:
    """Full pipeline with phase timings; ``plan`` is the thin wrapper."""
    import time as _time

    timings = {}
    t0 = _time.perf_counter()
    gcs = build_graph(problem)
    if not _reachable(gcs):
        raise GcsInfeasible(
            "graph disconnected: no sequence of overlapping regions joins "
            "the start to the goal"
        )
    report = PreprocessReport()
    if use_preprocess:
        gcs, report = edge_redundancy_filter(gcs)
    timings["preprocess"] = _time.perf_counter() - t0
    t0 = _time.perf_counter()
    # Every edge charges exactly the tail segment's cost, so the
    # relaxation can price each region's traversal from both its
    # outgoing and incoming lifts, which tightens the lower bound.
    vlen = edge_length("target", problem.spec)
    vertex_lengths = {i: vlen for i in range(len(problem.regions))}
    rel = build_relaxation(gcs, vertex_lengths=vertex_lengths)
    _pin_terminal_lifts(rel, problem)
    if use_two_cycle:
        report.two_cycle_pairs = add_two_cycle_constraints(rel) // 4
    flows = rel.solve(backend=backend)
    timings["relaxation"] = _time.perf_counter() - t0
    t0 = _time.perf_counter()
    rounding_report = round_flows(gcs, flows, rounding)
    timings["rounding"] = _time.perf_counter() - t0
    if rounding_report.best_path is None:
        raise GcsInfeasible("all rounded paths are infeasible")
    t0 = _time.perf_counter()
    best = evaluate_path(gcs, rounding_report.best_path, backend=backend)
    trajectory = reconstruct(rounding_report.best_path, best.points, problem.spec)
    timings["reconstruction"] = _time.perf_counter() - t0
    return PlanResult(trajectory, rounding_report, report, gcs, flows, timings)


def plan(
    problem: PlanningProblem,
    rounding: RoundingConfig = RoundingConfig(),
    use_preprocess: bool = True,
    use_two_cycle: bool = True,
) -> tuple:
    """Plan a trajectory; returns (Trajectory, RoundingReport)."""
    result = plan_detailed(
        problem, rounding, use_preprocess=use_preprocess, use_two_cycle=use_two_cycle
    )
    return result.trajectory, result.rounding
