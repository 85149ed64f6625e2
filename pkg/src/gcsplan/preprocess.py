"""Graph compression and relaxation tightening.

Two techniques, independently toggleable:

* ``edge_redundancy_filter`` removes edges that provably lie on no
  simple source-target path, certified by infeasibility of a fractional
  two-commodity flow LP (route one unit source->tail and one unit
  head->target through vertex capacities of one).
* ``add_two_cycle_constraints`` tightens a built relaxation so a
  reciprocal edge pair (i,j)/(j,i) can never both carry a full unit of
  flow, in both the scalar flows and their perspective lifts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gcsplan.conic import ConicProgram
from gcsplan.gcs import GcsProblem, Relaxation


@dataclass
class PreprocessReport:
    """What preprocessing did: removals with reasons, tightening counts."""

    removed: list = field(default_factory=list)  # (edge key, reason)
    edge_status: dict = field(default_factory=dict)  # edge key -> status
    two_cycle_pairs: int = 0

    def to_dict(self) -> dict:
        return {
            "removed": [
                {"u": u, "v": v, "reason": reason} for (u, v), reason in self.removed
            ],
            "edge_status": [
                {"u": u, "v": v, "status": s} for (u, v), s in self.edge_status.items()
            ],
            "two_cycle_pairs": self.two_cycle_pairs,
        }


# ---------------------------------------------------------------------------
# two-cycle elimination


def add_two_cycle_constraints(relaxation: Relaxation) -> int:
    """Tighten a built relaxation over every reciprocal edge pair.

    For each pair e=(i,j), f=(j,i), with vertex flow phi_v the total
    inflow (outflow at the source), adds

        phi_e + phi_f <= phi_i        phi_e + phi_f <= phi_j

    and the lifted counterparts: the leftover flow phi_v - phi_e - phi_f
    with the leftover lift (incoming lifts of x_v minus the pair's two
    lifts of x_v) must stay inside the homogenized vertex set.  Returns
    the number of constraints added, counting scalar rows and lifted
    blocks alike (four per pair).
    """
    problem = relaxation.problem
    prog = relaxation.prog
    phi, y, z = relaxation.phi, relaxation.y, relaxation.z
    added = 0
    for key in problem.edges:
        i, j = key
        rev = (j, i)
        if rev not in problem.edges or i > j:  # handle each pair once
            continue
        for vtx, e_lift, f_lift in (
            # lifts of x_vtx carried by e and by f, respectively
            (i, y[key], z[rev]),
            (j, z[key], y[rev]),
        ):
            if vtx == problem.source:
                flow_keys = problem.out_edges(vtx)
                in_lifts = None  # source carries no incoming lifts
            else:
                flow_keys = problem.in_edges(vtx)
                in_lifts = [z[k] for k in flow_keys]
            # phi_e + phi_f - phi_vtx <= 0, accumulated per column since
            # e or f may itself appear among the vertex-flow edges.
            coef: dict[int, float] = {}
            for k in flow_keys:
                coef[phi[k]] = coef.get(phi[k], 0.0) - 1.0
            for c in (phi[key], phi[rev]):
                coef[c] = coef.get(c, 0.0) + 1.0
            cols = list(coef)
            prog.add_ineq(np.array([[coef[c] for c in cols]]), cols, [0.0])
            added += 1
            cset = problem.vertices[vtx]
            if cset is None or in_lifts is None:
                continue
            # A (sum_in z - e_lift - f_lift) <= b (phi_vtx - phi_e - phi_f)
            A, b = cset.halfspaces()
            n = cset.dim
            lhs: dict[int, np.ndarray] = {}

            def accumulate(cols_vec, mat):
                for col, column in zip(cols_vec, mat.T):
                    lhs[col] = lhs.get(col, np.zeros(A.shape[0])) + column

            for lift in in_lifts:
                accumulate(lift, A)
            accumulate(e_lift, -A)
            accumulate(f_lift, -A)
            for k in flow_keys:
                accumulate([phi[k]], -b[:, None])
            accumulate([phi[key]], b[:, None])
            accumulate([phi[rev]], b[:, None])
            cols = list(lhs)
            block = np.column_stack([lhs[c] for c in cols])
            prog.add_ineq(block, cols, np.zeros(A.shape[0]))
            added += 1
    return added


# ---------------------------------------------------------------------------
# redundant-edge filter


def _multiflow_feasible(problem: GcsProblem, edge_key) -> str:
    """Status of the two-commodity routing LP for one candidate edge.

    Commodity 1 sends a unit from the source to the edge's tail avoiding
    the head and the target; commodity 2 sends a unit from the head to
    the target avoiding the source and the tail; interior vertices have
    a combined capacity of one (vertex splitting).  An endpoint that
    coincides with its commodity's origin leaves that commodity empty.
    """
    u, v = edge_key
    src, tgt = problem.source, problem.target
    demands = []
    if u != src:
        demands.append((src, u, {v, tgt}))
    if v != tgt:
        demands.append((v, tgt, {src, u}))
    if not demands:
        return "kept"  # the edge source->target is itself a path
    prog = ConicProgram()
    arc_vars = []  # per commodity: dict arc -> var
    internal = []  # per commodity: dict vertex -> var
    for start, end, banned in demands:
        keys = []
        for key in problem.edges:
            a, b = key
            if a in banned or b in banned:
                continue
            if b == start or a == end:
                # A simple path never re-enters its origin or leaves its
                # destination; excluding these arcs keeps flow conserved.
                continue
            keys.append(key)
        inner_ids = [
            v for v in problem.vertices if v not in banned and v != start and v != end
        ]
        # One contiguous block of variables per commodity so column
        # positions are plain offsets; the filter solves hundreds of these
        # LPs per graph and per-variable bookkeeping was the bottleneck.
        base = prog.num_vars
        var_ids = prog.add_vars(len(keys) + len(inner_ids))
        arcs = dict(zip(keys, var_ids[: len(keys)].tolist()))
        inner = dict(zip(inner_ids, var_ids[len(keys) :].tolist()))
        arc_vars.append(arcs)
        internal.append(inner)
        if var_ids.size:
            prog.add_nonneg(var_ids)
        # Conservation.  Split each vertex w into w_in / w_out joined by
        # the internal arc: at w_in, inflow = internal; at w_out,
        # internal = outflow.  Demand endpoints skip their own internal
        # arc (paths end at u_in and start at v_out).
        block = np.zeros((2 * len(problem.vertices), var_ids.size))
        rhs = np.zeros(block.shape[0])
        m = 0
        for vid in problem.vertices:
            if vid in banned:
                continue
            inc = [arcs[k] - base for k in problem.in_edges(vid) if k in arcs]
            out = [arcs[k] - base for k in problem.out_edges(vid) if k in arcs]
            if vid == start:
                if not out:
                    return "removed"  # no way to launch the unit
                block[m, out] = 1.0
                rhs[m] = 1.0
                m += 1
                continue
            if vid == end:
                if not inc:
                    return "removed"
                block[m, inc] = 1.0
                rhs[m] = 1.0
                m += 1
                continue
            w = inner[vid] - base
            block[m, inc] = 1.0
            block[m, w] = -1.0
            block[m + 1, w] = 1.0
            block[m + 1, out] = -1.0
            m += 2
        if m:
            prog.add_eq(block[:m], var_ids, rhs[:m])
    # Combined vertex capacity across commodities.
    cap_vars = [var for inner in internal for var in inner.values()]
    if cap_vars:
        pos = {var: i for i, var in enumerate(cap_vars)}
        rows = []
        for vid in problem.vertices:
            cols = [inner[vid] for inner in internal if vid in inner]
            if cols:
                line = np.zeros(len(cap_vars))
                line[[pos[c] for c in cols]] = 1.0
                rows.append(line)
        if rows:
            prog.add_ineq(np.vstack(rows), cap_vars, np.ones(len(rows)))
    res = prog.solve(backend="highs")
    if res.status == "optimal":
        return "kept"
    if res.status == "infeasible":
        return "removed"
    return f"solver_failure:kept ({res.diagnostics})"


def edge_redundancy_filter(problem: GcsProblem):
    """Drop edges certified to lie on no simple source-target path.

    Returns (pruned problem, report).  A solver failure on an edge's LP
    keeps that edge (conservative).  The test is per-edge against the
    original graph, so the result does not depend on edge order and a
    second pass removes nothing further.
    """
    problem._check_terminals()
    report = PreprocessReport()
    for key in problem.edges:
        status = _multiflow_feasible(problem, key)
        report.edge_status[key] = status
        if status == "removed":
            report.removed.append((key, "multiflow LP infeasible"))
    pruned = problem.without_edges([k for k, _ in report.removed])
    return pruned, report
