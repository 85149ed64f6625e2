"""Shortest paths through graphs of convex sets.

A problem couples a digraph with one bounded convex set per vertex,
convex edge lengths over the endpoint variables, and optional linear
edge constraints.  The solver surface has three entry points:

* ``build_relaxation`` — the flow-based convex relaxation whose optimum
  lower-bounds the true shortest path (perspective lifts per edge, flow
  conservation in both the scalar and the lifted variables);
* ``evaluate_path`` — price one fixed path by a small convex program;
* ``brute_force_optimum`` — enumerate all simple paths and price each,
  the exact-oracle route used throughout the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gcsplan.conic import Affine, ConicProgram, SolverError
from gcsplan.geometry import ConvexSet

EdgeKey = tuple  # (tail id, head id)


class GcsInfeasible(RuntimeError):
    """No feasible routing exists (empty relaxation or all paths priced infinite)."""


def _freeze(a, shape2d=False):
    a = np.asarray(a, dtype=float)
    if shape2d:
        a = np.atleast_2d(a)
    a = np.array(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class EdgeLength:
    """Convex edge length, restricted to a closed set of tags.

    Tags: ``zero``; ``affine`` (coef over concatenated (x_u, x_v) plus a
    constant); ``l2_sum`` (sum of ||C xy + c||_2 blocks);
    ``quad_over_lin_sum`` (sum of ||C xy + c||^2 / (w . xy + w0) blocks);
    ``weighted_sum`` (nonnegative combination of the above).  Arbitrary
    callables are rejected so every program stays conic.
    """

    kind: str
    data: tuple = ()

    @classmethod
    def zero(cls) -> "EdgeLength":
        return cls("zero")

    @classmethod
    def affine(cls, coef, const: float = 0.0) -> "EdgeLength":
        return cls("affine", (_freeze(coef), float(const)))

    @classmethod
    def l2_sum(cls, blocks) -> "EdgeLength":
        frozen = tuple(
            (_freeze(C, shape2d=True), _freeze(c)) for C, c in blocks
        )
        for C, c in frozen:
            if C.shape[0] != c.size:
                raise ValueError("l2 block row/offset mismatch")
        return cls("l2_sum", frozen)

    @classmethod
    def quad_over_lin_sum(cls, blocks) -> "EdgeLength":
        frozen = tuple(
            (_freeze(C, shape2d=True), _freeze(c), _freeze(w), float(w0))
            for C, c, w, w0 in blocks
        )
        for C, c, w, _ in frozen:
            if C.shape[0] != c.size or C.shape[1] != w.size:
                raise ValueError("quad-over-lin block shape mismatch")
        return cls("quad_over_lin_sum", frozen)

    @classmethod
    def weighted_sum(cls, terms) -> "EdgeLength":
        frozen = []
        for weight, term in terms:
            if weight < 0:
                raise ValueError("edge-length weights must be nonnegative")
            if not isinstance(term, EdgeLength):
                raise TypeError("weighted_sum terms must be EdgeLength values")
            frozen.append((float(weight), term))
        return cls("weighted_sum", tuple(frozen))

    def validate(self, nuv: int):
        """Check every block is sized for nuv concatenated variables."""
        if self.kind == "zero":
            return
        if self.kind == "affine":
            coef, _ = self.data
            if coef.size != nuv:
                raise ValueError(f"affine coef length {coef.size} != {nuv}")
        elif self.kind == "l2_sum":
            for C, _ in self.data:
                if C.shape[1] != nuv:
                    raise ValueError(f"l2 block width {C.shape[1]} != {nuv}")
        elif self.kind == "quad_over_lin_sum":
            for C, _, w, _ in self.data:
                if C.shape[1] != nuv or w.size != nuv:
                    raise ValueError("quad-over-lin block width mismatch")
        elif self.kind == "weighted_sum":
            for _, term in self.data:
                term.validate(nuv)
        else:
            raise ValueError(f"unsupported edge-length tag {self.kind!r}")

    def evaluate(self, xu: np.ndarray, xv: np.ndarray) -> float:
        """Numeric value at concrete endpoint points (test oracle)."""
        xy = np.concatenate([np.asarray(xu, float).ravel(), np.asarray(xv, float).ravel()])
        if self.kind == "zero":
            return 0.0
        if self.kind == "affine":
            coef, const = self.data
            return float(coef @ xy + const)
        if self.kind == "l2_sum":
            return sum(float(np.linalg.norm(C @ xy + c)) for C, c in self.data)
        if self.kind == "quad_over_lin_sum":
            total = 0.0
            for C, c, w, w0 in self.data:
                num = C @ xy + c
                den = float(w @ xy + w0)
                if den <= 0:
                    return float("inf") if num @ num > 0 else total
                total += float(num @ num) / den
            return total
        if self.kind == "weighted_sum":
            return sum(wt * term.evaluate(xu, xv) for wt, term in self.data)
        raise ValueError(f"unsupported edge-length tag {self.kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "affine":
            coef, const = self.data
            return {"kind": "affine", "coef": coef.tolist(), "const": const}
        if self.kind == "l2_sum":
            return {
                "kind": "l2_sum",
                "blocks": [{"C": C.tolist(), "c": c.tolist()} for C, c in self.data],
            }
        if self.kind == "quad_over_lin_sum":
            return {
                "kind": "quad_over_lin_sum",
                "blocks": [
                    {"C": C.tolist(), "c": c.tolist(), "w": w.tolist(), "w0": w0}
                    for C, c, w, w0 in self.data
                ],
            }
        return {
            "kind": "weighted_sum",
            "terms": [
                {"weight": wt, "length": term.to_dict()} for wt, term in self.data
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EdgeLength":
        kind = d["kind"]
        if kind == "zero":
            return cls.zero()
        if kind == "affine":
            return cls.affine(d["coef"], d["const"])
        if kind == "l2_sum":
            return cls.l2_sum([(b["C"], b["c"]) for b in d["blocks"]])
        if kind == "quad_over_lin_sum":
            return cls.quad_over_lin_sum(
                [(b["C"], b["c"], b["w"], b["w0"]) for b in d["blocks"]]
            )
        if kind == "weighted_sum":
            return cls.weighted_sum(
                [(t["weight"], cls.from_dict(t["length"])) for t in d["terms"]]
            )
        raise ValueError(f"unknown edge-length kind {kind!r}")


@dataclass(frozen=True)
class EdgeConstraint:
    """Linear constraints A_eq (x_u,x_v) = b_eq, A_ub (x_u,x_v) <= b_ub."""

    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None

    @classmethod
    def make(cls, A_eq=None, b_eq=None, A_ub=None, b_ub=None) -> "EdgeConstraint":
        def pair(A, b):
            if A is None:
                return None, None
            A = _freeze(A, shape2d=True)
            b = _freeze(b)
            if A.shape[0] != b.size:
                raise ValueError("constraint row/rhs mismatch")
            return A, b

        A_eq, b_eq = pair(A_eq, b_eq)
        A_ub, b_ub = pair(A_ub, b_ub)
        return cls(A_eq, b_eq, A_ub, b_ub)

    @classmethod
    def equalities(cls, A, b) -> "EdgeConstraint":
        return cls.make(A_eq=A, b_eq=b)

    def validate(self, nuv: int):
        for A in (self.A_eq, self.A_ub):
            if A is not None and A.shape[1] != nuv:
                raise ValueError(f"edge constraint width {A.shape[1]} != {nuv}")

    def satisfied(self, xu, xv, tol: float = 1e-6) -> bool:
        xy = np.concatenate([np.asarray(xu, float).ravel(), np.asarray(xv, float).ravel()])
        if self.A_eq is not None and np.any(np.abs(self.A_eq @ xy - self.b_eq) > tol):
            return False
        if self.A_ub is not None and np.any(self.A_ub @ xy - self.b_ub > tol):
            return False
        return True

    def to_dict(self) -> dict:
        out = {}
        if self.A_eq is not None:
            out["A_eq"] = self.A_eq.tolist()
            out["b_eq"] = self.b_eq.tolist()
        if self.A_ub is not None:
            out["A_ub"] = self.A_ub.tolist()
            out["b_ub"] = self.b_ub.tolist()
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "EdgeConstraint":
        return cls.make(d.get("A_eq"), d.get("b_eq"), d.get("A_ub"), d.get("b_ub"))


@dataclass(frozen=True)
class Edge:
    u: object
    v: object
    length: EdgeLength
    constraint: EdgeConstraint


class GcsProblem:
    """Directed graph with a convex set per vertex; immutable once solved."""

    def __init__(self):
        self.vertices: dict[object, ConvexSet | None] = {}
        self.edges: dict[EdgeKey, Edge] = {}
        self.source = None
        self.target = None
        self._out: dict[object, list[EdgeKey]] = {}
        self._in: dict[object, list[EdgeKey]] = {}

    def add_vertex(self, vid, cset: ConvexSet | None = None):
        """cset=None gives the zero-variable empty product set (source/target)."""
        if vid in self.vertices:
            raise ValueError(f"duplicate vertex {vid!r}")
        self.vertices[vid] = cset
        self._out[vid] = []
        self._in[vid] = []

    def vertex_dim(self, vid) -> int:
        s = self.vertices[vid]
        return 0 if s is None else s.dim

    def add_edge(
        self,
        u,
        v,
        length: EdgeLength | None = None,
        constraint: EdgeConstraint | None = None,
    ):
        if u not in self.vertices or v not in self.vertices:
            raise KeyError(f"edge ({u!r}, {v!r}) references unknown vertex")
        if u == v:
            raise ValueError("self-loops are not allowed")
        if (u, v) in self.edges:
            raise ValueError(f"duplicate edge ({u!r}, {v!r})")
        if self.source is not None and v == self.source:
            raise ValueError("source admits no incoming edges")
        if self.target is not None and u == self.target:
            raise ValueError("target admits no outgoing edges")
        length = EdgeLength.zero() if length is None else length
        if not isinstance(length, EdgeLength):
            raise TypeError("edge length must be an EdgeLength value")
        constraint = EdgeConstraint() if constraint is None else constraint
        nuv = self.vertex_dim(u) + self.vertex_dim(v)
        length.validate(nuv)
        constraint.validate(nuv)
        self.edges[(u, v)] = Edge(u, v, length, constraint)
        self._out[u].append((u, v))
        self._in[v].append((u, v))

    def set_source(self, vid):
        if vid not in self.vertices:
            raise KeyError(vid)
        if self._in[vid]:
            raise ValueError("source admits no incoming edges")
        if self.target == vid:
            raise ValueError("source and target must differ")
        self.source = vid

    def set_target(self, vid):
        if vid not in self.vertices:
            raise KeyError(vid)
        if self._out[vid]:
            raise ValueError("target admits no outgoing edges")
        if self.source == vid:
            raise ValueError("source and target must differ")
        self.target = vid

    def out_edges(self, vid) -> list[EdgeKey]:
        return list(self._out[vid])

    def in_edges(self, vid) -> list[EdgeKey]:
        return list(self._in[vid])

    def without_edges(self, removed) -> "GcsProblem":
        """Copy with the listed edge keys dropped (vertex order preserved)."""
        removed = set(removed)
        out = GcsProblem()
        for vid, cset in self.vertices.items():
            out.add_vertex(vid, cset)
        out.source = self.source
        out.target = self.target
        for key, e in self.edges.items():
            if key not in removed:
                out.add_edge(e.u, e.v, e.length, e.constraint)
        return out

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "vertices": [
                {"id": vid, "set": None if s is None else s.to_dict()}
                for vid, s in self.vertices.items()
            ],
            "edges": [
                {
                    "u": e.u,
                    "v": e.v,
                    "length": e.length.to_dict(),
                    "constraint": e.constraint.to_dict(),
                }
                for e in self.edges.values()
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GcsProblem":
        out = cls()
        for v in d["vertices"]:
            s = v["set"]
            out.add_vertex(v["id"], None if s is None else ConvexSet.from_dict(s))
        for e in d["edges"]:
            out.add_edge(
                e["u"],
                e["v"],
                EdgeLength.from_dict(e["length"]),
                EdgeConstraint.from_dict(e["constraint"]),
            )
        out.set_source(d["source"])
        out.set_target(d["target"])
        return out

    def _check_terminals(self):
        if self.source is None or self.target is None:
            raise ValueError("source and target must be set")


@dataclass(frozen=True)
class FlowSolution:
    """Decoded relaxation optimum: flows, lifted values, vertex averages."""

    phi: dict
    vertex_points: dict
    objective: float
    y: dict
    z: dict

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "phi": [
                {"u": u, "v": v, "flow": f} for (u, v), f in self.phi.items()
            ],
        }


# ---------------------------------------------------------------------------
# relaxation construction


def _length_cost_terms(prog, length: EdgeLength, cols, phi_col, weight: float = 1.0):
    """Linear terms (column, coefficient) whose sum prices the length.

    Nonlinear pieces come back as epigraph columns added to ``prog``;
    with ``phi_col`` set everything is the perspective of the length
    (affine offsets multiply the flow variable).  The returned constant
    is nonzero only in direct (``phi_col=None``) pricing.
    """
    terms = []
    const_out = 0.0
    if weight == 0.0 or length.kind == "zero":
        return terms, const_out
    if length.kind == "affine":
        coef, const = length.data
        terms.extend(
            (c, weight * k) for c, k in zip(cols, np.asarray(coef)) if k != 0.0
        )
        if const != 0.0:
            if phi_col is None:
                const_out += weight * const
            else:
                terms.append((phi_col, weight * const))
    elif length.kind == "l2_sum":
        for C, c in length.data:
            if phi_col is None:
                u = Affine.of(C, cols, c)
            else:
                u = Affine.of(np.hstack([C, c[:, None]]), np.append(cols, phi_col))
            t = prog.add_epigraph_l2(u)
            terms.append((t, weight))
    elif length.kind == "quad_over_lin_sum":
        for C, c, w, w0 in length.data:
            if phi_col is None:
                u = Affine.of(C, cols, c)
                den = Affine.scalar(cols, w, w0)
            else:
                u = Affine.of(np.hstack([C, c[:, None]]), np.append(cols, phi_col))
                den = Affine.scalar(np.append(cols, phi_col), np.append(w, w0))
            t = prog.add_quad_over_lin(u, den)
            terms.append((t, weight))
    elif length.kind == "weighted_sum":
        for wt, term in length.data:
            sub, c0 = _length_cost_terms(prog, term, cols, phi_col, weight * wt)
            terms.extend(sub)
            const_out += c0
    else:
        raise ValueError(f"unsupported edge-length tag {length.kind!r}")
    return terms, const_out


def _add_length_cost(prog, length: EdgeLength, cols, phi_col, weight: float = 1.0):
    """Emit the cost of one edge length over variables ``cols``.

    With ``phi_col`` set this is the perspective of the length; with
    ``phi_col=None`` the length is charged directly, as in fixed-path
    pricing.
    """
    terms, const = _length_cost_terms(prog, length, cols, phi_col, weight)
    for col, coef in terms:
        prog.add_cost([col], [coef])
    if const != 0.0:
        prog.add_cost_const(const)


def _add_edge_constraint(prog, con: EdgeConstraint, cols, phi_col):
    """Edge constraint rows, homogenized by phi when ``phi_col`` is given."""
    if con.A_eq is not None:
        if phi_col is None:
            prog.add_eq(con.A_eq, cols, con.b_eq)
        else:
            prog.add_eq(
                np.hstack([con.A_eq, -con.b_eq[:, None]]), np.append(cols, phi_col)
            )
    if con.A_ub is not None:
        if phi_col is None:
            prog.add_ineq(con.A_ub, cols, con.b_ub)
        else:
            prog.add_ineq(
                np.hstack([con.A_ub, -con.b_ub[:, None]]), np.append(cols, phi_col)
            )


@dataclass
class Relaxation:
    """A built relaxation: the conic program plus variable index maps."""

    problem: GcsProblem
    prog: ConicProgram
    phi: dict
    y: dict
    z: dict

    def solve(self, backend: str = "auto", **tol) -> FlowSolution:
        res = self.prog.solve(backend=backend, **tol)
        if res.status == "infeasible":
            raise GcsInfeasible("relaxation infeasible: no safe route exists")
        if res.status != "optimal":
            raise SolverError(
                f"relaxation solve returned {res.status}: {res.diagnostics}"
            )
        # C_relax is quoted as a lower bound, so after a reduced-accuracy
        # solve prefer the dual value: the primal one could overstate it
        # by the residual duality gap.
        objective = res.objective
        if res.objective_dual is not None:
            objective = min(objective, res.objective_dual)
        return self.decode(res.x, objective)

    def decode(self, x: np.ndarray, objective: float) -> FlowSolution:
        """Recover flows, lifts, and flow-averaged vertex points from a primal."""
        prob = self.problem
        phi = {e: float(x[i]) for e, i in self.phi.items()}
        y = {e: np.array(x[idx]) for e, idx in self.y.items()}
        z = {e: np.array(x[idx]) for e, idx in self.z.items()}
        points = {}
        for vid in prob.vertices:
            if vid == prob.source:
                keys, lifts = prob.out_edges(vid), y
            else:
                keys, lifts = prob.in_edges(vid), z
            flow = sum(phi[e] for e in keys)
            if flow > 1e-6:
                n = prob.vertex_dim(vid)
                total = np.zeros(n)
                for e in keys:
                    total += lifts[e]
                points[vid] = total / flow
            else:
                points[vid] = None
        return FlowSolution(phi, points, float(objective), y, z)


def build_relaxation(problem: GcsProblem, vertex_lengths: dict | None = None) -> Relaxation:
    """Assemble the flow relaxation; solve via ``Relaxation.solve``.

    Per edge (u, v): flow phi in [0,1] plus lifts y (of x_u) and z (of
    x_v) with perspective memberships A y <= b phi, and the edge
    constraint homogenized the same way.  Unit flow leaves the source
    and enters the target; interior vertices conserve both scalar flow
    and the lifted spatial sums, with inflow capped at one.  Edge costs
    enter as perspectives, keeping the whole program conic.

    ``vertex_lengths`` activates two-sided pricing for graphs whose
    every edge charges exactly the tail vertex's traversal cost (the
    caller guarantees this): the cost of vertex v becomes an epigraph
    above both the outgoing-lift and the incoming-lift perspective
    sums.  On a path both sums equal the traversal cost, so the bound
    C_relax <= C_opt is preserved, while fractional flow can no longer
    shave cost by averaging geometry at route splits and merges.
    """
    problem._check_terminals()
    prog = ConicProgram()
    phi: dict[EdgeKey, int] = {}
    y: dict[EdgeKey, np.ndarray] = {}
    z: dict[EdgeKey, np.ndarray] = {}
    for key, e in problem.edges.items():
        f = prog.add_var()
        phi[key] = f
        nu = problem.vertex_dim(e.u)
        nv = problem.vertex_dim(e.v)
        ye = prog.add_vars(nu)
        ze = prog.add_vars(nv)
        y[key] = ye
        z[key] = ze
        prog.add_ineq(np.array([[-1.0], [1.0]]), [f], [0.0, 1.0])
        for cset, lift in ((problem.vertices[e.u], ye), (problem.vertices[e.v], ze)):
            if cset is not None:
                A, b = cset.halfspaces()
                prog.add_ineq(np.hstack([A, -b[:, None]]), np.append(lift, f))
        cols = np.concatenate([ye, ze])
        _add_edge_constraint(prog, e.constraint, cols, f)
        if vertex_lengths is None:
            _add_length_cost(prog, e.length, cols, f)
    if vertex_lengths is not None:
        for vid, length in vertex_lengths.items():
            ins = problem.in_edges(vid)
            outs = problem.out_edges(vid)
            if not ins or not outs:
                continue  # flow conservation forces zero flow here
            tv = prog.add_var()
            for keys, lifts in ((outs, y), (ins, z)):
                side = []
                for e in keys:
                    terms, _ = _length_cost_terms(prog, length, lifts[e], phi[e])
                    side.extend(terms)
                cols_ = [c for c, _ in side] + [tv]
                coefs = [k for _, k in side] + [-1.0]
                prog.add_ineq(np.array([coefs]), cols_, [0.0])
            prog.add_cost([tv], [1.0])
    ones = lambda keys: np.ones((1, len(keys)))
    src_out = problem.out_edges(problem.source)
    if not src_out:
        raise GcsInfeasible("graph disconnected: source has no outgoing edges")
    if not problem.in_edges(problem.target):
        raise GcsInfeasible("graph disconnected: target has no incoming edges")
    prog.add_eq(ones(src_out), [phi[e] for e in src_out], [1.0])
    tgt_in = problem.in_edges(problem.target)
    prog.add_eq(ones(tgt_in), [phi[e] for e in tgt_in], [1.0])
    for vid in problem.vertices:
        if vid in (problem.source, problem.target):
            continue
        ins = problem.in_edges(vid)
        outs = problem.out_edges(vid)
        if not ins and not outs:
            continue
        cols = [phi[e] for e in ins] + [phi[e] for e in outs]
        coefs = np.concatenate([np.ones(len(ins)), -np.ones(len(outs))])
        prog.add_eq(coefs.reshape(1, -1), cols, [0.0])
        if ins:
            prog.add_ineq(ones(ins), [phi[e] for e in ins], [1.0])
        n = problem.vertex_dim(vid)
        if n and ins and outs:
            blocks = np.hstack(
                [np.tile(np.eye(n), (1, len(ins))), np.tile(-np.eye(n), (1, len(outs)))]
            )
            cols = np.concatenate([z[e] for e in ins] + [y[e] for e in outs])
            prog.add_eq(blocks, cols, np.zeros(n))
    return Relaxation(problem, prog, phi, y, z)


def solve_relaxation(problem: GcsProblem, backend: str = "auto", **tol) -> FlowSolution:
    return build_relaxation(problem).solve(backend=backend, **tol)


# ---------------------------------------------------------------------------
# fixed-path pricing and enumeration


@dataclass(frozen=True)
class PathResult:
    cost: float
    points: dict | None
    status: str  # optimal | infeasible


def _check_path(problem: GcsProblem, path):
    problem._check_terminals()
    path = list(path)
    if len(path) < 2 or path[0] != problem.source or path[-1] != problem.target:
        raise ValueError("path must run from the source to the target")
    if len(set(path)) != len(path):
        raise ValueError("path repeats a vertex")
    for u, v in zip(path, path[1:]):
        if (u, v) not in problem.edges:
            raise ValueError(f"({u!r}, {v!r}) is not an edge")
    return path


def evaluate_path(problem: GcsProblem, path, backend: str = "auto", **tol) -> PathResult:
    """Price one sigma-tau path by the restricted convex program."""
    path = _check_path(problem, path)
    prog = ConicProgram()
    xs = {}
    for vid in path:
        n = problem.vertex_dim(vid)
        cols = prog.add_vars(n)
        xs[vid] = cols
        cset = problem.vertices[vid]
        if cset is not None:
            A, b = cset.halfspaces()
            prog.add_ineq(A, cols, b)
    for u, v in zip(path, path[1:]):
        e = problem.edges[(u, v)]
        cols = np.concatenate([xs[u], xs[v]])
        _add_edge_constraint(prog, e.constraint, cols, None)
        _add_length_cost(prog, e.length, cols, None)
    res = prog.solve(backend=backend, **tol)
    if res.status == "optimal":
        points = {vid: np.array(res.x[cols]) for vid, cols in xs.items()}
        return PathResult(float(res.objective), points, "optimal")
    if res.status == "infeasible":
        return PathResult(float("inf"), None, "infeasible")
    raise SolverError(f"path pricing returned {res.status}: {res.diagnostics}")


def enumerate_simple_paths(problem: GcsProblem, limit: int | None = None):
    """All simple source-target vertex sequences, depth-first order.

    With ``limit`` set, raises once more than ``limit`` paths exist
    (refusing, never truncating).
    """
    problem._check_terminals()
    src, tgt = problem.source, problem.target
    paths: list[list] = []
    stack = [(src, [src], {src})]
    while stack:
        vid, path, seen = stack.pop()
        for key in reversed(problem.out_edges(vid)):
            nxt = key[1]
            if nxt == tgt:
                paths.append(path + [nxt])
                if limit is not None and len(paths) > limit:
                    raise ValueError(f"more than {limit} simple paths; refusing")
            elif nxt not in seen:
                stack.append((nxt, path + [nxt], seen | {nxt}))
    return paths


def brute_force_optimum(
    problem: GcsProblem, path_limit: int = 10_000, backend: str = "auto"
):
    """Exact optimum by total enumeration: (cost, best path).

    Refuses when the path count exceeds ``path_limit``; raises
    GcsInfeasible when no path prices finite.
    """
    paths = enumerate_simple_paths(problem, limit=path_limit)
    best_cost = float("inf")
    best_path = None
    for p in paths:
        r = evaluate_path(problem, p, backend=backend)
        if r.cost < best_cost:
            best_cost = r.cost
            best_path = p
    if best_path is None:
        raise GcsInfeasible("every simple path is infeasible")
    return best_cost, best_path
