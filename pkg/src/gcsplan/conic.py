"""Conic-program builder with pluggable LP/SOCP solver backends.

The canonical form collects, over one flat variable vector x:

* linear equalities      E x = f
* linear inequalities    G x <= h
* second-order cones     ||u||_2 <= t          (u, t affine in x)
* rotated cones          ||u||_2^2 <= 2 v w    (u, v, w affine in x; v, w >= 0)

with an affine objective c.x + c0, always minimized.  Two backends solve
the canonical form: HiGHS (through scipy) as the fast path for pure LPs,
and Clarabel for anything with cone blocks.  Rotated cones are lowered to
plain second-order cones before hitting the backend, so a backend never
needs native rotated-cone support.

Programs are built by a single owner and solved; distinct programs may be
solved concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

import clarabel

# Default solver tolerances (feasibility and relative gap).  Gap
# comparisons downstream (relaxation cost vs. rounded cost) assume
# solutions are accurate to roughly this scale.
FEAS_TOL = 1e-8
GAP_TOL = 1e-8

_SQRT2 = float(np.sqrt(2.0))


class SolverError(RuntimeError):
    """A backend failed without a usable status."""


@dataclass(frozen=True)
class Affine:
    """Affine map ``A @ x[cols] + const`` over a program's variables.

    ``A`` is dense (m, k), ``cols`` the k global variable indices, and
    ``const`` the length-m offset.  Rows are independent scalar affine
    expressions; cone blocks stack several of these.
    """

    A: np.ndarray
    cols: np.ndarray
    const: np.ndarray

    @classmethod
    def of(cls, A, cols, const=None) -> "Affine":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if const is None:
            const = np.zeros(A.shape[0])
        const = np.asarray(const, dtype=float).ravel()
        if A.shape != (const.size, cols.size):
            raise ValueError(
                f"affine block shape mismatch: A {A.shape}, "
                f"{cols.size} columns, {const.size} offsets"
            )
        return cls(A, cols, const)

    @classmethod
    def of_vars(cls, cols) -> "Affine":
        """Identity map on the listed variables."""
        cols = np.asarray(cols, dtype=np.int64).ravel()
        return cls(np.eye(cols.size), cols, np.zeros(cols.size))

    @classmethod
    def scalar(cls, cols, coefs, const: float = 0.0) -> "Affine":
        """Single-row affine expression ``coefs . x[cols] + const``."""
        coefs = np.asarray(coefs, dtype=float).ravel()
        return cls.of(coefs.reshape(1, -1), cols, np.array([const]))

    @property
    def m(self) -> int:
        return self.const.size

    def value(self, x: np.ndarray) -> np.ndarray:
        return self.A @ x[self.cols] + self.const


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one solve: status, primal point, objective value.

    ``x`` and ``objective`` are populated only when status is
    ``"optimal"``; ``diagnostics`` carries the raw backend status string
    otherwise.
    """

    status: str  # optimal | infeasible | unbounded | numerical_failure
    x: np.ndarray | None = None
    objective: float | None = None
    diagnostics: str = ""
    # Dual objective when the backend reports one.  At full accuracy it
    # matches ``objective``; after a reduced-accuracy acceptance it is
    # the side to quote as a lower bound.
    objective_dual: float | None = None


class ConicProgram:
    """Incrementally built conic program over a flat variable vector."""

    def __init__(self):
        self._n = 0
        # Linear families accumulate COO triplets plus right-hand sides.
        self._eq_i: list[np.ndarray] = []
        self._eq_j: list[np.ndarray] = []
        self._eq_v: list[np.ndarray] = []
        self._eq_rhs: list[np.ndarray] = []
        self._eq_m = 0
        self._in_i: list[np.ndarray] = []
        self._in_j: list[np.ndarray] = []
        self._in_v: list[np.ndarray] = []
        self._in_rhs: list[np.ndarray] = []
        self._in_m = 0
        # Cone blocks: ("soc", [t, u]) or ("rsoc", [v, w, u]).
        self._cones: list[tuple[str, list[Affine]]] = []
        self._cost_cols: list[np.ndarray] = []
        self._cost_coefs: list[np.ndarray] = []
        self._cost_const = 0.0

    # ------------------------------------------------------------------
    # variables

    @property
    def num_vars(self) -> int:
        return self._n

    def add_vars(self, k: int) -> np.ndarray:
        """Append k fresh variables, returning their indices."""
        idx = np.arange(self._n, self._n + k, dtype=np.int64)
        self._n += k
        return idx

    def add_var(self) -> int:
        return int(self.add_vars(1)[0])

    def _check_cols(self, cols: np.ndarray):
        if cols.size and (cols.min() < 0 or cols.max() >= self._n):
            raise IndexError("constraint references undeclared variable")

    # ------------------------------------------------------------------
    # linear constraints

    def _append_rows(self, family: str, A, cols, rhs):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        cols = np.asarray(cols, dtype=np.int64).ravel()
        self._check_cols(cols)
        m, k = A.shape
        if k != cols.size:
            raise ValueError("coefficient/column count mismatch")
        if rhs is None:
            rhs = np.zeros(m)
        rhs = np.asarray(rhs, dtype=float).ravel()
        if rhs.size != m:
            raise ValueError("right-hand side has wrong length")
        if family == "eq":
            base, ii, jj, vv, rr = self._eq_m, self._eq_i, self._eq_j, self._eq_v, self._eq_rhs
            self._eq_m += m
        else:
            base, ii, jj, vv, rr = self._in_m, self._in_i, self._in_j, self._in_v, self._in_rhs
            self._in_m += m
        mask = A != 0.0
        if mask.any():
            r, c = np.nonzero(mask)
            ii.append(r + base)
            jj.append(cols[c])
            vv.append(A[r, c])
        rr.append(rhs)

    def add_eq(self, A, cols, rhs=None):
        """Rows ``A @ x[cols] = rhs`` (rhs defaults to zero)."""
        self._append_rows("eq", A, cols, rhs)

    def add_ineq(self, A, cols, rhs=None):
        """Rows ``A @ x[cols] <= rhs`` (rhs defaults to zero)."""
        self._append_rows("in", A, cols, rhs)

    def add_nonneg(self, cols):
        """Constrain ``x[cols] >= 0``.

        Equivalent to ``add_ineq(-np.eye(k), cols, zeros)`` but appends the
        coordinate triplets directly; the dense identity block is wasteful
        when thousands of these rows are issued per second.
        """
        cols = np.asarray(cols, dtype=np.int64).ravel()
        self._check_cols(cols)
        if cols.size == 0:
            return
        self._in_i.append(self._in_m + np.arange(cols.size))
        self._in_j.append(cols)
        self._in_v.append(-np.ones(cols.size))
        self._in_rhs.append(np.zeros(cols.size))
        self._in_m += cols.size

    # ------------------------------------------------------------------
    # cones

    def add_soc(self, t: Affine, u: Affine):
        """Constrain ``||u||_2 <= t`` for affine u (vector) and t (scalar)."""
        if t.m != 1:
            raise ValueError("epigraph variable t must be scalar")
        self._check_cols(t.cols)
        self._check_cols(u.cols)
        if u.m == 0:
            # Degenerate cone: just t >= 0.
            self.add_ineq(-t.A, t.cols, t.const)
            return
        self._cones.append(("soc", [t, u]))

    def add_rotated(self, v: Affine, w: Affine, u: Affine):
        """Constrain ``||u||_2^2 <= 2 v w`` with v, w >= 0 implied."""
        if v.m != 1 or w.m != 1:
            raise ValueError("rotated-cone scalars v, w must be scalar affine")
        for a in (v, w, u):
            self._check_cols(a.cols)
        if u.m == 0:
            self.add_ineq(-v.A, v.cols, v.const)
            self.add_ineq(-w.A, w.cols, w.const)
            return
        self._cones.append(("rsoc", [v, w, u]))

    def add_epigraph_l2(self, u: Affine) -> int:
        """New variable t with ``||u||_2 <= t``; returns t's index."""
        t = self.add_var()
        self.add_soc(Affine.scalar([t], [1.0]), u)
        return t

    def add_quad_over_lin(self, u: Affine, w: Affine) -> int:
        """New variable t with ``||u||_2^2 <= t * w``; returns t's index.

        The defining cone is ``||u||^2 <= 2 (t/2) w``, so at the optimum
        t = ||u||^2 / w whenever w > 0; the cone also forces w >= 0.
        """
        t = self.add_var()
        self.add_rotated(Affine.scalar([t], [0.5]), w, u)
        return t

    # ------------------------------------------------------------------
    # objective

    def add_cost(self, cols, coefs):
        """Accumulate ``coefs . x[cols]`` into the (minimized) objective."""
        cols = np.asarray(cols, dtype=np.int64).ravel()
        self._check_cols(cols)
        coefs = np.asarray(coefs, dtype=float).ravel()
        if cols.size != coefs.size:
            raise ValueError("cost column/coefficient mismatch")
        self._cost_cols.append(cols)
        self._cost_coefs.append(coefs)

    def add_cost_const(self, value: float):
        self._cost_const += float(value)

    def _cost_vector(self) -> np.ndarray:
        q = np.zeros(self._n)
        for cols, coefs in zip(self._cost_cols, self._cost_coefs):
            np.add.at(q, cols, coefs)
        return q

    # ------------------------------------------------------------------
    # lowering

    def _linear_parts(self):
        def collect(ii, jj, vv, rr, m):
            if m == 0:
                return None, np.zeros(0)
            rhs = np.concatenate(rr) if rr else np.zeros(0)
            if ii:
                i = np.concatenate(ii)
                j = np.concatenate(jj)
                v = np.concatenate(vv)
            else:
                i = j = np.zeros(0, dtype=np.int64)
                v = np.zeros(0)
            mat = sparse.coo_matrix((v, (i, j)), shape=(m, self._n))
            return mat.tocsr(), rhs

        A_eq, b_eq = collect(self._eq_i, self._eq_j, self._eq_v, self._eq_rhs, self._eq_m)
        A_ub, b_ub = collect(self._in_i, self._in_j, self._in_v, self._in_rhs, self._in_m)
        return A_eq, b_eq, A_ub, b_ub

    def _soc_rows(self) -> list[list[Affine]]:
        """All cone blocks as plain SOC row stacks (rotated ones lowered)."""
        blocks = []
        for kind, parts in self._cones:
            if kind == "soc":
                t, u = parts
                blocks.append([t, u])
            else:
                v, w, u = parts
                # ||u||^2 <= 2vw, v,w >= 0  <=>  ||(v-w, sqrt2 u)|| <= v+w
                plus = Affine.of(
                    np.concatenate([v.A, w.A], axis=1),
                    np.concatenate([v.cols, w.cols]),
                    v.const + w.const,
                )
                minus = Affine.of(
                    np.concatenate([v.A, -w.A], axis=1),
                    np.concatenate([v.cols, w.cols]),
                    v.const - w.const,
                )
                scaled = Affine.of(_SQRT2 * u.A, u.cols, _SQRT2 * u.const)
                blocks.append([plus, minus, scaled])
        return blocks

    # ------------------------------------------------------------------
    # solving

    def solve(
        self,
        backend: str = "auto",
        feas_tol: float = FEAS_TOL,
        gap_tol: float = GAP_TOL,
    ) -> SolveResult:
        """Solve the program; never raises on infeasible/unbounded."""
        if backend == "auto":
            backend = "highs" if not self._cones else "clarabel"
        if backend == "highs":
            if self._cones:
                raise ValueError("HiGHS backend handles LPs only")
            return self._solve_highs()
        if backend == "clarabel":
            return self._solve_clarabel(feas_tol, gap_tol)
        raise ValueError(f"unknown backend {backend!r}")

    def _solve_highs(self) -> SolveResult:
        q = self._cost_vector()
        A_eq, b_eq, A_ub, b_ub = self._linear_parts()
        if A_eq is None and A_ub is None:
            if np.any(q != 0.0):
                return SolveResult(status="unbounded")
            return SolveResult("optimal", np.zeros(self._n), self._cost_const)
        res = linprog(
            c=q,
            A_ub=A_ub,
            b_ub=b_ub if A_ub is not None else None,
            A_eq=A_eq,
            b_eq=b_eq if A_eq is not None else None,
            bounds=(None, None),
            method="highs",
        )
        if res.status == 0:
            return SolveResult("optimal", np.asarray(res.x), float(res.fun) + self._cost_const)
        if res.status == 2:
            return SolveResult(status="infeasible", diagnostics=res.message)
        if res.status == 3:
            return SolveResult(status="unbounded", diagnostics=res.message)
        return SolveResult(status="numerical_failure", diagnostics=res.message)

    def _solve_clarabel(self, feas_tol: float, gap_tol: float) -> SolveResult:
        q = self._cost_vector()
        A_eq, b_eq, A_ub, b_ub = self._linear_parts()
        rows_i: list[np.ndarray] = []
        rows_j: list[np.ndarray] = []
        rows_v: list[np.ndarray] = []
        b_parts: list[np.ndarray] = []
        cones = []
        offset = 0
        if A_eq is not None:
            coo = A_eq.tocoo()
            rows_i.append(coo.row + offset)
            rows_j.append(coo.col)
            rows_v.append(coo.data)
            b_parts.append(b_eq)
            cones.append(clarabel.ZeroConeT(b_eq.size))
            offset += b_eq.size
        if A_ub is not None:
            coo = A_ub.tocoo()
            rows_i.append(coo.row + offset)
            rows_j.append(coo.col)
            rows_v.append(coo.data)
            b_parts.append(b_ub)
            cones.append(clarabel.NonnegativeConeT(b_ub.size))
            offset += b_ub.size
        for block in self._soc_rows():
            size = sum(a.m for a in block)
            r = offset
            for aff in block:
                mask = aff.A != 0.0
                if mask.any():
                    rr, cc = np.nonzero(mask)
                    rows_i.append(rr + r)
                    rows_j.append(aff.cols[cc])
                    # s = b - A x must equal the affine value, so negate.
                    rows_v.append(-aff.A[rr, cc])
                b_parts.append(aff.const)
                r += aff.m
            cones.append(clarabel.SecondOrderConeT(size))
            offset += size
        if offset == 0:
            if np.any(q != 0.0):
                return SolveResult(status="unbounded")
            return SolveResult("optimal", np.zeros(self._n), self._cost_const)
        i = np.concatenate(rows_i) if rows_i else np.zeros(0, dtype=np.int64)
        j = np.concatenate(rows_j) if rows_j else np.zeros(0, dtype=np.int64)
        v = np.concatenate(rows_v) if rows_v else np.zeros(0)
        A = sparse.coo_matrix((v, (i, j)), shape=(offset, self._n)).tocsc()
        b = np.concatenate(b_parts)
        P = sparse.csc_matrix((self._n, self._n))
        settings = clarabel.DefaultSettings()
        settings.verbose = False
        settings.tol_feas = feas_tol
        settings.tol_gap_rel = gap_tol
        settings.tol_gap_abs = gap_tol
        # Large ill-conditioned instances can stall short of full
        # accuracy with a perfectly usable iterate; let the solver
        # classify those as almost-solved instead of failing outright.
        settings.reduced_tol_feas = 1e-3
        settings.reduced_tol_gap_rel = 1e-2
        settings.reduced_tol_gap_abs = 1e-2
        solver = clarabel.DefaultSolver(P, q, A, b, cones, settings)
        sol = solver.solve()
        status = sol.status
        S = clarabel.SolverStatus
        if status in (S.Solved, S.AlmostSolved):
            x = np.asarray(sol.x)
            note = (
                ""
                if status == S.Solved
                else f"reduced accuracy: r_prim={sol.r_prim:.1e} r_dual={sol.r_dual:.1e}"
            )
            return SolveResult(
                "optimal",
                x,
                float(q @ x) + self._cost_const,
                note,
                float(sol.obj_val_dual) + self._cost_const,
            )
        if status in (S.PrimalInfeasible, S.AlmostPrimalInfeasible):
            return SolveResult(status="infeasible", diagnostics=str(status))
        if status in (S.DualInfeasible, S.AlmostDualInfeasible):
            return SolveResult(status="unbounded", diagnostics=str(status))
        return SolveResult(status="numerical_failure", diagnostics=str(status))

    # ------------------------------------------------------------------
    # diagnostics

    def max_violation(self, x: np.ndarray) -> float:
        """Largest constraint violation of x across all families."""
        worst = 0.0
        A_eq, b_eq, A_ub, b_ub = self._linear_parts()
        if A_eq is not None:
            r = A_eq @ x - b_eq
            if r.size:
                worst = max(worst, float(np.abs(r).max()))
        if A_ub is not None:
            r = A_ub @ x - b_ub
            if r.size:
                worst = max(worst, float(r.max()))
        for kind, parts in self._cones:
            if kind == "soc":
                t, u = parts
                worst = max(worst, float(np.linalg.norm(u.value(x)) - t.value(x)[0]))
            else:
                v, w, u = parts
                vv = float(v.value(x)[0])
                ww = float(w.value(x)[0])
                worst = max(worst, -vv, -ww)
                worst = max(worst, float(u.value(x) @ u.value(x)) - 2.0 * vv * ww)
        return worst

    def dump(self) -> str:
        """Plain-text canonical form, stable across runs for diffing."""

        def fmt(aff: Affine) -> list[str]:
            out = []
            for r in range(aff.m):
                terms = [
                    f"{aff.A[r, k]!r}*x{aff.cols[k]}"
                    for k in range(aff.cols.size)
                    if aff.A[r, k] != 0.0
                ]
                if aff.const[r] != 0.0 or not terms:
                    terms.append(f"{aff.const[r]!r}")
                out.append(" + ".join(terms))
            return out

        lines = [f"vars {self._n}"]
        q = self._cost_vector()
        cost = [f"{q[k]!r}*x{k}" for k in np.nonzero(q)[0]]
        cost.append(f"{self._cost_const!r}")
        lines.append("min " + " + ".join(cost))
        A_eq, b_eq, A_ub, b_ub = self._linear_parts()
        for name, A, rhs, op in (("eq", A_eq, b_eq, "="), ("ineq", A_ub, b_ub, "<=")):
            if A is None:
                continue
            lines.append(f"{name} rows {rhs.size}")
            Ad = A.toarray()
            for r in range(rhs.size):
                terms = [f"{Ad[r, k]!r}*x{k}" for k in np.nonzero(Ad[r])[0]] or ["0"]
                lines.append("  " + " + ".join(terms) + f" {op} {rhs[r]!r}")
        for kind, parts in self._cones:
            lines.append(kind)
            for aff in parts:
                for row in fmt(aff):
                    lines.append("  " + row)
        return "\n".join(lines)


def solve_lp_feasibility(A_blocks, n: int) -> bool:
    """Feasibility of ``{x : A x <= b for each (A, b) block}`` via HiGHS.

    Raises SolverError on backend failure rather than guessing.
    """
    prog = ConicProgram()
    x = prog.add_vars(n)
    for A, b in A_blocks:
        if A.shape[0]:
            prog.add_ineq(A, x, b)
    res = prog.solve(backend="highs")
    if res.status == "optimal":
        return True
    if res.status == "infeasible":
        return False
    raise SolverError(f"feasibility LP returned {res.status}: {res.diagnostics}")
