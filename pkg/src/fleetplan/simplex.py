"""Dense bounded-variable revised simplex.

Variables live in boxes [lo, hi] (either side may be infinite) and are kept
nonbasic at a bound instead of being expanded into constraint rows, so the
basis stays at ~one column per constraint. Inequalities get a slack column;
equalities get a slack fixed to [0, 0]. Feasibility is restored by a
composite phase 1 that minimizes the total bound violation of the basic
variables, which also makes warm starts from a previous basis cheap.

Pivoting is deterministic: most-negative reduced cost with lowest-index
tie-breaking, switching to Bland's rule after a configurable streak of
degenerate pivots. The basis inverse is maintained explicitly and
refactorized every ``REFACTOR_EVERY`` pivots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyRange, MalformedProblem

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

REFACTOR_EVERY = 50
BLAND_AFTER = 100

# status codes per column
_BASIC, _AT_LO, _AT_UP, _FREE = 0, 1, 2, 3

_REL_CODES = {"<=": -1, "<": -1, "=": 0, "==": 0, ">=": 1, ">": 1}


class LpProblem:
    """Minimization LP: min c'x  s.t. rows (a, rel, rhs), lo <= x <= hi.

    ``constraints`` may be a list of ``(coefficients, relation, rhs)`` tuples
    with relation in {<=, =, >=}, or a pre-built ``(A, relations, rhs)``
    triple of arrays. ``var_bounds`` is a list of (lo, hi) pairs or an
    ``(lo, hi)`` array pair; use ``None``/``inf`` for an unbounded side.
    """

    __slots__ = ("objective", "lo", "hi", "a", "rel", "rhs")

    def __init__(self, objective, var_bounds, constraints):
        self.objective = np.asarray(objective, dtype=float)
        if self.objective.ndim != 1:
            raise MalformedProblem("objective must be a vector")
        n = self.objective.shape[0]

        if isinstance(var_bounds, tuple) and len(var_bounds) == 2 and np.ndim(var_bounds[0]) == 1:
            lo = np.asarray(var_bounds[0], dtype=float)
            hi = np.asarray(var_bounds[1], dtype=float)
        else:
            lo = np.array([-np.inf if b[0] is None else float(b[0]) for b in var_bounds])
            hi = np.array([np.inf if b[1] is None else float(b[1]) for b in var_bounds])
        if lo.shape != (n,) or hi.shape != (n,):
            raise MalformedProblem(f"bounds must cover all {n} variables")
        if np.any(lo > hi):
            j = int(np.argmax(lo > hi))
            raise MalformedProblem(f"variable {j} has lo > hi ({lo[j]} > {hi[j]})")
        self.lo, self.hi = lo, hi

        if isinstance(constraints, tuple) and len(constraints) == 3:
            a, rel, rhs = constraints
            self.a = np.ascontiguousarray(a, dtype=float)
            self.rel = np.asarray(rel, dtype=np.int8)
            self.rhs = np.asarray(rhs, dtype=float)
        else:
            rows, rel, rhs = [], [], []
            for coeffs, r, b in constraints:
                row = np.asarray(coeffs, dtype=float)
                if row.shape != (n,):
                    raise MalformedProblem(
                        f"constraint row has length {row.shape}, expected {n}")
                if r not in _REL_CODES:
                    raise MalformedProblem(f"unknown relation {r!r}")
                rows.append(row)
                rel.append(_REL_CODES[r])
                rhs.append(float(b))
            self.a = np.array(rows, dtype=float).reshape(len(rows), n)
            self.rel = np.array(rel, dtype=np.int8)
            self.rhs = np.array(rhs, dtype=float)
        if self.a.shape != (self.rhs.shape[0], n) or self.rel.shape != self.rhs.shape:
            raise MalformedProblem("constraint arrays are inconsistent")

    @property
    def num_vars(self):
        return self.objective.shape[0]

    @property
    def num_rows(self):
        return self.rhs.shape[0]


@dataclass
class LpSolution:
    status: str
    primal: np.ndarray
    objective_value: float
    iterations: int
    hit_iteration_limit: bool = False
    # (basic column ids, at-upper flags over structural+slack columns);
    # feed back through solve(start_basis=...) to warm start a nearby LP
    basis: tuple = field(default=None, repr=False)


def residuals(lp: LpProblem, point) -> tuple[float, float]:
    """Max constraint violation and max bound violation at ``point``."""
    x = np.asarray(point, dtype=float)
    if x.shape != (lp.num_vars,):
        raise MalformedProblem(
            f"point has length {x.shape}, expected {lp.num_vars}")
    if lp.num_rows:
        ax = lp.a @ x
        over = ax - lp.rhs
        viol = np.where(lp.rel == 0, np.abs(over),
                        np.where(lp.rel < 0, np.maximum(over, 0.0),
                                 np.maximum(-over, 0.0)))
        cviol = float(np.max(viol)) if viol.size else 0.0
    else:
        cviol = 0.0
    bviol = float(np.max(np.maximum(lp.lo - x, 0.0) + np.maximum(x - lp.hi, 0.0)))
    return cviol, bviol


def dump_problem(lp: LpProblem) -> str:
    """Plain-text fixed-point rendering (one line per row) for diffing."""
    sym = {-1: "<=", 0: "=", 1: ">="}
    out = ["min " + " ".join(f"{c:+.6f}" for c in lp.objective)]
    for k in range(lp.num_rows):
        row = " ".join(f"{v:+.6f}" for v in lp.a[k])
        out.append(f"{row} {sym[int(lp.rel[k])]} {lp.rhs[k]:+.6f}")
    lob = " ".join("-inf" if not np.isfinite(v) else f"{v:+.6f}" for v in lp.lo)
    hib = " ".join("+inf" if not np.isfinite(v) else f"{v:+.6f}" for v in lp.hi)
    out.append("lo " + lob)
    out.append("hi " + hib)
    return "\n".join(out) + "\n"


class _Simplex:
    """Working state for one solve: columns = structural vars then slacks."""

    def __init__(self, lp: LpProblem, tol: float):
        n, m = lp.num_vars, lp.num_rows
        self.n, self.m = n, m
        self.N = n + m
        self.A = np.empty((m, self.N))
        self.A[:, :n] = lp.a
        self.A[:, n:] = np.eye(m)
        self.b = lp.rhs.copy()
        self.c = np.zeros(self.N)
        self.c[:n] = lp.objective
        self.lo = np.empty(self.N)
        self.hi = np.empty(self.N)
        self.lo[:n], self.hi[:n] = lp.lo, lp.hi
        # slack bounds encode the relation: Ax + s = b
        rel = lp.rel
        self.lo[n:] = np.where(rel <= 0, 0.0, -np.inf)
        self.hi[n:] = np.where(rel >= 0, 0.0, np.inf)
        self.fixed = self.lo == self.hi
        self.tol = tol
        self.tol_piv = 1e-10
        self.iterations = 0
        self.degen_streak = 0
        self.since_refactor = 0

    def start_cold(self):
        self.basis = np.arange(self.n, self.N, dtype=np.intp)
        self.stat = np.empty(self.N, dtype=np.int8)
        self._rest_to_bounds(np.arange(self.n))
        self.stat[self.basis] = _BASIC
        self.Binv = np.eye(self.m)
        self._recompute_xb()

    def start_warm(self, basic, at_upper) -> bool:
        basic = np.asarray(basic, dtype=np.intp)
        if basic.shape != (self.m,) or len(set(basic.tolist())) != self.m:
            return False
        if basic.size and (basic.min() < 0 or basic.max() >= self.N):
            return False
        B = self.A[:, basic]
        try:
            Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            return False
        if not np.all(np.isfinite(Binv)):
            return False
        self.basis = basic
        self.stat = np.empty(self.N, dtype=np.int8)
        nonbasic = np.setdiff1d(np.arange(self.N), basic, assume_unique=False)
        up = np.asarray(at_upper, dtype=bool)
        if up.shape != (self.N,):
            return False
        self._rest_to_bounds(nonbasic, prefer_upper=up)
        self.stat[self.basis] = _BASIC
        self.Binv = Binv
        self._recompute_xb()
        return True

    def _rest_to_bounds(self, cols, prefer_upper=None):
        lo, hi = self.lo[cols], self.hi[cols]
        st = np.where(np.isfinite(lo), _AT_LO,
                      np.where(np.isfinite(hi), _AT_UP, _FREE)).astype(np.int8)
        if prefer_upper is not None:
            pick_up = prefer_upper[cols] & np.isfinite(hi)
            st = np.where(pick_up, _AT_UP, st)
        self.stat[cols] = st

    def _nonbasic_values(self):
        v = np.where(self.stat == _AT_LO, self.lo,
                     np.where(self.stat == _AT_UP, self.hi, 0.0))
        v[self.basis] = 0.0
        return v

    def _recompute_xb(self):
        v = self._nonbasic_values()
        self.xB = self.Binv @ (self.b - self.A @ v)

    def _refactor(self):
        B = self.A[:, self.basis]
        self.Binv = np.linalg.inv(B)
        self._recompute_xb()
        self.since_refactor = 0

    def full_x(self):
        x = self._nonbasic_values()
        x[self.basis] = self.xB
        return x

    # ---- pivoting ----

    def _pivot(self, q, sigma, w, theta, r, leave_at_up):
        """Entering column q moves by sigma*theta; basic row r leaves."""
        inc = -sigma * w
        self.xB += inc * theta
        leaving = self.basis[r]
        self.stat[leaving] = _AT_UP if leave_at_up else _AT_LO
        enter_from = (self.lo[q] if self.stat[q] == _AT_LO
                      else self.hi[q] if self.stat[q] == _AT_UP else 0.0)
        self.xB[r] = enter_from + sigma * theta
        self.basis[r] = q
        self.stat[q] = _BASIC
        # product-form update of the explicit inverse
        wr = w[r]
        row = self.Binv[r] / wr
        w2 = w.copy()
        w2[r] = 0.0
        self.Binv -= np.outer(w2, row)
        self.Binv[r] = row
        self.iterations += 1
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self._refactor()

    def _flip(self, q, sigma, w, theta):
        self.xB += (-sigma * w) * theta
        self.stat[q] = _AT_UP if self.stat[q] == _AT_LO else _AT_LO
        self.iterations += 1

    def _choose_entering(self, d, bland):
        stat = self.stat
        score = np.where(stat == _AT_LO, d,
                         np.where(stat == _AT_UP, -d,
                                  np.where(stat == _FREE, -np.abs(d), np.inf)))
        score = np.where(self.fixed, np.inf, score)
        eligible = score < -self.tol
        if not np.any(eligible):
            return -1
        if bland:
            return int(np.argmax(eligible))
        masked = np.where(eligible, score, np.inf)
        return int(np.argmin(masked))

    def _ratio_phase2(self, q, sigma, w):
        inc = -sigma * w
        loB, hiB = self.lo[self.basis], self.hi[self.basis]
        theta = np.full(self.m, np.inf)
        leave_up = np.zeros(self.m, dtype=bool)
        down = inc < -self.tol_piv
        up = inc > self.tol_piv
        with np.errstate(invalid="ignore"):
            theta[down] = (self.xB[down] - loB[down]) / (-inc[down])
            theta[up] = (hiB[up] - self.xB[up]) / inc[up]
        leave_up[up] = True
        theta = np.maximum(theta, 0.0)
        return theta, leave_up

    def _leaving_row(self, theta, theta_star):
        cand = np.flatnonzero(theta <= theta_star + 1e-12)
        return int(cand[np.argmin(self.basis[cand])])

    def run_phase2(self, max_iter):
        while True:
            if self.iterations >= max_iter:
                return "limit"
            bland = self.degen_streak >= BLAND_AFTER
            y = self.c[self.basis] @ self.Binv
            d = self.c - y @ self.A
            q = self._choose_entering(d, bland)
            if q < 0:
                return OPTIMAL
            sigma = 1.0 if (self.stat[q] == _AT_LO
                            or (self.stat[q] == _FREE and d[q] < 0)) else -1.0
            w = self.Binv @ self.A[:, q]
            theta, leave_up = self._ratio_phase2(q, sigma, w)
            theta_basic = theta.min() if self.m else np.inf
            theta_flip = self.hi[q] - self.lo[q]
            theta_star = min(theta_basic, theta_flip)
            if not np.isfinite(theta_star):
                return UNBOUNDED
            self.degen_streak = self.degen_streak + 1 if theta_star <= self.tol_piv else 0
            if theta_flip <= theta_basic:
                self._flip(q, sigma, w, theta_flip)
                continue
            r = self._leaving_row(theta, theta_star)
            self._pivot(q, sigma, w, theta[r], r, leave_up[r])

    def run_phase1(self, max_iter):
        tol_b = 1e-9
        while True:
            loB, hiB = self.lo[self.basis], self.hi[self.basis]
            below = self.xB < loB - tol_b
            above = self.xB > hiB + tol_b
            phi = float(np.sum((loB - self.xB)[below]) + np.sum((self.xB - hiB)[above]))
            if phi <= 1e-8:
                return "feasible"
            if self.iterations >= max_iter:
                return "limit"
            bland = self.degen_streak >= BLAND_AFTER
            wdir = above.astype(float) - below.astype(float)
            y = wdir @ self.Binv
            d = -(y @ self.A)
            q = self._choose_entering(d, bland)
            if q < 0:
                return "stuck"
            sigma = 1.0 if (self.stat[q] == _AT_LO
                            or (self.stat[q] == _FREE and d[q] < 0)) else -1.0
            w = self.Binv @ self.A[:, q]
            inc = -sigma * w
            theta = np.full(self.m, np.inf)
            leave_up = np.zeros(self.m, dtype=bool)
            feas = ~(below | above)
            mdown = feas & (inc < -self.tol_piv) & np.isfinite(loB)
            mup = feas & (inc > self.tol_piv) & np.isfinite(hiB)
            # infeasible basics block where they re-enter their box
            bup = below & (inc > self.tol_piv)
            adown = above & (inc < -self.tol_piv)
            with np.errstate(invalid="ignore"):
                theta[mdown] = (self.xB[mdown] - loB[mdown]) / (-inc[mdown])
                theta[mup] = (hiB[mup] - self.xB[mup]) / inc[mup]
                theta[bup] = (loB[bup] - self.xB[bup]) / inc[bup]
                theta[adown] = (self.xB[adown] - hiB[adown]) / (-inc[adown])
            leave_up[mup] = True
            leave_up[adown] = True
            theta = np.maximum(theta, 0.0)
            theta_basic = theta.min() if self.m else np.inf
            theta_flip = self.hi[q] - self.lo[q]
            theta_star = min(theta_basic, theta_flip)
            if not np.isfinite(theta_star):
                # total violation is bounded below, so a block must exist
                return "stuck"
            self.degen_streak = self.degen_streak + 1 if theta_star <= self.tol_piv else 0
            if theta_flip <= theta_basic:
                self._flip(q, sigma, w, theta_flip)
                continue
            r = self._leaving_row(theta, theta_star)
            self._pivot(q, sigma, w, theta[r], r, leave_up[r])


def solve(lp: LpProblem, tol: float = 1e-9, start_basis=None,
          max_iterations: int | None = None) -> LpSolution:
    """Solve the LP to optimality (deterministic for identical inputs).

    ``start_basis`` is the ``basis`` handle from a previous solution of a
    structurally identical LP; an unusable handle silently falls back to a
    cold start. ``max_iterations`` caps total pivots; when hit, the solution
    carries ``hit_iteration_limit=True`` and best-effort status.
    """
    sx = _Simplex(lp, tol)
    if max_iterations is None:
        max_iterations = 2000 + 40 * (sx.m + sx.n)
    warm_ok = False
    if start_basis is not None:
        basic, at_upper = start_basis
        warm_ok = sx.start_warm(basic, at_upper)
    if not warm_ok:
        sx.start_cold()

    out1 = sx.run_phase1(max_iterations)
    if out1 == "stuck":
        x = sx.full_x()[:sx.n]
        return LpSolution(INFEASIBLE, x, float("nan"), sx.iterations,
                          basis=_export_basis(sx))
    if out1 == "limit":
        x = sx.full_x()[:sx.n]
        return LpSolution(INFEASIBLE, x, float("nan"), sx.iterations,
                          hit_iteration_limit=True, basis=_export_basis(sx))

    sx._refactor()
    out2 = sx.run_phase2(max_iterations)
    sx._refactor()  # fresh inverse for clean primal values
    x = sx.full_x()[:sx.n]
    obj = float(lp.objective @ x)
    if out2 == UNBOUNDED:
        return LpSolution(UNBOUNDED, x, float("-inf"), sx.iterations,
                          basis=_export_basis(sx))
    return LpSolution(OPTIMAL, x, obj, sx.iterations,
                      hit_iteration_limit=(out2 == "limit"),
                      basis=_export_basis(sx))


def _export_basis(sx):
    return (sx.basis.copy(), sx.stat == _AT_UP)
