"""Two-phase bounded-variable primal simplex.

Works on the revised form: the basis matrix is re-solved with LAPACK every
iteration, which is plenty for the few hundred columns these networks produce
and keeps round-off from accumulating in a tableau.  Pricing is Dantzig's
largest reduced cost until a run of degenerate pivots is seen, after which
Bland's lowest-index rule takes over for the rest of the solve.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import SolverError
from .problem import EPS_FEAS, INFEASIBLE, LE, OPTIMAL, UNBOUNDED, LpProblem, LpSolution

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
DEGENERATE_STEP = 1e-12
BLAND_AFTER = 25  # consecutive degenerate pivots before switching to Bland
SNAP = 1e-12

_LOWER, _UPPER, _BASIC = 0, 1, 2


class _Simplex:
    def __init__(self, A, b, u, basis):
        self.A = A
        self.b = b
        self.u = u
        self.m, self.n = A.shape
        self.basis = list(basis)
        self.state = np.full(self.n, _LOWER)
        self.state[self.basis] = _BASIC
        self.iterations = 0
        self.bland = False

    def nonbasic_values(self) -> np.ndarray:
        x = np.zeros(self.n)
        at_upper = self.state == _UPPER
        x[at_upper] = self.u[at_upper]
        return x

    def basic_values(self, x_n: np.ndarray) -> np.ndarray:
        B = self.A[:, self.basis]
        return np.linalg.solve(B, self.b - self.A @ x_n)

    def point(self) -> np.ndarray:
        x = self.nonbasic_values()
        x[self.basis] = self.basic_values(x)
        return x

    def run(self, c: np.ndarray, max_iter: int) -> str:
        degenerate_run = 0
        cost_tol = COST_TOL * max(1.0, float(np.max(np.abs(c))) if len(c) else 1.0)
        while True:
            if self.iterations >= max_iter:
                raise SolverError(f"simplex did not converge within {max_iter} iterations")
            self.iterations += 1
            B = self.A[:, self.basis]
            try:
                x_n = self.nonbasic_values()
                x_b = np.linalg.solve(B, self.b - self.A @ x_n)
                y = np.linalg.solve(B.T, c[self.basis])
            except np.linalg.LinAlgError as exc:
                raise SolverError(f"singular basis: {exc}") from None
            d = c - self.A.T @ y

            movable = self.u > 0
            improving = ((self.state == _LOWER) & (d > cost_tol) & movable) | (
                (self.state == _UPPER) & (d < -cost_tol)
            )
            candidates = np.flatnonzero(improving)
            if len(candidates) == 0:
                return OPTIMAL
            if self.bland:
                q = int(candidates[0])
            else:
                q = int(candidates[np.argmax(np.abs(d[candidates]))])
            direction = 1.0 if self.state[q] == _LOWER else -1.0

            alpha = np.linalg.solve(B, self.A[:, q]) * direction
            # x_b(t) = x_b - t * alpha
            t_best = self.u[q]
            leave = -1
            leave_to = _LOWER
            u_b = self.u[self.basis]
            for i in range(self.m):
                a = alpha[i]
                if a > PIVOT_TOL:
                    t, to = max(x_b[i], 0.0) / a, _LOWER
                elif a < -PIVOT_TOL and math.isfinite(u_b[i]):
                    t, to = max(u_b[i] - x_b[i], 0.0) / -a, _UPPER
                else:
                    continue
                if t < t_best - DEGENERATE_STEP or (
                    leave >= 0 and abs(t - t_best) <= DEGENERATE_STEP and self.basis[i] < self.basis[leave]
                ):
                    t_best, leave, leave_to = t, i, to
            if math.isinf(t_best):
                return UNBOUNDED

            if t_best <= DEGENERATE_STEP:
                degenerate_run += 1
                if degenerate_run >= BLAND_AFTER:
                    self.bland = True
            else:
                degenerate_run = 0

            if leave < 0:
                # entering variable reaches its own opposite bound first
                self.state[q] = _UPPER if self.state[q] == _LOWER else _LOWER
                continue
            out = self.basis[leave]
            self.state[out] = leave_to
            self.state[q] = _BASIC
            self.basis[leave] = q


def solve(prob: LpProblem, max_iter: int | None = None) -> LpSolution:
    """Maximize ``prob``.  Raises :class:`SolverError` on numerical failure."""
    A0, m, n = prob.A, prob.n_rows, prob.n_vars
    lo, hi = prob.lo, prob.hi
    u0 = hi - lo
    b = prob.rhs - A0 @ lo

    if m == 0:
        if np.any((prob.objective > 0) & np.isinf(u0)):
            return LpSolution(UNBOUNDED, math.inf, labels=prob.labels)
        x = np.where(prob.objective > 0, hi, lo)
        return LpSolution(OPTIMAL, float(prob.objective @ x), x, prob.labels)

    # slacks: +s for <=, -s for >=
    slack_cols = [r for r, rel in enumerate(prob.relations) if rel != "="]
    S = np.zeros((m, len(slack_cols)))
    for k, r in enumerate(slack_cols):
        S[r, k] = 1.0 if prob.relations[r] == LE else -1.0
    A = np.hstack([A0, S])
    u = np.concatenate([u0, np.full(len(slack_cols), math.inf)])

    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    basis = [-1] * m
    for k, r in enumerate(slack_cols):
        if A[r, n + k] > 0:
            basis[r] = n + k
    art_rows = [r for r in range(m) if basis[r] < 0]
    n_struct = A.shape[1]
    if art_rows:
        E = np.zeros((m, len(art_rows)))
        for k, r in enumerate(art_rows):
            E[r, k] = 1.0
            basis[r] = n_struct + k
        A = np.hstack([A, E])
        u = np.concatenate([u, np.full(len(art_rows), math.inf)])
    total = A.shape[1]
    if max_iter is None:
        max_iter = 50 * (m + total) + 1000

    engine = _Simplex(A, b, u, basis)
    if art_rows:
        c1 = np.zeros(total)
        c1[n_struct:] = -1.0
        status = engine.run(c1, max_iter)
        if status != OPTIMAL:
            raise SolverError(f"phase one ended {status}")
        infeasibility = float(np.sum(engine.point()[n_struct:]))
        if infeasibility > EPS_FEAS * (1.0 + float(np.max(np.abs(b)))):
            return LpSolution(INFEASIBLE, labels=prob.labels, iterations=engine.iterations)
        engine.u = u.copy()
        engine.u[n_struct:] = 0.0
        engine.state[[j for j in range(n_struct, total) if engine.state[j] == _UPPER]] = _LOWER

    c2 = np.zeros(total)
    c2[:n] = prob.objective
    status = engine.run(c2, max_iter)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, math.inf, labels=prob.labels, iterations=engine.iterations)

    x = engine.point()[:n] + lo
    x = np.clip(x, lo, hi)
    x[np.abs(x) < SNAP] = 0.0
    problems = prob.violations(x)
    if problems:
        raise SolverError("optimal point failed certification: " + "; ".join(problems[:5]))
    return LpSolution(OPTIMAL, float(prob.objective @ x), x, prob.labels, engine.iterations)
