"""Epigraph solver for maximin problems over concave quadratic branches.

Solves  maximize_x  min_t  q_t(x),   q_t(x) = 2 c_t.x - x' Q_t x + d_t
        subject to  x' A_j x + 2 b_j.x + e_j <= 0,    j = 1..J

with every Q_t and A_j positive semidefinite, via a log-barrier interior-point
method on the epigraph form (max s s.t. s <= q_t(x)).  Complex instances are
handled by embedding into reals: a Hermitian form x^H Q x maps to
[[Re Q, -Im Q], [Im Q, Re Q]] acting on [Re x; Im x].

A phase-one pass (minimizing the worst constraint value with the same
machinery) recovers a strictly feasible start when the caller's point is not;
if even that optimum is nonnegative the problem is reported infeasible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla


@dataclass
class ConcaveBranch:
    """q(x) = 2 c.x - x' Q x + d with Q PSD (None means no quadratic part)."""

    c: np.ndarray
    q: np.ndarray | None = None
    d: float = 0.0


@dataclass
class QuadConstraint:
    """x' A x + 2 b.x + e <= 0 with A PSD (None for an affine constraint)."""

    a: np.ndarray | None
    b: np.ndarray
    e: float


@dataclass
class QcqpResult:
    x: np.ndarray
    objective: float          # min_t q_t(x) at the returned point
    status: str               # "optimal" | "infeasible" | "max_iter"
    max_violation: float
    kkt_residual: float
    newton_iters: int
    infeasibility: float = 0.0  # phase-one optimum when status == "infeasible"


def _embed_matrix(q: np.ndarray) -> np.ndarray:
    n = q.shape[0]
    out = np.empty((2 * n, 2 * n))
    out[:n, :n] = q.real
    out[:n, n:] = -q.imag
    out[n:, :n] = q.imag
    out[n:, n:] = q.real
    return out


def _embed_vector(c: np.ndarray) -> np.ndarray:
    return np.concatenate([c.real, c.imag])


def _branch_value(br: ConcaveBranch, x: np.ndarray) -> float:
    val = 2.0 * float(br.c @ x) + br.d
    if br.q is not None:
        val -= float(x @ br.q @ x)
    return val


def _constraint_value(con: QuadConstraint, x: np.ndarray) -> float:
    val = 2.0 * float(con.b @ x) + con.e
    if con.a is not None:
        val += float(x @ con.a @ x)
    return val


def _scaled(branches, constraints):
    """Normalize each constraint and the branch family to O(1) coefficients."""
    cons = []
    for con in constraints:
        s = max(np.abs(con.b).max(initial=0.0), abs(con.e),
                np.abs(con.a).max() if con.a is not None else 0.0, 1e-30)
        cons.append(QuadConstraint(None if con.a is None else con.a / s,
                                   con.b / s, con.e / s))
    s_br = max(
        max(np.abs(br.c).max(initial=0.0), abs(br.d),
            np.abs(br.q).max() if br.q is not None else 0.0)
        for br in branches
    )
    s_br = max(s_br, 1e-30)
    brs = [ConcaveBranch(br.c / s_br, None if br.q is None else br.q / s_br,
                         br.d / s_br) for br in branches]
    return brs, cons


class _Barrier:
    """min -tau*s - sum_i log r_i(z) over z = (x, s).

    Every residual has the common form r_i(z) = e0_i + L_i.z - x' P_i x with
    P_i PSD: branches contribute r = q_t(x) - s, hard constraints r = -g_j(x).
    The stacked (P, L, e0) representation keeps each Newton step to a handful
    of BLAS calls.
    """

    def __init__(self, branches, constraints, n):
        self.n = n
        self.m = len(branches) + len(constraints)
        self.n_branches = len(branches)
        self.lin = np.zeros((self.m, n + 1))
        self.e0 = np.zeros(self.m)
        quads, idx = [], []
        for i, br in enumerate(branches):
            self.lin[i, :n] = 2.0 * br.c
            self.lin[i, n] = -1.0
            self.e0[i] = br.d
            if br.q is not None:
                quads.append(br.q)
                idx.append(i)
        for j, con in enumerate(constraints):
            i = len(branches) + j
            self.lin[i, :n] = -2.0 * con.b
            self.e0[i] = -con.e
            if con.a is not None:
                quads.append(con.a)
                idx.append(i)
        self.quads = np.stack(quads) if quads else np.zeros((0, n, n))
        self.quad_idx = np.asarray(idx, dtype=int)

    def residuals(self, z):
        r = self.e0 + self.lin @ z
        if self.quads.size:
            px = self.quads @ z[:self.n]
            r[self.quad_idx] -= px @ z[:self.n]
        return r

    def value(self, z, tau):
        r = self.residuals(z)
        if np.any(r <= 0.0):
            return np.inf
        return -tau * z[self.n] - float(np.sum(np.log(r)))

    def grad_hess(self, z, tau):
        n = self.n
        x = z[:n]
        rows = self.lin.copy()
        r = self.e0 + self.lin @ z
        if self.quads.size:
            px = self.quads @ x                       # (p, n)
            r[self.quad_idx] -= px @ x
            rows[self.quad_idx, :n] -= 2.0 * px
        if np.any(r <= 0.0):  # caller treats an out-of-domain point as a stop
            return None, None, r, rows
        inv_r = 1.0 / r
        grad = -(rows.T @ inv_r)
        grad[n] -= tau
        hess = (rows * inv_r[:, None] ** 2).T @ rows
        if self.quads.size:
            hess[:n, :n] += np.einsum(
                "p,pjk->jk", 2.0 * inv_r[self.quad_idx], self.quads)
        return grad, hess, r, rows


def _newton_minimize(barrier: _Barrier, z, tau, max_steps=60, ctol=1e-11):
    """Damped Newton on the barrier objective.

    Along a search direction every residual is an exact downward parabola
    r_i + t dr_i - t^2 q_i, so the step to the domain boundary and the line
    search both cost O(m) per trial instead of re-evaluating the quadratics.
    """
    steps = 0
    for _ in range(max_steps):
        grad, hess, r, rows = barrier.grad_hess(z, tau)
        if grad is None:
            break
        jitter = 0.0
        for _ in range(8):
            try:
                chol = sla.cho_factor(
                    hess + jitter * np.eye(hess.shape[0]) if jitter else hess,
                    lower=True, check_finite=False)
                break
            except np.linalg.LinAlgError:
                jitter = max(jitter * 100.0, 1e-12 * max(1.0, np.abs(hess).max()))
        else:
            break
        delta = sla.cho_solve(chol, -grad, check_finite=False)
        decrement2 = float(-grad @ delta)
        if decrement2 / 2.0 <= ctol:
            break
        dr = rows @ delta
        q = np.zeros(barrier.m)
        if barrier.quads.size:
            dx = delta[:barrier.n]
            q[barrier.quad_idx] = np.maximum(
                np.einsum("pjk,j,k->p", barrier.quads, dx, dx), 0.0)
        # Largest step keeping every parabola r + t dr - t^2 q positive.  The
        # root formula is branch-selected to avoid cancellation when q r is
        # tiny relative to dr^2.
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            disc = np.sqrt(dr ** 2 + 4.0 * q * r)
            # dr >= 0: (dr + disc)/2q, unbounded when q == 0
            # dr <  0: conjugate form 2r/(disc - dr), valid for any q >= 0
            root_pos = np.where(q > 0.0,
                                (dr + disc) / np.where(q > 0.0, 2.0 * q, 1.0),
                                np.inf)
            root_neg = 2.0 * r / np.where(disc - dr > 0.0, disc - dr, 1.0)
            roots = np.where(dr >= 0.0, root_pos, root_neg)
        t_max = float(np.min(roots))
        base = -tau * z[barrier.n] - float(np.sum(np.log(r)))
        t = min(1.0, 0.995 * t_max)
        accepted = False
        for _ in range(60):
            r_t = r + t * dr - t * t * q
            if np.all(r_t > 0.0):
                val = -tau * (z[barrier.n] + t * delta[barrier.n]) - float(
                    np.sum(np.log(r_t)))
                if val <= base - 0.25 * t * decrement2:
                    z = z + t * delta
                    accepted = True
                    break
            t *= 0.5
        steps += 1
        if not accepted:
            break
    return z, steps


def _solve_real(branches, constraints, x0, gap_tol, early_stop=None,
                mu=30.0, max_newton=600):
    """Barrier loop on a strictly feasible start (wrt the hard constraints)."""
    n = len(x0)
    barrier = _Barrier(branches, constraints, n)
    s = min(_branch_value(br, x0) for br in branches)
    s -= max(1.0, 0.1 * abs(s))
    z = np.append(np.asarray(x0, dtype=float), s)
    tau = 1.0
    total = 0
    while barrier.m / tau > gap_tol and total < max_newton:
        z, steps = _newton_minimize(barrier, z, tau)
        total += max(steps, 1)
        if early_stop is not None:
            obj = min(_branch_value(br, z[:n]) for br in branches)
            if obj > early_stop:
                break
        tau *= mu
    return z[:n], z[n], tau / mu, total


def _find_feasible(constraints, x0, newton_budget):
    """Phase one: maximize the worst slack min_j(-g_j) until strictly positive."""
    phase_branches = [
        ConcaveBranch(-con.b, con.a, -con.e) for con in constraints
    ]
    x, _, _, used = _solve_real(phase_branches, [], np.asarray(x0, dtype=float),
                                gap_tol=1e-9, early_stop=1e-6,
                                max_newton=newton_budget)
    slack = min(_branch_value(br, x) for br in phase_branches)
    return x, slack, used


def solve_epigraph_qcqp(branches, constraints, x0, *, is_complex=False,
                        gap_tol=1e-10) -> QcqpResult:
    """Maximize min_t q_t(x) subject to quadratic constraints.

    x0 is a warm start; it need not be feasible (a phase-one pass repairs it).
    Scaling of branches and constraints is normalized internally, so callers
    can pass raw physical units.
    """
    if not branches:
        raise ValueError("need at least one branch")
    if is_complex:
        branches = [ConcaveBranch(_embed_vector(br.c),
                                  None if br.q is None else _embed_matrix(br.q),
                                  br.d) for br in branches]
        constraints = [QuadConstraint(None if con.a is None else _embed_matrix(con.a),
                                      _embed_vector(con.b), con.e)
                       for con in constraints]
        x0 = _embed_vector(np.asarray(x0, dtype=complex))

    sb, sc = _scaled(branches, constraints)
    x = np.asarray(x0, dtype=float).copy()
    total = 0
    if sc:
        viol = max(_constraint_value(con, x) for con in sc)
        if viol >= 0.0:
            x, slack, used = _find_feasible(sc, x, newton_budget=400)
            total += used
            if slack <= 0.0:
                x_out = x[:len(x) // 2] + 1j * x[len(x) // 2:] if is_complex else x
                return QcqpResult(x_out, -np.inf, "infeasible",
                                  max_violation=-slack, kkt_residual=np.inf,
                                  newton_iters=total, infeasibility=-slack)

    x, s, tau, used = _solve_real(sb, sc, x, gap_tol=gap_tol)
    total += used
    status = "optimal" if used < 600 else "max_iter"

    # Violation is reported in the caller's units (pre-normalization).
    objective = min(_branch_value(br, x) for br in branches)
    violation = max((_constraint_value(con, x) for con in constraints),
                    default=0.0)

    # Barrier multipliers 1/(tau r_i) at the final central point, with the
    # branch weights normalized to sum to one, give the stationarity residual
    # of the scaled problem.
    barrier = _Barrier(sb, sc, len(x))
    r = np.maximum(barrier.residuals(np.append(x, s)), 1e-300)
    lam = 1.0 / (tau * r)
    resid = np.zeros(len(x))
    lam_br = lam[:len(sb)] / max(lam[:len(sb)].sum(), 1e-300)
    for w, br in zip(lam_br, sb):
        gq = 2.0 * br.c if br.q is None else 2.0 * (br.c - br.q @ x)
        resid -= w * gq
    for w, con in zip(lam[len(sb):], sc):
        gg = 2.0 * con.b if con.a is None else 2.0 * (con.a @ x + con.b)
        resid += w * gg
    kkt = float(np.linalg.norm(resid))

    if is_complex:
        half = len(x) // 2
        x_out = x[:half] + 1j * x[half:]
    else:
        x_out = x
    return QcqpResult(x_out, objective, status, max(violation, 0.0), kkt, total)
