"""Phase-only optimization on the product of unit circles.

Two layers: a Riemannian steepest-descent primitive (projection of the
Euclidean gradient onto the per-entry tangent space, multiplicative
retraction, monotone via step halving), and a consensus ADMM driver that
splits the quartic worst-case echo ratio into two phase copies, alternating
exact quadratic subproblems between them.

The quartic structure is kept factored: every scatterer path contributes
gain * |a + phi.c|^2 * ||t + psi.S||^2, i.e. a receive-side coupling (phi)
times a transmit-side coupling (psi).  Fixing either copy leaves a Hermitian
quadratic in the other, which is what the inner descent consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _ulp_neighbors(x: float, span: int) -> list:
    up, down = [x], [x]
    for _ in range(span):
        up.append(float(np.nextafter(up[-1], np.inf)))
        down.append(float(np.nextafter(down[-1], -np.inf)))
    return up + down[1:]


def _snap_unit(c: complex) -> complex:
    """Nearest float pair to c/|c| with |.| exactly 1.0 under array np.abs.

    Stepping either component by single ulps moves the squared magnitude in
    sub-ulp-of-one increments, so a small neighborhood around the divided
    value always contains an exactly-unit point.  Exactness is judged by
    np.abs on a complex array, the same routine downstream checks use (its
    vectorized path can round differently from scalar hypot).
    """
    c = c / abs(c)
    res = _ulp_neighbors(c.real, 4)
    ims = _ulp_neighbors(c.imag, 4)
    cands = (np.asarray(res)[:, None] + 1j * np.asarray(ims)[None, :]).ravel()
    exact = cands[np.abs(cands) == 1.0]
    if exact.size == 0:
        raise ArithmeticError(f"no exactly-unit neighbor near {c!r}")
    return complex(exact[np.argmin(np.abs(exact - c))])


def unit_modulus(z: np.ndarray, max_rounds: int = 3) -> np.ndarray:
    """Project entries onto the unit circle with |result| == 1 exactly.

    Division by the magnitude lands within an ulp of one but can oscillate
    there, so entries that have not reached the fixed point after a few
    rounds are snapped by a one-ulp neighborhood search.  Zero entries are
    replaced by 1.
    """
    z = np.asarray(z, dtype=complex).copy()
    z[z == 0] = 1.0
    for _ in range(max_rounds):
        mags = np.abs(z)
        if np.all(mags == 1.0):
            return z
        mags[mags == 0.0] = 1.0  # subnormal underflow guard
        # componentwise real division: complex/complex would square the
        # magnitude internally and over/underflow at extreme scales
        z = z.real / mags + 1j * (z.imag / mags)
        z[z == 0] = 1.0
    stuck = np.nonzero(np.abs(z) != 1.0)[0]
    for i in stuck:
        z[i] = _snap_unit(z[i])
    return z


def _project_circle(z: np.ndarray) -> np.ndarray:
    """Fast per-entry projection onto the unit circle (within an ulp)."""
    z = np.where(z == 0, 1.0 + 0j, z)
    mags = np.abs(z)
    return z.real / mags + 1j * (z.imag / mags)


def rsd_unit_modulus(value_and_grad, phi0: np.ndarray, step: float,
                     max_iters: int, min_step: float = 1e-12,
                     grad_tol: float = 1e-9):
    """Minimize a smooth function over unit-modulus vectors.

    value_and_grad(phi) must return (value, euclidean_gradient).  Each
    iteration projects the gradient onto the tangent space, retracts the
    trial point back to the manifold, and halves the step until the value
    does not increase, so the value sequence is nonincreasing.  The returned
    point has exactly unit-modulus entries.
    """
    phi = _project_circle(np.asarray(phi0, dtype=complex))
    value, grad = value_and_grad(phi)
    for _ in range(max_iters):
        rgrad = grad - np.real(grad * phi.conj()) * phi
        gnorm = float(np.linalg.norm(rgrad))
        if gnorm <= grad_tol * (1.0 + abs(value)):
            break
        t = step
        moved = False
        while t >= min_step:
            trial = _project_circle(phi - t * rgrad)
            trial_value, trial_grad = value_and_grad(trial)
            if trial_value < value:
                phi, value, grad = trial, trial_value, trial_grad
                moved = True
                break
            t *= 0.5
        if not moved:
            break
    return unit_modulus(phi), value


@dataclass
class PathTerm:
    """One scatterer route: gain * |a + phi.c|^2 * ||t + psi.S||^2."""

    gain: float
    a: complex
    c: np.ndarray       # (N_R,)
    t: np.ndarray       # (U,)
    s: np.ndarray       # (N_R, U)

    def value(self, phi: np.ndarray, psi: np.ndarray) -> float:
        rx = abs(self.a + phi @ self.c) ** 2
        tx = float(np.sum(np.abs(self.t + psi @ self.s) ** 2))
        return self.gain * rx * tx

    def value_grad_tied(self, phi: np.ndarray):
        """Value and Euclidean gradient of the quartic with both copies tied."""
        u = self.a + phi @ self.c
        row = self.t + phi @ self.s
        beta = float(np.sum(np.abs(row) ** 2))
        val = self.gain * abs(u) ** 2 * beta
        grad = 2.0 * self.gain * (beta * u * np.conj(self.c)
                                  + abs(u) ** 2 * (np.conj(self.s) @ row))
        return val, grad


def _quad_in_phi(terms, psi, n):
    """Hermitian expansion sum_i gain_i beta_i(psi) |a_i + phi.c_i|^2.

    Returns (A, d, d0): value = phi^T A phi* + 2 Re(phi^T d) + d0.
    """
    a_mat = np.zeros((n, n), dtype=complex)
    d_vec = np.zeros(n, dtype=complex)
    d0 = 0.0
    for tm in terms:
        beta = tm.gain * float(np.sum(np.abs(tm.t + psi @ tm.s) ** 2))
        a_mat += beta * np.outer(tm.c, tm.c.conj())
        d_vec += beta * np.conj(tm.a) * tm.c
        d0 += beta * abs(tm.a) ** 2
    return a_mat, d_vec, d0


def _quad_in_psi(terms, phi, n):
    """Hermitian expansion sum_i gain_i |a_i + phi.c_i|^2 ||t_i + psi.S_i||^2."""
    a_mat = np.zeros((n, n), dtype=complex)
    d_vec = np.zeros(n, dtype=complex)
    d0 = 0.0
    for tm in terms:
        w2 = tm.gain * abs(tm.a + phi @ tm.c) ** 2
        a_mat += w2 * (tm.s @ tm.s.conj().T)
        d_vec += w2 * (tm.s @ tm.t.conj())
        d0 += w2 * float(np.sum(np.abs(tm.t) ** 2))
    return a_mat, d_vec, d0


def quad_value(a_mat, d_vec, d0, phi) -> float:
    return float(np.real(phi @ a_mat @ phi.conj())) + 2.0 * float(
        np.real(phi @ d_vec)) + d0


def quad_grad(a_mat, d_vec, phi) -> np.ndarray:
    """Euclidean gradient of phi^T A phi* + 2 Re(phi^T d) wrt phi."""
    return 2.0 * np.conj(a_mat @ phi.conj() + d_vec)


@dataclass
class ManifoldBranch:
    signal: list
    interference: list
    noise: float

    def f(self, phi, psi) -> float:
        return sum(tm.value(phi, psi) for tm in self.signal)

    def g(self, phi, psi) -> float:
        return sum(tm.value(phi, psi) for tm in self.interference) + self.noise


@dataclass
class PhaseConstraint:
    """Affine service constraint on phi: 2 Re(phi.p_vec) <= p_scalar."""

    p_vec: np.ndarray
    p_scalar: float

    def violation(self, phi) -> float:
        return max(0.0, 2.0 * float(np.real(phi @ self.p_vec)) - self.p_scalar)

    def normalized(self) -> "PhaseConstraint":
        scale = max(float(np.abs(self.p_vec).max(initial=0.0)),
                    abs(self.p_scalar), 1e-30)
        return PhaseConstraint(self.p_vec / scale, self.p_scalar / scale)


@dataclass
class ManifoldProblem:
    branches: list
    user_constraints: list = field(default_factory=list)
    rho: float = 1.0
    rsd_step: float = 3.98
    rsd_iters: int = 100

    def worst_ratio(self, phi, psi=None) -> float:
        if psi is None:
            psi = phi
        return min(br.f(phi, psi) / br.g(phi, psi) for br in self.branches)

    def max_violation(self, phi) -> float:
        return max((con.violation(phi) for con in self.user_constraints),
                   default=0.0)


@dataclass
class CadmmResult:
    phi: np.ndarray
    ratio: float
    violation: float
    lam_history: list
    iterations: int


def _branch_weights(values: np.ndarray) -> np.ndarray:
    """Vertex of the simplex at the worst branch; exact ties split evenly."""
    top = values.max()
    ties = values >= top - 1e-12 * max(1.0, abs(top))
    z = np.zeros(len(values))
    z[ties] = 1.0 / ties.sum()
    return z


def _polish_tied(mp: ManifoldProblem, phi: np.ndarray, dual_users, cons,
                 rounds: int = 4) -> np.ndarray:
    """Descend the true quartic with both phase copies tied.

    A few parametric rounds (worst-branch weights at the current ratio, then
    steepest descent of sum_t z_t (lam g_t - f_t) on the manifold) refine the
    consensus point that the splitting loop produced.  Accumulated user duals
    keep pressure on the service constraints.
    """
    for _ in range(rounds):
        lam = mp.worst_ratio(phi)
        resid = np.array([lam * br.g(phi, phi) - br.f(phi, phi)
                          for br in mp.branches])
        z = _branch_weights(resid)

        def obj(p, z=z, lam=lam):
            val = 0.0
            grad = np.zeros(len(p), dtype=complex)
            for z_t, br in zip(z, mp.branches):
                if z_t == 0.0:
                    continue
                for tm in br.interference:
                    v, g = tm.value_grad_tied(p)
                    val += z_t * lam * v
                    grad += z_t * lam * g
                for tm in br.signal:
                    v, g = tm.value_grad_tied(p)
                    val -= z_t * v
                    grad -= z_t * g
                val += z_t * lam * br.noise
            for wu, con in zip(dual_users, cons):
                val += wu * (2.0 * float(np.real(p @ con.p_vec)) - con.p_scalar)
                grad += 2.0 * wu * np.conj(con.p_vec)
            return val, grad

        r_old = mp.worst_ratio(phi)
        phi_new, _ = rsd_unit_modulus(obj, phi, mp.rsd_step, mp.rsd_iters)
        r_new = mp.worst_ratio(phi_new)
        if r_new < r_old:
            return phi
        phi = phi_new
        if r_new <= r_old * (1.0 + 1e-10):
            break
    return phi


def cadmm_phase(mp: ManifoldProblem, phi0: np.ndarray, zeta2: float,
                max_iters: int = 24) -> CadmmResult:
    """Consensus ADMM over two phase copies with dual-ascent constraints.

    Per sweep: pick the worst branch of the parametric objective; descend the
    phi copy (quadratic in phi given psi) and then the psi copy on the
    manifold; push the duals.  Returns the best unit-modulus iterate seen,
    preferring constraint-feasible points with the highest worst-case ratio.
    """
    n = len(phi0)
    cons = [con.normalized() for con in mp.user_constraints]
    phi = unit_modulus(phi0)
    psi = phi.copy()
    dual_consensus = np.zeros(n, dtype=complex)
    dual_users = np.zeros(len(cons))
    lam_history = []

    def consider(best, cand):
        ratio = mp.worst_ratio(cand)
        viol = max((con.violation(cand) for con in cons), default=0.0)
        feasible = viol <= 1e-9
        if best is None:
            return (cand.copy(), ratio, viol, feasible)
        _, b_ratio, b_viol, b_feas = best
        if feasible and (not b_feas or ratio > b_ratio):
            return (cand.copy(), ratio, viol, True)
        if not feasible and not b_feas and viol < b_viol:
            return (cand.copy(), ratio, viol, False)
        return best

    best = consider(None, phi)
    iters = 0
    for iters in range(1, max_iters + 1):
        lam = mp.worst_ratio(phi, psi)
        lam_history.append(lam)

        # z-weights from the parametric residuals lam*g - f (the tangent
        # minorant of f is exact at the expansion point).
        resid = np.array([lam * br.g(phi, psi) - br.f(phi, psi)
                          for br in mp.branches])
        z = _branch_weights(resid)

        # phi copy: lam * g is quadratic in phi; f enters via its tangent at
        # the current phi.  ||phi - c||^2 is affine on the manifold because
        # phi^H phi is constant there, and the user duals are affine already.
        a_eff = np.zeros((n, n), dtype=complex)
        d_eff = np.zeros(n, dtype=complex)
        for z_t, br in zip(z, mp.branches):
            if z_t == 0.0:
                continue
            a_g, d_g, _ = _quad_in_phi(br.interference, psi, n)
            a_f, d_f, _ = _quad_in_phi(br.signal, psi, n)
            a_eff += z_t * lam * a_g
            d_eff += z_t * (lam * d_g - (a_f @ phi.conj() + d_f))
        d_eff += -(mp.rho / 2.0) * np.conj(psi - dual_consensus)
        for wu, con in zip(dual_users, cons):
            d_eff += wu * con.p_vec

        def phi_obj(p, a=a_eff, d=d_eff):
            return quad_value(a, d, 0.0, p), quad_grad(a, d, p)

        phi_prev = phi
        phi, _ = rsd_unit_modulus(phi_obj, phi, mp.rsd_step, mp.rsd_iters)

        # psi copy: symmetric expansion with the fresh phi.
        a_eff = np.zeros((n, n), dtype=complex)
        d_eff = np.zeros(n, dtype=complex)
        for z_t, br in zip(z, mp.branches):
            if z_t == 0.0:
                continue
            a_g, d_g, _ = _quad_in_psi(br.interference, phi, n)
            a_f, d_f, _ = _quad_in_psi(br.signal, phi, n)
            a_eff += z_t * lam * a_g
            d_eff += z_t * (lam * d_g - (a_f @ psi.conj() + d_f))
        d_eff += -(mp.rho / 2.0) * np.conj(phi + dual_consensus)

        def psi_obj(p, a=a_eff, d=d_eff):
            return quad_value(a, d, 0.0, p), quad_grad(a, d, p)

        psi, _ = rsd_unit_modulus(psi_obj, psi, mp.rsd_step, mp.rsd_iters)

        dual_consensus = dual_consensus + phi - psi
        if cons:
            c_vals = np.array([2.0 * float(np.real(phi @ con.p_vec)) - con.p_scalar
                               for con in cons])
            dual_users = dual_users + mp.rho * np.maximum(c_vals, 0.0)

        best = consider(best, phi)
        if float(np.linalg.norm(phi - phi_prev) ** 2) <= zeta2:
            break

    # refine the best consensus point on the true (tied-copy) quartic
    best = consider(best, _polish_tied(mp, best[0], dual_users, cons))

    phi_best, ratio, viol, _ = best
    return CadmmResult(phi_best, ratio, viol, lam_history, iters)
