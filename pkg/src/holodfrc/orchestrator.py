"""Alternating maximization of the worst-case echo SINR.

One outer sweep updates, in order: the radar/user receive filters (closed
form, generalized eigenproblems), the per-subcarrier digital precoders
(tangent-minorant plus Dinkelbach), the surface amplitude weights (same
machinery over real variables), and the reflection phases (consensus ADMM on
the unit-modulus manifold).  Every step either provably cannot decrease the
worst-case echo SINR or is guarded by an explicit acceptance check, so the
outer trace is nondecreasing up to solver tolerance.

Per-sweep cost, with T targets, Q clutter discretes, U users, K subcarriers,
N_B/N_R/N_U array sizes and n feeds: filters solve K(T + U) dense
eigenproblems of size N_B or N_U; the precoder block runs one Dinkelbach loop
whose inner interior-point solves factor (2 K n U + 1)-dimensional real
systems per Newton step; the amplitude block does the same over N_B real
variables; the phase block runs up to the consensus-iteration cap times two
steepest-descent solves over N_R phases with O((T + Q) K) path terms each.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .holographic import scale_to_power_budget, transmit_power
from .metrics import (
    BeamformerState,
    SINRReport,
    comm_sinr_sum_average,
    min_radar_sinr,
    sinr_report,
)
from .model import SystemModel
from .solvers import (
    FractionalBranch,
    ManifoldBranch,
    ManifoldProblem,
    PathTerm,
    PhaseConstraint,
    QuadConstraint,
    QuadraticFractionalProblem,
    cadmm_phase,
    dinkelbach,
    grq_max,
    mm_minorize,
    unit_modulus,
)

_ACCEPT_RTOL = 1e-8     # allowed relative objective slip per accepted block
_FEAS_RTOL = 1e-6       # relative service-constraint shortfall treated as met


@dataclass(frozen=True)
class Mode:
    """Which blocks are optimized: amplitude weights and reflection phases."""

    rhs: str  # "optimal" | "random"
    ris: str  # "optimal" | "random" | "none"

    def __post_init__(self):
        if self.rhs not in ("optimal", "random") or self.ris not in (
                "optimal", "random", "none"):
            raise ValueError(f"unknown mode {self.rhs}/{self.ris}")

    @property
    def name(self) -> str:
        return f"{self.rhs}_rhs_{self.ris}_ris" if self.ris != "none" \
            else f"{self.rhs}_rhs_no_ris"


MODES = {
    m.name: m
    for m in (
        Mode("random", "none"),
        Mode("random", "random"),
        Mode("random", "optimal"),
        Mode("optimal", "none"),
        Mode("optimal", "random"),
        Mode("optimal", "optimal"),
    )
}
DEFAULT_MODE = MODES["optimal_rhs_optimal_ris"]


@dataclass
class TraceRow:
    outer_iter: int
    min_radar_db: float
    radar_db: tuple
    comm_db: tuple
    phase_accepted: bool
    wall_ms: float


@dataclass
class AmResult:
    state: BeamformerState
    report: SINRReport
    trace: list
    converged: bool
    iterations: int
    mode: Mode
    diagnostics: dict = field(default_factory=dict)


def _db(x: float) -> float:
    return 10.0 * np.log10(max(x, 1e-300))


# ---------------------------------------------------------------------------
# Receive filters: per-target and per-user generalized Rayleigh quotients.
# The stacked pencil is block diagonal over subcarriers, so the maximizer
# concentrates on the best block; solving per block and keeping the argmax
# block is exact and avoids the K*N-sized eigenproblem.
# ---------------------------------------------------------------------------

def _radar_block_mats(state, model, t, k):
    cfg = model.cfg
    v_sig = model.radar_path_vector("target", t, k, state.phi)
    row = (v_sig * state.m) @ model.v[k] @ state.f[k]
    a_t = cfg.rcs_targets[t]
    sig = (a_t ** 2) * float(np.sum(np.abs(row) ** 2)) * np.outer(v_sig, v_sig.conj())
    interf = np.zeros_like(sig)
    for kind, idx, alpha in model.scatterers_excluding(t):
        v_i = model.radar_path_vector(kind, idx, k, state.phi)
        row_i = (v_i * state.m) @ model.v[k] @ state.f[k]
        interf += (alpha ** 2) * float(np.sum(np.abs(row_i) ** 2)) * np.outer(
            v_i, v_i.conj())
    return sig, interf


def update_filters(state: BeamformerState, model: SystemModel) -> None:
    cfg = model.cfg
    n_b = model.n_bs
    for t in range(cfg.n_targets):
        best = (-np.inf, 0, None)
        for k in range(cfg.n_subcarriers):
            sig, interf = _radar_block_mats(state, model, t, k)
            lam, w = grq_max(sig, interf + cfg.noise_radar_w * np.eye(n_b))
            if lam > best[0]:
                best = (lam, k, w)
        state.w_t[t] = 0.0
        state.w_t[t, best[1]] = best[2]
    n_u = model.n_ue
    for u in range(cfg.n_users):
        best = (-np.inf, 0, None)
        for k in range(cfg.n_subcarriers):
            h_c = model.comm_channel(u, k, state.phi)
            cols = h_c @ (state.m[:, None] * model.v[k]) @ state.f[k]  # (N_U, U)
            sig = np.outer(cols[:, u], cols[:, u].conj())
            interf = cols @ cols.conj().T - sig
            lam, w = grq_max(sig, interf + cfg.noise_comm_w * np.eye(n_u))
            if lam > best[0]:
                best = (lam, k, w)
        state.w_u[u] = 0.0
        state.w_u[u, best[1]] = best[2]


# ---------------------------------------------------------------------------
# Digital precoders: fractional maximin over the stacked vectorized precoder
# with per-subcarrier power caps and linearized service constraints.
# ---------------------------------------------------------------------------

def _stack_f(f: np.ndarray) -> np.ndarray:
    # column-major per subcarrier, subcarriers concatenated
    return np.concatenate([f[k].flatten(order="F") for k in range(f.shape[0])])


def _unstack_f(x: np.ndarray, shape) -> np.ndarray:
    k_all, n_rf, n_u = shape
    return x.reshape(k_all, n_u, n_rf).transpose(0, 2, 1).copy()


def _precoder_problem(state, model, eta_hat):
    cfg = model.cfg
    k_all, n_rf, n_users = state.f.shape
    blk = n_rf * n_users
    n = k_all * blk
    eye_u = np.eye(n_users)

    def blocked(inner_per_k, selector):
        out = np.zeros((n, n), dtype=complex)
        for k in range(k_all):
            sl = slice(k * blk, (k + 1) * blk)
            out[sl, sl] = np.kron(selector, inner_per_k[k])
        return out

    # radar branches: (signal quadratic, interference quadratic, noise)
    branches = []
    for t in range(cfg.n_targets):
        sig_inner, int_inner = [], []
        for k in range(k_all):
            w = state.w_t[t, k]
            mv = state.m[:, None] * model.v[k]
            v_sig = model.radar_path_vector("target", t, k, state.phi)
            r = cfg.rcs_targets[t] * (w.conj() @ v_sig) * (v_sig @ mv)
            sig_inner.append(np.outer(r.conj(), r))
            acc = np.zeros((n_rf, n_rf), dtype=complex)
            for kind, idx, alpha in model.scatterers_excluding(t):
                v_i = model.radar_path_vector(kind, idx, k, state.phi)
                r_i = alpha * (w.conj() @ v_i) * (v_i @ mv)
                acc += np.outer(r_i.conj(), r_i)
            int_inner.append(acc)
        noise = cfg.noise_radar_w * float(np.sum(np.abs(state.w_t[t]) ** 2))
        branches.append((blocked(sig_inner, eye_u), blocked(int_inner, eye_u),
                         noise))

    # power caps: one per subcarrier on its own block
    constraints = []
    for k in range(k_all):
        mv = state.m[:, None] * model.v[k]
        inner = mv.conj().T @ mv
        a = np.zeros((n, n), dtype=complex)
        sl = slice(k * blk, (k + 1) * blk)
        a[sl, sl] = np.kron(eye_u, inner)
        constraints.append(QuadConstraint(a, np.zeros(n, dtype=complex),
                                          -cfg.power_per_subcarrier_w))

    # service constraints, linearized at the current precoder
    comm_quads = []
    for u in range(cfg.n_users):
        sig_inner, int_inner = [], []
        sel_u = np.zeros((n_users, n_users))
        sel_u[u, u] = 1.0
        for k in range(k_all):
            w = state.w_u[u, k]
            h_c = model.comm_channel(u, k, state.phi)
            r = (w.conj() @ h_c * state.m) @ model.v[k]  # (n_rf,)
            inner = np.outer(r.conj(), r)
            sig_inner.append(inner)
            int_inner.append(inner)
        noise = cfg.noise_comm_w * float(np.sum(np.abs(state.w_u[u]) ** 2))
        comm_quads.append((blocked(sig_inner, sel_u),
                           blocked(int_inner, eye_u - sel_u), noise))

    def comm_constraints_at(x_prev):
        return _comm_constraints(comm_quads, x_prev, eta_hat)

    return branches, constraints, comm_constraints_at


def _comm_constraints(comm_quads, x_prev, eta_hat):
    out = []
    for sig_q, int_q, noise in comm_quads:
        c_u, const_u = mm_minorize(sig_q, x_prev)
        out.append(QuadConstraint(eta_hat * int_q, -c_u,
                                  eta_hat * noise - const_u))
    return out


def update_precoders(state: BeamformerState, model: SystemModel,
                     eta_hat: float) -> str:
    cfg = model.cfg
    branches, power_cons, comm_at = _precoder_problem(state, model, eta_hat)
    x_prev = _stack_f(state.f)
    if max(float(np.real(x_prev.conj() @ sig @ x_prev))
           for sig, _, _ in branches) == 0.0:
        return "flat"

    def attempt(x0):
        # one tangent expansion per outer sweep: numerators and service
        # constraints are linearized at x0 and held fixed inside Dinkelbach
        fp = QuadraticFractionalProblem(
            branches=[FractionalBranch(denom=interf, noise=noise,
                                       numer_affine=mm_minorize(sig, x0))
                      for sig, interf, noise in branches],
            constraints=power_cons + comm_at(x0),
            is_complex=True)
        return dinkelbach(fp, x0, cfg.zeta1, max_iter=cfg.max_dinkelbach_iters)

    res = attempt(x_prev)
    if res.status == "infeasible":
        # retry once from the full-power rescaling of the previous precoder
        scale = np.inf
        for k in range(cfg.n_subcarriers):
            p = transmit_power(state.m, model.v[k], state.f[k])
            if p > 0:
                scale = min(scale, np.sqrt(cfg.power_per_subcarrier_w / p))
        if np.isfinite(scale) and scale > 1.0:
            res = attempt(x_prev * scale)
        if res.status == "infeasible":
            return "infeasible"
    state.f = _unstack_f(res.x, state.f.shape)
    return res.status


# ---------------------------------------------------------------------------
# Amplitude weights: the same fractional machinery over the real weight
# vector, with box bounds and per-subcarrier power caps.
# ---------------------------------------------------------------------------

def _amplitude_problem(state, model, eta_hat):
    cfg = model.cfg
    n_b = model.n_bs
    k_all = cfg.n_subcarriers

    cols_k = [model.v[k] @ state.f[k] for k in range(k_all)]  # (N_B, U) each

    def rank1_sum(rows_and_cols):
        acc = np.zeros((n_b, n_b))
        for r_vec, col in rows_and_cols:
            z = r_vec * col
            acc += np.real(np.outer(z, z.conj()))
        return acc

    branches = []
    for t in range(cfg.n_targets):
        sig_terms, int_terms = [], []
        for k in range(k_all):
            w = state.w_t[t, k]
            v_sig = model.radar_path_vector("target", t, k, state.phi)
            r = cfg.rcs_targets[t] * (w.conj() @ v_sig) * v_sig
            sig_terms += [(r, cols_k[k][:, u]) for u in range(cfg.n_users)]
            for kind, idx, alpha in model.scatterers_excluding(t):
                v_i = model.radar_path_vector(kind, idx, k, state.phi)
                r_i = alpha * (w.conj() @ v_i) * v_i
                int_terms += [(r_i, cols_k[k][:, u]) for u in range(cfg.n_users)]
        noise = cfg.noise_radar_w * float(np.sum(np.abs(state.w_t[t]) ** 2))
        branches.append((rank1_sum(sig_terms), rank1_sum(int_terms), noise))

    constraints = []
    for k in range(k_all):
        d_k = np.diag(np.sum(np.abs(cols_k[k]) ** 2, axis=1))
        constraints.append(QuadConstraint(d_k, np.zeros(n_b),
                                          -cfg.power_per_subcarrier_w))
    for i in range(n_b):  # box 0 <= m <= 1
        e_i = np.zeros(n_b)
        e_i[i] = 0.5
        constraints.append(QuadConstraint(None, e_i, -1.0))
        constraints.append(QuadConstraint(None, -e_i, 0.0))

    comm_quads = []
    for u in range(cfg.n_users):
        sig_terms, int_terms = [], []
        for k in range(k_all):
            w = state.w_u[u, k]
            r = w.conj() @ model.comm_channel(u, k, state.phi)
            sig_terms.append((r, cols_k[k][:, u]))
            int_terms += [(r, cols_k[k][:, i]) for i in range(cfg.n_users) if i != u]
        noise = cfg.noise_comm_w * float(np.sum(np.abs(state.w_u[u]) ** 2))
        comm_quads.append((rank1_sum(sig_terms), rank1_sum(int_terms), noise))

    def comm_constraints_at(x_prev):
        return _comm_constraints(comm_quads, x_prev, eta_hat)

    return branches, constraints, comm_constraints_at


def update_amplitudes(state: BeamformerState, model: SystemModel,
                      eta_hat: float) -> str:
    cfg = model.cfg
    branches, hard_cons, comm_at = _amplitude_problem(state, model, eta_hat)
    m_prev = state.m.copy()
    if max(float(m_prev @ sig @ m_prev) for sig, _, _ in branches) == 0.0:
        return "flat"

    def attempt(m0):
        fp = QuadraticFractionalProblem(
            branches=[FractionalBranch(denom=interf, noise=noise,
                                       numer_affine=mm_minorize(sig, m0))
                      for sig, interf, noise in branches],
            constraints=hard_cons + comm_at(m0),
            is_complex=False)
        return dinkelbach(fp, m0, cfg.zeta1, max_iter=cfg.max_dinkelbach_iters)

    res = attempt(m_prev)
    if res.status == "infeasible":
        scale = np.inf
        for k in range(cfg.n_subcarriers):
            p = transmit_power(state.m, model.v[k], state.f[k])
            if p > 0:
                scale = min(scale, np.sqrt(cfg.power_per_subcarrier_w / p))
        retry = np.clip(m_prev * scale, 0.0, 1.0) if np.isfinite(scale) else m_prev
        if not np.array_equal(retry, m_prev):
            res = attempt(retry)
        if res.status == "infeasible":
            return "infeasible"
    state.m = np.clip(np.real(res.x), 0.0, 1.0)
    return res.status


# ---------------------------------------------------------------------------
# Reflection phases: consensus ADMM over the factored quartic, guarded by an
# explicit acceptance test on the true objective.
# ---------------------------------------------------------------------------

def _phase_path_term(state, model, kind, idx, alpha, t, k) -> PathTerm:
    ch = model.channels
    h, b = (ch.h_t, ch.b_t) if kind == "target" else (ch.h_q, ch.b_q)
    w = state.w_t[t, k]
    g_k = ch.g_bs_ris[k]
    mvf = (g_k * state.m[None, :]) @ model.v[k] @ state.f[k]  # (N_R, U)
    return PathTerm(
        gain=alpha ** 2,
        a=complex(w.conj() @ h[idx, k]),
        c=(g_k @ w.conj()) * b[idx, k],
        t=(h[idx, k] * state.m) @ model.v[k] @ state.f[k],
        s=b[idx, k][:, None] * mvf,
    )


def _phase_problem(state, model, eta_hat) -> ManifoldProblem:
    cfg = model.cfg
    ch = model.channels
    n_r = model.n_ris
    branches = []
    for t in range(cfg.n_targets):
        signal = [_phase_path_term(state, model, "target", t, cfg.rcs_targets[t], t, k)
                  for k in range(cfg.n_subcarriers)]
        interference = [
            _phase_path_term(state, model, kind, idx, alpha, t, k)
            for k in range(cfg.n_subcarriers)
            for kind, idx, alpha in model.scatterers_excluding(t)
        ]
        noise = cfg.noise_radar_w * float(np.sum(np.abs(state.w_t[t]) ** 2))
        branches.append(ManifoldBranch(signal, interference, noise))

    # Normalize branch powers to O(1): the consensus penalty and dual steps
    # are O(rho), and raw echo powers are many orders of magnitude smaller.
    # Ratios f/g are unaffected.
    phi_prev = state.phi
    scale = max(max(br.g(phi_prev, phi_prev) for br in branches), 1e-300)
    for br in branches:
        br.noise /= scale
        for term in br.signal + br.interference:
            term.gain /= scale
    user_cons = []
    for u in range(cfg.n_users):
        sig_a = np.zeros((n_r, n_r), dtype=complex)
        sig_d = np.zeros(n_r, dtype=complex)
        sig_0 = 0.0
        int_a = np.zeros((n_r, n_r), dtype=complex)
        int_d = np.zeros(n_r, dtype=complex)
        int_0 = cfg.noise_comm_w * float(np.sum(np.abs(state.w_u[u]) ** 2))
        for k in range(cfg.n_subcarriers):
            w = state.w_u[u, k]
            mvf = model.v[k] @ state.f[k]                      # (N_B, U)
            t_row = (w.conj() @ ch.h_dir[u, k] * state.m) @ mvf  # (U,)
            big_t = (w.conj() @ ch.h_ris[u, k])[:, None] * (
                (ch.g_bs_ris[k] * state.m[None, :]) @ mvf)       # (N_R, U)
            sig_a += np.outer(big_t[:, u], big_t[:, u].conj())
            sig_d += big_t[:, u] * np.conj(t_row[u])
            sig_0 += abs(t_row[u]) ** 2
            others = [i for i in range(cfg.n_users) if i != u]
            for i in others:
                int_a += np.outer(big_t[:, i], big_t[:, i].conj())
                int_d += big_t[:, i] * np.conj(t_row[i])
                int_0 += abs(t_row[i]) ** 2

        # Affine reduction of num >= eta_hat * den: minorize the numerator
        # quadratic at phi_prev; majorize the denominator quadratic there with
        # curvature bound L = lambda_max and ||phi||^2 = N_R on the manifold.
        lam_max = float(np.linalg.eigvalsh(0.5 * (int_a + int_a.conj().T))[-1])
        pc = phi_prev.conj()
        p_vec = eta_hat * ((int_a - lam_max * np.eye(n_r)) @ pc + int_d) \
            - (sig_a @ pc + sig_d)
        const_n = -float(np.real(phi_prev @ sig_a @ pc))
        const_d = -float(np.real(phi_prev @ int_a @ pc)) + 2.0 * lam_max * n_r
        p_scalar = const_n + sig_0 - eta_hat * (const_d + int_0)
        user_cons.append(PhaseConstraint(p_vec, p_scalar))

    return ManifoldProblem(branches, user_cons, rho=cfg.rho,
                           rsd_step=cfg.rsd_step, rsd_iters=cfg.max_rsd_iters)


def _comm_shortfall(state, model) -> float:
    """Worst relative shortfall of the summed service ratio below threshold."""
    eta = model.cfg.comm_threshold
    worst = 0.0
    for u in range(model.cfg.n_users):
        sinr = comm_sinr_sum_average(state, model, u)
        worst = max(worst, (eta - sinr) / eta)
    return worst


def _block_guard(state: BeamformerState, model: SystemModel, apply_block):
    """Run a block update and revert it unless the true objective holds up.

    The tangent-minorant constructions make each block nondecreasing in exact
    arithmetic; this guard only catches numerical slips.  When the incoming
    point violates the service constraint, feasibility progress takes
    priority over the echo objective.
    """
    snapshot = state.copy()
    old_min, _ = min_radar_sinr(state, model)
    old_short = _comm_shortfall(state, model)
    status = apply_block()
    if status in ("flat", "infeasible"):
        state.f, state.m = snapshot.f, snapshot.m
        return status
    new_min, _ = min_radar_sinr(state, model)
    new_short = _comm_shortfall(state, model)
    if old_short > _FEAS_RTOL:
        ok = new_short < old_short or (
            new_short <= _FEAS_RTOL and new_min >= old_min * (1.0 - _ACCEPT_RTOL))
    else:
        ok = new_short <= _FEAS_RTOL and new_min >= old_min * (1.0 - _ACCEPT_RTOL)
    if not ok:
        state.f, state.m = snapshot.f, snapshot.m
        return f"{status}_rejected"
    return status


def update_phases(state: BeamformerState, model: SystemModel,
                  eta_hat: float) -> bool:
    """Run the consensus phase solver; keep the result only if the true
    worst-case echo SINR does not slip and service feasibility does not
    regress.  Returns whether the new phases were accepted."""
    cfg = model.cfg
    mp = _phase_problem(state, model, eta_hat)
    old_min, _ = min_radar_sinr(state, model)
    old_short = _comm_shortfall(state, model)
    res = cadmm_phase(mp, state.phi, cfg.zeta2, max_iters=cfg.max_cadmm_iters)
    candidate = unit_modulus(res.phi)

    trial = BeamformerState(state.f, state.m, candidate, state.w_t, state.w_u)
    new_min, _ = min_radar_sinr(trial, model)
    new_short = _comm_shortfall(trial, model)
    radar_ok = new_min >= old_min * (1.0 - _ACCEPT_RTOL)
    if old_short <= _FEAS_RTOL:
        comm_ok = new_short <= _FEAS_RTOL
    else:
        comm_ok = new_short <= old_short * (1.0 + 1e-9)
    if radar_ok and comm_ok:
        state.phi = candidate
        return True
    return False


# ---------------------------------------------------------------------------
# Outer loop
# ---------------------------------------------------------------------------

def initial_state(model: SystemModel, mode: Mode,
                  rng: np.random.Generator) -> BeamformerState:
    """Random feasible start.

    Draw order is mode independent so paired runs with a shared seed see the
    same random phases and precoder across modes.
    """
    cfg = model.cfg
    phi_draw = np.exp(2j * np.pi * rng.uniform(size=model.n_ris))
    f_draw = (rng.standard_normal((cfg.n_subcarriers, model.n_feeds, cfg.n_users))
              + 1j * rng.standard_normal((cfg.n_subcarriers, model.n_feeds,
                                          cfg.n_users))) / np.sqrt(2.0)
    m_draw = rng.uniform(size=model.n_bs)

    phi = np.ones(model.n_ris, dtype=complex) if mode.ris == "none" \
        else unit_modulus(phi_draw)
    m = m_draw if (mode.rhs == "random" and cfg.random_rhs_uniform) \
        else np.ones(model.n_bs)
    f = f_draw.copy()
    for k in range(cfg.n_subcarriers):
        f[k] = scale_to_power_budget(f[k], m, model.v[k],
                                     cfg.power_per_subcarrier_w)
    state = BeamformerState(
        f=f, m=m, phi=phi,
        w_t=np.zeros((cfg.n_targets, cfg.n_subcarriers, model.n_bs), dtype=complex),
        w_u=np.zeros((cfg.n_users, cfg.n_subcarriers, model.n_ue), dtype=complex),
    )
    update_filters(state, model)
    return state


def am_loop(model: SystemModel, mode: Mode = DEFAULT_MODE,
            rng: np.random.Generator | None = None,
            init: BeamformerState | None = None) -> AmResult:
    """Cycle the block updates until the squared change of the worst-case
    echo SINR (in dB) drops below the configured tolerance or the iteration
    cap is reached."""
    cfg = model.cfg
    if mode.ris == "none":
        model = model.without_ris()
    if init is None:
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        state = initial_state(model, mode, rng)
    else:
        state = init.copy()

    eta_hat = cfg.comm_threshold_sum
    trace: list[TraceRow] = []
    statuses: list[str] = []

    def record(i, accepted, t0):
        rep = sinr_report(state, model)
        trace.append(TraceRow(
            outer_iter=i,
            min_radar_db=_db(rep.min_radar),
            radar_db=tuple(_db(x) for x in rep.radar),
            comm_db=tuple(_db(x) for x in rep.comm_sum_avg),
            phase_accepted=accepted,
            wall_ms=(time.perf_counter() - t0) * 1e3,
        ))
        return rep

    t0 = time.perf_counter()
    record(0, False, t0)
    converged = False
    iterations = 0
    for it in range(1, cfg.max_outer_iters + 1):
        iterations = it
        t0 = time.perf_counter()
        update_filters(state, model)
        status = _block_guard(state, model,
                              lambda: update_precoders(state, model, eta_hat))
        statuses.append(f"precoder:{status}")
        if mode.rhs == "optimal":
            status = _block_guard(state, model,
                                  lambda: update_amplitudes(state, model, eta_hat))
            statuses.append(f"amplitude:{status}")
        accepted = False
        if mode.ris == "optimal":
            accepted = update_phases(state, model, eta_hat)
        record(it, accepted, t0)
        delta_db = trace[-1].min_radar_db - trace[-2].min_radar_db
        if delta_db ** 2 <= cfg.zeta3:
            converged = True
            break

    report = sinr_report(state, model)
    return AmResult(state, report, trace, converged, iterations, mode,
                    diagnostics={"statuses": statuses})
