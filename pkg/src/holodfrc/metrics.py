"""SINR figures of merit for both functions of the dual-use transmitter.

Communication users are scored per subcarrier, as the plain average over
subcarriers, and as the sum-average (summed signal power over summed
interference-plus-noise power, scaled by 1/K).  The sum-average never exceeds
the plain average, so enforcing a threshold on it also certifies the average.
Radar targets are scored by the ratio of total echo power through the receive
filter to the power of clutter, other-target returns, and noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .holographic import transmit_power
from .model import SystemModel


@dataclass
class BeamformerState:
    """The five decision blocks of the joint design.

    f: (K, n_feeds, U) digital precoders; m: (N_B,) amplitude weights in
    [0, 1]; phi: (N_R,) unit-modulus reflection coefficients; w_t: (T, K, N_B)
    radar filters; w_u: (U, K, N_U) user combiners.
    """

    f: np.ndarray
    m: np.ndarray
    phi: np.ndarray
    w_t: np.ndarray
    w_u: np.ndarray

    def copy(self) -> "BeamformerState":
        return BeamformerState(self.f.copy(), self.m.copy(), self.phi.copy(),
                               self.w_t.copy(), self.w_u.copy())


@dataclass
class SINRReport:
    radar: np.ndarray            # linear, per target
    comm_sum_avg: np.ndarray     # linear, per user
    comm_avg: np.ndarray         # linear, per user
    min_radar: float
    argmin_target: int
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "radar_sinr_db": [float(10 * np.log10(max(x, 1e-300))) for x in self.radar],
            "comm_sum_avg_sinr_db": [float(10 * np.log10(max(x, 1e-300)))
                                     for x in self.comm_sum_avg],
            "comm_avg_sinr_db": [float(10 * np.log10(max(x, 1e-300)))
                                 for x in self.comm_avg],
            "min_radar_sinr_db": float(10 * np.log10(max(self.min_radar, 1e-300))),
            "argmin_target": int(self.argmin_target),
            "feasible": bool(self.feasible),
        }


def _comm_powers(state: BeamformerState, model: SystemModel, u: int, k: int):
    """Signal and interference-plus-noise powers for one user and subcarrier.

    A subcarrier whose combiner slice is exactly zero receives nothing and
    contributes (0, 0); the stacked combiner must be nonzero overall.
    """
    if not np.any(state.w_u[u]):
        raise ValueError("combiner must be nonzero")
    w = state.w_u[u, k]
    if not np.any(w):
        return 0.0, 0.0
    h_c = model.comm_channel(u, k, state.phi)
    rows = (w.conj() @ h_c) * state.m  # (N_B,)
    gains = rows @ model.v[k] @ state.f[k]  # (U,) effective per-stream gains
    sig = abs(gains[u]) ** 2
    interf = float(np.sum(np.abs(gains) ** 2) - sig)
    noise = model.cfg.noise_comm_w * float(np.real(w.conj() @ w))
    return sig, interf + noise


def comm_sinr_subcarrier(state: BeamformerState, model: SystemModel,
                         u: int, k: int) -> float:
    sig, rest = _comm_powers(state, model, u, k)
    if rest == 0.0:
        return 0.0
    return sig / rest


def comm_sinr_average(state: BeamformerState, model: SystemModel, u: int) -> float:
    k_all = model.cfg.n_subcarriers
    return sum(comm_sinr_subcarrier(state, model, u, k) for k in range(k_all)) / k_all


def comm_sinr_sum_average(state: BeamformerState, model: SystemModel, u: int) -> float:
    k_all = model.cfg.n_subcarriers
    sig_total, rest_total = 0.0, 0.0
    for k in range(k_all):
        sig, rest = _comm_powers(state, model, u, k)
        sig_total += sig
        rest_total += rest
    return sig_total / rest_total / k_all


def sum_average_is_lower_bound(a: np.ndarray, b: np.ndarray, tol: float = 1e-12) -> bool:
    """Check (1/K)(sum a / sum b) <= (1/K) sum(a_k/b_k) + tol for a >= 0, b > 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = len(a)
    return (np.sum(a) / np.sum(b)) / k <= np.mean(a / b) + tol


def _radar_row_power(state: BeamformerState, model: SystemModel, t: int,
                     kind: str, idx: int, alpha: float, k: int) -> float:
    """|| w^H H M V F ||^2 for scatterer (kind, idx) through target-t's filter."""
    w = state.w_t[t, k]
    v = model.radar_path_vector(kind, idx, k, state.phi)
    receive = w.conj() @ v                      # scalar
    transmit = (v * state.m) @ model.v[k] @ state.f[k]  # (U,)
    return (alpha ** 2) * abs(receive) ** 2 * float(np.sum(np.abs(transmit) ** 2))


def radar_sinr(state: BeamformerState, model: SystemModel, t: int) -> float:
    cfg = model.cfg
    if not np.any(state.w_t[t]):
        raise ValueError("radar filter must be nonzero")
    sig = 0.0
    interf = 0.0
    for k in range(cfg.n_subcarriers):
        sig += _radar_row_power(state, model, t, "target", t, cfg.rcs_targets[t], k)
        for kind, idx, alpha in model.scatterers_excluding(t):
            interf += _radar_row_power(state, model, t, kind, idx, alpha, k)
    noise = cfg.noise_radar_w * float(np.real(np.vdot(state.w_t[t], state.w_t[t])))
    return sig / (interf + noise)


def min_radar_sinr(state: BeamformerState, model: SystemModel) -> tuple[float, int]:
    """Worst-case target SINR and its index (ties broken toward index 0)."""
    values = [radar_sinr(state, model, t) for t in range(model.cfg.n_targets)]
    t_min = int(np.argmin(values))
    return values[t_min], t_min


def power_ok(state: BeamformerState, model: SystemModel, rel_tol: float = 1e-8) -> bool:
    budget = model.cfg.power_per_subcarrier_w
    return all(
        transmit_power(state.m, model.v[k], state.f[k]) <= budget * (1.0 + rel_tol)
        for k in range(model.cfg.n_subcarriers)
    )


def sinr_report(state: BeamformerState, model: SystemModel,
                comm_tol_db: float = 1e-3) -> SINRReport:
    cfg = model.cfg
    radar = np.array([radar_sinr(state, model, t) for t in range(cfg.n_targets)])
    sum_avg = np.array([comm_sinr_sum_average(state, model, u) for u in range(cfg.n_users)])
    avg = np.array([comm_sinr_average(state, model, u) for u in range(cfg.n_users)])
    t_min = int(np.argmin(radar))
    slack = 10.0 ** (-comm_tol_db / 10.0)
    feasible = (
        bool(np.all(sum_avg >= cfg.comm_threshold * slack))
        and power_ok(state, model)
        and bool(np.all((state.m >= 0.0) & (state.m <= 1.0)))
        and bool(np.all(np.abs(state.phi) == 1.0))
    )
    return SINRReport(radar, sum_avg, avg, float(radar[t_min]), t_min, feasible)
