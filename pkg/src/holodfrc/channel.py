"""Per-subcarrier channel synthesis for all propagation paths.

Links:
  * base station -> user, direct: Rician with a distance-scaled LoS outer
    product plus a random sum of NLoS rays,
  * reflecting surface -> user: same Rician structure with surface geometry,
  * base station -> reflecting surface: pure LoS, deterministic, rank one,
  * radar paths: base-station and surface steering vectors toward each target
    and clutter discrete, scaled by the one-way path gain.

NLoS ray angles and complex gains are drawn once per link and shared across
subcarriers (the physical rays are frequency flat; only the wavelength in the
steering phases varies with k).  Each ray's gain is the link's LoS path gain
times CN(0, 1)/sqrt(L), which keeps the expected NLoS power of the L-ray sum
equal to the power of a single LoS path.  Path gain itself is taken frequency
independent.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .geometry import AnglePair, ArrayGeometry, angles_between, upa_steering
from .scenario import ScenarioConfig

_DUMP_MAGIC = b"HDFCCHAN"
_DUMP_VERSION = 1


def path_gain(k0: float, r0: float, r: float, eps: float) -> float:
    """Amplitude path gain sqrt(k0 * (r0/r)^eps) at distance r."""
    if r <= 0:
        raise ValueError(f"path distance must be > 0, got {r}")
    return float(np.sqrt(k0 * (r0 / r) ** eps))


def link_distances(cfg: ScenarioConfig) -> dict:
    """Euclidean distances of every modeled link, keyed by endpoint pair."""
    p_b = np.asarray(cfg.p_bs)
    p_r = np.asarray(cfg.p_ris)
    dist = np.linalg.norm
    return {
        "bs_ris": float(dist(p_b - p_r)),
        "bs_target": [float(dist(p_b - np.asarray(p))) for p in cfg.p_targets],
        "ris_target": [float(dist(p_r - np.asarray(p))) for p in cfg.p_targets],
        "bs_clutter": [float(dist(p_b - np.asarray(p))) for p in cfg.p_clutter],
        "ris_clutter": [float(dist(p_r - np.asarray(p))) for p in cfg.p_clutter],
        "bs_user": [float(dist(p_b - np.asarray(p))) for p in cfg.p_users],
        "ris_user": [float(dist(p_r - np.asarray(p))) for p in cfg.p_users],
    }


@dataclass
class ChannelSet:
    """Frozen per-subcarrier channel realization (one draw per seed).

    Shapes: h_dir (U, K, N_U, N_B); h_ris (U, K, N_U, N_R); g_bs_ris
    (K, N_R, N_B); target paths h_t (T, K, N_B) / b_t (T, K, N_R); clutter
    paths h_q (Q, K, N_B) / b_q (Q, K, N_R).
    """

    h_dir: np.ndarray
    h_ris: np.ndarray
    g_bs_ris: np.ndarray
    h_t: np.ndarray
    b_t: np.ndarray
    h_q: np.ndarray
    b_q: np.ndarray
    seed: int

    def without_ris(self) -> "ChannelSet":
        """Copy with every surface-reflected contribution removed."""
        return ChannelSet(
            h_dir=self.h_dir,
            h_ris=np.zeros_like(self.h_ris),
            g_bs_ris=self.g_bs_ris,
            h_t=self.h_t,
            b_t=np.zeros_like(self.b_t),
            h_q=self.h_q,
            b_q=np.zeros_like(self.b_q),
            seed=self.seed,
        )


def _rician_channel(rx_geom: ArrayGeometry, tx_geom: ArrayGeometry,
                    freqs: np.ndarray, rx_angles: AnglePair, tx_angles: AnglePair,
                    los_gain: float, rician: float, n_paths: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Rician matrix per subcarrier, shape (K, N_rx, N_tx).

    rician may be inf (pure LoS) or 0 (full blockage of the LoS path).
    """
    k = len(freqs)
    out = np.zeros((k, rx_geom.n_elements, tx_geom.n_elements), dtype=complex)
    if np.isinf(rician):
        los_w, nlos_w = 1.0, 0.0
    else:
        los_w = np.sqrt(rician / (1.0 + rician))
        nlos_w = np.sqrt(1.0 / (1.0 + rician))
    # Ray geometry and gains are frequency flat; draw before the subcarrier loop.
    ray_angles = []
    ray_gains = np.zeros(n_paths, dtype=complex)
    if nlos_w > 0.0 and n_paths > 0:
        for _ in range(n_paths):
            rx_a = AnglePair(rng.uniform(0.0, 2.0 * np.pi), rng.uniform(0.0, np.pi / 2.0))
            tx_a = AnglePair(rng.uniform(0.0, 2.0 * np.pi), rng.uniform(0.0, np.pi / 2.0))
            ray_angles.append((rx_a, tx_a))
        ray_gains = los_gain * (rng.standard_normal(n_paths)
                                + 1j * rng.standard_normal(n_paths)) / np.sqrt(2.0 * n_paths)
    for ki, f in enumerate(freqs):
        if los_w > 0.0:
            a_rx = upa_steering(rx_geom, f, rx_angles)
            a_tx = upa_steering(tx_geom, f, tx_angles)
            out[ki] = los_w * los_gain * np.outer(a_rx, a_tx)
        for (rx_a, tx_a), g in zip(ray_angles, ray_gains):
            a_rx = upa_steering(rx_geom, f, rx_a)
            a_tx = upa_steering(tx_geom, f, tx_a)
            out[ki] += nlos_w * g * np.outer(a_rx, a_tx)
    return out


def build_comm_direct(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Direct base-station-to-user channels, shape (U, K, N_U, N_B)."""
    freqs = cfg.grid().frequencies()
    bs, ue = cfg.bs_geometry(), cfg.ue_geometry()
    dists = link_distances(cfg)
    out = np.zeros((cfg.n_users, cfg.n_subcarriers, ue.n_elements, bs.n_elements),
                   dtype=complex)
    for u, p_u in enumerate(cfg.p_users):
        gain = path_gain(cfg.pathloss_ref, cfg.ref_distance_m, dists["bs_user"][u],
                         cfg.eps_bs_user)
        out[u] = _rician_channel(ue, bs, freqs,
                                 angles_between(p_u, cfg.p_bs),
                                 angles_between(cfg.p_bs, p_u),
                                 gain, cfg.rician_dir, cfg.nlos_paths_dir, rng)
    return out


def build_comm_ris(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Reflecting-surface-to-user channels, shape (U, K, N_U, N_R)."""
    freqs = cfg.grid().frequencies()
    ris, ue = cfg.ris_geometry(), cfg.ue_geometry()
    dists = link_distances(cfg)
    out = np.zeros((cfg.n_users, cfg.n_subcarriers, ue.n_elements, ris.n_elements),
                   dtype=complex)
    for u, p_u in enumerate(cfg.p_users):
        gain = path_gain(cfg.pathloss_ref, cfg.ref_distance_m, dists["ris_user"][u],
                         cfg.eps_ris)
        out[u] = _rician_channel(ue, ris, freqs,
                                 angles_between(p_u, cfg.p_ris),
                                 angles_between(cfg.p_ris, p_u),
                                 gain, cfg.rician_ris, cfg.nlos_paths_ris, rng)
    return out


def build_bs_ris(cfg: ScenarioConfig) -> np.ndarray:
    """Deterministic LoS base-station-to-surface link, shape (K, N_R, N_B), rank 1."""
    freqs = cfg.grid().frequencies()
    bs, ris = cfg.bs_geometry(), cfg.ris_geometry()
    gain = path_gain(cfg.pathloss_ref, cfg.ref_distance_m,
                     link_distances(cfg)["bs_ris"], cfg.eps_bs_ris)
    ang_rb = angles_between(cfg.p_ris, cfg.p_bs)
    ang_br = angles_between(cfg.p_bs, cfg.p_ris)
    out = np.zeros((cfg.n_subcarriers, ris.n_elements, bs.n_elements), dtype=complex)
    for ki, f in enumerate(freqs):
        out[ki] = gain * np.outer(upa_steering(ris, f, ang_rb), upa_steering(bs, f, ang_br))
    return out


def build_radar_paths(cfg: ScenarioConfig):
    """One-way steering paths to every target and clutter discrete.

    Returns (h_t, b_t, h_q, b_q): base-station-side vectors h_* carry the
    direct path gain, surface-side vectors b_* the surface-to-scatterer gain.
    """
    freqs = cfg.grid().frequencies()
    bs, ris = cfg.bs_geometry(), cfg.ris_geometry()
    dists = link_distances(cfg)

    def paths(points, d_bs, d_ris, eps_bs):
        n = len(points)
        h = np.zeros((n, cfg.n_subcarriers, bs.n_elements), dtype=complex)
        b = np.zeros((n, cfg.n_subcarriers, ris.n_elements), dtype=complex)
        for i, p in enumerate(points):
            g_b = path_gain(cfg.pathloss_ref, cfg.ref_distance_m, d_bs[i], eps_bs)
            g_r = path_gain(cfg.pathloss_ref, cfg.ref_distance_m, d_ris[i], cfg.eps_ris)
            ang_b = angles_between(cfg.p_bs, p)
            ang_r = angles_between(cfg.p_ris, p)
            for ki, f in enumerate(freqs):
                h[i, ki] = g_b * upa_steering(bs, f, ang_b)
                b[i, ki] = g_r * upa_steering(ris, f, ang_r)
        return h, b

    h_t, b_t = paths(cfg.p_targets, dists["bs_target"], dists["ris_target"], cfg.eps_dir)
    h_q, b_q = paths(cfg.p_clutter, dists["bs_clutter"], dists["ris_clutter"], cfg.eps_dir)
    return h_t, b_t, h_q, b_q


def compose_radar_channel(h: np.ndarray, b: np.ndarray, g_k: np.ndarray,
                          phi: np.ndarray, alpha: float) -> np.ndarray:
    """Two-way scatterer channel alpha * v v^T with v = h + G^T diag(phi) b.

    Rank one and complex-symmetric (transpose, not conjugate): the outbound
    and return paths see the same medium.
    """
    if h.shape[0] != g_k.shape[1] or b.shape[0] != g_k.shape[0] or phi.shape[0] != b.shape[0]:
        raise ValueError("radar path dimensions do not match the surface link")
    v = h + g_k.T @ (phi * b)
    return alpha * np.outer(v, v)


def synthesize(cfg: ScenarioConfig, seed: int | None = None) -> ChannelSet:
    """Draw one full channel realization; pure function of (config, seed)."""
    if seed is None:
        seed = cfg.seed
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    h_dir = build_comm_direct(cfg, rng)
    h_ris = build_comm_ris(cfg, rng)
    g = build_bs_ris(cfg)
    h_t, b_t, h_q, b_q = build_radar_paths(cfg)
    return ChannelSet(h_dir, h_ris, g, h_t, b_t, h_q, b_q, seed)


_FIELD_ORDER = ("h_dir", "h_ris", "g_bs_ris", "h_t", "b_t", "h_q", "b_q")


def save_channels(channels: ChannelSet, path) -> None:
    """Flat binary dump: magic, version, seed, then per-array dims and
    row-major complex128 payloads in a fixed field order."""
    with open(path, "wb") as fh:
        fh.write(_DUMP_MAGIC)
        fh.write(struct.pack("<iq", _DUMP_VERSION, channels.seed))
        for name in _FIELD_ORDER:
            arr = np.ascontiguousarray(getattr(channels, name), dtype=np.complex128)
            fh.write(struct.pack("<i", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}i", *arr.shape))
            fh.write(arr.tobytes())


def load_channels(path) -> ChannelSet:
    with open(path, "rb") as fh:
        if fh.read(len(_DUMP_MAGIC)) != _DUMP_MAGIC:
            raise ValueError(f"{path} is not a channel dump")
        version, seed = struct.unpack("<iq", fh.read(12))
        if version != _DUMP_VERSION:
            raise ValueError(f"unsupported channel dump version {version}")
        fields = {}
        for name in _FIELD_ORDER:
            ndim, = struct.unpack("<i", fh.read(4))
            shape = struct.unpack(f"<{ndim}i", fh.read(4 * ndim))
            count = int(np.prod(shape))
            data = np.frombuffer(fh.read(16 * count), dtype=np.complex128)
            fields[name] = data.reshape(shape).copy()
    return ChannelSet(seed=seed, **fields)
