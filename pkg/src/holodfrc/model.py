"""Bundled physical model: configuration, channel draw, and surface responses.

Everything the beamformer blocks and the SINR metrics need repeatedly is
precomputed here once per scenario: the per-subcarrier feed-to-element response
stack and the frozen channel realization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, synthesize
from .holographic import rhs_response
from .scenario import ScenarioConfig


@dataclass
class SystemModel:
    cfg: ScenarioConfig
    channels: ChannelSet
    v: np.ndarray  # (K, N_B, n_feeds) feed-to-element responses

    @classmethod
    def build(cls, cfg: ScenarioConfig, seed: int | None = None,
              channels: ChannelSet | None = None) -> "SystemModel":
        if channels is None:
            channels = synthesize(cfg, seed)
        surface = cfg.rhs_surface()
        v = np.stack([rhs_response(surface, lam) for lam in cfg.grid().wavelengths()])
        return cls(cfg, channels, v)

    def without_ris(self) -> "SystemModel":
        return SystemModel(self.cfg, self.channels.without_ris(), self.v)

    @property
    def n_bs(self) -> int:
        return self.v.shape[1]

    @property
    def n_ris(self) -> int:
        return self.channels.g_bs_ris.shape[1]

    @property
    def n_ue(self) -> int:
        return self.channels.h_dir.shape[2]

    @property
    def n_feeds(self) -> int:
        return self.v.shape[2]

    def comm_channel(self, u: int, k: int, phi: np.ndarray) -> np.ndarray:
        """Composite user channel: direct plus surface-reflected cascade."""
        ch = self.channels
        return ch.h_dir[u, k] + (ch.h_ris[u, k] * phi[None, :]) @ ch.g_bs_ris[k]

    def radar_path_vector(self, kind: str, i: int, k: int, phi: np.ndarray) -> np.ndarray:
        """Effective one-way scatterer vector v = h + G^T diag(phi) b."""
        ch = self.channels
        h, b = (ch.h_t, ch.b_t) if kind == "target" else (ch.h_q, ch.b_q)
        return h[i, k] + ch.g_bs_ris[k].T @ (phi * b[i, k])

    def scatterers_excluding(self, t: int) -> list[tuple[str, int, float]]:
        """Interference sources for target t: other targets plus all clutter."""
        cfg = self.cfg
        out = [("target", j, cfg.rcs_targets[j]) for j in range(cfg.n_targets) if j != t]
        out += [("clutter", q, cfg.rcs_clutter[q]) for q in range(cfg.n_clutter)]
        return out
