"""Holographic surface response and per-subcarrier transmit power accounting.

The transmit surface is fed by a small number of waveguide feeds.  Each
radiating element applies a real amplitude weight in [0, 1] to the superposed
feed signals; the feed-to-element propagation inside the surface fixes a known
complex response matrix per subcarrier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import ArrayGeometry


@dataclass(frozen=True)
class RhsSurface:
    """Amplitude-controlled transmit surface with in-plane feed points."""

    geometry: ArrayGeometry
    feed_positions: np.ndarray  # (n_feeds, 2) meters, in the surface plane
    refractive_index: float

    def __post_init__(self):
        feeds = np.atleast_2d(np.asarray(self.feed_positions, dtype=float))
        if feeds.shape[0] < 1 or feeds.shape[1] != 2:
            raise ValueError("feed_positions must be a nonempty list of planar points")
        if self.refractive_index < 1.0:
            raise ValueError(f"refractive index must be >= 1, got {self.refractive_index}")
        object.__setattr__(self, "feed_positions", feeds)

    @property
    def n_feeds(self) -> int:
        return self.feed_positions.shape[0]


@dataclass
class HolographicWeights:
    """Per-element amplitude weights, each in [0, 1]."""

    m: np.ndarray

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=float)
        if np.any(self.m < 0.0) or np.any(self.m > 1.0):
            raise ValueError("amplitude weights must lie in [0, 1]")


def default_feed_positions(geom: ArrayGeometry, n_feeds: int) -> np.ndarray:
    """Feeds evenly spaced along the surface's x-edge at y = 0."""
    if n_feeds < 1:
        raise ValueError("need at least one feed")
    extent = max(geom.n_x - 1, 1) * geom.d_x
    xs = (np.arange(n_feeds) + 0.5) * extent / n_feeds
    return np.column_stack([xs, np.zeros(n_feeds)])


def feed_distances(surface: RhsSurface) -> np.ndarray:
    """Planar element-to-feed distances, shape (n_elements, n_feeds)."""
    elements = surface.geometry.element_positions()
    diff = elements[:, None, :] - surface.feed_positions[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def rhs_response(surface: RhsSurface, wavelength: float) -> np.ndarray:
    """Feed-to-element response matrix at one wavelength.

    Entry (p, q) is exp(-j*2*pi*gamma*D_pq/lambda): the phase accumulated by
    the feed wave traveling distance D_pq inside a medium with refractive
    index gamma.  Deterministic once the surface layout is fixed.
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    d = feed_distances(surface)
    return np.exp(-2j * np.pi * surface.refractive_index * d / wavelength)


def transmit_power(m: np.ndarray, v_k: np.ndarray, f_k: np.ndarray) -> float:
    """Radiated power on one subcarrier: ||diag(m) V_k F_k||_F^2."""
    return float(np.linalg.norm((m[:, None] * v_k) @ f_k) ** 2)


def scale_to_power_budget(f_k: np.ndarray, m: np.ndarray, v_k: np.ndarray,
                          budget: float) -> np.ndarray:
    """Shrink the precoder uniformly so the subcarrier power meets the budget.

    Leaves f_k unchanged when already within budget or when it radiates no
    power at all.
    """
    power = transmit_power(m, v_k, f_k)
    if power <= budget or power == 0.0:
        return f_k
    return f_k * np.sqrt(budget / power)
