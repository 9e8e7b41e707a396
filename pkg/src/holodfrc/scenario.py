"""Scenario configuration: geometry, frequencies, propagation, and solver knobs.

A :class:`ScenarioConfig` pins one experiment completely; together with a seed
it determines every downstream quantity bit-for-bit.  Defaults reproduce the
reference THz setup: a 0.15 THz carrier, 16 subcarriers at 0.5 GHz spacing, a
5x5 holographic transmit surface with 4 feeds, a 10x10 reflecting surface, two
targets, three clutter discretes, and three 4x4-array users.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry, SubcarrierGrid
from .holographic import RhsSurface, default_feed_positions

DEFAULT_F_C_HZ = 0.15e12
DEFAULT_DELTA_F_HZ = 0.5e9


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * np.log10(x)


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


@dataclass
class ScenarioConfig:
    # 3-D positions (meters)
    p_bs: tuple = (0.0, 0.0, 0.0)
    p_ris: tuple = (5.0, 5.0, 5.0)
    p_targets: tuple = ((1.0, 2.0, 3.0), (2.0, 1.0, 1.0))
    p_clutter: tuple = ((2.4, 3.4, 3.8), (3.2, 2.8, 2.8), (5.6, 3.8, 2.0))
    p_users: tuple = ((-6.0, 1.5, 3.0), (-5.0, 1.5, 3.0), (1.0, 2.0, 2.5))

    # Square array sides; spacings default to lambda_c/6 (transmit surface)
    # and lambda_c/2 (reflecting surface, users) when left as None
    n_rhs_side: int = 5
    n_ris_side: int = 10
    n_ue_side: int = 4
    d_rhs: float | None = None
    d_ris: float | None = None
    d_ue: float | None = None
    n_feeds: int = 4
    feed_positions: tuple | None = None
    refractive_index: float = float(np.sqrt(3.0))

    # OFDM grid
    f_c_hz: float = DEFAULT_F_C_HZ
    delta_f_hz: float = DEFAULT_DELTA_F_HZ
    n_subcarriers: int = 16

    # Channel statistics
    rician_dir: float = 100.0
    rician_ris: float = 100.0
    nlos_paths_dir: int = 15
    nlos_paths_ris: int = 15
    pathloss_ref: float = 1e-3       # linear power ratio at the reference distance
    ref_distance_m: float = 1.0
    eps_bs_ris: float = 2.0
    eps_dir: float = 2.4             # base station to targets/clutter
    eps_bs_user: float = 2.8
    eps_ris: float = 2.0             # reflecting surface to targets/clutter/users

    # Reflectivities (None means unit RCS for every scatterer)
    rcs_targets: tuple | None = None
    rcs_clutter: tuple | None = None
    noise_radar_w: float = dbm_to_watts(-45.0)
    noise_comm_w: float = dbm_to_watts(-55.0)
    power_per_subcarrier_w: float = db_to_linear(5.0)
    comm_threshold: float = db_to_linear(9.0)

    # Solver constants
    zeta1: float = 1e-6              # fractional-solver stall tolerance (relative)
    zeta2: float = 1e-4              # consensus loop squared-step tolerance
    zeta3: float = 1e-4              # outer loop squared objective-change tolerance (dB^2)
    rho: float = 1.0                 # consensus penalty
    rsd_step: float = 3.98
    max_rsd_iters: int = 100
    max_cadmm_iters: int = 24
    max_outer_iters: int = 30
    max_dinkelbach_iters: int = 20
    random_rhs_uniform: bool = False  # fixed-amplitude mode draws m ~ U[0,1] instead of all-ones

    seed: int = 0

    def __post_init__(self):
        self.p_bs = tuple(float(x) for x in self.p_bs)
        self.p_ris = tuple(float(x) for x in self.p_ris)
        self.p_targets = tuple(tuple(float(x) for x in p) for p in self.p_targets)
        self.p_clutter = tuple(tuple(float(x) for x in p) for p in self.p_clutter)
        self.p_users = tuple(tuple(float(x) for x in p) for p in self.p_users)
        if self.rcs_targets is None:
            self.rcs_targets = (1.0,) * len(self.p_targets)
        if self.rcs_clutter is None:
            self.rcs_clutter = (1.0,) * len(self.p_clutter)
        self.rcs_targets = tuple(float(a) for a in self.rcs_targets)
        self.rcs_clutter = tuple(float(a) for a in self.rcs_clutter)
        if len(self.rcs_targets) != len(self.p_targets):
            raise ValueError("need one RCS per target")
        if len(self.rcs_clutter) != len(self.p_clutter):
            raise ValueError("need one RCS per clutter discrete")
        if self.n_feeds < len(self.p_users):
            raise ValueError("number of feeds must be >= number of users")
        for name in ("pathloss_ref",):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        for name, lo, hi in (("eps_bs_ris", 2, 4), ("eps_dir", 2, 4),
                             ("eps_bs_user", 2, 4), ("eps_ris", 2, 4)):
            v = getattr(self, name)
            if not lo <= v <= hi:
                raise ValueError(f"{name} must be in [{lo}, {hi}], got {v}")
        for name in ("noise_radar_w", "noise_comm_w", "power_per_subcarrier_w",
                     "comm_threshold", "ref_distance_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.rician_dir < 0 or self.rician_ris < 0:
            raise ValueError("Rician factors must be nonnegative")

    # Derived counts
    @property
    def n_targets(self) -> int:
        return len(self.p_targets)

    @property
    def n_clutter(self) -> int:
        return len(self.p_clutter)

    @property
    def n_users(self) -> int:
        return len(self.p_users)

    @property
    def carrier_wavelength(self) -> float:
        return self.grid().carrier_wavelength

    def grid(self) -> SubcarrierGrid:
        return SubcarrierGrid(self.f_c_hz, self.delta_f_hz, self.n_subcarriers)

    def bs_geometry(self) -> ArrayGeometry:
        d = self.d_rhs if self.d_rhs is not None else self.carrier_wavelength / 6.0
        return ArrayGeometry(self.n_rhs_side, self.n_rhs_side, d, d)

    def ris_geometry(self) -> ArrayGeometry:
        d = self.d_ris if self.d_ris is not None else self.carrier_wavelength / 2.0
        return ArrayGeometry(self.n_ris_side, self.n_ris_side, d, d)

    def ue_geometry(self) -> ArrayGeometry:
        d = self.d_ue if self.d_ue is not None else self.carrier_wavelength / 2.0
        return ArrayGeometry(self.n_ue_side, self.n_ue_side, d, d)

    def rhs_surface(self) -> RhsSurface:
        geom = self.bs_geometry()
        if self.feed_positions is not None:
            feeds = np.asarray(self.feed_positions, dtype=float)
        else:
            feeds = default_feed_positions(geom, self.n_feeds)
        return RhsSurface(geom, feeds, self.refractive_index)

    # Threshold on the unnormalized signal/interference power ratio summed over
    # subcarriers; dividing the summed ratio by K recovers the per-user
    # sum-average SINR, so ratio >= n_subcarriers * comm_threshold is the
    # constraint actually enforced by the solvers.
    @property
    def comm_threshold_sum(self) -> float:
        return self.n_subcarriers * self.comm_threshold

    def replace(self, **kwargs) -> "ScenarioConfig":
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def canonical_hash(self) -> str:
        """Stable hash of the full configuration (used to key run records)."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]
