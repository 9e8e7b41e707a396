"""Uniform planar array geometry and wideband space-frequency steering vectors.

All arrays (base station surface, reflecting surface, user terminals) are
modeled as UPAs in the x-y plane with independent element spacings.  Steering
vectors are frequency dependent: the phase progression of element i along an
axis is exp(-j*2*pi*i*mu/lambda_k), so the same geometry produces different
beams on different subcarriers (beam squint).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0
"""Speed of light in m/s."""


@dataclass(frozen=True)
class ArrayGeometry:
    """Rectangular UPA: n_x-by-n_y elements spaced d_x/d_y meters apart."""

    n_x: int
    n_y: int
    d_x: float
    d_y: float

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError(f"element counts must be >= 1, got {self.n_x}x{self.n_y}")
        if self.d_x <= 0 or self.d_y <= 0:
            raise ValueError(f"element spacings must be > 0, got {self.d_x}, {self.d_y}")

    @property
    def n_elements(self) -> int:
        return self.n_x * self.n_y

    def element_positions(self) -> np.ndarray:
        """Planar (x, y) coordinates of all elements, x-major order.

        Element p corresponds to (i_x, i_y) = (p // n_y, p % n_y), matching the
        Kronecker ordering of :func:`upa_steering`.
        """
        ix, iy = np.divmod(np.arange(self.n_elements), self.n_y)
        return np.column_stack([ix * self.d_x, iy * self.d_y])


@dataclass(frozen=True)
class AnglePair:
    """Azimuth in [0, 2*pi], elevation in [0, pi/2] (upward half space)."""

    azimuth: float
    elevation: float

    def __post_init__(self):
        if not 0.0 <= self.azimuth <= 2.0 * np.pi:
            raise ValueError(f"azimuth {self.azimuth} outside [0, 2*pi]")
        if not 0.0 <= self.elevation <= np.pi / 2.0:
            raise ValueError(f"elevation {self.elevation} outside [0, pi/2]")


@dataclass(frozen=True)
class SubcarrierGrid:
    """OFDM grid: subcarrier k (1-based) sits at f_c + k*delta_f."""

    f_c: float
    delta_f: float
    n_subcarriers: int

    def __post_init__(self):
        if self.n_subcarriers < 1:
            raise ValueError("n_subcarriers must be >= 1")
        if self.f_c + self.delta_f <= 0 or self.f_c + self.n_subcarriers * self.delta_f <= 0:
            raise ValueError("all subcarrier frequencies must be positive")

    def frequencies(self) -> np.ndarray:
        return self.f_c + np.arange(1, self.n_subcarriers + 1) * self.delta_f

    def wavelengths(self) -> np.ndarray:
        return SPEED_OF_LIGHT / self.frequencies()

    @property
    def carrier_wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c


def direction_cosines(angles: AnglePair, d_x: float, d_y: float) -> tuple[float, float]:
    """Spacing-scaled direction cosines (mu_x, mu_y) of a plane wave.

    mu_x = d_x*cos(az)*cos(el), mu_y = d_y*sin(az)*cos(el).
    """
    c_el = np.cos(angles.elevation)
    return d_x * np.cos(angles.azimuth) * c_el, d_y * np.sin(angles.azimuth) * c_el


def axis_steering(n: int, mu: float, wavelength: float) -> np.ndarray:
    """Length-n steering vector along one axis: entry i is exp(-j*2*pi*i*mu/lambda)."""
    if n < 1:
        raise ValueError(f"axis element count must be >= 1, got {n}")
    return np.exp(-2j * np.pi * np.arange(n) * mu / wavelength)


def upa_steering(geom: ArrayGeometry, f_k: float, angles: AnglePair) -> np.ndarray:
    """Space-frequency UPA steering vector: Kronecker of x- and y-axis vectors."""
    lam = SPEED_OF_LIGHT / f_k
    mu_x, mu_y = direction_cosines(angles, geom.d_x, geom.d_y)
    return np.kron(axis_steering(geom.n_x, mu_x, lam), axis_steering(geom.n_y, mu_y, lam))


def angles_between(p_from: np.ndarray, p_to: np.ndarray) -> AnglePair:
    """Azimuth/elevation of the ray from p_from to p_to (3-vectors, meters).

    Azimuth wraps atan2 to [0, 2*pi); elevation is clamped to [0, pi/2] since
    the arrays are assumed to face the upward half space.
    """
    delta = np.asarray(p_to, dtype=float) - np.asarray(p_from, dtype=float)
    if not np.any(delta):
        raise ValueError("coincident points have no direction")
    azimuth = float(np.arctan2(delta[1], delta[0])) % (2.0 * np.pi)
    elevation = float(np.arctan2(delta[2], np.hypot(delta[0], delta[1])))
    elevation = min(max(elevation, 0.0), np.pi / 2.0)
    return AnglePair(azimuth, elevation)
