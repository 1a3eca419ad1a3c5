"""Gaussian states and wave packets on 1D grids, and their overlap geometry.

The closed-form squared overlap of two zero-momentum packets with centers
a, b and widths sigma, delta in dimension d is

    (2 sigma delta / (sigma^2 + delta^2))^d * exp(-|a-b|^2 / (2 (sigma^2 + delta^2)))

which for equal widths reduces to exp(-|a-b|^2 / (4 sigma^2)). Grid
quadrature reproduces it to better than 1e-8 when the packet is resolved
(h <= sigma/4) and covered (center +- 6 sigma inside the grid); three
dimensions factor into per-axis 1D overlaps.

The grid realization is 1D; d = 3 parameter sets are served by the closed
form and per-axis factorization only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import State, TangentVector, fs_distance, horizontal_project, normalize

COVERAGE_SIGMAS = 6.0
RESOLUTION_FACTOR = 4.0


class GridResolutionError(ValueError):
    """Grid too small or too coarse for the requested packet."""


@dataclass(frozen=True)
class Grid:
    """Uniform 1D lattice, periodic convention (right endpoint excluded)."""

    n: int
    extent: float
    center: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("grid needs at least 8 points")
        if not self.extent > 0 or not self.hbar > 0:
            raise ValueError("extent and hbar must be positive")

    @property
    def spacing(self) -> float:
        return self.extent / self.n

    @property
    def points(self) -> np.ndarray:
        return self.center - self.extent / 2 + self.spacing * np.arange(self.n)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)

    def covers(self, a: float, sigma: float) -> bool:
        x = self.points
        return (a - COVERAGE_SIGMAS * sigma >= x[0]) and (a + COVERAGE_SIGMAS * sigma <= x[-1])

    def label(self) -> str:
        return f"grid[n={self.n},L={self.extent},c={self.center}]"


@dataclass(frozen=True)
class GaussianParams:
    """Center, momentum, width and dimension of one Gaussian packet."""

    center: tuple
    momentum: tuple
    width: float
    dim: int = 1

    def __post_init__(self):
        if self.dim not in (1, 3):
            raise ValueError("dimension must be 1 or 3")
        c = tuple(float(x) for x in np.atleast_1d(self.center))
        p = tuple(float(x) for x in np.atleast_1d(self.momentum))
        if len(c) != self.dim or len(p) != self.dim:
            raise ValueError("center and momentum must have length dim")
        if not self.width > 0:
            raise ValueError("width must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "momentum", p)

    @classmethod
    def at_rest(cls, center, width: float, dim: int = 1) -> "GaussianParams":
        c = np.atleast_1d(np.asarray(center, dtype=float))
        return cls(tuple(c), (0.0,) * dim, width, dim)

    @property
    def is_at_rest(self) -> bool:
        return all(p == 0.0 for p in self.momentum)


@dataclass(frozen=True)
class ManifoldPoint:
    params: GaussianParams
    state: State
    grid: Grid


def _check_realizable(params: GaussianParams, grid: Grid):
    if params.dim != 1:
        raise ValueError("grid realization supports dim = 1 only; use the closed form for dim = 3")
    a, sigma = params.center[0], params.width
    if grid.spacing > sigma / RESOLUTION_FACTOR or not grid.covers(a, sigma):
        raise GridResolutionError(
            f"under-resolved Gaussian: need h <= sigma/{RESOLUTION_FACTOR:g} and "
            f"coverage of center +- {COVERAGE_SIGMAS:g} sigma on {grid.label()}"
        )


def gaussian_state(params: GaussianParams, grid: Grid) -> ManifoldPoint:
    """Zero-momentum packet on the grid, normalized, real and positive."""
    if not params.is_at_rest:
        raise ValueError("gaussian_state requires zero momentum; use wave_packet")
    _check_realizable(params, grid)
    x = grid.points
    profile = np.exp(-((x - params.center[0]) ** 2) / (4.0 * params.width**2))
    return ManifoldPoint(params, normalize(profile, basis_label=grid.label()), grid)


def wave_packet(params: GaussianParams, grid: Grid) -> ManifoldPoint:
    """Momentum-carrying packet; the modulus is the zero-momentum profile."""
    _check_realizable(params, grid)
    p = params.momentum[0]
    if abs(p) * grid.spacing / grid.hbar >= np.pi / 4:
        raise GridResolutionError("momentum phase under-sampled: need |p| h / hbar < pi/4")
    x = grid.points
    amp = np.exp(-((x - params.center[0]) ** 2) / (4.0 * params.width**2)) * np.exp(
        1j * p * x / grid.hbar
    )
    return ManifoldPoint(params, normalize(amp, basis_label=grid.label()), grid)


def overlap_closed_form(p1: GaussianParams, p2: GaussianParams) -> float:
    """Squared overlap of two zero-momentum packets from the closed form."""
    if not (p1.is_at_rest and p2.is_at_rest):
        raise ValueError("closed form covers zero-momentum packets only")
    if p1.dim != p2.dim:
        raise ValueError("dimension mismatch")
    s, d = p1.width, p2.width
    sep2 = float(np.sum((np.asarray(p1.center) - np.asarray(p2.center)) ** 2))
    pref = 2.0 * s * d / (s * s + d * d)
    return pref**p1.dim * math.exp(-sep2 / (2.0 * (s * s + d * d)))


def overlap_quadrature(s1: ManifoldPoint, s2: ManifoldPoint) -> float:
    """Squared modulus of the discrete inner product of two grid packets."""
    if s1.grid != s2.grid:
        raise ValueError("grid mismatch")
    return float(abs(np.vdot(s1.state.amplitudes, s2.state.amplitudes)) ** 2)


def overlap_quadrature_3d(p1: GaussianParams, p2: GaussianParams, grid: Grid) -> float:
    """Per-axis factorization of the 3D squared overlap on a shared 1D grid."""
    if p1.dim != 3 or p2.dim != 3:
        raise ValueError("expects dim = 3 parameter sets")
    out = 1.0
    for axis in range(3):
        a1 = GaussianParams.at_rest((p1.center[axis],), p1.width)
        a2 = GaussianParams.at_rest((p2.center[axis],), p2.width)
        out *= overlap_quadrature(gaussian_state(a1, grid), gaussian_state(a2, grid))
    return out


def realize_fs_distance(theta: float, sigma: float, dim: int = 1) -> tuple[GaussianParams, GaussianParams]:
    """Equal-width packet pair whose projective distance equals ``theta``.

    Inverts the equal-width overlap relation: |a - b| = 2 sigma sqrt(-ln cos^2 theta).
    Endpoints 0 and pi/2 are unreachable with finite separation.
    """
    if not (0.0 < theta < np.pi / 2):
        raise ValueError("theta must lie strictly inside (0, pi/2)")
    if not sigma > 0:
        raise ValueError("width must be positive")
    sep = 2.0 * sigma * math.sqrt(-2.0 * math.log(math.cos(theta)))
    a = (0.0,) * dim
    b = (sep,) + (0.0,) * (dim - 1)
    return GaussianParams.at_rest(a, sigma, dim), GaussianParams.at_rest(b, sigma, dim)


def grid_for_pair(p1: GaussianParams, p2: GaussianParams, hbar: float = 1.0,
                  margin_sigmas: float = 8.0, points_per_sigma: float = 8.0) -> Grid:
    """Smallest power-of-two grid resolving and covering both packets."""
    lo = min(min(p1.center), min(p2.center))
    hi = max(max(p1.center), max(p2.center))
    smax, smin = max(p1.width, p2.width), min(p1.width, p2.width)
    extent = (hi - lo) + 2.0 * margin_sigmas * smax
    h_target = smin / points_per_sigma
    n = 1 << max(4, int(math.ceil(math.log2(extent / h_target))))
    return Grid(n=n, extent=extent, center=0.5 * (lo + hi), hbar=hbar)


def translation_derivative(m: ManifoldPoint) -> TangentVector:
    """Horizontal derivative of the packet with respect to its center.

    Central difference over a small center displacement; the norm approaches
    1 / (2 sigma) for a well-resolved zero-momentum packet.
    """
    if not m.params.is_at_rest:
        raise ValueError("translation frame is defined for zero-momentum packets")
    sigma = m.params.width
    step = 1e-3 * sigma
    a = m.params.center[0]
    plus = gaussian_state(GaussianParams.at_rest((a + step,), sigma), m.grid)
    minus = gaussian_state(GaussianParams.at_rest((a - step,), sigma), m.grid)
    deriv = (plus.state.amplitudes - minus.state.amplitudes) / (2.0 * step)
    if np.linalg.norm(deriv) < 1e-8:
        raise GridResolutionError("degenerate translation derivative")
    return horizontal_project(m.state, deriv)


def translation_tangent_basis(m: ManifoldPoint) -> np.ndarray:
    """Orthonormal horizontal frame of translation directions (one per axis)."""
    t = translation_derivative(m)
    return (t.components / t.norm)[None, :]


def induced_metric_ratio(sigma: float, eps: float, grid: Grid) -> float:
    """Projective distance per unit center displacement, -> 1/(2 sigma)."""
    if not 0.0 < abs(eps) <= sigma:
        raise ValueError("displacement outside the small-displacement regime")
    g0 = gaussian_state(GaussianParams.at_rest((grid.center - eps / 2,), sigma), grid)
    g1 = gaussian_state(GaussianParams.at_rest((grid.center + eps / 2,), sigma), grid)
    return fs_distance(g0.state, g1.state) / abs(eps)


def translate_state(state: State, grid: Grid, shift: float) -> State:
    """Exact spectral action of the translation flow exp(-i s p_hat / hbar)."""
    spec = np.fft.fft(state.amplitudes)
    spec *= np.exp(-1j * grid.wavenumbers * shift)
    return normalize(np.fft.ifft(spec), basis_label=state.basis_label)


def boost_state(state: State, grid: Grid, dp: float) -> State:
    """Multiply in the position phase exp(i dp x / hbar), shifting momentum by dp."""
    return normalize(
        state.amplitudes * np.exp(1j * dp * grid.points / grid.hbar),
        basis_label=state.basis_label,
    )


def position_mean(m: ManifoldPoint) -> float:
    w = np.abs(m.state.amplitudes) ** 2
    return float(np.sum(w * m.grid.points))


def position_variance(m: ManifoldPoint) -> float:
    w = np.abs(m.state.amplitudes) ** 2
    x = m.grid.points
    mu = np.sum(w * x)
    return float(np.sum(w * (x - mu) ** 2))


def momentum_mean(m: ManifoldPoint) -> float:
    spec = np.fft.fft(m.state.amplitudes)
    w = np.abs(spec) ** 2
    return float(np.sum(w * m.grid.hbar * m.grid.wavenumbers) / np.sum(w))
