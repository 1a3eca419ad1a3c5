"""Finite-dimensional state arithmetic and projective-space geometry.

States are unit-norm complex vectors with a fixed gauge: the first amplitude
of largest modulus is rotated to zero phase, so every projective point has one
deterministic representative. Inner products are conjugate-linear in the
first argument, ``<u, v> = sum(conj(u) * v)``.

All functions are pure and all arrays are frozen after construction, so values
are safe to share across parallel lanes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

NORM_TOL = 1e-12
HORIZONTAL_TOL = 1e-10
FRAME_TOL = 1e-8


class DegenerateStateError(ValueError):
    """Raised when a zero-norm vector is used where a state is required."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


def _gauge_fix(a: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the first largest-modulus entry is real >= 0."""
    idx = int(np.argmax(np.abs(a)))
    phase = np.angle(a[idx])
    if phase != 0.0:
        a = a * np.exp(-1j * phase)
    return a


@dataclass(frozen=True)
class State:
    """Unit-norm, gauge-fixed amplitude vector over a labelled basis."""

    amplitudes: np.ndarray
    basis_label: str = "abstract"

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        nrm = np.linalg.norm(a)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(
                f"state norm {nrm!r} deviates from 1 beyond {NORM_TOL}; "
                "use normalize() for raw vectors"
            )
        object.__setattr__(self, "amplitudes", _frozen(_gauge_fix(a)))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class TangentVector:
    """Horizontal tangent representative at a base state.

    Horizontal means orthogonal to the base point, i.e. the gauge (pure phase)
    direction has been removed.
    """

    components: np.ndarray
    base_point: State

    def __post_init__(self):
        c = np.asarray(self.components, dtype=np.complex128).reshape(-1)
        if c.shape != self.base_point.amplitudes.shape:
            raise ValueError("tangent components must match base dimension")
        overlap = abs(np.vdot(self.base_point.amplitudes, c))
        if overlap > HORIZONTAL_TOL * max(1.0, float(np.linalg.norm(c))):
            raise ValueError(f"tangent vector not horizontal: |<base, w>| = {overlap:g}")
        object.__setattr__(self, "components", _frozen(c))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


def normalize(v, basis_label: str = "abstract") -> State:
    """Scale a nonzero vector to unit norm and fix its gauge."""
    a = np.asarray(v, dtype=np.complex128).reshape(-1)
    nrm = np.linalg.norm(a)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise DegenerateStateError("degenerate state: zero or non-finite norm")
    return State(a / nrm, basis_label=basis_label)


def fs_distance(u: State, v: State) -> float:
    """Geodesic angle between two projective points, in [0, pi/2].

    theta = arccos |<u, v>| for unit-norm states; symmetric, zero iff the
    arguments are the same projective point.
    """
    c = abs(np.vdot(u.amplitudes, v.amplitudes))
    return float(np.arccos(min(1.0, c)))


def transition_probability(u: State, v: State) -> float:
    """Squared overlap |<u, v>|^2, equal to cos^2 of the geodesic angle."""
    c = abs(np.vdot(u.amplitudes, v.amplitudes))
    return float(min(1.0, c) ** 2)


def horizontal_project(base: State, w) -> TangentVector:
    """Remove the component of ``w`` along the base state.

    Returns the tangent representative w - base * <base, w>, which is
    orthogonal to ``base`` by construction and idempotent.
    """
    w = np.asarray(w, dtype=np.complex128).reshape(-1)
    if w.shape != base.amplitudes.shape:
        raise ValueError("vector dimension must match base state")
    comp = w - base.amplitudes * np.vdot(base.amplitudes, w)
    return TangentVector(comp, base)


def horizontal_frame(base: State) -> np.ndarray:
    """Orthonormal basis of the horizontal subspace at ``base``.

    Rows are the (dim - 1) frame vectors, each unit norm and orthogonal to the
    base state.
    """
    ns = scipy.linalg.null_space(np.conj(base.amplitudes)[None, :])
    return np.ascontiguousarray(ns.T)


def random_state(dim: int, rng: np.random.Generator, basis_label: str = "abstract") -> State:
    """Haar-uniform random state: normalized standard complex normal vector."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize(v, basis_label=basis_label)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via phase-corrected QR of a Ginibre matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))[None, :]


def stabilizer_unitary(base: State, rng: np.random.Generator) -> np.ndarray:
    """Random unitary leaving ``base`` fixed: Haar on the horizontal subspace."""
    frame = horizontal_frame(base)
    k = frame.shape[0]
    cols = np.column_stack([base.amplitudes, frame.T])
    block = np.zeros((k + 1, k + 1), dtype=np.complex128)
    block[0, 0] = 1.0
    block[1:, 1:] = haar_unitary(k, rng)
    return cols @ block @ np.conj(cols.T)


def tangent_components(t: TangentVector, basis: np.ndarray) -> np.ndarray:
    """Coordinates of a tangent vector in an orthonormal horizontal frame.

    ``basis`` holds one frame vector per row. The frame must be orthonormal
    (Gram deviation <= 1e-8) and horizontal at the tangent's base point.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.ndim != 2 or basis.shape[1] != t.base_point.dim:
        raise ValueError("basis must be (k, dim) with dim matching the base point")
    gram = basis @ np.conj(basis.T)
    if np.max(np.abs(gram - np.eye(basis.shape[0]))) > FRAME_TOL:
        raise ValueError("non-orthonormal frame")
    lift = np.abs(basis @ np.conj(t.base_point.amplitudes))
    if np.max(lift) > FRAME_TOL:
        raise ValueError("frame not horizontal at the base point")
    return np.conj(basis) @ t.components
