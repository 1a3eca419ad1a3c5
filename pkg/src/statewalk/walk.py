"""Random-Hamiltonian state walks and their classical-translation reduction.

One walk step applies exp(-i H dt / hbar) with a fresh independent ensemble
draw per step. The exact stepper diagonalizes each draw; the first-order
stepper applies phi - (i/hbar) H phi dt and renormalizes, and is only valid
in the regime scale * dt / hbar <= 0.05.

The constrained walk is the reduction where every step acts as a spatial
translation: i.i.d. normal velocity draws xi_k produce the displacement
d_N = sum_k xi_k dt.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensembles import EnsembleSpec, HermitianSample, gue_entries, goe_entries, GUE
from .gaussian import ManifoldPoint, translation_tangent_basis
from .hilbert import State, fs_distance, normalize
from .rng import split_rng

FIRST_ORDER_BOUND = 0.05

EXACT = "exact-eigen"
FIRST_ORDER = "first-order"


@dataclass(frozen=True)
class WalkConfig:
    dim: int
    steps: int
    dt: float
    ensemble: EnsembleSpec | None
    hbar: float = 1.0
    stepper: str = EXACT
    seed: int = 0
    snapshot_stride: int = 0

    def __post_init__(self):
        if self.stepper not in (EXACT, FIRST_ORDER):
            raise ValueError(f"unknown stepper {self.stepper!r}")
        if self.steps < 0 or not self.dt > 0 or not self.hbar > 0:
            raise ValueError("steps must be >= 0 and dt, hbar positive")
        if self.ensemble is not None and self.ensemble.dim != self.dim:
            raise ValueError("ensemble dimension must match walk dimension")
        if (
            self.stepper == FIRST_ORDER
            and self.ensemble is not None
            and self.ensemble.scale * self.dt / self.hbar > FIRST_ORDER_BOUND
        ):
            raise ValueError(
                f"first-order stepper requires scale*dt/hbar <= {FIRST_ORDER_BOUND}"
            )


@dataclass
class WalkTrajectory:
    states: list
    fs_distances: np.ndarray
    config: WalkConfig
    extras: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return self.config.dt * np.arange(len(self.fs_distances))


@dataclass(frozen=True)
class ConstrainedConfig:
    dim: int
    steps: int
    dt: float
    step_std: float
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("need at least one step")
        if not self.dt > 0 or self.step_std < 0:
            raise ValueError("dt must be positive and step_std non-negative")


@dataclass
class ConstrainedTrajectory:
    displacements: np.ndarray  # (steps, dim) cumulative sums of xi_k * dt
    step_draws: np.ndarray     # (steps, dim) velocity draws xi_k
    config: ConstrainedConfig

    @property
    def final_displacement(self) -> np.ndarray:
        return self.displacements[-1]


def unconstrained_step(
    phi: State,
    sample: HermitianSample | np.ndarray,
    dt: float,
    hbar: float = 1.0,
    stepper: str = EXACT,
) -> State:
    """Advance a state by one random-Hamiltonian factor."""
    h = sample.entries if isinstance(sample, HermitianSample) else np.asarray(sample)
    if stepper == EXACT:
        lam, q = np.linalg.eigh(h)
        rotated = np.conj(q.T) @ phi.amplitudes
        rotated *= np.exp(-1j * lam * dt / hbar)
        return State(q @ rotated, basis_label=phi.basis_label)
    if stepper == FIRST_ORDER:
        if isinstance(sample, HermitianSample) and sample.spec.scale * dt / hbar > FIRST_ORDER_BOUND:
            raise ValueError("first-order stepper outside its accuracy regime")
        return normalize(
            phi.amplitudes - 1j * (h @ phi.amplitudes) * dt / hbar,
            basis_label=phi.basis_label,
        )
    raise ValueError(f"unknown stepper {stepper!r}")


def _draw_batch(spec: EnsembleSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    if spec.kind == GUE:
        return gue_entries(spec.dim, spec.scale, rng, size=size)
    return goe_entries(spec.dim, spec.scale, rng, size=size)


def run_walk(phi0: State, cfg: WalkConfig, rng: np.random.Generator | None = None) -> WalkTrajectory:
    """Evolve one trajectory with a fresh independent draw per step."""
    if cfg.ensemble is None:
        raise ValueError("run_walk requires an ensemble")
    if phi0.dim != cfg.dim:
        raise ValueError("initial state dimension does not match config")
    if rng is None:
        rng = split_rng(cfg.seed)
    stride = cfg.snapshot_stride
    states = [phi0]
    theta = np.zeros(cfg.steps + 1)
    phi = phi0
    for k in range(1, cfg.steps + 1):
        h = _draw_batch(cfg.ensemble, rng, 1)[0]
        phi = unconstrained_step(phi, h, cfg.dt, cfg.hbar, cfg.stepper)
        theta[k] = fs_distance(phi0, phi)
        if stride and (k % stride == 0):
            states.append(phi)
    if cfg.steps > 0 and (not stride or cfg.steps % stride != 0):
        states.append(phi)
    return WalkTrajectory(states=states, fs_distances=theta, config=cfg)


def first_order_step_samples(
    phi: State,
    spec: EnsembleSpec,
    count: int,
    dt: float,
    hbar: float = 1.0,
    rng: np.random.Generator | None = None,
    chunk: int = 512,
) -> np.ndarray:
    """Horizontal parts of -(i/hbar) H phi dt for ``count`` independent draws.

    These are the raw step vectors of the first-order walk at a fixed base
    state, the objects whose distribution the isotropy test examines.
    Single-stream vectorization; shape (count, dim).
    """
    if rng is None:
        rng = split_rng(spec.seed)
    base = phi.amplitudes
    out = np.empty((count, phi.dim), dtype=np.complex128)
    done = 0
    while done < count:
        b = min(chunk, count - done)
        h = _draw_batch(spec, rng, b)
        step = -1j * np.einsum("bij,j->bi", h, base) * dt / hbar
        step -= np.outer(step @ np.conj(base), base)
        out[done : done + b] = step
        done += b
    return out


def batch_final_distances(
    phi0: State,
    cfg: WalkConfig,
    trials: int,
    rng: np.random.Generator,
    chunk: int = 256,
) -> np.ndarray:
    """Final projective distances theta(phi0, phi_N) over many walks.

    Vectorized across trials on a single stream (one lane); use per-trial
    split streams with run_walk when fanning out across processes.
    """
    if cfg.ensemble is None:
        raise ValueError("requires an ensemble")
    base = phi0.amplitudes
    out = np.empty(trials)
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        psi = np.broadcast_to(base, (b, cfg.dim)).copy()
        for _ in range(cfg.steps):
            h = _draw_batch(cfg.ensemble, rng, b)
            if cfg.stepper == FIRST_ORDER:
                psi = psi - 1j * np.einsum("bij,bj->bi", h, psi) * cfg.dt / cfg.hbar
                psi /= np.linalg.norm(psi, axis=1, keepdims=True)
            else:
                lam, q = np.linalg.eigh(h)
                rot = np.einsum("bji,bj->bi", np.conj(q), psi)
                rot *= np.exp(-1j * lam * cfg.dt / cfg.hbar)
                psi = np.einsum("bij,bj->bi", q, rot)
        overlap = np.abs(psi @ np.conj(base))
        out[done : done + b] = np.arccos(np.clip(overlap, 0.0, 1.0))
        done += b
    return out


def constrained_walk(
    dim: int,
    steps: int,
    dt: float,
    step_std: float,
    rng: np.random.Generator | None = None,
    seed: int = 0,
) -> ConstrainedTrajectory:
    """Translation-constrained walk: i.i.d. normal velocity steps."""
    cfg = ConstrainedConfig(dim=dim, steps=steps, dt=dt, step_std=step_std, seed=seed)
    if rng is None:
        rng = split_rng(seed)
    xi = rng.normal(0.0, step_std, size=(steps, dim)) if step_std > 0 else np.zeros((steps, dim))
    disp = np.cumsum(xi * dt, axis=0)
    return ConstrainedTrajectory(displacements=disp, step_draws=xi, config=cfg)


def constrained_final_displacements(
    dim: int,
    steps: int,
    dt: float,
    step_std: float,
    trials: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """d_N over many constrained walks, vectorized; shape (trials, dim)."""
    xi_sum = rng.normal(0.0, step_std, size=(trials, steps, dim)).sum(axis=1)
    return xi_sum * dt


def project_onto_translations(
    sample: HermitianSample | np.ndarray,
    m: ManifoldPoint,
) -> np.ndarray:
    """Translation-tangent component of one generator draw, in velocity units.

    xi_j = Re <e_j, -(i/hbar) H g> * 2 sigma, with e_j the translation frame
    and 2 sigma the projective-to-classical length conversion of the embedded
    manifold.
    """
    h = sample.entries if isinstance(sample, HermitianSample) else np.asarray(sample)
    return project_onto_translations_batch(h[None], m)[0]


def project_onto_translations_batch(hs: np.ndarray, m: ManifoldPoint) -> np.ndarray:
    """Vectorized translation projection; ``hs`` has shape (T, n, n)."""
    if not m.params.is_at_rest:
        raise ValueError("translation projection requires a zero-momentum packet")
    frame = translation_tangent_basis(m)
    g = m.state.amplitudes
    hbar = m.grid.hbar
    step = -1j * np.einsum("tij,j->ti", hs, g) / hbar
    comps = step @ np.conj(frame).T
    return comps.real * (2.0 * m.params.width)


def complex_translation_components(hs: np.ndarray, m: ManifoldPoint) -> np.ndarray:
    """Full complex frame components of -(i/hbar) H g, before taking Re.

    The real part is the translation velocity; under a unitary-invariant
    ensemble the real and imaginary parts are independent with equal
    variance, which is the two-channel isotropy check available in one
    spatial dimension.
    """
    frame = translation_tangent_basis(m)
    g = m.state.amplitudes
    step = -1j * np.einsum("tij,j->ti", hs, g) / m.grid.hbar
    return (step @ np.conj(frame).T) * (2.0 * m.params.width)


@dataclass
class DriftOutcome:
    trajectory: WalkTrajectory
    outcome: int | None


def walk_with_drift(
    phi0: State,
    targets: list,
    kappa: float,
    cfg: WalkConfig,
    eps: float,
    rng: np.random.Generator | None = None,
) -> DriftOutcome:
    """Random walk with a deterministic pull toward the nearest target.

    After each random step the state moves along the projective gradient of
    the squared overlap with the closest target; the walk stops once it
    enters the capture ball of radius ``eps`` around that target.
    """
    if not targets:
        raise ValueError("need at least one target")
    tstates = [t.state if isinstance(t, ManifoldPoint) else t for t in targets]
    for i in range(len(tstates)):
        for j in range(i + 1, len(tstates)):
            if fs_distance(tstates[i], tstates[j]) <= 2.0 * eps:
                raise ValueError("overlapping capture regions: targets closer than 2*eps")
    if rng is None:
        rng = split_rng(cfg.seed)

    tmat = np.array([t.amplitudes for t in tstates])
    phi = phi0
    theta0 = np.zeros(cfg.steps + 1)
    target_theta = np.zeros((cfg.steps + 1, len(tstates)))
    target_theta[0] = [fs_distance(phi0, t) for t in tstates]
    outcome = None
    k_stop = cfg.steps
    for k in range(1, cfg.steps + 1):
        if cfg.ensemble is not None:
            h = _draw_batch(cfg.ensemble, rng, 1)[0]
            phi = unconstrained_step(phi, h, cfg.dt, cfg.hbar, cfg.stepper)
        overlaps = tmat @ np.conj(phi.amplitudes)
        nearest = int(np.argmax(np.abs(overlaps)))
        chi = tmat[nearest]
        inner = np.vdot(chi, phi.amplitudes)
        grad = chi * inner - phi.amplitudes * abs(inner) ** 2
        phi = normalize(phi.amplitudes + kappa * cfg.dt * grad, basis_label=phi.basis_label)
        theta0[k] = fs_distance(phi0, phi)
        target_theta[k] = np.arccos(np.clip(np.abs(tmat @ np.conj(phi.amplitudes)), 0.0, 1.0))
        if target_theta[k, nearest] < eps:
            outcome = nearest
            k_stop = k
            break
    traj = WalkTrajectory(
        states=[phi0, phi],
        fs_distances=theta0[: k_stop + 1],
        config=cfg,
        extras={"target_theta": target_theta[: k_stop + 1]},
    )
    return DriftOutcome(trajectory=traj, outcome=outcome)
