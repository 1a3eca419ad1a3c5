"""Gaussian unitary / orthogonal ensemble samplers and spectral diagnostics.

Variance conventions (single scale parameter v = ``EnsembleSpec.scale``):

* GUE: diagonal entries real N(0, v^2); off-diagonal real and imaginary parts
  each N(0, v^2 / 2), so E|H_jk|^2 = v^2 for j != k. Entry covariance is
  E[H_ij H_lk] = v^2 d_ik d_jl, and the law is invariant under unitary
  conjugation.
* GOE: real symmetric with diagonal N(0, 2 v^2) and off-diagonal N(0, v^2);
  invariant under orthogonal (not general unitary) conjugation.

Samples are exactly Hermitian by construction and deterministic given the
random stream. Independent draws must come from sequential calls on one
stream or from explicitly split streams; no sampler keeps internal state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.stats

from .reports import TestReport

GUE = "gue"
GOE = "goe"

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    dim: int
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (GUE, GOE):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.dim < 2:
            raise ValueError("ensemble dimension must be >= 2")
        if not self.scale > 0:
            raise ValueError("ensemble scale must be > 0")


@dataclass(frozen=True)
class HermitianSample:
    entries: np.ndarray
    spec: EnsembleSpec
    draw_index: int = 0

    def __post_init__(self):
        h = np.asarray(self.entries)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("sample must be a square matrix")
        if np.max(np.abs(h - np.conj(h.T))) > HERMITICITY_TOL:
            raise ValueError("sample is not Hermitian within tolerance")
        if self.spec.kind == GOE and np.max(np.abs(np.imag(h))) > HERMITICITY_TOL:
            raise ValueError("GOE sample must be real")
        h = np.ascontiguousarray(h)
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)


def make_rng(spec: EnsembleSpec) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(spec.seed)))


def gue_entries(n: int, scale: float, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Raw GUE matrices, shape (size, n, n) or (n, n) when size is None.

    H = v (Z + Z^dagger) / 2 with Z iid standard complex entries reproduces the
    entry convention exactly and is Hermitian to the last bit.
    """
    shape = (n, n) if size is None else (size, n, n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return scale * 0.5 * (z + np.conj(z.swapaxes(-1, -2)))


def goe_entries(n: int, scale: float, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Raw GOE matrices, H = v (X + X^T) / sqrt(2) with X iid standard normal."""
    shape = (n, n) if size is None else (size, n, n)
    x = rng.standard_normal(shape)
    return scale * (x + x.swapaxes(-1, -2)) / np.sqrt(2.0)


def sample_gue(spec: EnsembleSpec, rng: np.random.Generator, draw_index: int = 0) -> HermitianSample:
    if spec.kind != GUE:
        raise ValueError("spec.kind must be 'gue'")
    return HermitianSample(gue_entries(spec.dim, spec.scale, rng), spec, draw_index)


def sample_goe(spec: EnsembleSpec, rng: np.random.Generator, draw_index: int = 0) -> HermitianSample:
    if spec.kind != GOE:
        raise ValueError("spec.kind must be 'goe'")
    return HermitianSample(goe_entries(spec.dim, spec.scale, rng), spec, draw_index)


def sample_ensemble(spec: EnsembleSpec, rng: np.random.Generator, draw_index: int = 0) -> HermitianSample:
    if spec.kind == GUE:
        return sample_gue(spec, rng, draw_index)
    return sample_goe(spec, rng, draw_index)


def eigenvalues(sample: HermitianSample | np.ndarray) -> np.ndarray:
    """Ascending real spectrum of a Hermitian sample."""
    h = sample.entries if isinstance(sample, HermitianSample) else np.asarray(sample)
    if np.max(np.abs(h - np.conj(h.T))) > HERMITICITY_TOL * max(1.0, float(np.max(np.abs(h)))):
        raise ValueError("input is not Hermitian")
    return np.linalg.eigvalsh(h)


def spacing_ratios(levels: np.ndarray) -> np.ndarray:
    """min/max ratios of consecutive spacings of one sorted spectrum."""
    s = np.diff(np.sort(levels))
    if s.size < 2:
        raise ValueError("too few levels for spacing ratios")
    left, right = s[:-1], s[1:]
    return np.minimum(left, right) / np.maximum(left, right)


def spacing_ratio_stat(samples) -> float:
    """Mean consecutive-spacing ratio pooled over a batch of samples.

    Density-insensitive ensemble fingerprint; needs >= 100 samples of
    dimension >= 100 to sit within 0.01 of the ensemble value.
    """
    samples = list(samples)
    if len(samples) < 100:
        raise ValueError("need at least 100 samples")
    pooled = []
    for s in samples:
        lev = eigenvalues(s) if isinstance(s, HermitianSample) else np.asarray(s)
        if lev.size < 100:
            raise ValueError("too few levels per sample (need >= 100)")
        pooled.append(spacing_ratios(lev))
    return float(np.mean(np.concatenate(pooled)))


def conjugation_invariance_check(
    spec: EnsembleSpec,
    unitary: np.ndarray,
    trials: int,
    rng: np.random.Generator,
    alpha: float = 0.01,
    n_probes: int = 2,
    seed: int = 0,
) -> TestReport:
    """Two-sample KS comparison of {H} against {U^-1 H U}.

    Channels: marginals of a diagonal and an off-diagonal entry (real and
    imaginary part) plus quadratic forms <phi|H|phi> for fixed random probes.
    The same draws feed both sides, so equality in law gives a conservative
    pass; a genuine difference (e.g. GOE under a complex unitary) still drives
    the marginals apart. Bonferroni-combined p-value over all channels.
    """
    u = np.asarray(unitary, dtype=np.complex128)
    n = spec.dim
    if u.shape != (n, n) or np.max(np.abs(u @ np.conj(u.T) - np.eye(n))) > UNITARITY_TOL:
        raise ValueError("conjugation matrix is not unitary within tolerance")
    if trials < 100:
        raise ValueError("need at least 100 trials")

    draw = gue_entries if spec.kind == GUE else goe_entries
    h = draw(n, spec.scale, rng, size=trials)
    hc = np.conj(u.T)[None] @ h @ u[None]

    probe_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    probes = probe_rng.standard_normal((n_probes, n)) + 1j * probe_rng.standard_normal((n_probes, n))
    probes /= np.linalg.norm(probes, axis=1, keepdims=True)

    channels: dict[str, tuple[np.ndarray, np.ndarray]] = {
        "diag_re": (h[:, 0, 0].real, hc[:, 0, 0].real),
        "offdiag_re": (h[:, 0, 1].real, hc[:, 0, 1].real),
        "offdiag_im": (h[:, 0, 1].imag, hc[:, 0, 1].imag),
    }
    for i, phi in enumerate(probes):
        qf = np.einsum("i,tij,j->t", np.conj(phi), h, phi).real
        qfc = np.einsum("i,tij,j->t", np.conj(phi), hc, phi).real
        channels[f"quadform_{i}"] = (qf, qfc)

    pvals = {}
    for name, (a, b) in channels.items():
        if np.array_equal(a, b):
            pvals[name] = 1.0
        else:
            pvals[name] = float(scipy.stats.ks_2samp(a, b).pvalue)

    m = len(pvals)
    p_combined = min(1.0, m * min(pvals.values()))
    worst = min(pvals, key=pvals.get)
    return TestReport(
        name=f"conjugation-invariance-{spec.kind}",
        statistic=float(pvals[worst]),
        p_value=p_combined,
        alpha=alpha,
        passed=p_combined > alpha,
        samples=trials,
        seed=seed,
        details={"channel_p_values": pvals, "worst_channel": worst},
    )
