import math

import numpy as np
import pytest

from statewalk.ensembles import GUE, EnsembleSpec, goe_entries, gue_entries, sample_gue
from statewalk.gaussian import GaussianParams, Grid, gaussian_state, translate_state
from statewalk.hilbert import fs_distance, random_state
from statewalk.rng import split_rng
from statewalk.walk import (
    EXACT,
    FIRST_ORDER,
    WalkConfig,
    complex_translation_components,
    constrained_final_displacements,
    constrained_walk,
    first_order_step_samples,
    project_onto_translations,
    project_onto_translations_batch,
    run_walk,
    unconstrained_step,
    walk_with_drift,
)

GRID = Grid(n=64, extent=16.0)
SIGMA = 1.0


def _packet(center=0.0):
    return gaussian_state(GaussianParams.at_rest((center,), SIGMA), GRID)


def test_zero_hamiltonian_leaves_state():
    rng = split_rng(0)
    phi = random_state(8, rng)
    out = unconstrained_step(phi, np.zeros((8, 8)), 0.1)
    np.testing.assert_allclose(out.amplitudes, phi.amplitudes, atol=1e-14)


def test_scalar_hamiltonian_is_global_phase():
    rng = split_rng(1)
    phi = random_state(8, rng)
    out = unconstrained_step(phi, 3.7 * np.eye(8), 0.25)
    assert fs_distance(phi, out) < 1e-12


def test_exact_step_norm_drift_accumulation():
    rng = split_rng(2)
    phi = random_state(16, rng)
    spec = EnsembleSpec(GUE, 16, scale=1.0)
    worst = 0.0
    for _ in range(10_000):
        h = gue_entries(16, 1.0, rng)
        phi = unconstrained_step(phi, h, 0.05)
        worst = max(worst, abs(np.linalg.norm(phi.amplitudes) - 1.0))
    assert worst < 1e-9


def test_first_order_bound_enforced():
    spec = EnsembleSpec(GUE, 8, scale=1.0)
    with pytest.raises(ValueError):
        WalkConfig(dim=8, steps=10, dt=0.1, ensemble=spec, stepper=FIRST_ORDER)
    rng = split_rng(3)
    h = sample_gue(spec, rng)
    phi = random_state(8, rng)
    with pytest.raises(ValueError):
        unconstrained_step(phi, h, 0.1, stepper=FIRST_ORDER)


def test_run_walk_zero_steps():
    spec = EnsembleSpec(GUE, 8, scale=1.0)
    cfg = WalkConfig(dim=8, steps=0, dt=0.05, ensemble=spec, seed=5)
    phi = random_state(8, split_rng(4))
    traj = run_walk(phi, cfg)
    assert len(traj.states) == 1
    assert traj.fs_distances.tolist() == [0.0]


def test_run_walk_seed_determinism():
    spec = EnsembleSpec(GUE, 12, scale=1.0)
    cfg = WalkConfig(dim=12, steps=40, dt=0.02, ensemble=spec, seed=99)
    phi = random_state(12, split_rng(6))
    a = run_walk(phi, cfg)
    b = run_walk(phi, cfg)
    np.testing.assert_array_equal(a.fs_distances, b.fs_distances)


def test_same_hamiltonian_preserves_pair_distance():
    rng = split_rng(7)
    u, v = random_state(32, rng), random_state(32, rng)
    d0 = fs_distance(u, v)
    for _ in range(100):
        h = gue_entries(32, 1.0, rng)
        u = unconstrained_step(u, h, 0.05)
        v = unconstrained_step(v, h, 0.05)
        assert abs(fs_distance(u, v) - d0) < 1e-10


def test_msd_linear_in_small_angle_regime():
    n, v, dt, walks, steps = 64, 1.0, 0.02, 200, 50
    spec = EnsembleSpec(GUE, n, scale=v)
    rng = split_rng(8)
    phi0 = random_state(n, rng)
    msd = np.zeros(steps + 1)
    for _ in range(walks):
        cfg = WalkConfig(dim=n, steps=steps, dt=dt, ensemble=spec, stepper=FIRST_ORDER)
        traj = run_walk(phi0, cfg, rng=rng)
        msd += traj.fs_distances**2
    msd /= walks
    k = np.arange(steps + 1)
    sel = (msd <= 0.15) & (k > 0)
    assert sel.sum() >= 4
    x, y = k[sel].astype(float), msd[sel]
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    r2 = 1.0 - np.sum((y - fitted) ** 2) / np.sum((y - y.mean()) ** 2)
    assert r2 > 0.99
    # per-step growth tracks the isotropic prediction (n-1) (v dt / hbar)^2
    assert slope == pytest.approx((n - 1) * (v * dt) ** 2, rel=0.1)


def test_first_order_step_samples_variance():
    n, v, dt, count = 16, 1.2, 0.02, 5000
    spec = EnsembleSpec(GUE, n, scale=v, seed=17)
    phi = random_state(n, split_rng(9))
    steps = first_order_step_samples(phi, spec, count, dt)
    assert steps.shape == (count, n)
    assert np.max(np.abs(steps @ np.conj(phi.amplitudes))) < 1e-12
    per_coord = np.sum(np.abs(steps) ** 2, axis=1).mean() / (n - 1)
    assert per_coord == pytest.approx((v * dt) ** 2, rel=0.05)


def test_constrained_walk_zero_std():
    traj = constrained_walk(1, 100, 0.01, 0.0, split_rng(10))
    assert np.all(traj.final_displacement == 0.0)


def test_constrained_walk_bookkeeping_identity():
    traj = constrained_walk(3, 500, 0.01, 1.0, split_rng(11))
    acc = np.zeros(3)
    path = []
    for xi in traj.step_draws:
        acc = acc + xi * 0.01
        path.append(acc.copy())
    np.testing.assert_array_equal(traj.displacements, np.array(path))
    np.testing.assert_array_equal(traj.final_displacement, path[-1])


def test_constrained_walk_variance():
    n_steps, dt, v0, trials = 1000, 0.01, 1.0, 10_000
    dn = constrained_final_displacements(1, n_steps, dt, v0, trials, split_rng(12))
    expected = n_steps * dt**2 * v0**2
    assert np.var(dn) == pytest.approx(expected, rel=0.10)


def test_constrained_step_autocorrelation():
    traj = constrained_walk(1, 20_000, 0.01, 1.0, split_rng(13))
    xi = traj.step_draws[:, 0]
    rho = np.corrcoef(xi[:-1], xi[1:])[0, 1]
    assert abs(rho) < 3.0 / math.sqrt(xi.size - 1)


def test_translation_consistency_with_grid_evolution():
    # Time-ordered product of momentum-generator factors == rigid translation.
    dt = 0.01
    traj = constrained_walk(1, 300, dt, 1.0, split_rng(14))
    phi = _packet(0.0).state
    for xi in traj.step_draws[:, 0]:
        phi = translate_state(phi, GRID, xi * dt)
    target = _packet(float(traj.final_displacement[0]))
    assert fs_distance(phi, target.state) < 1e-6


def test_project_recovers_pure_translation_generator():
    m = _packet(0.0)
    xi_true = 0.8
    # H = xi * p_hat as a dense matrix, built from the spectral derivative
    n = GRID.n
    f = np.fft.fft(np.eye(n), axis=0)
    p_op = np.fft.ifft((GRID.hbar * GRID.wavenumbers)[:, None] * f, axis=0)
    h = xi_true * p_op
    h = 0.5 * (h + np.conj(h.T))
    xi = project_onto_translations(h, m)
    assert xi[0] == pytest.approx(xi_true, abs=1e-6)


def test_project_goe_is_exactly_zero():
    m = _packet(0.0)
    rng = split_rng(15)
    hs = goe_entries(GRID.n, 1.0, rng, size=50)
    xi = project_onto_translations_batch(hs, m)
    assert np.max(np.abs(xi)) == 0.0


def test_project_gue_statistics():
    m = _packet(0.0)
    rng = split_rng(16)
    v, t = 1.0, 20_000
    hs = gue_entries(GRID.n, v, rng, size=t)
    comps = complex_translation_components(hs, m)[:, 0]
    xi = comps.real
    expected_var = 2.0 * SIGMA**2 * v**2  # (2 sigma)^2 * v^2 / 2
    assert abs(xi.mean()) < 3.0 * math.sqrt(expected_var / t)
    assert np.var(xi) == pytest.approx(expected_var, rel=0.05)
    # isotropy across the real/imaginary channel pair
    assert np.var(comps.imag) == pytest.approx(np.var(xi), rel=0.05)
    rho = np.corrcoef(comps.real, comps.imag)[0, 1]
    assert abs(rho) < 3.0 / math.sqrt(t)


def test_drift_pure_gradient_monotone_capture():
    target = _packet(1.5)
    phi0 = _packet(0.0).state
    cfg = WalkConfig(dim=GRID.n, steps=200, dt=0.1, ensemble=None, seed=20)
    res = walk_with_drift(phi0, [target], kappa=2.0, cfg=cfg, eps=0.05)
    assert res.outcome == 0
    theta = res.trajectory.extras["target_theta"][:, 0]
    assert np.all(np.diff(theta) < 1e-12)


def test_drift_zero_rate_reports_none():
    target = _packet(1.5)
    phi0 = _packet(0.0).state
    spec = EnsembleSpec(GUE, GRID.n, scale=1.0)
    cfg = WalkConfig(dim=GRID.n, steps=50, dt=0.02, ensemble=spec, stepper=FIRST_ORDER, seed=21)
    res = walk_with_drift(phi0, [target], kappa=0.0, cfg=cfg, eps=0.02)
    assert res.outcome is None


def test_drift_rejects_overlapping_targets():
    t1, t2 = _packet(1.0), _packet(1.1)
    cfg = WalkConfig(dim=GRID.n, steps=10, dt=0.1, ensemble=None)
    with pytest.raises(ValueError, match="overlap"):
        walk_with_drift(_packet(0.0).state, [t1, t2], 1.0, cfg, eps=0.5)


def test_drift_nearer_target_captures_at_least_as_often():
    t_near, t_far = _packet(1.2), _packet(-1.6)
    phi0 = _packet(0.0).state
    spec = EnsembleSpec(GUE, GRID.n, scale=1.0)
    rng = split_rng(22)
    wins = [0, 0]
    for _ in range(500):
        cfg = WalkConfig(
            dim=GRID.n, steps=150, dt=0.02, ensemble=spec, stepper=FIRST_ORDER
        )
        res = walk_with_drift(phi0, [t_near, t_far], kappa=7.5, cfg=cfg, eps=0.25, rng=rng)
        if res.outcome is not None:
            wins[res.outcome] += 1
    assert wins[0] + wins[1] > 300
    assert wins[0] >= wins[1]
