"""Acceptance suite: one test per criterion, at the stated tolerances.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
PASS lines. Every tolerance and sample count is pinned here; the suite is
deterministic for the seeds below.
"""

import json
import math
import time

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from statewalk.classical import (
    FREE,
    LINEAR,
    PotentialSpec,
    action_classical,
    action_quantum,
    newtonian_path,
    rigid_packet_path,
    split_step_evolve,
)
from statewalk.cli import main as cli_main
from statewalk.ensembles import (
    GOE,
    GUE,
    EnsembleSpec,
    conjugation_invariance_check,
    goe_entries,
    gue_entries,
    spacing_ratio_stat,
)
from statewalk.gaussian import (
    GaussianParams,
    Grid,
    boost_state,
    gaussian_state,
    grid_for_pair,
    induced_metric_ratio,
    overlap_closed_form,
    overlap_quadrature,
    realize_fs_distance,
    translate_state,
)
from statewalk.hilbert import (
    fs_distance,
    haar_unitary,
    horizontal_frame,
    normalize,
    random_state,
)
from statewalk.rng import split_rng
from statewalk.statstests import (
    born_identity_check,
    brownian_scaling_fit,
    gaussian_step_test,
    homogeneity_test,
    isotropy_test,
    isotropy_test_coords,
)
from statewalk.walk import (
    FIRST_ORDER,
    WalkConfig,
    batch_final_distances,
    complex_translation_components,
    constrained_final_displacements,
)

SEED = 20260810
ALPHA = 0.01


def _report(n, ok, msg, started, limit):
    elapsed = time.monotonic() - started
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {msg} [{elapsed:.1f}s]"
    print(line)
    assert ok, line
    assert elapsed < limit, f"criterion {n} exceeded runtime budget {limit}s ({elapsed:.1f}s)"


def test_criterion_01_overlap_identity():
    t0 = time.monotonic()
    rng = split_rng(SEED, 0)
    max_err = 0.0
    for _ in range(200):
        sa, sb = rng.uniform(0.4, 2.0, size=2)
        a, b = rng.uniform(-2.5, 2.5, size=2)
        p1, p2 = GaussianParams.at_rest((a,), sa), GaussianParams.at_rest((b,), sb)
        grid = grid_for_pair(p1, p2)
        quad = overlap_quadrature(gaussian_state(p1, grid), gaussian_state(p2, grid))
        max_err = max(max_err, abs(quad - overlap_closed_form(p1, p2)))

    sep_dev = 0.0
    for _ in range(100):
        a3, b3 = rng.uniform(-2, 2, size=3), rng.uniform(-2, 2, size=3)
        sa, sb = rng.uniform(0.5, 2.0, size=2)
        full = overlap_closed_form(
            GaussianParams.at_rest(a3, sa, 3), GaussianParams.at_rest(b3, sb, 3)
        )
        per_axis = np.prod([
            overlap_closed_form(
                GaussianParams.at_rest((a3[j],), sa), GaussianParams.at_rest((b3[j],), sb)
            )
            for j in range(3)
        ])
        sep_dev = max(sep_dev, abs(full - per_axis) / max(full, 1e-300))

    ok = max_err < 1e-8 and sep_dev < 1e-14
    _report(1, ok, f"overlap identity max err {max_err:.2e}, separability {sep_dev:.2e}",
            t0, limit=10.0)


def test_criterion_02_equal_width_spot_and_roundtrip():
    t0 = time.monotonic()
    p1, p2 = GaussianParams.at_rest((0.0,), 1.0), GaussianParams.at_rest((2.0,), 1.0)
    grid = grid_for_pair(p1, p2)
    spot = overlap_quadrature(gaussian_state(p1, grid), gaussian_state(p2, grid))
    spot_err = abs(spot - math.exp(-1.0))

    rng = split_rng(SEED, 1)
    worst = 0.0
    for _ in range(100):
        theta = rng.uniform(0.02, 1.55)
        sigma = rng.uniform(0.5, 2.0)
        q1, q2 = realize_fs_distance(theta, sigma)
        g = grid_for_pair(q1, q2)
        got = fs_distance(gaussian_state(q1, g).state, gaussian_state(q2, g).state)
        worst = max(worst, abs(got - theta))

    ok = spot_err < 1e-8 and worst < 1e-8
    _report(2, ok, f"cos^2 spot err {spot_err:.2e}, roundtrip max {worst:.2e}", t0, limit=5.0)


def test_criterion_03_induced_metric_constant():
    t0 = time.monotonic()
    worst_abs, worst_trunc = 0.0, 0.0
    for sigma in (0.5, 1.0, 2.0):
        n = 2048
        grid = Grid(n=n, extent=32.0 * sigma)
        r = induced_metric_ratio(sigma, sigma / 100.0, grid)
        worst_abs = max(worst_abs, abs(r - 1.0 / (2.0 * sigma)))
        r2 = induced_metric_ratio(sigma, sigma / 100.0, Grid(n=2 * n, extent=32.0 * sigma))
        worst_trunc = max(worst_trunc, abs(r - r2))
    ok = worst_abs < 1e-4 and worst_trunc < 1e-6
    _report(3, ok, f"metric dev {worst_abs:.2e}, truncation change {worst_trunc:.2e}",
            t0, limit=5.0)


def test_criterion_04_isotropy_and_homogeneity():
    t0 = time.monotonic()
    n, v, dt = 64, 1.0, 0.02  # v dt / hbar = 0.02
    spec = EnsembleSpec(GUE, n, v, SEED)
    rng = split_rng(SEED, 2)
    phi0 = random_state(n, rng)
    from statewalk.walk import first_order_step_samples

    steps = first_order_step_samples(phi0, spec, 10_000, dt, rng=rng)
    frame = horizontal_frame(phi0)
    rep = isotropy_test(steps, frame, alpha=ALPHA, expected_var=(v * dt) ** 2, seed=SEED)
    var_ok = abs(rep.details["variance_ratio"] - 1.0) < 0.05

    coords = split_rng(SEED, 3).normal(size=(4000, 30))
    coords[:, 5] *= math.sqrt(2.0)
    rep_contrast = isotropy_test_coords(coords, alpha=ALPHA, contrast=True)

    rng_h = split_rng(SEED, 4)
    wc = WalkConfig(dim=n, steps=25, dt=dt, ensemble=spec, stepper=FIRST_ORDER, seed=SEED)
    da = batch_final_distances(random_state(n, rng_h), wc, 1000, rng_h)
    db = batch_final_distances(normalize(np.eye(n)[0]), wc, 1000, rng_h)
    rep_hom = homogeneity_test(da, db, alpha=ALPHA, configs=(wc, wc), seed=SEED)

    wc_fast = WalkConfig(dim=n, steps=25, dt=dt, ensemble=EnsembleSpec(GUE, n, 2 * v, SEED),
                         stepper=FIRST_ORDER, seed=SEED)
    d_fast = batch_final_distances(random_state(n, rng_h), wc_fast, 300, rng_h)
    rep_hom_contrast = homogeneity_test(da[:300], d_fast, alpha=ALPHA, contrast=True)

    ok = (rep.passed and var_ok and rep_contrast.passed
          and rep_hom.passed and rep_hom_contrast.passed)
    _report(4, ok,
            f"isotropy p {rep.p_value:.3f}, var ratio {rep.details['variance_ratio']:.3f}, "
            f"homogeneity p {rep_hom.p_value:.3f}, contrasts detected",
            t0, limit=120.0)


def test_criterion_05_constrained_walk():
    t0 = time.monotonic()
    steps, dt, v0 = 1000, 0.01, 1.0
    rng = split_rng(SEED, 5)
    dn = constrained_final_displacements(1, steps, dt, v0, 10_000, rng)
    rep_ks = gaussian_step_test(dn, steps, dt, v0, alpha=ALPHA, seed=SEED)
    var_ok = abs(rep_ks.details["sample_variance"][0] / (steps * dt**2 * v0**2) - 1.0) < 0.10

    data = {
        m: constrained_final_displacements(1, m, dt, v0, 4000, rng)[:, 0]
        for m in (250, 500, 1000, 2000)
    }
    rep_fit = brownian_scaling_fit(data, dt, alpha=ALPHA, seed=SEED)

    ok = rep_ks.passed and var_ok and rep_fit.passed and rep_fit.details["r_squared"] > 0.99
    _report(5, ok,
            f"KS p {rep_ks.p_value:.3f}, Var ratio ok, R^2 {rep_fit.details['r_squared']:.5f}",
            t0, limit=120.0)


def test_criterion_06_translation_consistency():
    t0 = time.monotonic()
    grid = Grid(n=64, extent=16.0)
    sigma, v = 1.0, 1.0
    m = gaussian_state(GaussianParams.at_rest((0.0,), sigma), grid)
    rng = split_rng(SEED, 6)
    draws = 10_000
    comps = np.empty(draws, dtype=np.complex128)
    done = 0
    while done < draws:
        b = min(500, draws - done)
        comps[done:done + b] = complex_translation_components(
            gue_entries(grid.n, v, rng, size=b), m)[:, 0]
        done += b
    xi = comps.real
    expected_var = 2.0 * sigma**2 * v**2
    mean_ok = abs(xi.mean()) < 3.0 * math.sqrt(expected_var / draws)
    var_ok = abs(np.var(xi) / expected_var - 1.0) < 0.05
    iso_ok = abs(np.var(comps.imag) / np.var(xi) - 1.0) < 0.05
    corr_ok = abs(np.corrcoef(comps.real, comps.imag)[0, 1]) < 3.0 / math.sqrt(draws)

    dt, group = 0.01, 20
    groups = draws // group
    dn_gue = xi[: groups * group].reshape(groups, group).sum(axis=1) * dt
    dn_model = constrained_final_displacements(
        1, group, dt, float(np.std(xi)), groups, split_rng(SEED, 7))[:, 0]
    ks_p = scipy.stats.ks_2samp(dn_gue, dn_model).pvalue

    goe_xi = complex_translation_components(
        goe_entries(grid.n, v, split_rng(SEED, 8), size=500), m).real
    goe_ok = np.max(np.abs(goe_xi)) <= 1e-12

    ok = mean_ok and var_ok and iso_ok and corr_ok and ks_p > 0.01 and goe_ok
    _report(6, ok,
            f"var ratio {np.var(xi) / expected_var:.3f}, KS p {ks_p:.3f}, "
            f"GOE max |xi| {np.max(np.abs(goe_xi)):.1e}",
            t0, limit=120.0)


def test_criterion_07_born_identity():
    t0 = time.monotonic()
    steps, dt, v0 = 1000, 0.01, 1.0
    s = math.sqrt(steps) * dt * v0
    rng = split_rng(SEED, 9)
    dn = constrained_final_displacements(1, steps, dt, v0, 100_000, rng)[:, 0]
    rep = born_identity_check(dn, s, alpha=ALPHA, seed=SEED)
    ok = (rep.passed
          and rep.details["analytic_max_deviation"] < 1e-4
          and rep.details["mc_max_relative_deviation"] < 0.05)
    _report(7, ok,
            f"analytic dev {rep.details['analytic_max_deviation']:.2e}, "
            f"MC dev {rep.details['mc_max_relative_deviation']:.3f}",
            t0, limit=180.0)


def test_criterion_08_newtonian_limit():
    t0 = time.monotonic()
    force, mass = 2.0, 1.0
    pot = PotentialSpec(LINEAR, force=force)
    grid = Grid(n=1024, extent=32.0)
    packet = gaussian_state(GaussianParams.at_rest((0.0,), 1.0), grid)
    path = split_step_evolve(packet, pot, mass, 5e-4, 2000)
    a_ref, p_ref = newtonian_path(pot, mass, 0.0, 0.0, path.times)
    resid = np.max(np.abs(path.x_mean - a_ref)) / np.max(np.abs(a_ref))

    sigma = 0.1
    agrid = Grid(n=512, extent=8.0, center=0.5)
    times = np.linspace(0.0, 1.0, 1601)
    smooth = lambda u: 3 * u**2 - 2 * u**3
    paths = [
        (lambda u: smooth(u), lambda u: 0.8 * smooth(u)),
        (lambda u: smooth(u) ** 2, lambda u: 0.8 * smooth(u) ** 3),
        (
            lambda u: smooth(u) + 0.25 * math.sin(math.pi * smooth(u)),
            lambda u: 0.8 * smooth(u) - 0.4 * math.sin(math.pi * smooth(u)) ** 2,
        ),
    ]
    gaps = []
    for a_fn, p_fn in paths:
        states = rigid_packet_path(agrid, sigma, times, a_fn, p_fn)
        sq = action_quantum(states, times[1] - times[0], agrid, pot, mass)
        sc = action_classical(times, np.array([a_fn(u) for u in times]),
                              np.array([p_fn(u) for u in times]), pot, mass)
        gaps.append(sq - sc)
    spread = max(gaps) - min(gaps)

    dt, steps = 2.5e-4, 4000
    lin = split_step_evolve(packet, pot, mass, dt, steps)
    free = split_step_evolve(packet, PotentialSpec(FREE), mass, dt, steps)
    T = dt * steps
    ref = boost_state(translate_state(free.states[-1], grid, 0.5 * force * T**2 / mass),
                      grid, force * T)
    frame_dev = fs_distance(lin.states[-1], ref)

    ok = resid < 1e-6 and spread < 1e-4 and frame_dev < 1e-6
    _report(8, ok,
            f"parabola resid {resid:.2e}, action spread {spread:.2e}, "
            f"frame dev {frame_dev:.2e}",
            t0, limit=120.0)


def test_criterion_09_ensemble_sanity():
    t0 = time.monotonic()
    rng = split_rng(SEED, 10)
    n, samples = 200, 500
    gue_mean = spacing_ratio_stat(
        [np.linalg.eigvalsh(h) for h in gue_entries(n, 1.0, rng, size=samples)]
    )
    goe_mean = spacing_ratio_stat(
        [np.linalg.eigvalsh(h) for h in goe_entries(n, 1.0, rng, size=samples)]
    )
    poisson_mean = spacing_ratio_stat(
        [np.sort(rng.standard_normal(n)) for _ in range(samples)]
    )
    spacing_ok = (abs(gue_mean - 0.600) < 0.01 and abs(goe_mean - 0.536) < 0.01
                  and abs(poisson_mean - 0.386) < 0.01)

    u = haar_unitary(16, rng)
    rep_gue = conjugation_invariance_check(
        EnsembleSpec(GUE, 16, 1.0, SEED), u, 2000, rng, alpha=ALPHA, seed=SEED)
    rep_goe = conjugation_invariance_check(
        EnsembleSpec(GOE, 16, 1.0, SEED), u, 2000, rng, alpha=ALPHA, seed=SEED)

    ok = spacing_ok and rep_gue.passed and not rep_goe.passed
    _report(9, ok,
            f"ratios {gue_mean:.3f}/{goe_mean:.3f}/{poisson_mean:.3f}, "
            f"GUE invariant p {rep_gue.p_value:.3f}, GOE rejected",
            t0, limit=180.0)


def test_criterion_10_determinism_and_exit_codes(tmp_path):
    t0 = time.monotonic()
    small = {
        "seed": SEED,
        "spectral": {"dim": 200, "samples": 150},
        "walk": {"trials": 30, "steps": 30},
        "constrained": {"trials": 2000, "trajectory_trials": 20},
        "classical": {"steps": 500, "dt": 0.001},
        "tests": {
            "isotropy_samples": 2000,
            "homogeneity_trials": 200,
            "translation_draws": 2000,
            "born_samples": 30000,
            "equal_distance_trials": 600,
        },
    }
    cfg_path = tmp_path / "small.json"
    cfg_path.write_text(json.dumps(small))

    sums = []
    for name in ("one", "two"):
        out = tmp_path / name
        code = cli_main(["verify-all", "--config", str(cfg_path),
                         "--out", str(out), "--quiet"])
        assert code == 0, f"verify-all small config exited {code}"
        sums.append(json.loads((out / "manifest.json").read_text())["outputs"])
    deterministic = sums[0] == sums[1] and len(sums[0]) >= 8

    bad = tmp_path / "bad.json"
    bad.write_text('{"unknown_key": 1}')
    code2 = cli_main(["verify-all", "--config", str(bad)])

    blocker = tmp_path / "blocked"
    blocker.write_text("not a directory")
    code1 = cli_main(["gaussian-overlap", "--out", str(blocker), "--quiet",
                      "--trials", "5"])

    strict = tmp_path / "strict.json"
    strict.write_text(json.dumps({
        "alpha": 0.999999,
        "constrained": {"trials": 1500, "steps": 100, "trajectory_trials": 2},
    }))
    code3 = cli_main(["constrained-walk", "--config", str(strict),
                      "--out", str(tmp_path / "strictrun"), "--quiet"])

    ok = deterministic and code2 == 2 and code1 == 1 and code3 == 3
    _report(10, ok,
            f"identical checksums over {len(sums[0])} outputs; "
            f"exit codes 2/1/3 = {code2}/{code1}/{code3}",
            t0, limit=300.0)
