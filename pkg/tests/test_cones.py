import itertools
import math

import numpy as np
import pytest

from thermocone.cones import (
    EQUIVALENT,
    FUTURE,
    INCOMPARABLE,
    PAST,
    classify,
    closed_form_volumes_d3,
    cone_volumes,
    future_extreme_points,
    monte_carlo_volumes,
    project_to_simplex,
    sample_schmidt_spectrum,
    sample_simplex,
    tangent_membership,
    tangent_vectors_thermal,
    tangent_vectors_zero_beta,
)
from thermocone.simplex import (
    GibbsContext,
    curve_from_sorted,
    sharp_state,
    thermo_curve,
    thermomajorises,
    trivial_context,
    uniform_state,
)
from thermocone.memtp import two_level_thermalise

from conftest import random_state


def test_future_extremes_beta0_are_permutations():
    ctx = trivial_context(3)
    p = np.array([0.7, 0.2, 0.1])
    extremes = future_extreme_points(p, ctx)
    expected = {tuple(np.round(np.array(perm), 12)) for perm in itertools.permutations(p)}
    got = {tuple(np.round(e, 12)) for e in extremes}
    assert got == expected


def test_future_extremes_gamma_single_point(ctx321):
    extremes = future_extreme_points(ctx321.gamma, ctx321)
    assert len(extremes) == 1
    assert np.allclose(extremes[0], ctx321.gamma)


def test_future_extremes_identity_chamber_returns_p(ctx321):
    p = np.array([0.7, 0.2, 0.1])
    extremes = future_extreme_points(p, ctx321)
    assert any(np.allclose(e, p, atol=1e-12) for e in extremes)
    for e in extremes:
        assert thermomajorises(p, e, ctx321)


def test_future_extremes_qubit_beta_swap():
    beta, gap, pop = 0.7, 1.3, 0.85
    ctx = GibbsContext.build([0.0, gap], beta)
    p = np.array([pop, 1 - pop])
    extremes = future_extreme_points(p, ctx)
    x = math.exp(-beta * gap)
    expected = np.array([1 - pop * x, pop * x])
    assert any(np.allclose(e, expected, atol=1e-12) for e in extremes)
    assert any(np.allclose(e, p, atol=1e-12) for e in extremes)
    assert len(extremes) == 2


def test_tangent_vectors_zero_beta_golden():
    t = tangent_vectors_zero_beta([0.7, 0.2, 0.1])
    assert np.allclose(t[0], [0.7, 0.7, -0.4], atol=1e-15)
    assert np.allclose(t[1], [0.7, 0.2, 0.1], atol=1e-15)
    assert np.allclose(t[2], [0.8, 0.1, 0.1], atol=1e-15)


def test_tangent_vectors_uniform_collapse():
    for t in tangent_vectors_zero_beta(uniform_state(4)):
        assert np.allclose(t, uniform_state(4))


def test_tangent_curves_touch_at_their_elbow():
    rng = np.random.default_rng(4)
    d = 4
    p = np.sort(random_state(rng, d))[::-1]
    curve_p = curve_from_sorted(p, np.full(d, 1 / d))
    for n, t in enumerate(tangent_vectors_zero_beta(p), start=1):
        curve_t = curve_from_sorted(t, np.full(d, 1 / d))
        assert curve_t.value(n / d) == pytest.approx(curve_p.value(n / d), abs=1e-12)
        for k in range(1, d + 1):
            assert curve_t.value(k / d) >= curve_p.value(k / d) - 1e-12


def test_tangent_vectors_thermal_beta0_limit():
    ctx = trivial_context(4)
    rng = np.random.default_rng(9)
    p = np.sort(random_state(rng, 4))[::-1]
    zero = tangent_vectors_zero_beta(p)
    thermal = tangent_vectors_thermal(p, ctx, (0, 1, 2, 3))
    for a, b in zip(zero, thermal):
        assert np.allclose(a, b, atol=1e-12)


def test_tangent_vectors_thermal_non_full_rank(ctx321):
    p = np.array([0.6, 0.4, 0.0])
    for chamber in itertools.permutations(range(3)):
        t_last = tangent_vectors_thermal(p, ctx321, chamber)[-1]
        assert np.allclose(t_last, [1.0, 0.0, 0.0], atol=1e-12)


def test_tangent_vectors_thermal_tangency():
    ctx = GibbsContext.build([0.0, 2.0, 3.0], 0.5)
    p = np.array([0.7, 0.2, 0.1])
    curve_p = thermo_curve(p, ctx)
    from thermocone.simplex import beta_order
    ob = beta_order(p, ctx)
    own_chamber = ob.order
    elbows_x = np.cumsum(ctx.gamma[list(own_chamber)])
    slopes = ob.sorted / ctx.gamma[list(own_chamber)]
    elbows_y = np.cumsum(ob.sorted)
    # in the state's own chamber the tangent curve touches f_p at elbow n
    widths_own = ctx.gamma[list(own_chamber)]
    for n, t in enumerate(tangent_vectors_thermal(p, ctx, own_chamber), start=1):
        curve_t = curve_from_sorted(t, widths_own)
        x_n = min(elbows_x[n - 1], 1.0)
        assert curve_t.value(x_n) == pytest.approx(curve_p.value(x_n), abs=1e-10)
        grid = np.linspace(0, 1, 101)
        assert np.all(curve_t.value(grid) >= curve_p.value(grid) - 1e-10)
    # in every chamber the middle elbows of t^(n, pi) lie on the tangent line
    for chamber in itertools.permutations(range(3)):
        widths = ctx.gamma[list(chamber)]
        for n, t in enumerate(tangent_vectors_thermal(p, ctx, chamber), start=1):
            def line(x):
                return elbows_y[n - 1] + slopes[n - 1] * (x - elbows_x[n - 1])
            curve_t = curve_from_sorted(t, widths)
            for k in range(1, len(t)):  # all elbows except the final (1, 1)
                assert curve_t.ys[k] == pytest.approx(line(curve_t.xs[k]), abs=1e-10)


def test_project_to_simplex_cases():
    assert np.allclose(project_to_simplex([0.7, 0.7, -0.4]), [0.7, 0.3, 0.0])
    assert np.allclose(project_to_simplex([1.2, -0.1, -0.1]), [1.0, 0.0, 0.0])
    valid = np.array([0.5, 0.3, 0.2])
    assert np.allclose(project_to_simplex(valid), valid)
    # idempotence and validity on tangent vectors of random states
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = np.sort(random_state(rng, 5))[::-1]
        for t in tangent_vectors_zero_beta(p):
            once = project_to_simplex(t)
            assert np.min(once) >= -1e-12
            assert once.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(project_to_simplex(once), once, atol=1e-12)


def test_classify_golden(ctx321):
    p = np.array([0.7, 0.2, 0.1])
    assert classify(ctx321.gamma, p, ctx321) == FUTURE
    assert classify(sharp_state(3, 2), p, ctx321) == PAST
    assert classify(p, p, ctx321) == EQUIVALENT
    assert classify(np.array([0.4, 0.55, 0.05]), p, ctx321) == INCOMPARABLE


def test_classify_duality(ctx321):
    rng = np.random.default_rng(12)
    for _ in range(1000):
        p, q = random_state(rng, 3), random_state(rng, 3)
        c1 = classify(q, p, ctx321)
        c2 = classify(p, q, ctx321)
        if c1 == FUTURE:
            assert c2 == PAST
        elif c1 == PAST:
            assert c2 == FUTURE
        else:
            assert c2 == c1


def test_incomparable_iff_tangent_membership(ctx321):
    rng = np.random.default_rng(21)
    checked = 0
    for _ in range(60):
        p, q = random_state(rng, 3), random_state(rng, 3)
        label = classify(q, p, ctx321)
        if label == INCOMPARABLE:
            assert tangent_membership(q, p, ctx321)
            checked += 1
        elif label == PAST:
            assert not tangent_membership(q, p, ctx321)
    assert checked > 5


def test_past_cone_convex_within_chamber_beta0():
    ctx = trivial_context(3)
    rng = np.random.default_rng(31)
    p = np.sort(random_state(rng, 3))[::-1]
    trials = 0
    while trials < 1000:
        a = np.sort(random_state(rng, 3))[::-1]
        b = np.sort(random_state(rng, 3))[::-1]
        if classify(a, p, ctx) == PAST and classify(b, p, ctx) == PAST:
            mid = 0.5 * (a + b)
            assert classify(mid, p, ctx) in (PAST, EQUIVALENT)
            trials += 1


def test_closed_form_volumes_d3_golden():
    sharp = closed_form_volumes_d3([1.0, 0.0, 0.0])
    assert sharp.as_tuple() == pytest.approx((1.0, 0.0, 0.0), abs=1e-14)
    flat = closed_form_volumes_d3(uniform_state(3))
    assert flat.as_tuple() == pytest.approx((0.0, 0.0, 1.0), abs=1e-14)
    v = closed_form_volumes_d3([0.7, 0.2, 0.1])
    assert v.future == pytest.approx(0.46, abs=1e-12)
    assert v.future + v.incomparable + v.past == pytest.approx(1.0, abs=1e-12)


def test_monte_carlo_matches_closed_form_d3():
    ctx = trivial_context(3)
    rng = np.random.default_rng(8)
    for trial in range(5):
        p = random_state(rng, 3)
        exact = closed_form_volumes_d3(p)
        mc = monte_carlo_volumes(p, ctx, n_samples=200_000, seed=trial)
        for a, b in zip(mc.as_tuple(), exact.as_tuple()):
            assert abs(a - b) <= 4 * max(mc.std_error, 1e-4)


def test_monte_carlo_deterministic_and_thread_invariant(ctx321):
    p = np.array([0.7, 0.2, 0.1])
    v1 = monte_carlo_volumes(p, ctx321, n_samples=300_000, seed=5, threads=1, chunk=100_000)
    v2 = monte_carlo_volumes(p, ctx321, n_samples=300_000, seed=5, threads=4, chunk=100_000)
    assert v1.as_tuple() == v2.as_tuple()


def test_volumes_sum_to_one(ctx321):
    rng = np.random.default_rng(3)
    p = random_state(rng, 3)
    v = monte_carlo_volumes(p, ctx321, n_samples=100_000, seed=2)
    assert v.future + v.incomparable + v.past == pytest.approx(1.0, abs=1e-12)


def test_monotone_along_chain(ctx321):
    rng = np.random.default_rng(44)
    p = np.array([0.8, 0.15, 0.05])
    q = two_level_thermalise(p, 0, 1, 0.5, ctx321.gamma)
    r = two_level_thermalise(q, 1, 2, 0.7, ctx321.gamma)
    vols = [monte_carlo_volumes(s, ctx321, n_samples=100_000, seed=9) for s in (p, q, r)]
    sig = 3 * max(v.std_error for v in vols)
    assert vols[0].future >= vols[1].future - sig >= vols[2].future - 2 * sig
    assert vols[0].past <= vols[1].past + sig <= vols[2].past + 2 * sig


def test_non_full_rank_past_volume_zero(ctx321):
    p = np.array([0.75, 0.25, 0.0])
    v = monte_carlo_volumes(p, ctx321, n_samples=100_000, seed=13)
    assert v.past <= 3 * v.std_error  # volume-zero past region
    assert classify(sharp_state(3, 2), p, ctx321) == PAST  # yet non-empty


def test_cone_volumes_dispatch(ctx321, ctx3_beta0):
    with pytest.raises(ValueError):
        cone_volumes([0.5, 0.3, 0.2], ctx321, method="closed_form_d3_beta0")
    v = cone_volumes([0.5, 0.3, 0.2], ctx3_beta0, method="closed_form_d3_beta0")
    assert v.future + v.incomparable + v.past == pytest.approx(1.0)
    with pytest.raises(ValueError):
        cone_volumes([0.5, 0.3, 0.2], ctx321, method="bogus")


def test_sample_simplex_uniform_moments():
    samples = sample_simplex(3, 200_000, seed=1)
    assert samples.shape == (200_000, 3)
    assert np.allclose(samples.sum(axis=1), 1.0)
    # uniform Dirichlet(1,1,1): mean 1/3, variance 1/18
    assert np.allclose(samples.mean(axis=0), 1 / 3, atol=5e-3)
    assert np.allclose(samples.var(axis=0), 1 / 18, atol=5e-3)


def test_schmidt_spectrum_trivial_and_mean():
    spectra = sample_schmidt_spectrum(1, 4, 10, seed=3)
    for s in spectra:
        assert np.allclose(s, [1.0])
    spectra = np.array(sample_schmidt_spectrum(2, 2, 60_000, seed=7))
    # quadrature oracle for P_{2,2}: density ~ (2 l - 1)^2 gives E[l_max] = 7/8
    mean_max = spectra[:, 0].mean()
    assert mean_max == pytest.approx(7 / 8, abs=3e-3)


def test_schmidt_spectrum_centre_repulsion():
    spectra = np.array(sample_schmidt_spectrum(3, 3, 40_000, seed=11))
    centre = np.full(3, 1 / 3)
    dist = np.linalg.norm(spectra - centre, axis=1)
    near_centre = float(np.mean(dist < 0.05))
    ball = math.pi * 0.05**2  # area of the centre disc in the simplex plane
    # compare against the same-size disc around the empirical mode
    mode_guess = np.median(spectra, axis=0)
    near_mode = float(np.mean(np.linalg.norm(spectra - mode_guess, axis=1) < 0.05))
    assert near_centre < 0.2 * max(near_mode, 1e-9)


def test_dimension_caps():
    with pytest.raises(ValueError):
        future_extreme_points(uniform_state(9), trivial_context(9))
    with pytest.raises(ValueError):
        sample_schmidt_spectrum(8, 16, 1)
