import itertools

import numpy as np
import pytest

from thermocone.approx import (
    approx_majorise_optimal,
    catalyses,
    fidelity,
    probabilistic_aux,
    renyi_entropy,
    tensor,
    trumping_witness,
    vidal_probability,
)
from thermocone.simplex import majorises, trivial_context

from conftest import random_state


PAPER_P = np.array([0.7, 0.2, 0.1])
PAPER_Q = np.array([0.75, 0.13, 0.12])


def test_vjn_reproduces_paper_box_vector():
    res = approx_majorise_optimal(PAPER_P, PAPER_Q)
    # printed to two decimals in the worked example: (0.75, 0.17, 0.08)
    assert np.allclose(res.optimal, [0.75, 1 / 6, 1 / 12], atol=5e-13)
    assert np.allclose(np.round(res.optimal, 2), [0.75, 0.17, 0.08])
    assert majorises(res.optimal, PAPER_Q)
    assert res.ratios == tuple(sorted(res.ratios))  # strictly increasing blocks
    assert all(r2 > r1 for r1, r2 in zip(res.ratios, res.ratios[1:]))


def test_vjn_fidelity_consistent_with_definition():
    res = approx_majorise_optimal(PAPER_P, PAPER_Q)
    assert res.fidelity == pytest.approx(fidelity(PAPER_P, res.optimal), abs=1e-14)
    # block form of the optimal value
    assert res.fidelity == pytest.approx(0.9968626, abs=1e-6)


def test_vjn_returns_p_when_already_majorising():
    p = np.array([0.6, 0.3, 0.1])
    q = np.array([0.5, 0.3, 0.2])
    res = approx_majorise_optimal(p, q)
    assert np.allclose(res.optimal, p)
    assert res.fidelity == pytest.approx(1.0)


def test_vjn_beats_grid_search_oracle():
    rng = np.random.default_rng(42)
    p = np.sort(random_state(rng, 4))[::-1]
    q = np.sort(random_state(rng, 4))[::-1]
    res = approx_majorise_optimal(p, q)
    steps = 40  # 2.5e-2 grid over the sorted simplex
    best = 0.0
    for i, j, k in itertools.product(range(steps + 1), repeat=3):
        if i + j + k > steps:
            continue
        cand = np.sort(np.array([i, j, k, steps - i - j - k]) / steps)[::-1]
        if majorises(cand, q):
            best = max(best, fidelity(p, cand))
    assert res.fidelity >= best - 1e-3


def test_vjn_fidelity_dominates_random_majorisers():
    # sample the sorted past cone of q as Dirichlet mixtures of its extreme
    # points (projected tangent vectors and the sharp state)
    from thermocone.cones import project_to_simplex, tangent_vectors_zero_beta

    rng = np.random.default_rng(7)
    p = np.sort(random_state(rng, 4))[::-1]
    q = np.sort(random_state(rng, 4))[::-1]
    res = approx_majorise_optimal(p, q)
    extremes = [project_to_simplex(t) for t in tangent_vectors_zero_beta(q)]
    extremes.append(np.array([1.0, 0.0, 0.0, 0.0]))
    extremes = np.array(extremes)
    weights = rng.dirichlet(np.ones(len(extremes)), size=10_000)
    for cand in weights @ extremes:
        assert majorises(cand, q, tol=1e-10)
        assert res.fidelity >= fidelity(p, cand) - 1e-12


def test_vidal_probability_cases():
    assert vidal_probability(PAPER_P, PAPER_P) == 1.0
    assert vidal_probability([0.6, 0.4], [0.5, 0.5]) == pytest.approx(0.8)
    p = [0.5, 0.25, 0.25, 0.0]
    q = [0.4, 0.4, 0.1, 0.1]
    assert vidal_probability(p, q) == 0.0


def test_vidal_probability_one_iff_reverse_majorisation():
    rng = np.random.default_rng(11)
    for _ in range(200):
        p, q = random_state(rng, 4), random_state(rng, 4)
        assert (vidal_probability(p, q) >= 1.0 - 1e-12) == majorises(q, p)


def test_probabilistic_aux_trivial_and_formula():
    p = np.array([0.6, 0.4])
    tilde, hat = probabilistic_aux(p, 1.0)
    assert np.allclose(tilde, p) and np.allclose(hat, p)
    tilde, hat = probabilistic_aux(p, 0.5)
    assert np.allclose(tilde, [0.8, 0.2])
    # raw hat = (0.2, 0.8) is unsorted; flattening averages the first two
    assert np.allclose(hat, [0.5, 0.5])
    with pytest.raises(ValueError):
        probabilistic_aux(p, 0.0)


def test_probabilistic_aux_outputs_valid_and_sorted():
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = random_state(rng, 5)
        prob = rng.uniform(0.05, 1.0)
        tilde, hat = probabilistic_aux(p, prob)
        for vec in (tilde, hat):
            assert vec.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(np.diff(vec) <= 1e-12)
            assert np.min(vec) >= -1e-12


def test_probabilistic_aux_past_criterion_equivalence():
    # q <= tilde(p) iff P <= (1 - Q_k) / (1 - P_k) for all k, both directions
    rng = np.random.default_rng(13)
    for _ in range(200):
        p = np.sort(random_state(rng, 4))[::-1]
        q = np.sort(random_state(rng, 4))[::-1]
        prob = rng.uniform(0.05, 1.0)
        tilde, _ = probabilistic_aux(p, prob)
        heads_p = np.cumsum(p)[:-1]
        heads_q = np.cumsum(q)[:-1]
        crit = bool(np.all(prob * (1 - heads_p) <= (1 - heads_q) + 1e-12))
        assert majorises(tilde, q, tol=1e-10) == crit


def test_catalytic_majorisation_paper_box():
    p = np.array([0.5, 0.25, 0.25, 0.0])
    q = np.array([0.4, 0.4, 0.1, 0.1])
    c = np.array([0.6, 0.4])
    assert not majorises(p, q) and not majorises(q, p)
    joint_p = tensor(p, c)
    joint_q = tensor(q, c)
    # printed joint vectors are listed non-increasingly
    assert np.allclose(np.sort(joint_p)[::-1],
                       [0.30, 0.20, 0.15, 0.15, 0.10, 0.10, 0.0, 0.0], atol=1e-12)
    assert np.allclose(np.sort(joint_q)[::-1],
                       [0.24, 0.24, 0.16, 0.16, 0.06, 0.06, 0.04, 0.04], atol=1e-12)
    assert catalyses(p, q, c)
    assert not catalyses(p, q, np.array([0.5, 0.5]))  # uniform never catalyses
    assert catalyses(p, q, np.array([1.0])) == majorises(p, q)


def test_no_catalyst_for_d3_incomparable_pairs():
    # property (P3): bounded search over two-level catalysts finds nothing
    rng = np.random.default_rng(17)
    pairs = 0
    while pairs < 5:
        p = np.sort(random_state(rng, 3))[::-1]
        q = np.sort(random_state(rng, 3))[::-1]
        if majorises(p, q) or majorises(q, p):
            continue
        pairs += 1
        for c1 in np.linspace(0.5, 0.99, 50):
            assert not catalyses(p, q, np.array([c1, 1 - c1]))


def test_trumping_witness_cases():
    p = np.array([0.5, 0.25, 0.25, 0.0])
    q = np.array([0.4, 0.4, 0.1, 0.1])
    verdict = trumping_witness(p, q)
    assert verdict.passed
    assert verdict.inconclusive  # zero entry present
    same = trumping_witness(q, q)
    assert same.passed
    rng = np.random.default_rng(23)
    for _ in range(20):
        a = np.sort(random_state(rng, 4))[::-1]
        b = np.sort(random_state(rng, 4))[::-1]
        if majorises(a, b) and not majorises(b, a):
            v = trumping_witness(a, b)
            assert v.passed  # Schur concavity of every Renyi entropy
            back = trumping_witness(b, a)
            assert not back.passed


def test_renyi_limits():
    p = np.array([0.5, 0.3, 0.2])
    assert renyi_entropy(p, 1.0) == pytest.approx(float(-(p * np.log(p)).sum()))
    assert renyi_entropy(p, np.inf) == pytest.approx(-np.log(0.5))
    assert renyi_entropy(p, -np.inf) == pytest.approx(np.log(0.2))
    assert renyi_entropy(p, 0.0) == pytest.approx(np.mean(np.log(p)))
    # alpha -> 1 continuity
    assert renyi_entropy(p, 1.0 + 1e-9) == pytest.approx(renyi_entropy(p, 1.0), abs=1e-6)


def test_catalyses_finite_beta_consistency(ctx321):
    rng = np.random.default_rng(29)
    from thermocone.simplex import thermomajorises, GibbsContext
    for _ in range(20):
        p = random_state(rng, 3)
        q = random_state(rng, 3)
        c = np.array([1.0])
        joint_ctx = GibbsContext.build(np.asarray(ctx321.energies), ctx321.beta)
        assert catalyses(p, q, c, ctx321) == thermomajorises(p, q, joint_ctx)
