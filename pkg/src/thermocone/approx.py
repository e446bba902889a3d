"""Approximate, probabilistic and catalytic extensions of majorisation.

Covers the optimal-fidelity approximation of an unreachable target (the
Vidal-Jonathan-Nielsen block construction), Vidal's maximal conversion
probability, the auxiliary distributions entering probabilistic cones, and
exact catalytic majorisation checks with Renyi-entropy trumping evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .simplex import (
    GibbsContext,
    as_distribution,
    majorises,
    thermomajorises,
    trivial_context,
)


def fidelity(p, q) -> float:
    """Classical fidelity (squared Bhattacharyya coefficient) of two distributions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(np.sum(np.sqrt(np.clip(p, 0, None) * np.clip(q, 0, None))) ** 2)


@dataclass(frozen=True)
class ApproxResult:
    """Optimal distribution majorising the target, with its fidelity to ``p``.

    ``segments`` lists the index blocks [l_j, u_j) (0-based, half-open) on
    which the optimum rescales ``p`` by the factor ``ratios[j]``, in
    construction order from the tail of the distribution towards its head;
    the ratios are strictly increasing along that order.
    """

    optimal: np.ndarray = field(repr=False)
    fidelity: float
    segments: tuple
    ratios: tuple


def approx_majorise_optimal(p, q) -> ApproxResult:
    """Fidelity-optimal p~ majorising ``q``: argmax F(p, p~) s.t. p~ >= q.

    Inputs are sorted non-increasingly internally.  The optimum is built
    blockwise: working down from the tail, each block [l_j, l_{j-1}) rescales
    p by the minimal tail-sum ratio r_j = (Q-tail)/(P-tail), which makes the
    candidate saturate the majorisation constraint at the block boundaries.
    """
    p = np.sort(as_distribution(p))[::-1]
    q = np.sort(as_distribution(q))[::-1]
    if p.size != q.size:
        raise ValueError("dimension mismatch")
    d = p.size
    # tail sums E_k = sum_{i>=k} (0-based: tail[k] = sum of entries k..d-1)
    tail_p = np.concatenate((np.cumsum(p[::-1])[::-1], [0.0]))
    tail_q = np.concatenate((np.cumsum(q[::-1])[::-1], [0.0]))
    opt = np.empty(d)
    segments = []
    ratios = []
    upper = d  # exclusive block end, paper's l_{j-1} (1-based) == upper+1
    while upper > 0:
        dp = tail_p[:upper] - tail_p[upper]
        dq = tail_q[:upper] - tail_q[upper]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(dp > 0, dq / dp, np.inf)
        lower = int(np.argmin(r))  # smallest index among minimisers
        ratio = float(r[lower])
        opt[lower:upper] = ratio * p[lower:upper]
        segments.append((lower, upper))
        ratios.append(ratio)
        upper = lower
    return ApproxResult(opt, fidelity(p, opt), tuple(segments), tuple(ratios))


def vidal_probability(p, q) -> float:
    """Maximal conversion probability min_k of tail-sum ratios, clamped to [0,1].

    This is the entanglement-order criterion: the probability is 1 exactly
    when q majorises p.  A vanishing p-tail against a non-vanishing q-tail
    forces probability 0.
    """
    p = np.sort(as_distribution(p))[::-1]
    q = np.sort(as_distribution(q))[::-1]
    if p.size != q.size:
        raise ValueError("dimension mismatch")
    tail_p = np.cumsum(p[::-1])[::-1]
    tail_q = np.cumsum(q[::-1])[::-1]
    best = 1.0
    for tp, tq in zip(tail_p, tail_q):
        if tq <= 0.0:
            continue  # no constraint from an empty target tail
        best = min(best, tp / tq)
    return float(min(max(best, 0.0), 1.0))


def probabilistic_aux(p, prob: float):
    """Auxiliary distributions (p~, p^) of the probabilistic cones at level ``prob``.

    p~ rescales the sorted input by ``prob`` and dumps the slack on the top
    entry; p^ does the same with 1/prob, which can break the ordering: in
    that case the first n entries are averaged for the largest n with
    prob < P_n = (n-1) p_n - sum_{i<n} p_i + 1, restoring a proper Lorenz
    curve.  Both outputs are valid, non-increasing distributions.
    """
    if not (0.0 < prob <= 1.0):
        raise ValueError("transformation probability must lie in (0, 1]")
    p = np.sort(as_distribution(p))[::-1]
    d = p.size
    tilde = prob * p
    tilde[0] += 1.0 - prob
    hat = p / prob
    hat[0] += 1.0 - 1.0 / prob
    heads = np.cumsum(p)[:-1]
    n_star = 0
    for n in range(2, d + 1):
        crit = (n - 1) * p[n - 1] - (heads[n - 2] if n >= 2 else 0.0) + 1.0
        if prob < crit:
            n_star = n
    if n_star:
        hat[:n_star] = hat[:n_star].mean()
    return tilde, hat


def tensor(p, c) -> np.ndarray:
    """System-major tensor product: the first factor's index varies slowest."""
    p = np.asarray(p, dtype=float)
    c = np.asarray(c, dtype=float)
    return np.kron(p, c)


def catalyses(p, q, c, ctx: GibbsContext | None = None,
              catalyst_ctx: GibbsContext | None = None) -> bool:
    """True iff p (x) c thermomajorises q (x) c.

    The catalyst is degenerate (trivial Hamiltonian) unless ``catalyst_ctx``
    is supplied; at beta = 0 this is exact catalytic majorisation.
    """
    p = as_distribution(p)
    q = as_distribution(q)
    c = as_distribution(c)
    joint_p = tensor(p, c)
    joint_q = tensor(q, c)
    if ctx is None:
        return majorises(joint_p, joint_q)
    sys_e = np.asarray(ctx.energies)
    cat_e = np.zeros(c.size) if catalyst_ctx is None else np.asarray(catalyst_ctx.energies)
    joint_ctx = GibbsContext.build(np.add.outer(sys_e, cat_e).ravel(), ctx.beta)
    return thermomajorises(joint_p, joint_q, joint_ctx)


def renyi_entropy(p, alpha: float) -> float:
    """Renyi entropy H_alpha with sign convention valid for negative orders.

    Limits: alpha -> 1 Shannon, alpha -> +inf min-entropy, alpha -> -inf
    log of the smallest entry, alpha = 0 Burg entropy (mean log-probability).
    Non-positive orders diverge on distributions with zero entries.
    """
    p = np.asarray(p, dtype=float)
    if alpha == 1.0:
        mask = p > 0
        return float(-np.sum(p[mask] * np.log(p[mask])))
    if math.isinf(alpha):
        return float(-np.log(np.max(p))) if alpha > 0 else float(np.log(np.min(p)))
    if alpha == 0.0:
        if np.any(p <= 0):
            return float("-inf")
        return float(np.mean(np.log(p)))
    if alpha < 0 and np.any(p <= 0):
        return float("inf")
    mask = p > 0
    log_moment = logsumexp(alpha * np.log(p[mask]))
    return float(math.copysign(1.0, alpha) / (1.0 - alpha) * log_moment)


def default_alpha_grid() -> np.ndarray:
    """41 log-spaced orders in [2^-10, 2^10], their negatives, and the limits."""
    pos = np.logspace(-10, 10, 41, base=2.0)
    return np.concatenate((pos, -pos, [0.0, 1.0, np.inf, -np.inf]))


@dataclass(frozen=True)
class TrumpingVerdict:
    """Outcome of the necessary Renyi-entropy screen for trumping.

    ``passed`` means no sampled order violated H_alpha(p) <= H_alpha(q);
    that is necessary evidence only, never a proof that a catalyst exists.
    ``violated_alpha`` is the first violating order, if any;
    ``inconclusive`` flags vanishing entries, where the exact-catalysis
    equivalence is not specified.
    """

    passed: bool
    violated_alpha: float | None
    inconclusive: bool


def trumping_witness(p, q, alphas=None, tol: float = 1e-12) -> TrumpingVerdict:
    """Screen the trumping conditions H_alpha(p) <= H_alpha(q) on a grid of orders."""
    p = np.sort(as_distribution(p))[::-1]
    q = np.sort(as_distribution(q))[::-1]
    grid = default_alpha_grid() if alphas is None else np.asarray(alphas, dtype=float)
    inconclusive = bool(np.any(p <= 0) or np.any(q <= 0))
    for alpha in grid:
        if inconclusive and alpha <= 0:
            continue
        if renyi_entropy(p, float(alpha)) > renyi_entropy(q, float(alpha)) + tol:
            return TrumpingVerdict(False, float(alpha), inconclusive)
    return TrumpingVerdict(True, None, inconclusive)


__all__ = [
    "ApproxResult",
    "TrumpingVerdict",
    "approx_majorise_optimal",
    "catalyses",
    "default_alpha_grid",
    "fidelity",
    "probabilistic_aux",
    "renyi_entropy",
    "tensor",
    "trumping_witness",
    "vidal_probability",
]
