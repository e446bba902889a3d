"""Memory-assisted Markovian thermal processes.

A d-level system extended by an N-level degenerate memory undergoes N^2
two-level thermalisations arranged in N rounds: the k-th round thermalises
every entry of the source block sequentially into the k-th entry of the
target block.  As N grows this approximates a beta-swap, and compositions of
such blocks approximate any extreme point of the thermal-operations cone.
Closed-form entry values and the exact convergence functions (E, F) via the
regularised incomplete beta function provide analytic oracles for the
simulated protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .simplex import GibbsContext, as_distribution, beta_order, thermomajorises
from .special import reg_inc_beta


def two_level_thermalise(state, i: int, j: int, lam: float, weights) -> np.ndarray:
    """Partial thermalisation of levels i and j towards their conditional Gibbs ratio.

    ``weights`` are the (possibly unnormalised) Boltzmann weights of the
    state's levels, or a :class:`GibbsContext` whose gamma provides them;
    only entries i and j change and their sum is conserved.  lam = 0 is the
    identity, lam = 1 the full reset to the conditional Gibbs pair.
    """
    if isinstance(weights, GibbsContext):
        weights = weights.gamma
    s = np.asarray(state, dtype=float).copy()
    if i == j:
        raise ValueError("need two distinct levels")
    if not (0.0 <= lam <= 1.0):
        raise ValueError("thermalisation strength must lie in [0, 1]")
    w = np.asarray(weights, dtype=float)
    if i >= s.size or j >= s.size or i < 0 or j < 0:
        raise IndexError("level index out of range")
    gi = w[i] / (w[i] + w[j])
    total = s[i] + s[j]
    s[i] = (1 - lam) * s[i] + lam * gi * total
    s[j] = (1 - lam) * s[j] + lam * (1 - gi) * total
    return s


def beta_swap_matrix(e_low: float, e_high: float, beta: float) -> np.ndarray:
    """2x2 beta-swap block for a level pair with E_high >= E_low.

    Column-stochastic and Gibbs-preserving on the two-level thermal state; at
    beta = 0 it is a plain transposition.
    """
    if e_high < e_low:
        raise ValueError("expected e_high >= e_low")
    x = math.exp(-beta * (e_high - e_low))
    return np.array([[1.0 - x, 1.0], [x, 0.0]])


def _joint_weights(ctx: GibbsContext, n_memory: int) -> np.ndarray:
    """Boltzmann weights of system x degenerate memory, system-major."""
    return np.repeat(ctx.gamma, n_memory) / n_memory


def thermalise_memory(joint: np.ndarray, dim: int, n_memory: int) -> np.ndarray:
    """Full memory reset: marginalise the system and re-attach a uniform memory."""
    system = joint.reshape(dim, n_memory).sum(axis=1)
    return np.repeat(system / n_memory, n_memory)


def system_marginal(joint: np.ndarray, dim: int, n_memory: int) -> np.ndarray:
    return joint.reshape(dim, n_memory).sum(axis=1)


def memory_marginal(joint: np.ndarray, dim: int, n_memory: int) -> np.ndarray:
    return joint.reshape(dim, n_memory).sum(axis=0)


def _swap_block(joint: np.ndarray, dim: int, n_memory: int, low: int, high: int,
                weights: np.ndarray, order: str = "canonical",
                log: list | None = None) -> np.ndarray:
    """One truncated beta-swap block: N rounds of N two-level thermalisations.

    ``low``/``high`` are the system levels playing the source/target roles
    (E_high >= E_low for a proper beta-swap).  The canonical round k fills the
    k-th target entry from every source entry in sequence; ``transposed``
    iterates the roles the other way round (exploratory only, identical
    marginals at beta = 0).
    """
    glow = weights[low * n_memory]
    ghigh = weights[high * n_memory]
    frac = glow / (glow + ghigh)
    r = joint.copy()
    for k in range(n_memory):
        for l in range(n_memory):
            if order == "canonical":
                a = low * n_memory + l
                b = high * n_memory + k
            elif order == "transposed":
                a = low * n_memory + k
                b = high * n_memory + l
            else:
                raise ValueError(f"unknown protocol order: {order}")
            tot = r[a] + r[b]
            r[a] = frac * tot
            r[b] = tot - r[a]
        if log is not None:
            log.append(system_marginal(r, dim, n_memory))
    return r


def run_beta_swap_protocol(p, low: int, high: int, n_memory: int, ctx: GibbsContext,
                           variant: str = "full", order: str = "canonical",
                           keep_log: bool = False):
    """Memory-assisted approximation of the beta-swap on levels (low, high).

    Returns (system state, memory marginal before any final reset, round log).
    The ``full`` variant thermalises the memory at the end, so the system
    marginal is unchanged by the reset; ``truncated`` skips it.
    """
    p = ctx.check_state(p)
    if n_memory < 1:
        raise ValueError("memory dimension must be at least 1")
    d = ctx.dim
    weights = _joint_weights(ctx, n_memory)
    joint = np.repeat(p / n_memory, n_memory)
    log: list | None = [] if keep_log else None
    joint = _swap_block(joint, d, n_memory, low, high, weights, order, log)
    memory = memory_marginal(joint, d, n_memory)
    if variant == "full":
        joint = thermalise_memory(joint, d, n_memory)
    elif variant != "truncated":
        raise ValueError(f"unknown protocol variant: {variant}")
    return system_marginal(joint, d, n_memory), memory, (log or [])


def bj_entry(b: float, c: float, n_memory: int, k: int, j: int,
             gamma_pair) -> float:
    """Closed-form source-block entry b_j^{(k)} after k rounds (1-based j, k).

    Exact for the canonical protocol; equals the two-term recurrence in which
    every round adds the current target entry and rethermalises.
    """
    if not (1 <= j <= n_memory and 0 <= k <= n_memory):
        raise ValueError("indices out of range")
    g12, g21 = _fractions(gamma_pair)
    if k == 0:
        return float(b)
    s_c = sum(math.comb(j + i - 1, i) * g12**i for i in range(k))
    s_b = sum(math.comb(j + k - 1 - i, k - 1) * g21 ** (j - i) for i in range(1, j + 1))
    return float(c * g12 * g21 ** (j - 1) * s_c + b * g12**k * s_b)


def cj_entry(b: float, c: float, n_memory: int, k: int, gamma_pair) -> float:
    """Closed-form target-block entry c_k^{(N)} (its final value, set in round k).

    Derived from the recurrence c_k = G21^N c + G21^{N+1} sum_i b_i^{(k-1)} / G21^i;
    the c-coefficient matches the binomial sum quoted in the convergence
    analysis, the b-coefficient follows from the hockey-stick identity.
    """
    n = n_memory
    if not (1 <= k <= n):
        raise ValueError("round index out of range")
    g12, g21 = _fractions(gamma_pair)
    part_c = g21**n * sum(math.comb(n + i - 1, i) * g12**i for i in range(k))
    if k == 1:
        part_b = g21 * (1.0 - g21**n) / g12
    else:
        s = sum(math.comb(l + k - 2, k - 2) * g21**l for l in range(n))
        part_b = g21 * g12 ** (k - 2) * s - g21 ** (n + 1) * g12 ** (k - 2) * math.comb(n + k - 2, k - 1)
    return float(c * part_c + b * part_b)


def _fractions(gamma_pair):
    g1, g2 = float(gamma_pair[0]), float(gamma_pair[1])
    tot = g1 + g2
    return g1 / tot, g2 / tot


@dataclass(frozen=True)
class Convergence:
    """Exact convergence data of one beta-swap block with memory size N."""

    e_leak: float
    f_fill: float
    predicted_final: np.ndarray = field(repr=False)
    predicted_distance: float
    leading_term: float


def convergence_functions(p_pair, gamma_pair, n_memory: int) -> Convergence:
    """Exact E and F functions of the protocol via the regularised beta function.

    The final two-level state is q = b (F, 1-F) + c (1-E, E) componentwise for
    input (b, c); the distance to the beta-swapped target is |b G - c E| with
    G = F - (G12-G21)/G12.  ``leading_term`` is the asymptotic prediction
    |b G21 - c G12| (4 G12 G21)^N / ((G12-G21)^2 sqrt(pi N) (N+1)) at finite
    temperature and |b - c| / sqrt(pi N) in the degenerate case.
    """
    b, c = float(p_pair[0]), float(p_pair[1])
    n = int(n_memory)
    g12, g21 = _fractions(gamma_pair)
    if g21 > g12:
        raise ValueError("expected gamma_pair ordered with the larger weight first")
    central = math.comb(2 * n, n)
    prod = g12 * g21
    if g12 == g21:
        e_leak = prod**n * central
        f_fill = e_leak
    else:
        i_term = 0.5 * reg_inc_beta(4.0 * prod, n, 0.5)
        e_leak = ((g21 - g12) * i_term + prod**n * central / 2.0) / g21
        f_fill = (g12 - g21) / g12 * (1.0 - i_term) + prod**n * central / (2.0 * g12)
    swap_gain = (g12 - g21) / g12  # 1 - exp(-beta * gap)
    g_fun = f_fill - swap_gain
    q = np.array([b * f_fill + c * (1.0 - e_leak), b * (1.0 - f_fill) + c * e_leak])
    distance = abs(b * g_fun - c * e_leak)
    if g12 == g21:
        leading = abs(b - c) / math.sqrt(math.pi * n)
    else:
        leading = (abs(b * g21 - c * g12) * (4.0 * prod) ** n
                   / ((g12 - g21) ** 2 * math.sqrt(math.pi * n) * (n + 1)))
    return Convergence(float(e_leak), float(f_fill), q, float(distance), float(leading))


@dataclass(frozen=True)
class ProtocolSpec:
    """Decomposed MeMTP protocol: neighbour transpositions, memory size, variant."""

    swaps: tuple
    n_memory: int
    variant: str = "truncated"
    order: str = "canonical"


def decompose_to_neighbour_swaps(p, ctx: GibbsContext, target_order) -> list[tuple[int, int]]:
    """Adjacent-transposition decomposition from p's beta-order to ``target_order``.

    ``target_order`` lists original level indices by sorted position in the
    target chamber.  Each returned pair swaps levels that are neighbours in
    the running beta-order (bubble-sort schedule), which is exactly the regime
    in which a beta-swap produces an extreme point.
    """
    current = list(beta_order(p, ctx).order)
    target = [int(i) for i in target_order]
    if sorted(target) != sorted(current):
        raise ValueError("target order must permute the same level indices")
    swaps: list[tuple[int, int]] = []
    want = {lvl: pos for pos, lvl in enumerate(target)}
    # bubble sort `current` into `target`, recording the level pairs swapped
    for _ in range(len(current) ** 2):
        done = True
        for m in range(len(current) - 1):
            if want[current[m]] > want[current[m + 1]]:
                swaps.append((current[m], current[m + 1]))
                current[m], current[m + 1] = current[m + 1], current[m]
                done = False
        if done:
            break
    return swaps


def compose_protocol(spec: ProtocolSpec, p, ctx: GibbsContext):
    """Run a composed MeMTP protocol towards the extreme point of its swap sequence.

    Each (a, b) pair in ``spec.swaps`` must exchange levels adjacent in the
    running beta-order (checked; a proper decomposition never violates this).
    Returns (final system state, target extreme point, total-variation
    distance between them).
    """
    p = ctx.check_state(p)
    d = ctx.dim
    n = spec.n_memory
    weights = _joint_weights(ctx, n)
    energies = np.asarray(ctx.energies)
    joint = np.repeat(p / n, n)
    running = list(beta_order(p, ctx).order)
    exact = p.copy()
    for a, b in spec.swaps:
        pa, pb = running.index(a), running.index(b)
        if abs(pa - pb) != 1:
            raise ValueError(f"swap {(a, b)} is not adjacent in the running beta-order")
        low, high = (a, b) if energies[a] <= energies[b] else (b, a)
        joint = _swap_block(joint, d, n, low, high, weights, spec.order)
        if spec.variant == "full":
            joint = thermalise_memory(joint, d, n)
        # exact beta-swap bookkeeping for the target extreme point
        x = math.exp(-ctx.beta * abs(energies[b] - energies[a]))
        lo, hi = exact[low], exact[high]
        exact[low], exact[high] = (1 - x) * lo + hi, x * lo
        running[pa], running[pb] = running[pb], running[pa]
    final = system_marginal(joint, d, n)
    distance = 0.5 * float(np.abs(final - exact).sum())
    return final, exact, distance


def general_bound(d: int, n_memory: int) -> float:
    """Dimension-only convergence bound d(d-1) / (2 sqrt(pi N)) at beta = 0."""
    return d * (d - 1) / (2.0 * math.sqrt(math.pi * n_memory))


def min_epsilon_for_work(q_joint, ctx_joint: GibbsContext, gamma_system,
                         tol: float = 1e-12) -> float:
    """Smallest battery error: min eps with q_joint >=_beta gamma_S x (eps, 1-eps).

    Monotone for eps below the battery's thermal ground weight, so bisection
    applies; eps at that weight (thermal battery) is always reachable.
    """
    gamma_system = np.asarray(gamma_system, dtype=float)
    d_b = 2
    d_s = ctx_joint.dim // d_b
    if d_s * d_b != ctx_joint.dim:
        raise ValueError("joint context must be system x two-level battery")
    gamma_b_ground = ctx_joint.gamma.reshape(d_s, d_b).sum(axis=0)[0]

    def reachable(eps: float) -> bool:
        target = np.kron(gamma_system, np.array([eps, 1.0 - eps]))
        return thermomajorises(q_joint, target, ctx_joint)

    hi = float(gamma_b_ground)
    if reachable(0.0):
        return 0.0
    if not reachable(hi):
        return hi  # thermalisation fallback; cannot occur for valid inputs
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if reachable(mid):
            hi = mid
        else:
            lo = mid
    return hi


def work_extraction_with_memory(p, ctx: GibbsContext, work: float, n_memory: int,
                                variant: str = "truncated"):
    """Failure probability of extracting ``work`` with an N-dimensional memory.

    A ground-initialised two-level battery with gap ``work`` is appended; the
    protocol steers the joint state towards the extreme point minimising the
    thermal-operations error, and the achieved error is the minimal eps with
    gamma_S x (eps, 1-eps) thermomajorised by the protocol output.
    Returns (eps_N, eps_TO).
    """
    from .cones import future_extreme_points

    p = ctx.check_state(p)
    energies = np.asarray(ctx.energies)
    joint_energies = np.add.outer(energies, np.array([0.0, work])).ravel()
    ctx_joint = GibbsContext.build(joint_energies, ctx.beta)
    p_joint = np.kron(p, np.array([1.0, 0.0]))
    candidates = []
    for extreme in future_extreme_points(p_joint, ctx_joint):
        eps = min_epsilon_for_work(extreme, ctx_joint, ctx.gamma)
        chamber = beta_order(extreme, ctx_joint).order
        swaps = decompose_to_neighbour_swaps(p_joint, ctx_joint, chamber)
        candidates.append((eps, len(swaps), swaps))
    eps_to = min(c[0] for c in candidates)
    # among epsilon-optimal extremes, steer towards the nearest chamber
    _, _, swaps = min((c for c in candidates if c[0] <= eps_to + 1e-12),
                      key=lambda c: c[1])
    spec = ProtocolSpec(tuple(swaps), n_memory, variant)
    final, _, _ = compose_protocol(spec, p_joint, ctx_joint)
    eps_n = min_epsilon_for_work(final, ctx_joint, ctx.gamma)
    return float(eps_n), float(eps_to)


def cooling_closed_form(e_s: float, e_m: float, beta: float):
    """Closed-form cooled system state and its 1-norm advantage over gamma_S.

    Memory with a non-trivial gap E_M selectively coupled to a two-level
    system with gap E_S (requires E_S != 2 E_M); the distance formula
    1 / [(exp(-beta E_S) + 1)(cosh(beta E_M) + cosh(beta E_S))] is positive
    for all non-zero parameters.
    """
    if abs(e_s - 2 * e_m) < 1e-12:
        raise ValueError("selective coupling requires E_S != 2 E_M")
    b = beta
    q1 = (math.exp(b * e_m) + math.exp(b * (e_m + e_s)) + math.exp(b * (2 * e_m + e_s))
          + math.exp(b * (e_m + 2 * e_s)) + math.exp(b * e_s)) / (
        (math.exp(b * e_s) + 1) * (math.exp(b * (e_m - e_s)) + 1)
        * (math.exp(b * (e_m + e_s)) + 1))
    q2 = (math.exp(b * e_m) + math.exp(b * (2 * e_m + e_s)) + math.exp(b * e_s)) / (
        (math.exp(b * e_s) + 1) * (math.exp(b * e_m) + math.exp(b * e_s))
        * (math.exp(b * (e_m + e_s)) + 1))
    q = np.array([q1, q2])
    distance = 1.0 / ((math.exp(-b * e_s) + 1) * (math.cosh(b * e_m) + math.cosh(b * e_s)))
    return q, float(distance)


def cooling_simulation(e_s: float, e_m: float, beta: float):
    """Four-level simulation of the cooling sequence 1 -> 2 -> 3 -> 4.

    Joint levels |s m> in system-major order with energies
    (0, E_M, E_S, E_S + E_M); operations: (1) |01><->|10|, (2) |00><->|11|,
    (3) both system transitions, (4) both memory transitions, each a full
    two-level thermalisation, followed by discarding (thermalising) the
    memory.  Returns the final system state.
    """
    energies = np.array([0.0, e_m, e_s, e_s + e_m])
    w = np.exp(-beta * energies)
    gamma_m = np.array([1.0, math.exp(-beta * e_m)])
    gamma_m /= gamma_m.sum()
    joint = np.kron(np.array([0.0, 1.0]), gamma_m)  # excited system x thermal memory
    joint = two_level_thermalise(joint, 1, 2, 1.0, w)
    joint = two_level_thermalise(joint, 0, 3, 1.0, w)
    joint = two_level_thermalise(joint, 0, 2, 1.0, w)
    joint = two_level_thermalise(joint, 1, 3, 1.0, w)
    joint = two_level_thermalise(joint, 0, 1, 1.0, w)
    joint = two_level_thermalise(joint, 2, 3, 1.0, w)
    return joint.reshape(2, 2).sum(axis=1)


def cooling_with_memory(e_s: float, e_m: float, beta: float):
    """Closed-form cooled state with the simulated cross-check.

    Returns (q, distance, simulation_gap) where simulation_gap is the largest
    deviation between the printed closed form and the explicit four-level
    protocol.
    """
    q, distance = cooling_closed_form(e_s, e_m, beta)
    q_sim = cooling_simulation(e_s, e_m, beta)
    gamma_s = np.array([1.0, math.exp(-beta * e_s)])
    gamma_s /= gamma_s.sum()
    sim_distance = float(np.abs(q_sim - gamma_s).sum())
    gap = max(float(np.abs(q - q_sim).max()), abs(sim_distance - distance))
    return q, distance, gap


def free_energy_trace(p, low: int, high: int, n_memory: int, ctx: GibbsContext):
    """Relative entropy D(r || gamma x eta) of the joint state after every step.

    The global non-equilibrium free energy decreases monotonically along the
    protocol; the memory marginal stores free energy in between.
    """
    from .simplex import relative_entropy

    p = ctx.check_state(p)
    d = ctx.dim
    n = n_memory
    weights = _joint_weights(ctx, n)
    gamma_joint = np.repeat(ctx.gamma / n, n)
    joint = np.repeat(p / n, n)
    glow = ctx.gamma[low] / (ctx.gamma[low] + ctx.gamma[high])
    values = [relative_entropy(joint, gamma_joint)]
    for k in range(n):
        for l in range(n):
            a = low * n + l
            b = high * n + k
            tot = joint[a] + joint[b]
            joint[a] = glow * tot
            joint[b] = tot - joint[a]
            values.append(relative_entropy(joint, gamma_joint))
    return np.asarray(values)
