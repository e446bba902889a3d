"""Exact and second-order-asymptotic thermodynamic distillation.

The minimal transformation error from a product of independent incoherent
systems to a flat target (sharp energy eigenstate, or thermal) equals one
minus the joint thermomajorisation curve evaluated at the target's Gibbs
weight.  The joint curve is evaluated exactly by grouping identical
subsystems into multinomial ratio classes, so ensembles of tens of qubits
stay polynomial in size.  The asymptotic counterparts are the Gaussian error
Phi(-dF/sigma), its Berry-Esseen single-shot bound, and the
fluctuation-dissipation coefficient a(eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .simplex import GibbsContext, as_distribution
from .special import normal_cdf, normal_cdf_inv, normal_pdf

BERRY_ESSEEN_C = 0.4748


@dataclass(frozen=True)
class InfoTriple:
    """Relative entropy (nats), its variance (nats^2) and absolute third moment."""

    d: float
    v: float
    y: float


def info_quantities(p, ctx: GibbsContext) -> InfoTriple:
    """D, V, Y of p relative to the context's Gibbs state (0 log 0 := 0).

    V vanishes exactly when p is proportional to gamma on its support; for a
    pure state V / beta^2 is the energy variance.  All three are invariant
    under the embedding map.
    """
    p = ctx.check_state(p)
    g = ctx.gamma
    mask = p > 0
    if np.any(g[mask] <= 0):
        raise ValueError("state support exceeds the Gibbs support")
    logs = np.log(p[mask] / g[mask])
    d = float(np.sum(p[mask] * logs))
    v = float(np.sum(p[mask] * (logs - d) ** 2))
    y = float(np.sum(p[mask] * np.abs(logs - d) ** 3))
    return InfoTriple(d, max(v, 0.0), max(y, 0.0))


@dataclass(frozen=True)
class Subsystem:
    """``count`` independent copies of an incoherent state with its context."""

    state: np.ndarray = field(repr=False)
    ctx: GibbsContext
    count: int = 1


@dataclass(frozen=True)
class SystemEnsemble:
    """Non-interacting subsystems sharing one bath temperature.

    Aggregated free energy F = sum D / beta, fluctuation sigma^2 = sum V /
    beta^2 and skewness kappa^3 = sum Y / beta^3 follow the additivity of the
    relative-entropy moments over independent parts.
    """

    parts: tuple

    def __post_init__(self):
        betas = {part.ctx.beta for part in self.parts}
        if len(betas) != 1:
            raise ValueError("all subsystems must share the bath temperature")

    @property
    def beta(self) -> float:
        return self.parts[0].ctx.beta

    @property
    def n_subsystems(self) -> int:
        return sum(part.count for part in self.parts)

    def moments(self):
        d = v = y = 0.0
        for part in self.parts:
            info = info_quantities(part.state, part.ctx)
            d += part.count * info.d
            v += part.count * info.v
            y += part.count * info.y
        return d, v, y

    def free_energy(self) -> float:
        return self.moments()[0] / self.beta

    def sigma(self) -> float:
        return math.sqrt(self.moments()[1]) / self.beta

    def kappa(self) -> float:
        return self.moments()[2] ** (1.0 / 3.0) / self.beta


def iid_ensemble(p, ctx: GibbsContext, count: int) -> SystemEnsemble:
    return SystemEnsemble((Subsystem(ctx.check_state(p), ctx, count),))


def _compositions(total: int, bins: int):
    """All ways to split ``total`` into ``bins`` non-negative ordered parts."""
    if bins == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, bins - 1):
            yield (head,) + rest


def _log_multinomial(counts) -> float:
    total = sum(counts)
    value = math.lgamma(total + 1)
    for k in counts:
        value -= math.lgamma(k + 1)
    return value


def product_ratio_groups(parts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Compressed joint distribution of a product of iid blocks.

    Entries of the product state are grouped by their likelihood ratio
    p/gamma; each group is returned as (log ratio, log Gibbs mass, log state
    mass).  Identical subsystems are expanded multinomially, so the number of
    groups is polynomial in the copy counts.
    """
    log_ratio = np.array([0.0])
    log_gmass = np.array([0.0])
    log_pmass = np.array([0.0])
    for part in parts:
        p = np.asarray(part.state, dtype=float)
        g = part.ctx.gamma
        with np.errstate(divide="ignore"):
            level_lr = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)) - np.log(g), -np.inf)
            level_lp = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)), -np.inf)
        level_lg = np.log(g)
        block_lr, block_lg, block_lp = [], [], []
        for combo in _compositions(part.count, p.size):
            lmn = _log_multinomial(combo)
            lr = lg = lp = 0.0
            for k, lri, lgi, lpi in zip(combo, level_lr, level_lg, level_lp):
                if k == 0:
                    continue
                lr += k * lri
                lg += k * lgi
                lp += k * lpi
            block_lr.append(lr)
            block_lg.append(lmn + lg)
            block_lp.append(lmn + lp)
        block_lr = np.asarray(block_lr)
        block_lg = np.asarray(block_lg)
        block_lp = np.asarray(block_lp)
        log_ratio = (log_ratio[:, None] + block_lr[None, :]).ravel()
        log_gmass = (log_gmass[:, None] + block_lg[None, :]).ravel()
        log_pmass = (log_pmass[:, None] + block_lp[None, :]).ravel()
    return log_ratio, log_gmass, log_pmass


def joint_curve_value(parts, x_target: float) -> float:
    """Thermomajorisation curve of the product of ``parts`` evaluated at ``x_target``.

    Groups are sorted by likelihood ratio; the curve's y-value is the
    cumulative state mass at cumulative Gibbs mass ``x_target``, linearly
    interpolated inside a group (all entries of a group share one slope, so
    the interpolation is exact).
    """
    lr, lg, lp = product_ratio_groups(parts)
    order = np.argsort(-lr, kind="stable")
    gmass = np.exp(lg[order])
    pmass = np.exp(lp[order])
    cum_g = np.cumsum(gmass)
    cum_p = np.cumsum(pmass)
    if x_target <= 0:
        return 0.0
    if x_target >= cum_g[-1] - 1e-15:
        return float(cum_p[-1])
    idx = int(np.searchsorted(cum_g, x_target, side="left"))
    g_before = cum_g[idx - 1] if idx > 0 else 0.0
    p_before = cum_p[idx - 1] if idx > 0 else 0.0
    slope = pmass[idx] / gmass[idx]
    return float(p_before + slope * (x_target - g_before))


def minimal_transformation_error(initial_parts, target_weight: float) -> float:
    """Exact minimal infidelity of a distillation to a flat target.

    ``target_weight`` is the product of the target levels' Gibbs weights
    (thermal target factors contribute 1).  This evaluates the optimal-error
    lemma for flat targets without materialising the embedded product.
    """
    eps = 1.0 - joint_curve_value(initial_parts, target_weight)
    return float(min(max(eps, 0.0), 1.0))


def exact_distillation_error(ensemble: SystemEnsemble, target_level: int,
                             target_ctx: GibbsContext) -> float:
    """Exact error of distilling the ensemble into a sharp target eigenstate.

    The ensemble's subsystems end in their thermal states and the target
    system (appended in its thermal state on the initial side, so different
    Hamiltonians are allowed) ends sharp at ``target_level``.
    """
    weight = float(target_ctx.gamma[target_level])
    return minimal_transformation_error(ensemble.parts, weight)


def battery_context(work: float, beta: float) -> GibbsContext:
    """Two-level battery with gap ``work``."""
    return GibbsContext.build(np.array([0.0, work]), beta)


def work_extraction_error_exact(ensemble: SystemEnsemble, work: float) -> float:
    """Exact failure probability of extracting ``work`` from the ensemble.

    A ground-initialised two-level battery with gap ``work`` is appended; the
    target is everything thermal with the battery sharp in its excited state.
    """
    ctx_b = battery_context(work, ensemble.beta)
    parts = ensemble.parts + (Subsystem(np.array([1.0, 0.0]), ctx_b, 1),)
    return minimal_transformation_error(parts, float(ctx_b.gamma[1]))


def erasure_error_exact(n_bits: int, beta: float, work: float) -> float:
    """Exact error of resetting n maximally-mixed bits with an inverted battery.

    The bits carry a trivial Hamiltonian; the battery starts excited at
    ``work`` and ends in its ground state, paying for the reset.
    """
    ctx_bit = GibbsContext.build(np.zeros(2), beta)
    ctx_b = battery_context(work, beta)
    parts = (
        Subsystem(np.full(2, 0.5), ctx_bit, n_bits),
        Subsystem(np.array([0.0, 1.0]), ctx_b, 1),
    )
    # bits end sharp in their ground states, battery ends sharp in the ground state
    weight = 0.5**n_bits * float(ctx_b.gamma[0])
    return minimal_transformation_error(parts, weight)


def erasure_cost_exact(n_bits: int, beta: float, eps: float, tol: float = 1e-13) -> float:
    """Work cost of erasing n unknown bits at allowed error ``eps`` (bisection).

    The closed form is W = (n/beta) (log 2 + log(1 - eps)/n); at eps = 0 this
    is the Landauer cost n log(2)/beta.
    """
    if not (0.0 <= eps < 1.0):
        raise ValueError("error must lie in [0, 1)")
    lo, hi = 0.0, n_bits * math.log(2.0) / beta + 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if erasure_error_exact(n_bits, beta, mid) > eps:
            lo = mid
        else:
            hi = mid
    return hi


def optimal_error_asymptotic(delta_f: float, sigma_f: float) -> float:
    """Second-order optimal error Phi(-dF/sigma); degenerate sigma resolves by sign."""
    if sigma_f < 0:
        raise ValueError("sigma must be non-negative")
    if sigma_f == 0.0:
        return 0.5 if delta_f == 0 else (0.0 if delta_f > 0 else 1.0)
    return normal_cdf(-delta_f / sigma_f)


def single_shot_bound(delta_f: float, sigma_f: float, kappa_f: float,
                      c: float = BERRY_ESSEEN_C) -> float:
    """Finite-N upper bound: the Gaussian error plus the Berry-Esseen term."""
    if sigma_f <= 0:
        raise ValueError("bound requires positive fluctuations")
    return normal_cdf(-delta_f / sigma_f) + c * kappa_f**3 / sigma_f**3


def dissipation_coefficient(eps: float) -> float:
    """Fluctuation-dissipation coefficient a(eps) > 0 for eps in (0, 1).

    F_diss of the optimal distillation is a(eps) * sigma(F); at eps = 1/2 the
    coefficient is 1/sqrt(2 pi), and it vanishes as eps -> 1.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("error must lie in (0, 1)")
    z = normal_cdf_inv(eps)
    return -z * (1.0 - eps) + normal_pdf(z)


def dissipation_from_gap(delta_f: float, sigma_f: float) -> float:
    """Dissipated free energy [1 - Phi(-dF/sigma)] dF + phi(dF/sigma) sigma.

    Algebraically identical to a(eps*) sigma at the matched optimal error
    eps* = Phi(-dF/sigma).
    """
    if sigma_f <= 0:
        raise ValueError("requires positive fluctuations")
    x = delta_f / sigma_f
    return (1.0 - normal_cdf(-x)) * delta_f + normal_pdf(x) * sigma_f


@dataclass(frozen=True)
class ApplicationRates:
    """Second-order asymptotic rates of the three protocols at error eps."""

    work_extracted: float
    work_extracted_pure: float | None
    erasure_cost: float
    encoding_rate: float


def application_rates(ensemble: SystemEnsemble, eps: float,
                      pure_moments: tuple | None = None) -> ApplicationRates:
    """W_ext, pure-state W_ext, erasure cost and encoding rate at error ``eps``.

    ``pure_moments`` supplies (<H>, <H^2>, log Z, N) for the identical
    pure-state variant, whose free-energy fluctuation is the energy standard
    deviation per subsystem.  Degenerate ensembles (sigma = 0) must use the
    exact oracle instead.
    """
    beta = ensemble.beta
    f_n = ensemble.free_energy()
    sigma = ensemble.sigma()
    if sigma == 0.0:
        raise ValueError("sigma(F) = 0: use the exact oracle for degenerate ensembles")
    z = normal_cdf_inv(eps)
    w_ext = f_n + sigma * z
    pure = None
    if pure_moments is not None:
        h1, h2, log_z, n = pure_moments
        var = max(h2 - h1 * h1, 0.0)
        pure = n * (h1 + log_z / beta) + math.sqrt(n * var) * z
    entropy = 0.0
    for part in ensemble.parts:
        p = as_distribution(part.state)
        mask = p > 0
        entropy += part.count * float(-np.sum(p[mask] * np.log(p[mask])))
    erasure = entropy / beta - sigma * z
    encoding = beta * f_n + beta * sigma * z
    return ApplicationRates(float(w_ext), pure, float(erasure), float(encoding))


def dephased_iid_groups(p, ctx: GibbsContext, count: int):
    """Multinomial ratio classes of the dephased N-copy product distribution.

    Structural handle on the dephasing reduction for pure states: the
    dephased product of N identical states is the multinomial profile
    distribution over energy-type vectors.
    """
    return product_ratio_groups((Subsystem(ctx.check_state(p), ctx, count),))
