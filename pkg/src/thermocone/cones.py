"""Thermal cones: extreme points, tangent vectors, classification and volumes.

The future cone of a state p is the convex hull of at most d! extreme points,
one per beta-order chamber, each obtained by reading p's thermomajorisation
curve on the chamber's cumulative-Gibbs grid.  The past cone and the
incomparable region are delimited by families of tangent quasi-probability
vectors whose curves touch p's curve at one elbow.  Relative volumes of the
three regions are thermodynamic monotones; they are estimated by Monte Carlo
classification of uniform simplex samples (closed forms exist for d = 3 at
infinite temperature).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .simplex import (
    CMP_TOL,
    GibbsContext,
    as_distribution,
    beta_order,
    curve_dominates,
    curve_from_sorted,
    thermo_curve,
    thermomajorises,
)

FUTURE = "Future"
PAST = "Past"
INCOMPARABLE = "Incomparable"
EQUIVALENT = "Equivalent"

D_MAX = 8  # d! enumeration cap


def future_extreme_points(p, ctx: GibbsContext, dedup_tol: float = 1e-12,
                          d_max: int = D_MAX) -> list[np.ndarray]:
    """Extreme points of the future thermal cone, one candidate per permutation.

    For each chamber the candidate reads p's curve at the chamber's
    cumulative-Gibbs x-grid and assigns the increments back to the original
    level indices; duplicates are removed.  At beta = 0 this reduces to the
    d! permutations of p; the candidate for p's own chamber is p itself.
    """
    p = ctx.check_state(p)
    d = ctx.dim
    if d > d_max:
        raise ValueError(f"d = {d} exceeds the d! enumeration cap of {d_max}")
    curve = thermo_curve(p, ctx)
    g = ctx.gamma
    out: list[np.ndarray] = []
    for order in permutations(range(d)):
        xs = np.cumsum(g[list(order)])
        xs[-1] = 1.0
        ys = curve.value(xs)
        increments = np.diff(np.concatenate(([0.0], ys)))
        cand = np.empty(d)
        cand[list(order)] = increments
        if not any(np.max(np.abs(cand - seen)) <= dedup_tol for seen in out):
            out.append(cand)
    return out


def tangent_vectors_zero_beta(p) -> list[np.ndarray]:
    """Tangent quasi-probability vectors t^(n) of a sorted state at beta = 0.

    t^(n) = (t_1, p_n, ..., p_n, t_d) keeps the slope of p's n-th Lorenz
    segment across the whole middle of the vector; the first and last entries
    enforce tangency at the n-th elbow and normalisation.  These are the
    non-trivial extreme points of the past cone per Weyl chamber.
    """
    p = np.sort(as_distribution(p))[::-1]
    d = p.size
    out = []
    for n in range(1, d + 1):
        pn = p[n - 1]
        t1 = float(np.sum(p[: n - 1]) - (n - 2) * pn)
        td = 1.0 - t1 - (d - 2) * pn
        t = np.full(d, pn)
        t[0] = t1
        t[-1] = td
        out.append(t)
    return out


def tangent_vectors_thermal(p, ctx: GibbsContext, chamber) -> list[np.ndarray]:
    """Tangent vectors t^(n, pi) for one beta-order chamber, in chamber order.

    ``chamber`` lists the original level indices by sorted position (the
    inverse permutation).  Entry k of the returned vectors is the weight of
    the k-th chamber segment; the middle entries follow the tangent line of
    slope p^beta_n / gamma^beta_n, so the curve of t^(n, pi) drawn in that
    chamber touches p's curve at its n-th elbow.  The beta -> 0 limit
    reproduces the permuted zero-beta tangent vectors.
    """
    p = ctx.check_state(p)
    d = ctx.dim
    chamber = tuple(int(i) for i in chamber)
    if sorted(chamber) != list(range(d)):
        raise ValueError("chamber must be a permutation of the level indices")
    ob = beta_order(p, ctx)
    p_beta = ob.sorted
    g_beta = ctx.gamma[list(ob.order)]
    g_chamber = ctx.gamma[list(chamber)]
    cum_p = np.cumsum(p_beta)
    cum_g = np.cumsum(g_beta)
    out = []
    for n in range(1, d + 1):
        slope = p_beta[n - 1] / g_beta[n - 1]
        t = slope * g_chamber
        t[0] = cum_p[n - 1] - slope * (cum_g[n - 1] - g_chamber[0])
        t[-1] = 1.0 - t[0] - slope * np.sum(g_chamber[1:-1])
        out.append(t)
    return out


def project_to_simplex(t) -> np.ndarray:
    """Project a quasi-probability vector onto the simplex along future-cone edges.

    Sweeps pairs from the tail: any negative weight is absorbed into its left
    neighbour, zeroing the entry.  Valid states are returned unchanged and
    the map is idempotent.  Intended for tangent-vector-like inputs, whose
    negativity sits in the trailing entries; a leading negative entry cannot
    be repaired by this left-moving map.
    """
    t = as_distribution(t, allow_negative=True).copy()
    for m in range(t.size - 1, 0, -1):
        a, b = t[m - 1], t[m]
        t[m - 1] = min(a + b, a)
        t[m] = max(b, 0.0)
    return t


def classify(q, p, ctx: GibbsContext, tol: float = CMP_TOL) -> str:
    """Locate q relative to p's thermal cones.

    Future iff p >=_beta q strictly, Past iff q >=_beta p strictly,
    Equivalent iff the curves coincide, Incomparable otherwise.  Boundary
    cases within ``tol`` count as both directions (Equivalent); the interior
    distinctions are measure-zero for volume purposes.
    """
    pq = thermomajorises(p, q, ctx, tol)
    qp = thermomajorises(q, p, ctx, tol)
    if pq and qp:
        return EQUIVALENT
    if pq:
        return FUTURE
    if qp:
        return PAST
    return INCOMPARABLE


def tangent_membership(q, p, ctx: GibbsContext, lam_grid: int = 21,
                       tol: float = 1e-9) -> bool:
    """Check the tangent-vector description of the incomparable region.

    True iff q lies below some convex combination of consecutive tangent
    vectors t(p; lambda, n) in some chamber, sampled on a lambda grid.  For
    states with q not >=_beta p this is the constructive membership test for
    the incomparable region (up to grid resolution).
    """
    q = ctx.check_state(q)
    cq = thermo_curve(q, ctx)
    lams = np.linspace(0.0, 1.0, lam_grid)
    for order in permutations(range(ctx.dim)):
        tangents = tangent_vectors_thermal(p, ctx, order)
        widths = ctx.gamma[list(order)]
        for n in range(len(tangents) - 1):
            for lam in lams:
                t = lam * tangents[n] + (1.0 - lam) * tangents[n + 1]
                if curve_dominates(curve_from_sorted(t, widths), cq, tol):
                    return True
    return False


def sample_simplex(d: int, n: int, seed: int, chunk_index: int = 0) -> np.ndarray:
    """Uniform samples from the probability simplex via normalised exponentials.

    The Philox counter-based generator keyed by (seed, chunk_index) makes the
    stream independent of how work is split across workers.
    """
    rng = np.random.Generator(np.random.Philox(key=[seed, chunk_index]))
    x = rng.exponential(size=(n, d))
    return x / x.sum(axis=1, keepdims=True)


def _classify_batch(samples: np.ndarray, p, ctx: GibbsContext, tol: float = CMP_TOL):
    """Vectorised cone classification of many samples against one state.

    Returns integer labels: 0 future, 1 incomparable, 2 past (Equivalent
    counts as future and past simultaneously and is resolved to 'future' for
    volume purposes; it has measure zero).
    """
    g = ctx.gamma
    cp = thermo_curve(p, ctx)
    S, d = samples.shape
    order = np.argsort(-(samples / g), axis=1, kind="stable")
    g_sorted = np.take_along_axis(np.broadcast_to(g, (S, d)), order, axis=1)
    q_sorted = np.take_along_axis(samples, order, axis=1)
    xs = np.cumsum(g_sorted, axis=1)
    xs[:, -1] = 1.0
    ys = np.cumsum(q_sorted, axis=1)
    ys[:, -1] = 1.0
    # p >= q: p's curve above each sample's elbows
    p_above = np.all(cp.value(xs) >= ys - tol, axis=1)
    # q >= p: each sample's curve above p's elbows
    q_above = np.ones(S, dtype=bool)
    xs_pad = np.concatenate((np.zeros((S, 1)), xs), axis=1)
    ys_pad = np.concatenate((np.zeros((S, 1)), ys), axis=1)
    slopes = q_sorted / g_sorted
    for j in range(len(cp.xs)):
        x0 = cp.xs[j]
        y0 = cp.ys[j]
        seg = np.clip(np.sum(xs_pad[:, 1:] < x0 - 1e-15, axis=1), 0, d - 1)
        rows = np.arange(S)
        val = ys_pad[rows, seg] + slopes[rows, seg] * (x0 - xs_pad[rows, seg])
        q_above &= val >= y0 - tol
    labels = np.full(S, 1, dtype=np.int8)
    labels[p_above] = 0
    labels[q_above & ~p_above] = 2
    return labels


@dataclass(frozen=True)
class VolumeEstimate:
    """Monte-Carlo (or closed-form) relative volumes of the three regions."""

    future: float
    incomparable: float
    past: float
    n_samples: int = 0
    seed: int | None = None
    std_error: float = 0.0

    def as_tuple(self):
        return (self.future, self.incomparable, self.past)


def closed_form_volumes_d3(p) -> VolumeEstimate:
    """Exact relative cone volumes for d = 3 at infinite temperature.

    V+ = (3 p1 - 1)^2 - 3 (p2 - p1)^2 on the sorted state, V- has the
    Heaviside correction below p1 = 1/2 and the incomparable share is the
    complement.
    """
    p = np.sort(as_distribution(p))[::-1]
    if p.size != 3:
        raise ValueError("closed form requires d = 3")
    p1, p2, p3 = p
    v_plus = (3 * p1 - 1) ** 2 - 3 * (p2 - p1) ** 2
    v_minus = 12 * p2 * p3
    if p1 < 0.5:
        v_minus -= 3 * (1 - 2 * p1) ** 2
    v_empty = 1.0 - v_plus - v_minus
    return VolumeEstimate(float(v_plus), float(v_empty), float(v_minus))


def monte_carlo_volumes(p, ctx: GibbsContext, n_samples: int = 10**5,
                        seed: int = 2023, threads: int = 1,
                        chunk: int = 200_000) -> VolumeEstimate:
    """Estimate cone volumes by classifying uniform simplex samples.

    Deterministic for fixed (seed, n_samples) regardless of ``threads``:
    samples are drawn per chunk from counter-based streams keyed by the chunk
    index, and chunk tallies are summed in index order.
    """
    p = ctx.check_state(p)
    d = ctx.dim
    n_chunks = (n_samples + chunk - 1) // chunk
    sizes = [min(chunk, n_samples - i * chunk) for i in range(n_chunks)]

    def work(i: int):
        samples = sample_simplex(d, sizes[i], seed, i)
        labels = _classify_batch(samples, p, ctx)
        return np.bincount(labels, minlength=3)

    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = sum(pool.map(work, range(n_chunks)))
    else:
        counts = sum(work(i) for i in range(n_chunks))
    fut, inc, past = (counts / n_samples).tolist()
    stderr = float(np.sqrt(max(fut * (1 - fut), inc * (1 - inc), past * (1 - past)) / n_samples))
    return VolumeEstimate(fut, inc, past, n_samples, seed, stderr)


def cone_volumes(p, ctx: GibbsContext, method: str = "monte_carlo",
                 n_samples: int = 10**5, seed: int = 2023,
                 threads: int = 1) -> VolumeEstimate:
    """Relative volumes (V+, V_empty, V-) of the thermal cones of ``p``.

    ``method`` is either ``closed_form_d3_beta0`` (exact, only d = 3 with a
    uniform Gibbs state) or ``monte_carlo``.
    """
    if method == "closed_form_d3_beta0":
        if ctx.dim != 3 or np.ptp(ctx.gamma) > 1e-12:
            raise ValueError("closed form only available for d = 3 at beta = 0")
        return closed_form_volumes_d3(ctx.check_state(p))
    if method == "monte_carlo":
        return monte_carlo_volumes(p, ctx, n_samples, seed, threads)
    raise ValueError(f"unknown volume method: {method}")


@dataclass(frozen=True)
class ConeResult:
    """Bundle of future extreme points, per-chamber tangent families and volumes."""

    future_extremes: list = field(repr=False)
    tangent_families: dict = field(repr=False)
    volumes: VolumeEstimate

    def to_jsonable(self) -> dict:
        return {
            "extremes": [list(map(float, v)) for v in self.future_extremes],
            "volumes": {
                "future": self.volumes.future,
                "incomparable": self.volumes.incomparable,
                "past": self.volumes.past,
            },
            "samples": self.volumes.n_samples,
            "seed": self.volumes.seed,
        }


def cone_analysis(p, ctx: GibbsContext, n_samples: int = 10**5, seed: int = 2023,
                  threads: int = 1) -> ConeResult:
    tangents = {
        order: tangent_vectors_thermal(p, ctx, order)
        for order in permutations(range(ctx.dim))
    }
    return ConeResult(
        future_extreme_points(p, ctx),
        tangents,
        monte_carlo_volumes(p, ctx, n_samples, seed, threads),
    )


def sample_schmidt_spectrum(n_dim: int, m_dim: int, count: int, seed: int = 2023,
                            size_cap: int = 64) -> list[np.ndarray]:
    """Eigenvalue spectra of reduced states of Haar-random bipartite pure states.

    Direct method: draw a complex Gaussian state vector on the n*m space,
    normalise, partial-trace and diagonalise.  Spectra are returned sorted
    non-increasingly.
    """
    if m_dim < n_dim:
        raise ValueError("require m_dim >= n_dim")
    if n_dim * m_dim > size_cap:
        raise ValueError(f"joint dimension {n_dim * m_dim} exceeds cap {size_cap}")
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    out = []
    for _ in range(count):
        psi = rng.normal(size=(n_dim, m_dim)) + 1j * rng.normal(size=(n_dim, m_dim))
        psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)))
        rho = psi @ psi.conj().T
        vals = np.linalg.eigvalsh(rho)[::-1]
        out.append(np.clip(vals.real, 0.0, None))
    return out
