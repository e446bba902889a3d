"""Probability-simplex primitives for thermodynamic ordering.

States of energy-incoherent systems are plain 1-D numpy arrays on the
probability simplex.  Everything here is built around the Gibbs distribution
gamma_i ~ exp(-beta*E_i) of a :class:`GibbsContext`:

* beta-ordering (sort levels by p_i/gamma_i),
* the embedding map into D rational microstates,
* piecewise-linear (thermo)majorisation curves,
* the thermomajorisation partial order and its lattice join,
* Gibbs-preserving / bistochastic matrix checks.

Matrix convention: stochastic matrices act on column probability vectors and
have unit *column* sums (q = M @ p).  Some references state the transposed
(row-stochastic) convention; all checks in this module are column-stochastic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

SUM_TOL = 1e-12
CMP_TOL = 1e-12
GP_TOL = 1e-10
EMBED_TOL = 1e-9
MAX_DENOMINATOR = 10**6


def as_distribution(p, *, allow_negative: bool = False, tol: float = SUM_TOL) -> np.ndarray:
    """Validate and return a probability vector as a float array.

    With ``allow_negative`` the vector may be a quasi-probability
    distribution: entries of either sign, still summing to one.
    """
    arr = np.asarray(p, dtype=float).ravel()
    if arr.size < 1:
        raise ValueError("distribution must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError("distribution entries must be finite")
    if not allow_negative and np.min(arr) < -tol:
        raise ValueError(f"negative entry {np.min(arr)} in probability vector")
    total = float(arr.sum())
    if abs(total - 1.0) > max(tol, 1e-12 * arr.size):
        raise ValueError(f"distribution sums to {total}, expected 1")
    if not allow_negative:
        arr = np.clip(arr, 0.0, None)
    return arr


def sharp_state(d: int, k: int) -> np.ndarray:
    """Deterministic distribution concentrated on level ``k`` (0-based)."""
    s = np.zeros(d)
    s[k] = 1.0
    return s


def uniform_state(d: int) -> np.ndarray:
    return np.full(d, 1.0 / d)


def gibbs_distribution(energies, beta: float) -> np.ndarray:
    """Thermal distribution gamma_i ~ exp(-beta E_i), normalised."""
    e = np.asarray(energies, dtype=float)
    if beta < 0:
        raise ValueError("inverse temperature must be non-negative")
    w = np.exp(-beta * (e - e.min()))  # shift for numerical stability
    return w / w.sum()


def rational_embedding(gamma, tol: float = EMBED_TOL, max_denominator: int = MAX_DENOMINATOR):
    """Find integers (D, D_1..D_d) with D_i/D close to gamma_i and sum(D_i)=D.

    Returns the smallest denominator D <= max_denominator achieving
    max_i |D_i/D - gamma_i| <= tol, or, if none does, the best D found
    (largest-remainder apportionment guarantees the exact sum).
    """
    g = np.asarray(gamma, dtype=float)
    d = g.size
    best = None
    chunk = 65536
    lo = 1
    while lo <= max_denominator:
        hi = min(lo + chunk - 1, max_denominator)
        ds = np.arange(lo, hi + 1)
        counts = np.rint(g[None, :] * ds[:, None])
        ok_sum = counts.sum(axis=1) == ds
        err = np.abs(counts / ds[:, None] - g[None, :]).max(axis=1)
        good = ok_sum & (err <= tol) & (counts > 0).all(axis=1)
        if np.any(good):
            i = int(np.argmax(good))
            return int(ds[i]), tuple(int(c) for c in counts[i]), float(err[i])
        cand = ok_sum & (counts > 0).all(axis=1)
        if np.any(cand):
            errs = np.where(cand, err, np.inf)
            i = int(np.argmin(errs))
            if best is None or errs[i] < best[2]:
                best = (int(ds[i]), tuple(int(c) for c in counts[i]), float(errs[i]))
        lo = hi + 1
    if best is not None:
        return best
    # largest-remainder fallback at the cap
    D = max_denominator
    raw = g * D
    counts = np.floor(raw).astype(int)
    counts = np.maximum(counts, 1)
    rem = D - counts.sum()
    order = np.argsort(-(raw - np.floor(raw)))
    for j in range(abs(int(rem))):
        counts[order[j % d]] += 1 if rem > 0 else -1
    err = float(np.abs(counts / D - g).max())
    return D, tuple(int(c) for c in counts), err


@dataclass(frozen=True)
class GibbsContext:
    """Energy spectrum, inverse temperature and the Gibbs vector they define.

    ``embed_denominator`` and ``embed_counts`` give the rational approximation
    gamma_i ~= D_i/D used by the embedding map; ``embed_error`` records the
    accuracy actually achieved.
    """

    energies: tuple
    beta: float
    gamma: np.ndarray = field(repr=False)
    embed_denominator: int
    embed_counts: tuple
    embed_error: float

    @classmethod
    def build(cls, energies, beta: float, embed_tol: float = EMBED_TOL,
              max_denominator: int = MAX_DENOMINATOR) -> "GibbsContext":
        gamma = gibbs_distribution(energies, beta)
        D, counts, err = rational_embedding(gamma, embed_tol, max_denominator)
        return cls(tuple(float(e) for e in np.atleast_1d(energies)), float(beta),
                   gamma, D, counts, err)

    @property
    def dim(self) -> int:
        return self.gamma.size

    def check_state(self, p) -> np.ndarray:
        arr = as_distribution(p)
        if arr.size != self.dim:
            raise ValueError(f"state has {arr.size} levels, context has {self.dim}")
        return arr


def trivial_context(d: int) -> GibbsContext:
    """Degenerate spectrum: gamma is uniform and thermomajorisation is majorisation."""
    return GibbsContext.build(np.zeros(d), 0.0)


@dataclass(frozen=True)
class BetaOrder:
    """Permutation sorting p_i/gamma_i non-increasingly.

    ``order[k]`` is the original index occupying sorted position k
    (this is pi^{-1} in the usual permutation notation), ``perm[i]`` the
    sorted position of original index i, and ``sorted`` the beta-ordered
    vector p[order].
    """

    order: tuple
    perm: tuple
    sorted: np.ndarray = field(repr=False)


def beta_order(p, ctx: GibbsContext) -> BetaOrder:
    """Beta-ordering of ``p``: sort ratios p_i/gamma_i non-increasingly.

    Ties are broken by ascending original index, so the result is
    deterministic (p = gamma maps to the identity permutation).
    """
    arr = ctx.check_state(p)
    ratios = arr / ctx.gamma
    order = np.argsort(-ratios, kind="stable")
    perm = np.empty_like(order)
    perm[order] = np.arange(order.size)
    return BetaOrder(tuple(int(i) for i in order), tuple(int(i) for i in perm), arr[order])


def embed(p, ctx: GibbsContext) -> np.ndarray:
    """Embedding map: repeat p_i/D_i exactly D_i times (dimension D).

    Converts thermomajorisation w.r.t. gamma into plain majorisation of the
    embedded vectors; gamma itself embeds to the uniform distribution.
    """
    arr = ctx.check_state(p)
    counts = np.asarray(ctx.embed_counts)
    if np.any(counts == 0):
        raise ValueError("embedding has an empty block (D_i = 0)")
    return np.repeat(arr / counts, counts)


@dataclass(frozen=True)
class ThermoCurve:
    """Piecewise-linear concave curve through (0,0) and (1,1), given by elbows."""

    xs: np.ndarray
    ys: np.ndarray

    def value(self, x):
        """Linear interpolation between elbows; domain is [0, 1]."""
        x = np.asarray(x, dtype=float)
        if np.any(x < -1e-15) or np.any(x > 1 + 1e-15):
            raise ValueError("curve argument outside [0, 1]")
        return np.interp(np.clip(x, 0.0, 1.0), self.xs, self.ys)

    @property
    def elbows(self):
        return list(zip(self.xs.tolist(), self.ys.tolist()))


def curve_from_sorted(weights, widths) -> ThermoCurve:
    """Curve with segment slopes weights/widths, starting at the origin.

    No sorting is applied; callers pass beta-ordered (or otherwise already
    arranged) entries.  Quasi-probability entries are allowed.
    """
    w = np.asarray(weights, dtype=float)
    dx = np.asarray(widths, dtype=float)
    xs = np.concatenate(([0.0], np.cumsum(dx)))
    ys = np.concatenate(([0.0], np.cumsum(w)))
    xs[-1] = 1.0
    return ThermoCurve(xs, ys)


def thermo_curve(p, ctx: GibbsContext) -> ThermoCurve:
    """Thermomajorisation curve of ``p``: elbows at (sum gamma^beta, sum p^beta).

    At beta = 0 this reduces to the ordinary majorisation (Lorenz) curve with
    x-steps of 1/d.
    """
    ordering = beta_order(p, ctx)
    return curve_from_sorted(ordering.sorted, ctx.gamma[list(ordering.order)])


def curve_dominates(cp: ThermoCurve, cq: ThermoCurve, tol: float = CMP_TOL) -> bool:
    """True iff curve ``cp`` lies above ``cq`` (within tol) everywhere.

    For piecewise-linear concave curves it suffices to compare on the union
    of both elbow x-sets.
    """
    xs = np.union1d(cp.xs, cq.xs)
    return bool(np.all(cp.value(xs) >= cq.value(xs) - tol))


def thermomajorises(p, q, ctx: GibbsContext, tol: float = CMP_TOL) -> bool:
    """Decide p >=_beta q: p's thermomajorisation curve is nowhere below q's."""
    return curve_dominates(thermo_curve(p, ctx), thermo_curve(q, ctx), tol)


def majorises(p, q, tol: float = CMP_TOL) -> bool:
    """Plain majorisation p >= q via sorted prefix sums (beta = 0)."""
    ps = np.cumsum(np.sort(as_distribution(p))[::-1])
    qs = np.cumsum(np.sort(as_distribution(q))[::-1])
    if ps.size != qs.size:
        raise ValueError("dimension mismatch")
    return bool(np.all(ps >= qs - tol))


def _concave_majorant(xs, ys):
    """Upper convex hull of the points (xs, ys); xs strictly increasing."""
    hx, hy = [], []
    for x, y in zip(xs, ys):
        hx.append(x)
        hy.append(y)
        while len(hx) >= 3:
            # drop the middle point if it lies below the chord
            cross = (hx[-1] - hx[-3]) * (hy[-2] - hy[-3]) - (hy[-1] - hy[-3]) * (hx[-2] - hx[-3])
            if cross <= 1e-18:
                del hx[-2], hy[-2]
            else:
                break
    return np.asarray(hx), np.asarray(hy)


def join_curve(p, q, ctx: GibbsContext) -> ThermoCurve:
    """Curve of the least upper bound of p and q in the thermomajorisation order.

    Upper envelope of both curves on the union of their elbows, then the least
    concave majorant of those points (at most d-1 flattening events per input
    curve).  Any state s with s >=_beta p and s >=_beta q has its curve above
    this one.
    """
    cp = thermo_curve(p, ctx)
    cq = thermo_curve(q, ctx)
    xs = np.union1d(cp.xs, cq.xs)
    ys = np.maximum(cp.value(xs), cq.value(xs))
    hx, hy = _concave_majorant(xs, ys)
    return ThermoCurve(hx, hy)


def majorisation_join(p, q, ctx: GibbsContext, chamber_scan_limit: int = 8):
    """Least upper bound of p and q under thermomajorisation.

    At beta = 0 the join always exists in the original simplex and a
    d-dimensional vector is returned.  At finite beta the join curve is first
    searched for a realisation in one of the d! beta-order chambers (for
    d <= ``chamber_scan_limit``); failing that, the join is returned in the
    embedded picture as a D-dimensional vector whose ordinary majorisation
    curve equals the join curve.
    """
    jc = join_curve(p, q, ctx)
    d = ctx.dim
    g = ctx.gamma
    if float(ctx.beta) == 0.0 or np.ptp(g) < 1e-15:
        grid = np.arange(1, d + 1) / d
        return np.diff(np.concatenate(([0.0], jc.value(grid))))
    if d <= chamber_scan_limit:
        for order in permutations(range(d)):
            grid = np.cumsum(g[list(order)])
            grid[-1] = 1.0
            cand_sorted = np.diff(np.concatenate(([0.0], jc.value(grid))))
            # chamber-consistent and reproducing every join elbow
            ratios = cand_sorted / g[list(order)]
            if np.any(np.diff(ratios) > 1e-10):
                continue
            cand_curve = curve_from_sorted(cand_sorted, g[list(order)])
            if np.max(np.abs(cand_curve.value(jc.xs) - jc.ys)) < 1e-11:
                r = np.empty(d)
                r[list(order)] = cand_sorted
                return r
    D = ctx.embed_denominator
    grid = np.arange(1, D + 1) / D
    return np.diff(np.concatenate(([0.0], jc.value(grid))))


def is_stochastic(M, tol: float = SUM_TOL) -> bool:
    """Column-stochastic check: non-negative entries, unit column sums."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    return bool(np.min(M) >= -tol and np.allclose(M.sum(axis=0), 1.0, atol=max(tol, 1e-12)))


def is_gibbs_preserving(M, ctx: GibbsContext, tol: float = GP_TOL) -> bool:
    """True iff M is stochastic and leaves gamma invariant (M gamma = gamma)."""
    M = np.asarray(M, dtype=float)
    if not is_stochastic(M, tol):
        return False
    if M.shape[0] != ctx.dim:
        raise ValueError("matrix dimension does not match context")
    return bool(np.allclose(M @ ctx.gamma, ctx.gamma, atol=tol))


def is_bistochastic(M, tol: float = GP_TOL) -> bool:
    M = np.asarray(M, dtype=float)
    return is_stochastic(M, tol) and bool(np.allclose(M.sum(axis=1), 1.0, atol=tol))


def relative_entropy(p, q) -> float:
    """Kullback-Leibler divergence D(p||q) in nats, with 0 log 0 := 0."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return float("inf")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))
