"""Coherent thermal cones of a single qubit.

States are restricted to the real XZ cross-section of the Bloch ball (any y
component can be rotated away): rho = [[p, c], [c, 1-p]] with real coherence
c.  Thermal operations constrain the target coherence d through a square-root
bound in the populations; Gibbs-preserving channels are characterised by two
monotone radii R+- whose comparison splits the ball into future, incomparable
and past regions built from two disks.

The printed closed forms for the boundary populations are transcription-
ambiguous, so boundaries here are obtained by solving the saturated coherence
condition as a quadratic in the population (and by bisection for the past
boundary), then validated by substitution back into the condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QubitState:
    """Bloch-vector qubit with derived (p, c) = (ground population, real coherence)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.x**2 + self.y**2 + self.z**2 > 1.0 + 1e-12:
            raise ValueError("Bloch vector outside the unit ball")

    @property
    def p(self) -> float:
        return 0.5 * (1.0 + self.z)

    @property
    def c(self) -> float:
        return 0.5 * math.hypot(self.x, self.y)

    @classmethod
    def from_pc(cls, p: float, c: float) -> "QubitState":
        return cls(2.0 * c, 0.0, 2.0 * p - 1.0)


def _radicand(p: float, q: float, gamma: float) -> float:
    return (q * (1 - gamma) - gamma * (1 - p)) * (p * (1 - gamma) - gamma * (1 - q))


def to_coherence_bound(p: float, c: float, q: float, gamma: float) -> float:
    """Largest |d| reachable by thermal operations at target population q.

    bound = |c| sqrt([q(1-g) - g(1-p)][p(1-g) - g(1-q)]) / |p - g|.  It is
    zero for incoherent inputs (thermal operations are covariant) and zero
    whenever the populations alone are thermally unreachable.  The degenerate
    p = gamma case is resolved by its limit: unbounded off the thermal
    population, |c| sqrt(g(1-g)) at it.
    """
    if not (0.0 < gamma < 1.0):
        raise ValueError("thermal ground population must lie in (0, 1)")
    if abs(c) < 1e-300:
        return 0.0
    if abs(p - gamma) < 1e-12:
        if abs(q - gamma) < 1e-9:
            return abs(c) * math.sqrt(gamma * (1 - gamma))
        return math.inf
    rad = _radicand(p, q, gamma)
    if rad <= 0.0:
        return 0.0
    return abs(c) * math.sqrt(rad) / abs(p - gamma)


def to_future_membership(p: float, c: float, q: float, d: float, gamma: float,
                         tol: float = 1e-12) -> bool:
    """Thermal-operations reachability of (q, d) from (p, c): |d| <= bound(q).

    For incoherent pairs (c = d = 0) this coincides with two-level
    thermomajorisation of the populations.
    """
    return abs(d) <= to_coherence_bound(p, c, q, gamma) + tol


def to_future_boundary_q1(p: float, c: float, d: float, gamma: float):
    """Populations saturating the coherence condition at target coherence d.

    Roots of the quadratic  c^2 [q(1-g) - g(1-p)][p(1-g) - g(1-q)] =
    d^2 (p-g)^2  in q; returns (q_low, q_high), the edges of the reachable
    population band, or None when |d| exceeds the cone's coherence range.
    At d = +-c both roots merge at q = p.
    """
    a_comp = 1.0 - gamma
    aa = c * c * a_comp * gamma
    bb = c * c * ((1.0 - 2.0 * gamma * a_comp) * p - gamma)
    ee = c * c * gamma * (p - 1.0) * (a_comp * p - gamma) - d * d * (p - gamma) ** 2
    if aa == 0.0:
        return None
    disc = bb * bb - 4.0 * aa * ee
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    q_lo = (-bb - root) / (2.0 * aa)
    q_hi = (-bb + root) / (2.0 * aa)
    return (min(q_lo, q_hi), max(q_lo, q_hi))


def to_future_boundary_curve(p: float, c: float, gamma: float, n_points: int = 200):
    """Sampled future-cone boundary: arrays (d, q_low(d), q_high(d)) for d in [0, |c|]."""
    ds = np.linspace(0.0, abs(c), n_points)
    lows = np.empty(n_points)
    highs = np.empty(n_points)
    for i, d in enumerate(ds):
        roots = to_future_boundary_q1(p, c, float(d), gamma)
        if roots is None:
            lows[i] = highs[i] = math.nan
        else:
            lows[i], highs[i] = roots
    return ds, lows, highs


def past_membership(p: float, c: float, q: float, d: float, gamma: float,
                    tol: float = 1e-12) -> bool:
    """(q, d) can reach (p, c): the coherence condition with roles swapped."""
    return abs(c) <= to_coherence_bound(q, d, p, gamma) + tol


def past_boundary_q2(p: float, c: float, d: float, gamma: float) -> float | None:
    """Largest past-boundary population q2(d) located by bisection.

    Works on the swapped condition (p <-> q, c <-> d) instead of the
    ambiguous printed expression; returns None if no population at coherence
    d can reach (p, c).
    """
    def margin(q: float) -> float:
        bound = to_coherence_bound(q, d, p, gamma)
        return (bound - abs(c)) if math.isfinite(bound) else 1.0

    qs = np.linspace(0.0, 1.0, 401)
    vals = [margin(float(q)) for q in qs]
    best = None
    for k in range(len(qs) - 1):
        if (vals[k] >= 0) != (vals[k + 1] >= 0):
            lo, hi = float(qs[k]), float(qs[k + 1])
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if (margin(mid) >= 0) == (vals[k] >= 0):
                    lo = mid
                else:
                    hi = mid
            root = 0.5 * (lo + hi)
            best = root if best is None else max(best, root)
    return best


def bloch_boundary_root(q_of_d, d_lo: float, d_hi: float, tol: float = 1e-12):
    """Intersection of a boundary curve q(d) with the Bloch-ball surface.

    In (q, d) coordinates the pure-state boundary is d^2 = q(1 - q)
    (vanishing determinant); the crossing is located by bisection.
    """
    def excess(d: float) -> float:
        q = q_of_d(d)
        return d * d - q * (1.0 - q)

    lo, hi = d_lo, d_hi
    f_lo = excess(lo)
    if excess(hi) * f_lo > 0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) * f_lo > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class GPDisks:
    """Gibbs-preserving cone data: the monotone radii and the two disks."""

    r_plus: float
    r_minus: float
    radius_1: float
    radius_2: float
    centre_1: tuple
    centre_2: tuple


def gp_delta(state: QubitState, zeta: float) -> float:
    """delta(rho) = sqrt((z - zeta)^2 + (x^2 + y^2)(1 - zeta^2))."""
    return math.sqrt((state.z - zeta) ** 2 + (state.x**2 + state.y**2) * (1 - zeta**2))


def gp_monotones(state: QubitState, zeta: float) -> tuple[float, float]:
    """(R+, R-) = delta(rho) +- zeta z; neither increases under GP channels."""
    if not (0.0 <= zeta < 1.0):
        raise ValueError("zeta must lie in [0, 1)")
    delta = gp_delta(state, zeta)
    return delta + zeta * state.z, delta - zeta * state.z


def gp_qubit_cones(state: QubitState, zeta: float) -> GPDisks:
    """Disks D1, D2 whose intersection is the GP future cone of ``state``.

    R1 = (R- + zeta^2)/(1 - zeta^2) and R2 = (R+ - zeta^2)/(1 - zeta^2),
    centred on the z-axis at zeta(1 + R1) and zeta(1 - R2).  At zeta = 0
    (infinite temperature) both disks collapse onto the ball of the state's
    Bloch radius, the closure of its unitary orbit.
    """
    r_plus, r_minus = gp_monotones(state, zeta)
    r1 = (r_minus + zeta**2) / (1 - zeta**2)
    r2 = (r_plus - zeta**2) / (1 - zeta**2)
    return GPDisks(r_plus, r_minus, r1, r2,
                   (0.0, 0.0, zeta * (1 + r1)), (0.0, 0.0, zeta * (1 - r2)))


def gp_classify(target: QubitState, source: QubitState, zeta: float,
                tol: float = 1e-12) -> str:
    """Future/Past/Incomparable/Equivalent of ``target`` relative to ``source``.

    Reachable iff both monotones do not increase; mixed conditions give the
    incomparable region and the remainder of the ball is the past.
    """
    sp, sm = gp_monotones(source, zeta)
    tp, tm = gp_monotones(target, zeta)
    fwd = tp <= sp + tol and tm <= sm + tol
    bwd = sp <= tp + tol and sm <= tm + tol
    if fwd and bwd:
        return "Equivalent"
    if fwd:
        return "Future"
    if bwd:
        return "Past"
    return "Incomparable"


def gp_future_membership(target: QubitState, source: QubitState, zeta: float) -> bool:
    return gp_classify(target, source, zeta) in ("Future", "Equivalent")


def disk_membership(state: QubitState, disks: GPDisks) -> bool:
    """Point-in-both-disks check in the XZ plane, equivalent to the R+- conditions."""
    x, z = state.x, state.z
    in_1 = (x - disks.centre_1[0]) ** 2 + (z - disks.centre_1[2]) ** 2 <= disks.radius_1**2 + 1e-12
    in_2 = (x - disks.centre_2[0]) ** 2 + (z - disks.centre_2[2]) ** 2 <= disks.radius_2**2 + 1e-12
    return in_1 and in_2
