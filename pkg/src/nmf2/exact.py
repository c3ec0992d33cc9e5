"""Exact rank-2 theory: the angular form of a rank-2 matrix with positive
dominant singular pair, nonnegativity tests on the extremal second-to-first
ratios, the complete (t1, t2) family of exact nonnegative factorizations,
its angle-parameter variant, uniqueness detection, and sign-pattern
validators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleAlpha, InputError, NonpositiveDominant, OutOfBox
from .linalg import ScaledSvd2, as_matrix

_CLAMP = 1e-12


@dataclass
class AngularForm:
    """Row/column angles and positive weights with
    ``M2[i, j] = d_u[i] * cos(psi[i] - phi[j]) * d_v[j]``.

    Angles live in the open interval ]-pi/2, pi/2[; the weights are the row
    norms of the scaled singular-vector blocks.
    """

    psi: np.ndarray
    phi: np.ndarray
    d_u: np.ndarray
    d_v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        gaps = self.psi[:, None] - self.phi[None, :]
        return self.d_u[:, None] * np.cos(gaps) * self.d_v[None, :]


@dataclass
class RatioStats:
    """Extremal entrywise ratios u2_hat/u1_hat and v2_hat/v1_hat."""

    min_u: float
    max_u: float
    min_v: float
    max_v: float


@dataclass
class TBox:
    """Feasible rectangle of (t1, t2) for the exact rank-2 family:
    ``max_v <= t1 <= -1/min_u`` and ``max_u <= t2 <= -1/min_v``."""

    t1_lo: float
    t1_hi: float
    t2_lo: float
    t2_hi: float

    def contains(self, t1: float, t2: float, slack: float = _CLAMP) -> bool:
        return (
            self.t1_lo - slack <= t1 <= self.t1_hi + slack
            and self.t2_lo - slack <= t2 <= self.t2_hi + slack
        )

    def midpoint(self) -> tuple[float, float]:
        return 0.5 * (self.t1_lo + self.t1_hi), 0.5 * (self.t2_lo + self.t2_hi)


@dataclass
class Rank2Nmf:
    """Nonnegative factor pair with ``l @ r.T`` reconstructing the input."""

    l: np.ndarray
    r: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.l @ self.r.T


def to_angular(s: ScaledSvd2) -> AngularForm:
    """Angular form of the rank-2 matrix carried by a scaled SVD.

    Requires strictly positive dominant vectors and sigma2 > 0. Angles come
    from the two-argument arctangent of (second, first) entries, weights are
    the row norms.
    """
    if s.sigma2 <= 0.0:
        raise InputError("angular form needs two nonzero singular values")
    if s.u1_hat.min() <= 0.0 or s.v1_hat.min() <= 0.0:
        raise NonpositiveDominant("dominant singular vectors must be strictly positive")
    psi = np.arctan2(s.u2_hat, s.u1_hat)
    phi = np.arctan2(s.v2_hat, s.v1_hat)
    d_u = np.hypot(s.u1_hat, s.u2_hat)
    d_v = np.hypot(s.v1_hat, s.v2_hat)
    return AngularForm(psi=psi, phi=phi, d_u=d_u, d_v=d_v)


def ratio_stats(s: ScaledSvd2) -> RatioStats:
    """Extremal ratios of second to first scaled singular vectors."""
    if s.u1_hat.min() <= 0.0 or s.v1_hat.min() <= 0.0:
        raise NonpositiveDominant("dominant singular vectors must be strictly positive")
    qu = s.u2_hat / s.u1_hat
    qv = s.v2_hat / s.v1_hat
    return RatioStats(
        min_u=float(qu.min()),
        max_u=float(qu.max()),
        min_v=float(qv.min()),
        max_v=float(qv.max()),
    )


def is_nonnegative_rank2(stats: RatioStats, tol: float = _CLAMP) -> bool:
    """Whether the underlying rank-2 matrix is entrywise nonnegative.

    Holds exactly when both cross products of extremal ratios are >= -1.
    """
    return (
        stats.max_u * stats.min_v >= -1.0 - tol
        and stats.min_u * stats.max_v >= -1.0 - tol
    )


def tbox(stats: RatioStats) -> TBox | None:
    """Feasible (t1, t2) rectangle, or None when the matrix is not nonnegative."""
    if not is_nonnegative_rank2(stats):
        return None
    t1_hi = -1.0 / stats.min_u if stats.min_u < 0.0 else np.inf
    t2_hi = -1.0 / stats.min_v if stats.min_v < 0.0 else np.inf
    return TBox(t1_lo=stats.max_v, t1_hi=t1_hi, t2_lo=stats.max_u, t2_hi=t2_hi)


def is_unique(stats: RatioStats, tol: float = 1e-9) -> bool:
    """Whether the nonnegative factorization is unique up to scaling and
    permutation, i.e. both t-intervals collapse to single points."""
    return (
        abs(stats.max_u * stats.min_v + 1.0) <= tol
        and abs(stats.max_v * stats.min_u + 1.0) <= tol
    )


def exact_nmf(s: ScaledSvd2, t1: float, t2: float, check_box: bool = True) -> Rank2Nmf:
    """Member (t1, t2) of the family of exact nonnegative factorizations.

    ``L = [u1_hat + t1 u2_hat, t2 u1_hat - u2_hat]`` and
    ``R = [v1_hat + t2 v2_hat, t1 v1_hat - v2_hat] / (1 + t1 t2)``, so that
    ``L @ R.T`` reproduces the rank-2 matrix exactly for any parameters. The
    factors are nonnegative precisely when (t1, t2) lies in the feasible box;
    with ``check_box`` (the default) points outside raise OutOfBox and tiny
    negative entries are clamped to zero. ``check_box=False`` returns the raw
    transform, useful for probing feasibility.
    """
    if check_box:
        stats = ratio_stats(s)
        box = tbox(stats)
        if box is None or not box.contains(t1, t2):
            raise OutOfBox(f"(t1, t2) = ({t1:g}, {t2:g}) outside the feasible box")
    l = np.column_stack([s.u1_hat + t1 * s.u2_hat, t2 * s.u1_hat - s.u2_hat])
    r = np.column_stack([s.v1_hat + t2 * s.v2_hat, t1 * s.v1_hat - s.v2_hat])
    r /= 1.0 + t1 * t2
    if check_box:
        l[(l < 0.0) & (l > -_CLAMP * max(1.0, np.abs(l).max()))] = 0.0
        r[(r < 0.0) & (r > -_CLAMP * max(1.0, np.abs(r).max()))] = 0.0
    return Rank2Nmf(l=l, r=r)


def alpha_intervals(a: AngularForm) -> tuple[float, float, float, float]:
    """Feasible intervals (lo1, hi1, lo2, hi2) for the angle parameters."""
    lo1, hi1 = float(a.phi.max()), float(a.psi.min() + np.pi / 2)
    lo2, hi2 = float(a.psi.max()), float(a.phi.min() + np.pi / 2)
    return lo1, hi1, lo2, hi2


def alpha_midpoints(a: AngularForm) -> tuple[float, float]:
    lo1, hi1, lo2, hi2 = alpha_intervals(a)
    return 0.5 * (lo1 + hi1), 0.5 * (lo2 + hi2)


def alpha_nmf(a: AngularForm, alpha1: float, alpha2: float) -> Rank2Nmf:
    """Exact nonnegative factorization in angle parameters.

    ``L = D_u [cos(alpha1 - psi), sin(alpha2 - psi)] / sqrt(cos(alpha2 - alpha1))``
    and symmetrically for R, which keeps the two factor norms balanced.
    Feasible parameters satisfy ``max(phi) <= alpha1 <= min(psi) + pi/2`` and
    ``max(psi) <= alpha2 <= min(phi) + pi/2``.
    """
    lo1, hi1, lo2, hi2 = alpha_intervals(a)
    slack = 1e-12
    if lo1 > hi1 + slack or lo2 > hi2 + slack:
        raise InfeasibleAlpha("angle intervals are empty: matrix is not nonnegative")
    if not (lo1 - slack <= alpha1 <= hi1 + slack and lo2 - slack <= alpha2 <= hi2 + slack):
        raise InfeasibleAlpha(
            f"alpha=({alpha1:g}, {alpha2:g}) outside [{lo1:g}, {hi1:g}] x [{lo2:g}, {hi2:g}]"
        )
    gap = np.cos(alpha2 - alpha1)
    if gap <= 0.0:
        raise InfeasibleAlpha("alpha2 - alpha1 must lie strictly inside ]-pi/2, pi/2[")
    root = np.sqrt(gap)
    l = a.d_u[:, None] * np.column_stack([np.cos(alpha1 - a.psi), np.sin(alpha2 - a.psi)]) / root
    r = a.d_v[:, None] * np.column_stack([np.cos(alpha2 - a.phi), np.sin(alpha1 - a.phi)]) / root
    for f in (l, r):
        f[(f < 0.0) & (f > -_CLAMP * max(1.0, np.abs(f).max()))] = 0.0
    return Rank2Nmf(l=l, r=r)


def staircase_check(m2, a: AngularForm, tol: float = 1e-9) -> bool:
    """Validate the sign pattern of a rank-2 matrix in angle order.

    Rows are sorted by psi descending and columns by phi descending; then
    every negative entry must fill a staircase corner (upper-right or
    lower-left together with everything between it and that corner), and for
    a nonnegative matrix the zero entries must form rectangular corner
    blocks with everything else positive.

    The angular form must reproduce ``m2``; otherwise the rank-2 premise is
    violated and InputError is raised.
    """
    mat = as_matrix(m2)
    scale = float(np.abs(mat).max())
    if np.abs(a.reconstruct() - mat).max() > max(tol, 1e-8) * scale:
        raise InputError("angular form does not reproduce the matrix (rank-2 premise violated)")

    order_r = np.argsort(-a.psi, kind="stable")
    order_c = np.argsort(-a.phi, kind="stable")
    s = mat[np.ix_(order_r, order_c)]
    band = tol * scale
    neg = s < -band
    if neg.any():
        if not _corner_closed(neg):
            return False
    else:
        zero = np.abs(s) <= band
        if zero.any() and not _zero_blocks_ok(zero):
            return False
    return True


def _corner_closed(neg: np.ndarray) -> bool:
    """Every flagged cell must be negative jointly with its whole upper-right
    or lower-left closure."""
    ur = np.logical_and.accumulate(
        np.logical_and.accumulate(neg[:, ::-1], axis=1)[:, ::-1], axis=0
    )
    ll = np.logical_and.accumulate(
        np.logical_and.accumulate(neg[::-1, :], axis=0)[::-1, :], axis=1
    )
    return bool(np.all(~neg | ur | ll))


def _zero_blocks_ok(zero: np.ndarray) -> bool:
    """Zeros of an angle-sorted nonnegative rank-2 matrix form (at most) one
    rectangle in the upper-right corner and one in the lower-left."""
    m, n = zero.shape
    ur_rows = np.flatnonzero(zero[:, n - 1])
    ur_cols = np.flatnonzero(zero[0, :])
    ur = np.zeros_like(zero)
    if ur_rows.size and ur_cols.size:
        depth = ur_rows.max() + 1
        start = ur_cols.min()
        ur[:depth, start:] = True
        if not zero[:depth, start:].all():
            return False
    ll_rows = np.flatnonzero(zero[:, 0])
    ll_cols = np.flatnonzero(zero[m - 1, :])
    ll = np.zeros_like(zero)
    if ll_rows.size and ll_cols.size:
        start = ll_rows.min()
        width = ll_cols.max() + 1
        ll[start:, :width] = True
        if not zero[start:, :width].all():
            return False
    return bool(np.all(~zero | ur | ll))
