"""Cheap nonnegative rank-2 approximation by angle clipping.

The relaxed objective separates into two univariate piecewise-trigonometric
costs, one per clipping angle. Each is minimized exactly by scanning the
breakpoint subintervals of its restricted search range: on every subinterval
the cost is ``c + a cos^2(theta) + b sin(2 theta) / 2`` with coefficients
maintained in O(1) per breakpoint, giving a closed-form stationary point per
subinterval. The cost is unimodal, so the scan stops at the first stationary
point that falls inside its own subinterval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import (
    AngularForm,
    Rank2Nmf,
    alpha_midpoints,
    alpha_nmf,
    is_nonnegative_rank2,
    ratio_stats,
    to_angular,
)
from .linalg import as_matrix, svd2

_HALF_PI = 0.5 * np.pi
_SLACK = 1e-13


@dataclass
class ThetaSolution:
    """Global minimizer of one clipping cost on [0, pi/2]."""

    theta: float
    f_value: float
    intervals_scanned: int


def clip_cost(theta: float, psi, phi, d_u, d_v) -> float:
    """Direct evaluation of the first clipping cost at ``theta``:
    weighted squared sines of the amounts by which row angles undershoot
    ``theta - pi/2`` and column angles overshoot ``theta``."""
    under = np.maximum(0.0, theta - _HALF_PI - np.asarray(psi))
    over = np.maximum(0.0, np.asarray(phi) - theta)
    return float(
        np.asarray(d_u) ** 2 @ np.sin(under) ** 2
        + np.asarray(d_v) ** 2 @ np.sin(over) ** 2
    )


def solve_theta(psi, phi, d_u, d_v) -> ThetaSolution:
    """Exact global minimizer of the first clipping cost over [0, pi/2].

    The second cost is the same function with the roles of the two sides
    swapped: solve it via ``solve_theta(phi, psi, d_v, d_u)``.

    The search is restricted to [min(psi) + pi/2, max(phi)], outside of which
    the cost is monotone. When that interval is empty the cost has a flat
    zero region (nothing needs clipping on this side) and its midpoint is
    returned.
    """
    psi = np.asarray(psi, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    du2 = np.asarray(d_u, dtype=np.float64) ** 2
    dv2 = np.asarray(d_v, dtype=np.float64) ** 2

    lo = float(psi.min() + _HALF_PI)
    hi = float(phi.max())
    if hi <= lo:
        # Flat zero region [hi, lo] intersected with [0, pi/2].
        z_lo = min(max(hi, 0.0), _HALF_PI)
        z_hi = max(min(lo, _HALF_PI), 0.0)
        theta = 0.5 * (z_lo + z_hi)
        return ThetaSolution(theta=theta, f_value=0.0, intervals_scanned=0)
    lo = max(lo, 0.0)
    hi = min(hi, _HALF_PI)

    psi_c = psi + _HALF_PI
    # Per-term contributions to the interval coefficients (a, b, c).
    au = du2 * (1.0 - 2.0 * np.sin(psi) ** 2)
    bu = du2 * np.sin(2.0 * psi)
    cu = du2 * np.sin(psi) ** 2
    av = dv2 * (1.0 - 2.0 * np.cos(phi) ** 2)
    bv = -dv2 * np.sin(2.0 * phi)
    cv = dv2 * np.cos(phi) ** 2

    deltas: dict[float, np.ndarray] = {}
    inside_u = (psi_c > lo) & (psi_c < hi)
    for i in np.flatnonzero(inside_u):
        d = deltas.setdefault(float(psi_c[i]), np.zeros(3))
        d += (au[i], bu[i], cu[i])
    inside_v = (phi > lo) & (phi < hi)
    for j in np.flatnonzero(inside_v):
        d = deltas.setdefault(float(phi[j]), np.zeros(3))
        d -= (av[j], bv[j], cv[j])
    points = sorted(set(deltas) | {lo, hi})

    act_u = psi_c <= lo
    act_v = phi > lo
    a = float(au[act_u].sum() + av[act_v].sum())
    b = float(bu[act_u].sum() + bv[act_v].sum())
    c = float(cu[act_u].sum() + cv[act_v].sum())

    best = None
    for k in range(len(points) - 1):
        left, right = points[k], points[k + 1]
        if k > 0:
            da, db, dc = deltas[left]
            a += da
            b += db
            c += dc
        if a == 0.0 and b == 0.0:
            cand = 0.5 * (left + right)
        elif a == 0.0:
            cand = 0.25 * np.pi
        else:
            x = b / a
            cand = 0.5 * (np.arctan(x) + (np.pi if x < 0.0 else 0.0))
        if left - _SLACK <= cand <= right + _SLACK:
            best = (float(cand), k + 1)
            break
    if best is None:
        # Numerical corner: fall back to the best breakpoint.
        vals = [clip_cost(t, psi, phi, np.sqrt(du2), np.sqrt(dv2)) for t in points]
        k = int(np.argmin(vals))
        best = (points[k], len(points) - 1)
    theta, scanned = best
    f_val = clip_cost(theta, psi, phi, np.sqrt(du2), np.sqrt(dv2))
    return ThetaSolution(theta=theta, f_value=f_val, intervals_scanned=scanned)


def clip_angles(a: AngularForm, theta1: float, theta2: float) -> AngularForm:
    """Clip the angles into the feasible bands for (theta1, theta2) and
    rescale the weights by the cosine of the clipping distance, which is the
    exact one-dimensional least-squares optimum for each row/column."""
    psi_hat = np.clip(a.psi, theta1 - _HALF_PI, theta2)
    phi_hat = np.clip(a.phi, theta2 - _HALF_PI, theta1)
    du_hat = a.d_u * np.cos(a.psi - psi_hat)
    dv_hat = a.d_v * np.cos(a.phi - phi_hat)
    return AngularForm(psi=psi_hat, phi=phi_hat, d_u=du_hat, d_v=dv_hat)


def qdr(n, svd_tol: float = 1e-11, svd_max_iter: int = 5000) -> Rank2Nmf:
    """Quadrant algorithm: nonnegative rank-2 approximation by angle clipping.

    Pipeline: scaled rank-2 SVD, angular form, exact minimization of the two
    clipping costs, clip and rescale, then an exact nonnegative factorization
    of the clipped matrix at the midpoint angle parameters. A rank-1 input
    short-circuits to its trivially nonnegative factorization, and an input
    whose rank-2 truncation is already nonnegative is factored exactly.

    Zero rows/columns are stripped up front and come back as zero factor
    rows. A reducible input (one that splits into diagonal blocks) is best
    handled block by block via ``preprocess``.
    """
    mat = as_matrix(n)
    keep_rows = mat.max(axis=1) > 1e-12 * mat.max(initial=0.0)
    keep_cols = mat.max(axis=0) > 1e-12 * mat.max(initial=0.0)
    if not (keep_rows.all() and keep_cols.all()):
        core = qdr(mat[np.ix_(keep_rows, keep_cols)], svd_tol, svd_max_iter)
        l = np.zeros((mat.shape[0], 2))
        r = np.zeros((mat.shape[1], 2))
        l[keep_rows] = core.l
        r[keep_cols] = core.r
        return Rank2Nmf(l=l, r=r)
    s = svd2(mat, tol=svd_tol, max_iter=svd_max_iter)
    if s.sigma2 == 0.0:
        zero_l = np.zeros_like(s.u1_hat)
        zero_r = np.zeros_like(s.v1_hat)
        return Rank2Nmf(
            l=np.column_stack([s.u1_hat, zero_l]),
            r=np.column_stack([s.v1_hat, zero_r]),
        )
    stats = ratio_stats(s)
    if is_nonnegative_rank2(stats):
        form = to_angular(s)
        return alpha_nmf(form, *alpha_midpoints(form))
    form = to_angular(s)
    theta1 = solve_theta(form.psi, form.phi, form.d_u, form.d_v).theta
    theta2 = solve_theta(form.phi, form.psi, form.d_v, form.d_u).theta
    clipped = clip_angles(form, theta1, theta2)
    return alpha_nmf(clipped, *alpha_midpoints(clipped))
