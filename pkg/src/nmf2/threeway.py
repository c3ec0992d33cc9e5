"""Three-way nonnegative factorizations N2 = L M R^T of a rank-2 matrix,
the symmetric specialization L M L^T, orthogonality defects of the outer
factors, and their corner-point minimization.

The four parameters (t1_lo, t1_hi, t2_lo, t2_hi) generalize the (t1, t2)
rectangle of the exact two-factor family: the first pair ranges over the t1
interval [max_v, -1/min_u] and the second over the t2 interval
[max_u, -1/min_v], and collapsing t_lo = t_hi on both sides recovers the
two-factor member with an identity middle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleAlpha, InfeasibleParams, InputError, NotSymmetric, ReducibleInput
from .exact import AngularForm, RatioStats, alpha_intervals, ratio_stats
from .linalg import ScaledSvd2, as_matrix, dominant_eig2

_SLACK = 1e-12


@dataclass
class ThreeWayParams:
    t1_lo: float
    t1_hi: float
    t2_lo: float
    t2_hi: float


@dataclass
class ThreeWayNmf:
    """Nonnegative triple (L, M, R) with ``l @ m_mid @ r.T`` reconstructing
    the rank-2 input. In symmetric outputs ``r`` aliases ``l``."""

    l: np.ndarray
    m_mid: np.ndarray
    r: np.ndarray
    params: ThreeWayParams

    def reconstruct(self) -> np.ndarray:
        return self.l @ self.m_mid @ self.r.T


@dataclass
class DefectReport:
    """Orthogonality defects |cos(angle between factor columns)| in [0, 1]."""

    def_l: float
    def_r: float


@dataclass
class DefectCorner:
    """Defect-minimizing corner of the parameter box, with the minimal
    defects and whether a zero defect is attainable on each side."""

    params: ThreeWayParams
    def_l: float
    def_r: float
    zero_defect_l: bool
    zero_defect_r: bool


def _inv2(a: np.ndarray) -> np.ndarray:
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if det == 0.0:
        raise InputError("singular 2x2 middle factor")
    return np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det


def _check_params(stats: RatioStats, p: ThreeWayParams) -> None:
    t1_hi_max = -1.0 / stats.min_u if stats.min_u < 0 else np.inf
    t2_hi_max = -1.0 / stats.min_v if stats.min_v < 0 else np.inf
    ok = (
        0.0 < p.t1_lo + _SLACK
        and stats.max_v <= p.t1_lo + _SLACK
        and p.t1_lo <= p.t1_hi + _SLACK
        and p.t1_hi <= t1_hi_max + _SLACK
        and 0.0 < p.t2_lo + _SLACK
        and stats.max_u <= p.t2_lo + _SLACK
        and p.t2_lo <= p.t2_hi + _SLACK
        and p.t2_hi <= t2_hi_max + _SLACK
    )
    if not ok:
        raise InfeasibleParams(
            f"params {p} violate [{stats.max_v:g}, {t1_hi_max:g}] x [{stats.max_u:g}, {t2_hi_max:g}]"
        )


def _clamp_tiny(a: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.abs(a).max()))
    a[(a < 0.0) & (a > -1e-12 * scale)] = 0.0
    return a


def threeway_nmf(s: ScaledSvd2, p: ThreeWayParams) -> ThreeWayNmf:
    """Member of the family of three-way nonnegative factorizations.

    ``L = [u1_hat u2_hat] T_L`` with ``T_L = [[1, t2_lo], [t1_hi, -1]]``
    normalized by ``sqrt(1 + t1_hi t2_lo)`` (an involution), ``R`` built the
    same way from (t1_lo, t2_hi) on the right side, and
    ``M = (T_R^T T_L)^{-1} >= 0``. Any feasible parameters reconstruct the
    input exactly with all three factors nonnegative.
    """
    stats = ratio_stats(s)
    _check_params(stats, p)
    t_l = np.array([[1.0, p.t2_lo], [p.t1_hi, -1.0]]) / np.sqrt(1.0 + p.t1_hi * p.t2_lo)
    t_r_t = np.array([[1.0, p.t2_hi], [p.t1_lo, -1.0]]) / np.sqrt(1.0 + p.t1_lo * p.t2_hi)
    u = np.column_stack([s.u1_hat, s.u2_hat])
    v = np.column_stack([s.v1_hat, s.v2_hat])
    l = _clamp_tiny(u @ t_l)
    r = _clamp_tiny(v @ t_r_t.T)
    m_mid = _clamp_tiny(_inv2(t_r_t @ t_l))
    return ThreeWayNmf(l=l, m_mid=m_mid, r=r, params=p)


@dataclass
class SymmetricEig2:
    """Scaled two-term eigendecomposition of a symmetric rank-2 matrix:
    ``N = u1_hat u1_hat^T + sign * u2_hat u2_hat^T`` with ``u1_hat >= 0``."""

    u1_hat: np.ndarray
    u2_hat: np.ndarray
    lam1: float
    lam2: float

    @property
    def sign(self) -> float:
        return 1.0 if self.lam2 >= 0 else -1.0


def eig2_scaled(n, tol: float = 1e-11, max_iter: int = 5000, sym_tol: float = 1e-10) -> SymmetricEig2:
    """Dominant-two scaled eigendecomposition of a symmetric nonnegative
    matrix of rank 2 (possibly indefinite). Raises NotSymmetric when the
    asymmetry exceeds ``sym_tol`` relative to the largest entry."""
    mat = as_matrix(n)
    scale = float(np.abs(mat).max())
    if float(np.abs(mat - mat.T).max()) > sym_tol * max(scale, 1e-300):
        raise NotSymmetric("input matrix is not symmetric within tolerance")
    lam, w = dominant_eig2(mat, tol=tol, max_iter=max_iter)
    lam1, lam2 = float(lam[0]), float(lam[1])
    if lam1 < 0.0:
        if lam2 > 0.0 and abs(lam1) - lam2 <= 1e-9 * abs(lam1):
            lam1, lam2 = lam2, lam1
            w = w[:, ::-1]
        else:
            raise InputError("a nonnegative symmetric matrix must have a positive dominant eigenvalue")
    u1 = w[:, 0].copy()
    if u1.sum() < 0:
        u1 = -u1
    if u1.min() < -1e-10:
        raise ReducibleInput("dominant eigenvector has mixed signs; split the input into blocks")
    np.clip(u1, 0.0, None, out=u1)
    if abs(lam2) <= lam1 * 1e-14:
        lam2 = 0.0
        u2 = np.zeros_like(u1)
    else:
        u2 = w[:, 1]
        mask = u1 > 0
        q = u2[mask] / u1[mask]
        if q.size and q.max() > -q.min():
            u2 = -u2
    return SymmetricEig2(
        u1_hat=u1 * np.sqrt(lam1),
        u2_hat=u2 * np.sqrt(abs(lam2)),
        lam1=lam1,
        lam2=lam2,
    )


def threeway_symmetric(eig, t_lo: float, t_hi: float) -> ThreeWayNmf:
    """Symmetric three-way factorization N2 = L M L^T.

    ``eig`` is a SymmetricEig2 (or a symmetric matrix, decomposed on the
    fly). ``T = [[1, t_lo], [t_hi, -1]] / sqrt(1 + t_lo t_hi)``, ``L`` is the
    scaled eigenvector block times T, and ``M = (T^T S T)^{-1}`` with
    ``S = diag(1, sign(lam2))``. Feasibility needs
    ``max_u <= t_lo <= t_hi <= -1/min_u``; in the indefinite case the middle
    factor is nonnegative exactly when additionally ``t_lo <= 1 <= t_hi``
    (always compatible, since the ratio bounds straddle 1 there).
    """
    if not isinstance(eig, SymmetricEig2):
        eig = eig2_scaled(eig)
    if eig.lam2 == 0.0:
        raise InputError("symmetric three-way factorization needs rank 2")
    if eig.u1_hat.min() <= 0.0:
        raise InputError("dominant eigenvector must be strictly positive")
    q = eig.u2_hat / eig.u1_hat
    max_u, min_u = float(q.max()), float(q.min())
    hi_max = -1.0 / min_u if min_u < 0 else np.inf
    if not (max_u <= t_lo + _SLACK and t_lo <= t_hi + _SLACK and t_hi <= hi_max + _SLACK):
        raise InfeasibleParams(f"(t_lo, t_hi)=({t_lo:g}, {t_hi:g}) outside [{max_u:g}, {hi_max:g}]")
    sign = eig.sign
    if sign < 0 and not (t_lo <= 1.0 + _SLACK and t_hi >= 1.0 - _SLACK):
        raise InfeasibleParams("indefinite case needs t_lo <= 1 <= t_hi for a nonnegative middle")
    t = np.array([[1.0, t_lo], [t_hi, -1.0]]) / np.sqrt(1.0 + t_lo * t_hi)
    l = _clamp_tiny(np.column_stack([eig.u1_hat, eig.u2_hat]) @ t)
    s_mat = np.diag([1.0, sign])
    m_mid = _clamp_tiny(_inv2(t.T @ s_mat @ t))
    params = ThreeWayParams(t1_lo=t_lo, t1_hi=t_hi, t2_lo=t_lo, t2_hi=t_hi)
    return ThreeWayNmf(l=l, m_mid=m_mid, r=l, params=params)


def gram_defect(factor: np.ndarray) -> float:
    """Orthogonality defect of a 2-column factor: the off-diagonal magnitude
    of the Gram matrix after unit-diagonal normalization."""
    g = factor.T @ factor
    denom = np.sqrt(g[0, 0] * g[1, 1])
    if denom == 0.0:
        raise InputError("factor has a zero column")
    return float(abs(g[0, 1]) / denom)


def _defects_from_params(p: ThreeWayParams, s1: float, s2: float) -> DefectReport:
    def_l = abs(s1 * p.t2_lo - s2 * p.t1_hi) / np.sqrt(
        (s1 + s2 * p.t1_hi**2) * (s2 + s1 * p.t2_lo**2)
    )
    def_r = abs(s1 * p.t1_lo - s2 * p.t2_hi) / np.sqrt(
        (s1 + s2 * p.t2_hi**2) * (s2 + s1 * p.t1_lo**2)
    )
    return DefectReport(def_l=float(def_l), def_r=float(def_r))


def defects(t: ThreeWayNmf, s: ScaledSvd2) -> DefectReport:
    """Closed-form orthogonality defects of the two outer factors."""
    return _defects_from_params(t.params, s.sigma1, s.sigma2)


def minimize_defects(s: ScaledSvd2) -> DefectCorner:
    """Corner of the parameter box minimizing both orthogonality defects.

    The left defect decreases in t1_hi and increases in t2_lo, so it is
    minimal at (t1_hi = -1/min_u, t2_lo = max_u); symmetrically the right
    defect is minimal at (t2_hi = -1/min_v, t1_lo = max_v). A zero defect is
    attained only when sigma1/sigma2 equals -1/(min max) on that side, i.e.
    when the corresponding lower bound on the singular-value ratio is tight.
    """
    stats = ratio_stats(s)
    if stats.min_u >= 0 or stats.min_v >= 0:
        raise InputError("defect minimization needs mixed-sign second singular vectors")
    p = ThreeWayParams(
        t1_lo=stats.max_v,
        t1_hi=-1.0 / stats.min_u,
        t2_lo=stats.max_u,
        t2_hi=-1.0 / stats.min_v,
    )
    ratio = s.sigma1 / s.sigma2
    rep = _defects_from_params(p, s.sigma1, s.sigma2)
    zero_l = abs(ratio + 1.0 / (stats.min_u * stats.max_u)) <= 1e-9 * ratio
    zero_r = abs(ratio + 1.0 / (stats.min_v * stats.max_v)) <= 1e-9 * ratio
    return DefectCorner(
        params=p,
        def_l=rep.def_l,
        def_r=rep.def_r,
        zero_defect_l=bool(zero_l),
        zero_defect_r=bool(zero_r),
    )


def alpha_threeway(
    a: AngularForm, a1_lo: float, a1_hi: float, a2_lo: float, a2_hi: float
) -> ThreeWayNmf:
    """Three-way factorization in angle parameters.

    ``L = D_u [cos(a1_hi - psi), sin(a2_lo - psi)]``,
    ``R = D_v [cos(a2_hi - phi), sin(a1_lo - phi)]``, and the middle factor
    is the 2x2 inverse of ``[[cos(a2_hi - a1_hi), sin(a2_lo - a2_hi)],
    [sin(a1_lo - a1_hi), cos(a2_lo - a1_lo)]]``. The parameters correspond
    to the t-parametrization through tangents.
    """
    lo1, hi1, lo2, hi2 = alpha_intervals(a)
    ok = (
        lo1 - _SLACK <= a1_lo <= a1_hi <= hi1 + _SLACK
        and lo2 - _SLACK <= a2_lo <= a2_hi <= hi2 + _SLACK
    )
    if not ok:
        raise InfeasibleAlpha(
            f"alpha bounds violate [{lo1:g}, {hi1:g}] and [{lo2:g}, {hi2:g}]"
        )
    l = a.d_u[:, None] * np.column_stack([np.cos(a1_hi - a.psi), np.sin(a2_lo - a.psi)])
    r = a.d_v[:, None] * np.column_stack([np.cos(a2_hi - a.phi), np.sin(a1_lo - a.phi)])
    core = np.array(
        [
            [np.cos(a2_hi - a1_hi), np.sin(a2_lo - a2_hi)],
            [np.sin(a1_lo - a1_hi), np.cos(a2_lo - a1_lo)],
        ]
    )
    m_mid = _clamp_tiny(_inv2(core))
    params = ThreeWayParams(
        t1_lo=float(np.tan(a1_lo)),
        t1_hi=float(np.tan(a1_hi)),
        t2_lo=float(np.tan(a2_lo)),
        t2_hi=float(np.tan(a2_hi)),
    )
    return ThreeWayNmf(l=_clamp_tiny(l), m_mid=m_mid, r=_clamp_tiny(r), params=params)


def with_unit_columns(t: ThreeWayNmf) -> ThreeWayNmf:
    """Rescale so both outer factors have unit-norm columns, absorbing the
    scales into the middle factor (the normalization under which defects are
    read off the Gram matrices)."""
    nl = np.linalg.norm(t.l, axis=0)
    nr = np.linalg.norm(t.r, axis=0)
    if nl.min() == 0.0 or nr.min() == 0.0:
        raise InputError("cannot normalize a factor with a zero column")
    m_mid = t.m_mid * np.outer(nl, nr)
    if t.r is t.l:
        l_hat = t.l / nl
        return ThreeWayNmf(l=l_hat, m_mid=m_mid, r=l_hat, params=t.params)
    return ThreeWayNmf(l=t.l / nl, m_mid=m_mid, r=t.r / nr, params=t.params)
