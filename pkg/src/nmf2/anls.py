"""Alternating nonnegative least squares for rank-2 approximation.

Each half-sweep solves its block exactly: with one factor fixed, the
problem decouples into independent two-variable nonnegative least-squares
rows, handled in closed form by the shared normal-equation kernel. The
driver supports four initializations (quadrant clipping, successive
projections, the nonnegative double-SVD split, and seeded random factors),
plus an averaged row-update variant that keeps symmetric inputs in exactly
symmetric factored form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFactor, InputError, NotSymmetric
from .exact import Rank2Nmf
from .linalg import as_matrix, dominant_eig2, nnls2, nnls2_gram, svd2
from .qdr import qdr
from .threeway import ThreeWayNmf

INIT_METHODS = ("qdr", "spa", "nndsvd", "random")


@dataclass
class AnlsConfig:
    epsilon: float = 1e-6
    max_iters: int = 500
    record_history: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive")
        if self.max_iters < 1:
            raise InputError("max_iters must be at least 1")


@dataclass
class AnlsResult:
    nmf: Rank2Nmf | ThreeWayNmf
    iters: int
    final_residual: float
    converged: bool
    objective_history: list[float] = field(default_factory=list)


def residual(prev: Rank2Nmf, new: Rank2Nmf) -> float:
    """Relative row-change between consecutive iterates: the sum over all
    rows of both factors of ||row_new - row_prev|| / ||row_new||, with
    zero-norm new rows contributing 0."""
    total = 0.0
    for a, b in ((prev.r, new.r), (prev.l, new.l)):
        diff = np.linalg.norm(b - a, axis=1)
        norms = np.linalg.norm(b, axis=1)
        good = norms > 0
        total += float((diff[good] / norms[good]).sum())
    return total


# ---------------------------------------------------------------------------
# Initializations
# ---------------------------------------------------------------------------

def init_qdr(n) -> Rank2Nmf:
    """Quadrant-clipping initialization (already a feasible approximation)."""
    return qdr(n)


def init_spa(n) -> Rank2Nmf:
    """Successive projection anchors: the largest column, then the largest
    residual column after projecting out the first. The anchors become L and
    the coefficients are fitted columnwise. Falls back to a rank-1 pair when
    no independent second direction exists."""
    mat = as_matrix(n)
    norms = np.linalg.norm(mat, axis=0)
    j1 = int(norms.argmax())
    a1 = mat[:, j1]
    a1_sq = float(a1 @ a1)
    if a1_sq == 0.0:
        raise InputError("SPA needs a nonzero matrix")
    resid = mat - np.outer(a1, a1 @ mat) / a1_sq
    rnorms = np.linalg.norm(resid, axis=0)
    j2 = int(rnorms.argmax())
    scale = float(np.linalg.norm(mat))
    if rnorms[j2] <= 1e-12 * scale:
        l = np.column_stack([a1, np.zeros_like(a1)])
        r = np.column_stack([mat.T @ a1 / a1_sq, np.zeros(mat.shape[1])])
        return Rank2Nmf(l=l, r=r)
    l = np.column_stack([a1, mat[:, j2]])
    r = nnls2_gram(l.T @ l, l.T @ mat).T
    return Rank2Nmf(l=l, r=np.ascontiguousarray(r))


def init_nndsvd(n) -> Rank2Nmf:
    """Nonnegative double-SVD initialization for rank 2: the nonnegative
    dominant pair as-is, and the heavier sign section of the second pair,
    rescaled to carry the energy of the second singular value."""
    s = svd2(as_matrix(n))
    l = np.column_stack([s.u1_hat, np.zeros_like(s.u1_hat)])
    r = np.column_stack([s.v1_hat, np.zeros_like(s.v1_hat)])
    if s.sigma2 > 0.0:
        u2 = s.u2_hat / np.sqrt(s.sigma2)
        v2 = s.v2_hat / np.sqrt(s.sigma2)
        up, un = np.maximum(u2, 0.0), np.maximum(-u2, 0.0)
        vp, vn = np.maximum(v2, 0.0), np.maximum(-v2, 0.0)
        mass_p = np.linalg.norm(up) * np.linalg.norm(vp)
        mass_n = np.linalg.norm(un) * np.linalg.norm(vn)
        if mass_p >= mass_n:
            u_sec, v_sec, mass = up, vp, mass_p
        else:
            u_sec, v_sec, mass = un, vn, mass_n
        if mass > 0.0:
            lam = np.sqrt(s.sigma2 * mass)
            l[:, 1] = lam * u_sec / np.linalg.norm(u_sec)
            r[:, 1] = lam * v_sec / np.linalg.norm(v_sec)
    return Rank2Nmf(l=l, r=r)


def init_random(n, seed=None) -> Rank2Nmf:
    """Uniform [0, 1) factors scaled so the product matches the input's
    Frobenius norm; fully reproducible under a fixed seed."""
    mat = as_matrix(n)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    l = rng.random((mat.shape[0], 2))
    r = rng.random((mat.shape[1], 2))
    prod_norm = float(np.linalg.norm(l @ r.T))
    if prod_norm > 0.0:
        c = np.sqrt(float(np.linalg.norm(mat)) / prod_norm)
        l *= c
        r *= c
    return Rank2Nmf(l=l, r=r)


def materialize_init(n, init, seed=None) -> Rank2Nmf:
    if isinstance(init, Rank2Nmf):
        return Rank2Nmf(l=init.l.copy(), r=init.r.copy())
    if isinstance(init, (tuple, list)) and len(init) == 2:
        return Rank2Nmf(l=np.array(init[0], dtype=float), r=np.array(init[1], dtype=float))
    if init == "qdr":
        return init_qdr(n)
    if init == "spa":
        return init_spa(n)
    if init == "nndsvd":
        return init_nndsvd(n)
    if init == "random":
        return init_random(n, seed)
    raise InputError(f"unknown init {init!r}; expected one of {INIT_METHODS} or explicit factors")


# ---------------------------------------------------------------------------
# The alternating driver
# ---------------------------------------------------------------------------

def _update_right(mat, l):
    return nnls2_gram(l.T @ l, l.T @ mat).T.copy()


def _update_left(mat, r):
    return nnls2_gram(r.T @ r, (mat @ r).T).T.copy()


def _reseed_column(mat, l, r, tiny):
    """Replace collapsed factor columns by the residual's dominant direction.
    Returns True when anything was reseeded."""
    dead_l = np.linalg.norm(l, axis=0) <= tiny
    dead_r = np.linalg.norm(r, axis=0) <= tiny
    dead = dead_l | dead_r
    if not dead.any():
        return False
    err = mat - l @ r.T
    lam, w = dominant_eig2(err.T @ err, tol=1e-8, max_iter=2000)
    v = w[:, 0]
    sigma = np.sqrt(max(lam[0], 0.0))
    if sigma <= tiny:
        raise DegenerateFactor("factor column collapsed with no residual direction left")
    u = err @ v / sigma
    for k in np.flatnonzero(dead):
        l[:, k] = np.sqrt(sigma) * np.abs(u)
        r[:, k] = np.sqrt(sigma) * np.abs(v)
    return True


def anls(n, init="qdr", cfg: AnlsConfig | None = None, seed=None) -> AnlsResult:
    """Rank-2 approximate NMF by alternating exact block updates.

    One sweep updates all rows of R, then all rows of L, each row being an
    exact two-variable nonnegative least-squares solution. Stops when the
    relative row-change residual drops below ``cfg.epsilon`` or after
    ``cfg.max_iters`` sweeps. A collapsed factor column is reseeded once
    from the residual's dominant direction; a second collapse raises
    DegenerateFactor.
    """
    cfg = cfg or AnlsConfig()
    mat = as_matrix(n)
    cur = materialize_init(mat, init, seed)
    l, r = cur.l, cur.r
    tiny = 1e-15 * max(float(np.linalg.norm(mat)), 1.0)
    history = [float(np.linalg.norm(mat - l @ r.T))] if cfg.record_history else []
    reseeded = False
    res = np.inf
    iters = 0
    converged = False
    for iters in range(1, cfg.max_iters + 1):
        prev = Rank2Nmf(l=l.copy(), r=r.copy())
        r = _update_right(mat, l)
        l = _update_left(mat, r)
        if np.linalg.norm(l, axis=0).min() <= tiny or np.linalg.norm(r, axis=0).min() <= tiny:
            if reseeded:
                raise DegenerateFactor("factor column collapsed twice")
            reseeded = _reseed_column(mat, l, r, tiny)
        res = residual(prev, Rank2Nmf(l=l, r=r))
        if cfg.record_history:
            history.append(float(np.linalg.norm(mat - l @ r.T)))
        if res < cfg.epsilon:
            converged = True
            break
    return AnlsResult(
        nmf=Rank2Nmf(l=l, r=r),
        iters=iters,
        final_residual=float(res),
        converged=converged,
        objective_history=history,
    )


# ---------------------------------------------------------------------------
# Symmetric variant: averaged row updates on N = L M L^T
# ---------------------------------------------------------------------------

def _nnls_exhaustive(design, target):
    """Exact small NNLS by enumerating active sets (used for the optional
    middle-factor refit; the design has at most 3 columns)."""
    k = design.shape[1]
    best_x = np.zeros(k)
    best_obj = float(target @ target)
    for size in range(1, k + 1):
        for support in itertools.combinations(range(k), size):
            sub = design[:, support]
            sol, *_ = np.linalg.lstsq(sub, target, rcond=None)
            if sol.min() < -1e-12:
                continue
            res = target - sub @ np.maximum(sol, 0.0)
            obj = float(res @ res)
            if obj < best_obj - 1e-15 * best_obj:
                best_obj = obj
                best_x = np.zeros(k)
                best_x[list(support)] = np.maximum(sol, 0.0)
    return best_x


def _refit_middle(mat, l):
    # symmetric parametrization (m11, m22, m12=m21) keeps M exactly symmetric
    design = np.column_stack(
        [
            np.outer(l[:, 0], l[:, 0]).ravel(),
            np.outer(l[:, 1], l[:, 1]).ravel(),
            (np.outer(l[:, 0], l[:, 1]) + np.outer(l[:, 1], l[:, 0])).ravel(),
        ]
    )
    x = _nnls_exhaustive(design, mat.ravel())
    return np.array([[x[0], x[2]], [x[2], x[1]]])


def anls_symmetric(
    n,
    init: ThreeWayNmf,
    cfg: AnlsConfig | None = None,
    refit_middle: bool = False,
    sym_tol: float = 1e-10,
) -> AnlsResult:
    """Symmetric rank-2 refinement keeping N ~ L M L^T in symmetric form.

    Cycles over the rows of L in natural order: each row's one-sided
    subproblem ``min ||L M x - N[:, i]|| over x >= 0`` is solved exactly and
    the row is replaced by the average of the old row and the solution,
    which leaves the factored form symmetric at every step. The middle
    factor stays fixed unless ``refit_middle`` asks for a nonnegative 2x2
    refit after each sweep.
    """
    cfg = cfg or AnlsConfig()
    mat = as_matrix(n)
    scale = float(np.abs(mat).max())
    if float(np.abs(mat - mat.T).max()) > sym_tol * max(scale, 1e-300):
        raise NotSymmetric("anls_symmetric needs a symmetric input")
    l = init.l.copy()
    m_mid = init.m_mid.copy()
    history = (
        [float(np.linalg.norm(mat - l @ m_mid @ l.T))] if cfg.record_history else []
    )
    res = np.inf
    iters = 0
    converged = False
    for iters in range(1, cfg.max_iters + 1):
        prev = l.copy()
        for i in range(l.shape[0]):
            design = l @ m_mid
            x_hat = nnls2(design, mat[:, i])
            l[i] = 0.5 * (l[i] + x_hat)
        if refit_middle:
            m_mid = _refit_middle(mat, l)
        diffs = np.linalg.norm(l - prev, axis=1)
        norms = np.linalg.norm(l, axis=1)
        good = norms > 0
        res = float((diffs[good] / norms[good]).sum())
        if cfg.record_history:
            history.append(float(np.linalg.norm(mat - l @ m_mid @ l.T)))
        if res < cfg.epsilon:
            converged = True
            break
    out = ThreeWayNmf(l=l, m_mid=m_mid, r=l, params=init.params)
    return AnlsResult(
        nmf=out,
        iters=iters,
        final_residual=res,
        converged=converged,
        objective_history=history,
    )


# ---------------------------------------------------------------------------
# Batched driver (stacked independent problems, shared shapes)
# ---------------------------------------------------------------------------

def anls_batch(mats, l0, r0, epsilon=1e-10, max_iters=500):
    """Run ANLS on a stack of independent problems simultaneously.

    ``mats`` has shape (..., m, n) and the starting factors (..., m, 2) and
    (..., n, 2); all problems share their shapes and sweep schedule, so each
    problem's result equals a sequential run from the same start. Problems
    are frozen as they converge. Returns (l, r, sweeps, converged) where
    ``sweeps`` counts the slowest problem and ``converged`` is boolean per
    problem.
    """
    mats = np.asarray(mats, dtype=np.float64)
    lead = mats.shape[:-2]
    m, n = mats.shape[-2:]
    count = int(np.prod(lead)) if lead else 1
    live_n = mats.reshape(count, m, n)
    out_l = np.array(l0, dtype=np.float64).reshape(count, m, 2)
    out_r = np.array(r0, dtype=np.float64).reshape(count, n, 2)
    live_l, live_r = out_l.copy(), out_r.copy()
    converged = np.zeros(count, dtype=bool)
    idx = np.arange(count)
    sweeps = 0
    while idx.size and sweeps < max_iters:
        sweeps += 1
        prev_l, prev_r = live_l, live_r
        gram = np.einsum("bir,bis->brs", live_l, live_l)
        cross = np.einsum("bir,bij->brj", live_l, live_n)
        live_r = np.swapaxes(nnls2_gram(gram, cross), -1, -2)
        gram = np.einsum("bjr,bjs->brs", live_r, live_r)
        cross = np.einsum("bjr,bij->bri", live_r, live_n)
        live_l = np.swapaxes(nnls2_gram(gram, cross), -1, -2)
        res = _residual_batch(prev_l, prev_r, live_l, live_r)
        done = res < epsilon
        if done.any():
            sel = idx[done]
            out_l[sel] = live_l[done]
            out_r[sel] = live_r[done]
            converged[sel] = True
            keep = ~done
            idx = idx[keep]
            live_n = live_n[keep]
            live_l = live_l[keep]
            live_r = live_r[keep]
    if idx.size:
        out_l[idx] = live_l
        out_r[idx] = live_r
    return (
        out_l.reshape(lead + (m, 2)),
        out_r.reshape(lead + (n, 2)),
        sweeps,
        converged.reshape(lead) if lead else bool(converged[0]),
    )


def _residual_batch(prev_l, prev_r, l, r):
    out = 0.0
    for a, b in ((prev_r, r), (prev_l, l)):
        diff = np.linalg.norm(b - a, axis=-1)
        norms = np.linalg.norm(b, axis=-1)
        out = out + np.where(norms > 0, diff / np.where(norms > 0, norms, 1.0), 0.0).sum(axis=-1)
    return out


def objective_batch(mats, l, r):
    """Frobenius error per stacked problem."""
    prod = np.einsum("...ir,...jr->...ij", l, r)
    return np.linalg.norm(np.asarray(mats) - prod, axis=(-2, -1))
