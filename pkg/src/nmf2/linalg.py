"""Dense-matrix core: validation, preprocessing, the scaled rank-2 truncated
SVD, and the exact two-variable nonnegative least-squares kernel.

Matrices are plain ``numpy.ndarray`` objects: 2-D, float64, row-major. Every
operation here is a pure function of its inputs and safe to call from
multiple threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateColumns,
    EmptyMatrix,
    InputError,
    NegativeInput,
    NoConvergence,
    ReducibleInput,
)

_EPS = np.finfo(np.float64).eps

# Deterministic seed for the internal start block of the subspace iteration.
# Using a fixed stream keeps svd2 a pure function while avoiding adversarial
# alignments of a hand-picked start basis.
_START_SEED = 0x5EED2


def as_matrix(a) -> np.ndarray:
    """Validate and coerce input to a 2-D row-major float64 array."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise InputError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise InputError(f"matrix must be at least 1x1, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise InputError("matrix entries must be finite")
    return m


def frobenius(a) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64)))


# ---------------------------------------------------------------------------
# Preprocessing: zero-line removal and irreducible block detection
# ---------------------------------------------------------------------------

@dataclass
class Preprocessed:
    """Zero-line-free core of a nonnegative matrix plus bookkeeping.

    ``row_map[i]``/``col_map[j]`` give the original index of core row i /
    core column j. ``blocks`` lists the irreducible diagonal blocks as
    (row-index array, col-index array) pairs in *core* coordinates.
    """

    core: np.ndarray
    row_map: np.ndarray
    col_map: np.ndarray
    dropped_rows: list[int]
    dropped_cols: list[int]
    blocks: list[tuple[np.ndarray, np.ndarray]]
    shape: tuple[int, int] = field(default=(0, 0))

    def block_matrix(self, k: int) -> np.ndarray:
        rows, cols = self.blocks[k]
        return self.core[np.ix_(rows, cols)]


def preprocess(n, tol: float | None = None) -> Preprocessed:
    """Strip zero rows/columns and split the rest into irreducible blocks.

    A line is "zero" when its largest entry is <= tol (default
    ``1e-12 * max(n)``). Blocks are the connected components of the bipartite
    nonzero-pattern graph, i.e. the direct summands after row/column
    permutation.

    Raises NegativeInput for entries below -tol and EmptyMatrix when nothing
    survives.
    """
    mat = as_matrix(n)
    scale = float(mat.max(initial=0.0))
    if tol is None:
        tol = 1e-12 * scale
    if float(mat.min()) < -tol:
        raise NegativeInput(f"matrix has an entry below {-tol:g}")
    if scale <= tol:
        raise EmptyMatrix("all entries are zero within tolerance")

    keep_rows = np.flatnonzero(mat.max(axis=1) > tol)
    keep_cols = np.flatnonzero(mat.max(axis=0) > tol)
    core = mat[np.ix_(keep_rows, keep_cols)].copy()
    dropped_rows = sorted(set(range(mat.shape[0])) - set(keep_rows.tolist()))
    dropped_cols = sorted(set(range(mat.shape[1])) - set(keep_cols.tolist()))

    blocks = _bipartite_components(core > tol)
    return Preprocessed(
        core=core,
        row_map=keep_rows,
        col_map=keep_cols,
        dropped_rows=dropped_rows,
        dropped_cols=dropped_cols,
        blocks=blocks,
        shape=mat.shape,
    )


def reconstruct(pre: Preprocessed) -> np.ndarray:
    """Invert preprocess: re-insert dropped lines (as exact zeros)."""
    out = np.zeros(pre.shape)
    out[np.ix_(pre.row_map, pre.col_map)] = pre.core
    return out


def _bipartite_components(pattern: np.ndarray):
    """Connected components of the row/column graph of a boolean pattern."""
    m, n = pattern.shape
    row_seen = np.zeros(m, dtype=bool)
    col_seen = np.zeros(n, dtype=bool)
    blocks = []
    for start in range(m):
        if row_seen[start]:
            continue
        rows, cols = [], []
        stack = [("r", start)]
        row_seen[start] = True
        while stack:
            kind, idx = stack.pop()
            if kind == "r":
                rows.append(idx)
                for j in np.flatnonzero(pattern[idx] & ~col_seen):
                    col_seen[j] = True
                    stack.append(("c", j))
            else:
                cols.append(idx)
                for i in np.flatnonzero(pattern[:, idx] & ~row_seen):
                    row_seen[i] = True
                    stack.append(("r", i))
        blocks.append((np.array(sorted(rows)), np.array(sorted(cols))))
    blocks.sort(key=lambda rc: int(rc[0][0]))
    return blocks


# ---------------------------------------------------------------------------
# Scaled rank-2 truncated SVD via subspace iteration with Rayleigh-Ritz
# ---------------------------------------------------------------------------

@dataclass
class ScaledSvd2:
    """Dominant two singular triplets of a nonnegative matrix, scaled so that
    ``u1_hat = u1 * sqrt(sigma1)`` etc. The rank-2 best approximation is then
    ``u1_hat v1_hat^T + u2_hat v2_hat^T``. For rank-1 input ``sigma2 == 0``
    and the second pair is identically zero.
    """

    u1_hat: np.ndarray
    u2_hat: np.ndarray
    v1_hat: np.ndarray
    v2_hat: np.ndarray
    sigma1: float
    sigma2: float

    def truncation(self) -> np.ndarray:
        """The rank-2 matrix carried by this decomposition."""
        return np.outer(self.u1_hat, self.v1_hat) + np.outer(self.u2_hat, self.v2_hat)


def _eig2x2_sym(h11: float, h12: float, h22: float):
    """Eigenpairs of a symmetric 2x2, eigenvalues ordered by magnitude."""
    tr = h11 + h22
    diff = h11 - h22
    disc = float(np.hypot(diff, 2.0 * h12))
    lam_a = 0.5 * (tr + disc)
    lam_b = 0.5 * (tr - disc)
    # A gap at the noise floor means any basis diagonalizes; keep the
    # incoming orientation instead of rotating by rounding noise.
    if disc <= 8.0 * _EPS * (abs(h11) + abs(h22) + _EPS):
        vec_a = np.array([1.0, 0.0]) if h11 >= h22 else np.array([0.0, 1.0])
    else:
        cand = np.array([h12, lam_a - h11])
        alt = np.array([lam_a - h22, h12])
        vec_a = cand if np.linalg.norm(cand) >= np.linalg.norm(alt) else alt
        vec_a = vec_a / np.linalg.norm(vec_a)
    vec_b = np.array([-vec_a[1], vec_a[0]])
    if abs(lam_a) >= abs(lam_b):
        return (lam_a, lam_b), np.column_stack([vec_a, vec_b])
    return (lam_b, lam_a), np.column_stack([vec_b, vec_a])


def _orthonormalize2(x: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on a k x 2 block; second column re-randomized if dependent."""
    q1 = x[:, 0]
    n1 = np.linalg.norm(q1)
    if n1 == 0.0:
        q1 = np.ones(x.shape[0])
        n1 = np.linalg.norm(q1)
    q1 = q1 / n1
    q2 = x[:, 1] - (q1 @ x[:, 1]) * q1
    n2 = np.linalg.norm(q2)
    if n2 <= _EPS * max(1.0, np.linalg.norm(x[:, 1])):
        rng = np.random.default_rng(_START_SEED + 1)
        q2 = rng.standard_normal(x.shape[0])
        q2 -= (q1 @ q2) * q1
        n2 = np.linalg.norm(q2)
    return np.column_stack([q1, q2 / n2])


def dominant_eig2(b: np.ndarray, tol: float = 1e-11, max_iter: int = 5000):
    """Two magnitude-dominant eigenpairs of a symmetric matrix.

    Subspace iteration on a 2-column block with Rayleigh-Ritz extraction;
    stops when the relative eigen-residual drops below ``tol``. Returns
    ``(lam, w)`` with ``lam`` ordered by decreasing magnitude and ``w`` the
    corresponding orthonormal k x 2 Ritz block.

    Raises NoConvergence after ``max_iter`` sweeps.
    """
    k = b.shape[0]
    if k == 1:
        return np.array([float(b[0, 0]), 0.0]), np.array([[1.0, 0.0]])
    rng = np.random.default_rng(_START_SEED)
    x = np.column_stack([np.ones(k) / np.sqrt(k), rng.standard_normal(k)])
    scale_floor = float(np.abs(np.diag(b)).max()) + _EPS
    for _ in range(max_iter):
        q = _orthonormalize2(x)
        y = b @ q
        h11 = float(q[:, 0] @ y[:, 0])
        h22 = float(q[:, 1] @ y[:, 1])
        h12 = 0.5 * float(q[:, 0] @ y[:, 1] + q[:, 1] @ y[:, 0])
        lam, s = _eig2x2_sym(h11, h12, h22)
        ritz = q @ s
        resid = y @ s - ritz * np.array(lam)
        denom = max(abs(lam[0]), scale_floor * _EPS)
        if np.linalg.norm(resid, axis=0).max() <= tol * denom:
            return np.array(lam), ritz
        x = y
    raise NoConvergence(f"subspace iteration did not converge in {max_iter} sweeps")


def _rotate_to_nonnegative(p1, p2, q1, q2, tol):
    """For a (near-)tied dominant pair, look for a joint rotation making the
    first vectors of both sides nonnegative. Returns the angle or None."""
    grid = np.linspace(-np.pi, np.pi, 1441)
    c, s = np.cos(grid)[:, None], np.sin(grid)[:, None]
    worst = np.minimum(
        (c * p1 + s * p2).min(axis=1), (c * q1 + s * q2).min(axis=1)
    )
    k = int(worst.argmax())
    if worst[k] >= -tol:
        return float(grid[k])
    # local refinement around the best grid angle
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    fine = np.linspace(lo, hi, 2001)
    c, s = np.cos(fine)[:, None], np.sin(fine)[:, None]
    worst = np.minimum(
        (c * p1 + s * p2).min(axis=1), (c * q1 + s * q2).min(axis=1)
    )
    k = int(worst.argmax())
    return float(fine[k]) if worst[k] >= -tol else None


def svd2(n, tol: float = 1e-11, max_iter: int = 5000) -> ScaledSvd2:
    """Scaled dominant two singular triplets of a nonnegative matrix.

    The two-dimensional dominant subspace of the smaller Gram matrix is
    computed by block power iteration with Rayleigh-Ritz; the other side is
    recovered by one multiplication. Signs are fixed so the dominant pair is
    entrywise nonnegative (tiny negatives are clamped); if genuinely mixed
    signs remain the input is reducible and ReducibleInput is raised.

    Requires a nonnegative input without zero rows or columns.
    """
    mat = as_matrix(n)
    scale = float(mat.max(initial=0.0))
    if float(mat.min()) < -1e-12 * scale:
        raise NegativeInput("svd2 requires a nonnegative matrix")
    if scale <= 0.0:
        raise EmptyMatrix("svd2 requires a nonzero matrix")
    if (mat.max(axis=1) <= 0).any() or (mat.max(axis=0) <= 0).any():
        raise InputError("svd2 requires no zero rows or columns; run preprocess first")

    m, ncols = mat.shape
    gram_on_right = m >= ncols
    gram = mat.T @ mat if gram_on_right else mat @ mat.T
    lam, w = dominant_eig2(gram, tol=tol, max_iter=max_iter)
    lam1 = max(float(lam[0]), 0.0)
    lam2 = max(float(lam[1]), 0.0)
    sigma1 = float(np.sqrt(lam1))
    sigma2 = float(np.sqrt(lam2))
    rank1 = lam2 <= lam1 * 1e-14
    if rank1:
        sigma2 = 0.0

    w1, w2 = w[:, 0].copy(), w[:, 1].copy()
    if w1.sum() < 0:
        w1 = -w1
    if gram_on_right:
        v1, v2 = w1, w2
        u1 = mat @ v1 / sigma1
        u2 = mat @ v2 / sigma2 if not rank1 else np.zeros(m)
    else:
        u1, u2 = w1, w2
        v1 = mat.T @ u1 / sigma1
        v2 = mat.T @ u2 / sigma2 if not rank1 else np.zeros(ncols)

    sign_tol = 1e-10
    mixed = (u1.min() < -sign_tol and u1.max() > sign_tol) or (
        v1.min() < -sign_tol and v1.max() > sign_tol
    )
    if mixed:
        # A tied dominant pair leaves the basis rotation free; try to realign.
        if not rank1 and sigma1 - sigma2 <= 1e-9 * sigma1:
            beta = _rotate_to_nonnegative(u1, u2, v1, v2, sign_tol)
            if beta is None:
                raise ReducibleInput(
                    "dominant singular pair has mixed signs; split the input into blocks"
                )
            cb, sb = np.cos(beta), np.sin(beta)
            u1, u2 = cb * u1 + sb * u2, -sb * u1 + cb * u2
            v1, v2 = cb * v1 + sb * v2, -sb * v1 + cb * v2
        else:
            raise ReducibleInput(
                "dominant singular pair has mixed signs; split the input into blocks"
            )
    np.clip(u1, 0.0, None, out=u1)
    np.clip(v1, 0.0, None, out=v1)
    if not rank1:
        # Canonical sign for the free flip of the second pair: the most
        # extreme second-to-first ratio on the left side is negative.
        mask = u1 > 0
        q = u2[mask] / u1[mask]
        if q.size and q.max() > -q.min():
            u2 = -u2
            v2 = -v2

    root1 = np.sqrt(sigma1)
    root2 = np.sqrt(sigma2)
    return ScaledSvd2(
        u1_hat=u1 * root1,
        u2_hat=u2 * root2,
        v1_hat=v1 * root1,
        v2_hat=v2 * root2,
        sigma1=sigma1,
        sigma2=sigma2,
    )


# ---------------------------------------------------------------------------
# Exact nonnegative least squares in two variables
# ---------------------------------------------------------------------------

def nnls2_gram(gram: np.ndarray, cross: np.ndarray) -> np.ndarray:
    """Exact minimizers of ||L x - b||_2 over x >= 0 from normal-equation data.

    ``gram`` holds L^T L with shape (..., 2, 2) and ``cross`` holds L^T B with
    shape (..., 2, k): one two-variable problem per trailing column, batched
    over the leading dimensions. The active sets are enumerated in closed
    form: the unconstrained solution when it is feasible, otherwise the best
    of the two single-variable solutions and the origin.
    """
    g11 = gram[..., 0, 0][..., None]
    g22 = gram[..., 1, 1][..., None]
    g12 = gram[..., 0, 1][..., None]
    c1 = cross[..., 0, :]
    c2 = cross[..., 1, :]

    det = g11 * g22 - g12 * g12
    det_ok = det > 1e-13 * (g11 * g22 + _EPS)
    safe_det = np.where(det_ok, det, 1.0)
    x1_free = (g22 * c1 - g12 * c2) / safe_det
    x2_free = (g11 * c2 - g12 * c1) / safe_det
    free_ok = det_ok & (x1_free >= 0.0) & (x2_free >= 0.0)

    safe_g11 = np.where(g11 > 0.0, g11, 1.0)
    safe_g22 = np.where(g22 > 0.0, g22, 1.0)
    x1_only = np.where(g11 > 0.0, np.maximum(c1, 0.0) / safe_g11, 0.0)
    x2_only = np.where(g22 > 0.0, np.maximum(c2, 0.0) / safe_g22, 0.0)
    # Objective reduction 2 x^T c - x^T G x of each boundary candidate.
    gain1 = x1_only * np.maximum(c1, 0.0)
    gain2 = x2_only * np.maximum(c2, 0.0)
    pick1 = gain1 >= gain2

    x1 = np.where(free_ok, x1_free, np.where(pick1, x1_only, 0.0))
    x2 = np.where(free_ok, x2_free, np.where(pick1, 0.0, x2_only))
    return np.stack([x1, x2], axis=-2)


def nnls2(l, b) -> np.ndarray:
    """Exact solution of min ||L x - b||_2 subject to x >= 0 for an m x 2 L."""
    design = as_matrix(l)
    if design.shape[1] != 2:
        raise InputError(f"design matrix must have 2 columns, got {design.shape[1]}")
    rhs = np.asarray(b, dtype=np.float64).reshape(-1)
    if rhs.shape[0] != design.shape[0]:
        raise InputError("design matrix and right-hand side have mismatched rows")
    gram = design.T @ design
    if gram[0, 0] == 0.0 and gram[1, 1] == 0.0:
        raise DegenerateColumns("both columns of the design matrix are zero")
    cross = (design.T @ rhs).reshape(2, 1)
    return nnls2_gram(gram, cross)[:, 0]
