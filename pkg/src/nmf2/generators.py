"""Seeded synthetic inputs for the benchmark harness.

Three families: heavy-tailed lognormal dense matrices (small singular-value
gap, so the rank-2 truncation is frequently not nonnegative), rank-2
matrices built on the boundary of the nonnegative rank-2 set with additive
folded-normal noise, and uniform random 4x4 nonnegative integer matrices
with a fixed entry total. All randomness flows through numpy Generators
(PCG64), so fixed seeds give bit-identical streams.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyMatrix, InputError, Nmf2Error, NonpositiveDominant, RejectionLimit
from .exact import AngularForm, is_nonnegative_rank2, ratio_stats
from .linalg import svd2

_PIN_EPS = 1e-9


def _as_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def is_trivial_rank2(mat) -> bool:
    """Whether the best rank-2 approximation is already nonnegative (or the
    instance is degenerate: rank <= 1, reducible, or has a zero line), i.e.
    the approximation problem is trivial."""
    try:
        s = svd2(np.asarray(mat, dtype=np.float64))
        if s.sigma2 == 0.0:
            return True
        stats = ratio_stats(s)
    except (Nmf2Error, NonpositiveDominant, EmptyMatrix):
        return True
    return is_nonnegative_rank2(stats, tol=1e-10)


def gen_lognormal(m: int, n: int, seed=None) -> np.ndarray:
    """i.i.d. entries exp(sqrt(log m) * z) with z standard normal."""
    if not (m >= n >= 2):
        raise InputError("lognormal family needs m >= n >= 2")
    rng = _as_rng(seed)
    return np.exp(np.sqrt(np.log(m)) * rng.standard_normal((m, n)))


def gen_boundary_noise(
    m: int,
    n: int,
    noise_scale: float | None = None,
    seed=None,
    max_resamples: int = 1000,
) -> np.ndarray:
    """Rank-2 boundary matrix corrupted by relative folded-normal noise.

    Half the column angles are pinned to 0 and half the row angles to pi/2
    (nudged inside the open domain), the rest drawn uniformly from
    [0, pi/2]; weights are uniform on [0, 1]. The clean matrix is therefore
    nonnegative with entries touching zero. Each entry is multiplied by
    ``1 + noise_scale * |z|`` with z standard normal (relative noise keeps
    the boundary zeros in place, so the perturbed best rank-2 approximation
    falls outside the nonnegative cone with high probability at any size;
    an additive lift would re-center it inside). Draws are rejected until
    that approximation is not nonnegative; ``noise_scale == 0`` returns the
    clean boundary matrix without filtering. Default noise level 0.1.
    """
    if m < 2 or n < 2:
        raise InputError("boundary family needs m, n >= 2")
    rng = _as_rng(seed)
    scale = 0.1 if noise_scale is None else float(noise_scale)
    for _ in range(max_resamples):
        psi = rng.uniform(0.0, np.pi / 2, m)
        phi = rng.uniform(0.0, np.pi / 2, n)
        psi[m - m // 2 :] = np.pi / 2 - _PIN_EPS
        phi[: n // 2] = 0.0
        d_u = rng.uniform(0.0, 1.0, m)
        d_v = rng.uniform(0.0, 1.0, n)
        clean = AngularForm(psi=psi, phi=phi, d_u=d_u, d_v=d_v).reconstruct()
        mat = clean * (1.0 + scale * np.abs(rng.standard_normal((m, n)))) if scale > 0 else clean
        if mat.max(axis=1).min() <= 0 or mat.max(axis=0).min() <= 0:
            continue
        if scale == 0.0 or not is_trivial_rank2(mat):
            return mat
    raise RejectionLimit(f"no acceptable boundary instance in {max_resamples} draws")


def draw_integer4x4(rng: np.random.Generator, total: int = 1000) -> np.ndarray:
    """One uniform draw from the 4x4 nonnegative integer matrices whose
    entries sum to ``total`` (stars-and-bars bijection, no filtering)."""
    if total < 1:
        raise InputError("total must be at least 1")
    bars = np.sort(rng.choice(total + 15, size=15, replace=False) + 1)
    padded = np.concatenate([[0], bars, [total + 16]])
    return (np.diff(padded) - 1.0).reshape(4, 4)


def gen_integer4x4(total: int = 1000, seed=None, max_resamples: int = 1000) -> np.ndarray:
    """Uniform nontrivial 4x4 integer instance: draws are rejected while
    their best rank-2 approximation is already nonnegative."""
    rng = _as_rng(seed)
    for _ in range(max_resamples):
        mat = draw_integer4x4(rng, total)
        if mat.max(axis=1).min() <= 0 or mat.max(axis=0).min() <= 0:
            continue
        if not is_trivial_rank2(mat):
            return mat
    raise RejectionLimit(f"no nontrivial 4x4 instance in {max_resamples} draws")
