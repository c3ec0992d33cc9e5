import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmf2 import (
    DegenerateColumns,
    EmptyMatrix,
    InputError,
    NegativeInput,
    as_matrix,
    dominant_eig2,
    nnls2,
    preprocess,
    reconstruct,
    svd2,
)
from conftest import angular_rank2, noisy_rank2


class TestAsMatrix:
    def test_coerces_lists(self):
        m = as_matrix([[1, 2], [3, 4]])
        assert m.dtype == np.float64 and m.flags.c_contiguous

    def test_rejects_non_2d(self):
        with pytest.raises(InputError):
            as_matrix([1.0, 2.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(InputError):
            as_matrix([[1.0, np.nan]])


class TestPreprocess:
    def test_diagonal_splits_into_two_blocks(self):
        pre = preprocess([[1.0, 0.0], [0.0, 2.0]])
        assert len(pre.blocks) == 2
        assert [b[0].tolist() for b in pre.blocks] == [[0], [1]]
        assert [b[1].tolist() for b in pre.blocks] == [[0], [1]]

    def test_positive_matrix_is_one_block(self):
        pre = preprocess([[1.0, 1.0], [1.0, 1.0]])
        assert len(pre.blocks) == 1
        assert not pre.dropped_rows and not pre.dropped_cols

    def test_zero_row_dropped(self):
        pre = preprocess([[0.0, 0.0], [3.0, 4.0]])
        assert pre.dropped_rows == [0]
        assert pre.core.tolist() == [[3.0, 4.0]]
        assert len(pre.blocks) == 1

    def test_negative_entry_raises(self):
        with pytest.raises(NegativeInput):
            preprocess([[1.0, -0.5], [1.0, 1.0]])

    def test_all_zero_raises(self):
        with pytest.raises(EmptyMatrix):
            preprocess([[0.0, 0.0], [0.0, 0.0]])

    def test_reconstruct_is_identity(self):
        rng = np.random.default_rng(3)
        mat = rng.random((6, 5))
        mat[2, :] = 0.0
        mat[:, 4] = 0.0
        pre = preprocess(mat)
        back = reconstruct(pre)
        # bit-level equality: kept entries untouched, dropped lines zeroed
        assert np.array_equal(back, mat)

    def test_block_permutation_structure(self):
        rng = np.random.default_rng(4)
        a = rng.random((2, 3)) + 0.1
        b = rng.random((3, 2)) + 0.1
        mat = np.zeros((5, 5))
        mat[:2, :3] = a
        mat[2:, 3:] = b
        perm_r = rng.permutation(5)
        perm_c = rng.permutation(5)
        pre = preprocess(mat[np.ix_(perm_r, perm_c)])
        assert len(pre.blocks) == 2
        sizes = sorted((len(r), len(c)) for r, c in pre.blocks)
        assert sizes == [(2, 3), (3, 2)]


class TestSvd2:
    def test_rank1_outer_product(self):
        a = np.array([1.0, 2.0, 3.0])
        b = np.array([2.0, 1.0])
        s = svd2(np.outer(a, b))
        assert s.sigma1 == pytest.approx(np.linalg.norm(a) * np.linalg.norm(b), rel=1e-12)
        assert s.sigma2 == 0.0
        assert np.all(s.u2_hat == 0.0) and np.all(s.v2_hat == 0.0)

    def test_worked_example_eigenvalues(self, worked_example):
        s = svd2(worked_example)
        assert s.sigma1 == pytest.approx(7.0, abs=1e-10)
        assert s.sigma2 == pytest.approx(2.0, abs=1e-10)

    def test_matches_full_svd_oracle(self):
        rng = np.random.default_rng(11)
        mat = rng.random((20, 15))
        s = svd2(mat)
        sv = np.linalg.svd(mat, compute_uv=False)
        assert s.sigma1 == pytest.approx(sv[0], rel=1e-10)
        assert s.sigma2 == pytest.approx(sv[1], rel=1e-10)

    def test_truncation_error_identity(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            mat = rng.random((12, 9)) + 0.05
            s = svd2(mat)
            sv = np.linalg.svd(mat, compute_uv=False)
            tail = float(np.sum(sv[2:] ** 2))
            err = float(np.linalg.norm(mat - s.truncation()) ** 2)
            assert err == pytest.approx(tail, rel=1e-8, abs=1e-12)

    def test_scaled_pair_invariants(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            mat = noisy_rank2(rng, 9, 7)
            s = svd2(mat)
            assert np.linalg.norm(s.u1_hat) ** 2 == pytest.approx(s.sigma1, rel=1e-10)
            assert np.linalg.norm(s.v2_hat) ** 2 == pytest.approx(s.sigma2, rel=1e-10)
            assert abs(s.u1_hat @ s.u2_hat) <= 1e-10 * s.sigma1
            assert abs(s.v1_hat @ s.v2_hat) <= 1e-10 * s.sigma1
            assert s.u1_hat.min() >= 0.0 and s.v1_hat.min() >= 0.0
            # second pair must carry both signs
            assert s.u2_hat.min() < 0.0 < s.u2_hat.max()
            assert s.v2_hat.min() < 0.0 < s.v2_hat.max()

    def test_ratio_product_lower_bound(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            mat = noisy_rank2(rng, 8, 6)
            s = svd2(mat)
            gap = s.sigma2 / s.sigma1
            qu = s.u2_hat / s.u1_hat
            qv = s.v2_hat / s.v1_hat
            assert qu.max() * (-qu.min()) >= gap - 1e-10
            assert qv.max() * (-qv.min()) >= gap - 1e-10
            assert qu.max() * qv.max() * qu.min() * qv.min() >= gap**2 - 1e-10

    def test_balanced_weights(self):
        rng = np.random.default_rng(15)
        mat = noisy_rank2(rng, 10, 8)
        s = svd2(mat)
        d_u = np.hypot(s.u1_hat, s.u2_hat)
        d_v = np.hypot(s.v1_hat, s.v2_hat)
        target = np.sqrt(s.sigma1 + s.sigma2)
        assert np.linalg.norm(d_u) == pytest.approx(target, abs=1e-10)
        assert np.linalg.norm(d_v) == pytest.approx(target, abs=1e-10)

    def test_identity_tie_handled(self):
        s = svd2(np.eye(2))
        assert s.sigma1 == pytest.approx(1.0, abs=1e-12)
        assert s.sigma2 == pytest.approx(1.0, abs=1e-12)
        assert s.u1_hat.min() >= 0.0
        assert np.abs(s.truncation() - np.eye(2)).max() < 1e-12

    def test_zero_row_rejected(self):
        with pytest.raises(InputError):
            svd2([[1.0, 1.0], [0.0, 0.0]])

    def test_determinism(self):
        rng = np.random.default_rng(16)
        mat = rng.random((7, 7))
        a, b = svd2(mat), svd2(mat)
        assert np.array_equal(a.u1_hat, b.u1_hat) and np.array_equal(a.v2_hat, b.v2_hat)


class TestDominantEig2:
    def test_matches_eigh(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            k = rng.integers(2, 12)
            sym = rng.standard_normal((k, k))
            sym = sym + sym.T
            lam, w = dominant_eig2(sym)
            ref = np.linalg.eigvalsh(sym)
            ref = ref[np.argsort(-np.abs(ref))][:2]
            assert lam[0] == pytest.approx(ref[0], rel=1e-9, abs=1e-9)
            assert lam[1] == pytest.approx(ref[1], rel=1e-9, abs=1e-9)
            resid = sym @ w - w * lam
            assert np.abs(resid).max() <= 1e-8 * max(abs(lam[0]), 1.0)


def _nnls2_grid_oracle(design, rhs, span=6.0, steps=241):
    grid = np.linspace(0.0, span, steps)
    best, best_x = np.inf, None
    for x1 in grid:
        r = rhs - design[:, 0] * x1
        for x2 in grid:
            v = float(np.linalg.norm(r - design[:, 1] * x2))
            if v < best:
                best, best_x = v, (x1, x2)
    return np.array(best_x), best


class TestNnls2:
    def test_identity_padded(self):
        design = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        x = nnls2(design, [3.0, 4.0, 0.0])
        assert x == pytest.approx([3.0, 4.0], abs=1e-12)

    def test_zero_target(self):
        rng = np.random.default_rng(21)
        x = nnls2(rng.random((5, 2)), np.zeros(5))
        assert x == pytest.approx([0.0, 0.0], abs=0.0)

    def test_active_set_vs_grid(self):
        # geometry that forces a negative unconstrained coordinate
        design = np.array([[1.0, 0.9], [0.0, -0.8], [0.2, 0.1]])
        rhs = np.array([1.0, 1.0, 0.0])
        x = nnls2(design, rhs)
        gx, gval = _nnls2_grid_oracle(design, rhs, span=3.0, steps=601)
        assert np.linalg.norm(design @ x - rhs) <= gval + 1e-9
        assert x.min() >= 0.0
        assert np.abs(x - gx).max() <= 2e-2  # grid resolution

    def test_both_columns_zero_raises(self):
        with pytest.raises(DegenerateColumns):
            nnls2(np.zeros((4, 2)), np.ones(4))

    def test_one_dead_column(self):
        design = np.column_stack([np.ones(4), np.zeros(4)])
        x = nnls2(design, np.full(4, 2.0))
        assert x == pytest.approx([2.0, 0.0], abs=1e-12)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(2, 9), st.integers(0, 2**31 - 1))
    def test_kkt_conditions(self, m, seed):
        rng = np.random.default_rng(seed)
        design = rng.normal(0.0, 1.0, (m, 2))
        rhs = rng.normal(0.0, 2.0, m)
        x = nnls2(design, rhs)
        scale = max(1.0, float(np.abs(design).max() * np.abs(rhs).max()))
        grad = design.T @ (design @ x - rhs)
        assert x.min() >= 0.0
        assert grad.min() >= -1e-10 * scale
        assert abs(x @ grad) <= 1e-10 * scale

    def test_collinear_columns(self):
        col = np.array([1.0, 2.0, 0.5])
        design = np.column_stack([col, 2.0 * col])
        rhs = np.array([2.0, 4.0, 1.0])
        x = nnls2(design, rhs)
        assert np.linalg.norm(design @ x - rhs) <= 1e-12
        assert x.min() >= 0.0


def test_angular_rank2_builder_nonnegative():
    rng = np.random.default_rng(30)
    mat, form = angular_rank2(rng, 7, 9)
    assert mat.min() >= 0.0
    assert np.linalg.matrix_rank(mat) == 2
    assert np.abs(form.reconstruct() - mat).max() == 0.0
