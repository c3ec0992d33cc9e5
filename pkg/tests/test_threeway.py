import numpy as np
import pytest

from nmf2 import (
    InfeasibleParams,
    InputError,
    NotSymmetric,
    ThreeWayParams,
    alpha_threeway,
    defects,
    eig2_scaled,
    gram_defect,
    minimize_defects,
    ratio_stats,
    svd2,
    tbox,
    threeway_nmf,
    threeway_symmetric,
    to_angular,
    with_unit_columns,
)
from conftest import angular_rank2


def feasible_params(rng, box):
    t1 = np.sort(rng.uniform(box.t1_lo, box.t1_hi, 2))
    t2 = np.sort(rng.uniform(box.t2_lo, box.t2_hi, 2))
    return ThreeWayParams(t1_lo=t1[0], t1_hi=t1[1], t2_lo=t2[0], t2_hi=t2[1])


def indefinite_symmetric(rng, n):
    """Symmetric nonnegative rank-2 matrix with one negative eigenvalue."""
    base = rng.uniform(1.0, 2.0, n)
    q = rng.uniform(-0.6, 0.6, n)
    q[0], q[1] = 0.55, -0.5  # both signs present
    u2 = base * q
    return np.outer(base, base) - np.outer(u2, u2)


class TestThreeWayNmf:
    def test_collapsed_params_give_identity_middle(self):
        rng = np.random.default_rng(70)
        mat, _ = angular_rank2(rng, 6, 8)
        s = svd2(mat)
        box = tbox(ratio_stats(s))
        t1, t2 = box.midpoint()
        out = threeway_nmf(s, ThreeWayParams(t1, t1, t2, t2))
        assert out.m_mid[0, 1] == 0.0 and out.m_mid[1, 0] == 0.0
        assert np.abs(out.reconstruct() - mat).max() <= 1e-10 * mat.max()

    def test_worked_example_normalized_middle(self, worked_example):
        s = svd2(worked_example)
        corner = minimize_defects(s)
        out = with_unit_columns(threeway_nmf(s, corner.params))
        printed_m = np.array([[6.3987, 0.7883], [0.7883, 2.3446]])
        printed_l = np.array([[0.7548, 0.1078], [0.6470, 0.0], [0.0, 0.6470], [0.1078, 0.7548]])
        assert np.abs(out.m_mid - printed_m).max() <= 1e-3
        assert np.abs(out.l - printed_l).max() <= 1e-3

    def test_random_feasible_draws(self):
        rng = np.random.default_rng(71)
        for _ in range(30):
            mat, _ = angular_rank2(rng, rng.integers(3, 10), rng.integers(3, 10))
            s = svd2(mat)
            box = tbox(ratio_stats(s))
            out = threeway_nmf(s, feasible_params(rng, box))
            assert min(out.l.min(), out.m_mid.min(), out.r.min()) >= -1e-12
            assert np.abs(out.reconstruct() - mat).max() <= 1e-10 * mat.max()

    def test_infeasible_params_rejected(self):
        rng = np.random.default_rng(72)
        mat, _ = angular_rank2(rng, 6, 6)
        s = svd2(mat)
        box = tbox(ratio_stats(s))
        with pytest.raises(InfeasibleParams):
            threeway_nmf(s, ThreeWayParams(box.t1_lo, box.t1_hi * 1.5 + 1.0, box.t2_lo, box.t2_hi))


class TestSymmetric:
    def test_collapsed_params_give_completely_positive_form(self, worked_example):
        eig = eig2_scaled(worked_example)
        q = eig.u2_hat / eig.u1_hat
        t = 0.5 * (q.max() + (-1.0 / q.min()))
        out = threeway_symmetric(eig, t, t)
        assert np.abs(out.m_mid - np.eye(2)).max() <= 1e-12
        assert out.l.min() >= 0.0
        assert np.abs(out.l @ out.l.T - worked_example).max() <= 1e-10

    def test_psd_random(self):
        rng = np.random.default_rng(73)
        base = rng.uniform(0.5, 1.5, 3)
        u2 = base * np.array([0.4, -0.3, 0.2])
        mat = np.outer(base, base) + np.outer(u2, u2)
        eig = eig2_scaled(mat)
        assert eig.lam2 > 0
        q = eig.u2_hat / eig.u1_hat
        out = threeway_symmetric(eig, q.max(), -1.0 / q.min())
        assert min(out.l.min(), out.m_mid.min()) >= -1e-12
        assert np.abs(out.reconstruct() - mat).max() <= 1e-10 * mat.max()
        assert out.r is out.l

    def test_indefinite_random(self):
        rng = np.random.default_rng(74)
        mat = indefinite_symmetric(rng, 5)
        assert mat.min() >= 0.0
        eig = eig2_scaled(mat)
        assert eig.lam2 < 0
        q = eig.u2_hat / eig.u1_hat
        out = threeway_symmetric(eig, q.max(), -1.0 / q.min())
        assert min(out.l.min(), out.m_mid.min()) >= -1e-12
        assert np.abs(out.reconstruct() - mat).max() <= 1e-10 * np.abs(mat).max()

    def test_asymmetric_input_rejected(self):
        rng = np.random.default_rng(75)
        with pytest.raises(NotSymmetric):
            eig2_scaled(rng.random((4, 4)))

    def test_matrix_argument_accepted(self, worked_example):
        out = threeway_symmetric(worked_example, 0.3, 0.4)
        assert np.abs(out.reconstruct() - worked_example).max() <= 1e-10


class TestDefects:
    def test_worked_example_defect(self, worked_example):
        s = svd2(worked_example)
        corner = minimize_defects(s)
        assert corner.def_l == pytest.approx(0.1628, abs=1e-3)
        assert not corner.zero_defect_l
        # sigma ratio 3.5 strictly above the attainability threshold
        st = ratio_stats(s)
        assert s.sigma1 / s.sigma2 > -1.0 / (st.min_u * st.max_u)

    def test_closed_form_matches_gram(self):
        rng = np.random.default_rng(76)
        for _ in range(20):
            mat, _ = angular_rank2(rng, 7, 6)
            s = svd2(mat)
            box = tbox(ratio_stats(s))
            p = feasible_params(rng, box)
            out = threeway_nmf(s, p)
            rep = defects(out, s)
            assert rep.def_l == pytest.approx(gram_defect(out.l), abs=1e-10)
            assert rep.def_r == pytest.approx(gram_defect(out.r), abs=1e-10)
            assert 0.0 <= rep.def_l <= 1.0 and 0.0 <= rep.def_r <= 1.0

    def test_two_row_instance_attains_zero_defect(self):
        rng = np.random.default_rng(77)
        mat, _ = angular_rank2(rng, 2, 6)
        s = svd2(mat)
        corner = minimize_defects(s)
        # two orthonormal rows make the extremal-ratio bound tight
        assert corner.zero_defect_l
        assert corner.def_l <= 1e-9
        out = threeway_nmf(s, corner.params)
        assert gram_defect(out.l) <= 1e-8

    def test_corner_beats_grid(self):
        rng = np.random.default_rng(78)
        mat, _ = angular_rank2(rng, 8, 7)
        s = svd2(mat)
        corner = minimize_defects(s)
        p = corner.params
        grid = np.linspace(0.0, 1.0, 12)
        for a in grid:
            for b in grid:
                t1_hi = p.t1_lo + a * (p.t1_hi - p.t1_lo)
                t2_lo = p.t2_lo + b * (p.t2_hi - p.t2_lo)
                trial = ThreeWayParams(p.t1_lo, t1_hi, t2_lo, p.t2_hi)
                assert corner.def_l <= defects(
                    threeway_nmf(s, trial), s
                ).def_l + 1e-12

    def test_monotone_in_t1_hi(self):
        rng = np.random.default_rng(79)
        mat, _ = angular_rank2(rng, 6, 6)
        s = svd2(mat)
        box = tbox(ratio_stats(s))
        t2_lo = box.t2_lo
        values = []
        for t1_hi in np.linspace(box.t1_lo, box.t1_hi, 15):
            p = ThreeWayParams(box.t1_lo, t1_hi, t2_lo, box.t2_hi)
            if s.sigma1 * t2_lo - s.sigma2 * t1_hi >= 0:
                values.append(defects(threeway_nmf(s, p), s).def_l)
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_defect_minimizer_columns_touch_zero(self):
        rng = np.random.default_rng(80)
        mat, _ = angular_rank2(rng, 9, 8)
        s = svd2(mat)
        out = threeway_nmf(s, minimize_defects(s).params)
        scale = np.abs(out.l).max()
        assert out.l[:, 0].min() <= 1e-10 * scale
        assert out.l[:, 1].min() <= 1e-10 * scale


class TestAlphaThreeway:
    def test_collapse_matches_two_factor_form(self):
        rng = np.random.default_rng(81)
        mat, _ = angular_rank2(rng, 6, 7)
        s = svd2(mat)
        a = to_angular(s)
        from nmf2 import alpha_midpoints, alpha_nmf

        a1, a2 = alpha_midpoints(a)
        collapsed = alpha_threeway(a, a1, a1, a2, a2)
        pair = alpha_nmf(a, a1, a2)
        assert np.abs(
            collapsed.l @ collapsed.m_mid @ collapsed.r.T - pair.reconstruct()
        ).max() <= 1e-10 * mat.max()

    def test_matches_t_parametrization(self, worked_example):
        s = svd2(worked_example)
        corner = minimize_defects(s)
        p = corner.params
        a = to_angular(s)
        out_alpha = alpha_threeway(
            a, np.arctan(p.t1_lo), np.arctan(p.t1_hi), np.arctan(p.t2_lo), np.arctan(p.t2_hi)
        )
        out_t = threeway_nmf(s, p)
        assert np.abs(out_alpha.reconstruct() - out_t.reconstruct()).max() <= 1e-10 * 7.0
        # outer factors agree up to positive column scaling
        for col in range(2):
            lt, la = out_t.l[:, col], out_alpha.l[:, col]
            mask = lt > 1e-9
            ratio = la[mask] / lt[mask]
            assert ratio.max() - ratio.min() <= 1e-9 * ratio.max()

    def test_middle_matches_adjoint_formula(self):
        rng = np.random.default_rng(82)
        mat, _ = angular_rank2(rng, 7, 7)
        s = svd2(mat)
        a = to_angular(s)
        from nmf2 import alpha_intervals

        lo1, hi1, lo2, hi2 = alpha_intervals(a)
        a1 = np.sort(rng.uniform(lo1, hi1, 2))
        a2 = np.sort(rng.uniform(lo2, hi2, 2))
        out = alpha_threeway(a, a1[0], a1[1], a2[0], a2[1])
        denom = np.cos(a2[1] - a1[0]) * np.cos(a2[0] - a1[1])
        adjoint = (
            np.array(
                [
                    [np.cos(a2[0] - a1[0]), np.sin(a2[1] - a2[0])],
                    [np.sin(a1[1] - a1[0]), np.cos(a2[1] - a1[1])],
                ]
            )
            / denom
        )
        assert np.abs(out.m_mid - adjoint).max() <= 1e-12
        assert out.m_mid.min() >= 0.0

    def test_nonnegative_and_reconstructs(self):
        rng = np.random.default_rng(83)
        for _ in range(15):
            mat, _ = angular_rank2(rng, 5, 9)
            s = svd2(mat)
            a = to_angular(s)
            from nmf2 import alpha_intervals

            lo1, hi1, lo2, hi2 = alpha_intervals(a)
            a1 = np.sort(rng.uniform(lo1, hi1, 2))
            a2 = np.sort(rng.uniform(lo2, hi2, 2))
            out = alpha_threeway(a, a1[0], a1[1], a2[0], a2[1])
            assert min(out.l.min(), out.m_mid.min(), out.r.min()) >= -1e-12
            assert np.abs(out.reconstruct() - mat).max() <= 1e-10 * mat.max()


class TestUnitColumns:
    def test_normalization_preserves_product(self):
        rng = np.random.default_rng(84)
        mat, _ = angular_rank2(rng, 6, 6)
        s = svd2(mat)
        box = tbox(ratio_stats(s))
        out = threeway_nmf(s, feasible_params(rng, box))
        hat = with_unit_columns(out)
        assert np.linalg.norm(hat.l, axis=0) == pytest.approx([1.0, 1.0], abs=1e-12)
        assert np.linalg.norm(hat.r, axis=0) == pytest.approx([1.0, 1.0], abs=1e-12)
        assert np.abs(hat.reconstruct() - out.reconstruct()).max() <= 1e-12 * mat.max()
