import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from coac.exceptions import BadShape, RankDeficient
from coac.linalg import (
    IncrementalQr,
    back_substitute,
    qr_decompose,
    residual_quadratic_form,
    solve_least_squares,
)


def well_conditioned_matrices(max_rows=30, max_cols=6):
    """Random tall matrices kept away from rank deficiency: i.i.d. normal
    entries plus a scaled identity block on top."""

    @st.composite
    def build(draw):
        rows = draw(st.integers(2, max_rows))
        cols = draw(st.integers(1, min(rows, max_cols)))
        a = draw(
            arrays(
                float,
                (rows, cols),
                elements=st.floats(-10, 10, allow_nan=False, width=64),
            )
        )
        a[:cols, :] += 5.0 * np.eye(cols)
        return a

    return build()


class TestQrDecompose:
    def test_identity_factors_to_identity(self):
        f = qr_decompose(np.eye(3))
        np.testing.assert_allclose(f.q, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(f.r, np.eye(3), atol=1e-14)

    def test_single_column_three_four_five(self):
        f = qr_decompose(np.array([[3.0], [4.0]]))
        np.testing.assert_allclose(f.r, [[5.0]], atol=1e-14)
        np.testing.assert_allclose(f.q, [[0.6], [0.8]], atol=1e-14)

    @settings(max_examples=100, deadline=None)
    @given(well_conditioned_matrices())
    def test_factors_reproduce_matrix(self, a):
        f = qr_decompose(a)
        np.testing.assert_allclose(f.q @ f.r, a, atol=1e-8 * max(1.0, np.abs(a).max()))

    @settings(max_examples=100, deadline=None)
    @given(well_conditioned_matrices())
    def test_q_has_orthonormal_columns(self, a):
        f = qr_decompose(a)
        np.testing.assert_allclose(f.q.T @ f.q, np.eye(a.shape[1]), atol=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(well_conditioned_matrices())
    def test_r_upper_triangular_nonnegative_diagonal(self, a):
        f = qr_decompose(a)
        assert np.allclose(f.r, np.triu(f.r))
        assert (np.diag(f.r) >= 0).all()

    def test_duplicate_column_raises(self):
        col = np.array([1.0, 2.0, 3.0])
        with pytest.raises(RankDeficient):
            qr_decompose(np.column_stack([col, 2.0 * col]))

    def test_wide_matrix_rejected(self):
        with pytest.raises(BadShape):
            qr_decompose(np.ones((2, 3)))

    def test_nonfinite_rejected(self):
        with pytest.raises(BadShape):
            qr_decompose(np.array([[1.0], [np.nan]]))


class TestSolveLeastSquares:
    def test_exact_line(self):
        a = np.array([[1.0, 1.0], [1.0, 2.0], [1.0, 3.0]])
        theta = solve_least_squares(a, np.array([3.0, 5.0, 7.0]))
        np.testing.assert_allclose(theta, [1.0, 2.0], atol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(well_conditioned_matrices())
    def test_matches_lstsq(self, a):
        y = np.arange(a.shape[0], dtype=float) - 3.0
        ours = solve_least_squares(a, y)
        ref = np.linalg.lstsq(a, y, rcond=None)[0]
        np.testing.assert_allclose(ours, ref, atol=1e-8, rtol=1e-8)

    def test_badly_scaled_columns(self):
        # column scaling should keep a 1e8 spread in column norms harmless;
        # the residual inaccuracy comes from the x-vs-x^2 correlation, not
        # the scaling, so the tolerance reflects that conditioning
        x = np.linspace(1.0, 2.0, 40)
        a = np.column_stack([x * 1e-4, x**2 * 1e4])
        truth = np.array([2.0, -3.0])
        theta = solve_least_squares(a, a @ truth)
        np.testing.assert_allclose(theta, truth, rtol=1e-6)

    def test_length_mismatch(self):
        with pytest.raises(BadShape):
            solve_least_squares(np.ones((3, 1)), np.ones(4))


class TestResidualQuadraticForm:
    @settings(max_examples=100, deadline=None)
    @given(well_conditioned_matrices())
    def test_projection_plus_residual_is_total(self, a):
        v = np.sin(np.arange(a.shape[0], dtype=float))
        proj, resid = residual_quadratic_form(a, v)
        assert proj >= 0 and resid >= 0
        np.testing.assert_allclose(proj + resid, float(v @ v), rtol=1e-10, atol=1e-12)

    def test_vector_inside_span_has_zero_residual(self):
        a = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        proj, resid = residual_quadratic_form(a, np.array([2.0, -1.0, 0.0]))
        assert proj == pytest.approx(5.0, abs=1e-12)
        assert resid == pytest.approx(0.0, abs=1e-12)


class TestIncrementalQr:
    def test_prefix_residuals_match_full_fits(self, rng):
        x = rng.uniform(0, 10, 40)
        y = rng.normal(size=40)
        cols = [x**k for k in range(1, 7)]
        inc = IncrementalQr(y)
        for m in range(1, 7):
            inc.append_column(cols[m - 1])
            a = np.column_stack(cols[:m])
            ref_resid = y - a @ np.linalg.lstsq(a, y, rcond=None)[0]
            assert inc.residual_sum_squares() == pytest.approx(
                float(ref_resid @ ref_resid), rel=1e-9, abs=1e-12
            )

    def test_solve_matches_lstsq(self, rng):
        x = rng.uniform(0, 10, 25)
        y = rng.normal(size=25)
        inc = IncrementalQr(y)
        for k in range(1, 5):
            inc.append_column(x**k)
        a = np.column_stack([x**k for k in range(1, 5)])
        np.testing.assert_allclose(
            inc.solve(), np.linalg.lstsq(a, y, rcond=None)[0], rtol=1e-8, atol=1e-10
        )

    def test_dependent_column_raises_and_leaves_state_usable(self, rng):
        x = rng.uniform(0, 10, 20)
        y = rng.normal(size=20)
        inc = IncrementalQr(y)
        inc.append_column(x)
        rss_before = inc.residual_sum_squares()
        with pytest.raises(RankDeficient):
            inc.append_column(3.0 * x)
        assert inc.residual_sum_squares() == rss_before
        inc.append_column(x**2)  # a genuinely new column still goes in
        assert inc.residual_sum_squares() <= rss_before + 1e-12


class TestBackSubstitute:
    def test_hand_case(self):
        r = np.array([[2.0, 1.0], [0.0, 4.0]])
        np.testing.assert_allclose(
            back_substitute(r, np.array([4.0, 8.0])), [1.0, 2.0], atol=1e-14
        )

    def test_zero_pivot_rejected(self):
        with pytest.raises(RankDeficient):
            back_substitute(np.array([[1.0, 1.0], [0.0, 0.0]]), np.array([1.0, 1.0]))
