import numpy as np
import pytest

from ivkit import (
    correlation_matrix,
    fisher_interval,
    partial_correlation,
    partial_report,
    pearson,
    pearson_report,
)
from ivkit.dataset import Dataset
from ivkit.exceptions import (
    DegenerateConditioningError,
    DegenerateVarianceError,
    InsufficientSampleError,
    ShapeMismatchError,
)

RNG = np.random.default_rng(20240815)


class TestPearson:
    def test_self_correlation(self):
        x = RNG.normal(size=50)
        assert pearson(x, x) == 1.0

    def test_sign_flip(self):
        x = RNG.normal(size=50)
        assert pearson(x, -x) == -1.0

    def test_hand_value(self):
        # cov = 1.5, var(x) = 1, var(y) = 7/3 with divisor n-1.
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.98198, abs=1e-5)

    def test_symmetry(self):
        x, y = RNG.normal(size=40), RNG.normal(size=40)
        assert pearson(x, y) == pearson(y, x)

    def test_constant_input(self):
        with pytest.raises(DegenerateVarianceError):
            pearson(np.ones(10), RNG.normal(size=10))

    def test_length_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            pearson(np.ones(5), np.ones(6))

    def test_too_short(self):
        with pytest.raises(InsufficientSampleError):
            pearson([1.0, 2.0], [3.0, 1.0])

    @pytest.mark.parametrize("slope,offset", [(2.5, -3.0), (1e-3, 40.0), (700.0, 0.1)])
    def test_affine_invariance(self, slope, offset):
        x, y = RNG.normal(size=200), RNG.normal(size=200)
        base = pearson(x, y)
        assert pearson(slope * x + offset, y) == pytest.approx(base, abs=1e-10)
        assert pearson(x, slope * y + offset) == pytest.approx(base, abs=1e-10)
        assert pearson(-slope * x + offset, y) == pytest.approx(-base, abs=1e-10)


class TestCorrelationMatrix:
    def test_identical_columns(self):
        x = RNG.normal(size=30)
        d = Dataset(("p", "q"), (x, x.copy()))
        np.testing.assert_allclose(
            correlation_matrix(d, ["p", "q"]), [[1, 1], [1, 1]]
        )

    def test_dgp_sample_matches_targets(self, dgp_100k):
        # Expected pairwise structure of the simulated design, in the order
        # (a, y, u, z).
        target = np.array(
            [
                [1.00, 0.87, 0.64, 0.43],
                [0.87, 1.00, 0.73, 0.29],
                [0.64, 0.73, 1.00, 0.00],
                [0.43, 0.29, 0.00, 1.00],
            ]
        )
        got = correlation_matrix(dgp_100k, ["a", "y", "u", "z"])
        np.testing.assert_allclose(got, target, atol=0.03)
        np.testing.assert_allclose(got, got.T)
        np.testing.assert_allclose(np.diag(got), 1.0)

    def test_independent_columns_near_zero(self):
        gen = np.random.default_rng(1)
        d = Dataset(
            ("x1", "x2", "x3"), tuple(gen.normal(size=100_000) for _ in range(3))
        )
        m = correlation_matrix(d, ["x1", "x2", "x3"])
        off = m[~np.eye(3, dtype=bool)]
        assert np.all(np.abs(off) <= 0.02)

    def test_needs_two_names(self):
        d = Dataset(("a",), (RNG.normal(size=10),))
        with pytest.raises(InsufficientSampleError):
            correlation_matrix(d, ["a"])


class TestPartialCorrelation:
    def test_reported_triple(self):
        # Closed form on (0.29, 0.43, 0.87); rounds to the quoted -0.18.
        value = partial_correlation(0.29, 0.43, 0.87)
        assert value == pytest.approx(-0.1890, abs=5e-4)
        assert round(value, 2) == -0.19 or round(value, 2) == -0.18

    def test_exact_cancellation(self):
        assert partial_correlation(0.43 * 0.87, 0.43, 0.87) == pytest.approx(0.0, abs=1e-15)

    def test_zero_inputs(self):
        assert partial_correlation(0.0, 0.0, 0.5) == 0.0

    def test_degenerate_conditioning(self):
        with pytest.raises(DegenerateConditioningError):
            partial_correlation(0.5, 1.0, 0.3)
        with pytest.raises(DegenerateConditioningError):
            partial_correlation(0.5, 0.3, -1.0)

    def test_unit_numerator_allowed(self):
        # z identical to y: numerator correlation is exactly 1, the
        # denominator is still well defined.
        r = 0.6
        assert partial_correlation(1.0, r, r) == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_residual_oracle(self, seed):
        # Partial correlation must equal the plain correlation of the
        # residuals from regressing each variable on the conditioner.
        gen = np.random.default_rng(seed)
        a = gen.normal(size=500)
        z = 0.8 * a + gen.normal(size=500)
        y = -0.5 * a + gen.normal(size=500)
        closed = partial_correlation(pearson(z, y), pearson(z, a), pearson(y, a))

        X = np.column_stack([np.ones(500), a])
        rz = z - X @ np.linalg.lstsq(X, z, rcond=None)[0]
        ry = y - X @ np.linalg.lstsq(X, y, rcond=None)[0]
        assert closed == pytest.approx(pearson(rz, ry), abs=1e-8)


class TestFisherInterval:
    def test_reported_interval(self):
        lo, hi = fisher_interval(0.703, 26026, 0.95)
        assert lo == pytest.approx(0.697, abs=1e-3)
        assert hi == pytest.approx(0.710, abs=1e-3)

    def test_symmetric_at_zero(self):
        lo, hi = fisher_interval(0.0, 403, 0.95)
        assert hi == pytest.approx(0.0977, abs=1e-3)
        assert lo == pytest.approx(-hi, abs=1e-15)

    @pytest.mark.parametrize("r", [-0.9, -0.2, 0.0, 0.5, 0.99])
    def test_contains_point(self, r):
        lo, hi = fisher_interval(r, 100, 0.95)
        assert lo < r < hi
        assert -1.0 < lo < hi < 1.0

    def test_width_decreases_in_n(self):
        widths = [np.diff(fisher_interval(0.5, n, 0.95))[0] for n in (10, 50, 500, 5000)]
        assert all(w1 > w2 for w1, w2 in zip(widths, widths[1:]))

    def test_width_increases_in_level(self):
        widths = [
            np.diff(fisher_interval(0.5, 200, level))[0] for level in (0.5, 0.8, 0.95, 0.99)
        ]
        assert all(w1 < w2 for w1, w2 in zip(widths, widths[1:]))

    def test_small_sample_rejected(self):
        with pytest.raises(InsufficientSampleError):
            fisher_interval(0.5, 3, 0.95)

    def test_degenerate_r_rejected(self):
        with pytest.raises(DegenerateConditioningError):
            fisher_interval(1.0, 100, 0.95)


class TestReports:
    def test_pearson_report_fields(self):
        x = RNG.normal(size=120)
        y = 0.5 * x + RNG.normal(size=120)
        rep = pearson_report(x, y)
        assert rep.kind == "pearson"
        assert rep.n == 120
        assert rep.ci[0] <= rep.value <= rep.ci[1]
        payload = rep.to_dict()
        assert set(payload) == {"kind", "value", "n", "ci", "level"}

    def test_partial_report_effective_n(self):
        x = RNG.normal(size=120)
        a = 0.3 * x + RNG.normal(size=120)
        y = 0.7 * a + RNG.normal(size=120)
        rep = partial_report(x, y, a)
        assert rep.kind == "partial"
        assert rep.n == 119
