import io

import numpy as np
import pytest

from ivkit.exceptions import InsufficientSampleError, ReplicateFailure
from ivkit.rng import mix_seed, splitmix64
from ivkit.simulate import (
    METHODS,
    BoxplotStats,
    DgpConfig,
    boxplot_stats,
    generate,
    monte_carlo,
)


class TestDgpConfig:
    def test_defaults_solve_moment_equations(self):
        cfg = DgpConfig()
        sd_a = cfg.alpha_az / 0.43
        assert sd_a**2 == pytest.approx(
            cfg.alpha_az**2 + cfg.alpha_au**2 + cfg.sigma_a**2
        )
        sd_y = (cfg.alpha_au * cfg.beta_ya + cfg.beta_yu) / 0.73
        assert sd_y**2 == pytest.approx(
            sd_a**2 + cfg.beta_yu**2 + 2 * cfg.beta_yu * cfg.alpha_au + cfg.sigma_y**2
        )

    def test_invalid_noise_scale(self):
        with pytest.raises(ValueError):
            DgpConfig(sigma_a=0.0)
        with pytest.raises(ValueError):
            DgpConfig(sigma_y=-1.0)

    def test_seed_range(self):
        with pytest.raises(ValueError):
            DgpConfig(seed=-1)
        with pytest.raises(ValueError):
            DgpConfig(seed=1 << 64)


class TestGenerate:
    def test_deterministic(self):
        cfg = DgpConfig(seed=42)
        d1 = generate(cfg, 500)
        d2 = generate(cfg, 500)
        for name in d1.names:
            np.testing.assert_array_equal(d1.column(name), d2.column(name))

    def test_seed_changes_draws(self):
        d1 = generate(DgpConfig(seed=1), 100)
        d2 = generate(DgpConfig(seed=2), 100)
        assert not np.array_equal(d1.column("z"), d2.column("z"))

    def test_column_names_and_structure(self):
        cfg = DgpConfig(seed=3)
        d = generate(cfg, 1000)
        assert d.names == ("z", "u", "a", "y")
        assert d.n == 1000

    def test_variance_targets(self, dgp_100k):
        a = dgp_100k.column("a")
        y = dgp_100k.column("y")
        assert a.var(ddof=1) == pytest.approx(21.63, rel=0.02)
        assert y.var(ddof=1) == pytest.approx(46.90, rel=0.02)

    def test_moment_fidelity_large_sample(self):
        # Million-sample moments against their analytic values, each
        # within three Monte Carlo standard errors.
        n = 1_000_000
        d = generate(DgpConfig(seed=17), n)
        z, u, a, y = d.select(["z", "u", "a", "y"])
        var_a = (2.0 / 0.43) ** 2
        var_y = (5.0 / 0.73) ** 2
        checks = [
            (a.var(ddof=1), var_a, var_a * np.sqrt(2.0 / n)),
            (y.var(ddof=1), var_y, var_y * np.sqrt(2.0 / n)),
            (np.cov(a, u, ddof=1)[0, 1], 3.0, np.sqrt((var_a + 9.0) / n)),
            (np.cov(z, y, ddof=1)[0, 1], 2.0, np.sqrt((var_y + 4.0) / n)),
        ]
        for got, target, mc_se in checks:
            assert abs(got - target) <= 3.0 * mc_se

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            generate(DgpConfig(), 0)


class TestSeedMixing:
    def test_splitmix_is_stable(self):
        # Published sequence from state 0 is mix(k * gamma) for k = 1, 2, ...
        assert splitmix64(0) == 0xE220A8397B1DCDAF
        assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4

    def test_mix_seed_distinct_per_replicate(self):
        seeds = {mix_seed(7, r) for r in range(1000)}
        assert len(seeds) == 1000


class TestMonteCarlo:
    def test_table_shape_and_determinism(self):
        cfg = DgpConfig(seed=11)
        t1 = monte_carlo(cfg, 50, 40)
        t2 = monte_carlo(cfg, 50, 40)
        assert t1.reps == 40
        for m in METHODS:
            np.testing.assert_array_equal(t1.column(m), t2.column(m))
            assert np.isfinite(t1.column(m)).all()

    def test_thread_count_does_not_change_results(self):
        cfg = DgpConfig(seed=12)
        serial = monte_carlo(cfg, 60, 30, threads=1)
        threaded = monte_carlo(cfg, 60, 30, threads=8)
        for m in METHODS:
            np.testing.assert_array_equal(serial.column(m), threaded.column(m))

    def test_csv_emission(self):
        table = monte_carlo(DgpConfig(seed=13), 50, 10)
        buf = io.StringIO()
        table.write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "replicate,ols,ols_adj,iv,iv_adj"
        assert len(lines) == 11
        assert lines[1].startswith("0,")

    def test_replicate_failure_carries_index(self, monkeypatch):
        import ivkit.simulate as sim

        class SingularMock(RuntimeError):
            pass

        def explode(*args, **kwargs):
            raise SingularMock("boom")

        monkeypatch.setattr(sim, "ols", explode)
        with pytest.raises(ReplicateFailure, match="replicate 0"):
            monte_carlo(DgpConfig(seed=14), 50, 3)

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            monte_carlo(DgpConfig(), 50, 0)
        with pytest.raises(ValueError):
            monte_carlo(DgpConfig(), 5, 10)


class TestBoxplotStats:
    def test_hand_values(self):
        s = boxplot_stats([1, 2, 3, 4, 5])
        assert (s.q1, s.median, s.q3) == (2.0, 3.0, 4.0)
        assert (s.whisker_lo, s.whisker_hi) == (1.0, 5.0)
        assert s.n_outliers == 0

    def test_constant_vector(self):
        s = boxplot_stats(np.full(9, 2.5))
        assert s.q1 == s.median == s.q3 == s.whisker_lo == s.whisker_hi == 2.5

    def test_symmetric_data(self):
        v = np.concatenate([np.linspace(-3, 3, 101)])
        s = boxplot_stats(v)
        assert (s.median - s.q1) == pytest.approx(s.q3 - s.median, abs=1e-12)

    def test_outliers_counted(self):
        s = boxplot_stats([1.0, 2.0, 3.0, 4.0, 100.0])
        assert s.whisker_hi == 4.0
        assert s.n_outliers == 1

    def test_too_few_values(self):
        with pytest.raises(InsufficientSampleError):
            boxplot_stats([1.0, 2.0, 3.0, 4.0])

    def test_ordering_validated(self):
        with pytest.raises(ValueError):
            BoxplotStats(q1=2.0, median=1.0, q3=3.0, whisker_lo=0.0, whisker_hi=4.0, n_outliers=0)
