import numpy as np
import pytest

from hararms.experiments import (
    DATASET1_B,
    DATASET1_BETA,
    DATASET1_KNOTS,
    GridScan,
    assign_to_modes,
    fit_free_knot,
    gen_dataset_1,
    gen_dataset_2,
    grid_loglik,
    mixture_report,
    model_selection,
    spline_mean,
)
from hararms.samplers import SamplerConfig
from hararms.spline import Dataset, knot_log_likelihood
from hararms.targets import MixtureSpec


class TestDataset1:
    def test_shape_and_grid(self):
        d = gen_dataset_1(0)
        assert len(d) == 1000
        assert d.x[0] == 1.0 and d.x[-1] == 1000.0

    def test_mean_values(self):
        # piecewise-linear mean, evaluated by hand:
        # at x=100 (before all knots): -0.5 - 0.5*100 = -50.5
        # at x=200 (at the first knot): -0.5 - 0.5*200 = -100.5
        # at x=250: -100.5 - 0.5*50 + 0.5*50 = -100.5
        mean = spline_mean(np.array([100.0, 200.0, 250.0]), 1,
                           DATASET1_BETA, DATASET1_B, DATASET1_KNOTS)
        assert np.allclose(mean, [-50.5, -100.5, -100.5])

    def test_noise_scale(self):
        d = gen_dataset_1(0)
        resid = d.y - spline_mean(d.x, 1, DATASET1_BETA, DATASET1_B,
                                  DATASET1_KNOTS)
        assert np.std(resid) == pytest.approx(30.0, rel=0.1)

    def test_deterministic_per_seed(self):
        assert np.array_equal(gen_dataset_1(3).y, gen_dataset_1(3).y)
        assert not np.array_equal(gen_dataset_1(3).y, gen_dataset_1(4).y)


class TestDataset2:
    def test_shape_and_grid(self):
        d = gen_dataset_2(0)
        assert len(d) == 1000
        assert d.x[0] == pytest.approx(0.001)
        assert d.x[-1] == pytest.approx(1.0)

    def test_noise_scale(self):
        d = gen_dataset_2(0)
        d2 = gen_dataset_2(1)
        # same mean, independent noise: residual difference has sd 0.3*sqrt(2)
        assert np.std(d.y - d2.y) == pytest.approx(0.3 * np.sqrt(2), rel=0.1)

    def test_knots_identifiable(self):
        # the profile log-likelihood at the true knots must clearly beat a
        # slightly displaced configuration, else fits cannot recover them
        d = gen_dataset_2(1)
        truth = [0.2, 0.4, 0.5, 0.7, 0.9]
        shifted = [0.25, 0.45, 0.55, 0.75, 0.85]
        at_truth = knot_log_likelihood(truth, d, degree=2)
        at_shift = knot_log_likelihood(shifted, d, degree=2)
        assert at_truth - at_shift > 100.0


class TestGridLoglik:
    def test_k1_finds_interior_maximum(self):
        # noiseless single-knot data: the grid argmax is the true knot
        x = np.arange(1, 201, dtype=float)
        y = spline_mean(x, 1, (0.0, 1.0), (-2.0,), (120.0,))
        data = Dataset(x, y)
        scan = grid_loglik(data, 1, np.arange(10.0, 200.0, 10.0))
        best = max(scan.local_maxima, key=lambda kv: kv[1])
        assert best[0] == (120.0,)

    def test_k2_symmetric_unordered(self):
        x = np.arange(1, 201, dtype=float)
        y = spline_mean(x, 1, (0.0, 1.0), (-2.0, 3.0), (60.0, 140.0))
        rng = np.random.default_rng(0)
        data = Dataset(x, y + rng.normal(scale=2.0, size=len(x)))
        scan = grid_loglik(data, 2, np.arange(20.0, 200.0, 20.0))
        assert scan.values.shape == (9, 9)
        assert np.allclose(scan.values, scan.values.T)
        best = max(scan.local_maxima, key=lambda kv: kv[1])
        assert best[0] == (60.0, 140.0)
        for knots, _ in scan.local_maxima:
            assert knots[0] <= knots[1]

    def test_flat_surface_no_maxima(self):
        x = np.arange(1, 101, dtype=float)
        rng = np.random.default_rng(1)
        data = Dataset(x, rng.normal(size=100))
        scan = grid_loglik(data, 1, np.array([30.0, 50.0, 70.0]))
        assert isinstance(scan, GridScan)
        for knots, v in scan.local_maxima:
            assert np.isfinite(v)

    def test_k3_unsupported(self):
        x = np.arange(1, 101, dtype=float)
        data = Dataset(x, np.zeros(100))
        with pytest.raises(ValueError):
            grid_loglik(data, 3, np.array([30.0, 50.0, 70.0]))


class TestModeAssignment:
    MEANS = np.array([[5.0, -5.0], [5.0, 5.0], [-5.0, 5.0], [13.0, 13.0]])

    def test_nearest_within_radius(self):
        samples = np.array([[5.1, -5.2], [13.0, 12.0], [0.0, 0.0]])
        labels = assign_to_modes(samples, self.MEANS)
        assert list(labels) == [0, 3, -1]

    def test_report_counts(self):
        rng = np.random.default_rng(2)
        samples = np.vstack([
            self.MEANS[0] + 0.5 * rng.normal(size=(40, 2)),
            self.MEANS[1] + 0.5 * rng.normal(size=(60, 2)),
        ])
        spec = MixtureSpec(self.MEANS, [0.5, 0.5],
                           [0.2, 0.3, 0.2, 0.3])
        rep = mixture_report("hararms", samples, spec, [0.0, 0.0])
        assert rep.modes_visited == 2
        assert rep.component_fractions[0] == pytest.approx(0.4, abs=0.05)
        assert rep.component_means[3] is None
        assert rep.n_samples == 100


class TestMixtureComparison:
    def test_single_component_both_samplers_agree(self):
        from hararms.experiments import run_mixture_comparison
        spec = MixtureSpec([[1.0, -2.0]], [0.5, 0.5], [1.0])
        cfg = SamplerConfig(n_iterations=4000, seed=10, burn_in=200,
                            initial_abscissae_count=15)
        rep_g, rep_h, _, _ = run_mixture_comparison(
            spec, cfg, [1.0, -2.0], [[-10, 10], [-10, 10]])
        for rep in (rep_g, rep_h):
            assert rep.modes_visited == 1
            assert np.allclose(rep.component_means[0], [1.0, -2.0], atol=0.05)


class TestFitFreeKnot:
    def test_recovers_noiseless_single_knot(self):
        x = np.arange(1, 201, dtype=float)
        rng = np.random.default_rng(3)
        y = spline_mean(x, 1, (0.0, 1.0), (-2.0,), (120.0,))
        data = Dataset(x, y + rng.normal(scale=1.0, size=len(x)))
        cfg = SamplerConfig(n_iterations=600, seed=4, burn_in=100)
        rep = fit_free_knot(data, 1, degree=1, config=cfg)
        assert rep.knots[0] == pytest.approx(120.0, abs=5.0)
        assert rep.quantiles_5[0] <= rep.knots[0] <= rep.quantiles_95[0]

    def test_information_criteria_formulas(self):
        x = np.arange(1, 201, dtype=float)
        rng = np.random.default_rng(5)
        y = spline_mean(x, 1, (0.0, 1.0), (-2.0,), (120.0,))
        data = Dataset(x, y + rng.normal(scale=1.0, size=len(x)))
        cfg = SamplerConfig(n_iterations=200, seed=6, burn_in=50)
        rep = fit_free_knot(data, 1, degree=1, config=cfg)
        # parameters: (degree+1+K) coefficients + K knots + sigma^2
        assert rep.n_parameters == 5
        assert rep.aic == pytest.approx(-2 * rep.log_likelihood + 10)
        assert rep.bic == pytest.approx(
            -2 * rep.log_likelihood + np.log(200) * 5)

    def test_deterministic(self):
        x = np.arange(1, 201, dtype=float)
        rng = np.random.default_rng(7)
        y = spline_mean(x, 1, (0.0, 1.0), (-2.0,), (120.0,))
        data = Dataset(x, y + rng.normal(scale=1.0, size=len(x)))
        cfg = SamplerConfig(n_iterations=200, seed=8, burn_in=50)
        a = fit_free_knot(data, 1, degree=1, config=cfg)
        b = fit_free_knot(data, 1, degree=1, config=cfg)
        assert a.knots == b.knots
        assert a.log_likelihood == b.log_likelihood


class TestModelSelection:
    def make_report(self, k, ll):
        from hararms.experiments import KnotFitReport
        p = 2 * k + 3
        return KnotFitReport(
            n_knots=k, degree=1, knots=[0.0] * k, quantiles_5=[], quantiles_95=[],
            log_likelihood=ll, aic=-2 * ll + 2 * p, bic=-2 * ll + np.log(100) * p,
            n_parameters=p, seed=0)

    def test_aic_picks_plateau_start(self):
        # LL gains of 50 then ~0: AIC must stop at the second model
        reports = [self.make_report(1, -200.0), self.make_report(2, -150.0),
                   self.make_report(3, -149.9)]
        sel = model_selection(reports)
        assert sel.aic_k == 2
        assert sel.bic_k == 2

    def test_delta_ll_table(self):
        reports = [self.make_report(1, -200.0), self.make_report(2, -150.0),
                   self.make_report(3, -149.0)]
        sel = model_selection(reports)
        assert sel.delta_ll == [(1, 50.0), (2, 1.0)]

    def test_tie_goes_to_smaller_k(self):
        # identical AIC: the smaller model wins
        r1 = self.make_report(2, -150.0)
        r2 = self.make_report(3, -148.0)  # LL gain of 2 = parameter penalty
        sel = model_selection([r2, r1])
        assert sel.aic_k == 2
