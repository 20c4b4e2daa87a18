import numpy as np
import pytest

from graphdpp import (
    apply_filter,
    build_laplacian,
    draw_probes,
    estimate_diagonal,
    estimate_lambda_max,
    fit_ideal_lowpass,
    path_graph,
)
from graphdpp.filters import ChebyshevFilter


def dense_filter_matrix(filt, lap):
    """Spectral oracle: evaluate the filter on the full dense eigensystem."""
    vals, vecs = np.linalg.eigh(lap.matrix.toarray())
    return (vecs * filt.evaluate(vals)) @ vecs.T


class TestFit:
    def test_midband_step_quality(self):
        lam_max = 4.0
        f = fit_ideal_lowpass(2.0, lam_max, 50)
        grid = np.linspace(0, lam_max, 2000)
        ideal = (grid <= 2.0).astype(float)
        err = np.abs(f.evaluate(grid) - ideal)
        far = np.abs(grid - 2.0) > 0.1 * lam_max
        assert err[far].max() < 0.05

    def test_degree_one_is_decreasing(self):
        f = fit_ideal_lowpass(1.0, 2.0, 1)
        assert f.evaluate(0.0) > f.evaluate(2.0)

    def test_far_error_never_grows_with_degree(self):
        lam_max = 3.0
        grid = np.linspace(0, lam_max, 2000)
        far = np.abs(grid - 1.5) > 0.1 * lam_max
        ideal = (grid <= 1.5).astype(float)
        errs = []
        for degree in (10, 25, 50, 100):
            f = fit_ideal_lowpass(1.5, lam_max, degree)
            errs.append(np.abs(f.evaluate(grid) - ideal)[far].max())
        for a, b in zip(errs, errs[1:]):
            assert b <= a + 1e-12

    def test_response_endpoints_and_bounds(self):
        for degree in (10, 30, 50):
            for cutoff in (0.8, 1.5, 2.4):
                f = fit_ideal_lowpass(cutoff, 3.0, degree)
                margin = 5.0 * 3.0 / degree
                grid = np.linspace(0, 3.0, 1000)
                vals = f.evaluate(grid)
                assert np.all(np.isfinite(vals))
                assert np.max(np.abs(vals)) <= 2.0
                if cutoff >= margin and 3.0 - cutoff >= margin:
                    assert 0.8 <= f.evaluate(0.0) <= 1.2
                    assert -0.2 <= f.evaluate(3.0) <= 0.2

    def test_degenerate_cutoffs(self):
        flat_one = fit_ideal_lowpass(3.0, 3.0, 20)
        flat_zero = fit_ideal_lowpass(0.0, 3.0, 20)
        grid = np.linspace(0, 3.0, 50)
        assert np.allclose(flat_one.evaluate(grid), 1.0, atol=1e-12)
        assert np.allclose(flat_zero.evaluate(grid), 0.0, atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            fit_ideal_lowpass(1.0, 2.0, 0)
        with pytest.raises(ValueError):
            fit_ideal_lowpass(3.0, 2.0, 10)
        with pytest.raises(ValueError):
            fit_ideal_lowpass(1.0, 0.0, 10)

    def test_dict_round_trip(self):
        f = fit_ideal_lowpass(1.2, 3.1, 40, jackson=False)
        back = ChebyshevFilter.from_dict(f.to_dict())
        assert np.allclose(back.coefficients, f.coefficients)
        assert back.jackson is False


class TestApply:
    def test_constant_vector_scales_by_dc_response(self):
        lap = build_laplacian(path_graph(16))
        lam_max = estimate_lambda_max(lap)
        f = fit_ideal_lowpass(lam_max / 3, lam_max, 30)
        ones = np.ones(16) / 4.0
        out = apply_filter(f, lap, ones)
        assert np.max(np.abs(out - f.evaluate(0.0) * ones)) <= 1e-10

    def test_matches_dense_spectral_oracle(self, corpus, rng):
        for name, g in corpus:
            if g.n_nodes > 50:
                continue
            lap = build_laplacian(g)
            lam_max = max(estimate_lambda_max(lap), 1e-6)
            f = fit_ideal_lowpass(lam_max / 2.5, lam_max, 40)
            dense = dense_filter_matrix(f, lap)
            x = rng.standard_normal(g.n_nodes)
            assert np.max(np.abs(apply_filter(f, lap, x) - dense @ x)) <= 1e-8, name

    def test_linearity(self, rng):
        lap = build_laplacian(path_graph(20))
        lam_max = estimate_lambda_max(lap)
        f = fit_ideal_lowpass(1.0, lam_max, 25)
        x, y = rng.standard_normal(20), rng.standard_normal(20)
        lhs = apply_filter(f, lap, 2.0 * x - 3.0 * y)
        rhs = 2.0 * apply_filter(f, lap, x) - 3.0 * apply_filter(f, lap, y)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10

    def test_batch_matches_columns(self, rng):
        lap = build_laplacian(path_graph(12))
        f = fit_ideal_lowpass(1.0, estimate_lambda_max(lap), 20)
        X = rng.standard_normal((12, 5))
        batch = apply_filter(f, lap, X)
        for c in range(5):
            assert np.allclose(batch[:, c], apply_filter(f, lap, X[:, c]), atol=1e-12)


class TestProbes:
    def test_row_energy_statistic(self):
        # rows of the probe matrix have mean squared norm 1
        rng = np.random.default_rng(4)
        R = draw_probes(600, 24, rng)
        row_energy = np.sum(R * R, axis=1)
        assert abs(row_energy.mean() - 1.0) <= 0.1


class TestEstimateDiagonal:
    def test_flat_filter_returns_probe_rows(self):
        # an edgeless graph with a unit-wide flat filter passes probes through
        from graphdpp import Graph

        n = 1024
        lap = build_laplacian(Graph(n, np.empty((0, 2), dtype=np.int64), np.empty(0)))
        f = fit_ideal_lowpass(1.0, 1.0, 12)
        rng = np.random.default_rng(9)
        n_probes = 30
        est = estimate_diagonal(f, lap, n_probes, rng)
        R = draw_probes(n, n_probes, np.random.default_rng(9))
        assert np.allclose(est, np.sum(R * R, axis=1), atol=1e-10)
        assert abs(est.mean() - 1.0) <= 0.15
        assert abs(est.sum() - n) <= 0.15 * n

    def test_unbiased_against_dense_oracle(self):
        # mean over 200 probe resamplings vs the dense diagonal, within 3 s.e.
        g = _geometric(60)
        lap = build_laplacian(g)
        lam_max = estimate_lambda_max(lap)
        f = fit_ideal_lowpass(lam_max / 3, lam_max, 40)
        dense = dense_filter_matrix(f, lap)
        exact = np.diag(dense @ dense)
        reps = 200
        estimates = np.empty((reps, 60))
        for rep in range(reps):
            estimates[rep] = estimate_diagonal(
                f, lap, 10, np.random.default_rng(1000 + rep)
            )
        mean = estimates.mean(axis=0)
        se = estimates.std(axis=0, ddof=1) / np.sqrt(reps)
        assert np.all(np.abs(mean - exact) <= 3.0 * se + 1e-12)

    def test_entrywise_accuracy_with_many_probes(self):
        g = _geometric(100)
        lap = build_laplacian(g)
        lam_max = estimate_lambda_max(lap)
        f = fit_ideal_lowpass(lam_max / 4, lam_max, 50)
        dense = dense_filter_matrix(f, lap)
        exact = np.diag(dense @ dense)
        est = estimate_diagonal(f, lap, 2000, np.random.default_rng(3))
        big = exact > 0.01
        rel = np.abs(est[big] - exact[big]) / exact[big]
        assert rel.max() < 0.10


def _geometric(n):
    from graphdpp import random_geometric_graph

    return random_geometric_graph(n, 0.3, np.random.default_rng(n))
