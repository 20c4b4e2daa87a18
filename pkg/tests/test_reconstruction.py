import math

import numpy as np
import pytest

from graphdpp import (
    SampleSet,
    brute_force_max_volume,
    build_laplacian,
    cycle_graph,
    disjoint_cliques,
    generate_bandlimited_signal,
    measure,
    partial_eigendecomposition,
    random_geometric_graph,
    reconstruct,
    sample_mdpp_greedy,
    kernel_from_basis,
    singular_spectrum,
    volume_objective,
)
from graphdpp.reconstruction import RankDeficientSampleError


@pytest.fixture(scope="module")
def setup():
    g = random_geometric_graph(24, 0.35, np.random.default_rng(12))
    lap = build_laplacian(g)
    basis = partial_eigendecomposition(lap, 4)
    return g, basis


class TestMeasure:
    def test_noiseless_is_exact(self, setup, rng):
        _, basis = setup
        sig = generate_bandlimited_signal(basis, rng)
        sample = SampleSet((3, 7, 11))
        meas = measure(sig.values, sample, 0.0)
        assert np.array_equal(meas.observed, sig.values[[3, 7, 11]])

    def test_pure_noise_variance(self):
        x = np.zeros(10)
        sample = SampleSet(tuple(range(10)))
        rng = np.random.default_rng(123)
        values = np.concatenate(
            [measure(x, sample, 1.0, rng).observed for _ in range(1000)]
        )
        assert 0.95 <= values.var() <= 1.05

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            measure(np.zeros(4), SampleSet((5,)), 0.0)


class TestReconstruct:
    def test_noiseless_bandlimited_recovery(self, setup, rng):
        _, basis = setup
        for _ in range(5):
            sig = generate_bandlimited_signal(basis, rng)
            sample = SampleSet((0, 5, 9, 17, 20))
            meas = measure(sig.values, sample, 0.0)
            recon = reconstruct(meas, basis)
            assert np.linalg.norm(recon - sig.values) <= 1e-8

    def test_full_sampling_projects(self, setup, rng):
        _, basis = setup
        n = basis.n_nodes
        x = rng.standard_normal(n)
        meas = measure(x, SampleSet(tuple(range(n))), 0.0)
        recon = reconstruct(meas, basis)
        proj = basis.vectors @ (basis.vectors.T @ x)
        assert np.max(np.abs(recon - proj)) <= 1e-10

    def test_single_mode_single_sample(self):
        g = cycle_graph(6)
        basis = partial_eigendecomposition(build_laplacian(g), 1)
        x = 3.0 * basis.vectors[:, 0]
        meas = measure(x, SampleSet((2,)), 0.0)
        recon = reconstruct(meas, basis)
        expected = basis.vectors[:, 0] * (x[2] / basis.vectors[2, 0])
        assert np.allclose(recon, expected, atol=1e-12)

    def test_rank_deficiency_raises(self, setup):
        _, basis = setup
        with pytest.raises(RankDeficientSampleError):
            meas = measure(np.zeros(basis.n_nodes), SampleSet((0, 1)), 0.0)
            reconstruct(meas, basis)

    def test_duplicate_rows_raise(self):
        # nodes of one clique share the same basis row
        basis = partial_eigendecomposition(build_laplacian(disjoint_cliques([4, 4])), 2)
        meas = measure(np.zeros(8), SampleSet((0, 1)), 0.0)
        with pytest.raises(RankDeficientSampleError):
            reconstruct(meas, basis)

    def test_residual_identity(self, setup):
        # x_rec - x equals the explicit noise amplification term
        _, basis = setup
        rng = np.random.default_rng(31)
        sig = generate_bandlimited_signal(basis, rng)
        sample = SampleSet((1, 4, 8, 13, 19, 22))
        meas = measure(sig.values, sample, 1e-2, rng)
        recon = reconstruct(meas, basis)
        idx = sample.as_array()
        rows = basis.vectors[idx]
        noise = meas.observed - sig.values[idx]
        amplified = basis.vectors @ np.linalg.solve(rows.T @ rows, rows.T @ noise)
        assert np.max(np.abs((recon - sig.values) - amplified)) <= 1e-8

    def test_error_bounded_by_inverse_singular_value(self, setup):
        _, basis = setup
        rng = np.random.default_rng(77)
        for _ in range(20):
            sig = generate_bandlimited_signal(basis, rng)
            nodes = tuple(int(v) for v in rng.choice(basis.n_nodes, 6, replace=False))
            sample = SampleSet(nodes)
            sing = singular_spectrum(basis, sample)
            if sing[0] < 1e-8:
                continue
            meas = measure(sig.values, sample, 1e-3, rng)
            noise = meas.observed - sig.values[sample.as_array()]
            recon = reconstruct(meas, basis)
            bound = np.linalg.norm(noise) / sing[0]
            assert np.linalg.norm(recon - sig.values) <= bound + 1e-12


class TestSingularSpectrum:
    def test_full_sampling_all_ones(self, setup):
        _, basis = setup
        sing = singular_spectrum(basis, SampleSet(tuple(range(basis.n_nodes))))
        assert np.allclose(sing, 1.0, atol=1e-10)

    def test_undersampling_pads_zero(self, setup):
        _, basis = setup
        sing = singular_spectrum(basis, SampleSet((0, 3)))
        assert sing.shape == (4,)
        assert sing[0] == 0.0 and sing[1] == 0.0

    def test_matches_dense_svd(self):
        basis = partial_eigendecomposition(build_laplacian(cycle_graph(6)), 2)
        sample = SampleSet((0, 3))
        sing = singular_spectrum(basis, sample)
        oracle = np.sort(np.linalg.svd(basis.vectors[[0, 3]], compute_uv=False))
        assert np.max(np.abs(sing - oracle)) <= 1e-10


class TestVolumeObjective:
    def test_coincident_rows_give_zero(self):
        basis = partial_eigendecomposition(build_laplacian(disjoint_cliques([4, 4])), 2)
        assert volume_objective(basis, SampleSet((0, 1))) == pytest.approx(0.0, abs=1e-12)

    def test_matches_singular_values(self, setup, rng):
        _, basis = setup
        nodes = tuple(int(v) for v in rng.choice(24, 4, replace=False))
        sample = SampleSet(nodes)
        obj = volume_objective(basis, sample)
        sing = singular_spectrum(basis, sample)
        if sing[0] > 0:
            assert obj == pytest.approx(math.exp(2 * np.log(sing).sum()), rel=1e-8)

    def test_order_invariant(self, setup):
        _, basis = setup
        a = volume_objective(basis, SampleSet((2, 9, 14, 21)))
        b = volume_objective(basis, SampleSet((21, 2, 14, 9)))
        assert a == pytest.approx(b, rel=1e-12)

    def test_wrong_size_rejected(self, setup):
        _, basis = setup
        with pytest.raises(ValueError):
            volume_objective(basis, SampleSet((0, 1)))


class TestBruteForceMaxVolume:
    def test_full_band_returns_everything(self):
        basis = partial_eigendecomposition(build_laplacian(cycle_graph(5)), 5)
        best = brute_force_max_volume(basis)
        assert best.nodes == (0, 1, 2, 3, 4)

    def test_two_cliques_split(self):
        basis = partial_eigendecomposition(build_laplacian(disjoint_cliques([5, 5])), 2)
        best = brute_force_max_volume(basis)
        assert {n // 5 for n in best.nodes} == {0, 1}

    def test_upper_bounds_every_sampler(self, setup):
        _, basis = setup
        best = volume_objective(basis, brute_force_max_volume(basis))
        greedy = sample_mdpp_greedy(kernel_from_basis(basis), 4)
        assert best >= volume_objective(basis, SampleSet(greedy.nodes)) - 1e-12
        rng = np.random.default_rng(5)
        for _ in range(10):
            nodes = tuple(int(v) for v in rng.choice(24, 4, replace=False))
            assert best >= volume_objective(basis, SampleSet(nodes)) - 1e-12

    def test_budget_guard(self):
        g = random_geometric_graph(40, 0.4, np.random.default_rng(2))
        basis = partial_eigendecomposition(build_laplacian(g), 12)
        with pytest.raises(ValueError, match="budget"):
            brute_force_max_volume(basis)
