import numpy as np
import pytest

from graphdpp import (
    EigenBasis,
    SbmConfig,
    build_laplacian,
    disjoint_cliques,
    estimate_diagonal,
    estimate_lambda_max,
    fit_ideal_lowpass,
    generate_sbm,
    kernel_from_basis,
    partial_eigendecomposition,
    random_geometric_graph,
    sample_approx,
    sample_mdpp_greedy,
)


def truncated_basis(lap, k):
    """Basis of the first k modes plus the midpoint cutoff toward mode k+1."""
    full = partial_eigendecomposition(lap, k + 1)
    basis = EigenBasis(full.vectors[:, :k], full.values[:k])
    cutoff = 0.5 * (full.values[k - 1] + full.values[k])
    return basis, cutoff


class TestSampleApprox:
    def test_two_cliques_split(self):
        g = disjoint_cliques([6, 6])
        lap = build_laplacian(g)
        sample = sample_approx(lap, 0.5, 2, np.random.default_rng(1), n_probes=100)
        communities = {n // 6 for n in sample.nodes}
        assert communities == {0, 1}
        # exact greedy on the ideal kernel splits the same way
        basis, _ = truncated_basis(lap, 2)
        exact = sample_mdpp_greedy(kernel_from_basis(basis), 2)
        assert {n // 6 for n in exact.nodes} == {0, 1}

    def test_single_pick_is_diagonal_argmax(self):
        g = random_geometric_graph(40, 0.3, np.random.default_rng(8))
        lap = build_laplacian(g)
        lam_max = estimate_lambda_max(lap)
        cutoff = lam_max / 4
        sample = sample_approx(
            lap, cutoff, 1, np.random.default_rng(55), n_probes=60, lambda_max=lam_max
        )
        filt = fit_ideal_lowpass(cutoff, lam_max, 50)
        scores = estimate_diagonal(filt, lap, 60, np.random.default_rng(55))
        assert sample.nodes[0] == int(np.argmax(scores))

    def test_distinct_nodes_even_when_oversampling(self):
        g = disjoint_cliques([5, 5])
        lap = build_laplacian(g)
        # band is 2 but we ask for 7 nodes
        sample = sample_approx(lap, 0.5, 7, np.random.default_rng(3), n_probes=80)
        assert len(set(sample.nodes)) == 7

    def test_deterministic_given_probe_seed(self):
        g = random_geometric_graph(50, 0.3, np.random.default_rng(4))
        lap = build_laplacian(g)
        a = sample_approx(lap, 1.0, 5, np.random.default_rng(77), n_probes=50)
        b = sample_approx(lap, 1.0, 5, np.random.default_rng(77), n_probes=50)
        assert a.nodes == b.nodes

    def test_greedy_overlap_with_exact_kernel(self):
        overlaps = []
        for trial in range(20):
            g = random_geometric_graph(80, 0.22, np.random.default_rng(500 + trial))
            lap = build_laplacian(g)
            k = 5
            basis, cutoff = truncated_basis(lap, k)
            exact = sample_mdpp_greedy(kernel_from_basis(basis), k)
            approx = sample_approx(
                lap, cutoff, k, np.random.default_rng(900 + trial),
                degree=50, n_probes=200,
            )
            overlaps.append(len(set(exact.nodes) & set(approx.nodes)) / k)
        assert np.mean(overlaps) >= 0.6

    def test_scores_monotone_outside_fallback(self):
        g = generate_sbm(SbmConfig(120, 4, 0.2, average_degree=10.0, seed=6))
        lap = build_laplacian(g)
        _, trace = sample_approx(
            lap, 2.0, 8, np.random.default_rng(10), n_probes=100, return_trace=True
        )
        fallback = set(trace.fallback_steps)
        for step in range(len(trace.score_history) - 1):
            if step in fallback:
                continue
            diff = trace.score_history[step + 1] - trace.score_history[step]
            # pinning already-chosen nodes to zero may raise a negative score
            prev = trace.score_history[step]
            rising = diff > 1e-12
            assert np.all(prev[rising] <= 1e-12)

    def test_fallback_rate_low_on_separated_sbm(self):
        # regression bound: measured zero fallbacks at these settings
        events = 0
        steps = 0
        for seed in range(5):
            g = generate_sbm(SbmConfig(200, 10, 0.25, average_degree=16.0, seed=seed))
            lap = build_laplacian(g)
            _, trace = sample_approx(
                lap, _midgap(lap), 20, np.random.default_rng(seed),
                degree=50, n_probes=100, return_trace=True,
            )
            events += len(trace.fallback_steps)
            steps += 20
        assert events / steps < 0.05

    def test_validation(self):
        lap = build_laplacian(disjoint_cliques([3, 3]))
        with pytest.raises(ValueError):
            sample_approx(lap, 0.5, 0, np.random.default_rng(0))
        with pytest.raises(ValueError):
            sample_approx(lap, 0.5, 2, np.random.default_rng(0), degree=5)


def _midgap(lap):
    full = partial_eigendecomposition(lap, 11)
    return 0.5 * (full.values[9] + full.values[10])
