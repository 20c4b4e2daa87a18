"""Determinantal node sampling on graphs and bandlimited signal reconstruction."""

from .approx import ApproxTrace, sample_approx
from .bench import (
    METHODS,
    BenchConfig,
    BenchResult,
    BenchRow,
    draw_sample_set,
    prepare_resources,
    run_benchmark,
    sample_uniform_iid,
    sample_weighted_iid,
)
from .dpp import (
    KernelNumericsError,
    OpCounter,
    ProjectionKernel,
    SampleSet,
    SamplerTrace,
    brute_force_mdpp_law,
    kernel_from_basis,
    mdpp_log_probability,
    sample_mdpp_fast,
    sample_mdpp_greedy,
    sample_mdpp_reference,
)
from .filters import (
    ChebyshevFilter,
    apply_filter,
    default_probe_count,
    draw_probes,
    estimate_diagonal,
    fit_ideal_lowpass,
)
from .graphs import (
    BandlimitedSignal,
    Graph,
    GraphFormatError,
    Laplacian,
    SbmConfig,
    build_laplacian,
    complete_graph,
    cycle_graph,
    disjoint_cliques,
    generate_bandlimited_signal,
    generate_sbm,
    load_graph,
    path_graph,
    random_geometric_graph,
    save_graph,
    sbm_detectability_threshold,
    sbm_edge_probabilities,
    star_graph,
)
from .reconstruction import (
    Measurement,
    RankDeficientSampleError,
    brute_force_max_volume,
    measure,
    reconstruct,
    singular_spectrum,
    volume_objective,
)
from .spectral import (
    EigenBasis,
    EigensolverError,
    eigencount,
    estimate_band_cutoff,
    estimate_lambda_max,
    partial_eigendecomposition,
)

__version__ = "0.1.0"
