"""Sampling a signal on selected nodes and least-squares reconstruction.

A measurement keeps the observed values plus the noise level; reconstruction
solves the bandlimited least-squares problem through a rank-revealing SVD of
the sampled basis rows, never through an explicit normal-equations inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .dpp import SampleSet
from .spectral import EigenBasis

__all__ = [
    "Measurement",
    "RankDeficientSampleError",
    "measure",
    "reconstruct",
    "singular_spectrum",
    "volume_objective",
    "brute_force_max_volume",
]

_RCOND = 1e-10


class RankDeficientSampleError(RuntimeError):
    """The sampled basis rows do not determine the bandlimited coefficients."""


@dataclass(frozen=True, eq=False)
class Measurement:
    """Signal values observed on a sample set, with the noise level used."""

    sample_set: SampleSet
    observed: np.ndarray
    noise_std: float


def measure(
    x: np.ndarray,
    sample: SampleSet,
    noise_std: float,
    rng: np.random.Generator | None = None,
) -> Measurement:
    """Observe x on the sampled nodes plus i.i.d. Gaussian noise."""
    idx = sample.as_array()
    if idx.size and idx.max() >= len(x):
        raise ValueError("sample set indexes past the end of the signal")
    y = np.asarray(x, dtype=float)[idx].copy()
    if noise_std < 0:
        raise ValueError("noise_std must be nonnegative")
    if noise_std > 0:
        if rng is None:
            rng = np.random.default_rng()
        y += noise_std * rng.standard_normal(idx.size)
    return Measurement(sample, y, float(noise_std))


def reconstruct(meas: Measurement, basis: EigenBasis) -> np.ndarray:
    """Least-squares bandlimited reconstruction from a measurement.

    Solves min_a ||rows a - y|| over the sampled basis rows and lifts back
    through the basis. Raises instead of returning garbage when the smallest
    singular value of the sampled rows is below 1e-10 of the largest.
    """
    idx = meas.sample_set.as_array()
    rows = basis.vectors[idx]
    if rows.shape[0] < basis.k:
        raise RankDeficientSampleError(
            f"{rows.shape[0]} samples cannot determine {basis.k} coefficients"
        )
    u, sing, vt = np.linalg.svd(rows, full_matrices=False)
    if sing[0] == 0.0 or sing[-1] < _RCOND * sing[0]:
        raise RankDeficientSampleError(
            f"sampled rows are rank deficient (singular values "
            f"{sing[-1]:.3e} .. {sing[0]:.3e})"
        )
    coef = vt.T @ ((u.T @ meas.observed) / sing)
    return basis.vectors @ coef


def singular_spectrum(basis: EigenBasis, sample: SampleSet) -> np.ndarray:
    """Ascending singular values of the sampled basis rows, zero-padded to k.

    Fewer samples than basis columns force at least k - m zero singular
    values, which show up at the front of the returned vector.
    """
    idx = sample.as_array()
    if idx.size == 0:
        raise ValueError("sample set is empty")
    sing = np.linalg.svd(basis.vectors[idx], compute_uv=False)
    ascending = sing[::-1]
    if ascending.size < basis.k:
        ascending = np.concatenate(
            [np.zeros(basis.k - ascending.size), ascending]
        )
    return ascending


def volume_objective(basis: EigenBasis, sample: SampleSet) -> float:
    """Squared volume spanned by k sampled basis rows.

    det of the k x k Gram matrix of the rows, equal to the product of their
    squared singular values; invariant under reordering of the sample.
    """
    if len(sample) != basis.k:
        raise ValueError(
            f"volume objective needs exactly {basis.k} samples, got {len(sample)}"
        )
    rows = basis.vectors[sample.as_array()]
    return float(np.linalg.det(rows.T @ rows))


def brute_force_max_volume(basis: EigenBasis, budget: int = 10**6) -> SampleSet:
    """Exact maximizer of the volume objective by enumeration (small N only).

    Ties break lexicographically. Refuses instances whose subset count
    exceeds the budget.
    """
    n, k = basis.n_nodes, basis.k
    if math.comb(n, k) > budget:
        raise ValueError(
            f"enumeration of C({n}, {k}) subsets exceeds the budget {budget}"
        )
    best = None
    best_val = -np.inf
    for subset in combinations(range(n), k):
        rows = basis.vectors[np.asarray(subset, dtype=np.intp)]
        val = float(np.linalg.det(rows.T @ rows))
        if val > best_val:
            best, best_val = subset, val
    return SampleSet(best, method="max-volume-brute-force")
