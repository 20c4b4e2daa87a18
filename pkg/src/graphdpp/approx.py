"""Eigendecomposition-free approximate determinantal sampling.

Runs the fast sampler loop against an implicit kernel: the ideal bandlimiting
projector is replaced by a Chebyshev low-pass filter in the Laplacian, its
diagonal is estimated from random probes, and kernel columns are produced by
filtering indicator vectors. Selection is by argmax, so the only randomness
left is the probe draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dpp import SampleSet
from .filters import (
    apply_filter,
    default_probe_count,
    estimate_diagonal,
    fit_ideal_lowpass,
)
from .graphs import Laplacian
from .spectral import estimate_lambda_max

__all__ = ["ApproxTrace", "sample_approx"]


@dataclass(frozen=True, eq=False)
class ApproxTrace:
    """Per-step scores and the steps where the fallback normalization fired."""

    score_history: tuple[np.ndarray, ...]
    fallback_steps: tuple[int, ...]


def sample_approx(
    lap: Laplacian,
    cutoff: float,
    size: int,
    rng: np.random.Generator | None = None,
    degree: int = 50,
    n_probes: int | None = None,
    jackson: bool = True,
    lambda_max: float | None = None,
    return_trace: bool = False,
):
    """Greedily draw ``size`` nodes approximating the bandlimited kernel law.

    Two stabilization rules absorb the filter's approximation error: already
    selected nodes are pinned to score zero after every update, and when the
    orthogonalized column has a nonpositive pivot it is normalized by
    sqrt(norm(f)/N) instead of sqrt(f(s)). Oversampling beyond the band size
    is allowed and still returns distinct nodes.

    Given the same probe draw the output is deterministic. With
    ``return_trace`` the per-step scores and fallback events come along.
    """
    n = lap.n_nodes
    if size < 1 or size > n:
        raise ValueError(f"size must lie in [1, {n}], got {size}")
    if degree < 10:
        raise ValueError("degree must be >= 10")
    if rng is None:
        rng = np.random.default_rng()
    if n_probes is None:
        n_probes = default_probe_count(n)
    lam_max = float(lambda_max) if lambda_max is not None else estimate_lambda_max(lap)
    filt = fit_ideal_lowpass(cutoff, lam_max, degree, jackson=jackson)

    scores = estimate_diagonal(filt, lap, n_probes, rng)
    chosen_mask = np.zeros(n, dtype=bool)
    residuals = np.empty((size, n))
    nodes: list[int] = []
    fallback: list[int] = []
    history = [scores.copy()]
    for step in range(size):
        s = int(np.argmax(np.where(chosen_mask, -np.inf, scores)))
        indicator = np.zeros(n)
        indicator[s] = 1.0
        f = apply_filter(filt, lap, indicator)
        if step:
            f -= residuals[:step].T @ residuals[:step, s]
        pivot = f[s]
        if pivot > 0.0:
            f /= math.sqrt(pivot)
        else:
            fallback.append(step)
            norm = float(np.linalg.norm(f))
            if norm > 0.0:
                f /= math.sqrt(norm / n)
            else:
                f[:] = 0.0
        residuals[step] = f
        scores -= f * f
        chosen_mask[s] = True
        nodes.append(s)
        scores[chosen_mask] = 0.0
        history.append(scores.copy())
    sample = SampleSet(tuple(nodes), method="dpp-approx")
    if return_trace:
        return sample, ApproxTrace(tuple(history), tuple(fallback))
    return sample
