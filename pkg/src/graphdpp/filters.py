"""Chebyshev polynomial low-pass filters on graph Laplacians.

An ideal low-pass response (1 below the cutoff, 0 above) is expanded in the
Chebyshev basis on [0, lambda_max]. Applying the filter to a signal costs
exactly ``degree`` sparse matvecs through the three-term recurrence; the
filtered operator itself is never materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .graphs import Laplacian

__all__ = [
    "ChebyshevFilter",
    "fit_ideal_lowpass",
    "apply_filter",
    "estimate_diagonal",
    "draw_probes",
    "default_probe_count",
]


@dataclass(frozen=True, eq=False)
class ChebyshevFilter:
    """Degree-r Chebyshev approximation of a spectral step function.

    ``coefficients[j]`` multiplies T_j(t) where t = 2*lam/lambda_max - 1 maps
    the spectral interval onto [-1, 1]; the constant term is already folded
    (no separate c_0/2 convention).
    """

    coefficients: np.ndarray
    degree: int
    lambda_max: float
    cutoff: float
    jackson: bool

    def evaluate(self, lam) -> np.ndarray:
        """Scalar response at the given eigenvalue(s)."""
        t = 2.0 * np.asarray(lam, dtype=float) / self.lambda_max - 1.0
        return npcheb.chebval(t, self.coefficients)

    def to_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "lambda_max": self.lambda_max,
            "degree": self.degree,
            "jackson": self.jackson,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChebyshevFilter":
        return fit_ideal_lowpass(
            d["cutoff"], d["lambda_max"], d["degree"], jackson=d["jackson"]
        )


def _jackson_factors(degree: int) -> np.ndarray:
    """Damping factors suppressing Gibbs oscillation of a truncated series."""
    alpha = math.pi / (degree + 2)
    j = np.arange(degree + 1)
    return (
        (1.0 - j / (degree + 2)) * np.sin(alpha) * np.cos(j * alpha)
        + np.cos(alpha) * np.sin(j * alpha) / (degree + 2)
    ) / np.sin(alpha)


def fit_ideal_lowpass(
    cutoff: float, lambda_max: float, degree: int, jackson: bool = True
) -> ChebyshevFilter:
    """Expand the indicator of [0, cutoff] on [0, lambda_max].

    The expansion coefficients of a step have the closed form
    c_0 = 1 - theta_c/pi and c_j = -2 sin(j*theta_c)/(pi*j) with
    theta_c = arccos(2*cutoff/lambda_max - 1). Jackson damping (default)
    trades Gibbs ringing near the cutoff for a smooth monotone roll-off.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    if not 0.0 <= cutoff <= lambda_max:
        raise ValueError("cutoff must lie in [0, lambda_max]")
    t_c = np.clip(2.0 * cutoff / lambda_max - 1.0, -1.0, 1.0)
    theta_c = math.acos(t_c)
    coefs = np.empty(degree + 1)
    coefs[0] = 1.0 - theta_c / math.pi
    j = np.arange(1, degree + 1)
    coefs[1:] = -2.0 * np.sin(j * theta_c) / (math.pi * j)
    if jackson:
        coefs *= _jackson_factors(degree)
    return ChebyshevFilter(coefs, degree, float(lambda_max), float(cutoff), jackson)


def apply_filter(filt: ChebyshevFilter, lap: Laplacian, x: np.ndarray) -> np.ndarray:
    """Evaluate the filter polynomial in L against a signal.

    Uses the three-term recurrence T_{j+1} = 2 t(L) T_j - T_{j-1} with
    t(L) = (2/lambda_max) L - I, costing exactly ``degree`` sparse matvecs.
    A 2-D input is treated as a batch of column signals. The filter interval
    must cover the spectrum of L.
    """
    L = lap.matrix
    scale = 2.0 / filt.lambda_max
    c = filt.coefficients
    t_prev = np.asarray(x, dtype=float)
    out = c[0] * t_prev
    if filt.degree >= 1:
        t_cur = scale * (L @ t_prev) - t_prev
        out = out + c[1] * t_cur
        for j in range(2, filt.degree + 1):
            t_next = 2.0 * (scale * (L @ t_cur) - t_cur) - t_prev
            out = out + c[j] * t_next
            t_prev, t_cur = t_cur, t_next
    return out


def default_probe_count(n_nodes: int) -> int:
    """Probe budget growing like log N, enough for concentrated estimates."""
    return 10 * max(1, math.ceil(math.log2(max(2, n_nodes))))


def draw_probes(n_nodes: int, n_probes: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian probe matrix with entries of variance 1/n_probes."""
    if n_probes < 1:
        raise ValueError("n_probes must be >= 1")
    return rng.standard_normal((n_nodes, n_probes)) / math.sqrt(n_probes)


def estimate_diagonal(
    filt: ChebyshevFilter,
    lap: Laplacian,
    n_probes: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Stochastic estimate of the diagonal of the squared filtered operator.

    Entry i is the squared norm of row i of the filtered probe block, an
    unbiased estimator of diag(h(L)^2); for a filter close to a projector
    this approximates the projector's diagonal.
    """
    probes = draw_probes(lap.n_nodes, n_probes, rng)
    filtered = apply_filter(filt, lap, probes)
    return np.einsum("ij,ij->i", filtered, filtered)
