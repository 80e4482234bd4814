"""Spectrum metrics: numerical rank, effective DoF, capacity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SpectrumReport:
    """Singular-value summary of a channel matrix.

    `edof` is the trace-to-Frobenius-norm ratio squared of the Gram
    matrix, (sum s_i^2)^2 / sum s_i^4, computed over the full spectrum;
    the numerical rank and condition number use only singular values
    above `rank_threshold` times the largest.
    """

    singular_values: np.ndarray
    numerical_rank: int
    edof: float
    condition_number: float
    rank_threshold: float
    degenerate: bool = False

    def __post_init__(self):
        self.singular_values.setflags(write=False)


def spectrum(matrix: np.ndarray, rank_threshold: float = 1e-3) -> SpectrumReport:
    """Singular values plus rank / EDoF / condition summary."""
    m = np.asarray(matrix)
    if m.size == 0:
        raise ValueError("matrix must be nonempty")
    if not 0.0 < rank_threshold < 1.0:
        raise ValueError("rank_threshold must lie in (0, 1)")
    s = np.linalg.svd(m, compute_uv=False)
    s = np.sort(s)[::-1]
    if s[0] == 0.0:
        return SpectrumReport(s, 0, 0.0, math.nan, rank_threshold, degenerate=True)
    retained = s[s > rank_threshold * s[0]]
    s2 = s * s
    edof = float(np.sum(s2) ** 2 / np.sum(s2 * s2))
    cond = float((retained[0] / retained[-1]) ** 2)
    return SpectrumReport(s, int(retained.size), edof, cond, rank_threshold)


def capacity_edof_approx(edof: float, snr: float) -> float:
    """Capacity estimate edof * log2(1 + snr / edof) in bit/s/Hz."""
    if snr <= 0.0:
        raise ValueError("snr must be positive")
    if edof == 0.0:
        return 0.0
    if edof < 0.0:
        raise ValueError("edof must be non-negative")
    return edof * math.log2(1.0 + snr / edof)


def capacity_exact(matrix: np.ndarray, snr: float) -> float:
    """Equal-power log-det capacity log2 det(I + snr/cols * M M^H)."""
    if snr <= 0.0:
        raise ValueError("snr must be positive")
    m = np.asarray(matrix)
    cols = m.shape[1]
    s = np.linalg.svd(m, compute_uv=False)
    return float(np.sum(np.log2(1.0 + (snr / cols) * s * s)))
