"""Theoretical degrees-of-freedom predictions.

The scattering-limited DoF per side is approximately
c1 * c2 * pi * D_x * D_y, where (c1, c2) are the semi-axes of the
tightest axis-aligned ellipse containing the clusters' wavenumber-domain
projection and (D_x, D_y) the full-array aperture in wavelengths.  The
composite spatial-temporal channel rank adds the min with K*N (slot
count times receive panels) and M (transmit panels).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ClusterSet
from .geometry import Side


@dataclass(frozen=True)
class SupportEllipse:
    """Normalized semi-axes of the projected angular support, in [0, 1]."""

    c1: float
    c2: float

    def __post_init__(self):
        if not (0.0 <= self.c1 <= 1.0 and 0.0 <= self.c2 <= 1.0):
            raise ValueError("ellipse semi-axes must lie in [0, 1]")


@dataclass(frozen=True)
class DofPrediction:
    """Real-valued per-side DoF and the derived integer composite rank."""

    d_t: float
    d_r: float
    scattering_dof: float
    composite_dof: int | None = None


def support_ellipse(clusters: ClusterSet, side: Side,
                    azimuth_points: int = 721, zenith_points: int = 361) -> SupportEllipse:
    """Axis-aligned wavenumber extents of the union of cluster supports.

    Each cluster's angular rectangle is scanned on a dense deterministic
    grid; c1 / c2 are the largest |k_x| / |k_y| encountered, clamped to
    the unit disk.
    """
    c1 = 0.0
    c2 = 0.0
    for cluster in clusters.clusters:
        az_c, az_s, zen_c, zen_s = cluster.ranges(side)
        az = np.linspace(az_c - az_s, az_c + az_s, azimuth_points)
        zen = np.linspace(zen_c - zen_s, zen_c + zen_s, zenith_points)
        sz = np.abs(np.sin(zen))
        c1 = max(c1, float(np.max(np.outer(np.abs(np.cos(az)), sz))))
        c2 = max(c2, float(np.max(np.outer(np.abs(np.sin(az)), sz))))
    return SupportEllipse(min(c1, 1.0), min(c2, 1.0))


def scattering_dof(aperture_t: tuple[float, float], aperture_r: tuple[float, float],
                   ellipse_t: SupportEllipse, ellipse_r: SupportEllipse) -> DofPrediction:
    """Per-side scattering DoF c1*c2*pi*D_x*D_y and their minimum."""
    if min(*aperture_t, *aperture_r) <= 0.0:
        raise ValueError("apertures must be positive")
    d_t = ellipse_t.c1 * ellipse_t.c2 * math.pi * aperture_t[0] * aperture_t[1]
    d_r = ellipse_r.c1 * ellipse_r.c2 * math.pi * aperture_r[0] * aperture_r[1]
    return DofPrediction(d_t=d_t, d_r=d_r, scattering_dof=min(d_t, d_r))


def composite_rank(k_slots: int, n_rx: int, m_tx: int, d_t: float, d_r: float) -> int:
    """Rank of the composite channel: min(K*N, M, floor(d_t), floor(d_r))."""
    if min(k_slots, n_rx, m_tx) < 1:
        raise ValueError("K, N, M must all be at least 1")
    return int(min(k_slots * n_rx, m_tx, math.floor(d_t), math.floor(d_r)))
