"""Multi-cluster scattering channel between planar phased panels.

Each cluster occupies an angular rectangle (center +- spread in azimuth
and zenith) on both ends of the link.  Propagation directions are the
points of the wavenumber lattice -- spacing 2*pi over the full-array
aperture per axis, i.e. normalized points (p_x / D_x, p_y / D_y) inside
the unit disk -- that fall within the cluster's projected support.
Per-ray gains are i.i.d. unit-variance circular Gaussians; the assembled
element-port matrix is the spread-weighted sum over clusters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ElementLayout, Side
from .rng import CHANNEL, generator

_MEMBERSHIP_EPS = 1e-9


class DegenerateClusterError(ValueError):
    """A cluster's support contains no wavenumber lattice point."""


@dataclass(frozen=True)
class Cluster:
    """Angular support of one scattering cluster, all angles in radians.

    Supports are [center - spread, center + spread]; azimuth wraps
    circularly, zenith lives on [0, pi].  An azimuth spread >= pi means
    the full circle.
    """

    center_azimuth_dep: float
    center_zenith_dep: float
    center_azimuth_arr: float
    center_zenith_arr: float
    spread_azimuth_dep: float = 0.0
    spread_zenith_dep: float = 0.0
    spread_azimuth_arr: float = 0.0
    spread_zenith_arr: float = 0.0

    def __post_init__(self):
        for name in ("spread_azimuth_dep", "spread_zenith_dep",
                     "spread_azimuth_arr", "spread_zenith_arr"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def symmetric(cls, center_azimuth: float, center_zenith: float,
                  spread_azimuth: float, spread_zenith: float) -> "Cluster":
        """Same angular support on the departure and arrival ends."""
        return cls(center_azimuth, center_zenith, center_azimuth, center_zenith,
                   spread_azimuth, spread_zenith, spread_azimuth, spread_zenith)

    @classmethod
    def isotropic(cls) -> "Cluster":
        """Full-sphere support on both ends."""
        return cls.symmetric(math.pi, math.pi / 2, math.pi, math.pi / 2)

    def ranges(self, side: Side) -> tuple[float, float, float, float]:
        """(azimuth center, azimuth spread, zenith center, zenith spread)."""
        if side == Side.TRANSMIT:
            return (self.center_azimuth_dep, self.spread_azimuth_dep,
                    self.center_zenith_dep, self.spread_zenith_dep)
        return (self.center_azimuth_arr, self.spread_azimuth_arr,
                self.center_zenith_arr, self.spread_zenith_arr)


@dataclass(frozen=True)
class ClusterSet:
    clusters: tuple[Cluster, ...]

    def __post_init__(self):
        if len(self.clusters) < 1:
            raise ValueError("at least one cluster required")
        object.__setattr__(self, "clusters", tuple(self.clusters))

    def __len__(self) -> int:
        return len(self.clusters)

    @property
    def power_normalization(self) -> float:
        """Global 1/sqrt(L) amplitude factor."""
        return 1.0 / math.sqrt(len(self.clusters))


@dataclass(frozen=True)
class DirectionSample:
    azimuth: float
    zenith: float
    wavenumber_xy: np.ndarray

    def __post_init__(self):
        self.wavenumber_xy.setflags(write=False)


def angle_to_wavenumber(azimuth: float, zenith: float) -> np.ndarray:
    """Normalized transverse wavenumber (sin z cos a, sin z sin a)."""
    sz = math.sin(zenith)
    return np.array([sz * math.cos(azimuth), sz * math.sin(azimuth)])


def _wrap_pi(x: float) -> float:
    """Wrap an angle difference into (-pi, pi]."""
    w = math.fmod(x + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def _invert_wavenumber(kx: float, ky: float) -> tuple[float, float]:
    """Front-hemisphere angles of a normalized transverse wavenumber."""
    rho = min(math.hypot(kx, ky), 1.0)
    zenith = math.asin(rho)
    azimuth = math.atan2(ky, kx) % (2.0 * math.pi)
    return azimuth, zenith


def sample_cluster_directions(cluster: Cluster, aperture: tuple[float, float],
                              side: Side) -> list[DirectionSample]:
    """Wavenumber-lattice directions covered by one cluster.

    Lattice points (p_x / D_x, p_y / D_y), p integer, are kept when they
    lie in the unit disk and their front-hemisphere angles fall inside
    the cluster's support.  A point cluster (both spreads zero) snaps to
    the nearest lattice point instead.  Order is lexicographic in
    (p_x, p_y) and therefore deterministic.
    """
    d_x, d_y = aperture
    if d_x <= 0.0 or d_y <= 0.0:
        raise ValueError("aperture dimensions must be positive")
    az_c, az_s, zen_c, zen_s = cluster.ranges(side)

    if az_s == 0.0 and zen_s == 0.0:
        return [_snap_point(az_c, zen_c, d_x, d_y)]

    samples: list[DirectionSample] = []
    px_max = int(math.floor(d_x + _MEMBERSHIP_EPS))
    py_max = int(math.floor(d_y + _MEMBERSHIP_EPS))
    for px in range(-px_max, px_max + 1):
        for py in range(-py_max, py_max + 1):
            kx, ky = px / d_x, py / d_y
            if kx * kx + ky * ky > 1.0 + _MEMBERSHIP_EPS:
                continue
            azimuth, zenith = _invert_wavenumber(kx, ky)
            if not zen_c - zen_s - _MEMBERSHIP_EPS <= zenith <= zen_c + zen_s + _MEMBERSHIP_EPS:
                continue
            if az_s < math.pi - _MEMBERSHIP_EPS:
                if abs(_wrap_pi(azimuth - az_c)) > az_s + _MEMBERSHIP_EPS:
                    continue
            samples.append(DirectionSample(azimuth, zenith, np.array([kx, ky])))
    return samples


def _snap_point(az_c: float, zen_c: float, d_x: float, d_y: float) -> DirectionSample:
    target = angle_to_wavenumber(az_c, zen_c)
    best = None
    px_max = int(math.floor(d_x + _MEMBERSHIP_EPS))
    py_max = int(math.floor(d_y + _MEMBERSHIP_EPS))
    for px in range(-px_max, px_max + 1):
        for py in range(-py_max, py_max + 1):
            kx, ky = px / d_x, py / d_y
            if kx * kx + ky * ky > 1.0 + _MEMBERSHIP_EPS:
                continue
            dist = math.hypot(kx - target[0], ky - target[1])
            if best is None or dist < best[0] - 1e-15:
                best = (dist, px, py, kx, ky)
    _, _, _, kx, ky = best
    azimuth, zenith = _invert_wavenumber(kx, ky)
    return DirectionSample(azimuth, zenith, np.array([kx, ky]))


@dataclass(frozen=True)
class ChannelRealization:
    """Per-cluster factors and the assembled element-port matrix.

    a_t[l] is (d_t_l, tx elements), a_r[l] is (d_r_l, rx elements), both
    with unit-modulus entries; h_a[l] is the (d_r_l, d_t_l) Gaussian ray
    gain matrix; h_w = 1/sqrt(L) * sum_l a_r[l]^H h_a[l] a_t[l].
    """

    a_t: tuple[np.ndarray, ...]
    a_r: tuple[np.ndarray, ...]
    h_a: tuple[np.ndarray, ...]
    h_w: np.ndarray
    seed: int

    def __post_init__(self):
        for arr in (*self.a_t, *self.a_r, *self.h_a, self.h_w):
            arr.setflags(write=False)

    @property
    def sample_counts(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Per-cluster direction counts, (transmit side, receive side)."""
        return (tuple(a.shape[0] for a in self.a_t),
                tuple(a.shape[0] for a in self.a_r))


def _response_matrix(samples: list[DirectionSample], layout: ElementLayout) -> np.ndarray:
    """Unit-modulus response, one row per direction, one column per element."""
    kxy = np.array([s.wavenumber_xy for s in samples])
    pos_xy = layout.positions[:, :2]
    return np.exp(2j * np.pi * (kxy @ pos_xy.T))


def generate_channel(clusters: ClusterSet, tx: ElementLayout, rx: ElementLayout,
                     apertures: tuple[tuple[float, float], tuple[float, float]],
                     seed: int) -> ChannelRealization:
    """Draw one channel realization, fully determined by `seed`.

    `apertures` is ((tx D_x, tx D_y), (rx D_x, rx D_y)) of the full
    arrays; it controls the direction lattice density.
    """
    if len(tx) == 0 or len(rx) == 0:
        raise ValueError("layouts must be nonempty")
    tx_ap, rx_ap = apertures
    rng = generator(seed, stream=CHANNEL)

    a_t, a_r, h_a = [], [], []
    h_w = np.zeros((len(rx), len(tx)), dtype=complex)
    for idx, cluster in enumerate(clusters.clusters):
        dirs_t = sample_cluster_directions(cluster, tx_ap, Side.TRANSMIT)
        dirs_r = sample_cluster_directions(cluster, rx_ap, Side.RECEIVE)
        if not dirs_t or not dirs_r:
            side = "transmit" if not dirs_t else "receive"
            raise DegenerateClusterError(
                f"cluster {idx} has no direction samples on the {side} side")
        at = _response_matrix(dirs_t, tx)
        ar = _response_matrix(dirs_r, rx)
        ha = (rng.standard_normal((len(dirs_r), len(dirs_t)))
              + 1j * rng.standard_normal((len(dirs_r), len(dirs_t)))) / math.sqrt(2.0)
        a_t.append(at)
        a_r.append(ar)
        h_a.append(ha)
        h_w += ar.conj().T @ ha @ at
    h_w *= clusters.power_normalization
    return ChannelRealization(tuple(a_t), tuple(a_r), tuple(h_a), h_w, seed)
