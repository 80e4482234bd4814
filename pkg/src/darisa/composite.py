"""Slot-indexed phase schedules and the composite spatial-temporal channel.

During one symbol, the element phases are reprogrammed K times.  Stacking
the K slot observations gives the KN x M composite channel
h_c = q_rx_stack^H * blkdiag_K(h_w) * q_tx_stack, where per slot the
transmit phase matrix is block-diagonal over panels (one unit-modulus
column per panel) and the receive one likewise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import NOISE, generator

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseSchedule:
    """Per-slot element phases: tx (K, M, N_t), rx (K, N, N_r), radians."""

    tx_phases: np.ndarray
    rx_phases: np.ndarray

    def __post_init__(self):
        if self.tx_phases.ndim != 3 or self.rx_phases.ndim != 3:
            raise ValueError("phase arrays must be 3-D (slots, panels, elements)")
        if self.tx_phases.shape[0] != self.rx_phases.shape[0]:
            raise ValueError("tx and rx schedules must agree on the slot count")
        object.__setattr__(self, "tx_phases", np.mod(self.tx_phases, _TWO_PI))
        object.__setattr__(self, "rx_phases", np.mod(self.rx_phases, _TWO_PI))
        self.tx_phases.setflags(write=False)
        self.rx_phases.setflags(write=False)

    @property
    def slots(self) -> int:
        return self.tx_phases.shape[0]

    @property
    def shape(self) -> tuple[int, int, int, int, int]:
        """(K, M, N_t, N, N_r)."""
        k, m, n_t = self.tx_phases.shape
        _, n, n_r = self.rx_phases.shape
        return k, m, n_t, n, n_r

    @classmethod
    def zero(cls, slots: int, m_tx: int, n_t: int, n_rx: int, n_r: int) -> "PhaseSchedule":
        return cls(np.zeros((slots, m_tx, n_t)), np.zeros((slots, n_rx, n_r)))

    @classmethod
    def random(cls, slots: int, m_tx: int, n_t: int, n_rx: int, n_r: int,
               rng: np.random.Generator, random_tx: bool = False) -> "PhaseSchedule":
        """Uniform random receive phases per slot; transmit zero by default.

        With random_tx the transmit pattern is drawn once and held over
        the symbol (per-slot transmit agility would expand bandwidth).
        """
        if random_tx:
            tx = np.tile(rng.uniform(0.0, _TWO_PI, size=(1, m_tx, n_t)), (slots, 1, 1))
        else:
            tx = np.zeros((slots, m_tx, n_t))
        rx = rng.uniform(0.0, _TWO_PI, size=(slots, n_rx, n_r))
        return cls(tx, rx)

    def slot_tx_matrix(self, k: int) -> np.ndarray:
        """(M*N_t, M) block-diagonal unit-modulus columns for slot k."""
        return _blkdiag_columns(np.exp(1j * self.tx_phases[k]))

    def slot_rx_matrix(self, k: int) -> np.ndarray:
        """(N*N_r, N) block-diagonal unit-modulus columns for slot k."""
        return _blkdiag_columns(np.exp(1j * self.rx_phases[k]))

    def stacked_tx(self) -> np.ndarray:
        """(K*M*N_t, M) vertical stack of the per-slot transmit matrices."""
        return np.vstack([self.slot_tx_matrix(k) for k in range(self.slots)])

    def blockdiag_rx(self) -> np.ndarray:
        """(K*N*N_r, K*N) block diagonal of the per-slot receive matrices."""
        return _blkdiag([self.slot_rx_matrix(k) for k in range(self.slots)])


def _blkdiag_columns(unit: np.ndarray) -> np.ndarray:
    """(panels * elements, panels) with panel p's column in rows of block p."""
    panels, elements = unit.shape
    out = np.zeros((panels * elements, panels), dtype=complex)
    for p in range(panels):
        out[p * elements:(p + 1) * elements, p] = unit[p]
    return out


def _blkdiag(mats: list[np.ndarray]) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


@dataclass(frozen=True)
class CompositeChannel:
    """KN x M composite channel with its generating factors."""

    h_c: np.ndarray
    h_w: np.ndarray
    schedule: PhaseSchedule

    def __post_init__(self):
        self.h_c.setflags(write=False)

    @property
    def slots(self) -> int:
        return self.schedule.slots

    @property
    def q_bar_t(self) -> np.ndarray:
        return self.schedule.stacked_tx()

    @property
    def q_bar_r(self) -> np.ndarray:
        return self.schedule.blockdiag_rx()

    @property
    def h_w_bar(self) -> np.ndarray:
        """Block diagonal with K copies of h_w (materialized on demand)."""
        return np.kron(np.eye(self.slots), self.h_w)


def assemble_composite(h_w: np.ndarray, schedule: PhaseSchedule) -> CompositeChannel:
    """Stack the K slot observations into the KN x M composite channel."""
    k, m_tx, n_t, n_rx, n_r = schedule.shape
    if h_w.shape != (n_rx * n_r, m_tx * n_t):
        raise ValueError(
            f"h_w shape {h_w.shape} inconsistent with schedule "
            f"(expected {(n_rx * n_r, m_tx * n_t)})")
    rows = []
    for s in range(k):
        rows.append(schedule.slot_rx_matrix(s).conj().T @ (h_w @ schedule.slot_tx_matrix(s)))
    return CompositeChannel(h_c=np.vstack(rows), h_w=h_w, schedule=schedule)


def simulate_received(channel: CompositeChannel, symbol: np.ndarray, snr: float,
                      seed: int, power: float | None = None) -> np.ndarray:
    """One noisy observation y = h_c @ x + w.

    Noise is i.i.d. circular Gaussian with variance P / (K * M * snr)
    where P defaults to ||x||^2 (override via `power` for a fixed budget).
    """
    if snr <= 0.0:
        raise ValueError("snr must be positive")
    k = channel.slots
    m_tx = channel.h_c.shape[1]
    x = np.asarray(symbol, dtype=complex).reshape(m_tx)
    p = float(np.vdot(x, x).real) if power is None else float(power)
    var = p / (k * m_tx * snr)
    rng = generator(seed, stream=NOISE)
    kn = channel.h_c.shape[0]
    w = math.sqrt(var / 2.0) * (rng.standard_normal(kn) + 1j * rng.standard_normal(kn))
    return channel.h_c @ x + w
