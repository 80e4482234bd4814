"""Planar DARISA array geometry in wavelength-normalized units.

A link side consists of `darisa_count` identical panels, each an
n_x x n_y grid of metasurface elements at spacing `spacing` (in
wavelengths, at most half a wavelength).  Panels tile contiguously along
the x axis, so the full array spans
(darisa_count * spacing * n_x) x (spacing * n_y).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Side(str, Enum):
    TRANSMIT = "transmit"
    RECEIVE = "receive"


@dataclass(frozen=True)
class ArrayConfig:
    """Static description of one side of the link."""

    side: Side
    n_x: int
    n_y: int
    spacing: float
    darisa_count: int = 1

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("element counts must be positive")
        if not 0.0 < self.spacing <= 0.5:
            raise ValueError("element spacing must lie in (0, 0.5] wavelengths")
        if self.darisa_count < 1:
            raise ValueError("darisa_count must be positive")

    @property
    def elements_per_darisa(self) -> int:
        return self.n_x * self.n_y

    @property
    def total_elements(self) -> int:
        return self.darisa_count * self.elements_per_darisa

    @property
    def darisa_aperture(self) -> tuple[float, float]:
        """Extent of a single panel, (x, y) in wavelengths."""
        return (self.spacing * self.n_x, self.spacing * self.n_y)

    @property
    def aperture(self) -> tuple[float, float]:
        """Extent of the full tiled array, (x, y) in wavelengths."""
        return (self.darisa_count * self.spacing * self.n_x, self.spacing * self.n_y)


@dataclass(frozen=True)
class ElementLayout:
    """Element positions plus the 1-based (panel, local) index map.

    `positions` is (total, 3); z is always 0.  External indexing is
    1-based; `index_map[i - 1]` gives (panel index, local index) of
    element i.
    """

    positions: np.ndarray
    index_map: np.ndarray

    def __post_init__(self):
        self.positions.setflags(write=False)
        self.index_map.setflags(write=False)

    def __len__(self) -> int:
        return self.positions.shape[0]

    def locate(self, element: int) -> tuple[int, int]:
        """Map a 1-based element index to (panel, local) 1-based indices."""
        if not 1 <= element <= len(self):
            raise IndexError(f"element index {element} out of range 1..{len(self)}")
        d, loc = self.index_map[element - 1]
        return int(d), int(loc)


def element_positions(cfg: ArrayConfig) -> ElementLayout:
    """Lay out all elements of a tiled panel array.

    Within a panel, local index j (1-based) sits at
    (mod(j-1, n_x) * spacing, floor((j-1)/n_x) * spacing, 0); panel g adds
    an x offset of (g-1) * n_x * spacing.
    """
    per = cfg.elements_per_darisa
    local = np.arange(per)
    lx = np.mod(local, cfg.n_x).astype(float)
    ly = (local // cfg.n_x).astype(float)
    base = np.column_stack([lx, ly, np.zeros(per)]) * cfg.spacing
    base[:, 2] = 0.0

    tiles = np.arange(cfg.darisa_count) * (cfg.n_x * cfg.spacing)
    positions = np.vstack([base + np.array([off, 0.0, 0.0]) for off in tiles])

    darisa_idx = np.repeat(np.arange(1, cfg.darisa_count + 1), per)
    local_idx = np.tile(np.arange(1, per + 1), cfg.darisa_count)
    index_map = np.column_stack([darisa_idx, local_idx])
    return ElementLayout(positions=positions, index_map=index_map)
