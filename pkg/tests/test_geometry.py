import itertools

import numpy as np
import pytest

from darisa import ArrayConfig, Side, element_positions


def brute_force_positions(n_x, n_y, spacing, count):
    """Independent enumeration: panels tile along x, row-major inside."""
    out = []
    for g in range(count):
        for j in range(n_x * n_y):
            x = (j % n_x) * spacing + g * n_x * spacing
            y = (j // n_x) * spacing
            out.append((x, y, 0.0))
    return np.array(out)


def test_first_element_at_origin():
    lay = element_positions(ArrayConfig(Side.TRANSMIT, 4, 4, 0.5, 1))
    assert np.allclose(lay.positions[0], [0.0, 0.0, 0.0])


def test_row_major_wrap():
    # j=5: x index mod(4,4)=0, y index floor(4/4)=1
    lay = element_positions(ArrayConfig(Side.TRANSMIT, 4, 4, 0.5, 1))
    assert np.allclose(lay.positions[4], [0.0, 0.5, 0.0])


def test_panel_tiling_offset():
    # first element of the second panel sits one panel width along x
    cfg = ArrayConfig(Side.TRANSMIT, 2, 2, 0.25, 2)
    lay = element_positions(cfg)
    expect = brute_force_positions(2, 2, 0.25, 2)
    assert np.allclose(lay.positions, expect)
    assert np.allclose(lay.positions[4], [0.5, 0.0, 0.0])


@pytest.mark.parametrize("n_x,n_y,spacing,count", [
    (4, 4, 0.5, 1), (2, 2, 0.25, 2), (3, 5, 0.125, 3), (1, 1, 0.5, 4),
])
def test_layout_matches_enumeration(n_x, n_y, spacing, count):
    cfg = ArrayConfig(Side.RECEIVE, n_x, n_y, spacing, count)
    lay = element_positions(cfg)
    assert lay.positions.shape == (count * n_x * n_y, 3)
    assert np.allclose(lay.positions, brute_force_positions(n_x, n_y, spacing, count))
    assert np.all(lay.positions[:, 2] == 0.0)


def test_min_pairwise_distance_equals_spacing():
    cfg = ArrayConfig(Side.TRANSMIT, 3, 2, 0.25, 2)
    pos = element_positions(cfg).positions
    dmin = min(np.linalg.norm(a - b)
               for a, b in itertools.combinations(pos, 2))
    assert dmin == pytest.approx(0.25, abs=1e-12)


def test_layout_deterministic():
    cfg = ArrayConfig(Side.TRANSMIT, 4, 3, 0.3, 2)
    a = element_positions(cfg)
    b = element_positions(cfg)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.index_map, b.index_map)


def test_index_map_is_one_based():
    cfg = ArrayConfig(Side.TRANSMIT, 2, 2, 0.25, 2)
    lay = element_positions(cfg)
    assert lay.locate(1) == (1, 1)
    assert lay.locate(4) == (1, 4)
    assert lay.locate(5) == (2, 1)
    assert lay.locate(8) == (2, 4)
    with pytest.raises(IndexError):
        lay.locate(0)
    with pytest.raises(IndexError):
        lay.locate(9)


def test_aperture_properties():
    cfg = ArrayConfig(Side.TRANSMIT, 16, 16, 0.25, 2)
    assert cfg.darisa_aperture == (4.0, 4.0)
    assert cfg.aperture == (8.0, 4.0)
    assert cfg.total_elements == 512


@pytest.mark.parametrize("kwargs", [
    dict(n_x=0, n_y=4, spacing=0.5, darisa_count=1),
    dict(n_x=4, n_y=0, spacing=0.5, darisa_count=1),
    dict(n_x=4, n_y=4, spacing=0.0, darisa_count=1),
    dict(n_x=4, n_y=4, spacing=-0.1, darisa_count=1),
    dict(n_x=4, n_y=4, spacing=0.51, darisa_count=1),
    dict(n_x=4, n_y=4, spacing=0.5, darisa_count=0),
])
def test_invalid_configs_rejected(kwargs):
    with pytest.raises(ValueError):
        ArrayConfig(Side.TRANSMIT, **kwargs)


def test_positions_read_only():
    lay = element_positions(ArrayConfig(Side.TRANSMIT, 2, 2, 0.5, 1))
    with pytest.raises(ValueError):
        lay.positions[0, 0] = 5.0
