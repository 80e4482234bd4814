import math

import numpy as np
import pytest

from darisa import (Cluster, ClusterSet, Side, SupportEllipse, composite_rank,
                    sample_cluster_directions, scattering_dof, support_ellipse)

ISO = ClusterSet((Cluster.isotropic(),))


def grid_extents(clusters, side, n_az=2001, n_zen=1001):
    """Independent dense-grid oracle for the wavenumber extents."""
    c1 = c2 = 0.0
    for c in clusters.clusters:
        az_c, az_s, zen_c, zen_s = c.ranges(side)
        az = np.linspace(az_c - az_s, az_c + az_s, n_az)
        zen = np.linspace(zen_c - zen_s, zen_c + zen_s, n_zen)
        for z in zen:
            kx = abs(math.sin(z)) * np.abs(np.cos(az))
            ky = abs(math.sin(z)) * np.abs(np.sin(az))
            c1 = max(c1, float(kx.max()))
            c2 = max(c2, float(ky.max()))
    return min(c1, 1.0), min(c2, 1.0)


class TestSupportEllipse:
    def test_isotropic_fills_disk(self):
        ell = support_ellipse(ISO, Side.TRANSMIT)
        assert ell.c1 == pytest.approx(1.0, abs=1e-12)
        assert ell.c2 == pytest.approx(1.0, abs=1e-12)

    def test_narrow_azimuth_band(self):
        cs = ClusterSet((Cluster.symmetric(math.pi, math.pi / 2,
                                           math.radians(15), math.pi / 2),))
        ell = support_ellipse(cs, Side.TRANSMIT)
        oracle = grid_extents(cs, Side.TRANSMIT)
        assert ell.c1 == pytest.approx(oracle[0], abs=1e-6)
        assert ell.c2 == pytest.approx(oracle[1], abs=1e-6)
        assert ell.c1 == pytest.approx(1.0, abs=1e-9)
        assert ell.c2 == pytest.approx(math.sin(math.radians(15)), abs=1e-9)

    def test_point_cluster(self):
        cs = ClusterSet((Cluster.symmetric(0.0, math.pi / 2, 0.0, 0.0),))
        ell = support_ellipse(cs, Side.TRANSMIT)
        assert ell.c1 == pytest.approx(1.0, abs=1e-12)
        assert ell.c2 == pytest.approx(0.0, abs=1e-12)

    def test_extents_monotone_in_spread(self):
        prev = (0.0, 0.0)
        for spread_deg in (5, 20, 60, 120, 180):
            cs = ClusterSet((Cluster.symmetric(math.pi, math.pi / 2,
                                               math.radians(spread_deg), math.pi / 2),))
            ell = support_ellipse(cs, Side.TRANSMIT)
            assert ell.c1 >= prev[0] - 1e-12
            assert ell.c2 >= prev[1] - 1e-12
            prev = (ell.c1, ell.c2)

    def test_invalid_semiaxes_rejected(self):
        with pytest.raises(ValueError):
            SupportEllipse(1.2, 0.5)


class TestScatteringDof:
    def test_isotropic_four_wavelengths(self):
        ell = support_ellipse(ISO, Side.TRANSMIT)
        pred = scattering_dof((4.0, 4.0), (4.0, 4.0), ell, ell)
        assert pred.d_t == pytest.approx(math.pi * 16, rel=1e-9)
        assert pred.scattering_dof == pytest.approx(math.pi * 16, rel=1e-9)

    def test_isotropic_eight_wavelengths(self):
        ell = support_ellipse(ISO, Side.TRANSMIT)
        pred = scattering_dof((8.0, 8.0), (8.0, 8.0), ell, ell)
        assert pred.d_t == pytest.approx(math.pi * 64, rel=1e-9)

    def test_empty_support_gives_zero(self):
        zero = SupportEllipse(0.0, 0.0)
        pred = scattering_dof((4.0, 4.0), (4.0, 4.0), zero, zero)
        assert pred.scattering_dof == 0.0

    def test_asymmetric_sides(self):
        ell = support_ellipse(ISO, Side.TRANSMIT)
        pred = scattering_dof((8.0, 1.0), (2.0, 1.0), ell, ell)
        assert pred.d_t == pytest.approx(math.pi * 8, rel=1e-9)
        assert pred.d_r == pytest.approx(math.pi * 2, rel=1e-9)
        assert pred.scattering_dof == pred.d_r

    def test_invalid_aperture(self):
        ell = SupportEllipse(1.0, 1.0)
        with pytest.raises(ValueError):
            scattering_dof((0.0, 1.0), (1.0, 1.0), ell, ell)


class TestCompositeRank:
    def test_transmit_limited(self):
        assert composite_rank(4, 2, 8, 50.0, 50.0) == 8

    def test_receive_limited_without_agility(self):
        assert composite_rank(1, 2, 8, 50.0, 50.0) == 2

    def test_scattering_limited(self):
        assert composite_rank(2, 2, 8, 3.0, 50.0) == 3

    def test_floor_applied(self):
        assert composite_rank(4, 2, 8, 6.9, 50.0) == 6

    def test_monotone_then_constant_in_slots(self):
        values = [composite_rank(k, 2, 8, 50.0, 50.0) for k in range(1, 10)]
        assert values == sorted(values)
        cap = min(8, 50)
        reached = [v for v in values if v == cap]
        assert reached and values[-1] == cap

    def test_never_exceeds_scattering_bound(self):
        for k in range(1, 6):
            assert composite_rank(k, 2, 8, 5.0, 7.0) <= 5

    def test_invalid_counts(self):
        with pytest.raises(ValueError):
            composite_rank(0, 1, 1, 1.0, 1.0)


def test_lattice_count_tracks_area():
    # isotropic counts within 15% of pi*Dx*Dy once both apertures reach 2
    iso = Cluster.isotropic()
    for d_x, d_y in [(2, 2), (2.5, 2.5), (3, 3), (4, 4), (6, 6), (8, 8),
                     (2, 4), (3, 6), (2.5, 5)]:
        count = len(sample_cluster_directions(iso, (d_x, d_y), Side.TRANSMIT))
        area = math.pi * d_x * d_y
        assert abs(count - area) / area < 0.15, (d_x, d_y, count, area)
