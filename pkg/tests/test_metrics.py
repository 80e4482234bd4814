import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darisa import capacity_edof_approx, capacity_exact, spectrum


class TestSpectrum:
    def test_identity(self):
        rep = spectrum(np.eye(4))
        assert rep.numerical_rank == 4
        assert rep.edof == pytest.approx(4.0, abs=1e-9)
        assert rep.condition_number == pytest.approx(1.0, abs=1e-9)

    def test_rank_one_outer_product(self):
        u = np.array([1.0, 2.0, -1.0])[:, None]
        v = np.array([0.5, 1.0 + 1.0j])[None, :]
        rep = spectrum(u @ v)
        assert rep.numerical_rank == 1
        assert rep.edof == pytest.approx(1.0, abs=1e-9)

    def test_two_singular_values(self):
        rep = spectrum(np.diag([math.sqrt(2.0), 1.0]))
        assert rep.edof == pytest.approx(1.8, abs=1e-12)
        assert rep.numerical_rank == 2

    def test_zero_matrix_degenerate(self):
        rep = spectrum(np.zeros((3, 3)))
        assert rep.degenerate
        assert rep.numerical_rank == 0
        assert rep.edof == 0.0
        assert math.isnan(rep.condition_number)

    def test_threshold_controls_rank_not_edof(self):
        m = np.diag([1.0, 1e-4])
        tight = spectrum(m, rank_threshold=1e-3)
        loose = spectrum(m, rank_threshold=1e-5)
        assert tight.numerical_rank == 1
        assert loose.numerical_rank == 2
        assert tight.edof == pytest.approx(loose.edof, abs=1e-15)

    def test_edof_within_rank_range(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            m = rng.standard_normal((6, 8)) + 1j * rng.standard_normal((6, 8))
            rep = spectrum(m)
            assert 1.0 - 1e-12 <= rep.edof <= rep.numerical_rank + 1e-9

    def test_edof_equals_rank_iff_flat_spectrum(self):
        flat = spectrum(np.eye(5) * 3.0)
        assert abs(flat.edof - flat.numerical_rank) < 1e-9
        tilted = spectrum(np.diag([2.0, 1.0]))
        assert abs(tilted.edof - tilted.numerical_rank) > 1e-3

    def test_invalid_threshold(self):
        with pytest.raises(ValueError):
            spectrum(np.eye(2), rank_threshold=0.0)
        with pytest.raises(ValueError):
            spectrum(np.eye(2), rank_threshold=1.0)

    @given(st.floats(min_value=0.01, max_value=100.0),
           st.integers(min_value=0, max_value=10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_edof_scale_invariant(self, scale, seed):
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
        assert spectrum(scale * m).edof == pytest.approx(spectrum(m).edof, rel=1e-9)


class TestCapacityApprox:
    def test_unit_edof_unit_snr(self):
        assert capacity_edof_approx(1.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_two_streams(self):
        assert capacity_edof_approx(2.0, 2.0) == pytest.approx(2.0, abs=1e-12)

    def test_three_streams(self):
        # direct evaluation of 3*log2(1 + 7/3)
        expect = 5.210896782498619
        assert capacity_edof_approx(3.0, 7.0) == pytest.approx(expect, abs=1e-12)
        assert expect == pytest.approx(3.0 * math.log2(1.0 + 7.0 / 3.0), abs=1e-12)

    def test_degenerate_zero(self):
        assert capacity_edof_approx(0.0, 10.0) == 0.0

    def test_monotone_in_edof(self):
        grid = np.linspace(0.01, 100.0, 2000)
        for snr in (1.0, 10.0, 100.0):
            vals = np.array([capacity_edof_approx(p, snr) for p in grid])
            assert np.all(np.diff(vals) > -1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            capacity_edof_approx(1.0, 0.0)
        with pytest.raises(ValueError):
            capacity_edof_approx(-1.0, 1.0)


class TestCapacityExact:
    def test_zero_matrix(self):
        assert capacity_exact(np.zeros((3, 3)), 10.0) == 0.0

    def test_identity_matches_approx(self):
        for n, snr in [(2, 5.0), (4, 17.0)]:
            expect = n * math.log2(1.0 + snr / n)
            assert capacity_exact(np.eye(n), snr) == pytest.approx(expect, rel=1e-12)

    def test_diagonal_two_by_two(self):
        got = capacity_exact(np.diag([2.0, 1.0]), 2.0)
        assert got == pytest.approx(math.log2(5.0) + 1.0, abs=1e-12)

    def test_high_snr_agreement_with_edof_form(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            base = np.eye(4) + 0.12 * (rng.standard_normal((4, 4))
                                       + 1j * rng.standard_normal((4, 4)))
            rep = spectrum(base)
            if rep.condition_number >= 2.0:
                continue
            exact = capacity_exact(base, 1e4)
            approx = capacity_edof_approx(rep.edof, 1e4)
            assert abs(exact - approx) / exact < 0.05

    def test_invalid_snr(self):
        with pytest.raises(ValueError):
            capacity_exact(np.eye(2), -1.0)
