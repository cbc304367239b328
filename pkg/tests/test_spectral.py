"""Tests for the periodic-torus spectral layer."""

import numpy as np
import pytest

from nematicflow.spectral import (Field, Grid, curl, dealias, divergence,
                                  gradient, l2_norm, laplacian, leray_project,
                                  linf_norm, second_derivative)


@pytest.fixture
def grid2():
    return Grid(2, 32)


@pytest.fixture
def grid3():
    return Grid(3, 16)


def random_field(grid, ncomp=1, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    return Field.from_phys(grid, rng.standard_normal((ncomp,) + grid.shape))


class TestGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            Grid(1, 32)
        with pytest.raises(ValueError):
            Grid(2, 24)  # not a power of two
        with pytest.raises(ValueError):
            Grid(2, 4)
        with pytest.raises(ValueError):
            Grid(2, 32, length=-1.0)

    def test_wavenumbers_are_scaled_integers(self):
        grid = Grid(2, 16, length=np.pi)
        scale = 2 * np.pi / np.pi
        k0 = grid.k_full[0].ravel()
        assert np.allclose(k0 / scale, np.fft.fftfreq(16) * 16)

    def test_nyquist_derivative_zeroed(self, grid2):
        for ax in range(2):
            k = grid2.k_deriv[ax].ravel()
            assert k[grid2.res // 2] == 0.0


class TestTransforms:
    def test_constant_maps_to_mode_zero(self, grid2):
        f = Field.from_phys(grid2, np.full(grid2.shape, 3.25))
        spec = f.spec[0]
        assert abs(spec[0, 0] - 3.25) < 1e-14
        spec_rest = spec.copy()
        spec_rest[0, 0] = 0.0
        assert np.max(np.abs(spec_rest)) < 1e-14

    def test_pure_tone_has_two_modes(self):
        grid = Grid(2, 16)
        x0, _ = grid.coords()
        f = Field.from_phys(grid, np.sin(x0) + np.zeros(grid.shape))
        nonzero = np.abs(f.spec[0]) > 1e-13
        assert nonzero.sum() == 2
        assert nonzero[1, 0] and nonzero[-1, 0]

    def test_round_trip(self, grid2):
        f = random_field(grid2, seed=3)
        back = Field.from_spec(grid2, f.spec.copy())
        err = np.max(np.abs(back.phys - f.phys)) / np.max(np.abs(f.phys))
        assert err < 1e-12

    def test_parseval(self, grid2):
        f = random_field(grid2, seed=4)
        phys_sq = grid2.cell_volume * np.sum(f.phys**2)
        spec_sq = grid2.volume * np.sum(np.abs(f.spec) ** 2)
        assert abs(phys_sq - spec_sq) / phys_sq < 1e-10

    def test_conjugate_symmetry(self, grid2):
        f = random_field(grid2, seed=5)
        spec = f.spec[0]
        mirrored = spec
        for ax in range(2):
            mirrored = np.roll(np.flip(mirrored, axis=ax), 1, axis=ax)
        assert np.max(np.abs(spec - np.conj(mirrored))) < 1e-13

    def test_bad_shape_rejected(self, grid2):
        with pytest.raises(ValueError):
            Field.from_phys(grid2, np.zeros((16, 16)))


class TestDerivatives:
    def test_gradient_of_sine(self, grid2):
        x0, x1 = grid2.coords()
        f = Field.from_phys(grid2, np.sin(x0) + np.zeros(grid2.shape))
        assert np.max(np.abs(gradient(f, 0).phys[0] - np.cos(x0) - 0 * x1)) < 1e-12

    def test_gradient_of_constant(self, grid2):
        f = Field.from_phys(grid2, np.full(grid2.shape, 2.0))
        assert np.max(np.abs(gradient(f, 0).phys)) < 1e-13

    def test_gradient_product_tone(self, grid2):
        x0, x1 = grid2.coords()
        f = Field.from_phys(grid2, np.sin(2 * x0) * np.cos(x1))
        exact = -np.sin(2 * x0) * np.sin(x1)
        assert np.max(np.abs(gradient(f, 1).phys[0] - exact)) < 1e-12

    def test_gradient_invalid_axis(self, grid2):
        f = random_field(grid2)
        with pytest.raises(ValueError):
            gradient(f, 2)

    def test_laplacian_tones(self, grid2):
        x0, x1 = grid2.coords()
        f = Field.from_phys(grid2, np.sin(x0) + np.zeros(grid2.shape))
        assert np.max(np.abs(laplacian(f).phys[0] + np.sin(x0) + 0 * x1)) < 1e-12
        g = Field.from_phys(grid2, np.sin(x0) * np.sin(x1))
        assert np.max(np.abs(laplacian(g).phys[0] + 2 * np.sin(x0) * np.sin(x1))) < 1e-11

    def test_laplacian_of_winding_component(self, grid2):
        x0, _ = grid2.coords()
        f = Field.from_phys(grid2, np.cos(x0) + np.zeros(grid2.shape))
        assert np.max(np.abs(laplacian(f).phys[0] + f.phys[0])) < 1e-12

    def test_hessian_trace_matches_laplacian_norm(self, grid2):
        # the Frobenius/Laplacian identity is for resolved fields; the
        # mixed multiplier k_a k_b is not even across the self-conjugate
        # Nyquist slot, so that mode must be absent
        f = dealias(random_field(grid2, seed=6))
        lap_sq = l2_norm(laplacian(f)) ** 2
        hess_sq = 0.0
        for a in range(2):
            for b in range(2):
                hess_sq += l2_norm(second_derivative(f, a, b)) ** 2
        assert abs(lap_sq - hess_sq) / lap_sq < 1e-10


class TestVectorOps:
    def test_divergence_free_slot(self, grid2):
        x0, x1 = grid2.coords()
        v = np.zeros((2,) + grid2.shape)
        v[0] = np.sin(x1) + 0 * x0
        assert np.max(np.abs(divergence(Field.from_phys(grid2, v)).phys)) < 1e-13

    def test_div_grad_is_laplacian(self, grid2):
        x0, x1 = grid2.coords()
        phi = Field.from_phys(grid2, np.sin(x0) * np.sin(x1))
        grad = Field.from_phys(grid2, np.concatenate(
            [gradient(phi, 0).phys, gradient(phi, 1).phys]))
        exact = -2 * np.sin(x0) * np.sin(x1)
        assert np.max(np.abs(divergence(grad).phys[0] - exact)) < 1e-11

    def test_divergence_shape_error(self, grid2):
        with pytest.raises(ValueError):
            divergence(random_field(grid2, ncomp=3))

    def test_curl_taylor_green(self, grid2):
        x0, x1 = grid2.coords()
        v = np.stack([np.sin(x0) * np.cos(x1), -np.cos(x0) * np.sin(x1)])
        omega = curl(Field.from_phys(grid2, v))
        assert np.max(np.abs(omega.phys[0] - 2 * np.sin(x0) * np.sin(x1))) < 1e-11
        assert abs(linf_norm(omega) - 2.0) < 1e-11

    def test_curl_of_gradient_vanishes(self, grid2):
        x0, x1 = grid2.coords()
        phi = Field.from_phys(grid2, np.sin(x0) * np.cos(2 * x1))
        v = Field.from_phys(grid2, np.concatenate(
            [gradient(phi, 0).phys, gradient(phi, 1).phys]))
        assert np.max(np.abs(curl(v).phys)) < 1e-11

    def test_curl_3d_component(self, grid3):
        x = grid3.coords()
        v = np.zeros((3,) + grid3.shape)
        v[2] = np.sin(x[0]) + 0 * x[1] + 0 * x[2]
        omega = curl(Field.from_phys(grid3, v)).phys
        assert np.max(np.abs(omega[1] + np.cos(x[0]) + 0 * x[1] + 0 * x[2])) < 1e-12
        assert np.max(np.abs(omega[0])) < 1e-13
        assert np.max(np.abs(omega[2])) < 1e-13

    def test_divergence_of_curl_vanishes(self, grid3):
        v = random_field(grid3, ncomp=3, seed=8)
        assert np.max(np.abs(divergence(curl(v)).phys)) < 1e-11


class TestLerayProjection:
    def test_annihilates_gradients(self, grid2):
        x0, _ = grid2.coords()
        phi = Field.from_phys(grid2, np.sin(x0) + np.zeros(grid2.shape))
        v = Field.from_phys(grid2, np.concatenate(
            [gradient(phi, 0).phys, gradient(phi, 1).phys]))
        assert np.max(np.abs(leray_project(v).phys)) < 1e-12

    def test_fixes_divergence_free_fields(self, grid2):
        x0, x1 = grid2.coords()
        v = Field.from_phys(grid2, np.stack(
            [np.sin(x0) * np.cos(x1), -np.cos(x0) * np.sin(x1)]))
        assert np.max(np.abs(leray_project(v).phys - v.phys)) < 1e-12

    def test_output_divergence_free_and_idempotent(self, grid2):
        v = random_field(grid2, ncomp=2, seed=9)
        pv = leray_project(v)
        assert np.max(np.abs(divergence(pv).phys)) < 1e-12
        assert np.max(np.abs(leray_project(pv).phys - pv.phys)) < 1e-12

    def test_mode_zero_passthrough(self, grid2):
        v = Field.from_phys(grid2, np.stack(
            [np.full(grid2.shape, 1.5), np.full(grid2.shape, -0.5)]))
        assert np.max(np.abs(leray_project(v).phys - v.phys)) < 1e-14


class TestDealias:
    def test_low_mode_unchanged(self, grid2):
        x0, _ = grid2.coords()
        f = Field.from_phys(grid2, np.sin(x0) + np.zeros(grid2.shape))
        assert np.max(np.abs(dealias(f).phys - f.phys)) < 1e-14

    def test_nyquist_removed(self, grid2):
        x0, _ = grid2.coords()
        f = Field.from_phys(grid2, np.cos(grid2.res // 2 * x0) + np.zeros(grid2.shape))
        assert np.max(np.abs(dealias(f).phys)) < 1e-13

    def test_survivors_at_res_16(self):
        grid = Grid(2, 16)
        kept = grid.dealias_mask
        kabs = np.abs(grid.kfreq_int)
        expected = (kabs[:, None] <= 5) & (kabs[None, :] <= 5)
        assert np.array_equal(kept, expected)


class TestNorms:
    def test_l2_of_sine(self, grid2):
        x0, _ = grid2.coords()
        f = Field.from_phys(grid2, np.sin(x0) + np.zeros(grid2.shape))
        # integral of sin^2 over the cell is (2 pi)^2 / 2
        assert abs(l2_norm(f) - np.sqrt(2 * np.pi**2)) < 1e-12

    def test_translation_invariance(self, grid2):
        f = random_field(grid2, seed=11)
        shifted = Field.from_phys(grid2, np.roll(f.phys, (3, 7), axis=(1, 2)))
        assert abs(l2_norm(f) - l2_norm(shifted)) < 1e-12
        assert abs(linf_norm(f) - linf_norm(shifted)) < 1e-12

    def test_oversampled_linf_on_resolved_tone(self, grid2):
        x0, _ = grid2.coords()
        f = Field.from_phys(grid2, np.sin(x0) + np.zeros(grid2.shape))
        assert abs(linf_norm(f, oversample=True) - 1.0) < 1e-10
