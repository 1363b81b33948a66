import math

import numpy as np
import pytest

from fdmafl.lambertw import lambert_w0, lambert_wm1

INV_E = math.exp(-1.0)


class TestPrincipalBranch:
    def test_identity_points(self):
        assert lambert_w0(0.0) == 0.0
        assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-14)
        assert lambert_w0(-INV_E) == pytest.approx(-1.0, abs=1e-12)

    def test_residual_on_log_grid(self):
        x = np.concatenate(
            [
                -INV_E + 1e-12 + np.geomspace(1e-12, INV_E, 3000),
                np.geomspace(1e-12, 1e6, 7000),
            ]
        )
        w = lambert_w0(x)
        residual = np.abs(w * np.exp(w) - x)
        assert np.all(residual <= 1e-13 * np.maximum(1.0, np.abs(x)))

    def test_branch_bound(self):
        x = np.linspace(-INV_E, 10.0, 1000)
        assert np.all(lambert_w0(x) >= -1.0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            lambert_w0(-0.5)

    def test_scalar_and_array_agree(self):
        xs = [0.1, 1.0, 5.0]
        arr = lambert_w0(np.array(xs))
        for i, x in enumerate(xs):
            assert lambert_w0(x) == pytest.approx(arr[i], rel=1e-15)

    def test_inverse_of_w_exp_w(self):
        w = np.linspace(-1.0, 20.0, 500)
        x = w * np.exp(w)
        assert np.allclose(lambert_w0(x), w, rtol=1e-10, atol=1e-10)


class TestSecondaryBranch:
    def test_branch_point(self):
        assert lambert_wm1(-INV_E) == pytest.approx(-1.0, abs=1e-12)

    def test_residual(self):
        x = -np.geomspace(1e-300, INV_E * (1 - 1e-12), 5000)
        w = lambert_wm1(x)
        residual = np.abs(w * np.exp(w) - x)
        assert np.all(residual <= 1e-13 * np.abs(x))

    def test_bound(self):
        x = -np.geomspace(1e-12, INV_E, 100)
        assert np.all(lambert_wm1(x) <= -1.0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            lambert_wm1(0.1)
        with pytest.raises(ValueError):
            lambert_wm1(-1.0)

    def test_inverse_of_w_exp_w(self):
        w = -np.linspace(1.0, 50.0, 300)
        x = w * np.exp(w)
        assert np.allclose(lambert_wm1(x), w, rtol=1e-10, atol=1e-10)
