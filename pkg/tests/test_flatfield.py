import math

import numpy as np
import pytest

from monoclif.flatfield import (
    ConformalFactor,
    GridField,
    GridSpec,
    annulus_mask,
    cauchy_kernel,
    cauchy_kernel_field,
    clifford_field_action,
    codifferential,
    constant_one_field,
    convergence_study,
    dirac_flat,
    dirac_oracle_defect,
    dirac_residual_of,
    exp_factor,
    exterior_derivative,
    fd_gradient,
    hodge_minimized_residual,
    interior,
    invariance_residual,
    kelvin_transform,
    mixed_grade_sample,
    monogenic_gradient_field,
    offset_cube,
    one_form_projection_residuals,
    sphere_factor,
)
from monoclif.multivector import Multivector


def small_spec(n=3, h=0.25):
    return GridSpec.cube(n, -1.0, 1.0, h)


class TestGridSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec.cube(5, 0, 1, 0.1)
        with pytest.raises(ValueError):
            GridSpec.cube(3, 0, 1, -0.1)
        with pytest.raises(ValueError):
            GridSpec.cube(3, 0, 0.3, 0.1)  # fewer than 5 points

    def test_shape(self):
        spec = GridSpec.cube(2, -1, 1, 0.5)
        assert spec.shape == (5, 5)


class TestGradient:
    def test_constant_is_zero(self):
        spec = small_spec(2)
        field = GridField.sample(spec, constant_one_field(2))
        for g in fd_gradient(field):
            assert np.nanmax(np.abs(interior(g))) == 0.0

    def test_linear_exact(self):
        spec = small_spec(2)

        def fn(X):
            vals = np.zeros(X[0].shape + (4,))
            vals[..., 0] = X[0]
            return vals

        g = fd_gradient(GridField.sample(spec, fn))
        assert np.nanmax(np.abs(interior(g[0])[..., 0] - 1.0)) < 1e-13
        assert np.nanmax(np.abs(interior(g[1]))) < 1e-13

    def test_quadratic_exact(self):
        spec = small_spec(2)

        def fn(X):
            vals = np.zeros(X[0].shape + (4,))
            vals[..., 0] = X[0] ** 2
            return vals

        g0 = fd_gradient(GridField.sample(spec, fn))[0]
        x = spec.coords()[0]
        err = interior(g0)[..., 0] - interior(x[..., None])[..., 0] * 2.0
        assert np.nanmax(np.abs(err)) < 1e-12


class TestDirac:
    def test_constant_monogenic(self):
        spec = small_spec(3)
        out = dirac_flat(GridField.sample(spec, constant_one_field(3)))
        assert np.nanmax(np.abs(interior(out.values))) == 0.0

    def test_harmonic_gradient_monogenic(self):
        # phi = 2 x1 e1 - 2 x2 e2 = d(x1^2 - x2^2); linear, so differencing
        # is exact and the residual is roundoff only
        spec = small_spec(2)

        def fn(X):
            vals = np.zeros(X[0].shape + (4,))
            vals[..., 1] = 2.0 * X[0]
            vals[..., 2] = -2.0 * X[1]
            return vals

        out = dirac_flat(GridField.sample(spec, fn))
        assert np.nanmax(np.abs(interior(out.values))) < 1e-13

    def test_monogenic_sample(self):
        spec = small_spec(3)
        out = dirac_flat(GridField.sample(spec, monogenic_gradient_field(3)))
        assert np.nanmax(np.abs(interior(out.values))) < 1e-13


class TestOracle:
    @pytest.mark.parametrize("n", [2, 3])
    def test_dirac_equals_d_minus_dstar(self, n):
        spec = GridSpec.cube(n, -1.0, 1.0, 0.25)
        rng = np.random.default_rng(7)
        assert dirac_oracle_defect(spec, rng, trials=5) <= 1e-12

    def test_d_squared_zero_on_linear(self):
        spec = small_spec(2, h=0.2)

        def fn(X):
            vals = np.zeros(X[0].shape + (4,))
            vals[..., 0] = X[0] + 2 * X[1]
            vals[..., 1] = X[1]
            return vals

        d1 = exterior_derivative(GridField.sample(spec, fn))
        d2 = exterior_derivative(d1)
        inner = d2.values[2:-2, 2:-2, :]
        assert np.nanmax(np.abs(inner)) < 1e-13

    def test_codifferential_squared_zero_on_linear(self):
        spec = small_spec(2, h=0.2)

        def fn(X):
            vals = np.zeros(X[0].shape + (4,))
            vals[..., 3] = X[0] - X[1]
            return vals

        c1 = codifferential(GridField.sample(spec, fn))
        c2 = codifferential(c1)
        inner = c2.values[2:-2, 2:-2, :]
        assert np.nanmax(np.abs(inner)) < 1e-13


class TestHattedTerm:
    def test_zero_upsilon(self):
        spec = small_spec(3)
        zero = ConformalFactor(
            "flat", lambda X: np.ones_like(X[0]),
            lambda X: [np.zeros_like(x) for x in X],
        )
        rep = invariance_residual(spec, mixed_grade_sample(3), zero, 0.0)
        assert rep["residual"] == 0.0

    @pytest.mark.parametrize("factor", [exp_factor(), sphere_factor()])
    def test_invariant_weight_kills_residual(self, factor):
        spec = small_spec(3)
        rep = invariance_residual(spec, mixed_grade_sample(3), factor, -1.0)
        assert rep["residual"] <= 1e-12

    def test_linear_in_w_with_expected_root(self):
        spec = small_spec(3)
        factor = exp_factor()
        phi = mixed_grade_sample(3)
        r0 = invariance_residual(spec, phi, factor, 0.0)
        # residual(w) = |w + (n-1)/2| * max|Y.phi|
        expected = r0["max_clifford_term"]
        assert abs(r0["residual"] - 1.0 * expected) < 1e-10
        r2 = invariance_residual(spec, phi, factor, -2.0)
        assert abs(r2["residual"] - 1.0 * expected) < 1e-10
        rhalf = invariance_residual(spec, phi, factor, -0.5)
        assert abs(rhalf["residual"] - 0.5 * expected) < 1e-10

    def test_forms_action_has_no_invariant_weight(self):
        spec = small_spec(3)
        rep = hodge_minimized_residual(spec, mixed_grade_sample(3), exp_factor())
        assert rep["normalized_residual"] > 0.01


class TestOneFormProjections:
    @pytest.mark.parametrize("factor", [exp_factor(), sphere_factor()])
    def test_three_invariant_weights(self, factor):
        spec = small_spec(3)
        X = spec.coords()
        omega = [X[1], 1.0 + X[0] * X[2], X[0] ** 2]
        out = one_form_projection_residuals(spec, omega, factor)
        assert out["skew_at_w0"] <= 1e-12
        assert out["sym0_at_w2"] <= 1e-12
        assert out["trace_at_w_minus_n_minus_2"] <= 1e-12


class TestCauchyKernel:
    def test_point_values(self):
        assert cauchy_kernel((1.0, 0.0), 2) == Multivector.vector(2, [1.0, 0.0])
        mv = cauchy_kernel((0.0, 2.0, 0.0), 3)
        assert mv.coeffs[2] == 0.25

    def test_singularity(self):
        with pytest.raises(ValueError):
            cauchy_kernel((0.0, 0.0), 2)

    def test_dirac_residual_second_order(self):
        r1 = dirac_residual_of(cauchy_kernel_field(3), offset_cube(3, 0.2))
        r2 = dirac_residual_of(cauchy_kernel_field(3), offset_cube(3, 0.1))
        assert r2 < r1
        assert math.log(r1 / r2, 2) > 1.7  # approaching second order already


class TestKelvin:
    def test_constant_maps_to_kernel(self):
        n = 3
        spec = offset_cube(n, 0.1)
        kf = kelvin_transform(constant_one_field(n), n)
        X = spec.coords()
        got = np.asarray(kf(X))
        want = np.asarray(cauchy_kernel_field(n)(X))
        mask = annulus_mask(spec)
        assert np.max(np.abs(got[mask] - want[mask])) < 1e-12

    def test_involution_up_to_sign(self):
        n = 3
        spec = offset_cube(n, 0.2)
        f = monogenic_gradient_field(n)
        kkf = kelvin_transform(kelvin_transform(f, n), n)
        X = spec.coords()
        mask = annulus_mask(spec)
        got = np.asarray(kkf(X))[mask]
        want = -np.asarray(f(X))[mask]
        assert np.max(np.abs(got - want)) < 1e-10

    def test_preserves_monogenicity(self):
        kf = kelvin_transform(monogenic_gradient_field(3), 3)
        r1 = dirac_residual_of(kf, offset_cube(3, 0.2))
        r2 = dirac_residual_of(kf, offset_cube(3, 0.1))
        assert r2 < r1
        assert math.log(r1 / r2, 2) > 1.7


class TestConvergence:
    def test_cauchy_second_order(self):
        out = convergence_study("cauchy", [0.2, 0.1], n=3)
        assert out["orders"][0] >= 1.9

    def test_linear_field_machine_precision(self):
        out = convergence_study("linear", [0.2, 0.1], n=3)
        assert all(r["residual"] < 1e-12 for r in out["rows"])

    def test_invariance_residual_h_independent(self):
        factor = exp_factor()
        vals = []
        for h in (0.25, 0.125):
            spec = GridSpec.cube(3, -1.0, 1.0, h)
            rep = invariance_residual(spec, mixed_grade_sample(3), factor, 0.0)
            vals.append(rep["residual"])
        assert abs(vals[0] - vals[1]) < 1e-9

    def test_unknown_test_rejected(self):
        with pytest.raises(ValueError):
            convergence_study("nope", [0.2, 0.1])
        with pytest.raises(ValueError):
            convergence_study("cauchy", [0.2])


def test_clifford_field_action_matches_exact():
    # pointwise field action agrees with the exact algebra at a sample point
    from monoclif.multivector import clifford_mul_vec

    n = 3
    v = [0.5, -1.0, 2.0]
    coeffs = np.arange(8, dtype=float)
    got = clifford_field_action(
        n, [np.array(c) for c in v], coeffs.reshape(1, 8)
    )[0]
    mv = clifford_mul_vec(
        Multivector.vector(n, v), Multivector(n, list(coeffs))
    )
    assert np.allclose(got, [float(x) for x in mv.coeffs])
