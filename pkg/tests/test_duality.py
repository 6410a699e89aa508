import numpy as np
import pytest

from gradflux import (
    GridSpec,
    ProblemData,
    ScalarField,
    VectorField,
    certify,
    divergence,
    dual_value,
    flux,
    gradient,
    norm,
    primal_energy,
)
from gradflux.duality import divergence_residual_l1

EXACT_ENERGY = 79.0 / 36.0  # 13/6 from the weight term plus 1/36 from the forcing


class TestFlux:
    def test_exact_solution_gives_unit_coefficient(self, grid100, prob100):
        fp = flux(prob100.exact_u, prob100)
        assert fp.mask.all()
        assert np.abs(fp.sigma.values - 1.0).max() <= 1e-12
        x, y = grid100.meshgrid()
        assert np.abs(fp.J.x.values - 1.0).max() <= 1e-12
        assert np.abs(fp.J.y.values - (x + y)).max() <= 1e-12

    def test_constant_direction(self):
        g = GridSpec(10)
        p = ProblemData(
            g,
            a=ScalarField.full(g, 1.0),
            F=VectorField.from_arrays(g, np.ones(g.shape), np.zeros(g.shape)),
            H=ScalarField.zeros(g),
        )
        fp = flux(ScalarField.zeros(g), p)
        assert np.allclose(fp.J.x.values, 1.0)
        assert np.allclose(fp.J.y.values, 0.0)
        assert np.allclose(fp.sigma.values, 1.0)

    def test_degenerate_gradient_fully_masked(self):
        g = GridSpec(10)
        p = ProblemData(
            g, a=ScalarField.full(g, 1.0), F=VectorField.zeros(g), H=ScalarField.zeros(g)
        )
        fp = flux(ScalarField.zeros(g), p)
        assert not fp.mask.any()
        assert np.all(fp.J.x.values == 0.0)
        assert np.all(fp.sigma.values == 0.0)

    def test_flux_magnitude_equals_weight_on_mask(self, prob100, solved100):
        fp = flux(solved100.state.u, prob100)
        jmag = np.hypot(fp.J.x.values, fp.J.y.values)
        rel = np.abs(jmag - prob100.a.values)[fp.mask] / prob100.a.values[fp.mask]
        assert rel.max() <= 1e-10
        assert fp.sigma.values.min() >= 0.0


class TestEnergies:
    def test_primal_at_exact_solution(self, prob100):
        e = primal_energy(prob100.exact_u, prob100)
        assert abs(e - EXACT_ENERGY) / EXACT_ENERGY <= 1e-2

    def test_primal_zero_instance(self):
        g = GridSpec(8)
        p = ProblemData(
            g, a=ScalarField.full(g, 1.0), F=VectorField.zeros(g), H=ScalarField.zeros(g)
        )
        assert primal_energy(ScalarField.zeros(g), p) == 0.0

    def test_zero_candidate_upper_bounds_minimum(self, prob100):
        # the all-zero competitor gives the integral of a |F|, above the minimum
        zero_energy = primal_energy(ScalarField.zeros(prob100.grid), prob100)
        assert zero_energy >= primal_energy(prob100.exact_u, prob100)

    def test_dual_at_exact_flux(self, prob100):
        fp = flux(prob100.exact_u, prob100)
        d = dual_value(fp.J, prob100.F)
        assert abs(d - EXACT_ENERGY) / EXACT_ENERGY <= 1e-2

    def test_dual_zero_drift(self, grid100, prob100):
        fp = flux(prob100.exact_u, prob100)
        assert dual_value(fp.J, VectorField.zeros(grid100)) == 0.0

    def test_dual_bilinearity(self, prob100):
        fp = flux(prob100.exact_u, prob100)
        assert dual_value(2.5 * fp.J, prob100.F) == pytest.approx(
            2.5 * dual_value(fp.J, prob100.F), rel=1e-12
        )


class TestCertify:
    def test_exact_solution_certificate(self, prob100):
        cert = certify(prob100.exact_u, prob100)
        assert abs(cert.gap) / cert.primal <= 1e-2
        assert cert.flux_bound_violation <= 1e-10
        assert cert.gap == cert.primal - cert.dual

    def test_converged_solution_certificate(self, prob100, solved100):
        cert = certify(solved100.state.u, prob100)
        assert abs(cert.gap) / cert.primal <= 2e-2
        assert cert.el_residual_l1 / norm(prob100.H, "l1") <= 5e-2
        assert cert.flux_bound_violation <= 1e-10

    def test_divergence_residual_of_exact_flux_without_forcing(self, grid100):
        # div(1, x+y) = 1 identically, so against H = 0 the residual is the
        # interior measure of the square
        x, y = grid100.meshgrid()
        J = VectorField.from_arrays(grid100, np.ones(grid100.shape), x + y)
        res = divergence_residual_l1(J, ScalarField.zeros(grid100))
        assert abs(res - 1.0) <= 0.025

    def test_certificate_text_round_trip(self, prob100):
        cert = certify(prob100.exact_u, prob100)
        text = cert.as_text()
        parsed = dict(line.split(" = ") for line in text.strip().splitlines())
        assert float(parsed["primal"]) == cert.primal
        assert float(parsed["gap"]) == cert.gap


class TestWeakDuality:
    def test_random_candidates_against_feasible_flux(self, grid100, prob100):
        # oracle derivation with all-node sums: for |J| <= a pointwise and any
        # boundary-vanishing w,
        #   sum(a|grad w + F| + H w) >= sum(F.J) - sum_int |div J - H| * |w|_inf
        # up to roundoff, using exact discrete adjointness.
        rng = np.random.default_rng(42)
        h2 = grid100.h**2
        for _ in range(5):
            wv = np.zeros(grid100.shape)
            wv[1:-1, 1:-1] = 0.1 * rng.standard_normal((99, 99))
            w = ScalarField(grid100, wv)
            uv = prob100.exact_u.values * (1 + 0.3 * rng.standard_normal())
            fp = flux(ScalarField(grid100, uv), prob100)
            g = gradient(w) + prob100.F
            primal_all = h2 * (
                prob100.a.values * np.hypot(g.x.values, g.y.values)
                + prob100.H.values * w.values
            ).sum()
            dual_all = h2 * (
                prob100.F.x.values * fp.J.x.values + prob100.F.y.values * fp.J.y.values
            ).sum()
            r_l1 = h2 * np.abs(
                (divergence(fp.J).values - prob100.H.values)[1:-1, 1:-1]
            ).sum()
            slack = r_l1 * np.abs(w.values).max() + 1e-9
            assert primal_all >= dual_all - slack

    def test_gauge_invariance_of_certificate(self):
        # shifting the drift potential by a constant and rebuilding the drift
        # discretely leaves the certificate unchanged (up to roundoff)
        g = GridSpec(40)
        f = ScalarField.from_function(g, lambda x, y: np.sin(x + 2 * y) + x * x)
        base_H = ScalarField.full(g, 1.0)
        a = ScalarField.from_function(g, lambda x, y: 1.5 + 0.5 * np.cos(np.pi * x))
        u = ScalarField.from_function(g, lambda x, y: x * y * (1 - x) * (1 - y))
        certs = []
        for shift in (0.0, 7.25):
            fs = ScalarField(g, f.values + shift)
            p = ProblemData(g, a=a, F=gradient(fs), H=base_H, potential_f=fs)
            certs.append(certify(u, p))
        c0, c1 = certs
        assert c1.primal == pytest.approx(c0.primal, rel=1e-9)
        assert c1.dual == pytest.approx(c0.dual, rel=1e-9)
        assert c1.el_residual_l1 == pytest.approx(c0.el_residual_l1, rel=1e-6, abs=1e-9)
        assert c1.flux_bound_violation <= 1e-10
