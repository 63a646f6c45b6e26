import math

import numpy as np
import pytest

from phsurgery import forms
from phsurgery.forms import (DegreeError, Form, MoserMap, PathDegenerate, d, interior,
                             lie, lie_cartan, wedge)
from phsurgery.dualnum import dsqrt, value
from phsurgery.saddle import BumpProfile


@pytest.fixture(scope="module")
def probes():
    rng = np.random.default_rng(9)
    return rng.uniform(-0.4, 0.4, size=(100, 4))


@pytest.fixture(scope="module")
def X():
    return forms.saddle_field(4)


class TestCalculus:
    def test_d_of_constant_one_form_vanishes(self, probes):
        dx1 = Form(4, 1, {(0,): lambda x: 1.0})
        assert forms.form_max_at(d(dx1), probes) == 0.0

    def test_interior_of_two_form(self):
        e1 = [lambda x: 1.0] + [lambda x: 0.0] * 3
        w12 = Form(4, 2, {(0, 1): lambda x: 1.0})
        out = interior(e1, w12)
        assert out.coefficient([0.0] * 4, (1,)) == 1.0
        assert out.coefficient([0.0] * 4, (0,)) == 0.0

    def test_divergence_free_volume_invariance(self, probes, X):
        vol = Form.volume(4)
        assert forms.form_max_at(lie(X, vol), probes) == 0.0

    def test_d_squared_and_cartan_and_leibniz(self, probes):
        rng = np.random.default_rng(4)
        worst_dd, worst_cartan, worst_leibniz = 0.0, 0.0, 0.0
        from phsurgery.suites import _form_identity_probes
        worst_dd, worst_cartan, worst_leibniz = _form_identity_probes(rng, probes[:30])
        assert worst_dd < 1e-10
        assert worst_cartan < 1e-10
        assert worst_leibniz < 1e-10

    def test_wedge_anticommutes(self, probes):
        a = Form(4, 1, {(0,): lambda x: x[1], (2,): lambda x: x[3] ** 2})
        b = Form(4, 1, {(1,): lambda x: x[0] * x[2]})
        ab = wedge(a, b)
        ba = wedge(b, a)
        flip = ba.scale(-1.0)
        assert forms.form_max_at(ab - flip, probes) < 1e-14

    def test_degree_overflow_raises(self):
        top = Form.volume(4)
        with pytest.raises(DegreeError):
            d(top)
        with pytest.raises(DegreeError):
            wedge(top, Form(4, 1, {(0,): lambda x: 1.0}))
        with pytest.raises(DegreeError):
            interior([lambda x: 1.0] * 4, Form.from_scalar(4, lambda x: 1.0))

    def test_dimension_cap(self):
        with pytest.raises(DegreeError):
            Form.volume(7)
        assert Form.volume(6).degree == 6

    def test_invariant_product_generators_exact(self, X):
        from phsurgery.forms import _partial_at
        rng = np.random.default_rng(12)
        for g in forms.invariant_products():
            for x in rng.uniform(-1, 1, size=(20, 4)):
                xb = [float(c) for c in x]
                xg = sum(X[i](xb) * _partial_at(g, xb, i) for i in range(4))
                assert xg == 0.0  # exact: the rates cancel termwise


class TestSlowedVolume:
    def test_identity_and_control(self, X):
        profile = BumpProfile(delta=0.2, rho0=0.5)

        def rho(x):
            return profile.value(dsqrt(x[0] * x[0] + x[1] * x[1]
                                       + x[2] * x[2] + x[3] * x[3]))

        rng = np.random.default_rng(2)
        pts = rng.uniform(-0.45, 0.45, size=(300, 4))
        residual, control = forms.verify_rho_volume(rho, X, Form.volume(4), pts)
        assert residual < 1e-10
        assert control > 1e-3

    def test_constant_rho_trivial(self, X, probes):
        residual, control = forms.verify_rho_volume(lambda x: 1.0, X,
                                                    Form.volume(4), probes)
        assert residual == 0.0
        assert control == 0.0

    def test_noninvariant_volume_rejected(self, X, probes):
        bad = Form.volume(4).scale(lambda x: 1.0 + x[0])
        with pytest.raises(ValueError, match="not invariant"):
            forms.verify_rho_volume(lambda x: 1.0, X, bad, probes)


class TestPrimitive:
    def test_d_eta0_is_volume(self, probes):
        eta0 = forms.moser_eta0()
        diff = d(eta0) - Form.volume(4)
        assert forms.form_max_at(diff, probes) == 0.0

    def test_eta0_invariant(self, probes, X):
        assert forms.form_max_at(lie(X, forms.moser_eta0()), probes) == 0.0

    def test_cartan_cross_check(self, probes, X):
        eta0 = forms.moser_eta0()
        diff = lie(X, eta0) - lie_cartan(X, eta0)
        assert forms.form_max_at(diff, probes) < 1e-14


class TestBeta:
    def test_constant(self):
        beta = forms.moser_beta(lambda x: 3.7)
        assert beta([0.3, 0.1, 0.2, 0.4]) == pytest.approx(3.7, abs=1e-13)

    def test_linear_times_coordinate(self):
        beta = forms.moser_beta(lambda x: x[0] * x[2])
        assert beta([0.3, 0.1, 0.2, 0.4]) == pytest.approx(0.03, abs=1e-13)

    def test_removable_singularity(self):
        gamma = lambda x: 1.0 + x[0] + x[2]
        beta = forms.moser_beta(gamma)
        assert beta([0.0, 0.5, 0.25, 0.1]) == pytest.approx(1.25)

    def test_solves_radial_ode(self):
        # d/dx1 (x1 beta) = gamma, checked with dual numbers
        from phsurgery.dualnum import Dual
        gamma = lambda x: 1.0 + 0.3 * x[0] * x[2] + 0.1 * x[1] * x[3]
        beta = forms.moser_beta(gamma)
        for x1 in (0.05, 0.2, -0.3):
            x = [Dual(x1, 1.0), 0.4, -0.2, 0.3]
            out = x[0] * beta(x)
            got = out.du
            want = gamma([x1, 0.4, -0.2, 0.3])
            assert got == pytest.approx(want, rel=1e-10)

    def test_invariance_inherited(self, X):
        gens = forms.invariant_products()
        gamma = lambda x: 0.05 * (gens[0](x) + gens[3](x))
        beta = forms.moser_beta(gamma)
        rng = np.random.default_rng(6)
        for x in rng.uniform(-0.4, 0.4, size=(100, 4)):
            xb = [float(c) for c in x]
            xbeta = sum(X[i](xb) * forms._partial_at(beta, xb, i) for i in range(4))
            assert abs(xbeta) < 1e-9

    def test_corrected_product_rule(self, probes):
        # d(beta eta0) = beta vol + dbeta ^ eta0
        gamma = lambda x: 0.1 * x[0] * x[2]
        beta = forms.moser_beta(gamma)
        eta0 = forms.moser_eta0()
        lhs = d(eta0.scale(beta))
        rhs = Form.volume(4).scale(beta) + wedge(d(Form.from_scalar(4, beta)), eta0)
        assert forms.form_max_at(lhs - rhs, probes[:30]) < 1e-9


@pytest.fixture(scope="module")
def h():
    gens = forms.invariant_products()
    alpha = lambda x: 1.0 + 0.1 * (gens[0](x) + gens[3](x))
    return forms.moser_flow(Form.volume(4), Form.volume(4).scale(alpha),
                            radius=0.5, steps=400)


class TestMoserMap:
    def test_trivial_density_is_identity(self):
        h = forms.moser_flow(Form.volume(4), Form.volume(4).scale(lambda x: 1.0),
                             radius=0.5, steps=100)
        x = np.array([0.2, -0.1, 0.05, 0.3])
        assert np.linalg.norm(h(x) - x) < 1e-13

    def test_fixes_origin(self, h):
        assert np.linalg.norm(h(np.zeros(4))) == 0.0

    def test_transport_both_conventions(self, h):
        rng = np.random.default_rng(8)
        for x in rng.uniform(-0.3, 0.3, size=(5, 4)):
            fw, inv = h.transport_residuals(x)
            assert abs(fw) < 1e-6
            assert abs(inv) < 1e-6

    def test_inverse_roundtrip(self, h):
        x = np.array([0.15, 0.1, -0.2, 0.25])
        assert np.linalg.norm(h.inverse(h(x)) - x) < 1e-10

    def test_commutes_with_saddle(self, h):
        amp = np.array([-1.0, -1.0, 1.0, 1.0])
        x = np.array([0.1, -0.08, 0.12, 0.05])
        for t in (-1.0, -0.5, 0.5, 1.0):
            at = np.exp(amp * t)
            assert np.linalg.norm(h(at * x) - at * h(x)) < 1e-6

    def test_generator_commutes(self, h):
        X = forms.saddle_field(4)
        rng = np.random.default_rng(10)
        worst, _ = forms.equivariance_audit(h, X, rng.uniform(-0.3, 0.3, (10, 4)))
        assert worst < 1e-8

    def test_noninvariant_density_detected(self):
        X = forms.saddle_field(4)
        h_bad = MoserMap(alpha=lambda x: 1.0 + 0.2 * x[0], radius=0.5, steps=100)
        rng = np.random.default_rng(11)
        worst, witness = forms.equivariance_audit(h_bad, X, rng.uniform(-0.3, 0.3, (10, 4)))
        assert worst > 1e-3
        assert witness is not None

    def test_path_degeneracy_detected(self):
        h_bad = MoserMap(alpha=lambda x: 1.0 + 40.0 * x[0] * x[2], radius=0.5, steps=100)
        with pytest.raises(PathDegenerate):
            h_bad(np.array([0.3, 0.0, -0.3, 0.0]))

    def test_requires_standard_base_volume(self):
        scaled = Form.volume(4).scale(lambda x: 2.0)
        with pytest.raises(DegreeError):
            forms.moser_flow(scaled, Form.volume(4), radius=0.5)
