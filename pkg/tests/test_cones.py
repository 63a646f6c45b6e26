import math

import numpy as np
import pytest

from phsurgery import cones, saddle
from phsurgery.cones import ConeSpec, MetricSpec, ProductModel
from phsurgery.saddle import AnosovModel, BumpProfile, SaddleSpec


@pytest.fixture(scope="module")
def spec():
    return SaddleSpec(rates=(-1.0, -1.0, 1.0, 1.0))


@pytest.fixture(scope="module")
def anosov():
    return AnosovModel(stable_rates=(-2.0,), unstable_rates=(2.0,),
                       lam=math.exp(-2), mu=math.exp(2))


@pytest.fixture(scope="module")
def model(spec, anosov):
    return ProductModel(spec=spec, anosov=anosov)


class TestMembership:
    def test_center_vector_always_inside(self, model):
        uc = model.unstable_cone(0.1)
        assert cones.in_cone(model.axes("u")[:, 0], uc)

    def test_orthogonal_vector_outside(self, model):
        uc = model.unstable_cone(0.1)
        assert not cones.in_cone(model.axes("s")[:, 0], uc)

    def test_half_and_double_tilt(self, model):
        uc = model.unstable_cone(0.1)
        e_u = model.axes("u")[:, 0]
        e_s = model.axes("s")[:, 0]
        inside = math.cos(0.05) * e_u + math.sin(0.05) * e_s
        outside = math.cos(0.2) * e_u + math.sin(0.2) * e_s
        assert cones.in_cone(inside, uc)
        assert not cones.in_cone(outside, uc)

    def test_zero_vector_rejected(self, model):
        with pytest.raises(ValueError):
            cones.in_cone(np.zeros(model.dim), model.unstable_cone(0.1))

    def test_scaling_invariances(self, model):
        rng = np.random.default_rng(0)
        uc = model.unstable_cone(0.2)
        heavy = MetricSpec(kind="weighted", weights=tuple([3.0] * model.dim))
        for v in rng.standard_normal((100, model.dim)):
            base = cones.in_cone(v, uc)
            assert base == cones.in_cone(7.3 * v, uc)
            assert base == cones.in_cone(v, uc, heavy)

    def test_weighted_metric_changes_angles(self, model):
        uc = model.unstable_cone(0.1)
        e_u = model.axes("u")[:, 0]
        e_s = model.axes("s")[:, 0]
        v = math.cos(0.09) * e_u + math.sin(0.09) * e_s
        w = [1.0] * model.dim
        w[model.spec.k] = 25.0  # stable block much heavier
        tilted = MetricSpec(kind="weighted", weights=tuple(w))
        assert cones.in_cone(v, uc)
        assert not cones.in_cone(v, uc, tilted)

    def test_aperture_validation(self, model):
        with pytest.raises(ValueError):
            ConeSpec(center=model.axes("u"), aperture=1.0)
        with pytest.raises(ValueError):
            ConeSpec(center=np.ones((model.dim, 2)), aperture=0.1)


class TestPropagate:
    def test_identity_at_zero(self, spec, anosov, model):
        frame = np.eye(model.dim)[:4]
        out = cones.propagate("inner-product", np.array([1e-3, 0, 0, 0]), 0.0, frame,
                              spec=spec, anosov=anosov, rho0=0.5)
        assert out == pytest.approx(frame)

    def test_pure_unstable_growth(self, spec, anosov, model):
        e_u = np.zeros(model.dim)
        e_u[model.dim - 1] = 1.0
        out = cones.propagate("inner-product", np.array([1e-3, 0, 0, 0]), 1.0, e_u,
                              spec=spec, anosov=anosov, rho0=0.5)
        assert np.linalg.norm(out) == pytest.approx(math.exp(2.0), rel=1e-9)

    def test_mixed_vector_matches_blocks(self, spec, anosov, model):
        rho0 = 0.5
        x0 = np.array([1e-3, 1e-3, 0, 0])
        v = np.ones(model.dim) / math.sqrt(model.dim)
        out = cones.propagate("inner-product", x0, 1.0, v, spec=spec, anosov=anosov,
                              rho0=rho0)
        expected = np.concatenate([np.exp(rho0 * np.asarray(spec.rates)),
                                   np.exp(np.asarray(anosov.rates))]) * v
        assert out[0] == pytest.approx(expected, rel=1e-9)

    def test_lifted_kind(self, spec, anosov, model):
        from phsurgery.blowup import BlowupPoint
        p = BlowupPoint(chart=0, u=np.zeros(4))
        frame = np.eye(model.dim)
        out = cones.propagate("lifted", p, 1.0, frame, spec=spec, anosov=anosov,
                              rho0=0.5)
        # chart of a contracting axis: radial -rho0, affine spreads
        diag = np.linalg.norm(out, axis=1)
        assert diag[0] == pytest.approx(math.exp(-0.5), rel=1e-9)
        assert diag[2] == pytest.approx(math.exp(1.0), rel=1e-9)
        assert diag[model.dim - 1] == pytest.approx(math.exp(2.0), rel=1e-9)

    def test_cocycle_property(self, spec, anosov, model):
        rho0 = 0.5
        x0 = np.array([2e-3, 1e-3, 5e-4, 0])
        frame = np.eye(model.dim)[:3]
        whole = cones.propagate("inner-product", x0, 0.9, frame, spec=spec,
                                anosov=anosov, rho0=rho0)
        flat = BumpProfile.flat(rho0)
        mid = saddle.flow_slow(spec, flat, x0, 0.4)
        parts = cones.propagate(
            "inner-product", mid, 0.5,
            cones.propagate("inner-product", x0, 0.4, frame, spec=spec,
                            anosov=anosov, rho0=rho0),
            spec=spec, anosov=anosov, rho0=rho0)
        assert np.abs(whole - parts).max() < 1e-8


@pytest.fixture(scope="module")
def campaign(spec, anosov):
    return cones.inner_cone_campaign(spec, anosov, 0.5, 0.1,
                                     n_vectors=256, n_orbits=12, seed=42)


class TestCoreCampaign:
    def test_passes_at_admissible_rho0(self, campaign):
        assert campaign.passed(min_exponent=2.0 - 0.05)
        assert campaign.burn_in <= 1.0
        assert campaign.backward_cs_ok

    def test_expansion_within_closed_form_bracket(self, campaign):
        # the unstable component alone gives growth >= cos(omega) e^{2t}, and
        # the pure unstable axis realizes exactly 2, so the measured minimum
        # must land in [2 + log cos omega, 2] whatever the chart bookkeeping
        lower = 2.0 + math.log(math.cos(0.1))
        assert lower - 1e-9 <= campaign.min_u_exponent <= 2.0 + 1e-9

    def test_domination_near_chart_spread_gap(self, campaign):
        # worst staying vector lives on the largest chart exponent 2*rho0 = 1,
        # so the ideal gap is 1; transitions can only shave a bounded amount
        assert 0.9 < campaign.domination_exponent <= 1.0 + 1e-9

    def test_report_serializable(self, campaign):
        d = campaign.to_dict()
        assert d["kind"] == "core"
        assert d["n_violations"] == 0
        assert d["burn_in"] == 0.25

    def test_negative_control_fails(self, spec, anosov):
        neg = cones.inner_cone_campaign(spec, anosov, 1.5, 0.1,
                                        n_vectors=128, n_orbits=8, seed=42)
        assert not neg.passed()
        types = {v["type"] for v in neg.violations}
        assert "domination" in types
        assert neg.domination_exponent < 0

    def test_tiny_aperture_recovers_block_rates(self, spec, anosov):
        # as the cone degenerates to the unstable axis, the measured
        # exponents converge to the exact block rates
        tight = cones.inner_cone_campaign(spec, anosov, 0.5, 1e-4,
                                          n_vectors=64, n_orbits=8, seed=42)
        assert tight.min_u_exponent == pytest.approx(2.0, abs=1e-4)
        assert tight.domination_exponent == pytest.approx(1.0, abs=1e-3)

    def test_reversed_reproduces_statistics(self, spec, anosov, campaign):
        rev = cones.inner_cone_campaign(spec, anosov, 0.5, 0.1,
                                        n_vectors=256, n_orbits=12, seed=42,
                                        reverse=True)
        assert rev.min_u_exponent == pytest.approx(campaign.min_u_exponent, abs=1e-9)
        assert rev.domination_exponent == pytest.approx(campaign.domination_exponent,
                                                        abs=0.15)


class TestCrossingCampaign:
    def test_unperturbed_cone_stays_inside(self, spec, anosov):
        flat = BumpProfile.flat(1.0, delta=0.1)
        rep = cones.crossing_cone_campaign(spec, flat, anosov, 0.1,
                                           n_entries=40, n_vectors=64, seed=5)
        assert rep.aperture_ratio <= 1.0 + 1e-9
        assert rep.min_crossing_expansion > 0

    def test_delta_stability(self, spec, anosov):
        out = {}
        for delta in (0.1, 0.001):
            prof = BumpProfile(delta=delta, rho0=0.5)
            out[delta] = cones.crossing_cone_campaign(spec, prof, anosov, 0.1,
                                                      n_entries=50, n_vectors=64,
                                                      seed=5)
        a, b = out[0.1], out[0.001]
        assert a.aperture_ratio == pytest.approx(b.aperture_ratio, rel=1e-9)
        assert a.min_crossing_expansion == pytest.approx(b.min_crossing_expansion,
                                                         rel=1e-9)
        assert a.min_backward_contraction > 0

    def test_classes_recorded(self, spec, anosov):
        prof = BumpProfile(delta=0.1, rho0=0.5)
        rep = cones.crossing_cone_campaign(spec, prof, anosov, 0.1,
                                           n_entries=60, n_vectors=32, seed=5)
        counts = rep.extras["class_counts"]
        assert counts["inner->inner"] == 0
        assert counts["inner->outer"] > 0
        assert counts["outer->outer"] > 0


class TestRateChain:
    def test_far_region_margins(self, spec, anosov):
        out = cones.rate_chain_check(spec, anosov, 0.5, region="far")
        assert out["ok"]
        assert out["center_margin"] == pytest.approx(1.0, abs=1e-9)

    def test_core_region_wider(self, spec, anosov):
        far = cones.rate_chain_check(spec, anosov, 0.5, region="far")
        core = cones.rate_chain_check(spec, anosov, 0.5, region="core")
        assert core["ok"]
        assert core["center_margin"] > far["center_margin"]

    def test_negative_control(self, spec, anosov):
        out = cones.rate_chain_check(spec, anosov, 3.0, region="core")
        assert not out["ok"]
        assert any(w["block"] == "c" for w in out["witnesses"])
