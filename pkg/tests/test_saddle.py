import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phsurgery import saddle
from phsurgery.saddle import (AnosovModel, BumpProfile, DomainEscape, InfeasibleRates,
                              NonExitingOrbit, SaddleSpec)


@pytest.fixture(scope="module")
def spec2():
    return SaddleSpec(rates=(-1.0, 1.0))


@pytest.fixture(scope="module")
def spec4():
    return SaddleSpec(rates=(-1.0, -1.0, 1.0, 1.0))


@pytest.fixture(scope="module")
def profile():
    return BumpProfile(delta=0.1, rho0=0.5)


class TestSpecs:
    def test_derived_bounds(self, spec4):
        assert spec4.lam_prime == pytest.approx(math.exp(-1))
        assert spec4.mu_prime == pytest.approx(math.exp(1))
        assert spec4.c == 1.0

    def test_rejects_degenerate(self):
        with pytest.raises(InfeasibleRates):
            SaddleSpec(rates=(1.0, 2.0))
        with pytest.raises(InfeasibleRates):
            SaddleSpec(rates=(-1.0,))

    def test_anosov_invariants(self):
        m = AnosovModel(stable_rates=(-2.0,), unstable_rates=(2.0,),
                        lam=math.exp(-2), mu=math.exp(2))
        assert m.dims == (1, 1, 1)
        assert m.rates == (-2.0, 0.0, 2.0)
        with pytest.raises(InfeasibleRates):
            AnosovModel(stable_rates=(-1.0,), unstable_rates=(2.0,),
                        lam=math.exp(-2), mu=math.exp(2))


class TestBump:
    def test_plateau_values(self, profile):
        assert saddle.eval_bump(profile, [0.05, 0.0]) == 0.5
        assert saddle.eval_bump(profile, [0.3, 0.0]) == 1.0

    def test_midpoint_value(self, profile):
        # transition is symmetric, so the midpoint sits halfway up
        assert saddle.eval_bump(profile, [0.15, 0.0]) == pytest.approx(0.75)

    def test_monotone_across_annulus(self, profile):
        s = np.linspace(0.10001, 0.19999, 500)
        v = profile.value(s)
        assert (np.diff(v) >= 0).all()

    def test_rejects_outside_disk(self, profile):
        with pytest.raises(DomainEscape):
            saddle.eval_bump(profile, [1.0, 0.2])

    def test_slope_bound_construction(self):
        with pytest.raises(ValueError):
            BumpProfile(delta=0.1, rho0=0.2)  # (1-rho0) sup|S'| >= 1

    def test_slope_matches_dual_derivative(self, profile):
        from phsurgery.dualnum import Dual
        for s0 in (0.11, 0.13, 0.15, 0.18, 0.199):
            exact = profile.value(Dual(s0, 1.0)).du
            assert profile.slope(s0) == pytest.approx(exact, rel=1e-12)

    @settings(max_examples=30, derandomize=True)
    @given(st.floats(min_value=0.36, max_value=0.99))
    def test_slope_bound_for_feasible_rho0(self, rho0):
        prof = BumpProfile(delta=0.05, rho0=rho0)
        s = np.linspace(0.05, 0.1, 1000)
        assert (np.abs(prof.slope(s)) < 1.0 / 0.05).all()


class TestPickRho0:
    def test_symmetric_example_plain(self):
        rho0 = saddle.pick_rho0(math.exp(-2), math.exp(2), math.exp(-1), math.exp(1))
        assert rho0 == pytest.approx(0.5)
        assert saddle.domination_holds(rho0, math.exp(-2), math.exp(2),
                                       math.exp(-1), math.exp(1))

    def test_neutral_saddle_always_feasible(self):
        rho0 = saddle.pick_rho0(0.5, 2.0, 1.0, 1.0)
        assert rho0 == pytest.approx(0.5)
        for r in (0.01, 0.5, 0.99):
            assert saddle.domination_holds(r, 0.5, 2.0, 1.0, 1.0)

    def test_volume_mode_against_grid_oracle(self):
        lam, mu = math.exp(-2), math.exp(2)
        lamp, mup = math.exp(-1), math.exp(1)
        rho0 = saddle.pick_rho0(lam, mu, lamp, mup, k=4, volume_mode=True)
        grid = np.arange(0.01, 1.0, 0.01)
        feasible = [r for r in grid
                    if (lamp / mup) ** r > max(lam, 1 / mu)
                    and lam < lamp ** (r / 4) and mup ** (r / 4) < mu]
        assert feasible
        assert min(feasible) <= rho0 <= max(feasible)

    def test_infeasible_named(self):
        with pytest.raises(InfeasibleRates, match="lam'"):
            saddle.pick_rho0(0.5, 2.0, 0.4, 1.0)
        with pytest.raises(InfeasibleRates, match="mu'"):
            saddle.pick_rho0(0.5, 2.0, 1.0, 2.5)
        with pytest.raises(InfeasibleRates, match="lam < 1 < mu"):
            saddle.pick_rho0(1.5, 2.0, 1.0, 1.0)


class TestFlow:
    def test_linear_closed_form(self, spec2):
        flat = BumpProfile.flat(1.0)
        y = saddle.flow_slow(spec2, flat, np.array([1e-2, 1e-3]), 1.0)
        assert y == pytest.approx([math.exp(-1) * 1e-2, math.exp(1) * 1e-3], rel=1e-9)

    def test_core_product_form(self, spec2, profile):
        x = np.array([0.02, 0.01])
        y = saddle.flow_slow(spec2, profile, x, 0.5)
        exact = np.exp(0.5 * 0.5 * np.array([-1.0, 1.0])) * x
        assert y == pytest.approx(exact, rel=1e-12)

    def test_escape_reported(self, spec2):
        flat = BumpProfile.flat(1.0)
        with pytest.raises(DomainEscape) as err:
            saddle.flow_slow(spec2, flat, np.array([0.0, 0.5]), 2.0)
        assert err.value.time > 0

    def test_richardson_annulus_crossing(self, spec4, profile):
        x = np.zeros(4)
        x[2] = 0.09
        x[0] = 0.03
        assert saddle.richardson_residual(spec4, profile, x, 1.5) < 1e-8

    def test_negative_time(self, spec2, profile):
        x = np.array([0.03, 0.02])
        y = saddle.flow_slow(spec2, profile, x, 0.4)
        back = saddle.flow_slow(spec2, profile, y, -0.4)
        assert back == pytest.approx(x, abs=1e-12)


class TestVariational:
    def test_identity_at_zero_time(self, spec2, profile):
        _, J = saddle.variational_flow_slow(spec2, profile, np.array([0.05, 0.01]), 0.0)
        assert J == pytest.approx(np.eye(2))

    def test_constant_rho_diagonal(self, spec2):
        flat = BumpProfile.flat(0.5)
        _, J = saddle.variational_flow_slow(spec2, flat, np.array([1e-3, 1e-3]), 2.0)
        assert J == pytest.approx(np.diag(np.exp(0.5 * 2.0 * np.array([-1.0, 1.0]))),
                                  rel=1e-10)

    def test_matches_finite_differences(self, spec4, profile):
        rng = np.random.default_rng(3)
        for _ in range(5):
            x = rng.standard_normal(4)
            x *= rng.uniform(0.05, 0.25) / np.linalg.norm(x)
            _, J = saddle.variational_flow_slow(spec4, profile, x, 1.0)
            eps = 1e-6
            Jfd = np.zeros((4, 4))
            for i in range(4):
                e = np.zeros(4)
                e[i] = eps
                Jfd[:, i] = (saddle.flow_slow(spec4, profile, x + e, 1.0)
                             - saddle.flow_slow(spec4, profile, x - e, 1.0)) / (2 * eps)
            assert np.linalg.norm(J - Jfd) / np.linalg.norm(Jfd) < 1e-5
            assert np.linalg.det(J) > 0


class TestTransit:
    def test_radial_unstable_exact_time(self, spec2):
        flat = BumpProfile.flat(0.5, delta=0.1)
        rep = saddle.annulus_transit(spec2, flat, np.array([0.0, 0.1]))
        assert rep.time == pytest.approx(math.log(2) / 0.5, abs=1e-6)
        assert rep.crossing_class == "inner->outer"
        assert abs(np.linalg.norm(rep.exit) - 0.2) < 1e-9

    def test_stable_axis_unperturbed(self, spec2):
        flat = BumpProfile.flat(1.0, delta=0.1)
        rep = saddle.annulus_transit(spec2, flat, np.array([0.2, 0.0]))
        assert rep.time == pytest.approx(math.log(2), abs=1e-6)
        assert rep.crossing_class == "outer->inner"

    def test_budget_guard(self, spec2, profile):
        entry = np.array([0.2, 0.0])  # stable axis: legitimate but slow
        with pytest.raises(NonExitingOrbit):
            saddle.annulus_transit(spec2, profile, entry, budget=0.01)

    def test_entry_validation(self, spec2, profile):
        with pytest.raises(ValueError, match="outward"):
            saddle.annulus_transit(spec2, profile, np.array([0.1, 0.0]))
        with pytest.raises(ValueError, match="boundary sphere"):
            saddle.annulus_transit(spec2, profile, np.array([0.15, 0.0]))

    def test_campaign_scale_invariance(self, spec4):
        stats = {}
        for delta in (0.1, 0.001):
            prof = BumpProfile(delta=delta, rho0=0.5)
            stats[delta] = saddle.transit_campaign(spec4, prof, 50, seed=11)
        a, b = stats[0.1], stats[0.001]
        assert a.distortion == pytest.approx(b.distortion, rel=1e-9)
        assert a.times.mean() == pytest.approx(b.times.mean(), rel=1e-9)
        assert a.class_counts == b.class_counts
        assert a.class_counts["inner->inner"] == 0

    def test_shear_bound_everywhere(self, spec4, profile):
        rng = np.random.default_rng(5)
        for _ in range(200):
            r = rng.uniform(0.1, 0.2)
            x = rng.standard_normal(4)
            x *= r / np.linalg.norm(x)
            v = rng.standard_normal(4)
            assert saddle.shear_bound_margin(spec4, profile, x, v) >= -1e-12
