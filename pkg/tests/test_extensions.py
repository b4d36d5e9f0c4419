import dataclasses
import math

import numpy as np
import pytest

from uavcov import NetworkConfig
from uavcov.association import association_probabilities, tier_system
from uavcov.channel import STATES, LinkState
from uavcov.config import UavTier, db_to_linear
from uavcov.downlink import downlink_analysis
from uavcov.extensions import (NoInteriorOptimum, classify_regime,
                               multi_tier_association, multi_tier_stp,
                               noise_limited_stp, optimal_rho,
                               split_tradeoff, uplink_closed_form,
                               uplink_closed_form_quadrature)
from uavcov.montecarlo import simulate_downlink
from uavcov.quadrature import integrate

RHO_STAR_CFG = dataclasses.replace(NetworkConfig(), sigma_c2=db_to_linear(-20.0))
GAMMA_E = db_to_linear(-40.0)
GAMMA_SINR_15 = db_to_linear(-15.0)


def three_tier_cfg():
    """Three UAV tiers at 50/60/70 m, density 3e-5 each, plus the GBS tier."""
    base = NetworkConfig()
    return dataclasses.replace(
        base, lambda_u=3e-5,
        tiers=(UavTier(3e-5, base.p_u, 1.0, 60.0),
               UavTier(3e-5, base.p_u, 1.0, 70.0)),
        parent_tier=0)


def test_single_tier_reduction_against_direct_formulas(cfg):
    """The generalized association engine must reduce to the canonical
    three-tier law. Oracle: the association integrals recomposed here
    directly from the distance laws."""
    system = tier_system(cfg)
    assoc = association_probabilities(cfg)
    t0, t1, t2 = system.tiers

    def direct_a0(s):
        law = t0.laws[s]

        def integrand(r):
            r = np.atleast_1d(r)
            out = law.occur_prob * law.pdf(r)
            for k, tier in ((1, t1), (2, t2)):
                for b in STATES:
                    q = system.q_radius(k, b, 0, s, r)
                    out = out * tier.laws[b].void_prob(np.maximum(q, tier.lo))
            return out

        val, _ = integrate(integrand, law.support[0], law.effective_hi,
                           rel_tol=1e-10, abs_tol=1e-14)
        return val

    def direct_aj(j, s):
        tier = system.tiers[j]
        law = tier.laws[s]
        other = 2 if j == 1 else 1
        s_other = LinkState.NLOS if s is LinkState.LOS else LinkState.LOS

        def integrand(r):
            r = np.atleast_1d(r)
            out = law.occur_prob * law.pdf(r)
            q_own = system.q_radius(j, s_other, j, s, r)
            out = out * tier.laws[s_other].void_prob(np.maximum(q_own, tier.lo))
            zero = np.zeros_like(r)
            for b in STATES:
                q0 = system.q_radius(0, b, j, s, r)
                zero = zero + t0.laws[b].occur_prob * t0.laws[b].ccdf(q0)
            out = out * zero
            to = system.tiers[other]
            for b in STATES:
                qk = system.q_radius(other, b, j, s, r)
                out = out * to.laws[b].void_prob(np.maximum(qk, to.lo))
            return out

        val, _ = integrate(integrand, law.support[0], law.effective_hi,
                           rel_tol=1e-10, abs_tol=1e-14)
        return val

    for s in STATES:
        assert assoc[(0, s)] == pytest.approx(direct_a0(s), abs=1e-9)
        for j in (1, 2):
            assert assoc[(j, s)] == pytest.approx(direct_aj(j, s), abs=1e-9)


def test_multi_tier_normalization():
    cfg = three_tier_cfg()
    assoc = multi_tier_association(cfg)
    assert assoc.total() == pytest.approx(1.0, abs=1e-3)
    assert len(assoc.tier_names) == 5  # cluster + 3 UAV tiers + GBS


def test_multi_tier_stp_trend_in_cluster_size():
    # spread clusters push service (and coverage mass) to the far tiers
    per_tier = {j: [] for j in (2, 3)}
    for s in (5.0, 10.0, 20.0, 40.0):
        cfg = three_tier_cfg().with_cluster("thomas", s)
        rep = multi_tier_stp(GAMMA_E, 1.0, 1.0, 0.5, cfg)
        for j in per_tier:
            per_tier[j].append(rep.tier_value("stp", j))
    for j, vals in per_tier.items():
        assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:])), (j, vals)


def test_multi_tier_matches_monte_carlo():
    cfg = three_tier_cfg()
    assoc = multi_tier_association(cfg)
    mc = simulate_downlink(cfg, GAMMA_E, 1.0, 30_000, seed=606)
    for key, a in assoc.items():
        assert abs(a - mc.association[key].estimate) <= 0.015
    rep = multi_tier_stp(GAMMA_E, 1.0, 1.0, 0.5, cfg)
    assert abs(rep.totals["stp"] - mc.stp.estimate) <= 0.02


def test_split_tradeoff_monotone_in_rho():
    f = [split_tradeoff(r, 1.0, GAMMA_E, GAMMA_SINR_15, RHO_STAR_CFG)
         for r in np.linspace(0.05, 0.95, 19)]
    assert all(b > a for a, b in zip(f, f[1:]))


def test_noise_limited_branch_selection():
    cfg = RHO_STAR_CFG
    rho_star = optimal_rho(1.0, GAMMA_E, GAMMA_SINR_15, cfg)
    analysis = downlink_analysis(cfg, include_interference=False)
    for rho in (0.3, rho_star - 0.05, rho_star + 0.05, 0.95):
        case = noise_limited_stp(rho, 1.0, GAMMA_E, GAMMA_SINR_15, cfg)
        rep = analysis.report(gamma_e=GAMMA_E, gamma_sinr=GAMMA_SINR_15,
                              tau=1.0, rho=rho)
        expected = (rep.totals["energy"] if case.f_value >= 0
                    else rep.totals["sinr"])
        assert case.report.totals["stp"] == pytest.approx(expected, abs=1e-3)


def test_noise_limited_regimes():
    cfg = RHO_STAR_CFG
    # energy requirement dominates everywhere on a capped range
    assert classify_regime(1.0, 1.0, 1e-12, cfg, (0.01, 0.99)) == "energy-limited"
    # SINR requirement dominates everywhere below the crossover
    assert classify_regime(1.0, 1e-12, 10.0, cfg, (0.01, 0.5)) == "sinr-limited"
    assert classify_regime(1.0, GAMMA_E, GAMMA_SINR_15, cfg) == "interior-optimum"


def test_noise_limited_interior_peak():
    cfg = RHO_STAR_CFG
    rho_star = optimal_rho(1.0, GAMMA_E, GAMMA_SINR_15, cfg)
    rhos = np.arange(0.01, 1.0, 0.01)
    stp = [noise_limited_stp(float(r), 1.0, GAMMA_E, GAMMA_SINR_15,
                             cfg).report.totals["stp"] for r in rhos]
    k = int(np.argmax(stp))
    assert 0 < k < len(rhos) - 1
    assert abs(rhos[k] - rho_star) <= 0.02


def test_optimal_rho_reference_value():
    rho_star = optimal_rho(1.0, GAMMA_E, GAMMA_SINR_15, RHO_STAR_CFG)
    assert abs(rho_star - 0.7603) <= 1e-3
    # root property and bisection agreement
    resid = split_tradeoff(rho_star, 1.0, GAMMA_E, GAMMA_SINR_15, RHO_STAR_CFG)
    scale = GAMMA_SINR_15 * RHO_STAR_CFG.sigma_c2
    assert abs(resid) <= 1e-9 * scale / rho_star


def test_optimal_rho_requires_interior_case():
    with pytest.raises(NoInteriorOptimum):
        optimal_rho(1.0, GAMMA_E, 0.0, RHO_STAR_CFG)


def test_uplink_closed_form_limits():
    for kind, scale in (("thomas", 10.0), ("matern", 20.0)):
        cfg = dataclasses.replace(NetworkConfig().with_cluster(kind, scale),
                                  alpha_l=2.0)
        assert uplink_closed_form(1e-30, cfg) == pytest.approx(1.0, abs=1e-9)
        tall = dataclasses.replace(cfg, height=5e4)
        assert uplink_closed_form(db_to_linear(60.0), tall) < 1e-6


@pytest.mark.parametrize("kind,scale", [("thomas", 10.0), ("matern", 20.0)])
def test_uplink_closed_form_matches_quadrature(kind, scale):
    cfg = dataclasses.replace(NetworkConfig().with_cluster(kind, scale),
                              alpha_l=2.0)
    for g_db in np.linspace(-20.0, 70.0, 10):
        gamma = db_to_linear(float(g_db))
        closed = uplink_closed_form(gamma, cfg)
        quad = uplink_closed_form_quadrature(gamma, cfg)
        assert abs(closed - quad) <= 1e-6, g_db
