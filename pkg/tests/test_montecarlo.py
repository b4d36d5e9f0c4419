import dataclasses
import math

import numpy as np
import pytest

from uavcov import NetworkConfig
from uavcov.channel import LinkState, nakagami_ccdf
from uavcov.config import db_to_linear
from uavcov.geometry import cluster_combined_law
from uavcov.montecarlo import (TrialEstimate, confidence,
                               sample_downlink_realizations,
                               simulate_downlink, simulate_uplink)
from uavcov.quadrature import integrate

GAMMA_E = db_to_linear(-40.0)


def test_confidence_values():
    assert confidence(0.5, 10_000) == pytest.approx(0.0098, rel=1e-10)
    assert confidence(0.0, 123) == 0.0
    assert confidence(1.0, 123) == 0.0
    # scales as 1/sqrt(n)
    assert confidence(0.3, 400) == pytest.approx(2 * confidence(0.3, 1600),
                                                 rel=1e-12)
    with pytest.raises(ValueError):
        confidence(1.5, 10)
    with pytest.raises(ValueError):
        confidence(0.5, 0)


def test_trial_estimate_from_counts():
    est = TrialEstimate.from_counts(250, 1000, seed=9)
    assert est.estimate == 0.25
    assert est.half_width == pytest.approx(confidence(0.25, 1000))


def test_seed_determinism(cfg):
    a = simulate_downlink(cfg, GAMMA_E, 1.0, 5000, seed=123)
    b = simulate_downlink(cfg, GAMMA_E, 1.0, 5000, seed=123)
    assert a.energy.estimate == b.energy.estimate
    assert a.sinr.estimate == b.sinr.estimate
    for key in a.association:
        assert a.association[key].estimate == b.association[key].estimate
    c = simulate_downlink(cfg, GAMMA_E, 1.0, 5000, seed=124)
    assert any(a.association[k].estimate != c.association[k].estimate
               for k in a.association)


def test_worker_count_invariance(cfg):
    a = simulate_downlink(cfg, GAMMA_E, 1.0, 6000, seed=5, workers=1)
    b = simulate_downlink(cfg, GAMMA_E, 1.0, 6000, seed=5, workers=2)
    assert a.energy.estimate == b.energy.estimate
    assert a.stp.estimate == b.stp.estimate
    for key in a.association:
        assert a.association[key].estimate == b.association[key].estimate


def test_association_frequencies_sum_to_one(cfg):
    res = simulate_downlink(cfg, GAMMA_E, 1.0, 4000, seed=8)
    total = sum(e.estimate for e in res.association.values())
    assert total == 1.0  # exact: counts partition the trials


def test_single_link_tail_against_closed_form():
    """With the PPP tiers emptied the only station is the cluster head:
    the SINR coverage is the Nakagami tail mixed over its distance law.
    Oracle: direct quadrature of the closed tail."""
    cfg = dataclasses.replace(NetworkConfig(), lambda_u=1e-12, lambda_g=1e-13)
    rho, gamma = 0.5, 1.0
    noise = cfg.sigma_c2 / rho + cfg.sigma_n2
    law = cluster_combined_law(cfg)
    g0 = cfg.antenna.g0

    def tail(r):
        r = np.atleast_1d(r)
        from uavcov.channel import los_prob_a2g
        p_l = los_prob_a2g(r, cfg.height, cfg.env_b, cfg.env_c)
        z_l = gamma * noise * cfg.kappa_l * r**cfg.alpha_l / (cfg.p_u * g0)
        z_n = gamma * noise * cfg.kappa_n * r**cfg.alpha_n / (cfg.p_u * g0)
        mix = p_l * nakagami_ccdf(z_l, cfg.n_l) + (1 - p_l) * nakagami_ccdf(z_n, cfg.n_n)
        return mix * law.pdf(r)

    oracle, _ = integrate(tail, law.support[0], law.effective_hi, rel_tol=1e-9)
    mc = simulate_downlink(cfg, GAMMA_E, gamma, 20_000, seed=21, rho=rho)
    assert abs(mc.sinr.estimate - oracle) <= 0.01
    assert mc.association[(0, LinkState.LOS)].estimate + \
        mc.association[(0, LinkState.NLOS)].estimate == 1.0


def test_window_doubling_within_half_width(cfg):
    base = simulate_downlink(cfg, GAMMA_E, 1.0, 20_000, seed=33)
    wide = simulate_downlink(cfg, GAMMA_E, 1.0, 20_000, seed=33,
                             window_scale=2.0)
    for name in ("energy", "sinr", "stp"):
        a, b = getattr(base, name), getattr(wide, name)
        assert abs(a.estimate - b.estimate) <= max(a.half_width, 1e-4)
    for key in base.association:
        a, b = base.association[key], wide.association[key]
        assert abs(a.estimate - b.estimate) <= max(a.half_width, 1e-4)


def test_uplink_determinism_and_modes(cfg):
    a = simulate_uplink(cfg, 0.5, 0.0, db_to_linear(-20.0), 4000, seed=71,
                        p_active=0.2)
    b = simulate_uplink(cfg, 0.5, 0.0, db_to_linear(-20.0), 4000, seed=71,
                        p_active=0.2)
    assert a.sinr.estimate == b.sinr.estimate
    assert a.p_active_mode == "supplied"
    nested = simulate_uplink(cfg, 0.5, 0.0, db_to_linear(-20.0), 4000, seed=71)
    assert nested.p_active_mode == "nested"
    assert 0.0 <= nested.p_active <= 1.0


def test_uplink_idle_interferers_match_noise_only_tail(cfg):
    """p_active = 0: coverage equals the noise-only tail over the
    serving-distance law (state drawn at the realized distance)."""
    gamma = db_to_linear(55.0)
    law = cluster_combined_law(cfg)
    g0 = cfg.antenna.g0

    def tail(r):
        r = np.atleast_1d(r)
        from uavcov.channel import los_prob_a2g
        p_l = los_prob_a2g(r, cfg.height, cfg.env_b, cfg.env_c)
        z_l = gamma * cfg.sigma_n2 * cfg.kappa_l * r**cfg.alpha_l / (cfg.p_t_ul * g0)
        z_n = gamma * cfg.sigma_n2 * cfg.kappa_n * r**cfg.alpha_n / (cfg.p_t_ul * g0)
        return (p_l * nakagami_ccdf(z_l, cfg.n_l)
                + (1 - p_l) * nakagami_ccdf(z_n, cfg.n_n)) * law.pdf(r)

    oracle, _ = integrate(tail, law.support[0], law.effective_hi, rel_tol=1e-9)
    mc = simulate_uplink(cfg, 0.5, 0.0, gamma, 20_000, seed=91, p_active=0.0)
    assert abs(mc.sinr.estimate - oracle) <= 0.01


def test_realization_batch_consistency(cfg):
    rows = sample_downlink_realizations(cfg, 500, seed=3)
    assert len(rows) == 500
    for r in rows[:50]:
        assert r.serving_distance > 0
        assert r.p_m > 0
        assert r.interference >= 0
        assert r.harvested == pytest.approx(
            cfg.tau * (1 - cfg.rho) * (r.p_m + r.interference), rel=1e-9)
        if r.serving_tier == 0:
            assert r.serving_distance == pytest.approx(r.r0, rel=1e-12)
            assert r.serving_state is r.state0
