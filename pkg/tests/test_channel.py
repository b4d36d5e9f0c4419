import math

import numpy as np
import pytest

from uavcov import NetworkConfig, gain_pmf, los_prob_a2g, los_prob_g2g, path_loss
from uavcov.channel import sample_nakagami
from uavcov.config import AntennaPattern

B, C = 0.136, 11.95


def test_a2g_overhead_link():
    # elevation 90 degrees
    expect = 1.0 / (1.0 + C * math.exp(-B * (90.0 - C)))
    assert los_prob_a2g(50.0, 50.0, B, C) == pytest.approx(expect, rel=1e-12)
    assert expect == pytest.approx(0.9997067139222499, rel=1e-10)


def test_a2g_far_limit():
    # elevation -> 0: closed limit 1/(1 + C e^{BC})
    limit = 1.0 / (1.0 + C * math.exp(B * C))
    assert los_prob_a2g(1e12, 50.0, B, C) == pytest.approx(limit, rel=1e-9)
    assert limit == pytest.approx(0.016207653459802424, rel=1e-10)


def test_a2g_30_degree_elevation():
    # H = 50, r = 100: theta = 30 deg exactly
    expect = 1.0 / (1.0 + C * math.exp(-B * (30.0 - C)))
    assert los_prob_a2g(100.0, 50.0, B, C) == pytest.approx(expect, rel=1e-12)
    assert expect == pytest.approx(0.49351754365204, rel=1e-10)


def test_a2g_domain_and_monotonicity():
    with pytest.raises(ValueError):
        los_prob_a2g(40.0, 50.0, B, C)
    # nondecreasing in H at fixed ground distance
    ground = 80.0
    heights = np.linspace(1.0, 300.0, 40)
    vals = [los_prob_a2g(math.hypot(ground, h), h, B, C) for h in heights]
    assert np.all(np.diff(vals) >= -1e-12)
    # nonincreasing in ground distance at fixed H
    h = 50.0
    grounds = np.linspace(0.0, 500.0, 40)
    vals = [los_prob_a2g(math.hypot(g, h), h, B, C) for g in grounds]
    assert np.all(np.diff(vals) <= 1e-12)


def test_g2g_blockage():
    eps = 1.0 / 141.4
    assert los_prob_g2g(0.0, eps) == 1.0
    assert los_prob_g2g(141.4, eps) == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert los_prob_g2g(200.0, eps) < los_prob_g2g(100.0, eps)


def test_state_probabilities_partition():
    for r in (50.0, 80.0, 211.0, 1234.5):
        p = los_prob_a2g(r, 50.0, B, C)
        assert 0.0 < p < 1.0
        assert p + (1.0 - p) == 1.0
    for r in (0.0, 55.5, 777.0):
        p = los_prob_g2g(r, 1.0 / 141.4)
        assert 0.0 < p <= 1.0


def test_path_loss():
    assert path_loss(10.0, 1.0, 2.0) == pytest.approx(100.0, rel=1e-14)
    assert path_loss(50.0, 10**3.08, 2.09) == pytest.approx(
        4274125.883570872, rel=1e-12)
    r = np.linspace(1.0, 100.0, 50)
    vals = path_loss(r, 2.0, 3.1)
    assert np.all(np.diff(vals) > 0)


def test_gain_pmf_degenerate_and_symmetric():
    full = AntennaPattern(main_b=4.0, side_b=1.0, main_u=3.0, side_u=0.5,
                          theta_b=2 * math.pi, theta_u=2 * math.pi)
    pmf = gain_pmf(full)
    assert pmf[0].prob == pytest.approx(1.0)
    assert sum(g.prob for g in pmf[1:]) == pytest.approx(0.0, abs=1e-15)

    half = AntennaPattern(main_b=4.0, side_b=1.0, main_u=3.0, side_u=0.5,
                          theta_b=math.pi, theta_u=math.pi)
    for level in gain_pmf(half):
        assert level.prob == pytest.approx(0.25, rel=1e-14)


def test_gain_pmf_narrow_lobes():
    ant = AntennaPattern(main_b=4.0, side_b=1.0, main_u=3.0, side_u=0.5,
                         theta_b=math.pi / 6, theta_u=math.pi / 3)
    pmf = gain_pmf(ant)
    assert pmf[0].prob == pytest.approx(1.0 / 72.0, rel=1e-14)
    assert pmf[3].prob == pytest.approx(55.0 / 72.0, rel=1e-14)
    assert sum(g.prob for g in pmf) == pytest.approx(1.0, abs=1e-15)


def test_nakagami_order_one_is_exponential():
    rng = np.random.default_rng(7)
    x = sample_nakagami(1, rng, size=200_000)
    # exponential(1): mean 1, P(X > 1) = e^{-1}
    assert x.mean() == pytest.approx(1.0, abs=0.01)
    assert (x > 1.0).mean() == pytest.approx(math.exp(-1.0), abs=0.005)


def test_nakagami_moments():
    rng = np.random.default_rng(123)
    x3 = sample_nakagami(3, rng, size=1_000_000)
    assert x3.mean() == pytest.approx(1.0, abs=0.003)
    x2 = sample_nakagami(2, rng, size=1_000_000)
    assert x2.var() == pytest.approx(0.5, abs=0.01)
    with pytest.raises(ValueError):
        sample_nakagami(0, rng)
