"""Multi-tier multi-height generalization and noise-limited closed forms.

The multi-tier path reuses the tier-generic association and coverage
engine: the config's ``tiers`` list simply adds UAV tiers, and the
typical user's cluster parent is ``parent_tier``. With an empty tier
list everything reduces to the canonical three-tier layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .association import AssociationMatrix, association_probabilities
from .config import NetworkConfig
from .downlink import CoverageReport, downlink_analysis
from .geometry import cluster_combined_law
from .quadrature import integrate


def multi_tier_association(cfg: NetworkConfig) -> AssociationMatrix:
    """Association probabilities over {cluster, UAV tiers..., GBS}."""
    return association_probabilities(cfg)


def multi_tier_stp(gamma_e, gamma_sinr, tau, rho, cfg: NetworkConfig,
                   method=None) -> CoverageReport:
    """Energy/SINR/joint coverage over the generalized tier set."""
    return downlink_analysis(cfg).report(gamma_e=gamma_e, gamma_sinr=gamma_sinr,
                                         tau=tau, rho=rho, method=method)


# -- noise-limited special case ---------------------------------------------

def split_tradeoff(rho, tau, gamma_e, gamma_sinr, cfg: NetworkConfig) -> float:
    """Sign of this function selects the binding requirement when
    interference is negligible: positive means the energy requirement
    dominates the SINR one."""
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly inside (0, 1)")
    if tau <= 0:
        raise ValueError("tau must be positive")
    return gamma_e / (tau * (1.0 - rho)) - gamma_sinr * (cfg.sigma_c2 / rho
                                                         + cfg.sigma_n2)


@dataclass
class NoiseLimitedCase:
    f_value: float
    regime: str                 # sinr-limited | energy-limited | interior-optimum
    report: CoverageReport


def classify_regime(tau, gamma_e, gamma_sinr, cfg: NetworkConfig,
                    rho_range=(0.01, 0.99)) -> str:
    f_lo = split_tradeoff(rho_range[0], tau, gamma_e, gamma_sinr, cfg)
    f_hi = split_tradeoff(rho_range[1], tau, gamma_e, gamma_sinr, cfg)
    if f_hi < 0:
        return "sinr-limited"
    if f_lo > 0:
        return "energy-limited"
    return "interior-optimum"


def noise_limited_stp(rho, tau, gamma_e, gamma_sinr, cfg: NetworkConfig,
                      rho_range=(0.01, 0.99)) -> NoiseLimitedCase:
    """Joint coverage with interference dropped: the branch indicator
    replaces the interference CCDF exactly (energy branch at F >= 0)."""
    f_val = split_tradeoff(rho, tau, gamma_e, gamma_sinr, cfg)
    report = downlink_analysis(cfg, include_interference=False).report(
        gamma_e=gamma_e, gamma_sinr=gamma_sinr, tau=tau, rho=rho)
    return NoiseLimitedCase(
        f_value=f_val,
        regime=classify_regime(tau, gamma_e, gamma_sinr, cfg, rho_range),
        report=report)


class NoInteriorOptimum(ValueError):
    pass


def optimal_rho(tau, gamma_e, gamma_sinr, cfg: NetworkConfig) -> float:
    """Power split at which the noise-limited joint coverage peaks: the
    root of the energy/SINR trade-off inside (0, 1).

    Solved from the quadratic in rho with the numerically stable root
    form; a bisection cross-check replaces the closed root when the
    discriminant is cancellation-dominated.
    """
    if gamma_sinr <= 0 or gamma_e <= 0 or tau <= 0:
        raise NoInteriorOptimum("interior optimum requires positive "
                                "thresholds and downlink duration")
    a = tau * gamma_sinr * cfg.sigma_n2
    b = gamma_e + tau * gamma_sinr * (cfg.sigma_c2 - cfg.sigma_n2)
    c = -tau * gamma_sinr * cfg.sigma_c2
    disc = b * b - 4.0 * a * c       # c < 0, so always positive
    sq = math.sqrt(disc)
    if b >= 0:
        root = -2.0 * c / (b + sq)   # avoids -b + sq cancellation
    else:
        root = (-b + sq) / (2.0 * a)
    if not 0.0 < root < 1.0:
        raise NoInteriorOptimum(f"root {root} falls outside (0, 1)")

    # guard the closed form with a bracketed bisection on the trade-off
    lo, hi = 1e-12, 1.0 - 1e-12
    f = lambda r: split_tradeoff(r, tau, gamma_e, gamma_sinr, cfg)
    if f(lo) < 0 < f(hi):
        a_, b_ = lo, hi
        for _ in range(200):
            mid = 0.5 * (a_ + b_)
            if f(mid) >= 0:
                b_ = mid
            else:
                a_ = mid
            if b_ - a_ < 1e-15:
                break
        bis = 0.5 * (a_ + b_)
        if abs(bis - root) > 1e-9:
            root = bis
    return root


def uplink_closed_form(gamma_ul, cfg: NetworkConfig) -> float:
    """Noise-limited uplink coverage under LOS, square-law path loss and
    Rayleigh fading; closed in the cluster geometry."""
    c_p = gamma_ul * cfg.sigma_n2 / (cfg.p_t_ul * cfg.antenna.g0 * cfg.kappa_l)
    h = cfg.height
    if cfg.cluster.kind == "thomas":
        return math.exp(-c_p * h * h) / (1.0 + 2.0 * c_p * cfg.cluster.sigma**2)
    x = c_p * cfg.cluster.r_c**2
    if x < 1e-12:
        ratio = 1.0 - 0.5 * x
    else:
        ratio = -math.expm1(-x) / x
    return math.exp(-c_p * h * h) * ratio


def uplink_closed_form_quadrature(gamma_ul, cfg: NetworkConfig) -> float:
    """Independent check of the closed form: direct expectation of the
    Rayleigh tail over the cluster-center distance law."""
    c_p = gamma_ul * cfg.sigma_n2 / (cfg.p_t_ul * cfg.antenna.g0 * cfg.kappa_l)
    law = cluster_combined_law(cfg)
    val, _ = integrate(lambda r: np.exp(-c_p * r * r) * law.pdf(r),
                       law.support[0], law.effective_hi,
                       rel_tol=1e-10, abs_tol=1e-14)
    return val
