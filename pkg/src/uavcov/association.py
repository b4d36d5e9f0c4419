"""Downlink association: tier system, association probabilities and
conditional serving-distance densities.

Association follows the strongest long-term biased mean received power
rule. Within each tier/state the strongest candidate is the nearest
point, so the winning event factors into per-(tier, state) void or
survival probabilities evaluated at the cross-tier exclusion radii.

The same machinery serves the single-tier canonical layout (cluster
center, one UAV PPP, ground stations) and the multi-tier multi-height
generalization: the tier list is just longer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from .channel import LinkState, STATES
from .config import NetworkConfig
from .geometry import DistanceLaw, cluster_laws, gbs_laws, uav_ppp_laws
from .quadrature import gauss_legendre_nodes

CLUSTER = 0  # index of the cluster-center tier in every tier list


@dataclass(frozen=True)
class Tier:
    index: int
    name: str
    is_cluster: bool
    air: bool                  # air-to-ground links
    power: float
    bias: float
    height: float
    density: float             # 0 for the cluster tier
    kappa: Dict[LinkState, float]
    alpha: Dict[LinkState, float]
    nakagami: Dict[LinkState, int]
    laws: Dict[LinkState, DistanceLaw]

    @property
    def lo(self) -> float:
        return self.height if self.air else 0.0


@dataclass
class AssociationMatrix:
    """Association probability per (tier index, link state)."""

    probs: Dict[Tuple[int, LinkState], float]
    tier_names: List[str]

    def total(self) -> float:
        return sum(self.probs.values())

    def tier_total(self, j: int) -> float:
        return sum(v for (i, _), v in self.probs.items() if i == j)

    def __getitem__(self, key):
        return self.probs[key]

    def items(self):
        return self.probs.items()


def exclusion_radius(p_k, b_k, kappa_kb, alpha_kb, p_j, b_j, kappa_js,
                     alpha_js, r):
    """Distance below which no (tier k, state b) point may exist given
    service by (tier j, state s) at distance r."""
    c = (p_k * b_k * kappa_js) / (p_j * b_j * kappa_kb)
    return (c * np.power(r, alpha_js)) ** (1.0 / alpha_kb)


class TierSystem:
    """Tier list plus every pairwise exclusion map and serving rule."""

    def __init__(self, cfg: NetworkConfig):
        self.cfg = cfg.validated()
        self.tiers: List[Tier] = []
        ant = cfg.antenna
        self.g0 = ant.g0

        uav_specs = [(cfg.lambda_u, cfg.p_u, cfg.b_u, cfg.height)]
        uav_specs += [(t.density, t.power, t.bias, t.height) for t in cfg.tiers]
        parent = cfg.parent_tier
        if not 0 <= parent < len(uav_specs):
            raise ValueError("parent_tier out of range")

        kappa = {LinkState.LOS: cfg.kappa_l, LinkState.NLOS: cfg.kappa_n}
        alpha = {LinkState.LOS: cfg.alpha_l, LinkState.NLOS: cfg.alpha_n}
        nak = {LinkState.LOS: cfg.n_l, LinkState.NLOS: cfg.n_n}

        # tier 0: the own cluster center, parented on one UAV tier
        _, p_par, b_par, h_par = uav_specs[parent]
        self.tiers.append(Tier(
            index=0, name="cluster", is_cluster=True, air=True,
            power=p_par, bias=b_par, height=h_par, density=0.0,
            kappa=kappa, alpha=alpha, nakagami=nak,
            laws=cluster_laws(cfg, height=h_par)))

        for i, (lam, p, b, h) in enumerate(uav_specs):
            name = "uav" if i == 0 else f"uav{i + 1}"
            self.tiers.append(Tier(
                index=len(self.tiers), name=name, is_cluster=False, air=True,
                power=p, bias=b, height=h, density=lam,
                kappa=kappa, alpha=alpha, nakagami=nak,
                laws=uav_ppp_laws(cfg, density=lam, height=h, name=name)))

        self.tiers.append(Tier(
            index=len(self.tiers), name="gbs", is_cluster=False, air=False,
            power=cfg.p_g, bias=cfg.b_g, height=0.0, density=cfg.lambda_g,
            kappa=kappa, alpha=alpha, nakagami=nak,
            laws=gbs_laws(cfg)))

        self._assoc: Optional[AssociationMatrix] = None
        self._serving_cache: Dict[Tuple[int, LinkState], tuple] = {}

    # -- exclusion map -----------------------------------------------------

    def q_radius(self, k: int, b: LinkState, j: int, s: LinkState, r):
        tk, tj = self.tiers[k], self.tiers[j]
        return exclusion_radius(tk.power, tk.bias, tk.kappa[b], tk.alpha[b],
                                tj.power, tj.bias, tj.kappa[s], tj.alpha[s], r)

    def _q_coeffs(self, k, b, j, s):
        tk, tj = self.tiers[k], self.tiers[j]
        c = (tk.power * tk.bias * tj.kappa[s]) / (tj.power * tj.bias * tk.kappa[b])
        beta = tj.alpha[s] / tk.alpha[b]
        return c ** (1.0 / tk.alpha[b]), beta

    # -- association ------------------------------------------------------

    def serving_factor(self, j: int, s: LinkState, r):
        """Probability that no other tier/state outbids service by
        (j, s) at distance r: the product term of the association law."""
        r = np.asarray(r, dtype=float)
        out = np.ones_like(r)
        tier_j = self.tiers[j]
        for k, tier_k in enumerate(self.tiers):
            if tier_k.is_cluster:
                if j == CLUSTER:
                    continue
                # the single cluster-center point is in exactly one state
                term = np.zeros_like(r)
                for b in STATES:
                    q = self.q_radius(k, b, j, s, r)
                    law = tier_k.laws[b]
                    term += law.occur_prob * law.ccdf(q)
                out *= term
                continue
            for b in STATES:
                if k == j and b is s:
                    continue  # the serving candidate itself: nearest by construction
                q = self.q_radius(k, b, j, s, r)
                out *= tier_k.laws[b].void_prob(np.maximum(q, tier_k.lo))
        return out

    def association_integrand(self, j: int, s: LinkState, r):
        tier = self.tiers[j]
        law = tier.laws[s]
        return law.occur_prob * law.pdf(r) * self.serving_factor(j, s, r)

    def _support_breaks(self, j: int, s: LinkState):
        """Kink locations of the association integrand: radii where an
        exclusion radius crosses another law's support edge."""
        tier_j = self.tiers[j]
        law_j = tier_j.laws[s]
        lo, hi = law_j.support[0], law_j.effective_hi
        breaks = set()
        for k, tier_k in enumerate(self.tiers):
            for b in STATES:
                if k == j and b is s:
                    continue
                coeff, beta = self._q_coeffs(k, b, j, s)
                edges = [tier_k.lo]
                if tier_k.is_cluster:
                    edges.append(tier_k.laws[b].effective_hi)
                for edge in edges:
                    if edge <= 0 or coeff <= 0:
                        continue
                    r_star = (edge / coeff) ** (1.0 / beta)
                    if lo < r_star < hi:
                        breaks.add(float(r_star))
        return sorted(breaks)

    def serving_nodes(self, j: int, s: LinkState, n_panels=40, n_nodes=12):
        """Frozen quadrature rule over the serving distance.

        Returns (r_nodes, weights, a_js) with sum(weights) == a_js, the
        association probability. Conditional expectations over the
        serving distance are sums against weights / a_js.
        """
        key = (j, s)
        if key in self._serving_cache:
            return self._serving_cache[key]
        tier = self.tiers[j]
        law = tier.laws[s]
        lo, hi = law.support[0], law.effective_hi
        if law.occur_prob <= 0.0 or hi <= lo:
            res = (np.array([]), np.array([]), 0.0)
            self._serving_cache[key] = res
            return res
        edges = np.unique(np.concatenate([
            np.linspace(lo, hi, n_panels + 1), self._support_breaks(j, s)]))
        x, w = gauss_legendre_nodes(n_nodes)
        width = np.diff(edges)
        nodes = edges[:-1, None] + width[:, None] * x[None, :]
        flat = nodes.ravel()
        g = self.association_integrand(j, s, flat).reshape(nodes.shape)
        weights = (g * w[None, :]) * width[:, None]
        weights = weights.ravel()
        a_js = float(weights.sum())
        res = (flat, weights, a_js)
        self._serving_cache[key] = res
        return res

    def association(self) -> AssociationMatrix:
        if self._assoc is None:
            probs = {}
            for j, tier in enumerate(self.tiers):
                for s in STATES:
                    _, _, a = self.serving_nodes(j, s)
                    probs[(j, s)] = a
            self._assoc = AssociationMatrix(
                probs=probs, tier_names=[t.name for t in self.tiers])
        return self._assoc

    def serving_pdf(self, j: int, s: LinkState):
        """Normalized conditional serving-distance density for (j, s)."""
        _, _, a = self.serving_nodes(j, s)
        if a <= 0:
            raise ValueError(f"conditional law undefined: A[{j},{s.value}] = 0")

        def pdf(r):
            return self.association_integrand(j, s, r) / a

        return pdf


@lru_cache(maxsize=16)
def _system_for(cfg: NetworkConfig) -> TierSystem:
    return TierSystem(cfg)


def tier_system(cfg: NetworkConfig) -> TierSystem:
    """Shared, cached tier system for a config (configs are immutable)."""
    return _system_for(cfg)


def association_probabilities(cfg: NetworkConfig) -> AssociationMatrix:
    return tier_system(cfg).association()


def serving_distance_pdf(j: int, s: LinkState, cfg: NetworkConfig):
    return tier_system(cfg).serving_pdf(j, s)
