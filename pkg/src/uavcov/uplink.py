"""Uplink phase: activity probability, SINR coverage, and the downlink/
uplink time-split optimization.

Interfering users form one candidate per foreign cluster, active with
probability p_active (the chance a user harvested enough downlink
energy for its uplink budget). By default the LOS/NLOS split of an
interfering user is evaluated at its realized position inside the
double integral; the constant-thinning form used in the closed-form
derivations is available as ``paper_literal=True`` with the constant
taken at the mean nearest-cluster distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .channel import (LinkState, STATES, alzer_eta, binomial_coeffs, gain_pmf,
                      los_prob_a2g)
from .config import NetworkConfig
from .association import tier_system
from .downlink import downlink_analysis
from .geometry import cluster_offset_pdf, window_radius
from .quadrature import gauss_legendre_nodes

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class UplinkContext:
    """Interference context of the uplink phase."""

    p_active: float
    paper_literal: bool = False

    def __post_init__(self):
        if not 0.0 <= self.p_active <= 1.0:
            raise ValueError("p_active must lie in [0, 1]")


@dataclass
class ThroughputResult:
    rate_ul: float
    feasible: bool
    tau: float
    rate_dl: float
    r_min: float
    p_active: float
    p_ul_sinr: float


def active_probability(tau, rho, cfg: NetworkConfig, method=None) -> float:
    """Probability a user's harvest covers the uplink budget (T-tau)*P_t.

    tau = T needs zero energy, hence probability one.
    """
    if not 0.0 <= tau <= cfg.t_frame:
        raise ValueError("tau out of [0, T]")
    required = (cfg.t_frame - tau) * cfg.p_t_ul
    if required <= 0.0:
        return 1.0
    analysis = downlink_analysis(cfg)
    rep = analysis.report(gamma_e=required, tau=tau, rho=rho, method=method)
    return rep.totals["energy"]


class UplinkAnalysis:
    """Uplink coverage evaluator; geometry kernels cached per config."""

    def __init__(self, cfg: NetworkConfig, paper_literal: bool = False):
        self.cfg = cfg
        self.paper_literal = paper_literal
        self.system = tier_system(cfg)
        self.tier0 = self.system.tiers[0]
        self.height = self.tier0.height
        self.gains = gain_pmf(cfg.antenna)
        self.g0 = cfg.antenna.g0
        self._geom = None
        self._exponent_cache = {}

    # mean nearest foreign-cluster distance, used by the constant-thinning mode
    def _reference_distance(self):
        return math.sqrt(self.height**2 + 1.0 / (math.pi * self.cfg.lambda_u))

    def _geometry(self):
        """Frozen (w, v) node matrices shared by every Laplace argument."""
        if self._geom is not None:
            return self._geom
        cfg = self.cfg
        h = self.height
        cl = cfg.cluster
        spread = 8.6 * cl.sigma if cl.kind == "thomas" else cl.r_c
        # same horizon as the uplink simulation window
        w_hi = window_radius(cfg.lambda_u, cl.scale)

        xg, wg = gauss_legendre_nodes(20)
        # outer nodes over the foreign-cluster center distance w
        delta = max(1.0, 3e-5 * w_hi)
        n_panels = 7
        ratio = (1.0 + w_hi / delta) ** (1.0 / n_panels)
        edges = [delta * (ratio**k - 1.0) for k in range(n_panels + 1)]
        edges[0], edges[-1] = 0.0, w_hi
        w_nodes, w_wts = [], []
        for k in range(n_panels):
            width = edges[k + 1] - edges[k]
            w_nodes.append(edges[k] + width * xg)
            w_wts.append(width * wg)
        w_nodes = np.concatenate(w_nodes)
        w_wts = np.concatenate(w_wts)

        # inner nodes over the user offset distance v, per w
        xv, wv = gauss_legendre_nodes(16)
        v_lo = np.maximum(0.0, w_nodes - spread)
        v_hi = w_nodes + spread
        n_vp = 3
        v_t, v_w = [], []
        for k in range(n_vp):
            e0 = v_lo + (v_hi - v_lo) * k / n_vp
            width = (v_hi - v_lo) / n_vp
            v_t.append(e0[:, None] + width[:, None] * xv[None, :])
            v_w.append(width[:, None] * np.broadcast_to(wv, (len(w_nodes), len(xv))))
        v_t = np.concatenate(v_t, axis=1)
        v_w = np.concatenate(v_w, axis=1)

        fv = np.empty_like(v_t)
        for i, w in enumerate(w_nodes):
            fv[i] = cluster_offset_pdf(v_t[i], w, cl)
        r3 = np.sqrt(v_t**2 + h * h)
        p_los = los_prob_a2g(r3, h, cfg.env_b, cfg.env_c)
        inv_l = {
            s: 1.0 / (self.tier0.kappa[s] * np.power(r3, self.tier0.alpha[s]))
            for s in STATES
        }
        self._geom = dict(w=w_nodes, w_wts=w_wts, fv_w=fv * v_w, p_los=p_los,
                          inv_l=inv_l)
        return self._geom

    def _exponent_unit(self, mu, state: LinkState):
        """Laplace exponent of the state's user interference per unit
        active density (divide-through by p_active * lambda_u)."""
        geom = self._geometry()
        cfg = self.cfg
        n_b = self.tier0.nakagami[state]
        p_state = geom["p_los"] if state.is_los else 1.0 - geom["p_los"]
        if self.paper_literal:
            r_ref = self._reference_distance()
            p_ref = los_prob_a2g(r_ref, self.height, cfg.env_b, cfg.env_c)
            p_bar = p_ref if state.is_los else 1.0 - p_ref
            weight = p_bar
        else:
            weight = p_state
        inner = 0.0
        for lvl in self.gains:
            g = cfg.p_t_ul * lvl.gain * geom["inv_l"][state] / n_b
            mgf = (1.0 + mu * g) ** (-n_b)
            inner = inner + lvl.prob * mgf
        # contribution of a cluster at distance w: 1 - E_v[state-weighted MGF]
        loss = (weight * (1.0 - inner)) * geom["fv_w"]
        per_w = loss.sum(axis=1)
        return TWO_PI * float((geom["w_wts"] * geom["w"] * per_w).sum())

    def _exponent_interp(self, state, mu_lo, mu_hi):
        key = (state, round(math.log10(mu_lo), 3), round(math.log10(mu_hi), 3),
               self.paper_literal)
        if key not in self._exponent_cache:
            grid = np.geomspace(mu_lo, mu_hi, 33)
            vals = np.array([self._exponent_unit(m, state) for m in grid])
            vals = np.maximum(vals, 0.0)
            self._exponent_cache[key] = PchipInterpolator(
                np.log(grid), vals, extrapolate=True)
        return self._exponent_cache[key]

    def laplace_user(self, s_arg, state: LinkState, ctx: UplinkContext):
        """Laplace transform of the state-`state` user interference."""
        if ctx.p_active <= 0.0 or s_arg <= 0.0:
            return 1.0
        expo = self._exponent_unit(float(s_arg), state)
        return math.exp(-ctx.p_active * self.cfg.lambda_u * expo)

    def sinr_coverage(self, gamma_ul, ctx: UplinkContext) -> float:
        """SINR coverage of the typical uplink, given the serving user is
        active; serving state mixed by its occurrence probabilities."""
        if gamma_ul <= 0:
            return 1.0
        cfg = self.cfg
        total = 0.0
        lam_act = ctx.p_active * cfg.lambda_u
        for s in STATES:
            law = self.tier0.laws[s]
            d_s = law.occur_prob
            if d_s <= 0:
                continue
            lo, hi = law.support[0], law.effective_hi
            xg, wg = gauss_legendre_nodes(14)
            edges = np.linspace(lo, hi, 25)
            width = np.diff(edges)
            r = (edges[:-1, None] + width[:, None] * xg[None, :]).ravel()
            wts = (width[:, None] * wg[None, :]).ravel() * law.pdf(r)
            n_s = self.tier0.nakagami[s]
            eta = alzer_eta(n_s)
            coeffs = binomial_coeffs(n_s)
            mu_base = (eta * gamma_ul / (cfg.p_t_ul * self.g0 / self.tier0.kappa[s])
                       * np.power(r, self.tier0.alpha[s]))
            interps = None
            if lam_act > 0:
                mu_lo = mu_base.min()
                mu_hi = mu_base.max() * n_s
                interps = {b: self._exponent_interp(b, mu_lo, mu_hi) for b in STATES}
            acc = 0.0
            for n in range(1, n_s + 1):
                mu = n * mu_base
                vals = np.exp(-mu * cfg.sigma_n2)
                if interps is not None:
                    for b in STATES:
                        vals = vals * np.exp(-lam_act * np.maximum(
                            interps[b](np.log(mu)), 0.0))
                acc += (-1.0) ** (n + 1) * coeffs[n] * float((wts * vals).sum())
            total += d_s * acc
        return float(np.clip(total, 0.0, 1.0))


@lru_cache(maxsize=6)
def _uplink_for(cfg: NetworkConfig, paper_literal: bool) -> UplinkAnalysis:
    return UplinkAnalysis(cfg, paper_literal)


def uplink_analysis(cfg: NetworkConfig, paper_literal=False) -> UplinkAnalysis:
    return _uplink_for(cfg, paper_literal)


def uplink_laplace(s_arg, state: LinkState, cfg: NetworkConfig,
                   ctx: UplinkContext):
    return uplink_analysis(cfg, ctx.paper_literal).laplace_user(s_arg, state, ctx)


def uplink_sinr_coverage(gamma_ul, cfg: NetworkConfig,
                         ctx: Optional[UplinkContext] = None,
                         tau=None, rho=None, paper_literal=False) -> float:
    """Uplink SINR coverage; when no context is given, p_active is
    evaluated analytically at the config's (tau, rho)."""
    if ctx is None:
        tau = cfg.tau if tau is None else tau
        rho = cfg.rho if rho is None else rho
        ctx = UplinkContext(p_active=active_probability(tau, rho, cfg),
                            paper_literal=paper_literal)
    return uplink_analysis(cfg, ctx.paper_literal).sinr_coverage(gamma_ul, ctx)


def average_uplink_throughput(tau, rho, gamma_ul, cfg: NetworkConfig,
                              r_min=0.0, gamma_sinr=1.0) -> ThroughputResult:
    """Mean uplink rate (T-tau)*W*log2(1+gamma_ul)*P_cov*p_active, with
    the downlink-rate constraint evaluated alongside."""
    if not 0.0 <= tau <= cfg.t_frame:
        raise ValueError("tau out of [0, T]")
    p_act = active_probability(tau, rho, cfg) if tau < cfg.t_frame else 1.0
    if tau >= cfg.t_frame or p_act <= 0.0:
        p_ul = uplink_sinr_coverage(gamma_ul, cfg,
                                    UplinkContext(p_active=max(p_act, 0.0)))
    else:
        p_ul = uplink_sinr_coverage(gamma_ul, cfg, UplinkContext(p_active=p_act))
    spec_eff = math.log2(1.0 + gamma_ul)
    rate_ul = (cfg.t_frame - tau) * cfg.bandwidth * spec_eff * p_ul * p_act
    if r_min > 0:
        p_dl = downlink_analysis(cfg).report(gamma_sinr=gamma_sinr,
                                             rho=rho).totals["sinr"]
        rate_dl = tau * cfg.bandwidth * spec_eff * p_dl
    else:
        rate_dl = tau * cfg.bandwidth * spec_eff
    return ThroughputResult(rate_ul=rate_ul, feasible=rate_dl >= r_min,
                            tau=tau, rate_dl=rate_dl, r_min=r_min,
                            p_active=p_act, p_ul_sinr=p_ul)


@dataclass
class TauOptimum:
    feasible: bool
    tau_opt: Optional[float]
    result: Optional[ThroughputResult]
    tau_min: float
    trace: list

    @property
    def reason(self):
        return None if self.feasible else "downlink rate floor exceeds the frame budget"


def optimize_tau(rho, gamma_ul, r_min, cfg: NetworkConfig, gamma_sinr=1.0,
                 grid_points=64) -> TauOptimum:
    """Maximize uplink throughput over the downlink duration tau subject
    to a downlink rate floor.

    The rate floor binds through a closed-form minimum tau (the downlink
    SINR coverage does not depend on tau); the objective is then scanned
    on a coarse grid and polished by golden-section search, guarding
    against non-unimodal shapes.
    """
    t_frame = cfg.t_frame
    spec_eff = math.log2(1.0 + gamma_ul)
    if r_min > 0:
        if rho <= 0:
            return TauOptimum(False, None, None, math.inf, [])
        p_dl = downlink_analysis(cfg).report(gamma_sinr=gamma_sinr,
                                             rho=rho).totals["sinr"]
        denom = cfg.bandwidth * spec_eff * p_dl
        tau_min = r_min / denom if denom > 0 else math.inf
    else:
        tau_min = 0.0
    if tau_min > t_frame:
        return TauOptimum(False, None, None, tau_min, [])

    def objective(tau):
        return average_uplink_throughput(tau, rho, gamma_ul, cfg,
                                         r_min=r_min, gamma_sinr=gamma_sinr)

    grid = np.linspace(tau_min, t_frame, grid_points)
    trace = [(float(t), objective(float(t)).rate_ul) for t in grid]
    rates = np.array([r for _, r in trace])
    best = int(np.argmax(rates))

    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid_points - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc = objective(c).rate_ul
    fd = objective(d).rate_ul
    for _ in range(40):
        if b - a < 1e-5 * t_frame:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = objective(c).rate_ul
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = objective(d).rate_ul
    tau_opt = 0.5 * (a + b)
    cand = [(tau_opt, objective(tau_opt).rate_ul)] + trace
    tau_opt = max(cand, key=lambda p: p[1])[0]
    res = objective(tau_opt)
    return TauOptimum(True, float(tau_opt), res, tau_min, trace)
