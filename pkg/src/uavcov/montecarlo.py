"""End-to-end stochastic simulator: the independent oracle for every
analytical quantity.

Trials run in fixed-size chunks; each chunk owns a counter-based RNG
stream keyed by (seed, chunk index), and chunk tallies are reduced in
chunk order. Results are therefore bit-identical across runs and
across worker counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from .channel import LinkState, STATES, gain_pmf, los_prob_a2g, los_prob_g2g
from .config import NetworkConfig
from .geometry import sample_cluster_offset, window_radius

CHUNK = 1024


def confidence(p_hat: float, n: int) -> float:
    """95% normal-approximation half-width of a binomial proportion."""
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError("p_hat must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1.96 * math.sqrt(p_hat * (1.0 - p_hat) / n)


@dataclass(frozen=True)
class TrialEstimate:
    estimate: float
    trials: int
    half_width: float
    seed: int

    @classmethod
    def from_counts(cls, successes, trials, seed):
        p = successes / trials if trials else math.nan
        return cls(estimate=p, trials=trials,
                   half_width=confidence(p, trials) if trials else math.nan,
                   seed=seed)


@dataclass
class DownlinkRealization:
    """One sampled downlink snapshot (diagnostic path, small batches)."""

    r0: float
    state0: LinkState
    serving_tier: int
    serving_state: LinkState
    serving_distance: float
    p_m: float
    interference: float
    harvested: float
    sinr: float


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence((int(seed), int(chunk_index)))))


def _segment_max(values, counts):
    """Per-trial max of a flat point array grouped by trial (-inf when
    a trial has no points)."""
    n = len(counts)
    out = np.full(n, -np.inf)
    if values.size == 0:
        return out, np.full(n, -1)
    bounds = np.concatenate([[0], np.cumsum(counts)[:-1]])
    raw = np.maximum.reduceat(values, bounds)
    nonempty = counts > 0
    out[nonempty] = raw[nonempty]
    idx = np.repeat(np.arange(n), counts)
    winners = np.full(n, -1)
    hit = np.flatnonzero(values == out[idx])
    if hit.size:
        trials_hit, first = np.unique(idx[hit], return_index=True)
        winners[trials_hit] = hit[first]
    return out, winners


def _segment_sum(values, counts):
    n = len(counts)
    out = np.zeros(n)
    if values.size == 0:
        return out
    bounds = np.concatenate([[0], np.cumsum(counts)[:-1]])
    raw = np.add.reduceat(values, bounds)
    out[counts > 0] = raw[counts > 0]
    return out


@dataclass
class _PointBatch:
    counts: np.ndarray
    idx: np.ndarray
    dist3: np.ndarray
    los: np.ndarray
    bias_power: np.ndarray
    tier_power: float
    contrib: np.ndarray = None


class _DownlinkTallies:
    def __init__(self, tier_count, laplace_probes, iccdf_probes):
        self.trials = 0
        self.assoc = np.zeros((tier_count, 2), dtype=np.int64)
        self.energy = 0
        self.sinr = 0
        self.joint = 0
        self.cond_counts = np.zeros((tier_count, 2), dtype=np.int64)
        self.cond_energy = np.zeros((tier_count, 2), dtype=np.int64)
        self.cond_sinr = np.zeros((tier_count, 2), dtype=np.int64)
        self.cond_joint = np.zeros((tier_count, 2), dtype=np.int64)
        self.laplace_probes = tuple(laplace_probes)
        self.iccdf_probes = tuple(iccdf_probes)
        self.lap_sum = np.zeros(len(self.laplace_probes))
        self.lap_trials = 0
        self.lap0_sum = np.zeros(len(self.laplace_probes))
        self.lap0_trials = 0
        self.icc_counts = np.zeros(len(self.iccdf_probes), dtype=np.int64)
        self.icc_trials = 0

    def merge(self, other):
        self.trials += other.trials
        self.assoc += other.assoc
        self.energy += other.energy
        self.sinr += other.sinr
        self.joint += other.joint
        self.cond_counts += other.cond_counts
        self.cond_energy += other.cond_energy
        self.cond_sinr += other.cond_sinr
        self.cond_joint += other.cond_joint
        self.lap_sum += other.lap_sum
        self.lap_trials += other.lap_trials
        self.lap0_sum += other.lap0_sum
        self.lap0_trials += other.lap0_trials
        self.icc_counts += other.icc_counts
        self.icc_trials += other.icc_trials
        return self


@dataclass
class MCDownlinkResult:
    seed: int
    trials: int
    association: Dict[Tuple[int, LinkState], TrialEstimate]
    energy: TrialEstimate
    sinr: TrialEstimate
    stp: TrialEstimate
    conditional: Dict[Tuple[int, LinkState], Dict[str, TrialEstimate]]
    laplace: Dict[float, TrialEstimate]
    laplace_cluster: Dict[float, TrialEstimate]
    interference_ccdf: Dict[float, TrialEstimate]
    tail_fraction: float
    warnings: list = field(default_factory=list)


def _uav_tier_specs(cfg: NetworkConfig):
    specs = [(cfg.lambda_u, cfg.p_u, cfg.b_u, cfg.height)]
    specs += [(t.density, t.power, t.bias, t.height) for t in cfg.tiers]
    return specs


def _downlink_chunk(cfg: NetworkConfig, n, seed, chunk_index, gamma_e,
                    gamma_sinr, tau, rho, tallies: _DownlinkTallies,
                    window_scale=1.0):
    rng = _chunk_rng(seed, chunk_index)
    ant = cfg.antenna
    g0 = ant.g0
    levels = gain_pmf(ant)
    gain_vals = np.array([g.gain for g in levels])
    gain_cum = np.cumsum([g.prob for g in levels])
    kappa = {True: cfg.kappa_l, False: cfg.kappa_n}
    alpha = {True: cfg.alpha_l, False: cfg.alpha_n}
    nak = {True: cfg.n_l, False: cfg.n_n}
    scale = cfg.cluster.scale

    uav_specs = _uav_tier_specs(cfg)
    parent = cfg.parent_tier
    _, p_par, b_par, h_par = uav_specs[parent]

    # tier 0: own cluster center at the parent height
    off = sample_cluster_offset(cfg.cluster, rng, size=n)
    d0 = np.hypot(off[:, 0], off[:, 1])
    r0 = np.hypot(d0, h_par)
    p_los0 = los_prob_a2g(r0, h_par, cfg.env_b, cfg.env_c)
    los0 = rng.random(n) < p_los0
    k0 = np.where(los0, kappa[True], kappa[False])
    a0 = np.where(los0, alpha[True], alpha[False])
    bp0 = p_par * b_par / (k0 * r0**a0)

    batches = []
    for (lam, power, bias, h) in uav_specs:
        radius = window_radius(lam, scale) * window_scale
        counts = rng.poisson(lam * math.pi * radius * radius, size=n)
        m = int(counts.sum())
        w = radius * np.sqrt(rng.random(m))
        dist3 = np.hypot(w, h)
        p_l = los_prob_a2g(dist3, h, cfg.env_b, cfg.env_c)
        los = rng.random(m) < p_l
        kap = np.where(los, kappa[True], kappa[False])
        alp = np.where(los, alpha[True], alpha[False])
        bp = power * bias / (kap * dist3**alp)
        batches.append(_PointBatch(counts=counts,
                                   idx=np.repeat(np.arange(n), counts),
                                   dist3=dist3, los=los, bias_power=bp,
                                   tier_power=power))

    radius_g = window_radius(cfg.lambda_g, scale) * window_scale
    counts_g = rng.poisson(cfg.lambda_g * math.pi * radius_g**2, size=n)
    mg = int(counts_g.sum())
    wg = radius_g * np.sqrt(rng.random(mg))
    p_lg = los_prob_g2g(wg, cfg.epsilon)
    los_g = rng.random(mg) < p_lg
    kap_g = np.where(los_g, kappa[True], kappa[False])
    alp_g = np.where(los_g, alpha[True], alpha[False])
    bp_g = cfg.p_g * cfg.b_g / (kap_g * np.maximum(wg, 1e-9)**alp_g)
    batches.append(_PointBatch(counts=counts_g,
                               idx=np.repeat(np.arange(n), counts_g),
                               dist3=np.maximum(wg, 1e-9), los=los_g,
                               bias_power=bp_g, tier_power=cfg.p_g))

    # association by biased mean power (tier 0 candidate first: fixed
    # tie-break order)
    cand = np.empty((1 + len(batches), n))
    cand[0] = bp0
    winners = []
    for i, b in enumerate(batches):
        best, win = _segment_max(b.bias_power, b.counts)
        cand[1 + i] = best
        winners.append(win)
    serving_tier = np.argmax(cand, axis=0)          # 0 = cluster tier
    best_bp = cand[serving_tier, np.arange(n)]

    # interferer marks for every point, then subtract the serving point
    interference = np.zeros(n)
    for b in batches:
        m = len(b.dist3)
        u_g = rng.random(m)
        gains = gain_vals[np.searchsorted(gain_cum, u_g, side="right").clip(0, 3)]
        h_l = rng.gamma(cfg.n_l, 1.0 / cfg.n_l, m)
        h_n = rng.gamma(cfg.n_n, 1.0 / cfg.n_n, m)
        fad = np.where(b.los, h_l, h_n)
        kap = np.where(b.los, kappa[True], kappa[False])
        alp = np.where(b.los, alpha[True], alpha[False])
        b.contrib = b.tier_power * gains * fad / (kap * b.dist3**alp)
        interference += _segment_sum(b.contrib, b.counts)

    # tier 0 as interferer (only when it is not serving)
    u_g0 = rng.random(n)
    g0_int = gain_vals[np.searchsorted(gain_cum, u_g0, side="right").clip(0, 3)]
    h0_l = rng.gamma(cfg.n_l, 1.0 / cfg.n_l, n)
    h0_n = rng.gamma(cfg.n_n, 1.0 / cfg.n_n, n)
    fad0 = np.where(los0, h0_l, h0_n)
    i0_contrib = p_par * g0_int * fad0 / (k0 * r0**a0)
    interference += np.where(serving_tier != 0, i0_contrib, 0.0)

    # remove the serving point's interferer mark, collect its geometry
    serving_dist = r0.copy()
    serving_los = los0.copy()
    serving_power = np.full(n, p_par)
    for i, b in enumerate(batches):
        sel = serving_tier == (1 + i)
        if not np.any(sel):
            continue
        win = winners[i][sel]
        interference[sel] -= b.contrib[win]
        serving_dist[sel] = b.dist3[win]
        serving_los[sel] = b.los[win]
        serving_power[sel] = b.tier_power

    # serving link fading and received power
    h_serv_l = rng.gamma(cfg.n_l, 1.0 / cfg.n_l, n)
    h_serv_n = rng.gamma(cfg.n_n, 1.0 / cfg.n_n, n)
    h_serv = np.where(serving_los, h_serv_l, h_serv_n)
    kap_s = np.where(serving_los, kappa[True], kappa[False])
    alp_s = np.where(serving_los, alpha[True], alpha[False])
    p_m = serving_power * g0 * h_serv / (kap_s * serving_dist**alp_s)

    harvested = tau * (1.0 - rho) * (p_m + interference)
    if rho > 0:
        sinr = p_m / (cfg.sigma_c2 / rho + cfg.sigma_n2 + interference)
    else:
        sinr = np.zeros(n)

    e_ok = harvested > gamma_e
    s_ok = sinr > gamma_sinr

    tallies.trials += n
    tier_count = len(batches) + 1
    st_state = np.where(serving_los, 0, 1)
    for j in range(tier_count):
        for si in (0, 1):
            sel = (serving_tier == j) & (st_state == si)
            cnt = int(sel.sum())
            tallies.assoc[j, si] += cnt
            tallies.cond_counts[j, si] += cnt
            tallies.cond_energy[j, si] += int((sel & e_ok).sum())
            tallies.cond_sinr[j, si] += int((sel & s_ok).sum())
            tallies.cond_joint[j, si] += int((sel & e_ok & s_ok).sum())
    tallies.energy += int(e_ok.sum())
    tallies.sinr += int(s_ok.sum())
    tallies.joint += int((e_ok & s_ok).sum())

    if tallies.laplace_probes:
        sel = (serving_tier == 0) & serving_los
        if np.any(sel):
            i_sel = interference[sel]
            for pi, s_arg in enumerate(tallies.laplace_probes):
                tallies.lap_sum[pi] += float(np.exp(-s_arg * i_sel).sum())
            tallies.lap_trials += int(sel.sum())
        # cluster-center interference probe, conditioned on UAV-tier LOS service
        sel0 = (serving_tier == 1) & serving_los
        if np.any(sel0):
            i0_sel = i0_contrib[sel0]
            for pi, s_arg in enumerate(tallies.laplace_probes):
                tallies.lap0_sum[pi] += float(np.exp(-s_arg * i0_sel).sum())
            tallies.lap0_trials += int(sel0.sum())
    if tallies.iccdf_probes:
        sel = (serving_tier == 0) & serving_los
        if np.any(sel):
            i_sel = interference[sel]
            for pi, x in enumerate(tallies.iccdf_probes):
                tallies.icc_counts[pi] += int((i_sel > x).sum())
            tallies.icc_trials += int(sel.sum())

    return dict(r0=r0, los0=los0, serving_tier=serving_tier,
                serving_los=serving_los, serving_dist=serving_dist,
                p_m=p_m, interference=interference, harvested=harvested,
                sinr=sinr)


def _run_downlink_chunks(args):
    (cfg, seed, chunk_lo, chunk_hi, sizes, gamma_e, gamma_sinr, tau, rho,
     laplace_probes, iccdf_probes, tier_count, window_scale) = args
    t = _DownlinkTallies(tier_count, laplace_probes, iccdf_probes)
    for ci in range(chunk_lo, chunk_hi):
        _downlink_chunk(cfg, sizes[ci], seed, ci, gamma_e, gamma_sinr,
                        tau, rho, t, window_scale)
    return t


def _interference_tail_fraction(cfg: NetworkConfig):
    """Mean interference lost to the finite window, relative to the mean
    kept, for the densest (UAV) tier. Dominated by the slow far tail."""
    scale = cfg.cluster.scale
    r_win = window_radius(cfg.lambda_u, scale)
    trunc = max(cfg.settings.trunc_radius, 3 * r_win)

    def mean_integral(lo, hi):
        t = np.geomspace(max(lo, cfg.height + 1.0), hi, 4000)
        p_l = los_prob_a2g(t, cfg.height, cfg.env_b, cfg.env_c)
        dens = (p_l / (cfg.kappa_l * t**cfg.alpha_l)
                + (1 - p_l) / (cfg.kappa_n * t**cfg.alpha_n)) * t
        return np.trapezoid(dens, t)

    kept = mean_integral(cfg.height, r_win)
    lost = mean_integral(r_win, trunc)
    return lost / kept if kept > 0 else 0.0


def simulate_downlink(cfg: NetworkConfig, gamma_e, gamma_sinr, trials,
                      seed, tau=None, rho=None, laplace_probes=(),
                      iccdf_probes=(), workers=1,
                      window_scale=1.0) -> MCDownlinkResult:
    """Empirical association / energy / SINR / joint coverage frequencies
    plus interference functionals, deterministic in (cfg, seed, trials)."""
    cfg = cfg.validated()
    tau = cfg.tau if tau is None else tau
    rho = cfg.rho if rho is None else rho
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tier_count = len(_uav_tier_specs(cfg)) + 2
    n_chunks = (trials + CHUNK - 1) // CHUNK
    sizes = [CHUNK] * n_chunks
    sizes[-1] = trials - CHUNK * (n_chunks - 1)

    if workers <= 1:
        total = _run_downlink_chunks((cfg, seed, 0, n_chunks, sizes, gamma_e,
                                      gamma_sinr, tau, rho, laplace_probes,
                                      iccdf_probes, tier_count, window_scale))
    else:
        spans = np.linspace(0, n_chunks, workers + 1).astype(int)
        jobs = [(cfg, seed, int(spans[i]), int(spans[i + 1]), sizes, gamma_e,
                 gamma_sinr, tau, rho, laplace_probes, iccdf_probes, tier_count,
                 window_scale)
                for i in range(workers) if spans[i] < spans[i + 1]]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_downlink_chunks, jobs))
        total = parts[0]
        for p in parts[1:]:
            total.merge(p)

    assoc = {}
    conditional = {}
    for j in range(tier_count):
        for si, state in enumerate(STATES):
            assoc[(j, state)] = TrialEstimate.from_counts(
                int(total.assoc[j, si]), trials, seed)
            nc = int(total.cond_counts[j, si])
            if nc > 0:
                conditional[(j, state)] = {
                    "energy": TrialEstimate.from_counts(int(total.cond_energy[j, si]), nc, seed),
                    "sinr": TrialEstimate.from_counts(int(total.cond_sinr[j, si]), nc, seed),
                    "stp": TrialEstimate.from_counts(int(total.cond_joint[j, si]), nc, seed),
                }
    laplace = {}
    laplace0 = {}
    for pi, s_arg in enumerate(laplace_probes):
        nl = max(total.lap_trials, 1)
        est = total.lap_sum[pi] / nl
        laplace[s_arg] = TrialEstimate(est, total.lap_trials,
                                       confidence(min(max(est, 0), 1), nl), seed)
        n0 = max(total.lap0_trials, 1)
        est0 = total.lap0_sum[pi] / n0
        laplace0[s_arg] = TrialEstimate(est0, total.lap0_trials,
                                        confidence(min(max(est0, 0), 1), n0), seed)
    iccdf = {}
    for pi, x in enumerate(iccdf_probes):
        ni = max(total.icc_trials, 1)
        iccdf[x] = TrialEstimate.from_counts(int(total.icc_counts[pi]), ni, seed)

    tail = _interference_tail_fraction(cfg)
    warnings = []
    if tail > 1e-3:
        warnings.append(
            f"window truncation leaves {tail:.2e} of the mean interference outside")

    return MCDownlinkResult(
        seed=seed, trials=trials, association=assoc,
        energy=TrialEstimate.from_counts(total.energy, trials, seed),
        sinr=TrialEstimate.from_counts(total.sinr, trials, seed),
        stp=TrialEstimate.from_counts(total.joint, trials, seed),
        conditional=conditional, laplace=laplace, laplace_cluster=laplace0,
        interference_ccdf=iccdf, tail_fraction=tail, warnings=warnings)


# -- uplink ------------------------------------------------------------------

@dataclass
class MCUplinkResult:
    seed: int
    trials: int
    p_active: float
    p_active_mode: str
    sinr: TrialEstimate


def _uplink_chunk(cfg, n, seed, chunk_index, gamma_ul, p_active):
    rng = _chunk_rng(seed, chunk_index)
    h = cfg.height if not cfg.tiers else _uav_tier_specs(cfg)[cfg.parent_tier][3]
    ant = cfg.antenna
    levels = gain_pmf(ant)
    gain_vals = np.array([g.gain for g in levels])
    gain_cum = np.cumsum([g.prob for g in levels])

    off0 = sample_cluster_offset(cfg.cluster, rng, size=n)
    r0 = np.hypot(np.hypot(off0[:, 0], off0[:, 1]), h)
    los0 = rng.random(n) < los_prob_a2g(r0, h, cfg.env_b, cfg.env_c)
    kap0 = np.where(los0, cfg.kappa_l, cfg.kappa_n)
    alp0 = np.where(los0, cfg.alpha_l, cfg.alpha_n)
    h_l = rng.gamma(cfg.n_l, 1.0 / cfg.n_l, n)
    h_n = rng.gamma(cfg.n_n, 1.0 / cfg.n_n, n)
    h0 = np.where(los0, h_l, h_n)
    signal = cfg.p_t_ul * ant.g0 * h0 / (kap0 * r0**alp0)

    radius = window_radius(cfg.lambda_u, cfg.cluster.scale)
    counts = rng.poisson(cfg.lambda_u * math.pi * radius * radius, size=n)
    m = int(counts.sum())
    w = radius * np.sqrt(rng.random(m))
    phi = rng.random(m) * 2.0 * math.pi
    centers = np.column_stack([w * np.cos(phi), w * np.sin(phi)])
    offs = sample_cluster_offset(cfg.cluster, rng, size=m)
    v = np.hypot(centers[:, 0] + offs[:, 0], centers[:, 1] + offs[:, 1])
    active = rng.random(m) < p_active
    r3 = np.hypot(v, h)
    los_i = rng.random(m) < los_prob_a2g(r3, h, cfg.env_b, cfg.env_c)
    kap_i = np.where(los_i, cfg.kappa_l, cfg.kappa_n)
    alp_i = np.where(los_i, cfg.alpha_l, cfg.alpha_n)
    gains = gain_vals[np.searchsorted(gain_cum, rng.random(m), side="right").clip(0, 3)]
    hi_l = rng.gamma(cfg.n_l, 1.0 / cfg.n_l, m)
    hi_n = rng.gamma(cfg.n_n, 1.0 / cfg.n_n, m)
    fad = np.where(los_i, hi_l, hi_n)
    contrib = np.where(active, cfg.p_t_ul * gains * fad / (kap_i * r3**alp_i), 0.0)
    interference = _segment_sum(contrib, counts)

    sinr = signal / (cfg.sigma_n2 + interference)
    return int((sinr >= gamma_ul).sum())


def _run_uplink_chunks(args):
    cfg, seed, chunk_lo, chunk_hi, sizes, gamma_ul, p_active = args
    hits = 0
    for ci in range(chunk_lo, chunk_hi):
        hits += _uplink_chunk(cfg, sizes[ci], seed, 1_000_000 + ci, gamma_ul,
                              p_active)
    return hits


def simulate_uplink(cfg: NetworkConfig, tau, rho, gamma_ul, trials, seed,
                    p_active=None, workers=1) -> MCUplinkResult:
    """Empirical uplink SINR coverage given the serving user is active.

    ``p_active=None`` estimates the activity probability by a nested
    downlink energy run at the uplink budget; passing a float uses the
    supplied (e.g. analytical) value.
    """
    cfg = cfg.validated()
    if p_active is None:
        required = (cfg.t_frame - tau) * cfg.p_t_ul
        if required <= 0:
            p_active = 1.0
        else:
            nested = simulate_downlink(cfg, required, math.inf, trials, seed + 7,
                                       tau=tau, rho=rho, workers=workers)
            p_active = nested.energy.estimate
        mode = "nested"
    else:
        mode = "supplied"
    n_chunks = (trials + CHUNK - 1) // CHUNK
    sizes = [CHUNK] * n_chunks
    sizes[-1] = trials - CHUNK * (n_chunks - 1)
    if workers <= 1:
        hits = _run_uplink_chunks((cfg, seed, 0, n_chunks, sizes, gamma_ul, p_active))
    else:
        spans = np.linspace(0, n_chunks, workers + 1).astype(int)
        jobs = [(cfg, seed, int(spans[i]), int(spans[i + 1]), sizes, gamma_ul,
                 p_active) for i in range(workers) if spans[i] < spans[i + 1]]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_run_uplink_chunks, jobs))
    return MCUplinkResult(seed=seed, trials=trials, p_active=p_active,
                          p_active_mode=mode,
                          sinr=TrialEstimate.from_counts(hits, trials, seed))


def sample_downlink_realizations(cfg: NetworkConfig, count, seed,
                                 tau=None, rho=None):
    """Small diagnostic batch of fully-described downlink snapshots."""
    cfg = cfg.validated()
    tau = cfg.tau if tau is None else tau
    rho = cfg.rho if rho is None else rho
    tallies = _DownlinkTallies(len(_uav_tier_specs(cfg)) + 2, (), ())
    arrays = _downlink_chunk(cfg, count, seed, 0, math.inf, math.inf,
                             tau, rho, tallies)
    out = []
    for i in range(count):
        out.append(DownlinkRealization(
            r0=float(arrays["r0"][i]),
            state0=LinkState.LOS if arrays["los0"][i] else LinkState.NLOS,
            serving_tier=int(arrays["serving_tier"][i]),
            serving_state=LinkState.LOS if arrays["serving_los"][i] else LinkState.NLOS,
            serving_distance=float(arrays["serving_dist"][i]),
            p_m=float(arrays["p_m"][i]),
            interference=float(arrays["interference"][i]),
            harvested=float(arrays["harvested"][i]),
            sinr=float(arrays["sinr"][i])))
    return out
