"""Distance distributions and point-process samplers.

The analytical side builds `DistanceLaw` objects: a CCDF/PDF pair over
3D link distance per (tier, link state), together with the probability
that the tier offers a candidate in that state. PPP tiers additionally
expose the void probability P(no point of that state within x), which
is the quantity the association products actually need.

The sampler side draws the matching point processes for the Monte
Carlo oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .channel import LinkState, STATES, los_prob_a2g, los_prob_g2g
from .config import ClusterSpec, NetworkConfig
from .quadrature import bessel_i0, gauss_legendre_nodes

TWO_PI = 2.0 * math.pi

# Thomas clusters: offsets beyond 8.6 sigma carry < 1e-16 of the mass.
_THOMAS_RANGE = 8.6


@dataclass
class DistanceLaw:
    """CCDF/PDF pair over 3D link distance with declared support.

    ``occur_prob`` is the probability the tier offers a candidate in
    this state at all. ``ccdf`` is the proper conditional survival
    (1 at the lower support edge, 0 at the upper); for PPP tiers
    ``void_prob(x)`` is the unconditional P(no such point within x),
    which differs from occur_prob * ccdf whenever occur_prob < 1.
    Queries below the support return CCDF 1, above return 0.
    """

    tier: str
    state: Optional[LinkState]
    support: tuple
    occur_prob: float
    pdf: Callable
    ccdf: Callable
    void_prob: Optional[Callable] = None
    # upper distance beyond which the remaining mass is numerically zero
    effective_hi: float = field(default=0.0)

    def __post_init__(self):
        if not self.effective_hi:
            self.effective_hi = self.support[1]


def _cumulative_panels(f, edges, n_nodes=12):
    """Integral of f over each [edges[i], edges[i+1]] panel, vectorized."""
    x, w = gauss_legendre_nodes(n_nodes)
    lo = edges[:-1]
    width = np.diff(edges)
    t = lo[:, None] + width[:, None] * x[None, :]
    vals = f(t.ravel()).reshape(t.shape)
    return width * (vals @ w)


# -- cluster (tier-0) laws -------------------------------------------------

def ground_offset_pdf(d, cluster: ClusterSpec):
    """Density of the ground distance from a UE to its own cluster center."""
    d = np.asarray(d, dtype=float)
    if cluster.kind == "thomas":
        s2 = cluster.sigma**2
        return (d / s2) * np.exp(-0.5 * d * d / s2)
    out = np.where((d >= 0) & (d <= cluster.r_c), 2.0 * d / cluster.r_c**2, 0.0)
    return out


def ground_offset_ccdf(d, cluster: ClusterSpec):
    d = np.asarray(d, dtype=float)
    if cluster.kind == "thomas":
        return np.exp(-0.5 * d * d / cluster.sigma**2)
    return np.clip(1.0 - (d / cluster.r_c) ** 2, 0.0, 1.0)


def cluster_laws(cfg: NetworkConfig, height: Optional[float] = None,
                 cluster: Optional[ClusterSpec] = None):
    """State-conditional laws of the distance to the own cluster-center UAV.

    Returns {LinkState: DistanceLaw}; the two occur_probs partition unity.
    """
    h = cfg.height if height is None else height
    cl = cfg.cluster if cluster is None else cluster

    if cl.kind == "thomas":
        d_hi = _THOMAS_RANGE * cl.sigma
    else:
        d_hi = cl.r_c
    x_hi = math.hypot(h, d_hi)

    # ground-offset grid; distances x = sqrt(d^2 + H^2)
    d_edges = np.linspace(0.0, d_hi, 1201)

    def p_state(d, los):
        r = np.sqrt(d * d + h * h)
        p = los_prob_a2g(r, h, cfg.env_b, cfg.env_c)
        return p if los else 1.0 - p

    laws = {}
    for state in STATES:
        masses = _cumulative_panels(
            lambda d: p_state(d, state.is_los) * ground_offset_pdf(d, cl), d_edges)
        # unnormalized survival of x at the grid, accumulated from the top
        tail = np.concatenate([np.cumsum(masses[::-1])[::-1], [0.0]])
        occur = float(tail[0])
        x_grid = np.sqrt(d_edges**2 + h * h)
        # exact derivative of the survival: minus the unnormalized density
        if cl.kind == "thomas":
            base_grid = (x_grid / cl.sigma**2) * np.exp(
                0.5 * (h * h - x_grid**2) / cl.sigma**2)
        else:
            base_grid = 2.0 * x_grid / cl.r_c**2
        slope = -base_grid * p_state(d_edges, state.is_los)
        interp = CubicHermiteSpline(x_grid, tail, slope, extrapolate=False)

        def make_pdf(st, occ):
            def pdf(x):
                x = np.asarray(x, dtype=float)
                inside = (x >= h) & (x <= x_hi) & (x > 0)
                xs = np.where(inside, x, h + 1.0)
                # closed-form lift of the ground-offset density to 3D distance
                if cl.kind == "thomas":
                    s2 = cl.sigma**2
                    base = (xs / s2) * np.exp(0.5 * (h * h - xs * xs) / s2)
                else:
                    base = 2.0 * xs / cl.r_c**2
                d = np.sqrt(np.maximum(xs * xs - h * h, 0.0))
                val = base * p_state(d, st.is_los) / occ
                out = np.where(inside, val, 0.0)
                return float(out) if out.ndim == 0 else out
            return pdf

        def make_ccdf(occ, itp):
            def ccdf(x):
                x = np.asarray(x, dtype=float)
                out = np.ones_like(x)
                out = np.where(x > x_hi, 0.0, out)
                mid = (x >= h) & (x <= x_hi)
                if np.any(mid):
                    vals = itp(np.where(mid, x, h)) / occ
                    out = np.where(mid, np.clip(vals, 0.0, 1.0), out)
                return float(out) if out.ndim == 0 else out
            return ccdf

        laws[state] = DistanceLaw(
            tier="cluster", state=state, support=(h, x_hi),
            occur_prob=occur, pdf=make_pdf(state, occur),
            ccdf=make_ccdf(occur, interp), effective_hi=x_hi)
    return laws


def cluster_combined_law(cfg: NetworkConfig, height: Optional[float] = None,
                         cluster: Optional[ClusterSpec] = None) -> DistanceLaw:
    """State-mixed law of the cluster-center distance (no LOS/NLOS split)."""
    h = cfg.height if height is None else height
    cl = cfg.cluster if cluster is None else cluster
    d_hi = _THOMAS_RANGE * cl.sigma if cl.kind == "thomas" else cl.r_c
    x_hi = math.hypot(h, d_hi)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= h) & (x <= x_hi) & (x > 0)
        xs = np.where(inside, x, h + 1.0)
        if cl.kind == "thomas":
            s2 = cl.sigma**2
            base = (xs / s2) * np.exp(0.5 * (h * h - xs * xs) / s2)
        else:
            base = 2.0 * xs / cl.r_c**2
        out = np.where(inside, base, 0.0)
        return float(out) if out.ndim == 0 else out

    def ccdf(x):
        x = np.asarray(x, dtype=float)
        d = np.sqrt(np.maximum(x * x - h * h, 0.0))
        out = np.where(x <= h, 1.0, ground_offset_ccdf(d, cl))
        out = np.where(x > x_hi, 0.0, out)
        return float(out) if out.ndim == 0 else out

    return DistanceLaw(tier="cluster", state=None, support=(h, x_hi),
                       occur_prob=1.0, pdf=pdf, ccdf=ccdf, effective_hi=x_hi)


# -- PPP tier laws ---------------------------------------------------------

def _ppp_law(tier_name, density, lo, p_state_fn, trunc, state):
    """Nearest-point law of a state-thinned planar PPP seen in 3D distance.

    lo is the minimum possible 3D distance (UAV height, or 0 for ground
    stations); the state-thinning intensity at distance t is
    2*pi*density*t*p_state(t).
    """
    if density <= 0:
        # degenerate: the tier never offers a point
        one = lambda x: np.ones_like(np.asarray(x, dtype=float))
        zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
        return DistanceLaw(tier=tier_name, state=state, support=(lo, trunc),
                           occur_prob=0.0, pdf=zero, ccdf=one,
                           void_prob=lambda x: np.ones_like(np.asarray(x, dtype=float)),
                           effective_hi=trunc)

    # the state probability changes fastest just above the height floor
    close_hi = min(lo + 100.0, trunc)
    near_hi = min(lo + 3000.0, trunc)
    edges = np.concatenate([
        np.linspace(lo, close_hi, 401),
        np.linspace(close_hi, near_hi, 1201)[1:] if near_hi > close_hi else [],
        np.geomspace(near_hi, trunc, 241)[1:] if trunc > near_hi else [],
    ])
    masses = _cumulative_panels(lambda t: TWO_PI * density * t * p_state_fn(t), edges)
    lam = np.concatenate([[0.0], np.cumsum(masses)])
    # Hermite with the exact intensity as slope: keeps -d/dx ccdf == pdf
    lam_interp = CubicHermiteSpline(
        edges, lam, TWO_PI * density * edges * p_state_fn(edges),
        extrapolate=False)
    lam_end = float(lam[-1])
    void_end = math.exp(-lam_end) if lam_end < 700 else 0.0
    occur = 1.0 - void_end
    # effective upper edge: where the remaining conditional mass is ~0
    with np.errstate(under="ignore"):
        cond_tail = (np.exp(-np.minimum(lam, 700.0)) - void_end) / occur
    dead = np.flatnonzero(cond_tail < 1e-14)
    eff_hi = float(edges[dead[0]]) if dead.size else trunc

    def lam_of(x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, lo, trunc)
        return np.where(x <= lo, 0.0, np.where(x >= trunc, lam_end, lam_interp(xc)))

    def void_prob(x):
        out = np.exp(-lam_of(x))
        return float(out) if np.ndim(out) == 0 else out

    def ccdf(x):
        out = np.clip((np.exp(-lam_of(x)) - void_end) / occur, 0.0, 1.0)
        return float(out) if np.ndim(out) == 0 else out

    def pdf(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= lo) & (x <= trunc)
        xs = np.where(inside, x, lo + 1.0)
        val = TWO_PI * density * xs * p_state_fn(xs) * np.exp(-lam_of(xs)) / occur
        out = np.where(inside, val, 0.0)
        return float(out) if out.ndim == 0 else out

    return DistanceLaw(tier=tier_name, state=state, support=(lo, math.inf),
                       occur_prob=occur, pdf=pdf, ccdf=ccdf,
                       void_prob=void_prob, effective_hi=eff_hi)


def uav_ppp_laws(cfg: NetworkConfig, density: Optional[float] = None,
                 height: Optional[float] = None, name: str = "uav"):
    """Nearest LOS/NLOS UAV laws for one PPP UAV tier."""
    lam = cfg.lambda_u if density is None else density
    h = cfg.height if height is None else height
    trunc = cfg.settings.trunc_radius
    laws = {}
    for state in STATES:
        if state.is_los:
            p_fn = lambda t: los_prob_a2g(t, h, cfg.env_b, cfg.env_c)
        else:
            p_fn = lambda t: 1.0 - los_prob_a2g(t, h, cfg.env_b, cfg.env_c)
        laws[state] = _ppp_law(name, lam, h, p_fn, trunc, state)
    return laws


def gbs_laws(cfg: NetworkConfig, density: Optional[float] = None):
    """Nearest LOS/NLOS ground-station laws."""
    lam = cfg.lambda_g if density is None else density
    trunc = cfg.settings.trunc_radius
    laws = {}
    for state in STATES:
        if state.is_los:
            p_fn = lambda t: los_prob_g2g(t, cfg.epsilon)
        else:
            p_fn = lambda t: 1.0 - los_prob_g2g(t, cfg.epsilon)
        laws[state] = _ppp_law("gbs", lam, 0.0, p_fn, trunc, state)
    return laws


def law_R0(cfg: NetworkConfig):
    """Cluster-center distance laws: per-state dict plus the combined law."""
    per_state = cluster_laws(cfg)
    return per_state, cluster_combined_law(cfg)


def law_RU(cfg: NetworkConfig):
    return uav_ppp_laws(cfg)


def law_RG(cfg: NetworkConfig):
    return gbs_laws(cfg)


# -- distance to a foreign cluster center ----------------------------------

def cluster_offset_pdf(v, w, cluster: ClusterSpec):
    """Conditional density of the ground distance from a UE to a point at
    ground distance w from the UE's own cluster center.

    Thomas: Rician with scale sigma (stable against large v*w/sigma^2
    through the scaled Bessel form). Matern: arc-length form with the
    inner-disc plateau.
    """
    v = np.asarray(v, dtype=float)
    w = float(w)
    if cluster.kind == "thomas":
        s2 = cluster.sigma**2
        z = v * w / s2
        out = (v / s2) * bessel_i0(z, scaled=True) * np.exp(-0.5 * (v - w) ** 2 / s2)
        return out if out.ndim else float(out)
    r_c = cluster.r_c
    out = np.zeros_like(v)
    if w < r_c:
        inner = (v >= 0) & (v < r_c - w)
        out = np.where(inner, 2.0 * v / r_c**2, out)
    ring = (v >= abs(r_c - w)) & (v <= r_c + w) & (v > 0)
    if np.any(ring):
        with np.errstate(divide="ignore", invalid="ignore"):
            arg = np.where(ring, (v * v + w * w - r_c * r_c) / np.maximum(2.0 * v * w, 1e-300), 0.0)
        arg = np.clip(arg, -1.0, 1.0)
        out = np.where(ring, (2.0 * v / (math.pi * r_c**2)) * np.arccos(arg), out)
    return out if out.ndim else float(out)


def law_RUU(x, w, cfg: NetworkConfig, height: Optional[float] = None):
    """Conditional density of the 3D distance from a UE to a foreign
    cluster-center UAV whose own center sits at ground distance w."""
    h = cfg.height if height is None else height
    x = np.asarray(x, dtype=float)
    valid = x > h
    xs = np.where(valid, x, h + 1.0)
    v = np.sqrt(np.maximum(xs * xs - h * h, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        lift = np.where(v > 0, xs / np.maximum(v, 1e-300), 0.0)
    out = np.where(valid, lift * cluster_offset_pdf(v, w, cfg.cluster), 0.0)
    return float(out) if out.ndim == 0 else out


def window_radius(density: float, scale: float) -> float:
    """Interference horizon shared by the analytical truncation and the
    simulation window: ten mean point spacings, with cluster-scale and
    absolute floors. Far-side interference is excluded identically on
    both sides (and its mean is reported by the simulator)."""
    if density <= 0:
        return max(10.0 * scale, 500.0)
    return max(10.0 / math.sqrt(density), 10.0 * scale, 500.0)


# -- samplers ----------------------------------------------------------------

def sample_ppp_disk(density, radius, rng):
    """Homogeneous PPP on a disc: returns an (n, 2) array of positions."""
    if density < 0 or radius <= 0:
        raise ValueError("density must be >= 0 and radius > 0")
    n = rng.poisson(density * math.pi * radius * radius)
    r = radius * np.sqrt(rng.random(n))
    phi = rng.random(n) * TWO_PI
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def sample_cluster_offset(cluster: ClusterSpec, rng, size=None):
    """2D offset of a UE from its cluster center."""
    scalar = size is None
    n = 1 if scalar else int(size)
    if cluster.kind == "thomas":
        pts = rng.normal(0.0, cluster.sigma, size=(n, 2))
    else:
        r = cluster.r_c * np.sqrt(rng.random(n))
        phi = rng.random(n) * TWO_PI
        pts = np.column_stack([r * np.cos(phi), r * np.sin(phi)])
    return pts[0] if scalar else pts
