"""Physical-layer kernel: blockage, path loss, antenna gains, fading.

Shared by the analytical modules and the Monte Carlo simulator so that
both sides evaluate exactly the same link model.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .config import AntennaPattern, NetworkConfig, TWO_PI


class LinkState(enum.Enum):
    LOS = "los"
    NLOS = "nlos"

    @property
    def is_los(self) -> bool:
        return self is LinkState.LOS


STATES = (LinkState.LOS, LinkState.NLOS)


@dataclass(frozen=True)
class GainLevel:
    gain: float
    prob: float


def los_prob_a2g(r, height, env_b, env_c):
    """LOS probability of an air-to-ground link of 3D length r.

    Logistic in the elevation angle (degrees): 1/(1 + C exp(-B(theta-C))).
    Accepts arrays; r below the UAV height (beyond fp noise) is a domain
    error since no such link exists.
    """
    r = np.asarray(r, dtype=float)
    if height < 0:
        raise ValueError("height must be >= 0")
    if np.any(r < height * (1.0 - 1e-9)):
        raise ValueError("3D distance cannot be smaller than the UAV height")
    if height == 0.0:
        theta = np.zeros_like(r)
    else:
        ratio = np.clip(height / np.maximum(r, height), 0.0, 1.0)
        theta = np.degrees(np.arcsin(ratio))
    out = 1.0 / (1.0 + env_c * np.exp(-env_b * (theta - env_c)))
    return float(out) if out.ndim == 0 else out


def los_prob_g2g(r, epsilon):
    """LOS probability of a ground link: exp(-epsilon * r)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be >= 0")
    out = np.exp(-epsilon * r)
    return float(out) if out.ndim == 0 else out


def path_loss(r, kappa, alpha):
    """Distance loss L = kappa * r^alpha; received power is P*G*h/L."""
    r = np.asarray(r, dtype=float)
    out = kappa * np.power(r, alpha)
    return float(out) if out.ndim == 0 else out


def gain_pmf(antenna: AntennaPattern):
    """Four-level interferer antenna-gain pmf under uniform beam pointing."""
    pb = antenna.theta_b / TWO_PI
    pu = antenna.theta_u / TWO_PI
    levels = [
        GainLevel(antenna.main_b * antenna.main_u, pb * pu),
        GainLevel(antenna.main_b * antenna.side_u, pb * (1.0 - pu)),
        GainLevel(antenna.side_b * antenna.main_u, (1.0 - pb) * pu),
        GainLevel(antenna.side_b * antenna.side_u, (1.0 - pb) * (1.0 - pu)),
    ]
    return levels


def gain_moment(antenna: AntennaPattern, order=1):
    return sum(g.prob * g.gain**order for g in gain_pmf(antenna))


def sample_nakagami(order, rng, size=None):
    """Unit-mean Nakagami power gain: Gamma(order, 1/order)."""
    if order < 1 or int(order) != order:
        raise ValueError("Nakagami order must be a positive integer")
    return rng.gamma(shape=order, scale=1.0 / order, size=size)


# -- Nakagami tail helpers -------------------------------------------------

def nakagami_ccdf(x, order):
    """Exact P(h > x) for h ~ Gamma(order, 1/order)."""
    return special.gammaincc(order, order * np.maximum(np.asarray(x, dtype=float), 0.0))


def nakagami_pdf(x, order):
    x = np.asarray(x, dtype=float)
    n = float(order)
    return np.where(
        x > 0,
        np.exp(n * np.log(n) + (n - 1.0) * np.log(np.maximum(x, 1e-300)) - n * x
               - special.gammaln(n)),
        0.0,
    )


def nakagami_pdf_deriv(x, order):
    """d/dx of the Gamma(order, 1/order) density."""
    x = np.asarray(x, dtype=float)
    n = float(order)
    pdf = nakagami_pdf(x, order)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(x > 0, (n - 1.0) / np.maximum(x, 1e-300) - n, 0.0)
    return pdf * factor


def alzer_eta(order: int) -> float:
    """Tail-matching rate of the alternating-sum bound for Gamma(N, 1/N)."""
    return order * math.factorial(order) ** (-1.0 / order)


def gamma_trick_constant(order: int) -> float:
    """Same constant for the dummy-Gamma indicator series of order N."""
    return alzer_eta(order)


def binomial_coeffs(order: int) -> np.ndarray:
    return np.array([math.comb(order, n) for n in range(order + 1)], dtype=float)
