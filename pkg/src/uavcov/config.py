"""Scenario parameters, unit conversions and validation.

All internal math runs in linear SI units (watts, meters, hertz, seconds).
dB / dBm values appear only at I/O boundaries: the structured config file
and the CLI take powers in dBm and thresholds in dB, and everything is
converted on load.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import yaml

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Raised when a scenario description violates an invariant.

    Carries the full list of violations in ``errors``.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power in dBm to watts."""
    return 10.0 ** (p_dbm / 10.0) * 1e-3


def watts_to_dbm(p_w: float) -> float:
    """Convert a power in watts to dBm."""
    if p_w <= 0.0:
        return -math.inf
    return 10.0 * math.log10(p_w * 1e3)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0.0:
        return -math.inf
    return 10.0 * math.log10(x)


def thermal_noise_power(bandwidth_hz: float, noise_figure_db: float = 10.0) -> float:
    """Thermal noise power in watts over ``bandwidth_hz``.

    -174 dBm/Hz + 10*log10(W) + NF, converted to watts.
    """
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    noise_dbm = -174.0 + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return dbm_to_watts(noise_dbm)


@dataclass(frozen=True)
class ClusterSpec:
    """User-cluster geometry around each UAV ground projection.

    kind='thomas' scatters users with an isotropic Gaussian of standard
    deviation ``sigma``; kind='matern' scatters them uniformly on a disc
    of radius ``r_c``. Exactly one of the two scale fields is active.
    """

    kind: str = "thomas"
    sigma: float = 10.0
    r_c: float = 20.0

    @property
    def scale(self) -> float:
        return self.sigma if self.kind == "thomas" else self.r_c

    def validate(self):
        errors = []
        if self.kind not in ("thomas", "matern"):
            errors.append(f"cluster kind {self.kind!r} not in {{thomas, matern}}")
        if self.kind == "thomas" and not self.sigma > 0:
            errors.append("thomas cluster requires sigma > 0")
        if self.kind == "matern" and not self.r_c > 0:
            errors.append("matern cluster requires r_c > 0")
        return errors


@dataclass(frozen=True)
class AntennaPattern:
    """Sectored antenna model: main/side lobe gains and main-lobe widths.

    Gains are linear. ``main_b``/``side_b`` is the base-station side,
    ``main_u``/``side_u`` the user side; ``theta_b``/``theta_u`` are the
    main-lobe beamwidths in radians. The serving link is assumed
    perfectly aligned (gain main_b*main_u); interferer gains are drawn
    from the four-level pmf induced by uniform beam orientations.
    """

    main_b: float = 10.0 ** 0.5
    side_b: float = 0.02
    main_u: float = 10.0 ** 0.5
    side_u: float = 0.02
    theta_b: float = math.radians(5.0)
    theta_u: float = math.radians(5.0)

    @property
    def g0(self) -> float:
        """Serving-link gain (both main lobes aligned)."""
        return self.main_b * self.main_u

    def validate(self):
        errors = []
        if not (self.main_b >= self.side_b > 0):
            errors.append("require main_b >= side_b > 0")
        if not (self.main_u >= self.side_u > 0):
            errors.append("require main_u >= side_u > 0")
        for name, th in (("theta_b", self.theta_b), ("theta_u", self.theta_u)):
            if not (0 < th <= TWO_PI):
                errors.append(f"{name} must lie in (0, 2*pi]")
        return errors


@dataclass(frozen=True)
class UavTier:
    """One extra UAV tier for the multi-tier multi-height model."""

    density: float
    power: float
    bias: float
    height: float

    def validate(self, label="tier"):
        errors = []
        if not self.density > 0:
            errors.append(f"{label}: density must be > 0")
        if not self.power > 0:
            errors.append(f"{label}: power must be > 0")
        if not self.bias > 0:
            errors.append(f"{label}: bias must be > 0")
        if self.height < 0:
            errors.append(f"{label}: height must be >= 0")
        return errors


@dataclass(frozen=True)
class AnalysisSettings:
    """Numerical knobs shared by the analytical and Monte Carlo paths."""

    gamma_order_n: int = 5          # order of the normalized-Gamma indicator series
    quad_rel_tol: float = 1e-6      # outer integrals
    quad_abs_tol: float = 1e-10
    inner_rel_tol: float = 1e-8     # inner (nested) integrals
    inner_abs_tol: float = 1e-12
    trunc_radius: float = 30000.0   # analytical truncation of slow interference tails
    mc_trials: int = 100_000
    mc_seed: int = 1

    def validate(self):
        errors = []
        if not (1 <= self.gamma_order_n <= 10):
            errors.append("gamma_order_n must be an integer in [1, 10]")
        for name in ("quad_rel_tol", "quad_abs_tol", "inner_rel_tol", "inner_abs_tol"):
            if not getattr(self, name) > 0:
                errors.append(f"{name} must be > 0")
        if not self.trunc_radius > 0:
            errors.append("trunc_radius must be > 0")
        if self.mc_trials < 1:
            errors.append("mc_trials must be >= 1")
        return errors


@dataclass(frozen=True)
class NetworkConfig:
    """Full description of one deployment scenario.

    Defaults reproduce the reference parameter set: UAV density 1e-4 /m^2,
    ground-station density 1e-5 /m^2, 24/34 dBm transmit powers, 1 dBm
    uplink UE power, 50 m UAV height, dense-urban air-to-ground LOS
    constants, exponential ground blockage with 1/eps = 141.4 m, 100 MHz
    bandwidth, Nakagami orders 2 (LOS) / 3 (NLOS) and unit frame length.

    Note on the path-loss intercepts: the LOS intercept must be the
    smaller of the two for short LOS links to be the strong ones; with
    the pairing inverted, every trend that motivates lifting the UAVs
    off the ground (association moving toward UAVs, the interior-optimum
    height) disappears. kappa_l/kappa_n defaults are paired accordingly.
    """

    # deployment
    lambda_u: float = 1e-4
    lambda_g: float = 1e-5
    p_u: float = dbm_to_watts(24.0)
    p_g: float = dbm_to_watts(34.0)
    b_u: float = 1.0
    b_g: float = 1.0
    height: float = 50.0
    cluster: ClusterSpec = field(default_factory=ClusterSpec)

    # channel
    env_b: float = 0.136
    env_c: float = 11.95
    epsilon: float = 1.0 / 141.4
    kappa_l: float = 10.0 ** 0.27
    kappa_n: float = 10.0 ** 3.08
    alpha_l: float = 2.09
    alpha_n: float = 3.75
    antenna: AntennaPattern = field(default_factory=AntennaPattern)
    n_l: int = 2
    n_n: int = 3

    # noise
    sigma_n2: float = thermal_noise_power(100e6, 10.0)
    sigma_c2: float = db_to_linear(-80.0)

    # frame structure / SWIPT
    t_frame: float = 1.0
    tau: float = 1.0
    rho: float = 0.5

    # uplink
    p_t_ul: float = dbm_to_watts(1.0)
    bandwidth: float = 100e6

    # optional extra UAV tiers (multi-tier multi-height model); tier 0's
    # cluster is parented on parent_tier (0 = the base UAV tier).
    tiers: tuple = ()
    parent_tier: int = 0

    settings: AnalysisSettings = field(default_factory=AnalysisSettings)

    # -- validation ------------------------------------------------------

    def validation_errors(self):
        errors = []
        for name in ("lambda_u", "lambda_g", "p_u", "p_g", "b_u", "b_g",
                     "kappa_l", "kappa_n", "alpha_l", "alpha_n",
                     "sigma_n2", "sigma_c2", "t_frame", "p_t_ul", "bandwidth"):
            if not getattr(self, name) > 0:
                errors.append(f"{name} must be > 0")
        if self.height < 0:
            errors.append("height must be >= 0")
        if not (0.0 <= self.rho <= 1.0):
            errors.append(f"rho out of [0,1]: {self.rho}")
        if not (0.0 <= self.tau <= self.t_frame):
            errors.append(f"tau out of [0, t_frame]: {self.tau}")
        for n_name in ("n_l", "n_n"):
            n = getattr(self, n_name)
            if not (isinstance(n, int) and n >= 1):
                errors.append(f"{n_name} must be an integer >= 1")
        if not (0 < self.env_b and 0 < self.env_c):
            errors.append("env_b and env_c must be > 0")
        if not self.epsilon > 0:
            errors.append("epsilon must be > 0")
        errors += self.cluster.validate()
        errors += self.antenna.validate()
        errors += self.settings.validate()
        for i, tier in enumerate(self.tiers):
            errors += tier.validate(label=f"tiers[{i}]")
        if self.tiers and not (0 <= self.parent_tier <= len(self.tiers)):
            errors.append("parent_tier out of range")
        scale = self.cluster.scale
        if self.settings.trunc_radius < 10 * max(scale, self.height, 1.0):
            errors.append("trunc_radius too small for the scenario geometry")
        return errors

    def validated(self) -> "NetworkConfig":
        errors = self.validation_errors()
        if errors:
            raise ConfigError(errors)
        return self

    # -- convenience -----------------------------------------------------

    def kappa(self, los: bool) -> float:
        return self.kappa_l if los else self.kappa_n

    def alpha(self, los: bool) -> float:
        return self.alpha_l if los else self.alpha_n

    def nakagami(self, los: bool) -> int:
        return self.n_l if los else self.n_n

    def with_cluster(self, kind: str, scale: float) -> "NetworkConfig":
        if kind == "thomas":
            return replace(self, cluster=replace(self.cluster, kind="thomas", sigma=scale))
        return replace(self, cluster=replace(self.cluster, kind="matern", r_c=scale))

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        """Flat dict with powers in dBm, mirroring the config-file schema."""
        d = {
            "lambda_u": self.lambda_u,
            "lambda_g": self.lambda_g,
            "p_u_dbm": watts_to_dbm(self.p_u),
            "p_g_dbm": watts_to_dbm(self.p_g),
            "b_u": self.b_u,
            "b_g": self.b_g,
            "height": self.height,
            "cluster_kind": self.cluster.kind,
            "cluster_sigma": self.cluster.sigma,
            "cluster_r_c": self.cluster.r_c,
            "env_b": self.env_b,
            "env_c": self.env_c,
            "epsilon": self.epsilon,
            "kappa_l": self.kappa_l,
            "kappa_n": self.kappa_n,
            "alpha_l": self.alpha_l,
            "alpha_n": self.alpha_n,
            "ant_main_b": self.antenna.main_b,
            "ant_side_b": self.antenna.side_b,
            "ant_main_u": self.antenna.main_u,
            "ant_side_u": self.antenna.side_u,
            "ant_theta_b": self.antenna.theta_b,
            "ant_theta_u": self.antenna.theta_u,
            "n_l": self.n_l,
            "n_n": self.n_n,
            "sigma_n2_dbm": watts_to_dbm(self.sigma_n2),
            "sigma_c2_db": linear_to_db(self.sigma_c2),
            "t_frame": self.t_frame,
            "tau": self.tau,
            "rho": self.rho,
            "p_t_ul_dbm": watts_to_dbm(self.p_t_ul),
            "bandwidth": self.bandwidth,
            "parent_tier": self.parent_tier,
            "gamma_order_n": self.settings.gamma_order_n,
            "quad_rel_tol": self.settings.quad_rel_tol,
            "trunc_radius": self.settings.trunc_radius,
            "mc_trials": self.settings.mc_trials,
            "mc_seed": self.settings.mc_seed,
        }
        if self.tiers:
            d["tiers"] = [
                {"density": t.density, "power_dbm": watts_to_dbm(t.power),
                 "bias": t.bias, "height": t.height}
                for t in self.tiers
            ]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkConfig":
        base = cls()
        known = set(base.to_dict().keys()) | {"tiers"}
        unknown = set(d.keys()) - known
        if unknown:
            raise ConfigError([f"unknown config key {k!r}" for k in sorted(unknown)])

        def get(key, default):
            return d.get(key, default)

        cluster = ClusterSpec(
            kind=get("cluster_kind", base.cluster.kind),
            sigma=float(get("cluster_sigma", base.cluster.sigma)),
            r_c=float(get("cluster_r_c", base.cluster.r_c)),
        )
        antenna = AntennaPattern(
            main_b=float(get("ant_main_b", base.antenna.main_b)),
            side_b=float(get("ant_side_b", base.antenna.side_b)),
            main_u=float(get("ant_main_u", base.antenna.main_u)),
            side_u=float(get("ant_side_u", base.antenna.side_u)),
            theta_b=float(get("ant_theta_b", base.antenna.theta_b)),
            theta_u=float(get("ant_theta_u", base.antenna.theta_u)),
        )
        settings = AnalysisSettings(
            gamma_order_n=int(get("gamma_order_n", base.settings.gamma_order_n)),
            quad_rel_tol=float(get("quad_rel_tol", base.settings.quad_rel_tol)),
            trunc_radius=float(get("trunc_radius", base.settings.trunc_radius)),
            mc_trials=int(get("mc_trials", base.settings.mc_trials)),
            mc_seed=int(get("mc_seed", base.settings.mc_seed)),
        )
        tiers = tuple(
            UavTier(density=float(t["density"]), power=dbm_to_watts(float(t["power_dbm"])),
                    bias=float(t["bias"]), height=float(t["height"]))
            for t in d.get("tiers", [])
        )
        cfg = cls(
            lambda_u=float(get("lambda_u", base.lambda_u)),
            lambda_g=float(get("lambda_g", base.lambda_g)),
            p_u=dbm_to_watts(float(get("p_u_dbm", watts_to_dbm(base.p_u)))),
            p_g=dbm_to_watts(float(get("p_g_dbm", watts_to_dbm(base.p_g)))),
            b_u=float(get("b_u", base.b_u)),
            b_g=float(get("b_g", base.b_g)),
            height=float(get("height", base.height)),
            cluster=cluster,
            env_b=float(get("env_b", base.env_b)),
            env_c=float(get("env_c", base.env_c)),
            epsilon=float(get("epsilon", base.epsilon)),
            kappa_l=float(get("kappa_l", base.kappa_l)),
            kappa_n=float(get("kappa_n", base.kappa_n)),
            alpha_l=float(get("alpha_l", base.alpha_l)),
            alpha_n=float(get("alpha_n", base.alpha_n)),
            antenna=antenna,
            n_l=int(get("n_l", base.n_l)),
            n_n=int(get("n_n", base.n_n)),
            sigma_n2=dbm_to_watts(float(get("sigma_n2_dbm", watts_to_dbm(base.sigma_n2)))),
            sigma_c2=db_to_linear(float(get("sigma_c2_db", linear_to_db(base.sigma_c2)))),
            t_frame=float(get("t_frame", base.t_frame)),
            tau=float(get("tau", base.tau)),
            rho=float(get("rho", base.rho)),
            p_t_ul=dbm_to_watts(float(get("p_t_ul_dbm", watts_to_dbm(base.p_t_ul)))),
            bandwidth=float(get("bandwidth", base.bandwidth)),
            tiers=tiers,
            parent_tier=int(get("parent_tier", base.parent_tier)),
            settings=settings,
        )
        return cfg.validated()


def load_config(path: str) -> NetworkConfig:
    """Load and validate a scenario from a YAML (or JSON) file."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError([f"config file {path} must contain a mapping"])
    return NetworkConfig.from_dict(data)


def save_config(cfg: NetworkConfig, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=True)


def validate_config(cfg: NetworkConfig) -> NetworkConfig:
    """Check every invariant; raise ConfigError listing all violations."""
    return cfg.validated()
