"""Coverage analysis for energy-harvesting UAV-assisted mmWave cellular
networks with cluster-distributed users.

Analytical association, energy/SINR/joint coverage, uplink coverage and
throughput optimization, each cross-validated against a built-in Monte
Carlo simulator.
"""

from .config import (AnalysisSettings, AntennaPattern, ClusterSpec,
                     ConfigError, NetworkConfig, UavTier, dbm_to_watts,
                     db_to_linear, linear_to_db, load_config, save_config,
                     thermal_noise_power, validate_config, watts_to_dbm)
from .channel import (GainLevel, LinkState, gain_pmf, los_prob_a2g,
                      los_prob_g2g, path_loss, sample_nakagami)
from .geometry import (DistanceLaw, law_R0, law_RG, law_RU, law_RUU,
                       sample_cluster_offset, sample_ppp_disk)
from .association import (AssociationMatrix, association_probabilities,
                          exclusion_radius, serving_distance_pdf, tier_system)
from .downlink import (CoverageReport, downlink_analysis, energy_coverage,
                       harvested_energy_sample, interference_ccdf, laplace_I0,
                       laplace_Ik, sinr_coverage, sinr_sample,
                       successful_transmission)
from .uplink import (ThroughputResult, UplinkContext, active_probability,
                     average_uplink_throughput, optimize_tau, uplink_laplace,
                     uplink_sinr_coverage)
from .extensions import (NoiseLimitedCase, NoInteriorOptimum,
                         multi_tier_association, multi_tier_stp,
                         noise_limited_stp, optimal_rho, uplink_closed_form,
                         uplink_closed_form_quadrature)
from .montecarlo import (MCDownlinkResult, MCUplinkResult, TrialEstimate,
                         confidence, simulate_downlink, simulate_uplink)

__version__ = "0.1.0"
