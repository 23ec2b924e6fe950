"""Reference scenario parameters.

A 75 m square hotspot with 135 users in a 3x3 cluster grid (15 users per
25 m cell), a 300-file catalog cached 20 files per user under Zipf skew 1,
20 MHz of D2D bandwidth at 20 dBm transmit power over a
``37.6 + 36.8 log10(r [m])`` path-loss law with -95 dBm noise, and a 1 Mbps
per-user floor.  Every command and demo starts from these values; flags and
config files override them field by field.
"""

from __future__ import annotations

from .catalog import PopularityModel, build_popularity
from .clusters import ClusterPlan, make_plan
from .geometry import GeometryTable, path_gain_moments
from .rates import RadioParams

__all__ = [
    "HOTSPOT_SIDE_M",
    "N_CLUSTERS",
    "USERS_PER_CLUSTER",
    "N_USERS",
    "N_FILES",
    "CACHE_SIZE",
    "BETA",
    "TX_POWER_DBM",
    "NOISE_DBM",
    "PATH_LOSS_INTERCEPT_DB",
    "ALPHA",
    "BANDWIDTH_HZ",
    "MU_BPS",
    "MIN_PAIRING_DISTANCE_M",
    "SEED",
    "TRIALS",
    "reference_popularity",
    "reference_plan",
    "reference_radio",
    "reference_geometry",
]

HOTSPOT_SIDE_M = 75.0
N_CLUSTERS = 9
USERS_PER_CLUSTER = 15
N_USERS = 135
N_FILES = 300
CACHE_SIZE = 20
BETA = 1.0
TX_POWER_DBM = 20.0
NOISE_DBM = -95.0
PATH_LOSS_INTERCEPT_DB = 37.6
ALPHA = 3.68
BANDWIDTH_HZ = 20e6
MU_BPS = 1e6
MIN_PAIRING_DISTANCE_M = 1.0
SEED = 20230817
TRIALS = 10_000


def reference_popularity(beta: float = BETA) -> PopularityModel:
    return build_popularity(N_FILES, CACHE_SIZE, beta)


def reference_plan() -> ClusterPlan:
    return make_plan(HOTSPOT_SIDE_M, N_CLUSTERS, USERS_PER_CLUSTER)


def reference_radio() -> RadioParams:
    return RadioParams(
        tx_power_dbm=TX_POWER_DBM,
        noise_dbm=NOISE_DBM,
        path_loss_intercept_db=PATH_LOSS_INTERCEPT_DB,
        alpha=ALPHA,
        bandwidth_hz=BANDWIDTH_HZ,
    )


def reference_geometry(
    alpha: float = ALPHA,
    min_distance_m: float = MIN_PAIRING_DISTANCE_M,
    cluster_side_m: float | None = None,
) -> GeometryTable:
    if cluster_side_m is None:
        cluster_side_m = reference_plan().cluster_side_m
    return path_gain_moments(alpha, min_distance_m / cluster_side_m)
