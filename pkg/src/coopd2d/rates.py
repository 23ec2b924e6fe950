"""Closed-form average link rates and network/user throughputs.

Two first-order rate approximations anchor everything downstream:

* non-cooperative D2D link, interference-limited:
  ``rn = log2(q1) - log2(q2) - 3``  (equivalently ``log2(1 + s / (8 q2))``
  with ``s`` the own-cell moment), independent of transmit power;
* cooperative joint transmission from the 9-cell neighborhood with
  zero-forcing precoding:
  ``rc = log2(1 + P * D^-alpha * G0 * q1 / (B * sigma^2))`` where ``G0`` is
  the linear path gain at 1 m.

Both replace an average of ``log2(1 + X)`` by ``log2(1 + E[X])``; the
simulator exists to quantify that substitution, so no correction is applied
here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DegeneratePopulationError
from .geometry import GeometryTable

__all__ = [
    "RadioParams",
    "RateSummary",
    "dbm_to_watts",
    "noncoop_link_rate",
    "coop_link_rate",
    "network_throughput",
    "user_throughputs",
]


def dbm_to_watts(dbm: float) -> float:
    """Exact dBm to watts conversion, ``10^((dbm - 30) / 10)``."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class RadioParams:
    """Radio-layer parameters.

    Attributes
    ----------
    tx_power_dbm : float
        Per-transmitter power ``P``.
    noise_dbm : float
        Noise power ``sigma^2`` over the full band.
    path_loss_intercept_db : float
        Attenuation at 1 m; with the ``37.6 + 36.8 log10(r [m])`` law this is
        37.6 dB and ``alpha = 3.68``.
    alpha : float
        Path-loss exponent (slope in dB/decade divided by 10).
    bandwidth_hz : float
        D2D band ``W``.
    """

    tx_power_dbm: float
    noise_dbm: float
    path_loss_intercept_db: float
    alpha: float
    bandwidth_hz: float

    @property
    def tx_power_w(self) -> float:
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def noise_w(self) -> float:
        return dbm_to_watts(self.noise_dbm)

    @property
    def intercept_linear(self) -> float:
        """Linear gain at 1 m, ``10^(-intercept_db / 10)``."""
        return 10.0 ** (-self.path_loss_intercept_db / 10.0)

    def path_gain(self, distance_m):
        """Linear power gain at ``distance_m`` meters."""
        return self.intercept_linear * distance_m ** (-self.alpha)


@dataclass(frozen=True)
class RateSummary:
    """Bundle of the analytic rate quantities for one operating point.

    ``rate_noncoop`` and ``rate_coop`` are spectral efficiencies in
    bits/s/Hz; the three throughputs are in bits/s.
    """

    rate_noncoop: float
    rate_coop: float
    network_throughput: float
    user_coop: float
    user_noncoop: float


def noncoop_link_rate(geom: GeometryTable, clamp: bool = True) -> float:
    """Average spectral efficiency of a non-cooperative D2D link.

    Parameters
    ----------
    geom : GeometryTable
        Truncated moments at the operating ``(alpha, r_min)``.
    clamp : bool, optional
        The first-order formula can go negative for extreme moment ratios;
        by default such values are clamped to 0 (with a warning carrying the
        raw value) since a negative average rate has no downstream meaning.
        Pass ``clamp=False`` to obtain the unclamped value.

    Returns
    -------
    float
        ``log2(q1) - log2(q2) - 3`` bits/s/Hz, clamped at 0 unless disabled.
    """
    value = math.log2(geom.q1) - math.log2(geom.q2) - 3.0
    if value < 0.0:
        warnings.warn(
            "first-order non-cooperative rate is negative (%.6g); clamped to 0 "
            "for throughput use" % value,
            RuntimeWarning,
            stacklevel=2,
        )
        if clamp:
            return 0.0
    return value


def coop_link_rate(
    geom: GeometryTable,
    radio: RadioParams,
    cluster_side_m: float,
    n_clusters: int,
) -> float:
    """Average spectral efficiency of a cooperative (jointly precoded) link.

    The ``B`` per-cluster transmitters jointly serve ``B`` receivers with
    zero-forcing precoding under a sum-power constraint ``B * P`` split
    equally per stream, so each stream sees an average received power of
    ``P`` times the aggregate 9-cell gain moment over ``B``.

    Parameters
    ----------
    geom : GeometryTable
    radio : RadioParams
    cluster_side_m : float
        Physical cluster side ``D`` (the moments are in units of ``D``).
    n_clusters : int
        Number of cooperating clusters ``B >= 1``.

    Returns
    -------
    float
        ``log2(1 + P * D^-alpha * G0 * q1 / (B * sigma^2))`` bits/s/Hz.
    """
    if n_clusters < 1:
        raise ValueError("n_clusters must be >= 1, got %r" % (n_clusters,))
    if not cluster_side_m > 0:
        raise ValueError("cluster_side_m must be positive")
    mean_gain = radio.intercept_linear * cluster_side_m ** (-geom.alpha) * geom.q1
    snr = radio.tx_power_w * mean_gain / (n_clusters * radio.noise_w)
    return math.log2(1.0 + snr)


def network_throughput(
    pc: float, eta: float, rc: float, rn: float, bandwidth_hz: float, n_clusters: int
) -> float:
    """Average aggregate throughput of the D2D tier in bits/s.

    With probability ``pc`` the network has a cooperation opportunity and
    splits the band: fraction ``eta`` to the ``B`` cooperative links at
    ``rc``, the rest to the ``B`` non-cooperative links at ``rn``; otherwise
    everything runs non-cooperatively.  Collecting terms:

        W * B * (pc * eta * rc + (1 - pc * eta) * rn)

    Affine in ``eta`` with slope ``W * B * pc * (rc - rn)``.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must be in [0, 1], got %r" % (eta,))
    if not 0.0 <= pc <= 1.0:
        raise ValueError("pc must be in [0, 1], got %r" % (pc,))
    return bandwidth_hz * n_clusters * (pc * eta * rc + (1.0 - pc * eta) * rn)


def user_throughputs(
    eta: float,
    rc: float,
    rn: float,
    bandwidth_hz: float,
    n_clusters: int,
    nc_bar: float,
    nn_bar: float,
) -> tuple[float, float]:
    """Per-user average throughputs of the two D2D service classes.

    The band share of a class divided by the average number of users sharing
    it (round-robin over the class):

        user_coop    = W * B * eta * rc / nc_bar
        user_noncoop = W * B * (1 - eta) * rn / nn_bar

    Raises
    ------
    DegeneratePopulationError
        If either average user count is not strictly positive; the caller
        should treat the corresponding rate constraint as vacuous instead of
        dividing by zero.
    """
    if nc_bar <= 0.0 or nn_bar <= 0.0:
        raise DegeneratePopulationError(
            "average user counts must be positive (nc_bar=%r, nn_bar=%r)"
            % (nc_bar, nn_bar)
        )
    wb = bandwidth_hz * n_clusters
    return wb * eta * rc / nc_bar, wb * (1.0 - eta) * rn / nn_bar
