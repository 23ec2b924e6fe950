"""Request-outcome distribution and expected user-class sizes.

Per snapshot, each of the ``M = K * B`` users draws one file group from the
full catalog.  A user is

* cooperative if its group is hit by every cluster (joint transmission
  serves these),
* non-cooperative if its group is cached in-cluster (index ``< K``) but not
  network-wide hit,
* cellular otherwise (group index ``>= K``; only counted, never rated).

The exact expectation of the cooperative count enumerates per-cluster request
compositions once (clusters are exchangeable and independent) and combines
per-group sufficient statistics; everything runs in exact rational arithmetic
on the stored float probabilities so the result is reproducible bit for bit
against brute-force enumeration.  Large instances fall back to a seeded,
chunk-parallel-safe Monte Carlo estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .catalog import PopularityModel, cumulative_cached_prob
from .errors import ConsistencyError, EnumerationBudgetError

__all__ = [
    "RequestConfiguration",
    "PopulationSummary",
    "configuration_probability",
    "coop_count",
    "expected_coop_users_exact",
    "expected_coop_users_mc",
    "expected_cellular_and_noncoop",
]

_MC_CHUNK = 4096  # fixed chunk size; part of the reproducibility contract


@dataclass(frozen=True)
class RequestConfiguration:
    """Counts ``n[i, k]`` of users in cluster ``i`` requesting group ``k``.

    ``counts`` has shape ``(B, group_count)``; every row sums to the cluster
    size ``K``.
    """

    counts: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 2:
            raise ValueError("counts must be a 2-d matrix, got ndim=%d" % counts.ndim)
        if np.any(counts < 0) or not np.issubdtype(counts.dtype, np.integer):
            raise ValueError("counts must be non-negative integers")
        row_sums = counts.sum(axis=1)
        if len(set(row_sums.tolist())) > 1:
            raise ValueError("all clusters must hold the same number of users")
        object.__setattr__(self, "counts", counts)
        counts.setflags(write=False)

    @property
    def n_clusters(self) -> int:
        return self.counts.shape[0]

    @property
    def users_per_cluster(self) -> int:
        return int(self.counts[0].sum())


@dataclass(frozen=True)
class PopulationSummary:
    """Expected user-class sizes.

    ``method`` is ``"exact"`` or ``"monte-carlo"``; ``std_error`` is the
    standard error of ``coop_mean`` (0 for exact, ``inf`` when a single
    Monte Carlo trial makes it undefined).
    """

    coop_mean: float
    cellular_mean: float
    noncoop_mean: float
    method: str
    std_error: float


def configuration_probability(config: RequestConfiguration, model: PopularityModel) -> float:
    """Probability of one full request configuration.

    Clusters draw independently, so this is a product of per-cluster
    multinomial masses ``K! * prod_k P_k^n_ik / prod_k n_ik!``.

    Raises
    ------
    ValueError
        If the matrix width disagrees with the catalog's group count.
    """
    counts = config.counts
    if counts.shape[1] != model.group_count:
        raise ValueError(
            "counts has %d group columns, catalog has %d"
            % (counts.shape[1], model.group_count)
        )
    k = config.users_per_cluster
    probs = model.group_probs
    out = 1.0
    for row in counts:
        coeff = math.factorial(k)
        for n in row:
            coeff //= math.factorial(int(n))
        out *= coeff * float(np.prod(probs**row))
    return out


def coop_count(config: RequestConfiguration, users_per_cluster: int) -> int:
    """Number of cooperative users in one configuration.

    A cached group (index ``< users_per_cluster``) contributes all of its
    requesters when every cluster has at least one; otherwise none.
    """
    cached = config.counts[:, :users_per_cluster]
    hit_everywhere = np.all(cached > 0, axis=0)
    return int(cached.sum(axis=0)[hit_everywhere].sum())


def _multichoose(n: int, k: int) -> int:
    """Number of compositions of k into n non-negative parts."""
    return math.comb(n + k - 1, k)


def _compositions(total: int, parts: int):
    """Yield all tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def expected_coop_users_exact(
    model: PopularityModel,
    users_per_cluster: int,
    n_clusters: int,
    budget: int = 10_000_000,
) -> PopulationSummary:
    """Exact expected cooperative-user count by composition enumeration.

    Enumerates the per-cluster composition space once, accumulating for every
    cached group ``k`` the hit probability ``A_k`` and the expected request
    count ``S_k`` as exact rationals; cluster independence and
    exchangeability then give

        coop_mean = B * sum_k S_k * A_k^(B-1).

    Requests to uncached groups are lumped into a single remainder part,
    which is exact (multinomial merging) and keeps the enumeration at
    ``multichoose(K+1, K)`` terms.

    Parameters
    ----------
    model : PopularityModel
    users_per_cluster, n_clusters : int
        ``K`` and ``B``.
    budget : int, optional
        Refuse if ``multichoose(group_count, K) ** B`` exceeds this (the raw
        configuration-space size this computation stands in for).

    Returns
    -------
    PopulationSummary
        With ``method="exact"`` and ``std_error=0``.

    Raises
    ------
    EnumerationBudgetError
        Over budget; use :func:`expected_coop_users_mc` instead.
    """
    k0 = model.group_count
    k, b = users_per_cluster, n_clusters
    if not 1 <= k <= k0:
        raise ValueError("users_per_cluster must be in [1, %d], got %r" % (k0, k))
    if b < 1:
        raise ValueError("n_clusters must be >= 1, got %r" % (b,))
    space = _multichoose(k0, k) ** b
    if space > budget:
        raise EnumerationBudgetError(
            "configuration space holds %d terms (budget %d); use "
            "expected_coop_users_mc for this instance" % (space, budget)
        )

    # Exact rationals of the stored float probabilities.  The remainder part
    # must be the SUM of the uncached entries, not 1 minus the cached sum:
    # the floats do not sum to exactly 1 as rationals, and bit-for-bit
    # agreement with raw outcome enumeration depends on using the same values.
    p = [Fraction(float(x)) for x in model.group_probs]
    parts = p[:k] + ([sum(p[k:], Fraction(0))] if k < k0 else [])
    n_parts = len(parts)

    hit_prob = [Fraction(0)] * k  # A_k
    mean_count = [Fraction(0)] * k  # S_k
    fact_k = math.factorial(k)
    for comp in _compositions(k, n_parts):
        coeff = fact_k
        for n in comp:
            coeff //= math.factorial(n)
        mass = Fraction(coeff)
        for n, prob in zip(comp, parts):
            if n:
                mass *= prob**n
        for g in range(k):
            if comp[g]:
                hit_prob[g] += mass
                mean_count[g] += mass * comp[g]

    nc = b * sum(
        (s * a ** (b - 1) for s, a in zip(mean_count, hit_prob)), Fraction(0)
    )
    coop_mean = float(nc)
    m = k * b
    cellular_mean, noncoop_mean = expected_cellular_and_noncoop(
        model, m, k, coop_mean
    )
    return PopulationSummary(
        coop_mean=coop_mean,
        cellular_mean=cellular_mean,
        noncoop_mean=noncoop_mean,
        method="exact",
        std_error=0.0,
    )


def expected_coop_users_mc(
    model: PopularityModel,
    users_per_cluster: int,
    n_clusters: int,
    trials: int,
    seed: int,
) -> PopulationSummary:
    """Monte Carlo estimate of the expected user-class sizes.

    Draws per-user requests i.i.d. from the full catalog (uncached groups
    included, so the cellular count comes from the same sampler), computes
    the cooperative count per trial, and averages.

    Trials are processed in fixed-size chunks, each seeded as
    ``default_rng([seed, chunk_index])``, so any parallel or out-of-order
    chunk execution reproduces the same stream.

    Parameters
    ----------
    trials : int
        Number of independent snapshots, ``>= 1``.
    seed : int
        Campaign seed.

    Returns
    -------
    PopulationSummary
        ``method="monte-carlo"``; ``std_error`` is the standard error of the
        cooperative mean (``inf`` for a single trial).
    """
    k0 = model.group_count
    k, b = users_per_cluster, n_clusters
    if not 1 <= k <= k0:
        raise ValueError("users_per_cluster must be in [1, %d], got %r" % (k0, k))
    if trials < 1:
        raise ValueError("trials must be >= 1, got %r" % (trials,))

    cdf = np.cumsum(model.group_probs)
    coop = np.empty(trials, dtype=np.int64)
    cellular = np.empty(trials, dtype=np.int64)
    for chunk_index, start in enumerate(range(0, trials, _MC_CHUNK)):
        n = min(_MC_CHUNK, trials - start)
        rng = np.random.default_rng([seed, chunk_index])
        u = rng.random((n, b, k))
        draws = np.minimum(np.searchsorted(cdf, u, side="right"), k0 - 1)
        nc = np.zeros(n, dtype=np.int64)
        for g in range(k):
            counts = (draws == g).sum(axis=2)
            nc += np.where(np.all(counts > 0, axis=1), counts.sum(axis=1), 0)
        coop[start : start + n] = nc
        cellular[start : start + n] = (draws >= k).sum(axis=(1, 2))

    coop_mean = float(coop.mean())
    if trials == 1:
        std_error = math.inf
    else:
        std_error = float(coop.std(ddof=1) / math.sqrt(trials))
    m = k * b
    cellular_mean = float(cellular.mean())
    return PopulationSummary(
        coop_mean=coop_mean,
        cellular_mean=cellular_mean,
        noncoop_mean=m - coop_mean - cellular_mean,
        method="monte-carlo",
        std_error=std_error,
    )


def expected_cellular_and_noncoop(
    model: PopularityModel,
    n_users: int,
    users_per_cluster: int,
    coop_mean: float,
) -> tuple[float, float]:
    """Expected cellular and non-cooperative counts given the coop mean.

    The cellular count is binomial with success probability equal to the
    uncached tail mass, so its mean is closed-form; the non-cooperative mean
    is the remainder.

    Raises
    ------
    ConsistencyError
        If the implied non-cooperative mean is negative beyond roundoff,
        which signals an inconsistent ``coop_mean``.
    """
    if not 0.0 <= coop_mean <= n_users:
        raise ValueError(
            "coop_mean must be in [0, n_users], got %r" % (coop_mean,)
        )
    cellular_mean = n_users * (1.0 - cumulative_cached_prob(model, users_per_cluster))
    noncoop_mean = n_users - coop_mean - cellular_mean
    if noncoop_mean < -1e-9 * max(1.0, float(n_users)):
        raise ConsistencyError(
            "negative non-cooperative mean (%r): coop_mean inconsistent with "
            "the catalog" % (noncoop_mean,)
        )
    return cellular_mean, max(0.0, noncoop_mean)
