"""Empirical CDFs, KS distance, distance-binned means and outage percentiles.

Everything works on SINR values in dB.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class EmptySampleError(ValueError):
    pass


@dataclass(frozen=True)
class EmpiricalCdf:
    values: np.ndarray = field(repr=False)  # sorted

    def __post_init__(self):
        if len(self.values) == 0:
            raise EmptySampleError("empirical CDF needs at least one sample")

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, x):
        """Fraction of samples <= x (right-continuous)."""
        return np.searchsorted(self.values, x, side="right") / len(self.values)

    query = __call__

    def steps(self):
        """Distinct support points and the CDF value reached at each."""
        v, counts = np.unique(self.values, return_counts=True)
        return v, np.cumsum(counts) / len(self.values)

    def quantile(self, q: float) -> float:
        """Generalized inverse inf{x : F(x) >= q}."""
        if not 0 < q < 1:
            raise ValueError("q must be in (0, 1)")
        k = int(np.ceil(q * len(self.values))) - 1
        return float(self.values[max(k, 0)])


def empirical_cdf(samples) -> EmpiricalCdf:
    a = np.asarray(samples, dtype=float).ravel()
    if a.size == 0:
        raise EmptySampleError("empirical CDF needs at least one sample")
    if not np.all(np.isfinite(a)):
        raise ValueError("samples must be finite")
    return EmpiricalCdf(np.sort(a))


def ks_distance(a: EmpiricalCdf, b: EmpiricalCdf) -> float:
    """sup_x |F_a(x) - F_b(x)| over the pooled support."""
    x = np.concatenate([a.values, b.values])
    return float(np.max(np.abs(a(x) - b(x))))


def outage_percentile(cdf: EmpiricalCdf, q: float) -> float:
    """SINR (dB) below which a fraction ``q`` of positions fall."""
    return cdf.quantile(q)


@dataclass
class BinnedMean:
    edges: np.ndarray
    mean: np.ndarray
    count: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def empty(self) -> np.ndarray:
        return self.count == 0


def mean_sinr_vs_distance(distance, sinr_db, edges) -> BinnedMean:
    """Arithmetic mean of dB values in each distance bin ``[e_k, e_k+1)``.

    The last bin is closed on the right. Empty bins get NaN and are flagged.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be strictly increasing")
    d = np.asarray(distance, dtype=float)
    s = np.asarray(sinr_db, dtype=float)
    idx = np.searchsorted(edges, d, side="right") - 1
    idx[d == edges[-1]] = len(edges) - 2
    ok = (idx >= 0) & (idx < len(edges) - 1)
    nb = len(edges) - 1
    count = np.bincount(idx[ok], minlength=nb)
    total = np.bincount(idx[ok], weights=s[ok], minlength=nb)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(count > 0, total / np.maximum(count, 1), np.nan)
    return BinnedMean(edges=edges, mean=mean, count=count)


def dkw_epsilon(n: int, alpha: float = 0.01) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width at confidence 1 - alpha."""
    return float(np.sqrt(np.log(2.0 / alpha) / (2.0 * n)))


def ks_critical(n: int, m: int, alpha: float = 0.05) -> float:
    """Asymptotic two-sample KS critical value."""
    c = np.sqrt(-0.5 * np.log(alpha / 2.0))
    return float(c * np.sqrt((n + m) / (n * m)))
