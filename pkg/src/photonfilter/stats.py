"""Moments and the Mandel Q parameter of photon-number distributions.

Q = (<n^2> - <n>^2 - <n>) / <n> vanishes for Poissonian light; negative
values down to -1 signal sub-Poissonian statistics with no classical
counterpart.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .field import PhotonDistribution

__all__ = [
    "Classification",
    "DistributionStats",
    "UndefinedQ",
    "classify",
    "moments",
]


class UndefinedQ(ValueError):
    """Mandel Q is undefined for the vacuum (zero mean photon number)."""


class Classification(Enum):
    SUB_POISSONIAN = "sub-poissonian"
    POISSONIAN = "poissonian"
    SUPER_POISSONIAN = "super-poissonian"


@dataclass(frozen=True)
class DistributionStats:
    mean: float
    variance: float
    mandel_q: float


def moments(dist: PhotonDistribution) -> DistributionStats:
    """Mean, variance and Mandel Q of a photon-number distribution."""
    ns = np.arange(dist.probs.size, dtype=float)
    mean = float(ns @ dist.probs)
    if mean == 0.0:
        raise UndefinedQ("mean photon number is zero; Q is undefined")
    variance = float(((ns - mean) ** 2) @ dist.probs)
    return DistributionStats(mean, variance, (variance - mean) / mean)


def classify(stats: DistributionStats, atol: float = 1e-9) -> Classification:
    """Bucket a distribution by its Mandel Q with a +-atol dead band at 0."""
    if stats.mandel_q < -atol:
        return Classification.SUB_POISSONIAN
    if stats.mandel_q > atol:
        return Classification.SUPER_POISSONIAN
    return Classification.POISSONIAN
