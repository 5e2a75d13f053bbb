"""Cavity photon-number distributions and projective measurement updates.

Detecting the atom's internal state after a transit projects the field: a
lower-state detection weights each photon number by p_minus[n], an
upper-state detection consumes one photon and weights by p_plus[n + 1].
Repeating the cycle with identically prepared atoms raises the filter to the
m-th power and sharpens the surviving distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import FilterFunction

__all__ = [
    "ImpossibleOutcome",
    "MeasurementOutcome",
    "PhotonDistribution",
    "TruncationTooSmall",
    "apply_measurement",
    "apply_sequence",
    "default_n_max",
    "poisson_distribution",
    "read_distribution",
    "write_distribution",
]


class TruncationTooSmall(ValueError):
    """The requested n_max leaves too much probability beyond the cutoff."""


class ImpossibleOutcome(ValueError):
    """The requested outcome has probability zero for this field state."""


class MeasurementOutcome(Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class PhotonDistribution:
    """Probabilities P_n for n = 0..n_max photons; normalized on construction."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).copy()
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a nonempty 1-d array")
        if np.any(probs < 0.0) or not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite and nonnegative")
        total = float(probs.sum())
        if total <= 0.0:
            raise ValueError("probabilities must not all vanish")
        probs /= total
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1


def default_n_max(nbar: float) -> int:
    """Truncation rule nbar + 10 sqrt(nbar), generous enough that the
    discarded Poisson tail is below 1e-12."""
    if nbar < 0.0:
        raise ValueError("nbar must be >= 0")
    return math.ceil(nbar + 10.0 * math.sqrt(nbar))


def poisson_distribution(nbar: float, n_max: int) -> PhotonDistribution:
    """Truncated coherent-state photon statistics exp(-nbar) nbar^n / n!.

    The weights are built by the stable recurrence P_{n+1} = P_n nbar/(n+1)
    and renormalized over 0..n_max.  If the discarded tail holds 1e-9 or
    more of the distribution, :class:`TruncationTooSmall` is raised.
    """
    if nbar < 0.0:
        raise ValueError("nbar must be >= 0")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    first = math.exp(-nbar)
    if nbar > 0.0 and first == 0.0:
        raise ValueError("nbar too large for direct weights; exp(-nbar) underflows")
    weights = np.empty(n_max + 1)
    weights[0] = first
    for n in range(n_max):
        weights[n + 1] = weights[n] * nbar / (n + 1)
    tail = max(0.0, 1.0 - float(weights.sum()))
    if tail >= 1e-9:
        raise TruncationTooSmall(
            f"poisson(nbar={nbar}) keeps tail mass {tail:.3e} beyond "
            f"n_max={n_max}; raise n_max")
    return PhotonDistribution(weights)


def apply_measurement(dist: PhotonDistribution, filt: FilterFunction,
                      outcome: MeasurementOutcome
                      ) -> tuple[PhotonDistribution, float]:
    """Project the field on one detected atomic outcome.

    A ``LOWER`` detection keeps the photon number and reweights by
    p_minus[n]; an ``UPPER`` detection means the atom carried one photon
    away, so P_n <- p_plus[n+1] P_{n+1} with the top entry cleared.

    Returns the renormalized distribution together with the
    pre-normalization sum, which is the probability of seeing this outcome.
    """
    if dist.n_max != filt.n_max:
        raise ValueError(
            f"distribution n_max={dist.n_max} != filter n_max={filt.n_max}")
    if outcome is MeasurementOutcome.LOWER:
        weights = filt.p_minus * dist.probs
    elif outcome is MeasurementOutcome.UPPER:
        weights = np.zeros_like(dist.probs)
        weights[:-1] = filt.p_plus[1:] * dist.probs[1:]
    else:
        raise TypeError(f"not a MeasurementOutcome: {outcome!r}")
    probability = float(weights.sum())
    if probability <= 0.0:
        raise ImpossibleOutcome(
            f"outcome {outcome.value} has zero probability for this field")
    return PhotonDistribution(weights), probability


def apply_sequence(dist: PhotonDistribution, filt: FilterFunction,
                   outcomes) -> tuple[PhotonDistribution, list[float]]:
    """Fold a sequence of detected outcomes, one identically driven atom each.

    Returns the final distribution and the per-step outcome probabilities
    (each conditioned on the previous outcomes having occurred).
    """
    probabilities = []
    for outcome in outcomes:
        dist, p = apply_measurement(dist, filt, outcome)
        probabilities.append(p)
    return dist, probabilities


def write_distribution(dist: PhotonDistribution, path) -> None:
    """Write a distribution as delimited text: n, probability."""
    from .tableio import write_table

    rows = [(n, dist.probs[n]) for n in range(dist.n_max + 1)]
    write_table(path, ("n", "probability"), rows)


def read_distribution(path) -> PhotonDistribution:
    """Read a distribution written by :func:`write_distribution`."""
    from .tableio import read_table

    header, rows = read_table(path)
    if header != ["n", "probability"]:
        raise ValueError(f"{path}: not a distribution table")
    return PhotonDistribution(np.array([float(r[1]) for r in rows]))
