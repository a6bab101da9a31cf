"""Probability-vector core for number-diagonal quantum states.

Every state this engine touches commutes with the excitation-number
operator, so a probability vector over 0..d-1 quanta is a lossless
representation of the density matrix.  All entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORMALIZATION_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class PopulationState:
    """Probability distribution over the number basis of one subsystem.

    Entries must be non-negative and sum to one within
    ``NORMALIZATION_ATOL``; small float dust is renormalized away,
    anything beyond that tolerance is rejected.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("populations must form a non-empty 1-D vector")
        if not np.all(np.isfinite(p)):
            raise ValueError("populations must be finite")
        if p.min() < -NORMALIZATION_ATOL:
            raise ValueError(f"negative population: min entry {p.min():.3e}")
        np.clip(p, 0.0, None, out=p)
        total = p.sum()
        if abs(total - 1.0) > NORMALIZATION_ATOL:
            raise ValueError(f"populations sum to {total:.15g}, not 1")
        p /= total
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def d(self) -> int:
        return self.probs.size

    def mean_number(self) -> float:
        """Expectation of the number operator, sum_k k p_k."""
        return float(np.arange(self.d) @ self.probs)


@dataclass(frozen=True)
class GibbsSpec:
    """One bath species: Gibbs weights exp(-beta*omega*k) on k < d.

    beta is an inverse temperature (1/energy), omega the level spacing
    (energy), d the particle Hilbert-space dimension.
    """

    beta: float
    omega: float
    d: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.beta) and self.beta >= 0.0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise ValueError(f"omega must be finite and > 0, got {self.omega}")
        if not isinstance(self.d, int) or self.d < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.d}")


def gibbs_populations(spec: GibbsSpec) -> PopulationState:
    """Normalized Gibbs populations p_k ~ exp(-beta*omega*k).

    Exponents are max-shifted before exponentiation, so any finite
    beta*omega yields a valid state (large values underflow cleanly to
    the ground state).
    """
    exponents = -spec.beta * spec.omega * np.arange(spec.d, dtype=float)
    exponents -= exponents.max()
    weights = np.exp(exponents)
    return PopulationState(weights / weights.sum())


def shannon_entropy(state: PopulationState) -> float:
    """-sum p_k ln p_k in nats, with 0 ln 0 = 0."""
    p = state.probs[state.probs > 0.0]
    return float(-(p @ np.log(p)))


def relative_entropy(state: PopulationState, reference: PopulationState) -> float:
    """sum p_k (ln p_k - ln q_k) in nats.

    Returns ``math.inf`` when the support condition fails (some q_k = 0
    where p_k > 0), which is the divergence's true value there and is
    distinct from any numeric failure.  Float noise below zero is
    clamped, so the Klein inequality holds exactly.
    """
    if state.d != reference.d:
        raise ValueError(f"dimension mismatch: {state.d} vs {reference.d}")
    mask = state.probs > 0.0
    p = state.probs[mask]
    q = reference.probs[mask]
    if np.any(q == 0.0):
        return math.inf
    value = float(p @ (np.log(p) - np.log(q)))
    return max(value, 0.0)


def trace_distance(state: PopulationState, other: PopulationState) -> float:
    """Half the L1 distance between the population vectors, in [0, 1]."""
    if state.d != other.d:
        raise ValueError(f"dimension mismatch: {state.d} vs {other.d}")
    return 0.5 * float(np.abs(state.probs - other.probs).sum())


def reeb_wolf_lower_bound(delta_entropy: float, dim: int) -> float:
    """Dimension-dependent floor on relative entropy.

    For states on a Hilbert space of dimension ``dim``, the divergence
    D[p||q] is at least (S(q) - S(p))^2 / (3 ln^2 dim).  This is the
    mechanism by which a finite bath dimension caps engine efficiency.
    """
    if not isinstance(dim, int) or dim < 2:
        raise ValueError(f"dimension bound needs an integer dim >= 2, got {dim}")
    return delta_entropy * delta_entropy / (3.0 * math.log(dim) ** 2)
