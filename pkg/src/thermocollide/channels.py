"""Collision channels on system populations.

One collision of the system with a fresh Gibbs particle reduces, for
number-diagonal states, to a column-stochastic matrix acting on the
system's population vector.  The matrix is materialized once per
(unitary, bath) pair, so repeated collisions cost O(d_system^2) instead
of repeated joint-space evolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockUnitary
from .states import (
    GibbsSpec,
    PopulationState,
    gibbs_populations,
    relative_entropy,
    shannon_entropy,
    trace_distance,
)

COLUMN_ATOL = 1e-12
FIXED_POINT_ATOL = 1e-12
DEFAULT_MAX_COLLISIONS = 10**6


class ConvergenceError(RuntimeError):
    """Collision iteration failed to reach the target ball.

    Raised when the channel cannot contract onto its fixed point, e.g.
    when every unitary block is proportional to the identity.  Carries
    the distance reached so the caller can see how far off it stalled.
    """

    def __init__(self, message: str, collisions: int, distance: float) -> None:
        super().__init__(message)
        self.collisions = collisions
        self.distance = distance


@dataclass(frozen=True, eq=False)
class CollisionChannel:
    """Column-stochastic matrix, entry (i, mu) = P(i | mu), plus its bath."""

    matrix: np.ndarray
    bath: GibbsSpec

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"channel matrix must be square, got shape {m.shape}")
        if m.min() < -COLUMN_ATOL:
            raise ValueError(f"negative channel entry: {m.min():.3e}")
        np.clip(m, 0.0, None, out=m)
        column_defect = np.abs(m.sum(axis=0) - 1.0).max()
        if column_defect > COLUMN_ATOL:
            raise ValueError(f"columns are not stochastic: defect {column_defect:.3e}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        # the bath-temperature Gibbs state on the system must be stationary
        g = self.fixed_point()
        drift = trace_distance(PopulationState(m @ g.probs), g)
        if drift > FIXED_POINT_ATOL:
            raise ValueError(f"Gibbs state is not a fixed point: drift {drift:.3e}")

    @property
    def d_system(self) -> int:
        return self.matrix.shape[0]

    def fixed_point(self) -> PopulationState:
        """Gibbs populations at the bath's beta*omega, on the system dimension."""
        return gibbs_populations(
            GibbsSpec(self.bath.beta, self.bath.omega, self.d_system)
        )


@dataclass(frozen=True, eq=False)
class CollisionAudit:
    """Thermodynamic bookkeeping for one collision.

    heat_to_system is omega * (change of the system's mean number);
    number conservation makes it equal and opposite to the particle's
    energy change.  Entropy changes are increases, S(post) - S(pre), so
    their sum over both parties is the (non-negative) entropy produced.
    landauer_gap is beta * (heat the particle sheds) minus the
    particle's entropy decrease plus D[post||pre]; for a Gibbs-born
    particle this combination vanishes identically.
    """

    heat_to_system: float
    particle_post: PopulationState
    entropy_change_particle: float
    entropy_change_system: float
    landauer_gap: float
    particle_energy_change: float


def channel_matrix(unitary: BlockUnitary, bath: GibbsSpec) -> CollisionChannel:
    """Trace out a fresh Gibbs particle: P(i|mu) = sum_nu q_nu |<i,nu'|U|mu,nu>|^2.

    Number conservation keeps each transition inside one block, so the
    sum runs block by block over the squared moduli of the block
    entries.
    """
    indexing = unitary.indexing
    if indexing.d_particle != bath.d:
        raise ValueError(
            f"unitary built for particle dimension {indexing.d_particle}, "
            f"bath has {bath.d}"
        )
    q = gibbs_populations(bath).probs
    d = indexing.d_system
    matrix = np.zeros((d, d))
    for l, block in enumerate(unitary.blocks):
        weights = np.abs(block) ** 2
        rows = indexing._s_arrays[l]
        for col, (mu, nu) in enumerate(indexing.block_basis(l)):
            matrix[rows, mu] += q[nu] * weights[:, col]
    return CollisionChannel(matrix, bath)


def apply(channel: CollisionChannel, state: PopulationState) -> PopulationState:
    """One collision: matrix-vector product on the population vector."""
    if state.d != channel.d_system:
        raise ValueError(
            f"state dimension {state.d} does not match channel {channel.d_system}"
        )
    return PopulationState(channel.matrix @ state.probs)


def pseudo_thermalize(
    initial: PopulationState,
    channel: CollisionChannel,
    target: PopulationState,
    eps: float,
    max_collisions: int = DEFAULT_MAX_COLLISIONS,
) -> tuple[PopulationState, int]:
    """Apply the channel until the state enters the eps-ball around target.

    Returns the reached state and the minimal number of applications.
    The search is strictly sequential, so the count is the first one
    that works; trace-distance contractivity guarantees termination
    unless the channel is degenerate, in which case a
    ConvergenceError reports the stalled distance.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    state = initial
    for count in range(max_collisions + 1):
        if trace_distance(state, target) < eps:
            return state, count
        state = apply(channel, state)
    raise ConvergenceError(
        f"no eps={eps:g} pseudo-thermalization within {max_collisions} collisions "
        f"(distance stalled at {trace_distance(state, target):.3e}); "
        "the unitary may act as the identity on every block",
        collisions=max_collisions,
        distance=trace_distance(state, target),
    )


def collide_with_audit(
    unitary: BlockUnitary, state: PopulationState, bath: GibbsSpec
) -> tuple[PopulationState, CollisionAudit]:
    """One audited collision with a fresh Gibbs particle.

    Evolves the joint diagonal populations block by block and returns
    the post-collision system state together with both marginals'
    thermodynamic bookkeeping.  The particle's reduced state stays
    diagonal by the same number-conservation argument that keeps the
    system diagonal.
    """
    indexing = unitary.indexing
    if state.d != indexing.d_system:
        raise ValueError(
            f"state dimension {state.d} does not match unitary {indexing.d_system}"
        )
    if bath.d != indexing.d_particle:
        raise ValueError(
            f"bath dimension {bath.d} does not match unitary {indexing.d_particle}"
        )
    particle_pre = gibbs_populations(bath)
    p = state.probs
    q = particle_pre.probs
    post_system = np.zeros(indexing.d_system)
    post_particle = np.zeros(indexing.d_particle)
    for l, block in enumerate(unitary.blocks):
        s_idx = indexing._s_arrays[l]
        e_idx = indexing._e_arrays[l]
        joint_in = p[s_idx] * q[e_idx]
        joint_out = (np.abs(block) ** 2) @ joint_in
        post_system += np.bincount(s_idx, joint_out, minlength=indexing.d_system)
        post_particle += np.bincount(e_idx, joint_out, minlength=indexing.d_particle)
    system_out = PopulationState(post_system)
    particle_out = PopulationState(post_particle)

    heat_to_system = bath.omega * (system_out.mean_number() - state.mean_number())
    particle_energy_change = bath.omega * (
        particle_out.mean_number() - particle_pre.mean_number()
    )
    ds_system = shannon_entropy(system_out) - shannon_entropy(state)
    ds_particle = shannon_entropy(particle_out) - shannon_entropy(particle_pre)
    # Gibbs-born particle: beta*(heat shed) - (entropy decrease) + D = 0
    landauer_gap = (
        bath.beta * (-particle_energy_change)
        - (-ds_particle)
        + relative_entropy(particle_out, particle_pre)
    )
    audit = CollisionAudit(
        heat_to_system=heat_to_system,
        particle_post=particle_out,
        entropy_change_particle=ds_particle,
        entropy_change_system=ds_system,
        landauer_gap=landauer_gap,
        particle_energy_change=particle_energy_change,
    )
    return system_out, audit
