"""Number-conserving two-body unitaries, stored block by block.

A unitary on H_system (x) H_particle that commutes with the total
excitation number splits into a direct sum over the total-excitation
subspaces.  Only those dense blocks are ever materialized; the full
product-space matrix exists solely for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

UNITARITY_ATOL = 1e-12


def subspace_dimension(l: int, d_system: int, d_particle: int) -> int:
    """Dimension of the total-excitation-l subspace of the product space."""
    if not 0 <= l <= d_system + d_particle - 2:
        raise ValueError(
            f"block index {l} outside 0..{d_system + d_particle - 2} "
            f"for dims ({d_system}, {d_particle})"
        )
    return 1 + min(l, d_system - 1) - max(0, l - d_particle + 1)


@dataclass(frozen=True, eq=False)
class SubspaceIndexing:
    """Bases of the total-excitation blocks of H_system (x) H_particle.

    Block l collects the product states |s, e> with s + e = l, listed by
    descending system excitation s.  That intra-block ordering is a
    convention of this library; channel matrices reproduce bit-for-bit
    only under the same convention.
    """

    d_system: int
    d_particle: int
    bases: tuple[tuple[tuple[int, int], ...], ...] = field(init=False)

    def __post_init__(self) -> None:
        for name, d in (("d_system", self.d_system), ("d_particle", self.d_particle)):
            if not isinstance(d, int) or d < 2:
                raise ValueError(f"{name} must be an integer >= 2, got {d}")
        bases = []
        for l in range(self.n_blocks):
            s_hi = min(l, self.d_system - 1)
            s_lo = max(0, l - self.d_particle + 1)
            bases.append(tuple((s, l - s) for s in range(s_hi, s_lo - 1, -1)))
        object.__setattr__(self, "bases", tuple(bases))
        # parallel integer index arrays for the hot collision loops
        object.__setattr__(
            self, "_s_arrays", tuple(np.array([s for s, _ in b]) for b in bases)
        )
        object.__setattr__(
            self, "_e_arrays", tuple(np.array([e for _, e in b]) for b in bases)
        )

    @property
    def n_blocks(self) -> int:
        return self.d_system + self.d_particle - 1

    def block_basis(self, l: int) -> tuple[tuple[int, int], ...]:
        return self.bases[l]

    def product_index(self, s: int, e: int) -> int:
        """Row of |s, e> in the flattened product basis (system-major)."""
        return s * self.d_particle + e


@dataclass(frozen=True, eq=False)
class BlockUnitary:
    """One dense unitary per total-excitation block."""

    indexing: SubspaceIndexing
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != self.indexing.n_blocks:
            raise ValueError(
                f"expected {self.indexing.n_blocks} blocks, got {len(self.blocks)}"
            )
        frozen = []
        for l, block in enumerate(self.blocks):
            b = np.array(block, dtype=complex)
            m = len(self.indexing.block_basis(l))
            if b.shape != (m, m):
                raise ValueError(f"block {l} has shape {b.shape}, expected ({m}, {m})")
            defect = np.abs(b @ b.conj().T - np.eye(m)).max()
            if defect > UNITARITY_ATOL:
                raise ValueError(f"block {l} is not unitary: defect {defect:.3e}")
            b.flags.writeable = False
            frozen.append(b)
        object.__setattr__(self, "blocks", tuple(frozen))


def build_swap(d_system: int, d_particle: int | None = None) -> BlockUnitary:
    """Full exchange |i, j> -> |j, i>, block by block.

    Exchange only stays inside the truncated spaces when both dimensions
    agree, hence the explicit equality requirement.
    """
    if d_particle is not None and d_particle != d_system:
        raise ValueError(
            f"SWAP requires equal dimensions, got ({d_system}, {d_particle})"
        )
    indexing = SubspaceIndexing(d_system, d_system)
    blocks = []
    for l in range(indexing.n_blocks):
        basis = indexing.block_basis(l)
        position = {pair: i for i, pair in enumerate(basis)}
        u = np.zeros((len(basis), len(basis)), dtype=complex)
        for col, (s, e) in enumerate(basis):
            u[position[(e, s)], col] = 1.0
        blocks.append(u)
    return BlockUnitary(indexing, tuple(blocks))


def build_jaynes_cummings(d_system: int, d_particle: int, theta: float) -> BlockUnitary:
    """Excitation-exchange unitary exp(-i theta V) of the resonant flip-flop coupling.

    V = a_system (x) b_particle^dag + h.c. with ladder weights
    sqrt(k+1) |k+1><k|.  Within block l (basis |s, e>, s + e = l) the
    coupling is real symmetric tridiagonal with hop amplitude
    sqrt(s) * sqrt(e + 1) from |s, e> to |s-1, e+1>, in units of the
    coupling strength.  theta is the product of coupling strength and
    interaction time, the only combination populations depend on.
    """
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    indexing = SubspaceIndexing(d_system, d_particle)
    blocks = []
    for l in range(indexing.n_blocks):
        basis = indexing.block_basis(l)
        m = len(basis)
        if m == 1:
            blocks.append(np.ones((1, 1), dtype=complex))
            continue
        hop = np.array([math.sqrt(s * (e + 1)) for s, e in basis[:-1]])
        coupling = np.diag(hop, 1) + np.diag(hop, -1)
        evals, evecs = np.linalg.eigh(coupling)
        blocks.append((evecs * np.exp(-1j * theta * evals)) @ evecs.T)
    return BlockUnitary(indexing, tuple(blocks))


def assemble_full(unitary: BlockUnitary) -> np.ndarray:
    """Re-embed the blocks into the dense product-space matrix."""
    indexing = unitary.indexing
    n = indexing.d_system * indexing.d_particle
    full = np.zeros((n, n), dtype=complex)
    for l, block in enumerate(unitary.blocks):
        ids = [indexing.product_index(s, e) for s, e in indexing.block_basis(l)]
        full[np.ix_(ids, ids)] = block
    return full


def matrix_conserves_number(
    matrix: np.ndarray, d_system: int, d_particle: int, atol: float = 1e-12
) -> bool:
    """Check a raw product-space matrix against [U, N_total] = 0."""
    matrix = np.asarray(matrix)
    if matrix.shape != (d_system * d_particle,) * 2:
        raise ValueError(
            f"matrix shape {matrix.shape} does not match dims "
            f"({d_system}, {d_particle})"
        )
    total = np.add.outer(np.arange(d_system), np.arange(d_particle)).reshape(-1)
    commutator = matrix * total[np.newaxis, :] - total[:, np.newaxis] * matrix
    return float(np.abs(commutator).max()) <= atol


def verify_number_conservation(unitary: BlockUnitary, atol: float = 1e-12) -> bool:
    """Reassemble the full matrix and test commutation with the total number."""
    return matrix_conserves_number(
        assemble_full(unitary),
        unitary.indexing.d_system,
        unitary.indexing.d_particle,
        atol=atol,
    )
