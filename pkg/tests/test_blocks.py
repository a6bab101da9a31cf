import math

import numpy as np
import pytest

from thermocollide import (
    BlockUnitary,
    SubspaceIndexing,
    assemble_full,
    build_jaynes_cummings,
    build_swap,
    matrix_conserves_number,
    subspace_dimension,
    verify_number_conservation,
)


class TestSubspaceDimension:
    def test_ground_block_is_one_dimensional(self):
        assert subspace_dimension(0, 3, 5) == 1

    def test_two_qubits_middle_block(self):
        assert subspace_dimension(1, 2, 2) == 2

    def test_truncation_from_both_sides(self):
        assert subspace_dimension(3, 2, 3) == 1

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            subspace_dimension(4, 2, 3)
        with pytest.raises(ValueError):
            subspace_dimension(-1, 2, 3)

    @pytest.mark.parametrize("d_system", range(2, 11))
    @pytest.mark.parametrize("d_particle", range(2, 11))
    def test_blocks_partition_product_space(self, d_system, d_particle):
        total = sum(
            subspace_dimension(l, d_system, d_particle)
            for l in range(d_system + d_particle - 1)
        )
        assert total == d_system * d_particle


class TestSubspaceIndexing:
    def test_basis_ordering_descending_system(self):
        indexing = SubspaceIndexing(3, 3)
        assert indexing.block_basis(2) == ((2, 0), (1, 1), (0, 2))

    def test_bases_cover_product_basis(self):
        indexing = SubspaceIndexing(4, 3)
        seen = [pair for basis in indexing.bases for pair in basis]
        assert len(seen) == 12
        assert len(set(seen)) == 12
        assert all(s + e == l for l, basis in enumerate(indexing.bases) for s, e in basis)


class TestSwap:
    def test_exchanges_excitations(self):
        swap = build_swap(2)
        full = assemble_full(swap)
        indexing = swap.indexing
        src = indexing.product_index(0, 1)
        dst = indexing.product_index(1, 0)
        vec = np.zeros(4)
        vec[src] = 1.0
        out = full @ vec
        assert out[dst] == pytest.approx(1.0)

    def test_middle_block_is_antidiagonal(self):
        swap = build_swap(3)
        np.testing.assert_allclose(swap.blocks[2], np.eye(3)[::-1], atol=0)

    def test_involution(self):
        swap = build_swap(4)
        for block in swap.blocks:
            np.testing.assert_allclose(
                block @ block, np.eye(block.shape[0]), atol=1e-14
            )

    def test_requires_equal_dimensions(self):
        with pytest.raises(ValueError, match="equal dimensions"):
            build_swap(3, 4)


class TestJaynesCummings:
    def test_zero_angle_is_identity(self):
        u = build_jaynes_cummings(3, 4, 0.0)
        for block in u.blocks:
            np.testing.assert_allclose(block, np.eye(block.shape[0]), atol=1e-15)

    def test_two_level_block_closed_form(self):
        # the single-excitation block of two qubits is exp(-i theta sx)
        theta = 0.7321
        u = build_jaynes_cummings(2, 2, theta)
        expected = np.array(
            [
                [math.cos(theta), -1j * math.sin(theta)],
                [-1j * math.sin(theta), math.cos(theta)],
            ]
        )
        np.testing.assert_allclose(u.blocks[1], expected, atol=1e-12)

    def test_half_pi_two_qubits_swaps_populations(self):
        u = build_jaynes_cummings(2, 2, math.pi / 2)
        weights = np.abs(u.blocks[1]) ** 2
        np.testing.assert_allclose(weights, [[0, 1], [1, 0]], atol=1e-12)

    def test_unitarity_random_angles(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            d_system = int(rng.integers(2, 7))
            d_particle = int(rng.integers(2, 7))
            theta = float(rng.uniform(0.0, 2 * math.pi))
            u = build_jaynes_cummings(d_system, d_particle, theta)
            for block in u.blocks:
                np.testing.assert_allclose(
                    block @ block.conj().T, np.eye(block.shape[0]), atol=1e-12
                )

    def test_ladder_weights_symmetric_for_equal_dims(self):
        u = build_jaynes_cummings(4, 4, 1.234)
        for block in u.blocks:
            flip = np.eye(block.shape[0])[::-1]
            np.testing.assert_allclose(flip @ block @ flip, block, atol=1e-12)

    def test_ladder_weights_asymmetric_for_unequal_dims(self):
        u = build_jaynes_cummings(3, 4, 1.234)
        block = u.blocks[3]
        flip = np.eye(block.shape[0])[::-1]
        assert np.abs(flip @ block @ flip - block).max() > 1e-3

    def test_rejects_non_finite_angle(self):
        with pytest.raises(ValueError):
            build_jaynes_cummings(2, 2, math.inf)


class TestNumberConservation:
    def test_swap_conserves(self):
        assert verify_number_conservation(build_swap(3))

    def test_jaynes_cummings_conserves(self):
        assert verify_number_conservation(build_jaynes_cummings(3, 4, 1.3))

    def test_block_mixing_matrix_fails(self):
        # permutation exchanging |0,0> and |1,1> hops between blocks 0 and 2
        mixing = np.eye(4)
        mixing[[0, 3]] = mixing[[3, 0]]
        assert not matrix_conserves_number(mixing, 2, 2)

    def test_block_unitary_rejects_non_unitary(self):
        indexing = SubspaceIndexing(2, 2)
        blocks = (np.ones((1, 1)), 0.5 * np.eye(2), np.ones((1, 1)))
        with pytest.raises(ValueError, match="not unitary"):
            BlockUnitary(indexing, blocks)

    def test_block_unitary_rejects_wrong_shape(self):
        indexing = SubspaceIndexing(2, 2)
        blocks = (np.ones((1, 1)), np.eye(3), np.ones((1, 1)))
        with pytest.raises(ValueError, match="shape"):
            BlockUnitary(indexing, blocks)
