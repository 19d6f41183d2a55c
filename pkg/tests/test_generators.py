import math

import numpy as np
import pytest

from thermoforge import (
    ElementaryGenerator,
    Spectrum,
    build_cooling_catalyst,
    energy_blocks,
    enumerate_basis,
    lie_closure,
    rank2_basis,
)
from thermoforge.errors import CapacityError, PreconditionError

LN2 = math.log(2.0)


def qutrit_cooling_blocks(d=2):
    s = Spectrum.from_energies([0.0, LN2, LN2])
    return energy_blocks(s, build_cooling_catalyst(d))


def doubled(spec: Spectrum) -> Spectrum:
    """Tensor with a two-level zero-energy catalyst (doubles every level)."""
    energies = []
    for e, _ in spec.levels:
        energies.extend([e, e])
    return Spectrum.from_energies(energies)


class TestEnumerateBasis:
    def test_singleton_blocks_only_rank1(self):
        s = Spectrum.from_energies([0.0, 1.0])
        c = Spectrum.from_energies([0.0, math.sqrt(3)])
        blocks = energy_blocks(s, c)
        basis = enumerate_basis(blocks, include_rank1=True)
        assert len(basis) == blocks.joint_dim
        assert all(g.kind == "p" for g in basis)

    def test_single_size2_block_counts(self):
        s = Spectrum.from_energies([0.0])
        c = Spectrum.from_energies([0.0, 0.0])
        blocks = energy_blocks(s, c)
        basis = enumerate_basis(blocks, include_rank1=True)
        kinds = sorted(g.kind for g in basis)
        assert kinds == ["h", "m", "p", "p"]

    def test_cooling_d2_count(self):
        blocks = qutrit_cooling_blocks(2)
        assert sorted(blocks.block_sizes()) == [1, 4, 4]
        assert len(enumerate_basis(blocks, True)) == 1 + 16 + 16
        assert len(enumerate_basis(blocks, False)) == 0 + 12 + 12

    def test_all_antihermitian_energy_preserving(self):
        blocks = qutrit_cooling_blocks(2)
        s = Spectrum.from_energies([0.0, LN2, LN2])
        c = build_cooling_catalyst(2)
        h0 = np.diag(np.add.outer(s.energies, c.energies).ravel()).astype(complex)
        for g in enumerate_basis(blocks, True):
            k = g.matrix(blocks.dims)
            assert np.linalg.norm(k + k.conj().T) < 1e-12
            assert np.linalg.norm(k @ h0 - h0 @ k) < 1e-12

    def test_linear_independence(self):
        blocks = qutrit_cooling_blocks(2)
        mats = [g.matrix(blocks.dims) for g in enumerate_basis(blocks, True)]
        gram = np.array([[np.real(np.trace(a.conj().T @ b)) for b in mats] for a in mats])
        assert np.linalg.eigvalsh(gram).min() > 1e-9


class TestRank2Basis:
    def test_singleton_block_rejected(self):
        blocks = qutrit_cooling_blocks(2)  # has a singleton at energy 0
        with pytest.raises(PreconditionError, match="energy"):
            rank2_basis(blocks)

    def test_size2_block_closure(self):
        s = Spectrum.from_energies([0.0])
        c = Spectrum.from_energies([0.0, 0.0])
        blocks = energy_blocks(s, c)
        gens = rank2_basis(blocks)
        assert sorted(g.kind for g in gens) == ["g_diag", "h", "m"]
        assert lie_closure(gens, max_dim=16, dims=blocks.dims) == 4

    def test_doubled_cooling_closure(self):
        s = Spectrum.from_energies([0.0, LN2, LN2])
        c = doubled(build_cooling_catalyst(2))
        blocks = energy_blocks(s, c)
        assert sorted(blocks.block_sizes()) == [2, 8, 8]
        gens = rank2_basis(blocks)
        assert lie_closure(gens, max_dim=200, dims=blocks.dims) == 4 + 64 + 64


class TestLieClosure:
    def test_empty(self):
        assert lie_closure([], max_dim=10) == 0

    def test_h_m_pair_gives_su2(self):
        s = Spectrum.from_energies([0.0])
        c = Spectrum.from_energies([0.0, 0.0])
        blocks = energy_blocks(s, c)
        e, idx = blocks.blocks[0]
        a, b = sorted(idx)
        gens = [ElementaryGenerator("h", e, a, b), ElementaryGenerator("m", e, a, b)]
        assert lie_closure(gens, max_dim=16, dims=blocks.dims) == 3

    def test_full_basis_closed(self):
        blocks = qutrit_cooling_blocks(2)
        expected = sum(d * d for d in blocks.block_sizes())
        basis = enumerate_basis(blocks, True)
        assert lie_closure(basis, max_dim=2 * expected, dims=blocks.dims) == expected

    def test_max_dim_guard(self):
        blocks = qutrit_cooling_blocks(2)
        with pytest.raises(CapacityError):
            lie_closure(enumerate_basis(blocks, True), max_dim=5, dims=blocks.dims)


class TestRank1Decomposition:
    def test_p_equals_minus_half_f_plus_g(self):
        s = Spectrum.from_energies([0.0])
        c = Spectrum.from_energies([0.0, 0.0])
        blocks = energy_blocks(s, c)
        e, idx = blocks.blocks[0]
        a, b = sorted(idx)
        dims = blocks.dims
        h = ElementaryGenerator("h", e, a, b).matrix(dims)
        m = ElementaryGenerator("m", e, a, b).matrix(dims)
        g = ElementaryGenerator("g_diag", e, a, b).matrix(dims)
        p = ElementaryGenerator("p", e, a, a).matrix(dims)
        f = (h @ m - m @ h) / 2
        assert np.linalg.norm(p + (f + g) / 2) < 1e-12
