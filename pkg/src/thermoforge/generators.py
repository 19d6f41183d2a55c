"""Elementary generating sets of the energy-preserving Lie algebra.

Each generator is anti-Hermitian, supported on at most two joint basis
states inside one energy block:

    h       -i(|a><b| + |b><a|)        rank 2
    m         |a><b| - |b><a|          rank 2
    p       -i |a><a|                  rank 1
    g_diag   i(|a><a| + |b><b|)        rank 2

where a, b are joint (system, catalyst) indices sharing one total energy.
The full algebra restricted to a block of size d is u(d), dimension d^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, PreconditionError
from .thermal import EnergyBlocks

KINDS = ("h", "m", "p", "g_diag")


@dataclass(frozen=True, order=True)
class ElementaryGenerator:
    kind: str
    block_energy: float
    first: tuple[int, int]
    second: tuple[int, int]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown generator kind {self.kind!r}")
        if self.kind == "p" and self.first != self.second:
            raise DomainError("rank-1 'p' generator must have first == second")
        if self.kind != "p" and self.first == self.second:
            raise DomainError(f"kind {self.kind!r} needs two distinct joint indices")

    def matrix(self, dims: tuple[int, int]) -> np.ndarray:
        n = dims[0] * dims[1]
        a = self.first[0] * dims[1] + self.first[1]
        b = self.second[0] * dims[1] + self.second[1]
        k = np.zeros((n, n), dtype=complex)
        if self.kind == "h":
            k[a, b] = -1j
            k[b, a] = -1j
        elif self.kind == "m":
            k[a, b] = 1.0
            k[b, a] = -1.0
        elif self.kind == "p":
            k[a, a] = -1j
        else:  # g_diag
            k[a, a] = 1j
            k[b, b] = 1j
        return k

    def support(self) -> tuple[tuple[int, int], ...]:
        if self.kind == "p":
            return (self.first,)
        return (self.first, self.second)


def enumerate_basis(blocks: EnergyBlocks, include_rank1: bool = True) -> list[ElementaryGenerator]:
    """Real-linear basis of the energy-preserving algebra.

    With rank-1 projectors: sum of d^2 over blocks.  Without them only
    the off-diagonal h/m pairs remain: sum of d(d-1).
    """
    out: list[ElementaryGenerator] = []
    for energy, idx in blocks.blocks:
        idx = sorted(idx)
        for i in range(len(idx)):
            for j in range(i + 1, len(idx)):
                out.append(ElementaryGenerator("h", energy, idx[i], idx[j]))
                out.append(ElementaryGenerator("m", energy, idx[i], idx[j]))
        if include_rank1:
            for a in idx:
                out.append(ElementaryGenerator("p", energy, a, a))
    return out


def rank2_basis(blocks: EnergyBlocks) -> list[ElementaryGenerator]:
    """Rank-2-only generating set: h, m and g_diag over index pairs.

    Requires every block to have size >= 2; tensor a two-dimensional
    zero-Hamiltonian catalyst first if the structure has singletons.
    """
    for energy, idx in blocks.blocks:
        if len(idx) < 2:
            raise PreconditionError(
                f"block at energy {energy} is a singleton; append a "
                "two-level zero-energy catalyst to double it first"
            )
    out: list[ElementaryGenerator] = []
    for energy, idx in blocks.blocks:
        idx = sorted(idx)
        for i in range(len(idx)):
            for j in range(i + 1, len(idx)):
                out.append(ElementaryGenerator("h", energy, idx[i], idx[j]))
                out.append(ElementaryGenerator("m", energy, idx[i], idx[j]))
                out.append(ElementaryGenerator("g_diag", energy, idx[i], idx[j]))
    return out


def _to_matrix(g, dims) -> np.ndarray:
    if isinstance(g, ElementaryGenerator):
        if dims is None:
            raise DomainError("dims required to materialize generator records")
        return g.matrix(dims)
    return np.asarray(g, dtype=complex)


def lie_closure(gens, max_dim: int = 512, dims: tuple[int, int] | None = None,
                rank_tol: float = 1e-9) -> int:
    """Dimension of the smallest real commutator-closed span of the inputs.

    Grows an orthonormal basis (real inner product Re tr(A†B)) by repeated
    commutators; re-orthonormalizes every candidate against the current basis.
    """
    mats = [_to_matrix(g, dims) for g in gens]
    if not mats:
        return 0
    n = mats[0].shape[0]

    basis: list[np.ndarray] = []  # flattened real vectors, orthonormal

    def vec(m: np.ndarray) -> np.ndarray:
        return np.concatenate([m.real.ravel(), m.imag.ravel()])

    def try_add(m: np.ndarray) -> bool:
        v = vec(m)
        norm = np.linalg.norm(v)
        if norm < rank_tol:
            return False
        v = v / norm
        for _ in range(2):  # twice for numerical stability
            for b in basis:
                v = v - (b @ v) * b
        res = np.linalg.norm(v)
        if res < rank_tol:
            return False
        basis.append(v / res)
        return True

    def unvec(v: np.ndarray) -> np.ndarray:
        half = n * n
        return (v[:half] + 1j * v[half:]).reshape(n, n)

    for m in mats:
        try_add(m)
        if len(basis) > max_dim:
            raise CapacityError(f"closure exceeded max_dim {max_dim}")

    frontier = list(range(len(basis)))
    while frontier:
        new_frontier: list[int] = []
        for i in frontier:
            a = unvec(basis[i])
            for j in range(len(basis)):
                b = unvec(basis[j])
                if try_add(a @ b - b @ a):
                    new_frontier.append(len(basis) - 1)
                    if len(basis) > max_dim:
                        raise CapacityError(f"closure exceeded max_dim {max_dim}")
        frontier = new_frontier
    return len(basis)
