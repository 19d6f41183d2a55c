"""Hamiltonian spectra, Gibbs states, joint-energy blocks and samplers.

All Hamiltonians are diagonal in the declared level basis.  Energies are
supplied pre-multiplied by beta (beta = 1 convention); only beta*E products
matter anywhere downstream.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError
from .linalg import as_operator, is_unitary

ENERGY_TOL = 1e-9


@dataclass(frozen=True)
class ThermalContext:
    beta: float = 1.0

    def __post_init__(self):
        if not (self.beta > 0):
            raise DomainError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class Spectrum:
    """An ordered energy list with degeneracy labels.

    The list order defines the basis index used by all matrices.
    """

    levels: tuple[tuple[float, int], ...]

    def __post_init__(self):
        for e, g in self.levels:
            if not np.isfinite(e):
                raise DomainError("spectrum energies must be finite")
            if g < 0:
                raise DomainError("degeneracy labels must be nonnegative")
        # Within one energy value the labels must be 0..delta-1 with no gaps.
        groups: dict[int, list[int]] = {}
        reps: list[float] = []
        for e, g in self.levels:
            for idx, r in enumerate(reps):
                if abs(e - r) < ENERGY_TOL:
                    groups[idx].append(g)
                    break
            else:
                reps.append(e)
                groups[len(reps) - 1] = [g]
        for idx, labels in groups.items():
            if sorted(labels) != list(range(len(labels))):
                raise DomainError(
                    f"degeneracy labels at energy {reps[idx]} are not 0..{len(labels) - 1}"
                )

    @classmethod
    def from_energies(cls, energies) -> "Spectrum":
        """Auto-assign degeneracy labels in listed order."""
        counts: list[tuple[float, int]] = []
        levels = []
        for e in energies:
            e = float(e)
            for i, (r, c) in enumerate(counts):
                if abs(e - r) < ENERGY_TOL:
                    levels.append((e, c))
                    counts[i] = (r, c + 1)
                    break
            else:
                levels.append((e, 0))
                counts.append((e, 1))
        return cls(tuple(levels))

    @classmethod
    def from_json(cls, obj) -> "Spectrum":
        if isinstance(obj, str):
            with open(obj) as f:
                obj = json.load(f)
        if "energies" in obj:
            return cls.from_energies(obj["energies"])
        if "levels" in obj:
            return cls(tuple((float(l["energy"]), int(l["deg"])) for l in obj["levels"]))
        raise DomainError("spectrum JSON needs an 'energies' or 'levels' key")

    def to_json(self) -> dict:
        return {"levels": [{"energy": e, "deg": g} for e, g in self.levels]}

    @property
    def dim(self) -> int:
        return len(self.levels)

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for e, _ in self.levels])

    def index_of(self, energy: float, deg: int) -> int:
        for i, (e, g) in enumerate(self.levels):
            if abs(e - energy) < ENERGY_TOL and g == deg:
                return i
        raise ShapeError(f"no level with energy {energy}, deg {deg}")


@dataclass(frozen=True)
class DiagonalState:
    """A population vector over a spectrum's levels."""

    populations: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.populations, dtype=float)
        if np.any(p < -1e-14):
            raise DomainError(f"negative population {p.min()}")
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1.0) > 1e-12:
            raise DomainError(f"populations sum to {p.sum()}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "populations", p)

    @property
    def dim(self) -> int:
        return len(self.populations)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.populations).astype(complex)


@dataclass(frozen=True)
class EnergyBlocks:
    """Partition of the joint (system, catalyst) index set by total energy."""

    blocks: tuple[tuple[float, tuple[tuple[int, int], ...]], ...]
    dims: tuple[int, int]

    @property
    def joint_dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def flat(self, pair: tuple[int, int]) -> int:
        s, c = pair
        return s * self.dims[1] + c

    def block_sizes(self) -> list[int]:
        return [len(idx) for _, idx in self.blocks]

    def block_of_flat(self) -> np.ndarray:
        """Block id per flat joint index."""
        out = np.empty(self.joint_dim, dtype=int)
        for b, (_, idx) in enumerate(self.blocks):
            for pair in idx:
                out[self.flat(pair)] = b
        return out


def gibbs_state(spec: Spectrum, ctx: ThermalContext = ThermalContext()) -> DiagonalState:
    """exp(-beta E_i) / Z over the spectrum's levels."""
    w = np.exp(-ctx.beta * (spec.energies - spec.energies.min()))
    return DiagonalState(w / w.sum())


def energy_blocks(spec_s: Spectrum, spec_c: Spectrum) -> EnergyBlocks:
    """Group joint indices (i, j) by total energy E_i + E_j (tol 1e-9)."""
    es, ec = spec_s.energies, spec_c.energies
    pairs = [
        (float(es[i] + ec[j]), (i, j))
        for i in range(spec_s.dim)
        for j in range(spec_c.dim)
    ]
    pairs.sort(key=lambda t: (t[0], t[1]))
    blocks: list[tuple[float, list[tuple[int, int]]]] = []
    for e, idx in pairs:
        if blocks and abs(e - blocks[-1][0]) < ENERGY_TOL:
            blocks[-1][1].append(idx)
        else:
            blocks.append((e, [idx]))
    return EnergyBlocks(
        tuple((e, tuple(sorted(idx))) for e, idx in blocks),
        dims=(spec_s.dim, spec_c.dim),
    )


def random_energy_preserving_unitary(blocks: EnergyBlocks, seed: int) -> np.ndarray:
    """Block-diagonal unitary with an independent Haar block per energy."""
    rng = np.random.default_rng(seed)
    n = blocks.joint_dim
    u = np.zeros((n, n), dtype=complex)
    for _, idx in blocks.blocks:
        d = len(idx)
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(z)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        flats = [blocks.flat(p) for p in idx]
        u[np.ix_(flats, flats)] = q
    return u


def is_energy_preserving(u, blocks: EnergyBlocks, tol: float = 1e-9) -> bool:
    """True iff u is unitary and couples no distinct energy blocks."""
    u = as_operator(u)
    if u.shape[0] != blocks.joint_dim:
        raise ShapeError(f"unitary dim {u.shape[0]} != joint dim {blocks.joint_dim}")
    if not is_unitary(u, tol):
        return False
    bid = blocks.block_of_flat()
    mask = bid[:, None] != bid[None, :]
    return bool(np.all(np.abs(u[mask]) < tol))


def max_cross_block_entry(u, blocks: EnergyBlocks) -> tuple[int, int, float]:
    """Largest entry coupling two blocks, for error reporting."""
    u = as_operator(u)
    bid = blocks.block_of_flat()
    mask = bid[:, None] != bid[None, :]
    mags = np.where(mask, np.abs(u), 0.0)
    i, j = np.unravel_index(np.argmax(mags), mags.shape)
    return int(i), int(j), float(mags[i, j])
