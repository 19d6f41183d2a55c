"""Compile energy-preserving unitaries into elementary two-level gates.

Back-ends:
  exact   per-block Givens-style column elimination (<= d(d-1)/2 two-level
          gates plus <= d phase gates per block)
  trotter first-order product formula over a generator combination
  bch     group-commutator synthesis of exp(t[K_j, K_k])
  nested  outer Trotter over a depth-1 mix of linear and commutator terms

A GateSequence applies steps[0] first, i.e. reconstruct() multiplies
steps right-to-left.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError
from .generators import ElementaryGenerator
from .linalg import expm_skew
from .thermal import EnergyBlocks, is_energy_preserving, max_cross_block_entry

_ELIM_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class GateStep:
    """One elementary gate: exp(param * K) for a named generator kind,
    or an explicit 2x2 unitary block on an ordered joint index pair."""

    kind: str  # 'h' | 'm' | 'p' | 'g_diag' | 'givens'
    indices: tuple[tuple[int, int], ...]
    param: float | None = None
    u2: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "givens":
            if self.u2 is None or len(self.indices) != 2:
                raise DomainError("givens step needs a 2x2 block and two indices")
            u2 = np.asarray(self.u2, dtype=complex)
            if np.linalg.norm(u2.conj().T @ u2 - np.eye(2)) > 1e-12:
                raise DomainError("givens block is not unitary")
            u2.flags.writeable = False
            object.__setattr__(self, "u2", u2)
        else:
            if self.param is None:
                raise DomainError("generator step needs a parameter")
            want = 1 if self.kind == "p" else 2
            if len(self.indices) != want:
                raise DomainError(f"kind {self.kind!r} takes {want} joint indices")

    @classmethod
    def from_generator(cls, gen: ElementaryGenerator, param: float) -> "GateStep":
        return cls(gen.kind, gen.support(), param=param)

    def matrix(self, dims: tuple[int, int]) -> np.ndarray:
        n = dims[0] * dims[1]
        flats = [s * dims[1] + c for s, c in self.indices]
        for f in flats:
            if f >= n:
                raise ShapeError(f"step index {f} out of range for joint dim {n}")
        u = np.eye(n, dtype=complex)
        if self.kind == "givens":
            u[np.ix_(flats, flats)] = self.u2
        elif self.kind == "p":
            u[flats[0], flats[0]] = np.exp(-1j * self.param)
        else:
            a, b = flats
            if self.kind == "h":
                k2 = np.array([[0, -1j], [-1j, 0]])
            elif self.kind == "m":
                k2 = np.array([[0, 1], [-1, 0]], dtype=complex)
            else:  # g_diag
                k2 = np.array([[1j, 0], [0, 1j]])
            u[np.ix_([a, b], [a, b])] = expm_skew(self.param * k2)
        return u

    def to_json(self) -> dict:
        d = {"kind": self.kind, "indices": [list(p) for p in self.indices]}
        if self.kind == "givens":
            d["u2"] = [[z.real, z.imag] for z in self.u2.ravel()]
        else:
            d["param"] = self.param
        return d

    @classmethod
    def from_json(cls, d: dict) -> "GateStep":
        indices = tuple(tuple(p) for p in d["indices"])
        if d["kind"] == "givens":
            flat = [complex(re, im) for re, im in d["u2"]]
            return cls("givens", indices, u2=np.array(flat).reshape(2, 2))
        return cls(d["kind"], indices, param=float(d["param"]))


@dataclass
class GateSequence:
    steps: list[GateStep]
    method: str  # 'exact' | 'trotter' | 'bch' | 'nested' | 'handcrafted'
    dims: tuple[int, int]
    error_bound: float = 0.0
    trotter_m: int | None = None

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        d = {
            "method": self.method,
            "dims": list(self.dims),
            "error_bound": self.error_bound,
            "steps": [s.to_json() for s in self.steps],
        }
        if self.trotter_m is not None:
            d["trotter_m"] = self.trotter_m
        return d

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump(self.to_json(), f, indent=1)

    @classmethod
    def from_json(cls, obj) -> "GateSequence":
        if isinstance(obj, str):
            with open(obj) as f:
                obj = json.load(f)
        return cls(
            steps=[GateStep.from_json(s) for s in obj["steps"]],
            method=obj["method"],
            dims=tuple(obj["dims"]),
            error_bound=float(obj.get("error_bound", 0.0)),
            trotter_m=obj.get("trotter_m"),
        )


def reconstruct(seq: GateSequence, joint_dim: int | None = None) -> np.ndarray:
    """Ordered product of the materialized steps, steps[0] acting first."""
    n = seq.dims[0] * seq.dims[1]
    if joint_dim is not None and joint_dim != n:
        raise ShapeError(f"sequence dims {seq.dims} do not match joint dim {joint_dim}")
    u = np.eye(n, dtype=complex)
    for step in seq.steps:
        u = step.matrix(seq.dims) @ u
    return u


def compile_exact(u, blocks: EnergyBlocks, tol: float = 1e-9) -> GateSequence:
    """Two-level elimination of each energy block's sub-unitary."""
    u = np.asarray(u, dtype=complex)
    if not is_energy_preserving(u, blocks, tol):
        i, j, mag = max_cross_block_entry(u, blocks)
        raise DomainError(
            f"unitary is not energy-preserving: entry ({i},{j}) couples "
            f"blocks with magnitude {mag:.3e}"
        )
    givens: list[GateStep] = []
    phases: list[GateStep] = []
    for energy, idx in blocks.blocks:
        idx = sorted(idx)
        flats = [blocks.flat(p) for p in idx]
        d = len(idx)
        a = u[np.ix_(flats, flats)].copy()
        block_rots: list[GateStep] = []
        for col in range(d - 1):
            for row in range(col + 1, d):
                b = a[row, col]
                if abs(b) < _ELIM_TOL:
                    continue
                x = a[col, col]
                r = math.hypot(abs(x), abs(b))
                # R zeroes a[row, col]; the emitted gate is R†.
                r2 = np.array([[np.conj(x), np.conj(b)], [-b, x]]) / r
                a[[col, row], :] = r2 @ a[[col, row], :]
                block_rots.append(
                    GateStep("givens", (idx[col], idx[row]), u2=r2.conj().T)
                )
        # a is now diagonal with unit-modulus phases.
        for k in range(d):
            theta = float(np.angle(a[k, k]))
            if abs(a[k, k] - 1.0) > 1e-12:
                phases.append(GateStep("p", (idx[k],), param=-theta))
        givens.extend(reversed(block_rots))
    # Phases act first; eliminations are undone outermost-last.
    return GateSequence(steps=phases + givens, method="exact", dims=blocks.dims)


def _sorted_coeffs(coeffs) -> list[tuple[ElementaryGenerator, float]]:
    items = list(coeffs.items()) if isinstance(coeffs, dict) else list(coeffs)
    items.sort(key=lambda t: t[0])
    return items


def compile_trotter(coeffs, t: float, m: int, dims: tuple[int, int]) -> GateSequence:
    """First-order product formula for exp(t * sum_j r_j K_j).

    One slice applies every generator in lexicographic order with parameter
    t*r_j/m; the slice repeats m times.  The reported bound uses the
    heuristic constant c=1 on the O(t^2/M) term.
    """
    if m <= 0:
        raise DomainError(f"trotter step count must be positive, got {m}")
    items = [(g, r) for g, r in _sorted_coeffs(coeffs) if r != 0.0]
    if not items or t == 0.0:
        return GateSequence(steps=[], method="trotter", dims=dims, trotter_m=m)
    slice_steps = [GateStep.from_generator(g, t * r / m) for g, r in items]
    total = sum(abs(r) for _, r in items)  # every kind has unit spectral norm
    bound = (t * total) ** 2 / m
    return GateSequence(
        steps=slice_steps * m, method="trotter", dims=dims,
        error_bound=bound, trotter_m=m,
    )


def _bch_group(j: ElementaryGenerator, k: ElementaryGenerator, s: float) -> list[GateStep]:
    # Product e^{-sJ} e^{-sK} e^{sJ} e^{sK}; steps listed first-acting first.
    return [
        GateStep.from_generator(k, s),
        GateStep.from_generator(j, s),
        GateStep.from_generator(k, -s),
        GateStep.from_generator(j, -s),
    ]


def compile_bch(j: ElementaryGenerator, k: ElementaryGenerator, t: float, m: int,
                dims: tuple[int, int]) -> GateSequence:
    """Group-commutator synthesis of exp(t [K_j, K_k]), 4m gates.

    Negative t swaps the pair ([K_k, K_j] = -[K_j, K_k]) so sqrt(t/m)
    stays real.  Error decays as t^{3/2}/sqrt(m).
    """
    if m <= 0:
        raise DomainError(f"bch step count must be positive, got {m}")
    if t < 0:
        j, k, t = k, j, -t
    if t == 0.0:
        return GateSequence(steps=[], method="bch", dims=dims, trotter_m=m)
    s = math.sqrt(t / m)
    steps = _bch_group(j, k, s) * m
    bound = t ** 1.5 / math.sqrt(m)
    return GateSequence(steps=steps, method="bch", dims=dims,
                        error_bound=bound, trotter_m=m)


@dataclass(frozen=True)
class GeneratorCombination:
    """Depth-1 description of -i H_int: linear terms plus single commutators."""

    linear: tuple[tuple[ElementaryGenerator, float], ...] = ()
    commutators: tuple[tuple[ElementaryGenerator, ElementaryGenerator, float], ...] = ()

    def __post_init__(self):
        for a, b, _ in self.commutators:
            if not (isinstance(a, ElementaryGenerator) and isinstance(b, ElementaryGenerator)):
                raise DomainError("commutator terms deeper than one level are unsupported")

    def target_matrix(self, dims: tuple[int, int]) -> np.ndarray:
        n = dims[0] * dims[1]
        k = np.zeros((n, n), dtype=complex)
        for g, c in self.linear:
            k += c * g.matrix(dims)
        for a, b, c in self.commutators:
            am, bm = a.matrix(dims), b.matrix(dims)
            k += c * (am @ bm - bm @ am)
        return k


def compile_nested(combo: GeneratorCombination, t: float, m: int,
                   dims: tuple[int, int]) -> GateSequence:
    """Outer Trotter over the combination's summands; each commutator
    summand is realized by one BCH group per slice."""
    if m <= 0:
        raise DomainError(f"step count must be positive, got {m}")
    if not combo.commutators:
        return compile_trotter(dict(combo.linear), t, m, dims)
    if not combo.linear and len(combo.commutators) == 1:
        a, b, c = combo.commutators[0]
        return compile_bch(a, b, t * c, m, dims)
    slice_steps: list[GateStep] = [
        GateStep.from_generator(g, t * c / m)
        for g, c in sorted(combo.linear, key=lambda p: p[0])
        if c != 0.0
    ]
    for a, b, c in combo.commutators:
        tc = t * c / m
        if tc == 0.0:
            continue
        if tc < 0:
            a, b, tc = b, a, -tc
        slice_steps.extend(_bch_group(a, b, math.sqrt(tc)))
    return GateSequence(steps=slice_steps * m, method="nested", dims=dims,
                        trotter_m=m)
