"""Command-line frontend: compile, cool, verify, curve, simulate.

Exit codes: 0 success, 2 parse failure, 3 domain violation, 4 capacity,
5 coherence guard.  Every command prints one RunReport as JSON; reruns
are byte-identical modulo the wall_time field.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cooling
from .compiler import (
    GateSequence,
    GeneratorCombination,
    compile_exact,
    compile_nested,
    compile_trotter,
    reconstruct,
)
from .errors import (
    CapacityError,
    CoherenceError,
    DomainError,
    PreconditionError,
    ShapeError,
)
from .generators import ElementaryGenerator, enumerate_basis
from .linalg import frobenius_distance
from .majorization import max_ground_population_TO, thermo_curve, thermo_majorizes
from .channels import run_gc_eto
from .thermal import DiagonalState, Spectrum, energy_blocks, is_energy_preserving
from .verify import SUITES, run_suites

DEFAULT_SEED = 7
M_CAP = 1 << 14


@dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    wall_time: float = 0.0

    def add_check(self, name: str, passed: bool, measured: float, tolerance: float) -> None:
        self.checks.append(
            {"name": name, "pass": bool(passed), "measured": float(measured),
             "tolerance": float(tolerance)}
        )

    @property
    def all_pass(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def emit(self) -> int:
        payload = {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": self.checks,
            "wall_time": self.wall_time,
        }
        json.dump(payload, sys.stdout, indent=1, sort_keys=True)
        sys.stdout.write("\n")
        return 0 if self.all_pass else 1


def _load_json(path: str):
    with open(path) as f:
        return json.load(f)


def _load_matrix(path: str) -> np.ndarray:
    obj = _load_json(path)
    if "re" not in obj or "im" not in obj:
        raise KeyError("matrix JSON needs 're' and 'im' keys")
    return np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)


def _load_state(path: str, coherence_guard: bool = False):
    """Returns (dense matrix, populations-or-None)."""
    obj = _load_json(path)
    if "populations" in obj:
        p = DiagonalState(np.array(obj["populations"], dtype=float))
        return p.to_dense(), p
    rho = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
    off = rho - np.diag(np.diag(rho))
    if coherence_guard and np.abs(off).sum() > 1e-10:
        raise CoherenceError(
            f"state has off-diagonal mass {np.abs(off).sum():.3e}; "
            "dephasing is not silently applied"
        )
    if np.abs(off).sum() <= 1e-10:
        return rho, DiagonalState(np.clip(np.real(np.diag(rho)), 0, None))
    return rho, None


def _seed_from_env(default: int) -> int:
    return int(os.environ.get("THERMOFORGE_SEED", default))


# ---------------------------------------------------------------- compile

def _log_unitary(u: np.ndarray) -> np.ndarray:
    """Anti-Hermitian K with e^K = u (principal branch), via Schur form."""
    from scipy.linalg import schur

    t, z = schur(u, output="complex")
    phases = np.log(np.diag(t))
    k = z @ np.diag(phases) @ z.conj().T
    return (k - k.conj().T) / 2


def _expand_in_basis(k: np.ndarray, blocks) -> dict[ElementaryGenerator, float]:
    """Coefficients of K over the orthogonal h/m/p basis."""
    coeffs = {}
    for gen in enumerate_basis(blocks, include_rank1=True):
        gm = gen.matrix(blocks.dims)
        norm2 = np.real(np.trace(gm.conj().T @ gm))
        r = float(np.real(np.trace(gm.conj().T @ k)) / norm2)
        if abs(r) > 1e-14:
            coeffs[gen] = r
    return coeffs


def _rank2_combination(k: np.ndarray, blocks) -> GeneratorCombination:
    """Depth-1 rank-2-only description of K: h/m linear terms plus
    f-type commutators and one g_diag per block for the diagonal part."""
    linear: list[tuple[ElementaryGenerator, float]] = []
    comms: list[tuple[ElementaryGenerator, ElementaryGenerator, float]] = []
    for energy, idx in blocks.blocks:
        idx = sorted(idx)
        d = len(idx)
        flats = [blocks.flat(p) for p in idx]
        diag = np.array([np.imag(k[f, f]) for f in flats])
        if d == 1:
            if abs(diag[0]) > 1e-12:
                raise DomainError(
                    f"singleton block at energy {energy} carries a phase; "
                    "tensor a two-level zero-energy catalyst to double it"
                )
            continue
        for i in range(d):
            for j in range(i + 1, d):
                gh = ElementaryGenerator("h", energy, idx[i], idx[j])
                gm = ElementaryGenerator("m", energy, idx[i], idx[j])
                for g in (gh, gm):
                    m = g.matrix(blocks.dims)
                    r = float(np.real(np.trace(m.conj().T @ k)) / 2.0)
                    if abs(r) > 1e-14:
                        linear.append((g, r))
        # diag = sum c_i * f_(i,i+1) + c_g * g_(0,1) in the +/-1 patterns.
        cols = np.zeros((d, d))
        for i in range(d - 1):
            cols[i, i], cols[i + 1, i] = 1.0, -1.0
        cols[0, d - 1] = cols[1, d - 1] = 1.0
        sol = np.linalg.solve(cols, diag)
        for i in range(d - 1):
            if abs(sol[i]) > 1e-14:
                gh = ElementaryGenerator("h", energy, idx[i], idx[i + 1])
                gm = ElementaryGenerator("m", energy, idx[i], idx[i + 1])
                comms.append((gh, gm, float(sol[i]) / 2.0))
        if abs(sol[d - 1]) > 1e-14:
            linear.append((ElementaryGenerator("g_diag", energy, idx[0], idx[1]), float(sol[d - 1])))
    return GeneratorCombination(linear=tuple(linear), commutators=tuple(comms))


def cmd_compile(args) -> int:
    t0 = time.perf_counter()
    spec_s = Spectrum.from_json(args.system)
    spec_c = Spectrum.from_json(args.catalyst)
    u = _load_matrix(args.unitary)
    blocks = energy_blocks(spec_s, spec_c)
    if not is_energy_preserving(u, blocks, tol=1e-9):
        from .thermal import max_cross_block_entry

        i, j, mag = max_cross_block_entry(u, blocks)
        raise DomainError(
            f"unitary entry ({i},{j}) of magnitude {mag:.3e} couples energy blocks"
        )
    report = RunReport(
        command="compile",
        inputs={"system": args.system, "catalyst": args.catalyst,
                "unitary": args.unitary, "method": args.method,
                "accuracy": args.accuracy},
    )
    if args.method == "exact":
        seq = compile_exact(u, blocks)
        err = frobenius_distance(reconstruct(seq), u)
        report.add_check("reconstruction_error", err < 1e-8, err, 1e-8)
    else:
        k = _log_unitary(u)
        if args.method == "trotter":
            coeffs = _expand_in_basis(k, blocks)
            resid = frobenius_distance(
                sum((r * g.matrix(blocks.dims) for g, r in coeffs.items()),
                    np.zeros_like(k)),
                k,
            )
            if resid > 1e-8:
                raise DomainError(f"generator expansion residual {resid:.3e}")
            build = lambda m: compile_trotter(coeffs, 1.0, m, blocks.dims)
        else:  # bch
            combo = _rank2_combination(k, blocks)
            build = lambda m: compile_nested(combo, 1.0, m, blocks.dims)
        m, err, seq = 1, np.inf, None
        while m <= M_CAP:
            seq = build(m)
            err = frobenius_distance(reconstruct(seq), u)
            if err < args.accuracy:
                break
            m *= 2
        report.outputs["trotter_m"] = seq.trotter_m
        report.add_check("reconstruction_error", err < args.accuracy, err, args.accuracy)
    report.outputs["gate_count"] = len(seq)
    report.outputs["method"] = seq.method
    report.outputs["error_bound"] = seq.error_bound
    if args.out:
        seq.save(args.out)
        report.outputs["sequence_file"] = args.out
    report.wall_time = time.perf_counter() - t0
    return report.emit()


# ---------------------------------------------------------------- cool

def _cool_row(d: int) -> dict:
    final, inv = cooling.run_cooling(d)
    inst = cooling.build_cooling_instance(d)
    oracle = max_ground_population_TO(cooling.DEFAULT_INPUT, inst.system, inst.catalyst)
    g, e1, e2 = (float(x) for x in final.populations)
    return {
        "D": d,
        "ground": g,
        "excited1": e1,
        "excited2": e2,
        "invariant_level_population": inv,
        "closed_form_dev": max(abs(g - (1 - 1 / d)), abs(e1 - 1 / (2 * d)),
                               abs(e2 - 1 / (2 * d))),
        "invariant_dev": abs(inv - 2.0 ** (-d) / d),
        "to_limit_check": bool(abs(oracle - g) < 1e-12),
    }


def cmd_cool(args) -> int:
    t0 = time.perf_counter()
    if args.sweep:
        lo, hi = (int(x) for x in args.sweep.split(".."))
        ds = list(range(lo, hi + 1))
    else:
        if args.D is None:
            raise DomainError("either --D or --sweep is required")
        ds = [args.D]
    jobs = args.jobs or os.cpu_count() or 1
    if jobs > 1 and len(ds) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_cool_row, ds))
    else:
        rows = [_cool_row(d) for d in ds]
    report = RunReport(command="cool", inputs={"D": ds, "csv": args.csv})
    for row in rows:
        report.add_check(f"q_prime_closed_form_D{row['D']}",
                         row["closed_form_dev"] < 1e-12, row["closed_form_dev"], 1e-12)
        report.add_check(f"invariant_level_population_D{row['D']}",
                         row["invariant_dev"] < 1e-12, row["invariant_dev"], 1e-12)
        report.add_check(f"to_limit_check_D{row['D']}", row["to_limit_check"],
                         float(row["to_limit_check"]), 1.0)
    report.outputs["rows"] = rows
    if args.csv:
        with open(args.csv, "w", newline="") as f:
            w = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)
        report.outputs["csv_file"] = args.csv
    report.wall_time = time.perf_counter() - t0
    return report.emit()


# ---------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    seed = _seed_from_env(args.seed)
    report = RunReport(
        command="verify",
        inputs={"suite": args.suite, "seed": seed, "trials": args.trials},
    )
    results = run_suites(args.suite, seed, args.trials,
                         inject_failure=args.inject_failure)
    if args.trials == 0:
        report.outputs["note"] = "zero trials requested; vacuous pass"
    for r in results:
        report.add_check(r.name, r.passed, r.measured, r.tolerance)
    report.wall_time = time.perf_counter() - t0
    return report.emit()


# ---------------------------------------------------------------- curve

def cmd_curve(args) -> int:
    t0 = time.perf_counter()
    spec = Spectrum.from_json(args.spectrum)
    _, p = _load_state(args.state, coherence_guard=True)
    curve = thermo_curve(p, spec)
    report = RunReport(command="curve", inputs={"state": args.state,
                                                "spectrum": args.spectrum})
    report.outputs["vertices"] = [list(v) for v in curve.vertices]
    if args.out:
        with open(args.out, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["x", "y"])
            w.writerows(curve.vertices)
        report.outputs["csv_file"] = args.out
    if args.compare:
        _, q = _load_state(args.compare, coherence_guard=True)
        report.outputs["p_majorizes_q"] = thermo_majorizes(p, q, spec)
        report.outputs["q_majorizes_p"] = thermo_majorizes(q, p, spec)
    report.wall_time = time.perf_counter() - t0
    return report.emit()


# ---------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    rho, _ = _load_state(args.state)
    catalyst = Spectrum.from_json(args.catalyst)
    seq = GateSequence.from_json(args.gates)
    sigma, pre, post = run_gc_eto(rho, catalyst, seq,
                                  rethermalize=args.rethermalize,
                                  epsilon=args.epsilon)
    report = RunReport(
        command="simulate",
        inputs={"state": args.state, "catalyst": args.catalyst,
                "gates": args.gates, "rethermalize": args.rethermalize,
                "epsilon": args.epsilon},
    )
    report.outputs["system_populations"] = [float(x) for x in np.real(np.diag(sigma))]
    def verdict_json(v):
        return {
            "strict": v.strict,
            "correlated": v.correlated,
            "approximate": v.approximate(args.epsilon),
            "approximate_distance": v.approximate_distance,
            "catalyst_marginal_distance": v.catalyst_marginal_distance,
            "product_defect": v.product_defect,
        }
    report.outputs["pre_verdict"] = verdict_json(pre)
    if post is not None:
        report.outputs["post_verdict"] = verdict_json(post)
        report.add_check("rethermalized_strict", post.strict,
                         post.catalyst_marginal_distance, 1e-10)
    report.wall_time = time.perf_counter() - t0
    return report.emit()


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thermoforge")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="decompose an energy-preserving unitary")
    c.add_argument("--system", required=True)
    c.add_argument("--catalyst", required=True)
    c.add_argument("--unitary", required=True)
    c.add_argument("--method", choices=("exact", "trotter", "bch"), default="exact")
    c.add_argument("--accuracy", type=float, default=1e-6)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_compile)

    c = sub.add_parser("cool", help="run the qutrit cooling instance")
    c.add_argument("--D", type=int, default=None)
    c.add_argument("--sweep", default=None, help="range lo..hi")
    c.add_argument("--csv", default=None)
    c.add_argument("--jobs", type=int, default=None)
    c.set_defaults(func=cmd_cool)

    c = sub.add_parser("verify", help="run the randomized invariant suites")
    c.add_argument("--suite", choices=("all",) + SUITES, default="all")
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--jobs", type=int, default=None)
    c.add_argument("--inject-failure", action="store_true",
                   help="add a deliberately failing check (self-test)")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("curve", help="export a beta-ordered Lorenz curve")
    c.add_argument("--state", required=True)
    c.add_argument("--spectrum", required=True)
    c.add_argument("--compare", default=None)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_curve)

    c = sub.add_parser("simulate", help="run a gate sequence as a GC-ETO process")
    c.add_argument("--state", required=True)
    c.add_argument("--catalyst", required=True)
    c.add_argument("--gates", required=True)
    c.add_argument("--rethermalize", action="store_true")
    c.add_argument("--epsilon", type=float, default=1e-10)
    c.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as e:
        print(f"parse error: {e.msg} at line {e.lineno}, column {e.colno}", file=sys.stderr)
        return 2
    except (KeyError, FileNotFoundError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except CoherenceError as e:
        print(f"coherence guard: {e}", file=sys.stderr)
        return 5
    except CapacityError as e:
        print(f"capacity error: {e}", file=sys.stderr)
        return 4
    except (DomainError, PreconditionError, ShapeError) as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
