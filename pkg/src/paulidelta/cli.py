"""Command-line surface: thresholds, decay experiments, invariant audits,
self-verification, the CNOT conjugation table, and single runs.

Exit codes: 0 = all checks pass, 1 = a bound or invariant was violated,
2 = usage or configuration error.  With a fixed seed every command writes
byte-identical output files on repeated runs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .bounds import (
    CONSTRAINT_FORMULAS,
    MARGIN_TOL,
    audit_invariant,
    cnot_threshold,
    decay_table,
    epsk_threshold,
    theta_for,
)
from .channels import cnot_pauli_action
from .circuit import Circuit, NoiseModel, circuit_from_json, parse_circuit, random_circuit
from .paulis import PauliString
from .simulate import InputPair, basis_density, output_distinguishability, sample_output_difference


@dataclass
class ExperimentConfig:
    """Resolved circuit + input pair + depth range for an experiment."""

    circuit: Circuit
    pair: InputPair
    t_values: list[int]
    out: str | None
    fmt: str
    seed: int | None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="RNG seed (required for --random)")
    p.add_argument("--out", default=None, help="write machine output to this file")
    p.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for audits")


def _add_circuit_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--circuit", default=None, help="circuit file (.json or DSL)")
    p.add_argument(
        "--random",
        default=None,
        help="random circuit spec, e.g. 'n=3,T=4,pool=CNOT|H|ID'",
    )
    p.add_argument("--eps1", type=float, default=0.05, help="eps1 for --random")
    p.add_argument("--epsk", type=float, default=0.4, help="epsk for --random")
    p.add_argument("--rho", default=None, help="rho as a bit string (default all zeros)")
    p.add_argument("--tau", default=None, help="tau as a bit string (default all ones)")


class UsageError(Exception):
    pass


def _load_circuit(args) -> Circuit:
    if bool(args.circuit) == bool(args.random):
        raise UsageError("provide exactly one of --circuit and --random")
    if args.circuit:
        path = Path(args.circuit)
        if not path.exists():
            raise UsageError(f"no such circuit file: {path}")
        text = path.read_text()
        return circuit_from_json(text) if path.suffix == ".json" else parse_circuit(text)
    spec = {}
    for piece in args.random.split(","):
        key, eq, val = piece.partition("=")
        if not eq:
            raise UsageError(f"bad --random entry {piece!r}")
        spec[key.strip()] = val.strip()
    try:
        n = int(spec["n"])
        t = int(spec["T"])
        pool = tuple(p for p in spec["pool"].replace("+", "|").split("|") if p)
    except KeyError as e:
        raise UsageError(f"--random spec missing {e.args[0]}") from None
    if args.seed is None:
        raise UsageError("--random requires an explicit --seed")
    k = int(spec.get("k", 2))
    return random_circuit(
        n, t, seed=args.seed, gate_pool=pool, k=k, noise=NoiseModel(args.eps1, args.epsk)
    )


def _input_pair(args, circ: Circuit) -> tuple[InputPair, str, str]:
    rho_bits = args.rho if args.rho is not None else "0" * circ.n
    tau_bits = args.tau if args.tau is not None else "1" * circ.n
    for name, bits in (("rho", rho_bits), ("tau", tau_bits)):
        if len(bits) != circ.n or set(bits) - {"0", "1"}:
            raise UsageError(f"--{name} must be {circ.n} bits of 0/1, got {bits!r}")
    return InputPair(basis_density(rho_bits), basis_density(tau_bits)), rho_bits, tau_bits


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# --- subcommands ----------------------------------------------------------


def cmd_threshold(args) -> int:
    lines = [f"epsk_threshold(k={args.k}) {epsk_threshold(args.k):.6f}"]
    if args.cnot_only:
        lines.append(f"cnot_threshold {cnot_threshold():.6f}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _theta_or_refuse(noise: NoiseModel, k: int, cnot_only: bool):
    result = theta_for(noise, k, cnot_only)
    if not result.feasible:
        formula = CONSTRAINT_FORMULAS[result.binding_constraint]
        raise UsageError(
            f"no feasible theta: binding constraint {formula} gives "
            f"theta={result.theta:.6f} >= 1 for eps1={noise.eps1}, epsk={noise.epsk}"
        )
    return result


def cmd_decay(args) -> int:
    circ = _load_circuit(args)
    pair, _, _ = _input_pair(args, circ)
    k = args.k if args.k is not None else max(2, circ.max_arity)
    result = _theta_or_refuse(circ.noise, k, args.cnot_only)
    t_max = args.t_max if args.t_max is not None else circ.T
    if not 1 <= args.t_min <= t_max <= circ.T:
        raise UsageError(f"bad depth range [{args.t_min}, {t_max}] for a {circ.T}-level circuit")
    ts = list(range(args.t_min, t_max + 1))
    rows = decay_table(circ, pair, ts, result.theta)
    if args.fmt == "csv":
        text = "T,measured,bound\n" + "".join(
            f"{t},{_fmt(m)},{_fmt(b)}\n" for t, m, b in rows
        )
    else:
        text = json.dumps(
            [{"T": t, "measured": m, "bound": b} for t, m, b in rows], indent=2
        ) + "\n"
    _emit(text, args.out)
    violations = [t for t, m, b in rows if m > b + MARGIN_TOL]
    if args.out:
        print(
            f"theta={result.theta:.6f} ({result.binding_constraint} binding), "
            f"{len(rows)} rows, {len(violations)} violations"
        )
    if violations:
        print(f"bound violated at T={violations}", file=sys.stderr)
        return 1
    return 0


def cmd_check_invariant(args) -> int:
    circ = _load_circuit(args)
    pair, _, _ = _input_pair(args, circ)
    k = args.k if args.k is not None else max(2, circ.max_arity)
    forced = args.force_theta is not None
    if forced:
        theta = args.force_theta
        binding = "forced"
    else:
        result = _theta_or_refuse(circ.noise, k, args.cnot_only)
        theta, binding = result.theta, result.binding_constraint
    try:
        report = audit_invariant(
            circ, pair, theta, args.max_set_size, max_sets=args.max_sets, jobs=args.jobs
        )
    except RuntimeError as e:
        raise UsageError(str(e)) from None
    worst = min(report.records, key=lambda r: r.margin, default=None)
    doc = {
        "theta": theta,
        "binding_constraint": binding,
        "forced": forced,
        "max_set_size": args.max_set_size,
        "sets_checked": len(report.records),
        "failures": len(report.failures),
        "min_margin": report.min_margin if report.records else None,
        "worst": None
        if worst is None
        else {
            "qubits": [list(q) for q in worst.qubits],
            "dist": worst.dist if worst.dist != float("inf") else "inf",
            "lhs": worst.lhs,
            "rhs": worst.rhs,
            "margin": worst.margin,
        },
        "failing": [
            {
                "qubits": [list(q) for q in r.qubits],
                "dist": r.dist if r.dist != float("inf") else "inf",
                "lhs": r.lhs,
                "rhs": r.rhs,
                "margin": r.margin,
            }
            for r in report.failures
        ],
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    if forced:
        print(
            "warning: theta was forced; margins are exploratory and do not "
            "assert a violation",
            file=sys.stderr,
        )
        return 0
    return 0 if report.all_pass else 1


def cmd_verify(args) -> int:
    from .verify import run_all

    seed = args.seed if args.seed is not None else 0
    results = run_all(seed, args.cases)
    lines = [f"{r.name}: {r.cases} cases, {len(r.failures)} failures" for r in results]
    failed = [r for r in results if not r.passed]
    lines.append("FAIL" if failed else "PASS")
    _emit("\n".join(lines) + "\n", args.out)
    for r in failed:
        for f in r.failures[:5]:
            print(f"{r.name}: {f}", file=sys.stderr)
    return 1 if failed else 0


def _block_tag(s: PauliString) -> str:
    a, b = s.letter(0), s.letter(1)
    if a == "I" and b == "I":
        return "II"
    if a == "I":
        return "I*"
    if b == "I":
        return "*I"
    return "**"


def cmd_cnot_table(args) -> int:
    lines = ["input output sign  in  out"]
    for a in "IXYZ":
        for b in "IXYZ":
            r = PauliString.from_label(a + b)
            out, sign = cnot_pauli_action(r)
            lines.append(
                f"{r.label():<5} {out.label():<6} {'+1' if sign > 0 else '-1':<4} "
                f"{_block_tag(r):<3} {_block_tag(out)}"
            )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    circ = _load_circuit(args)
    pair, rho_bits, tau_bits = _input_pair(args, circ)
    measured = output_distinguishability(circ, pair)
    lines = [f"distinguishability {_fmt(measured)}"]
    if args.shots:
        seed = args.seed if args.seed is not None else 0
        est = sample_output_difference(circ, rho_bits, tau_bits, args.shots, seed)
        lines.append(f"sampled({args.shots} shots) {_fmt(est)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paulidelta",
        description="Evolve state differences through leveled noisy circuits "
        "and check fault-tolerance upper-bound machinery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", help="print closed-form noise thresholds")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cnot-only", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_threshold)

    p = sub.add_parser(
        "decay",
        help="measured output distinguishability vs the theta^(T/2) bound over "
        "prefixes of one circuit (prefixes keep the experiment monotone-comparable)",
    )
    _add_circuit_source(p)
    p.add_argument("--t-min", type=int, default=1)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--k", type=int, default=None, help="override the gate-arity k")
    p.add_argument("--cnot-only", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_decay)

    p = sub.add_parser("check-invariant", help="audit the shrink invariant over consistent sets")
    _add_circuit_source(p)
    p.add_argument("--max-set-size", type=int, default=3)
    p.add_argument("--max-sets", type=int, default=None, help="enumeration budget")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--cnot-only", action="store_true")
    p.add_argument(
        "--force-theta",
        type=float,
        default=None,
        help="exploratory: audit against this theta and report margins only",
    )
    _add_common(p)
    p.set_defaults(fn=cmd_check_invariant)

    p = sub.add_parser("verify", help="run the seeded self-check suites")
    p.add_argument("--cases", type=int, default=25)
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("cnot-table", help="print the CNOT conjugation table")
    _add_common(p)
    p.set_defaults(fn=cmd_cnot_table)

    p = sub.add_parser("simulate", help="single-run output distinguishability")
    _add_circuit_source(p)
    p.add_argument("--shots", type=int, default=0, help="add a trajectory-sampling estimate")
    _add_common(p)
    p.set_defaults(fn=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
