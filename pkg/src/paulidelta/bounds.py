"""Noise thresholds and the per-level shrink invariant.

For noise strengths above threshold there is a theta < 1 such that every
consistent set V of a leveled noisy circuit satisfies

    Tr(delta_V^2) <= 2 * theta^dist(V)

for the evolved difference delta of any two input states.  The minimal
theta permitted by the constraint system is computed here, the invariant
is audited numerically over enumerated consistent sets, and the resulting
output-distinguishability bound theta^(T/2) is exposed for decay
experiments.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .circuit import Circuit, ConsistentSet, NoiseModel, enumerate_consistent_sets
from .paulis import CoeffVector, coeffs_from_op, sum_of_squares
from .simulate import InputPair, evolve_pauli, min_cut, output_distinguishability, reduced_delta, restrict_coeffs

MARGIN_TOL = 1e-9

# Human-readable forms of the constraints bounding theta from below.
CONSTRAINT_FORMULAS = {
    "k-gate": "(1+mu^2)^k <= 2*theta",
    "one-qubit": "1+(1-eps1)^2 <= 2*theta",
    "cnot": "(1+mu^2)/2 + mu^4 <= theta",
}


def epsk_threshold(k: int) -> float:
    """Noise level 1 - sqrt(2^(1/k) - 1) above which the k-gate constraint
    admits a theta < 1."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 1.0 - math.sqrt(2 ** (1.0 / k) - 1.0)


def cnot_threshold() -> float:
    """The improved two-qubit threshold 1 - 1/sqrt(2) when CNOT is the only
    multi-qubit gate."""
    return 1.0 - 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class ThetaResult:
    """Minimal theta satisfying the active constraints; feasible iff < 1."""

    theta: float
    feasible: bool
    binding_constraint: str


def theta_for(noise: NoiseModel, k: int, cnot_only: bool = False) -> ThetaResult:
    """Minimal theta for a noise model.

    General mode takes the larger of (1+mu^2)^k / 2 (mu = 1 - epsk) and
    (1+(1-eps1)^2) / 2.  CNOT mode (k=2 only) replaces the first expression
    with (1+mu^2)/2 + mu^4.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if cnot_only and k != 2:
        raise ValueError("the CNOT refinement applies only to k=2")
    mu = 1.0 - noise.epsk
    one_qubit = (1.0 + (1.0 - noise.eps1) ** 2) / 2.0
    if cnot_only:
        gate_expr, gate_tag = (1.0 + mu**2) / 2.0 + mu**4, "cnot"
    else:
        gate_expr, gate_tag = (1.0 + mu**2) ** k / 2.0, "k-gate"
    if gate_expr >= one_qubit:
        theta, binding = gate_expr, gate_tag
    else:
        theta, binding = one_qubit, "one-qubit"
    return ThetaResult(theta, theta < 1.0, binding)


def decay_bound(theta: float, T: int) -> float:
    """theta^(T/2): upper bound on output distinguishability after T levels."""
    return theta ** (T / 2.0)


def sweep(
    eps1_values, epsk_values, k: int, cnot_only: bool = False
) -> list[tuple[float, float, ThetaResult]]:
    """theta over a noise grid, eps1 outer and epsk inner, in given order."""
    return [
        (e1, ek, theta_for(NoiseModel(e1, ek), k, cnot_only))
        for e1 in eps1_values
        for ek in epsk_values
    ]


@dataclass
class InvariantRecord:
    """One audited consistent set: lhs = Tr(delta_V^2), rhs = 2*theta^dist."""

    qubits: tuple[tuple[int, int], ...]
    dist: float
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + MARGIN_TOL


@dataclass
class InvariantReport:
    theta: float
    records: list[InvariantRecord]

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[InvariantRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def min_margin(self) -> float:
        return min((r.margin for r in self.records), default=math.inf)


def _record(vset: ConsistentSet, reduced: CoeffVector, theta: float) -> InvariantRecord:
    lhs = sum_of_squares(reduced) / 2 ** len(vset.qubits)
    rhs = 2.0 * theta**vset.dist
    refs = tuple(sorted((q.wire, q.time) for q in vset.qubits))
    return InvariantRecord(refs, vset.dist, lhs, rhs)


def invariant_check(
    circ: Circuit, pair: InputPair, vset: ConsistentSet, theta: float
) -> InvariantRecord:
    """Audit one consistent set against Tr(delta_V^2) <= 2*theta^dist(V)."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    reduced = reduced_delta(circ, pair.delta(), vset)
    return _record(vset, reduced, theta)


def audit_invariant(
    circ: Circuit,
    pair: InputPair,
    theta: float,
    max_size: int,
    max_sets: int | None = None,
    jobs: int = 1,
) -> InvariantReport:
    """Audit every consistent set of size <= max_size.

    Evolutions are cached per minimal cut, so sets sharing a cut reuse one
    evolution; records keep the enumeration order regardless of ``jobs``.
    """
    v0 = coeffs_from_op(pair.delta())
    cache: dict[frozenset, CoeffVector] = {}

    def evolved_for(vset: ConsistentSet) -> CoeffVector:
        cut = min_cut(circ, vset.qubits)
        if cut.gates not in cache:
            cache[cut.gates] = evolve_pauli(circ, v0, cut)
        return cache[cut.gates]

    def one(vset: ConsistentSet) -> InvariantRecord:
        reduced = restrict_coeffs(evolved_for(vset), [q.wire for q in vset.qubits])
        return _record(vset, reduced, theta)

    sets = list(enumerate_consistent_sets(circ, max_size, max_sets))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            records = list(ex.map(one, sets))
    else:
        records = [one(vset) for vset in sets]
    return InvariantReport(theta, records)


def decay_table(
    circ: Circuit, pair: InputPair, ts: list[int], theta: float
) -> list[tuple[int, float, float]]:
    """(T, measured, bound) rows over circuit prefixes of increasing depth."""
    rows = []
    for t in ts:
        measured = output_distinguishability(circ.prefix(t), pair)
        rows.append((t, measured, decay_bound(theta, t)))
    return rows
