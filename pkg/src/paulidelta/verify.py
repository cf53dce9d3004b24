"""Seeded self-check suites: cross-engine agreement and channel identities.

Each suite runs a number of randomized cases and reports failures as
human-readable strings; all suites passing is strong evidence that the two
engines implement the same map and that the channel-level identities the
bound machinery relies on hold numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import (
    BUILTIN_MATRICES,
    OneQubitGate,
    RswChannel,
    UnitaryMixture,
    beta_of_gate,
    cnot_pauli_action,
    gate_ptm,
    ptm_of_unitary,
    validate_gate,
)
from .circuit import NoiseModel, haar_unitary, random_circuit
from .paulis import CoeffVector, PauliString, coeffs_from_op, pauli_conjugation_oracle, sum_of_squares
from .simulate import (
    InputPair,
    born_probability_one,
    evolve_density,
    evolve_pauli,
    full_cut,
    output_distinguishability,
    random_hermitian,
    random_pure_density,
    shrink_coeffs,
)

ENGINE_POOL = ("CNOT", "H", "S", "T", "RESET", "ID", "RANDMIX2")


@dataclass
class SuiteResult:
    name: str
    cases: int
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _random_one_qubit_gate(rng: np.random.Generator) -> OneQubitGate:
    nterms = int(rng.integers(1, 4))
    probs = rng.dirichlet(np.ones(nterms))
    terms = []
    for p in probs:
        ch = RswChannel(
            lam1=float(rng.uniform(-1, 1)),
            lam2=float(rng.uniform(-1, 1)),
            t_sign=int(rng.choice([-1, 1])),
            pre_unitary=haar_unitary(2, rng),
            post_unitary=haar_unitary(2, rng),
        )
        terms.append((float(p), ch))
    return OneQubitGate(terms)


def suite_engine_equivalence(seed: int, cases: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("engine-equivalence", cases)
    for i in range(cases):
        n = int(rng.integers(2, 4))
        t = int(rng.integers(1, 4))
        circ = random_circuit(
            n, t, seed=int(rng.integers(1 << 31)), gate_pool=ENGINE_POOL, k=2,
            noise=NoiseModel(0.05 + 0.1 * rng.random(), 0.4 + 0.1 * rng.random()),
        )
        delta = random_hermitian(n, rng)
        dense = coeffs_from_op(evolve_density(circ, delta, full_cut(circ)))
        pauli = evolve_pauli(circ, coeffs_from_op(delta), full_cut(circ))
        err = float(np.max(np.abs(dense.values - pauli.values)))
        if err > 1e-9:
            res.failures.append(f"case {i}: engines differ by {err:.3g}")
    return res


def suite_unitary_sum_of_squares(seed: int, cases: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("unitary-sum-of-squares", cases)
    for i in range(cases):
        k = int(rng.integers(1, 3))
        u = haar_unitary(2**k, rng)
        v = CoeffVector(k, rng.normal(size=4**k))
        w = CoeffVector(k, ptm_of_unitary(u).apply(v.values))
        if abs(sum_of_squares(w) - sum_of_squares(v)) > 1e-9:
            res.failures.append(f"case {i}: sum of squares not preserved")
    return res


def suite_noise_shrink(seed: int, cases: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("noise-shrink", cases)
    for i in range(cases):
        n = int(rng.integers(1, 4))
        wire = int(rng.integers(n))
        p = float(rng.random())
        v = rng.normal(size=4**n)
        out = shrink_coeffs(v, n, wire, p)
        for s_idx in range(4**n):
            s = PauliString.from_index(n, s_idx)
            expect = v[s_idx] * (1 - p) if wire in s.support() else v[s_idx]
            if out[s_idx] != expect:
                res.failures.append(f"case {i}: coefficient {s.label()} wrong")
                break
    return res


def suite_output_statistic(seed: int, cases: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("output-statistic", cases)
    for i in range(cases):
        n = int(rng.integers(1, 4))
        t = int(rng.integers(1, 4))
        circ = random_circuit(
            n, t, seed=int(rng.integers(1 << 31)),
            gate_pool=ENGINE_POOL if n >= 2 else ("H", "S", "RESET", "ID"),
            k=2 if n >= 2 else 1,
        )
        pair = InputPair(random_pure_density(n, rng), random_pure_density(n, rng))
        measured = output_distinguishability(circ, pair)
        p_rho = born_probability_one(
            evolve_density(circ, pair.rho, full_cut(circ)), circ.output_wire, n
        )
        p_tau = born_probability_one(
            evolve_density(circ, pair.tau, full_cut(circ)), circ.output_wire, n
        )
        if abs(measured - abs(p_rho - p_tau)) > 1e-10:
            res.failures.append(f"case {i}: disagrees with Born difference")
    return res


def suite_convexity(seed: int, cases: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("convexity", cases)
    for i in range(cases):
        k = int(rng.integers(1, 3))
        nterms = int(rng.integers(2, 4))
        probs = rng.dirichlet(np.ones(nterms))
        us = [haar_unitary(2**k, rng) for _ in range(nterms)]
        mix = UnitaryMixture(k, list(zip(map(float, probs), us)))
        v = rng.normal(size=4**k)
        mixed = gate_ptm(mix).m @ v
        branch = sum(
            p * float(np.dot(ptm_of_unitary(u).m @ v, ptm_of_unitary(u).m @ v))
            for p, u in zip(probs, us)
        )
        if float(np.dot(mixed, mixed)) > branch + 1e-9:
            res.failures.append(f"case {i}: convexity violated")
    return res


def suite_one_qubit_beta_bound(seed: int, cases: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("one-qubit-beta-bound", cases)
    xyz = [PauliString.from_label(c).index() for c in "XYZ"]
    for i in range(cases):
        g = _random_one_qubit_gate(rng)
        beta = beta_of_gate(g)
        v = coeffs_from_op(random_hermitian(1, rng)).values
        w = gate_ptm(g).m @ v
        lhs = sum(w[j] ** 2 for j in xyz)
        rhs = (1 - beta) * v[0] ** 2 + beta * sum(v[j] ** 2 for j in xyz)
        if not 0.0 <= beta <= 1.0:
            res.failures.append(f"case {i}: beta {beta} outside [0,1]")
        elif lhs > rhs + 1e-9:
            res.failures.append(f"case {i}: beta bound violated by {lhs - rhs:.3g}")
    return res


def suite_cnot_table(seed: int, cases: int) -> SuiteResult:
    res = SuiteResult("cnot-table", 16 if cases else 0)
    if not cases:
        return res
    cnot = BUILTIN_MATRICES["CNOT"]
    for a in "IXYZ":
        for b in "IXYZ":
            r = PauliString.from_label(a + b)
            got = cnot_pauli_action(r)
            want = pauli_conjugation_oracle(cnot, r)
            if not isinstance(want, tuple) or got != want:
                res.failures.append(f"{a}{b}: table disagrees with conjugation")
                continue
            out, _ = got
            in_i_star = a == "I" and b != "I"
            in_star_i = a != "I" and b == "I"
            out_i_star = out.letter(0) == "I" and out.letter(1) != "I"
            out_star_i = out.letter(0) != "I" and out.letter(1) == "I"
            if (in_i_star and out_star_i) or (in_star_i and out_i_star):
                res.failures.append(f"{a}{b}: crosses the I-block boundary")
    return res


def suite_gate_validation(seed: int, cases: int) -> SuiteResult:
    res = SuiteResult("gate-validation", 3 if cases else 0)
    if not cases:
        return res
    bad_mix = UnitaryMixture(1, [(0.5, np.eye(2)), (0.4, BUILTIN_MATRICES["H"])])
    if not any("probabilities" in p for p in validate_gate(bad_mix)):
        res.failures.append("mixture with weights summing to 0.9 not rejected")
    bad_rsw = OneQubitGate([(1.0, RswChannel(1.2, 0.5))])
    if not any("lambda range" in p for p in validate_gate(bad_rsw)):
        res.failures.append("lambda outside [-1,1] not rejected")
    bad_u = UnitaryMixture(1, [(1.0, np.array([[1, 1], [0, 1]], dtype=complex))])
    if not any("unitarity" in p for p in validate_gate(bad_u)):
        res.failures.append("non-unitary mixture term not rejected")
    return res


def run_all(seed: int, cases: int) -> list[SuiteResult]:
    return [
        suite_engine_equivalence(seed, cases),
        suite_unitary_sum_of_squares(seed + 1, cases),
        suite_noise_shrink(seed + 2, cases),
        suite_output_statistic(seed + 3, cases),
        suite_convexity(seed + 4, cases),
        suite_one_qubit_beta_bound(seed + 5, cases),
        suite_cnot_table(seed + 6, cases),
        suite_gate_validation(seed + 7, cases),
    ]
