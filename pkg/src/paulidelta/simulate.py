"""Dual evolution engines for the difference of two states.

The Pauli engine tracks the 4^n coefficient vector of delta = rho - tau:
unitary-mixture gates act through their transfer matrices and depolarizing
noise multiplies every coefficient supported on the noisy wire by (1 - p).
The density engine evolves the dense 2^n x 2^n matrix with embedded
unitary conjugations, Kraus pairs, and partial traces; it exists as an
independent cross-check of the Pauli engine.

Both engines apply a *cut*: a set of gates closed under input dependencies.
Gate internals are fixed: multi-qubit gates depolarize each input with
``epsk`` and then apply the mixture; one-qubit gates apply the channel and
then depolarize the output with ``eps1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .channels import (
    BuiltinGate,
    GateSpec,
    OneQubitGate,
    UnitaryMixture,
    gate_arity,
    gate_ptm,
    kraus_of_rsw,
    lower_builtin,
)
from .circuit import Circuit, ConsistentSet, QubitRef, is_consistent, required_gates
from .paulis import (
    MAX_COEFF_QUBITS,
    MAX_DENSE_QUBITS,
    PAULI_MATS,
    CoeffVector,
    coeffs_from_op,
)

PSD_TOL = 1e-10


@dataclass(frozen=True)
class Cut:
    """A set of (level, placement index) gate identities, downward-closed:
    whenever a gate is applied, so are all gates producing its inputs."""

    gates: frozenset[tuple[int, int]]

    def __contains__(self, key: tuple[int, int]) -> bool:
        return key in self.gates

    def __len__(self) -> int:
        return len(self.gates)


def full_cut(circ: Circuit) -> Cut:
    return Cut(
        frozenset(
            (level, i)
            for level in range(1, circ.T + 1)
            for i in range(len(circ.levels[level - 1]))
        )
    )


def min_cut(circ: Circuit, refs: Iterable[QubitRef]) -> Cut:
    """The smallest cut producing every qubit in ``refs``."""
    return Cut(frozenset(required_gates(refs, circ)))


def check_cut(circ: Circuit, cut: Cut) -> None:
    """Raise unless every gate exists and the cut is downward-closed."""
    for level, i in cut.gates:
        if not (1 <= level <= circ.T) or not (0 <= i < len(circ.levels[level - 1])):
            raise ValueError(f"cut names a nonexistent gate (level {level}, index {i})")
        if level == 1:
            continue
        for w in circ.levels[level - 1][i].wires:
            j, _ = circ.placement_on(level - 1, w)
            if (level - 1, j) not in cut.gates:
                raise ValueError(
                    f"cut is not downward-closed: gate (level {level}, index {i}) "
                    f"needs (level {level - 1}, index {j})"
                )


# --- input pairs and state constructors ----------------------------------


@dataclass
class InputPair:
    """Two n-qubit density matrices whose difference is evolved."""

    rho: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        self.tau = np.asarray(self.tau, dtype=complex)
        if self.rho.shape != self.tau.shape:
            raise ValueError("rho and tau have different shapes")
        for name, m in (("rho", self.rho), ("tau", self.tau)):
            if abs(np.trace(m) - 1.0) > PSD_TOL:
                raise ValueError(f"{name} has trace {np.trace(m)}, expected 1")
            if np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)) < -PSD_TOL:
                raise ValueError(f"{name} is not positive semidefinite")

    @property
    def n(self) -> int:
        return self.rho.shape[0].bit_length() - 1

    def delta(self) -> np.ndarray:
        return self.rho - self.tau


def basis_density(bits: str) -> np.ndarray:
    """|b><b| for a classical bit string; the first character is wire 0."""
    dim = 2 ** len(bits)
    idx = int(bits, 2)
    m = np.zeros((dim, dim), dtype=complex)
    m[idx, idx] = 1.0
    return m


def pure_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_pure_density(n: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return pure_density(psi)


def random_product_density(n: int, rng: np.random.Generator) -> np.ndarray:
    m = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        m = np.kron(m, random_pure_density(1, rng))
    return m


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    return (a + a.conj().T) / 2


# --- dense machinery ------------------------------------------------------


def _conjugate_dense(op: np.ndarray, m: np.ndarray, wires: tuple[int, ...], n: int) -> np.ndarray:
    """M op M^dagger with M acting on ``wires`` (first wire = leftmost factor)."""
    k = len(wires)
    mt = m.reshape((2,) * (2 * k))
    t = op.reshape((2,) * (2 * n))
    row_axes = list(wires)
    t = np.tensordot(mt, t, axes=(list(range(k, 2 * k)), row_axes))
    t = np.moveaxis(t, range(k), row_axes)
    col_axes = [n + w for w in wires]
    t = np.tensordot(np.conj(mt), t, axes=(list(range(k, 2 * k)), col_axes))
    t = np.moveaxis(t, range(k), col_axes)
    return t.reshape(2**n, 2**n)


def depolarize_dense(op: np.ndarray, wire: int, p: float, n: int) -> np.ndarray:
    out = (1 - 3 * p / 4) * op
    for letter in "XYZ":
        out = out + (p / 4) * _conjugate_dense(op, PAULI_MATS[letter], (wire,), n)
    return out


def partial_trace(op: np.ndarray, keep: Iterable[int], n: int) -> np.ndarray:
    """Trace out every wire not in ``keep``; kept wires stay in wire order."""
    keep = sorted(keep)
    t = op.reshape((2,) * (2 * n))
    subs = list(range(n)) + [n + j if j in keep else j for j in range(n)]
    out = [j for j in keep] + [n + j for j in keep]
    return np.einsum(t, subs, out).reshape(2 ** len(keep), 2 ** len(keep))


def _apply_gate_dense(op: np.ndarray, spec: GateSpec, wires: tuple[int, ...], n: int) -> np.ndarray:
    if isinstance(spec, BuiltinGate):
        spec = lower_builtin(spec)
    if isinstance(spec, UnitaryMixture):
        return sum(p * _conjugate_dense(op, u, wires, n) for p, u in spec.terms)
    if isinstance(spec, OneQubitGate):
        out = np.zeros_like(op)
        for p, ch in spec.terms:
            for kr in kraus_of_rsw(ch):
                out = out + p * _conjugate_dense(op, kr, wires, n)
        return out
    raise TypeError(f"not a gate spec: {spec!r}")


def evolve_density(circ: Circuit, op: np.ndarray, cut: Cut) -> np.ndarray:
    """Dense-matrix evolution through the gates of a cut, in level order."""
    op = np.asarray(op, dtype=complex)
    if circ.n > MAX_DENSE_QUBITS:
        raise ValueError(f"n={circ.n} exceeds the dense-engine cap {MAX_DENSE_QUBITS}")
    if op.shape != (2**circ.n, 2**circ.n):
        raise ValueError(f"operator shape {op.shape} does not match n={circ.n}")
    check_cut(circ, cut)
    for level in range(1, circ.T + 1):
        for i, pl in enumerate(circ.levels[level - 1]):
            if (level, i) not in cut.gates:
                continue
            if gate_arity(pl.gate) >= 2:
                for w in pl.wires:
                    op = depolarize_dense(op, w, circ.noise.epsk, circ.n)
                op = _apply_gate_dense(op, pl.gate, pl.wires, circ.n)
            else:
                op = _apply_gate_dense(op, pl.gate, pl.wires, circ.n)
                op = depolarize_dense(op, pl.wires[0], circ.noise.eps1, circ.n)
    return op


# --- Pauli-coefficient machinery ------------------------------------------


def shrink_coeffs(values: np.ndarray, n: int, wire: int, p: float) -> np.ndarray:
    """Multiply every coefficient whose string is supported on ``wire`` by 1-p."""
    t = values.reshape((4,) * n).copy() if n else values.copy()
    if n:
        sl = [slice(None)] * n
        sl[n - 1 - wire] = slice(1, 4)
        t[tuple(sl)] *= 1.0 - p
    return t.reshape(-1)


def _apply_ptm(tensor: np.ndarray, m: np.ndarray, wires: tuple[int, ...], n: int) -> np.ndarray:
    k = len(wires)
    mt = m.reshape((4,) * (2 * k))
    # input axis k+j of mt carries local site k-1-j, i.e. wire wires[k-1-j]
    taxes = [n - 1 - w for w in reversed(wires)]
    t = np.tensordot(mt, tensor, axes=(list(range(k, 2 * k)), taxes))
    return np.moveaxis(t, range(k), taxes)


def _circuit_ptms(circ: Circuit) -> dict[tuple[int, int], np.ndarray]:
    cache = circ.__dict__.get("_ptm_cache")
    if cache is None:
        cache = {}
        for level in range(1, circ.T + 1):
            for i, pl in enumerate(circ.levels[level - 1]):
                cache[(level, i)] = gate_ptm(pl.gate).m
        circ.__dict__["_ptm_cache"] = cache
    return cache


def evolve_pauli(circ: Circuit, v: CoeffVector, cut: Cut) -> CoeffVector:
    """Coefficient-vector evolution; the same map as :func:`evolve_density`."""
    if circ.n > MAX_COEFF_QUBITS:
        raise ValueError(f"n={circ.n} exceeds the coefficient-engine cap {MAX_COEFF_QUBITS}")
    if v.n != circ.n:
        raise ValueError(f"vector is on {v.n} qubits, circuit on {circ.n}")
    check_cut(circ, cut)
    ptms = _circuit_ptms(circ)
    values = v.values.copy()
    n = circ.n
    for level in range(1, circ.T + 1):
        for i, pl in enumerate(circ.levels[level - 1]):
            if (level, i) not in cut.gates:
                continue
            if gate_arity(pl.gate) >= 2:
                for w in pl.wires:
                    values = shrink_coeffs(values, n, w, circ.noise.epsk)
                t = _apply_ptm(values.reshape((4,) * n), ptms[(level, i)], pl.wires, n)
                values = t.reshape(-1)
            else:
                t = _apply_ptm(values.reshape((4,) * n), ptms[(level, i)], pl.wires, n)
                values = shrink_coeffs(t.reshape(-1), n, pl.wires[0], circ.noise.eps1)
    return CoeffVector(n, values)


def restrict_coeffs(v: CoeffVector, wires: Iterable[int]) -> CoeffVector:
    """Keep the coefficients of strings supported inside ``wires``.

    Implements the trace-out rule: the reduced operator's coefficient at S
    equals the full operator's coefficient at S (x) I-elsewhere.  Kept wires
    map to local sites in increasing wire order.
    """
    wires = sorted(wires)
    n = v.n
    t = v.values.reshape((4,) * n) if n else v.values
    sl = tuple(
        slice(None) if (n - 1 - axis) in wires else 0 for axis in range(n)
    )
    return CoeffVector(len(wires), t[sl].reshape(-1).copy())


def reduced_delta(circ: Circuit, delta0: np.ndarray, vset: ConsistentSet) -> CoeffVector:
    """Coefficients of the difference reduced to a consistent set.

    Evolves through the minimal cut producing the set, then keeps the
    coefficients supported on the set's wires.
    """
    refs = vset.qubits
    if not is_consistent(refs, circ):
        raise ValueError("set is not consistent")
    v0 = coeffs_from_op(delta0)
    evolved = evolve_pauli(circ, v0, min_cut(circ, refs))
    return restrict_coeffs(evolved, [q.wire for q in refs])


def born_probability_one(op: np.ndarray, wire: int, n: int) -> float:
    """Tr(op * |1><1|_wire): outcome-1 probability when op is a state."""
    reduced = partial_trace(op, [wire], n)
    return float(reduced[1, 1].real)


def output_distinguishability(circ: Circuit, pair: InputPair) -> float:
    """Half the magnitude of the evolved difference's Z coefficient at the
    output qubit; equals |Pr[1 | rho] - Pr[1 | tau]|."""
    if pair.n != circ.n:
        raise ValueError(f"input pair is on {pair.n} qubits, circuit on {circ.n}")
    out = ConsistentSet.build(circ, [QubitRef(circ.output_wire, circ.T)])
    v = reduced_delta(circ, pair.delta(), out)
    return 0.5 * abs(v["Z"])


# --- trajectory sampling (demonstration only) ------------------------------


def _apply_unitary_state(psi: np.ndarray, u: np.ndarray, wires: tuple[int, ...], n: int) -> np.ndarray:
    k = len(wires)
    ut = u.reshape((2,) * (2 * k))
    t = np.tensordot(ut, psi.reshape((2,) * n), axes=(list(range(k, 2 * k)), list(wires)))
    return np.moveaxis(t, range(k), wires).reshape(-1)


def _sample_trajectory_p1(circ: Circuit, psi: np.ndarray, rng: np.random.Generator) -> float:
    pauli_ops = [PAULI_MATS[c] for c in "IXYZ"]
    n = circ.n
    for level in range(1, circ.T + 1):
        for pl in circ.levels[level - 1]:
            spec = lower_builtin(pl.gate) if isinstance(pl.gate, BuiltinGate) else pl.gate
            if gate_arity(pl.gate) >= 2:
                p = circ.noise.epsk
                for w in pl.wires:
                    choice = rng.choice(4, p=[1 - 3 * p / 4, p / 4, p / 4, p / 4])
                    if choice:
                        psi = _apply_unitary_state(psi, pauli_ops[choice], (w,), n)
                probs = np.array([q for q, _ in spec.terms])
                u = spec.terms[int(rng.choice(len(probs), p=probs / probs.sum()))][1]
                psi = _apply_unitary_state(psi, u, pl.wires, n)
            else:
                if isinstance(spec, UnitaryMixture):
                    probs = np.array([q for q, _ in spec.terms])
                    u = spec.terms[int(rng.choice(len(probs), p=probs / probs.sum()))][1]
                    psi = _apply_unitary_state(psi, u, pl.wires, n)
                else:
                    probs = np.array([q for q, _ in spec.terms])
                    ch = spec.terms[int(rng.choice(len(probs), p=probs / probs.sum()))][1]
                    k1, k2 = kraus_of_rsw(ch)
                    psi1 = _apply_unitary_state(psi, k1, pl.wires, n)
                    w1 = float(np.vdot(psi1, psi1).real)
                    if rng.random() < w1:
                        psi = psi1 / max(np.sqrt(w1), 1e-300)
                    else:
                        psi2 = _apply_unitary_state(psi, k2, pl.wires, n)
                        psi = psi2 / max(np.linalg.norm(psi2), 1e-300)
                p = circ.noise.eps1
                choice = rng.choice(4, p=[1 - 3 * p / 4, p / 4, p / 4, p / 4])
                if choice:
                    psi = _apply_unitary_state(psi, pauli_ops[choice], pl.wires, n)
    t = np.abs(psi.reshape((2,) * n)) ** 2
    sl = [slice(None)] * n
    sl[circ.output_wire] = 1
    return float(np.sum(t[tuple(sl)]))


def sample_output_difference(
    circ: Circuit, rho_bits: str, tau_bits: str, shots: int, seed: int
) -> float:
    """Monte-Carlo estimate of the output-probability difference.

    Samples mixture branches, Kraus branches, and depolarizing events on
    pure-state trajectories; the exact engines remain the reference.
    """
    rng = np.random.default_rng(seed)
    est = []
    for bits in (rho_bits, tau_bits):
        psi0 = np.zeros(2**circ.n, dtype=complex)
        psi0[int(bits, 2)] = 1.0
        est.append(
            sum(_sample_trajectory_p1(circ, psi0, rng) for _ in range(shots)) / shots
        )
    return abs(est[0] - est[1])
