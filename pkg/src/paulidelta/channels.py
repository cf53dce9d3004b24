"""Gates and noise channels, and their action on Pauli coefficients.

Multi-qubit gates are probabilistic mixtures of unitaries.  One-qubit gates
are arbitrary channels, accepted as convex combinations of canonical-form
terms U1 o J o U2, where J acts on the coefficient vector (I, X, Y, Z) as

        | 1   0    0    0      |
    J = | 0  lam1  0    0      |
        | 0   0   lam2  0      |
        | t   0    0  lam1*lam2|

with t = +-sqrt((1 - lam1^2)(1 - lam2^2)).  Every channel also has a Pauli
transfer matrix (Ptm): the real matrix M[S', S] = (1/2^k) Tr(S' * G(S))
acting on coefficient vectors, indexed in the canonical flat order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .paulis import (
    PAULI_MATS,
    PauliString,
    all_pauli_strings,
    check_unitary,
    coeffs_from_op,
)

PROB_TOL = 1e-10
PTM_IMAG_TOL = 1e-9

_ID2 = np.eye(2, dtype=complex)

# Canonical matrices of the builtin gate table.
BUILTIN_MATRICES: dict[str, np.ndarray] = {
    "ID": _ID2,
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "X": PAULI_MATS["X"],
    "Y": PAULI_MATS["Y"],
    "Z": PAULI_MATS["Z"],
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * math.pi / 4)]),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}

BUILTIN_ARITY: dict[str, int] = {
    "ID": 1, "H": 1, "X": 1, "Y": 1, "Z": 1, "S": 1, "T": 1,
    "RESET": 1, "DEPOL": 1, "CNOT": 2, "CZ": 2, "SWAP": 2,
}


@dataclass(frozen=True)
class BuiltinGate:
    """A named gate from the builtin table; DEPOL carries its strength."""

    name: str
    p: float | None = None

    def __repr__(self) -> str:
        return f"BuiltinGate({self.name}, p={self.p})" if self.name == "DEPOL" else f"BuiltinGate({self.name})"


@dataclass
class UnitaryMixture:
    """A k-qubit channel of the form rho -> sum_i p_i U_i rho U_i^dagger."""

    k: int
    terms: list[tuple[float, np.ndarray]]

    def __post_init__(self):
        self.terms = [(float(p), np.asarray(u, dtype=complex)) for p, u in self.terms]


@dataclass
class RswChannel:
    """One extreme-form one-qubit channel U1 o J o U2.

    ``t_sign`` selects the branch of t = +-sqrt((1-lam1^2)(1-lam2^2)).
    ``pre_unitary`` (U2) acts first, ``post_unitary`` (U1) last.
    """

    lam1: float
    lam2: float
    t_sign: int = 1
    pre_unitary: np.ndarray = field(default_factory=lambda: _ID2.copy())
    post_unitary: np.ndarray = field(default_factory=lambda: _ID2.copy())

    @property
    def t(self) -> float:
        return self.t_sign * math.sqrt(
            max(0.0, (1 - self.lam1**2) * (1 - self.lam2**2))
        )


@dataclass
class OneQubitGate:
    """A one-qubit channel as a convex combination of canonical-form terms."""

    terms: list[tuple[float, RswChannel]]

    def __post_init__(self):
        self.terms = [(float(p), ch) for p, ch in self.terms]


GateSpec = Union[BuiltinGate, UnitaryMixture, OneQubitGate]

RESET_CHANNEL = RswChannel(lam1=0.0, lam2=0.0, t_sign=1)


@dataclass
class Ptm:
    """Pauli transfer matrix: real 4^k x 4^k action on coefficient vectors."""

    k: int
    m: np.ndarray

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=float)
        if self.m.shape != (4**self.k, 4**self.k):
            raise ValueError(
                f"expected {(4 ** self.k, 4 ** self.k)} matrix, got {self.m.shape}"
            )

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.m @ values


# Permutation from (I, X, Y, Z) display order to canonical codes (I, Z, X, Y).
_IXYZ_TO_CODE = [PauliString.from_label(c).index() for c in "IXYZ"]


def _ptm_from_conjugations(columns: dict[int, np.ndarray], k: int) -> Ptm:
    m = np.empty((4**k, 4**k))
    for idx, col in columns.items():
        m[:, idx] = col
    return Ptm(k, m)


def ptm_of_unitary(u: np.ndarray) -> Ptm:
    """Transfer matrix of conjugation by a unitary; always orthogonal."""
    u = np.asarray(u, dtype=complex)
    k = check_unitary(u)
    cols = {}
    for s in all_pauli_strings(k):
        conj = u @ s.matrix() @ u.conj().T
        cols[s.index()] = coeffs_from_op(conj, imag_tol=PTM_IMAG_TOL).values / 2**k
    return _ptm_from_conjugations(cols, k)


def _j_ptm(lam1: float, lam2: float, t: float) -> np.ndarray:
    j = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, lam1, 0.0, 0.0],
            [0.0, 0.0, lam2, 0.0],
            [t, 0.0, 0.0, lam1 * lam2],
        ]
    )
    m = np.zeros((4, 4))
    for a in range(4):
        for b in range(4):
            m[_IXYZ_TO_CODE[a], _IXYZ_TO_CODE[b]] = j[a, b]
    return m


def rsw_ptm(ch: RswChannel) -> Ptm:
    """Transfer matrix of a canonical-form channel: P(U1) @ J @ P(U2)."""
    if abs(ch.lam1) > 1 or abs(ch.lam2) > 1:
        raise ValueError(f"lambda range: |lam1|={abs(ch.lam1)}, |lam2|={abs(ch.lam2)} must be <= 1")
    m = (
        ptm_of_unitary(ch.post_unitary).m
        @ _j_ptm(ch.lam1, ch.lam2, ch.t)
        @ ptm_of_unitary(ch.pre_unitary).m
    )
    return Ptm(1, m)


def kraus_of_rsw(ch: RswChannel) -> list[np.ndarray]:
    """Two Kraus operators realizing a canonical-form channel.

    With lam1 = cos(u), lam2 = cos(v) the pair

        K1 = diag(cos a, cos b),  K2 = [[0, sin b], [sin a, 0]]

    for a = (v -+ u)/2, b = (v +- u)/2 reproduces the J action with
    t = +-sin(u)sin(v); U1/U2 are composed around them.
    """
    u = math.acos(max(-1.0, min(1.0, ch.lam1)))
    v = math.acos(max(-1.0, min(1.0, ch.lam2)))
    if ch.t_sign >= 0:
        a, b = (v - u) / 2, (v + u) / 2
    else:
        a, b = (v + u) / 2, (v - u) / 2
    k1 = np.diag([math.cos(a), math.cos(b)]).astype(complex)
    k2 = np.array([[0, math.sin(b)], [math.sin(a), 0]], dtype=complex)
    u1 = np.asarray(ch.post_unitary, dtype=complex)
    u2 = np.asarray(ch.pre_unitary, dtype=complex)
    return [u1 @ k1 @ u2, u1 @ k2 @ u2]


def depolarizing_ptm(p: float) -> Ptm:
    """diag(1, 1-p, 1-p, 1-p): shrink every supported coefficient by 1-p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing strength {p} outside [0, 1]")
    d = np.full(4, 1.0 - p)
    d[0] = 1.0
    return Ptm(1, np.diag(d))


def beta_of_gate(g: OneQubitGate) -> float:
    """Mixing weight sum_i p_i * max(lam1_i^2, lam2_i^2) in [0, 1].

    For this beta, any Hermitian one-qubit input delta and output delta'
    satisfy
        d'(X)^2 + d'(Y)^2 + d'(Z)^2
            <= (1-beta) d(I)^2 + beta (d(X)^2 + d(Y)^2 + d(Z)^2).
    """
    return float(
        sum(p * max(ch.lam1**2, ch.lam2**2) for p, ch in g.terms)
    )


_P2 = [PauliString.from_label(a + b) for a in "IXYZ" for b in "IXYZ"]
_CNOT_ACTION: dict[int, tuple[PauliString, int]] = {}


def cnot_pauli_action(r: PauliString) -> tuple[PauliString, int]:
    """Signed permutation CNOT R CNOT^dagger on the 16 two-qubit strings.

    The first qubit is the control.  The map never exchanges the blocks
    I (x) {X,Y,Z} and {X,Y,Z} (x) I.
    """
    if r.n != 2:
        raise ValueError(f"expected a 2-qubit string, got n={r.n}")
    if not _CNOT_ACTION:
        cnot = BUILTIN_MATRICES["CNOT"]
        for s in _P2:
            conj = cnot @ s.matrix() @ cnot.conj().T
            c = coeffs_from_op(conj)
            idx = int(np.argmax(np.abs(c.values)))
            _CNOT_ACTION[s.index()] = (
                PauliString.from_index(2, idx),
                1 if c.values[idx] > 0 else -1,
            )
    return _CNOT_ACTION[r.index()]


def gate_arity(g: GateSpec) -> int:
    if isinstance(g, BuiltinGate):
        return BUILTIN_ARITY[g.name]
    if isinstance(g, UnitaryMixture):
        return g.k
    if isinstance(g, OneQubitGate):
        return 1
    raise TypeError(f"not a gate spec: {g!r}")


def lower_builtin(g: BuiltinGate) -> GateSpec:
    """Resolve a builtin name to its mixture / canonical-form representation."""
    if g.name == "RESET":
        return OneQubitGate([(1.0, RESET_CHANNEL)])
    if g.name == "DEPOL":
        p = g.p
        return UnitaryMixture(
            1,
            [
                (1 - 3 * p / 4, PAULI_MATS["I"]),
                (p / 4, PAULI_MATS["X"]),
                (p / 4, PAULI_MATS["Y"]),
                (p / 4, PAULI_MATS["Z"]),
            ],
        )
    u = BUILTIN_MATRICES[g.name]
    return UnitaryMixture(BUILTIN_ARITY[g.name], [(1.0, u)])


def validate_gate(g: GateSpec) -> list[str]:
    """Check all gate invariants; return a list of problems (empty = ok)."""
    problems: list[str] = []
    if isinstance(g, BuiltinGate):
        if g.name not in BUILTIN_ARITY:
            return [f"unknown builtin gate {g.name!r}"]
        if g.name == "DEPOL":
            if g.p is None:
                problems.append("DEPOL requires a strength p")
            elif not 0.0 <= g.p <= 1.0:
                problems.append(f"DEPOL strength {g.p} outside [0, 1]")
        elif g.p is not None:
            problems.append(f"builtin {g.name} takes no parameter")
        return problems

    if isinstance(g, UnitaryMixture):
        probs = [p for p, _ in g.terms]
        if not g.terms:
            problems.append("probabilities: mixture has no terms")
        if any(p < -PROB_TOL for p in probs):
            problems.append(f"probabilities: negative weight {min(probs)}")
        if g.terms and abs(sum(probs) - 1.0) > PROB_TOL:
            problems.append(f"probabilities sum to {sum(probs)}, expected 1")
        for i, (_, u) in enumerate(g.terms):
            if u.shape != (2**g.k, 2**g.k):
                problems.append(f"unitarity: term {i} has shape {u.shape}, arity {g.k}")
                continue
            try:
                check_unitary(u)
            except ValueError as e:
                problems.append(f"unitarity: term {i}: {e}")
        return problems

    if isinstance(g, OneQubitGate):
        probs = [p for p, _ in g.terms]
        if not g.terms:
            problems.append("probabilities: channel has no terms")
        if any(p < -PROB_TOL for p in probs):
            problems.append(f"probabilities: negative weight {min(probs)}")
        if g.terms and abs(sum(probs) - 1.0) > PROB_TOL:
            problems.append(f"probabilities sum to {sum(probs)}, expected 1")
        for i, (_, ch) in enumerate(g.terms):
            if abs(ch.lam1) > 1 or abs(ch.lam2) > 1:
                problems.append(
                    f"lambda range: term {i} has (lam1, lam2)=({ch.lam1}, {ch.lam2})"
                )
            if ch.t_sign not in (-1, 1):
                problems.append(f"t_sign must be +-1, term {i} has {ch.t_sign}")
            for tag, u in (("pre", ch.pre_unitary), ("post", ch.post_unitary)):
                try:
                    if check_unitary(u) != 1:
                        problems.append(f"unitarity: term {i} {tag}-unitary is not 2x2")
                except ValueError as e:
                    problems.append(f"unitarity: term {i} {tag}-unitary: {e}")
        return problems

    return [f"not a gate spec: {g!r}"]


def gate_ptm(g: GateSpec) -> Ptm:
    """Transfer matrix of any gate spec (builtins lowered first)."""
    if isinstance(g, BuiltinGate):
        if g.name == "DEPOL":
            return depolarizing_ptm(g.p)
        return gate_ptm(lower_builtin(g))
    if isinstance(g, UnitaryMixture):
        m = sum(p * ptm_of_unitary(u).m for p, u in g.terms)
        return Ptm(g.k, m)
    if isinstance(g, OneQubitGate):
        m = sum(p * rsw_ptm(ch).m for p, ch in g.terms)
        return Ptm(1, m)
    raise TypeError(f"not a gate spec: {g!r}")
