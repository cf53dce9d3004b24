"""Leveled circuit IR, its text/JSON formats, and consistent-set machinery.

A circuit has n wires and T levels; each level partitions the wires into
gate placements, so every wire passes through exactly one gate per level
(possibly the identity).  Noise is bound to gates: every input of a
multi-qubit gate is depolarized with strength ``epsk`` before the gate,
and the output of every one-qubit gate is depolarized with strength
``eps1`` after it.  A single designated wire is measured at time T.

A *qubit* here is a wire at a specific time 0..T.  A set of such qubits is
*consistent* when some partial execution of the circuit produces all of
them simultaneously, so a joint reduced state is well defined.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .channels import (
    BUILTIN_ARITY,
    BuiltinGate,
    GateSpec,
    OneQubitGate,
    RswChannel,
    UnitaryMixture,
    gate_arity,
    validate_gate,
)


class CircuitParseError(ValueError):
    """Syntax or semantic error in the circuit DSL, with a position."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing strengths: eps1 after one-qubit gates, epsk before
    each input of a multi-qubit gate."""

    eps1: float
    epsk: float

    def __post_init__(self):
        if not 0.0 < self.eps1 <= 1.0:
            raise ValueError(f"eps1 must be positive (and <= 1), got {self.eps1}")
        if not 0.0 <= self.epsk <= 1.0:
            raise ValueError(f"epsk must lie in [0, 1], got {self.epsk}")


@dataclass
class GatePlacement:
    """A gate applied to an ordered list of distinct wires."""

    wires: tuple[int, ...]
    gate: GateSpec

    def __post_init__(self):
        self.wires = tuple(int(w) for w in self.wires)


@dataclass
class Circuit:
    n: int
    T: int
    levels: list[list[GatePlacement]]
    noise: NoiseModel
    output_wire: int

    def __post_init__(self):
        if self.T != len(self.levels):
            raise ValueError(f"T={self.T} but {len(self.levels)} levels given")
        if not 0 <= self.output_wire < self.n:
            raise ValueError(f"output wire {self.output_wire} out of range")
        for li, level in enumerate(self.levels, start=1):
            seen: set[int] = set()
            for pl in level:
                if len(set(pl.wires)) != len(pl.wires):
                    raise ValueError(f"level {li}: duplicate wire within a placement")
                arity = gate_arity(pl.gate)
                if arity != len(pl.wires):
                    raise ValueError(
                        f"level {li}: gate arity {arity} != {len(pl.wires)} wires"
                    )
                for w in pl.wires:
                    if not 0 <= w < self.n:
                        raise ValueError(f"level {li}: wire {w} out of range")
                    if w in seen:
                        raise ValueError(f"level {li}: wire {w} used twice")
                    seen.add(w)
                problems = validate_gate(pl.gate)
                if problems:
                    raise ValueError(f"level {li}: invalid gate: {'; '.join(problems)}")
            if seen != set(range(self.n)):
                missing = sorted(set(range(self.n)) - seen)
                raise ValueError(f"level {li} is not a partition: missing wires {missing}")

    @property
    def max_arity(self) -> int:
        return max(
            (gate_arity(pl.gate) for level in self.levels for pl in level),
            default=1,
        )

    def placement_on(self, level: int, wire: int) -> tuple[int, GatePlacement]:
        """The (index, placement) of the gate acting on ``wire`` at ``level`` (1-based)."""
        for i, pl in enumerate(self.levels[level - 1]):
            if wire in pl.wires:
                return i, pl
        raise ValueError(f"no gate on wire {wire} at level {level}")

    def prefix(self, t: int) -> "Circuit":
        """The first ``t`` levels as a circuit with the same noise and output."""
        if not 0 <= t <= self.T:
            raise ValueError(f"prefix length {t} outside [0, {self.T}]")
        return Circuit(self.n, t, [list(l) for l in self.levels[:t]], self.noise, self.output_wire)


@dataclass(frozen=True, order=True)
class QubitRef:
    """A wire at a specific time (0..T)."""

    wire: int
    time: int


@dataclass
class ConsistentSet:
    """A validated consistent set with its dist/latest summary."""

    qubits: frozenset[QubitRef]
    dist: float
    latest: int

    @classmethod
    def build(cls, circ: Circuit, refs: Iterable[QubitRef]) -> "ConsistentSet":
        refs = frozenset(refs)
        if not is_consistent(refs, circ):
            raise ValueError(f"set is not consistent: {sorted(refs)}")
        d, l = dist_latest(refs, circ)
        return cls(refs, d, l)


def _check_refs(refs: Iterable[QubitRef], circ: Circuit) -> None:
    for q in refs:
        if not (0 <= q.wire < circ.n and 0 <= q.time <= circ.T):
            raise ValueError(f"qubit ref {q} out of range for n={circ.n}, T={circ.T}")


def required_gates(refs: Iterable[QubitRef], circ: Circuit) -> set[tuple[int, int]]:
    """The minimal set of gates (level, placement index) that must be applied
    to produce every qubit in ``refs``; closed under input dependencies."""
    _check_refs(refs, circ)
    needed: set[tuple[int, int]] = set()
    stack = [q for q in refs if q.time > 0]
    while stack:
        q = stack.pop()
        i, pl = circ.placement_on(q.time, q.wire)
        key = (q.time, i)
        if key in needed:
            continue
        needed.add(key)
        if q.time > 1:
            stack.extend(QubitRef(w, q.time - 1) for w in pl.wires)
    return needed


def is_consistent(refs: Iterable[QubitRef], circ: Circuit) -> bool:
    """Whether the qubits can coexist under some partial execution.

    Computes the gates causally required to produce every member and checks
    that none of those gates consumes a member.  Equivalent to the inductive
    definition: time-0 sets are consistent, and consistency is preserved by
    replacing all inputs of a gate with its outputs (subsets included).
    """
    refs = frozenset(refs)
    needed = required_gates(refs, circ)
    for level, i in needed:
        pl = circ.levels[level - 1][i]
        for w in pl.wires:
            if QubitRef(w, level - 1) in refs:
                return False
    return True


def dist_latest(refs: Iterable[QubitRef], circ: Circuit) -> tuple[float, int]:
    """(dist, latest): min and max time over the set; dist of the empty set
    is infinity, its latest is 0."""
    refs = frozenset(refs)
    _check_refs(refs, circ)
    if not refs:
        return math.inf, 0
    times = [q.time for q in refs]
    return float(min(times)), max(times)


def enumerate_consistent_sets(
    circ: Circuit, max_size: int, max_sets: int | None = None
) -> Iterator[ConsistentSet]:
    """Yield every consistent set of size <= max_size exactly once.

    Order: increasing (latest, number of members at latest, sorted refs).
    Raises RuntimeError when more than ``max_sets`` sets would be yielded.
    """
    grid = [QubitRef(w, t) for t in range(circ.T + 1) for w in range(circ.n)]
    found: list[ConsistentSet] = []
    for size in range(min(max_size, len(grid)) + 1):
        for combo in combinations(grid, size):
            refs = frozenset(combo)
            if is_consistent(refs, circ):
                d, l = dist_latest(refs, circ)
                found.append(ConsistentSet(refs, d, l))
                if max_sets is not None and len(found) > max_sets:
                    raise RuntimeError(
                        f"enumeration budget exceeded ({max_sets} sets)"
                    )
    def order_key(cs: ConsistentSet):
        at_latest = sum(1 for q in cs.qubits if q.time == cs.latest)
        return (cs.latest, at_latest, tuple(sorted((q.wire, q.time) for q in cs.qubits)))
    found.sort(key=order_key)
    yield from found


# --- DSL ----------------------------------------------------------------

_BUILTIN_SIMPLE = ("ID", "H", "X", "Y", "Z", "S", "T", "RESET", "CNOT", "CZ", "SWAP")


def _parse_complex(tok: str, line: int, col: int) -> complex:
    try:
        return complex(tok.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise CircuitParseError(f"bad complex literal {tok!r}", line, col) from None


def _parse_matrix(entries: str, arity: int, line: int, col: int) -> np.ndarray:
    dim = 2**arity
    toks = [t for t in entries.split(",") if t.strip()]
    if len(toks) != dim * dim:
        raise CircuitParseError(
            f"matrix needs {dim * dim} entries for arity {arity}, got {len(toks)}",
            line,
            col,
        )
    vals = [_parse_complex(t, line, col) for t in toks]
    return np.array(vals, dtype=complex).reshape(dim, dim)


def _split_sections(body: str) -> list[str]:
    return [s.strip() for s in body.split(";")]


def _parse_placement(text: str, line: int, col: int) -> GatePlacement:
    m = re.match(r"\s*([A-Za-z][A-Za-z0-9]*)\s*\((.*)\)\s*$", text, re.DOTALL)
    if not m:
        raise CircuitParseError(f"malformed placement {text.strip()!r}", line, col)
    name, body = m.group(1), m.group(2)
    sections = _split_sections(body)
    wire_toks = [t.strip() for t in sections[0].split(",") if t.strip()]
    try:
        wires = tuple(int(t) for t in wire_toks)
    except ValueError:
        raise CircuitParseError(f"bad wire list {sections[0]!r}", line, col) from None
    if not wires:
        raise CircuitParseError("placement lists no wires", line, col)

    kv: dict[str, str] = {}
    for sec in sections[1:]:
        if not sec:
            continue
        if "[" in sec:
            key, _, val = sec.partition("=")
            kv[key.strip()] = val.strip().strip("[]")
        else:
            for piece in sec.split(","):
                if not piece.strip():
                    continue
                key, eq, val = piece.partition("=")
                if not eq:
                    raise CircuitParseError(f"expected key=value, got {piece!r}", line, col)
                kv[key.strip()] = val.strip()

    def need(key: str) -> str:
        if key not in kv:
            raise CircuitParseError(f"{name} placement missing {key}=", line, col)
        return kv[key]

    if name in _BUILTIN_SIMPLE:
        if kv:
            raise CircuitParseError(f"{name} takes no parameters", line, col)
        if len(wires) != BUILTIN_ARITY[name]:
            raise CircuitParseError(
                f"{name} needs {BUILTIN_ARITY[name]} wires, got {len(wires)}", line, col
            )
        return GatePlacement(wires, BuiltinGate(name))
    if name == "DEPOL":
        if len(wires) != 1:
            raise CircuitParseError("DEPOL acts on one wire", line, col)
        try:
            p = float(need("p"))
        except ValueError:
            raise CircuitParseError(f"bad DEPOL strength {kv['p']!r}", line, col) from None
        return GatePlacement(wires, BuiltinGate("DEPOL", p))
    if name == "U":
        u = _parse_matrix(need("m"), len(wires), line, col)
        return GatePlacement(wires, UnitaryMixture(len(wires), [(1.0, u)]))
    if name == "MIX":
        probs = [float(t) for t in need("p").split(",") if t.strip()]
        mats = []
        for i in range(1, len(probs) + 1):
            mats.append(_parse_matrix(need(f"m{i}"), len(wires), line, col))
        return GatePlacement(
            wires, UnitaryMixture(len(wires), list(zip(probs, mats)))
        )
    if name == "RSW":
        if len(wires) != 1:
            raise CircuitParseError("RSW acts on one wire", line, col)
        try:
            lam1, lam2 = float(need("l1")), float(need("l2"))
            sign = int(float(need("sign")))
        except ValueError:
            raise CircuitParseError("bad RSW parameters", line, col) from None
        if sign not in (-1, 1):
            raise CircuitParseError(f"RSW sign must be +-1, got {sign}", line, col)
        ch = RswChannel(lam1, lam2, sign)
        return GatePlacement(wires, OneQubitGate([(1.0, ch)]))
    raise CircuitParseError(f"unknown gate name {name!r}", line, col)


def parse_circuit(text: str) -> Circuit:
    """Parse the line-oriented DSL.

    Line 1: ``qubits <n> levels <T> output <wire>``
    Line 2: ``noise eps1=<float> epsk=<float>``
    Then one ``level <i>: PLACEMENT (; PLACEMENT)*`` line per level,
    with i ascending from 1.  ``#`` starts a comment.
    """
    lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((lineno, stripped))
    if not lines:
        raise CircuitParseError("empty circuit text", 1)

    lineno, head = lines[0]
    m = re.match(r"qubits\s+(\d+)\s+levels\s+(\d+)\s+output\s+(\d+)\s*$", head)
    if not m:
        raise CircuitParseError(
            "expected 'qubits <n> levels <T> output <wire>'", lineno
        )
    n, T, output = int(m.group(1)), int(m.group(2)), int(m.group(3))

    if len(lines) < 2:
        raise CircuitParseError("missing noise line", lineno + 1)
    lineno, noise_line = lines[1]
    m = re.match(r"noise\s+eps1=([-\d.eE+]+)\s+epsk=([-\d.eE+]+)\s*$", noise_line)
    if not m:
        raise CircuitParseError("expected 'noise eps1=<float> epsk=<float>'", lineno)
    eps1, epsk = float(m.group(1)), float(m.group(2))
    if eps1 <= 0:
        raise CircuitParseError("eps1 must be positive", lineno, noise_line.index("eps1") + 1)
    try:
        noise = NoiseModel(eps1, epsk)
    except ValueError as e:
        raise CircuitParseError(str(e), lineno) from None

    levels: list[list[GatePlacement]] = []
    for expected, (lineno, line) in enumerate(lines[2:], start=1):
        m = re.match(r"level\s+(\d+)\s*:\s*(.*)$", line)
        if not m:
            raise CircuitParseError(f"expected 'level {expected}: ...'", lineno)
        if int(m.group(1)) != expected:
            raise CircuitParseError(
                f"levels must ascend from 1; expected level {expected}, got {m.group(1)}",
                lineno,
            )
        placements = []
        cursor = line.index(":") + 1
        depth = 0
        start = cursor
        chunks: list[tuple[int, str]] = []
        for pos in range(cursor, len(line) + 1):
            ch = line[pos] if pos < len(line) else ";"
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == ";" and depth == 0:
                chunk = line[start:pos]
                if chunk.strip():
                    chunks.append((start + 1, chunk))
                start = pos + 1
        for col, chunk in chunks:
            placements.append(_parse_placement(chunk, lineno, col))
        seen: set[int] = set()
        for pl in placements:
            for w in pl.wires:
                if not 0 <= w < n:
                    raise CircuitParseError(f"wire {w} out of range for n={n}", lineno)
                if w in seen:
                    raise CircuitParseError(
                        f"level {expected} is not a partition: wire {w} used twice", lineno
                    )
                seen.add(w)
        if seen != set(range(n)):
            missing = sorted(set(range(n)) - seen)
            raise CircuitParseError(
                f"level {expected} is not a partition: missing wires {missing}", lineno
            )
        levels.append(placements)

    if len(levels) != T:
        raise CircuitParseError(
            f"circuit declares {T} levels but defines {len(levels)}",
            lines[-1][0] if lines else 1,
        )
    try:
        return Circuit(n, T, levels, noise, output)
    except ValueError as e:
        raise CircuitParseError(str(e), lines[-1][0]) from None


# --- JSON mirror --------------------------------------------------------


def _mat_to_json(u: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(u, complex).reshape(-1)]


def _mat_from_json(entries, arity: int) -> np.ndarray:
    dim = 2**arity
    if len(entries) != dim * dim:
        raise ValueError(f"matrix needs {dim * dim} entries, got {len(entries)}")
    return np.array([complex(re, im) for re, im in entries]).reshape(dim, dim)


def _gate_to_json(g: GateSpec) -> dict:
    if isinstance(g, BuiltinGate):
        d = {"gate": g.name}
        if g.name == "DEPOL":
            d["p"] = g.p
        return d
    if isinstance(g, UnitaryMixture):
        if len(g.terms) == 1 and g.terms[0][0] == 1.0:
            return {"gate": "U", "matrix": _mat_to_json(g.terms[0][1])}
        return {
            "gate": "MIX",
            "probs": [p for p, _ in g.terms],
            "matrices": [_mat_to_json(u) for _, u in g.terms],
        }
    if isinstance(g, OneQubitGate):
        terms = []
        for p, ch in g.terms:
            term = {"prob": p, "l1": ch.lam1, "l2": ch.lam2, "sign": ch.t_sign}
            if not np.allclose(ch.pre_unitary, np.eye(2)):
                term["u2"] = _mat_to_json(ch.pre_unitary)
            if not np.allclose(ch.post_unitary, np.eye(2)):
                term["u1"] = _mat_to_json(ch.post_unitary)
            terms.append(term)
        return {"gate": "RSWMIX", "terms": terms}
    raise TypeError(f"not a gate spec: {g!r}")


def _gate_from_json(d: dict, arity: int) -> GateSpec:
    name = d.get("gate")
    if name in _BUILTIN_SIMPLE:
        return BuiltinGate(name)
    if name == "DEPOL":
        return BuiltinGate("DEPOL", float(d["p"]))
    if name == "U":
        return UnitaryMixture(arity, [(1.0, _mat_from_json(d["matrix"], arity))])
    if name == "MIX":
        mats = [_mat_from_json(m, arity) for m in d["matrices"]]
        return UnitaryMixture(arity, list(zip(map(float, d["probs"]), mats)))
    if name == "RSWMIX":
        terms = []
        for term in d["terms"]:
            ch = RswChannel(
                float(term["l1"]),
                float(term["l2"]),
                int(term["sign"]),
                pre_unitary=_mat_from_json(term["u2"], 1) if "u2" in term else np.eye(2, dtype=complex),
                post_unitary=_mat_from_json(term["u1"], 1) if "u1" in term else np.eye(2, dtype=complex),
            )
            terms.append((float(term["prob"]), ch))
        return OneQubitGate(terms)
    raise ValueError(f"unknown gate kind {name!r}")


def circuit_to_json(circ: Circuit) -> str:
    """Serialize with a fixed field order so equal circuits give equal bytes."""
    doc = {
        "qubits": circ.n,
        "levels": [
            [dict(_gate_to_json(pl.gate), wires=list(pl.wires)) for pl in level]
            for level in circ.levels
        ],
        "noise": {"eps1": circ.noise.eps1, "epsk": circ.noise.epsk},
        "output": circ.output_wire,
    }
    return json.dumps(doc, indent=2) + "\n"


def circuit_from_json(text: str) -> Circuit:
    doc = json.loads(text)
    for key in ("qubits", "levels", "noise", "output"):
        if key not in doc:
            raise ValueError(f"missing {key!r} key")
    noise = NoiseModel(float(doc["noise"]["eps1"]), float(doc["noise"]["epsk"]))
    levels = []
    for level in doc["levels"]:
        placements = []
        for pd in level:
            wires = tuple(int(w) for w in pd["wires"])
            placements.append(GatePlacement(wires, _gate_from_json(pd, len(wires))))
        levels.append(placements)
    return Circuit(int(doc["qubits"]), len(levels), levels, noise, int(doc["output"]))


def circuit_equal(a: Circuit, b: Circuit) -> bool:
    """Structural equality, comparing gate payloads numerically."""
    return circuit_to_json(a) == circuit_to_json(b)


# --- random circuits ----------------------------------------------------

_POOL_TOKENS = _BUILTIN_SIMPLE + ("RANDU1", "RANDU2", "RANDMIX2")


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _pool_arity(token: str) -> int:
    if token in BUILTIN_ARITY:
        return BUILTIN_ARITY[token]
    if token in ("RANDU1",):
        return 1
    if token in ("RANDU2", "RANDMIX2"):
        return 2
    raise ValueError(f"unknown pool token {token!r}")


def _instantiate(token: str, rng: np.random.Generator) -> GateSpec:
    if token in BUILTIN_ARITY:
        return BuiltinGate(token)
    if token == "RANDU1":
        return UnitaryMixture(1, [(1.0, haar_unitary(2, rng))])
    if token == "RANDU2":
        return UnitaryMixture(2, [(1.0, haar_unitary(4, rng))])
    if token == "RANDMIX2":
        w = rng.uniform(0.2, 0.8)
        return UnitaryMixture(
            2, [(w, haar_unitary(4, rng)), (1.0 - w, haar_unitary(4, rng))]
        )
    raise ValueError(f"unknown pool token {token!r}")


def random_circuit(
    n: int,
    T: int,
    seed: int,
    gate_pool: Sequence[str],
    k: int,
    noise: NoiseModel | None = None,
    output_wire: int = 0,
) -> Circuit:
    """Deterministically sample a leveled circuit from a gate pool.

    Each level shuffles the wires and greedily assigns pool gates whose
    arity still fits, so the level is always an exact partition.
    """
    if not gate_pool:
        raise ValueError("gate pool is empty")
    arities = {tok: _pool_arity(tok) for tok in gate_pool}
    if max(arities.values()) > k:
        raise ValueError(f"pool arity {max(arities.values())} exceeds k={k}")
    if k > n:
        raise ValueError(f"k={k} gates cannot fit on {n} wires")
    min_arity = min(arities.values())
    rng = np.random.default_rng(seed)
    noise = noise or NoiseModel(0.05, 0.4)
    levels: list[list[GatePlacement]] = []
    for _ in range(T):
        order = list(rng.permutation(n))
        placements: list[GatePlacement] = []
        while order:
            fits = [
                tok
                for tok in gate_pool
                if arities[tok] <= len(order)
                and (len(order) - arities[tok] == 0 or len(order) - arities[tok] >= min_arity)
            ]
            if not fits:
                raise ValueError(
                    f"cannot partition {len(order)} remaining wires with pool {list(gate_pool)}"
                )
            tok = fits[int(rng.integers(len(fits)))]
            wires = tuple(order[: arities[tok]])
            del order[: arities[tok]]
            placements.append(GatePlacement(wires, _instantiate(tok, rng)))
        placements.sort(key=lambda pl: min(pl.wires))
        levels.append(placements)
    return Circuit(n, T, levels, noise, output_wire)
