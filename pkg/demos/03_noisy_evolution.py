"""Evolving a state difference through a leveled noisy circuit.

Two engines compute the same map: the Pauli engine pushes a coefficient
vector through transfer matrices and shrink factors, the density engine
conjugates the dense matrix.  Multi-qubit gates depolarize their inputs
first; one-qubit gates are followed by weak noise on their output.
"""

import numpy as np

from paulidelta import (
    InputPair,
    PauliString,
    basis_density,
    coeffs_from_op,
    evolve_density,
    evolve_pauli,
    full_cut,
    output_distinguishability,
    parse_circuit,
)

TEXT = """\
qubits 3 levels 3 output 0
noise eps1=0.05 epsk=0.45
level 1: S(0); CNOT(1,2)
level 2: CNOT(0,1); RESET(2)
level 3: ID(0); RSW(1; l1=0.9, l2=0.7, sign=-1); DEPOL(2; p=0.2)
"""

circ = parse_circuit(TEXT)
pair = InputPair(basis_density("000"), basis_density("111"))
delta = pair.delta()

pauli = evolve_pauli(circ, coeffs_from_op(delta), full_cut(circ))
dense = coeffs_from_op(evolve_density(circ, delta, full_cut(circ)))
print("engines disagree by:", np.max(np.abs(pauli.values - dense.values)))

print("largest surviving coefficients after 3 noisy levels:")
order = np.argsort(-np.abs(pauli.values))[:5]
for idx in order:
    print(f"  {PauliString.from_index(3, int(idx)).label()}: {pauli.values[idx]:+.4f}")

print("output distinguishability:", output_distinguishability(circ, pair))
