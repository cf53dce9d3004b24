"""Expanding Hermitian operators in the Pauli basis.

Every Hermitian operator on n qubits is a real combination of the 4^n
Pauli strings; the coefficients are plain traces, and their sum of squares
measures 2^n * Tr(delta^2).
"""

import numpy as np

from paulidelta import (
    PauliString,
    basis_density,
    coeffs_from_op,
    op_from_coeffs,
    random_pure_density,
    sum_of_squares,
)

# The difference of the two classical one-qubit states is exactly Z.
delta = basis_density("0") - basis_density("1")
v = coeffs_from_op(delta)
print("coefficients of |0><0| - |1><1|:")
for label in ("I", "X", "Y", "Z"):
    print(f"  {label}: {v[label]:+.3f}")

# Round trip: the coefficients determine the operator.
back = op_from_coeffs(v)
print("round-trip error:", np.max(np.abs(back - delta)))

# Sum of squares doubles as a Frobenius norm (Parseval).
rng = np.random.default_rng(1)
delta2 = random_pure_density(2, rng) - random_pure_density(2, rng)
v2 = coeffs_from_op(delta2)
print("sum of squares:      ", sum_of_squares(v2))
print("2^n * Tr(delta^2):   ", 2**2 * np.trace(delta2 @ delta2).real)

# Support and weight come straight off the bit masks.
s = PauliString.from_label("XIZY")
print("string", s.label(), "has support", s.support(), "and weight", s.weight())
