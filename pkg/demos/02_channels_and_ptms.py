"""Gates as transfer matrices on Pauli coefficients.

Unitaries act orthogonally (they only rotate coefficients around), while
general one-qubit channels can leak weight into or out of the identity
coefficient.  The canonical one-qubit form makes that leak explicit, and
``beta_of_gate`` summarizes how much of the non-identity weight survives.
"""

import numpy as np

from paulidelta import (
    OneQubitGate,
    RswChannel,
    beta_of_gate,
    depolarizing_ptm,
    ptm_of_unitary,
    rsw_ptm,
)
from paulidelta.channels import BUILTIN_MATRICES

np.set_printoptions(precision=3, suppress=True)

print("Hadamard transfer matrix (orthogonal, a signed permutation):")
print(ptm_of_unitary(BUILTIN_MATRICES["H"]).m)

print("\ndepolarizing(p=0.36) shrinks every supported coefficient by 0.64:")
print(depolarizing_ptm(0.36).m)

reset = RswChannel(lam1=0.0, lam2=0.0, t_sign=1)
print("\nreset-to-|0> in canonical form (lam1 = lam2 = 0, t = +1):")
print(rsw_ptm(reset).m)

# beta interpolates between reset (0) and unitary (1).
half = OneQubitGate([(0.5, RswChannel(1.0, 1.0)), (0.5, reset)])
print("\nbeta of a 50/50 unitary/reset mixture:", beta_of_gate(half))

# The one-qubit bound in action: non-identity weight after the gate is at
# most (1-beta) * d(I)^2 + beta * (non-identity weight before).
rng = np.random.default_rng(7)
m = rsw_ptm(RswChannel(0.8, 0.5, 1)).m
beta = beta_of_gate(OneQubitGate([(1.0, RswChannel(0.8, 0.5, 1))]))
v = rng.normal(size=4)
w = m @ v
lhs = np.dot(w[1:], w[1:])
rhs = (1 - beta) * v[0] ** 2 + beta * np.dot(v[1:], v[1:])
print(f"\nbound check: {lhs:.4f} <= {rhs:.4f} (beta = {beta:.2f})")
