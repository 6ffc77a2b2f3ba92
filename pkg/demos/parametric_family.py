# A two-qubit family interpolating between computational and Bell bases.
#
# Members: a|00>+b|11>, b|00>-a|11>, c|01>+e|10>, e|01>-c|10>.
# Local fidelity is exactly (a^2 + c^2)/2, rising to 1 only at the
# product-basis corner; one Bell pair always restores perfection.

import numpy as np

from locce import computational_povm, optimal_guess, parametric_basis, run_protocol
from locce.zoo import teleportation_protocol

grid = np.linspace(1 / np.sqrt(2), 1.0, 5)

print("local fidelity (alpha^2 + gamma^2)/2 over the parameter square:")
header = "alpha\\gamma " + "  ".join(f"{g:7.4f}" for g in grid)
print(header)
for a in grid:
    cells = []
    for g in grid:
        ens = parametric_basis(a, g)
        _, f = optimal_guess(ens, computational_povm(ens.dims))
        cells.append(f"{f:7.4f}")
    print(f"  {a:7.4f}   " + "  ".join(cells))

corner = parametric_basis(1.0, 1.0)
_, f_corner = optimal_guess(corner, computational_povm(corner.dims))
print(f"\nproduct corner (alpha = gamma = 1): local fidelity {f_corner:.6f}")
bell_end = parametric_basis(1 / np.sqrt(2), 1 / np.sqrt(2))
_, f_bell = optimal_guess(bell_end, computational_povm(bell_end.dims))
print(f"Bell corner (alpha = gamma = 1/sqrt2): local fidelity {f_bell:.6f}")

print("\nteleporting one half with a shared Bell pair:")
for a, g in ((0.75, 0.95), (0.9, 0.8), (1.0, 1.0)):
    ens = parametric_basis(a, g)
    problem, tree = teleportation_protocol(ens, "A", "B")
    f = run_protocol(problem, tree).fidelity
    print(f"  alpha={a}, gamma={g}: fidelity {f:.12g}")

print("\nwhether a cheaper-than-Bell resource suffices away from the corners")
print("is open; the Bell pair is provably minimal once either parameter is 1.")
