# One-way discrimination: which resources can possibly work?
#
# Identify each two-qubit basis member with a matrix M_i through
# |psi_i> = (I x M_i)|Phi>. Perfect one-way discrimination with a
# resource of squared Schmidt spectrum Lambda/2 forces states phi_k with
# sum_k a_k |phi_k><phi_k| = I and <phi_k|(Lambda x M_i^dag M_j)|phi_k> = 0.
# We score candidate solutions by the squared violation of that system
# and probe each spectrum with multi-start descent.

import numpy as np

from locce import (
    ResourceSpectrum,
    bell_basis,
    feasibility_search,
    orthogonality_residual,
    rk_structure_check,
    teleportation_certificate,
    to_matrix_rep,
)

rep = to_matrix_rep(bell_basis())
print("Bell-basis matrices (exactly I, Z, X, XZ):")
for m in rep.matrices:
    print(np.round(m.real, 3).tolist())

# The maximally entangled resource has an explicit solution: the Bell
# projectors themselves (this is teleportation in certificate form).
mes = ResourceSpectrum([1.0, 1.0])
phis, weights = teleportation_certificate(2)
print(f"\ncertificate residual at the flat spectrum: "
      f"{orthogonality_residual(rep, mes, phis, weights):.3e}")

# Descent rediscovers it from random starts.
found = feasibility_search(rep, mes, outcomes=4, restarts=12, seed=1)
print(f"search, flat spectrum: best residual {found.best_residual:.3e} "
      f"(restart {found.best_restart}, {found.wall_time_s:.2f}s)")

# Skewed spectra hit a hard floor: the residual refuses to vanish, in
# line with the proof that only the flat spectrum admits a solution
# when some member has full Schmidt rank.
print("\nspectrum sweep (outcomes=4, restarts=25):")
for lam in (1.0, 1.2, 1.4, 1.6, 1.8):
    spectrum = ResourceSpectrum([lam, 2.0 - lam])
    probe = feasibility_search(rep, spectrum, outcomes=4, restarts=25, seed=1)
    print(f"  Lambda = diag({lam:.1f}, {2 - lam:.1f}): "
          f"best residual {probe.best_residual:.6f}")

# The structural reason: any conditioning state phi = (I x R)|Phi> must
# make R Lambda R^dag a multiple of the identity, which squeezes Lambda
# itself to the identity.
skew = ResourceSpectrum([1.6, 0.4])
report = rk_structure_check(rep, skew, np.array([1, 0, 0, 1]) / np.sqrt(2))
print(f"\nR Lambda R^dag distance from identity at phi = |Phi>, skewed spectrum: "
      f"{report.distance:.4f}")
print("a nonzero search floor is evidence, not proof; the certificate at the")
print("flat spectrum is the hard guarantee.")
