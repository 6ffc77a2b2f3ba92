"""Discrimination fidelity functionals and the bounds that cage them.

The average fidelity of a measurement M = {M_a} with guesses a -> phi_a
against an ensemble {p_i, psi_i} is

    F = sum_{i,a} p_i <psi_i|M_a|psi_i> |<psi_i|phi_a>|^2

The optimal guess for a fixed POVM takes, per outcome, the principal
eigenvector of rho_a = sum_i p_i <psi_i|M_a|psi_i> |psi_i><psi_i|, and
scores sum_a lambda_max(rho_a).

The local-protocol optimum itself is never computed here: it is only
bracketed between protocol-achievable values (see :mod:`locce.zoo`) and
the upper bounds in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .tensor import (
    TOL,
    StateVector,
    entanglement_entropy,
    principal_eigenvector,
    schmidt,
)
from .families import Ensemble, PartyLayout

__all__ = [
    "Povm",
    "GuessStrategy",
    "computational_povm",
    "average_fidelity",
    "optimal_guess",
    "global_optimum_orthonormal",
    "mes_bound",
    "schmidt_coeff_sep_bound",
    "bipartition_min_bound",
    "EntropyBoundRow",
    "EntropyBoundReport",
    "entropy_bound_check",
    "mixed_strategy_fidelity",
    "vidal_conversion_probability",
]


@dataclass(frozen=True)
class Povm:
    """Positive operators summing to the identity on ``dims``."""

    dims: tuple[int, ...]
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        d = int(np.prod(dims))
        elements = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        total = np.zeros((d, d), dtype=complex)
        for k, e in enumerate(elements):
            if e.shape != (d, d):
                raise ValueError(f"element {k} has shape {e.shape}, expected ({d},{d})")
            if np.max(np.abs(e - e.conj().T)) > TOL:
                raise ValueError(f"element {k} is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -TOL:
                raise ValueError(f"element {k} is not positive semidefinite")
            total += e
        if np.max(np.abs(total - np.eye(d))) > TOL:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "elements", elements)

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class GuessStrategy:
    """One normalized guess state per measurement outcome."""

    guesses: tuple[StateVector, ...]

    def __getitem__(self, outcome: int) -> StateVector:
        return self.guesses[outcome]

    def __len__(self) -> int:
        return len(self.guesses)


def computational_povm(dims: Sequence[int]) -> Povm:
    """Rank-1 projectors onto the computational product basis."""
    dims = tuple(dims)
    d = int(np.prod(dims))
    eye = np.eye(d, dtype=complex)
    return Povm(dims, tuple(np.outer(eye[b], eye[b]) for b in range(d)))


def _outcome_weights(ens: Ensemble, povm: Povm) -> np.ndarray:
    """w[i, a] = <psi_i|M_a|psi_i>, clipped at zero."""
    if povm.dims != ens.dims:
        raise ValueError(f"POVM dims {povm.dims} != ensemble dims {ens.dims}")
    states = ens.amplitude_matrix()
    w = np.empty((ens.size, povm.n_outcomes))
    for a, e in enumerate(povm.elements):
        w[:, a] = np.real(np.einsum("id,de,ie->i", states.conj(), e, states))
    return np.clip(w, 0.0, None)


def average_fidelity(ens: Ensemble, povm: Povm, guess: GuessStrategy) -> float:
    if len(guess) != povm.n_outcomes:
        raise ValueError("guess strategy must cover every POVM outcome")
    states = ens.amplitude_matrix()
    w = _outcome_weights(ens, povm)
    overlap = np.empty_like(w)
    for a in range(povm.n_outcomes):
        if guess[a].dims != ens.dims:
            raise ValueError("guess dims do not match ensemble dims")
        overlap[:, a] = np.abs(states.conj() @ guess[a].amps) ** 2
    return float(np.einsum("i,ia,ia->", ens.priors, w, overlap))


def optimal_guess(ens: Ensemble, povm: Povm):
    """Best guess per outcome and the fidelity it achieves.

    Degenerate outcome operators resolve through the deterministic
    eigenvector tie-break of :func:`locce.tensor.principal_eigenvector`.
    """
    states = ens.amplitude_matrix()
    w = _outcome_weights(ens, povm)
    weighted = ens.priors[:, None] * w
    guesses = []
    total = 0.0
    for a in range(povm.n_outcomes):
        rho = np.einsum("i,id,ie->de", weighted[:, a], states, states.conj())
        val, vec = principal_eigenvector(rho)
        total += val
        guesses.append(StateVector.normalized(ens.dims, vec))
    return GuessStrategy(tuple(guesses)), float(total)


def global_optimum_orthonormal(ens: Ensemble) -> float:
    """Unrestricted-measurement optimum for mutually orthogonal members."""
    if not ens.is_orthonormal():
        raise ValueError("ensemble members are not mutually orthogonal")
    return 1.0


def mes_bound(k: int, d: int) -> float:
    """Upper bound d/k on local fidelity for k equiprobable d x d
    maximally entangled states."""
    if k < 1 or d < 2:
        raise ValueError("need k >= 1 and d >= 2")
    return d / k


def schmidt_coeff_sep_bound(ens: Ensemble, bipartition) -> float:
    """Separable-fidelity bound 1/2 across a party bipartition.

    Applies to a complete equiprobable orthonormal basis whose members
    all have squared maximal Schmidt coefficient <= 1/2 across the
    bipartition; raises if that premise fails.
    """
    if not ens.is_complete_basis():
        raise ValueError("bound requires a complete orthonormal basis")
    if np.max(np.abs(ens.priors - 1.0 / ens.size)) > TOL:
        raise ValueError("bound requires equiprobable members")
    names_a, names_b = bipartition
    idx_a = ens.layout.subsystems_of(names_a)
    idx_b = ens.layout.subsystems_of(names_b)
    for i, st in enumerate(ens.states):
        top = schmidt(st, (idx_a, idx_b)).coefficients[0]
        if top * top > 0.5 + TOL:
            raise ValueError(
                f"member {i} has squared max Schmidt coefficient {top * top:.6f} > 1/2; "
                "bound not applicable"
            )
    return 0.5


def bipartition_min_bound(per_bipartition_bounds: Mapping) -> float:
    """A multipartite local-fidelity bound: the minimum over bipartition bounds."""
    if not per_bipartition_bounds:
        raise ValueError("need at least one bipartition bound")
    return float(min(per_bipartition_bounds.values()))


@dataclass(frozen=True)
class EntropyBoundRow:
    side_a: tuple[str, ...]
    side_b: tuple[str, ...]
    mean_member_entropy: float
    resource_entropy: float
    satisfied: bool


@dataclass(frozen=True)
class EntropyBoundReport:
    """Per-bipartition entropy comparison of a resource against an ensemble.

    A resource enabling perfect local discrimination of a complete basis
    must carry at least the mean member entanglement across every party
    bipartition; for incomplete ensembles the requirement is vacuous and
    the report passes as not applicable. ``n_partite_ok`` records the
    companion predicate: when every bipartition has positive mean member
    entanglement, the resource must itself be entangled everywhere.
    """

    rows: tuple[EntropyBoundRow, ...]
    applicable: bool
    passed: bool
    all_mean_positive: bool
    resource_fully_entangled: bool
    n_partite_ok: bool


def entropy_bound_check(resource: StateVector, resource_layout: PartyLayout,
                        ens: Ensemble) -> EntropyBoundReport:
    res_names = set(resource_layout.names)
    ens_names = set(ens.layout.names)
    if not res_names <= ens_names:
        raise ValueError(
            f"resource parties {sorted(res_names)} not a subset of ensemble parties "
            f"{sorted(ens_names)}"
        )
    if not resource_layout.covers(resource.n_subsystems):
        raise ValueError("resource layout does not cover the resource subsystems")
    rows = []
    for names_a, names_b in ens.layout.bipartitions():
        idx_a = ens.layout.subsystems_of(names_a)
        idx_b = ens.layout.subsystems_of(names_b)
        mean_e = float(sum(
            p * entanglement_entropy(st, (idx_a, idx_b)) for p, st in ens.members
        ))
        res_a = [n for n in names_a if n in res_names]
        res_b = [n for n in names_b if n in res_names]
        if res_a and res_b:
            e_res = entanglement_entropy(
                resource,
                (resource_layout.subsystems_of(res_a), resource_layout.subsystems_of(res_b)),
            )
        else:
            e_res = 0.0
        rows.append(EntropyBoundRow(
            tuple(names_a), tuple(names_b), mean_e, e_res,
            e_res >= mean_e - TOL,
        ))
    applicable = ens.is_complete_basis()
    passed = all(r.satisfied for r in rows) if applicable else True
    all_mean_positive = all(r.mean_member_entropy > TOL for r in rows)
    fully_entangled = all(r.resource_entropy > TOL for r in rows)
    n_partite_ok = fully_entangled if (applicable and all_mean_positive) else True
    return EntropyBoundReport(
        tuple(rows), applicable, passed, all_mean_positive, fully_entangled, n_partite_ok,
    )


def mixed_strategy_fidelity(p: float, f_opt: float, f_local_fallback: float) -> float:
    """Fidelity of branching with probability p to an optimal strategy."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability out of range: {p}")
    for f in (f_opt, f_local_fallback):
        if not (0.0 <= f <= 1.0 + TOL):
            raise ValueError(f"fidelity out of range: {f}")
    return p * f_opt + (1.0 - p) * f_local_fallback


def vidal_conversion_probability(psi: StateVector, bipartition, target_rank: int) -> float:
    """Maximal local probability of reaching the rank-r maximally
    entangled state from ``psi`` across the bipartition.

    With descending squared Schmidt coefficients lam_1..lam_n this is
    min over 1 <= l <= r of r/(r-l+1) * sum_{i>=l} lam_i; it vanishes
    when the Schmidt rank falls short of the target.
    """
    r = int(target_rank)
    if r < 2:
        raise ValueError("target rank must be >= 2")
    data = schmidt(psi, bipartition)
    if data.rank < r:
        return 0.0
    lam = np.zeros(max(r, data.coefficients.size))
    lam[: data.coefficients.size] = data.coefficients ** 2
    best = 1.0
    for l in range(1, r + 1):
        tail = float(np.sum(lam[l - 1:]))
        best = min(best, r / (r - l + 1) * tail)
    return float(min(max(best, 0.0), 1.0))
