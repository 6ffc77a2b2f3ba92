"""Executable LOCC protocols as measurement trees with classical branching.

A protocol is a rooted tree. Each internal node carries an
:class:`Instrument` (a Kraus decomposition acting on an ordered subset
of one party's subsystems) and one child per outcome; classical
communication is implicit in the branching. Leaves carry a guess,
either a member index of the ensemble being discriminated or an
explicit state.

Evaluation enumerates every root-to-leaf branch. For member i and
branch b with accumulated Kraus product K_b, the branch contributes

    p_i * ||K_b |psi_i>||^2 * |<psi_i|phi_b>|^2

which matches the average-fidelity functional once each branch is read
as the POVM element K_b^dagger K_b with guess phi_b (see
:func:`flatten_to_povm`). Branches whose total weighted probability
falls below the pruning threshold are skipped.

Resource attachment follows the joint-space picture: discriminating
{psi_i} with a shared resource Psi is the same problem as
discriminating {Psi (x) psi_i}, with each sharing party now holding its
resource subsystems in front of its unknown-state subsystems.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .tensor import (
    TOL,
    StateVector,
    apply_to_batch,
    bell_vectors,
    generalized_bell_vectors,
    kron,
)
from .families import Ensemble, PartyLayout
from .fidelity import GuessStrategy, Povm

__all__ = [
    "Instrument",
    "Round",
    "Leaf",
    "JointProblem",
    "attach_resource",
    "validate_tree",
    "run_protocol",
    "ProtocolResult",
    "BranchRecord",
    "StepRecord",
    "validate_one_way",
    "flatten_to_povm",
    "relabel_parties",
    "tree_to_json",
    "tree_from_json",
    "bell_instrument",
    "generalized_bell_instrument",
    "computational_instrument",
    "plus_minus_instrument",
    "unitary_instrument",
    "projective_instrument",
]

PRUNE = 1e-12


@dataclass(frozen=True)
class Instrument:
    """Kraus operators applied by one party to an ordered subsystem subset.

    ``kraus[k]`` acts on the product space of ``targets`` taken in the
    given order; completeness sum_k K^dag K = I is enforced, so padding
    with identities on the party's remaining subsystems is implicit.
    """

    party: str
    targets: tuple[int, ...]
    kraus: tuple[np.ndarray, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        if len(set(targets)) != len(targets) or not targets:
            raise ValueError(f"targets must be distinct and nonempty: {targets}")
        kraus = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not kraus:
            raise ValueError("instrument needs at least one Kraus operator")
        d = kraus[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for k in kraus:
            if k.shape != (d, d):
                raise ValueError("Kraus operators must share one square shape")
            total += k.conj().T @ k
        if np.max(np.abs(total - np.eye(d))) > TOL:
            raise ValueError(
                f"incomplete instrument for party {self.party!r}: "
                f"sum K^dag K deviates from identity by {np.max(np.abs(total - np.eye(d))):.2e}"
            )
        labels = self.labels
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != len(kraus):
                raise ValueError("labels must match the number of outcomes")
        object.__setattr__(self, "party", str(self.party))
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "labels", labels)

    @property
    def n_outcomes(self) -> int:
        return len(self.kraus)

    def outcome_label(self, k: int) -> str:
        return self.labels[k] if self.labels else str(k)


@dataclass(frozen=True)
class Round:
    instrument: Instrument
    children: tuple

    def __post_init__(self):
        children = tuple(self.children)
        if len(children) != self.instrument.n_outcomes:
            raise ValueError(
                f"round has {len(children)} children for "
                f"{self.instrument.n_outcomes} outcomes"
            )
        object.__setattr__(self, "children", children)


@dataclass(frozen=True)
class Leaf:
    """Terminal guess: an ensemble member index or an explicit state."""

    guess: int | StateVector


@dataclass(frozen=True)
class JointProblem:
    """An ensemble to discriminate, optionally with an attached resource."""

    ensemble: Ensemble
    resource: StateVector | None = None
    resource_layout: PartyLayout | None = None
    _joint: Ensemble | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if (self.resource is None) != (self.resource_layout is None):
            raise ValueError("resource and resource_layout must be given together")
        if self.resource is not None:
            joint = attach_resource(self.ensemble, self.resource, self.resource_layout)
        else:
            joint = self.ensemble
        object.__setattr__(self, "_joint", joint)

    @property
    def joint(self) -> Ensemble:
        return self._joint


def attach_resource(ens: Ensemble, resource: StateVector,
                    resource_layout: PartyLayout) -> Ensemble:
    """Tensor the resource onto every member and merge the layouts.

    Resource subsystems occupy global indices 0..R-1; each sharing
    party's index list gains its resource subsystems in front of its
    unknown-state subsystems.
    """
    if not resource_layout.covers(resource.n_subsystems):
        raise ValueError("resource layout does not cover the resource subsystems")
    ens_names = set(ens.layout.names)
    for name in resource_layout.names:
        if name not in ens_names:
            raise KeyError(f"resource party {name!r} unknown to the ensemble layout")
    shift = resource.n_subsystems
    res_names = set(resource_layout.names)
    parties = []
    for name, idx in ens.layout.parties:
        res_idx = resource_layout.indices(name) if name in res_names else ()
        parties.append((name, tuple(res_idx) + tuple(i + shift for i in idx)))
    layout = PartyLayout(tuple(parties))
    members = tuple((p, kron(resource, s)) for p, s in ens.members)
    return Ensemble(layout, members)


def _walk(node, path=()):
    if isinstance(node, Leaf):
        yield path, node
    elif isinstance(node, Round):
        for k, child in enumerate(node.children):
            yield from _walk(child, path + ((node.instrument, k),))
    else:
        raise TypeError(f"unexpected node type {type(node).__name__}")


def validate_tree(tree, ens: Ensemble) -> None:
    """Check party names, target locality and guess ranges against ``ens``."""
    dims = ens.dims

    def visit(node):
        if isinstance(node, Leaf):
            if isinstance(node.guess, int):
                if not 0 <= node.guess < ens.size:
                    raise ValueError(f"leaf guesses member {node.guess} of {ens.size}")
            elif isinstance(node.guess, StateVector):
                if node.guess.dims != dims:
                    raise ValueError("leaf guess dims do not match the ensemble")
            else:
                raise TypeError("leaf guess must be a member index or StateVector")
            return
        inst = node.instrument
        party_idx = ens.layout.indices(inst.party)  # raises for unknown party
        if not set(inst.targets) <= set(party_idx):
            raise ValueError(
                f"instrument for {inst.party!r} targets {inst.targets} outside "
                f"that party's subsystems {party_idx}"
            )
        dloc = int(np.prod([dims[t] for t in inst.targets]))
        if inst.kraus[0].shape != (dloc, dloc):
            raise ValueError(
                f"instrument for {inst.party!r} has operator shape "
                f"{inst.kraus[0].shape}, expected ({dloc},{dloc})"
            )
        for child in node.children:
            visit(child)

    visit(tree)


@dataclass(frozen=True)
class StepRecord:
    party: str
    outcome: int
    label: str
    n_outcomes: int
    survivor_count: int


@dataclass(frozen=True)
class BranchRecord:
    steps: tuple[StepRecord, ...]
    probability: float
    member_probabilities: np.ndarray
    survivors: tuple[int, ...]
    guess_index: int | None


@dataclass(frozen=True)
class ProtocolResult:
    fidelity: float
    branches: tuple[BranchRecord, ...]

    def survivors_after_measurement_round(self, j: int) -> tuple[int, ...]:
        """Distinct survivor counts right after the j-th multi-outcome round."""
        counts = set()
        for br in self.branches:
            seen = 0
            for step in br.steps:
                if step.n_outcomes > 1:
                    seen += 1
                if seen == j:
                    counts.add(step.survivor_count)
                    break
        return tuple(sorted(counts))


def run_protocol(problem: JointProblem, tree, prune: float = PRUNE) -> ProtocolResult:
    """Exact fidelity of one protocol by full branch enumeration."""
    ens = problem.joint
    validate_tree(tree, ens)
    states = ens.amplitude_matrix()
    priors = ens.priors
    dims = ens.dims
    member_overlap = np.abs(states.conj() @ states.T) ** 2  # |<psi_i|psi_g>|^2

    branches: list[BranchRecord] = []
    total = 0.0

    def descend(node, vectors, steps):
        nonlocal total
        if isinstance(node, Leaf):
            probs = np.real(np.einsum("id,id->i", vectors.conj(), vectors))
            if isinstance(node.guess, int):
                overlap = member_overlap[:, node.guess]
                guess_index = node.guess
            else:
                overlap = np.abs(states.conj() @ node.guess.amps) ** 2
                guess_index = None
            total += float(np.dot(priors * probs, overlap))
            branches.append(BranchRecord(
                steps=tuple(steps),
                probability=float(np.dot(priors, probs)),
                member_probabilities=probs,
                survivors=tuple(int(i) for i in np.flatnonzero(probs > prune)),
                guess_index=guess_index,
            ))
            return
        inst = node.instrument
        for k, K in enumerate(inst.kraus):
            new = apply_to_batch(K, inst.targets, vectors, dims)
            probs = np.real(np.einsum("id,id->i", new.conj(), new))
            if float(np.dot(priors, probs)) < prune:
                continue
            step = StepRecord(
                party=inst.party,
                outcome=k,
                label=inst.outcome_label(k),
                n_outcomes=inst.n_outcomes,
                survivor_count=int(np.count_nonzero(probs > prune)),
            )
            descend(node.children[k], new, steps + [step])

    descend(tree, states.copy(), [])
    return ProtocolResult(float(total), tuple(branches))


def validate_one_way(tree, order: Sequence[str]) -> bool:
    """True iff every path's acting parties are non-decreasing in ``order``."""
    rank = {str(name): i for i, name in enumerate(order)}
    for path, _leaf in _walk(tree):
        last = -1
        for inst, _k in path:
            r = rank.get(inst.party)
            if r is None or r < last:
                return False
            last = r
    return True


def flatten_to_povm(tree, problem: JointProblem):
    """Collapse a protocol tree to one global POVM element per branch.

    Branch b yields K_b^dagger K_b identity-padded to the joint space,
    paired with the leaf's guess, so that ``average_fidelity`` on the
    result reproduces :func:`run_protocol` exactly.
    """
    ens = problem.joint
    validate_tree(tree, ens)
    dims = ens.dims
    d = ens.dim
    elements: list[np.ndarray] = []
    guesses: list[StateVector] = []

    def descend(node, kmat):
        if isinstance(node, Leaf):
            elements.append(kmat.conj().T @ kmat)
            if isinstance(node.guess, int):
                guesses.append(ens.states[node.guess])
            else:
                guesses.append(node.guess)
            return
        inst = node.instrument
        for k, K in enumerate(inst.kraus):
            new = apply_to_batch(K, inst.targets, kmat.T, dims).T
            descend(node.children[k], new)

    descend(tree, np.eye(d, dtype=complex))
    return Povm(dims, tuple(elements)), GuessStrategy(tuple(guesses))


def relabel_parties(tree, mapping: Mapping[str, str]):
    """Rename acting parties (e.g. after coarsening); targets unchanged."""
    if isinstance(tree, Leaf):
        return tree
    inst = tree.instrument
    new_inst = Instrument(
        mapping.get(inst.party, inst.party), inst.targets, inst.kraus, inst.labels,
    )
    return Round(new_inst, tuple(relabel_parties(c, mapping) for c in tree.children))


# -- serialization -----------------------------------------------------------

def _complex_to_json(arr: np.ndarray):
    return {"re": np.real(arr).tolist(), "im": np.imag(arr).tolist()}


def _complex_from_json(obj) -> np.ndarray:
    return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)


def tree_to_dict(tree) -> dict:
    if isinstance(tree, Leaf):
        if isinstance(tree.guess, int):
            return {"type": "leaf", "member": tree.guess}
        return {
            "type": "leaf",
            "state": {"dims": list(tree.guess.dims), **_complex_to_json(tree.guess.amps)},
        }
    inst = tree.instrument
    return {
        "type": "round",
        "party": inst.party,
        "targets": list(inst.targets),
        "labels": list(inst.labels) if inst.labels else None,
        "kraus": [_complex_to_json(k) for k in inst.kraus],
        "children": [tree_to_dict(c) for c in tree.children],
    }


def tree_from_dict(obj):
    if obj["type"] == "leaf":
        if "member" in obj:
            return Leaf(int(obj["member"]))
        st = obj["state"]
        return Leaf(StateVector(tuple(st["dims"]), _complex_from_json(st)))
    if obj["type"] == "round":
        inst = Instrument(
            obj["party"],
            tuple(obj["targets"]),
            tuple(_complex_from_json(k) for k in obj["kraus"]),
            tuple(obj["labels"]) if obj.get("labels") else None,
        )
        return Round(inst, tuple(tree_from_dict(c) for c in obj["children"]))
    raise ValueError(f"unknown node type {obj.get('type')!r}")


def tree_to_json(tree, indent: int | None = None) -> str:
    return json.dumps(tree_to_dict(tree), indent=indent)


def tree_from_json(text: str):
    return tree_from_dict(json.loads(text))


# -- instrument builders -----------------------------------------------------

def projective_instrument(party: str, targets: Sequence[int],
                          vectors: np.ndarray,
                          labels: Sequence[str] | None = None,
                          complete: bool = False) -> Instrument:
    """Rank-1 projectors onto the rows of ``vectors``.

    With ``complete=True`` a residual projector onto the orthogonal
    complement is appended (labelled "rest") so the instrument sums to
    the identity even when the rows do not span the space.
    """
    vectors = np.asarray(vectors, dtype=complex)
    kraus = [np.outer(v, v.conj()) for v in vectors]
    labels = list(labels) if labels is not None else [str(k) for k in range(len(kraus))]
    if complete:
        rest = np.eye(vectors.shape[1], dtype=complex) - sum(kraus)
        if np.max(np.abs(rest)) > TOL:
            kraus.append(rest)
            labels.append("rest")
    return Instrument(party, tuple(targets), tuple(kraus), tuple(labels))


def bell_instrument(party: str, targets: Sequence[int]) -> Instrument:
    """Two-qubit Bell measurement in the order phi+, phi-, psi+, psi-."""
    return projective_instrument(
        party, targets, bell_vectors(), ("phi+", "phi-", "psi+", "psi-"),
    )


def generalized_bell_instrument(party: str, targets: Sequence[int], d: int) -> Instrument:
    labels = tuple(f"{m}{n}" for m in range(d) for n in range(d))
    return projective_instrument(party, targets, generalized_bell_vectors(d), labels)


def computational_instrument(party: str, targets: Sequence[int],
                             local_dims: Sequence[int]) -> Instrument:
    d = int(np.prod(tuple(local_dims)))
    eye = np.eye(d, dtype=complex)
    labels = tuple(str(b) for b in range(d))
    return projective_instrument(party, targets, eye, labels)


def plus_minus_instrument(party: str, target: int) -> Instrument:
    h = 1 / math.sqrt(2)
    vecs = np.array([[h, h], [h, -h]], dtype=complex)
    return projective_instrument(party, (target,), vecs, ("+", "-"))


def unitary_instrument(party: str, targets: Sequence[int], u: np.ndarray,
                       label: str = "u") -> Instrument:
    """Single-outcome round applying a deterministic local unitary."""
    return Instrument(party, tuple(targets), (np.asarray(u, dtype=complex),), (label,))
