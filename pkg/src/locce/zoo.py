"""Concrete protocol builders.

Each builder returns a ``(JointProblem, tree)`` pair ready for
:func:`locce.protocols.run_protocol`. Leaf guesses are decoded
numerically while the tree is grown: each leaf guesses the member with
the largest weighted branch probability (ties to the lowest index), so
perfect protocols end with the unique surviving member and lossy ones
with the best available guess.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .tensor import (
    BELL_CORRECTIONS,
    StateVector,
    apply_to_batch,
    bell_vectors,
    embed_operator,
    generalized_bell_vectors,
    maximally_entangled,
    PAULI_I,
    PAULI_Z,
)
from .families import (
    Ensemble,
    Graph,
    PartyLayout,
    bell_basis,
    ghz_basis,
    ghz_state,
    graph_state_basis,
    lattice_basis,
    parametric_basis,
    single_qubit_layout,
)
from .fidelity import (
    global_optimum_orthonormal,
    mixed_strategy_fidelity,
    vidal_conversion_probability,
)
from .protocols import (
    Instrument,
    JointProblem,
    Leaf,
    Round,
    bell_instrument,
    computational_instrument,
    generalized_bell_instrument,
    plus_minus_instrument,
    projective_instrument,
    run_protocol,
    unitary_instrument,
)

__all__ = [
    "build_tree",
    "computational_protocol",
    "teleportation_protocol",
    "lattice_partial_teleport",
    "sequential_bell_protocol",
    "partitioned_ghz_protocol",
    "graph_decode_protocol",
    "graph_outcome_table",
    "ghz_subset_family",
    "ghz_subset_bell_protocol",
    "vidal_then_fallback",
    "ZooEntry",
    "standard_zoo",
]

ScriptStep = Instrument | Callable[[tuple[int, ...]], Instrument]


def build_tree(problem: JointProblem, script: Sequence[ScriptStep],
               decode: Callable[[tuple[int, ...], np.ndarray], int] | None = None):
    """Grow a tree from a round script, decoding every leaf.

    ``script`` entries are instruments, or callables receiving the
    outcome indices accumulated so far (for outcome-conditioned rounds
    such as correction unitaries). ``decode`` may override the default
    best-member rule; it receives the outcome path and the unnormalized
    member vectors at the leaf.
    """
    ens = problem.joint
    states = ens.amplitude_matrix()
    priors = ens.priors
    dims = ens.dims

    def default_decode(_outcomes, vectors):
        probs = np.real(np.einsum("id,id->i", vectors.conj(), vectors))
        return int(np.argmax(priors * probs))

    decode = decode or default_decode

    def grow(step, outcomes, vectors):
        if step == len(script):
            return Leaf(int(decode(outcomes, vectors)))
        inst = script[step]
        if not isinstance(inst, Instrument):
            inst = inst(outcomes)
        children = []
        for k, kraus in enumerate(inst.kraus):
            new = apply_to_batch(kraus, inst.targets, vectors, dims)
            children.append(grow(step + 1, outcomes + (k,), new))
        return Round(inst, tuple(children))

    return grow(0, (), states)


def computational_protocol(ens: Ensemble):
    """Every party measures all of its subsystems in the computational basis."""
    problem = JointProblem(ens)
    script = [
        computational_instrument(name, idx, tuple(ens.dims[i] for i in idx))
        for name, idx in ens.layout.parties
    ]
    return problem, build_tree(problem, script)


def _teleport_corrections(d: int) -> list[np.ndarray]:
    """Undo unitaries, one per generalized Bell outcome.

    Derived numerically from the wiring used here (the measured pair is
    (resource half, unknown), resource half first): after outcome k the
    distant half holds T_k |chi>, and the correction is T_k^dagger.
    """
    bells = generalized_bell_vectors(d)
    phi = maximally_entangled(d)
    eye = np.eye(d)
    out = []
    for k in range(d * d):
        bra = bells[k].reshape(d, d).conj()
        t = np.empty((d, d), dtype=complex)
        for j in range(d):
            vec = np.kron(phi, eye[j]).reshape(d, d, d)  # (res_A, res_B, unknown)
            t[:, j] = d * np.einsum("ac,abc->b", bra, vec)
        if np.max(np.abs(t.conj().T @ t - np.eye(d))) > 1e-9:
            raise AssertionError("teleportation transfer matrix is not unitary")
        out.append(t.conj().T)
    return out


def _member_images(ens: Ensemble, sender: str, receiver: str) -> np.ndarray:
    """Members re-indexed to (sender block, receiver block) order."""
    perm = ens.layout.indices(sender) + ens.layout.indices(receiver)
    rows = []
    for st in ens.states:
        t = np.moveaxis(st.amps.reshape(st.dims), perm, range(len(perm)))
        rows.append(t.reshape(-1))
    return np.stack(rows)


def teleportation_protocol(ens: Ensemble, sender: str, receiver: str):
    """Teleport the sender's share to the receiver, then project onto members.

    Consumes a d x d maximally entangled resource where d is the
    sender's local dimension; perfectly distinguishes any orthonormal
    ensemble, and is one-way sender -> receiver.
    """
    if len(ens.layout.parties) != 2:
        raise ValueError("teleportation needs a bipartite ensemble")
    if {sender, receiver} != set(ens.layout.names):
        raise ValueError(f"sender/receiver must be {ens.layout.names}")
    sidx = ens.layout.indices(sender)
    ridx = ens.layout.indices(receiver)
    d = int(np.prod([ens.dims[i] for i in sidx]))
    resource = StateVector((d, d), maximally_entangled(d))
    res_layout = PartyLayout(((sender, (0,)), (receiver, (1,))))
    problem = JointProblem(ens, resource, res_layout)
    shift = 2
    corrections = _teleport_corrections(d)
    images = _member_images(ens, sender, receiver)
    labels = tuple(str(i) for i in range(ens.size))
    final = projective_instrument(
        receiver, (1,) + tuple(i + shift for i in ridx), images, labels, complete=True,
    )
    script = [
        generalized_bell_instrument(sender, (0,) + tuple(i + shift for i in sidx), d),
        lambda outcomes: unitary_instrument(
            receiver, (1,), corrections[outcomes[0]], f"undo:{outcomes[0]}",
        ),
        final,
    ]
    return problem, build_tree(problem, script)


def lattice_partial_teleport(num_pairs: int, teleported_pairs: int):
    """Identify ``teleported_pairs`` Bell pairs exactly via one resource
    pair each; measure the rest computationally.

    Achieves fidelity 1/2**(num_pairs - teleported_pairs) on the full
    Bell-product basis, saturating at 1 when every pair is teleported.
    All of A's rounds precede all of B's, so the protocol is one-way.
    """
    n, m = num_pairs, teleported_pairs
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    ens = lattice_basis(n)
    res_amps = np.ones(1, dtype=complex)
    for _ in range(m):
        res_amps = np.kron(res_amps, bell_vectors()[0])
    resource = StateVector((2,) * (2 * m), res_amps)
    res_layout = PartyLayout((
        ("A", tuple(range(0, 2 * m, 2))),
        ("B", tuple(range(1, 2 * m, 2))),
    ))
    problem = JointProblem(ens, resource, res_layout)
    shift = 2 * m
    script: list[ScriptStep] = []
    for j in range(m):
        script.append(bell_instrument("A", (2 * j, shift + 2 * j)))
    rest_a = tuple(shift + 2 * j for j in range(m, n))
    if rest_a:
        script.append(computational_instrument("A", rest_a, (2,) * len(rest_a)))
    for j in range(m):
        bell_pos = j  # A's Bell round for pair j sits at script position j

        def corr(outcomes, j=j, bell_pos=bell_pos):
            return unitary_instrument(
                "B", (2 * j + 1,), BELL_CORRECTIONS[outcomes[bell_pos]],
                f"undo:{outcomes[bell_pos]}",
            )

        script.append(corr)
        script.append(bell_instrument("B", (2 * j + 1, shift + 2 * j + 1)))
    rest_b = tuple(shift + 2 * j + 1 for j in range(m, n))
    if rest_b:
        script.append(computational_instrument("B", rest_b, (2,) * len(rest_b)))
    return problem, build_tree(problem, script)


def sequential_bell_protocol(num_parties: int, order: Sequence[str] | None = None):
    """Distinguish the fully split GHZ basis with a GHZ resource.

    Every party Bell-measures its (resource, unknown) qubit pair in
    sequence, the next party in line applying the Pauli undo on its
    resource qubit after each outcome. Achieves fidelity 1 exactly; any
    measurement order works.
    """
    n = num_parties
    if n < 2:
        raise ValueError("need at least 2 parties")
    ens = ghz_basis(n, (1,) * n)
    res_layout = single_qubit_layout(n)
    problem = JointProblem(ens, ghz_state(n), res_layout)
    names = list(order) if order is not None else list(ens.layout.names)
    if sorted(names) != sorted(ens.layout.names):
        raise ValueError(f"order must permute {ens.layout.names}")
    joint = problem.joint
    script: list[ScriptStep] = []
    for t, name in enumerate(names):
        res_q, unk_q = joint.layout.indices(name)
        script.append(bell_instrument(name, (res_q, unk_q)))
        if t + 1 < n:
            nxt = names[t + 1]
            nxt_res = joint.layout.indices(nxt)[0]
            bell_pos = len(script) - 1

            def corr(outcomes, nxt=nxt, nxt_res=nxt_res, bell_pos=bell_pos):
                k = outcomes[bell_pos]
                return unitary_instrument(
                    nxt, (nxt_res,), BELL_CORRECTIONS[k], f"undo:{k}",
                )

            script.append(corr)
    return problem, build_tree(problem, script)


def _fanout_unitary(n_qubits: int) -> np.ndarray:
    """CNOTs copying local qubit 0 onto qubits 1..n-1."""
    cnot = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex,
    )
    u = np.eye(2 ** n_qubits, dtype=complex)
    for t in range(1, n_qubits):
        u = embed_operator(cnot, (0, t), (2,) * n_qubits) @ u
    return u


def partitioned_ghz_protocol(num_qubits: int, party_sizes: Sequence[int]):
    """Distinguish an N-qubit m-party GHZ basis with an m-qubit GHZ resource.

    Each party first fans its resource qubit out over (n_i - 1) local
    ancilla qubits with CNOTs, turning the m-qubit resource into the
    N-qubit one; the sequential Bell protocol then runs pairwise under
    the coarse layout. Fidelity 1 for any partitioning.
    """
    sizes = tuple(int(s) for s in party_sizes)
    n = num_qubits
    ens = ghz_basis(n, sizes)
    offsets = []
    off = 0
    for s in sizes:
        offsets.append(off)
        off += s
    # resource = m-qubit GHZ padded with |0> ancillas inside each party block
    amps = np.zeros(2 ** n, dtype=complex)
    mask = sum(1 << (n - 1 - o) for o in offsets)
    amps[0] = amps[mask] = 1 / math.sqrt(2)
    resource = StateVector((2,) * n, amps)
    res_layout = PartyLayout(tuple(
        (name, idx) for name, idx in ens.layout.parties
    ))
    problem = JointProblem(ens, resource, res_layout)
    owner = {}
    for name, idx in ens.layout.parties:
        for q in idx:
            owner[q] = name
    script: list[ScriptStep] = []
    for name, idx in ens.layout.parties:
        if len(idx) > 1:
            script.append(unitary_instrument(name, idx, _fanout_unitary(len(idx)), "fanout"))
    bell_pos = {}
    for q in range(n):
        bell_pos[q] = len(script)
        script.append(bell_instrument(owner[q], (q, n + q)))
        if q + 1 < n:
            pos = bell_pos[q]

            def corr(outcomes, q=q, pos=pos):
                k = outcomes[pos]
                return unitary_instrument(
                    owner[q + 1], (q + 1,), BELL_CORRECTIONS[k], f"undo:{k}",
                )

            script.append(corr)
    return problem, build_tree(problem, script)


_BELL_SIGMAS = None


def _bell_sigmas():
    """Single-qubit operators W_k with |B_k> = (I x W_k)|phi+>."""
    global _BELL_SIGMAS
    if _BELL_SIGMAS is None:
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        z = np.diag([1.0, -1.0]).astype(complex)
        _BELL_SIGMAS = (np.eye(2, dtype=complex), z, x, x @ z)
    return _BELL_SIGMAS


def graph_outcome_table(g: Graph) -> dict[tuple[int, ...], int]:
    """Decoding lookup: Bell-outcome tuple -> unique consistent member.

    Entry sigma maps to the x with squared overlap 1 between
    (tensor of sigma operators)|fiducial> and member x; every member is
    hit exactly 2**N times out of the 4**N tuples.
    """
    ens, _resource, _stabs = graph_state_basis(g)
    n = g.vertex_count
    # the fiducial state is the all-plus-eigenvalue member, i.e. x = 0
    base = ens.states[0].amps
    members = ens.amplitude_matrix()
    sigmas = _bell_sigmas()
    table: dict[tuple[int, ...], int] = {}
    for combo in itertools.product(range(4), repeat=n):
        op = np.ones((1, 1), dtype=complex)
        for k in combo:
            op = np.kron(op, sigmas[k])
        moved = op @ base
        overlaps = np.abs(members.conj() @ moved) ** 2
        hit = np.flatnonzero(overlaps > 1 - 1e-9)
        if hit.size != 1:
            raise AssertionError(f"outcome {combo} decodes to {hit.size} members")
        table[combo] = int(hit[0])
    return table


def graph_decode_protocol(g: Graph):
    """Distinguish a graph-state basis with its conjugate as the resource.

    All parties Bell-measure their (resource, unknown) pair; the outcome
    tuple is decoded through the precomputed Pauli-orbit lookup.
    Fidelity 1 with no corrections and no adaptivity.
    """
    ens, resource, _stabs = graph_state_basis(g)
    n = g.vertex_count
    problem = JointProblem(ens, resource, single_qubit_layout(n))
    joint = problem.joint
    script = [
        bell_instrument(name, joint.layout.indices(name)) for name in joint.layout.names
    ]
    table = graph_outcome_table(g)

    def decode(outcomes, _vectors):
        return table[tuple(outcomes)]

    return problem, build_tree(problem, script, decode)


def ghz_subset_family() -> Ensemble:
    """Four three-qubit GHZ-type states, equiprobable, parties A, B, C.

    The first two conjugate pairs of the split GHZ basis: Bell-like
    across C|AB, perfectly distinguishable across the other two cuts.
    """
    source = ghz_basis(3, (1, 1, 1))
    layout = PartyLayout((("A", (0,)), ("B", (1,)), ("C", (2,))))
    return Ensemble(layout, tuple((0.25, s) for s in source.states[:4]))


def ghz_subset_bell_protocol():
    """Distinguish the four-state GHZ subset with one Bell pair on B, C.

    A measures in the plus/minus basis; B applies a conditional phase
    flip, which leaves an unknown Bell pair between B and C; B and C
    finish by teleportation-style Bell discrimination. Fidelity 1.
    """
    ens = ghz_subset_family()
    resource = StateVector((2, 2), bell_vectors()[0])
    res_layout = PartyLayout((("B", (0,)), ("C", (1,))))
    problem = JointProblem(ens, resource, res_layout)
    # joint indices: B resource 0, C resource 1, unknowns A=2, B=3, C=4

    def a_fix(outcomes):
        u = PAULI_I if outcomes[0] == 0 else PAULI_Z
        return unitary_instrument("B", (3,), u, "I" if outcomes[0] == 0 else "Z")

    def c_fix(outcomes):
        k = outcomes[2]
        return unitary_instrument("C", (1,), BELL_CORRECTIONS[k], f"undo:{k}")

    script: list[ScriptStep] = [
        plus_minus_instrument("A", 2),
        a_fix,
        bell_instrument("B", (0, 3)),
        c_fix,
        bell_instrument("C", (1, 4)),
    ]
    return problem, build_tree(problem, script)


def vidal_then_fallback(ens: Ensemble, resource: StateVector, target_rank: int,
                        fallback_tree, resource_split=None) -> float:
    """Fidelity of: convert the resource to a maximally entangled state
    when possible, teleport (optimal); otherwise run the fallback tree.

    Returns p * F_opt + (1 - p) * F_fallback with p the maximal local
    conversion probability of the resource to the rank-r target.
    """
    if resource_split is None:
        half = resource.n_subsystems // 2
        resource_split = (tuple(range(half)), tuple(range(half, resource.n_subsystems)))
    p = vidal_conversion_probability(resource, resource_split, target_rank)
    f_opt = global_optimum_orthonormal(ens)
    fallback = run_protocol(JointProblem(ens), fallback_tree).fidelity
    return mixed_strategy_fidelity(p, f_opt, fallback)


@dataclass(frozen=True)
class ZooEntry:
    name: str
    problem: JointProblem
    tree: object
    expected_fidelity: float
    mes: tuple[int, int] | None = None  # (k states, d local dim) when the
    one_way_order: tuple[str, ...] | None = None  # joint members are MES


def standard_zoo() -> list[ZooEntry]:
    """Desk-scale instances of every builder, used by the cross-checks."""
    entries: list[ZooEntry] = []

    problem, tree = teleportation_protocol(bell_basis(), "A", "B")
    entries.append(ZooEntry("teleport-bell", problem, tree, 1.0, (4, 4), ("A", "B")))

    problem, tree = teleportation_protocol(parametric_basis(0.9, 0.8), "A", "B")
    entries.append(ZooEntry("teleport-parametric", problem, tree, 1.0, None, ("A", "B")))

    problem, tree = teleportation_protocol(lattice_basis(1), "A", "B")
    entries.append(ZooEntry("teleport-lattice1", problem, tree, 1.0, (4, 4), ("A", "B")))

    problem, tree = lattice_partial_teleport(2, 1)
    entries.append(ZooEntry("lattice-2-1", problem, tree, 0.5, (16, 8), ("A", "B")))

    problem, tree = lattice_partial_teleport(2, 2)
    entries.append(ZooEntry("lattice-2-2", problem, tree, 1.0, (16, 16), ("A", "B")))

    for n in (2, 3):
        problem, tree = sequential_bell_protocol(n)
        entries.append(ZooEntry(f"sequential-bell-{n}", problem, tree, 1.0))

    problem, tree = partitioned_ghz_protocol(3, (2, 1))
    entries.append(ZooEntry("partitioned-ghz-3-21", problem, tree, 1.0))

    problem, tree = partitioned_ghz_protocol(4, (2, 2))
    entries.append(ZooEntry("partitioned-ghz-4-22", problem, tree, 1.0))

    for name, graph in (
        ("graph-path2", Graph.path(2)),
        ("graph-path3", Graph.path(3)),
        ("graph-triangle", Graph.complete(3)),
    ):
        problem, tree = graph_decode_protocol(graph)
        entries.append(ZooEntry(name, problem, tree, 1.0))

    problem, tree = ghz_subset_bell_protocol()
    entries.append(ZooEntry("ghz-subset-bell", problem, tree, 1.0))

    problem, tree = computational_protocol(bell_basis())
    entries.append(ZooEntry("computational-bell", problem, tree, 0.5, (4, 2), ("A", "B")))

    problem, tree = computational_protocol(ghz_basis(3, (1, 1, 1)))
    entries.append(ZooEntry("computational-ghz3", problem, tree, 0.5))

    problem, tree = computational_protocol(lattice_basis(2))
    entries.append(ZooEntry("computational-lattice2", problem, tree, 0.25, (16, 4), ("A", "B")))

    return entries
