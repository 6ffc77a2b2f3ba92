# Graph-state bases and one-shot Bell-measurement decoding.
#
# For any graph, the vertex stabilizers X_a prod_{b~a} Z_b pin down an
# orthonormal eigenbasis. Handing the parties the conjugate of the
# fiducial state lets them identify any member with one round of local
# Bell measurements and a classical lookup.

import numpy as np

from locce import Graph, graph_state_basis, run_protocol
from locce.zoo import graph_decode_protocol, graph_outcome_table

for name, graph in (
    ("triangle", Graph.complete(3)),
    ("4-star", Graph.star(4)),
    ("4-cycle", Graph.cycle(4)),
):
    n = graph.vertex_count
    ens, resource, stabilizers = graph_state_basis(graph)
    print(f"{name}: {len(ens.states)} basis states on {n} qubits, "
          f"edges {sorted(graph.edges)}")

    # spot-check the eigenvalue pattern of member x under each stabilizer
    x = 0b10 if n == 2 else 0b101
    st = ens.states[x]
    signs = []
    for stab in stabilizers:
        val = np.vdot(st.amps, stab.entries @ st.amps).real
        signs.append(f"{val:+.0f}")
    print(f"  member {x:0{n}b} stabilizer eigenvalues: {' '.join(signs)}")

    # run the decoding protocol: every party Bell-measures its pair
    problem, tree = graph_decode_protocol(graph)
    result = run_protocol(problem, tree)
    print(f"  fidelity with conjugate-state resource: {result.fidelity:.12g}")

    # each member owns exactly 2^N of the 4^N outcome tuples
    table = graph_outcome_table(graph)
    counts = {}
    for member in table.values():
        counts[member] = counts.get(member, 0) + 1
    print(f"  outcome tuples per member: {sorted(set(counts.values()))} "
          f"(out of {4 ** n} tuples)\n")

print("the complete graph reproduces the GHZ-basis result: its graph basis")
print("is locally equivalent to the GHZ basis, and the decoder is the same")
print("one-round Bell-measurement scheme.")
