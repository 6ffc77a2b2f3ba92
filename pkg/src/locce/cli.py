"""Command-line front end: run scenarios, print result tables.

Subcommands map to the protocol families; ``paper-suite`` runs the full
verification battery. Every run emits rows with the fixed column order

    scenario, family, protocol, fidelity, bound, expected, status, ms

as an aligned table, CSV, or JSON. Floats print with 12 significant
digits. A scenario JSON file can predefine any field; explicit flags
override file values. The exit code is 0 iff every row passes.

Scenario file schema (all keys optional unless the family needs them):

    {
      "scenario": "my-run",        # row label
      "family":   "ghz",           # must match the subcommand if given
      "n": 4, "sizes": [2, 2],     # family parameters (see --help per command)
      "alpha": 0.9, "gamma": 0.8,
      "m": 1, "graph": "triangle", "edges": "0-1,1-2",
      "lambdas": [1.0, 1.0], "outcomes": 4, "restarts": 20,
      "seed": 7,
      "format": "table",           # table | csv | json
      "timing": "on"               # "off" zeroes the ms column for reproducible bytes
    }

The default seed comes from the LOCCE_SEED environment variable when no
flag or file value is given.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .tensor import StateVector, maximally_entangled
from .families import (
    Ensemble,
    Graph,
    PartyLayout,
    bell_basis,
    coarsen,
    ghz_basis,
    ghz_state,
    lattice_basis,
    parametric_basis,
    single_qubit_layout,
)
from .fidelity import (
    average_fidelity,
    bipartition_min_bound,
    computational_povm,
    entropy_bound_check,
    mes_bound,
    optimal_guess,
    schmidt_coeff_sep_bound,
)
from .protocols import JointProblem, flatten_to_povm, relabel_parties, run_protocol
from .oneway import (
    ResourceSpectrum,
    feasibility_search,
    orthogonality_residual,
    teleportation_certificate,
    to_matrix_rep,
)
from .zoo import (
    computational_protocol,
    ghz_subset_bell_protocol,
    ghz_subset_family,
    graph_decode_protocol,
    graph_outcome_table,
    lattice_partial_teleport,
    partitioned_ghz_protocol,
    sequential_bell_protocol,
    standard_zoo,
    teleportation_protocol,
    vidal_then_fallback,
)

COLUMNS = ("scenario", "family", "protocol", "fidelity", "bound", "expected", "status", "ms")
ATOL = 1e-9

NAMED_GRAPHS = {
    "path2": lambda: Graph.path(2),
    "path3": lambda: Graph.path(3),
    "triangle": lambda: Graph.complete(3),
    "k3": lambda: Graph.complete(3),
    "star4": lambda: Graph.star(4),
    "cycle4": lambda: Graph.cycle(4),
}


def fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


@dataclass
class Row:
    scenario: str
    family: str
    protocol: str
    fidelity: str
    bound: str
    expected: str
    status: str
    ms: float

    def cells(self, timing: bool) -> tuple[str, ...]:
        ms = fmt(round(self.ms, 3)) if timing else "0"
        return (self.scenario, self.family, self.protocol, self.fidelity,
                self.bound, self.expected, self.status, ms)


def _row(scenario, family, protocol, value, bound, expected, ok, t0) -> Row:
    return Row(
        scenario=scenario, family=family, protocol=protocol,
        fidelity=fmt(value) if value is not None else "-",
        bound=bound, expected=expected,
        status="pass" if ok else "fail",
        ms=(time.perf_counter() - t0) * 1000.0,
    )


def emit(rows: list[Row], fmt_name: str, timing: bool = True) -> str:
    if fmt_name == "json":
        payload = [dict(zip(COLUMNS, r.cells(timing))) for r in rows]
        return json.dumps(payload, indent=2)
    table = [COLUMNS] + [r.cells(timing) for r in rows]
    if fmt_name == "csv":
        return "\n".join(",".join(cells) for cells in table)
    widths = [max(len(row[i]) for row in table) for i in range(len(COLUMNS))]
    lines = []
    for r, cells in enumerate(table):
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
        if r == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


class ScenarioError(Exception):
    pass


def _require(params: dict, key: str, kind, family: str):
    if key not in params or params[key] is None:
        raise ScenarioError(f"{family}: missing required field '{key}'")
    try:
        return kind(params[key])
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{family}: bad value for field '{key}': {exc}") from exc


def _int_list(value) -> tuple[int, ...]:
    if isinstance(value, str):
        return tuple(int(s) for s in value.split(",") if s)
    return tuple(int(v) for v in value)


def _float_list(value) -> tuple[float, ...]:
    if isinstance(value, str):
        return tuple(float(s) for s in value.split(",") if s)
    return tuple(float(v) for v in value)


def _parse_graph(params: dict) -> Graph:
    name = params.get("graph")
    if name:
        key = str(name).lower()
        if key not in NAMED_GRAPHS:
            raise ScenarioError(
                f"graph: unknown named graph '{name}' (choices: {sorted(NAMED_GRAPHS)})"
            )
        return NAMED_GRAPHS[key]()
    edges_spec = params.get("edges")
    if not edges_spec:
        raise ScenarioError("graph: need field 'graph' (named) or 'edges'")
    try:
        edges = []
        for part in str(edges_spec).split(","):
            a, b = part.split("-")
            edges.append((int(a), int(b)))
        n = params.get("vertices")
        n = int(n) if n is not None else max(max(e) for e in edges) + 1
        return Graph(n, frozenset(edges))
    except (ValueError, KeyError) as exc:
        raise ScenarioError(f"graph: bad value for field 'edges': {exc}") from exc


# -- family runners ----------------------------------------------------------

def run_ghz(params: dict) -> list[Row]:
    n = _require(params, "n", int, "ghz")
    sizes = _int_list(params.get("sizes") or (1,) * n)
    label = params.get("scenario") or f"ghz-n{n}-sizes{'.'.join(map(str, sizes))}"
    t0 = time.perf_counter()
    if all(s == 1 for s in sizes):
        problem, tree = sequential_bell_protocol(n)
        proto = "sequential-bell"
    else:
        problem, tree = partitioned_ghz_protocol(n, sizes)
        proto = "partitioned-ghz"
    f = run_protocol(problem, tree).fidelity
    return [_row(label, "ghz", proto, f, "n/a (perfect)", fmt(1.0),
                 abs(f - 1.0) <= ATOL, t0)]


def run_graph(params: dict) -> list[Row]:
    g = _parse_graph(params)
    label = params.get("scenario") or params.get("graph") or f"graph-{g.vertex_count}v"
    t0 = time.perf_counter()
    problem, tree = graph_decode_protocol(g)
    f = run_protocol(problem, tree).fidelity
    table = graph_outcome_table(g)
    counts = {}
    for member in table.values():
        counts[member] = counts.get(member, 0) + 1
    mult_ok = set(counts.values()) == {2 ** g.vertex_count}
    return [_row(str(label), "graph", "bell-orbit-decode", f, "n/a (perfect)",
                 fmt(1.0), abs(f - 1.0) <= ATOL and mult_ok, t0)]


def run_lattice(params: dict) -> list[Row]:
    n = _require(params, "n", int, "lattice")
    m = _require(params, "m", int, "lattice")
    label = params.get("scenario") or f"lattice-n{n}-m{m}"
    t0 = time.perf_counter()
    problem, tree = lattice_partial_teleport(n, m)
    f = run_protocol(problem, tree).fidelity
    expected = 1.0 / 2 ** (n - m)
    bound = mes_bound(2 ** (2 * n), 2 ** n)  # on the resource-free problem
    return [_row(label, "lattice", f"partial-teleport-m{m}", f, fmt(bound),
                 fmt(expected), abs(f - expected) <= ATOL, t0)]


def run_parametric(params: dict) -> list[Row]:
    alpha = _require(params, "alpha", float, "parametric")
    gamma = _require(params, "gamma", float, "parametric")
    label = params.get("scenario") or f"parametric-a{fmt(alpha)}-g{fmt(gamma)}"
    rows = []
    t0 = time.perf_counter()
    ens = parametric_basis(alpha, gamma)
    expected = (alpha ** 2 + gamma ** 2) / 2
    _, f_local = optimal_guess(ens, computational_povm(ens.dims))
    rows.append(_row(label, "parametric", "computational+opt-guess", f_local,
                     "n/a", fmt(expected), abs(f_local - expected) <= ATOL, t0))
    t0 = time.perf_counter()
    problem, tree = teleportation_protocol(ens, "A", "B")
    f_tel = run_protocol(problem, tree).fidelity
    rows.append(_row(label, "parametric", "teleportation", f_tel, "n/a (perfect)",
                     fmt(1.0), abs(f_tel - 1.0) <= ATOL, t0))
    return rows


def run_example4(params: dict) -> list[Row]:
    label = params.get("scenario") or "example4"
    rows = []
    t0 = time.perf_counter()
    problem, tree = ghz_subset_bell_protocol()
    f = run_protocol(problem, tree).fidelity
    rows.append(_row(label, "example4", "plusminus+bell-pair", f, "n/a (perfect)",
                     fmt(1.0), abs(f - 1.0) <= ATOL, t0))
    t0 = time.perf_counter()
    report = entropy_bound_check(
        StateVector((2, 2), maximally_entangled(2)),
        PartyLayout((("B", (0,)), ("C", (1,)))),
        ghz_subset_family(),
    )
    rows.append(_row(label, "example4", "entropy-bound", None,
                     "not-applicable" if not report.applicable else "applies",
                     "pass", report.passed, t0))
    return rows


def run_oneway(params: dict) -> list[Row]:
    lambdas = _float_list(params.get("lambdas") or (1.0, 1.0))
    outcomes = int(params.get("outcomes") or len(lambdas) ** 2)
    restarts = int(params.get("restarts") or 20)
    seed = int(params.get("seed") or 0)
    label = params.get("scenario") or f"oneway-lam{','.join(fmt(x) for x in lambdas)}"
    spectrum = ResourceSpectrum(lambdas)
    rep = to_matrix_rep(bell_basis()) if spectrum.d == 2 else None
    if rep is None:
        raise ScenarioError("oneway: field 'lambdas' must have length 2 (qubit ensembles)")
    rows = []
    is_mes = bool(np.max(np.abs(np.asarray(lambdas) - 1.0)) <= 1e-12)
    if is_mes:
        t0 = time.perf_counter()
        phis, weights = teleportation_certificate(spectrum.d)
        res = orthogonality_residual(rep, spectrum, phis, weights)
        rows.append(_row(label, "oneway", "explicit-certificate", res, "n/a",
                         "<1e-09", res < 1e-9, t0))
    t0 = time.perf_counter()
    result = feasibility_search(rep, spectrum, outcomes, restarts, seed)
    if is_mes:
        ok = result.best_residual < 1e-6
        expected = "<1e-06"
    else:
        ok = result.best_residual > 1e-2
        expected = ">0.01 (evidence)"
    rows.append(_row(label, "oneway", f"search-K{outcomes}-R{restarts}",
                     result.best_residual, "n/a", expected, ok, t0))
    return rows


def run_bounds(params: dict) -> list[Row]:
    family = str(params.get("bounds_family") or params.get("family_name") or
                 params.get("target") or "ghz")
    rows = []
    if family == "ghz":
        n = int(params.get("n") or 3)
        label = params.get("scenario") or f"bounds-ghz-{n}"
        t0 = time.perf_counter()
        ens = ghz_basis(n, (1,) * n)
        problem, tree = computational_protocol(ens)
        achieved = run_protocol(problem, tree).fidelity
        per_cut = {
            cut: schmidt_coeff_sep_bound(ens, cut) for cut in ens.layout.bipartitions()
        }
        bound = bipartition_min_bound(per_cut)
        rows.append(_row(label, "bounds", "computational-vs-sep-bound", achieved,
                         fmt(bound), fmt(bound), abs(achieved - bound) <= ATOL, t0))
    elif family == "lattice":
        n = int(params.get("n") or 2)
        label = params.get("scenario") or f"bounds-lattice-{n}"
        t0 = time.perf_counter()
        ens = lattice_basis(n)
        problem, tree = computational_protocol(ens)
        achieved = run_protocol(problem, tree).fidelity
        bound = mes_bound(2 ** (2 * n), 2 ** n)
        rows.append(_row(label, "bounds", "computational-vs-mes-bound", achieved,
                         fmt(bound), fmt(bound), abs(achieved - bound) <= ATOL, t0))
    elif family == "parametric":
        alpha = float(params.get("alpha") or 0.9)
        gamma = float(params.get("gamma") or 0.8)
        label = params.get("scenario") or "bounds-parametric"
        t0 = time.perf_counter()
        ens = parametric_basis(alpha, gamma)
        _, achieved = optimal_guess(ens, computational_povm(ens.dims))
        expected = (alpha ** 2 + gamma ** 2) / 2
        rows.append(_row(label, "bounds", "computational-opt-guess", achieved,
                         "n/a", fmt(expected), abs(achieved - expected) <= ATOL, t0))
    else:
        raise ScenarioError(f"bounds: unknown field value family='{family}'")
    return rows


# -- the full verification battery -------------------------------------------

def run_paper_suite(params: dict) -> list[Row]:
    seed = int(params.get("seed") or 0)
    fast = bool(params.get("fast"))
    restarts = int(params.get("restarts") or 50)
    rows: list[Row] = []

    max_n = 4 if fast else 5
    for n in range(2, max_n + 1):
        t0 = time.perf_counter()
        problem, tree = sequential_bell_protocol(n)
        res = run_protocol(problem, tree)
        sched_ok = all(
            res.survivors_after_measurement_round(j) == (2 ** (n - j + 1),)
            for j in range(2, n)
        ) and res.survivors_after_measurement_round(n) == (1,)
        rows.append(_row(f"seq-bell-n{n}", "ghz", "sequential-bell", res.fidelity,
                         "n/a (perfect)", fmt(1.0),
                         abs(res.fidelity - 1.0) <= ATOL and sched_ok, t0))

    cases = [(3, (2, 1)), (4, (2, 2)), (4, (3, 1))] + ([] if fast else [(5, (2, 2, 1))])
    for n, sizes in cases:
        rows += run_ghz({"n": n, "sizes": sizes,
                         "scenario": f"partitioned-n{n}-{'.'.join(map(str, sizes))}"})

    for name in ("path3", "triangle", "star4", "cycle4"):
        rows += run_graph({"graph": name, "scenario": f"graph-{name}"})

    for m in (1, 2):
        rows += run_lattice({"n": 2, "m": m})
    t0 = time.perf_counter()
    ens = lattice_basis(2)
    problem, tree = computational_protocol(ens)
    achieved = run_protocol(problem, tree).fidelity
    bound = mes_bound(16, 4)
    rows.append(_row("lattice-resource-free", "lattice", "computational", achieved,
                     fmt(bound), fmt(bound), abs(achieved - bound) <= ATOL, t0))

    rows += run_bounds({"bounds_family": "ghz", "n": 3, "scenario": "ghz-bound-chain"})
    rows += run_example4({})

    t0 = time.perf_counter()
    grid = np.linspace(1 / math.sqrt(2), 1.0, 5)
    worst = 0.0
    tel_ok = True
    for a in grid:
        for g in grid:
            ens = parametric_basis(a, g)
            _, f_local = optimal_guess(ens, computational_povm(ens.dims))
            worst = max(worst, abs(f_local - (a * a + g * g) / 2))
            problem, tree = teleportation_protocol(ens, "A", "B")
            tel_ok &= abs(run_protocol(problem, tree).fidelity - 1.0) <= ATOL
    rows.append(_row("parametric-grid-5x5", "parametric", "formula+teleport", worst,
                     "n/a", "err<1e-09", worst <= ATOL and tel_ok, t0))

    t0 = time.perf_counter()
    resource = StateVector((2, 2), [math.sqrt(0.8), 0, 0, math.sqrt(0.2)])
    _, fb_tree = computational_protocol(bell_basis())
    f = vidal_then_fallback(bell_basis(), resource, 2, fb_tree)
    rows.append(_row("conversion-mix", "vidal", "convert-then-fallback", f, "n/a",
                     fmt(0.7), abs(f - 0.7) <= ATOL, t0))

    t0 = time.perf_counter()
    ok = True
    for n, sizes in ((3, (1, 1, 1)), (4, (2, 2)), (4, (1, 1, 1, 1))):
        m = len(sizes)
        report = entropy_bound_check(
            ghz_state(m), single_qubit_layout(m), ghz_basis(n, sizes),
        )
        ok &= report.passed and all(
            abs(r.mean_member_entropy - 1.0) <= ATOL
            and abs(r.resource_entropy - 1.0) <= ATOL
            for r in report.rows
        )
    product = StateVector((2, 2, 2), np.eye(8)[0])
    bad = entropy_bound_check(product, single_qubit_layout(3), ghz_basis(3, (1, 1, 1)))
    ok &= not bad.passed
    rows.append(_row("entropy-bounds", "entropy", "resource-vs-mean", None, "n/a",
                     "pass", ok, t0))

    rows += run_oneway({"lambdas": (1.0, 1.0), "outcomes": 4,
                        "restarts": max(10, restarts // 5), "seed": seed,
                        "scenario": "oneway-mes"})
    for outcomes in (4, 8):
        rows += run_oneway({"lambdas": (1.6, 0.4), "outcomes": outcomes,
                            "restarts": restarts, "seed": seed,
                            "scenario": f"oneway-skew-K{outcomes}"})

    t0 = time.perf_counter()
    ok = True
    for entry in standard_zoo():
        res = run_protocol(entry.problem, entry.tree)
        povm, guess = flatten_to_povm(entry.tree, entry.problem)
        ok &= abs(average_fidelity(entry.problem.joint, povm, guess) - res.fidelity) <= ATOL
        if entry.mes is not None:
            k, d = entry.mes
            ok &= res.fidelity <= mes_bound(k, d) + ATOL
        joint = entry.problem.joint
        grouping = {name: "ALL" for name in joint.layout.names}
        merged = Ensemble(coarsen(joint.layout, grouping), joint.members)
        coarse_problem = JointProblem(merged)
        coarse_tree = relabel_parties(entry.tree, grouping)
        ok &= abs(run_protocol(coarse_problem, coarse_tree).fidelity - res.fidelity) <= ATOL
    rows.append(_row("cross-checks", "zoo", "flatten+mes+coarsen", None, "n/a",
                     "pass", ok, t0))
    return rows


FAMILIES = {
    "ghz": run_ghz,
    "graph": run_graph,
    "lattice": run_lattice,
    "parametric": run_parametric,
    "example4": run_example4,
    "oneway": run_oneway,
    "bounds": run_bounds,
    "paper-suite": run_paper_suite,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locce",
        description="Local state discrimination with entanglement resources: "
                    "exact protocol fidelities and bound checks.",
    )
    sub = parser.add_subparsers(dest="family", required=True)

    def common(p):
        p.add_argument("--scenario", help="JSON scenario file; flags override its fields")
        p.add_argument("--label", dest="scenario_name", help="row label override")
        p.add_argument("--format", choices=("table", "csv", "json"), default=None)
        p.add_argument("--seed", type=int, default=None,
                       help="default from LOCCE_SEED, else 0")
        p.add_argument("--timing", choices=("on", "off"), default=None,
                       help="'off' zeroes the ms column for byte-stable output")

    p = sub.add_parser("ghz", help="GHZ basis discrimination with a GHZ resource")
    p.add_argument("--n", type=int, default=None, help="total qubit count")
    p.add_argument("--sizes", default=None, help="comma party sizes, e.g. 2,2")
    common(p)

    p = sub.add_parser("graph", help="graph-state basis with conjugate resource")
    p.add_argument("--graph", default=None, help=f"named graph: {sorted(NAMED_GRAPHS)}")
    p.add_argument("--edges", default=None, help="edge list, e.g. 0-1,1-2")
    p.add_argument("--vertices", type=int, default=None)
    common(p)

    p = sub.add_parser("lattice", help="Bell-product basis, partial teleportation")
    p.add_argument("--n", type=int, default=None, help="number of Bell pairs")
    p.add_argument("--m", type=int, default=None, help="pairs teleported")
    common(p)

    p = sub.add_parser("parametric", help="two-qubit parametric basis")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    common(p)

    p = sub.add_parser("example4", help="four GHZ states, Bell resource on B,C")
    common(p)

    p = sub.add_parser("oneway", help="one-way feasibility probe")
    p.add_argument("--lambdas", default=None, help="resource spectrum, e.g. 1.6,0.4")
    p.add_argument("--outcomes", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    common(p)

    p = sub.add_parser("bounds", help="bound chains per family")
    p.add_argument("--family", dest="bounds_family", default=None,
                   choices=("ghz", "lattice", "parametric"))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    common(p)

    p = sub.add_parser("paper-suite", help="run the full verification battery")
    p.add_argument("--fast", action="store_true", default=None,
                   help="cap the sequential chain at 4 qubits")
    p.add_argument("--restarts", type=int, default=None)
    common(p)

    return parser


def load_scenario(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"scenario: cannot read file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("scenario: top level must be a JSON object")
    return data


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    params: dict = {}
    if args.scenario:
        try:
            params.update(load_scenario(args.scenario))
        except ScenarioError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    file_family = params.get("family")
    if file_family and file_family != args.family:
        print(f"error: scenario: field 'family' is {file_family!r} but the "
              f"subcommand is {args.family!r}", file=sys.stderr)
        return 2
    for key, value in vars(args).items():
        if key in ("scenario", "family") or value is None:
            continue
        if key == "scenario_name":
            params["scenario"] = value
        else:
            params[key] = value
    if params.get("seed") is None:
        params["seed"] = int(os.environ.get("LOCCE_SEED", "0"))
    out_format = params.get("format") or "table"
    if out_format not in ("table", "csv", "json"):
        print(f"error: scenario: bad value for field 'format': {out_format!r}",
              file=sys.stderr)
        return 2
    timing = (params.get("timing") or "on") != "off"
    try:
        rows = FAMILIES[args.family](params)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {args.family}: {exc}", file=sys.stderr)
        return 2
    print(emit(rows, out_format, timing))
    return 0 if all(r.status == "pass" for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
