"""Generators for the dual-rail full-adder variants and ripple-carry chains.

Each variant is one gate-level template over the dual-rail operand pairs
a, b, cin and result pairs sum, cout.  Naming convention inside a stage
(x1/x0 denote the two rails of pair x):

    kg = C2(a0, b0)   carry-kill detector        (a = b = 0)
    g  = C2(a1, b1)   carry-generate detector    (a = b = 1)
    p0 = C2(a0, b1), p1 = C2(a1, b0)  the two propagate cases
    e  = OR2(kg, g)   operands equal
    d  = OR2(p0, p1)  operands differ

Ripple chains flatten the stages into one netlist, prefixing stage i's
nets with `fa<i>.` and feeding its cout rails to stage i+1's cin rails.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .cells import DelayTable, default_delay_table
from .dualrail import RailState, decode_pair, decode_word
from .netlist import GateKind, Netlist, NetlistBuilder
from .sim import Phase, Simulation, check_phase


class AdderVariant(enum.Enum):
    DIMS_STRONG = "dims-strong"
    DIMS_WEAK = "dims-weak"
    DISTRIBUTIVE = "distributive"
    BIASED_AO222 = "biased-ao222"
    LATENCY_OPT_BIASED = "latency-opt-biased"
    EARLY_OUTPUT = "early-output"

    @property
    def cli_name(self) -> str:
        return self.value


@dataclass(frozen=True)
class StagePorts:
    """Net names of one ripple stage's external connections."""

    a: tuple[str, str]
    b: tuple[str, str]
    cin: tuple[str, str]
    sum: tuple[str, str]
    cout: tuple[str, str]


@dataclass
class RcaDescriptor:
    variant: AdderVariant
    n: int
    netlist: Netlist
    stages: tuple[StagePorts, ...]
    input_ports: tuple[str, ...]   # a0..a(n-1), b0..b(n-1), cin
    sum_ports: tuple[str, ...]
    cout_port: str


def _emit_minterms(nb: NetlistBuilder, p: str, rails: dict[str, str]) -> dict[str, str]:
    """One C3 per input-combination product term, shared across outputs.

    Key 'xyz' means the product of rails a<x>, b<y>, cin<z>.
    """
    out = {}
    for xa in "01":
        for xb in "01":
            for xc in "01":
                net = nb.add_gate(
                    GateKind.C3,
                    (rails[f"a{xa}"], rails[f"b{xb}"], rails[f"c{xc}"]),
                    f"{p}m{xa}{xb}{xc}",
                )
                out[xa + xb + xc] = net
    return out


_SUM1_MINTERMS = ("001", "010", "100", "111")
_SUM0_MINTERMS = ("000", "011", "101", "110")


def _emit_pair_detectors(nb: NetlistBuilder, p: str, r: dict[str, str]) -> dict[str, str]:
    kg = nb.add_gate(GateKind.C2, (r["a0"], r["b0"]), f"{p}kg")
    g = nb.add_gate(GateKind.C2, (r["a1"], r["b1"]), f"{p}g")
    p0 = nb.add_gate(GateKind.C2, (r["a0"], r["b1"]), f"{p}p0")
    p1 = nb.add_gate(GateKind.C2, (r["a1"], r["b0"]), f"{p}p1")
    e = nb.add_gate(GateKind.OR2, (kg, g), f"{p}e")
    d = nb.add_gate(GateKind.OR2, (p0, p1), f"{p}d")
    return {"kg": kg, "g": g, "e": e, "d": d}


def _emit_joined_sum(nb: NetlistBuilder, p: str, r: dict[str, str], det: dict[str, str]) -> dict[str, str]:
    """sum1 = e*cin1 + d*cin0, sum0 = e*cin0 + d*cin1, each product a C2."""
    s1a = nb.add_gate(GateKind.C2, (det["e"], r["c1"]), f"{p}s1a")
    s1b = nb.add_gate(GateKind.C2, (det["d"], r["c0"]), f"{p}s1b")
    s0a = nb.add_gate(GateKind.C2, (det["e"], r["c0"]), f"{p}s0a")
    s0b = nb.add_gate(GateKind.C2, (det["d"], r["c1"]), f"{p}s0b")
    nb.add_gate(GateKind.OR2, (s1a, s1b), r["s1"])
    nb.add_gate(GateKind.OR2, (s0a, s0b), r["s0"])
    return {"s1b": s1b, "s0b": s0b}


def _emit_stage(nb: NetlistBuilder, variant: AdderVariant, p: str, r: dict[str, str]):
    """Emit one full-adder stage.  `r` maps the rail roles a1,a0,b1,b0,c1,c0
    (inputs) and s1,s0,k1,k0 (sum/cout outputs) to net names; `p` prefixes
    every internal net."""
    if variant is AdderVariant.DIMS_STRONG:
        m = _emit_minterms(nb, p, r)
        nb.or_tree([m[k] for k in _SUM1_MINTERMS], r["s1"])
        nb.or_tree([m[k] for k in _SUM0_MINTERMS], r["s0"])
        nb.or_tree([m["011"], m["101"], m["110"], m["111"]], r["k1"])
        nb.or_tree([m["000"], m["001"], m["010"], m["100"]], r["k0"])
    elif variant is AdderVariant.DIMS_WEAK:
        m = _emit_minterms(nb, p, r)
        nb.or_tree([m[k] for k in _SUM1_MINTERMS], r["s1"])
        nb.or_tree([m[k] for k in _SUM0_MINTERMS], r["s0"])
        g = nb.add_gate(GateKind.C2, (r["a1"], r["b1"]), f"{p}g")
        kg = nb.add_gate(GateKind.C2, (r["a0"], r["b0"]), f"{p}kg")
        nb.or_tree([m["011"], m["101"], g], r["k1"])
        nb.or_tree([m["010"], m["100"], kg], r["k0"])
    elif variant is AdderVariant.DISTRIBUTIVE:
        det = _emit_pair_detectors(nb, p, r)
        joins = _emit_joined_sum(nb, p, r, det)
        # carry reuses the sum's C2 joins: cout1 = d*cin1 + g, cout0 = d*cin0 + kg
        nb.add_gate(GateKind.OR2, (joins["s0b"], det["g"]), r["k1"])
        nb.add_gate(GateKind.OR2, (joins["s1b"], det["kg"]), r["k0"])
    elif variant is AdderVariant.BIASED_AO222:
        det = _emit_pair_detectors(nb, p, r)
        _emit_joined_sum(nb, p, r, det)
        # majority carry in one input-incomplete cell: a*b + b*cin + a*cin
        nb.add_gate(GateKind.AO222, (r["a1"], r["b1"], r["b1"], r["c1"], r["a1"], r["c1"]), r["k1"])
        nb.add_gate(GateKind.AO222, (r["a0"], r["b0"], r["b0"], r["c0"], r["a0"], r["c0"]), r["k0"])
    elif variant is AdderVariant.LATENCY_OPT_BIASED:
        det = _emit_pair_detectors(nb, p, r)
        _emit_joined_sum(nb, p, r, det)
        # single and-or cell per carry rail: cout1 = d*cin1 + g, cout0 = d*cin0 + kg
        nb.add_gate(GateKind.AO21, (det["d"], r["c1"], det["g"]), r["k1"])
        nb.add_gate(GateKind.AO21, (det["d"], r["c0"], det["kg"]), r["k0"])
    elif variant is AdderVariant.EARLY_OUTPUT:
        cg1 = nb.add_gate(GateKind.AO22, (r["a0"], r["b0"], r["a1"], r["b1"]), f"{p}cg1")
        cg2 = nb.add_gate(GateKind.AO22, (r["a0"], r["b1"], r["a1"], r["b0"]), f"{p}cg2")
        c1 = nb.add_gate(GateKind.C2, (cg1, r["c1"]), f"{p}c1")
        c2 = nb.add_gate(GateKind.C2, (cg1, r["c0"]), f"{p}c2")
        c3 = nb.add_gate(GateKind.C2, (cg2, r["c1"]), f"{p}c3")
        c4 = nb.add_gate(GateKind.C2, (cg2, r["c0"]), f"{p}c4")
        nb.add_gate(GateKind.OR2, (c1, c4), r["s1"])
        nb.add_gate(GateKind.OR2, (c2, c3), r["s0"])
        nb.add_gate(GateKind.AO22, (cg2, r["c1"], r["a1"], r["b1"]), r["k1"])
        nb.add_gate(GateKind.AO22, (cg2, r["c0"], r["a0"], r["b0"]), r["k0"])
    else:
        raise ValueError(f"unknown variant {variant}")


def emit_rca(
    nb: NetlistBuilder,
    variant: AdderVariant,
    n: int,
    a_rails: list[tuple[str, str]],
    b_rails: list[tuple[str, str]],
    cin_rails: tuple[str, str],
    prefix: str = "",
) -> tuple[tuple[StagePorts, ...], list[tuple[str, str]], tuple[str, str]]:
    """Emit an n-stage ripple chain reading the given operand rail nets.

    Returns (stage ports, sum rail pairs, overflow cout rail pair).  Used
    both for standalone chains and embedded inside a pipeline stage.
    """
    stages = []
    sums = []
    carry = cin_rails
    for i in range(n):
        sp = f"{prefix}fa{i}."
        s1, s0 = f"{sp}s1", f"{sp}s0"
        k1, k0 = f"{sp}k1", f"{sp}k0"
        rails = {
            "a1": a_rails[i][0], "a0": a_rails[i][1],
            "b1": b_rails[i][0], "b0": b_rails[i][1],
            "c1": carry[0], "c0": carry[1],
            "s1": s1, "s0": s0, "k1": k1, "k0": k0,
        }
        _emit_stage(nb, variant, sp, rails)
        stages.append(
            StagePorts(a=a_rails[i], b=b_rails[i], cin=carry, sum=(s1, s0), cout=(k1, k0))
        )
        sums.append((s1, s0))
        carry = (k1, k0)
    return tuple(stages), sums, carry


def build_rca(variant: AdderVariant, n: int) -> RcaDescriptor:
    """Flattened n-bit ripple-carry adder with external dual-rail ports
    a0..a(n-1), b0..b(n-1), cin, sum0..sum(n-1), cout."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    nb = NetlistBuilder()
    a_rails, b_rails = [], []
    for name, store in (("a", a_rails), ("b", b_rails)):
        for i in range(n):
            r1 = nb.add_input(f"{name}{i}.r1")
            r0 = nb.add_input(f"{name}{i}.r0")
            store.append((r1, r0))
    cin = (nb.add_input("cin.r1"), nb.add_input("cin.r0"))
    stages, sums, cout = emit_rca(nb, variant, n, a_rails, b_rails, cin)
    for s1, s0 in sums:
        nb.add_output(s1)
        nb.add_output(s0)
    nb.add_output(cout[0])
    nb.add_output(cout[1])
    input_ports = []
    for name, store in (("a", a_rails), ("b", b_rails)):
        for i, (r1, r0) in enumerate(store):
            nb.add_pair(f"{name}{i}", r1, r0)
            input_ports.append(f"{name}{i}")
    nb.add_pair("cin", cin[0], cin[1])
    input_ports.append("cin")
    sum_ports = []
    for i, (s1, s0) in enumerate(sums):
        nb.add_pair(f"sum{i}", s1, s0)
        sum_ports.append(f"sum{i}")
    nb.add_pair("cout", cout[0], cout[1])
    return RcaDescriptor(
        variant=variant,
        n=n,
        netlist=nb.build(),
        stages=stages,
        input_ports=tuple(input_ports),
        sum_ports=tuple(sum_ports),
        cout_port="cout",
    )


def build_full_adder(variant: AdderVariant) -> Netlist:
    """Single full adder with ports a, b, cin, sum, cout."""
    nb = NetlistBuilder()
    rails = {}
    for port in ("a", "b", "cin"):
        r1 = nb.add_input(f"{port}.r1")
        r0 = nb.add_input(f"{port}.r0")
        rails[port] = (r1, r0)
    r = {
        "a1": rails["a"][0], "a0": rails["a"][1],
        "b1": rails["b"][0], "b0": rails["b"][1],
        "c1": rails["cin"][0], "c0": rails["cin"][1],
        "s1": "sum.r1", "s0": "sum.r0", "k1": "cout.r1", "k0": "cout.r0",
    }
    _emit_stage(nb, variant, "", r)
    for net in ("sum.r1", "sum.r0", "cout.r1", "cout.r0"):
        nb.add_output(net)
    for port in ("a", "b", "cin"):
        nb.add_pair(port, *rails[port])
    nb.add_pair("sum", "sum.r1", "sum.r0")
    nb.add_pair("cout", "cout.r1", "cout.r0")
    return nb.build()


# -- functional verification ------------------------------------------


@dataclass
class FunctionalCheckResult:
    passed: bool
    trials: int
    counterexample: tuple[int, int, int] | None = None
    detail: str = ""


def _rail_assignments(rca: RcaDescriptor, a: int, b: int, cin: int) -> list[tuple[str, int]]:
    out = []
    for i, st in enumerate(rca.stages):
        abit = (a >> i) & 1
        bbit = (b >> i) & 1
        out.append((st.a[0], abit))
        out.append((st.a[1], 1 - abit))
        out.append((st.b[0], bbit))
        out.append((st.b[1], 1 - bbit))
    cin_rails = rca.stages[0].cin
    out.append((cin_rails[0], cin))
    out.append((cin_rails[1], 1 - cin))
    return out


def rca_transaction(sim: Simulation, rca: RcaDescriptor, a: int, b: int, cin: int):
    """Drive one valid wave then one spacer wave through a bare ripple
    chain; returns (decoded result or DecodeIssue, set report, rtz report).
    The result covers n+1 bits: sum plus overflow carry."""
    pairs = rca.netlist.port_map
    set_assign = _rail_assignments(rca, a, b, cin)
    sim.apply_inputs(set_assign)
    set_trace, _ = sim.run_until_quiescent()
    set_report = check_phase(set_trace, Phase.SET, pairs=pairs)
    word = sim.read_word(list(rca.sum_ports) + [rca.cout_port])
    decoded = decode_word(word)
    initial = {}
    for r1, r0 in pairs.values():
        initial[r1] = sim.net_value(r1)
        initial[r0] = sim.net_value(r0)
    sim.apply_inputs([(net, 0) for net, _ in set_assign])
    rtz_trace, _ = sim.run_until_quiescent()
    rtz_report = check_phase(rtz_trace, Phase.RTZ, pairs=pairs, initial_rails=initial)
    spacer = all(
        decode_pair(sim.pair_value(p)) is RailState.SPACER
        for p in list(rca.sum_ports) + [rca.cout_port]
    )
    return decoded, set_report, rtz_report, spacer


def functional_check(
    rca: RcaDescriptor,
    trials: int,
    seed: int = 1,
    delay_table: DelayTable | None = None,
    exhaustive: bool = False,
) -> FunctionalCheckResult:
    """Compare full valid/spacer transactions against integer addition.

    Random operands come from a seeded generator so runs are reproducible;
    exhaustive mode sweeps the whole operand space instead.
    """
    if not exhaustive and trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    table = delay_table or default_delay_table()
    sim = Simulation(rca.netlist, table)
    n = rca.n
    if exhaustive:
        cases = (
            (a, b, c)
            for a in range(1 << n)
            for b in range(1 << n)
            for c in (0, 1)
        )
        total = (1 << n) * (1 << n) * 2
    else:
        rng = random.Random(seed)
        cases = ((rng.getrandbits(n), rng.getrandbits(n), rng.getrandbits(1)) for _ in range(trials))
        total = trials
    ran = 0
    for a, b, c in cases:
        decoded, set_report, rtz_report, spacer = rca_transaction(sim, rca, a, b, c)
        ran += 1
        expected = a + b + c
        if decoded != expected:
            return FunctionalCheckResult(False, ran, (a, b, c), f"decoded {decoded!r}, expected {expected}")
        if not set_report.ok or not rtz_report.ok:
            return FunctionalCheckResult(False, ran, (a, b, c), "phase-check violation")
        if not spacer:
            return FunctionalCheckResult(False, ran, (a, b, c), "outputs did not return to spacer")
    return FunctionalCheckResult(True, total)
