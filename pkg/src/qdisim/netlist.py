"""Typed gate-graph circuits with a line-oriented text format.

A netlist is a set of gates over named nets plus declared primary inputs
and outputs and a map of named dual-rail ports onto (rail1, rail0) net
pairs.  Muller C-elements (C2/C3) are primitive stateful gates, not
feedback macros, so every well-formed netlist here is acyclic.

Text format, one statement per line, `#` starts a comment:

    input <net>
    output <net>
    gate <id> <KIND> <in...> <out>
    pair <portname> <rail1-net> <rail0-net>

Serialization emits inputs, outputs, gates (id-lexicographic), pairs.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class GateKind(enum.Enum):
    INV = "INV"
    AND2 = "AND2"
    OR2 = "OR2"
    AO21 = "AO21"
    AO22 = "AO22"
    AO222 = "AO222"
    C2 = "C2"
    C3 = "C3"


GATE_ARITY = {
    GateKind.INV: 1,
    GateKind.AND2: 2,
    GateKind.OR2: 2,
    GateKind.C2: 2,
    GateKind.AO21: 3,
    GateKind.C3: 3,
    GateKind.AO22: 4,
    GateKind.AO222: 6,
}

# and-or cells and C-elements; INV/AND2/OR2 count as simple gates
COMPLEX_KINDS = frozenset(
    {GateKind.AO21, GateKind.AO22, GateKind.AO222, GateKind.C2, GateKind.C3}
)
STATEFUL_KINDS = frozenset({GateKind.C2, GateKind.C3})


@dataclass(frozen=True)
class Gate:
    gid: str
    kind: GateKind
    inputs: tuple[str, ...]
    output: str


@dataclass
class Netlist:
    gates: tuple[Gate, ...] = ()
    primary_inputs: tuple[str, ...] = ()
    primary_outputs: tuple[str, ...] = ()
    port_map: dict[str, tuple[str, str]] = field(default_factory=dict)

    def nets(self) -> set[str]:
        s = set(self.primary_inputs) | set(self.primary_outputs)
        for g in self.gates:
            s.update(g.inputs)
            s.add(g.output)
        return s

    def drivers(self) -> dict[str, list]:
        """Map net -> list of driving gates (primary inputs excluded)."""
        d: dict[str, list] = {}
        for g in self.gates:
            d.setdefault(g.output, []).append(g)
        return d


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(f"{v.rule}: {v.subject} {v.detail}".rstrip() for v in self.violations)


def validate(n: Netlist) -> ValidationReport:
    """Structural checks: single driver, arity, dangling nets, port map,
    acyclicity of the combinational (non C-element) subgraph."""
    report = ValidationReport()
    seen_ids: set[str] = set()
    for g in n.gates:
        if g.gid in seen_ids:
            report.violations.append(Violation("duplicate-gate-id", g.gid))
        seen_ids.add(g.gid)
        want = GATE_ARITY[g.kind]
        if len(g.inputs) != want:
            report.violations.append(
                Violation("arity", g.gid, f"{g.kind.value} needs {want} inputs, has {len(g.inputs)}")
            )

    drivers = n.drivers()
    pi = set(n.primary_inputs)
    for net, gs in drivers.items():
        if len(gs) > 1:
            report.violations.append(Violation("single-driver", net, f"driven by {len(gs)} gates"))
        if net in pi:
            report.violations.append(Violation("single-driver", net, "gate drives a primary input"))

    used = set(n.primary_outputs)
    for g in n.gates:
        used.update(g.inputs)
    for net in sorted(used):
        if net not in pi and net not in drivers:
            report.violations.append(Violation("dangling-net", net, "no driver"))

    all_nets = n.nets()
    for port, rails in n.port_map.items():
        if len(rails) != 2 or rails[0] == rails[1]:
            report.violations.append(Violation("port-map", port, "needs two distinct nets"))
            continue
        for net in rails:
            if net not in all_nets:
                report.violations.append(Violation("port-map", port, f"unknown net {net}"))

    # cycle check over stateless gates only; C-elements may legally sit on
    # feedback paths (none of the generated circuits have any cycles)
    edges: dict[str, list[str]] = {}
    for g in n.gates:
        if g.kind in STATEFUL_KINDS:
            continue
        for src in g.inputs:
            edges.setdefault(src, []).append(g.output)
    color: dict[str, int] = {}

    def walk(net: str) -> bool:
        color[net] = 1
        for nxt in edges.get(net, ()):
            c = color.get(nxt, 0)
            if c == 1:
                return True
            if c == 0 and walk(nxt):
                return True
        color[net] = 2
        return False

    for net in sorted(edges):
        if color.get(net, 0) == 0 and walk(net):
            report.violations.append(Violation("combinational-cycle", net))
            break
    return report


class NetlistParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_netlist(text: str) -> Netlist:
    inputs: list[str] = []
    outputs: list[str] = []
    gates: list[Gate] = []
    pairs: dict[str, tuple[str, str]] = {}
    gate_ids: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        stmt = tokens[0]
        if stmt == "input":
            if len(tokens) != 2:
                raise NetlistParseError(line_no, "input takes one net name")
            inputs.append(tokens[1])
        elif stmt == "output":
            if len(tokens) != 2:
                raise NetlistParseError(line_no, "output takes one net name")
            outputs.append(tokens[1])
        elif stmt == "gate":
            if len(tokens) < 5:
                raise NetlistParseError(line_no, "gate needs id, kind, inputs, output")
            gid, kind_name = tokens[1], tokens[2]
            try:
                kind = GateKind(kind_name)
            except ValueError:
                raise NetlistParseError(line_no, f"unknown gate kind {kind_name!r}") from None
            if gid in gate_ids:
                raise NetlistParseError(line_no, f"duplicate gate id {gid!r}")
            gate_ids.add(gid)
            gates.append(Gate(gid, kind, tuple(tokens[3:-1]), tokens[-1]))
        elif stmt == "pair":
            if len(tokens) != 4:
                raise NetlistParseError(line_no, "pair takes portname, rail1 net, rail0 net")
            pairs[tokens[1]] = (tokens[2], tokens[3])
        else:
            raise NetlistParseError(line_no, f"unknown statement {stmt!r}")
    return Netlist(tuple(gates), tuple(inputs), tuple(outputs), pairs)


def serialize_netlist(n: Netlist) -> str:
    """Deterministic text form; refuses netlists that fail validation."""
    report = validate(n)
    if not report.ok:
        raise ValueError(f"refusing to serialize invalid netlist:\n{report}")
    lines = [f"input {net}" for net in n.primary_inputs]
    lines += [f"output {net}" for net in n.primary_outputs]
    for g in sorted(n.gates, key=lambda g: g.gid):
        lines.append(f"gate {g.gid} {g.kind.value} {' '.join(g.inputs)} {g.output}")
    for port, (r1, r0) in n.port_map.items():
        lines.append(f"pair {port} {r1} {r0}")
    return "".join(line + "\n" for line in lines)


@dataclass
class GateCensus:
    counts: dict[GateKind, int]
    total: int
    complex_total: int


def gate_census(n: Netlist) -> GateCensus:
    counts = {kind: 0 for kind in GateKind}
    for g in n.gates:
        counts[g.kind] += 1
    return GateCensus(
        counts=counts,
        total=len(n.gates),
        complex_total=sum(counts[k] for k in COMPLEX_KINDS),
    )


class NetlistBuilder:
    """Incremental construction helper used by the circuit generators.

    Gate ids double as output net names, which keeps generated files
    compact and guarantees id uniqueness via the single-driver rule.
    """

    def __init__(self):
        self._inputs: list[str] = []
        self._outputs: list[str] = []
        self._gates: list[Gate] = []
        self._pairs: dict[str, tuple[str, str]] = {}

    def add_input(self, net: str) -> str:
        self._inputs.append(net)
        return net

    def add_output(self, net: str) -> str:
        self._outputs.append(net)
        return net

    def add_gate(self, kind: GateKind, inputs, output: str) -> str:
        self._gates.append(Gate(output, kind, tuple(inputs), output))
        return output

    def add_pair(self, port: str, rail1: str, rail0: str):
        self._pairs[port] = (rail1, rail0)

    def or_tree(self, inputs, stem: str) -> str:
        """Reduce nets with a balanced tree of OR2 gates; returns the root.

        Adjacent pairing keeps the depth at ceil(log2(k)) so every input
        sits at most that many OR2 levels from the root.
        """
        level = list(inputs)
        if len(level) == 1:
            return level[0]
        round_no = 0
        while len(level) > 1:
            nxt = []
            for j in range(0, len(level) - 1, 2):
                if len(level) <= 2:
                    out = stem
                else:
                    out = f"{stem}.t{round_no}.{j // 2}"
                nxt.append(self.add_gate(GateKind.OR2, (level[j], level[j + 1]), out))
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
            round_no += 1
        return level[0]

    def build(self) -> Netlist:
        return Netlist(
            tuple(self._gates), tuple(self._inputs), tuple(self._outputs), dict(self._pairs)
        )


def expand_c2_feedback(n: Netlist) -> Netlist:
    """Demonstration-only rewrite of each C2 into an AO222 with its output
    fed back: z = x*y + x*z + y*z.  The result is behaviorally equivalent
    but contains combinational cycles, so it no longer passes validate();
    the event-driven simulator still handles it.
    """
    gates = []
    for g in n.gates:
        if g.kind is GateKind.C2:
            x, y = g.inputs
            z = g.output
            gates.append(Gate(g.gid, GateKind.AO222, (x, y, x, z, y, z), z))
        else:
            gates.append(g)
    return Netlist(tuple(gates), n.primary_inputs, n.primary_outputs, dict(n.port_map))
