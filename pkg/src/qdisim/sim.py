"""Deterministic discrete-event simulation with transport delays.

Every net starts at 0, the global spacer/reset state.  A committed
transition re-evaluates the fanout gates and schedules each changed
output at `now + delay(kind)`.  Events are processed in (time, insertion
sequence) order, so repeated runs of the same stimulus produce identical
traces.  At most one event is pending per net; scheduling a different
value replaces the pending one and is counted as a diagnostic, a case
that monotone handshake stimuli never trigger.

C-element state is the effective value of its output net (pending event
if one exists, settled value otherwise), which coincides with the
all-zero power-on state required of return-to-zero circuits.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Iterable, NamedTuple

from .cells import DelayTable
from .dualrail import DualRailValue, DualRailWord
from .netlist import GateKind, Netlist

# dispatch codes ordered by frequency in the generated circuits
_C2, _OR2, _AO22, _AO21, _C3, _AND2, _INV, _AO222 = range(8)
_CODE = {
    GateKind.C2: _C2,
    GateKind.OR2: _OR2,
    GateKind.AO22: _AO22,
    GateKind.AO21: _AO21,
    GateKind.C3: _C3,
    GateKind.AND2: _AND2,
    GateKind.INV: _INV,
    GateKind.AO222: _AO222,
}


class Phase(enum.Enum):
    SET = "SET"    # valid-data wave: every transition must rise
    RTZ = "RTZ"    # spacer wave: every transition must fall


class Event(NamedTuple):
    time: int
    net: str
    value: int
    sequence: int


class OscillationError(RuntimeError):
    pass


class SimulationError(RuntimeError):
    pass


@dataclass
class PhaseCheckReport:
    nonmonotonic: list[tuple[int, str, int]] = field(default_factory=list)
    illegal_pairs: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.nonmonotonic and not self.illegal_pairs


class Simulation:
    """One confined simulation instance over a compiled netlist.

    The netlist itself is never mutated; many instances can simulate the
    same netlist concurrently.

    `jitter` adds a seeded per-gate-instance uniform delay in [0, jitter]
    on top of the table, for robustness experiments; delay-insensitive
    circuits must keep functioning under it.  All calibrated timing runs
    use jitter=0.
    """

    def __init__(
        self,
        netlist: Netlist,
        delay_table: DelayTable,
        event_cap: int = 1_000_000,
        jitter: int = 0,
        jitter_seed: int = 1,
    ):
        self.netlist = netlist
        self.event_cap = event_cap
        rng = random.Random(jitter_seed) if jitter else None
        names: list[str] = []
        ids: dict[str, int] = {}

        def intern(net: str) -> int:
            i = ids.get(net)
            if i is None:
                i = len(names)
                ids[net] = i
                names.append(net)
            return i

        for net in netlist.primary_inputs:
            intern(net)
        self._pi_ids = set(range(len(names)))
        gates = []
        for g in netlist.gates:
            delay = delay_table[g.kind]
            if rng is not None:
                delay += rng.randint(0, jitter)
            gates.append(
                (
                    _CODE[g.kind],
                    tuple(intern(x) for x in g.inputs),
                    intern(g.output),
                    delay,
                )
            )
        for net in netlist.primary_outputs:
            intern(net)
        self._names = names
        self._ids = ids
        self._gates = gates
        fanout: list[list[int]] = [[] for _ in names]
        for gi, (_, ins, _out, _d) in enumerate(gates):
            for net in set(ins):
                fanout[net].append(gi)
        self._fanout = [tuple(f) for f in fanout]
        self._values = [0] * len(names)
        self._pending: dict[int, tuple[int, int]] = {}
        self._heap: list[tuple[int, int, int, int]] = []
        self._seq = 0
        self._trace: list[tuple[int, int, int]] = []
        self.now = 0
        self.replacements = 0

    # -- state access ------------------------------------------------

    def net_value(self, net: str) -> int:
        return self._values[self._ids[net]]

    def pair_value(self, port: str) -> DualRailValue:
        r1, r0 = self.netlist.port_map[port]
        return DualRailValue(self.net_value(r1), self.net_value(r0))

    def read_word(self, ports: Iterable[str]) -> DualRailWord:
        return DualRailWord(tuple(self.pair_value(p) for p in ports))

    @property
    def trace(self) -> list[tuple[int, str, int]]:
        names = self._names
        return [(t, names[n], v) for t, n, v in self._trace]

    # -- stimulus ----------------------------------------------------

    def apply_inputs(self, assignments: Iterable[tuple[str, int]], at_time: int | None = None):
        """Schedule primary-input transitions; same-value entries are dropped."""
        t = self.now if at_time is None else at_time
        if t < self.now:
            raise SimulationError(f"cannot apply inputs at {t}, already settled at {self.now}")
        for net, value in assignments:
            nid = self._ids.get(net)
            if nid is None or nid not in self._pi_ids:
                raise SimulationError(f"{net!r} is not a primary input")
            p = self._pending.get(nid)
            effective = p[1] if p is not None else self._values[nid]
            if value == effective:
                continue
            if p is not None:
                self.replacements += 1
            self._seq += 1
            self._pending[nid] = (self._seq, value)
            heappush(self._heap, (t, self._seq, nid, value))

    def settle_power_on(self):
        """Evaluate every gate once from the all-zero state and settle.

        A no-op for the return-to-zero circuits generated here; needed
        when a netlist contains inverters whose quiescent output is 1
        (e.g. acknowledge wiring in a closed handshake loop).
        """
        values = self._values
        for code, ins, out, delay in self._gates:
            new = _eval_code(code, ins, values, values[out])
            if new != values[out] and out not in self._pending:
                self._seq += 1
                self._pending[out] = (self._seq, new)
                heappush(self._heap, (self.now + delay, self._seq, out, new))
        self.run_until_quiescent()

    # -- engine ------------------------------------------------------

    def run_until_quiescent(self) -> tuple[list[tuple[int, str, int]], int]:
        """Drain the event queue; returns (new trace entries, settle time).

        Raises OscillationError when more than event_cap transitions
        commit in a single call.
        """
        heap = self._heap
        pending = self._pending
        values = self._values
        gates = self._gates
        fanout = self._fanout
        trace = self._trace
        append = trace.append
        cap = self.event_cap
        start = len(trace)
        commits = 0
        seq = self._seq
        settle = self.now
        while heap:
            t, s, net, val = heappop(heap)
            p = pending.get(net)
            if p is None or p[0] != s:
                continue
            del pending[net]
            if values[net] == val:
                continue
            values[net] = val
            append((t, net, val))
            settle = t
            commits += 1
            if commits > cap:
                self._seq = seq
                raise OscillationError(
                    f"no quiescence after {cap} transitions (last: {self._names[net]} at {t})"
                )
            for gi in fanout[net]:
                code, ins, out, delay = gates[gi]
                pout = pending.get(out)
                eff = pout[1] if pout is not None else values[out]
                if code == _C2:
                    a = values[ins[0]]
                    new = a if a == values[ins[1]] else eff
                elif code == _OR2:
                    new = values[ins[0]] | values[ins[1]]
                elif code == _AO22:
                    new = (values[ins[0]] & values[ins[1]]) | (values[ins[2]] & values[ins[3]])
                elif code == _AO21:
                    new = (values[ins[0]] & values[ins[1]]) | values[ins[2]]
                elif code == _C3:
                    a = values[ins[0]]
                    new = a if a == values[ins[1]] == values[ins[2]] else eff
                elif code == _AND2:
                    new = values[ins[0]] & values[ins[1]]
                elif code == _INV:
                    new = 1 - values[ins[0]]
                else:
                    new = (
                        (values[ins[0]] & values[ins[1]])
                        | (values[ins[2]] & values[ins[3]])
                        | (values[ins[4]] & values[ins[5]])
                    )
                if new != eff:
                    if pout is not None:
                        self.replacements += 1
                    seq += 1
                    pending[out] = (seq, new)
                    heappush(heap, (t + delay, seq, out, new))
        self._seq = seq
        self.now = settle
        names = self._names
        segment = [(et, names[en], ev) for et, en, ev in trace[start:]]
        return segment, settle


def _eval_code(code: int, ins: tuple[int, ...], values: list[int], prev: int) -> int:
    if code == _C2:
        a = values[ins[0]]
        return a if a == values[ins[1]] else prev
    if code == _OR2:
        return values[ins[0]] | values[ins[1]]
    if code == _AO22:
        return (values[ins[0]] & values[ins[1]]) | (values[ins[2]] & values[ins[3]])
    if code == _AO21:
        return (values[ins[0]] & values[ins[1]]) | values[ins[2]]
    if code == _C3:
        a = values[ins[0]]
        return a if a == values[ins[1]] == values[ins[2]] else prev
    if code == _AND2:
        return values[ins[0]] & values[ins[1]]
    if code == _INV:
        return 1 - values[ins[0]]
    return (
        (values[ins[0]] & values[ins[1]])
        | (values[ins[2]] & values[ins[3]])
        | (values[ins[4]] & values[ins[5]])
    )


def check_phase(
    trace: list[tuple[int, str, int]],
    phase: Phase,
    pairs: dict[str, tuple[str, str]] | None = None,
    initial_rails: dict[str, int] | None = None,
    watched: set[str] | None = None,
) -> PhaseCheckReport:
    """Verify handshake discipline over one phase trace.

    SET allows only rising transitions on watched nets, RTZ only falling
    ones, and no port pair may ever show both rails high.  `initial_rails`
    gives the pair-rail values at the start of the phase (0 if omitted).
    """
    report = PhaseCheckReport()
    expect = 1 if phase is Phase.SET else 0
    rail_of: dict[str, tuple[str, str]] = {}
    rail_values: dict[str, int] = {}
    if pairs:
        for port, (r1, r0) in pairs.items():
            rail_of[r1] = (port, r0)
            rail_of[r0] = (port, r1)
            rail_values[r1] = initial_rails.get(r1, 0) if initial_rails else 0
            rail_values[r0] = initial_rails.get(r0, 0) if initial_rails else 0
    for t, net, value in trace:
        if (watched is None or net in watched) and value != expect:
            report.nonmonotonic.append((t, net, value))
        hit = rail_of.get(net)
        if hit is not None:
            rail_values[net] = value
            port, partner = hit
            if value and rail_values[partner]:
                report.illegal_pairs.append((t, port))
    return report


def write_trace_csv(trace: list[tuple[int, str, int]], fp):
    """Dump committed transitions as `time,net,value` lines in commit order."""
    for t, net, value in trace:
        fp.write(f"{t},{net},{value}\n")
