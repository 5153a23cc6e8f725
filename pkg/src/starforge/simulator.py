"""Cycle-accurate replay of a control schedule on a netlist.

The simulator knows nothing about binding: it models each element as a
queue, stack or single register of the netlist's depth, drives input ports
from the schedule's write events and records what each output port sees.
Discipline breaches are collected rather than raised.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from .architecture import ArchitectureNetlist, ControlSchedule, MicroOp
from .schedule import AccessSchedule


@dataclass(frozen=True)
class SimViolation:
    cycle: int
    element: str
    description: str


@dataclass
class SimResult:
    observed: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    occupancy: dict[str, dict[int, int]] = field(default_factory=dict)
    violations: list[SimViolation] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "observed": {p: [[t, c] for t, c in seq] for p, seq in sorted(self.observed.items())},
            "occupancy": {e: [[c, k] for c, k in sorted(tr.items())] for e, tr in self.occupancy.items()},
            "violations": [[v.cycle, v.element, v.description] for v in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def occupancy_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cycle", "element", "count"])
        cycles = sorted({c for tr in self.occupancy.values() for c in tr})
        for c in cycles:
            for e, tr in self.occupancy.items():
                w.writerow([c, e, tr.get(c, 0)])
        return buf.getvalue()


class _Store:
    def __init__(self, eid: str, kind: str, depth: int):
        self.id, self.kind, self.depth = eid, kind, depth
        self.held: list[str] = []

    def accessible(self) -> str | None:
        if not self.held:
            return None
        return self.held[0] if self.kind == "FIFO" else self.held[-1]


def simulate(net: ArchitectureNetlist, control: ControlSchedule, s: AccessSchedule) -> SimResult:
    stores = {e.id: _Store(e.id, e.kind, e.depth) for e in net.elements}
    driven = {(t.write.port, t.write.cycle): t.id for t in s.tokens}
    result = SimResult(
        observed={p: [] for p in s.ports.outputs},
        occupancy={e.id: {} for e in net.elements},
    )

    def flag(cycle: int, element: str, msg: str) -> None:
        result.violations.append(SimViolation(cycle, element, msg))

    for cycle in sorted(control.cycles):
        ops = control.cycles[cycle]
        # hardware order: every read of the cycle happens before any write
        for op in [o for o in ops if o.is_read] + [o for o in ops if not o.is_read]:
            st = stores.get(op.element)
            if st is None:
                flag(cycle, op.element, f"{op.op} on unknown element")
                continue
            if op.is_read:
                _read(st, op, cycle, result, flag)
            else:
                _write(st, op, cycle, driven, flag)
        for st in stores.values():
            result.occupancy[st.id][cycle] = len(st.held)
    return result


def _read(st: _Store, op: MicroOp, cycle: int, result: SimResult, flag) -> None:
    expect_reg = st.kind == "REG"
    if (op.op == "REG_READ") != expect_reg and op.op != "PEEK":
        flag(cycle, st.id, f"{op.op} not supported by {st.kind}")
    if op.token not in st.held:
        flag(cycle, st.id, f"{op.op} of {op.token} but token not present")
        return
    top = st.accessible()
    if top != op.token:
        where = "head" if st.kind == "FIFO" else "top"
        verb = "peek" if op.op == "PEEK" else "pop"
        flag(cycle, st.id, f"non-{where} {verb} of {op.token} ({where} is {top})")
    if op.op != "PEEK":
        st.held.remove(op.token)
    result.observed.setdefault(op.port, []).append((op.token, cycle))


def _write(st: _Store, op: MicroOp, cycle: int, driven: dict, flag) -> None:
    if (op.op == "REG_WRITE") != (st.kind == "REG"):
        flag(cycle, st.id, f"{op.op} not supported by {st.kind}")
    present = driven.get((op.port, cycle))
    if present != op.token:
        flag(cycle, st.id, f"{op.op} of {op.token} but port {op.port} carries {present}")
        return
    if len(st.held) >= st.depth:
        flag(cycle, st.id, f"overflow: {op.op} of {op.token} into full {st.kind} of depth {st.depth}")
    st.held.append(op.token)


@dataclass(frozen=True)
class Mismatch:
    port: str
    index: int
    expected: tuple[str, int] | None
    observed: tuple[str, int] | None


def verify(r: SimResult, s: AccessSchedule) -> list[Mismatch | SimViolation]:
    """Empty list means ok: every port saw exactly the scheduled reads and no violation occurred.

    Otherwise returns the violations followed by the first divergence per port.
    """
    problems: list[Mismatch | SimViolation] = list(r.violations)
    expected: dict[str, list[tuple[str, int]]] = {p: [] for p in s.ports.outputs}
    for t in s.tokens:
        for rd in t.reads:
            expected.setdefault(rd.port, []).append((t.id, rd.cycle))
    ports = sorted(set(expected) | set(r.observed))
    for port in ports:
        exp = sorted(expected.get(port, []), key=lambda x: (x[1], x[0]))
        obs = r.observed.get(port, [])
        for i in range(max(len(exp), len(obs))):
            e = exp[i] if i < len(exp) else None
            o = obs[i] if i < len(obs) else None
            if e != o:
                problems.append(Mismatch(port, i, e, o))
                break
    return problems


def occupancy_max(r: SimResult, element: str) -> int:
    """Peak occupancy of one element.

    Raises:
        KeyError: unknown element.
    """
    trace = r.occupancy[element]
    return max(trace.values(), default=0)
