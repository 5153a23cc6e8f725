"""Netlist, per-cycle control schedule, design emitters and metrics."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

from .binder import StorageKind, StorageStructure, fill_ratio, planned_occupancy
from .optimizer import OptimizedArchitecture
from .schedule import AccessSchedule, max_live


class DisciplineError(RuntimeError):
    """A planned read targets a token that is not at the head/top of its element."""


class ConsistencyError(RuntimeError):
    """Netlist and schedule disagree (e.g. a token has no storage element)."""


@dataclass(frozen=True)
class Element:
    id: str
    kind: str
    depth: int
    width: int


@dataclass
class ArchitectureNetlist:
    elements: list[Element] = field(default_factory=list)
    # (port, cycle) -> element id
    input_routing: dict[tuple[str, int], str] = field(default_factory=dict)
    output_routing: dict[tuple[str, int], str] = field(default_factory=dict)
    placement: dict[str, str] = field(default_factory=dict)

    def element(self, eid: str) -> Element:
        for e in self.elements:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def to_dict(self) -> dict[str, Any]:
        return {
            "elements": [asdict(e) for e in self.elements],
            "input_routing": [
                {"port": p, "cycle": c, "element": e} for (p, c), e in sorted(self.input_routing.items(), key=_route_key)
            ],
            "output_routing": [
                {"port": p, "cycle": c, "element": e} for (p, c), e in sorted(self.output_routing.items(), key=_route_key)
            ],
            "placement": dict(sorted(self.placement.items())),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> ArchitectureNetlist:
        return cls(
            elements=[Element(**e) for e in doc["elements"]],
            input_routing={(r["port"], r["cycle"]): r["element"] for r in doc["input_routing"]},
            output_routing={(r["port"], r["cycle"]): r["element"] for r in doc["output_routing"]},
            placement=dict(doc["placement"]),
        )


def _route_key(item: tuple[tuple[str, int], str]) -> tuple[int, str]:
    (port, cycle), _ = item
    return (cycle, port)


READ_OPS = ("POP", "PEEK", "REG_READ")
WRITE_OPS = ("PUSH", "REG_WRITE")


@dataclass(frozen=True)
class MicroOp:
    op: str
    element: str
    token: str
    port: str

    @property
    def is_read(self) -> bool:
        return self.op in READ_OPS


@dataclass
class ControlSchedule:
    """Micro-operations per cycle; cycles without activity map to empty lists."""

    cycles: dict[int, list[MicroOp]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.cycles)

    def ops(self) -> list[tuple[int, MicroOp]]:
        return [(c, op) for c in sorted(self.cycles) for op in self.cycles[c]]

    def to_list(self) -> list[dict[str, Any]]:
        return [
            {"cycle": c, "ops": [asdict(op) for op in self.cycles[c]]} for c in sorted(self.cycles)
        ]

    @classmethod
    def from_list(cls, rows: list[dict[str, Any]]) -> ControlSchedule:
        return cls({row["cycle"]: [MicroOp(**op) for op in row["ops"]] for row in rows})


@dataclass(frozen=True)
class CostModel:
    reg_slot: float = 2.0
    fifo_slot: float = 1.0
    lifo_slot: float = 1.0
    control: float = 3.0

    def __post_init__(self) -> None:
        if min(self.reg_slot, self.fifo_slot, self.lifo_slot, self.control) < 0:
            raise ValueError("costs must be non-negative")

    def slot(self, kind: str) -> float:
        return {"FIFO": self.fifo_slot, "LIFO": self.lifo_slot, "REG": self.reg_slot}[kind]


def element_ids(structures: list[StorageStructure]) -> dict[str, str]:
    """Map structure ids to element names like fifo0, lifo0, reg3 in start order."""
    counters = {k: 0 for k in StorageKind}
    out = {}
    for st in sorted(structures, key=lambda s: (s.start, s.id)):
        out[st.id] = f"{st.kind.value.lower()}{counters[st.kind]}"
        counters[st.kind] += 1
    return out


def build_netlist(arch: OptimizedArchitecture, s: AccessSchedule) -> ArchitectureNetlist:
    """One element per structure with routing tables for every write and read.

    Raises:
        ConsistencyError: a token has no structure, or an element is shallower
            than its planned peak occupancy.
    """
    names = element_ids(arch.structures)
    tokens = s.token_map()
    net = ArchitectureNetlist()
    for st in sorted(arch.structures, key=lambda x: (x.start, x.id)):
        eid = names[st.id]
        members = [tokens[m] for m in st.members]
        peak = max(planned_occupancy(members).values(), default=0)
        if peak > st.depth:
            raise ConsistencyError(f"{eid} depth {st.depth} below planned peak occupancy {peak}")
        net.elements.append(Element(eid, st.kind.value, st.depth, max(t.width for t in members)))
        for m in st.members:
            net.placement[m] = eid
    for t in s.tokens:
        if t.id not in net.placement:
            raise ConsistencyError(f"token {t.id!r} is not bound to any storage element")
        eid = net.placement[t.id]
        net.input_routing[(t.write.port, t.write.cycle)] = eid
        for r in t.reads:
            net.output_routing[(r.port, r.cycle)] = eid
    return net


def build_control(net: ArchitectureNetlist, s: AccessSchedule) -> ControlSchedule:
    """Per-cycle micro-operations, reads before writes within each cycle.

    Every read and write is checked against a model of each element so that a
    binding that would read a buried token fails here.

    Raises:
        DisciplineError: a read targets a token not at the accessible position.
    """
    if not s.tokens:
        return ControlSchedule()
    kinds = {e.id: e.kind for e in net.elements}
    in_rank = {p: i for i, p in enumerate(s.ports.inputs)}
    out_rank = {p: i for i, p in enumerate(s.ports.outputs)}
    events: dict[int, list[tuple[int, int, MicroOp]]] = {}
    for t in s.tokens:
        eid = net.placement[t.id]
        kind = kinds[eid]
        op = "REG_WRITE" if kind == "REG" else "PUSH"
        events.setdefault(t.write.cycle, []).append((1, in_rank[t.write.port], MicroOp(op, eid, t.id, t.write.port)))
        for i, r in enumerate(t.reads):
            final = i == len(t.reads) - 1
            op = ("REG_READ" if kind == "REG" else "POP") if final else "PEEK"
            events.setdefault(r.cycle, []).append((0, out_rank[r.port], MicroOp(op, eid, t.id, r.port)))

    lo, hi = min(events), max(events)
    control = ControlSchedule({c: [] for c in range(lo, hi + 1)})
    state: dict[str, list[str]] = {e.id: [] for e in net.elements}
    for c in range(lo, hi + 1):
        for _, _, op in sorted(events.get(c, []), key=lambda x: (x[0], x[1])):
            held = state[op.element]
            if op.is_read:
                at = _accessible(held, kinds[op.element])
                if at != op.token:
                    raise DisciplineError(
                        f"cycle {c}: {op.op} of {op.token!r} on {op.element} but accessible token is {at!r}"
                    )
                if op.op != "PEEK":
                    held.remove(op.token)
            else:
                held.append(op.token)
            control.cycles[c].append(op)
    return control


def _accessible(held: list[str], kind: str) -> str | None:
    if not held:
        return None
    if kind == "FIFO":
        return held[0]
    return held[-1]


# -- emitters -----------------------------------------------------------------

def design_to_dict(net: ArchitectureNetlist, control: ControlSchedule) -> dict[str, Any]:
    return {"netlist": net.to_dict(), "control": control.to_list()}


def emit_json(net: ArchitectureNetlist, control: ControlSchedule) -> str:
    return json.dumps(design_to_dict(net, control), indent=2) + "\n"


def parse_design(text: str) -> tuple[ArchitectureNetlist, ControlSchedule]:
    doc = json.loads(text)
    return ArchitectureNetlist.from_dict(doc["netlist"]), ControlSchedule.from_list(doc["control"])


def emit_dot(net: ArchitectureNetlist, name: str = "star") -> str:
    """Port-to-element-to-port topology; edge labels count routed accesses."""
    fan_in: dict[tuple[str, str], int] = {}
    fan_out: dict[tuple[str, str], int] = {}
    for (port, _), eid in net.input_routing.items():
        fan_in[(port, eid)] = fan_in.get((port, eid), 0) + 1
    for (port, _), eid in net.output_routing.items():
        fan_out[(eid, port)] = fan_out.get((eid, port), 0) + 1
    shapes = {"FIFO": "box", "LIFO": "invhouse", "REG": "ellipse"}
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for port in sorted({p for p, _ in fan_in}):
        lines.append(f'  "{port}" [shape=cds];')
    for e in net.elements:
        lines.append(f'  "{e.id}" [shape={shapes[e.kind]},label="{e.id}\\n{e.kind} x{e.depth}"];')
    for port in sorted({p for _, p in fan_out}):
        lines.append(f'  "{port}" [shape=cds];')
    for (src, dst), k in sorted(fan_in.items()):
        lines.append(f'  "{src}" -> "{dst}" [label="{k}"];')
    for (src, dst), k in sorted(fan_out.items()):
        lines.append(f'  "{src}" -> "{dst}" [label="{k}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_rtl_text(net: ArchitectureNetlist, control: ControlSchedule, name: str = "star") -> str:
    """VHDL-flavoured structural listing; informative only, not synthesizable as-is."""
    out = [f"-- {name}: {len(net.elements)} storage elements, {len(control)} control cycles"]
    for e in net.elements:
        out += [
            f"entity {e.id} is",
            f"  generic (KIND : string := \"{e.kind}\"; DEPTH : natural := {e.depth}; WIDTH : natural := {e.width});",
            "  port (clk, push, pop : in std_logic;",
            "        din  : in  std_logic_vector(WIDTH-1 downto 0);",
            "        dout : out std_logic_vector(WIDTH-1 downto 0));",
            f"end entity {e.id};",
            "",
        ]
    out += [
        f"architecture fsm of {name} is",
        "begin",
        "  process(clk) begin",
        "    if rising_edge(clk) then",
        "      case cycle is",
    ]
    for c in sorted(control.cycles):
        ops = control.cycles[c]
        if not ops:
            continue
        out.append(f"        when {c} =>")
        for op in ops:
            side = "->" if op.is_read else "<-"
            out.append(f"          -- {op.op} {op.element} {op.token} {side} {op.port}")
            sig = "pop" if op.is_read and op.op != "PEEK" else ("peek" if op.op == "PEEK" else "push")
            out.append(f"          {op.element}.{sig} <= '1';")
    out += ["        when others => null;", "      end case;", "    end if;", "  end process;", "end architecture fsm;"]
    return "\n".join(out) + "\n"


# -- metrics --------------------------------------------------------------------

def report(
    arch: OptimizedArchitecture, s: AccessSchedule, cost: CostModel | None = None
) -> dict[str, Any]:
    """Slot, control and cost metrics with per-structure fill statistics.

    ``saved`` counts slots saved against one register per token and ``ctrl``
    the number of independently controlled structures.
    """
    cost = cost or CostModel()
    tokens = s.token_map()
    names = element_ids(arch.structures)
    slots = sum(st.depth for st in arch.structures)
    ctrl = len(arch.structures)
    total_cost = sum(cost.slot(st.kind.value) * st.depth for st in arch.structures) + ctrl * cost.control
    per = []
    for st in sorted(arch.structures, key=lambda x: (x.start, x.id)):
        members = [tokens[m] for m in st.members]
        occ = planned_occupancy(members)
        writers = sorted({t.write.port for t in members})
        per.append({
            "element": names[st.id],
            "kind": st.kind.value,
            "depth": st.depth,
            "members": len(members),
            "peak": max(occ.values(), default=0),
            "fill": round(fill_ratio(members, st.depth), 6),
            "input_ports": writers,
            "segments": [[seg.start, seg.end] for seg in st.segments],
        })
    return {
        "n": len(s.tokens),
        "slots": slots,
        "saved": len(s.tokens) - slots,
        "ctrl": ctrl,
        "max_live": max_live(s),
        "cost": round(total_cost, 6),
        "structures": per,
    }
