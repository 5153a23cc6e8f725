"""End-to-end synthesis: graph, binding, merging, netlist, control, self-check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .architecture import (
    ArchitectureNetlist,
    ControlSchedule,
    CostModel,
    build_control,
    build_netlist,
    report,
)
from .binder import BindingConfig, BindingResult, bind
from .optimizer import OptimizedArchitecture, optimize
from .rcg import CompatibilityGraph, build_rcg
from .schedule import AccessSchedule
from .simulator import Mismatch, SimResult, SimViolation, simulate, verify


@dataclass
class Design:
    schedule: AccessSchedule
    graph: CompatibilityGraph
    binding: BindingResult
    arch: OptimizedArchitecture
    netlist: ArchitectureNetlist
    control: ControlSchedule
    sim: SimResult
    problems: list[Mismatch | SimViolation]
    metrics: dict[str, Any]

    @property
    def ok(self) -> bool:
        return not self.problems


def synthesize(
    s: AccessSchedule,
    binding: BindingConfig | None = None,
    cost: CostModel | None = None,
    graph: CompatibilityGraph | None = None,
) -> Design:
    """Run the full flow and replay the result in the simulator.

    Raises:
        DisciplineError: the bound structures cannot serve the schedule.
    """
    g = graph if graph is not None else build_rcg(s)
    b = bind(g, binding)
    arch = optimize(b)
    net = build_netlist(arch, s)
    control = build_control(net, s)
    sim = simulate(net, control, s)
    problems = verify(sim, s)
    metrics = report(arch, s, cost)
    metrics["rcg"] = {"vertices": len(g), "edges": g.counts()}
    metrics["bound"] = [
        {"id": st.id, "kind": st.kind.value, "members": list(st.members), "depth": st.depth}
        for st in b.structures
    ]
    metrics["merges"] = [{"absorbed": list(a), "into": into} for a, into in arch.merge_log]
    metrics["verified"] = not problems
    return Design(s, g, b, arch, net, control, sim, problems, metrics)
