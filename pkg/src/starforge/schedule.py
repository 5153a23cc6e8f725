"""I/O access schedules: tokens, ports, validation, generators and lifetimes.

A schedule lists, for every datum crossing the adapter, the cycle and input
port it is written on and the (port, cycle) pairs it is read on. Time is a
unitless non-negative integer cycle count.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

DEFAULT_WIDTH = 8


class ScheduleError(ValueError):
    """Raised when a schedule document cannot be parsed or is invalid."""


@dataclass(frozen=True)
class Interval:
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"interval start {self.start} > end {self.end}")

    def overlaps(self, other: Interval) -> bool:
        """Strict overlap; intervals that only touch at a boundary do not overlap."""
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class PortSpec:
    inputs: tuple[str, ...] = ("P0",)
    outputs: tuple[str, ...] = ("Q0",)


@dataclass(frozen=True)
class Access:
    port: str
    cycle: int


@dataclass(frozen=True)
class DataToken:
    id: str
    write: Access
    reads: tuple[Access, ...]
    width: int = DEFAULT_WIDTH

    @property
    def t_min(self) -> int:
        return self.write.cycle

    @property
    def t_first(self) -> int:
        return self.reads[0].cycle

    @property
    def t_max(self) -> int:
        return self.reads[-1].cycle


@dataclass(frozen=True)
class AccessSchedule:
    ports: PortSpec = field(default_factory=PortSpec)
    tokens: tuple[DataToken, ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    def token_map(self) -> dict[str, DataToken]:
        return {t.id: t for t in self.tokens}

    def chronological(self) -> list[DataToken]:
        """Tokens ordered by write cycle, ties broken by id."""
        return sorted(self.tokens, key=chrono_key)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    tokens: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def chrono_key(t: DataToken) -> tuple[int, str]:
    return (t.write.cycle, t.id)


def lifetime(t: DataToken) -> Interval:
    return Interval(t.t_min, t.t_max)


def validate(s: AccessSchedule) -> list[Violation]:
    """Return every invariant breach in `s`, in a deterministic order."""
    out: list[Violation] = []
    names = list(s.ports.inputs) + list(s.ports.outputs)
    if not s.ports.inputs:
        out.append(Violation("ports", "at least one input port is required"))
    if not s.ports.outputs:
        out.append(Violation("ports", "at least one output port is required"))
    seen_names: set[str] = set()
    for name in names:
        if name in seen_names:
            out.append(Violation("ports", f"duplicate port name {name!r}"))
        seen_names.add(name)

    ins, outs = set(s.ports.inputs), set(s.ports.outputs)
    seen_ids: set[str] = set()
    writes: dict[tuple[str, int], list[str]] = {}
    reads: dict[tuple[str, int], list[str]] = {}
    for t in s.tokens:
        if t.id in seen_ids:
            out.append(Violation("duplicate id", f"token id {t.id!r} appears more than once", (t.id,)))
        seen_ids.add(t.id)
        if t.width < 1:
            out.append(Violation("width", f"token {t.id!r} has width {t.width}", (t.id,)))
        if t.write.port not in ins:
            out.append(Violation("unknown port", f"token {t.id!r} written on undeclared input {t.write.port!r}", (t.id,)))
        if t.write.cycle < 0:
            out.append(Violation("negative cycle", f"token {t.id!r} written at cycle {t.write.cycle}", (t.id,)))
        writes.setdefault((t.write.port, t.write.cycle), []).append(t.id)
        if not t.reads:
            out.append(Violation("no reads", f"token {t.id!r} is never read", (t.id,)))
            continue
        for r in t.reads:
            if r.port not in outs:
                out.append(Violation("unknown port", f"token {t.id!r} read on undeclared output {r.port!r}", (t.id,)))
            reads.setdefault((r.port, r.cycle), []).append(t.id)
        cycles = [r.cycle for r in t.reads]
        if any(b <= a for a, b in zip(cycles, cycles[1:])):
            out.append(Violation("read order", f"token {t.id!r} read cycles {cycles} not strictly increasing", (t.id,)))
        if cycles[0] <= t.write.cycle:
            out.append(Violation(
                "read before write",
                f"token {t.id!r} read at cycle {cycles[0]} but written at cycle {t.write.cycle}",
                (t.id,),
            ))

    for (port, cycle), ids in sorted(writes.items()):
        if len(ids) > 1:
            out.append(Violation("port write conflict", f"{len(ids)} writes on {port} at cycle {cycle}", tuple(ids)))
    for (port, cycle), ids in sorted(reads.items()):
        if len(ids) > 1:
            out.append(Violation("port read conflict", f"{len(ids)} reads on {port} at cycle {cycle}", tuple(ids)))
    return out


def max_live(s: AccessSchedule) -> int:
    """Peak number of tokens alive between two consecutive cycles.

    A token counts as live on [write, last read); a slot freed by a final read
    at cycle k can take a token written at cycle k.
    """
    delta: dict[int, int] = {}
    for t in s.tokens:
        delta[t.t_min] = delta.get(t.t_min, 0) + 1
        delta[t.t_max] = delta.get(t.t_max, 0) - 1
    best = live = 0
    for cycle in sorted(delta):
        live += delta[cycle]
        best = max(best, live)
    return best


# -- serialization ----------------------------------------------------------

def schedule_to_dict(s: AccessSchedule) -> dict[str, Any]:
    return {
        "ports": {"in": list(s.ports.inputs), "out": list(s.ports.outputs)},
        "tokens": [
            {
                "id": t.id,
                "write": {"port": t.write.port, "cycle": t.write.cycle},
                "reads": [{"port": r.port, "cycle": r.cycle} for r in t.reads],
                "width": t.width,
            }
            for t in s.tokens
        ],
    }


def dump_schedule(s: AccessSchedule) -> str:
    return json.dumps(schedule_to_dict(s), indent=2) + "\n"


def _field(obj: Any, key: str, where: str, kind: type | tuple[type, ...]) -> Any:
    if not isinstance(obj, dict):
        raise ScheduleError(f"{where}: expected an object")
    if key not in obj:
        raise ScheduleError(f"{where}.{key}: missing field")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, kind):
        raise ScheduleError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}")
    return value


def _access(obj: Any, where: str) -> Access:
    return Access(_field(obj, "port", where, str), _field(obj, "cycle", where, int))


def schedule_from_dict(doc: Any) -> AccessSchedule:
    ports = _field(doc, "ports", "$", dict)
    inputs = _field(ports, "in", "$.ports", list)
    outputs = _field(ports, "out", "$.ports", list)
    for i, p in enumerate(inputs + outputs):
        if not isinstance(p, str):
            raise ScheduleError(f"$.ports: port #{i} is not a string")
    tokens = []
    for i, raw in enumerate(_field(doc, "tokens", "$", list)):
        where = f"$.tokens[{i}]"
        reads = _field(raw, "reads", where, list)
        width = raw.get("width", DEFAULT_WIDTH) if isinstance(raw, dict) else DEFAULT_WIDTH
        if isinstance(width, bool) or not isinstance(width, int):
            raise ScheduleError(f"{where}.width: expected int")
        tokens.append(DataToken(
            id=_field(raw, "id", where, str),
            write=_access(_field(raw, "write", where, dict), f"{where}.write"),
            reads=tuple(_access(r, f"{where}.reads[{j}]") for j, r in enumerate(reads)),
            width=width,
        ))
    return AccessSchedule(PortSpec(tuple(inputs), tuple(outputs)), tuple(tokens))


def parse_schedule(text: str) -> AccessSchedule:
    """Parse and validate a JSON schedule document.

    Raises:
        ScheduleError: on malformed JSON (with line/column), a missing or
            mistyped field (with its JSON path), or any invariant violation.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    s = schedule_from_dict(doc)
    problems = validate(s)
    if problems:
        raise ScheduleError("; ".join(str(p) for p in problems))
    return s


# -- generators -------------------------------------------------------------

def _ids(n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"t{i:0{width}d}" for i in range(n)]


def _ports(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(count))


def gen_linear(n: int, read_offset: int | None = None) -> AccessSchedule:
    """In-order stream: token i written at cycle i and read at read_offset + i."""
    if n < 1:
        raise ScheduleError("n must be >= 1")
    read_offset = n if read_offset is None else read_offset
    if read_offset < n:
        raise ScheduleError(f"read_offset {read_offset} < n {n}: reads would precede all writes")
    return gen_from_permutation(list(range(n)), 1, 1, read_offset)


def gen_from_permutation(
    perm: Sequence[int], p_in: int = 1, p_out: int = 1, read_offset: int | None = None
) -> AccessSchedule:
    """Schedule writing tokens in index order and reading them in `perm` order.

    Token i is written at cycle i // p_in on input port i % p_in; the j-th read
    fetches token perm[j] at cycle read_offset + j // p_out on port j % p_out.
    With read_offset=None the smallest feasible offset is used.
    """
    n = len(perm)
    if n == 0 or sorted(perm) != list(range(n)):
        raise ScheduleError("perm must be a permutation of 0..n-1")
    if p_in < 1 or p_out < 1:
        raise ScheduleError("port parallelism must be >= 1")
    # smallest offset with offset + j // p_out > perm[j] // p_in for every j
    need = max(perm[j] // p_in - j // p_out + 1 for j in range(n))
    if read_offset is None:
        read_offset = max(need, 0)
    elif read_offset < need:
        raise ScheduleError(f"read_offset {read_offset} infeasible; need at least {need}")
    ids = _ids(n)
    ins, outs = _ports("P", p_in), _ports("Q", p_out)
    read_at = {}
    for j, k in enumerate(perm):
        read_at[k] = Access(outs[j % p_out], read_offset + j // p_out)
    tokens = tuple(
        DataToken(ids[i], Access(ins[i % p_in], i // p_in), (read_at[i],)) for i in range(n)
    )
    return AccessSchedule(PortSpec(ins, outs), tokens)


def block_interleaver_order(rows: int, cols: int) -> list[int]:
    """Row-major indices of a rows x cols block read column by column."""
    return [r * cols + c for c in range(cols) for r in range(rows)]


def gen_block_interleaver(
    rows: int, cols: int, p_in: int = 1, p_out: int = 1, read_offset: int | None = None
) -> AccessSchedule:
    if rows < 1 or cols < 1:
        raise ScheduleError("rows and cols must be >= 1")
    return gen_from_permutation(block_interleaver_order(rows, cols), p_in, p_out, read_offset)


def gen_random(
    n: int,
    horizon: int = 64,
    n_in: int = 1,
    n_out: int = 1,
    max_reads: int = 2,
    seed: int | None = None,
) -> AccessSchedule:
    """Random valid schedule with cycles in [0, horizon)."""
    if n < 1 or horizon < 2:
        raise ScheduleError("need n >= 1 and horizon >= 2")
    if n > n_in * (horizon - 1):
        raise ScheduleError("too many tokens for the write slots available")
    rng = random.Random(seed)
    ins, outs = _ports("P", n_in), _ports("Q", n_out)
    write_slots = rng.sample([(p, c) for c in range(horizon - 1) for p in ins], n)
    busy: set[tuple[str, int]] = set()
    tokens = []
    for tid, (port, wc) in zip(_ids(n), sorted(write_slots, key=lambda x: (x[1], x[0]))):
        free = [(c, q) for c in range(wc + 1, horizon) for q in outs if (q, c) not in busy]
        if not free:
            continue
        by_cycle: dict[int, list[str]] = {}
        for c, q in free:
            by_cycle.setdefault(c, []).append(q)
        cycles = sorted(rng.sample(sorted(by_cycle), min(len(by_cycle), rng.randint(1, max_reads))))
        picks = []
        for c in cycles:
            q = rng.choice(by_cycle[c])
            busy.add((q, c))
            picks.append(Access(q, c))
        tokens.append(DataToken(tid, Access(port, wc), tuple(picks)))
    return AccessSchedule(PortSpec(ins, outs), tuple(tokens))


def star_schedule() -> AccessSchedule:
    """Six-token single-link example: write order a,c,b,e,f,d; read order c,a,e,b,d,f."""
    writes = {"a": 0, "c": 1, "b": 2, "e": 3, "f": 4, "d": 5}
    reads = {"c": 4, "a": 6, "e": 7, "b": 9, "d": 10, "f": 11}
    tokens = tuple(
        DataToken(k, Access("P0", writes[k]), (Access("Q0", reads[k]),)) for k in "abcdef"
    )
    return AccessSchedule(PortSpec(("P0",), ("Q0",)), tokens)


def write_order(s: AccessSchedule) -> list[str]:
    return [t.id for t in sorted(s.tokens, key=lambda t: (t.t_min, s.ports.inputs.index(t.write.port)))]


def read_order(s: AccessSchedule) -> list[str]:
    events: Iterable[tuple[int, int, str]] = (
        (r.cycle, s.ports.outputs.index(r.port), t.id) for t in s.tokens for r in t.reads
    )
    return [tid for _, _, tid in sorted(events)]
