import itertools

import pytest

from starforge.schedule import AccessSchedule, Access, DataToken, PortSpec, star_schedule

ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def star():
    return star_schedule()


def token(tid, write, *reads, port="P0", out="Q0"):
    return DataToken(tid, Access(port, write), tuple(Access(out, r) for r in reads))


def schedule_of(*tokens, inputs=("P0",), outputs=("Q0",)):
    return AccessSchedule(PortSpec(tuple(inputs), tuple(outputs)), tuple(tokens))


# -- independent oracles --------------------------------------------------------

def brute_max_live(s):
    """Sweep every half-integer time point and count open lifetimes containing it."""
    if not s.tokens:
        return 0
    hi = max(t.t_max for t in s.tokens)
    best = 0
    for k in range(2 * hi + 2):
        x = k / 2 + 0.25
        best = max(best, sum(1 for t in s.tokens if t.t_min < x < t.t_max))
    return best


def replay_shared(a, b, kind, capacity):
    """Can tokens a and b share one storage element of the given kind?

    Each element has one write port and one read port: at most one write and
    one read per cycle, reads before writes. A token is pushed at its write
    cycle and removed at its last read; every read must find the token at the
    accessible position (queue head, stack top, register content).
    """
    events = {}
    for t in (a, b):
        events.setdefault(t.t_min, {"w": [], "r": []})["w"].append(t.id)
        for i, r in enumerate(t.reads):
            events.setdefault(r.cycle, {"w": [], "r": []})["r"].append((t.id, i == len(t.reads) - 1))
    held = []
    for cycle in sorted(events):
        ev = events[cycle]
        if len(ev["r"]) > 1 or len(ev["w"]) > 1:
            return False
        for tid, final in ev["r"]:
            if not held:
                return False
            at = held[0] if kind == "queue" else held[-1]
            if at != tid:
                return False
            if final:
                held.remove(tid)
        for tid in ev["w"]:
            if len(held) >= capacity:
                return False
            held.append(tid)
    return True


def all_lifetimes(horizon=8, max_reads=2):
    """Every (write, reads) shape with cycles in 0..horizon and 1..max_reads reads."""
    for w in range(horizon + 1):
        later = range(w + 1, horizon + 1)
        for k in range(1, max_reads + 1):
            for reads in itertools.combinations(later, k):
                yield w, reads


def enumerate_paths(adj, nodes):
    """All directed paths (length >= 1) in a small DAG given as {u: set(v)}."""
    out = []

    def extend(path):
        out.append(tuple(path))
        for v in sorted(adj.get(path[-1], ())):
            if v in nodes:
                extend(path + [v])

    for u in nodes:
        extend([u])
    return out
