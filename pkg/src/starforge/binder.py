"""Greedy binding of tokens into FIFO, LIFO and register structures.

Each round finds, among still-unbound tokens, the best acceptable FIFO path
(consecutive pairs FIFO-tagged) and LIFO path in the compatibility graph,
collapses the winner into one storage structure and removes its tokens.
Tokens left over when no acceptable path remains get one register each.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .rcg import CompatibilityGraph, CompatTag
from .schedule import DataToken, Interval


class StorageKind(str, Enum):
    FIFO = "FIFO"
    LIFO = "LIFO"
    REG = "REG"


@dataclass(frozen=True)
class BindingConfig:
    min_fifo_len: int = 2
    min_lifo_len: int = 2
    fill_threshold: float = 0.0
    kind_priority: str = "FIFO-first"
    enable_fifo: bool = True
    enable_lifo: bool = True

    def __post_init__(self) -> None:
        if self.min_fifo_len < 2 or self.min_lifo_len < 2:
            raise ValueError("minimum FIFO/LIFO lengths must be >= 2")
        if not 0.0 <= self.fill_threshold <= 1.0:
            raise ValueError("fill_threshold must lie in [0, 1]")
        if self.kind_priority not in ("FIFO-first", "LIFO-first"):
            raise ValueError("kind_priority must be 'FIFO-first' or 'LIFO-first'")

    def min_len(self, kind: StorageKind) -> int:
        return self.min_fifo_len if kind is StorageKind.FIFO else self.min_lifo_len

    def prefers(self, kind: StorageKind) -> int:
        first = StorageKind.FIFO if self.kind_priority == "FIFO-first" else StorageKind.LIFO
        return 1 if kind is first else 0


@dataclass(frozen=True)
class StorageStructure:
    id: str
    kind: StorageKind
    members: tuple[str, ...]
    depth: int
    segments: tuple[Interval, ...]

    @property
    def start(self) -> int:
        return self.segments[0].start

    @property
    def end(self) -> int:
        return max(seg.end for seg in self.segments)


@dataclass
class BindingResult:
    structures: list[StorageStructure]
    graph: CompatibilityGraph = field(repr=False)

    @property
    def residual(self) -> list[str]:
        return [m for s in self.structures if s.kind is StorageKind.REG for m in s.members]


def planned_occupancy(tokens: Iterable[DataToken]) -> dict[int, int]:
    """Tokens held at the end of each cycle, each token occupying [write, last read)."""
    delta: dict[int, int] = {}
    for t in tokens:
        delta[t.t_min] = delta.get(t.t_min, 0) + 1
        delta[t.t_max] = delta.get(t.t_max, 0) - 1
    out: dict[int, int] = {}
    live = 0
    cycles = sorted(delta)
    for c0, c1 in zip(cycles, cycles[1:] + [None]):
        live += delta[c0]
        for c in range(c0, c1 if c1 is not None else c0 + 1):
            out[c] = live
    return out


def fill_ratio(tokens: Sequence[DataToken], depth: int) -> float:
    """Mean occupancy over the active window [first write, last read), over depth."""
    if not tokens:
        return 0.0
    start = min(t.t_min for t in tokens)
    end = max(t.t_max for t in tokens)
    held = sum(t.t_max - t.t_min for t in tokens)
    return held / ((end - start) * depth)


def envelope(members: Iterable[DataToken]) -> Interval:
    members = list(members)
    return Interval(min(t.t_min for t in members), max(t.t_max for t in members))


def structure_lifetime(st: StorageStructure) -> tuple[Interval, ...]:
    """Time segments during which the structure holds data.

    A freshly bound structure has a single envelope segment; merged
    structures carry the union of their parts.
    """
    return st.segments


# -- path search -------------------------------------------------------------

class _PathSearch:
    """Longest-path machinery over one tag's subgraph restricted to free tokens."""

    def __init__(self, g: CompatibilityGraph, tag: CompatTag):
        self.g = g
        self.adj = g.mask(tag)
        self.t_min = np.array([t.t_min for t in g.order], dtype=np.int64)
        self.t_max = np.array([t.t_max for t in g.order], dtype=np.int64)

    def longest_from(self, avail: np.ndarray) -> np.ndarray:
        n = len(avail)
        lf = np.zeros(n, dtype=np.int64)
        adj = self.adj
        for v in range(n - 1, -1, -1):
            if not avail[v]:
                continue
            succ = adj[v] & avail
            lf[v] = 1 + (lf[succ].max() if succ.any() else 0)
        return lf

    def next_hops(self, lf: np.ndarray, avail: np.ndarray) -> np.ndarray:
        """For each vertex, the earliest successor that keeps a longest path going (-1 if none)."""
        step = self.adj & avail[None, :] & (lf[None, :] == (lf[:, None] - 1))
        nxt = np.argmax(step, axis=1)
        nxt[~step.any(axis=1)] = -1
        return nxt

    @staticmethod
    def walk(v: int, nxt: np.ndarray) -> list[int]:
        path = [v]
        while nxt[v] >= 0:
            v = int(nxt[v])
            path.append(v)
        return path

    def path_from(self, v: int, lf: np.ndarray, avail: np.ndarray) -> list[int]:
        """Canonical longest path from v: always step to the earliest successor that keeps the length."""
        return self.walk(v, self.next_hops(lf, avail))


def longest_path(
    g: CompatibilityGraph, kind: CompatTag | StorageKind, available: Iterable[str] | None = None
) -> list[str]:
    """Longest path of one tag among `available` tokens (all tokens by default).

    Among equally long paths the one starting earliest is returned, then the
    one with the earliest successor at every step.
    """
    tag = _tag_for(kind)
    idx = g.index
    avail = np.zeros(len(g), dtype=bool)
    for tid in (g.vertices if available is None else available):
        avail[idx[tid]] = True
    if not avail.any():
        return []
    search = _PathSearch(g, tag)
    lf = search.longest_from(avail)
    best = int(np.argmax(lf))
    ids = g.vertices
    return [ids[i] for i in search.path_from(best, lf, avail)]


def _tag_for(kind: CompatTag | StorageKind) -> CompatTag:
    if isinstance(kind, CompatTag):
        return kind
    if kind is StorageKind.FIFO:
        return CompatTag.FIFO
    if kind is StorageKind.LIFO:
        return CompatTag.LIFO
    raise ValueError(f"no path tag for {kind}")


def fifo_size(path: Sequence[str], g: CompatibilityGraph) -> int:
    """One plus the largest number of FIFO edges entering a path vertex from earlier path vertices.

    Raises:
        ValueError: if consecutive path vertices are not FIFO-tagged.
    """
    if not path:
        return 0
    for u, v in zip(path, path[1:]):
        if g.tag(u, v) is not CompatTag.FIFO:
            raise ValueError(f"path is not FIFO connected at ({u!r}, {v!r})")
    idx = g.index
    pos = np.array([idx[t] for t in path])
    return _fifo_size_idx(g, pos)


def _fifo_size_idx(g: CompatibilityGraph, pos: np.ndarray) -> int:
    sub = g.tags[np.ix_(pos, pos)] == CompatTag.FIFO
    return 1 + int(sub.sum(axis=0).max())


def lifo_size(path: Sequence[str]) -> int:
    return len(path)


@dataclass(frozen=True)
class Candidate:
    kind: StorageKind
    members: tuple[int, ...]
    depth: int

    def key(self, g: CompatibilityGraph, cfg: BindingConfig) -> tuple:
        # sorted ascending; the smallest key wins
        ids = tuple(g.order[i].id for i in self.members)
        return (
            -len(self.members),
            -(len(self.members) - self.depth),
            -cfg.prefers(self.kind),
            g.order[self.members[0]].t_min,
            ids,
        )


def score_structure(
    path: Sequence[DataToken], depth: int, kind: StorageKind, cfg: BindingConfig
) -> tuple[int, int, int] | None:
    """Score an F or L path, or None if the config rejects it.

    The score (members, slots saved, kind preference) compares lexicographically.
    """
    if len(path) < cfg.min_len(kind):
        return None
    if cfg.fill_threshold > 0 and fill_ratio(path, depth) < cfg.fill_threshold:
        return None
    return (len(path), len(path) - depth, cfg.prefers(kind))


def _prefix_profile(search: _PathSearch, kind: StorageKind, path: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Depth and fill ratio of every prefix of `path` (index k -> first k+1 members)."""
    pos = np.array(path)
    if kind is StorageKind.FIFO:
        incoming = search.adj[pos][:, pos].sum(axis=0)
        depth = 1 + np.maximum.accumulate(incoming)
    else:
        depth = np.arange(1, len(path) + 1)
    t_min = search.t_min[pos]
    t_max = search.t_max[pos]
    held = np.cumsum(t_max - t_min)
    span = np.maximum.accumulate(t_max) - t_min[0]
    return depth, held / (span * depth)


def _best_candidate(
    g: CompatibilityGraph, search: _PathSearch, kind: StorageKind, avail: np.ndarray, cfg: BindingConfig
) -> Candidate | None:
    lf = search.longest_from(avail)
    min_len = cfg.min_len(kind)
    starts = np.flatnonzero(avail & (lf >= min_len)).tolist()
    if not starts:
        return None
    starts.sort(key=lambda v: (-int(lf[v]), v))
    nxt = search.next_hops(lf, avail)
    best: Candidate | None = None
    best_key = None
    for v in starts:
        if best is not None and lf[v] < len(best.members):
            break
        path = search.walk(v, nxt)
        depth, fill = _prefix_profile(search, kind, path)
        # the full path unless the fill threshold rejects it; then its longest accepted prefix
        ok = np.flatnonzero(fill[min_len - 1:] >= cfg.fill_threshold) + min_len - 1
        if len(ok) == 0:
            continue
        length = int(ok[-1]) + 1
        if best is not None and length < len(best.members):
            continue
        cand = Candidate(kind, tuple(path[:length]), int(depth[length - 1]))
        key = cand.key(g, cfg)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def bind(g: CompatibilityGraph, cfg: BindingConfig | None = None) -> BindingResult:
    cfg = cfg or BindingConfig()
    n = len(g)
    avail = np.ones(n, dtype=bool)
    searches = []
    if cfg.enable_fifo:
        searches.append((StorageKind.FIFO, _PathSearch(g, CompatTag.FIFO)))
    if cfg.enable_lifo:
        searches.append((StorageKind.LIFO, _PathSearch(g, CompatTag.LIFO)))

    bound: list[tuple[StorageKind, tuple[int, ...], int]] = []
    while searches and avail.sum() >= 2:
        found = [c for kind, s in searches if (c := _best_candidate(g, s, kind, avail, cfg)) is not None]
        if not found:
            break
        win = min(found, key=lambda c: c.key(g, cfg))
        bound.append((win.kind, win.members, win.depth))
        avail[list(win.members)] = False

    for i in np.flatnonzero(avail).tolist():
        bound.append((StorageKind.REG, (i,), 1))

    structures = []
    counters = {k: 0 for k in StorageKind}
    for kind, members, depth in sorted(bound, key=lambda b: (g.order[b[1][0]].t_min, g.order[b[1][0]].id)):
        toks = [g.order[i] for i in members]
        sid = f"{kind.value.lower()}{counters[kind]}"
        counters[kind] += 1
        structures.append(StorageStructure(
            id=sid,
            kind=kind,
            members=tuple(t.id for t in toks),
            depth=depth,
            segments=(envelope(toks),),
        ))
    return BindingResult(structures, g)
