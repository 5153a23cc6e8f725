"""Resource compatibility graph over data tokens.

Vertices are tokens in chronological (write cycle, id) order. An edge from an
earlier token ``a`` to a later token ``b`` carries the kind of storage the pair
can share:

* REGISTER: ``b`` is written no earlier than ``a``'s last read.
* FIFO: lifetimes partially overlap and every read of ``b`` follows ``a``'s
  last read.
* LIFO: ``b`` lives entirely before ``a``'s first read.

Only the nested case of the LIFO relation is recognised; a token slotted
between two reads of another does not make the pair LIFO compatible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .schedule import AccessSchedule, DataToken, chrono_key


class CompatTag(IntEnum):
    NONE = 0
    REGISTER = 1
    FIFO = 2
    LIFO = 3

    @property
    def letter(self) -> str:
        return {CompatTag.NONE: "-", CompatTag.REGISTER: "R", CompatTag.FIFO: "F", CompatTag.LIFO: "L"}[self]


def classify_pair(a: DataToken, b: DataToken) -> CompatTag:
    """Tag the chronologically ordered pair (a, b).

    Raises:
        ValueError: if a and b are the same token or b precedes a.
    """
    if a.id == b.id:
        raise ValueError(f"cannot classify token {a.id!r} against itself")
    if chrono_key(b) < chrono_key(a):
        raise ValueError(f"pair ({a.id!r}, {b.id!r}) is not in chronological order")
    if b.t_min >= a.t_max:
        return CompatTag.REGISTER
    if b.t_min > a.t_min and b.t_first > a.t_max and b.t_min < a.t_max:
        return CompatTag.FIFO
    if b.t_min > a.t_min and a.t_first > b.t_max:
        return CompatTag.LIFO
    return CompatTag.NONE


@dataclass
class CompatibilityGraph:
    """Tokens in chronological order plus an upper-triangular tag matrix.

    ``tags[i, j]`` (i < j) holds the CompatTag of (order[i], order[j]).
    """

    order: list[DataToken]
    tags: np.ndarray

    @property
    def vertices(self) -> list[str]:
        return [t.id for t in self.order]

    @property
    def index(self) -> dict[str, int]:
        return {t.id: i for i, t in enumerate(self.order)}

    def tag(self, u: str, v: str) -> CompatTag:
        idx = self.index
        i, j = idx[u], idx[v]
        if i > j:
            i, j = j, i
        return CompatTag(int(self.tags[i, j]))

    def edges(self) -> list[tuple[str, str, CompatTag]]:
        ii, jj = np.nonzero(self.tags)
        ids = self.vertices
        return [(ids[i], ids[j], CompatTag(int(self.tags[i, j]))) for i, j in zip(ii.tolist(), jj.tolist())]

    def mask(self, tag: CompatTag) -> np.ndarray:
        return self.tags == int(tag)

    def counts(self) -> dict[str, int]:
        return {t.letter: int(np.count_nonzero(self.tags == int(t))) for t in (CompatTag.REGISTER, CompatTag.FIFO, CompatTag.LIFO)}

    def __len__(self) -> int:
        return len(self.order)


def build_rcg(s: AccessSchedule) -> CompatibilityGraph:
    """Classify every chronologically ordered token pair of `s`."""
    order = s.chronological()
    n = len(order)
    if n == 0:
        return CompatibilityGraph(order, np.zeros((0, 0), dtype=np.int8))
    t_min = np.array([t.t_min for t in order])
    t_first = np.array([t.t_first for t in order])
    t_max = np.array([t.t_max for t in order])
    # rows are the earlier token a, columns the later token b
    later = np.triu(np.ones((n, n), dtype=bool), k=1)
    a_min, b_min = t_min[:, None], t_min[None, :]
    a_max, b_max = t_max[:, None], t_max[None, :]
    reg = later & (b_min >= a_max)
    fifo = later & ~reg & (b_min > a_min) & (t_first[None, :] > a_max) & (b_min < a_max)
    lifo = later & ~reg & ~fifo & (b_min > a_min) & (t_first[:, None] > b_max)
    tags = np.zeros((n, n), dtype=np.int8)
    tags[reg] = CompatTag.REGISTER
    tags[fifo] = CompatTag.FIFO
    tags[lifo] = CompatTag.LIFO
    return CompatibilityGraph(order, tags)


def export_dot(g: CompatibilityGraph, name: str = "rcg") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for t in g.order:
        lines.append(f'  "{t.id}" [label="{t.id}\\n[{t.t_min},{t.t_max}]"];')
    for u, v, tag in g.edges():
        lines.append(f'  "{u}" -> "{v}" [label="{tag.letter}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
