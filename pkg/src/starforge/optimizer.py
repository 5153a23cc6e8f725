"""Merge bound structures of the same kind whose busy time segments never overlap."""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field

from .binder import BindingResult, StorageKind, StorageStructure
from .schedule import Interval


@dataclass
class OptimizedArchitecture:
    structures: list[StorageStructure]
    merge_log: list[tuple[tuple[str, ...], str]] = field(default_factory=list)

    @property
    def total_depth(self) -> int:
        return sum(s.depth for s in self.structures)


def structure_compatible(s1: StorageStructure, s2: StorageStructure) -> bool:
    """Same kind and no strictly overlapping segments (touching ends are fine)."""
    if s1.kind is not s2.kind:
        return False
    a, b = sorted(s1.segments, key=_seg_key), sorted(s2.segments, key=_seg_key)
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i].overlaps(b[j]):
            return False
        if a[i].end <= b[j].end:
            i += 1
        else:
            j += 1
    return True


def _seg_key(seg: Interval) -> tuple[int, int]:
    return (seg.start, seg.end)


def _merge(chain: list[StorageStructure]) -> StorageStructure:
    head = chain[0]
    members: list[str] = []
    for st in chain:
        members.extend(st.members)
    segments = sorted((seg for st in chain for seg in st.segments), key=_seg_key)
    return StorageStructure(
        id=head.id,
        kind=head.kind,
        members=tuple(members),
        depth=max(st.depth for st in chain),
        segments=tuple(segments),
    )


def _order(group: list[StorageStructure]) -> list[StorageStructure]:
    return sorted(group, key=lambda s: (s.start, s.id))


def _longest_sequential_chain(group: list[StorageStructure]) -> list[StorageStructure]:
    """Longest chain in which each structure starts no earlier than the previous one ends.

    Ties go to the chain starting earliest, then to the earliest successor.
    """
    group = _order(group)
    starts = [s.start for s in group]
    n = len(group)
    lf = [1] * n
    suffix_best = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        k = bisect_left(starts, group[i].end)
        k = max(k, i + 1)
        lf[i] = 1 + suffix_best[k]
        suffix_best[i] = max(lf[i], suffix_best[i + 1])
    best = max(range(n), key=lambda i: (lf[i], -i))
    chain = [best]
    while lf[chain[-1]] > 1:
        cur = chain[-1]
        k = max(bisect_left(starts, group[cur].end), cur + 1)
        nxt = next(j for j in range(k, n) if lf[j] == lf[cur] - 1)
        chain.append(nxt)
    return [group[i] for i in chain]


def _merge_sequential(group: list[StorageStructure], log: list) -> list[StorageStructure]:
    while len(group) >= 2:
        chain = _longest_sequential_chain(group)
        if len(chain) < 2:
            break
        merged = _merge(chain)
        log.append((tuple(s.id for s in chain[1:]), merged.id))
        gone = {s.id for s in chain}
        group = [s for s in group if s.id not in gone] + [merged]
    return group


def _merge_gaps(group: list[StorageStructure], log: list) -> list[StorageStructure]:
    group = _order(group)
    changed = True
    while changed:
        changed = False
        for i in range(len(group)):
            absorbed = []
            for j in range(i + 1, len(group)):
                if structure_compatible(group[i], group[j]):
                    group[i] = _merge([group[i], group[j]])
                    absorbed.append(j)
            if absorbed:
                log.append((tuple(group[j].id for j in absorbed), group[i].id))
                group = _order([s for k, s in enumerate(group) if k not in absorbed])
                changed = True
                break
    return group


def optimize(b: BindingResult) -> OptimizedArchitecture:
    """Merge same-kind structures that can time-share one storage element.

    Sequential chains (each part starting after the previous one finished) are
    merged longest-first; afterwards any remaining pair whose segments
    interleave without overlapping is merged too. The merged depth is the
    largest depth in the group and its lifetime the union of the parts.
    """
    log: list[tuple[tuple[str, ...], str]] = []
    out: list[StorageStructure] = []
    for kind in StorageKind:
        group = [s for s in b.structures if s.kind is kind]
        if not group:
            continue
        group = _merge_sequential(group, log)
        group = _merge_gaps(group, log)
        out.extend(group)
    out.sort(key=lambda s: (s.start, s.id))
    return OptimizedArchitecture(out, log)
