from hypothesis import given, settings
from hypothesis import strategies as st

from starforge.binder import BindingConfig, BindingResult, StorageKind, StorageStructure, bind
from starforge.optimizer import optimize, structure_compatible
from starforge.rcg import build_rcg
from starforge.schedule import Interval, gen_random, max_live

REG, FIFO, LIFO = StorageKind.REG, StorageKind.FIFO, StorageKind.LIFO


def mk(sid, kind, start, end, depth=1, members=None):
    return StorageStructure(sid, kind, members or (sid,), depth, (Interval(start, end),))


def test_compatible_boundary():
    assert structure_compatible(mk("r0", REG, 0, 3), mk("r1", REG, 3, 7))


def test_incompatible_overlap(star):
    b = bind(build_rcg(star))
    f0, f1 = b.structures
    assert not structure_compatible(f0, f1)


def test_incompatible_kind():
    assert not structure_compatible(mk("f", FIFO, 0, 4), mk("l", LIFO, 5, 9))


def test_gap_fit():
    merged = StorageStructure("r0", REG, ("x", "y"), 1, (Interval(0, 2), Interval(8, 10)))
    assert structure_compatible(merged, mk("z", REG, 2, 8))
    assert not structure_compatible(merged, mk("z", REG, 1, 5))


def test_optimize_three_registers():
    b = BindingResult([mk("a", REG, 0, 2), mk("b", REG, 2, 5), mk("c", REG, 6, 9)], graph=None)
    arch = optimize(b)
    assert len(arch.structures) == 1
    only = arch.structures[0]
    assert only.kind is REG and only.depth == 1 and set(only.members) == {"a", "b", "c"}
    assert arch.merge_log == [(("b", "c"), "a")]


def test_optimize_star_unchanged(star):
    b = bind(build_rcg(star))
    arch = optimize(b)
    assert sorted(arch.structures, key=lambda s: s.id) == sorted(b.structures, key=lambda s: s.id)
    assert arch.total_depth == 5 and arch.merge_log == []


def test_optimize_empty():
    arch = optimize(BindingResult([], graph=None))
    assert arch.structures == [] and arch.merge_log == []


def test_merged_depth_is_max():
    b = BindingResult([mk("f0", FIFO, 0, 4, depth=3, members=("a", "b")),
                       mk("f1", FIFO, 4, 9, depth=5, members=("c", "d"))], graph=None)
    (only,) = optimize(b).structures
    assert only.depth == 5 and only.segments == (Interval(0, 4), Interval(4, 9))


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 22), n_in=st.integers(1, 3), seed=st.integers(0, 100_000),
       fifo=st.booleans(), lifo=st.booleans())
def test_optimizer_properties(n, n_in, seed, fifo, lifo):
    s = gen_random(n, 48, n_in, 2, 2, seed)
    b = bind(build_rcg(s), BindingConfig(enable_fifo=fifo, enable_lifo=lifo))
    arch = optimize(b)
    assert len(arch.structures) <= len(b.structures)
    assert arch.total_depth <= sum(x.depth for x in b.structures)
    assert arch.total_depth >= max_live(s)
    assert sorted(m for x in arch.structures for m in x.members) == sorted(t.id for t in s.tokens)
    for i, x in enumerate(arch.structures):
        segs = sorted(x.segments, key=lambda g: g.start)
        assert all(not p.overlaps(q) for p, q in zip(segs, segs[1:]))
        for y in arch.structures[i + 1:]:
            assert not structure_compatible(x, y)
    again = optimize(arch)
    assert again.structures == arch.structures
