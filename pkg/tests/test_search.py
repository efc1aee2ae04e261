import itertools

import pytest

from davlab.errors import CapExceeded, CorruptCheckpoint, VersionMismatch
from davlab.groups import cyclic, make_metacyclic, make_table_group
from davlab.search import (SearchOptions, enumerate_free, enumerate_free_result, free_search,
                           large_davenport, small_davenport)
from davlab.sequences import Sequence, is_minimal_product_one, is_product_one_free

S3 = make_metacyclic((2, 3, 2))
G372 = make_metacyclic((3, 7, 2))


def brute_small(group):
    best = 0
    for k in range(1, group.order + 1):
        if any(is_product_one_free(group, Sequence.of(c))
               for c in itertools.combinations_with_replacement(range(group.order), k)):
            best = k
        else:
            break
    return best


def brute_large(group):
    best = 0
    for k in range(1, group.order + 1):
        if any(is_minimal_product_one(group, Sequence.of(c))
               for c in itertools.combinations_with_replacement(range(group.order), k)):
            best = k
    return best


@pytest.mark.parametrize("n", range(1, 13))
def test_cyclic_small(n):
    r = small_davenport(cyclic(n))
    assert r.exhaustive and r.value == n - 1


@pytest.mark.parametrize("group", [cyclic(4), cyclic(6), S3, make_metacyclic((2, 4, 3)),
                                   make_table_group([[i ^ j for j in range(4)] for i in range(4)])])
def test_against_brute_force(group):
    assert small_davenport(group).value == brute_small(group)
    assert large_davenport(group).value == brute_large(group)


def test_s3_values_and_witness():
    r = small_davenport(S3)
    assert r.value == 3 and r.exhaustive
    assert is_product_one_free(S3, r.witness) and len(r.witness) == 3
    big = large_davenport(S3)
    assert 4 <= big.value <= 6 and big.value == 6
    assert is_minimal_product_one(S3, big.witness)


def test_table_group_cross_check():
    table_s3 = make_table_group(S3.table)
    assert small_davenport(table_s3).value == 3
    assert len(enumerate_free(table_s3, 3)) == 7


def test_enumerate_examples():
    seqs = enumerate_free(S3, 3)
    assert len(seqs) == 7
    assert len(enumerate_free(S3, 1)) == 5
    assert enumerate_free(S3, 4) == []
    for s in seqs:
        assert is_product_one_free(S3, s)


def test_enumerate_agrees_with_brute_force():
    g = make_metacyclic((2, 5, 4))
    for k in (2, 3, 4):
        brute = [Sequence.of(c) for c in itertools.combinations_with_replacement(range(g.order), k)
                 if is_product_one_free(g, Sequence.of(c))]
        assert enumerate_free(g, k) == sorted(brute, key=lambda s: s.terms())


def test_free_search_collects_extremal():
    r = free_search(G372, 8)
    assert r.value == 8 and len(r.sequences) == 336


def test_witness_is_lex_least_of_max_length():
    seqs = enumerate_free(S3, 3)
    assert small_davenport(S3).witness == min(seqs, key=lambda s: s.terms())


@pytest.mark.parametrize("params", [(2, 3, 2), (2, 5, 4), (4, 5, 2), (3, 7, 2)])
def test_jobs_and_symmetry_agree(params):
    g = make_metacyclic(params)
    base = small_davenport(g)
    base_enum = enumerate_free(g, base.value)
    for jobs, symmetry in [(1, True), (2, False), (2, True)]:
        opts = SearchOptions(jobs=jobs, symmetry=symmetry)
        r = small_davenport(g, opts)
        assert (r.value, r.witnesses, r.exhaustive) == (base.value, base.witnesses, True)
        assert enumerate_free(g, base.value, opts) == base_enum


def test_pruned_search_agrees_with_unpruned_reference():
    # the enumeration never extends a non-free node; compare with a naive walk
    g = make_metacyclic((2, 5, 4))
    naive = [Sequence.of(c) for c in itertools.combinations_with_replacement(range(g.order), 5)
             if is_product_one_free(g, Sequence.of(c))]
    assert enumerate_free(g, 5) == sorted(naive, key=lambda s: s.terms())


def test_node_cap_returns_lower_bound():
    r = small_davenport(G372, SearchOptions(node_cap=50))
    assert not r.exhaustive and 1 <= r.value <= 8
    with pytest.raises(CapExceeded):
        r.require_exhaustive()


def test_max_length_cap():
    r = small_davenport(G372, SearchOptions(max_length=5))
    assert r.value == 5


def test_checkpoint_resume_matches_uninterrupted(tmp_path):
    path = tmp_path / "g372.ckpt"
    full = small_davenport(G372)
    part = small_davenport(G372, SearchOptions(node_cap=3000, checkpoint=path))
    assert not part.exhaustive
    frontier = path.read_text().splitlines()[1]
    assert frontier.strip()
    resumed = small_davenport(G372, SearchOptions(checkpoint=path))
    assert resumed.exhaustive
    assert (resumed.value, resumed.witnesses, resumed.nodes) == (full.value, full.witnesses, full.nodes)


def test_checkpoint_resume_enumeration(tmp_path):
    path = tmp_path / "enum.ckpt"
    full = enumerate_free_result(G372, 8)
    enumerate_free_result(G372, 8, SearchOptions(node_cap=2000, checkpoint=path))
    enumerate_free_result(G372, 8, SearchOptions(node_cap=2000, checkpoint=path))
    resumed = enumerate_free_result(G372, 8, SearchOptions(checkpoint=path))
    assert resumed.exhaustive and resumed.sequences == full.sequences


def test_checkpoint_empty_frontier_returns_directly(tmp_path):
    path = tmp_path / "done.ckpt"
    first = small_davenport(S3, SearchOptions(checkpoint=path))
    assert path.read_text().splitlines()[1] == ""
    again = small_davenport(S3, SearchOptions(checkpoint=path))
    assert (again.value, again.witnesses, again.nodes, again.exhaustive) == \
        (first.value, first.witnesses, first.nodes, True)


def test_checkpoint_header_mismatch(tmp_path):
    path = tmp_path / "x.ckpt"
    small_davenport(S3, SearchOptions(checkpoint=path))
    with pytest.raises(VersionMismatch):
        small_davenport(make_metacyclic((2, 5, 4)), SearchOptions(checkpoint=path))
    with pytest.raises(VersionMismatch):
        large_davenport(S3, SearchOptions(checkpoint=path, max_length=3))


def test_checkpoint_corrupt(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_text("hello\n")
    with pytest.raises(CorruptCheckpoint):
        small_davenport(S3, SearchOptions(checkpoint=path))
    small_davenport(S3, SearchOptions(checkpoint=tmp_path / "ok.ckpt"))
    lines = (tmp_path / "ok.ckpt").read_text().splitlines()
    lines[1] = "5 1"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorruptCheckpoint):
        small_davenport(S3, SearchOptions(checkpoint=path))
