import pytest

from davlab import oracles
from davlab.errors import HypothesisViolated, NotStarGroup, WrongLength
from davlab.groups import Element, MetacyclicParams, cyclic, make_metacyclic
from davlab.oracles import (FormMatch, bound_checks, form_sequences, longest_part_check, cyclic_extremal_check,
                            structure_check, conjugate_orbit_check, quotient_minimal_check, coset_translate_check,
                            normal_part_check, match_form, star_triples, subgroup_of_n,
                            sweep_record, verify_conjecture_sweep, verify_inverse_forms)
from davlab.search import SearchOptions
from davlab.sequences import Sequence, parse_sequence

S3 = make_metacyclic((2, 3, 2))
G372 = make_metacyclic((3, 7, 2))


def test_predicted_d():
    assert [oracles.predicted_d(m, n) for m, n in [(2, 3), (3, 7), (4, 5)]] == [3, 8, 7]


def test_match_form_examples():
    s = parse_sequence(G372, "x*y x*y^3 y[^6]")
    assert match_form(G372, s) == FormMatch("A", 1, (1, 3), 1)
    assert match_form(S3, parse_sequence(S3, "x x*y x*y^2")).variant == "B"
    assert match_form(G372, parse_sequence(G372, "x[^2] y[^5] y^2")) is None
    assert match_form(G372, parse_sequence(G372, "x x^2 y[^6]")) is None
    with pytest.raises(WrongLength):
        match_form(G372, parse_sequence(G372, "x y"))
    with pytest.raises(NotStarGroup):
        match_form(make_metacyclic((4, 15, 2)), parse_sequence(S3, "x"))


def test_every_form_sequence_matches():
    for params in [(2, 3, 2), (2, 5, 4), (3, 7, 4), (4, 5, 3)]:
        g = make_metacyclic(params)
        for s in form_sequences(g):
            assert match_form(g, s) is not None


@pytest.mark.parametrize("params,count", [((2, 3, 2), 7), ((2, 5, 4), 20), ((3, 7, 2), 336),
                                          ((4, 5, 2), 2 * 35 * 4)])
def test_inverse_classification(params, count):
    check = verify_inverse_forms(make_metacyclic(params))
    assert check.ok and check.found == check.predicted == count
    assert not check.missing and not check.extra


def test_bound_checks():
    assert bound_checks(S3, 3, 6)
    assert not bound_checks(S3, 3, 3)
    assert not bound_checks(S3, 3, 7)
    assert bound_checks(G372, 8)
    assert not bound_checks(G372, 9)
    assert bound_checks(cyclic(7), 6, 7)


def test_structure_examples():
    assert structure_check((3, 7, 2))
    for params in star_triples(60):
        assert structure_check(params), params
    v = structure_check((4, 15, 2))
    assert v.vacuous
    with pytest.raises(HypothesisViolated):
        structure_check((4, 15, 2), strict=True)


def test_structure_sampled_elements():
    params = MetacyclicParams(4, 5, 2)
    assert structure_check(params, [Element(1, 3), Element(2, 4), Element(3, 0)])


def test_conjugate_orbit_all_subgroups():
    for params in [(2, 3, 2), (3, 7, 2), (2, 9, 8), (4, 5, 3)]:
        g = make_metacyclic(params)
        n = g.params.n
        for d in (d for d in range(1, n + 1) if n % d == 0):
            M = subgroup_of_n(g, d)
            for b in range(n):
                v = conjugate_orbit_check(g, M, Element(0, b))
                assert v.ok and not v.vacuous


def test_quotient_and_coset_examples():
    v = quotient_minimal_check(G372, parse_sequence(G372, "x x*y^2 x*y^5"))
    assert v.ok and not v.vacuous
    T = parse_sequence(S3, "x x*y")
    v = coset_translate_check(S3, T, Element(0, 1))
    assert v.ok and not v.vacuous
    v = coset_translate_check(S3, T, Element(1, 0))
    assert v.vacuous


def test_normal_part_example():
    v = normal_part_check(S3, parse_sequence(S3, "x x*y"))
    assert v.ok and not v.vacuous
    assert normal_part_check(S3, parse_sequence(S3, "x")).vacuous


def test_cyclic_extremal_examples():
    c5 = cyclic(5)
    v = cyclic_extremal_check(c5, Sequence.from_counts({2: 4}))
    assert v.ok and not v.vacuous
    assert cyclic_extremal_check(c5, Sequence.from_counts({1: 3, 2: 1})).vacuous
    with pytest.raises(HypothesisViolated):
        cyclic_extremal_check(c5, Sequence.from_counts({1: 2}), strict=True)


def test_longest_part_instance():
    # forced shape: S * T^-1 is free of length n-1, so here T = 1 and the rest is g^[4]
    c5 = cyclic(5)
    S = Sequence.of([0, 1, 1, 1, 1])
    v = longest_part_check(c5, S, Sequence.of([0]))
    assert v.ok and not v.vacuous
    S = Sequence.of([1] * 9)
    v = longest_part_check(c5, S, Sequence.of([1] * 5))
    assert v.ok and not v.vacuous
    assert longest_part_check(c5, Sequence.of([1, 1, 1, 1, 2, 3]), Sequence.of([1, 1, 3])).vacuous
    with pytest.raises(HypothesisViolated):
        longest_part_check(c5, S, Sequence.of([1]), strict=True)


def test_star_triples_small():
    assert [tuple(p) for p in star_triples(21)] == [
        (2, 3, 2), (2, 5, 4), (2, 7, 6), (2, 9, 8), (3, 7, 2), (3, 7, 4), (4, 5, 2), (4, 5, 3)]


def test_sweep_includes_expected_entries():
    report = verify_conjecture_sweep(21, large_max_order=6)
    by_key = {(r["m"], r["n"], r["s"]): r for r in report}
    assert by_key[(2, 3, 2)]["d_computed"] == 3 and by_key[(2, 3, 2)]["D_computed"] == 6
    assert by_key[(2, 5, 4)]["d_computed"] == 5
    assert by_key[(3, 7, 2)]["d_computed"] == by_key[(3, 7, 4)]["d_computed"] == 8
    assert all(r["match"] and r["inverse_ok"] and r["bounds_ok"] for r in report)


def test_sweep_record_reports_cap():
    rec = sweep_record(MetacyclicParams(3, 7, 2), SearchOptions(node_cap=10),
                       inverse=False, large=False)
    assert rec["exhaustive"] is False and rec["match"] is None
