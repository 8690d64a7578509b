import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohsplit.periodic import PeriodicSet, complement, intersect, is_cofinite, is_infinite, member, union

from conftest import horizon, periodic_sets, raw_member, raw_periodic


def test_member_examples(evens):
    assert member(evens, 7) is False
    assert not any(PeriodicSet.empty().member(n) for n in range(50))
    s = PeriodicSet(threshold=4, modulus=3, residues=[1], prefix=[0])
    expected = [raw_member(4, 3, {1}, {0}, n) for n in range(11)]
    assert [member(s, n) for n in range(11)] == expected
    assert member(s, 0) and not member(s, 3) and member(s, 7)


def test_boolean_examples(evens, odds):
    assert intersect(evens, odds) == PeriodicSet.empty()
    c = complement(PeriodicSet.finite([0, 1, 2]))
    assert c.is_cofinite()
    assert [n for n in range(20) if not c.member(n)] == [0, 1, 2]


def test_crt_intersection():
    got = intersect(PeriodicSet.residue_class(1, 2), PeriodicSet.residue_class(2, 3))
    brute = [n for n in range(61) if n % 2 == 1 and n % 3 == 2]
    assert got.elements_below(61) == brute
    assert got == PeriodicSet.residue_class(5, 6)


def test_infinite_and_cofinite(evens):
    assert is_infinite(evens)
    assert not is_infinite(PeriodicSet(5, 1, [], [0, 3]))
    s = PeriodicSet(threshold=1, modulus=5, residues=[1, 2, 3, 4], prefix=[0])
    brute = [raw_member(1, 5, {1, 2, 3, 4}, {0}, n) for n in range(51)]
    # misses every positive multiple of 5: not cofinite, but infinite
    assert brute.count(False) == 10
    assert not is_cofinite(s) and is_infinite(s)


def test_canonical_form_is_minimal():
    s = PeriodicSet(threshold=6, modulus=4, residues=[0, 2], prefix=[0, 2, 4])
    assert (s.threshold, s.modulus, s.residues, s.prefix) == (0, 2, (0,), ())
    assert PeriodicSet(3, 6, range(6), [0, 1, 2]) == PeriodicSet.naturals()


def test_constructor_rejects_bad_fields():
    with pytest.raises(ValueError):
        PeriodicSet(0, 0)
    with pytest.raises(ValueError):
        PeriodicSet(2, 3, [3])
    with pytest.raises(ValueError):
        PeriodicSet(2, 3, [], [2])


@given(raw_periodic())
def test_canonicalization_preserves_membership(raw):
    s = PeriodicSet(*raw)
    for n in range(raw[0] + 3 * raw[1] + 5):
        assert s.member(n) == raw_member(*raw, n)


@given(raw_periodic())
def test_canonicalization_idempotent(raw):
    s = PeriodicSet(*raw)
    again = PeriodicSet(s.threshold, s.modulus, s.residues, s.prefix)
    assert again == s
    assert (again.threshold, again.modulus, again.residues, again.prefix) == \
        (s.threshold, s.modulus, s.residues, s.prefix)


@given(raw_periodic(), raw_periodic())
def test_equality_iff_same_set(r1, r2):
    s, t = PeriodicSet(*r1), PeriodicSet(*r2)
    window = range(horizon(s, t))
    same = all(raw_member(*r1, n) == raw_member(*r2, n) for n in window)
    assert (s == t) == same


@given(periodic_sets(), periodic_sets(), periodic_sets())
@settings(max_examples=200)
def test_boolean_algebra_laws(s, t, u):
    assert (s & t) & u == s & (t & u)
    assert (s | t) | u == s | (t | u)
    assert ~(s & t) == ~s | ~t
    assert ~(s | t) == ~s & ~t
    assert ~~s == s
    assert s & (t | u) == (s & t) | (s & u)
    window = range(horizon(s, t))
    assert [n in s & t for n in window] == [(n in s) and (n in t) for n in window]
    assert [n in s | t for n in window] == [(n in s) or (n in t) for n in window]


@given(periodic_sets())
def test_infinitude_matches_counting(s):
    bound = 10 * s.modulus + s.threshold
    low = len(s.elements_below(bound))
    high = len(s.elements_below(2 * bound))
    # eventually periodic: the count grows iff some residue is in the tail
    assert s.is_infinite() == (high > low)
    assert s.is_cofinite() == (len((~s).elements_below(2 * bound)) ==
                               len((~s).elements_below(bound)))


@given(periodic_sets())
def test_json_round_trip_bit_exact(s):
    text = json.dumps(s.to_json(), sort_keys=True)
    back = PeriodicSet.from_json(json.loads(text))
    assert back == s
    assert json.dumps(back.to_json(), sort_keys=True) == text


def test_union_and_module_functions(evens, odds):
    assert union(evens, odds) == PeriodicSet.naturals()
    assert hash(PeriodicSet(0, 4, [0, 2])) == hash(evens)
