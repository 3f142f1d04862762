from fractions import Fraction
from math import gcd

from hypothesis import given, strategies as st
import pytest

from minwci.wps import (CyclicQuotient, RejectNonSmallAction, SingClass, classify_quotient,
                        crepant_multipliers, is_three_fold_terminal_form,
                        is_well_formed_space, normalize_quotient, reid_tai_sum,
                        remove_reflections, singular_strata, units)
import oracles

CLASS_NAMES = {SingClass.SMOOTH: "smooth", SingClass.TERMINAL: "terminal",
               SingClass.CANONICAL: "canonical", SingClass.NON_CANONICAL: "non-canonical"}


def small_types(max_r):
    for r in range(2, max_r + 1):
        for a in range(1, r):
            for b in range(a, r):
                for c in range(b, r):
                    q = CyclicQuotient(r, (a, b, c))
                    if q.is_small:
                        yield q


def test_well_formed_space():
    assert is_well_formed_space((1, 1, 2, 3))
    assert not is_well_formed_space((2, 2, 4, 3))
    assert is_well_formed_space((1, 6, 10, 15))
    assert not is_well_formed_space((2, 4, 6, 3))


def test_singular_strata():
    assert singular_strata((1, 2, 4), 1) == [((1,), 2), ((2,), 4), ((1, 2), 2)]
    with pytest.raises(ValueError):
        singular_strata((1, 2), 3)


def test_parse_and_str():
    q = CyclicQuotient.parse("1/13(3,4,5)")
    assert q.r == 13 and q.residues == (3, 4, 5)
    assert str(q) == "1/13(3,4,5)"
    with pytest.raises(ValueError):
        CyclicQuotient.parse("13(3,4,5)")


def test_normalize_examples():
    # equal types in different presentations
    assert normalize_quotient(CyclicQuotient(11, (2, 3, 10))) == normalize_quotient(CyclicQuotient(11, (5, 2, 3)))
    assert normalize_quotient(CyclicQuotient(4, (3, 3, 1))) == CyclicQuotient(4, (1, 1, 3))
    with pytest.raises(RejectNonSmallAction):
        normalize_quotient(CyclicQuotient(4, (2, 2, 1)))


def test_remove_reflections():
    assert remove_reflections(CyclicQuotient(6, (2, 4, 1))) == CyclicQuotient(3, (1, 2, 1))
    assert remove_reflections(CyclicQuotient(4, (2, 2, 2))) == CyclicQuotient(2, (1, 1, 1))


def test_classify_examples():
    assert classify_quotient(CyclicQuotient(2, (1, 1, 1))) == SingClass.TERMINAL
    assert classify_quotient(CyclicQuotient(3, (1, 1, 1))) == SingClass.CANONICAL
    assert classify_quotient(CyclicQuotient(13, (3, 4, 5))) == SingClass.NON_CANONICAL
    assert classify_quotient(CyclicQuotient(1, (0, 0, 0))) == SingClass.SMOOTH
    assert reid_tai_sum(CyclicQuotient(13, (3, 4, 5)), 1) == Fraction(12, 13)


def test_reid_tai_matches_oracle_exhaustive():
    n = 0
    for q in small_types(50):
        assert CLASS_NAMES[classify_quotient(q)] == oracles.reid_tai_class(q.r, q.residues), q
        n += 1
    assert n > 100000


@given(st.integers(2, 40).flatmap(lambda r: st.tuples(st.just(r), st.lists(st.integers(0, r - 1), min_size=3, max_size=3))))
def test_crepant_multipliers_have_age_one(data):
    r, res = data
    q = CyclicQuotient(r, tuple(res))
    for k in crepant_multipliers(q):
        assert reid_tai_sum(q, k) == 1


def test_terminal_form_inversion_all():
    for r in range(2, 51):
        for a in range(1, r):
            if gcd(a, r) != 1:
                continue
            q = CyclicQuotient(r, (1, r - 1, a))
            assert is_three_fold_terminal_form(q) == (min(a, r - a), r)


def test_terminal_form_rejects_non_terminal():
    assert is_three_fold_terminal_form(CyclicQuotient(3, (1, 1, 1))) is None
    with pytest.raises(ValueError):
        is_three_fold_terminal_form(CyclicQuotient(3, (1, 2)))


@given(st.integers(2, 40).flatmap(lambda r: st.tuples(st.just(r), st.lists(st.integers(1, r - 1), min_size=3, max_size=3))))
def test_normalize_idempotent_and_invariant(data):
    r, res = data
    q = CyclicQuotient(r, tuple(res))
    if not q.is_small:
        return
    n = normalize_quotient(q)
    assert normalize_quotient(n) == n
    for m in units(r):
        assert normalize_quotient(q.times(m)) == n
    assert normalize_quotient(CyclicQuotient(r, tuple(reversed(res)))) == n
    assert classify_quotient(n) == classify_quotient(q)
