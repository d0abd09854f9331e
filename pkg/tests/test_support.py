# tests/test_support.py
import itertools
import math

import pytest

from src.analysis.support import enumerate_Qkm, index_set, period_set, single_period_support
from src.exceptions import DivisibilityViolation
from tests.oracles import brute_force_family, support_by_labels


@pytest.mark.parametrize("p, expected", [(5, [7, 8, 9, 10]), (1, [1]), (6, [11, 12])])
def test_index_set(p, expected):
    assert index_set(p) == expected


@pytest.mark.parametrize(
    "p, expected",
    [(4, [1, 2, 5, 6]), (1, [1]), (6, [1, 2, 3, 4, 11, 12])],
)
def test_single_period_support(p, expected):
    assert single_period_support(p) == expected


def test_single_period_support_has_p_atoms():
    for p in range(1, 80):
        assert len(single_period_support(p)) == p


def test_example_supports():
    T1 = period_set([5, 3])
    assert T1.periods == (3, 5)
    assert T1.divisor_closure == (1, 3, 5)
    assert T1.support == (1, 3, 4, 7, 8, 9, 10)

    T2 = period_set([3, 4])
    assert T2.divisor_closure == (1, 2, 3, 4)
    assert T2.support == (1, 2, 3, 4, 5, 6)
    assert T2.sparsity == 6 and T2.m == 2
    assert T2.label() == "3,4"
    assert str(T1) == "{3,5}|D={1,3,5}|S={1,3,4,7,8,9,10}"


def test_divisible_periods_are_rejected():
    with pytest.raises(DivisibilityViolation):
        period_set([2, 4])


@pytest.mark.parametrize("T", [[], [0, 3]])
def test_invalid_period_sets(T):
    with pytest.raises(ValueError):
        period_set(T)


def test_support_matches_period_labels(rpt20):
    for T in ([4], [3, 5], [7, 12, 20], [6, 9, 10]):
        assert list(period_set(T).support) == support_by_labels(rpt20, T)


def test_q_singletons():
    family = enumerate_Qkm(100, 1, 10)
    assert [T.periods for T in family] == [(p,) for p in range(1, 11)]


def test_q_pairs_up_to_five():
    assert [T.periods for T in enumerate_Qkm(5, 2, 100)] == [(2, 3), (2, 5), (3, 4), (3, 5), (4, 5)]
    assert [T.periods for T in enumerate_Qkm(5, 2, 5)] == [(2, 3)]


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("k", [4, 9, 15])
def test_enumeration_matches_brute_force(rpt20, m, k):
    expected = brute_force_family(rpt20, k, m)
    assert [T.periods for T in enumerate_Qkm(20, m, k)] == expected


def test_empty_family():
    assert enumerate_Qkm(20, 2, 3) == []


@pytest.mark.parametrize("p_max", range(1, 21))
def test_singleton_family_size(p_max):
    for k in range(1, 26):
        assert len(enumerate_Qkm(p_max, 1, k)) == min(p_max, k)


@pytest.mark.parametrize("m, upper", [(2, 30), (3, 20)])
def test_coprime_support_size(m, upper):
    # pairwise coprime periods only share the divisor 1
    for T in itertools.combinations(range(2, upper + 1), m):
        if any(math.gcd(a, b) != 1 for a, b in itertools.combinations(T, 2)):
            continue
        assert len(period_set(T).support) == sum(T) - (m - 1)
