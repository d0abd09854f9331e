# src/analysis/support.py
"""Index-set combinatorics: I_p, S_p, S_T, D_T and the family Q_k(m).

All indices are 1-based, matching the column numbering of the dictionary.
"""
from functools import lru_cache
from typing import Iterable

from loguru import logger

from src.analysis.numtheory import divisors, totient, totient_prefix_sum
from src.exceptions import DivisibilityViolation
from src.models.period_set import PeriodSet


def index_set(p: int) -> list[int]:
    """I_p: the phi(p) consecutive column indices of the C_p block."""
    if p < 1:
        raise ValueError(f"index_set requires p >= 1, got {p}")
    start = totient_prefix_sum(p - 1) + 1
    return list(range(start, start + totient(p)))


def _closure(periods: Iterable[int]) -> tuple[int, ...]:
    closure = set()
    for p in periods:
        closure.update(divisors(p))
    return tuple(sorted(closure))


def _support_of_closure(closure: Iterable[int]) -> tuple[int, ...]:
    support = []
    for q in closure:
        support.extend(index_set(q))
    return tuple(sorted(support))


def single_period_support(p: int) -> list[int]:
    """S_p: union of I_q over the divisors q of p; always has p elements."""
    return list(_support_of_closure(divisors(p)))


def _check_non_divisible(periods: tuple[int, ...]) -> None:
    for i, a in enumerate(periods):
        for b in periods[i + 1 :]:
            if b % a == 0:
                raise DivisibilityViolation(
                    f"Period {a} divides period {b}; hidden periods must be pairwise non-divisible"
                )


@lru_cache(maxsize=65536)
def _period_set(periods: tuple[int, ...]) -> PeriodSet:
    closure = _closure(periods)
    return PeriodSet(
        periods=periods,
        divisor_closure=closure,
        support=_support_of_closure(closure),
    )


def period_set(T: Iterable[int]) -> PeriodSet:
    """Builds the PeriodSet for hidden periods T.

    Raises:
        ValueError: If T is empty or holds a non-positive period
        DivisibilityViolation: If some period divides another
    """
    periods = tuple(sorted(set(int(p) for p in T)))
    if not periods:
        raise ValueError("A period set needs at least one period")
    if periods[0] < 1:
        raise ValueError(f"Periods must be positive, got {periods}")

    _check_non_divisible(periods)
    return _period_set(periods)


def enumerate_Qkm(p_max: int, m: int, k: int) -> list[PeriodSet]:
    """Every T in Q_k(m) with elements in 1..p_max, in lexicographic order.

    |S_T| only grows as periods are added and |S_p| = p, so the search is
    pruned to candidates p <= k and abandoned once a partial support exceeds k.
    """
    if p_max < 1 or m < 1 or k < 1:
        raise ValueError(f"enumerate_Qkm requires positive arguments, got {p_max}, {m}, {k}")

    upper = min(p_max, k)
    found: list[PeriodSet] = []

    def extend(chosen: tuple[int, ...], closure: frozenset[int], start: int) -> None:
        if len(chosen) == m:
            found.append(_period_set(chosen))
            return
        for p in range(start, upper + 1):
            if any(p % c == 0 for c in chosen):
                continue
            new_closure = closure | set(divisors(p))
            if sum(totient(q) for q in new_closure) > k:
                continue
            extend(chosen + (p,), frozenset(new_closure), p + 1)

    extend((), frozenset(), 1)
    logger.debug(f"Q_{k}({m}) with p_max={p_max}: {len(found)} period sets")
    return found
