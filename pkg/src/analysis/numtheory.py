# src/analysis/numtheory.py
"""Integer primitives used to build nested periodic dictionaries."""
import math
from functools import lru_cache
from typing import Iterable

import numpy as np
import sympy


def gcd(a: int, b: int) -> int:
    """Greatest common divisor of two positive integers."""
    return math.gcd(a, b)


@lru_cache(maxsize=None)
def totient(p: int) -> int:
    """Euler's totient phi(p), with phi(1) = 1."""
    if p < 1:
        raise ValueError(f"totient requires p >= 1, got {p}")
    return int(sympy.totient(p))


@lru_cache(maxsize=None)
def _divisors(p: int) -> tuple[int, ...]:
    return tuple(int(d) for d in sympy.divisors(p))


def divisors(p: int) -> list[int]:
    """All divisors of p in increasing order, 1 and p included."""
    if p < 1:
        raise ValueError(f"divisors requires p >= 1, got {p}")
    return list(_divisors(p))


@lru_cache(maxsize=None)
def coprime_residues(q: int) -> tuple[int, ...]:
    """The phi(q) values k in 1..q with gcd(k, q) = 1, ascending."""
    return tuple(k for k in range(1, q + 1) if math.gcd(k, q) == 1)


def ramanujan_sum_unrounded(q: int, n: int) -> float:
    """Trigonometric sum of cos(2*pi*k*n/q) over k coprime to q, before rounding."""
    if q < 1:
        raise ValueError(f"ramanujan_sum requires q >= 1, got {q}")
    ks = np.asarray(coprime_residues(q), dtype=np.int64)
    # k*n reduced mod q keeps the angle small for large n
    angles = 2.0 * np.pi * ((ks * n) % q) / q
    return float(np.cos(angles).sum())


def ramanujan_sum(q: int, n: int) -> int:
    """Ramanujan sum c_q(n); periodic in n with period q and c_q(0) = phi(q)."""
    return int(round(ramanujan_sum_unrounded(q, n)))


@lru_cache(maxsize=None)
def _ramanujan_cycle(q: int) -> tuple[int, ...]:
    return tuple(ramanujan_sum(q, n) for n in range(q))


def ramanujan_cycle(q: int) -> np.ndarray:
    """One full cycle c_q(0), ..., c_q(q-1) as an integer vector."""
    return np.array(_ramanujan_cycle(q), dtype=np.int64)


def lcm_of_set(ps: Iterable[int]) -> int:
    """Least common multiple of a nonempty set of positive integers."""
    values = list(ps)
    if not values:
        raise ValueError("lcm_of_set requires a nonempty set")
    return math.lcm(*values)


@lru_cache(maxsize=None)
def totient_prefix_sum(p: int) -> int:
    """Sum of phi(j) for j = 1..p (0 for p = 0)."""
    return sum(totient(j) for j in range(1, p + 1))
