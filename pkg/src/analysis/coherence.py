# src/analysis/coherence.py
"""Coherence measures of nested periodic dictionaries and the ERC baseline M_k(m).

Every measure reads the same |<k_i, k_j>| table (`NpdDictionary.gram_magnitude`).
Per-support quantities are computed once per period set and reused across
(k, m, s) grids. Ties in max operations keep the lexicographically smallest T.
"""
from functools import cached_property, lru_cache
from typing import Iterable, Optional

import numpy as np
import scipy.linalg
from loguru import logger

from src.analysis.support import enumerate_Qkm, period_set
from src.config import SINGULAR_GRAM_CONDITION
from src.exceptions import EmptyQkm, KTooLarge, SingularGram, SOutOfRange
from src.models.coherence_report import CoherenceReport
from src.models.dictionary import NpdDictionary, to_zero_based
from src.models.period_set import PeriodSet


def _descending_prefix_sums(values: np.ndarray) -> np.ndarray:
    """Row-wise sums of the s largest entries, for s = 1..n_cols."""
    return np.cumsum(-np.sort(-values, axis=1), axis=1)


class SupportProfile:
    """Inter/intra coherence sums of one support S_T, for every sparsity level."""

    def __init__(self, gram: np.ndarray, period_set: PeriodSet):
        self.period_set = period_set
        self._gram = gram
        self._support = to_zero_based(period_set.support)

    @cached_property
    def inter_curve(self) -> np.ndarray:
        """Entry s-1: max over i outside S of the s largest |<k_i,k_j>|, j in S."""
        n = self._gram.shape[0]
        outside = np.setdiff1d(np.arange(n), self._support)
        if outside.size == 0:
            return np.zeros(self._support.size)
        block = self._gram[np.ix_(outside, self._support)]
        return _descending_prefix_sums(block).max(axis=0)

    @cached_property
    def intra_curve(self) -> np.ndarray:
        """Entry s-1: max over i in S of the s largest |<k_i,k_j>|, j in S, j != i."""
        size = self._support.size
        if size < 2:
            return np.zeros(0)
        block = self._gram[np.ix_(self._support, self._support)]
        off_diagonal = block[~np.eye(size, dtype=bool)].reshape(size, size - 1)
        return _descending_prefix_sums(off_diagonal).max(axis=0)

    def inter(self, s: Optional[int] = None) -> float:
        curve = self.inter_curve
        if s is None or s >= curve.size:
            return float(curve[-1])
        return float(curve[s - 1])

    def intra(self, s: Optional[int] = None) -> float:
        curve = self.intra_curve
        if curve.size == 0 or (s is not None and s <= 0):
            return 0.0
        if s is None or s >= curve.size:
            return float(curve[-1])
        return float(curve[s - 1])


class CoherenceAnalyzer:
    """Caches the Gram table, Q_k(m) families and support profiles of one dictionary."""

    def __init__(self, K: NpdDictionary):
        K.require_normalized("coherence measures")
        self.K = K
        self.gram = K.gram_magnitude
        self._profiles: dict[tuple[int, ...], SupportProfile] = {}
        self._erc: dict[tuple[int, ...], float] = {}

    def __repr__(self):
        return f"CoherenceAnalyzer({self.K!r}, profiles={len(self._profiles)})"

    @cached_property
    def _offdiagonal_prefix(self) -> np.ndarray:
        """Row-wise prefix sums of the sorted off-diagonal Gram magnitudes."""
        n = self.gram.shape[0]
        if n < 2:
            return np.zeros((n, 0))
        off = self.gram[~np.eye(n, dtype=bool)].reshape(n, n - 1)
        return _descending_prefix_sums(off)

    def profile(self, T: PeriodSet) -> SupportProfile:
        key = T.periods
        if key not in self._profiles:
            self._profiles[key] = SupportProfile(self.gram, T)
        return self._profiles[key]

    def family(self, k: int, m: int) -> list[PeriodSet]:
        members = _cached_family(self.K.p_max, m, k)
        if not members:
            raise EmptyQkm(f"Q_{k}({m}) is empty for p_max={self.K.p_max}")
        return members

    def maximize(self, k: int, m: int, measure) -> tuple[float, PeriodSet]:
        """Max of measure(profile) over Q_k(m) with the first maximizer kept."""
        best_value, best_T = -np.inf, None
        for T in self.family(k, m):
            value = measure(self.profile(T))
            if value > best_value:
                best_value, best_T = value, T
        return float(best_value), best_T

    def mutual_coherence(self) -> float:
        prefix = self._offdiagonal_prefix
        return float(prefix[:, 0].max()) if prefix.size else 0.0

    def cumulative_coherence(self, k: int) -> float:
        n = self.gram.shape[0]
        if k <= 0:
            return 0.0
        if k > n - 1:
            raise KTooLarge(f"Cumulative coherence needs k <= N-1 = {n - 1}, got {k}")
        return float(self._offdiagonal_prefix[:, k - 1].max())

    def erc(self, T: PeriodSet) -> float:
        if T.periods not in self._erc:
            self._erc[T.periods] = erc_value(self.K, T.support)
        return self._erc[T.periods]


@lru_cache(maxsize=4096)
def _cached_family(p_max: int, m: int, k: int) -> list[PeriodSet]:
    return enumerate_Qkm(p_max, m, k)


@lru_cache(maxsize=8)
def analyzer_for(K: NpdDictionary) -> CoherenceAnalyzer:
    """One shared analyzer per dictionary instance."""
    return CoherenceAnalyzer(K)


def _check_s(k: int, s: int) -> None:
    if not 1 <= s <= k:
        raise SOutOfRange(f"Sparsity level s must satisfy 1 <= s <= k={k}, got {s}")


def _check_p(K: NpdDictionary, p: int) -> None:
    if not 1 <= p <= K.p_max:
        raise ValueError(f"Period p must lie in 1..{K.p_max}, got {p}")


def mutual_coherence(K: NpdDictionary) -> float:
    """mu: the largest |<k_i, k_j>| over distinct columns."""
    return analyzer_for(K).mutual_coherence()


def cumulative_coherence(K: NpdDictionary, k: int) -> float:
    """mu_1(k): max over i of the k largest |<k_i, k_j>|, j != i, summed."""
    return analyzer_for(K).cumulative_coherence(k)


def npi(K: NpdDictionary, k: int, m: int) -> float:
    """zeta_{k,m}, the nested periodic inter-coherence."""
    return analyzer_for(K).maximize(k, m, lambda prof: prof.inter())[0]


def npa(K: NpdDictionary, k: int, m: int) -> float:
    """nu_{k,m}, the nested periodic intra-coherence."""
    return analyzer_for(K).maximize(k, m, lambda prof: prof.intra())[0]


def restricted_inter(K: NpdDictionary, p: int) -> float:
    """zeta_p over the single-period support S_p."""
    _check_p(K, p)
    return analyzer_for(K).profile(period_set([p])).inter()


def restricted_intra(K: NpdDictionary, p: int) -> float:
    """nu_p over the single-period support S_p."""
    _check_p(K, p)
    return analyzer_for(K).profile(period_set([p])).intra()


def cnpi(K: NpdDictionary, k: int, m: int, s: int) -> float:
    """zeta_{k,m}(s): inter-coherence summing only the s largest magnitudes."""
    _check_s(k, s)
    return analyzer_for(K).maximize(k, m, lambda prof: prof.inter(s))[0]


def cnpa(K: NpdDictionary, k: int, m: int, s: int) -> float:
    """nu_{k,m}(s): intra-coherence summing only the s largest magnitudes."""
    _check_s(k, s)
    return analyzer_for(K).maximize(k, m, lambda prof: prof.intra(s))[0]


def _gram_of(K: NpdDictionary, S: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    idx = to_zero_based(S)
    if idx.size == 0:
        raise ValueError("Support set must be nonempty")
    if idx[0] < 0 or idx[-1] >= K.N:
        raise ValueError(f"Support indices must lie in 1..{K.N}")
    sub = K.entries[:, idx]
    return idx, sub.conj().T @ sub


def checked_cholesky(gram: np.ndarray, what: str = "support"):
    """Cholesky factor of a Gram matrix, refusing numerically singular ones."""
    condition = np.linalg.cond(gram)
    if not np.isfinite(condition) or condition > SINGULAR_GRAM_CONDITION:
        raise SingularGram(
            f"Gram matrix of the {what} has condition number {condition:.3g} "
            f"> {SINGULAR_GRAM_CONDITION:.0e}"
        )
    return scipy.linalg.cho_factor(gram, lower=True)


def erc_value(K: NpdDictionary, S: Iterable[int]) -> float:
    """||K_S^+ K_{S^c}||_{1,1}: the largest l1 norm of the least-squares fit of an outside atom.

    Raises:
        SingularGram: If the Gram matrix of K_S is numerically singular
    """
    K.require_normalized("erc_value")
    idx, gram = _gram_of(K, S)
    factor = checked_cholesky(gram)

    outside = np.setdiff1d(np.arange(K.N), idx)
    if outside.size == 0:
        return 0.0

    rhs = K.entries[:, idx].conj().T @ K.entries[:, outside]
    coefficients = scipy.linalg.cho_solve(factor, rhs)
    return float(np.abs(coefficients).sum(axis=0).max())


def erc_baseline(K: NpdDictionary, k: int, m: int) -> float:
    """M_k(m): the worst ERC value over every T in Q_k(m)."""
    analyzer = analyzer_for(K)

    def measure(prof: SupportProfile) -> float:
        try:
            return analyzer.erc(prof.period_set)
        except SingularGram as e:
            raise SingularGram(f"T={prof.period_set.label()}: {e}") from e

    return analyzer.maximize(k, m, measure)[0]


def min_eig_gram(K: NpdDictionary, S: Iterable[int]) -> float:
    """Smallest eigenvalue of the Hermitian Gram matrix K_S^H K_S, clipped at 0."""
    K.require_normalized("min_eig_gram")
    _, gram = _gram_of(K, S)
    smallest = scipy.linalg.eigvalsh(gram, subset_by_index=[0, 0])[0]
    return max(float(smallest), 0.0)


def coherence_report(
    K: NpdDictionary,
    ks: Iterable[int] = (),
    ms: Iterable[int] = (),
    ss: Iterable[int] = (),
    ps: Iterable[int] = (),
    include_erc: bool = False,
) -> CoherenceReport:
    """Evaluates every measure over the requested grids.

    (k, m) pairs with an empty Q_k(m) and s > k are skipped rather than raised.
    """
    ks, ms, ss, ps = list(ks), list(ms), list(ss), list(ps)
    report = CoherenceReport(mu=mutual_coherence(K))

    for k in ks:
        if k <= K.N - 1:
            report.mu1[k] = cumulative_coherence(K, k)

    for p in ps:
        report.zeta_p[p] = restricted_inter(K, p)
        report.nu_p[p] = restricted_intra(K, p)

    for k in ks:
        for m in ms:
            try:
                report.zeta_km[(k, m)] = npi(K, k, m)
                report.nu_km[(k, m)] = npa(K, k, m)
            except EmptyQkm:
                logger.debug(f"Skipping (k={k}, m={m}): Q_k(m) is empty")
                continue
            for s in ss:
                if s <= k:
                    report.cnpi[(k, m, s)] = cnpi(K, k, m, s)
                    report.cnpa[(k, m, s)] = cnpa(K, k, m, s)
            if include_erc:
                report.erc_baseline[(k, m)] = erc_baseline(K, k, m)

    logger.debug(f"Coherence report ready: {report!r}")
    return report
