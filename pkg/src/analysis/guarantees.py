# src/analysis/guarantees.py
"""Recovery conditions for nested periodic dictionaries and noise thresholds.

Each condition returns a BoundVerdict. `valid` tracks the Neumann-series /
denominator preconditions of the derivation; an invalid bound still reports
its lhs but never `holds`.
"""
import math
from typing import Iterable, Optional, Union

from loguru import logger

from src.analysis.coherence import (
    analyzer_for,
    cnpa,
    cnpi,
    cumulative_coherence,
    npa,
    npi,
    restricted_inter,
    restricted_intra,
)
from src.analysis.support import period_set
from src.exceptions import ConditionNotMet, SOutOfRange
from src.models.dictionary import NpdDictionary
from src.models.period_set import PeriodSet
from src.models.verdict import BoundVerdict

PeriodsLike = Union[PeriodSet, Iterable[int]]


def _as_period_set(T: PeriodsLike) -> PeriodSet:
    return T if isinstance(T, PeriodSet) else period_set(T)


def _check_eps(eps: float, name: str = "eps") -> None:
    if eps < 0:
        raise ValueError(f"{name} must be nonnegative, got {eps}")


def classic_coherence_condition(mu: float, k: int) -> BoundVerdict:
    """k < (1/mu + 1)/2, evaluated as mu*(2k - 1) < 1."""
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    lhs = mu * (2 * k - 1)
    k_bound = math.inf if mu == 0 else 0.5 * (1.0 / mu + 1.0)
    return BoundVerdict(
        name="classic-mu",
        lhs=lhs,
        holds=k < k_bound,
        valid=True,
        detail={"k": k, "k_bound": k_bound},
    )


def classic_cumulative_condition(K: NpdDictionary, k: int) -> BoundVerdict:
    """mu_1(k) + mu_1(k-1) < 1, with mu_1(0) = 0."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    current, previous = cumulative_coherence(K, k), cumulative_coherence(K, k - 1)
    lhs = current + previous
    return BoundVerdict(
        name="classic-mu1",
        lhs=lhs,
        holds=lhs < 1,
        valid=True,
        detail={"k": k, "mu1_k": current, "mu1_k_minus_1": previous},
    )


def theorem1_condition(K: NpdDictionary, k: int, m: int) -> BoundVerdict:
    """zeta_{k,m} + nu_{k,m} < 1; valid while nu_{k,m} < 1."""
    zeta, nu = npi(K, k, m), npa(K, k, m)
    lhs = zeta + nu
    valid = nu < 1
    return BoundVerdict(
        name="thm1",
        lhs=lhs,
        holds=valid and lhs < 1,
        valid=valid,
        detail={"k": k, "m": m, "zeta": zeta, "nu": nu},
    )


def _restricted_terms(K: NpdDictionary, T: PeriodSet) -> tuple[list[float], list[float]]:
    zetas = [restricted_inter(K, p) for p in T.periods]
    nus = [restricted_intra(K, p) for p in T.periods]
    return zetas, nus


def _restricted_denominator_slack(zetas: list[float], nus: list[float]) -> float:
    """1 - max_j (nu_j + sum_{i != j} zeta_i)."""
    total = sum(zetas)
    return 1.0 - max(nu + total - zeta for zeta, nu in zip(zetas, nus))


def theorem2_condition(K: NpdDictionary, T: PeriodsLike) -> BoundVerdict:
    """2*sum(zeta_pj) + max(nu_pj) - min(zeta_pj) < 1 over the periods of T."""
    T = _as_period_set(T)
    zetas, nus = _restricted_terms(K, T)
    lhs = 2 * sum(zetas) + max(nus) - min(zetas)
    valid = _restricted_denominator_slack(zetas, nus) > 0
    return BoundVerdict(
        name="thm2",
        lhs=lhs,
        holds=valid and lhs < 1,
        valid=valid,
        detail={
            "T": T.label(),
            "zeta_p": ",".join(f"{z:.6g}" for z in zetas),
            "nu_p": ",".join(f"{n:.6g}" for n in nus),
        },
    )


def corollary1_condition(K: NpdDictionary, k: int, m: int) -> BoundVerdict:
    """Theorem 2's lhs maximized over Q_k(m); valid only if every member is."""
    best, valid = None, True
    for T in analyzer_for(K).family(k, m):
        verdict = theorem2_condition(K, T)
        valid = valid and verdict.valid
        if best is None or verdict.lhs > best.lhs:
            best = verdict
    return BoundVerdict(
        name="cor1",
        lhs=best.lhs,
        holds=valid and best.lhs < 1,
        valid=valid,
        detail={"k": k, "m": m, "T": best.detail["T"]},
    )


def refined_condition(K: NpdDictionary, k: int, m: int, s: int) -> BoundVerdict:
    """zeta_{k,m}(s) + nu_{k,m}(s-1) < 1, with nu(0) = 0."""
    if not 1 <= s <= k:
        raise SOutOfRange(f"Sparsity level s must satisfy 1 <= s <= k={k}, got {s}")
    inter = cnpi(K, k, m, s)
    intra = cnpa(K, k, m, s - 1) if s > 1 else 0.0
    lhs = inter + intra
    valid = intra < 1
    return BoundVerdict(
        name="refined",
        lhs=lhs,
        holds=valid and lhs < 1,
        valid=valid,
        detail={"k": k, "m": m, "s": s, "cnpi": inter, "cnpa": intra},
    )


def npi_erc_bound(K: NpdDictionary, k: int, m: int) -> Optional[float]:
    """zeta_{k,m} / (1 - nu_{k,m}), the upper bound on M_k(m); None when nu >= 1."""
    zeta, nu = npi(K, k, m), npa(K, k, m)
    if nu >= 1:
        return None
    return zeta / (1.0 - nu)


def restricted_erc_bound(K: NpdDictionary, T: PeriodsLike) -> Optional[float]:
    """sum(zeta_pj) / (1 - max_j(nu_pj + sum_{i!=j} zeta_pi)); None when the slack is <= 0."""
    T = _as_period_set(T)
    zetas, nus = _restricted_terms(K, T)
    slack = _restricted_denominator_slack(zetas, nus)
    if slack <= 0:
        return None
    return sum(zetas) / slack


def bounded_noise_threshold_npi(K: NpdDictionary, k: int, m: int, eps: float) -> float:
    """2 eps / ((1 - zeta - nu)(1 - nu)), the coefficient floor under ||w|| <= eps.

    Raises:
        ConditionNotMet: If theorem1_condition does not hold
    """
    _check_eps(eps)
    verdict = theorem1_condition(K, k, m)
    if not verdict.holds:
        raise ConditionNotMet(
            f"thm1 does not hold at k={k}, m={m} (lhs={verdict.lhs:.6g}, valid={verdict.valid})"
        )
    zeta, nu = verdict.detail["zeta"], verdict.detail["nu"]
    return 2.0 * eps / ((1.0 - zeta - nu) * (1.0 - nu))


def bounded_noise_threshold_restricted(K: NpdDictionary, T: PeriodsLike, eps: float) -> float:
    """2 eps / ((1 - 2 sum zeta - nu_hat + zeta_check)(1 - sum zeta - nu_hat + zeta_check)).

    Raises:
        ConditionNotMet: If theorem2_condition does not hold for T
    """
    _check_eps(eps)
    T = _as_period_set(T)
    verdict = theorem2_condition(K, T)
    if not verdict.holds:
        raise ConditionNotMet(
            f"thm2 does not hold for T={T.label()} (lhs={verdict.lhs:.6g}, valid={verdict.valid})"
        )
    zetas, nus = _restricted_terms(K, T)
    total, nu_hat, zeta_check = sum(zetas), max(nus), min(zetas)
    first = 1.0 - 2.0 * total - nu_hat + zeta_check
    second = 1.0 - total - nu_hat + zeta_check
    return 2.0 * eps / (first * second)


def gaussian_radius(sigma: float, L: int) -> float:
    """sigma * sqrt(L + 2 sqrt(L ln L)): ||w|| stays below this with probability >= 1 - 1/L."""
    _check_eps(sigma, "sigma")
    if L < 2:
        raise ValueError(f"gaussian_radius requires L >= 2, got {L}")
    return sigma * math.sqrt(L + 2.0 * math.sqrt(L * math.log(L)))


def gaussian_threshold_restricted(
    K: NpdDictionary,
    T: PeriodsLike,
    sigma: float,
    L: Optional[int] = None,
    alpha: float = 1.0,
) -> float:
    """alpha times the restricted threshold with eps = gaussian_radius(sigma, L)."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    radius = gaussian_radius(sigma, K.L if L is None else L)
    return alpha * bounded_noise_threshold_restricted(K, T, radius)


def gaussian_threshold_npi(
    K: NpdDictionary,
    k: int,
    m: int,
    sigma: float,
    L: Optional[int] = None,
) -> float:
    """The zeta/nu threshold with eps = gaussian_radius(sigma, L).

    Obtained by substitution into the bounded-noise form; no separate
    probability statement backs it.
    """
    radius = gaussian_radius(sigma, K.L if L is None else L)
    logger.debug(f"Gaussian zeta/nu threshold uses radius {radius:.6g} (extrapolated)")
    return bounded_noise_threshold_npi(K, k, m, radius)


def evaluate_condition(
    K: Optional[NpdDictionary],
    condition: str,
    k: Optional[int] = None,
    m: Optional[int] = None,
    s: Optional[int] = None,
    periods: Optional[Iterable[int]] = None,
    mu: Optional[float] = None,
) -> BoundVerdict:
    """Dispatches a condition name (as used on the command line) to its evaluator."""
    def need(value, flag):
        if value is None:
            raise ValueError(f"Condition '{condition}' requires --{flag}")
        return value

    if condition == "classic-mu":
        if mu is None:
            mu = analyzer_for(need(K, "dict")).mutual_coherence()
        return classic_coherence_condition(mu, need(k, "k"))
    if condition == "classic-mu1":
        return classic_cumulative_condition(K, need(k, "k"))
    if condition == "thm1":
        return theorem1_condition(K, need(k, "k"), need(m, "m"))
    if condition == "thm2":
        return theorem2_condition(K, need(periods, "periods"))
    if condition == "cor1":
        return corollary1_condition(K, need(k, "k"), need(m, "m"))
    if condition == "refined":
        return refined_condition(K, need(k, "k"), need(m, "m"), need(s, "s"))
    raise ValueError(f"Unknown condition: {condition}")
