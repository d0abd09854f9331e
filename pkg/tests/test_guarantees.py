# tests/test_guarantees.py
import math

import numpy as np
import pytest

import src.analysis.guarantees as guarantees
from src.analysis.coherence import cnpi, cumulative_coherence, npa, npi, restricted_inter, restricted_intra
from src.analysis.dictionary_builder import build_npd
from src.analysis.signals import make_rng
from src.exceptions import ConditionNotMet, SOutOfRange
from src.models.dictionary import DictionaryFamily
from src.models.verdict import BoundVerdict


@pytest.mark.parametrize(
    "mu, k, holds",
    [(0.5285, 4, False), (0.0, 7, True), (0.1, 5, True)],
)
def test_classic_coherence_condition(mu, k, holds):
    verdict = guarantees.classic_coherence_condition(mu, k)
    assert verdict.holds is holds
    assert verdict.valid
    assert verdict.lhs == pytest.approx(mu * (2 * k - 1))


def test_classic_coherence_bound_value():
    verdict = guarantees.classic_coherence_condition(0.5285, 4)
    assert verdict.detail["k_bound"] == pytest.approx(1.446, abs=1e-3)


def test_classic_cumulative_condition(rpt20, orthonormal):
    verdict = guarantees.classic_cumulative_condition(rpt20, 3)
    assert verdict.lhs == pytest.approx(cumulative_coherence(rpt20, 3) + cumulative_coherence(rpt20, 2))
    assert guarantees.classic_cumulative_condition(orthonormal, 4).holds


def test_theorem1(rpt20):
    verdict = guarantees.theorem1_condition(rpt20, 4, 1)
    assert verdict.lhs == pytest.approx(npi(rpt20, 4, 1) + npa(rpt20, 4, 1))
    assert verdict.holds


def test_theorem2_holds_for_period_four(rpt20):
    assert guarantees.theorem2_condition(rpt20, [4]).holds


def test_theorem2_formula(rpt6):
    zetas = [restricted_inter(rpt6, p) for p in (3, 4)]
    nus = [restricted_intra(rpt6, p) for p in (3, 4)]
    verdict = guarantees.theorem2_condition(rpt6, [3, 4])
    assert verdict.lhs == pytest.approx(2 * sum(zetas) + max(nus) - min(zetas))
    slack = 1 - max(nus[0] + zetas[1], nus[1] + zetas[0])
    assert verdict.valid is (slack > 0)


def test_theorem2_on_orthonormal(orthonormal):
    verdict = guarantees.theorem2_condition(orthonormal, [3, 4])
    assert verdict.lhs == 0.0
    assert verdict.holds


def test_corollary1_with_single_member():
    K = build_npd(DictionaryFamily.RPT, 5, 10)
    corollary = guarantees.corollary1_condition(K, 5, 2)
    single = guarantees.theorem2_condition(K, [2, 3])
    assert corollary.lhs == pytest.approx(single.lhs)
    assert corollary.detail["T"] == "2,3"


def test_refined_condition(rpt20):
    first = guarantees.refined_condition(rpt20, 8, 2, 1)
    assert first.lhs == pytest.approx(cnpi(rpt20, 8, 2, 1))
    assert first.holds

    with pytest.raises(SOutOfRange):
        guarantees.refined_condition(rpt20, 8, 2, 9)


def test_verdict_cannot_hold_while_invalid():
    with pytest.raises(ValueError):
        BoundVerdict(name="x", lhs=0.5, holds=True, valid=False)
    assert BoundVerdict("x", 0.5, False, True, {"a": 1, "b": 2}).describe_detail() == "a=1;b=2"


def test_noise_thresholds(rpt20):
    assert guarantees.bounded_noise_threshold_restricted(rpt20, [4], 0.5) == pytest.approx(1.21, abs=0.01)
    assert guarantees.bounded_noise_threshold_npi(rpt20, 4, 1, 0.5) == pytest.approx(6.72, abs=0.01)
    assert guarantees.bounded_noise_threshold_restricted(rpt20, [4], 0.0) == 0.0
    assert guarantees.bounded_noise_threshold_npi(rpt20, 4, 1, 0.0) == 0.0


def test_erc_bounds(rpt20, orthonormal):
    zeta, nu = npi(rpt20, 4, 1), npa(rpt20, 4, 1)
    assert guarantees.npi_erc_bound(rpt20, 4, 1) == pytest.approx(zeta / (1 - nu))
    assert guarantees.restricted_erc_bound(orthonormal, [3, 4]) == 0.0


def test_threshold_requires_condition(rpt20, monkeypatch):
    failing = BoundVerdict("thm1", 1.5, False, True, {"zeta": 0.9, "nu": 0.6})
    monkeypatch.setattr(guarantees, "theorem1_condition", lambda K, k, m: failing)
    with pytest.raises(ConditionNotMet):
        guarantees.bounded_noise_threshold_npi(rpt20, 4, 1, 0.5)


def test_gaussian_radius():
    assert guarantees.gaussian_radius(1.0, 100) == pytest.approx(11.955, abs=1e-3)
    assert guarantees.gaussian_radius(0.0, 100) == 0.0
    assert guarantees.gaussian_radius(2.0, 100) == pytest.approx(2 * guarantees.gaussian_radius(1.0, 100))
    with pytest.raises(ValueError):
        guarantees.gaussian_radius(-1.0, 100)


def test_gaussian_thresholds(rpt20):
    sigma = 0.01
    radius = guarantees.gaussian_radius(sigma, 100)
    full = guarantees.gaussian_threshold_restricted(rpt20, [4], sigma)
    assert full == pytest.approx(guarantees.bounded_noise_threshold_restricted(rpt20, [4], radius))
    assert guarantees.gaussian_threshold_restricted(rpt20, [4], sigma, alpha=0.5) == pytest.approx(full / 2)
    assert guarantees.gaussian_threshold_restricted(rpt20, [4], 0.0) == 0.0
    assert guarantees.gaussian_threshold_npi(rpt20, 4, 1, sigma) == pytest.approx(
        guarantees.bounded_noise_threshold_npi(rpt20, 4, 1, radius)
    )
    with pytest.raises(ValueError):
        guarantees.gaussian_threshold_restricted(rpt20, [4], sigma, alpha=1.5)


def test_evaluate_condition(rpt20):
    assert guarantees.evaluate_condition(None, "classic-mu", k=4, mu=0.5285).name == "classic-mu"
    assert guarantees.evaluate_condition(rpt20, "thm2", periods=[4]).holds
    assert guarantees.evaluate_condition(rpt20, "refined", k=6, m=2, s=2).name == "refined"
    with pytest.raises(ValueError, match="--k"):
        guarantees.evaluate_condition(rpt20, "thm1", m=1)
    with pytest.raises(ValueError):
        guarantees.evaluate_condition(rpt20, "nope")


def test_radius_formula():
    L = 64
    assert guarantees.gaussian_radius(1.0, L) == pytest.approx(math.sqrt(L + 2 * math.sqrt(L * math.log(L))))


def test_gaussian_radius_covers_the_noise():
    L = 100
    draws = make_rng(5).standard_normal((10_000, L))
    inside = np.linalg.norm(draws, axis=1) <= guarantees.gaussian_radius(1.0, L)
    assert inside.mean() >= 1 - 1 / L
