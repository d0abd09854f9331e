# tests/test_signals.py
import numpy as np
import pytest

from src.analysis.signals import (
    add_bounded_noise,
    add_gaussian_noise,
    gen_mixture,
    make_rng,
    minimal_period,
)
from src.analysis.support import period_set


def test_streams_are_reproducible():
    a = make_rng(42, 3).standard_normal(5)
    b = make_rng(42, 3).standard_normal(5)
    c = make_rng(42, 4).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("gamma", [0.0, 0.5, 2.0])
def test_real_mixture(rpt20, gamma):
    T = period_set([3, 4])
    x, y = gen_mixture(rpt20, T, gamma, make_rng(1))
    nonzero = tuple(int(i) + 1 for i in np.flatnonzero(x))
    assert nonzero == T.support
    assert np.all(np.abs(x[np.flatnonzero(x)]) >= gamma)
    assert np.all(x.imag == 0)
    np.testing.assert_allclose(y, rpt20.entries @ x)


def test_mixture_period_is_lcm(rpt20):
    _, y = gen_mixture(rpt20, period_set([3, 4]), 1.0, make_rng(2))
    assert minimal_period(y.real) == 12


def test_complex_mixture(farey20):
    T = period_set([5])
    x, _ = gen_mixture(farey20, T, 1.0, make_rng(3))
    values = x[np.flatnonzero(x)]
    assert values.size == 5
    assert np.all(np.abs(values) >= 1.0)
    assert np.any(values.imag != 0)


def test_sparse_subset(rpt20):
    T = period_set([7])
    x, _ = gen_mixture(rpt20, T, 1.0, make_rng(4), sparsity=3)
    chosen = {int(i) + 1 for i in np.flatnonzero(x)}
    assert len(chosen) == 3 and chosen <= set(T.support)

    with pytest.raises(ValueError):
        gen_mixture(rpt20, T, 1.0, make_rng(4), sparsity=8)


def test_negative_gamma(rpt20):
    with pytest.raises(ValueError):
        gen_mixture(rpt20, period_set([2]), -1.0, make_rng(0))


def test_bounded_noise_has_exact_norm():
    y = np.ones(50)
    noisy = add_bounded_noise(y, 0.25, make_rng(9))
    assert np.linalg.norm(noisy - y) == pytest.approx(0.25)
    np.testing.assert_array_equal(add_bounded_noise(y, 0.0, make_rng(9)), y)


def test_gaussian_noise():
    y = np.zeros(20000)
    noisy = add_gaussian_noise(y, 0.5, make_rng(10))
    assert noisy.std() == pytest.approx(0.5, rel=0.05)
    with pytest.raises(ValueError):
        add_gaussian_noise(y, -0.1, make_rng(10))


@pytest.mark.parametrize(
    "v, expected",
    [([1, 2, 1, 2, 1], 2), ([5, 5, 5], 1), ([1, 2, 3], 3), ([1, 0, 0, 1, 0, 0, 1], 3)],
)
def test_minimal_period(v, expected):
    assert minimal_period(np.array(v, dtype=float)) == expected
