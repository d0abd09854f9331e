# src/analysis/signals.py
"""Periodic mixtures, noise models and period verification."""
from typing import Optional

import numpy as np

from src.config import PERIOD_EQUALITY_TOLERANCE
from src.models.dictionary import NpdDictionary, to_zero_based
from src.models.period_set import PeriodSet

_SEED_MASK = (1 << 64) - 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for one trial; streams are keyed by seed XOR stream index."""
    return np.random.Generator(np.random.Philox(key=(int(seed) ^ int(stream)) & _SEED_MASK))


def gen_mixture(
    K: NpdDictionary,
    T: PeriodSet,
    gamma: float,
    rng: np.random.Generator,
    sparsity: Optional[int] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Draws x supported on S_T (or on a random `sparsity`-subset of it) and y = Kx.

    Real dictionaries: standard normal coefficients pushed away from zero by
    gamma. Complex dictionaries: modulus |N(0,1)| + gamma with a uniform phase.
    Either way every nonzero satisfies |x_i| >= gamma.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")

    support = to_zero_based(T.support)
    if sparsity is not None:
        if not 1 <= sparsity <= support.size:
            raise ValueError(f"sparsity must lie in 1..{support.size}, got {sparsity}")
        support = np.sort(rng.choice(support, size=sparsity, replace=False))

    draws = rng.standard_normal(support.size)
    if K.is_real:
        values = draws + np.where(draws >= 0, 1.0, -1.0) * gamma
    else:
        phases = rng.uniform(0.0, 2.0 * np.pi, support.size)
        values = (np.abs(draws) + gamma) * np.exp(1j * phases)

    x = np.zeros(K.N, dtype=np.complex128)
    x[support] = values
    return x, K.entries @ x


def add_bounded_noise(y, eps: float, rng: np.random.Generator) -> np.ndarray:
    """y + w with w isotropic and ||w||_2 = eps exactly."""
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    y = np.asarray(y)
    if eps == 0:
        return y.copy()
    w = rng.standard_normal(y.size)
    return y + w * (eps / np.linalg.norm(w))


def add_gaussian_noise(y, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """y + w with w ~ N(0, sigma^2 I)."""
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    y = np.asarray(y)
    if sigma == 0:
        return y.copy()
    return y + sigma * rng.standard_normal(y.size)


def minimal_period(v, tol: float = PERIOD_EQUALITY_TOLERANCE) -> int:
    """Smallest p with v(n) = v(n + p) for every valid n (len(v) if none smaller)."""
    v = np.asarray(v).ravel()
    if v.size == 0:
        raise ValueError("minimal_period requires a nonempty vector")
    for p in range(1, v.size):
        if np.all(np.abs(v[p:] - v[:-p]) <= tol):
            return p
    return v.size
