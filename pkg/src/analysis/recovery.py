# src/analysis/recovery.py
"""Sparse recovery over nested periodic dictionaries: OMP, basis pursuit and
least squares restricted to a support."""
from typing import Iterable

import numpy as np
import scipy.linalg
from loguru import logger

from src.analysis.coherence import checked_cholesky
from src.analysis.numtheory import lcm_of_set
from src.config import (
    BP_MAX_ITERATIONS,
    BP_PENALTY,
    BP_TOLERANCE,
    OMP_REFACTOR_INTERVAL,
    SINGULAR_GRAM_CONDITION,
)
from src.exceptions import NoConvergence, SingularGram
from src.models.dictionary import NpdDictionary, to_zero_based
from src.models.recovery import RecoveryResult, StopReason, StopRule


def _as_signal(K: NpdDictionary, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.complex128).ravel()
    if y.shape != (K.L,):
        raise ValueError(f"Signal has {y.size} samples, dictionary expects L={K.L}")
    if not np.all(np.isfinite(y)):
        raise ValueError("Signal contains non-finite samples")
    return y


def _stop_reason(stop: StopRule, n_selected: int, residual_norm: float, limit: int):
    if stop.sparsity is not None and n_selected >= stop.sparsity:
        return StopReason.SPARSITY
    if stop.residual_norm is not None and residual_norm <= stop.residual_norm:
        return StopReason.RESIDUAL_NORM
    if stop.max_iterations is not None and n_selected >= stop.max_iterations:
        return StopReason.MAX_ITERATIONS
    # no more atoms can be added without losing linear independence
    if n_selected >= limit:
        return StopReason.MAX_ITERATIONS
    return None


def _append_to_cholesky(chol: np.ndarray, atoms: np.ndarray, new_atom: np.ndarray) -> np.ndarray:
    """Grows the lower Cholesky factor of K_S^H K_S by one column."""
    diagonal = float(np.real(np.vdot(new_atom, new_atom)))
    if chol.size == 0:
        return np.array([[np.sqrt(diagonal)]], dtype=np.complex128)

    w = scipy.linalg.solve_triangular(chol, atoms.conj().T @ new_atom, lower=True)
    remainder = diagonal - float(np.real(np.vdot(w, w)))
    if remainder <= 0:
        raise SingularGram("Selected atoms became linearly dependent")

    size = chol.shape[0]
    grown = np.zeros((size + 1, size + 1), dtype=np.complex128)
    grown[:size, :size] = chol
    grown[size, :size] = w.conj()
    grown[size, size] = np.sqrt(remainder)
    return grown


def omp(K: NpdDictionary, y, stop: StopRule) -> RecoveryResult:
    """Orthogonal matching pursuit.

    Each iteration adds the unselected atom most correlated with the residual
    (lowest index on ties) and re-fits all selected atoms by least squares.
    The Cholesky factor of the selected Gram matrix is grown in place and
    rebuilt from scratch every OMP_REFACTOR_INTERVAL iterations.

    Raises:
        SingularGram: If the selected atoms become numerically dependent
    """
    K.require_normalized("omp")
    y = _as_signal(K, y)

    limit = min(K.N, K.L)
    selected: list[int] = []
    chol = np.zeros((0, 0), dtype=np.complex128)
    coefficients = np.zeros(0, dtype=np.complex128)
    residual = y.copy()
    residual_norm = float(np.linalg.norm(residual))
    history: list[float] = []

    while (reason := _stop_reason(stop, len(selected), residual_norm, limit)) is None:
        correlations = np.abs(K.entries.conj().T @ residual)
        correlations[selected] = -1.0
        chosen = int(np.argmax(correlations))

        atoms = K.entries[:, selected]
        chol = _append_to_cholesky(chol, atoms, K.entries[:, chosen])
        selected.append(chosen)
        atoms = K.entries[:, selected]

        if len(selected) % OMP_REFACTOR_INTERVAL == 0:
            factor, _ = checked_cholesky(atoms.conj().T @ atoms, "selected atoms")
            chol = np.tril(factor)
            coefficients = scipy.linalg.lstsq(atoms, y)[0]
        else:
            if np.linalg.cond(chol) ** 2 > SINGULAR_GRAM_CONDITION:
                raise SingularGram(
                    f"Selected atoms are numerically dependent after {len(selected)} iterations"
                )
            coefficients = scipy.linalg.cho_solve((chol, True), atoms.conj().T @ y)

        residual = y - atoms @ coefficients
        residual_norm = float(np.linalg.norm(residual))
        history.append(residual_norm)

    order = np.argsort(selected)
    result = RecoveryResult(
        support=tuple(int(selected[i]) + 1 for i in order),
        coefficients=coefficients[order] if selected else coefficients,
        residual_norm=residual_norm,
        iterations=len(selected),
        stop_reason=reason,
        residual_history=tuple(history),
    )
    logger.debug(f"OMP finished: {result!r}")
    return result


def shrink(z: np.ndarray, t: float) -> np.ndarray:
    """Complex soft-thresholding z * max(1 - t/|z|, 0)."""
    magnitude = np.abs(z)
    # zero entries get an infinite ratio and therefore stay zero
    ratio = np.divide(t, magnitude, out=np.full_like(magnitude, np.inf), where=magnitude > 0)
    return z * np.maximum(1.0 - ratio, 0.0)


def basis_pursuit(
    K: NpdDictionary,
    y,
    tol: float = BP_TOLERANCE,
    penalty: float = BP_PENALTY,
    max_iterations: int = BP_MAX_ITERATIONS,
) -> np.ndarray:
    """min ||x||_1 subject to Kx = y, by operator splitting (ADMM).

    The x-step projects onto {x : Kx = y} with the dictionary's pseudo-inverse,
    the z-step is complex shrinkage with threshold 1/penalty. Iteration stops
    when both the primal residual ||x - z|| and the dual residual
    penalty*||z - z_prev|| drop to `tol`.

    Raises:
        NoConvergence: If the iteration cap is reached first
    """
    K.require_normalized("basis_pursuit")
    y = _as_signal(K, y)

    pinv = K.pseudo_inverse
    offset = pinv @ y
    z = np.zeros(K.N, dtype=np.complex128)
    u = np.zeros(K.N, dtype=np.complex128)
    primal = np.inf

    for iteration in range(1, max_iterations + 1):
        v = z - u
        x = v - pinv @ (K.entries @ v) + offset
        z_prev = z
        z = shrink(x + u, 1.0 / penalty)
        u = u + x - z

        primal = np.linalg.norm(x - z)
        dual = penalty * np.linalg.norm(z - z_prev)
        if primal <= tol and dual <= tol:
            logger.debug(f"Basis pursuit converged after {iteration} iterations")
            return x

    gap = float(np.linalg.norm(K.entries @ z - y))
    raise NoConvergence(
        f"Basis pursuit did not converge in {max_iterations} iterations "
        f"(feasibility gap {gap:.3g}, primal residual {primal:.3g})"
    )


def least_squares_on_support(K: NpdDictionary, S: Iterable[int], y) -> np.ndarray:
    """Coefficients c (aligned with sorted S) minimizing ||K_S c - y||_2.

    Raises:
        SingularGram: If K_S is not numerically full column rank
    """
    y = _as_signal(K, y)
    idx = to_zero_based(S)
    if idx.size == 0:
        return np.zeros(0, dtype=np.complex128)
    atoms = K.entries[:, idx]
    checked_cholesky(atoms.conj().T @ atoms)
    return scipy.linalg.lstsq(atoms, y)[0]


def support_from_coefficients(x, rel_threshold: float) -> tuple[int, ...]:
    """1-based indices with |x_i| > rel_threshold * max_j |x_j|."""
    if not 0 < rel_threshold < 1:
        raise ValueError(f"rel_threshold must lie in (0, 1), got {rel_threshold}")
    magnitude = np.abs(np.asarray(x).ravel())
    if magnitude.size == 0 or magnitude.max() == 0:
        return ()
    return tuple(int(i) + 1 for i in np.flatnonzero(magnitude > rel_threshold * magnitude.max()))


def estimate_periods(K: NpdDictionary, support: Iterable[int]) -> tuple[tuple[int, ...], int]:
    """Hidden periods implied by a support, and the mixture period lcm(T).

    The atom periods present are reduced to the divisibility-maximal ones; an
    empty support describes the zero signal, of period 1.
    """
    present = sorted({int(K.atom_period[i - 1]) for i in support})
    hidden = tuple(
        p for p in present if not any(q != p and q % p == 0 for q in present)
    )
    return hidden, (lcm_of_set(hidden) if hidden else 1)
