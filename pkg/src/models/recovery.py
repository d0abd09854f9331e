# src/models/recovery.py
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np


class StopReason(Enum):
    SPARSITY = "sparsity"
    RESIDUAL_NORM = "residual_norm"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class StopRule:
    """OMP stopping rules; any combination may be set and the first to trigger wins."""

    sparsity: Optional[int] = None
    residual_norm: Optional[float] = None
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if self.sparsity is None and self.residual_norm is None and self.max_iterations is None:
            raise ValueError("A stop rule needs at least one of sparsity, residual_norm, max_iterations")
        if self.sparsity is not None and self.sparsity < 0:
            raise ValueError(f"Sparsity must be nonnegative, got {self.sparsity}")
        if self.residual_norm is not None and self.residual_norm < 0:
            raise ValueError(f"Residual norm bound must be nonnegative, got {self.residual_norm}")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError(f"Iteration cap must be nonnegative, got {self.max_iterations}")


@dataclass
class RecoveryResult:
    """Support (1-based, sorted), aligned coefficients and how the solver stopped.

    `residual_history` holds the residual norm after each iteration.
    """

    support: tuple[int, ...]
    coefficients: np.ndarray
    residual_norm: float
    iterations: int
    stop_reason: StopReason
    residual_history: tuple[float, ...] = ()

    def __repr__(self):
        return (
            f"RecoveryResult(support={list(self.support)}, residual={self.residual_norm:.3g}, "
            f"iterations={self.iterations}, stop={self.stop_reason.value})"
        )

    def to_dense(self, N: int) -> np.ndarray:
        """The full length-N coefficient vector."""
        x = np.zeros(N, dtype=np.complex128)
        if self.support:
            x[np.asarray(self.support) - 1] = self.coefficients
        return x
