# src/models/dictionary.py
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np

from src.config import NORMALIZATION_TOLERANCE
from src.exceptions import NotNormalized


class DictionaryFamily(Enum):
    RPT = "rpt"
    FAREY = "farey"

    @classmethod
    def parse(cls, value) -> "DictionaryFamily":
        """Accepts a family, its value ('rpt'/'farey') or its name."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"Unknown dictionary family: {value!r} (expected 'rpt' or 'farey')"
            )


class NpdDictionary:
    """An L x N nested periodic dictionary with per-atom period labels.

    Entries are stored column-major as complex numbers and frozen after
    construction, so one instance can be shared read-only between workers.
    Column j (0-based) generates a signal of period ``atom_period[j]``.
    """

    def __init__(
        self,
        family: DictionaryFamily,
        entries: np.ndarray,
        atom_period: np.ndarray,
        p_max: int,
        normalized: bool,
    ):
        entries = np.array(entries, dtype=np.complex128, order="F")
        atom_period = np.array(atom_period, dtype=np.int64)

        if entries.ndim != 2:
            raise ValueError(f"Dictionary entries must be 2-D, got {entries.ndim}-D")
        if atom_period.shape != (entries.shape[1],):
            raise ValueError(
                f"{entries.shape[1]} columns but {atom_period.size} period labels"
            )

        if normalized:
            norms = np.linalg.norm(entries, axis=0)
            if np.any(np.abs(norms - 1.0) > NORMALIZATION_TOLERANCE):
                raise ValueError("Dictionary flagged normalized has non-unit columns")

        entries.flags.writeable = False
        atom_period.flags.writeable = False

        self.family: DictionaryFamily = family
        self.entries: np.ndarray = entries
        self.atom_period: np.ndarray = atom_period
        self.p_max: int = int(p_max)
        self.normalized: bool = bool(normalized)

    def __repr__(self):
        return (
            f"NpdDictionary(family={self.family.value}, L={self.L}, "
            f"N={self.N}, p_max={self.p_max}, normalized={self.normalized})"
        )

    @property
    def L(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.entries.shape[1]

    @property
    def is_real(self) -> bool:
        return not np.any(self.entries.imag)

    def column(self, index: int) -> np.ndarray:
        """Atom k_index using the 1-based column numbering."""
        return self.entries[:, index - 1]

    def columns(self, indices) -> np.ndarray:
        """Submatrix K_S for a 1-based index set S."""
        return self.entries[:, to_zero_based(indices)]

    def require_normalized(self, operation: Optional[str] = None) -> None:
        if not self.normalized:
            where = f" for {operation}" if operation else ""
            raise NotNormalized(f"Dictionary must have unit-norm columns{where}")

    @cached_property
    def gram_magnitude(self) -> np.ndarray:
        """The N x N table |<k_i, k_j>| shared by every coherence measure."""
        gram = np.abs(self.entries.conj().T @ self.entries)
        gram.flags.writeable = False
        return gram

    @cached_property
    def pseudo_inverse(self) -> np.ndarray:
        """K^+ (N x L), used to project onto {x : Kx = y}."""
        pinv = np.linalg.pinv(self.entries)
        pinv.flags.writeable = False
        return pinv

    def __getstate__(self):
        # cached tables are rebuilt on demand in worker processes
        state = self.__dict__.copy()
        state.pop("gram_magnitude", None)
        state.pop("pseudo_inverse", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self.entries.flags.writeable = False
        self.atom_period.flags.writeable = False


def to_zero_based(indices) -> np.ndarray:
    """Converts a 1-based public index set into a 0-based numpy index array."""
    idx = np.asarray(sorted(int(i) for i in indices), dtype=np.int64)
    return idx - 1
