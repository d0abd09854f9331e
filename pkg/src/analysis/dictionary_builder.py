# src/analysis/dictionary_builder.py
"""Nested periodic matrices (NPMs) and dictionaries (NPDs) for both families."""
import numpy as np
from loguru import logger

from src.analysis.numtheory import coprime_residues, divisors, ramanujan_cycle, totient
from src.models.dictionary import DictionaryFamily, NpdDictionary


def _periodic_extension(cycle: np.ndarray, rows: int) -> np.ndarray:
    """Repeats the rows of one cycle until `rows` samples are filled."""
    reps = -(-rows // cycle.shape[0])
    return np.tile(cycle, (reps, 1))[:rows]


def build_Cq(family: DictionaryFamily, q: int, rows: int) -> np.ndarray:
    """The rows x phi(q) block C_q of period-q atoms.

    RPT: the phi(q) circular downshifts of one cycle of c_q, each periodically
    extended. Farey: columns e^{j 2 pi k n / q} for k coprime to q, ascending.
    """
    if q < 1 or rows < 1:
        raise ValueError(f"build_Cq requires q >= 1 and rows >= 1, got q={q}, rows={rows}")

    family = DictionaryFamily.parse(family)

    if family is DictionaryFamily.RPT:
        cycle = ramanujan_cycle(q)
        # column i is c_q downshifted by i within the generating cycle
        shifts = np.stack([np.roll(cycle, i) for i in range(totient(q))], axis=1)
        return _periodic_extension(shifts, rows).astype(np.complex128)

    n = np.arange(rows, dtype=np.int64)[:, None]
    ks = np.asarray(coprime_residues(q), dtype=np.int64)[None, :]
    return np.exp(2j * np.pi * ((ks * n) % q) / q)


def build_npm(family: DictionaryFamily, p: int) -> np.ndarray:
    """The p x p nested periodic matrix A_p = [C_q1 ... C_qk] over divisors of p."""
    if p < 1:
        raise ValueError(f"build_npm requires p >= 1, got {p}")
    return np.hstack([build_Cq(family, q, p) for q in divisors(p)])


def build_npd(
    family: DictionaryFamily,
    p_max: int,
    L: int,
    normalize: bool = True,
) -> NpdDictionary:
    """Concatenates C_p (extended to L samples) for p = 1..p_max.

    Normalization, when requested, happens after extension because column
    norms depend on L.
    """
    if p_max < 1 or L < 1:
        raise ValueError(f"build_npd requires p_max >= 1 and L >= 1, got {p_max}, {L}")

    family = DictionaryFamily.parse(family)
    blocks = [build_Cq(family, p, L) for p in range(1, p_max + 1)]
    entries = np.hstack(blocks)
    atom_period = np.concatenate(
        [np.full(block.shape[1], p, dtype=np.int64) for p, block in enumerate(blocks, 1)]
    )

    if normalize:
        norms = np.linalg.norm(entries, axis=0)
        if np.any(norms == 0):
            raise ValueError(f"L={L} is too short: some period-p atoms vanish entirely")
        entries = entries / norms

    logger.debug(
        f"Built {family.value} dictionary: L={L}, p_max={p_max}, N={entries.shape[1]}"
    )
    return NpdDictionary(
        family=family,
        entries=entries,
        atom_period=atom_period,
        p_max=p_max,
        normalized=normalize,
    )
