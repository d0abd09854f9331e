# tests/conftest.py
import numpy as np
import pytest

from src.analysis.dictionary_builder import build_npd
from src.db.npd_file import atom_periods
from src.models.dictionary import DictionaryFamily, NpdDictionary


@pytest.fixture(scope="session")
def rpt6():
    """The 12-atom RPT dictionary (p_max=6, L=8), normalized."""
    return build_npd(DictionaryFamily.RPT, 6, 8, normalize=True)


@pytest.fixture(scope="session")
def rpt6_raw():
    return build_npd(DictionaryFamily.RPT, 6, 8, normalize=False)


@pytest.fixture(scope="session")
def farey6():
    return build_npd(DictionaryFamily.FAREY, 6, 8, normalize=True)


@pytest.fixture(scope="session")
def rpt20():
    return build_npd(DictionaryFamily.RPT, 20, 100, normalize=True)


@pytest.fixture(scope="session")
def farey20():
    return build_npd(DictionaryFamily.FAREY, 20, 100, normalize=True)


@pytest.fixture(scope="session")
def orthonormal():
    """Identity dictionary labelled like an NPD with p_max=4 (N = L = 6)."""
    return NpdDictionary(
        family=DictionaryFamily.RPT,
        entries=np.eye(6),
        atom_period=atom_periods(4),
        p_max=4,
        normalized=True,
    )
