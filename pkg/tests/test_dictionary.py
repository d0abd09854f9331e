# tests/test_dictionary.py
import pickle

import numpy as np
import pytest

from src.analysis.dictionary_builder import build_Cq, build_npd, build_npm
from src.analysis.numtheory import divisors, totient
from src.analysis.signals import make_rng, minimal_period
from src.exceptions import NotNormalized
from src.models.dictionary import DictionaryFamily, NpdDictionary, to_zero_based

RPT, FAREY = DictionaryFamily.RPT, DictionaryFamily.FAREY


def test_c1_block_is_all_ones():
    np.testing.assert_array_equal(build_Cq(RPT, 1, 4), np.ones((4, 1)))


def test_c4_block_is_cycle_and_its_downshift():
    expected = np.array([[2, 0], [0, 2], [-2, 0], [0, -2]])
    np.testing.assert_array_equal(build_Cq(RPT, 4, 4), expected)


def test_farey_c2_block():
    np.testing.assert_allclose(build_Cq(FAREY, 2, 4)[:, 0], [1, -1, 1, -1], atol=1e-12)


def test_family_parse():
    assert DictionaryFamily.parse("Farey") is FAREY
    assert DictionaryFamily.parse(RPT) is RPT
    with pytest.raises(ValueError):
        DictionaryFamily.parse("dft")


def test_npm_a4():
    expected = np.array([[1, 1, 2, 0], [1, -1, 0, 2], [1, 1, -2, 0], [1, -1, 0, -2]])
    np.testing.assert_array_equal(build_npm(RPT, 4), expected)


def test_small_npms():
    np.testing.assert_array_equal(build_npm(RPT, 1), [[1]])
    np.testing.assert_allclose(build_npm(FAREY, 2), [[1, 1], [1, -1]], atol=1e-12)


@pytest.mark.parametrize("family", [RPT, FAREY])
def test_npm_full_rank_and_block_orthogonal(family):
    for p in range(1, 31):
        A = build_npm(family, p)
        assert A.shape == (p, p)
        assert np.linalg.matrix_rank(A) == p

        labels = np.concatenate([np.full(totient(q), q) for q in divisors(p)])
        gram = np.abs(A.conj().T @ A)
        across = labels[:, None] != labels[None, :]
        assert gram[across].max(initial=0.0) <= 1e-8


def test_fig1_layout(rpt6_raw):
    K = rpt6_raw
    assert (K.L, K.N) == (8, 12)
    assert np.all(K.entries.imag == 0)
    np.testing.assert_array_equal(K.entries.real, np.round(K.entries.real))
    np.testing.assert_array_equal(K.columns([7, 8, 9, 10]), build_Cq(RPT, 5, 8))
    np.testing.assert_array_equal(K.atom_period, [1, 2, 3, 3, 4, 4, 5, 5, 5, 5, 6, 6])


def test_normalized_single_column():
    K = build_npd(RPT, 1, 5, normalize=True)
    np.testing.assert_allclose(K.entries, np.full((5, 1), 1 / np.sqrt(5)))


def test_farey20_shape(farey20):
    assert (farey20.L, farey20.N) == (100, 128)
    assert not farey20.is_real
    np.testing.assert_allclose(np.linalg.norm(farey20.entries, axis=0), 1.0, atol=1e-12)


@pytest.mark.parametrize("family", [RPT, FAREY])
@pytest.mark.parametrize("p", [4, 6, 12])
def test_npd_restricted_to_divisors_is_the_npm(family, p):
    K = build_npd(family, p, p, normalize=False)
    keep = [i for i, q in enumerate(K.atom_period) if p % q == 0]
    np.testing.assert_allclose(K.entries[:, keep], build_npm(family, p), atol=1e-12)


def test_lcm_property_on_a12():
    A = build_npm(RPT, 12)
    labels = np.concatenate([np.full(totient(q), q) for q in divisors(12)])
    rng = make_rng(7)
    for _ in range(5):
        coefficients = np.where((labels == 3) | (labels == 4), rng.standard_normal(12), 0.0)
        assert minimal_period((A @ coefficients).real) == 12


def test_entries_are_read_only(rpt6):
    with pytest.raises(ValueError):
        rpt6.entries[0, 0] = 5.0


def test_require_normalized(rpt6_raw, rpt6):
    with pytest.raises(NotNormalized):
        rpt6_raw.require_normalized("test")
    rpt6.require_normalized("test")


def test_normalized_flag_is_checked():
    with pytest.raises(ValueError):
        NpdDictionary(RPT, np.ones((4, 1)), [1], 1, normalized=True)


def test_columns_are_one_based(rpt6_raw):
    np.testing.assert_array_equal(rpt6_raw.column(1), np.ones(8))
    np.testing.assert_array_equal(to_zero_based([3, 1, 2]), [0, 1, 2])


def test_pickle_drops_caches(rpt6):
    _ = rpt6.gram_magnitude
    clone = pickle.loads(pickle.dumps(rpt6))
    np.testing.assert_array_equal(clone.entries, rpt6.entries)
    assert not clone.entries.flags.writeable
    np.testing.assert_allclose(clone.gram_magnitude, rpt6.gram_magnitude)
