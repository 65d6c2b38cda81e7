import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l1recovery import ensembles as E
from l1recovery.errors import InvalidDimensionError
from l1recovery.ensembles import SpectrumKind, SpectrumSpec


def test_type2_law_n4():
    p = E.gen_parent(4, SpectrumSpec(SpectrumKind.TYPE2, 16.0), seed=1)
    expected = [1, 16 ** (-1 / 3), 16 ** (-2 / 3), 1 / 16]
    np.testing.assert_allclose(E.singular_spectrum(p), expected, rtol=1e-10)


def test_type3_law_n3():
    p = E.gen_parent(3, SpectrumSpec(SpectrumKind.TYPE3, 100.0), seed=2)
    np.testing.assert_allclose(E.singular_spectrum(p), [1, 100 ** (-3 / 8), 1 / 100], rtol=1e-10)


def test_type1_entries_are_standard_normal():
    a = E.gen_parent(200, SpectrumSpec(), seed=3).entries
    assert abs(a.mean()) < 3 / 200
    assert abs(a.var(ddof=1) - 1) < 0.05


@pytest.mark.parametrize("kind", [SpectrumKind.TYPE2, SpectrumKind.TYPE3])
@pytest.mark.parametrize("n", [2, 17, 120])
def test_spectrum_law_and_condition(kind, n):
    spec = SpectrumSpec(kind, 1e4, s1=2.5)
    s = E.singular_spectrum(E.gen_parent(n, spec, seed=n))
    law = E.spectrum_law(n, spec)
    assert np.max(np.abs(s - law) / law) <= 1e-10
    assert s[0] / s[-1] == pytest.approx(1e4, rel=1e-10)


def test_spec_validation():
    with pytest.raises(ValueError):
        SpectrumSpec(SpectrumKind.TYPE2, 1.0)
    with pytest.raises(ValueError):
        SpectrumSpec(SpectrumKind.TYPE1, s1=0.0)
    SpectrumSpec(SpectrumKind.TYPE1, kappa=0.5)  # kappa unused


def test_parent_dimension_error():
    with pytest.raises(InvalidDimensionError):
        E.gen_parent(1, SpectrumSpec(), 0)


def test_determinism():
    spec = SpectrumSpec(SpectrumKind.TYPE3, 1e3)
    a = E.gen_parent(30, spec, (5, 6)).entries
    b = E.gen_parent(30, spec, (5, 6)).entries
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, E.gen_parent(30, spec, (5, 7)).entries)


def test_subsample_full_is_permutation():
    p = E.gen_parent(25, SpectrumSpec(SpectrumKind.TYPE2, 50.0), 4)
    k = E.subsample_rows(p, 25, 9)
    assert sorted(k.row_indices) == list(range(25))
    np.testing.assert_allclose(E.singular_spectrum(k), E.singular_spectrum(p), atol=1e-10)
    np.testing.assert_array_equal(k.entries, p.entries[k.row_indices])


def test_subsample_single_row():
    p = E.gen_parent(10, SpectrumSpec(), 4)
    k = E.subsample_rows(p, 1, 2)
    assert E.singular_spectrum(k)[0] == pytest.approx(np.linalg.norm(k.entries[0]), rel=1e-12)


def test_subsample_errors():
    p = E.gen_parent(5, SpectrumSpec(), 0)
    with pytest.raises(InvalidDimensionError):
        E.subsample_rows(p, 6, 0)
    with pytest.raises(InvalidDimensionError):
        E.subsample_rows(p, 0, 0)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 40), frac=st.floats(0.05, 1.0), seed=st.integers(0, 2**32),
       kind=st.sampled_from(list(SpectrumKind)))
def test_interlacing(n, frac, seed, kind):
    m = max(1, int(frac * n))
    p = E.gen_parent(n, SpectrumSpec(kind, 1e3), seed)
    k = E.subsample_rows(p, m, seed + 1)
    assert len(set(k.row_indices.tolist())) == m
    sk = E.singular_spectrum(k)
    sp = E.singular_spectrum(p)
    assert np.all(sk <= sp[:m] * (1 + 1e-12) + 1e-14)


def test_singular_spectrum_examples():
    np.testing.assert_allclose(E.singular_spectrum(np.eye(3)), [1, 1, 1])
    np.testing.assert_allclose(E.singular_spectrum(np.diag([3.0, 0.0, 5.0])), [5, 3, 0])
    np.testing.assert_allclose(E.singular_spectrum(np.diag([4.0, 2.0]), normalize=True), [1, 0.5])


def test_subsampled_spectrum_decays_above_parent_law():
    # 400 of 800 rows of a type-2 matrix; with few repeats the per-matrix
    # normalization noise pushes the top few values slightly below the law
    n, m = 800, 400
    spec = SpectrumSpec(SpectrumKind.TYPE2, 1e4)
    mean = E.mean_normalized_spectrum(n, m, spec, repeats=100, seed=2024)
    assert np.all(np.diff(mean) < 0)
    law = E.spectrum_law(n, spec)
    idx = (np.arange(m) * n) // m  # same index fraction in the parent
    assert np.all(mean >= law[idx] / law[0])


def test_spectrum_rows():
    rows = E.spectrum_rows([2.0, 1.0])
    assert rows == [(0, 2.0, 1.0), (1, 1.0, 0.5)]
