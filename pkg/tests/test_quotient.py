from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from herm2.errors import CaseMismatch
from herm2.jordan import split_with_retry
from herm2.lattice import binary, diagonal, direct_sum, hyperbolic
from herm2.quotient import (QuadraticForm, arf_invariant, computed_dimension, expected_zero_count,
                            induced_quadratic, induced_symplectic, table_dimension, zero_count)
from herm2.ring import Case, make_ring

F2 = make_ring(Case.CASE1, 1, 1, 4).kappa
F4 = make_ring(Case.CASE1, 2, 1, 4).kappa


def hyperbolic_polar(dim):
    P = [[0] * dim for _ in range(dim)]
    for a in range(0, dim, 2):
        P[a][a + 1] = P[a + 1][a] = 1
    return P


def test_arf_of_the_two_planes():
    split = QuadraticForm(F2, [0, 0], hyperbolic_polar(2))
    anisotropic = QuadraticForm(F2, [1, 1], hyperbolic_polar(2))
    assert arf_invariant(split) == 0 and zero_count(split) == 3
    assert arf_invariant(anisotropic) == 1 and zero_count(anisotropic) == 1


def test_arf_undefined_for_singular_or_odd():
    assert arf_invariant(QuadraticForm(F2, [1], [[0]])) is None
    assert arf_invariant(QuadraticForm(F2, [1, 0], [[0, 0], [0, 0]])) is None


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_zero_count_matches_arf(data):
    K = data.draw(st.sampled_from([F2, F4]))
    dim = data.draw(st.sampled_from([2, 4] if K is F4 else [2, 4, 6]))
    q = [data.draw(st.integers(0, K.order - 1)) for _ in range(dim)]
    # random change of basis of the standard symplectic polar form keeps it nonsingular
    Q = QuadraticForm(K, q, hyperbolic_polar(dim))
    a = arf_invariant(Q)
    assert a in (0, 1)
    assert zero_count(Q) == expected_zero_count(K.order, dim, a)


def _lattices(R):
    pi = R.pi
    out = [hyperbolic(R, 0), hyperbolic(R, 1), diagonal(R, [1, 1]), diagonal(R, [1, 1, 1]),
           diagonal(R, [1, 2]), direct_sum(hyperbolic(R, 1), diagonal(R, [1])),
           direct_sum(hyperbolic(R, 0), hyperbolic(R, 1)), direct_sum(diagonal(R, [1]), hyperbolic(R, 2))]
    if R.case is Case.CASE1:
        out += [binary(R, 2, 2, pi), binary(R, 2, 0, pi)]
    else:
        out += [binary(R, 4, 2, pi), binary(R, 2, 2, 1), direct_sum(binary(R, 4, 2, pi), diagonal(R, [2]))]
    return out


@pytest.mark.parametrize("case", [Case.CASE1, Case.CASE2])
@pytest.mark.parametrize("r", [1, 2])
def test_computed_dimensions_match_tables(case, r):
    R = make_ring(case, r, 1, 16)
    for L in _lattices(R):
        dec = split_with_retry(L)
        for i in dec.index_range(2):
            assert computed_dimension(dec, i) == table_dimension(dec, i), (dec.type_data(), i)


@pytest.mark.parametrize("case", [Case.CASE1, Case.CASE2])
def test_induced_forms_are_nonsingular(case):
    R = make_ring(case, 1, 1, 16)
    for L in _lattices(R):
        dec = split_with_retry(L)
        for i in dec.index_range(1):
            symplectic = (i % 2 == 0) == (case is Case.CASE1)
            make = induced_symplectic if symplectic else induced_quadratic
            form = make(dec, i)
            assert form.dim == table_dimension(dec, i)
            assert form.is_nonsingular()


def test_wrong_form_for_case_raises(ring1, ring2):
    with pytest.raises(CaseMismatch):
        induced_quadratic(split_with_retry(hyperbolic(ring1, 0)), 0)
    with pytest.raises(CaseMismatch):
        induced_symplectic(split_with_retry(hyperbolic(ring2, 0)), 0)


def test_expected_zero_count_small_values():
    assert expected_zero_count(2, 2, 0) == 3
    assert expected_zero_count(2, 2, 1) == 1
    assert expected_zero_count(2, 4, 0) == 10
    assert expected_zero_count(4, 2, 1) == 1
