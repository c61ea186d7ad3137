from __future__ import annotations

import pytest

from herm2.errors import ContextMismatch, Degenerate, NotHermitian, SingularU
from herm2.lattice import (base_change, binary, determinant, diagonal, direct_sum, hyperbolic,
                           is_unit_matrix, matrix_inverse, mat_mul, new_lattice, norm_exp,
                           random_unit_matrix, rescale, scale_exp, identity)
from herm2.ring import Case, make_ring


def test_direct_sum_is_block_diagonal(ring):
    L = direct_sum(diagonal(ring, [1]), hyperbolic(ring, 0))
    assert L.n == 3
    assert L.gram[0][1].is_zero() and L.gram[2][0].is_zero()
    assert L.gram[1][2] == ring.one


def test_scale_and_norm_of_standard_shapes(ring):
    assert scale_exp(hyperbolic(ring, 0)) == 0
    assert norm_exp(hyperbolic(ring, 0)) == 2
    assert scale_exp(hyperbolic(ring, 3)) == 3
    assert norm_exp(diagonal(ring, [1])) == 0
    assert scale_exp(diagonal(ring, [2, 4])) == 2


def test_direct_sum_takes_minimum_ideals(ring):
    A, B = hyperbolic(ring, 1), diagonal(ring, [4])
    L = direct_sum(A, B)
    assert scale_exp(L) == min(scale_exp(A), scale_exp(B))
    assert norm_exp(L) == min(norm_exp(A), norm_exp(B))


def test_rescale_shifts_scale_by_two(ring):
    assert scale_exp(rescale(hyperbolic(ring, 0), 1)) == 2
    assert norm_exp(rescale(diagonal(ring, [1]), 2)) == 4
    L = direct_sum(hyperbolic(ring, 1), diagonal(ring, [2]))
    back = rescale(rescale(L, 2), -2)
    assert all((x - y).val() >= 2 * ring.k - 8 for rx, ry in zip(back.gram, L.gram) for x, y in zip(rx, ry))


def test_norm_is_at_least_scale(ring, rng):
    for _ in range(10):
        U = random_unit_matrix(ring, 3, rng)
        L = base_change(direct_sum(hyperbolic(ring, 1), diagonal(ring, [2])), U)
        assert norm_exp(L) >= scale_exp(L)


def test_base_change_preserves_ideals(ring, rng):
    L = direct_sum(binary(ring, 2, 0, ring.pi), diagonal(ring, [1]))
    for _ in range(10):
        L2 = base_change(L, random_unit_matrix(ring, 3, rng))
        assert (scale_exp(L2), norm_exp(L2)) == (scale_exp(L), norm_exp(L))


def test_non_hermitian_entry_is_named(ring):
    with pytest.raises(NotHermitian, match=r"\(0,1\)"):
        new_lattice([[ring.zero, ring.one], [ring.pi, ring.zero]], ring)


def test_degenerate_gram(ring):
    with pytest.raises(Degenerate):
        new_lattice([[1, 1], [1, 1]], ring)


def test_singular_base_change(ring):
    U = [[ring.one, ring.one], [ring.one, ring.one]]
    with pytest.raises(SingularU):
        base_change(hyperbolic(ring, 0), U)


def test_context_mismatch():
    R1 = make_ring(Case.CASE1, 1, 1, 10)
    R2 = make_ring(Case.CASE2, 1, 1, 10)
    with pytest.raises(ContextMismatch):
        direct_sum(diagonal(R1, [1]), diagonal(R2, [1]))


def test_inverse_and_determinant(ring, rng):
    U = random_unit_matrix(ring, 3, rng)
    assert is_unit_matrix(U, ring)
    assert mat_mul(U, matrix_inverse(U, ring)) == identity(ring, 3)
    assert determinant(hyperbolic(ring, 0).rows(), ring) == -ring.one
