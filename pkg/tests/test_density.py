from __future__ import annotations

import random
from fractions import Fraction

import pytest

from herm2.checks import random_abstract_decomposition
from herm2.density import (FactorKind, appendix_ledger, compute_N, density_from_decomposition,
                           group_dim, group_order, local_density)
from herm2.lattice import binary, diagonal, direct_sum, hyperbolic, rescale
from herm2.ring import Case, make_ring

# β_L at f = 2, frozen from the congruence-counting oracle (stabilized normalized counts)
ORACLE_BETA = {
    (1, "H0"): 3, (1, "H1"): 8, (1, "d1"): 2, (1, "d2"): 4, (1, "d11"): 2, (1, "d12"): 4,
    (1, "A(2,0,pi)"): 8, (1, "A(2,2,pi)"): 24,
    (2, "H0"): 4, (2, "H1"): 24, (2, "d1"): 2, (2, "d2"): 4, (2, "d11"): 2, (2, "d12"): 4,
    (2, "A(4,2,pi)"): 16, (2, "A(4,2,pi)+(2)"): 96, (2, "H1+(2)"): 96,
    (2, "A(2,0,1)"): 4, (2, "A(2,2,1)"): 12,
}


def named(R, name):
    pi = R.pi
    table = {
        "H0": lambda: hyperbolic(R, 0), "H1": lambda: hyperbolic(R, 1),
        "d1": lambda: diagonal(R, [1]), "d2": lambda: diagonal(R, [2]),
        "d11": lambda: diagonal(R, [1, 1]), "d12": lambda: diagonal(R, [1, 2]),
        "A(2,0,pi)": lambda: binary(R, 2, 0, pi), "A(2,2,pi)": lambda: binary(R, 2, 2, pi),
        "A(4,2,pi)": lambda: binary(R, 4, 2, pi),
        "A(4,2,pi)+(2)": lambda: direct_sum(binary(R, 4, 2, pi), diagonal(R, [2])),
        "H1+(2)": lambda: direct_sum(hyperbolic(R, 1), diagonal(R, [2])),
        "A(2,0,1)": lambda: binary(R, 2, 0, 1), "A(2,2,1)": lambda: binary(R, 2, 2, 1),
    }
    return table[name]()


@pytest.mark.parametrize("case,name", sorted(ORACLE_BETA))
def test_beta_matches_frozen_oracle_values(case, name):
    R = make_ring(case, 1, 1, 16)
    assert local_density(named(R, name)).beta_L == ORACLE_BETA[(case, name)]


@pytest.mark.parametrize("case", [Case.CASE1, Case.CASE2])
@pytest.mark.parametrize("j", range(5))
def test_rank_one_powers_of_two(case, j):
    R = make_ring(case, 1, 1, 16)
    assert local_density(diagonal(R, [2 ** j])).beta_L == 2 ** (j + 1)


def test_group_orders_closed_forms():
    assert group_order(FactorKind.SP, 2, 2) == 6
    assert group_order(FactorKind.SP, 4, 2) == 720
    assert group_order(FactorKind.O_PLUS, 2, 2) == 2
    assert group_order(FactorKind.O_MINUS, 2, 2) == 6
    assert group_order(FactorKind.O_PLUS, 4, 2) == 72
    assert group_order(FactorKind.O_MINUS, 4, 2) == 120
    assert group_order(FactorKind.SO_ODD, 3, 4) == group_order(FactorKind.SP, 2, 4)
    assert group_dim(FactorKind.SP, 4) == 10 and group_dim(FactorKind.O_PLUS, 4) == 6
    with pytest.raises(ValueError):
        group_order(FactorKind.SP, 3, 2)


@pytest.mark.parametrize("case", [Case.CASE1, Case.CASE2])
def test_dimension_closure_and_n_identity(case):
    rng = random.Random(7)
    for _ in range(100):
        dec = random_abstract_decomposition(rng, case, rng.choice([2, 4]))
        rep = density_from_decomposition(dec)
        dim_g1, l_prime, l = appendix_ledger(dec)
        assert dim_g1 + l_prime + rep.dim_reductive == dec.n ** 2
        N, N_M, N_H, _ = compute_N(dec)
        assert N == N_H - N_M


def test_report_exponent_and_value(ring):
    rep = local_density(direct_sum(hyperbolic(ring, 0), diagonal(ring, [1])))
    assert rep.beta_L == Fraction(rep.order_Gtilde) * Fraction(rep.f) ** rep.f_exponent
    assert rep.f_exponent == rep.N - rep.n ** 2
    js = rep.to_json()
    assert js["beta_L"]["numerator"] == str(rep.beta_L.numerator)
    assert [f["i"] for f in js["factors"]] == sorted(f["i"] for f in js["factors"])


def test_rescaled_lattice_has_shifted_blocks(ring):
    L = direct_sum(hyperbolic(ring, 1), diagonal(ring, [1]))
    rep = local_density(rescale(L, 1))
    assert [b["i"] for b in rep.blocks] == [2, 3]


def test_negative_indices_in_abstract_data():
    from herm2.jordan import abstract_decomposition

    dec = abstract_decomposition(Case.CASE2, 2, [(-2, 1, True), (-1, 2, False), (3, 2, True)])
    rep = density_from_decomposition(dec)
    assert rep.beta_L > 0
    assert rep.dim_reductive + rep.dim_unipotent_radical == dec.n ** 2
