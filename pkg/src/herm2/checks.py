"""Random corpora and invariant checks shared by the selftest command and the test suite."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .density import (FactorKind, appendix_ledger, compute_N, density_from_decomposition,
                      group_order, local_density)
from .errors import CaseMismatch
from .jordan import JordanDecomposition, abstract_decomposition, split_with_retry
from .lattice import (HermitianLattice, base_change, binary, diagonal, direct_sum, hyperbolic,
                      random_unit_matrix, rescale)
from .quotient import QuadraticForm, arf_invariant, expected_zero_count, induced_quadratic, zero_count
from .ring import Case, RingContext, make_ring


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


# ---- corpora -----------------------------------------------------------------

def random_abstract_decomposition(rng: random.Random, case: Case, f: int, max_rank: int = 6,
                                  indices: range = range(-2, 7), max_blocks: int = 4) -> JordanDecomposition:
    """Type data of a random lattice: odd-index and type II blocks get even rank."""
    case = Case(int(case))
    chosen = sorted(rng.sample(list(indices), rng.randint(1, max_blocks)))
    specs = []
    for i in chosen:
        own = rng.random() < 0.5
        if i % 2 and case is Case.CASE1:
            own = False
        even_rank = i % 2 == 1 or not own
        if even_rank:
            rank = 2 * rng.randint(1, max_rank // 2)
        else:
            rank = rng.randint(1, max_rank)
        specs.append((i, rank, own, rng.randint(0, 1)))
    return abstract_decomposition(case, f, specs)


def _random_piece(ring: RingContext, rng: random.Random, max_index: int) -> HermitianLattice:
    i = rng.randint(0, max_index)
    unit = ring.random_unit(rng)
    a_unit = ring.from_a(unit.a0)
    pi = ring.pi
    kind = rng.choice(["diag", "hyp", "binary"])
    if kind == "diag" or (kind == "binary" and i % 2 == 0 and rng.random() < 0.5):
        return diagonal(ring, [a_unit * ring.from_int(2) ** (i // 2)])
    if kind == "hyp":
        return hyperbolic(ring, i)
    # A(2^{m}·a, 2^{m}·b, π^i) style piece: off-diagonal π^i, diagonal of higher norm
    m = (i + 2) // 2
    a = ring.from_int(rng.choice([0, 1, 2, 3])) * ring.from_int(2) ** m
    b = ring.from_int(rng.choice([0, 1])) * ring.from_int(2) ** m
    return binary(ring, a, b, pi ** i * unit)


def random_lattice(ring: RingContext, rng: random.Random, max_rank: int = 4, max_index: int = 3) -> HermitianLattice:
    """Direct sum of random small pieces, disguised by a random unit base change."""
    pieces = []
    n = 0
    while True:
        P = _random_piece(ring, rng, max_index)
        if n + P.n > max_rank:
            break
        pieces.append(P)
        n += P.n
        if rng.random() < 0.35:
            break
    if not pieces:
        pieces = [diagonal(ring, [ring.one])]
    L = direct_sum(*pieces)
    return base_change(L, random_unit_matrix(ring, L.n, rng))


# ---- invariant checks ----------------------------------------------------------

def check_dimension_closure(samples: int, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    for case in (Case.CASE1, Case.CASE2):
        for t in range(samples):
            dec = random_abstract_decomposition(rng, case, rng.choice([2, 4]))
            rep = density_from_decomposition(dec)
            dim_g1, l_prime, _ = appendix_ledger(dec)
            total = dim_g1 + l_prime + rep.dim_reductive
            if total != dec.n ** 2:
                return CheckResult("dimension_closure", False, f"case {int(case)} {dec.type_data()}: {total} != {dec.n ** 2}")
    return CheckResult("dimension_closure", True, f"{samples} decompositions per case")


def check_n_identity(samples: int, seed: int = 1) -> CheckResult:
    rng = random.Random(seed)
    for case in (Case.CASE1, Case.CASE2):
        for _ in range(samples):
            dec = random_abstract_decomposition(rng, case, rng.choice([2, 4]))
            try:
                N, N_M, N_H, _ = compute_N(dec)
            except AssertionError as exc:
                return CheckResult("n_identity", False, f"{dec.type_data()}: {exc}")
            if N != N_H - N_M:
                return CheckResult("n_identity", False, f"{dec.type_data()}")
    return CheckResult("n_identity", True, f"{samples} decompositions per case")


def _alternating_f2(dim: int):
    M = [[0] * dim for _ in range(dim)]
    for a in range(0, dim, 2):
        M[a][a + 1] = M[a + 1][a] = 1
    return M


def _orthogonal_f2(dim: int, minus: bool):
    """Polar matrix and diagonal of x1x2 + x3x4 + ..., with x1² + x2² added for the minus type."""
    polar = _alternating_f2(dim)
    diag = [0] * dim
    if minus:
        diag[0] = diag[1] = 1
    return polar, diag


def _bits(v: int, dim: int) -> list[int]:
    return [(v >> t) & 1 for t in range(dim)]


def _bil(M, x, y) -> int:
    return sum(x[a] * M[a][b] * y[b] for a in range(len(x)) for b in range(len(y))) & 1


def _quad(polar, diag, x) -> int:
    val = sum(diag[a] * x[a] for a in range(len(x)))
    for a in range(len(x)):
        for b in range(a + 1, len(x)):
            val += polar[a][b] * x[a] * x[b]
    return val & 1


def enumerate_isometries_f2(dim: int, polar, diag=None) -> int:
    """Number of linear maps of F_2^dim preserving the form, by column backtracking."""
    vecs = [_bits(v, dim) for v in range(1 << dim)]
    basis = [_bits(1 << t, dim) for t in range(dim)]
    count = 0

    def extend(cols):
        nonlocal count
        j = len(cols)
        if j == dim:
            count += 1
            return
        for v in vecs:
            if diag is not None and _quad(polar, diag, v) != _quad(polar, diag, basis[j]):
                continue
            if diag is None and _bil(polar, v, v) != 0:
                continue
            if all(_bil(polar, cols[t], v) == _bil(polar, basis[t], basis[j]) for t in range(j)):
                extend(cols + [v])

    extend([])
    return count


GROUP_CASES = [
    ("Sp(2,2)", FactorKind.SP, 2),
    ("Sp(4,2)", FactorKind.SP, 4),
    ("O+(2,2)", FactorKind.O_PLUS, 2),
    ("O-(2,2)", FactorKind.O_MINUS, 2),
    ("O+(4,2)", FactorKind.O_PLUS, 4),
    ("O-(4,2)", FactorKind.O_MINUS, 4),
]


def enumerated_group_order(kind: FactorKind, dim: int) -> int:
    if kind is FactorKind.SP:
        return enumerate_isometries_f2(dim, _alternating_f2(dim))
    polar, diag = _orthogonal_f2(dim, kind is FactorKind.O_MINUS)
    return enumerate_isometries_f2(dim, polar, diag)


def check_group_orders(cases=GROUP_CASES) -> CheckResult:
    for name, kind, dim in cases:
        enum = enumerated_group_order(kind, dim)
        if enum != group_order(kind, dim, 2):
            return CheckResult("group_orders", False, f"{name}: enumeration {enum}, formula {group_order(kind, dim, 2)}")
    return CheckResult("group_orders", True, ", ".join(name for name, _, _ in cases))


def corpus_quadratic_forms(lattices) -> list[QuadraticForm]:
    """Nonzero induced quadratic forms of every index of every lattice."""
    out = []
    for L in lattices:
        dec = split_with_retry(L)
        for i in dec.index_range(2):
            try:
                form = induced_quadratic(dec, i)
            except CaseMismatch:
                continue
            if form.dim:
                out.append(form.quadratic())
    return out


def check_arf_counts(forms) -> CheckResult:
    checked = 0
    for Q in forms:
        if Q.dim % 2 or Q.dim > 6:
            continue
        a = arf_invariant(Q)
        if a is None:
            continue
        checked += 1
        if zero_count(Q) != expected_zero_count(Q.K.order, Q.dim, a):
            return CheckResult("arf_zero_counts", False, f"dim {Q.dim} arf {a}")
    return CheckResult("arf_zero_counts", True, f"{checked} forms")


def isometry_invariance(L: HermitianLattice, changes: int, rng: random.Random) -> str | None:
    """None if every base change keeps the type data and β_L, else a description."""
    dec = split_with_retry(L)
    types, beta = dec.type_data(), density_from_decomposition(dec).beta_L
    for _ in range(changes):
        dec2 = split_with_retry(base_change(L, random_unit_matrix(L.ring, L.n, rng)))
        if dec2.type_data() != types:
            return f"type data changed for {types}"
        if density_from_decomposition(dec2).beta_L != beta:
            return f"beta_L changed for {types}"
    return None


def check_isometry_invariance(lattices: int, changes: int, seed: int = 2) -> CheckResult:
    rng = random.Random(seed)
    for case in (Case.CASE1, Case.CASE2):
        ring = make_ring(case, 1, 1, 16)
        for _ in range(lattices):
            msg = isometry_invariance(random_lattice(ring, rng), changes, rng)
            if msg:
                return CheckResult("isometry_invariance", False, msg)
    return CheckResult("isometry_invariance", True, f"{lattices} lattices per case, {changes} base changes each")


def rescale_covariance(L: HermitianLattice) -> str | None:
    dec = split_with_retry(L)
    dec2 = split_with_retry(rescale(L, 1))
    shifted = [(i + 2, *rest) for i, *rest in dec.type_data()]
    if dec2.type_data() != shifted:
        return f"{dec.type_data()} rescaled to {dec2.type_data()}"
    local_density(rescale(L, 1))
    return None


def check_rescale(lattices: int, seed: int = 3) -> CheckResult:
    rng = random.Random(seed)
    for case in (Case.CASE1, Case.CASE2):
        ring = make_ring(case, 1, 1, 16)
        for _ in range(lattices):
            msg = rescale_covariance(random_lattice(ring, rng))
            if msg:
                return CheckResult("rescale_covariance", False, msg)
    return CheckResult("rescale_covariance", True, f"{lattices} lattices per case")


def selftest_checks() -> list:
    """(property name, thunk returning a CheckResult) for quick versions of the invariant suites."""
    return [
        ("dimension_closure", lambda: check_dimension_closure(60)),
        ("n_identity", lambda: check_n_identity(60)),
        ("group_orders", lambda: check_group_orders(GROUP_CASES[:4])),
        ("arf_zero_counts", lambda: check_arf_counts(corpus_quadratic_forms(_small_corpus()))),
        ("isometry_invariance", lambda: check_isometry_invariance(4, 3)),
        ("rescale_covariance", lambda: check_rescale(4)),
    ]


def _small_corpus() -> list:
    out = []
    for case in (Case.CASE1, Case.CASE2):
        R = make_ring(case, 1, 1, 16)
        out += [hyperbolic(R, 0), hyperbolic(R, 1), diagonal(R, [1, 1, 1]), diagonal(R, [1, 3]),
                direct_sum(hyperbolic(R, 0), hyperbolic(R, 1)), diagonal(R, [2, 2, 6])]
    return out

