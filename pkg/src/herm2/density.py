"""Local density from the type data of a Jordan decomposition.

β_L = f^{N - n²} · #G̃(κ), where #G̃(κ) = f^{dim R_u} · ∏(orders of the
reductive factors) · 2^β and dim R_u = n² − Σ(dims of the reductive factors).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PrecisionExhausted
from .jordan import JordanDecomposition, split_with_retry
from .lattice import HermitianLattice
from .quotient import computed_dimension, induced_quadratic, table_dimension
from .ring import Case


class FactorKind(str, enum.Enum):
    SP = "Sp"
    O_PLUS = "O_plus"
    O_MINUS = "O_minus"
    SO_ODD = "SO_odd"


def group_order(kind: FactorKind, dim_space: int, f: int) -> int:
    kind = FactorKind(kind)
    if kind is FactorKind.SO_ODD:
        if dim_space % 2 == 0:
            raise ValueError("SO_odd needs an odd-dimensional space")
        return group_order(FactorKind.SP, dim_space - 1, f)
    if dim_space % 2:
        raise ValueError(f"{kind.value} needs an even-dimensional space")
    m = dim_space // 2
    if kind is FactorKind.SP:
        order = f ** (m * m)
        for i in range(1, m + 1):
            order *= f ** (2 * i) - 1
        return order
    if m == 0:
        raise ValueError("orthogonal factors need a space of dimension at least 2")
    eps = 1 if kind is FactorKind.O_PLUS else -1
    order = 2 * f ** (m * (m - 1)) * (f ** m - eps)
    for i in range(1, m):
        order *= f ** (2 * i) - 1
    return order


def group_dim(kind: FactorKind, dim_space: int) -> int:
    kind = FactorKind(kind)
    if kind is FactorKind.SO_ODD:
        return group_dim(FactorKind.SP, dim_space - 1)
    m = dim_space // 2
    if kind is FactorKind.SP:
        return m * (2 * m + 1)
    return m * (2 * m - 1)


@dataclass(frozen=True)
class ReductiveFactor:
    kind: FactorKind
    dim_space: int
    i: int
    f: int

    @property
    def order(self) -> int:
        return group_order(self.kind, self.dim_space, self.f)

    @property
    def dim(self) -> int:
        return group_dim(self.kind, self.dim_space)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "dim_space": self.dim_space, "i": self.i,
                "order": str(self.order), "dim": self.dim}


def _arf_at(dec: JordanDecomposition, i: int) -> int:
    if dec.D is not None:
        a = induced_quadratic(dec, i).arf
        if a is None:
            raise AssertionError(f"quadratic form at index {i} has no Arf invariant")
        return a
    b = dec.block_at(i)
    if b.arf is None:
        raise ValueError(f"abstract block at index {i} needs an Arf invariant")
    return b.arf


def reductive_factors(dec: JordanDecomposition) -> list[ReductiveFactor]:
    out = []
    for i in dec.index_range(2):
        dim = table_dimension(dec, i)
        if dec.case is Case.CASE1:
            symplectic = i % 2 == 0
        else:
            symplectic = i % 2 == 1
        if symplectic:
            kind = FactorKind.SP
        elif dim % 2:
            kind = FactorKind.SO_ODD
        else:
            kind = None  # orthogonal group of a free block, decided by the Arf invariant
        if dim == 0 or (kind is FactorKind.SO_ODD and dim == 1):
            continue
        if kind is None:
            kind = FactorKind.O_PLUS if _arf_at(dec, i) == 0 else FactorKind.O_MINUS
        out.append(ReductiveFactor(kind, dim, i, dec.f))
    return out


def component_beta(dec: JordanDecomposition) -> int:
    t = dec.type_one
    count = 0
    for j in dec.index_range(4):
        if not t(j):
            continue
        if dec.case is Case.CASE1:
            if j % 2 == 0 and not t(j + 2):
                count += 1
        elif j % 2 == 0:
            if not (t(j + 2) or t(j + 3) or t(j + 4)):
                count += 1
        elif not (t(j - 1) or t(j + 1) or t(j + 2) or t(j + 3)):
            count += 1
    return count


def d_terms(dec: JordanDecomposition) -> dict[int, int]:
    return {b.i: b.i * b.rank * (b.rank - 1) // 2 for b in dec.blocks}


def _pair_sums(dec: JordanDecomposition) -> tuple[int, int, int]:
    """Σ_{i<j} i·n_i·n_j, Σ_{i<j} j·n_i·n_j and Σ_{i<j} n_i·n_j."""
    lo = hi = plain = 0
    bl = dec.blocks
    for x in range(len(bl)):
        for y in range(x + 1, len(bl)):
            prod = bl[x].rank * bl[y].rank
            lo += bl[x].i * prod
            hi += bl[y].i * prod
            plain += prod
    return lo, hi, plain


def compute_N(dec: JordanDecomposition) -> tuple[int, int, int, int]:
    """(N, N_M, N_H, a); `a` is 0 in case 1."""
    lo, hi, _ = _pair_sums(dec)
    d_sum = sum(d_terms(dec).values())
    even_term = sum((b.i + 2) // 2 * b.rank for b in dec.blocks if b.i % 2 == 0)
    if dec.case is Case.CASE1:
        odd_term = sum((b.i + 1) // 2 * b.rank for b in dec.blocks if b.i % 2)
        even_one = [b for b in dec.blocks if b.i % 2 == 0 and b.type_one]
        N_M = sum(2 * b.rank - 1 for b in even_one) + (hi - lo)
        N_H = sum(b.rank - 1 for b in even_one) + hi + even_term + odd_term + d_sum
        N = lo + even_term + odd_term + d_sum - sum(b.rank for b in even_one)
        a = 0
    else:
        odd_term = sum((b.i + 3) // 2 * b.rank for b in dec.blocks if b.i % 2)
        ones = [b for b in dec.blocks if b.type_one]
        a = sum(1 for b in dec.blocks if b.i % 2 and b.type_one and not b.bound)
        N_M = sum(2 * b.rank for b in ones) + (hi - lo) - a
        N_H = sum(b.rank for b in ones) + hi + even_term + odd_term + d_sum - a
        N = lo + even_term + odd_term + d_sum - sum(b.rank for b in ones)
    if N != N_H - N_M:
        raise AssertionError(f"N = {N} differs from N_H - N_M = {N_H - N_M}")
    return N, N_M, N_H, a


def appendix_ledger(dec: JordanDecomposition) -> tuple[int, int, int]:
    """(dim of G̃¹, l′, l) from the explicit descriptions of the unipotent kernel."""
    _, _, pairs = _pair_sums(dec)
    bl = dec.blocks
    if dec.case is Case.CASE1:
        dim_g1 = (pairs
                  + sum((b.rank ** 2 + b.rank) // 2 for b in bl if b.i % 2)
                  + sum((b.rank ** 2 - b.rank) // 2 for b in bl if b.i % 2 == 0)
                  + sum(1 for b in bl if b.i % 2 == 0 and b.type_one))
        l_prime = (pairs
                   - sum(b.rank for b in bl if b.i % 2 and b.bound)
                   + sum(b.rank - 1 for b in bl if b.i % 2 == 0 and b.type_one and b.rank % 2)
                   + sum(2 * b.rank - 2 for b in bl if b.i % 2 == 0 and b.type_one and b.rank % 2 == 0))
    else:
        even_one = [b for b in bl if b.i % 2 == 0 and b.type_one]
        even_one_top = [b for b in even_one if not dec.type_one(b.i + 2)]
        odd_free_one = [b for b in bl if b.i % 2 and b.type_one and not b.bound]
        dim_g1 = (pairs
                  + sum((b.rank ** 2 + b.rank) // 2 for b in bl if b.i % 2 == 0)
                  + sum((b.rank ** 2 - b.rank) // 2 for b in bl if b.i % 2)
                  + len(odd_free_one) - len(even_one) + len(even_one_top))
        l_prime = (pairs
                   + sum(b.rank - 1 for b in even_one if b.rank % 2 == 0)
                   + sum(2 * b.rank - 2 for b in odd_free_one)
                   - sum(b.rank for b in bl if b.i % 2 == 0 and not b.type_one and b.bound)
                   + len(even_one) - len(even_one_top))
    return dim_g1, l_prime, dim_g1 + l_prime


@dataclass
class DensityReport:
    case: Case
    f: int
    n: int
    N: int
    N_M: int
    N_H: int
    a: int
    d_i: dict
    beta: int
    factors: list
    dim_reductive: int
    dim_unipotent_radical: int
    order_Gtilde: int
    f_exponent: int
    beta_L: Fraction
    appendix_ledger: dict
    blocks: list = field(default_factory=list)
    dimension_check: bool | None = None  # quotient dimensions computed from the forms agree with the tables

    @property
    def mantissa(self) -> int:
        return self.order_Gtilde

    def to_json(self) -> dict:
        return {
            "case": int(self.case),
            "f": self.f,
            "n": self.n,
            "N": self.N,
            "N_M": self.N_M,
            "N_H": self.N_H,
            "a": self.a,
            "d_i": {str(k): v for k, v in sorted(self.d_i.items())},
            "beta": self.beta,
            "factors": [fa.to_json() for fa in self.factors],
            "dim_reductive": self.dim_reductive,
            "dim_unipotent_radical": self.dim_unipotent_radical,
            "order_Gtilde": str(self.order_Gtilde),
            "beta_L": {
                "mantissa": str(self.order_Gtilde),
                "f_exponent": self.f_exponent,
                "numerator": str(self.beta_L.numerator),
                "denominator": str(self.beta_L.denominator),
            },
            "appendix_ledger": self.appendix_ledger,
            "blocks": self.blocks,
            "dimension_check": self.dimension_check,
        }


def density_from_decomposition(dec: JordanDecomposition, check_dimensions: bool = True) -> DensityReport:
    n = dec.n
    factors = reductive_factors(dec)
    beta = component_beta(dec)
    N, N_M, N_H, a = compute_N(dec)
    dim_red = sum(fa.dim for fa in factors)
    dim_unip = n * n - dim_red
    order = dec.f ** dim_unip * 2 ** beta
    for fa in factors:
        order *= fa.order
    f_exp = N - n * n
    beta_L = Fraction(order) * Fraction(dec.f) ** f_exp
    dim_g1, l_prime, l = appendix_ledger(dec)
    if l != dim_unip:
        raise AssertionError(f"unipotent dimension {dim_unip} disagrees with the kernel ledger {l}")
    check = None
    if check_dimensions and dec.D is not None:
        check = all(computed_dimension(dec, i) == table_dimension(dec, i) for i in dec.index_range(2))
        if not check:
            raise AssertionError("quotient dimensions disagree with the type tables")
    return DensityReport(
        case=dec.case, f=dec.f, n=n, N=N, N_M=N_M, N_H=N_H, a=a, d_i=d_terms(dec), beta=beta,
        factors=factors, dim_reductive=dim_red, dim_unipotent_radical=dim_unip, order_Gtilde=order,
        f_exponent=f_exp, beta_L=beta_L, appendix_ledger={"dim_G1": dim_g1, "l_prime": l_prime, "l": l},
        blocks=[b.to_json() for b in dec.blocks], dimension_check=check,
    )


def local_density(L: HermitianLattice, max_k: int = 512) -> DensityReport:
    if L.n == 0:
        return density_from_decomposition(JordanDecomposition(Case(L.ring.case), L.ring.f, []))
    dec = split_with_retry(L, max_k=max_k)
    while True:
        try:
            return density_from_decomposition(dec)
        except PrecisionExhausted:
            k = 2 * dec.ring.k
            if k > max_k:
                raise
            from .lattice import with_ring
            from .jordan import jordan_split
            dec = jordan_split(with_ring(L, L.ring.with_precision(k)))
