"""Hermitian Gram matrices over B and the elementary constructions on them."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import ContextMismatch, Degenerate, NotHermitian, SingularU
from .ring import INF, BElem, RingContext

Matrix = list  # list of rows of BElem


# ---- matrix helpers ---------------------------------------------------------

def identity(ring: RingContext, n: int) -> Matrix:
    return [[ring.one if a == b else ring.zero for b in range(n)] for a in range(n)]


def zeros(ring: RingContext, rows: int, cols: int) -> Matrix:
    return [[ring.zero] * cols for _ in range(rows)]


def mat_mul(X: Sequence[Sequence[BElem]], Y: Sequence[Sequence[BElem]]) -> Matrix:
    inner = len(Y)
    cols = len(Y[0]) if inner else 0
    out = []
    for row in X:
        new = []
        for c in range(cols):
            acc = row[0] * Y[0][c]
            for t in range(1, inner):
                acc = acc + row[t] * Y[t][c]
            new.append(acc)
        out.append(new)
    return out


def conj_transpose(X: Sequence[Sequence[BElem]]) -> Matrix:
    """σ(ᵗX)."""
    if not X:
        return []
    return [[X[r][c].sigma() for r in range(len(X))] for c in range(len(X[0]))]


def congruent(G, U) -> Matrix:
    """σ(ᵗU)·G·U."""
    return mat_mul(conj_transpose(U), mat_mul(G, U))


def determinant(M: Sequence[Sequence[BElem]], ring: RingContext) -> BElem:
    """Exact determinant by Laplace expansion over column subsets (no divisions)."""
    n = len(M)
    if n == 0:
        return ring.one
    # minors[mask] = determinant of the rows 0..popcount-1 restricted to columns in mask
    minors: dict[int, BElem] = {0: ring.one}
    for row in range(n):
        nxt: dict[int, BElem] = {}
        for mask, d in minors.items():
            if d.is_zero():
                continue
            for c in range(n):
                if mask >> c & 1:
                    continue
                term = d * M[row][c]
                # sign from number of used columns greater than c
                above = bin(mask >> (c + 1)).count("1")
                if above & 1:
                    term = -term
                key = mask | (1 << c)
                nxt[key] = nxt[key] + term if key in nxt else term
        minors = nxt
    return minors.get((1 << n) - 1, ring.zero)


def is_unit_matrix(U, ring: RingContext) -> bool:
    return determinant(U, ring).is_unit()


def random_unit_matrix(ring: RingContext, n: int, rng: random.Random) -> Matrix:
    while True:
        U = [[ring.random(rng) for _ in range(n)] for _ in range(n)]
        if is_unit_matrix(U, ring):
            return U


def matrix_inverse(U, ring: RingContext) -> Matrix:
    """Inverse of a unimodular matrix by Gauss-Jordan with unit pivots."""
    n = len(U)
    A = [list(row) + [ring.one if a == b else ring.zero for b in range(n)] for a, row in enumerate(U)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col].is_unit()), None)
        if piv is None:
            raise SingularU("matrix is not invertible over B")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inverse()
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero():
                fac = A[r][col]
                A[r] = [x - fac * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


# ---- the lattice type ---------------------------------------------------------

@dataclass(frozen=True)
class HermitianLattice:
    ring: RingContext
    gram: tuple

    @property
    def n(self) -> int:
        return len(self.gram)

    def rows(self) -> Matrix:
        return [list(r) for r in self.gram]

    def to_json(self) -> list:
        return [[x.to_json() for x in row] for row in self.gram]


def _coerce(ring: RingContext, x) -> BElem:
    if isinstance(x, BElem):
        if x.ring is not ring and x.ring != ring:
            raise ContextMismatch("gram entry from a different ring context")
        return x
    return ring.from_json(x)


def new_lattice(gram, ring: RingContext, check_degenerate: bool = True) -> HermitianLattice:
    n = len(gram)
    if any(len(row) != n for row in gram):
        raise ValueError("gram matrix must be square")
    G = [[_coerce(ring, x) for x in row] for row in gram]
    for j in range(n):
        for k in range(j, n):
            if G[j][k] != G[k][j].sigma():
                raise NotHermitian(f"entry ({j},{k}) is not the conjugate of entry ({k},{j})")
    L = HermitianLattice(ring, tuple(tuple(r) for r in G))
    if check_degenerate and n:
        v = determinant(G, ring).val()
        if v == INF or v > 2 * ring.k - 4:
            raise Degenerate(f"determinant valuation {v} is beyond the precision budget {2 * ring.k - 4}")
    return L


def base_change(L: HermitianLattice, U, require_unit: bool = True) -> HermitianLattice:
    if require_unit and not is_unit_matrix(U, L.ring):
        raise SingularU("base change matrix does not have unit determinant")
    G = congruent(L.rows(), U)
    return HermitianLattice(L.ring, tuple(tuple(r) for r in G))


def scale_exp(L: HermitianLattice):
    return min((x.val() for row in L.gram for x in row), default=INF)


def norm_exp(L: HermitianLattice):
    pi = L.ring.pi
    vals = [L.gram[j][j].val() for j in range(L.n)]
    for j in range(L.n):
        for k in range(j + 1, L.n):
            g = L.gram[j][k]
            vals.append(g.trace().val())
            vals.append((pi * g).trace().val())
    return min(vals, default=INF)


def direct_sum(*lattices: HermitianLattice) -> HermitianLattice:
    if not lattices:
        raise ValueError("direct_sum needs at least one lattice")
    ring = lattices[0].ring
    for L in lattices:
        if L.ring != ring:
            raise ContextMismatch("direct summands use different ring contexts")
    n = sum(L.n for L in lattices)
    G = zeros(ring, n, n)
    off = 0
    for L in lattices:
        for a in range(L.n):
            for b in range(L.n):
                G[off + a][off + b] = L.gram[a][b]
        off += L.n
    return HermitianLattice(ring, tuple(tuple(r) for r in G))


def rescale(L: HermitianLattice, j: int) -> HermitianLattice:
    """Multiply the form by (σ(π)π)^j, i.e. pass to π^j·L; scales shift by 2j."""
    ring = L.ring
    if j >= 0:
        c = ring.pi.norm() ** j
        G = [[x * c for x in row] for row in L.gram]
    else:
        G = [[_div_norm_pi(x, -j) for x in row] for row in L.gram]
    return HermitianLattice(ring, tuple(tuple(r) for r in G))


def _div_norm_pi(x: BElem, m: int) -> BElem:
    """x / N(π)^m, exact."""
    ring = x.ring
    unit = (ring.pi.norm().shift(2)) ** m  # N(π)/π² is a unit
    return x.shift(2 * m) * unit.inverse()


# ---- common shapes ---------------------------------------------------------

def hyperbolic(ring: RingContext, i: int) -> HermitianLattice:
    """H(i): Gram [[0, π^i], [σ(π)^i, 0]]."""
    p = ring.pi ** i
    return HermitianLattice(ring, ((ring.zero, p), (p.sigma(), ring.zero)))


def diagonal(ring: RingContext, entries) -> HermitianLattice:
    n = len(entries)
    G = zeros(ring, n, n)
    for a, e in enumerate(entries):
        G[a][a] = _coerce(ring, e)
    return new_lattice(G, ring, check_degenerate=False)


def binary(ring: RingContext, a, b, c) -> HermitianLattice:
    """A(a, b, c): Gram [[a, c], [σ(c), b]] (diagonal entries first, off-diagonal last)."""
    a, b, c = (_coerce(ring, x) for x in (a, b, c))
    return new_lattice([[a, c], [c.sigma(), b]], ring, check_degenerate=False)


def with_ring(L: HermitianLattice, ring: RingContext) -> HermitianLattice:
    """Reinterpret the Gram entries at another precision (coefficients are reduced or kept)."""
    G = [[ring.elem(list(x.a0), list(x.a1)) for x in row] for row in L.gram]
    return HermitianLattice(ring, tuple(tuple(r) for r in G))
