"""Linear algebra over the residue field κ = F_{2^r} (vectors are lists of ints)."""

from __future__ import annotations

from .ring import ResidueField

Vec = list


def rref(K: ResidueField, rows: list[Vec]) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and their pivot columns."""
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncols = len(M[0])
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = K.inv(M[rank][col])
        M[rank] = [K.mul(inv, x) for x in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col]:
                fac = M[r][col]
                M[r] = [x ^ K.mul(fac, y) for x, y in zip(M[r], M[rank])]
        pivots.append(col)
        rank += 1
    return M[:rank], pivots


def rank(K: ResidueField, rows: list[Vec]) -> int:
    return len(rref(K, rows)[0])


def span_basis(K: ResidueField, rows: list[Vec]) -> list[Vec]:
    return rref(K, rows)[0]


def kernel(K: ResidueField, M: list[Vec], ncols: int) -> list[Vec]:
    """Basis of {x : M·x = 0} in κ^ncols."""
    R, pivots = rref(K, M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        x = [0] * ncols
        x[fcol] = 1
        for row, p in zip(R, pivots):
            x[p] = row[fcol]  # char 2: −a = a
        basis.append(x)
    return basis


def solve(K: ResidueField, M: list[Vec], b: Vec, ncols: int) -> Vec | None:
    """One solution of M·x = b (free variables set to 0), or None."""
    aug = [list(row) + [bv] for row, bv in zip(M, b)]
    R, pivots = rref(K, aug)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for row, p in zip(R, pivots):
        x[p] = row[ncols]
    return x


def combine(K: ResidueField, coeffs: Vec, vectors: list[Vec], dim: int) -> Vec:
    out = [0] * dim
    for c, v in zip(coeffs, vectors):
        if c:
            for j in range(dim):
                if v[j]:
                    out[j] ^= K.mul(c, v[j])
    return out


def bilinear(K: ResidueField, F: list[Vec], x: Vec, y: Vec) -> int:
    acc = 0
    for a, xa in enumerate(x):
        if not xa:
            continue
        row = F[a]
        for b, yb in enumerate(y):
            if yb and row[b]:
                acc ^= K.mul(K.mul(xa, yb), row[b])
    return acc


def restrict(K: ResidueField, F: list[Vec], basis: list[Vec]) -> list[Vec]:
    """Gram matrix of the bilinear form F on the given basis vectors."""
    return [[bilinear(K, F, x, y) for y in basis] for x in basis]


def radical(K: ResidueField, F: list[Vec], basis: list[Vec], dim: int) -> list[Vec]:
    """Radical of F restricted to span(basis), as vectors of κ^dim."""
    if not basis:
        return []
    Fs = restrict(K, F, basis)
    return [combine(K, c, basis, dim) for c in kernel(K, Fs, len(basis))]


def complement(K: ResidueField, sub: list[Vec], ambient: list[Vec]) -> list[Vec]:
    """Vectors of `ambient` extending a basis of span(sub) to a basis of span(ambient)."""
    current = span_basis(K, sub)
    r = len(current)
    extra = []
    for v in ambient:
        if rank(K, current + [v]) > r:
            current = current + [v]
            r += 1
            extra.append(v)
    return extra


def is_subspace(K: ResidueField, sub: list[Vec], sup: list[Vec]) -> bool:
    return rank(K, sup + sub) == rank(K, sup)


def standard_basis(dim: int) -> list[Vec]:
    return [[1 if a == b else 0 for b in range(dim)] for a in range(dim)]
