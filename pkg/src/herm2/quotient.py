"""Residue-field forms attached to the sublattices A_i ⊇ B_i ⊇ ... of a Jordan decomposition.

Everything is computed in the κ-space V = A_i/πA_i with the basis
b_v = π^{max(0, i - j)}·e_v, where e_v runs through the Jordan basis and j is
the scale of the block containing e_v.  With i = 2m or 2m - 1:

* X̄ is the radical of h/π^i mod π;
* B̄ is the zero set of the additive polynomial h(x,x)/2^m mod 2 (all of V
  when that polynomial is not additive, i.e. case 1 with i odd);
* e (i even) is the vector with h(v,e)² ≡ h(v,v) after scaling by (πσ(π))^m;
* Ȳ is the radical of the alternating form on B̄ (case 1 even i, case 2 odd i);
* Z̄ is the kernel of the quadratic form (case 1 odd i on V, case 2 even i).

For case 2 and even i the quadratic form h(x,x)/2^{m+1} is only well defined
on B_i/πB_i, so Z̄ is computed there, using an explicit basis of B_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kspace
from .errors import CaseMismatch, PrecisionExhausted
from .jordan import JordanDecomposition
from .ring import INF, BElem, Case, ResidueField, a_digit


# ---- quadratic forms over κ ---------------------------------------------------

@dataclass
class QuadraticForm:
    """Q(x) = Σ q_v x_v² + Σ_{v<w} P_vw x_v x_w; P is the (alternating) polar matrix."""

    K: ResidueField
    q: list
    polar: list

    @property
    def dim(self) -> int:
        return len(self.q)

    def value(self, x) -> int:
        K = self.K
        acc = 0
        for a, xa in enumerate(x):
            if xa:
                acc ^= K.mul(K.mul(xa, xa), self.q[a])
                row = self.polar[a]
                for b in range(a + 1, len(x)):
                    if x[b] and row[b]:
                        acc ^= K.mul(K.mul(xa, x[b]), row[b])
        return acc

    def restrict(self, basis: list) -> QuadraticForm:
        return QuadraticForm(self.K, [self.value(v) for v in basis], kspace.restrict(self.K, self.polar, basis))

    def kernel(self, basis: list | None = None) -> list:
        """Zero set of Q inside the polar radical of span(basis) (a linear subspace)."""
        K = self.K
        if basis is None:
            basis = kspace.standard_basis(self.dim)
        rad = kspace.radical(K, self.polar, basis, self.dim)
        if not rad:
            return []
        row = [K.sqrt(self.value(r)) for r in rad]
        coeffs = kspace.kernel(K, [row], len(rad))
        return [kspace.combine(K, c, rad, self.dim) for c in coeffs]


def arf_invariant(Q: QuadraticForm):
    """Arf invariant in Z/2 of a nonsingular even-dimensional form; None when not defined."""
    K = Q.K
    if Q.dim % 2 or kspace.radical(K, Q.polar, kspace.standard_basis(Q.dim), Q.dim):
        return None
    vecs = kspace.standard_basis(Q.dim)
    total = 0
    while vecs:
        x = vecs.pop(0)
        j = next(t for t, y in enumerate(vecs) if kspace.bilinear(K, Q.polar, x, y))
        y = vecs.pop(j)
        inv = K.inv(kspace.bilinear(K, Q.polar, x, y))
        y = [K.mul(inv, c) for c in y]
        total ^= K.mul(Q.value(x), Q.value(y))
        reduced = []
        for z in vecs:
            zy = kspace.bilinear(K, Q.polar, z, y)
            zx = kspace.bilinear(K, Q.polar, z, x)
            reduced.append([c ^ K.mul(zy, xc) ^ K.mul(zx, yc) for c, xc, yc in zip(z, x, y)])
        vecs = reduced
    return K.abs_trace(total)


def zero_count(Q: QuadraticForm) -> int:
    """Number of x ∈ κ^d with Q(x) = 0, by enumeration."""
    import itertools

    f = Q.K.order
    return sum(1 for x in itertools.product(range(f), repeat=Q.dim) if Q.value(list(x)) == 0)


def expected_zero_count(f: int, d: int, arf: int) -> int:
    eps = 1 if arf == 0 else -1
    return f ** (d - 1) + eps * (f ** (d // 2) - f ** (d // 2 - 1))


@dataclass
class ResidueForm:
    kind: str  # "symplectic" or "quadratic"
    dim: int
    matrix: list  # alternating Gram matrix, or the polar matrix of the quadratic form
    q: list | None = None
    arf: int | None = None
    space_tag: str = ""
    K: ResidueField | None = field(default=None, repr=False)

    def quadratic(self) -> QuadraticForm:
        return QuadraticForm(self.K, self.q, self.matrix)

    def is_nonsingular(self) -> bool:
        K = self.K
        std = kspace.standard_basis(self.dim)
        if self.kind == "symplectic":
            alternating = all(self.matrix[a][a] == 0 for a in range(self.dim))
            return alternating and kspace.rank(K, self.matrix) == self.dim
        rad = kspace.radical(K, self.matrix, std, self.dim)
        if len(rad) > 1:
            return False
        return not rad or self.quadratic().value(rad[0]) != 0

    def to_json(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim, "matrix": self.matrix, "space": self.space_tag}
        if self.kind == "quadratic":
            out["q"] = self.q
            out["arf"] = self.arf
        return out


# ---- the chain of sublattices ------------------------------------------------

@dataclass
class SublatticeChain:
    i: int
    case: Case
    n: int
    X: list
    B: list
    W: list
    Y: list | None
    Z: list | None
    e: list
    additive: bool  # whether h(x,x)/2^m mod 2 is additive on A_i/πA_i
    z_space: str = "A_i/πA_i"
    q_forms: dict = field(default_factory=dict, repr=False)

    def dims(self) -> dict:
        d = {"A/B": self.n - len(self.B), "W/X": len(self.W) - len(self.X)}
        if self.Y is not None:
            d["B/Y"] = len(self.B) - len(self.Y)
        if self.Z is not None:
            d["Z-quotient"] = self.n - len(self.Z)
        return d


class _IndexData:
    """Scaled Gram matrix of A_i in the Jordan basis and its residue-level forms."""

    def __init__(self, dec: JordanDecomposition, i: int):
        if dec.D is None:
            raise ValueError("decomposition carries no Gram data")
        ring = dec.ring
        if 2 * ring.k < i + 6 or dec.residual_val < i + 6:
            raise PrecisionExhausted(f"precision too small for index {i}")
        self.dec, self.i, self.ring, self.K = dec, i, ring, ring.kappa
        self.case = dec.case
        n = dec.n
        self.n = n
        scale = [0] * n
        for b in dec.blocks:
            for c in b.columns:
                scale[c] = b.i
        self.shift_exp = [max(0, i - j) for j in scale]
        pows = {a: ring.pi ** a for a in set(self.shift_exp)}
        self.basis_pows = [pows[a] for a in self.shift_exp]
        self.G = [
            [self.basis_pows[v].sigma() * dec.D[v][w] * self.basis_pows[w] for w in range(n)]
            for v in range(n)
        ]
        self.m = (i + 1) // 2

    def residue_matrix(self, G, s: int) -> list:
        """κ-matrix of G/π^s mod π."""
        return [[_res(x, s) for x in row] for row in G]

    def quadratic(self, G, m: int) -> QuadraticForm:
        """h(x,x)/2^m mod 2 with polar Tr(h(x,y))/2^m mod 2."""
        ring = self.ring
        n = len(G)
        q = [a_digit(ring, G[v][v].a0, m) for v in range(n)]
        P = [[0 if v == w else a_digit(ring, G[v][w].trace().a0, m) for w in range(n)] for v in range(n)]
        return QuadraticForm(self.K, q, P)


def _res(x: BElem, s: int) -> int:
    if x.val() == INF:
        return 0
    return x.shift(s).residue()


def sublattice_chain(dec: JordanDecomposition, i: int) -> SublatticeChain:
    data = _IndexData(dec, i)
    K, n, case, m = data.K, data.n, data.case, data.m
    V = kspace.standard_basis(n)

    beta = data.residue_matrix(data.G, i)
    X = kspace.kernel(K, beta, n)

    QA = data.quadratic(data.G, m)
    additive = not any(any(row) for row in QA.polar)
    if additive:
        ell = [K.sqrt(c) for c in QA.q]
        B = kspace.kernel(K, [ell], n) if any(ell) else V
    else:
        ell = [0] * n
        B = V

    e = [0] * n
    W = X
    if i % 2 == 0:
        if len(B) < n:
            target = [K.sqrt(_res(data.G[v][v], i)) for v in range(n)]
            sol = kspace.solve(K, beta, target, n)
            if sol is None:
                raise AssertionError("special vector equation has no solution")
            e = sol
        W = kspace.span_basis(K, X + [e]) if any(e) else X

    Y = Z = None
    z_space = "A_i/πA_i"
    q_forms = {}
    if case is Case.CASE1 and i % 2 == 0:
        Y = kspace.radical(K, beta, B, n)
    elif case is Case.CASE2 and i % 2 == 1:
        Y = kspace.radical(K, beta, B, n)
    elif case is Case.CASE1:
        Z = QA.kernel()
        q_forms["ambient"] = QA
    else:
        T = _b_lattice_basis(data, ell)
        GB = _congruent(T, data.G)
        QB = data.quadratic(GB, m + 1)
        Z = QB.kernel()
        z_space = "B_i/πB_i"
        q_forms["ambient"] = QB
    return SublatticeChain(i, case, n, X, B, W, Y, Z, e, additive, z_space, q_forms)


def _b_lattice_basis(data: _IndexData, ell: list) -> list:
    """Columns (over B, in A_i-coordinates) of a basis of B_i."""
    ring, K, n = data.ring, data.K, data.n
    cols = [[ring.one if a == b else ring.zero for a in range(n)] for b in range(n)]
    if not any(ell):
        return cols
    p = next(v for v in range(n) if ell[v])
    inv = K.inv(ell[p])
    out = []
    for v in range(n):
        if v == p:
            out.append([ring.pi if a == p else ring.zero for a in range(n)])
        else:
            c = ring.lift_residue(K.mul(ell[v], inv))
            col = [ring.zero] * n
            col[v] = ring.one
            col[p] = -c
            out.append(col)
    return out


def _congruent(cols: list, G: list) -> list:
    """Gram matrix of the vectors `cols` (each a coordinate list) under G."""
    n = len(G)
    GT = [[_dot([G[a][b] for b in range(n)], col) for col in cols] for a in range(n)]
    return [[_dot([x.sigma() for x in colx], [GT[a][c] for a in range(n)]) for c in range(len(cols))] for colx in cols]


def _dot(xs, ys):
    acc = None
    for x, y in zip(xs, ys):
        if x.is_zero() or y.is_zero():
            continue
        t = x * y
        acc = t if acc is None else acc + t
    return acc if acc is not None else xs[0].ring.zero


# ---- public operations ---------------------------------------------------------

def special_vector(dec: JordanDecomposition, i: int) -> list:
    if i % 2:
        raise ValueError("the special vector is only defined for even indices")
    return sublattice_chain(dec, i).e


def induced_symplectic(dec: JordanDecomposition, i: int) -> ResidueForm:
    case = dec.case
    if not ((case is Case.CASE1 and i % 2 == 0) or (case is Case.CASE2 and i % 2 == 1)):
        raise CaseMismatch(f"no induced alternating form at index {i} in case {int(case)}")
    chain = sublattice_chain(dec, i)
    data = _IndexData(dec, i)
    K = data.K
    basis = kspace.complement(K, chain.Y, chain.B)
    beta = data.residue_matrix(data.G, i)
    M = kspace.restrict(K, beta, basis)
    return ResidueForm("symplectic", len(basis), M, space_tag=f"B_{i}/Y_{i}", K=K)


def induced_quadratic(dec: JordanDecomposition, i: int) -> ResidueForm:
    case = dec.case
    if not ((case is Case.CASE1 and i % 2 == 1) or (case is Case.CASE2 and i % 2 == 0)):
        raise CaseMismatch(f"no induced quadratic form at index {i} in case {int(case)}")
    chain = sublattice_chain(dec, i)
    Q = chain.q_forms["ambient"]
    K = Q.K
    basis = kspace.complement(K, chain.Z, kspace.standard_basis(Q.dim))
    R = Q.restrict(basis)
    tag = f"A_{i}/Z_{i}" if case is Case.CASE1 else f"B_{i}/Z_{i}"
    return ResidueForm("quadratic", R.dim, R.polar, q=R.q, arf=arf_invariant(R), space_tag=tag, K=K)


def arf(form: ResidueForm):
    """Arf invariant of a quadratic residue form (None for odd dimension)."""
    if form.kind != "quadratic":
        raise CaseMismatch("Arf invariant needs a quadratic form")
    return arf_invariant(form.quadratic())


def table_dimension(dec: JordanDecomposition, i: int) -> int:
    """Dimension of the quotient carrying the induced form, predicted from the type flags."""
    b = dec.block_at(i)
    n = b.rank
    t1 = dec.type_one(i)
    if dec.case is Case.CASE1:
        if i % 2 == 0:
            if not t1:
                return n
            return n - 1 if n % 2 else n - 2
        return n + 1 if b.bound else n
    if i % 2 == 0:
        if t1:
            return n if n % 2 else n - 1
        return n + 1 if b.bound else n
    if t1 and not b.bound:
        return n - 2
    return n


def computed_dimension(dec: JordanDecomposition, i: int) -> int:
    chain = sublattice_chain(dec, i)
    if chain.Y is not None:
        return len(chain.B) - len(chain.Y)
    return chain.n - len(chain.Z)
