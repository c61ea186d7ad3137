"""Jordan splitting into π^i-modular blocks and classification of the block types.

The splitting is the usual greedy one: take the minimal valuation v among the
remaining Gram entries; if a diagonal entry attains it, split off that rank-1
piece, otherwise split off a 2×2 piece on an off-diagonal entry of valuation v
(whose determinant then has valuation exactly 2v).  Off-diagonal traces always
have valuation > v, so no other rank-1 candidate can attain v.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property

from .errors import PrecisionExhausted
from .lattice import HermitianLattice, congruent, identity, norm_exp, with_ring
from .ring import INF, Case, RingContext

# Extra π-digits the residue-form computations need beyond the largest scale.
PRECISION_MARGIN = 10


class Parity(str, enum.Enum):
    I = "I"
    II = "II"


class RankParity(str, enum.Enum):
    IO = "Io"
    IE = "Ie"
    NA = "NA"


class Boundness(str, enum.Enum):
    FREE = "Free"
    BOUND_I = "BoundI"
    BOUND_II = "BoundII"
    NA = "NA"


@dataclass(frozen=True)
class JordanBlock:
    i: int
    rank: int
    norm_exp: object  # own norm exponent of the block; INF for the zero block
    parity: Parity = Parity.II
    rank_parity: RankParity = RankParity.NA
    boundness: Boundness = Boundness.NA
    columns: tuple = ()  # column indices of the block inside the Jordan basis
    arf: int | None = None  # only for abstract decompositions without a Gram matrix

    @property
    def type_one(self) -> bool:
        return self.parity is Parity.I

    @property
    def bound(self) -> bool:
        return self.boundness in (Boundness.BOUND_I, Boundness.BOUND_II)

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "rank": self.rank,
            "norm_exp": None if self.norm_exp == INF else self.norm_exp,
            "parity": self.parity.value,
            "rank_parity": self.rank_parity.value,
            "boundness": self.boundness.value,
        }


@dataclass
class JordanDecomposition:
    case: Case
    f: int
    blocks: list  # nonzero JordanBlocks, strictly increasing i
    ring: RingContext | None = None
    U: list | None = None  # base change witness (columns = Jordan basis)
    D: list | None = None  # σ(ᵗU)·G·U, block diagonal up to `residual_val`
    residual_val: object = INF
    lattice: HermitianLattice | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return sum(b.rank for b in self.blocks)

    @property
    def indices(self) -> list[int]:
        return [b.i for b in self.blocks]

    @property
    def N_bound(self) -> int:
        return max(self.indices) + 1 if self.blocks else 0

    def rank_at(self, i: int) -> int:
        b = self._by_index.get(i)
        return b.rank if b else 0

    @cached_property
    def _by_index(self) -> dict:
        return {b.i: b for b in self.blocks}

    def index_range(self, pad: int = 4) -> range:
        if not self.blocks:
            return range(0)
        return range(min(self.indices) - pad, max(self.indices) + pad + 1)

    def type_one(self, i: int) -> bool:
        return _type_one(self.case, self._by_index, i)

    def block_at(self, i: int) -> JordanBlock:
        """The classified block L_i, including zero blocks."""
        if i in self._by_index:
            return self._by_index[i]
        b = JordanBlock(i, 0, INF)
        return _flag(self.case, self._by_index, b)

    def block_gram(self, i: int) -> list:
        b = self._by_index[i]
        return [[self.D[r][c] for c in b.columns] for r in b.columns]

    def type_data(self) -> list[tuple]:
        return [(b.i, b.rank, b.parity.value, b.rank_parity.value, b.boundness.value) for b in self.blocks]

    def to_json(self) -> dict:
        out = {"case": int(self.case), "f": self.f, "n": self.n, "blocks": [b.to_json() for b in self.blocks]}
        if self.U is not None:
            out["witness"] = [[x.to_json() for x in row] for row in self.U]
        return out


# ---- classification ------------------------------------------------------------

def _own_type_one(case: Case, b: JordanBlock | None, i: int) -> bool:
    if b is None or b.rank == 0:
        return False
    if i % 2 == 0:
        return b.norm_exp == i
    return case is Case.CASE2 and b.norm_exp == i + 1


def _type_one(case: Case, by_index: dict, i: int) -> bool:
    own = _own_type_one(case, by_index.get(i), i)
    if i % 2 == 0 or case is Case.CASE1 or own:
        return own
    # case 2, odd i: the additive form on A_i also sees the norms of L_{i±1}
    return _own_type_one(case, by_index.get(i - 1), i - 1) or _own_type_one(case, by_index.get(i + 1), i + 1)


def _flag(case: Case, by_index: dict, b: JordanBlock) -> JordanBlock:
    i = b.i
    t1 = _type_one(case, by_index, i)
    if i % 2 == 0 and t1:
        bound = _type_one(case, by_index, i - 2) or _type_one(case, by_index, i + 2)
    else:
        bound = _type_one(case, by_index, i - 1) or _type_one(case, by_index, i + 1)
    if bound:
        boundness = Boundness.BOUND_I if t1 else Boundness.BOUND_II
    else:
        boundness = Boundness.FREE
    if t1:
        rp = RankParity.IO if b.rank % 2 else RankParity.IE
    else:
        rp = RankParity.NA
    return replace(b, parity=Parity.I if t1 else Parity.II, rank_parity=rp, boundness=boundness)


def classify(dec: JordanDecomposition) -> JordanDecomposition:
    by_index = {b.i: b for b in dec.blocks}
    blocks = [_flag(dec.case, by_index, b) for b in sorted(dec.blocks, key=lambda b: b.i)]
    return replace(dec, blocks=blocks, _cache={})


def abstract_decomposition(case, f: int, specs) -> JordanDecomposition:
    """Decomposition from type data alone.

    `specs` holds tuples (i, rank, own_type_one[, arf]); `own_type_one` says
    whether the block by itself has norm ideal as large as possible (i for
    even i, i+1 for odd i in case 2; ignored for odd i in case 1).
    """
    case = Case(int(case))
    blocks = []
    for spec in specs:
        i, rank, own = spec[0], spec[1], spec[2]
        arf = spec[3] if len(spec) > 3 else None
        if rank == 0:
            continue
        if i % 2 == 0:
            ne = i if own else i + 2
        elif case is Case.CASE1:
            ne = i + 1
        else:
            ne = i + 1 if own else i + 3
        blocks.append(JordanBlock(i, rank, ne, arf=arf))
    if len({b.i for b in blocks}) != len(blocks):
        raise ValueError("block indices must be distinct")
    return classify(JordanDecomposition(case, f, blocks))


# ---- splitting ---------------------------------------------------------------

def _split_once(G: list, ring: RingContext, active: list[int]):
    """Choose the next pivot among `active`; returns (v, piece)."""
    v = INF
    for a in active:
        for b in active:
            if b >= a:
                v = min(v, G[a][b].val())
    if v == INF:
        raise PrecisionExhausted("remaining Gram block vanishes at working precision")
    for a in active:
        if G[a][a].val() == v:
            return v, [a]
    for a in active:
        for b in active:
            if b > a and G[a][b].val() == v:
                return v, [a, b]
    raise AssertionError("no pivot found")  # unreachable


def _solve_piece(G, piece, y, v):
    """Coefficients c with G[piece][piece]·c = G[piece][y], computed after dividing by π^v."""
    if len(piece) == 1:
        (p,) = piece
        return [G[p][y].shift(v) * G[p][p].shift(v).inverse()]
    p, q = piece
    a, b = G[p][p].shift(v), G[p][q].shift(v)
    c, d = G[q][p].shift(v), G[q][q].shift(v)
    r0, r1 = G[p][y].shift(v), G[q][y].shift(v)
    det_inv = (a * d - b * c).inverse()
    return [(d * r0 - b * r1) * det_inv, (a * r1 - c * r0) * det_inv]


def jordan_split(L: HermitianLattice) -> JordanDecomposition:
    ring = L.ring
    n = L.n
    G0 = L.rows()
    G = [row[:] for row in G0]
    U = identity(ring, n)
    active = list(range(n))
    pieces: list[tuple[int, list[int]]] = []
    while active:
        v, piece = _split_once(G, ring, active)
        others = [a for a in active if a not in piece]
        if others:
            T = identity(ring, n)
            for y in others:
                for p, c in zip(piece, _solve_piece(G, piece, y, v)):
                    T[p][y] = -c
            U = _mul_cols(U, T)
            G = congruent(G, T)
        pieces.append((v, piece))
        active = others

    scales = sorted({v for v, _ in pieces})
    order = [c for s in scales for v, piece in pieces if v == s for c in piece]
    U = [[row[c] for c in order] for row in U]
    D = congruent(G0, U)
    pos = {c: t for t, c in enumerate(order)}
    blocks = []
    for s in scales:
        cols = tuple(pos[c] for v, piece in pieces if v == s for c in piece)
        sub = HermitianLattice(ring, tuple(tuple(D[r][c] for c in cols) for r in cols))
        blocks.append(JordanBlock(s, len(cols), norm_exp(sub), columns=cols))

    col_block = {c: b.i for b in blocks for c in b.columns}
    residual = INF
    for r in range(n):
        for c in range(n):
            if col_block[r] != col_block[c]:
                residual = min(residual, D[r][c].val())
    top = max(scales) if scales else 0
    if 2 * ring.k < top + PRECISION_MARGIN + 2 or residual < top + PRECISION_MARGIN:
        raise PrecisionExhausted(f"precision k={ring.k} too small for largest scale {top}")
    dec = JordanDecomposition(Case(ring.case), ring.f, blocks, ring=ring, U=U, D=D, residual_val=residual, lattice=L)
    return classify(dec)


def _mul_cols(U, T):
    n = len(U)
    out = []
    for row in U:
        new = []
        for c in range(n):
            acc = None
            for t in range(n):
                if T[t][c].is_zero():
                    continue
                term = row[t] * T[t][c]
                acc = term if acc is None else acc + term
            new.append(acc if acc is not None else T[0][0].ring.zero)
        out.append(new)
    return out


def required_precision(L: HermitianLattice) -> int:
    """A starting 2-adic precision: twice the largest Gram valuation plus headroom."""
    vals = [x.val() for row in L.gram for x in row if x.val() != INF]
    top = max(vals, default=0)
    return max(L.ring.k, (2 * top + 6 + PRECISION_MARGIN + 1) // 2 + 1)


def split_with_retry(L: HermitianLattice, max_k: int = 512) -> JordanDecomposition:
    """Jordan split, doubling the precision until the split is certified."""
    k = required_precision(L)
    while True:
        Lk = L if k == L.ring.k else with_ring(L, L.ring.with_precision(k))
        try:
            return jordan_split(Lk)
        except PrecisionExhausted:
            if 2 * k > max_k:
                raise
            k *= 2
