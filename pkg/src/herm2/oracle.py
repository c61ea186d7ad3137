"""Brute-force verification: congruence counts, normalized densities and isometry search.

The solutions X of σ(ᵗX)·H·X ≡ H mod π^e are grown one π-adic digit at a
time: every solution mod π^e is extended by all f^{n²} digit matrices over κ
and the extensions satisfying the congruence mod π^{e+1} are kept.  When the
gram matrix is divisible by π^s, X mod π^e fixes the residual mod π^{e+s}, so
the digit tested at step e sits at level e + s and each surviving class mod
π^{2d-s} stands for f^{s·n²} classes mod 2^d.  All arithmetic is vectorized with numpy
over int64 arrays of shape (..., n, n, 2, r) holding (a0, a1) coefficients.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, PrecisionExhausted
from .lattice import HermitianLattice, determinant, identity, is_unit_matrix, scale_exp
from .ring import INF, RingContext

DEFAULT_BUDGET = 1 << 24
CHUNK_ROWS = 1 << 18  # candidate matrices evaluated per numpy batch
MAX_ORACLE_K = 30
BEAM_START = 64


def default_budget() -> int:
    env = os.environ.get("HERM2_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class VecRing:
    """Vectorized arithmetic of B/2^k on arrays whose last two axes are (2, r)."""

    def __init__(self, ring: RingContext, k: int):
        if k > MAX_ORACLE_K:
            raise ValueError(f"oracle precision {k} exceeds {MAX_ORACLE_K}")
        self.ring, self.k, self.r = ring, k, ring.r
        self.mask = np.int64((1 << k) - 1)
        self.phi = ring.phi
        self.c0 = np.array([c & ((1 << k) - 1) for c in ring.c0], dtype=np.int64)
        self.c1 = ring.c1

    def from_elem(self, x) -> np.ndarray:
        m = int(self.mask)
        return np.array([[a & m for a in x.a0], [a & m for a in x.a1]], dtype=np.int64)

    def from_matrix(self, M) -> np.ndarray:
        return np.array([[self.from_elem(x) for x in row] for row in M], dtype=np.int64)

    def amul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        m, r = self.mask, self.r
        if r == 1:
            return (a * b) & m
        shape = np.broadcast_shapes(a.shape, b.shape)[:-1]
        c = np.zeros(shape + (2 * r - 1,), dtype=np.int64)
        for i in range(r):
            for j in range(r):
                c[..., i + j] += (a[..., i] * b[..., j]) & m
        for d in range(2 * r - 2, r - 1, -1):
            t = c[..., d]
            for s in range(r):
                if self.phi[s]:
                    c[..., d - r + s] -= t
        return c[..., :r] & m

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x0, x1 = x[..., 0, :], x[..., 1, :]
        y0, y1 = y[..., 0, :], y[..., 1, :]
        p11 = self.amul(x1, y1)
        z0 = (self.amul(x0, y0) + self.amul(self.c0, p11)) & self.mask
        z1 = self.amul(x0, y1) + self.amul(x1, y0)
        if self.c1:
            z1 = z1 + self.c1 * p11
        return np.stack([z0, z1 & self.mask], axis=-2)

    def sigma(self, x: np.ndarray) -> np.ndarray:
        x0, x1 = x[..., 0, :], x[..., 1, :]
        z0 = (x0 + self.c1 * x1) & self.mask if self.c1 else x0
        return np.stack([z0, (-x1) & self.mask], axis=-2)

    def matmul(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        n, p = X.shape[-4], Y.shape[-3]
        rows = []
        for a in range(n):
            cols = []
            for b in range(p):
                acc = self.mul(X[..., a, 0, :, :], Y[..., 0, b, :, :])
                for t in range(1, X.shape[-3]):
                    acc = acc + self.mul(X[..., a, t, :, :], Y[..., t, b, :, :])
                cols.append(acc & self.mask)
            rows.append(np.stack(cols, axis=-3))
        return np.stack(rows, axis=-4)

    def conj_t(self, X: np.ndarray) -> np.ndarray:
        return self.sigma(np.swapaxes(X, -4, -3))

    def vanishes_to(self, F: np.ndarray, e: int) -> np.ndarray:
        """Boolean mask: every entry of F has π-valuation ≥ e (reduces the trailing 4 axes)."""
        m0 = np.int64((1 << ((e + 1) // 2)) - 1)
        m1 = np.int64((1 << (e // 2)) - 1)
        ok0 = (F[..., 0, :] & m0) == 0
        ok1 = (F[..., 1, :] & m1) == 0
        ok = ok0.all(axis=-1) & ok1.all(axis=-1)
        return ok.all(axis=(-1, -2))


def _pi_power(vr: VecRing, e: int) -> np.ndarray:
    return vr.from_elem(vr.ring.pi ** e)


@dataclass
class CountProfile:
    n: int
    f: int
    depths: list = field(default_factory=list)
    raw_counts: list = field(default_factory=list)
    normalized: list = field(default_factory=list)
    stabilized_at: int | None = None
    stabilized_value: Fraction | None = None
    min_depth: int = 1
    layer_states: list = field(default_factory=list)  # solutions mod π^e for e = 0, 1, ...
    fibers: list = field(default_factory=list)  # per layer: (parents, dead parents, min, max children)
    budget_exceeded: bool = False

    @property
    def stabilized(self) -> bool:
        return self.stabilized_at is not None

    @property
    def no_stabilization(self) -> bool:
        return self.stabilized_at is None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "f": self.f,
            "depths": self.depths,
            "raw_counts": [str(c) for c in self.raw_counts],
            "normalized": [str(v) for v in self.normalized],
            "stabilized_at": self.stabilized_at,
            "stabilized_value": None if self.stabilized_value is None else str(self.stabilized_value),
            "min_depth": self.min_depth,
            "layer_states": [str(s) for s in self.layer_states],
            "fibers": [list(map(int, fb)) for fb in self.fibers],
            "no_stabilization": self.no_stabilization,
            "budget_exceeded": self.budget_exceeded,
        }


class _Lifter:
    """Digit-by-digit solution sets of σ(ᵗX)·H·X ≡ G.

    With s = `offset` ≤ every Gram valuation and e ≥ 1, the term
    σ(π^e·Y)ᵗ·H·π^e·Y vanishes mod π^{e+s+1}, so the residual
    R(X + π^e·Y) = F(X) − G + Σ_b y_b·T_b(X) mod π^{e+s+1}, summed over the
    bits y_b of the digit matrix Y.  Every summand has valuation ≥ e+s, so the
    π^{e+s} digit of the sum is the XOR of the summands' digits: each hermitian
    residual is packed into one machine word of digit bits (upper triangle)
    and all f^{n²} candidates are XOR combinations of r·n² words.
    """

    def __init__(self, H, G, ring: RingContext, depth_pi: int, offset: int = 0):
        self.n = len(H)
        # X mod π^e already fixes the residual mod π^{e+offset} when every Gram entry has valuation ≥ offset
        self.offset = offset
        k = (depth_pi + offset + 1) // 2 + 1
        self.vr = VecRing(ring, k)
        self.H = self.vr.from_matrix(H)
        self.G = self.vr.from_matrix(G)
        self.bits = _bit_matrices(self.vr, self.n)  # (r·n², n, n, 2, r)
        self.digits = _from_bits(self.bits)  # (f^{n²}, n, n, 2, r), index bit b ↔ bits[b]
        self.triu = np.triu_indices(self.n)
        if len(self.triu[0]) * ring.r > 62:
            raise ValueError("digit pattern does not fit a machine word; reduce n or r")

    def extend(self, states: np.ndarray, e: int, keep: bool = True):
        """Extensions of X mod π^e to X mod π^{e+1} with residual ≡ 0 mod π^{e+1+offset}.

        Returns (new states or None, number of solutions, children per parent).
        """
        vr = self.vr
        pe = _pi_power(vr, e)
        piY = vr.mul(pe, self.digits)  # (C, n, n, 2, r)
        C = len(piY)
        per = max(1, CHUNK_ROWS // C)
        kept, total, children = [], 0, []
        for s in range(0, len(states), per):
            X = states[s:s + per]
            if e == 0:
                Xc = (X[:, None] + piY[None]) & vr.mask
                R = (vr.matmul(vr.conj_t(Xc), vr.matmul(self.H, Xc)) - self.G) & vr.mask
                ok = vr.vanishes_to(R, 1 + self.offset)
            else:
                ok = self._digit_words(X, pe, e + self.offset) == 0
            children.append(ok.sum(axis=1))
            total += int(ok.sum())
            if keep:
                par, idx = np.nonzero(ok)
                kept.append((X[par] + piY[idx]) & vr.mask)
        child = np.concatenate(children) if children else np.zeros(0, dtype=np.int64)
        if not keep:
            return None, total, child
        new = np.concatenate(kept) if kept else np.zeros((0,) + piY.shape[1:], dtype=np.int64)
        return new, total, child

    def _pattern(self, R: np.ndarray, level: int) -> np.ndarray:
        """π^level digits of the upper-triangle entries of R (valuation ≥ level), packed into int64."""
        comp = level % 2  # the digit sits in a0 for even levels and in a1 for odd ones
        sel = R[..., self.triu[0], self.triu[1], comp, :]
        bits = (sel >> (level // 2)) & 1
        flat = bits.reshape(bits.shape[:-2] + (-1,))
        return (flat << np.arange(flat.shape[-1], dtype=np.int64)).sum(axis=-1)

    def _digit_words(self, X: np.ndarray, pe: np.ndarray, level: int) -> np.ndarray:
        """Digit words at π^level of the residuals of all extensions of each state."""
        vr = self.vr
        A = vr.matmul(vr.conj_t(X), self.H)  # σ(ᵗX)·H, (S, n, n, 2, r)
        F0 = (vr.matmul(A, X) - self.G) & vr.mask
        E = vr.mul(pe, self.bits)  # (B, n, n, 2, r)
        Cb = vr.matmul(A[:, None], E[None])  # (S, B, n, n, 2, r)
        T = (Cb + vr.conj_t(Cb)) & vr.mask
        words = self._pattern(T, level)  # (S, B)
        V = self._pattern(F0, level)[:, None]
        for b in range(words.shape[1]):
            V = np.concatenate([V, V ^ words[:, b:b + 1]], axis=1)
        return V


def _bit_matrices(vr: VecRing, n: int) -> np.ndarray:
    """Matrices t^j·E_{ab}: one per bit of a digit matrix over κ."""
    out = []
    for a in range(n):
        for b in range(n):
            for j in range(vr.r):
                m = np.zeros((n, n, 2, vr.r), dtype=np.int64)
                m[a, b, 0, j] = 1
                out.append(m)
    return np.array(out, dtype=np.int64)


def _from_bits(bits: np.ndarray) -> np.ndarray:
    """All 0/1 combinations of `bits`, candidate index bit b selecting bits[b]."""
    out = np.zeros((1,) + bits.shape[1:], dtype=np.int64)
    for b in range(len(bits)):
        out = np.concatenate([out, out + bits[b]], axis=0)
    return out


def _matrix_data(L: HermitianLattice, depth: int):
    ring = L.ring
    if ring.k < depth:
        raise PrecisionExhausted(f"lattice precision {ring.k} is below oracle depth {depth}")
    return L.rows()


def _fiber_stats(child: np.ndarray) -> tuple:
    alive = child[child > 0]
    if len(alive) == 0:
        return (len(child), len(child), 0, 0)
    return (len(child), int((child == 0).sum()), int(alive.min()), int(alive.max()))


def congruence_count(L: HermitianLattice, d: int, budget: int | None = None) -> int:
    """#{X ∈ M_n(B/2^d B) : σ(ᵗX)·H·X ≡ H mod 2^d}."""
    prof = normalized_density(L, d, min_depth=d + 1, budget=budget)
    return prof.raw_counts[-1]


def default_min_depth(L: HermitianLattice) -> int:
    """First 2-adic depth at which agreement of consecutive normalized counts is trusted."""
    if L.n == 0:
        return 1
    v = determinant(L.rows(), L.ring).val()
    if v == INF:
        raise PrecisionExhausted("determinant vanishes at working precision")
    return v // 2 + 2


def normalized_density(L: HermitianLattice, d_max: int, min_depth: int | None = None,
                       budget: int | None = None) -> CountProfile:
    """Normalized counts #{X mod 2^d}·f^{-d·n²} for d = 1, 2, … until two consecutive ones agree.

    With s the scale exponent of L, X mod π^{2d-s} already fixes the residual
    mod 2^d, so the count is f^{s·n²} times the number of such truncations.
    """
    if d_max < 1:
        raise ValueError("d_max must be at least 1")
    budget = default_budget() if budget is None else budget
    n, f = L.n, L.ring.f
    prof = CountProfile(n, f, min_depth=default_min_depth(L) if min_depth is None else min_depth)
    if n == 0:
        for d in range(1, d_max + 1):
            _record(prof, d, 1)
            if _stable(prof):
                break
        return prof
    s = scale_exp(L)
    H = _matrix_data(L, d_max)
    lifter = _Lifter(H, H, L.ring, 2 * d_max, offset=s)
    pad = f ** (s * n * n)
    states = np.zeros((1, n, n, 2, L.ring.r), dtype=np.int64)
    prof.layer_states.append(1)
    for d in range(1, d_max + 1):
        if 2 * d - s > 0:
            break
        _record(prof, d, f ** (2 * d * n * n))  # every X qualifies while 2d ≤ s
        if _stable(prof):
            return prof
    last = 2 * d_max - s  # number of π-digit layers needed for depth d_max
    for e in range(last):
        final = e + 1 == last
        new, total, child = lifter.extend(states, e, keep=not final)
        prof.fibers.append(_fiber_stats(child))
        prof.layer_states.append(total)
        level = e + 1 + s
        if level % 2 == 0:
            _record(prof, level // 2, total * pad)
            if _stable(prof):
                break
        if final:
            break
        if total > budget:
            prof.budget_exceeded = True
            raise BudgetExceeded(f"{total} states at π-depth {e + 1} exceed budget {budget}", profile=prof)
        states = new
    return prof


def _record(prof: CountProfile, d: int, count: int) -> None:
    prof.depths.append(d)
    prof.raw_counts.append(count)
    prof.normalized.append(Fraction(count, prof.f ** (d * prof.n * prof.n)))


def _stable(prof: CountProfile) -> bool:
    if len(prof.normalized) < 2:
        return False
    d = prof.depths[-1]
    if d - 1 >= prof.min_depth and prof.normalized[-1] == prof.normalized[-2]:
        prof.stabilized_at = d
        prof.stabilized_value = prof.normalized[-1]
        return True
    return False


def exhaustive_count_rank1(L: HermitianLattice, d: int) -> int:
    """Independent count for n = 1 by enumerating every x ∈ B/2^d B."""
    if L.n != 1:
        raise ValueError("rank-1 lattices only")
    ring = L.ring.with_precision(max(d, 1))
    h = ring.elem(list(L.gram[0][0].a0), list(L.gram[0][0].a1))
    count = 0
    m = 1 << d
    for coeffs in itertools.product(range(m), repeat=2 * ring.r):
        x = ring.elem(list(coeffs[: ring.r]), list(coeffs[ring.r:]))
        if (x.sigma() * h * x - h).val() >= 2 * d:
            count += 1
    return count


def isometry_search(L1: HermitianLattice, L2: HermitianLattice, depth: int,
                    budget: int | None = None):
    """U with σ(ᵗU)·G1·U ≡ G2 mod π^depth and unit determinant, or None.

    Residue-level solutions with invertible reduction are lifted digit by
    digit.  Passes keep at most `width` partial solutions per layer, spread
    over their residue-level ancestors, and the width grows until a pass
    runs untruncated; so None is a genuine obstruction mod π^depth.
    """
    if L1.n != L2.n:
        return None
    budget = default_budget() if budget is None else budget
    n, ring = L1.n, L1.ring
    if n == 0:
        return []
    s = min(scale_exp(L1), scale_exp(L2))
    if s >= depth:
        return identity(ring, n)
    need = (depth + 1) // 2
    lifter = _Lifter(_matrix_data(L1, need), _matrix_data(L2, need), ring, depth, offset=s)
    start = np.zeros((1, n, n, 2, ring.r), dtype=np.int64)
    roots, _, _ = lifter.extend(start, 0)
    roots = roots[[t for t in range(len(roots)) if is_unit_matrix(_to_matrix(ring, roots[t]), ring)]]
    width = BEAM_START
    while True:
        truncated = False
        states, origin = roots, np.arange(len(roots))
        for e in range(1, depth - s):
            if len(states) == 0:
                break
            if len(states) > width:
                pick = _spread(origin, width)
                states, origin, truncated = states[pick], origin[pick], True
            states, _, child = lifter.extend(states, e)
            origin = np.repeat(origin, child)
            if len(states) > budget:
                raise BudgetExceeded(f"{len(states)} partial isometries at π-depth {e + 1} exceed budget {budget}")
        if len(states):
            return _to_matrix(ring, states[0])
        if not truncated:
            return None
        width *= 16


def _spread(origin: np.ndarray, width: int) -> np.ndarray:
    """Indices of `width` states taken round-robin over their residue-level ancestors."""
    order = np.argsort(origin, kind="stable")
    sorted_origin = origin[order]
    starts = np.searchsorted(sorted_origin, sorted_origin, side="left")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order)) - starts
    pick = np.lexsort((origin, rank))[:width]
    return np.sort(pick)


def _to_matrix(ring: RingContext, X: np.ndarray):
    n = X.shape[0]
    return [[ring.elem([int(c) for c in X[a, b, 0]], [int(c) for c in X[a, b, 1]]) for b in range(n)] for a in range(n)]
