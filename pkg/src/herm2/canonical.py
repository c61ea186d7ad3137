"""Normal forms of Jordan blocks: hyperbolic planes plus a small residual block.

After rescaling a block to index 0 or 1, hyperbolic planes H(i) are split off
one at a time (an isotropic vector x, a partner y with h(x, y) = π^i, then y is
made isotropic by a trace correction).  The rank 1 or 2 remainder is brought
to one of the shapes (a), A(1, 2b, 1), A(2δ, 2b, 1), A(2, 2b, π),
A(4a, 2δ, π) or H(i).  Vectors with a prescribed norm are found by a beam
search over π-digits of their coordinates, which only keeps prefixes whose
norm already agrees with the target to the precision the prefix determines.

Parameters are witnesses, not canonical invariants.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .errors import CanonFail
from .jordan import JordanDecomposition
from .lattice import determinant, hyperbolic, mat_mul
from .ring import INF, BElem, Case, RingContext

BEAM_WIDTH = 48
SEARCH_ATTEMPTS = 4  # randomized searches restarted with fresh seeds
SEARCH_BUDGET = 400_000  # norm evaluations per vector search
# digits of precision given up to the divisions in the rescaling and the normalizations
PRECISION_SLACK = 14


@dataclass
class NormalForm:
    """L_i (or L_i plus one vector of L_{i±1}) ≅ λ·H(i) ⊕ K after rescaling by N(π)^{-shift}."""

    i: int
    shift: int
    planes: int
    tag: str
    params: dict
    gram: list  # normal-form Gram matrix at the rescaled scale
    witness: list  # columns in the coordinates of the original lattice
    extra_index: int | None = None  # block index of the borrowed vector in the rank-three rewrite
    notes: list = field(default_factory=list)

    @property
    def residual_rank(self) -> int:
        return len(self.gram) - 2 * self.planes

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "shift": self.shift,
            "planes": self.planes,
            "tag": self.tag,
            "params": {k: v.to_json() for k, v in sorted(self.params.items())},
            "gram": [[x.to_json() for x in row] for row in self.gram],
            "witness": [[x.to_json() for x in row] for row in self.witness],
            "extra_index": self.extra_index,
        }


# ---- small helpers over B -------------------------------------------------------

def _h(M, u, v) -> BElem:
    acc = None
    for a, ua in enumerate(u):
        if ua.is_zero():
            continue
        row = M[a]
        inner = None
        for b, vb in enumerate(v):
            if vb.is_zero() or row[b].is_zero():
                continue
            t = row[b] * vb
            inner = t if inner is None else inner + t
        if inner is not None:
            t = ua.sigma() * inner
            acc = t if acc is None else acc + t
    return acc if acc is not None else M[0][0].ring.zero


def _div(x: BElem, y: BElem) -> BElem:
    """x / y for val(x) ≥ val(y)."""
    v = y.val()
    if v == INF:
        raise CanonFail("division by an element vanishing at working precision")
    return x.shift(v) * y.shift(v).inverse()


def _trace_solve(ring: RingContext, beta: BElem, t: BElem) -> BElem:
    """d with Tr(d·β) = t, where t lies in A."""
    if t.val() == INF:
        return ring.zero
    best = min((ring.one, ring.pi), key=lambda w: (w * beta).trace().val())
    T = (best * beta).trace()
    if t.val() < T.val():
        raise CanonFail("trace equation has no solution")
    return _div(t, T) * best


def _add(u, v):
    return [a + b for a, b in zip(u, v)]


def _scale(u, c):
    return [a * c for a in u]


def _coords(basis, coeffs):
    out = [c * 0 for c in basis[0]]
    for c, b in zip(coeffs, basis):
        if not c.is_zero():
            out = _add(out, _scale(b, c))
    return out


def _digit_vectors(ring: RingContext, m: int, rng: random.Random):
    digits = [ring.lift_residue(c) for c in ring.kappa.elements()]
    vecs = [list(t) for t in itertools.product(digits, repeat=m)]
    rng.shuffle(vecs)
    return vecs


def _search(M, ok, levels, rng, primitive=True, budget=SEARCH_BUDGET):
    """Beam search for a coordinate vector x with ok(x, s) at every level s.

    `ok(x, s)` must only depend on x modulo π^s.  Returns x or None.
    """
    ring = M[0][0].ring
    m = len(M)
    digits = _digit_vectors(ring, m, rng)
    beam = [[ring.zero] * m]
    spent = 0
    for s in range(levels):
        p = ring.pi ** s
        nxt = []
        for c in beam:
            for d in digits:
                if s == 0 and primitive and all(x.is_zero() for x in d):
                    continue
                spent += 1
                if spent > budget:
                    return None
                cand = [a + p * b for a, b in zip(c, d)]
                if ok(cand, s + 1):
                    nxt.append(cand)
                    if len(nxt) >= BEAM_WIDTH:
                        break
            if len(nxt) >= BEAM_WIDTH:
                break
        if not nxt:
            return None
        beam = nxt
    return beam[0]


def _vector_with_norm(M, target, i, rng, levels):
    return _search(M, lambda x, s: (_h(M, x, x) - target).val() >= s + i, levels, rng)


# ---- hyperbolic planes ---------------------------------------------------------

def _ideal_val(ring: RingContext, i: int) -> int:
    """π-valuation of the norm ideal Tr(π^i B) of H(i)."""
    p = ring.pi ** i
    return min(p.trace().val(), (p * ring.pi).trace().val())


def _partner(M, x, i, nu, rng):
    """y with val h(x, y) = i and val h(y, y) ≥ ν."""
    def ok(y, s):
        return _h(M, x, y).val() == i and _h(M, y, y).val() >= min(s + i, nu)
    return _search(M, ok, max(1, nu - i), rng)


def _hyperbolic_pair(M, i, rng, levels, attempts=6):
    """(x, y) with Gram H(i), in the coordinates of M."""
    ring = M[0][0].ring
    nu = _ideal_val(ring, i)
    pi_i = ring.pi ** i
    for _ in range(attempts):
        x = _vector_with_norm(M, ring.zero, i, rng, levels)
        if x is None:
            continue
        y = _partner(M, x, i, nu, rng)
        if y is None:
            continue
        y = _scale(y, _div(pi_i, _h(M, x, y)))
        s = _trace_solve(ring, pi_i.sigma(), -_h(M, y, y))
        return x, _add(y, _scale(x, s))
    return None


def _complement(M, pair, i):
    """Coordinates of a basis of the orthogonal complement of the plane (x, y), h(x, y) = π^i."""
    ring = M[0][0].ring
    x, y = pair
    pi_i = ring.pi ** i
    m = len(M)
    e = _identity(ring, m)
    for subset in itertools.combinations(range(m), m - 2):
        cols = [x, y] + [e[t] for t in subset]
        T = [[c[r] for c in cols] for r in range(m)]
        if determinant(T, ring).is_unit():
            out = []
            for t in subset:
                b = e[t]
                beta = _div(_h(M, x, b), pi_i)
                alpha = _div(_h(M, y, b), pi_i.sigma())
                out.append(_add(b, _add(_scale(x, -alpha), _scale(y, -beta))))
            return out
    raise CanonFail("no complement basis found")


def _identity(ring, m):
    return [[ring.one if a == b else ring.zero for a in range(m)] for b in range(m)]


def _gram_of(M, vectors):
    return [[_h(M, u, v) for v in vectors] for u in vectors]


def _compose(P, vectors):
    """Coordinates in the outer frame of vectors given relative to the columns of P (list of columns)."""
    return [_coords(P, v) for v in vectors]


# ---- residual shapes -------------------------------------------------------------

def _residual_tag(case: Case, i0: int, own_type_one: bool, rank_odd: bool, free: bool) -> str:
    if i0 == 0:
        if own_type_one:
            return "(a)" if rank_odd else "A(1,2b,1)"
        return "H(0)" if case is Case.CASE1 else "A(2delta,2b,1)"
    if case is Case.CASE1:
        return "A(2,2b,pi)"
    return "A(4a,2delta,pi)" if own_type_one and free else "H(1)"


def _normalize_residual(M, tag, i, rng, levels):
    """Coordinates of a basis of the rank ≤ 2 lattice M realizing `tag`, plus the parameters."""
    ring = M[0][0].ring
    e = _identity(ring, len(M))
    if tag == "(a)":
        return [e[0]], {"a": M[0][0]}
    if tag in ("H(0)", "H(1)"):
        pair = _hyperbolic_pair(M, i, rng, levels)
        if pair is None:
            raise CanonFail(f"no hyperbolic basis for the remainder {tag}")
        return list(pair), {}
    if tag == "A(1,2b,1)":
        x = _vector_with_norm(M, ring.one, 0, rng, levels)
        if x is None:
            raise CanonFail("no vector of norm 1 in the remainder")
        other = next(b for b in e if determinant([[x[r], b[r]] for r in range(2)], ring).is_unit())
        y0 = _add(other, _scale(x, -_h(M, x, other)))
        u = _h(M, y0, y0)
        K = ring.kappa
        t = ring.lift_residue(K.sqrt(K.inv(u.residue())))
        y = _add(_scale(y0, t), x)
        return [x, y], {"b": _div(_h(M, y, y), ring.two)}
    if tag == "A(2delta,2b,1)":
        delta = ring.from_a(ring.param)
        x = _vector_with_norm(M, delta * 2, 0, rng, levels)
        if x is None:
            raise CanonFail("no vector of norm 2δ in the remainder")
        y = _partner_unit(M, x, ring.one)
        return [x, y], {"b": _div(_h(M, y, y), ring.two), "delta": delta}
    if tag == "A(2,2b,pi)":
        x = _vector_with_norm(M, ring.two, 1, rng, levels)
        if x is None:
            raise CanonFail("no vector of norm 2 in the remainder")
        y = _partner_unit(M, x, ring.pi)
        return [x, y], {"b": _div(_h(M, y, y), ring.two)}
    if tag == "A(4a,2delta,pi)":
        delta = ring.from_a(ring.param)
        y = _vector_with_norm(M, delta * 2, 1, rng, levels)
        if y is None:
            raise CanonFail("no vector of norm 2δ in the remainder")
        # a partner of norm in 4A; val h(x, y) = 1 also forces independence from y
        x = _search(M, lambda v, s: _h(M, v, y).val() == 1 and _h(M, v, v).val() >= min(s + 1, 4), 4, rng)
        if x is None:
            raise CanonFail("no partner of norm in 4A in the remainder")
        x = _scale(x, _div(ring.pi, _h(M, x, y)).sigma())  # then h(x, y) = π
        return [x, y], {"a": _div(_h(M, x, x), ring.from_int(4)), "delta": delta}
    raise CanonFail(f"unknown residual shape {tag}")


def _partner_unit(M, x, c):
    """y with h(x, y) = c, where c generates h(x, M)."""
    ring = M[0][0].ring
    for b in _identity(ring, len(M)):
        hb = _h(M, x, b)
        if hb.val() == c.val():
            return _scale(b, _div(c, hb))
    raise CanonFail("no partner vector")


# ---- driver ------------------------------------------------------------------

def _split_all(M, i, rng, levels):
    """Split hyperbolic planes off M until a rank ≤ 2 remainder is left.

    Returns (planes, P): plane vectors and the remainder basis, both in the coordinates of M.
    """
    ring = M[0][0].ring
    planes = []
    P = _identity(ring, len(M))  # remainder basis in the coordinates of M
    cur = M
    keep = 1 if len(M) % 2 else 2
    while len(P) > keep:
        pair = _hyperbolic_pair(cur, i, rng, levels)
        if pair is None:
            raise CanonFail(f"no hyperbolic plane found in a rank {len(P)} block")
        planes.append(tuple(_compose(P, pair)))
        P = _compose(P, _complement(cur, pair, i))
        cur = _gram_of(M, P)
    return planes, P


def canonicalize_block(dec: JordanDecomposition, idx: int, seed: int = 0) -> NormalForm:
    """Normal form of the block L_idx, retrying the randomized searches with new seeds."""
    for attempt in range(SEARCH_ATTEMPTS):
        try:
            return _canonicalize_once(dec, idx, seed + 7919 * attempt)
        except CanonFail:
            if attempt == SEARCH_ATTEMPTS - 1:
                raise
    raise AssertionError("unreachable")


def _canonicalize_once(dec: JordanDecomposition, idx: int, seed: int) -> NormalForm:
    """Normal form of the block L_idx together with a base-change witness.

    A case 2 block with odd index whose own norm is π^{i+1} and which is bound
    by a type I neighbour borrows a vector from that neighbour and is
    rewritten as hyperbolic planes plus the adjusted borrowed vector.  The
    neighbour at i+1 is preferred when both are of type I.
    """
    if dec.D is None:
        raise CanonFail("abstract decompositions have no Gram matrix to normalize")
    ring = dec.ring
    rng = random.Random(seed)
    block = dec.block_at(idx)
    if block.rank == 0:
        raise CanonFail(f"no block at index {idx}")
    case = dec.case
    shift, i0 = divmod(idx, 2)
    own_one = block.norm_exp == (idx if i0 == 0 else idx + 1)
    if case is Case.CASE1 and i0 == 1:
        own_one = False
    borrow = case is Case.CASE2 and i0 == 1 and own_one and block.bound
    cols = list(block.columns)
    levels = 2 * ring.k - PRECISION_SLACK - 2 * shift
    if levels < 8:
        raise CanonFail("working precision too small for the normal form search")

    if borrow:
        extra = idx + 1 if dec.block_at(idx + 1).type_one else idx - 1
        nb = dec.block_at(extra)
        if nb.rank == 0 or not nb.type_one:
            raise CanonFail("the rewrite needs a type I neighbouring block")
        all_cols = cols + list(nb.columns)
        M = _rescaled_gram(dec, all_cols, shift)
        if extra > idx:
            vectors, params, tag, planes = _borrowed_rewrite(M, len(cols), rng, levels)
        else:
            vectors, params, tag, planes = _borrowed_rewrite_below(M, len(cols), rng, levels)
    else:
        all_cols = cols
        M = _rescaled_gram(dec, all_cols, shift)
        tag = _residual_tag(case, i0, own_one, block.rank % 2 == 1, not block.bound)
        planes, P = _split_all(M, i0, rng, levels)
        res, params = _normalize_residual(_gram_of(M, P), tag, i0, rng, levels)
        res_vecs = _compose(P, res)
        if tag in ("H(0)", "H(1)"):
            planes.append(tuple(res_vecs))
            res_vecs, tag = [], "empty"
        vectors = [v for pair in planes for v in pair] + res_vecs
        extra = None

    gram = _gram_of(M, vectors)
    _check_shape(ring, gram, len(planes), i0, tag, params, levels)
    n_loc = len(all_cols)
    W_local = [[v[r] for v in vectors] for r in range(n_loc)]
    embed = [[dec.U[row][c] for c in all_cols] for row in range(dec.n)]
    witness = mat_mul(embed, W_local)
    return NormalForm(idx, shift, len(planes), tag, params, gram, witness, extra_index=extra)


def _rescaled_gram(dec: JordanDecomposition, cols: list[int], shift: int):
    ring = dec.ring
    inv = ((ring.pi.norm().shift(2)) ** shift).inverse()
    return [[dec.D[r][c].shift(2 * shift) * inv for c in cols] for r in cols]


def _borrowed_rewrite(M, m, rng, levels):
    """λ·H(1) ⊕ A(4a, 2δ, π) ⊕ (2c) ≅ (λ+1)·H(1) ⊕ (2c′); the first m coordinates are the block."""
    ring = M[0][0].ring
    n_loc = len(M)
    e = _identity(ring, n_loc)
    inner = [row[:m] for row in M[:m]]
    planes, P = _split_all(inner, 1, rng, levels)
    res, params = _normalize_residual(_gram_of(inner, P), "A(4a,2delta,pi)", 1, rng, levels)
    x, y = _compose(P, res)
    pad = [ring.zero] * (n_loc - m)
    planes = [tuple(v + pad for v in pair) for pair in planes]
    x, y = x + pad, y + pad
    # a norm 2·unit vector of the neighbouring block, split off it orthogonally
    nb = e[m:]
    z = next((b for b in nb if _h(M, b, b).val() == 2), None)
    if z is None:
        z = next((_add(b, c) for b, c in itertools.combinations(nb, 2) if _h(M, _add(b, c), _add(b, c)).val() == 2), None)
    if z is None:
        raise CanonFail("no vector of norm 2·unit in the neighbouring block")
    a, delta = params["a"], params["delta"]
    c = _div(_h(M, z, z), ring.two)
    pi = ring.pi
    f1 = _add(x, _scale(y, -(a * 2 * pi) * delta.sigma().inverse()))
    f2 = _add(y, z)
    f3 = _add(_scale(x, c * pi * delta.inverse()), z)
    sub = _gram_of(M, [f1, f2])
    pair = _hyperbolic_pair(sub, 1, rng, levels)
    if pair is None:
        raise CanonFail("rewritten plane is not hyperbolic")
    planes.append(tuple(_compose([f1, f2], pair)))
    vectors = [v for p in planes for v in p] + [f3]
    return vectors, {"c": c, "c_prime": _div(_h(M, f3, f3), ring.two)}, "H(1)+(2c)", planes


def _borrowed_rewrite_below(M, m, rng, levels):
    """λ·H(1) ⊕ A(4a, 2δ, π) ⊕ (ε) ≅ (λ+1)·H(1) ⊕ (ε′) for a unit ε; the first m coordinates are the block.

    With h(x, x) = 4a, h(y, y) = 2δ, h(x, y) = π and h(z, z) = ε, the vectors
    x and y + βπz with N(β)·ε ≡ 1 mod 2 span a π-modular plane of norm 4A,
    which is hyperbolic; its orthogonal complement is spanned by a unit-norm
    correction of z.
    """
    ring = M[0][0].ring
    inner = [row[:m] for row in M[:m]]
    planes, P = _split_all(inner, 1, rng, levels)
    res, _ = _normalize_residual(_gram_of(inner, P), "A(4a,2delta,pi)", 1, rng, levels)
    x, y = _compose(P, res)
    pad = [ring.zero] * (len(M) - m)
    planes = [tuple(v + pad for v in pair) for pair in planes]
    x, y = x + pad, y + pad
    nb = _identity(ring, len(M))[m:]
    z = next((b for b in nb if _h(M, b, b).val() == 0), None)
    if z is None:
        z = next((_add(b, c) for b, c in itertools.combinations(nb, 2) if _h(M, _add(b, c), _add(b, c)).val() == 0), None)
    if z is None:
        raise CanonFail("no unit-norm vector in the neighbouring block")
    eps = _h(M, z, z)
    K = ring.kappa
    beta = ring.lift_residue(K.sqrt(K.inv(eps.residue())))
    f1, f2 = x, _add(y, _scale(z, beta * ring.pi))
    sub = _gram_of(M, [f1, f2])
    pair = _hyperbolic_pair(sub, 1, rng, levels)
    if pair is None:
        raise CanonFail("rewritten plane is not hyperbolic")
    p, q = _compose([f1, f2], pair)
    # z minus its projection to the plane (p, q), where h(p, q) = π
    pi = ring.pi
    f3 = _add(z, _add(_scale(p, -_div(_h(M, q, z), pi.sigma())), _scale(q, -_div(_h(M, p, z), pi))))
    planes.append((p, q))
    vectors = [v for pl in planes for v in pl] + [f3]
    return vectors, {"e": eps, "e_prime": _h(M, f3, f3)}, "H(1)+(e)", planes


def _check_shape(ring, gram, planes, i, tag, params, levels):
    """Verify the Gram matrix of the witness against the promised normal form."""
    H = hyperbolic(ring, i).rows()
    tol = levels - 4
    for p in range(planes):
        for a in range(2):
            for b in range(2):
                if (gram[2 * p + a][2 * p + b] - H[a][b]).val() < tol:
                    raise CanonFail(f"plane {p} is not hyperbolic to working precision")
    off = 2 * planes

    def piece(a):
        return a // 2 if a < off else -1

    m = len(gram)
    for a in range(m):
        for b in range(m):
            if piece(a) != piece(b) and gram[a][b].val() < tol:
                raise CanonFail("normal form pieces are not orthogonal")
    K = [row[off:] for row in gram[off:]]
    two, pi = ring.two, ring.pi
    want = None
    if tag == "A(1,2b,1)":
        want = [[ring.one, ring.one], [ring.one, params["b"] * two]]
    elif tag == "A(2delta,2b,1)":
        want = [[params["delta"] * two, ring.one], [ring.one, params["b"] * two]]
    elif tag == "A(2,2b,pi)":
        want = [[two, pi], [pi.sigma(), params["b"] * two]]
    elif tag == "A(4a,2delta,pi)":
        want = [[params["a"] * 4, pi], [pi.sigma(), params["delta"] * two]]
    if want is not None:
        for a in range(2):
            for b in range(2):
                if (K[a][b] - want[a][b]).val() < tol:
                    raise CanonFail(f"remainder does not have the shape {tag}")
