"""Exact arithmetic in the Galois ring A/2^k = GR(2^k, r) and in B/π^{2k}.

A/2^k is modelled as (Z/2^k)[t]/(Φ) with Φ the lift of a fixed Conway
polynomial over F_2.  An A-element is a tuple of ``r`` integers in
``[0, 2^k)``.  B = A ⊕ Aπ is ramified quadratic over A with

* case 1: π = 1 + sqrt(1 + 2u), so π² = 2π + 2u and σ(π) = 2 − π;
* case 2: π = sqrt(2δ), so π² = 2δ and σ(π) = −π.

In both cases π² = c1·π + c0 with (c1, c0) = (2, 2u) or (0, 2δ), which is
all the multiplication needs.
"""

from __future__ import annotations

import enum
import math
from random import Random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import ContextMismatch, NonUnitInverse, NonUnitParam, UnsupportedDegree

INF = math.inf  # valuation of an element that vanishes at the working precision

MAX_DEGREE = 8

# Conway polynomials over F_2, coefficients from degree 0 upwards (monic).
CONWAY_POLYNOMIALS: dict[int, tuple[int, ...]] = {
    1: (1, 1),
    2: (1, 1, 1),
    3: (1, 1, 0, 1),
    4: (1, 1, 0, 0, 1),
    5: (1, 0, 1, 0, 0, 1),
    6: (1, 1, 0, 1, 1, 0, 1),
    7: (1, 1, 0, 0, 0, 0, 0, 1),
    8: (1, 0, 1, 1, 1, 0, 0, 0, 1),
}


class Case(enum.IntEnum):
    CASE1 = 1
    CASE2 = 2


ATuple = tuple  # an element of A/2^k: r coefficients


def _v2(x: int) -> int:
    return (x & -x).bit_length() - 1


class ResidueField:
    """The residue field κ = F_{2^r}; elements are ints whose bits are coefficients of t^j."""

    def __init__(self, r: int, poly: Sequence[int]):
        self.r = r
        self.order = 1 << r
        self._mod = sum(c << j for j, c in enumerate(poly))

    def _slow_mul(self, x: int, y: int) -> int:
        res = 0
        r, mod = self.r, self._mod
        while y:
            if y & 1:
                res ^= x
            y >>= 1
            x <<= 1
            if (x >> r) & 1:
                x ^= mod
        return res

    @cached_property
    def _table(self) -> list[list[int]]:
        q = self.order
        return [[self._slow_mul(x, y) for y in range(q)] for x in range(q)]

    def mul(self, x: int, y: int) -> int:
        if self.r == 1:
            return x & y
        return self._table[x][y]

    @staticmethod
    def add(x: int, y: int) -> int:
        return x ^ y

    def pow(self, x: int, e: int) -> int:
        res = 1
        while e:
            if e & 1:
                res = self.mul(res, x)
            x = self.mul(x, x)
            e >>= 1
        return res

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse in the residue field")
        return self.pow(x, self.order - 2)

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def sqrt(self, c: int) -> int:
        """Unique square root; squaring is a bijection in characteristic 2."""
        return self.pow(c, 1 << (self.r - 1))

    def abs_trace(self, x: int) -> int:
        """Absolute trace to F_2, returned as 0 or 1."""
        acc, y = 0, x
        for _ in range(self.r):
            acc ^= y
            y = self.mul(y, y)
        return acc

    def elements(self) -> range:
        return range(self.order)


def frobenius_sqrt(kappa: ResidueField, c: int) -> int:
    return kappa.sqrt(c)


@dataclass(frozen=True)
class RingContext:
    case: Case
    r: int
    param: ATuple
    k: int

    # ---- derived constants -------------------------------------------------
    @cached_property
    def modulus(self) -> int:
        return 1 << self.k

    @cached_property
    def mask(self) -> int:
        return (1 << self.k) - 1

    @cached_property
    def phi(self) -> tuple[int, ...]:
        return CONWAY_POLYNOMIALS[self.r]

    @cached_property
    def kappa(self) -> ResidueField:
        return ResidueField(self.r, self.phi)

    @property
    def f(self) -> int:
        return 1 << self.r

    @cached_property
    def c0(self) -> ATuple:
        return self.a_scale(self.param, 2)

    @cached_property
    def c1(self) -> int:
        return 2 if self.case is Case.CASE1 else 0

    @cached_property
    def zero(self) -> BElem:
        return BElem(self, self.a_zero, self.a_zero)

    @cached_property
    def one(self) -> BElem:
        return self.from_int(1)

    @cached_property
    def two(self) -> BElem:
        return self.from_int(2)

    @cached_property
    def pi(self) -> BElem:
        return BElem(self, self.a_zero, self.a_from_int(1))

    @cached_property
    def _rho_inv(self) -> BElem:
        # ρ = π²/2: π + u in case 1, δ in case 2
        if self.case is Case.CASE1:
            rho = BElem(self, self.param, self.a_from_int(1))
        else:
            rho = BElem(self, self.param, self.a_zero)
        return rho.inverse()

    @cached_property
    def _w_inv(self) -> BElem:
        # w = N(π)/2 = −param
        return BElem(self, self.a_neg(self.param), self.a_zero).inverse()

    @property
    def delta_normalized(self) -> bool:
        """Whether the unit parameter is ≡ 1 mod 2 (the customary choice for δ in case 2)."""
        return self.a_residue(self.param) == 1

    def with_precision(self, k: int) -> RingContext:
        return make_ring(self.case, self.r, self.param, k)

    # ---- A-arithmetic on tuples -------------------------------------------
    @cached_property
    def a_zero(self) -> ATuple:
        return (0,) * self.r

    def a_from_int(self, n: int) -> ATuple:
        return (n & self.mask,) + (0,) * (self.r - 1)

    def a_from_coeffs(self, coeffs: Iterable[int]) -> ATuple:
        c = [int(v) for v in coeffs]
        if len(c) > self.r:
            raise ValueError(f"expected at most {self.r} coefficients, got {len(c)}")
        c += [0] * (self.r - len(c))
        return tuple(v & self.mask for v in c)

    def a_add(self, x: ATuple, y: ATuple) -> ATuple:
        m = self.mask
        return tuple((a + b) & m for a, b in zip(x, y))

    def a_sub(self, x: ATuple, y: ATuple) -> ATuple:
        m = self.mask
        return tuple((a - b) & m for a, b in zip(x, y))

    def a_neg(self, x: ATuple) -> ATuple:
        m = self.mask
        return tuple((-a) & m for a in x)

    def a_scale(self, x: ATuple, n: int) -> ATuple:
        m = self.mask
        return tuple((a * n) & m for a in x)

    def a_mul(self, x: ATuple, y: ATuple) -> ATuple:
        m = self.mask
        r = self.r
        if r == 1:
            return ((x[0] * y[0]) & m,)
        c = [0] * (2 * r - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    c[i + j] += xi * yj
        phi = self.phi
        for d in range(2 * r - 2, r - 1, -1):
            t = c[d]
            if t:
                for s in range(r):
                    if phi[s]:
                        c[d - r + s] -= t
        return tuple(v & m for v in c[:r])

    def a_val(self, x: ATuple) -> int:
        """2-adic valuation, capped at k for the zero element."""
        v = self.k
        for a in x:
            if a:
                v = min(v, _v2(a))
        return v

    def a_is_zero(self, x: ATuple) -> bool:
        return not any(x)

    def a_residue(self, x: ATuple) -> int:
        return sum((a & 1) << j for j, a in enumerate(x))

    def a_lift(self, c: int) -> ATuple:
        return tuple((c >> j) & 1 for j in range(self.r))

    def a_inv(self, x: ATuple) -> ATuple:
        res = self.a_residue(x)
        if res == 0:
            raise NonUnitInverse("element of A is not a unit")
        y = self.a_lift(self.kappa.inv(res))
        two = self.a_from_int(2)
        prec = 1
        while prec < self.k:
            y = self.a_mul(y, self.a_sub(two, self.a_mul(x, y)))
            prec *= 2
        return y

    def a_shift_down(self, x: ATuple, m: int) -> ATuple:
        """Exact division by 2^m (m may be negative, meaning multiplication); top bits are lost."""
        if m <= 0:
            return self.a_scale(x, 1 << -m)
        if any(a & ((1 << m) - 1) for a in x):
            raise ArithmeticError(f"A-element not divisible by 2^{m}")
        return tuple(a >> m for a in x)

    def a_random(self, rng: Random) -> ATuple:
        return tuple(rng.randrange(self.modulus) for _ in range(self.r))

    # ---- B-element constructors ---------------------------------------------
    def from_int(self, n: int) -> BElem:
        return BElem(self, self.a_from_int(n), self.a_zero)

    def from_a(self, a: ATuple) -> BElem:
        return BElem(self, a, self.a_zero)

    def elem(self, a0=0, a1=0) -> BElem:
        """Build a0 + a1·π from ints or coefficient lists."""
        return BElem(self, self._coerce_a(a0), self._coerce_a(a1))

    def _coerce_a(self, v) -> ATuple:
        if isinstance(v, (int, str)):
            return self.a_from_int(int(v))
        return self.a_from_coeffs(int(c) for c in v)

    def lift_residue(self, c: int) -> BElem:
        return BElem(self, self.a_lift(c), self.a_zero)

    def random(self, rng: Random) -> BElem:
        return BElem(self, self.a_random(rng), self.a_random(rng))

    def random_unit(self, rng: Random) -> BElem:
        while True:
            x = self.random(rng)
            if self.a_residue(x.a0):
                return x

    def pi_pow(self, e: int) -> BElem:
        return self.pi ** e

    def from_json(self, obj) -> BElem:
        if isinstance(obj, (int, str)):
            return self.from_int(int(obj))
        if isinstance(obj, dict):
            return self.elem(obj.get("a0", 0), obj.get("a1", 0))
        raise ValueError(f"cannot parse ring element from {obj!r}")


def make_ring(case, r: int, param, k: int, max_degree: int = MAX_DEGREE) -> RingContext:
    case = Case(int(case))
    if r < 1 or k < 1:
        raise ValueError("residue degree and precision must be positive")
    if r > max_degree or r not in CONWAY_POLYNOMIALS:
        raise UnsupportedDegree(f"residue degree {r} exceeds supported bound {max_degree}")
    mask = (1 << k) - 1
    if isinstance(param, (int, str)):
        coeffs = [int(param)] + [0] * (r - 1)
    else:
        coeffs = [int(c) for c in param]
        if len(coeffs) > r:
            raise ValueError(f"param has more than {r} coefficients")
        coeffs += [0] * (r - len(coeffs))
    p = tuple(c & mask for c in coeffs)
    if not any(c & 1 for c in p):
        raise NonUnitParam("parameter must be a unit (nonzero mod 2)")
    ring = RingContext(case, r, p, k)
    _check_uniformizer(ring)
    return ring


def _check_uniformizer(ring: RingContext) -> None:
    if ring.k < 3:
        return
    pi = ring.pi
    s = pi.sigma()
    if ring.case is Case.CASE1:
        assert (s + pi).val() == 2 and (s * pi).val() == 2
    else:
        assert s == -pi and pi * pi == ring.from_a(ring.c0)


class BElem:
    """An element a0 + a1·π of B/π^{2k}."""

    __slots__ = ("ring", "a0", "a1")

    def __init__(self, ring: RingContext, a0: ATuple, a1: ATuple):
        self.ring = ring
        self.a0 = a0
        self.a1 = a1

    def _other(self, y) -> BElem:
        if isinstance(y, BElem):
            if y.ring is not self.ring and y.ring != self.ring:
                raise ContextMismatch("elements belong to different ring contexts")
            return y
        if isinstance(y, int):
            return self.ring.from_int(y)
        return NotImplemented

    def __add__(self, y):
        y = self._other(y)
        R = self.ring
        return BElem(R, R.a_add(self.a0, y.a0), R.a_add(self.a1, y.a1))

    __radd__ = __add__

    def __sub__(self, y):
        y = self._other(y)
        R = self.ring
        return BElem(R, R.a_sub(self.a0, y.a0), R.a_sub(self.a1, y.a1))

    def __rsub__(self, y):
        return self._other(y) - self

    def __neg__(self):
        R = self.ring
        return BElem(R, R.a_neg(self.a0), R.a_neg(self.a1))

    def __mul__(self, y):
        y = self._other(y)
        R = self.ring
        mul = R.a_mul
        p00 = mul(self.a0, y.a0)
        p11 = mul(self.a1, y.a1)
        z0 = R.a_add(p00, mul(R.c0, p11))
        z1 = R.a_add(mul(self.a0, y.a1), mul(self.a1, y.a0))
        if R.c1:
            z1 = R.a_add(z1, R.a_scale(p11, R.c1))
        return BElem(R, z0, z1)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        res, base = self.ring.one, self
        while e:
            if e & 1:
                res = res * base
            base = base * base
            e >>= 1
        return res

    def __eq__(self, y):
        if not isinstance(y, BElem):
            if isinstance(y, int):
                y = self.ring.from_int(y)
            else:
                return NotImplemented
        return self.a0 == y.a0 and self.a1 == y.a1 and (self.ring is y.ring or self.ring == y.ring)

    def __hash__(self):
        return hash((self.a0, self.a1))

    def __repr__(self):
        def fmt(a):
            return str(a[0]) if len(a) == 1 else "[" + ",".join(map(str, a)) + "]"

        return f"BElem({fmt(self.a0)} + {fmt(self.a1)}π)"

    # ---- structure -------------------------------------------------------
    def sigma(self) -> BElem:
        R = self.ring
        a0 = R.a_add(self.a0, R.a_scale(self.a1, R.c1)) if R.c1 else self.a0
        return BElem(R, a0, R.a_neg(self.a1))

    def trace(self) -> BElem:
        R = self.ring
        t = R.a_scale(self.a0, 2)
        if R.c1:
            t = R.a_add(t, R.a_scale(self.a1, R.c1))
        return BElem(R, t, R.a_zero)

    def norm(self) -> BElem:
        R = self.ring
        mul = R.a_mul
        n = R.a_sub(mul(self.a0, self.a0), mul(R.c0, mul(self.a1, self.a1)))
        if R.c1:
            n = R.a_add(n, R.a_scale(mul(self.a0, self.a1), R.c1))
        return BElem(R, n, R.a_zero)

    def is_zero(self) -> bool:
        return not any(self.a0) and not any(self.a1)

    def in_a(self) -> bool:
        return not any(self.a1)

    def val(self):
        """π-adic valuation; INF when the element vanishes modulo π^{2k}.

        Since val(a0) is even and val(a1·π) odd they never tie, so this equals
        the 2-adic valuation of the norm whenever the latter is visible.
        """
        R = self.ring
        v = 2 * R.k
        for a in self.a0:
            if a:
                v = min(v, 2 * _v2(a))
        for a in self.a1:
            if a:
                v = min(v, 2 * _v2(a) + 1)
        return INF if v >= 2 * R.k else v

    def is_unit(self) -> bool:
        return self.ring.a_residue(self.a0) != 0

    def residue(self) -> int:
        """Image in κ = B/πB."""
        return self.ring.a_residue(self.a0)

    def inverse(self) -> BElem:
        if not self.is_unit():
            raise NonUnitInverse(f"{self!r} is not a unit")
        R = self.ring
        n_inv = R.a_inv(self.norm().a0)
        return self.sigma() * BElem(R, n_inv, R.a_zero)

    def shift(self, s: int) -> BElem:
        """Return self·π^{−s}.  For s > 0 the division must be exact; the top digits become 0."""
        R = self.ring
        if s <= 0:
            return self * R.pi ** (-s)
        v = self.val()
        if v == INF:
            return R.zero
        if v < s:
            raise ArithmeticError(f"valuation {v} < {s}: not divisible")
        t, odd = divmod(s, 2)
        y = self.sigma_pi_mul() if odd else self
        h = t + odd
        y = BElem(R, tuple(a >> h for a in y.a0), tuple(a >> h for a in y.a1))
        if odd:
            y = y * R._w_inv
        if t:
            y = y * R._rho_inv ** t
        return y

    def sigma_pi_mul(self) -> BElem:
        return self * self.ring.pi.sigma()

    def to_json(self) -> dict:
        return {"a0": [str(a) for a in self.a0], "a1": [str(a) for a in self.a1]}


def frac_digit(x: BElem, s: int) -> int:
    """Residue of x·π^{−s} in κ (requires val(x) ≥ s)."""
    return x.shift(s).residue()


def a_digit(ring: RingContext, a: ATuple, m: int) -> int:
    """Residue of a/2^m in κ for an A-element with 2-adic valuation ≥ m."""
    if m < 0:
        return 0
    if m >= ring.k:
        raise ArithmeticError("digit beyond working precision")
    for c in a:
        if c & ((1 << m) - 1):
            raise ArithmeticError(f"A-element not divisible by 2^{m}")
    return sum(((c >> m) & 1) << j for j, c in enumerate(a))
