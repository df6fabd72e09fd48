"""Binary linear codes: simplex codes, duals of BCH codes, weight statistics."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

from .errors import ConstructionError, InfeasibleError, ParameterError
from .f2 import rank_f2, rref

N_MAX = 1 << 20
K_ENUM_MAX = 24

# Primitive polynomials of degree m, bit i = coefficient of x^i.
PRIMITIVE_POLYS = {
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10000011,  # x^7 + x + 1
    8: 0x11D,  # x^8 + x^4 + x^3 + x^2 + 1
    9: 0x211,  # x^9 + x^4 + 1
    10: 0x409,  # x^10 + x^3 + 1
    11: 0x805,  # x^11 + x^2 + 1
    12: 0x1053,  # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,  # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,  # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,  # x^15 + x + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class GF2mField:
    """GF(2^m) as F2[x]/(modulus) with generator alpha = x."""

    m: int
    modulus: int

    def __post_init__(self):
        if self.m < 1 or self.modulus.bit_length() != self.m + 1:
            raise ConstructionError(f"modulus {self.modulus:#x} is not of degree {self.m}")
        order = (1 << self.m) - 1
        # x has order 2^m - 1 only if the modulus is irreducible and primitive.
        if self._pow_x(order) != 1 or any(
            self._pow_x(order // p) == 1 for p in _prime_factors(order)
        ):
            raise ConstructionError(f"modulus {self.modulus:#x} is not primitive")

    @classmethod
    def standard(cls, m: int) -> GF2mField:
        if m not in PRIMITIVE_POLYS:
            raise ParameterError(f"no built-in primitive polynomial for m={m}")
        return cls(m, PRIMITIVE_POLYS[m])

    def _mulx(self, a: int) -> int:
        a <<= 1
        if a >> self.m:
            a ^= self.modulus
        return a

    def _pow_x(self, e: int) -> int:
        result, base = 1, self._mulx(1)
        while e:
            if e & 1:
                result = self.mul_slow(result, base)
            base = self.mul_slow(base, base)
            e >>= 1
        return result

    def mul_slow(self, a: int, b: int) -> int:
        out = 0
        while b:
            if b & 1:
                out ^= a
            a = self._mulx(a)
            b >>= 1
        return out

    @property
    def order(self) -> int:
        return (1 << self.m) - 1

    @cached_property
    def exp_table(self) -> tuple[int, ...]:
        out, x = [], 1
        for _ in range(self.order):
            out.append(x)
            x = self._mulx(x)
        return tuple(out)

    def alpha_pow(self, e: int) -> int:
        return self.exp_table[e % self.order]


@dataclass(frozen=True)
class LinearCode:
    """A binary [n, k] code given by k independent generator rows."""

    n: int
    gen: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("code length must be positive")
        if any(g < 0 or g >> self.n for g in self.gen):
            raise ParameterError(f"generator row wider than n={self.n}")
        if rank_f2(self.gen) != len(self.gen):
            raise ParameterError("generator rows are not independent")

    @classmethod
    def spanned_by(cls, n: int, rows, name: str = "") -> LinearCode:
        return cls(n, rref(rows), name)

    @property
    def k(self) -> int:
        return len(self.gen)

    def codewords(self) -> Iterator[int]:
        return _gray_walk(self.gen, 0)

    def contains(self, word: int) -> bool:
        return rank_f2(self.gen + (word,)) == self.k

    def subcode(self, d: int) -> LinearCode:
        if not 0 <= d <= self.k:
            raise ParameterError(f"no subcode of dimension {d} in a {self.k}-dim code")
        return LinearCode(self.n, self.gen[:d], f"{self.name}[:{d}]")


def _gray_walk(gens, base: int) -> Iterator[int]:
    x = base
    yield x
    for i in range(1, 1 << len(gens)):
        x ^= gens[(i & -i).bit_length() - 1]
        yield x


def simplex_code(d: int) -> LinearCode:
    """[2^d - 1, d] code whose columns are all non-zero vectors of F2^d."""
    if d < 1:
        raise ParameterError("simplex code needs d >= 1")
    n = (1 << d) - 1
    if n > N_MAX:
        raise ParameterError(f"length {n} exceeds N_MAX={N_MAX}")
    # column i carries the label i + 1; row j reads off bit j of the labels
    rows = [sum(1 << (c - 1) for c in range(1, n + 1) if (c >> j) & 1) for j in range(d)]
    return LinearCode(n, tuple(rows), f"simplex({d})")


def bch_dimension_condition(m: int, e: int) -> bool:
    return e <= 1 << (math.ceil(m / 2) - 1)


def dual_bch(m: int, e: int, modulus: int | None = None) -> LinearCode:
    """Dual of the binary BCH code with zeros alpha^1, alpha^3, ..., alpha^(2e-1).

    Rows are the coordinate functions of i -> alpha^(j*i), i = 0..n-1, for odd
    j < 2e, m rows per j.
    """
    if m < 3:
        raise ParameterError("dual BCH needs m >= 3")
    if e < 1 or not bch_dimension_condition(m, e):
        raise ParameterError(f"e={e} outside [1, 2^(ceil(m/2)-1)] for m={m}")
    field_ = GF2mField(m, modulus) if modulus is not None else GF2mField.standard(m)
    n = field_.order
    if n > N_MAX:
        raise ParameterError(f"length {n} exceeds N_MAX={N_MAX}")
    rows = []
    for j in range(1, 2 * e, 2):
        powers = [field_.alpha_pow(j * i) for i in range(n)]
        for b in range(m):
            rows.append(sum(1 << i for i, a in enumerate(powers) if (a >> b) & 1))
    return LinearCode.spanned_by(n, rows, f"dual_bch({m},{e})")


@dataclass(frozen=True)
class WeightStats:
    distribution: dict[int, int]
    min_nonzero: int | None
    max: int

    def to_json(self, code: LinearCode) -> dict:
        return {
            "n": code.n,
            "k": code.k,
            "weights": {str(w): c for w, c in sorted(self.distribution.items())},
        }


def _weights_chunk(args) -> Counter:
    gens, base = args
    hist: Counter = Counter()
    for x in _gray_walk(gens, base):
        hist[x.bit_count()] += 1
    return hist


def weight_stats(code: LinearCode, workers: int = 1) -> WeightStats:
    """Exact weight distribution by enumerating all 2^k codewords.

    The index space is split on the top generator rows; each chunk walks the
    remaining rows in Gray-code order from its own offset word.
    """
    if code.k > K_ENUM_MAX:
        raise InfeasibleError(f"k={code.k} exceeds enumeration limit {K_ENUM_MAX}")
    split = min(code.k, max(0, (workers - 1).bit_length()))
    low, high = code.gen[: code.k - split], code.gen[code.k - split:]
    jobs = [(low, base) for base in _gray_walk(high, 0)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_weights_chunk, jobs))
    else:
        parts = [_weights_chunk(job) for job in jobs]
    hist: Counter = Counter()
    for part in parts:
        hist.update(part)
    nonzero = [w for w in hist if w > 0]
    return WeightStats(dict(sorted(hist.items())), min(nonzero, default=None), max(hist))


def carlitz_uchiyama_interval(m: int, e: int) -> tuple[float, float]:
    """|w - 2^(m-1)| <= (e-1) 2^(m/2) for non-zero words of the dual BCH code.

    For e = 1 this pins every non-zero weight to 2^(m-1).
    """
    center = 2.0 ** (m - 1)
    radius = (e - 1) * 2.0 ** (m / 2)
    return center - radius, center + radius


def loose_cu_interval(m: int, e: int) -> tuple[float, float]:
    """The centred-at-n/2 variant [n/2 - (e-1)sqrt(n), n/2 + (e-1)sqrt(n)].

    Shorter and shifted left of the true bound; extreme weights such as 12 in the
    [15, 8] code fall outside it.
    """
    n = (1 << m) - 1
    radius = (e - 1) * math.sqrt(n)
    return 0.5 * n - radius, 0.5 * n + radius


def carlitz_uchiyama_check(code: LinearCode, m: int, e: int, *, loose: bool = False) -> bool:
    if code.n != (1 << m) - 1:
        raise ParameterError(f"code length {code.n} is not 2^{m} - 1")
    lo, hi = loose_cu_interval(m, e) if loose else carlitz_uchiyama_interval(m, e)
    stats = weight_stats(code)
    if e == 1 and loose:
        return all(w == 1 << (m - 1) for w in stats.distribution if w)
    return all(lo <= w <= hi for w in stats.distribution if w)


def griesmer_length(k: int, mu: int) -> int:
    """Smallest length allowed by the Griesmer bound for an [n, k, mu] code."""
    return sum(-(-mu // (1 << i)) for i in range(k))
