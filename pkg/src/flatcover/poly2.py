"""Multilinear polynomials over F2.

A monomial is an r-bit word naming its variables (bit i <-> x_i); a
polynomial is the sorted tuple of its monomials.  Addition is symmetric
difference of monomial sets; multiplication ORs monomial words, since
x_i^2 = x_i on F2^r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError
from .f2 import Flat, parity, rank_f2


@dataclass(frozen=True)
class MultilinearPoly:
    r: int
    monomials: tuple[int, ...] = ()

    @classmethod
    def from_monomials(cls, r: int, monomials: Iterable[int]) -> MultilinearPoly:
        odd: set[int] = set()
        for m in monomials:
            if m < 0 or m >> r:
                raise ParameterError(f"monomial {m:b} uses variables beyond {r}")
            odd ^= {m}
        return cls(r, tuple(sorted(odd)))

    @classmethod
    def constant(cls, r: int, bit: int) -> MultilinearPoly:
        return cls(r, (0,) if bit & 1 else ())

    @classmethod
    def variable(cls, r: int, i: int) -> MultilinearPoly:
        return cls(r, (1 << i,))

    @property
    def degree(self) -> int:
        return max((m.bit_count() for m in self.monomials), default=0)

    def is_zero(self) -> bool:
        return not self.monomials

    def __add__(self, other: MultilinearPoly) -> MultilinearPoly:
        self._check(other)
        return MultilinearPoly(self.r, tuple(sorted(set(self.monomials) ^ set(other.monomials))))

    def __mul__(self, other: MultilinearPoly) -> MultilinearPoly:
        self._check(other)
        return MultilinearPoly.from_monomials(
            self.r, (a | b for a in self.monomials for b in other.monomials)
        )

    def __call__(self, v: int) -> int:
        return eval_poly(self, v)

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        terms = []
        for m in self.monomials:
            if m == 0:
                terms.append("1")
            else:
                terms.append("".join(f"x{i}" for i in range(self.r) if (m >> i) & 1))
        return " + ".join(terms)

    def _check(self, other: MultilinearPoly) -> None:
        if self.r != other.r:
            raise ParameterError(f"variable count mismatch: {self.r} vs {other.r}")


def dim_multilinear(r: int, d: int) -> int:
    """Dimension of the space of multilinear polynomials of degree <= d."""
    if not 0 <= d <= r:
        raise ParameterError(f"need 0 <= d <= r, got r={r}, d={d}")
    return sum(math.comb(r, j) for j in range(d + 1))


def eval_poly(p: MultilinearPoly, v: int) -> int:
    # a monomial is 1 at v iff all its variables are 1 there
    return sum(1 for m in p.monomials if m & v == m) & 1


def _subset_transform(table: np.ndarray, r: int) -> np.ndarray:
    # Over F2 the zeta and Moebius transforms on the subset lattice coincide.
    a = np.array(table, dtype=np.uint8) & 1
    for i in range(r):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 1, :] ^= view[:, 0, :]
    return a


def interpolate(f: Sequence[int] | np.ndarray) -> MultilinearPoly:
    """The unique multilinear polynomial whose truth table is ``f``."""
    f = np.asarray(f)
    size = f.shape[0]
    r = size.bit_length() - 1
    if f.ndim != 1 or size != 1 << r:
        raise ParameterError("truth table length must be a power of two")
    coeffs = _subset_transform(f, r)
    return MultilinearPoly(r, tuple(int(m) for m in np.flatnonzero(coeffs)))


def truth_table(p: MultilinearPoly) -> np.ndarray:
    coeffs = np.zeros(1 << p.r, dtype=np.uint8)
    coeffs[list(p.monomials)] = 1
    return _subset_transform(coeffs, p.r)


def indicator_of_coflat(flat: Flat) -> MultilinearPoly:
    """Indicator polynomial of a flat, a product of codim affine factors.

    Each factor is ``1 + a + f(x)`` for a parity-check functional ``f`` of
    the direction with value ``a = f(anchor)`` on the flat.
    """
    r = flat.r
    poly = MultilinearPoly.constant(r, 1)
    for f in flat.direction.annihilator().basis:
        value = parity(f & flat.anchor)
        terms = [1 << i for i in range(r) if (f >> i) & 1]
        if value == 0:
            terms.append(0)
        poly = poly * MultilinearPoly.from_monomials(r, terms)
    return poly


def evaluation_rank(polys: Sequence[MultilinearPoly], points: Sequence[int]) -> int:
    """GF(2) rank of the matrix [P(v)] with rows polys and columns points."""
    rows = []
    for p in polys:
        rows.append(sum(eval_poly(p, v) << j for j, v in enumerate(points)))
    return rank_f2(rows)


def fact1_check(p: MultilinearPoly) -> int:
    """Sum of P over all of F2^d for P in d variables of degree < d.

    The sum is always 0: every monomial misses a variable, so its values
    cancel in pairs.
    """
    if p.degree >= p.r:
        raise ParameterError(f"degree {p.degree} is not below d={p.r}")
    return int(truth_table(p).sum()) & 1
