"""Bit-parallel linear algebra over F2.

A point of F2^r is an ``int`` whose bit ``i`` is coordinate ``i``.  A subset
of F2^r is a 2^r-bit characteristic mask, also held in an ``int`` so that
union, intersection and complement are single word-parallel operations.

Subspaces are kept in reduced row-echelon form where the pivot of a row is
its highest set bit, every pivot bit is cleared from all other rows, and rows
are sorted by pivot.  Two spanning sets give the same subspace iff their
canonical forms are equal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ParameterError

R_MAX = 30


def set_r_max(value: int) -> None:
    """Change the largest ambient dimension for materialized point sets."""
    global R_MAX
    if value < 1:
        raise ParameterError(f"R_MAX must be positive, got {value}")
    R_MAX = value


def parity(x: int) -> int:
    return x.bit_count() & 1


def format_point(x: int, r: int) -> str:
    """Render a point as an r-character binary string, coordinate 0 leftmost."""
    return "".join("1" if (x >> i) & 1 else "0" for i in range(r))


def parse_point(text: str) -> int:
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise ParameterError(f"not a binary point: {text!r}")
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def rank_f2(rows: Iterable[int]) -> int:
    """Rank over GF(2) of a collection of bit-vectors."""
    basis: dict[int, int] = {}
    for x in rows:
        while x:
            top = x.bit_length() - 1
            row = basis.get(top)
            if row is None:
                basis[top] = x
                break
            x ^= row
    return len(basis)


def rref(rows: Iterable[int]) -> tuple[int, ...]:
    """Canonical reduced row-echelon basis of the span of ``rows``."""
    basis: dict[int, int] = {}
    for x in rows:
        for p, row in basis.items():
            if (x >> p) & 1:
                x ^= row
        if not x:
            continue
        q = x.bit_length() - 1
        for p, row in basis.items():
            if (row >> q) & 1:
                basis[p] = row ^ x
        basis[q] = x
    return tuple(basis[p] for p in sorted(basis))


def _reduce(x: int, basis: Sequence[int]) -> int:
    for row in basis:
        if (x >> (row.bit_length() - 1)) & 1:
            x ^= row
    return x


def _span(basis: Sequence[int]) -> Iterator[int]:
    # Gray-code walk over all combinations of the basis rows.
    x = 0
    yield x
    for i in range(1, 1 << len(basis)):
        x ^= basis[(i & -i).bit_length() - 1]
        yield x


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of F2^r in canonical RREF."""

    r: int
    basis: tuple[int, ...]

    @classmethod
    def span(cls, r: int, vectors: Iterable[int]) -> Subspace:
        vectors = list(vectors)
        if any(v < 0 or v >> r for v in vectors):
            raise ParameterError(f"vector does not fit in {r} bits")
        return cls(r, rref(vectors))

    @classmethod
    def zero(cls, r: int) -> Subspace:
        return cls(r, ())

    @classmethod
    def full(cls, r: int) -> Subspace:
        return cls(r, tuple(1 << i for i in range(r)))

    @classmethod
    def coordinate(cls, r: int, coords: Iterable[int]) -> Subspace:
        return cls(r, tuple(sorted(1 << i for i in set(coords))))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(row.bit_length() - 1 for row in self.basis)

    def reduce(self, x: int) -> int:
        """The least element of the coset ``x + self``."""
        return _reduce(x, self.basis)

    def __contains__(self, x: int) -> bool:
        return _reduce(x, self.basis) == 0

    def __iter__(self) -> Iterator[int]:
        return _span(self.basis)

    def __len__(self) -> int:
        return 1 << len(self.basis)

    def annihilator(self) -> Subspace:
        """All functionals f with parity(f & x) == 0 for every x here."""
        return kernel(self.r, self.basis)

    def is_subspace_of(self, other: Subspace) -> bool:
        return all(row in other for row in self.basis)


def kernel(r: int, functionals: Iterable[int]) -> Subspace:
    """The subspace {x : parity(f & x) == 0 for all f in functionals}."""
    rows = rref(functionals)
    pivots = {row.bit_length() - 1: row for row in rows}
    out = []
    for j in range(r):
        if j in pivots:
            continue
        x = 1 << j
        for p, row in pivots.items():
            if (row >> j) & 1:
                x |= 1 << p
        out.append(x)
    return Subspace.span(r, out)


def gaussian_binomial(r: int, d: int) -> int:
    """Number of d-dimensional subspaces of F2^r."""
    if d < 0 or d > r:
        return 0
    num = den = 1
    for i in range(d):
        num *= (1 << (r - i)) - 1
        den *= (1 << (d - i)) - 1
    return num // den


def enumerate_subspaces(r: int, d: int) -> Iterator[Subspace]:
    """Yield every d-subspace of F2^r exactly once, in canonical order.

    Pivot sets are visited in lexicographic order; within a pivot set the
    free (non-pivot, below-pivot) entries count upward.
    """
    if not 0 <= d <= r:
        raise ParameterError(f"need 0 <= d <= r, got r={r}, d={d}")
    for pivots in itertools.combinations(range(r), d):
        pivot_set = set(pivots)
        free = [[j for j in range(p) if j not in pivot_set] for p in pivots]
        n_free = sum(len(f) for f in free)
        for t in range(1 << n_free):
            rows = []
            shift = 0
            for p, cols in zip(pivots, free):
                row = 1 << p
                for k, j in enumerate(cols):
                    if (t >> (shift + k)) & 1:
                        row |= 1 << j
                shift += len(cols)
                rows.append(row)
            yield Subspace(r, tuple(rows))


@dataclass(frozen=True)
class Flat:
    """An affine flat ``anchor + direction``; the anchor is the least point."""

    anchor: int
    direction: Subspace

    @classmethod
    def through(cls, point: int, direction: Subspace) -> Flat:
        return cls(direction.reduce(point), direction)

    @property
    def r(self) -> int:
        return self.direction.r

    @property
    def dim(self) -> int:
        return self.direction.dim

    @property
    def codim(self) -> int:
        return self.direction.r - self.direction.dim

    def __contains__(self, x: int) -> bool:
        return self.direction.reduce(x ^ self.anchor) == 0

    def __iter__(self) -> Iterator[int]:
        a = self.anchor
        return (a ^ s for s in self.direction)

    def __len__(self) -> int:
        return len(self.direction)


def flat_from_equations(r: int, point: int, functionals: Iterable[int]) -> Flat:
    """The flat through ``point`` cut out by fixing each functional's value."""
    return Flat.through(point, kernel(r, functionals))


@dataclass(frozen=True)
class PointSet:
    """A subset of F2^r held as a 2^r-bit characteristic mask."""

    r: int
    mask: int = 0

    def __post_init__(self):
        if not 1 <= self.r <= R_MAX:
            raise ParameterError(f"r={self.r} outside [1, R_MAX={R_MAX}]")
        if self.mask < 0 or self.mask >> (1 << self.r):
            raise ParameterError("mask has bits beyond 2^r")

    @classmethod
    def from_points(cls, r: int, points: Iterable[int]) -> PointSet:
        size = 1 << r
        mask = 0
        for p in points:
            if not 0 <= p < size:
                raise ParameterError(f"point {p} not in F2^{r}")
            mask |= 1 << p
        return cls(r, mask)

    @classmethod
    def from_bool_array(cls, r: int, arr: np.ndarray) -> PointSet:
        arr = np.asarray(arr, dtype=bool)
        if arr.shape != (1 << r,):
            raise ParameterError(f"expected {1 << r} entries, got {arr.shape}")
        packed = np.packbits(arr.astype(np.uint8), bitorder="little")
        return cls(r, int.from_bytes(packed.tobytes(), "little"))

    @classmethod
    def full(cls, r: int) -> PointSet:
        return cls(r, (1 << (1 << r)) - 1)

    def to_bool_array(self) -> np.ndarray:
        size = 1 << self.r
        raw = self.mask.to_bytes(max(1, size // 8), "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return bits[:size].astype(bool)

    def points(self) -> np.ndarray:
        """Sorted member points as an int64 array."""
        return np.flatnonzero(self.to_bool_array())

    def __iter__(self) -> Iterator[int]:
        return (int(p) for p in self.points())

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, x: int) -> bool:
        return 0 <= x < (1 << self.r) and (self.mask >> x) & 1 == 1

    def complement(self) -> PointSet:
        return PointSet(self.r, self.mask ^ ((1 << (1 << self.r)) - 1))

    def translate(self, t: int) -> PointSet:
        arr = self.to_bool_array()
        idx = np.arange(1 << self.r) ^ t
        return PointSet.from_bool_array(self.r, arr[idx])

    def __or__(self, other: PointSet) -> PointSet:
        self._same_r(other)
        return PointSet(self.r, self.mask | other.mask)

    def __and__(self, other: PointSet) -> PointSet:
        self._same_r(other)
        return PointSet(self.r, self.mask & other.mask)

    def __sub__(self, other: PointSet) -> PointSet:
        self._same_r(other)
        return PointSet(self.r, self.mask & ~other.mask)

    def issubset(self, other: PointSet) -> bool:
        self._same_r(other)
        return self.mask & ~other.mask == 0

    def _same_r(self, other: PointSet) -> None:
        if self.r != other.r:
            raise ParameterError(f"dimension mismatch: {self.r} vs {other.r}")


def flat_points(f: Flat) -> PointSet:
    return PointSet.from_points(f.r, f)


@dataclass(frozen=True)
class BlockDecomposition:
    """F2^r split into consecutive coordinate blocks V_1 + ... + V_k.

    Block ``i`` is spanned by the standard basis vectors of its coordinates,
    and ``weight(v, i)`` counts the support of ``v`` inside that block.
    """

    r: int
    dims: tuple[int, ...]

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate(self.dims, initial=0))[:-1]

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(((1 << n) - 1) << o for n, o in zip(self.dims, self.offsets))

    def __len__(self) -> int:
        return len(self.dims)

    def coords(self, i: int) -> range:
        return range(self.offsets[i], self.offsets[i] + self.dims[i])

    def project(self, v: int, i: int) -> int:
        return v & self.masks[i]

    def weight(self, v: int, i: int) -> int:
        return (v & self.masks[i]).bit_count()

    def weights(self, v: int) -> tuple[int, ...]:
        return tuple((v & m).bit_count() for m in self.masks)

    def pattern(self, v: int) -> int:
        """Bit i is set iff v has a non-zero component in block i."""
        return sum(1 << i for i, m in enumerate(self.masks) if v & m)

    def weight_arrays(self) -> list[np.ndarray]:
        """w_i over all of F2^r, for vectorized set enumeration."""
        xs = np.arange(1 << self.r, dtype=np.uint64)
        return [np.bitwise_count(xs & np.uint64(m)) for m in self.masks]


def direct_sum_split(r: int, dims: Sequence[int]) -> BlockDecomposition:
    dims = tuple(int(n) for n in dims)
    if any(n < 0 for n in dims) or sum(dims) != r:
        raise ParameterError(f"block dims {list(dims)} do not sum to r={r}")
    return BlockDecomposition(r, dims)


def balanced_dims(r: int, parts: int) -> list[int]:
    """Dims floor(r/parts) then floor(r/parts)+1, larger blocks last."""
    q, rho = divmod(r, parts)
    return [q] * (parts - rho) + [q + 1] * rho


def binomial_sum(r: int, d: int) -> int:
    return sum(math.comb(r, j) for j in range(0, d + 1))
