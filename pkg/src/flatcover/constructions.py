"""Explicit d-complete and d-non-blocking sets with witness maps.

Every builder returns a :class:`ConstructionRecord` carrying the set (as a
membership predicate, an exact size and, when r is small enough, a
materialized :class:`PointSet`) together with a witness map ``v -> Flat``:

* complete kinds: a d-flat through v contained in C + {v};
* non-blocking kinds: a flat of codimension <= d through v meeting B at
  most in v.

All block decompositions are coordinate-aligned (see ``f2.direct_sum_split``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import f2
from .codes import (
    LinearCode,
    bch_dimension_condition,
    carlitz_uchiyama_interval,
    dual_bch,
    simplex_code,
    weight_stats,
    K_ENUM_MAX,
)
from .errors import ConstructionError, InfeasibleError, ParameterError
from .f2 import BlockDecomposition, Flat, PointSet, Subspace, balanced_dims, direct_sum_split

COMPLETE_KINDS = ("product", "sum3", "simplex", "generic_code", "bch")
NONBLOCKING_KINDS = ("balanced", "prime", "multiblock")
PATTERN_TABLE_MAX = 24


@dataclass(frozen=True, eq=False)
class ConstructionRecord:
    r: int
    d: int
    kind: str
    size: int
    contains: Callable[[int], bool] = field(repr=False)
    witness: Callable[[int], Flat] = field(repr=False)
    materialize: Callable[[], PointSet] | None = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    @property
    def mode(self) -> str:
        return "complete" if self.kind in COMPLETE_KINDS else "nonblocking"

    @cached_property
    def pointset(self) -> PointSet:
        if self.materialize is None or self.r > f2.R_MAX:
            raise InfeasibleError(f"cannot materialize a set in F2^{self.r}")
        return self.materialize()

    def sidecar(self) -> dict:
        return {"r": self.r, "d": self.d, "kind": self.kind, "size": self.size, "meta": self.meta}


def _through(r: int, v: int, directions: Sequence[int]) -> Flat:
    return Flat.through(v, Subspace.span(r, directions))


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def _submasks(u: int) -> np.ndarray:
    out = np.zeros(1, dtype=np.int64)
    for b in _bits(u):
        out = np.concatenate([out, out | (1 << b)])
    return out


def _from_points(r: int, points: np.ndarray) -> PointSet:
    arr = np.zeros(1 << r, dtype=bool)
    arr[points] = True
    return PointSet.from_bool_array(r, arr)


# ---------------------------------------------------------------- complete


def complete_product(c1: ConstructionRecord, c2: ConstructionRecord) -> ConstructionRecord:
    """C1 + C2 inside F2^(r1) + F2^(r2); witness directions e_i + f_i."""
    if c1.mode != "complete" or c2.mode != "complete":
        raise ParameterError("both factors must be complete sets")
    if c1.d != c2.d:
        raise ParameterError(f"mismatched d: {c1.d} vs {c2.d}")
    r1, r2, d = c1.r, c2.r, c1.d
    r = r1 + r2
    low = (1 << r1) - 1

    def contains(v: int) -> bool:
        return c1.contains(v & low) and c2.contains(v >> r1)

    def witness(v: int) -> Flat:
        e = c1.witness(v & low).direction.basis
        f = c2.witness(v >> r1).direction.basis
        return _through(r, v, [a | (b << r1) for a, b in zip(e, f)])

    def materialize() -> PointSet:
        p1 = c1.pointset.points()
        p2 = c2.pointset.points() << r1
        return _from_points(r, (p1[:, None] | p2[None, :]).ravel())

    return ConstructionRecord(
        r, d, "product", c1.size * c2.size, contains, witness, materialize,
        {"r1": r1, "r2": r2, "factors": [c1.kind, c2.kind]},
    )


def sum3_complete(r: int) -> ConstructionRecord:
    """Union of coordinate subspaces, every one of dimension >= 2.

    Three blocks once r >= 6; for r in {4, 5} two blocks, and for r in {2, 3}
    a single block (the whole space).  Each point is a sum of three pairwise
    distinct members, which is exactly 2-completeness.
    """
    if r < 2:
        raise ParameterError("sum3 construction needs r >= 2")
    parts = min(3, r // 2)
    blocks = direct_sum_split(r, balanced_dims(r, parts))
    size = sum(1 << n for n in blocks.dims) - (parts - 1)

    def contains(v: int) -> bool:
        return blocks.pattern(v).bit_count() <= 1

    def witness(v: int) -> Flat:
        comps = [blocks.project(v, i) for i in range(parts)]
        nz = [i for i, x in enumerate(comps) if x]
        if len(nz) == 3:
            cs = comps
        elif len(nz) == 2:
            cs = [comps[nz[0]], comps[nz[1]], 0]
        elif len(nz) == 1:
            x = comps[nz[0]]
            a = next(1 << j for j in blocks.coords(nz[0]) if (1 << j) != x)
            cs = [a, a ^ x, 0]
        else:
            o = blocks.offsets[0]
            cs = [1 << o, 1 << (o + 1), (1 << o) | (1 << (o + 1))]
        return _through(r, v, [v ^ cs[0], v ^ cs[1]])

    def materialize() -> PointSet:
        pts = np.concatenate([_submasks(m) for m in blocks.masks])
        return _from_points(r, pts)

    return ConstructionRecord(
        r, 2, "sum3", size, contains, witness, materialize,
        {"block_dims": list(blocks.dims)},
    )


def _pattern_table(zero_sets: Sequence[int], n: int) -> np.ndarray:
    """allowed[P] iff P is contained in the zero set of some non-zero codeword."""
    allowed = np.zeros(1 << n, dtype=bool)
    allowed[list(zero_sets)] = True
    for i in range(n):
        view = allowed.reshape(-1, 2, 1 << i)
        view[:, 0, :] |= view[:, 1, :]
    return allowed


def complete_from_code(
    code: LinearCode,
    r: int,
    d: int,
    *,
    kind: str = "generic_code",
    max_weight: int | None = None,
    min_weight: int | None = None,
) -> ConstructionRecord:
    """C = union over non-zero s in the code of the sum of blocks V_i with s_i = 0.

    Requires r >= n, dim >= d and (n - M) * floor(r/n) >= d, with M the
    largest codeword weight.
    """
    n = code.n
    if code.k > K_ENUM_MAX:
        raise InfeasibleError(f"code dimension {code.k} too large to enumerate")
    if max_weight is None or min_weight is None:
        stats = weight_stats(code)
        max_weight, min_weight = stats.max, stats.min_nonzero
    failures = []
    if r < n:
        failures.append(f"r >= n fails: {r} < {n}")
    if code.k < d:
        failures.append(f"dim >= d fails: {code.k} < {d}")
    if (n - max_weight) * (r // n) < d:
        failures.append(f"(n-M)*floor(r/n) >= d fails: ({n}-{max_weight})*{r // n} < {d}")
    if failures:
        raise ConstructionError("; ".join(failures))

    blocks = direct_sum_split(r, balanced_dims(r, n))
    full = (1 << n) - 1
    zero_sets = sorted({full & ~s for s in itertools.islice(code.codewords(), 1, None)})
    # the union only needs the maximal zero sets; skip the quadratic filter for big codes
    if len(zero_sets) <= 4096:
        maximal = [z for z in zero_sets if not any(z != y and z & y == z for y in zero_sets)]
    else:
        maximal = zero_sets
    block_union = [sum(blocks.masks[i] for i in _bits(z)) for z in maximal]
    table = _pattern_table(maximal, n) if n <= PATTERN_TABLE_MAX else None

    def allowed(p: int) -> bool:
        if table is not None:
            return bool(table[p])
        return any(p & z == p for z in maximal)

    def contains(v: int) -> bool:
        return allowed(blocks.pattern(v))

    sub = code.subcode(d).gen

    def witness(v: int) -> Flat:
        comps = [blocks.project(v, i) for i in range(n)]
        dirs = []
        for g in sub:
            x = 0
            for i in _bits(g):
                x ^= comps[i]
            dirs.append(x)
        if f2.rank_f2(dirs) == d:
            return _through(r, v, dirs)
        # some non-zero s in the subcode kills v, so v lies in a subspace of C
        pat = blocks.pattern(v)
        s = next(s for s in itertools.islice(LinearCode(n, sub).codewords(), 1, None) if s & pat == 0)
        coords = [j for i in _bits(full & ~s) for j in blocks.coords(i)][:d]
        return Flat.through(v, Subspace.coordinate(r, coords))

    def materialize() -> PointSet:
        return _from_points(r, np.concatenate([_submasks(u) for u in block_union]))

    meta = {
        "n": n,
        "k": code.k,
        "mu": min_weight,
        "M": max_weight,
        "code": code.name,
        "block_dims": list(blocks.dims),
    }
    return ConstructionRecord(
        r, d, kind, _code_set_size(blocks, maximal, table), contains, witness, materialize, meta
    )


def _code_set_size(blocks: BlockDecomposition, maximal: Sequence[int], table) -> int:
    n = len(blocks)
    if table is None:
        raise InfeasibleError(f"size count needs n <= {PATTERN_TABLE_MAX}, got {n}")
    small = sum(1 << i for i, b in enumerate(blocks.dims) if b == blocks.dims[0])
    pats = np.flatnonzero(table).astype(np.uint64)
    a = np.bitwise_count(pats & np.uint64(small))
    c = np.bitwise_count(pats & np.uint64(((1 << n) - 1) & ~small))
    q_small = (1 << blocks.dims[0]) - 1
    q_large = (1 << blocks.dims[-1]) - 1
    keys, counts = np.unique(np.stack([a, c]), axis=1, return_counts=True)
    return sum(int(cnt) * q_small ** int(i) * q_large ** int(j) for (i, j), cnt in zip(keys.T, counts))


def _trivial_complete(r: int, d: int, kind: str) -> ConstructionRecord:
    coords = list(range(d))

    def materialize() -> PointSet:
        return PointSet.full(r)

    return ConstructionRecord(
        r, d, kind, 1 << r, lambda v: True,
        lambda v: Flat.through(v, Subspace.coordinate(r, coords)),
        materialize, {"trivial": True},
    )


def complete_simplex(r: int, d: int) -> ConstructionRecord:
    """The simplex-code construction; the full space when r < 2^d - 1."""
    if d < 3:
        raise ParameterError("simplex construction needs d >= 3")
    if r < d:
        raise ParameterError(f"need r >= d, got r={r}, d={d}")
    if r < (1 << d) - 1:
        return _trivial_complete(r, d, "simplex")
    rec = complete_from_code(simplex_code(d), r, d, kind="simplex")
    rec.meta["trivial"] = False
    return rec


class BchParameters(NamedTuple):
    m: int
    e: int
    m_raw: int
    clamped: bool
    dimension_ok: bool


def bch_parameters(r: int, d: int) -> BchParameters:
    """m = ceil((2/3)(log2(dr) - log2 log2(dr))), e = ceil(d/m); m clamped to >= 3."""
    if not r >= d >= 3:
        raise ParameterError(f"need r >= d >= 3, got r={r}, d={d}")
    x = math.log2(d * r)
    m_raw = math.ceil((2.0 / 3.0) * (x - math.log2(x)))
    m = max(3, m_raw)
    e = -(-d // m)
    return BchParameters(m, e, m_raw, m != m_raw, bch_dimension_condition(m, e))


def complete_bch(r: int, d: int, m: int | None = None, e: int | None = None) -> ConstructionRecord:
    """Dual-BCH construction; (m, e) default to :func:`bch_parameters`."""
    params = bch_parameters(r, d)
    auto_m = m is None
    m = params.m if m is None else m
    e = params.e if e is None else e
    n = (1 << m) - 1
    failures = []
    if not r > n:
        failures.append(f"r > n fails: {r} <= {n}")
    if not bch_dimension_condition(m, e):
        failures.append(f"e <= 2^(ceil(m/2)-1) fails for m={m}, e={e}")
    if failures:
        raise ConstructionError("; ".join(failures))
    code = dual_bch(m, e)
    if code.k <= K_ENUM_MAX:
        stats = weight_stats(code)
        big, small, source = stats.max, stats.min_nonzero, "enumerated"
    else:
        lo, hi = carlitz_uchiyama_interval(m, e)
        big, small, source = math.floor(hi), math.ceil(lo), "carlitz_uchiyama"
    rec = complete_from_code(code, r, d, kind="bch", max_weight=big, min_weight=small)
    rec.meta.update({"m": m, "e": e, "weights_from": source, "m_clamped": auto_m and params.clamped})
    return rec


# ------------------------------------------------------------ non-blocking


def nonblocking_balanced(r: int, d: int) -> ConstructionRecord:
    """2d blocks; B = {v : w(v) = d and every w_i(v) <= 1}."""
    if not 2 <= d <= r / 2:
        raise ParameterError(f"need 2 <= d <= r/2, got r={r}, d={d}")
    rho = r % (2 * d)
    blocks = direct_sum_split(r, balanced_dims(r, 2 * d))
    size = _elementary_symmetric(blocks.dims, d)

    def contains(v: int) -> bool:
        return v.bit_count() == d and max(blocks.weights(v)) <= 1

    def witness(v: int) -> Flat:
        ws = blocks.weights(v)
        if v.bit_count() == d and max(ws) <= 1:
            return f2.flat_from_equations(r, v, [1 << j for j in _bits(v)])
        heavy = next((i for i, w in enumerate(ws) if w >= 2), None)
        if heavy is not None:
            e = _bits(blocks.project(v, heavy))[:2]
            return f2.flat_from_equations(r, v, [1 << j for j in e])
        t = 0 if ws.count(0) >= d + 1 else 1
        idx = [i for i, w in enumerate(ws) if w == t][: d + 1]
        m0 = blocks.masks[idx[0]]
        return f2.flat_from_equations(r, v, [m0 ^ blocks.masks[i] for i in idx[1:]])

    def materialize() -> PointSet:
        pts = []
        for chosen in itertools.combinations(range(2 * d), d):
            for coords in itertools.product(*(blocks.coords(i) for i in chosen)):
                pts.append(sum(1 << j for j in coords))
        return PointSet.from_points(r, pts)

    return ConstructionRecord(
        r, d, "balanced", size, contains, witness, materialize,
        {"rho": rho, "block_dims": list(blocks.dims)},
    )


def _elementary_symmetric(values: Sequence[int], k: int) -> int:
    e = [1] + [0] * k
    for x in values:
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * x
    return e[k]


def nonblocking_prime(r: int, d: int) -> ConstructionRecord:
    """d blocks; B = {v : every w_i(v) <= 1}."""
    if not r >= d >= 2:
        raise ParameterError(f"need r >= d >= 2, got r={r}, d={d}")
    rho = r % d
    blocks = direct_sum_split(r, balanced_dims(r, d))
    size = math.prod(n + 1 for n in blocks.dims)

    def contains(v: int) -> bool:
        return max(blocks.weights(v)) <= 1

    def witness(v: int) -> Flat:
        ws = blocks.weights(v)
        heavy = next((i for i, w in enumerate(ws) if w >= 2), None)
        if heavy is not None:
            e = _bits(blocks.project(v, heavy))[:2]
            return f2.flat_from_equations(r, v, [1 << j for j in e])
        eqs = []
        for i, w in enumerate(ws):
            # w_i(u) even on empty blocks of v, supp_i(v) kept on the others
            eqs.append(blocks.masks[i] if w == 0 else blocks.project(v, i))
        return f2.flat_from_equations(r, v, eqs)

    def materialize() -> PointSet:
        choices = [[0] + [1 << j for j in blocks.coords(i)] for i in range(d)]
        return PointSet.from_points(r, (sum(c) for c in itertools.product(*choices)))

    return ConstructionRecord(
        r, d, "prime", size, contains, witness, materialize,
        {"rho": rho, "block_dims": list(blocks.dims)},
    )


def validate_parts(r: int, d: int, parts: Sequence[tuple[int, int]]) -> list[str]:
    """Names of the violated multiblock constraints (empty if valid)."""
    bad = []
    if not r >= d >= 1:
        bad.append(f"r >= d >= 1 fails (r={r}, d={d})")
    if not parts:
        bad.append("k >= 1 fails (no parts)")
    for i, (ri, di) in enumerate(parts, 1):
        if not ri >= di >= 0:
            bad.append(f"r_{i} >= d_{i} >= 0 fails ({ri}, {di})")
        if ri > d + di:
            bad.append(f"r_{i} <= d + d_{i} fails ({ri} > {d} + {di})")
    if sum(ri for ri, _ in parts) > r:
        bad.append(f"sum r_i <= r fails ({sum(ri for ri, _ in parts)} > {r})")
    if sum(di for _, di in parts) > d:
        bad.append(f"sum d_i <= d fails ({sum(di for _, di in parts)} > {d})")
    return bad


def nonblocking_multiblock(r: int, d: int, parts: Sequence[tuple[int, int]]) -> ConstructionRecord:
    """Blocks of dims r_i; B = {v : w_i(v) = d_i for all i}.

    Parts are padded with (1, 0) until the block dims sum to r.
    """
    parts = [(int(a), int(b)) for a, b in parts]
    bad = validate_parts(r, d, parts)
    if bad:
        raise ParameterError("; ".join(bad))
    padded = parts + [(1, 0)] * (r - sum(ri for ri, _ in parts))
    blocks = direct_sum_split(r, [ri for ri, _ in padded])
    targets = [di for _, di in padded]
    size = math.prod(math.comb(ri, di) for ri, di in padded)

    def contains(v: int) -> bool:
        return list(blocks.weights(v)) == targets

    def witness(v: int) -> Flat:
        ws = blocks.weights(v)
        i = next((i for i, (w, t) in enumerate(zip(ws, targets)) if w != t), None)
        if i is None:
            return f2.flat_from_equations(r, v, [1 << j for j in _bits(v)])
        ri, di = padded[i]
        if ws[i] >= di + 1:
            e = _bits(blocks.project(v, i))[: di + 1]
            either = di == d
        else:
            e = [j for j in blocks.coords(i) if not (v >> j) & 1][: ri - di + 1]
            either = ri == di + d
        if either:
            # u restricted to E is constant: all ones or all zeros
            eqs = [(1 << e[0]) | (1 << j) for j in e[1:]]
        else:
            eqs = [1 << j for j in e]
        return f2.flat_from_equations(r, v, eqs)

    def materialize() -> PointSet:
        per_block = [
            [sum(1 << j for j in cs) for cs in itertools.combinations(blocks.coords(i), di)]
            for i, (_, di) in enumerate(padded)
        ]
        return PointSet.from_points(r, (sum(c) for c in itertools.product(*per_block)))

    return ConstructionRecord(
        r, d, "multiblock", size, contains, witness, materialize,
        {"parts": [list(p) for p in parts], "padded_parts": [list(p) for p in padded],
         "block_dims": list(blocks.dims)},
    )


class RkParameters(NamedTuple):
    k: int
    d1: int
    r1: int

    @property
    def parts(self) -> list[tuple[int, int]]:
        return [(self.r1, self.d1)] * self.k


def rk_parameters(r: int, d: int) -> RkParameters:
    """k = floor(r/d), d1 = floor(d/k), r1 = floor(d1 r / d).

    Accepts sqrt(r) <= d <= r/2; the boundary d = sqrt(r) still yields
    valid multiblock parts.
    """
    if not (2 <= d and 2 * d <= r and d * d >= r):
        raise ParameterError(f"need sqrt(r) <= d <= r/2, got r={r}, d={d}")
    k = r // d
    d1 = d // k
    r1 = (d1 * r) // d
    return RkParameters(k, d1, r1)


def nonblocking_rk(r: int, d: int) -> ConstructionRecord:
    p = rk_parameters(r, d)
    rec = nonblocking_multiblock(r, d, p.parts)
    rec.meta.update({"rk": {"k": p.k, "d1": p.d1, "r1": p.r1}})
    return rec
