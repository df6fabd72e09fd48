from __future__ import annotations

import math

from flatcover.constructions import ConstructionRecord, validate_parts
from flatcover.f2 import Flat, PointSet, Subspace
from flatcover.verify import find_subspace


def record_from_set(s: PointSet, d: int) -> ConstructionRecord:
    """Wrap a verified d-complete set, with witnesses from subspace search."""
    members = {int(p) for p in s.points()}

    def witness(v: int) -> Flat:
        basis = find_subspace({x ^ v for x in members if x != v}, d)
        assert basis is not None
        return Flat.through(v, Subspace.span(s.r, basis))

    return ConstructionRecord(
        s.r, d, "generic_code", len(members), members.__contains__, witness, lambda: s, {}
    )


def balanced_formula(r: int, d: int) -> int:
    """Double sum over i + j = d of C(2d-rho, i) C(rho, j) a^i (a+1)^j."""
    a, rho = divmod(r, 2 * d)
    return sum(
        math.comb(2 * d - rho, i) * math.comb(rho, d - i) * a**i * (a + 1) ** (d - i)
        for i in range(d + 1)
    )


def prime_formula(r: int, d: int) -> int:
    a, rho = divmod(r, d)
    return (a + 1) ** (d - rho) * (a + 2) ** rho


def all_valid_parts(r: int, d: int):
    """Every non-increasing list of valid (r_i, d_i) parts for (r, d)."""
    cands = sorted(
        ((a, b) for a in range(1, r + 1) for b in range(0, min(a, d) + 1) if a <= d + b),
        reverse=True,
    )

    def extend(parts, start, r_left, d_left):
        if parts:
            yield list(parts)
        for i in range(start, len(cands)):
            a, b = cands[i]
            if a <= r_left and b <= d_left:
                yield from extend(parts + [(a, b)], i, r_left - a, d_left - b)

    for parts in extend([], 0, r, d):
        assert not validate_parts(r, d, parts)
        yield parts
