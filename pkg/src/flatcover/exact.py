"""Exact gamma_r(d) and beta_r(d) for small r.

* r <= 4: every subset of F2^r is scored at once with numpy, one boolean
  column per candidate set.
* r = 5: branch and bound, on the gamma side (iterative deepening over
  witness choices) or the beta side (largest non-blocking hole set).
* d in {0, 1, r-1, r}: closed-form optimum, confirmed by the oracle on the
  optimum and on a representative of the next size down.

For r <= 4, beta has its own co-d-subspace enumeration, cross-checked
against 2^r - gamma_r(r-d).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InfeasibleError, ParameterError
from .f2 import PointSet, enumerate_subspaces, kernel
from .verify import default_budget, is_complete, is_nonblocking

FULL_ENUMERATION_MAX_R = 4
BRANCH_AND_BOUND_MAX_R = 5


@dataclass(frozen=True)
class ExactResult:
    r: int
    d: int
    quantity: str
    value: int
    optimal_set: PointSet
    method: str

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "d": self.d,
            "quantity": self.quantity,
            "value": self.value,
            "method": self.method,
            "optimal_set": [int(p) for p in self.optimal_set.points()],
        }

    @classmethod
    def from_json(cls, data: dict) -> ExactResult:
        s = PointSet.from_points(data["r"], data["optimal_set"])
        return cls(data["r"], data["d"], data["quantity"], data["value"], s, data["method"])


class ExactCache:
    """Results keyed by (quantity, r, d) in a small JSON file.

    Entries are re-verified against the oracle when read back.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.data: dict = json.loads(self.path.read_text()) if self.path.exists() else {}

    @staticmethod
    def key(quantity: str, r: int, d: int) -> str:
        return f"{quantity}:{r}:{d}"

    def get(self, quantity: str, r: int, d: int) -> ExactResult | None:
        raw = self.data.get(self.key(quantity, r, d))
        if raw is None:
            return None
        res = ExactResult.from_json(raw)
        if len(res.optimal_set) != res.value or not _passes_oracle(res):
            return None
        return res

    def put(self, res: ExactResult) -> None:
        self.data[self.key(res.quantity, res.r, res.d)] = res.to_json()
        self.path.write_text(json.dumps(self.data, indent=1, sort_keys=True) + "\n")


def _passes_oracle(res: ExactResult) -> bool:
    if res.quantity == "gamma":
        return is_complete(res.optimal_set, res.d).holds
    if res.quantity == "beta":
        return is_nonblocking(res.optimal_set, res.d).holds
    from .verify import sum3_property

    return sum3_property(res.optimal_set)


def _mask(points) -> int:
    return sum(1 << p for p in points)


def _shifted_masks(r: int, punctured: list[list[int]]) -> list[list[int]]:
    """For each v, the masks of v + (L minus {0}) for each listed L minus {0}."""
    return [[_mask(v ^ u for u in pts) for pts in punctured] for v in range(1 << r)]


def _scan_all_subsets(r: int, masks: list[list[int]], superset: bool) -> np.ndarray:
    """ok[S] for every subset S of F2^r (S indexed by its mask).

    superset=True: S qualifies if for every v it contains one of v's masks.
    superset=False: S qualifies if for every v it misses one of v's masks.
    """
    idx = np.arange(1 << (1 << r), dtype=np.uint32)
    ok = np.ones(idx.shape, dtype=bool)
    for per_v in masks:
        any_v = np.zeros(idx.shape, dtype=bool)
        for m in per_v:
            m = np.uint32(m)
            any_v |= ((idx & m) == m) if superset else ((idx & m) == 0)
        ok &= any_v
    return ok


def _best(r: int, ok: np.ndarray, maximize: bool) -> tuple[int, PointSet]:
    cand = np.flatnonzero(ok)
    sizes = np.bitwise_count(cand.astype(np.uint32))
    pos = int(np.argmax(sizes) if maximize else np.argmin(sizes))
    return int(sizes[pos]), PointSet(r, int(cand[pos]))


def _check_enumeration_budget(r: int, n_options: int, budget: int) -> None:
    cost = (1 << (1 << r)) * (1 << r) * max(1, n_options)
    if r > FULL_ENUMERATION_MAX_R or cost > budget:
        raise InfeasibleError(f"full enumeration at r={r} needs {cost} tests", budget)


def _gamma_enumeration(r: int, d: int, budget: int) -> tuple[int, PointSet]:
    subs = [[u for u in s if u] for s in enumerate_subspaces(r, d)]
    _check_enumeration_budget(r, len(subs), budget)
    ok = _scan_all_subsets(r, _shifted_masks(r, subs), superset=True)
    return _best(r, ok, maximize=False)


def _beta_enumeration(r: int, d: int, budget: int) -> tuple[int, PointSet]:
    # co-d-subspaces as kernels of d-dimensional spaces of functionals
    cosubs = [[u for u in kernel(r, w.basis) if u] for w in enumerate_subspaces(r, d)]
    _check_enumeration_budget(r, len(cosubs), budget)
    ok = _scan_all_subsets(r, _shifted_masks(r, cosubs), superset=False)
    return _best(r, ok, maximize=True)


def _sum3_enumeration(r: int, budget: int) -> tuple[int, PointSet]:
    size = 1 << r
    triples: list[list[int]] = [[] for _ in range(size)]
    for a in range(size):
        for b in range(a + 1, size):
            c = a ^ b
            for z in range(b + 1, size):
                triples[c ^ z].append((1 << a) | (1 << b) | (1 << z))
    _check_enumeration_budget(r, max(len(t) for t in triples), budget)
    # triples[v] already lists masks, not point lists
    idx = np.arange(1 << size, dtype=np.uint32)
    ok = np.ones(idx.shape, dtype=bool)
    for per_v in triples:
        any_v = np.zeros(idx.shape, dtype=bool)
        for m in per_v:
            m = np.uint32(m)
            any_v |= (idx & m) == m
        ok &= any_v
    return _best(r, ok, maximize=False)


def _gamma_branch_and_bound(r: int, d: int, budget: int) -> tuple[int, PointSet]:
    """Smallest d-complete set by iterative deepening on its size.

    The witness of v = 0 is fixed to span(e_0, ..., e_{d-1}): the affine
    group acts transitively on (point, d-flat through it) pairs.  Each node
    picks the unsatisfied point whose cheapest witness costs most and
    branches over its witnesses in order of cost.
    """
    subs = [[u for u in s if u] for s in enumerate_subspaces(r, d)]
    opts = np.array(_shifted_masks(r, subs), dtype=np.uint64)
    full = (1 << (1 << r)) - 1
    start = (1 << (1 << d)) - 2  # the points 1 .. 2^d - 1 of span(e_0..e_{d-1})
    nodes = 0

    def dfs(c: int, limit: int, seen: set[int]) -> int | None:
        nonlocal nodes
        nodes += 1
        if nodes * opts.size > budget:
            raise InfeasibleError(f"branch and bound exceeded budget at r={r}, d={d}", budget)
        costs = np.bitwise_count(opts & np.uint64(full & ~c))
        cheapest = costs.min(axis=1)
        worst = int(cheapest.max())
        if worst == 0:
            return c
        have = c.bit_count()
        if have + worst > limit:
            return None
        v = int(np.argmax(cheapest))
        row = costs[v]
        for j in np.argsort(row, kind="stable"):
            if have + int(row[j]) > limit:
                break
            nxt = c | int(opts[v, j])
            if nxt in seen:
                continue
            seen.add(nxt)
            found = dfs(nxt, limit, seen)
            if found is not None:
                return found
        return None

    limit = start.bit_count()
    while limit <= 1 << r:
        found = dfs(start, limit, set())
        if found is not None:
            return found.bit_count(), PointSet(r, found)
        limit += 1
    raise AssertionError("the full space is always complete")


def _word_matrix(rows: list[list[int]], n_opts: int) -> np.ndarray:
    """Pack per-point option sets (bit j = option j) into uint64 words."""
    words = max(1, -(-n_opts // 64))
    out = np.zeros((len(rows), words), dtype=np.uint64)
    for i, bits in enumerate(rows):
        for w in range(words):
            out[i, w] = (bits >> (64 * w)) & ((1 << 64) - 1)
    return out


def _beta_branch_and_bound(r: int, d: int, budget: int) -> tuple[int, PointSet]:
    """Largest d-non-blocking set by depth-first search with an incumbent.

    Each point v keeps the set of co-d-subspaces L still avoiding B on
    v + (L minus {0}); adding b removes those whose shifted flat contains b.
    Any three points are affinely equivalent to {0, e_0, e_1}, and a fourth
    can be taken to be e_0 + e_1 or e_2, which gives two seeds.
    """
    size = 1 << r
    cosubs = [[u for u in kernel(r, w.basis) if u] for w in enumerate_subspaces(r, d)]
    n_opts = len(cosubs)
    # kill[b][v]: options of v whose punctured flat contains b
    kill_bits = [[0] * size for _ in range(size)]
    for v in range(size):
        for j, pts in enumerate(cosubs):
            for u in pts:
                kill_bits[v ^ u][v] |= 1 << j
    kill = np.stack([_word_matrix(rows, n_opts) for rows in kill_bits])
    alive0 = _word_matrix([(1 << n_opts) - 1] * size, n_opts)
    work = 0

    def extend(alive: np.ndarray, b: int) -> np.ndarray | None:
        nxt = alive & ~kill[b]
        return nxt if nxt.any(axis=1).all() else None

    best: list[int] = []

    def dfs(chosen: list[int], alive: np.ndarray, cands: list[int]) -> None:
        nonlocal best, work
        work += kill[0].size * max(1, len(cands))
        if work > budget:
            raise InfeasibleError(f"branch and bound exceeded budget at r={r}, d={d}", budget)
        if len(chosen) > len(best):
            best = list(chosen)
        if not cands or len(chosen) + len(cands) <= len(best):
            return
        arr = np.asarray(cands)
        ok = (alive[None] & ~kill[arr]).any(axis=2).all(axis=1)
        feasible = [c for c, good in zip(cands, ok) if good]
        for i, b in enumerate(feasible):
            if len(chosen) + len(feasible) - i <= len(best):
                return
            dfs(chosen + [b], alive & ~kill[b], feasible[i + 1:])

    seeds: list[tuple[list[int], list[int]]] = []
    if r >= 3:
        seeds = [([0, 1, 2, 3], list(range(4, size))), ([0, 1, 2, 4], list(range(5, size)))]
    else:
        seeds = [([], list(range(size)))]
    for prefix in ([], [0], [0, 1], [0, 1, 2]):
        state = alive0
        for b in prefix:
            state = extend(state, b) if state is not None else None
        if state is not None and len(prefix) > len(best):
            best = list(prefix)
    for prefix, rest in seeds:
        if len(best) < len(prefix) - 1:
            break  # no feasible 3-set, so no larger set either
        state = alive0
        for b in prefix:
            state = extend(state, b) if state is not None else None
        if state is not None:
            dfs(prefix, state, rest)
    return len(best), PointSet.from_points(r, best)


def _gamma_closed_form(r: int, d: int) -> tuple[int, PointSet] | None:
    """Optimum for d in {0, 1, r-1, r}, with a next-smaller representative refuted."""
    size = 1 << r
    if d == 0:
        return 0, PointSet(r, 0)
    if d == r:
        best, smaller = PointSet.full(r), PointSet.full(r) - PointSet.from_points(r, [0])
    elif d == 1:
        best, smaller = PointSet.from_points(r, [0, 1]), PointSet.from_points(r, [0])
    elif d == r - 1:
        # all 3-point sets are affinely equivalent, so one refutation covers them
        best = PointSet.full(r) - PointSet.from_points(r, [0, 1])
        smaller = PointSet.full(r) - PointSet.from_points(r, [0, 1, 2])
    else:
        return None
    if not is_complete(best, d).holds or is_complete(smaller, d).holds:
        raise AssertionError(f"closed-form optimum failed the oracle at r={r}, d={d}")
    # single points and complements of points are equivalent under translation
    assert len(smaller) == len(best) - 1 or size == 2
    return len(best), best


def _solve(quantity: str, r: int, d: int, budget: int) -> tuple[int, PointSet, str]:
    """(value, optimal set, method) without cross-checks.

    Above the enumeration range each search runs on whichever side of the
    duality has the smaller optimum: gamma for d <= r/2, beta otherwise
    (holes of a d-complete set form an (r-d)-non-blocking set).
    """
    size = 1 << r
    dual_d = r - d
    if quantity == "beta":
        if r <= FULL_ENUMERATION_MAX_R:
            value, best = _beta_enumeration(r, d, budget)
            return value, best, "full_enumeration"
        g_value, g_best, g_method = _solve("gamma", r, dual_d, budget)
        return size - g_value, g_best.complement(), g_method
    if r > FULL_ENUMERATION_MAX_R:
        closed = _gamma_closed_form(r, d)
        if closed is not None:
            return closed[0], closed[1], "closed_form"
    if r <= FULL_ENUMERATION_MAX_R:
        value, best = _gamma_enumeration(r, d, budget)
        return value, best, "full_enumeration"
    if r > BRANCH_AND_BOUND_MAX_R:
        raise InfeasibleError(f"no exact method at r={r}, d={d}", budget)
    if 2 * d <= r:
        value, best = _gamma_branch_and_bound(r, d, budget)
    else:
        holes, hole_set = _beta_branch_and_bound(r, dual_d, budget)
        value, best = size - holes, hole_set.complement()
    return value, best, "branch_and_bound"


def _exact(quantity: str, r: int, d: int, budget: int | None, cache: ExactCache | None) -> ExactResult:
    if not 0 <= d <= r:
        raise ParameterError(f"need 0 <= d <= r, got r={r}, d={d}")
    if cache is not None:
        hit = cache.get(quantity, r, d)
        if hit is not None:
            return hit
    budget = default_budget() if budget is None else budget
    value, best, method = _solve(quantity, r, d, budget)
    res = ExactResult(r, d, quantity, value, best, method)
    if len(best) != value or not _passes_oracle(res):
        raise AssertionError(f"optimal set for {quantity}_{r}({d}) fails the oracle")
    if cache is not None:
        cache.put(res)
    return res


def exact_gamma(
    r: int, d: int, *, budget: int | None = None, cache: ExactCache | None = None
) -> ExactResult:
    """Minimum size of a d-complete subset of F2^r."""
    return _exact("gamma", r, d, budget, cache)


def exact_beta(
    r: int, d: int, *, budget: int | None = None, cache: ExactCache | None = None
) -> ExactResult:
    """Maximum size of a d-non-blocking subset of F2^r.

    For r <= 4 the co-d-subspace enumeration is independent of gamma and
    is cross-checked against 2^r - gamma_r(r - d).
    """
    res = _exact("beta", r, d, budget, cache)
    if res.method == "full_enumeration":
        dual = exact_gamma(r, r - d, budget=budget, cache=cache)
        if res.value + dual.value != 1 << r:
            raise AssertionError(
                f"beta_{r}({d}) = {res.value} but 2^r - gamma_{r}({r - d}) = {(1 << r) - dual.value}"
            )
    return res


def exact_sum3(r: int, *, budget: int | None = None) -> ExactResult:
    """Smallest C with every point a sum of three pairwise distinct members."""
    if not 2 <= r <= FULL_ENUMERATION_MAX_R:
        raise InfeasibleError(f"sum-of-three enumeration supports 2 <= r <= 4, got {r}")
    budget = default_budget() if budget is None else budget
    value, best = _sum3_enumeration(r, budget)
    return ExactResult(r, 2, "sum3", value, best, "full_enumeration")


def exact_table(r_values, *, budget: int | None = None, cache: ExactCache | None = None) -> list[dict]:
    """gamma_r(d) and beta_r(d) for every d, over the given r."""
    rows = []
    for r in r_values:
        for d in range(r + 1):
            g = exact_gamma(r, d, budget=budget, cache=cache)
            b = exact_beta(r, d, budget=budget, cache=cache)
            rows.append({
                "r": r,
                "d": d,
                "gamma": g.value,
                "beta": b.value,
                "gamma_method": g.method,
                "beta_method": b.method,
                "gamma_set": [int(p) for p in g.optimal_set.points()],
                "beta_set": [int(p) for p in b.optimal_set.points()],
            })
    return rows


def binomial_floor(r: int, d: int) -> int:
    """The degree bound gamma_r(d) >= sum_{j<d} C(r, j) used to seed checks."""
    return sum(math.comb(r, j) for j in range(d))
