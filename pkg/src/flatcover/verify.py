"""Ground-truth checks for d-completeness and d-non-blocking.

The search for a witness subspace through ``v`` works on the direction set
``D = (C + v) minus {0}``: it grows a basis u_1 < u_2 < ... while keeping the
candidate set ``{x : x + s in D for every s in the current span}``.  Taking
u_{k+1} = min(L minus span_k) shows the ordered search misses no subspace, so
"not found" is a proof of absence.
"""

from __future__ import annotations

import os
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .constructions import ConstructionRecord
from .errors import InfeasibleError, ParameterError
from .f2 import Flat, PointSet, Subspace, enumerate_subspaces, gaussian_binomial, kernel, parity

DEFAULT_SEED = 0xF1A7
DEFAULT_BUDGET = 10**9
DEFAULT_SAMPLE = 100_000
FULL_CHECK_MAX_R = 22


def default_budget() -> int:
    return int(os.environ.get("FLATCOVER_BUDGET", DEFAULT_BUDGET))


@dataclass
class VerifyReport:
    property: str
    d: int
    holds: bool
    counterexample: int | None = None
    checked: str = "full"
    sample_count: int | None = None
    seed: int | None = None
    witnesses: dict[int, Flat] | None = field(default=None, repr=False)
    work: int = 0
    detail: str = ""

    def to_json(self) -> dict:
        out = {
            "property": self.property,
            "d": self.d,
            "holds": self.holds,
            "counterexample": self.counterexample,
            "checked": self.checked,
            "work": self.work,
        }
        if self.checked == "sampled":
            out["sample_count"] = self.sample_count
            out["seed"] = self.seed
        if self.detail:
            out["detail"] = self.detail
        return out


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def charge(self, n: int) -> None:
        self.used += n
        if self.used > self.limit:
            raise InfeasibleError(f"search budget of {self.limit} membership tests exceeded", self.limit)


def find_subspace(directions: set[int], d: int, budget: _Budget | None = None) -> list[int] | None:
    """A basis of a d-subspace L with L minus {0} inside ``directions``, or None.

    Bases are built in reduced echelon form (strictly decreasing leading bits,
    pivots cleared in earlier vectors), so every subspace is tried once.
    """
    budget = budget or _Budget(default_budget())

    def search(cands: set[int], basis: list[int], top: int) -> list[int] | None:
        k = len(basis)
        if k == d:
            return basis
        if len(cands) < (1 << d) - (1 << k):
            return None
        for u in sorted(cands, reverse=True):
            lead = u.bit_length() - 1
            if lead >= top:
                continue
            if lead < d - k - 1:
                break
            if any((b >> lead) & 1 for b in basis):
                continue
            budget.charge(len(cands))
            nxt = {x for x in cands if x ^ u in cands}
            found = search(nxt, basis + [u], lead)
            if found is not None:
                return found
        return None

    return search(set(directions), [], 1 << 30)


def _points_to_check(r: int, sample: int | None, seed: int) -> tuple[list[int], str]:
    if sample is None or sample >= 1 << r:
        return list(range(1 << r)), "full"
    rng = random.Random(seed)
    return [rng.randrange(1 << r) for _ in range(sample)], "sampled"


def _complete_chunk(args):
    r, members, d, exhaustive, vs, limit, keep = args
    budget = _Budget(limit)
    member_set = set(members)
    found: dict[int, Flat] = {}
    for v in vs:
        if exhaustive:
            basis = None
            for sub in enumerate_subspaces(r, d):
                budget.charge(len(sub))
                if all(v ^ u in member_set for u in sub if u):
                    basis = list(sub.basis)
                    break
        else:
            basis = find_subspace({c ^ v for c in members if c != v}, d, budget)
        if basis is None:
            return v, found, budget.used
        if keep:
            found[v] = Flat.through(v, Subspace.span(r, basis))
    return None, found, budget.used


def _run_chunks(worker, r, payload, vs, workers, limit, keep):
    if workers > 1 and len(vs) > 1:
        step = -(-len(vs) // workers)
        chunks = [vs[i:i + step] for i in range(0, len(vs), step)]
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(worker, [(r, *payload, c, limit, keep) for c in chunks]))
    else:
        results = [worker((r, *payload, vs, limit, keep))]
    bad, witnesses, work = None, {}, 0
    for v, found, used in results:
        work += used
        witnesses.update(found)
        if v is not None and bad is None:
            bad = v  # chunks are in point order, so the first failure wins
    if work > limit:
        raise InfeasibleError(f"search budget of {limit} membership tests exceeded", limit)
    return bad, witnesses, work


def is_complete(
    c: PointSet,
    d: int,
    *,
    exhaustive: bool = False,
    sample: int | None = None,
    seed: int = DEFAULT_SEED,
    budget: int | None = None,
    workers: int = 1,
    keep_witnesses: bool = False,
) -> VerifyReport:
    """Does every v have a d-subspace L with v + (L minus {0}) inside C?"""
    r = c.r
    if not 0 <= d <= r:
        raise ParameterError(f"need 0 <= d <= r, got r={r}, d={d}")
    limit = default_budget() if budget is None else budget
    vs, mode = _points_to_check(r, sample, seed)
    if exhaustive and gaussian_binomial(r, d) * len(vs) > limit:
        raise InfeasibleError(
            f"exhaustive check needs {gaussian_binomial(r, d) * len(vs)} subspace tests", limit
        )
    members = [int(p) for p in c.points()]
    holes = (1 << r) - len(members)
    kernel_cost = gaussian_binomial(r, r - d) * holes * len(vs)
    if not exhaustive and 2 * d > r and kernel_cost <= limit:
        # dense C: scan the (r-d)-dim functional spaces whose kernel misses every hole
        hole_list = [int(p) for p in c.complement().points()]
        bad, witnesses, work = _run_chunks(
            _nonblocking_chunk, r, (hole_list, r - d, True), vs, workers, limit, keep_witnesses
        )
    else:
        bad, witnesses, work = _run_chunks(
            _complete_chunk, r, (members, d, exhaustive), vs, workers, limit, keep_witnesses
        )
    return VerifyReport(
        "complete", d, bad is None, bad, mode,
        len(vs) if mode == "sampled" else None,
        seed if mode == "sampled" else None,
        witnesses if keep_witnesses else None, work,
    )


def _nonblocking_chunk(args):
    r, members, d, _exhaustive, vs, limit, keep = args
    budget = _Budget(limit)
    found: dict[int, Flat] = {}
    functional_spaces = [sub.basis for sub in enumerate_subspaces(r, d)]
    for v in vs:
        shifted = [b ^ v for b in members if b != v]
        hit = None
        for fs in functional_spaces:
            budget.charge(len(shifted))
            # x avoids ker(fs) iff some functional is odd on it
            if all(any(parity(f & x) for f in fs) for x in shifted):
                hit = fs
                break
        if hit is None:
            return v, found, budget.used
        if keep:
            found[v] = Flat.through(v, kernel(r, hit))
    return None, found, budget.used


def is_nonblocking(
    b: PointSet,
    d: int,
    *,
    method: str = "duality",
    exhaustive: bool = False,
    sample: int | None = None,
    seed: int = DEFAULT_SEED,
    budget: int | None = None,
    workers: int = 1,
    keep_witnesses: bool = False,
) -> VerifyReport:
    """Does every v have a co-d-subspace L with (v + (L minus {0})) disjoint from B?

    ``method="duality"`` checks (r-d)-completeness of the complement;
    ``method="direct"`` scans co-d-subspaces as kernels of d functionals.
    """
    r = b.r
    if not 0 <= d <= r:
        raise ParameterError(f"need 0 <= d <= r, got r={r}, d={d}")
    if method == "duality":
        rep = is_complete(
            b.complement(), r - d, exhaustive=exhaustive, sample=sample, seed=seed,
            budget=budget, workers=workers, keep_witnesses=keep_witnesses,
        )
        rep.property, rep.d = "nonblocking", d
        return rep
    if method != "direct":
        raise ParameterError(f"unknown method {method!r}")
    limit = default_budget() if budget is None else budget
    vs, mode = _points_to_check(r, sample, seed)
    if gaussian_binomial(r, d) * len(vs) > limit:
        raise InfeasibleError("direct co-d-subspace scan exceeds budget", limit)
    members = [int(p) for p in b.points()]
    bad, witnesses, work = _run_chunks(
        _nonblocking_chunk, r, (members, d, True), vs, workers, limit, keep_witnesses
    )
    return VerifyReport(
        "nonblocking", d, bad is None, bad, mode,
        len(vs) if mode == "sampled" else None,
        seed if mode == "sampled" else None,
        witnesses if keep_witnesses else None, work,
    )


def check_flat(flat: Flat, v: int, d: int, mode: str, member) -> str:
    """Reason the flat fails as a witness at v (empty string if it is fine)."""
    if v not in flat:
        return "flat does not pass through v"
    if mode == "complete":
        if flat.dim != d:
            return f"flat has dimension {flat.dim}, expected {d}"
        for x in flat:
            if x != v and not member(x):
                return f"flat point {x} lies outside the set"
        return ""
    if flat.codim > d:
        return f"flat has codimension {flat.codim} > {d}"
    for x in flat:
        if x != v and member(x):
            return f"flat meets the set at {x}"
    return ""


def check_witnesses(
    rec: ConstructionRecord,
    *,
    members: PointSet | None = None,
    sample: int | None = None,
    seed: int = DEFAULT_SEED,
) -> VerifyReport:
    """Validate the record's witness flat at every point (or a seeded sample).

    ``members`` overrides the record's own membership test, e.g. to check a
    set read back from a file against the record's witnesses.
    """
    r, d = rec.r, rec.d
    if sample is None and r > FULL_CHECK_MAX_R:
        sample = DEFAULT_SAMPLE
    vs, mode = _points_to_check(r, sample, seed)
    if members is not None:
        if members.r != r:
            raise ParameterError(f"set lives in F2^{members.r}, record in F2^{r}")
        table = members.to_bool_array().tolist()
        member = table.__getitem__
        sparse = [int(p) for p in members.points()] if len(members) < 4096 else None
    else:
        member = rec.contains
        sparse = None
        if rec.mode == "nonblocking" and rec.size < 4096 and r <= 24:
            sparse = [int(p) for p in rec.pointset.points()]
    work = 0
    for v in vs:
        flat = rec.witness(v)
        if rec.mode == "nonblocking" and sparse is not None and len(sparse) < len(flat):
            reason = "" if v in flat else "flat does not pass through v"
            if not reason and flat.codim > d:
                reason = f"flat has codimension {flat.codim} > {d}"
            if not reason:
                hit = next((x for x in sparse if x != v and x in flat), None)
                reason = "" if hit is None else f"flat meets the set at {hit}"
            work += len(sparse)
        else:
            reason = check_flat(flat, v, d, rec.mode, member)
            work += len(flat)
        if reason:
            return VerifyReport(
                rec.mode, d, False, v, mode, len(vs) if mode == "sampled" else None,
                seed if mode == "sampled" else None, work=work, detail=reason,
            )
    return VerifyReport(
        rec.mode, d, True, None, mode, len(vs) if mode == "sampled" else None,
        seed if mode == "sampled" else None, work=work,
    )


def sum3_property(c: PointSet, *, cross_check: bool = False) -> bool:
    """Is every point a sum of three pairwise distinct members of C?

    For v = c1 + c2 + c3 we need, for some c3, a pair {c1, c2} not using c3
    with c1 + c2 = v + c3; the only pair through c3 with that sum is {c3, v}.
    """
    pts = [int(p) for p in c.points()]
    if len(pts) < 3:
        holds = False
    else:
        pair_sums = Counter(a ^ b for i, a in enumerate(pts) for b in pts[i + 1:])
        holds = True
        for v in range(1 << c.r):
            v_in = 1 if v in c else 0
            if not any(pair_sums[v ^ z] - v_in > 0 for z in pts if v ^ z):
                holds = False
                break
    if cross_check and c.r >= 2:
        other = is_complete(c, 2).holds
        if other != holds:
            raise AssertionError(f"sum-of-three ({holds}) disagrees with 2-completeness ({other})")
    return holds
