"""Closed-form bounds on gamma_r(d) and beta_r(d).

Integral formulas are exact Python integers or Fractions.  Real-valued
formulas are evaluated in interval arithmetic (113-bit mpmath intervals)
and every bound is turned into the integer it conservatively implies:
lower bounds use the lower end of the interval, upper bounds the upper end.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

from mpmath import iv, libmp, mp, mpf

from .errors import ParameterError
from .f2 import binomial_sum

PRECISION = 113
DEFAULT_BCH_K = 28  # artifact choice, see bch bound docstring
MULTIBLOCK_DP_MAX_R = 128

Exact = Union[int, Fraction]


@contextmanager
def _prec():
    old = iv.prec
    iv.prec = PRECISION
    try:
        yield
    finally:
        iv.prec = old


def _endpoints(x) -> tuple[Fraction, Fraction]:
    lo, hi = x._mpi_
    out = []
    for end in (lo, hi):
        man, exp = libmp.to_man_exp(end)
        out.append(Fraction(man) * (Fraction(2) ** exp))
    return out[0], out[1]


@dataclass(frozen=True)
class Interval:
    """A closed real interval with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    @classmethod
    def of(cls, x) -> Interval:
        return cls(*_endpoints(x))

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)


Value = Union[int, Fraction, Interval]


@dataclass(frozen=True)
class Bound:
    """One named bound: ``quantity (<|<=|>|>=) value``."""

    name: str
    side: str  # "lower" or "upper"
    value: Value
    strict: bool = False
    note: str = ""

    def implied(self) -> int:
        """The best integer bound this one certifies."""
        v = self.value
        if self.side == "lower":
            x = v.lo if isinstance(v, Interval) else Fraction(v)
            return math.floor(x) + 1 if self.strict else math.ceil(x)
        x = v.hi if isinstance(v, Interval) else Fraction(v)
        return math.ceil(x) - 1 if self.strict else math.floor(x)

    def admits(self, n: int) -> bool:
        return n >= self.implied() if self.side == "lower" else n <= self.implied()

    def to_json(self) -> dict:
        v = self.value
        out = {"name": self.name, "side": self.side, "strict": self.strict, "implied": self.implied()}
        if isinstance(v, Interval):
            out["value"] = float(v)
        elif isinstance(v, Fraction) and v.denominator != 1:
            out["value"] = f"{v.numerator}/{v.denominator}"
        else:
            out["value"] = int(v)
        if self.note:
            out["note"] = self.note
        return out


# -- entropy and binomial estimates ------------------------------------------

def entropy(x) -> mpf:
    """Natural-log entropy H(x) = -x ln x - (1-x) ln(1-x), H(0) = H(1) = 0."""
    x = mpf(x) if not isinstance(x, Fraction) else mpf(x.numerator) / x.denominator
    if x < 0 or x > 1:
        raise ParameterError(f"entropy needs 0 <= x <= 1, got {x}")
    if x == 0 or x == 1:
        return mpf(0)
    with mp.workprec(PRECISION):
        return -x * mp.log(x) - (1 - x) * mp.log(1 - x)


def exp_entropy(r: int, d: int) -> Fraction:
    """e^{r H(d/r)} in the exact form r^r / (d^d (r-d)^(r-d))."""
    if not 0 <= d <= r or r < 1:
        raise ParameterError(f"need 0 <= d <= r, r >= 1, got r={r}, d={d}")
    return Fraction(r**r, d**d * (r - d) ** (r - d))


def _check_half(r: int, d: int) -> None:
    if not (1 <= d and 2 * d <= r):
        raise ParameterError(f"need 1 <= d <= r/2, got r={r}, d={d}")


def binomial_sandwich_check(r: int, d: int) -> bool:
    """e^{rH}/sqrt(2r) <= C(r,d) < sum_{j<=d} C(r,j) <= e^{rH}, in integers."""
    _check_half(r, d)
    den = d**d * (r - d) ** (r - d)
    c = math.comb(r, d)
    left = r ** (2 * r) <= 2 * r * c * c * den * den
    middle = c < binomial_sum(r, d)
    right = binomial_sum(r, d) * den <= r**r
    return left and middle and right


def main_term_check(r: int, d: int) -> bool:
    """e^{rH(d/r)} > C(2d,d) (r/2d)^d, cleared of denominators."""
    _check_half(r, d)
    return r**r * (2 * d) ** d > math.comb(2 * d, d) * r**d * d**d * (r - d) ** (r - d)


# -- lower bounds for gamma / upper bounds for beta ---------------------------

def gamma3_constant() -> Interval:
    with _prec():
        return Interval.of(iv.mpf(16464) ** (iv.mpf(1) / 8))


def gamma3_lower(r: int) -> Bound:
    """gamma_r(3) > c 2^{3r/8} with c = 16464^{1/8}, for r >= 15."""
    if r < 15:
        raise ParameterError(f"the c 2^(3r/8) form needs r >= 15, got {r}; use gamma3_lower_raw")
    with _prec():
        val = iv.mpf(16464) ** (iv.mpf(1) / 8) * iv.mpf(2) ** (iv.mpf(3 * r) / 8)
        return Bound("gamma3", "lower", Interval.of(val), strict=True)


def _raw_holds(r: int, n: int) -> bool:
    # 7 (2^r - n) < 6^{-1/3} n^{2/3} C(n, 2), cubed
    lhs = 7 * ((1 << r) - n)
    return lhs <= 0 or 6 * lhs**3 < n * n * math.comb(n, 2) ** 3


def gamma3_lower_raw(r: int) -> Bound:
    """Smallest n with 7(2^r - n) < 6^{-1/3} n^{2/3} C(n,2); valid for r >= 3.

    Any 3-complete set satisfies the inequality and the left side falls
    while the right side grows in n, so its size is at least this n.
    """
    if r < 3:
        raise ParameterError(f"need r >= 3, got {r}")
    lo, hi = 1, 1 << r
    while lo < hi:
        mid = (lo + hi) // 2
        if _raw_holds(r, mid):
            hi = mid
        else:
            lo = mid + 1
    return Bound("gamma3_raw", "lower", lo)


def gamma3_lower_small_branch(r: int) -> Bound:
    """n^{8/3} > 14 6^{1/3} 2^r, the consequence for sets below 2^{r/2}.

    Only meaningful for sets smaller than 2^{r/2}; kept for reference and
    not used in the best bracket.
    """
    with _prec():
        val = (iv.mpf(14) * iv.mpf(6) ** (iv.mpf(1) / 3) * iv.mpf(2) ** r) ** (iv.mpf(3) / 8)
        return Bound("gamma3_small_branch", "lower", Interval.of(val), strict=True,
                     note="assumes |C| < 2^(r/2)")


def sum3_count_lower(r: int) -> Bound:
    """Smallest n with C(n,3) >= 2^r; gamma_r(2) is at least this."""
    lo, hi = 3, max(3, 2 << (r // 3 + 2))
    while lo < hi:
        mid = (lo + hi) // 2
        if math.comb(mid, 3) >= 1 << r:
            hi = mid
        else:
            lo = mid + 1
    return Bound("sum3_count", "lower", lo)


def beta_upper_sum(r: int, d: int) -> int:
    if not 0 <= d <= r:
        raise ParameterError(f"need 0 <= d <= r, got r={r}, d={d}")
    return binomial_sum(r, d)


def beta_upper_strong(r: int, d: int) -> int:
    """Integer consequence of (1 - 2^{d-r}) beta <= sum - 2^d.

    At d = r the inequality carries no information and 2^r is returned.
    """
    if not 0 <= d <= r:
        raise ParameterError(f"need 0 <= d <= r, got r={r}, d={d}")
    if d == r:
        return 1 << r
    return (binomial_sum(r, d) - (1 << d)) * (1 << r) // ((1 << r) - (1 << d))


def beta_upper_corollaries(r: int, d: int) -> list[Bound]:
    """sum - 2^{d-1} (d < r/2) and sum - 2^d (d < 0.227 r).

    Each is listed only when the strong integer bound already implies it,
    so no claim rests on an unchecked derivation.
    """
    s, strong = beta_upper_sum(r, d), beta_upper_strong(r, d)
    out = []
    if 1 <= d and 2 * d < r and strong <= s - (1 << (d - 1)):
        out.append(Bound("sum_minus_half_power", "upper", s - (1 << (d - 1))))
    if 1000 * d < 227 * r and strong <= s - (1 << d):
        out.append(Bound("sum_minus_power", "upper", s - (1 << d)))
    return out


# -- upper bounds for gamma ---------------------------------------------------

def simplex_constants(d: int) -> tuple[Fraction, Interval]:
    """(eps_d, K_d) with eps_d = 1/(2(2^d-1)), K_d = (2^d-1) 2^{2^{d-1} - 3/2 + eps_d}."""
    eps = Fraction(1, 2 * ((1 << d) - 1))
    with _prec():
        expo = iv.mpf(2 ** (d - 1)) - iv.mpf(3) / 2 + iv.mpf(eps.numerator) / eps.denominator
        k = iv.mpf((1 << d) - 1) * iv.mpf(2) ** expo
        return eps, Interval.of(k)


MAX_LOG2 = 1 << 14  # real bounds beyond 2^MAX_LOG2 are only reported as exponents


def _from_log2(expo) -> Interval:
    if expo.b > MAX_LOG2:
        raise ParameterError(f"bound exceeds 2^{MAX_LOG2}; use the log2 form")
    return Interval.of(iv.mpf(2) ** expo)


def _simplex_log2(r: int, d: int):
    if not 3 <= d <= r:
        raise ParameterError(f"need r >= d >= 3, got r={r}, d={d}")
    eps = Fraction(1, 2 * ((1 << d) - 1))
    e = iv.mpf(eps.numerator) / eps.denominator
    expo = iv.log(iv.mpf((1 << d) - 1)) / iv.log(iv.mpf(2)) + (2 ** (d - 1)) - iv.mpf(3) / 2 + e
    return expo + (iv.mpf(1) / 2 - e) * r


def gamma_upper_simplex_log2(r: int, d: int) -> Interval:
    """log2 of K_d 2^{(1/2 - eps_d) r}."""
    with _prec():
        return Interval.of(_simplex_log2(r, d))


def gamma_upper_simplex(r: int, d: int) -> Bound:
    """gamma_r(d) < K_d 2^{(1/2 - eps_d) r} for r >= d >= 3."""
    with _prec():
        return Bound("simplex", "upper", _from_log2(_simplex_log2(r, d)), strict=True)


def _pow2(expo: Fraction) -> Value:
    if expo.denominator == 1:
        return 1 << int(expo) if expo >= 0 else Fraction(1, 1 << int(-expo))
    with _prec():
        return _from_log2(iv.mpf(expo.numerator) / expo.denominator)


def gamma_upper_generic(r: int, n: int, mu: int, d: int) -> Bound:
    """gamma_r(d) < 2^{(1 - mu/n) r + n + d - mu} for a code with the stated parameters."""
    if n < 1 or not 0 < mu <= n:
        raise ParameterError(f"need 0 < mu <= n, got n={n}, mu={mu}")
    expo = (1 - Fraction(mu, n)) * r + n + d - mu
    if expo > MAX_LOG2:
        raise ParameterError(f"bound exceeds 2^{MAX_LOG2}")
    return Bound("generic_code", "upper", _pow2(expo), strict=True, note=f"n={n}, mu={mu}")


def _bch_log2(r: int, d: int, k):
    if not 3 <= d <= r:
        raise ParameterError(f"need r >= d >= 3, got r={r}, d={d}")
    kf = Fraction(k)
    base = iv.mpf(d * r) / (iv.log(iv.mpf(r)) / iv.log(iv.mpf(2)))
    return iv.mpf(r) / 2 + iv.mpf(kf.numerator) / kf.denominator * base ** (iv.mpf(2) / 3)


def gamma_upper_bch_log2(r: int, d: int, k=DEFAULT_BCH_K) -> Interval:
    with _prec():
        return Interval.of(_bch_log2(r, d, k))


def gamma_upper_bch(r: int, d: int, k: float | int | Fraction = DEFAULT_BCH_K) -> Bound:
    """gamma_r(d) < 2^{0.5 r + K (d r / log2 r)^{2/3}}.

    K is only known to exist; the default 28 comes from bounding the exponent
    by 0.5 r + 14 n with block count n < 2 (dr/log2(dr))^{2/3}.
    It is an artifact choice and the bound is marked as such.
    """
    with _prec():
        val = _from_log2(_bch_log2(r, d, k))
    return Bound("bch", "upper", val, strict=True, note=f"K={k} is an artifact choice")


def simplex_code_applicable(r: int, d: int) -> bool:
    """The simplex code of dimension d meets (n - M) floor(r/n) >= d and r >= n."""
    n = (1 << d) - 1
    return d >= 1 and r >= n and (n - (1 << (d - 1))) * (r // n) >= d


# -- lower bounds for beta ----------------------------------------------------

def beta_lower_balanced(r: int, d: int) -> int:
    """Double sum over i + j = d of C(2d-rho, i) C(rho, j) q^i (q+1)^j, q = r // 2d."""
    if not (2 <= d and 2 * d <= r):
        raise ParameterError(f"need 2 <= d <= r/2, got r={r}, d={d}")
    q, rho = divmod(r, 2 * d)
    return sum(
        math.comb(2 * d - rho, i) * math.comb(rho, d - i) * q**i * (q + 1) ** (d - i)
        for i in range(d + 1)
    )


def beta_lower_prime(r: int, d: int) -> int:
    """(q + 1)^{d - rho} (q + 2)^rho with q, rho = divmod(r, d)."""
    if not 2 <= d <= r:
        raise ParameterError(f"need r >= d >= 2, got r={r}, d={d}")
    q, rho = divmod(r, d)
    return (q + 1) ** (d - rho) * (q + 2) ** rho


@lru_cache(maxsize=None)
def _multiblock_table(d: int, r_max: int) -> tuple[list[list[int]], list[list[tuple]]]:
    """value[R][D]: max prod C(r_i, d_i) using at most R coordinates and D of d.

    step[R][D] records how the optimum was reached: ("R",) or ("D",) for an
    unused coordinate or unit of d, (a, b) for a part of shape (a, b).
    """
    moves = [(a, b, math.comb(a, b)) for b in range(1, d + 1) for a in range(b, min(r_max, d + b) + 1)]
    value = [[1] * (d + 1) for _ in range(r_max + 1)]
    step: list[list[tuple]] = [[()] * (d + 1) for _ in range(r_max + 1)]
    for big_r in range(r_max + 1):
        for big_d in range(1, d + 1):
            top, pick = value[big_r][big_d - 1], ("D",)
            if big_r and value[big_r - 1][big_d] > top:
                top, pick = value[big_r - 1][big_d], ("R",)
            for a, b, c in moves:
                if a <= big_r and b <= big_d:
                    cand = c * value[big_r - a][big_d - b]
                    if cand > top:
                        top, pick = cand, (a, b)
            value[big_r][big_d], step[big_r][big_d] = top, pick
    return value, step


def beta_lower_multiblock_best(r: int, d: int) -> tuple[int, list[tuple[int, int]]]:
    """Largest prod C(r_i, d_i) with sum r_i <= r, sum d_i <= d, d_i <= r_i <= d + d_i."""
    if not 1 <= d <= r:
        raise ParameterError(f"need r >= d >= 1, got r={r}, d={d}")
    if r > MULTIBLOCK_DP_MAX_R:
        raise ParameterError(f"multiblock optimisation is limited to r <= {MULTIBLOCK_DP_MAX_R}")
    value, step = _multiblock_table(d, max(32, 1 << (r - 1).bit_length()))
    parts, rr, dd = [], r, d
    while dd > 0:
        move = step[rr][dd]
        if move == ("R",):
            rr -= 1
        elif move == ("D",):
            dd -= 1
        else:
            parts.append(move)
            rr, dd = rr - move[0], dd - move[1]
    return value[r][d], sorted(parts)


def beta_lower_rk(r: int, d: int) -> Bound:
    """beta_r(d) > e^{r H(d/r) - 2 (r/d) ln r} for sqrt(r) < d <= r/2."""
    if not (d * d > r and 2 * d <= r):
        raise ParameterError(f"need sqrt(r) < d <= r/2, got r={r}, d={d}")
    e = exp_entropy(r, d)
    with _prec():
        val = iv.mpf(e.numerator) / e.denominator * iv.exp(-2 * iv.mpf(r) / d * iv.log(iv.mpf(r)))
        return Bound("rk", "lower", Interval.of(val), strict=True)


def beta_lower_formulas(r: int, d: int) -> list[Bound]:
    """Every applicable lower bound for beta_r(d); inapplicable ones are skipped."""
    out = [Bound("trivial", "lower", 0)]
    if d == 1:
        out.append(Bound("d_equals_1", "lower", 2))
    if r >= 2 and d == r - 1:
        out.append(Bound("codim_1", "lower", (1 << r) - 2))
    if d == r:
        out.append(Bound("full_space", "lower", 1 << r))
    if 2 <= d and 2 * d <= r:
        out.append(Bound("balanced", "lower", beta_lower_balanced(r, d)))
        out.append(Bound("balanced_main_term", "lower", math.comb(2 * d, d) * (r // (2 * d)) ** d))
    if 2 <= d <= r:
        out.append(Bound("prime", "lower", beta_lower_prime(r, d)))
        out.append(Bound("prime_power", "lower", Fraction(r**d, d**d), strict=True))
        if 2 * d >= r:
            out.append(Bound("prime_large_d", "lower", Fraction(3**r * 4**d, 2**r * 3**d)))
    if 2 * d > r and r >= 2:
        h = r // 2
        out.append(Bound("balanced_large_d", "lower", math.comb(2 * h, h)))
    if 1 <= d <= r and r <= MULTIBLOCK_DP_MAX_R:
        value, parts = beta_lower_multiblock_best(r, d)
        out.append(Bound("multiblock", "lower", value, note=f"parts={parts}"))
    if 2 * d >= r >= 1:
        out.append(Bound("multiblock_large_d", "lower", math.comb(r, r // 2)))
    if d * d > r and 2 * d <= r:
        out.append(beta_lower_rk(r, d))
    return out


def beta_upper_formulas(r: int, d: int) -> list[Bound]:
    out = [
        Bound("trivial", "upper", 1 << r),
        Bound("binomial_sum", "upper", beta_upper_sum(r, d)),
        Bound("strong", "upper", beta_upper_strong(r, d)),
    ]
    out += beta_upper_corollaries(r, d)
    if d == 1:
        out.append(Bound("d_equals_1", "upper", 2))
    if r >= 2 and d == r - 1:
        out.append(Bound("codim_1", "upper", (1 << r) - 2))
    if d == 0:
        out.append(Bound("d_equals_0", "upper", 0))
    return out


def gamma_lower_formulas(r: int, d: int) -> list[Bound]:
    out = [Bound("trivial", "lower", 0), Bound("binomial_sum", "lower", binomial_sum(r, d - 1) if d else 0)]
    if d >= 1:
        out.append(Bound("d_equals_1", "lower", 2))
    if d >= 2 and r >= 2:
        out.append(sum3_count_lower(r))
    if d >= 3:
        out.append(gamma3_lower_raw(r))
        if r >= 15:
            out.append(gamma3_lower(r))
    if d == r:
        out.append(Bound("full_space", "lower", 1 << r))
    if r >= 2 and d == r - 1:
        out.append(Bound("codim_1", "lower", (1 << r) - 2))
    return out


def gamma_upper_formulas(r: int, d: int, bch_k=DEFAULT_BCH_K) -> list[Bound]:
    out = [Bound("trivial", "upper", 1 << r)]
    if d == 0:
        out.append(Bound("d_equals_0", "upper", 0))
    if d == 1:
        out.append(Bound("d_equals_1", "upper", 2))
    if r >= 2 and d == r - 1:
        out.append(Bound("codim_1", "upper", (1 << r) - 2))
    if 3 <= d <= r:
        # bounds whose exponent already reaches r say less than the trivial one
        if gamma_upper_simplex_log2(r, d).lo < r:
            out.append(gamma_upper_simplex(r, d))
        if gamma_upper_bch_log2(r, d, bch_k).lo < r:
            out.append(gamma_upper_bch(r, d, bch_k))
        if simplex_code_applicable(r, d):
            n = (1 << d) - 1
            out.append(gamma_upper_generic(r, n, 1 << (d - 1), d))
    return out


def _dual(b: Bound, r: int) -> Bound:
    """beta_r(d) = 2^r - gamma_r(r - d) turns a bound on one into a bound on the other."""
    side = "upper" if b.side == "lower" else "lower"
    implied = b.implied()
    return Bound(f"dual:{b.name}", side, (1 << r) - implied, note=b.note)


# -- rows and tables ----------------------------------------------------------

@dataclass
class BoundsRow:
    r: int
    d: int
    gamma_lower: list[Bound] = field(default_factory=list)
    gamma_upper: list[Bound] = field(default_factory=list)
    beta_lower: list[Bound] = field(default_factory=list)
    beta_upper: list[Bound] = field(default_factory=list)

    @property
    def gamma_bracket(self) -> tuple[int, int]:
        return max(b.implied() for b in self.gamma_lower), min(b.implied() for b in self.gamma_upper)

    @property
    def beta_bracket(self) -> tuple[int, int]:
        return max(b.implied() for b in self.beta_lower), min(b.implied() for b in self.beta_upper)

    def admits(self, quantity: str, value: int) -> bool:
        lo, hi = self.gamma_bracket if quantity == "gamma" else self.beta_bracket
        return lo <= value <= hi

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "d": self.d,
            "gamma": {
                "lower": [b.to_json() for b in self.gamma_lower],
                "upper": [b.to_json() for b in self.gamma_upper],
                "bracket": list(self.gamma_bracket),
            },
            "beta": {
                "lower": [b.to_json() for b in self.beta_lower],
                "upper": [b.to_json() for b in self.beta_upper],
                "bracket": list(self.beta_bracket),
            },
        }


def bounds_row(r: int, d: int, *, bch_k=DEFAULT_BCH_K) -> BoundsRow:
    """All bounds at (r, d), including those transported through duality."""
    if not 0 <= d <= r or r < 1:
        raise ParameterError(f"need 0 <= d <= r, r >= 1, got r={r}, d={d}")
    e = r - d
    gl, gu = gamma_lower_formulas(r, d), gamma_upper_formulas(r, d, bch_k)
    bl, bu = beta_lower_formulas(r, d), beta_upper_formulas(r, d)
    row = BoundsRow(r, d)
    row.gamma_lower = gl + [_dual(b, r) for b in beta_upper_formulas(r, e)]
    row.gamma_upper = gu + [_dual(b, r) for b in beta_lower_formulas(r, e)]
    row.beta_lower = bl + [_dual(b, r) for b in gamma_upper_formulas(r, e, bch_k)]
    row.beta_upper = bu + [_dual(b, r) for b in gamma_lower_formulas(r, e)]
    return row


def exceptional_pairs(r_max: int = 60) -> dict[str, list[tuple[int, int]]]:
    """Pairs 2 <= d <= r/2 where the prime product beats or ties the balanced sum."""
    beats, ties = [], []
    for r in range(4, r_max + 1):
        for d in range(2, r // 2 + 1):
            p, b = beta_lower_prime(r, d), beta_lower_balanced(r, d)
            if p > b:
                beats.append((r, d))
            elif p == b:
                ties.append((r, d))
    return {"prime_wins": beats, "tie": ties}
