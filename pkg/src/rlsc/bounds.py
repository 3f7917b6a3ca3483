"""Achievability thresholds and lower bounds on the length of runlength codes.

Every ``*_min_length`` function returns the least integer ``t`` satisfying
its defining inequality.  The inequalities are decided exactly: event and
dependency counts are Python ints, the base of the power is cleared of its
halves (both sides doubled), and the one irrational constant ``e`` is
bracketed by rational partial sums of its series until the comparison is
decided.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb, log, log2

import mpmath

__all__ = [
    "BoundEntry",
    "BoundReport",
    "ChengResult",
    "event_count_superimposed",
    "dependency_count_superimposed",
    "event_count_selector",
    "dependency_count_selector",
    "min_feasible_length",
    "lll_condition",
    "union_condition",
    "agarwal_condition",
    "selector_condition",
    "lll_min_length",
    "union_min_length",
    "agarwal_min_length",
    "selector_lll_min_length",
    "best_w_range",
    "lll_min_length_best_w",
    "selector_best_w",
    "lower_bound",
    "cheng_rate",
    "cheng_bound",
    "qary_rows",
    "asymptotic_estimates",
    "binomial_ratio_bound_check",
    "binomial_ratio_bound_holds",
    "pair_ratio_bound_check",
    "bound_report",
]

LN2 = math.log(2)


# -- counts ---------------------------------------------------------------

def event_count_superimposed(k: int, n: int) -> int:
    """Number of events (i, B): a column and k-1 other columns."""
    return n * comb(n - 1, k - 1)


def dependency_count_superimposed(k: int, n: int) -> int:
    """Events sharing a column with a fixed (i, B): k [C(n,k) - C(n-k+1,k)]."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return k * (comb(n, k) - comb(n - k + 1, k))


def event_count_selector(k: int, n: int, p: int) -> int:
    return comb(k, p - 1) * comb(n, k)


def dependency_count_selector(k: int, n: int, p: int) -> int:
    if not 1 <= p <= k <= n:
        raise ValueError(f"need 1 <= p <= k <= n, got k={k}, n={n}, p={p}")
    return comb(k, p - 1) * (comb(n, k) - comb(n - k, k))


def min_feasible_length(w: int, d: int) -> int:
    """Shortest column that can carry ``w`` ones with ``d`` zeros between them."""
    return (w - 1) * d + w


# -- exact predicates -----------------------------------------------------

def _e_times_at_most(x: int, y: int) -> bool:
    """Decide ``e * x <= y`` for non-negative ints, exactly.

    Brackets ``e`` between the partial sum ``s = sum_{i<=m} 1/i!`` and
    ``s + 1/(m * m!)`` and refines ``m`` until the bracket decides.
    """
    if x == 0:
        return y >= 0
    num, fact, m = 2, 1, 1  # s = num / fact = 1 + 1/1!
    while True:
        m += 1
        num = num * m + 1
        fact *= m
        # s * x <= y  and  (s + 1/(m m!)) * x <= y
        if (num * m + 1) * x <= y * fact * m:
            return True
        if num * x > y * fact:
            return False


def _halved_base(t: int, k: int, d: int, w: int) -> tuple[int, int]:
    """Numerator and denominator of the per-event probability base, doubled."""
    num = 2 * w * (k - 1) - (w - 1)
    den = 2 * t - 2 * (w - 1) * d - (w - 1)
    return num, den


def lll_condition(t: int, k: int, n: int, d: int, w: int) -> bool:
    """e f ((w(k-1) - (w-1)/2) / (t - (w-1)d - (w-1)/2))^w <= 1."""
    if t < min_feasible_length(w, d):
        return False
    if k == 1:
        return True
    num, den = _halved_base(t, k, d, w)
    return _e_times_at_most(dependency_count_superimposed(k, n) * num**w, den**w)


def union_condition(t: int, k: int, n: int, d: int, w: int) -> bool:
    """n C(n-1,k-1) (same base)^w < 1."""
    if t < min_feasible_length(w, d):
        return False
    if k == 1:
        return True
    num, den = _halved_base(t, k, d, w)
    return event_count_superimposed(k, n) * num**w < den**w


def agarwal_condition(t: int, k: int, n: int, d: int, w: int) -> bool:
    """n C(n-1,k-1) (w(k-1) / (t - (2d+1)(w-1)))^w < 1, positive denominator."""
    if t < min_feasible_length(w, d):
        return False
    if k == 1:
        return True
    den = t - (2 * d + 1) * (w - 1)
    if den <= 0:
        return False
    return event_count_superimposed(k, n) * (w * (k - 1)) ** w < den**w


def selector_condition(t: int, k: int, n: int, d: int, p: int, w: int) -> bool:
    """e C(k,p-1)[C(n,k) - C(n-k,k)] (same base)^(w(k-p+1)) <= 1."""
    if t < min_feasible_length(w, d):
        return False
    if k == 1:
        return True
    num, den = _halved_base(t, k, d, w)
    m = w * (k - p + 1)
    return _e_times_at_most(dependency_count_selector(k, n, p) * num**m, den**m)


def _least_t(pred, lo: int, guess: int) -> int:
    """Least ``t >= lo`` with ``pred(t)``; ``pred`` must be monotone in ``t``."""
    guess = max(lo, guess)
    if pred(guess):
        hi, step = guess, 1
        while hi - step >= lo and pred(hi - step):
            hi -= step
            step *= 2
        bad = max(hi - step, lo - 1)
    else:
        bad, step = guess, 1
        while not pred(bad + step):
            bad += step
            step *= 2
        hi = bad + step
    # invariant: pred(hi) is True, pred(bad) is False (or bad < lo)
    while hi - bad > 1:
        mid = (hi + bad) // 2
        if pred(mid):
            hi = mid
        else:
            bad = mid
    return hi


def _closed_form_guess(k: int, d: int, w: int, log_count: float, power: int) -> int:
    """Ceiling of (w-1)d + (w-1)/2 + (w(k-1) - (w-1)/2) * count^(1/power)."""
    base = w * (k - 1) - (w - 1) / 2
    try:
        root = math.exp(log_count / power)
    except OverflowError:
        return min_feasible_length(w, d)
    return math.ceil((w - 1) * d + (w - 1) / 2 + base * root)


def _check_kw(k: int, n: int, d: int, w: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    if w < 1:
        raise ValueError(f"w must be >= 1, got {w}")


def lll_min_length(k: int, n: int, d: int, w: int) -> int:
    """Least ``t`` meeting the symmetric local-lemma condition for weight ``w``."""
    _check_kw(k, n, d, w)
    lo = min_feasible_length(w, d)
    if k == 1:
        return lo
    f = dependency_count_superimposed(k, n)
    guess = _closed_form_guess(k, d, w, 1 + log(f), w)
    return _least_t(lambda t: lll_condition(t, k, n, d, w), lo, guess)


def union_min_length(k: int, n: int, d: int, w: int) -> int:
    """Least ``t`` for which the union bound over all (i, B) events is below 1."""
    _check_kw(k, n, d, w)
    lo = min_feasible_length(w, d)
    if k == 1:
        return lo
    guess = _closed_form_guess(k, d, w, log(event_count_superimposed(k, n)), w)
    return _least_t(lambda t: union_condition(t, k, n, d, w), lo, guess)


def agarwal_min_length(k: int, n: int, d: int, w: int) -> int:
    """Least ``t`` under the earlier union-bound analysis with gap (2d+1)(w-1)."""
    _check_kw(k, n, d, w)
    lo = min_feasible_length(w, d)
    if k == 1:
        return lo
    lo = max(lo, (2 * d + 1) * (w - 1) + 1)
    root = math.exp(log(event_count_superimposed(k, n)) / w)
    guess = math.ceil((2 * d + 1) * (w - 1) + w * (k - 1) * root)
    return _least_t(lambda t: agarwal_condition(t, k, n, d, w), lo, guess)


def selector_lll_min_length(k: int, n: int, d: int, p: int, w: int) -> int:
    """Least ``t`` meeting the local-lemma condition for (k, n, d, p, w)-selectors."""
    _check_kw(k, n, d, w)
    if not 1 <= p <= k:
        raise ValueError(f"need 1 <= p <= k, got p={p}, k={k}")
    lo = min_feasible_length(w, d)
    if k == 1:
        return lo
    f = dependency_count_selector(k, n, p)
    m = w * (k - p + 1)
    guess = _closed_form_guess(k, d, w, 1 + log(f), m)
    return _least_t(lambda t: selector_condition(t, k, n, d, p, w), lo, guess)


# -- optimisation over w --------------------------------------------------

def best_w_range(k: int, n: int) -> range:
    """Default weights swept: 1 .. max(4, ceil(4 k ln(n/k)))."""
    return range(1, max(4, math.ceil(4 * k * log(n / k))) + 1)


def lll_min_length_best_w(k: int, n: int, d: int, w_range=None) -> tuple[int, int]:
    """Shortest length over ``w``, taking for each weight the better of the
    local-lemma and union-bound thresholds.  Ties go to the smaller ``w``."""
    if k == 1:
        return 1, 1
    best = None
    for w in w_range or best_w_range(k, n):
        t = min(lll_min_length(k, n, d, w), union_min_length(k, n, d, w))
        if best is None or t < best[0]:
            best = (t, w)
    return best


def selector_best_w(k: int, n: int, d: int, p: int, w_range=None) -> tuple[int, int]:
    if k == 1:
        return 1, 1
    best = None
    for w in w_range or best_w_range(k, n):
        t = selector_lll_min_length(k, n, d, p, w)
        if best is None or t < best[0]:
            best = (t, w)
    return best


def lower_bound(k: int, n: int, d: int) -> int:
    """Every (k, n, d)-superimposed code has at least min{n, 1 + (k-1)(d+1)} rows."""
    return min(n, 1 + (k - 1) * (d + 1))


# -- q-ary construction bound ---------------------------------------------

@dataclass(frozen=True)
class ChengResult:
    t: int
    q: int
    rate: float


def cheng_rate(k: int, q: int, d: int) -> float:
    """-log2[1 - (1 - 1/q)^(k-1)] / (q + d)."""
    return -log2(1 - (1 - 1 / q) ** (k - 1)) / (q + d)


def cheng_bound(k: int, n: int, d: int, q_max: int | None = None) -> ChengResult:
    """Length bound of the random q-ary construction, maximising the rate over q.

    The sweep is exhaustive over ``q`` in ``[2, q_max]`` (default
    ``max(8, 8k)``); no unimodality is assumed.
    """
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    q_max = q_max or max(8, 8 * k)
    q_best = max(range(2, q_max + 1), key=lambda q: (cheng_rate(k, q, d), -q))
    rate = cheng_rate(k, q_best, d)
    t = math.ceil((k * log2(n / k) + log2(k) + k * log2(math.e)) / rate)
    return ChengResult(t=t, q=q_best, rate=rate)


def qary_rows(k: int, n: int, q: int) -> int:
    """Number of q-ary rows t_q making the expected number of violated events < 1."""
    per_row = -log2(1 - (1 - 1 / q) ** (k - 1))
    return math.ceil((k * log2(n / k) + log2(k) + k * log2(math.e)) / per_row)


# -- leading-term estimators ----------------------------------------------

def asymptotic_estimates(k: int, n: int, d: int, p: int | None = None) -> list["BoundEntry"]:
    """Printed terms of the asymptotic length bounds, remainders dropped.

    None of these are guaranteed achievable lengths.  Entries whose
    precondition ``k >= 2, n >= e k`` fails are returned with ``t=None`` and a
    reason in ``note``.
    """
    p = k if p is None else p
    names = ["lll_kln_est", "lll_refined_est", "baseline_est", "qary_explicit_est",
             "selector_est", "two_stage_est"]
    if k < 2 or n < math.e * k:
        return [
            BoundEntry(m, None, guaranteed=False, note="precondition k >= 2 and n >= e*k fails")
            for m in names
        ]
    L = log(n / k)
    lg = log2(n / k)
    lg_kek = log2(k) + k * log2(math.e)
    kek_root = math.exp((log(k) + k) / (k * L))
    e2 = math.e**2
    values = {
        "lll_kln_est": LN2 * d * k * lg + e2 * k * k * lg - (3 * e2 - LN2) / 2 * k * lg - d,
        "lll_refined_est": d * (k * L - 1) + k / 2 * L + math.e * kek_root * k * (k - 1.5) * L,
        "baseline_est": 2 * d * (k * L - 1) + k * L + math.e * kek_root * k * (k - 1) * L,
        "qary_explicit_est": d * k * lg + k * (k - 1) * lg / LN2 + ((k - 1) / LN2 + d) * lg_kek,
        "selector_est": LN2 * d * k / (k - p + 1) * lg
        + LN2 * math.exp(3 + 1 / math.e) * k * k / (k - p + 1) * lg,
        "two_stage_est": 2 * d * L,
    }
    return [
        BoundEntry(m, values[m], guaranteed=False, p=p if m == "selector_est" else None,
                   note="leading terms only; O(.) remainder dropped")
        for m in names
    ]


# -- binomial ratio inequalities ------------------------------------------

def _check_abc(a: int, b: int, c: int) -> None:
    if not (isinstance(a, int) and isinstance(b, int) and isinstance(c, int)):
        raise TypeError("a, b, c must be integers")
    if not 1 <= c <= a <= b:
        raise ValueError(f"need positive integers c <= a <= b, got a={a}, b={b}, c={c}")


def binomial_ratio_bound_check(a: int, b: int, c: int) -> tuple[Fraction, Fraction, bool]:
    """C(a,c)/C(b,c) against ((a - (c-1)/2) / (b - (c-1)/2))^c, exactly."""
    _check_abc(a, b, c)
    lhs = Fraction(comb(a, c), comb(b, c))
    rhs = Fraction(2 * a - c + 1, 2 * b - c + 1) ** c
    return lhs, rhs, lhs <= rhs


def binomial_ratio_bound_holds(a: int, b: int, c: int, exact_limit: int = 4000) -> bool:
    """Truth value of the binomial ratio inequality, usable for large ``c``.

    Up to ``exact_limit`` the comparison is exact.  Beyond it both sides are
    compared as logarithms at 60 significant digits; a margin below 1e-40
    falls back to the exact integer comparison.
    """
    _check_abc(a, b, c)
    if c <= exact_limit or a == b:
        return binomial_ratio_bound_check(a, b, c)[2]
    with mpmath.workdps(60):
        lg = mpmath.loggamma
        log_lhs = lg(a + 1) - lg(a - c + 1) - lg(b + 1) + lg(b - c + 1)
        log_rhs = c * (mpmath.log(2 * a - c + 1) - mpmath.log(2 * b - c + 1))
        margin = log_rhs - log_lhs
        if abs(margin) > mpmath.mpf("1e-40"):
            return margin > 0
    return binomial_ratio_bound_check(a, b, c)[2]


def pair_ratio_bound_check(a: int, b: int, c: int) -> tuple[Fraction, Fraction, bool]:
    """(a/b) ((a-c)/(b-c)) against ((a - c/2) / (b - c/2))^2, exactly.

    Requires ``c < b`` so that ``b - c`` is non-zero.
    """
    _check_abc(a, b, c)
    if c == b:
        raise ValueError("need c < b")
    lhs = Fraction(a, b) * Fraction(a - c, b - c)
    rhs = Fraction(2 * a - c, 2 * b - c) ** 2
    return lhs, rhs, lhs <= rhs


# -- reports --------------------------------------------------------------

@dataclass
class BoundEntry:
    method: str
    t: float | int | None
    w: int | None = None
    q: int | None = None
    p: int | None = None
    guaranteed: bool = True
    note: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class BoundReport:
    k: int
    n: int
    d: int
    p: int | None = None
    w: int | None = None
    entries: list[BoundEntry] = field(default_factory=list)

    def __getitem__(self, method: str) -> BoundEntry:
        for e in self.entries:
            if e.method == method:
                return e
        raise KeyError(method)

    def as_dict(self) -> dict:
        return {
            "k": self.k, "n": self.n, "d": self.d, "p": self.p, "w": self.w,
            "entries": [e.as_dict() for e in self.entries],
        }


METHODS = ("lll", "union", "agarwal", "cheng", "selector", "lower", "asymptotic")


def bound_report(k: int, n: int, d: int, p: int | None = None, w: int | None = None,
                 methods=("all",)) -> BoundReport:
    """Evaluate the requested bounds at one parameter point.

    With ``w`` unset the weight-dependent methods report their best weight.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    sel_p = k if p is None else p
    if not 1 <= sel_p <= k:
        raise ValueError(f"need 1 <= p <= k, got p={sel_p}")
    wanted = set(METHODS) if "all" in methods else set(methods)
    unknown = wanted - set(METHODS)
    if unknown:
        raise ValueError(f"unknown bound methods: {sorted(unknown)}")
    report = BoundReport(k, n, d, p, w)

    def per_w(name, fn):
        if w is not None:
            report.entries.append(BoundEntry(name, fn(w), w=w))
        else:
            t, wb = min((fn(x), x) for x in best_w_range(k, n))
            report.entries.append(BoundEntry(name, t, w=wb, note="minimised over w"))

    if "lll" in wanted:
        per_w("lll", lambda x: lll_min_length(k, n, d, x))
    if "union" in wanted:
        per_w("union", lambda x: union_min_length(k, n, d, x))
    if "agarwal" in wanted:
        per_w("agarwal", lambda x: agarwal_min_length(k, n, d, x))
    if "selector" in wanted:
        if w is not None:
            report.entries.append(
                BoundEntry("selector", selector_lll_min_length(k, n, d, sel_p, w), w=w, p=sel_p))
        else:
            t, wb = selector_best_w(k, n, d, sel_p)
            report.entries.append(
                BoundEntry("selector", t, w=wb, p=sel_p, note="minimised over w"))
    if "cheng" in wanted:
        if k >= 2:
            res = cheng_bound(k, n, d)
            report.entries.append(BoundEntry(
                "cheng", res.t, q=res.q, guaranteed=False,
                note=f"q-ary construction bound, rate {res.rate:.6g}, float arithmetic"))
        else:
            report.entries.append(BoundEntry("cheng", None, guaranteed=False, note="needs k >= 2"))
    if "lower" in wanted:
        report.entries.append(BoundEntry("lower", lower_bound(k, n, d), note="necessary length"))
    if "asymptotic" in wanted:
        report.entries.extend(asymptotic_estimates(k, n, d, sel_p))
    return report
