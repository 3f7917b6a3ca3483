"""Exact and statistical certification of code matrices.

The event scans here are shared with the Moser-Tardos constructor, so the
first violated event they return is the one that gets resampled.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from math import comb

from scipy.stats import binomtest

from .combinatorics import support_of, unrank_combination
from .matrix import CodeMatrix, Event

__all__ = [
    "WorkLimitExceeded",
    "VerificationReport",
    "DEFAULT_WORK_LIMIT",
    "work_limit",
    "superimposed_work",
    "selector_work",
    "check_runlength",
    "check_column_weight",
    "find_violated_event",
    "is_superimposed_exact",
    "is_selector_exact",
    "isolated_columns",
    "monte_carlo_check",
]

DEFAULT_WORK_LIMIT = 10**9


class WorkLimitExceeded(RuntimeError):
    def __init__(self, estimate: int, limit: int):
        super().__init__(
            f"exact verification needs about {estimate} row operations, limit is {limit}; "
            "pass override=True or raise RLSC_WORK_LIMIT"
        )
        self.estimate = estimate
        self.limit = limit


@dataclass
class VerificationReport:
    """Outcome of one check.

    ``result`` is ``"pass"``, ``"fail"`` or ``"estimated"``.  A failing report
    always carries a ``witness`` that can be re-checked on its own.
    """

    property: str
    result: str
    witness: dict | None = None
    violation_rate: float | None = None
    trials: int | None = None
    confidence_interval: tuple[float, float] | None = None
    work: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.result == "pass"

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        out = {"property": self.property, "result": self.result, "work": dict(self.work)}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.trials is not None:
            out["violation_rate"] = self.violation_rate
            out["trials"] = self.trials
            out["confidence_interval"] = list(self.confidence_interval)
        return out


def work_limit() -> int:
    env = os.environ.get("RLSC_WORK_LIMIT")
    return int(env) if env else DEFAULT_WORK_LIMIT


def superimposed_work(n: int, k: int, t: int) -> int:
    return n * comb(n - 1, k - 1) * t


def selector_work(n: int, k: int, t: int) -> int:
    return comb(n, k) * k * t


def _guard(estimate: int, override: bool) -> None:
    limit = work_limit()
    if estimate > limit and not override:
        raise WorkLimitExceeded(estimate, limit)


def check_runlength(matrix: CodeMatrix, d: int) -> VerificationReport:
    """Every pair of consecutive 1's in a column has at least ``d`` zeros between them."""
    for j, col in enumerate(matrix.columns):
        rows = support_of(col)
        for a, b in zip(rows, rows[1:]):
            if b - a - 1 < d:
                return VerificationReport(
                    "runlength", "fail",
                    witness={"column": j, "rows": [a, b], "zeros": b - a - 1, "d": d},
                )
    return VerificationReport("runlength", "pass", work={"columns": matrix.n})


def check_column_weight(matrix: CodeMatrix, w: int) -> VerificationReport:
    for j, weight in enumerate(matrix.weights()):
        if weight != w:
            return VerificationReport(
                "column_weight", "fail", witness={"column": j, "weight": weight, "w": w}
            )
    return VerificationReport("column_weight", "pass", work={"columns": matrix.n})


def _first_cover(cols, i: int, k: int) -> tuple[int, ...] | None:
    """First (k-1)-set B, i not in B, whose union covers column i, or None.

    Only columns meeting supp(c_i) can help cover it.  When fewer than k-1 of
    them exist and together they cover c_i, B is padded with the lowest
    remaining indices.
    """
    target = cols[i]
    n = len(cols)
    if k == 1:
        return () if target == 0 else None
    useful = [j for j in range(n) if j != i and cols[j] & target]
    if len(useful) < k - 1:
        union = 0
        for j in useful:
            union |= cols[j]
        if target & ~union:
            return None
        used = set(useful) | {i}
        pad = [j for j in range(n) if j not in used][: k - 1 - len(useful)]
        return tuple(sorted(useful + pad))
    m = len(useful)
    for idx in range(comb(m, k - 1)):
        B = [useful[r] for r in unrank_combination(idx, k - 1)]
        union = 0
        for j in B:
            union |= cols[j]
        if target & ~union == 0:
            return tuple(B)
    return None


def isolated_columns(cols, K) -> list[int]:
    """Members of ``K`` having a row where they are 1 and the rest of ``K`` is 0."""
    out = []
    for j in K:
        others = 0
        for h in K:
            if h != j:
                others |= cols[h]
        if cols[j] & ~others:
            out.append(j)
    return out


def _colex_subsets(n: int, size: int):
    for idx in range(comb(n, size)):
        yield unrank_combination(idx, size)


def find_violated_event(matrix: CodeMatrix, k: int, p: int | None = None) -> Event | None:
    """First violated coverage event in the fixed enumeration order, or None.

    For ``p == k``: columns ``i`` in increasing order, then candidate sets
    ``B`` in colex order over the columns that meet ``supp(c_i)``.  For
    ``p < k``: ``k``-subsets ``K`` in colex order, then ``B1`` as the first
    ``(k-p+1)``-subset (colex) of the columns of ``K`` lacking a private row.
    """
    p = k if p is None else p
    n = matrix.n
    if not 1 <= p <= k <= n:
        raise ValueError(f"need 1 <= p <= k <= n, got k={k}, p={p}, n={n}")
    cols = matrix.columns
    if p == k:
        for i in range(n):
            B = _first_cover(cols, i, k)
            if B is not None:
                return Event.superimposed(i, B)
        return None
    size = k - p + 1
    for K in _colex_subsets(n, k):
        event = _selector_event(cols, K, p, size)
        if event is not None:
            return event
    return None


def _selector_event(cols, K, p: int, size: int) -> Event | None:
    iso = isolated_columns(cols, K)
    if len(iso) >= p:
        return None
    covered = [j for j in K if j not in iso]
    B1 = tuple(covered[:size])
    return Event.selector(B1, tuple(j for j in K if j not in B1))


def is_superimposed_exact(matrix: CodeMatrix, k: int, override: bool = False) -> VerificationReport:
    """No column is covered by the union of any k-1 others."""
    n, t = matrix.n, matrix.t
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    estimate = superimposed_work(n, k, t)
    _guard(estimate, override)
    event = find_violated_event(matrix, k, k)
    work = {"estimate": estimate}
    if event is not None:
        return VerificationReport("superimposed", "fail", witness=event.as_dict(), work=work)
    return VerificationReport("superimposed", "pass", work=work)


def is_selector_exact(matrix: CodeMatrix, k: int, p: int,
                      override: bool = False) -> VerificationReport:
    """Every k-tuple of columns contains at least ``p`` rows of the k x k identity."""
    n, t = matrix.n, matrix.t
    if not 1 <= p <= k <= n:
        raise ValueError(f"need 1 <= p <= k <= n, got k={k}, p={p}, n={n}")
    estimate = selector_work(n, k, t)
    _guard(estimate, override)
    cols = matrix.columns
    work = {"estimate": estimate}
    for K in _colex_subsets(n, k):
        iso = isolated_columns(cols, K)
        if len(iso) < p:
            witness = _selector_event(cols, K, p, k - p + 1).as_dict()
            witness["isolated"] = iso
            return VerificationReport("selector", "fail", witness=witness, work=work)
    return VerificationReport("selector", "pass", work=work)


def monte_carlo_check(matrix: CodeMatrix, k: int, p: int | None = None, trials: int = 10_000,
                      seed: int = 0, confidence: float = 0.95) -> VerificationReport:
    """Sample uniform events and report the observed violation rate.

    Never reports a pass: at best no violation was seen in ``trials`` draws.
    """
    p = k if p is None else p
    n = matrix.n
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 1 <= p <= k <= n:
        raise ValueError(f"need 1 <= p <= k <= n, got k={k}, p={p}, n={n}")
    rng = random.Random(seed)
    cols = matrix.columns
    hits = 0
    first = None
    for _ in range(trials):
        if p == k:
            i = rng.randrange(n)
            others = [j for j in range(n) if j != i]
            B = tuple(others[r] for r in unrank_combination(rng.randrange(comb(n - 1, k - 1)), k - 1))
            event = Event.superimposed(i, B)
        else:
            K = unrank_combination(rng.randrange(comb(n, k)), k)
            pick = unrank_combination(rng.randrange(comb(k, k - p + 1)), k - p + 1)
            B1 = tuple(K[r] for r in pick)
            event = Event.selector(B1, tuple(j for j in K if j not in B1))
        if event.holds_in(matrix):
            hits += 1
            if first is None:
                first = event
    ci = binomtest(hits, trials).proportion_ci(confidence_level=confidence)
    return VerificationReport(
        "superimposed" if p == k else "selector",
        "estimated",
        witness=first.as_dict() if first is not None else None,
        violation_rate=hits / trials,
        trials=trials,
        confidence_interval=(float(ci.low), float(ci.high)),
        work={"seed": seed, "violations": hits},
    )
