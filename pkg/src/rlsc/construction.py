"""Randomised constructions of runlength-constrained codes and selectors."""

from __future__ import annotations

import random
import time
import warnings
from dataclasses import dataclass, field

from . import bounds
from .combinatorics import ConstrainedVectorSpace, count_constrained, sample_constrained
from .matrix import CodeMatrix, CodeParams, Event
from .verification import find_violated_event

__all__ = [
    "ConstructionLog",
    "BudgetExhausted",
    "default_max_resamples",
    "sample_matrix",
    "moser_tardos_construct",
    "qary_symbol_block",
    "qary_expand",
    "qary_construct",
    "identity_code",
    "suggest_length",
]


@dataclass
class ConstructionLog:
    """Reproducibility record of a randomised construction.

    ``wall_time`` is excluded from equality so that two runs with the same
    seed compare equal.
    """

    seed: int
    method: str
    resample_count: int = 0
    events_resampled: list = field(default_factory=list)
    outcome: str = "running"
    wall_time: float = field(default=0.0, compare=False)

    def as_dict(self, timing: bool = False) -> dict:
        out = {
            "seed": self.seed,
            "method": self.method,
            "resample_count": self.resample_count,
            "events_resampled": [e.as_dict() if isinstance(e, Event) else e
                                 for e in self.events_resampled],
            "outcome": self.outcome,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out


class BudgetExhausted(RuntimeError):
    def __init__(self, message: str, log: ConstructionLog):
        super().__init__(message)
        self.log = log


def default_max_resamples(n: int, w: int) -> int:
    return 1000 * n * w


def _space(params: CodeParams) -> ConstrainedVectorSpace:
    if params.t is None or params.w is None:
        raise ValueError("construction needs both t and w")
    space = ConstrainedVectorSpace(params.t, params.w, params.d)
    if count_constrained(params.t, params.w, params.d) == 0:
        raise ValueError(
            f"no column of length {params.t} carries weight {params.w} with gap {params.d}"
        )
    return space


def sample_matrix(params: CodeParams, seed: int | random.Random) -> CodeMatrix:
    """``n`` independent uniform columns from the constrained space."""
    space = _space(params)
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return CodeMatrix(params.t, tuple(sample_constrained(space, rng).mask for _ in range(params.n)),
                      params)


def moser_tardos_construct(params: CodeParams, seed: int, max_resamples: int | None = None,
                           record_events: bool = True) -> tuple[CodeMatrix, ConstructionLog]:
    """Las Vegas construction: resample the columns of a violated event until none is left.

    The output is always a valid code (or selector when ``params.p < params.k``);
    only the number of rounds is random.  Raises ``BudgetExhausted`` after
    ``max_resamples`` resampling steps.
    """
    space = _space(params)
    k, n, d, p, w, t = params.k, params.n, params.d, params.p, params.w, params.t
    if max_resamples is None:
        max_resamples = default_max_resamples(n, w)
    if max_resamples < 1:
        raise ValueError("max_resamples must be >= 1")
    if k >= 2:
        if p == k:
            threshold = min(bounds.lll_min_length(k, n, d, w),
                            bounds.union_min_length(k, n, d, w))
        else:
            threshold = bounds.selector_lll_min_length(k, n, d, p, w)
        if t < threshold:
            warnings.warn(
                f"t={t} is below the existence threshold {threshold}; "
                "termination is not guaranteed",
                stacklevel=2,
            )
    rng = random.Random(seed)
    log = ConstructionLog(seed=seed, method="mt")
    start = time.perf_counter()
    cols = [sample_constrained(space, rng).mask for _ in range(n)]
    while True:
        event = find_violated_event(CodeMatrix(t, cols), k, p)
        if event is None:
            log.outcome = "success"
            break
        if log.resample_count >= max_resamples:
            log.outcome = "budget_exhausted"
            log.wall_time = time.perf_counter() - start
            raise BudgetExhausted(
                f"no valid matrix after {max_resamples} resamplings; "
                "retry with another seed or a larger t",
                log,
            )
        for j in event.variables:
            cols[j] = sample_constrained(space, rng).mask
        log.resample_count += 1
        if record_events:
            log.events_resampled.append(event)
    log.wall_time = time.perf_counter() - start
    return CodeMatrix(t, tuple(cols), params), log


def qary_symbol_block(symbol: int, q: int, d: int) -> int:
    """Bitmask of the (q+d)-row block for a q-ary symbol: a single 1 at row ``symbol``."""
    if not 0 <= symbol < q:
        raise ValueError(f"symbol {symbol} outside [0, {q})")
    return 1 << symbol


def qary_expand(symbols, q: int, d: int) -> int:
    """Concatenate the blocks of one q-ary column (first symbol at the top)."""
    mask = 0
    for pos, s in enumerate(symbols):
        mask |= qary_symbol_block(s, q, d) << (pos * (q + d))
    return mask


def qary_construct(k: int, n: int, d: int, seed: int, q: int | None = None,
                   t_q: int | None = None, max_retries: int = 100
                   ) -> tuple[CodeMatrix, ConstructionLog]:
    """Random q-ary matrix expanded to a binary runlength code, redrawn until valid.

    Each q-ary symbol becomes ``q + d`` rows whose last ``d`` are always 0, so
    consecutive 1's in a column are at least ``d`` zeros apart.  The whole
    matrix is redrawn when exact verification finds a violated event;
    ``resample_count`` in the log counts those redraws.
    """
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    if q is None:
        q = bounds.cheng_bound(k, n, d).q
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if t_q is None:
        t_q = bounds.qary_rows(k, n, q)
    t = t_q * (q + d)
    params = CodeParams(k=k, n=n, d=d, w=t_q, t=t)
    rng = random.Random(seed)
    log = ConstructionLog(seed=seed, method="qary")
    start = time.perf_counter()
    for attempt in range(max_retries + 1):
        cols = tuple(qary_expand([rng.randrange(q) for _ in range(t_q)], q, d) for _ in range(n))
        matrix = CodeMatrix(t, cols, params)
        event = find_violated_event(matrix, k, k)
        if event is None:
            log.outcome = "success"
            log.wall_time = time.perf_counter() - start
            return matrix, log
        log.events_resampled.append(event)
        if attempt < max_retries:
            log.resample_count += 1
    log.outcome = "budget_exhausted"
    log.wall_time = time.perf_counter() - start
    raise BudgetExhausted(f"no valid q-ary code after {max_retries} retries", log)


def identity_code(n: int, k: int | None = None, d: int = 0) -> CodeMatrix:
    """The n x n identity: a (k, n, d)-superimposed code for every k <= n and d.

    ``k`` and ``d`` only label the attached parameters.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    params = CodeParams(k=n if k is None else k, n=n, d=d, w=1, t=n)
    return CodeMatrix(n, tuple(1 << j for j in range(n)), params)


def suggest_length(k: int, n: int, d: int, p: int | None = None) -> tuple[int, int]:
    """Default ``(t, w)`` for Moser-Tardos: the best-weight local-lemma threshold."""
    p = k if p is None else p
    if p == k:
        return bounds.lll_min_length_best_w(k, n, d)
    return bounds.selector_best_w(k, n, d, p)

