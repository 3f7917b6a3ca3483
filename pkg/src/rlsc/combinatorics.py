"""Counting, ranking and sampling of runlength-constrained constant-weight vectors.

A vector of length ``t`` and weight ``w`` is *gap-d constrained* when any two
consecutive 1's are separated by at least ``d`` zeros.  Removing exactly ``d``
zeros after every 1 except the last maps such vectors bijectively onto the
unconstrained weight-``w`` vectors of length ``t - (w - 1) * d``; the ranking
below is colex order on the support of that unconstrained image.

Bit vectors are Python ints: bit ``r`` set means row ``r`` (0-indexed) holds a 1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb
from typing import Iterator

__all__ = [
    "BitColumn",
    "ConstrainedVectorSpace",
    "count_constrained",
    "unrank_combination",
    "rank_combination",
    "unrank_constrained",
    "rank_constrained",
    "sample_constrained",
    "enumerate_constrained",
    "mask_from_support",
    "support_of",
]


def support_of(mask: int) -> tuple[int, ...]:
    """Row indices of the set bits of ``mask`` in increasing order."""
    rows = []
    r = 0
    while mask:
        if mask & 1:
            rows.append(r)
        mask >>= 1
        r += 1
    return tuple(rows)


def mask_from_support(support) -> int:
    mask = 0
    for r in support:
        mask |= 1 << r
    return mask


@dataclass(frozen=True)
class BitColumn:
    """A length-``t`` binary column stored as an int bitmask."""

    t: int
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.t:
            raise ValueError(f"mask has bits outside a column of length {self.t}")

    @classmethod
    def from_support(cls, t: int, support) -> "BitColumn":
        return cls(t, mask_from_support(support))

    @property
    def support(self) -> tuple[int, ...]:
        return support_of(self.mask)

    @property
    def weight(self) -> int:
        return bin(self.mask).count("1")

    def min_gap(self) -> int | None:
        """Smallest number of zeros between consecutive 1's, None if weight < 2."""
        s = self.support
        if len(s) < 2:
            return None
        return min(b - a - 1 for a, b in zip(s, s[1:]))

    def to_list(self) -> list[int]:
        return [(self.mask >> r) & 1 for r in range(self.t)]


@dataclass(frozen=True)
class ConstrainedVectorSpace:
    """All length-``t``, weight-``w`` vectors with at least ``d`` zeros between 1's."""

    t: int
    w: int
    d: int

    def __post_init__(self):
        if self.t < 0 or self.w < 0 or self.d < 0:
            raise ValueError("t, w and d must be non-negative")

    @property
    def feasible(self) -> bool:
        return self.w == 0 or self.t >= (self.w - 1) * self.d + self.w

    @property
    def reduced_length(self) -> int:
        """Length of the unconstrained image of the gap-removing bijection."""
        return self.t - max(self.w - 1, 0) * self.d

    def __len__(self) -> int:
        return count_constrained(self.t, self.w, self.d)

    def contains(self, column: BitColumn) -> bool:
        if column.t != self.t or column.weight != self.w:
            return False
        gap = column.min_gap()
        return gap is None or gap >= self.d


def count_constrained(t: int, w: int, d: int) -> int:
    """Exact number of length-``t`` weight-``w`` vectors with gaps of at least ``d`` zeros."""
    if w == 0:
        return 1
    if w < 0 or t < (w - 1) * d + w:
        return 0
    return comb(t - (w - 1) * d, w)


def unrank_combination(index: int, size: int) -> tuple[int, ...]:
    """The ``index``-th ``size``-subset of the naturals in colex order."""
    if index < 0:
        raise ValueError("index must be non-negative")
    out = [0] * size
    for i in range(size, 0, -1):
        # largest c with comb(c, i) <= index
        lo, hi = i - 1, i - 1
        while comb(hi, i) <= index:
            lo, hi = hi, 2 * hi + 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if comb(mid, i) <= index:
                lo = mid
            else:
                hi = mid
        out[i - 1] = lo
        index -= comb(lo, i)
    return tuple(out)


def rank_combination(subset) -> int:
    """Colex rank of a set of distinct non-negative integers."""
    return sum(comb(c, i + 1) for i, c in enumerate(sorted(subset)))


def _check_space(space: ConstrainedVectorSpace) -> int:
    count = count_constrained(space.t, space.w, space.d)
    if count == 0:
        raise ValueError(
            f"infeasible space: t={space.t} < (w-1)*d + w = "
            f"{(space.w - 1) * space.d + space.w}"
        )
    return count


def unrank_constrained(index: int, space: ConstrainedVectorSpace) -> BitColumn:
    count = _check_space(space)
    if not 0 <= index < count:
        raise IndexError(f"index {index} out of range [0, {count})")
    base = unrank_combination(index, space.w)
    return BitColumn.from_support(space.t, (c + i * space.d for i, c in enumerate(base)))


def rank_constrained(v: BitColumn, space: ConstrainedVectorSpace) -> int:
    if v.t != space.t:
        raise ValueError(f"column length {v.t} does not match space length {space.t}")
    if v.weight != space.w:
        raise ValueError(f"column weight {v.weight} != {space.w}")
    gap = v.min_gap()
    if gap is not None and gap < space.d:
        raise ValueError(f"column has a run of {gap} zeros between 1's, need >= {space.d}")
    return rank_combination(s - i * space.d for i, s in enumerate(v.support))


def sample_constrained(space: ConstrainedVectorSpace, rng: random.Random) -> BitColumn:
    """Uniform draw from the space: a uniform rank fed through the unranker."""
    count = _check_space(space)
    return unrank_constrained(rng.randrange(count), space)


def enumerate_constrained(
    space: ConstrainedVectorSpace, budget: int | None = 1_000_000
) -> Iterator[BitColumn]:
    """Every member of ``space`` in rank order.

    Raises ``MemoryError`` up front when the space holds more than ``budget``
    vectors (``None`` disables the check).
    """
    count = count_constrained(space.t, space.w, space.d)
    if budget is not None and count > budget:
        raise MemoryError(f"space holds {count} vectors, budget is {budget}")
    return (unrank_constrained(i, space) for i in range(count))
