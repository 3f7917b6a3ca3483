"""Parameter record, code matrix and coverage events shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .combinatorics import BitColumn, support_of

__all__ = ["CodeParams", "CodeMatrix", "Event"]


@dataclass(frozen=True)
class CodeParams:
    """The ``(k, n, d, p, w)`` tuple plus an optional target length ``t``.

    ``p`` defaults to ``k`` (superimposed code).  ``w`` and ``t`` may be left
    unset, in which case bound and construction routines choose them.
    """

    k: int
    n: int
    d: int = 0
    p: int | None = None
    w: int | None = None
    t: int | None = None

    def __post_init__(self):
        if self.p is None:
            object.__setattr__(self, "p", self.k)
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.n < self.k:
            raise ValueError(f"need n >= k, got n={self.n}, k={self.k}")
        if self.d < 0:
            raise ValueError(f"d must be >= 0, got {self.d}")
        if not 1 <= self.p <= self.k:
            raise ValueError(f"need 1 <= p <= k, got p={self.p}, k={self.k}")
        if self.w is not None and self.w < 1:
            raise ValueError(f"w must be >= 1, got {self.w}")
        if self.t is not None:
            if self.t < 1:
                raise ValueError(f"t must be >= 1, got {self.t}")
            if self.w is not None and self.t < (self.w - 1) * self.d + self.w:
                raise ValueError(
                    f"t={self.t} is shorter than (w-1)*d + w = "
                    f"{(self.w - 1) * self.d + self.w}"
                )

    @property
    def is_superimposed(self) -> bool:
        return self.p == self.k

    def as_dict(self) -> dict:
        return {"k": self.k, "n": self.n, "d": self.d, "p": self.p, "w": self.w, "t": self.t}


@dataclass(frozen=True)
class CodeMatrix:
    """A ``t x n`` binary matrix held column-major as int bitmasks."""

    t: int
    columns: tuple[int, ...]
    params: CodeParams | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(int(c) for c in self.columns))
        if self.t < 1 or not self.columns:
            raise ValueError("a code matrix needs t >= 1 and at least one column")
        limit = 1 << self.t
        for j, c in enumerate(self.columns):
            if c < 0 or c >= limit:
                raise ValueError(f"column {j} has bits outside {self.t} rows")

    @property
    def n(self) -> int:
        return len(self.columns)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.t, self.n)

    def column(self, j: int) -> BitColumn:
        return BitColumn(self.t, self.columns[j])

    def support(self, j: int) -> tuple[int, ...]:
        return support_of(self.columns[j])

    def weights(self) -> list[int]:
        return [bin(c).count("1") for c in self.columns]

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.t, self.n), dtype=np.uint8)
        for j, c in enumerate(self.columns):
            for r in support_of(c):
                out[r, j] = 1
        return out

    @classmethod
    def from_array(cls, array, params: CodeParams | None = None) -> "CodeMatrix":
        a = np.asarray(array)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("matrix entries must be 0 or 1")
        cols = []
        for j in range(a.shape[1]):
            mask = 0
            for r in np.flatnonzero(a[:, j]):
                mask |= 1 << int(r)
            cols.append(mask)
        return cls(a.shape[0], tuple(cols), params)

    @classmethod
    def identity(cls, n: int) -> "CodeMatrix":
        return cls(n, tuple(1 << j for j in range(n)))

    def with_columns(self, columns) -> "CodeMatrix":
        return CodeMatrix(self.t, tuple(columns), self.params)


@dataclass(frozen=True)
class Event:
    """A coverage event over column indices.

    ``kind == "superimposed"``: column ``i`` has its support inside the union
    of the columns in ``B`` (``|B| = k - 1``).  ``kind == "selector"``: every
    column of ``B1`` is covered by the other columns of ``B1 | B2``.
    """

    kind: str
    i: int | None = None
    B: tuple[int, ...] = ()
    B1: tuple[int, ...] = ()
    B2: tuple[int, ...] = ()

    @classmethod
    def superimposed(cls, i: int, B) -> "Event":
        B = tuple(sorted(B))
        if i in B:
            raise ValueError("column i may not belong to B")
        return cls("superimposed", i=i, B=B)

    @classmethod
    def selector(cls, B1, B2) -> "Event":
        B1, B2 = tuple(sorted(B1)), tuple(sorted(B2))
        if set(B1) & set(B2):
            raise ValueError("B1 and B2 must be disjoint")
        return cls("selector", B1=B1, B2=B2)

    @property
    def variables(self) -> tuple[int, ...]:
        """Columns the event depends on (resampled together by Moser-Tardos)."""
        if self.kind == "superimposed":
            return tuple(sorted((self.i,) + self.B))
        return tuple(sorted(self.B1 + self.B2))

    def holds_in(self, matrix: CodeMatrix) -> bool:
        """Re-check the event against ``matrix`` (True means violated)."""
        cols = matrix.columns
        if self.kind == "superimposed":
            union = 0
            for j in self.B:
                union |= cols[j]
            return cols[self.i] & ~union == 0
        members = self.B1 + self.B2
        for i in self.B1:
            union = 0
            for j in members:
                if j != i:
                    union |= cols[j]
            if cols[i] & ~union:
                return False
        return True

    def as_dict(self) -> dict:
        if self.kind == "superimposed":
            return {"kind": self.kind, "i": self.i, "B": list(self.B)}
        return {"kind": self.kind, "B1": list(self.B1), "B2": list(self.B2)}
