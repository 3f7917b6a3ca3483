"""Noiseless OR-channel group testing: pooling, cover decoding, two-stage recovery."""

from __future__ import annotations

from dataclasses import dataclass, field

from .matrix import CodeMatrix

__all__ = ["SimReport", "syndrome", "cover_decode", "nagt_simulate", "two_stage_simulate"]


@dataclass
class SimReport:
    positives: frozenset
    candidates: frozenset
    stage1_tests: int
    stage2_tests: int
    recovered: frozenset
    flags: list[str] = field(default_factory=list)

    @property
    def total_tests(self) -> int:
        return self.stage1_tests + self.stage2_tests

    @property
    def exact(self) -> bool:
        return self.recovered == self.positives

    def as_dict(self) -> dict:
        return {
            "positives": sorted(self.positives),
            "candidates": sorted(self.candidates),
            "stage1_tests": self.stage1_tests,
            "stage2_tests": self.stage2_tests,
            "total_tests": self.total_tests,
            "recovered": sorted(self.recovered),
            "exact": self.exact,
            "flags": list(self.flags),
        }


def _check_positives(matrix: CodeMatrix, positives) -> frozenset:
    P = frozenset(int(j) for j in positives)
    bad = [j for j in P if not 0 <= j < matrix.n]
    if bad:
        raise IndexError(f"positive indices {sorted(bad)} outside [0, {matrix.n})")
    return P


def syndrome(matrix: CodeMatrix, positives) -> int:
    """Test outcomes as a bitmask: row r is positive iff some positive item is in pool r."""
    f = 0
    for j in _check_positives(matrix, positives):
        f |= matrix.columns[j]
    return f


def cover_decode(matrix: CodeMatrix, f: int) -> frozenset:
    """Items whose every pool came back positive."""
    if f < 0 or f >> matrix.t:
        raise ValueError(f"syndrome has bits outside {matrix.t} rows")
    return frozenset(j for j, c in enumerate(matrix.columns) if c & ~f == 0)


def nagt_simulate(matrix: CodeMatrix, k: int, positives, verified: bool = True) -> SimReport:
    """One-round testing with a (k, n, d)-superimposed code.

    Cover decoding is guaranteed exact for at most ``k - 1`` positives; larger
    sets are decoded anyway and flagged ``out_of_contract``.
    """
    P = _check_positives(matrix, positives)
    candidates = cover_decode(matrix, syndrome(matrix, P))
    flags = []
    if len(P) > k - 1:
        flags.append("out_of_contract")
    if not verified:
        flags.append("unverified")
    return SimReport(P, candidates, matrix.t, 0, candidates, flags)


def two_stage_simulate(selector: CodeMatrix, k: int, positives, verified: bool = True) -> SimReport:
    """Two-stage testing with a (2k, n, d, k+1)-selector.

    Stage one pools by the selector rows and keeps the covered items; stage
    two tests each candidate on its own.
    """
    P = _check_positives(selector, positives)
    candidates = cover_decode(selector, syndrome(selector, P))
    recovered = frozenset(j for j in candidates if j in P)
    flags = []
    if len(P) > k:
        flags.append("out_of_contract")
    if not verified:
        flags.append("unverified")
    if len(candidates) > 2 * k:
        flags.append("candidates_exceed_2k")
    elif len(candidates) > 2 * k - 1:
        flags.append("candidates_exceed_2k_minus_1")
    return SimReport(P, candidates, selector.t, len(candidates), recovered, flags)
