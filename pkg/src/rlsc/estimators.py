"""scikit-learn style wrappers.

Each row of ``X`` marks the positive items of one sample: ``X[s, j] == 1`` when
item ``j`` is positive in sample ``s``.  ``fit`` only needs the number of
items, taken from ``X.shape[1]``; it builds the pooling design.
``transform`` returns test outcomes and ``predict`` the recovered positives.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from . import bounds
from .construction import identity_code, moser_tardos_construct, qary_construct, suggest_length
from .group_testing import cover_decode, two_stage_simulate
from .matrix import CodeParams
from .verification import is_selector_exact, is_superimposed_exact

__all__ = ["SuperimposedCodeTester", "TwoStageTester", "check_binary"]


def check_binary(X, name: str = "X") -> np.ndarray:
    X = check_array(X, dtype=None, ensure_min_samples=1)
    if not np.isin(X, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return X.astype(np.uint8)


def _seed(random_state) -> int:
    if isinstance(random_state, (int, np.integer)):
        return int(random_state)
    return int(check_random_state(random_state).randint(0, 2**31 - 1))


def _rows_to_masks(X: np.ndarray) -> list[int]:
    weights = 1 << np.arange(X.shape[1], dtype=object)
    return [int(np.dot(row.astype(object), weights)) for row in X]


def _masks_to_rows(masks, width: int) -> np.ndarray:
    out = np.zeros((len(masks), width), dtype=np.uint8)
    for s, m in enumerate(masks):
        for r in range(width):
            if (m >> r) & 1:
                out[s, r] = 1
    return out


class _PoolingMixin:
    def transform(self, X):
        """Pooled test outcomes, shape ``(n_samples, t)``."""
        check_is_fitted(self, "code_")
        X = check_binary(validate_data(self, X, reset=False, dtype=None))
        cols = self.code_.columns
        masks = []
        for row in X:
            f = 0
            for j in np.flatnonzero(row):
                f |= cols[j]
            masks.append(f)
        return _masks_to_rows(masks, self.code_.t)

    def decode(self, F):
        """Items covered by each outcome vector, shape ``(n_samples, n_items)``."""
        check_is_fitted(self, "code_")
        F = check_binary(F, "F")
        if F.shape[1] != self.code_.t:
            raise ValueError(f"F has {F.shape[1]} columns, the design has {self.code_.t} tests")
        out = np.zeros((F.shape[0], self.code_.n), dtype=np.uint8)
        for s, f in enumerate(_rows_to_masks(F)):
            for j in cover_decode(self.code_, f):
                out[s, j] = 1
        return out


class SuperimposedCodeTester(_PoolingMixin, TransformerMixin, BaseEstimator):
    """Non-adaptive group testing with a runlength-constrained superimposed code.

    Recovery by cover decoding is exact for up to ``k - 1`` positives.

    Parameters
    ----------
    k : int
        Size of the column tuples the code separates.
    d : int
        Minimum number of zeros between consecutive 1's in a column.
    w, t : int or None
        Column weight and number of tests; chosen from the best local-lemma
        threshold when unset (``method="mt"``).
    method : {"mt", "qary", "identity"}
    max_resamples : int or None
    verify : bool
        Run exact verification after construction.
    random_state : int, RandomState or None
    """

    def __init__(self, k=2, d=0, w=None, t=None, method="mt", max_resamples=None,
                 verify=True, random_state=None):
        self.k = k
        self.d = d
        self.w = w
        self.t = t
        self.method = method
        self.max_resamples = max_resamples
        self.verify = verify
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_binary(validate_data(self, X, reset=True, dtype=None))
        n = X.shape[1]
        self.seed_ = _seed(self.random_state)
        if self.method == "identity":
            self.code_ = identity_code(n, k=min(self.k, n), d=self.d)
            self.construction_log_ = None
        elif self.method == "qary":
            self.code_, self.construction_log_ = qary_construct(self.k, n, self.d, self.seed_)
        elif self.method == "mt":
            t, w = self.t, self.w
            if t is None:
                if w is None:
                    t, w = suggest_length(self.k, n, self.d)
                else:
                    t = min(bounds.lll_min_length(self.k, n, self.d, w),
                            bounds.union_min_length(self.k, n, self.d, w))
            elif w is None:
                raise ValueError("set w together with t")
            params = CodeParams(k=self.k, n=n, d=self.d, w=w, t=t)
            self.code_, self.construction_log_ = moser_tardos_construct(
                params, self.seed_, self.max_resamples)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        if self.verify:
            self.verification_ = is_superimposed_exact(self.code_, self.k)
            if not self.verification_.passed:
                raise RuntimeError(f"constructed matrix failed verification: "
                                   f"{self.verification_.witness}")
        self.n_tests_ = self.code_.t
        return self

    def predict(self, X):
        """Recovered positives for each sample of ``X``."""
        return self.decode(self.transform(X))

    @property
    def matrix_(self) -> np.ndarray:
        check_is_fitted(self, "code_")
        return self.code_.to_array()


class TwoStageTester(_PoolingMixin, BaseEstimator):
    """Two-stage group testing: a (2k, n, d, k+1)-selector, then individual tests.

    Recovers up to ``k`` positives exactly with ``t + |candidates|`` tests.
    """

    def __init__(self, k=2, d=0, w=None, t=None, max_resamples=None, verify=True,
                 random_state=None):
        self.k = k
        self.d = d
        self.w = w
        self.t = t
        self.max_resamples = max_resamples
        self.verify = verify
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_binary(validate_data(self, X, reset=True, dtype=None))
        n = X.shape[1]
        K, P = 2 * self.k, self.k + 1
        if n < K:
            raise ValueError(f"two-stage testing for k={self.k} needs at least {K} items, got {n}")
        self.seed_ = _seed(self.random_state)
        t, w = self.t, self.w
        if t is None:
            if w is None:
                t, w = bounds.selector_best_w(K, n, self.d, P)
            else:
                t = bounds.selector_lll_min_length(K, n, self.d, P, w)
        elif w is None:
            raise ValueError("set w together with t")
        params = CodeParams(k=K, n=n, d=self.d, p=P, w=w, t=t)
        self.code_, self.construction_log_ = moser_tardos_construct(
            params, self.seed_, self.max_resamples)
        if self.verify:
            self.verification_ = is_selector_exact(self.code_, K, P)
            if not self.verification_.passed:
                raise RuntimeError(f"constructed selector failed verification: "
                                   f"{self.verification_.witness}")
        self.n_tests_ = self.code_.t
        return self

    def simulate(self, X):
        """One ``SimReport`` per sample."""
        check_is_fitted(self, "code_")
        X = check_binary(validate_data(self, X, reset=False, dtype=None))
        return [two_stage_simulate(self.code_, self.k, np.flatnonzero(row)) for row in X]

    def predict(self, X):
        reports = self.simulate(X)
        out = np.zeros((len(reports), self.code_.n), dtype=np.uint8)
        for s, rep in enumerate(reports):
            out[s, sorted(rep.recovered)] = 1
        return out

    def total_tests(self, X) -> np.ndarray:
        return np.array([rep.total_tests for rep in self.simulate(X)])

