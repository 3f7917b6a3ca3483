import random
from itertools import combinations

import numpy as np
import pytest

from oracles import is_selector_raw, is_superimposed_raw, runlength_ok, selector_by_events
from rlsc.construction import identity_code, sample_matrix
from rlsc.matrix import CodeMatrix, CodeParams, Event
from rlsc.verification import (
    WorkLimitExceeded,
    check_column_weight,
    check_runlength,
    find_violated_event,
    is_selector_exact,
    is_superimposed_exact,
    monte_carlo_check,
)


def random_matrix(rng, t, n, density=0.3):
    A = (rng.random((t, n)) < density).astype(np.uint8)
    return A


def exhaustive_first_event(M, k):
    """Every violated (i, B) pair, by brute force over all (k-1)-subsets."""
    cols = M.columns
    out = []
    for i in range(M.n):
        for B in combinations([j for j in range(M.n) if j != i], k - 1):
            union = 0
            for j in B:
                union |= cols[j]
            if cols[i] & ~union == 0:
                out.append((i, B))
    return out


# -- runlength and weight ---------------------------------------------------

def test_runlength_identity():
    assert check_runlength(identity_code(6), 5).passed


def test_runlength_failure_witness():
    # column with 1's in rows 2 and 4 (1-indexed): one zero between them
    M = CodeMatrix(6, (0b1010 << 0,))
    rep = check_runlength(M, 2)
    assert rep.result == "fail"
    assert rep.witness == {"column": 0, "rows": [1, 3], "zeros": 1, "d": 2}


def test_runlength_of_sampled_matrix():
    M = sample_matrix(CodeParams(k=2, n=12, d=3, w=3, t=20), seed=4)
    assert check_runlength(M, 3).passed
    assert runlength_ok(M.to_array(), 3)


def test_weight_checks():
    assert check_column_weight(identity_code(5), 1).passed
    rep = check_column_weight(CodeMatrix(3, (1, 0, 4)), 1)
    assert rep.result == "fail" and rep.witness["column"] == 1 and rep.witness["weight"] == 0
    M = sample_matrix(CodeParams(k=2, n=8, d=1, w=4, t=15), seed=0)
    assert check_column_weight(M, 4).passed


# -- superimposed -----------------------------------------------------------

def test_identity_superimposed():
    for k in range(1, 7):
        assert is_superimposed_exact(identity_code(6), k).passed
        assert find_violated_event(identity_code(6), k) is None


def test_duplicate_column_fails():
    M = CodeMatrix(4, (0b0011, 0b0011, 0b0100, 0b1000))
    rep = is_superimposed_exact(M, 2)
    assert rep.result == "fail"
    assert find_violated_event(M, 2) == Event.superimposed(0, (1,))
    assert Event.superimposed(0, (1,)).holds_in(M)


def test_repeated_weight_one_support_first_pair():
    # t = n - 1 weight-1 columns: some support repeats
    M = CodeMatrix(3, (0b001, 0b010, 0b100, 0b010))
    ev = find_violated_event(M, 2)
    assert (ev.i, ev.B) == exhaustive_first_event(M, 2)[0] == (1, (3,))


@pytest.mark.parametrize("seed", range(40))
def test_superimposed_matches_definition(seed):
    rng = np.random.default_rng(seed)
    t, n, k = int(rng.integers(3, 11)), int(rng.integers(3, 9)), int(rng.integers(1, 5))
    k = min(k, n)
    A = random_matrix(rng, t, n, density=float(rng.uniform(0.15, 0.6)))
    M = CodeMatrix.from_array(A)
    rep = is_superimposed_exact(M, k)
    assert rep.passed == is_superimposed_raw(A, k)
    bad = exhaustive_first_event(M, k)
    assert (rep.passed) == (not bad)
    if not rep.passed:
        ev = find_violated_event(M, k)
        assert ev.holds_in(M)
        assert ev.i == bad[0][0]  # first offending column agrees


@pytest.mark.parametrize("seed", range(15))
def test_monotone_in_k(seed):
    rng = np.random.default_rng(100 + seed)
    A = random_matrix(rng, 12, 7, 0.3)
    M = CodeMatrix.from_array(A)
    verdicts = [is_superimposed_exact(M, k).passed for k in range(1, 8)]
    for a, b in zip(verdicts, verdicts[1:]):
        assert a or not b  # pass at k implies pass at k-1


def test_witness_replays():
    rng = np.random.default_rng(7)
    for _ in range(30):
        M = CodeMatrix.from_array(random_matrix(rng, 8, 8, 0.35))
        for k in (2, 3):
            rep = is_superimposed_exact(M, k)
            if not rep.passed:
                w = rep.witness
                assert Event.superimposed(w["i"], w["B"]).holds_in(M)


# -- selectors --------------------------------------------------------------

def test_identity_selector():
    assert is_selector_exact(identity_code(6), 3, 3).passed


@pytest.mark.parametrize("seed", range(100))
def test_selector_p_equals_k_agrees_with_superimposed(seed):
    rng = np.random.default_rng(1000 + seed)
    t, n = int(rng.integers(3, 10)), int(rng.integers(3, 8))
    k = int(rng.integers(1, n + 1))
    M = CodeMatrix.from_array(random_matrix(rng, t, n, float(rng.uniform(0.2, 0.5))))
    assert is_selector_exact(M, k, k).passed == is_superimposed_exact(M, k).passed


def test_handcrafted_selector_instance():
    # columns 0 and 2 have private rows; column 1 shares its only row with column 2
    M = CodeMatrix(3, (0b001, 0b010, 0b110))
    assert is_selector_exact(M, 3, 2).passed
    assert not is_selector_exact(M, 3, 3).passed
    A = M.to_array()
    assert is_selector_raw(A, 3, 2) and selector_by_events(A, 3, 2)
    assert not is_selector_raw(A, 3, 3) and not selector_by_events(A, 3, 3)


@pytest.mark.parametrize("seed", range(60))
def test_selector_matches_both_formulations(seed):
    rng = np.random.default_rng(5000 + seed)
    t, n = int(rng.integers(3, 12)), int(rng.integers(3, 9))
    k = int(rng.integers(1, min(n, 4) + 1))
    p = int(rng.integers(1, k + 1))
    A = random_matrix(rng, t, n, float(rng.uniform(0.15, 0.5)))
    M = CodeMatrix.from_array(A)
    rep = is_selector_exact(M, k, p)
    assert rep.passed == is_selector_raw(A, k, p) == selector_by_events(A, k, p)
    ev = find_violated_event(M, k, p)
    assert (ev is None) == rep.passed
    if ev is not None:
        assert ev.holds_in(M)
        if p < k:
            w = rep.witness
            assert Event.selector(w["B1"], w["B2"]).holds_in(M)


# -- work guard -------------------------------------------------------------

def test_work_guard(monkeypatch):
    M = identity_code(30)
    monkeypatch.setenv("RLSC_WORK_LIMIT", "100")
    with pytest.raises(WorkLimitExceeded) as exc:
        is_superimposed_exact(M, 3)
    assert exc.value.estimate == 30 * 406 * 30
    assert is_superimposed_exact(M, 3, override=True).passed
    with pytest.raises(WorkLimitExceeded):
        is_selector_exact(M, 3, 2)


# -- monte carlo ------------------------------------------------------------

def test_monte_carlo_identity():
    rep = monte_carlo_check(identity_code(8), 3, trials=100_000, seed=1)
    assert rep.result == "estimated" and rep.violation_rate == 0
    assert rep.confidence_interval[0] == 0
    rep = monte_carlo_check(identity_code(8), 4, 2, trials=20_000, seed=1)
    assert rep.violation_rate == 0


def test_monte_carlo_duplicate_column_rate():
    n = 10
    cols = [1 << j for j in range(n)]
    cols[1] = cols[0]
    M = CodeMatrix(n, tuple(cols))
    trials = 50_000
    rep = monte_carlo_check(M, 2, trials=trials, seed=9)
    # bad events: (0,{1}) and (1,{0}) out of n(n-1)
    p_bad = 2 / (n * (n - 1))
    lo, hi = rep.confidence_interval
    assert lo <= p_bad <= hi
    assert rep.witness is not None and Event.superimposed(rep.witness["i"], rep.witness["B"]).holds_in(M)


def test_monte_carlo_flags_failing_matrices():
    rng = random.Random(11)
    flagged = total = 0
    for s in range(40):
        A = (np.random.default_rng(s).random((8, 9)) < 0.35).astype(np.uint8)
        M = CodeMatrix.from_array(A)
        if is_superimposed_exact(M, 3).passed:
            continue
        total += 1
        rep = monte_carlo_check(M, 3, trials=100_000, seed=rng.randrange(10**6))
        flagged += rep.violation_rate > 0
    assert total > 0
    assert flagged / total >= 0.99
