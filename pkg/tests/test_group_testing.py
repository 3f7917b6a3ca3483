from itertools import combinations

import pytest

from rlsc import bounds
from rlsc.construction import identity_code, moser_tardos_construct
from rlsc.group_testing import cover_decode, nagt_simulate, syndrome, two_stage_simulate
from rlsc.matrix import CodeMatrix, CodeParams


@pytest.fixture(scope="module")
def code_3_12():
    t, w = bounds.lll_min_length_best_w(3, 12, 1)
    M, _ = moser_tardos_construct(CodeParams(k=3, n=12, d=1, w=w, t=t), seed=4)
    return M


@pytest.fixture(scope="module")
def selector_4_10():
    t, w = bounds.selector_best_w(4, 10, 2, 3)
    M, _ = moser_tardos_construct(CodeParams(k=4, n=10, d=2, p=3, w=w, t=t), seed=8)
    return M


def test_syndrome_basics():
    M = CodeMatrix(4, (0b0011, 0b0110, 0b1000))
    assert syndrome(M, []) == 0
    assert syndrome(M, [0, 2]) == 0b1011
    with pytest.raises(IndexError):
        syndrome(M, [3])


def test_cover_decode_basics():
    M = CodeMatrix(4, (0b0011, 0b0110, 0b1000))
    assert cover_decode(M, 0) == frozenset()
    assert cover_decode(M, 0b0111) == {0, 1}
    with pytest.raises(ValueError):
        cover_decode(M, 1 << 4)


def test_decode_contains_positives_and_is_monotone(code_3_12):
    M = code_3_12
    for P in combinations(range(12), 3):
        f = syndrome(M, P)
        dec = cover_decode(M, f)
        assert set(P) <= dec
        for Q in combinations(P, 2):
            assert cover_decode(M, syndrome(M, Q)) <= dec


def test_nagt_exact_up_to_k_minus_1(code_3_12):
    M = code_3_12
    for size in range(3):
        for P in combinations(range(12), size):
            rep = nagt_simulate(M, 3, P)
            assert rep.exact and rep.flags == []
            assert rep.total_tests == M.t


def test_nagt_beyond_contract_is_flagged():
    # column 2 is covered by columns 0 and 1 together
    M = CodeMatrix(3, (0b001, 0b010, 0b011))
    rep = nagt_simulate(M, 2, [0, 1])
    assert not rep.exact and rep.recovered == {0, 1, 2}
    assert rep.flags == ["out_of_contract"]
    assert nagt_simulate(identity_code(4), 3, [1], verified=False).flags == ["unverified"]


def test_two_stage_exact(selector_4_10):
    M = selector_4_10
    for size in range(3):
        for P in combinations(range(10), size):
            rep = two_stage_simulate(M, 2, P)
            assert rep.exact
            assert len(rep.candidates) <= 3
            assert rep.total_tests <= M.t + 3
            assert rep.stage2_tests == len(rep.candidates)
            assert rep.flags == []


def test_two_stage_flags():
    M = CodeMatrix(1, (1, 1, 1, 1, 1))
    rep = two_stage_simulate(M, 2, [0])
    assert rep.exact
    assert "candidates_exceed_2k" in rep.flags
    rep = two_stage_simulate(CodeMatrix(2, (1, 1, 1, 1, 2)), 2, [0, 1, 2])
    assert rep.flags == ["out_of_contract", "candidates_exceed_2k_minus_1"]


def test_report_dict(selector_4_10):
    d = two_stage_simulate(selector_4_10, 2, [3, 1]).as_dict()
    assert d["positives"] == [1, 3] and d["exact"]
    assert d["total_tests"] == d["stage1_tests"] + d["stage2_tests"]
