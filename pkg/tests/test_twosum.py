import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cutlab.twosum import (
    InfeasibleInstance, PairedStrings, SplitGxyOracle, amplify, build_gxy, check_connectivity, check_mincut_lemma,
    communication_account, disj, exact_mincut_algo, exhaustive_n9, int_count, partition_cut, random_pair,
    reduce_two_sum, sample_two_sum,
)
from cutlab.localquery import oracle_from_graph
from cutlab.mincut import global_min_cut

FIG_X, FIG_Y = "000000100", "100010100"


def test_int_and_disj():
    assert (int_count(FIG_X, FIG_Y), disj(FIG_X, FIG_Y)) == (1, 0)
    assert (int_count("1010", "0101"), disj("1010", "0101")) == (0, 1)
    assert int_count("1111", "1111") == 4
    with pytest.raises(ValueError):
        int_count("10", "101")


def test_sampled_instances():
    inst = sample_two_sum(16, 16, 1, 16, 0)
    assert inst.disj_sum() == 0
    inst = sample_two_sum(16, 16, 1, 2, 1)
    assert inst.disj_sum() == 14
    assert set(inst.ints()) <= {0, 1} and inst.promise_ok()
    with pytest.raises(InfeasibleInstance):
        sample_two_sum(16, 16, 1, 0, 0)
    with pytest.raises(InfeasibleInstance):
        sample_two_sum(16, 4, 5, 2, 0)


def test_amplify():
    base = sample_two_sum(8, 10, 1, 3, 2)
    amp = amplify(base, 3)
    assert amp.L == 30 and amp.alpha == 3
    assert sorted(set(amp.ints())) == [0, 3]
    assert np.array_equal(amp.ints() == 0, base.ints() == 0)
    with pytest.raises(InfeasibleInstance):
        amplify(amp, 2)


def test_figure_graph():
    g = build_gxy(PairedStrings(FIG_X, FIG_Y))
    assert g.graph.n == 12
    assert global_min_cut(g.graph).value == 2
    assert set(g.graph.degrees()) == {3}
    assert partition_cut(g) == 2


def test_figure_neighbor_order():
    g = build_gxy(PairedStrings(FIG_X, FIG_Y))
    ell = 3
    # a_2 (row 2) meets b'_0 at the intersecting bit, a'_j elsewhere
    assert g.order[2] == (3 * ell + 0, ell + 1, ell + 2)
    assert g.order[0] == (ell, ell + 1, ell + 2)


def test_all_zero_disconnected():
    g = build_gxy(PairedStrings("0" * 9, "0" * 9))
    assert global_min_cut(g.graph).value == 0
    with pytest.raises(InfeasibleInstance):
        PairedStrings("0" * 8, "0" * 8)


def test_lemma_examples():
    res = check_mincut_lemma(PairedStrings(FIG_X, FIG_Y))
    assert res == {"holds": True, "mincut": 2.0, "int": 1, "condition_met": True}
    rng = np.random.default_rng(4)
    assert check_mincut_lemma(random_pair(25, 1, rng))["holds"]
    assert check_mincut_lemma(random_pair(36, 0, rng))["mincut"] == 0


def test_connectivity_examples():
    assert check_connectivity(PairedStrings(FIG_X, FIG_Y))
    assert check_connectivity(random_pair(25, 1, np.random.default_rng(8)))
    with pytest.raises(InfeasibleInstance):
        check_connectivity(random_pair(9, 2, np.random.default_rng(0)))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([16, 36, 64, 100]), st.integers(0, 2**31))
def test_lemma_random(N, seed):
    rng = np.random.default_rng(seed)
    ell = int(np.sqrt(N))
    gamma = int(rng.integers(0, ell // 3 + 1))
    res = check_mincut_lemma(random_pair(N, gamma, rng))
    assert res["condition_met"] and res["holds"]


@pytest.mark.slow
def test_exhaustive_nine_bits():
    res = exhaustive_n9()
    assert res["checked"] == 78732 and res["violations"] == 0


@pytest.mark.parametrize("alpha,r", [(1, 1), (1, 5), (2, 2)])
def test_reduction_exact(alpha, r):
    inst = sample_two_sum(16, 16, alpha, r, alpha * 10 + r)
    res = reduce_two_sum(inst, exact_mincut_algo, 0.25, 16 * alpha, strict=False)
    assert res["estimate"] == res["truth"] == 16 - r


def test_reduction_strict_feasible():
    inst = sample_two_sum(16, 144, 1, 3, 5)
    res = reduce_two_sum(inst, exact_mincut_algo, 0.25, 16)
    assert res["estimate"] == 13
    with pytest.raises(InfeasibleInstance):
        reduce_two_sum(sample_two_sum(16, 16, 1, 3, 5), exact_mincut_algo, 0.25, 16)


def test_reduction_with_inflated_mincut():
    eps = 0.25
    inst = sample_two_sum(16, 16, 1, 4, 3)
    res = reduce_two_sum(inst, lambda g: (1 + eps) * exact_mincut_algo(g), eps, 16, strict=False)
    assert res["estimate"] == pytest.approx(inst.disj_sum() - 4 * eps)


def test_reduction_all_intersecting():
    inst = sample_two_sum(16, 144, 1, 16, 9)
    assert reduce_two_sum(inst, exact_mincut_algo, 0.25, 16, strict=False)["estimate"] == 0


def test_reduction_guards():
    inst = sample_two_sum(16, 16, 1, 2, 0)
    with pytest.raises(InfeasibleInstance):
        reduce_two_sum(inst, exact_mincut_algo, 0.5, 16, strict=False)
    with pytest.raises(InfeasibleInstance):
        reduce_two_sum(inst, exact_mincut_algo, 0.25, 32, strict=False)


def test_communication_examples():
    g = build_gxy(PairedStrings(FIG_X, FIG_Y))
    o = SplitGxyOracle(g)
    assert communication_account(o) == 0 == o.bits_exchanged
    for v in range(5):
        o.neighbor(v, 1)
    for v in range(3):
        o.adjacent(v, 4)
    for v in range(7):
        o.degree(v)
    assert communication_account(o) == 16 == o.bits_exchanged
    o.neighbor_many(np.array([0, 1]), np.array([1, 2]))
    assert o.bits_exchanged == 20
    assert communication_account(oracle_from_graph(g.graph)) == 0
