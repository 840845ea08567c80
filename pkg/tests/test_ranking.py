import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from uavpp.ranking import (
    crowding_distance,
    extract_mps,
    fast_nds,
    layer_crowding,
    mpnds2,
    nds_sorter,
    optmpnds,
    party_ranks,
)

T1 = np.array(oracles.TABLE_I, dtype=float)
SPLIT = [T1[:, :2], T1[:, 2:]]


def test_table_one_layers():
    assert fast_nds(T1).tolist() == [1, 1, 1, 1, 2]
    r = mpnds2(SPLIT)
    assert r.party_ranks.tolist() == [[1, 1], [1, 1], [1, 2], [2, 1], [3, 3]]
    assert r.layer.tolist() == [1, 1, 2, 2, 3]
    assert extract_mps(SPLIT).tolist() == [0, 1]


def test_table_one_optmpnds_stand_in():
    r = optmpnds(SPLIT)
    assert r.party_ranks.sum(axis=1).tolist() == [2, 2, 3, 3, 6]
    assert r.layer.tolist() == [1, 1, 2, 2, 3]


def test_single_point_and_empty():
    assert fast_nds(np.array([[3.0, 1.0]])).tolist() == [1]
    assert fast_nds(np.zeros((0, 2))).tolist() == []


def test_fast_nds_matches_oracle_2d(rng):
    pts = rng.random((32, 2))
    assert fast_nds(pts).tolist() == oracles.brute_ranks(pts.tolist())


def test_constrained_domination(rng):
    pts = rng.integers(0, 4, size=(40, 3)).astype(float)
    viol = np.where(rng.random(40) < 0.4, rng.integers(1, 4, 40).astype(float), 0.0)
    assert fast_nds(pts, viol).tolist() == oracles.brute_ranks(pts.tolist(), viol.tolist())
    r = fast_nds(pts, viol)
    assert r[viol > 0].min() > r[viol == 0].max()


def test_crowding_examples():
    cd = crowding_distance(np.array([[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]]))
    assert np.isinf(cd[0]) and np.isinf(cd[2]) and cd[1] == pytest.approx(2.0)
    assert np.all(np.isinf(crowding_distance(np.array([[0.0, 1.0], [1.0, 0.0]]))))
    dup = crowding_distance(np.array([[0.0, 5.0], [0.5, 5.0], [1.0, 5.0], [0.7, 5.0]]))
    assert not np.any(np.isnan(dup))
    assert dup[1] == pytest.approx(0.7) and dup[3] == pytest.approx(0.5)


def test_layer_crowding_scales_by_candidate_set():
    pts = np.array([[0.0, 4.0], [1.0, 2.0], [2.0, 0.0], [10.0, 10.0], [9.0, 11.0], [11.0, 9.0]])
    layers = fast_nds(pts)
    cd = layer_crowding(pts, layers)
    # middle of layer 1: gaps of 2 and 4 over candidate ranges 11 and 11
    assert cd[1] == pytest.approx(2 / 11 + 4 / 11)


def test_mpnds2_single_party_equals_fast_nds(rng):
    pts = rng.random((40, 3))
    assert np.array_equal(mpnds2([pts]).layer, fast_nds(pts))
    assert np.array_equal(optmpnds([pts]).layer, fast_nds(pts))


def test_mpnds2_all_party_one_rank_one(rng):
    a = np.column_stack([np.linspace(0, 1, 30), np.linspace(1, 0, 30)])  # all mutually nondominated
    b = rng.random((30, 2))
    r = mpnds2([a, b])
    assert np.all(r.party_ranks[:, 0] == 1)
    assert np.array_equal(r.layer, fast_nds(b))


def test_optmpnds_all_nondominated_single_layer():
    a = np.column_stack([np.linspace(0, 1, 10), np.linspace(1, 0, 10)])
    assert np.all(optmpnds([a, a[::-1]]).layer == 1)


def test_extract_mps_cases():
    assert extract_mps([np.array([[1.0, 2.0]]), np.array([[3.0, 4.0]])]).tolist() == [0]
    # each point is rank 1 in exactly one party
    a = np.array([[0.0, 0.0], [1.0, 1.0]])
    b = np.array([[1.0, 1.0], [0.0, 0.0]])
    assert extract_mps([a, b]).tolist() == []
    assert extract_mps(SPLIT, np.array([0.5, 0, 0, 0, 0])).tolist() == [1]


def random_parties(rng, n):
    return [rng.integers(0, 5, size=(n, 2)).astype(float), rng.integers(0, 5, size=(n, 2)).astype(float)]


def test_mpnds2_layer_one_is_rank_one_one(rng):
    for _ in range(50):
        n = int(rng.integers(1, 40))
        parties = random_parties(rng, n)
        r = mpnds2(parties)
        brute = [i for i in range(n) if all(oracles.brute_ranks(p.tolist())[i] == 1 for p in parties)]
        mps = extract_mps(parties).tolist()
        assert mps == brute
        if brute:
            assert np.flatnonzero(r.layer == 1).tolist() == brute


def test_mpnds2_layers_respect_rank_vector_dominance(rng):
    for _ in range(30):
        r = mpnds2(random_parties(rng, 30))
        pr = r.party_ranks
        for i in range(30):
            for j in range(30):
                if oracles.dominates(pr[i], pr[j]):
                    assert r.layer[i] < r.layer[j]


def test_optmpnds_never_inverts_dominance(rng):
    for _ in range(30):
        r = optmpnds(random_parties(rng, 30))
        pr = r.party_ranks
        for i in range(30):
            for j in range(30):
                if oracles.dominates(pr[i], pr[j]):
                    assert r.layer[i] < r.layer[j]


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_mpnds2_invariant_to_monotone_transforms_and_permutation(seed):
    rng = np.random.default_rng(seed)
    a, b = random_parties(rng, 25)
    base = mpnds2([a, b])
    warped = mpnds2([np.exp(a) * 3 + 1, b[:, ::-1] ** 3])
    assert np.array_equal(base.layer, warped.layer)
    assert np.array_equal(base.party_ranks, warped.party_ranks)


def test_nds_sorter_uses_concatenated_objectives(rng):
    parties = random_parties(rng, 30)
    r = nds_sorter(parties)
    assert np.array_equal(r.layer, fast_nds(np.hstack(parties)))


def test_order_tie_break():
    r = mpnds2(SPLIT)
    assert r.order().tolist()[:3] == [0, 1, 2]


def test_party_ranks_share_constraint_handling(rng):
    parties = random_parties(rng, 20)
    viol = np.where(rng.random(20) < 0.3, 1.0, 0.0)
    pr = party_ranks(parties, viol)
    for k in range(2):
        assert pr[:, k].tolist() == oracles.brute_ranks(parties[k].tolist(), viol.tolist())


def test_mismatched_parties_rejected():
    with pytest.raises(ValueError):
        mpnds2([np.zeros((3, 2)), np.zeros((4, 2))])
