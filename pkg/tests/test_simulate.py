import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spiderweb.limits import H_threshold, limiting_Q
from spiderweb.moments import chebyshev_lower_bound, expected_paths, markov_upper_bound, second_moment
from spiderweb.netgraph import (
    CapExceeded,
    NetworkParams,
    VertexId,
    enumerate_paths,
    index_label,
    path_links,
    vertices,
    window_iso,
)
from spiderweb.simulate import (
    BLOCK,
    Estimate,
    LinkState,
    block_rng,
    count_idle_paths,
    estimate_moments,
    estimate_Q,
    exact_Q,
    is_linked,
    linked_state_counts,
    linkset_connect_prob,
    linkset_ranks,
    sample_idle_paths,
    sample_state,
)
from spiderweb.stats import wilson_interval


def zero(params, rank):
    return VertexId(rank, (0,) * params.k)


# -- states ------------------------------------------------------------------


def test_sample_state_extremes():
    p = NetworkParams(2, 2, 4)
    rng = block_rng(0, 0)
    assert not sample_state(p, 0.0, rng).idle.any()
    assert sample_state(p, 1.0, rng).idle.all()
    with pytest.raises(ValueError):
        sample_state(p, 1.5, rng)


def test_idle_fraction_binomial():
    p = NetworkParams(2, 2, 3)
    rng = block_rng(11, 0)
    q = 0.37
    n = 100_000 // (2 * 4) + 1
    bits = np.concatenate([sample_state(p, q, rng).idle.ravel() for _ in range(n)])
    sigma = math.sqrt(q * (1 - q) / bits.size)
    assert abs(bits.mean() - q) <= 3 * sigma


def test_linkstate_bits_round_trip():
    p = NetworkParams(3, 2, 4)
    s = sample_state(p, 0.5, block_rng(3, 0))
    assert len(s.bits) == math.ceil(3 * 9 / 8)
    assert np.array_equal(LinkState.from_bits(p, s.bits).idle, s.idle)
    # canonical index (rank - 1) * b^k + label
    flat = np.unpackbits(np.frombuffer(s.bits, dtype=np.uint8))[: 3 * 9]
    v = VertexId.of(2, "21")
    assert bool(flat[(2 - 1) * 9 + 7]) == s.is_idle(v)


def test_linkstate_shape_check():
    with pytest.raises(ValueError):
        LinkState(NetworkParams(2, 2, 4), np.zeros((2, 4), dtype=bool))


# -- reachability and counts -------------------------------------------------


def all_idle(p):
    return LinkState(p, np.ones((p.l - 1, p.rank_size), dtype=bool))


def test_all_idle():
    for b, k, l in [(2, 2, 5), (3, 2, 4), (2, 3, 3), (2, 1, 6)]:
        p = NetworkParams(b, k, l)
        s = all_idle(p)
        for v in vertices(p, 0):
            for w in vertices(p, l):
                assert is_linked(p, s, v, w)
                assert count_idle_paths(p, s, v, w) == b ** (l - k)


def test_all_idle_large_count_is_exact():
    p = NetworkParams(2, 1, 70)
    assert count_idle_paths(p, all_idle(p), zero(p, 0), zero(p, 70)) == 2**69


def test_busy_rank_disconnects():
    p = NetworkParams(2, 2, 5)
    idle = np.ones((4, 4), dtype=bool)
    idle[2] = False
    s = LinkState(p, idle)
    for v in vertices(p, 0):
        for w in vertices(p, 5):
            assert not is_linked(p, s, v, w)
            assert count_idle_paths(p, s, v, w) == 0


def test_all_busy_count_zero():
    p = NetworkParams(2, 1, 2)
    s = LinkState(p, np.zeros((1, 2), dtype=bool))
    assert count_idle_paths(p, s, zero(p, 0), zero(p, 2)) == 0


def test_endpoint_ranks_checked():
    p = NetworkParams(2, 2, 4)
    with pytest.raises(ValueError):
        is_linked(p, all_idle(p), zero(p, 1), zero(p, 4))


def test_linked_agrees_with_positive_count():
    p = NetworkParams(2, 2, 5)
    rng = block_rng(5, 0)
    for _ in range(10_000):
        s = sample_state(p, 0.6, rng)
        v, w = zero(p, 0), VertexId.of(5, "10")
        assert is_linked(p, s, v, w) == (count_idle_paths(p, s, v, w) > 0)


def test_count_matches_filtered_enumeration():
    p = NetworkParams(2, 1, 4)
    paths = {
        (v, w): [path_links(x, p) for x in enumerate_paths(p, v, w)]
        for v in vertices(p, 0)
        for w in vertices(p, 4)
    }
    rng = block_rng(9, 0)
    for _ in range(10_000):
        s = sample_state(p, 0.5, rng)
        for (v, w), links in paths.items():
            expect = sum(all(s.is_idle(x) for x in ls) for ls in links)
            assert count_idle_paths(p, s, v, w) == expect


@settings(max_examples=80, deadline=None)
@given(b=st.integers(2, 3), k=st.integers(1, 2), extra=st.integers(0, 2), seed=st.integers(0, 10**6))
def test_count_matches_enumeration_property(b, k, extra, seed):
    p = NetworkParams(b, k, k + extra)
    s = sample_state(p, 0.7, block_rng(seed, 0))
    v, w = zero(p, 0), VertexId(p.l, index_label(seed % p.rank_size, b, k))
    expect = sum(all(s.is_idle(x) for x in path_links(x, p)) for x in enumerate_paths(p, v, w))
    assert count_idle_paths(p, s, v, w) == expect


# -- exact enumeration ---------------------------------------------------------


def test_exact_Q_small():
    p = NetworkParams(2, 1, 2)
    assert exact_Q(p, Fraction(1, 2)) == Fraction(3, 4)
    assert exact_Q(p, 0.5) == pytest.approx(0.75, abs=1e-15)
    for q in (0.1, 0.6, 0.9):
        assert exact_Q(p, q) == pytest.approx(1 - (1 - q) ** 2, abs=1e-15)


def test_exact_Q_extremes():
    for p in (NetworkParams(2, 1, 3), NetworkParams(2, 2, 4)):
        assert exact_Q(p, 1.0) == 1
        assert exact_Q(p, 0.0) == 0


def test_exact_Q_b2_k1_l3():
    # paths 0-x-y-0 for x, y in {0, 1}: linked iff some rank-1 and some rank-2 link idle
    q = Fraction(4, 5)
    assert exact_Q(NetworkParams(2, 1, 3), q) == (1 - (1 - q) ** 2) ** 2


def test_exact_Q_state_counts_total():
    counts = linked_state_counts(NetworkParams(2, 2, 4))
    assert len(counts) == 13
    assert counts[-1] == 1 and counts[0] == 0


def test_exact_Q_cap():
    with pytest.raises(CapExceeded):
        exact_Q(NetworkParams(2, 3, 5), 0.5)


def test_exact_Q_monotone_in_q():
    for p in (NetworkParams(2, 1, 3), NetworkParams(2, 2, 4), NetworkParams(3, 1, 3)):
        vals = [exact_Q(p, Fraction(i, 40)) for i in range(41)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


# -- Monte Carlo ------------------------------------------------------------


def test_estimate_invariants_and_json():
    e = estimate_Q(NetworkParams(2, 1, 2), 0.5, 5000, seed=1)
    assert 0 <= e.ci_low <= e.p_hat <= e.ci_high <= 1
    d = json.loads(json.dumps(e.to_dict()))
    assert d["n"] == 5000 and d["seed"] == 1


def test_estimate_Q_small_case_3sigma():
    e = estimate_Q(NetworkParams(2, 1, 2), 0.5, 100_000, seed=2)
    assert abs(e.p_hat - 0.75) <= 3 * math.sqrt(0.75 * 0.25 / e.n)


def test_estimate_Q_q1():
    e = estimate_Q(NetworkParams(2, 3, 7), 1.0, 3000, seed=0)
    assert e.p_hat == 1.0 and e.successes == 3000


def test_estimate_Q_vs_exact_b2_k1_l3():
    p = NetworkParams(2, 1, 3)
    Q = float(exact_Q(p, 0.8))
    e = estimate_Q(p, 0.8, 200_000, seed=4)
    assert abs(e.p_hat - Q) <= 3 * math.sqrt(Q * (1 - Q) / e.n)


def test_estimate_Q_deterministic_across_workers():
    p = NetworkParams(2, 3, 6)
    n = 3 * BLOCK + 17
    runs = [estimate_Q(p, 0.7, n, seed=42, workers=w) for w in (1, 2, 4)]
    assert runs[0] == runs[1] == runs[2]
    xs = [sample_idle_paths(p, 0.7, n, seed=42, workers=w) for w in (1, 3)]
    assert np.array_equal(xs[0], xs[1])


def test_estimate_Q_seed_changes_result():
    p = NetworkParams(2, 3, 6)
    assert estimate_Q(p, 0.7, 5000, seed=1) != estimate_Q(p, 0.7, 5000, seed=2)


def test_wilson_ci_coverage():
    p = NetworkParams(2, 1, 3)
    Q = float(exact_Q(p, 0.5))
    hits = 0
    for seed in range(100):
        e = estimate_Q(p, 0.5, 400, seed=1000 + seed)
        hits += e.ci_low <= Q <= e.ci_high
    assert hits >= 93


def test_wilson_interval_edges():
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-4) and hi == pytest.approx(0.5962, abs=1e-4)
    assert wilson_interval(0, 0) == (0.0, 1.0)


@pytest.mark.parametrize("b,k,l,q", [(2, 2, 4, 0.85), (2, 1, 3, 0.5), (3, 1, 3, 0.4)])
def test_estimate_respects_moment_bounds(b, k, l, q):
    e = estimate_Q(NetworkParams(b, k, l), q, 50_000, seed=8)
    slack = 3 * max(e.sigma, 1 / e.n)
    assert e.p_hat <= markov_upper_bound(b, k, l, q) + slack
    assert e.p_hat >= chebyshev_lower_bound(b, k, l, q) - slack


def test_idle_path_counts_bounded():
    p = NetworkParams(2, 3, 7)
    x = sample_idle_paths(p, 0.9, 20_000, seed=3)
    assert x.max() <= 2**4 and x.min() >= 0


def test_moments_q1_zero_variance():
    p = NetworkParams(2, 2, 5)
    m1, m2 = estimate_moments(p, 1.0, 2000, seed=0)
    assert m1 == 8 and m2 == 64


def test_moments_match_theory():
    b, k, l, q = 2, 3, 6, 0.8
    p = NetworkParams(b, k, l)
    x = sample_idle_paths(p, q, 100_000, seed=6).astype(float)
    n = x.size
    ex = expected_paths(b, k, l, q)
    ex2 = second_moment(b, k, l, q)
    assert abs(x.mean() - ex) <= 3 * x.std(ddof=1) / math.sqrt(n)
    assert abs((x * x).mean() - ex2) <= 3 * (x * x).std(ddof=1) / math.sqrt(n)
    m1, m2 = estimate_moments(p, q, 100_000, seed=6)
    assert m1 == pytest.approx(x.mean()) and m2 == pytest.approx((x * x).mean())


def test_convergence_example_b2_k4_l8():
    p = NetworkParams(2, 4, 8)
    e = estimate_Q(p, 0.85, 100_000, seed=0)
    assert abs(e.p_hat - limiting_Q(2, 0.85, 2)) <= 0.05


# -- link sets ----------------------------------------------------------------


def test_linkset_ranks():
    assert linkset_ranks(NetworkParams(2, 6, 18)) == (3, 15)
    assert linkset_ranks(NetworkParams(2, 7, 21)) == (3, 18)


def test_linkset_all_links_q1():
    p = NetworkParams(2, 4, 12)
    r, s = linkset_ranks(p)
    e = linkset_connect_prob(p, vertices(p, r), vertices(p, s), 1.0, 500, seed=0)
    assert e.p_hat == 1.0


def test_linkset_rank_mismatch():
    p = NetworkParams(2, 4, 12)
    with pytest.raises(ValueError):
        linkset_connect_prob(p, [zero(p, 1)], [zero(p, 10)], 0.5, 10, seed=0)
    with pytest.raises(ValueError):
        linkset_connect_prob(p, [], [zero(p, 10)], 0.5, 10, seed=0)


def test_linkset_single_pair_matches_window_dp():
    # a window G_{r,s} is a copy of G_{b,k,s-r}; V = {v}, W = {w} maps to an input/output pair
    b, k, l, q = 2, 4, 12, 0.75
    p = NetworkParams(b, k, l)
    r, s = linkset_ranks(p)
    small = NetworkParams(b, k, s - r)
    v_small = VertexId(0, (1, 0, 1, 1))
    w_small = VertexId(s - r, (0, 1, 1, 0))
    v, w = window_iso(p, r, s, v_small), window_iso(p, r, s, w_small)
    n = 40_000
    big = linkset_connect_prob(p, [v], [w], q, n, seed=12)
    rng_hits = 0
    rng = block_rng(99, 0)
    for _ in range(n):
        rng_hits += is_linked(small, sample_state(small, q, rng), v_small, w_small)
    ref = Estimate.from_counts(rng_hits, n, 99)
    sigma = math.sqrt(big.sigma**2 + ref.sigma**2)
    assert abs(big.p_hat - ref.p_hat) <= 3 * sigma
    # the window of a transitive graph: same law as the 0^k pair
    assert abs(big.p_hat - estimate_Q(small, q, n, seed=5).p_hat) <= 3 * sigma * 1.5


@pytest.mark.slow
def test_linkset_H_sets_approach_one():
    b, c, q = 2, 3, 0.9
    probs = []
    for k in (6, 8, 10):
        p = NetworkParams(b, k, c * k)
        r, s = linkset_ranks(p)
        h = H_threshold(b, q, c, k)
        V = list(vertices(p, r))[:h]
        W = list(vertices(p, s))[:h]
        probs.append(linkset_connect_prob(p, V, W, q, 4000, seed=k).p_hat)
    assert probs[0] <= probs[1] + 0.02 and probs[1] <= probs[2] + 0.02
    assert probs[-1] > 0.9
