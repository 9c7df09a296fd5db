"""Commit/reveal execution, rate selection, attacks, and transcripts."""

import json
import math

import numpy as np
import pytest

from noisycommit.capacity import sum_rate_capacity
from noisycommit.catalog import two_bidder_mac, two_verifier_broadcast
from noisycommit.channel import MacChannel
from noisycommit.hashing import SymbolCodec
from noisycommit.infotheory import (Pmf, RateVector, mi_from_distance,
                                    nonempty_subsets, smoothing_defect)
from noisycommit.capacity import InputDistribution, broadcast_capacity
from noisycommit.protocol import (FlipK, ProtocolParams, Resample,
                                  binding_attack, broadcast_rate,
                                  certified_concealment_bound,
                                  commit_broadcast, commit_mac,
                                  concealment_probe, honest_claim,
                                  parse_transcript, rate_budgets, reveal_broadcast,
                                  reveal_mac, select_rates, transcript_json)

pytestmark = pytest.mark.filterwarnings("ignore:MAC is redundant")

MAC = two_bidder_mac()
UNIFORM4 = InputDistribution(Pmf.uniform(4), (2, 2))
RATES_1E4_UNIFORM = (5924, 5924)  # frozen from the budget arithmetic below

S1, S2, S12 = frozenset({0}), frozenset({1}), frozenset({0, 1})


def argmax_dist():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, dist = sum_rate_capacity(MAC, "colluding")
    return dist


def product_dist():
    _, dist = sum_rate_capacity(MAC, "product")
    return dist


DIST = argmax_dist()


# --- parameters --------------------------------------------------------------


def test_params_validation():
    with pytest.raises(ValueError):
        ProtocolParams(n=0)
    with pytest.raises(ValueError):
        ProtocolParams(n=1000, mu=0.02, eta_hash=0.1)  # needs eta < mu
    with pytest.raises(ValueError):
        ProtocolParams(n=10)  # tag length floors to zero
    with pytest.raises(ValueError):
        ProtocolParams(n=1000, eps=-0.1)
    p = ProtocolParams(n=2000)
    assert p.challenge_len == 200
    assert p.tag_len == 40
    assert p.nbar_floor(2) == 1600
    assert p.typ_eps() == pytest.approx(0.5 * 2000 ** (-1 / 3), rel=1e-12)


# --- rate selection -----------------------------------------------------------


def test_select_rates_noiseless_zero():
    m = MacChannel([2, 2], np.eye(4))
    with pytest.warns(UserWarning, match="below one bit"):
        rates = select_rates(m, UNIFORM4, ProtocolParams(n=2000))
    assert rates.per_user == (0, 0)


def test_select_rates_vanish_at_huge_security():
    with pytest.warns(UserWarning, match="below one bit"):
        rates = select_rates(MAC, UNIFORM4, ProtocolParams(n=2000, security=500))
    assert rates.total() == 0


def test_select_rates_demo_uniform_frozen():
    params = ProtocolParams(n=10_000)
    rates = select_rates(MAC, UNIFORM4, params)
    assert rates.per_user == RATES_1E4_UNIFORM


def test_rate_budgets_match_formula():
    params = ProtocolParams(n=10_000)
    budgets = rate_budgets(MAC, UNIFORM4, params)
    nbar = 8000
    f = {S1: 0.9885175931739851, S2: 0.9885175931739851,
         S12: 1.9641201228262857}
    sizes = {S1: 2, S2: 2, S12: 4}
    for t in nonempty_subsets(2):
        delta = math.log2(sizes[t] + 3) * math.sqrt((2.0 / nbar) * (2 + 40))
        assert budgets[t] == pytest.approx(nbar * (f[t] - delta) - 80, abs=1e-6)


def test_select_rates_feasible_and_maximal():
    for params in (ProtocolParams(n=2000), ProtocolParams(n=600, security=10)):
        rates = select_rates(MAC, DIST, params)
        budgets = rate_budgets(MAC, DIST, params)
        for t in nonempty_subsets(2):
            assert rates.subset_rate(t) <= budgets[t]
        for u in range(2):
            bumped = list(rates.per_user)
            bumped[u] += 1
            r2 = RateVector(tuple(bumped))
            assert any(r2.subset_rate(t) > budgets[t]
                       for t in nonempty_subsets(2) if u in t)


def test_commit_refuses_rates_beyond_budget():
    params = ProtocolParams(n=2000, rates=RateVector((5000, 5000)))
    with pytest.raises(ValueError, match="exceeds the concealment budget"):
        commit_mac(MAC, DIST, params, np.random.default_rng(0))


# --- commit and reveal ---------------------------------------------------------


def test_honest_round_trip_accepts():
    params = ProtocolParams(n=2000)
    states, view = commit_mac(MAC, DIST, params, np.random.default_rng(1))
    xs, msgs = honest_claim(states)
    decisions = reveal_mac(MAC, DIST, params, view, xs, msgs)
    assert all(d.accepted for d in decisions)
    assert all(d.failed is None for d in decisions)


def test_commit_deterministic_under_seed():
    params = ProtocolParams(n=500, security=10)
    a = commit_mac(MAC, DIST, params, np.random.default_rng(99))
    b = commit_mac(MAC, DIST, params, np.random.default_rng(99))
    assert transcript_json(MAC, params, a[1]) == transcript_json(MAC, params, b[1])
    for sa, sb in zip(a[0], b[0]):
        assert np.array_equal(sa.x, sb.x)
        assert np.array_equal(sa.message, sb.message)


def test_zero_rate_commit_completes():
    params = ProtocolParams(n=200, security=40)  # budgets all negative here
    with pytest.warns(UserWarning, match="below one bit"):
        states, view = commit_mac(MAC, DIST, params, np.random.default_rng(5))
    assert all(b.e.size == 0 for b in view.bidders)
    assert all(b.f is None for b in view.bidders)
    xs, msgs = honest_claim(states)
    decisions = reveal_mac(MAC, DIST, params, view, xs, msgs)
    assert all(d.accepted for d in decisions)


def test_wrong_message_rejected_by_pad():
    params = ProtocolParams(n=2000)
    states, view = commit_mac(MAC, DIST, params, np.random.default_rng(2))
    xs, msgs = honest_claim(states)
    msgs = [m.copy() for m in msgs]
    msgs[1][0] ^= 1
    decisions = reveal_mac(MAC, DIST, params, view, xs, msgs)
    assert decisions[0].accepted
    assert not decisions[1].accepted
    assert decisions[1].failed == "message-pad"


def test_flip_inside_challenge_rejected_by_tag():
    params = ProtocolParams(n=2000)
    rejected = 0
    for seed in range(50):
        states, view = commit_mac(MAC, DIST, params, np.random.default_rng(seed))
        xs, msgs = honest_claim(states)
        xs = [x.copy() for x in xs]
        pos = states[0].s[0]
        xs[0][pos] ^= 1
        decisions = reveal_mac(MAC, DIST, params, view, xs, msgs)
        if not decisions[0].accepted:
            assert decisions[0].failed in ("challenge-hash", "typicality")
            rejected += 1
    # tag collision probability is 2^-40 per run
    assert rejected == 50


def test_reveal_rejects_malformed_claims():
    params = ProtocolParams(n=500, security=5)
    states, view = commit_mac(MAC, DIST, params, np.random.default_rng(3))
    xs, msgs = honest_claim(states)
    with pytest.raises(ValueError):
        reveal_mac(MAC, DIST, params, view, xs[:1], msgs)
    with pytest.raises(ValueError):
        reveal_mac(MAC, DIST, params, view, [x[:-1] for x in xs], msgs)


def test_non_colluding_requires_product():
    params = ProtocolParams(n=500, security=10)
    with pytest.raises(ValueError, match="product"):
        commit_mac(MAC, DIST, params, np.random.default_rng(0), mode="non_colluding")
    dist = product_dist()
    states, view = commit_mac(MAC, dist, params, np.random.default_rng(0),
                              mode="non_colluding")
    xs, msgs = honest_claim(states)
    decisions = reveal_mac(MAC, dist, params, view, xs, msgs)
    assert all(d.accepted for d in decisions)


def test_honest_acceptance_rate_n2000():
    params = ProtocolParams(n=2000)
    accepted = 0
    for seed in range(100):
        states, view = commit_mac(MAC, DIST, params, np.random.default_rng(seed))
        xs, msgs = honest_claim(states)
        accepted += all(d.accepted for d in reveal_mac(MAC, DIST, params,
                                                       view, xs, msgs))
    assert accepted >= 99


def test_pad_bits_unbiased():
    # pooled pad bits across fresh commits; messages are drawn uniformly
    # inside commit_mac, so each pad bit is a fresh one-time-pad output
    params = ProtocolParams(n=500, security=10)
    bits = []
    for seed in range(60):
        _, view = commit_mac(MAC, DIST, params, np.random.default_rng(seed))
        for b in view.bidders:
            bits.append(b.e)
    pooled = np.concatenate(bits)
    assert pooled.size > 5000
    bias = abs(pooled.mean() - 0.5)
    assert bias < 3 * math.sqrt(0.25 / pooled.size)


def test_extracted_key_bits_unbiased():
    # K = F(x restricted to free positions), checked without the pad
    params = ProtocolParams(n=500, security=10)
    codec = SymbolCodec(2)
    bits = []
    for seed in range(60):
        states, view = commit_mac(MAC, DIST, params, np.random.default_rng(seed))
        free = view.free_positions(params.n)
        for st in states:
            if st.f is not None:
                bits.append(st.f(codec.encode(st.x[free])))
    pooled = np.concatenate(bits)
    bias = abs(pooled.mean() - 0.5)
    assert bias < 3 * math.sqrt(0.25 / pooled.size)


# --- binding ------------------------------------------------------------------


def test_unchanged_sequence_never_rebinds():
    params = ProtocolParams(n=2000)
    states, view = commit_mac(MAC, DIST, params, np.random.default_rng(4))
    report = binding_attack(MAC, DIST, params, states, view, FlipK(0), 20,
                            np.random.default_rng(0))
    assert report.successes == 0
    assert report.test_pass_counts["message-pad"] == 0
    assert report.test_pass_counts["challenge-hash"] == 20


def test_resample_attack_rare_success():
    params = ProtocolParams(n=2000)
    successes = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        states, view = commit_mac(MAC, DIST, params, rng)
        report = binding_attack(MAC, DIST, params, states, view, Resample(), 1, rng)
        successes += report.successes
    assert successes <= 1


def test_flip_in_challenge_attack_fails():
    params = ProtocolParams(n=2000)
    states, view = commit_mac(MAC, DIST, params, np.random.default_rng(6))
    report = binding_attack(MAC, DIST, params, states, view,
                            FlipK(1, "challenge"), 50, np.random.default_rng(1))
    assert report.successes == 0
    # the pad input is untouched, so the opened message stays the honest one
    assert report.test_pass_counts["message-pad"] == 0


def test_flip_in_free_attack_fails():
    params = ProtocolParams(n=2000)
    states, view = commit_mac(MAC, DIST, params, np.random.default_rng(7))
    report = binding_attack(MAC, DIST, params, states, view, FlipK(1, "free"),
                            50, np.random.default_rng(2))
    assert report.successes == 0
    assert report.test_pass_counts["challenge-hash"] == 50


def test_binding_attack_needs_positive_rate():
    params = ProtocolParams(n=200, security=40)
    with pytest.warns(UserWarning, match="below one bit"):
        states, view = commit_mac(MAC, DIST, params, np.random.default_rng(8))
    with pytest.raises(ValueError, match="zero-rate"):
        binding_attack(MAC, DIST, params, states, view, Resample(), 5,
                       np.random.default_rng(0))


def test_resample_typicality_pass_rate_decreases_with_n():
    # the typicality screen alone: an independent sequence drifts out of
    # the shrinking eps(n) band as n grows
    rates = {}
    for n in (500, 1000, 2000):
        params = ProtocolParams(n=n, security=10)
        passes = 0
        for seed in range(100):
            rng = np.random.default_rng(10_000 + seed)
            states, view = commit_mac(MAC, DIST, params, rng)
            report = binding_attack(MAC, DIST, params, states, view,
                                    Resample(), 1, rng)
            passes += report.test_pass_counts["typicality"]
        rates[n] = passes / 100
    assert rates[2000] <= rates[1000] <= rates[500] + 0.10
    assert rates[2000] < rates[500]


# --- concealment ----------------------------------------------------------------


def test_certified_bound_zero_rate():
    params = ProtocolParams(n=200, security=40)
    with pytest.warns(UserWarning, match="below one bit"):
        bound = certified_concealment_bound(MAC, DIST, params)
    assert bound == 0.0


def test_certified_bound_at_protocol_scale():
    params = ProtocolParams(n=2000)
    rates = select_rates(MAC, DIST, params)
    bound = certified_concealment_bound(MAC, DIST, params, rates=rates)
    cap = mi_from_distance(4 * 2.0 ** -40, max(4, 2 ** rates.total()))
    assert 0.0 < bound <= cap < 1e-6


def test_certified_bound_vacuous_when_rates_fill_budget():
    params = ProtocolParams(n=600, security=1)
    rates = select_rates(MAC, DIST, params)
    bound = certified_concealment_bound(MAC, DIST, params, rates=rates)
    assert math.isinf(bound)  # s = 1 puts the whole failure mass in play


def test_concealment_probe_null_advantage():
    params = ProtocolParams(n=200, mu=0.1, eta_hash=0.02, security=5)
    rates = select_rates(MAC, DIST, params)
    assert rates.total() > 0
    messages_a = [np.zeros(r, dtype=np.uint8) for r in rates.per_user]
    messages_b = [np.ones(r, dtype=np.uint8) for r in rates.per_user]
    report = concealment_probe(MAC, DIST,
                               ProtocolParams(n=200, security=5, rates=rates),
                               messages_a, messages_b, trials=2000,
                               master_seed=17)
    assert report.trials == 2000
    assert report.advantage <= 5 * report.sigma_null


# --- broadcast -------------------------------------------------------------------


BC = two_verifier_broadcast()


def bc_dist():
    _, p = broadcast_capacity(BC)
    return p


BC_P = bc_dist()


def test_broadcast_rate_frozen():
    assert broadcast_rate(BC, BC_P, ProtocolParams(n=2000)) == 740


def test_broadcast_rate_formula():
    params = ProtocolParams(n=2000)
    from noisycommit.capacity import joint_with_output
    from noisycommit.infotheory import conditional_entropy
    h = min(conditional_entropy(joint_with_output(BC.marginal(b), BC_P))
            for b in range(2))
    nbar = 2000 - 200
    defect = smoothing_defect(nbar, 2, 1, 2.0 ** -40)
    assert broadcast_rate(BC, BC_P, params) == math.floor(nbar * (h - defect) - 80)


def test_broadcast_honest_accept_any_verifier():
    params = ProtocolParams(n=2000)
    state, view = commit_broadcast(BC, BC_P, params, np.random.default_rng(12))
    for b_star in (0, 1):
        d = reveal_broadcast(BC, BC_P, params, view, state.x, state.message, b_star)
        assert d.accepted
    # dropout: only one verifier left, it can still adjudicate alone
    d = reveal_broadcast(BC, BC_P, params, view, state.x, state.message, 1,
                         available=[1])
    assert d.accepted


def test_broadcast_rejects_substitute_message():
    params = ProtocolParams(n=2000)
    state, view = commit_broadcast(BC, BC_P, params, np.random.default_rng(13))
    wrong = state.message.copy()
    wrong[0] ^= 1
    for b_star in (0, 1):
        d = reveal_broadcast(BC, BC_P, params, view, state.x, wrong, b_star)
        assert not d.accepted
        assert d.failed == "message-pad"


def test_broadcast_verifier_bookkeeping():
    params = ProtocolParams(n=2000)
    state, view = commit_broadcast(BC, BC_P, params, np.random.default_rng(14))
    with pytest.raises(ValueError, match="not available"):
        reveal_broadcast(BC, BC_P, params, view, state.x, state.message, 0,
                         available=[1])
    with pytest.raises(ValueError, match="nonempty"):
        reveal_broadcast(BC, BC_P, params, view, state.x, state.message, 0,
                         available=[])


def test_broadcast_single_verifier_matches_point_to_point_shape():
    from noisycommit.channel import BroadcastChannel
    from noisycommit.catalog import solo_channel
    w1 = solo_channel(1)
    bc1 = BroadcastChannel([2], w1.rows)
    p = Pmf([0.5, 0.5])
    params = ProtocolParams(n=1000, security=10)
    state, view = commit_broadcast(bc1, p, params, np.random.default_rng(15))
    assert len(view.ys) == 1 and len(view.gs) == 1
    assert view.ys[0].shape == (1000,)
    assert view.ts[0].size == params.tag_len
    assert view.s.size == params.challenge_len
    d = reveal_broadcast(bc1, p, params, view, state.x, state.message, 0)
    assert d.accepted


# --- transcripts -----------------------------------------------------------------


def test_transcript_round_trip_and_replay():
    params = ProtocolParams(n=500, security=10)
    states, view = commit_mac(MAC, DIST, params, np.random.default_rng(20))
    text = transcript_json(MAC, params, view)
    assert text == transcript_json(MAC, params, view)  # canonical bytes
    params2, input_sizes, view2 = parse_transcript(text)
    assert input_sizes == (2, 2)
    assert params2.n == 500
    xs, msgs = honest_claim(states)
    decisions = reveal_mac(MAC, DIST, params2, view2, xs, msgs)
    assert all(d.accepted for d in decisions)


def test_transcript_tamper_detected():
    params = ProtocolParams(n=500, security=10)
    states, view = commit_mac(MAC, DIST, params, np.random.default_rng(21))
    doc = json.loads(transcript_json(MAC, params, view))
    old = doc["bidders"][0]["t"]
    doc["bidders"][0]["t"] = ("00" if old != "00" * (len(old) // 2) else "ff") * (len(old) // 2)
    _, _, view2 = parse_transcript(json.dumps(doc))
    xs, msgs = honest_claim(states)
    decisions = reveal_mac(MAC, DIST, params, view2, xs, msgs)
    assert not decisions[0].accepted


def test_transcript_rejects_unknown_schema():
    with pytest.raises(ValueError, match="schema"):
        parse_transcript('{"schema": 99}')
