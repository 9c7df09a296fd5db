"""Executable commit/reveal protocol over a noisy channel, with harnesses.

Commit phase (multiple access, L bidders):
  1. each bidder sends its sequence X_l^n through the channel; the
     verifier keeps Y^n;
  2. the verifier draws a two-universal challenge hash G_l per bidder and
     publishes it;
  3. each bidder picks a uniform challenge set S_l of floor(mu*n)
     positions, answers T_l = G_l(X_l[S_l]), and reveals S_l;
  4. with the challenge positions of every bidder excluded, each bidder
     draws an extractor hash F_l over the remaining positions and sends
     F_l and the pad E_l = a_l xor F_l(X_l restricted to free positions).

Reveal: the bidder hands over (x_l^n, a_l) and the verifier accepts when
  (i)   the claimed inputs are jointly typical with Y^n,
  (ii)  the challenge answer matches, T_l = G_l(x_l[S_l]),
  (iii) the pad opens to the claimed message, a_l = E_l xor F_l(xbar_l).

Rates are chosen so the extractor output stays below the smoothed
min-entropy of the free positions for every bidder coalition; the
concealment bound then follows from the leftover-hash distance. The
binding harness plays the fixed-pair game: the committed message and the
substitute message are both fixed before the transcript exists, and a
strategy rewrites the revealed sequence trying to get the substitute
accepted.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .channel import BroadcastChannel, MacChannel, sample_from_pmf, sample_outputs
from .capacity import InputDistribution, entropy_set_function, joint_with_output
from .hashing import LinearHash, SymbolCodec, bits_to_hex, hex_to_bits, xor_bits
from .infotheory import (JointPmf, Pmf, RateVector, conditional_entropy, lhl_bound,
                         mi_from_distance, nonempty_subsets, smoothing_defect)
from .montecarlo import run_trials, wilson_interval
from .typicality import default_eps, jointly_typical

TRANSCRIPT_SCHEMA = 1


@dataclass(frozen=True)
class ProtocolParams:
    """Block length and knobs shared by both phases.

    mu is the challenge fraction, eta_hash the challenge-tag fraction
    (eta_hash < mu), eps the typicality tolerance (None picks the
    default schedule), security the level s: rates back off 2s bits from
    the min-entropy budget and the smoothing failure mass is 2^-s.
    """

    n: int
    mu: float = 0.1
    eta_hash: float = 0.02
    eps: float | None = None
    security: int = 40
    rates: RateVector | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0 < self.eta_hash < self.mu < 1:
            raise ValueError("need 0 < eta_hash < mu < 1")
        if self.security < 1:
            raise ValueError("security level must be >= 1")
        if self.tag_len < 1:
            raise ValueError("eta_hash * n is below one tag bit")
        if self.eps is not None and self.eps <= 0:
            raise ValueError("eps must be positive")

    @property
    def challenge_len(self):
        return int(self.mu * self.n)

    @property
    def tag_len(self):
        return int(self.eta_hash * self.n)

    def nbar_floor(self, num_users):
        """Guaranteed count of free positions, over any challenge overlap."""
        nbar = self.n - num_users * self.challenge_len
        if nbar < 1:
            raise ValueError("challenge sets can exhaust the block")
        return nbar

    def typ_eps(self):
        return self.eps if self.eps is not None else default_eps(self.n)


@dataclass(frozen=True)
class BidderState:
    """One bidder's private side of a commit transcript."""

    message: np.ndarray        # uint8 bits, length = rate
    x: np.ndarray              # committed sequence
    s: np.ndarray              # sorted challenge positions
    f: LinearHash | None       # extractor (None at rate 0)


@dataclass(frozen=True)
class BidderPublic:
    g: LinearHash
    s: np.ndarray
    t: np.ndarray
    f: LinearHash | None
    e: np.ndarray


@dataclass(frozen=True)
class VerifierView:
    """Everything the verifier holds after the commit phase."""

    y: np.ndarray
    bidders: tuple

    def union_challenge(self):
        sets = [b.s for b in self.bidders]
        out = sets[0]
        for s in sets[1:]:
            out = np.union1d(out, s)
        return out

    def free_positions(self, n):
        return np.setdiff1d(np.arange(n), self.union_challenge())


@dataclass(frozen=True)
class RevealDecision:
    accepted: bool
    failed: str | None = None  # "typicality" | "challenge-hash" | "message-pad"


def _subset_alphabet(input_sizes, subset):
    out = 1
    for i in subset:
        out *= input_sizes[i]
    return out


def rate_budgets(m: MacChannel, dist: InputDistribution, params: ProtocolParams):
    """Bit budget per coalition T: nbar * (H(X_T|Y) - defect_T) - 2s."""
    f = entropy_set_function(m, dist)
    nbar = params.nbar_floor(m.num_users)
    s = params.security
    eps_smooth = 2.0 ** (-s)
    budgets = {}
    for t in nonempty_subsets(m.num_users):
        defect = smoothing_defect(nbar, _subset_alphabet(m.input_sizes, t),
                                  m.num_users, eps_smooth)
        budgets[t] = nbar * (f(t) - defect) - 2 * s
    return budgets


def select_rates(m: MacChannel, dist: InputDistribution, params: ProtocolParams) -> RateVector:
    """Largest per-user integer rates fitting every coalition budget.

    Greedy water-filling, one bit at a time in user order, so the result
    is deterministic and componentwise maximal: no single user can gain a
    bit without breaking some budget.
    """
    budgets = rate_budgets(m, dist, params)
    rates = [0] * m.num_users
    frozen = [False] * m.num_users
    while not all(frozen):
        for user in range(m.num_users):
            if frozen[user]:
                continue
            fits = all(rates[user] + 1 + sum(rates[i] for i in t if i != user)
                       <= budgets[t]
                       for t in nonempty_subsets(m.num_users) if user in t)
            if fits:
                rates[user] += 1
            else:
                frozen[user] = True
    if sum(rates) == 0:
        warnings.warn("every rate budget is below one bit at these parameters; "
                      "selected the zero rate vector", stacklevel=2)
    return RateVector(tuple(rates))


def _check_rates(rates: RateVector, m, dist, params):
    budgets = rate_budgets(m, dist, params)
    for t in nonempty_subsets(m.num_users):
        if rates.subset_rate(t) > budgets[t]:
            raise ValueError(
                f"rate {rates.subset_rate(t)} for users {sorted(i + 1 for i in t)} "
                f"exceeds the concealment budget {budgets[t]:.3f}")


def _resolve_rates(m, dist, params) -> RateVector:
    if params.rates is None:
        return select_rates(m, dist, params)
    if params.rates.num_users != m.num_users:
        raise ValueError("rate vector does not match the user count")
    _check_rates(params.rates, m, dist, params)
    return params.rates


def _split_inputs(flat, sizes):
    out = []
    rem = np.asarray(flat)
    for size in reversed(sizes):
        out.append(rem % size)
        rem = rem // size
    return list(reversed(out))


def _draw_messages(rates, rng):
    return [rng.integers(0, 2, size=r, dtype=np.uint8) for r in rates.per_user]


def commit_mac(m: MacChannel, dist: InputDistribution, params: ProtocolParams,
               rng, messages=None, mode="colluding"):
    """Run the commit phase; returns (bidder states, verifier view).

    mode "colluding" samples the inputs jointly; "non_colluding" requires
    a product input distribution and gives each bidder its own stream.
    """
    if mode not in ("colluding", "non_colluding"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "non_colluding" and not dist.product:
        raise ValueError("non-colluding commits need a product input distribution")
    if dist.input_sizes != m.input_sizes:
        raise ValueError("input distribution does not match the channel")
    rates = _resolve_rates(m, dist, params)
    n, L = params.n, m.num_users
    # Fixed stream layout keeps paired runs aligned: re-running with the
    # same generator seed and different messages reuses identical channel,
    # challenge, and hash randomness.
    x_rng, ch_rng, ver_rng, msg_rng, *bidder_rngs = rng.spawn(4 + L)

    if messages is None:
        messages = _draw_messages(rates, msg_rng)
    messages = [np.ascontiguousarray(a, dtype=np.uint8) for a in messages]
    if len(messages) != L:
        raise ValueError("one message per bidder required")
    for a, r in zip(messages, rates.per_user):
        if a.shape != (r,):
            raise ValueError(f"message length {a.size} does not match rate {r}")

    if mode == "colluding":
        flat_x = sample_from_pmf(dist.joint, n, x_rng)
        per_user_x = _split_inputs(flat_x, m.input_sizes)
    else:
        factors = dist.factors()
        per_user_x = [sample_from_pmf(factors[i], n, bidder_rngs[i]) for i in range(L)]
        flat_x = m.flatten_inputs(per_user_x)
    y = sample_outputs(m.flat, flat_x, ch_rng)

    codecs = [SymbolCodec(size) for size in m.input_sizes]
    c_len, t_len = params.challenge_len, params.tag_len
    gs = [LinearHash.draw(c_len * codecs[i].width, t_len, ver_rng) for i in range(L)]
    ss = [np.sort(bidder_rngs[i].permutation(n)[:c_len]) for i in range(L)]
    union = ss[0]
    for s in ss[1:]:
        union = np.union1d(union, s)
    free = np.setdiff1d(np.arange(n), union)

    states, publics = [], []
    for i in range(L):
        t = gs[i](codecs[i].encode(per_user_x[i][ss[i]]))
        xbar_bits = codecs[i].encode(per_user_x[i][free])
        if rates.per_user[i] > 0:
            f = LinearHash.draw(xbar_bits.size, rates.per_user[i], bidder_rngs[i])
            e = xor_bits(messages[i], f(xbar_bits))
        else:
            f, e = None, np.zeros(0, dtype=np.uint8)
        states.append(BidderState(messages[i], per_user_x[i], ss[i], f))
        publics.append(BidderPublic(gs[i], ss[i], t, f, e))
    return states, VerifierView(y, tuple(publics))


def honest_claim(states):
    """The reveal a compliant bidder set would make."""
    return [s.x for s in states], [s.message for s in states]


def reveal_mac(m: MacChannel, dist: InputDistribution, params: ProtocolParams,
               view: VerifierView, sequences, messages):
    """Per-bidder accept/reject for a claimed reveal.

    The typicality test is the joint one over all claimed sequences; it
    gates every bidder (in the per-bidder verification each beta_l sees
    the same Y and the full set of claimed inputs). The challenge and pad
    tests are per bidder.
    """
    n, L = params.n, m.num_users
    if len(sequences) != L or len(messages) != L:
        raise ValueError("one sequence and one message per bidder required")
    sequences = [np.asarray(x, dtype=np.int64) for x in sequences]
    for x in sequences:
        if x.shape != (n,):
            raise ValueError("claimed sequence has the wrong length")
    q = joint_with_output(m.flat, dist.joint)
    typical = jointly_typical(m.flatten_inputs(sequences), view.y, q, params.typ_eps())
    free = view.free_positions(n)
    codecs = [SymbolCodec(size) for size in m.input_sizes]
    decisions = []
    for i in range(L):
        pub = view.bidders[i]
        if not typical:
            decisions.append(RevealDecision(False, "typicality"))
            continue
        tag = pub.g(codecs[i].encode(sequences[i][pub.s]))
        if not np.array_equal(tag, pub.t):
            decisions.append(RevealDecision(False, "challenge-hash"))
            continue
        a = np.ascontiguousarray(messages[i], dtype=np.uint8)
        if pub.f is None:
            opened = np.zeros(0, dtype=np.uint8)
        else:
            opened = xor_bits(pub.e, pub.f(codecs[i].encode(sequences[i][free])))
        if a.shape != opened.shape or not np.array_equal(a, opened):
            decisions.append(RevealDecision(False, "message-pad"))
            continue
        decisions.append(RevealDecision(True))
    return decisions


# --- binding harness -----------------------------------------------------


@dataclass(frozen=True)
class FlipK:
    """Rewrite k symbols of the committed sequence.

    where = "any" picks positions uniformly, "challenge" only inside the
    bidder's own challenge set, "free" only outside every challenge set.
    """

    k: int
    where: str = "any"

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.where not in ("any", "challenge", "free"):
            raise ValueError(f"unknown position scope {self.where!r}")


@dataclass(frozen=True)
class Resample:
    """Discard the committed sequence and draw a fresh one from the input law."""


@dataclass(frozen=True)
class AttackReport:
    strategy: object
    trials: int
    successes: int
    test_pass_counts: dict

    @property
    def success_rate(self):
        return self.successes / self.trials if self.trials else 0.0

    def wilson(self):
        return wilson_interval(self.successes, self.trials)


def _attack_sequence(strategy, state: BidderState, view: VerifierView,
                     input_size, marginal: Pmf, n, rng):
    if isinstance(strategy, Resample):
        return sample_from_pmf(marginal, n, rng)
    x = state.x.copy()
    if strategy.k == 0:
        return x
    if strategy.where == "any":
        pool = np.arange(n)
    elif strategy.where == "challenge":
        pool = state.s
    else:
        pool = view.free_positions(n)
    if strategy.k > pool.size:
        raise ValueError(f"cannot place {strategy.k} flips in {pool.size} positions")
    pos = pool[rng.permutation(pool.size)[:strategy.k]]
    x[pos] = (x[pos] + 1 + rng.integers(0, input_size - 1, size=pos.size)) % input_size
    return x


def binding_attack(m: MacChannel, dist: InputDistribution, params: ProtocolParams,
                   states, view: VerifierView, strategy, trials, rng,
                   bidder=0) -> AttackReport:
    """Estimate the success rate of a substitution attack on one bidder.

    The game is the fixed-pair one: the substitute message is the
    committed one with its first bit flipped, fixed before any attack
    randomness is drawn. A trial succeeds when the verifier accepts the
    rewritten sequence together with the substitute message. Per-test
    pass counts are reported for diagnosis.
    """
    state = states[bidder]
    if state.message.size == 0:
        raise ValueError("bidder has a zero-rate commitment; no substitute message exists")
    substitute = state.message.copy()
    substitute[0] ^= 1
    q = joint_with_output(m.flat, dist.joint)
    marginal = dist.factors()[bidder]
    honest_x, honest_a = honest_claim(states)
    counts = {"typicality": 0, "challenge-hash": 0, "message-pad": 0}
    successes = 0
    for _ in range(trials):
        x_tilde = _attack_sequence(strategy, state, view, m.input_sizes[bidder],
                                   marginal, params.n, rng)
        sequences = list(honest_x)
        sequences[bidder] = x_tilde
        messages = list(honest_a)
        messages[bidder] = substitute
        # count each test independently for the diagnostics
        typ = jointly_typical(m.flatten_inputs(sequences), view.y, q, params.typ_eps())
        pub = view.bidders[bidder]
        codec = SymbolCodec(m.input_sizes[bidder])
        tag_ok = np.array_equal(pub.g(codec.encode(x_tilde[pub.s])), pub.t)
        free = view.free_positions(params.n)
        opened = xor_bits(pub.e, pub.f(codec.encode(x_tilde[free])))
        pad_ok = np.array_equal(opened, substitute)
        counts["typicality"] += typ
        counts["challenge-hash"] += tag_ok
        counts["message-pad"] += pad_ok
        successes += typ and tag_ok and pad_ok
    return AttackReport(strategy, trials, successes, counts)


# --- concealment ---------------------------------------------------------


def certified_concealment_bound(m: MacChannel, dist: InputDistribution,
                                params: ProtocolParams, rates=None) -> float:
    """Analytic bound, in bits, on what the verifier learns about the messages.

    Chains the smoothed min-entropy of every coalition's free positions
    (2^-s failure mass each side) through the leftover-hash distance into
    the distance-to-information bound. Zero total rate commits nothing
    and returns 0.
    """
    if rates is None:
        rates = _resolve_rates(m, dist, params)
    else:
        _check_rates(rates, m, dist, params)
    r_total = rates.total()
    if r_total == 0:
        return 0.0
    f = entropy_set_function(m, dist)
    nbar = params.nbar_floor(m.num_users)
    eps_smooth = 2.0 ** (-params.security)
    hmin = {}
    for t in nonempty_subsets(m.num_users):
        defect = smoothing_defect(nbar, _subset_alphabet(m.input_sizes, t),
                                  m.num_users, eps_smooth)
        hmin[t] = nbar * (f(t) - defect)
    v = 2.0 * eps_smooth + lhl_bound(rates, hmin)
    if v >= 1.0:
        return float("inf")
    # the message alphabet embeds into >= 4 letters without changing the
    # mutual information, so the bound applies for any positive rate
    return mi_from_distance(v, max(4, 2 ** r_total))


@dataclass(frozen=True)
class ProbeReport:
    certified_bound: float
    advantage: float
    sigma_null: float
    trials: int


def _best_threshold_advantage(sa, sb):
    """max over thresholds of the empirical CDF gap between two samples."""
    sa = np.sort(np.asarray(sa, dtype=float))
    sb = np.sort(np.asarray(sb, dtype=float))
    grid = np.unique(np.concatenate([sa, sb]))
    fa = np.searchsorted(sa, grid, side="right") / sa.size
    fb = np.searchsorted(sb, grid, side="right") / sb.size
    return float(np.max(np.abs(fa - fb)))


def concealment_probe(m: MacChannel, dist: InputDistribution, params: ProtocolParams,
                      messages_a, messages_b, trials, master_seed,
                      mode="colluding") -> ProbeReport:
    """Certified bound plus an empirical distinguishing test.

    Each trial runs the commit phase twice from one per-trial seed, once
    per message tuple, so the two arms share channel, challenge, and hash
    randomness and differ only in the committed bits. The recorded scalar
    is the verifier's view statistic (total weight of the pads); the
    advantage is the best single-threshold separation between the two
    samples, and under concealment it stays within a few
    sigma_null = sqrt(1/(4 trials)) of zero.
    """
    certified = certified_concealment_bound(m, dist, params)

    def one(i, rng):
        # a plain integer seed: generators built from it agree on spawned
        # child streams too, which bit-level state restoration does not
        seed = int(rng.integers(0, 2 ** 62))

        def stat(messages):
            r = np.random.default_rng(seed)
            _, view = commit_mac(m, dist, params, r, messages=messages, mode=mode)
            return sum(int(b.e.sum()) for b in view.bidders)

        return stat(messages_a), stat(messages_b)

    pairs = run_trials(one, trials, master_seed)
    sa = [p[0] for p in pairs]
    sb = [p[1] for p in pairs]
    advantage = _best_threshold_advantage(sa, sb) if trials else 0.0
    return ProbeReport(certified, advantage, math.sqrt(0.25 / trials) if trials else 0.0,
                       trials)


# --- broadcast variant ---------------------------------------------------


@dataclass(frozen=True)
class BroadcastView:
    """Per-verifier outputs and tags; challenge set, extractor, pad shared."""

    ys: tuple
    gs: tuple
    ts: tuple
    s: np.ndarray
    f: LinearHash | None
    e: np.ndarray

    def free_positions(self, n):
        return np.setdiff1d(np.arange(n), self.s)


def broadcast_rate(bc: BroadcastChannel, p: Pmf, params: ProtocolParams) -> int:
    """Largest message length fitting the weakest verifier's budget."""
    nbar = params.n - params.challenge_len
    if nbar < 1:
        raise ValueError("challenge set exhausts the block")
    s = params.security
    h_min = min(conditional_entropy(joint_with_output(bc.marginal(b), p))
                for b in range(bc.num_verifiers))
    defect = smoothing_defect(nbar, bc.input_size, 1, 2.0 ** (-s))
    budget = nbar * (h_min - defect) - 2 * s
    rate = max(0, math.floor(budget))
    if rate == 0:
        warnings.warn("broadcast rate budget is below one bit at these parameters",
                      stacklevel=2)
    return rate


def commit_broadcast(bc: BroadcastChannel, p: Pmf, params: ProtocolParams,
                     rng, message=None):
    """Commit toward every verifier at once; returns (state, view).

    One sequence and one challenge set serve all verifiers; each verifier
    holds its own output and its own challenge tag.
    """
    if len(p) != bc.input_size:
        raise ValueError("input distribution does not match the channel")
    rate = broadcast_rate(bc, p, params)
    n, B = params.n, bc.num_verifiers
    x_rng, ch_rng, ver_rng, msg_rng, bidder_rng = rng.spawn(5)
    if message is None:
        message = msg_rng.integers(0, 2, size=rate, dtype=np.uint8)
    message = np.ascontiguousarray(message, dtype=np.uint8)
    if message.shape != (rate,):
        raise ValueError(f"message length {message.size} does not match rate {rate}")

    x = sample_from_pmf(p, n, x_rng)
    y_flat = sample_outputs(bc.flat, x, ch_rng)
    ys = tuple(np.asarray(y) for y in bc.split_output(y_flat))

    codec = SymbolCodec(bc.input_size)
    c_len, t_len = params.challenge_len, params.tag_len
    gs = tuple(LinearHash.draw(c_len * codec.width, t_len, ver_rng) for _ in range(B))
    s = np.sort(bidder_rng.permutation(n)[:c_len])
    challenge_bits = codec.encode(x[s])
    ts = tuple(g(challenge_bits) for g in gs)
    free = np.setdiff1d(np.arange(n), s)
    xbar_bits = codec.encode(x[free])
    if rate > 0:
        f = LinearHash.draw(xbar_bits.size, rate, bidder_rng)
        e = xor_bits(message, f(xbar_bits))
    else:
        f, e = None, np.zeros(0, dtype=np.uint8)
    state = BidderState(message, x, s, f)
    return state, BroadcastView(ys, gs, ts, s, f, e)


def reveal_broadcast(bc: BroadcastChannel, p: Pmf, params: ProtocolParams,
                     view: BroadcastView, sequence, message, b_star,
                     available=None) -> RevealDecision:
    """Verdict of the chosen verifier b_star on a claimed reveal.

    available lists the verifiers still reachable; b_star must be one of
    them. Only b_star's output and tag are consulted, so any surviving
    verifier adjudicates alone.
    """
    B = bc.num_verifiers
    if available is None:
        available = range(B)
    available = sorted(set(int(b) for b in available))
    if not available or any(b < 0 or b >= B for b in available):
        raise ValueError("available verifiers must be a nonempty subset")
    if b_star not in available:
        raise ValueError(f"verifier {b_star} is not available")
    x = np.asarray(sequence, dtype=np.int64)
    if x.shape != (params.n,):
        raise ValueError("claimed sequence has the wrong length")
    q = joint_with_output(bc.marginal(b_star), p)
    if not jointly_typical(x, view.ys[b_star], q, params.typ_eps()):
        return RevealDecision(False, "typicality")
    codec = SymbolCodec(bc.input_size)
    if not np.array_equal(view.gs[b_star](codec.encode(x[view.s])), view.ts[b_star]):
        return RevealDecision(False, "challenge-hash")
    a = np.ascontiguousarray(message, dtype=np.uint8)
    if view.f is None:
        opened = np.zeros(0, dtype=np.uint8)
    else:
        opened = xor_bits(view.e, view.f(codec.encode(x[view.free_positions(params.n)])))
    if a.shape != opened.shape or not np.array_equal(a, opened):
        return RevealDecision(False, "message-pad")
    return RevealDecision(True)


# --- transcript files ----------------------------------------------------


def transcript_json(m: MacChannel, params: ProtocolParams, view: VerifierView) -> str:
    """Canonical JSON for a verifier view; byte-stable for equal inputs."""
    out_codec = SymbolCodec(m.output_size) if m.output_size > 1 else None
    doc = {
        "schema": TRANSCRIPT_SCHEMA,
        "n": params.n,
        "mu": params.mu,
        "eta_hash": params.eta_hash,
        "eps": params.typ_eps(),
        "security": params.security,
        "input_sizes": list(m.input_sizes),
        "output_size": m.output_size,
        "y": bits_to_hex(out_codec.encode(view.y)) if out_codec else "",
        "bidders": [],
    }
    for b in view.bidders:
        doc["bidders"].append({
            "g_seed": b.g.seed_hex(),
            "tag_bits": int(b.t.size),
            "s": [int(v) for v in b.s],
            "t": bits_to_hex(b.t),
            "rate": 0 if b.f is None else int(b.f.output_bits),
            "f_seed": None if b.f is None else b.f.seed_hex(),
            "e": bits_to_hex(b.e),
        })
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def parse_transcript(text):
    """Rebuild (params, input_sizes, view) from transcript JSON."""
    doc = json.loads(text)
    if doc.get("schema") != TRANSCRIPT_SCHEMA:
        raise ValueError(f"unsupported transcript schema {doc.get('schema')!r}")
    params = ProtocolParams(n=doc["n"], mu=doc["mu"], eta_hash=doc["eta_hash"],
                            eps=doc["eps"], security=doc["security"])
    input_sizes = tuple(doc["input_sizes"])
    out_size = doc["output_size"]
    out_codec = SymbolCodec(out_size) if out_size > 1 else None
    if out_codec:
        y = out_codec.decode(hex_to_bits(doc["y"], params.n * out_codec.width))
    else:
        y = np.zeros(params.n, dtype=np.int64)
    # free positions depend on every bidder's challenge set
    all_s = [np.asarray(b["s"], dtype=np.int64) for b in doc["bidders"]]
    union = all_s[0]
    for s in all_s[1:]:
        union = np.union1d(union, s)
    free_count = params.n - union.size
    publics = []
    for i, b in enumerate(doc["bidders"]):
        codec = SymbolCodec(input_sizes[i])
        g = LinearHash.from_seed_hex(params.challenge_len * codec.width,
                                     b["tag_bits"], b["g_seed"])
        t = hex_to_bits(b["t"], b["tag_bits"])
        rate = b["rate"]
        if rate:
            f = LinearHash.from_seed_hex(free_count * codec.width, rate, b["f_seed"])
            e = hex_to_bits(b["e"], rate)
        else:
            f, e = None, np.zeros(0, dtype=np.uint8)
        publics.append(BidderPublic(g, all_s[i], t, f, e))
    return params, input_sizes, VerifierView(y, tuple(publics))
