"""Discrete memoryless channels and the non-redundancy check.

A channel is redundant when some input row W_x can be reproduced (or
approached) by mixing the remaining rows; committing over such a channel
fails because a cheater can simulate one input with a blend of others.
The check computes, for every input x,

    margin(x) = min over p with p(x)=0 of || W_x - W o p ||_1

by linear programming, and classifies the channel non-redundant when the
smallest margin clears REDUNDANCY_TOL. Injectivity of p -> W o p is a
cheaper sufficient condition; the two agree for input alphabets of size
at most 3 and can genuinely disagree from size 4 on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .infotheory import MASS_TOL, Pmf

# Margins at or below this are classified redundant (LP noise floor).
REDUNDANCY_TOL = 1e-7
# Singular values above this count toward the float rank.
RANK_TOL = 1e-9


def _validate_rows(rows):
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("channel rows must form a nonempty 2-D matrix")
    if np.any(arr < 0):
        raise ValueError("channel rows have negative entries")
    sums = arr.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > MASS_TOL)
    if bad.size:
        raise ValueError(f"row {bad[0]} mass {sums[bad[0]]!r} is not 1 within {MASS_TOL}")
    arr = arr / sums[:, None]
    arr.flags.writeable = False
    return arr


def _validate_fractions(fracs):
    out = []
    for i, row in enumerate(fracs):
        frow = tuple(Fraction(v) for v in row)
        if any(v < 0 for v in frow):
            raise ValueError(f"row {i} has negative entries")
        if sum(frow) != 1:
            raise ValueError(f"row {i} mass {sum(frow)} is not exactly 1")
        out.append(frow)
    return tuple(out)


class Dmc:
    """Point-to-point channel W: row x holds the output law given input x.

    When built from exact rationals the Fraction grid is kept alongside
    the float matrix; rank computations then run in exact arithmetic and
    file round-trips preserve every numerator and denominator.
    """

    __slots__ = ("rows", "fractions")

    def __init__(self, rows, fractions=None):
        if fractions is not None:
            fractions = _validate_fractions(fractions)
            rows = [[float(v) for v in row] for row in fractions]
        self.rows = _validate_rows(rows)
        self.fractions = fractions

    @property
    def input_size(self):
        return self.rows.shape[0]

    @property
    def output_size(self):
        return self.rows.shape[1]

    def row_pmf(self, x) -> Pmf:
        return Pmf(self.rows[x])

    def __repr__(self):
        return f"Dmc({self.rows.tolist()!r})"


class MacChannel:
    """Multiple-access channel: one output, one input per user.

    Rows are indexed by the flattened input tuple in row-major order with
    user 1's symbol varying slowest.
    """

    __slots__ = ("input_sizes", "flat")

    def __init__(self, input_sizes, rows, fractions=None):
        self.input_sizes = tuple(int(s) for s in input_sizes)
        if any(s < 1 for s in self.input_sizes) or not self.input_sizes:
            raise ValueError("input sizes must be positive")
        self.flat = Dmc(rows, fractions)
        expect = int(np.prod(self.input_sizes))
        if self.flat.input_size != expect:
            raise ValueError(
                f"expected {expect} rows for input sizes {self.input_sizes}, "
                f"got {self.flat.input_size}")

    @property
    def num_users(self):
        return len(self.input_sizes)

    @property
    def output_size(self):
        return self.flat.output_size

    def flatten_inputs(self, per_user_symbols):
        """Row indices for per-user symbol arrays (user 1 slowest)."""
        idx = np.zeros_like(np.asarray(per_user_symbols[0]))
        for size, sym in zip(self.input_sizes, per_user_symbols):
            idx = idx * size + np.asarray(sym)
        return idx

    def __repr__(self):
        return f"MacChannel({self.input_sizes!r}, {self.flat.rows.tolist()!r})"


class BroadcastChannel:
    """Broadcast channel: one input, a joint law over per-verifier outputs.

    Columns are indexed by the flattened output tuple in row-major order
    with verifier 1's symbol varying slowest.
    """

    __slots__ = ("output_sizes", "flat")

    def __init__(self, output_sizes, rows, fractions=None):
        self.output_sizes = tuple(int(s) for s in output_sizes)
        if any(s < 1 for s in self.output_sizes) or not self.output_sizes:
            raise ValueError("output sizes must be positive")
        self.flat = Dmc(rows, fractions)
        expect = int(np.prod(self.output_sizes))
        if self.flat.output_size != expect:
            raise ValueError(
                f"expected {expect} columns for output sizes {self.output_sizes}, "
                f"got {self.flat.output_size}")

    @property
    def input_size(self):
        return self.flat.input_size

    @property
    def num_verifiers(self):
        return len(self.output_sizes)

    def marginal(self, b) -> Dmc:
        """Channel seen by verifier b alone, marginalizing the other outputs."""
        grid = self.flat.rows.reshape((self.input_size,) + self.output_sizes)
        axes = tuple(1 + i for i in range(self.num_verifiers) if i != b)
        return Dmc(grid.sum(axis=axes))

    def split_output(self, flat_symbols):
        """Per-verifier symbol arrays from flattened output indices."""
        out = []
        rem = np.asarray(flat_symbols)
        for size in reversed(self.output_sizes):
            out.append(rem % size)
            rem = rem // size
        return list(reversed(out))

    def __repr__(self):
        return f"BroadcastChannel({self.output_sizes!r}, {self.flat.rows.tolist()!r})"


def push_forward(w: Dmc, p: Pmf) -> Pmf:
    """Output law W o p = sum_x p(x) W_x induced by input distribution p."""
    if len(p) != w.input_size:
        raise ValueError("input distribution does not match the channel")
    return Pmf(p.probs @ w.rows)


def sample_outputs(w: Dmc, xs, rng) -> np.ndarray:
    """One output symbol per input symbol, i.i.d. given the inputs.

    Inverse-CDF sampling on each row keeps the draw reproducible for a
    fixed generator state.
    """
    xs = np.asarray(xs)
    if xs.size and (xs.min() < 0 or xs.max() >= w.input_size):
        raise ValueError("input symbol out of range")
    cdf = np.cumsum(w.rows, axis=1)[xs]
    u = rng.random(xs.shape[0])
    return (u[:, None] > cdf).sum(axis=1).astype(np.int64)


def sample_from_pmf(p: Pmf, n, rng) -> np.ndarray:
    """n i.i.d. draws from p by inverse CDF."""
    cdf = np.cumsum(p.probs)
    u = rng.random(n)
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def _exact_rank(matrix):
    """Row rank over the rationals by fraction-exact Gaussian elimination."""
    m = [list(row) for row in matrix]
    rows, cols = len(m), len(m[0])
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r][c] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][c]
        m[rank] = [v * inv for v in m[rank]]
        for r in range(rows):
            if r != rank and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def injectivity_check(w: Dmc) -> bool:
    """True when p -> W o p is injective on the simplex.

    Mixtures collide exactly when some nonzero sum-zero vector lies in
    the left null space of the row matrix, so injectivity is equivalent
    to the matrix augmented with an all-ones column having full row rank.
    Rational inputs are ranked exactly; floats fall back to SVD.
    """
    if w.fractions is not None:
        aug = [list(row) + [Fraction(1)] for row in w.fractions]
        return _exact_rank(aug) == w.input_size
    aug = np.hstack([w.rows, np.ones((w.input_size, 1))])
    return int(np.linalg.matrix_rank(aug, tol=RANK_TOL)) == w.input_size


@dataclass(frozen=True)
class RedundancyReport:
    """Outcome of the mixture-distance check.

    margin is the smallest L1 distance from any row to the mixtures of
    the remaining rows; witness_input / witness_mix describe the closest
    approach (None for single-input channels, where the check is vacuous).
    """

    non_redundant: bool
    margin: float
    witness_input: int | None
    witness_mix: Pmf | None

    def __bool__(self):
        return self.non_redundant


def _row_distance_lp(target, rest):
    """min over simplex p of ||target - p @ rest||_1 via the epigraph LP."""
    k, m = rest.shape
    if k == 1:
        # One remaining row: the simplex is a single point, no LP needed.
        return float(np.abs(target - rest[0]).sum()), np.ones(1)
    c = np.concatenate([np.zeros(k), np.ones(m)])
    eye = np.eye(m)
    a_ub = np.vstack([
        np.hstack([rest.T, -eye]),       # p @ rest - t <= target
        np.hstack([-rest.T, -eye]),      # -(p @ rest) - t <= -target
    ])
    b_ub = np.concatenate([target, -target])
    a_eq = np.concatenate([np.ones(k), np.zeros(m)])[None, :]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * (k + m), method="highs",
                  options={"primal_feasibility_tolerance": 1e-9,
                           "dual_feasibility_tolerance": 1e-9})
    if not res.success:
        raise RuntimeError(f"mixture-distance LP failed: {res.message}")
    return float(res.fun), res.x[:k]


def non_redundancy_check(w: Dmc) -> RedundancyReport:
    """Classify w by the worst-case row-to-mixture L1 margin.

    Non-redundant means every row stays at least REDUNDANCY_TOL away in
    L1 from the mixtures of the other rows.
    """
    k = w.input_size
    if k == 1:
        return RedundancyReport(True, float("inf"), None, None)
    best = None
    for x in range(k):
        rest = np.delete(w.rows, x, axis=0)
        dist, mix = _row_distance_lp(w.rows[x], rest)
        if best is None or dist < best[0]:
            best = (dist, x, mix)
    margin, x, mix = best
    full_mix = np.insert(np.clip(mix, 0, None), x, 0.0)
    full_mix = full_mix / full_mix.sum()
    return RedundancyReport(margin > REDUNDANCY_TOL, margin, x, Pmf(full_mix))


def small_alphabet_equivalence(w: Dmc):
    """Check that injectivity and the mixture margin agree; |X| <= 3 only.

    For input alphabets of at most three letters the two classifications
    coincide, so a disagreement indicates a numerical artifact and is
    raised rather than returned.
    """
    if w.input_size > 3:
        raise ValueError("equivalence holds only for input alphabets of size <= 3")
    inj = injectivity_check(w)
    report = non_redundancy_check(w)
    if inj != report.non_redundant:
        raise AssertionError(
            f"injectivity ({inj}) and margin {report.margin!r} disagree "
            "on a small alphabet")
    return inj


def mac_non_redundancy(m: MacChannel) -> RedundancyReport:
    """Non-redundancy of the flattened product-alphabet channel."""
    return non_redundancy_check(m.flat)


# --- channel-spec files -------------------------------------------------
#
# JSON with input_sizes, output_sizes, and rows in row-major order (first
# coordinate slowest). With "exact": true every entry is a "num/den"
# string and reloading reproduces the fractions bit for bit.


def _parse_fraction(text):
    if isinstance(text, str):
        return Fraction(text)
    raise ValueError(f"exact mode requires 'num/den' strings, got {text!r}")


def load_channel(path):
    """Read a channel-spec file; the shape decides the channel type.

    Multiple input sizes give a MacChannel, multiple output sizes a
    BroadcastChannel, one of each a Dmc. Both multiple is unsupported.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    for key in ("input_sizes", "output_sizes", "rows"):
        if key not in doc:
            raise ValueError(f"{path}: missing field {key!r}")
    input_sizes = [int(s) for s in doc["input_sizes"]]
    output_sizes = [int(s) for s in doc["output_sizes"]]
    exact = bool(doc.get("exact", False))
    if exact:
        fractions = [[_parse_fraction(v) for v in row] for row in doc["rows"]]
        rows = None
    else:
        fractions = None
        rows = doc["rows"]
    try:
        if len(input_sizes) > 1 and len(output_sizes) > 1:
            raise ValueError("channels with multiple inputs and multiple outputs "
                             "are not supported")
        if len(input_sizes) > 1:
            return MacChannel(input_sizes, rows, fractions)
        if len(output_sizes) > 1:
            return BroadcastChannel(output_sizes, rows, fractions)
        return Dmc(rows, fractions)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def save_channel(ch, path):
    """Write a channel-spec file; exact channels round-trip bit for bit."""
    if isinstance(ch, MacChannel):
        input_sizes, output_sizes, dmc = list(ch.input_sizes), [ch.output_size], ch.flat
    elif isinstance(ch, BroadcastChannel):
        input_sizes, output_sizes, dmc = [ch.input_size], list(ch.output_sizes), ch.flat
    elif isinstance(ch, Dmc):
        input_sizes, output_sizes, dmc = [ch.input_size], [ch.output_size], ch
    else:
        raise TypeError(f"not a channel: {ch!r}")
    doc = {"input_sizes": input_sizes, "output_sizes": output_sizes}
    if dmc.fractions is not None:
        doc["exact"] = True
        doc["rows"] = [[f"{v.numerator}/{v.denominator}" for v in row]
                       for row in dmc.fractions]
    else:
        doc["rows"] = [[float(v) for v in row] for row in dmc.rows]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
