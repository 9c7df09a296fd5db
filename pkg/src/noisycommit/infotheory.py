"""Entropy, distance, and hashing-bound primitives.

All logarithms are base 2; every quantity is in bits. Distributions are
validated on construction: entries must be nonnegative and the total mass
must sit within MASS_TOL of 1 (the constructor renormalizes small float
drift, anything larger is rejected).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import chain, combinations

import numpy as np

# Absolute tolerance for probability-mass validation.
MASS_TOL = 1e-12


def _as_prob_array(values, name):
    arr = np.array(values, dtype=float)
    if arr.size == 0:
        raise ValueError(f"{name} must have at least one entry")
    if np.any(arr < 0):
        raise ValueError(f"{name} has negative entries")
    return arr


class Pmf:
    """Probability mass function on a finite alphabet {0, ..., k-1}."""

    __slots__ = ("probs",)

    def __init__(self, values):
        arr = _as_prob_array(values, "pmf")
        if arr.ndim != 1:
            raise ValueError("pmf must be one-dimensional")
        total = arr.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"pmf mass {total!r} is not 1 within {MASS_TOL}")
        arr = arr / total
        arr.flags.writeable = False
        self.probs = arr

    @classmethod
    def uniform(cls, k):
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point_mass(cls, i, k):
        v = np.zeros(k)
        v[i] = 1.0
        return cls(v)

    def __len__(self):
        return self.probs.size

    def support(self):
        """Indices with strictly positive mass."""
        return np.flatnonzero(self.probs > 0)

    def __repr__(self):
        return f"Pmf({self.probs.tolist()!r})"


class JointPmf:
    """Joint mass function on a product alphabet, stored as a 2-D grid.

    Axis 0 indexes the first variable, axis 1 the second. A subnormalized
    grid (total mass <= 1) is accepted only when flagged; it represents an
    unnormalized restriction of a distribution, as used by the min-entropy
    bound below.
    """

    __slots__ = ("probs", "subnormalized")

    def __init__(self, values, subnormalized=False):
        arr = _as_prob_array(values, "joint pmf")
        if arr.ndim != 2:
            raise ValueError("joint pmf must be two-dimensional")
        total = arr.sum()
        if subnormalized:
            if total > 1.0 + MASS_TOL:
                raise ValueError(f"subnormalized mass {total!r} exceeds 1")
        else:
            if abs(total - 1.0) > MASS_TOL:
                raise ValueError(f"joint mass {total!r} is not 1 within {MASS_TOL}")
            arr = arr / total
        arr.flags.writeable = False
        self.probs = arr
        self.subnormalized = bool(subnormalized)

    @classmethod
    def from_conditional(cls, px: Pmf, rows):
        """Joint (X, Z) built from p_X and a row-stochastic matrix p_{Z|X}."""
        rows = np.asarray(rows, dtype=float)
        return cls(px.probs[:, None] * rows)

    def marginal_x(self) -> Pmf:
        self._require_normalized("marginal_x")
        return Pmf(self.probs.sum(axis=1))

    def marginal_z(self) -> Pmf:
        self._require_normalized("marginal_z")
        return Pmf(self.probs.sum(axis=0))

    def flatten(self) -> Pmf:
        self._require_normalized("flatten")
        return Pmf(self.probs.ravel())

    def _require_normalized(self, op):
        if self.subnormalized:
            raise ValueError(f"{op} is undefined for a subnormalized joint")

    def __repr__(self):
        tag = ", subnormalized=True" if self.subnormalized else ""
        return f"JointPmf({self.probs.tolist()!r}{tag})"


@dataclass(frozen=True)
class RateVector:
    """Per-user bit lengths; subset rates are additive, r_T = sum over T."""

    per_user: tuple

    def __post_init__(self):
        pu = tuple(int(r) for r in self.per_user)
        if any(r < 0 for r in pu):
            raise ValueError("rates must be nonnegative")
        object.__setattr__(self, "per_user", pu)

    @property
    def num_users(self):
        return len(self.per_user)

    def subset_rate(self, subset):
        return sum(self.per_user[i] for i in subset)

    def total(self):
        return sum(self.per_user)

    def as_map(self):
        return {t: self.subset_rate(t) for t in nonempty_subsets(self.num_users)}


def nonempty_subsets(num_users):
    """All nonempty subsets of {0, ..., num_users-1} as frozensets.

    Ordered by size, then lexicographically, so iteration is deterministic.
    """
    users = range(num_users)
    return [frozenset(c) for c in chain.from_iterable(
        combinations(users, k) for k in range(1, num_users + 1))]


def entropy(p: Pmf) -> float:
    """Shannon entropy H(p) in bits, with 0 log 0 = 0."""
    v = p.probs[p.probs > 0]
    return float(-(v * np.log2(v)).sum())


def conditional_entropy(j: JointPmf) -> float:
    """H(X|Z) = H(X,Z) - H(Z) for a normalized joint over (X, Z)."""
    j._require_normalized("conditional_entropy")
    flat = j.probs[j.probs > 0]
    h_xz = float(-(flat * np.log2(flat)).sum())
    z = j.probs.sum(axis=0)
    z = z[z > 0]
    h_z = float(-(z * np.log2(z)).sum())
    return h_xz - h_z


def mutual_information(j: JointPmf) -> float:
    """I(X;Z) = H(X) - H(X|Z), nonnegative up to float error."""
    x = j.probs.sum(axis=1)
    x = x[x > 0]
    return float(-(x * np.log2(x)).sum()) - conditional_entropy(j)


def variational_distance(p: Pmf, q: Pmf) -> float:
    """Total variation distance (1/2) * sum |p - q|; a metric on pmfs."""
    if len(p) != len(q):
        raise ValueError("pmfs must share an alphabet")
    return float(0.5 * np.abs(p.probs - q.probs).sum())


def conditional_min_entropy(w: JointPmf, qz: Pmf) -> float:
    """Conditional min-entropy of X given Z relative to the reference qz.

    Returns -log2 max_{x, z in supp(qz)} w(x, z) / qz(z). The joint w may
    be subnormalized; its Z-marginal must be supported inside supp(qz),
    otherwise the ratio is unbounded and the input is rejected.
    """
    if w.probs.shape[1] != len(qz):
        raise ValueError("Z alphabets differ")
    z_mass = w.probs.sum(axis=0)
    bad = (z_mass > 0) & (qz.probs == 0)
    if np.any(bad):
        raise ValueError(f"w places mass outside supp(qz) at z={np.flatnonzero(bad).tolist()}")
    supp = qz.probs > 0
    ratios = w.probs[:, supp] / qz.probs[supp]
    peak = ratios.max()
    if peak <= 0:
        raise ValueError("w has no mass on supp(qz)")
    return float(-np.log2(peak))


def lhl_bound(rates: RateVector, hmin) -> float:
    """Leftover-hash distance bound sqrt(sum_T 2^(r_T - hmin[T])).

    hmin maps every nonempty subset T of users to a min-entropy value in
    bits; the sum runs over all nonempty T. Values above 1 are returned
    as-is (the bound is then vacuous but still well-defined).
    """
    terms = []
    for t in nonempty_subsets(rates.num_users):
        if t not in hmin:
            raise ValueError(f"hmin missing subset {sorted(t)}")
        terms.append(2.0 ** (rates.subset_rate(t) - hmin[t]))
    return math.sqrt(math.fsum(terms))


def smoothing_defect(nbar, alphabet_size, num_users, eps) -> float:
    """Per-symbol entropy loss log2(|X|+3) * sqrt((2/nbar)(L + log2(1/eps))).

    Converts an i.i.d. conditional entropy into a smoothed min-entropy
    rate: H_min >= nbar * H - nbar * defect, up to a failure mass eps.
    """
    if nbar < 1:
        raise ValueError("nbar must be positive")
    if alphabet_size < 1:
        raise ValueError("alphabet size must be positive")
    if num_users < 1:
        raise ValueError("num_users must be positive")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.log2(alphabet_size + 3) * math.sqrt(
        (2.0 / nbar) * (num_users + math.log2(1.0 / eps)))


def mi_from_distance(v, alphabet_size) -> float:
    """Mutual-information bound v * log2(alphabet_size / v) from a distance v.

    Valid for alphabets of at least 4 letters; v = 0 maps to 0.
    """
    if alphabet_size < 4:
        raise ValueError("bound requires an alphabet of at least 4 letters")
    if not 0 <= v <= 1:
        raise ValueError("distance must lie in [0, 1]")
    if v == 0:
        return 0.0
    # log-domain form: alphabet_size may be a huge exact integer (2^r)
    return float(v * (math.log2(alphabet_size) - math.log2(v)))
