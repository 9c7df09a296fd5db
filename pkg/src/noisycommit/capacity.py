"""Commitment rate regions for multiple-access and broadcast settings.

The achievable region with colluding bidders is the polymatroid
{ R : sum over T of R_l <= H(X_T | Y) for every nonempty T }, so the
machinery here is: evaluate the entropy set function at an input
distribution, verify the polymatroid axioms, enumerate corner points by
the greedy ordering rule, and maximize conditional entropies over input
distributions. H(X|Y) = min over decoders q of E[-log q(X|Y)] is a
pointwise minimum of linear functions of the input law, hence concave,
and projected gradient ascent with restarts finds the global maximum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .channel import BroadcastChannel, Dmc, MacChannel, non_redundancy_check
from .infotheory import JointPmf, Pmf, conditional_entropy, nonempty_subsets

# Two candidate optima within this are considered tied; ties resolve to
# the lexicographically smallest argmax rounded at the same resolution.
VALUE_TIE_TOL = 1e-9


@dataclass(frozen=True)
class InputDistribution:
    """Distribution over the flattened product input alphabet.

    product=True asserts that the joint factorizes across users; the
    constructor checks the factorization against the marginals.
    """

    joint: Pmf
    input_sizes: tuple

    product: bool = False

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.input_sizes)
        object.__setattr__(self, "input_sizes", sizes)
        if len(self.joint) != int(np.prod(sizes)):
            raise ValueError("joint pmf does not match the input sizes")
        if self.product:
            outer = np.ones(1)
            for f in self.factors():
                outer = np.outer(outer, f.probs).ravel()
            if np.max(np.abs(outer - self.joint.probs)) > 1e-12:
                raise ValueError("joint does not factorize across users")

    @classmethod
    def from_marginals(cls, factors):
        outer = np.ones(1)
        for f in factors:
            outer = np.outer(outer, f.probs).ravel()
        return cls(Pmf(outer), tuple(len(f) for f in factors), product=True)

    def grid(self):
        return self.joint.probs.reshape(self.input_sizes)

    def factors(self):
        """Per-user marginal pmfs (user 1 varies slowest in the joint)."""
        g = self.grid()
        out = []
        for axis in range(len(self.input_sizes)):
            other = tuple(a for a in range(g.ndim) if a != axis)
            out.append(Pmf(g.sum(axis=other)))
        return out


@dataclass(frozen=True)
class SetFunction:
    """Real function on subsets of {0, ..., num_users-1} with f(empty) = 0."""

    num_users: int
    values: dict

    def __post_init__(self):
        vals = {frozenset(): 0.0}
        for t in nonempty_subsets(self.num_users):
            if t not in self.values:
                raise ValueError(f"missing subset {sorted(t)}")
            vals[t] = float(self.values[t])
        object.__setattr__(self, "values", vals)

    def __call__(self, subset):
        return self.values[frozenset(subset)]


def joint_with_output(w: Dmc, p: Pmf) -> JointPmf:
    """Joint law of (input, output) under input distribution p."""
    return JointPmf.from_conditional(p, w.rows)


def entropy_set_function(m: MacChannel, dist: InputDistribution) -> SetFunction:
    """T  |->  H(X_T | Y) for the given channel and input distribution."""
    if dist.input_sizes != m.input_sizes:
        raise ValueError("input distribution does not match the channel")
    base = dist.joint.probs[:, None] * m.flat.rows  # (x_1..x_L, y) flattened
    grid = base.reshape(m.input_sizes + (m.output_size,))
    values = {}
    for t in nonempty_subsets(m.num_users):
        drop = tuple(a for a in range(m.num_users) if a not in t)
        j = grid.sum(axis=drop) if drop else grid
        values[t] = conditional_entropy(JointPmf(j.reshape(-1, m.output_size)))
    return SetFunction(m.num_users, values)


@dataclass(frozen=True)
class PolymatroidReport:
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def verify_polymatroid(f: SetFunction, tol=1e-9) -> PolymatroidReport:
    """Check normalization, monotonicity, and submodularity up to tol."""
    subsets = [frozenset()] + nonempty_subsets(f.num_users)
    if abs(f(frozenset())) > tol:
        return PolymatroidReport(False, "f(empty) != 0")
    for s in subsets:
        for t in subsets:
            if s < t and f(s) > f(t) + tol:
                return PolymatroidReport(
                    False, f"monotonicity fails: f({sorted(s)}) > f({sorted(t)})")
    for s in subsets:
        for t in subsets:
            lhs = f(s) + f(t)
            rhs = f(s | t) + f(s & t)
            if lhs < rhs - tol:
                return PolymatroidReport(
                    False, f"submodularity fails at {sorted(s)}, {sorted(t)}")
    return PolymatroidReport(True)


def corner_point(f: SetFunction, perm) -> np.ndarray:
    """Greedy corner of the polymatroid for a user ordering.

    User perm[i] receives f({perm[i], ..., perm[-1]}) - f({perm[i+1], ...}),
    so the coordinates telescope to f(full set).
    """
    perm = tuple(int(i) for i in perm)
    if sorted(perm) != list(range(f.num_users)):
        raise ValueError("perm must order all users")
    report = verify_polymatroid(f)
    if not report:
        raise ValueError(f"not a polymatroid: {report.reason}")
    r = np.zeros(f.num_users)
    for i in range(f.num_users):
        tail = frozenset(perm[i:])
        r[perm[i]] = f(tail) - f(frozenset(perm[i + 1:]))
    return r


def in_region(rates, f: SetFunction, tol=1e-9) -> bool:
    """True when sum over T of rates stays below f(T) for every subset."""
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (f.num_users,):
        raise ValueError("rate vector does not match the user count")
    if np.any(rates < -tol):
        return False
    return all(rates[list(t)].sum() <= f(t) + tol
               for t in nonempty_subsets(f.num_users))


# --- conditional-entropy maximization -----------------------------------


def _conditional_entropy_flat(flat_rows, p):
    j = p[:, None] * flat_rows
    flat = j[j > 0]
    h_xy = -(flat * np.log2(flat)).sum()
    y = j.sum(axis=0)
    y = y[y > 0]
    return h_xy + (y * np.log2(y)).sum()


def _grad_conditional_entropy(flat_rows, p):
    # d/dp(x) H(X|Y) = -log2 p(x) + H(W_x) + sum_y W(y|x) log2 p_Y(y)
    tiny = 1e-300
    y = np.clip(p @ flat_rows, tiny, None)
    row_ent = np.where(flat_rows > 0, flat_rows * np.log2(np.clip(flat_rows, tiny, None)), 0.0).sum(axis=1)
    return -np.log2(np.clip(p, tiny, None)) - row_ent + flat_rows @ np.log2(y)


def _project_simplex(v):
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def _ascend(objective, gradient, p0, max_iter=2000, tol=1e-12):
    """Projected gradient ascent with backtracking; monotone in the objective."""
    p = p0.copy()
    f = objective(p)
    step = 1.0
    for _ in range(max_iter):
        g = gradient(p)
        g = np.clip(g, -1e6, 1e6)
        improved = False
        while step > 1e-18:
            cand = _project_simplex(p + step * g)
            fc = objective(cand)
            if fc > f + tol:
                p, f = cand, fc
                improved = True
                step *= 2.0
                break
            step *= 0.5
        if not improved:
            break
    return p, f


def _lex_key(p):
    return tuple(np.round(p, 9))


def _pick_best(candidates):
    """Highest value; ties within VALUE_TIE_TOL go to the smallest argmax."""
    best_v, best_p = candidates[0]
    for v, p in candidates[1:]:
        if v > best_v + VALUE_TIE_TOL:
            best_v, best_p = v, p
        elif abs(v - best_v) <= VALUE_TIE_TOL and _lex_key(p) < _lex_key(best_p):
            best_v, best_p = v, p
    return best_v, best_p


def _warn_if_redundant(dmc, label):
    report = non_redundancy_check(dmc)
    if not report:
        warnings.warn(f"{label} is redundant (margin {report.margin:.3g}); "
                      "reported rates are not commitment rates", stacklevel=3)
    return report


def sum_rate_capacity(m: MacChannel, mode, restarts=None, seed=0):
    """Maximum of H(X_L | Y), jointly ("colluding") or over products ("product").

    Returns (value, argmax InputDistribution). The colluding problem is
    concave and solved by projected gradient ascent with restarts; the
    product problem alternates concave per-user maximizations and keeps
    the best of many restarts.
    """
    _warn_if_redundant(m.flat, "MAC")
    flat_rows = m.flat.rows
    k = flat_rows.shape[0]
    rng = np.random.default_rng(seed)
    obj = lambda p: _conditional_entropy_flat(flat_rows, p)
    grad = lambda p: _grad_conditional_entropy(flat_rows, p)

    if mode == "colluding":
        restarts = 20 if restarts is None else restarts
        starts = [np.full(k, 1.0 / k)] + [rng.dirichlet(np.ones(k)) for _ in range(restarts - 1)]
        candidates = []
        for p0 in starts:
            p, f = _ascend(obj, grad, p0)
            candidates.append((f, p))
        value, p = _pick_best(candidates)
        return value, InputDistribution(Pmf(p), m.input_sizes)

    if mode == "product":
        restarts = 50 if restarts is None else restarts
        sizes = m.input_sizes
        grid_shape = sizes + (m.output_size,)

        def outer(factors):
            p = np.ones(1)
            for f in factors:
                p = np.outer(p, f).ravel()
            return p

        def user_objective(factors, user):
            others = list(factors)

            def as_joint(pu):
                others[user] = pu
                return outer(others)

            return (lambda pu: obj(as_joint(pu))), as_joint

        candidates = []
        for r in range(restarts):
            factors = ([np.full(s, 1.0 / s) for s in sizes] if r == 0
                       else [rng.dirichlet(np.ones(s)) for s in sizes])
            f_prev = obj(outer(factors))
            for _ in range(200):
                for user in range(m.num_users):
                    uobj, as_joint = user_objective(factors, user)

                    def ugrad(pu, user=user, as_joint=as_joint):
                        g_full = _grad_conditional_entropy(flat_rows, as_joint(pu))
                        # chain rule: sum the flat gradient against the
                        # other users' weights along their axes
                        gg = g_full.reshape(grid_shape[:-1])
                        w = np.ones(1)
                        for uu, fx in enumerate(factors):
                            if uu != user:
                                w = np.multiply.outer(w, fx)
                            else:
                                w = np.multiply.outer(w, np.ones(len(fx)))
                        w = w.reshape(grid_shape[:-1])
                        axes = tuple(a for a in range(len(sizes)) if a != user)
                        return (gg * w).sum(axis=axes)

                    factors[user], _ = _ascend(uobj, ugrad, factors[user])
                f_now = obj(outer(factors))
                if f_now - f_prev < 1e-12:
                    break
                f_prev = f_now
            candidates.append((obj(outer(factors)), outer(factors)))
        value, p = _pick_best(candidates)
        return value, InputDistribution(Pmf(p), m.input_sizes, product=True)

    raise ValueError(f"unknown mode {mode!r}")


def single_user_capacity(w: Dmc, restarts=20, seed=0):
    """max_p H(X|Y) for a point-to-point channel; (value, argmax Pmf)."""
    _warn_if_redundant(w, "channel")
    m = MacChannel([w.input_size], w.rows)
    value, dist = sum_rate_capacity(m, "colluding", restarts=restarts, seed=seed)
    return value, dist.joint


def broadcast_capacity(bc: BroadcastChannel, restarts=20, seed=0):
    """max_p min_b H(X | Y_b); (value, argmax Pmf).

    The objective is a minimum of concave functions; ascent uses the
    averaged gradient of the active minima with backtracking.
    """
    marginals = [bc.marginal(b) for b in range(bc.num_verifiers)]
    for b, w in enumerate(marginals):
        _warn_if_redundant(w, f"marginal channel {b + 1}")
    rows = [w.rows for w in marginals]
    k = bc.input_size
    rng = np.random.default_rng(seed)

    def obj(p):
        return min(_conditional_entropy_flat(r, p) for r in rows)

    def grad(p):
        vals = np.array([_conditional_entropy_flat(r, p) for r in rows])
        active = vals <= vals.min() + 1e-12
        gs = [_grad_conditional_entropy(rows[b], p) for b in range(len(rows)) if active[b]]
        return np.mean(gs, axis=0)

    starts = [np.full(k, 1.0 / k)] + [rng.dirichlet(np.ones(k)) for _ in range(restarts - 1)]
    candidates = []
    for p0 in starts:
        p, f = _ascend(obj, grad, p0)
        candidates.append((f, p))
    value, p = _pick_best(candidates)
    return value, Pmf(p)
