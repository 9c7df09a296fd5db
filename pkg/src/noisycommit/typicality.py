"""Strong typicality tests on symbol sequences.

Joint typicality compares every cell of the empirical joint type against
a reference distribution q: |freq(x, y) - q(x, y)| <= eps, and cells with
q(x, y) = 0 must be unvisited. Conditional typicality replaces the
reference with W(y|x) * freq(x). Comparisons run on exact rationals when
the reference is given in fractions, so boundary ties are unambiguous;
float references use plain <= on doubles.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .channel import Dmc
from .infotheory import JointPmf

# Default tolerance schedule eps(n) = EPS_COEFF * n^(-1/3), calibrated so
# honest runs at the shipped protocol sizes stay typical in >= 99% of
# trials while an independently resampled sequence is rejected.
EPS_COEFF = 0.5


def default_eps(n) -> float:
    if n < 1:
        raise ValueError("n must be positive")
    return EPS_COEFF * float(n) ** (-1.0 / 3.0)


def empirical_joint(x_seq, y_seq, x_size, y_size):
    """Cell counts of the pair sequence as an (x_size, y_size) int grid."""
    x_seq = np.asarray(x_seq, dtype=np.int64)
    y_seq = np.asarray(y_seq, dtype=np.int64)
    if x_seq.shape != y_seq.shape or x_seq.ndim != 1:
        raise ValueError("sequences must be 1-D and equally long")
    if x_seq.size == 0:
        raise ValueError("sequences must be nonempty")
    if x_seq.min() < 0 or x_seq.max() >= x_size:
        raise ValueError("x symbol out of range")
    if y_seq.min() < 0 or y_seq.max() >= y_size:
        raise ValueError("y symbol out of range")
    flat = x_seq * y_size + y_seq
    counts = np.bincount(flat, minlength=x_size * y_size)
    return counts.reshape(x_size, y_size)


def _is_fraction_grid(ref):
    return isinstance(ref, (list, tuple)) or (
        isinstance(ref, np.ndarray) and ref.dtype == object)


def _exact_cells_ok(counts, ref_rows, bound_rows, n, eps):
    """Exact comparison |count/n - ref| <= eps with Fraction arithmetic."""
    eps = Fraction(eps) if not isinstance(eps, Fraction) else eps
    for i, row in enumerate(ref_rows):
        for j, ref in enumerate(row):
            bound = bound_rows[i][j] if bound_rows is not None else ref
            if bound == 0:
                if counts[i, j] != 0:
                    return False
                continue
            if abs(Fraction(int(counts[i, j]), n) - ref) > eps:
                return False
    return True


def jointly_typical(x_seq, y_seq, q, eps) -> bool:
    """True when the empirical joint of (x_seq, y_seq) is eps-close to q.

    q is a JointPmf or a grid of Fractions; the fraction form switches the
    comparison to exact arithmetic.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if _is_fraction_grid(q):
        rows = [list(r) for r in q]
        counts = empirical_joint(x_seq, y_seq, len(rows), len(rows[0]))
        return _exact_cells_ok(counts, rows, None, int(counts.sum()), eps)
    if not isinstance(q, JointPmf):
        raise TypeError("q must be a JointPmf or a grid of Fractions")
    counts = empirical_joint(x_seq, y_seq, *q.probs.shape)
    n = counts.sum()
    freq = counts / n
    if np.any(counts[q.probs == 0] > 0):
        return False
    return bool(np.all(np.abs(freq - q.probs) <= float(eps)))


def conditionally_typical(y_seq, x_seq, w: Dmc, eps) -> bool:
    """True when for every cell |freq(x, y) - W(y|x) freq(x)| <= eps.

    Cells with W(y|x) = 0 must be unvisited. With a rational channel and
    rational eps the test is evaluated exactly.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    counts = empirical_joint(x_seq, y_seq, w.input_size, w.output_size)
    n = int(counts.sum())
    if w.fractions is not None and isinstance(eps, Fraction):
        x_counts = counts.sum(axis=1)
        for i, row in enumerate(w.fractions):
            for j, wij in enumerate(row):
                if wij == 0:
                    if counts[i, j] != 0:
                        return False
                    continue
                if abs(Fraction(int(counts[i, j]), n)
                       - wij * Fraction(int(x_counts[i]), n)) > eps:
                    return False
        return True
    freq = counts / n
    x_freq = freq.sum(axis=1)
    target = w.rows * x_freq[:, None]
    if np.any(counts[w.rows == 0] > 0):
        return False
    return bool(np.all(np.abs(freq - target) <= float(eps)))
