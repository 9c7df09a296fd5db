"""CSV reports and the figures rendered alongside them.

Output files are byte-stable: floats print with 15 significant digits,
rows keep a fixed column order, and the resolved configuration plus the
package version are embedded as leading comment lines. Figures land next
to the delimited file with the same stem and a .png suffix; matplotlib
runs on the Agg backend so no display is needed.
"""

from __future__ import annotations

import csv
import io

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import __version__

CAPACITY_COLUMNS = ["channel", "mode", "value_bits", "region_kind",
                    "argmax", "region_bounds", "warning"]
SIMULATE_COLUMNS = ["trial", "accepted", "attack_success", "conceal_stat",
                    "acceptance_rate", "acceptance_lo", "acceptance_hi",
                    "attack_rate", "attack_lo", "attack_hi"]
CHECK_COLUMNS = ["channel", "non_redundant", "margin", "injective_sufficient",
                 "witness_input", "witness_mix"]


def fmt(value) -> str:
    """Canonical text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def fmt_probs(probs) -> str:
    probs = getattr(probs, "probs", probs)
    return ";".join(f"{p:.15g}" for p in np.asarray(probs, dtype=float))


def render_csv(columns, rows, config) -> str:
    """Comment header with config and version, then the delimited table."""
    buf = io.StringIO()
    buf.write(f"# noisycommit {__version__}\n")
    for key in sorted(config):
        buf.write(f"# config: {key}={fmt(config[key])}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def figure_path(out_path):
    base = str(out_path)
    stem = base[:-4] if base.endswith(".csv") else base
    return stem + ".png"


def render_capacity_figure(path, mode, value, set_values=None, per_verifier=None):
    """Rate-region polygon for two users, bar chart otherwise."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    if set_values is not None and len(set_values) == 3:
        f1 = set_values[frozenset({0})]
        f2 = set_values[frozenset({1})]
        f12 = set_values[frozenset({0, 1})]
        xs = [0, f12 - f2, f1, f1, 0, 0]
        ys = [f2, f2, f12 - f1, 0, 0, f2]
        ax.fill(xs, ys, alpha=0.25)
        ax.plot(xs, ys, lw=1.5)
        ax.plot([f12 - f2, f1], [f2, f12 - f1], "o", ms=5)
        ax.set_xlabel("R1 (bits/use)")
        ax.set_ylabel("R2 (bits/use)")
        ax.set_title(f"{mode} region, sum rate {value:.6f} bits")
    elif per_verifier is not None:
        labels = [f"verifier {b + 1}" for b in range(len(per_verifier))]
        ax.bar(labels, per_verifier)
        ax.axhline(value, ls="--", lw=1)
        ax.set_ylabel("H(X|Y_b) at argmax (bits)")
        ax.set_title(f"{mode} rate {value:.6f} bits")
    else:
        ax.bar(["sum rate"], [value])
        ax.set_ylabel("bits/use")
        ax.set_title(f"{mode} sum rate {value:.6f} bits")
    ax.grid(True, alpha=0.3)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)


def render_simulate_figure(path, accepted, attack_success, conceal_stats):
    """Cumulative acceptance and attack traces plus the statistic histogram."""
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6))
    t = np.arange(1, len(accepted) + 1)
    axes[0].plot(t, np.cumsum(accepted) / t, label="honest acceptance")
    if attack_success is not None:
        axes[0].plot(t, np.cumsum(attack_success) / t, label="attack success")
    axes[0].set_xlabel("trial")
    axes[0].set_ylabel("running rate")
    axes[0].set_ylim(-0.05, 1.05)
    axes[0].legend(loc="center right", fontsize=8)
    axes[0].grid(True, alpha=0.3)
    stats = np.asarray(conceal_stats, dtype=float)
    bins = min(30, max(5, np.unique(stats).size))
    axes[1].hist(stats, bins=bins)
    axes[1].set_xlabel("pad weight statistic")
    axes[1].set_ylabel("trials")
    axes[1].grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
