"""Command line front end.

Three subcommands:

  check     non-redundancy margin and the injectivity sufficient condition
  capacity  commitment rates for a channel file (colluding, product, broadcast)
  simulate  run the protocol end to end with attack and concealment statistics

Exit codes: 0 success (check: channel usable), 1 negative finding
(check: redundant channel), 2 usage or input errors. Reports are CSV with
a commented config header; unless --no-figures is given, a .png with the
same stem is rendered next to each --out file. Reruns with identical
arguments produce byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, report
from .capacity import (broadcast_capacity, entropy_set_function,
                       joint_with_output, sum_rate_capacity)
from .channel import (BroadcastChannel, Dmc, MacChannel, injectivity_check,
                      load_channel, non_redundancy_check)
from .infotheory import conditional_entropy, nonempty_subsets
from .montecarlo import run_trials, wilson_interval
from .protocol import (FlipK, ProtocolParams, Resample, _attack_sequence,
                       binding_attack, broadcast_rate, commit_broadcast,
                       commit_mac, honest_claim, reveal_broadcast, reveal_mac,
                       select_rates)

ATTACKS = {
    "resample": Resample(),
    "flip1": FlipK(1, "any"),
    "flip1-challenge": FlipK(1, "challenge"),
    "none": None,
}


class SystemExit2(Exception):
    """Usage or input error; main() turns it into exit code 2."""


def _subset_label(t):
    return "+".join(str(i + 1) for i in sorted(t))


def _load(path):
    try:
        return load_channel(path)
    except OSError as exc:
        raise SystemExit2(f"cannot read channel file: {exc}")
    except ValueError as exc:
        raise SystemExit2(f"bad channel file {path}: {exc}")


def _check_units(channel, path):
    """(label, Dmc) pairs whose non-redundancy the given channel needs."""
    if isinstance(channel, BroadcastChannel):
        return [(f"{path}#b{b + 1}", channel.marginal(b))
                for b in range(channel.num_verifiers)]
    if isinstance(channel, MacChannel):
        return [(path, channel.flat)]
    return [(path, channel)]


def cmd_check(args):
    channel = _load(args.channel)
    rows = []
    all_good = True
    for label, w in _check_units(channel, args.channel):
        rep = non_redundancy_check(w)
        inj = injectivity_check(w)
        all_good = all_good and rep.non_redundant
        print(f"channel: {label}")
        print(f"non-redundant: {'true' if rep.non_redundant else 'false'}")
        print(f"margin: {rep.margin:.15g}")
        print(f"injective-sufficient: {'true' if inj else 'false'}")
        redundant = not rep.non_redundant and rep.witness_input is not None
        if redundant:
            print(f"witness-input: {rep.witness_input}")
            print(f"witness-mix: {report.fmt_probs(rep.witness_mix)}")
        rows.append({
            "channel": label,
            "non_redundant": rep.non_redundant,
            "margin": rep.margin,
            "injective_sufficient": inj,
            "witness_input": rep.witness_input if redundant else None,
            "witness_mix": (report.fmt_probs(rep.witness_mix) if redundant
                            else None),
        })
    if args.out:
        text = report.render_csv(report.CHECK_COLUMNS, rows,
                                 {"channel": args.channel, "command": "check"})
        report.write_text(args.out, text)
    return 0 if all_good else 1


def _as_mac(channel, mode):
    if isinstance(channel, BroadcastChannel):
        raise SystemExit2(f"mode {mode} needs a single-output channel file")
    if isinstance(channel, Dmc):
        return MacChannel([channel.input_size], channel.rows,
                          fractions=channel.fractions)
    return channel


def cmd_capacity(args):
    channel = _load(args.channel)
    warning = None
    rows = []
    if args.mode == "broadcast":
        if not isinstance(channel, BroadcastChannel):
            raise SystemExit2("mode broadcast needs a broadcast channel file")
        for label, w in _check_units(channel, args.channel):
            rep = non_redundancy_check(w)
            if not rep:
                warning = (f"redundant marginal {label} (margin {rep.margin:.3g}); "
                           "value is not a commitment rate")
        value, p = broadcast_capacity(channel, seed=args.seed)
        per_verifier = [conditional_entropy(joint_with_output(channel.marginal(b), p))
                        for b in range(channel.num_verifiers)]
        bounds = ";".join(f"b{b + 1}:{v:.15g}" for b, v in enumerate(per_verifier))
        rows.append({"channel": args.channel, "mode": args.mode,
                     "value_bits": value, "region_kind": "capacity",
                     "argmax": report.fmt_probs(p.probs),
                     "region_bounds": bounds, "warning": warning})
        set_values = None
    else:
        m = _as_mac(channel, args.mode)
        rep = non_redundancy_check(m.flat)
        if not rep:
            warning = (f"redundant channel (margin {rep.margin:.3g}); "
                       "value is not a commitment rate")
        value, dist = sum_rate_capacity(m, args.mode, seed=args.seed)
        f = entropy_set_function(m, dist)
        set_values = {t: f(t) for t in nonempty_subsets(m.num_users)}
        bounds = ";".join(f"{_subset_label(t)}:{set_values[t]:.15g}"
                          for t in nonempty_subsets(m.num_users))
        kind = "capacity" if (m.num_users == 1 or args.mode == "product") else "achievable"
        rows.append({"channel": args.channel, "mode": args.mode,
                     "value_bits": value, "region_kind": kind,
                     "argmax": report.fmt_probs(dist.joint.probs),
                     "region_bounds": bounds, "warning": warning})
        per_verifier = None
    print(f"{args.mode} rate: {value:.15g} bits/use")
    if warning:
        print(f"warning: {warning}", file=sys.stderr)
    if args.out:
        text = report.render_csv(report.CAPACITY_COLUMNS, rows,
                                 {"channel": args.channel, "command": "capacity",
                                  "mode": args.mode, "seed": args.seed})
        report.write_text(args.out, text)
        if not args.no_figures:
            report.render_capacity_figure(
                report.figure_path(args.out), args.mode, value,
                set_values=set_values if args.mode != "broadcast" else None,
                per_verifier=per_verifier)
    return 0


def _simulate_mac(args, channel, params, strategy):
    m = _as_mac(channel, args.mode)
    opt_mode = "colluding" if args.mode == "colluding" else "product"
    _, dist = sum_rate_capacity(m, opt_mode, seed=args.seed)
    rates = select_rates(m, dist, params)
    if strategy is not None and rates.total() == 0:
        raise SystemExit2("zero-rate commitment admits no substitute message; "
                          "raise --n or lower --security")
    commit_mode = "colluding" if args.mode == "colluding" else "non_colluding"
    target = next((u for u, r in enumerate(rates.per_user) if r > 0), 0)

    def one(i, rng):
        c_rng, a_rng = rng.spawn(2)
        states, view = commit_mac(m, dist, params, c_rng, mode=commit_mode)
        xs, msgs = honest_claim(states)
        decisions = reveal_mac(m, dist, params, view, xs, msgs)
        accepted = all(d.accepted for d in decisions)
        stat = sum(int(b.e.sum()) for b in view.bidders)
        if strategy is None:
            return accepted, None, stat
        rep = binding_attack(m, dist, params, states, view, strategy, 1, a_rng,
                             bidder=target)
        return accepted, rep.successes == 1, stat

    per_user = {str(i + 1): r for i, r in enumerate(rates.per_user)}
    return run_trials(one, args.trials, args.seed), per_user


def _simulate_broadcast(args, channel, params, strategy):
    if not isinstance(channel, BroadcastChannel):
        raise SystemExit2("mode broadcast needs a broadcast channel file")
    _, p = broadcast_capacity(channel, seed=args.seed)
    rate = broadcast_rate(channel, p, params)
    if strategy is not None and rate == 0:
        raise SystemExit2("zero-rate commitment admits no substitute message; "
                          "raise --n or lower --security")

    def one(i, rng):
        c_rng, a_rng, b_rng = rng.spawn(3)
        state, view = commit_broadcast(channel, p, params, c_rng)
        b_star = int(b_rng.integers(channel.num_verifiers))
        accepted = reveal_broadcast(channel, p, params, view, state.x,
                                    state.message, b_star).accepted
        stat = int(view.e.sum())
        if strategy is None:
            return accepted, None, stat
        x_tilde = _attack_sequence(strategy, state, view, channel.input_size,
                                   p, params.n, a_rng)
        substitute = state.message.copy()
        substitute[0] ^= 1
        ok = reveal_broadcast(channel, p, params, view, x_tilde, substitute,
                              b_star).accepted
        return accepted, ok, stat

    return run_trials(one, args.trials, args.seed), {"1": rate}


def cmd_simulate(args):
    channel = _load(args.channel)
    try:
        params = ProtocolParams(n=args.n, mu=args.mu, eta_hash=args.eta,
                                eps=args.eps, security=args.security)
    except ValueError as exc:
        raise SystemExit2(str(exc))
    strategy = ATTACKS[args.attack]
    if args.mode == "broadcast":
        results, rates = _simulate_broadcast(args, channel, params, strategy)
    else:
        results, rates = _simulate_mac(args, channel, params, strategy)

    accepted = [r[0] for r in results]
    attacks = [r[1] for r in results]
    stats = [r[2] for r in results]
    rows = []
    for i, (acc, att, st) in enumerate(results):
        rows.append({"trial": i, "accepted": acc, "attack_success": att,
                     "conceal_stat": st})
    if results:
        acc_n = sum(accepted)
        acc_lo, acc_hi = wilson_interval(acc_n, len(results))
        summary = {"trial": "summary", "accepted": None, "attack_success": None,
                   "conceal_stat": None,
                   "acceptance_rate": acc_n / len(results),
                   "acceptance_lo": acc_lo, "acceptance_hi": acc_hi}
        if strategy is not None:
            att_n = sum(attacks)
            att_lo, att_hi = wilson_interval(att_n, len(results))
            summary.update(attack_rate=att_n / len(results),
                           attack_lo=att_lo, attack_hi=att_hi)
        rows.append(summary)
        print(f"acceptance: {acc_n}/{len(results)} "
              f"(95% CI [{acc_lo:.4f}, {acc_hi:.4f}])")
        if strategy is not None:
            print(f"attack success: {att_n}/{len(results)} "
                  f"(95% CI [{att_lo:.4f}, {att_hi:.4f}])")

    config = {"channel": args.channel, "command": "simulate", "mode": args.mode,
              "n": args.n, "mu": args.mu, "eta": args.eta,
              "eps": params.typ_eps(), "security": args.security,
              "trials": args.trials, "seed": args.seed, "attack": args.attack,
              "rates": ";".join(f"{k}:{v}" for k, v in sorted(rates.items()))}
    if args.out:
        text = report.render_csv(report.SIMULATE_COLUMNS, rows, config)
        report.write_text(args.out, text)
        if not args.no_figures and results:
            report.render_simulate_figure(
                report.figure_path(args.out), accepted,
                attacks if strategy is not None else None, stats)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="noisycommit",
        description="commitment over noisy channels: checks, rates, simulation")
    parser.add_argument("--version", action="version",
                        version=f"noisycommit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="non-redundancy and injectivity checks")
    p_check.add_argument("--channel", required=True, help="channel JSON file")
    p_check.add_argument("--out", help="write a CSV report here")
    p_check.set_defaults(func=cmd_check)

    p_cap = sub.add_parser("capacity", help="commitment rates and regions")
    p_cap.add_argument("--channel", required=True, help="channel JSON file")
    p_cap.add_argument("--mode", required=True,
                       choices=["colluding", "product", "broadcast"])
    p_cap.add_argument("--seed", type=int, default=0,
                       help="optimizer restart seed (default 0)")
    p_cap.add_argument("--out", help="write a CSV report here")
    p_cap.add_argument("--no-figures", action="store_true",
                       help="skip the .png next to --out")
    p_cap.set_defaults(func=cmd_capacity)

    p_sim = sub.add_parser("simulate", help="run commit/reveal trials")
    p_sim.add_argument("--channel", required=True, help="channel JSON file")
    p_sim.add_argument("--mode", required=True,
                       choices=["colluding", "product", "broadcast"])
    p_sim.add_argument("--n", type=int, required=True, help="block length")
    p_sim.add_argument("--mu", type=float, default=0.1,
                       help="challenge fraction (default 0.1)")
    p_sim.add_argument("--eta", type=float, default=0.02,
                       help="challenge tag fraction (default 0.02)")
    p_sim.add_argument("--eps", type=float, default=None,
                       help="typicality slack (default 0.5 n^(-1/3))")
    p_sim.add_argument("--security", type=int, default=40,
                       help="security parameter s in bits (default 40)")
    p_sim.add_argument("--trials", type=int, default=100,
                       help="number of protocol runs (default 100)")
    p_sim.add_argument("--seed", type=int, default=0,
                       help="master seed (default 0)")
    p_sim.add_argument("--attack", choices=sorted(ATTACKS), default="resample",
                       help="binding attack per trial (default resample)")
    p_sim.add_argument("--out", help="write a CSV report here")
    p_sim.add_argument("--no-figures", action="store_true",
                       help="skip the .png next to --out")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", None) is not None and args.trials < 0:
        parser.error("--trials must be nonnegative")
    try:
        return args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
