"""Command line interface.

One subcommand per quantity plus report drivers. Values print in nats by
default; ``--log-base 2`` rescales the printed and CSV numbers to bits.
Exit codes: 0 on success, 1 on validation problems (bad files, shapes,
flags), 2 when an optimizer or the self test finishes with failing
diagnostics.

Report commands write CSV (12 significant digits, atomic replace) and, by
default, a PNG figure next to the CSV; ``--no-fig`` suppresses the figure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

import numpy as np

from .additivity import (chi_constrained_additivity_gap,
                         chi_strong_additivity_gap, product_state_gap,
                         purity_additivity_gap, subchannel_min_entropy_gap,
                         superadditivity_gap)
from .core import ValidationError, trace_norm
from .decompositions import transport_ensemble, truncation_sequence
from .duality import duality_check
from .entropy import ensemble_holevo_value
from .eof import BipartiteState, eof
from .io import read_channel, read_hermitian, read_state, write_csv
from .optimize import (OptimizerOptions, OptimizerReport, holevo_chi,
                       convex_closure_output_entropy, min_output_entropy,
                       output_purity)
from .propsuite import run_suite

TOL_OPT = 1e-4


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as validation errors (exit 1)."""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--restarts", type=int, default=None,
                     help="number of random restarts (default 32)")
    sub.add_argument("--max-iters", type=int, default=None,
                     help="iteration cap per restart (default 500)")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for all randomness (default 0)")
    sub.add_argument("--tol", type=float, default=None,
                     help="objective-decrease convergence tolerance")
    sub.add_argument("--max-atoms", type=int, default=None,
                     help="ensemble size cap (default rank squared)")
    sub.add_argument("--log-base", choices=("e", "2"), default="e",
                     help="unit for printed and CSV values (default e, nats)")
    sub.add_argument("--out", default=None, help="write a CSV report here")
    sub.add_argument("--no-fig", action="store_true",
                     help="do not render a figure next to the CSV")
    sub.add_argument("--fig", default=None,
                     help="figure path (default: CSV path with .png)")


def _options(args) -> OptimizerOptions:
    opts = OptimizerOptions(seed=args.seed)
    patch = {}
    if args.restarts is not None:
        patch["restarts"] = args.restarts
    if args.max_iters is not None:
        patch["max_iters"] = args.max_iters
    if args.tol is not None:
        patch["value_tol"] = args.tol
    if args.max_atoms is not None:
        patch["max_atoms"] = args.max_atoms
    return replace(opts, **patch) if patch else opts


def _scale(args) -> float:
    return 1.0 / math.log(2.0) if args.log_base == "2" else 1.0


def _unit(args) -> str:
    return "bits" if args.log_base == "2" else "nats"


def _fig_path(args) -> str | None:
    if args.no_fig or args.out is None:
        return None
    if args.fig is not None:
        return args.fig
    out = args.out
    return (out[:-4] if out.endswith(".csv") else out) + ".png"


def _report_exit(rep: OptimizerReport) -> int:
    if not rep.converged:
        print("warning: optimizer hit the iteration cap without converging",
              file=sys.stderr)
        return 2
    return 0


def _print_value(name: str, value: float, args) -> None:
    print(f"{name} = {value * _scale(args):.6f} ({_unit(args)})")


def _single_value_csv(args, quantity: str, value: float,
                      rep: OptimizerReport | None) -> None:
    if args.out is None:
        return
    s = _scale(args)
    header = ["quantity", "value", "log_base", "seed", "restarts_used",
              "iterations", "gradient_norm", "converged"]
    if rep is None:
        row = [quantity, value * s, args.log_base, args.seed, 0, 0, 0.0, True]
    else:
        row = [quantity, value * s, args.log_base, args.seed,
               rep.restarts_used, rep.iterations, rep.gradient_norm_at_exit,
               rep.converged]
    write_csv(args.out, header, [row])


# ---------------------------------------------------------------------------
# handlers


def _cmd_chi(args) -> int:
    chan = read_channel(args.channel)
    state = read_state(args.state)
    rep = holevo_chi(chan, state, _options(args))
    _print_value("chi", rep.value, args)
    _single_value_csv(args, "chi", rep.value, rep)
    return _report_exit(rep)


def _cmd_hhat(args) -> int:
    chan = read_channel(args.channel)
    state = read_state(args.state)
    rep = convex_closure_output_entropy(chan, state, _options(args))
    _print_value("hhat", rep.value, args)
    _single_value_csv(args, "hhat", rep.value, rep)
    return _report_exit(rep)


def _cmd_nu(args) -> int:
    chan = read_channel(args.channel)
    obs = read_hermitian(args.obs)
    rep = output_purity(chan, obs, _options(args))
    _print_value("nu", rep.value, args)
    _single_value_csv(args, "nu", rep.value, rep)
    return _report_exit(rep)


def _cmd_minent(args) -> int:
    chan = read_channel(args.channel)
    rep = min_output_entropy(chan, _options(args))
    _print_value("minent", rep.value, args)
    _single_value_csv(args, "minent", rep.value, rep)
    return _report_exit(rep)


def _cmd_fenchel_check(args) -> int:
    chan = read_channel(args.channel)
    state = read_state(args.state)
    rep = duality_check(chan, state, _options(args))
    s = _scale(args)
    _print_value("hhat", rep.hhat_value, args)
    _print_value("double transform", rep.hstarstar_value, args)
    _print_value("gap", rep.gap, args)
    if args.out is not None:
        write_csv(args.out,
                  ["hhat", "double_transform", "gap", "log_base",
                   "ascent_iterations", "ball_expansions", "weak_duality_ok"],
                  [[rep.hhat_value * s, rep.hstarstar_value * s, rep.gap * s,
                    args.log_base, rep.iterations, rep.ball_expansions,
                    rep.weak_duality_ok]])
    if not rep.weak_duality_ok:
        print("warning: weak duality violated beyond tolerance", file=sys.stderr)
        return 2
    return 0


def _coordinate_isometry(dim: int, subdim: int) -> np.ndarray:
    if not 1 <= subdim <= dim:
        raise ValidationError(f"subspace dimension {subdim} outside 1..{dim}")
    return np.eye(dim, subdim, dtype=complex)


def _cmd_additivity(args) -> int:
    chan_a = read_channel(args.channel_a)
    chan_b = read_channel(args.channel_b)
    opts = _options(args)
    statement = args.statement
    if statement == "i":
        if args.state is None:
            raise ValidationError("statement i needs --state (joint input)")
        rep = superadditivity_gap(chan_a, chan_b, read_state(args.state), opts)
    elif statement == "ii":
        if args.obs_a is None or args.obs_b is None:
            raise ValidationError("statement ii needs --obs-a and --obs-b")
        rep = purity_additivity_gap(chan_a, chan_b,
                                    read_hermitian(args.obs_a),
                                    read_hermitian(args.obs_b), opts)
    elif statement in ("iii", "iv") and args.obs_a is None:
        if args.state_a is None or args.state_b is None:
            raise ValidationError(
                f"statement {statement} needs --state-a and --state-b")
        fn = product_state_gap if statement == "iii" else chi_strong_additivity_gap
        rep = fn(chan_a, chan_b, read_state(args.state_a),
                 read_state(args.state_b), opts)
    elif statement == "iv":
        if None in (args.obs_a, args.obs_b, args.bound_a, args.bound_b):
            raise ValidationError(
                "statement iv budget mode needs --obs-a --obs-b "
                "--bound-a --bound-b")
        rep = chi_constrained_additivity_gap(
            chan_a, chan_b, read_hermitian(args.obs_a), args.bound_a,
            read_hermitian(args.obs_b), args.bound_b, opts)
    elif statement == "v":
        iso_a = (_coordinate_isometry(chan_a.dim_in, args.subdim_a)
                 if args.subdim_a is not None else None)
        iso_b = (_coordinate_isometry(chan_b.dim_in, args.subdim_b)
                 if args.subdim_b is not None else None)
        rep = subchannel_min_entropy_gap(chan_a, chan_b, iso_a, iso_b, opts)
    else:
        raise ValidationError(
            f"statement {statement} does not take observables")
    s = _scale(args)
    print(f"statement {rep.statement_id}: {rep.description}")
    _print_value("lhs", rep.lhs, args)
    _print_value("rhs", rep.rhs, args)
    _print_value("gap", rep.gap, args)
    if args.out is not None:
        write_csv(args.out,
                  ["statement", "lhs", "rhs", "gap", "log_base"],
                  [[rep.statement_id, rep.lhs * s, rep.rhs * s, rep.gap * s,
                    args.log_base]])
    return 0


def _parse_dims(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValidationError(f"--dims must look like 2x2, got {text!r}")
    try:
        da, db = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ValidationError(f"bad --dims {text!r}: {exc}") from exc
    if da < 1 or db < 1:
        raise ValidationError("--dims factors must be positive")
    return da, db


def _cmd_eof(args) -> int:
    da, db = _parse_dims(args.dims)
    state = read_state(args.state)
    omega = BipartiteState(da, db, state)
    rep = eof(omega, _options(args))
    _print_value("eof", rep.value, args)
    _single_value_csv(args, "eof", rep.value, rep)
    return _report_exit(rep)


def _cmd_truncation_sweep(args) -> int:
    chan = read_channel(args.channel)
    state = read_state(args.state)
    opts = _options(args)
    levels = truncation_sequence(state)
    raw = []
    for n, rho_n, lam in levels:
        chi_rep = holevo_chi(chan, rho_n, opts)
        raw.append((n, lam, chi_rep.value,
                    chi_rep.diagnostics["avg_output_entropy"]))
    chi_full = raw[-1][2]
    s = _scale(args)
    rows = []
    for n, lam, chi_n, hhat_n in raw:
        bound_ok = lam * chi_n <= chi_full + TOL_OPT
        rows.append((n, lam, chi_n * s, hhat_n * s, bound_ok))
    print(f"levels: {len(rows)}, full chi = {chi_full * _scale(args):.6f} "
          f"({_unit(args)})")
    violations = [r[0] for r in rows if not r[4]]
    if violations:
        print(f"warning: weighted chi exceeds the full value at n = "
              f"{violations}", file=sys.stderr)
    if args.out is not None:
        write_csv(args.out, ["n", "lambda_n", "chi_n", "hhat_n", "bound_ok"],
                  rows)
        fig = _fig_path(args)
        if fig is not None:
            from .plots import render_truncation_sweep
            render_truncation_sweep(rows, fig)
    return 0


def _cmd_tracking(args) -> int:
    chan = read_channel(args.channel)
    state = read_state(args.state)
    opts = _options(args)
    rows = []
    prev = None
    trend_violated = False
    for n, rho_n, lam in truncation_sequence(state):
        chi_rep = holevo_chi(chan, rho_n, opts)
        cert = chi_rep.certificate
        distance = trace_norm(rho_n.mat - state.mat)
        lifted = transport_ensemble(cert, state)
        achieved = ensemble_holevo_value(chan, lifted)
        trend_ok = prev is None or achieved >= prev - TOL_OPT
        trend_violated = trend_violated or not trend_ok
        prev = achieved
        s = _scale(args)
        rows.append((n, lam, len(cert), distance, achieved * s,
                     chi_rep.value * s, trend_ok))
    print(f"levels: {len(rows)}, final achieved value = {rows[-1][4]:.6f} "
          f"({_unit(args)})")
    if trend_violated:
        print("warning: achieved values are not monotone within tolerance",
              file=sys.stderr)
    if args.out is not None:
        write_csv(args.out,
                  ["n", "lambda_n", "atoms", "distance_to_full",
                   "achieved_vs_full", "chi_n", "trend_ok"], rows)
        fig = _fig_path(args)
        if fig is not None:
            from .plots import render_tracking
            render_tracking(rows, fig)
    return 0


def _cmd_selftest(args) -> int:
    def progress(result):
        print(f"  {result.name}: {result.status} "
              f"(worst breach {result.worst_breach:.3e}, "
              f"tolerance {result.tolerance:.1e})")

    print(f"running property suite with seed {args.seed}")
    report = run_suite(seed=args.seed, trials=args.trials, progress=progress)
    print()
    print(report.format_table())
    print(f"\ntotal: {report.warnings} warnings, {report.failures} failures")
    if args.out is not None:
        write_csv(args.out,
                  ["case", "trials", "tolerance", "warnings", "failures",
                   "worst_breach", "worst_trial", "status"],
                  report.rows())
        fig = _fig_path(args)
        if fig is not None:
            from .plots import render_suite
            render_suite(report, fig)
    return 2 if report.failures else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entropics",
                     description="Entropic quantities of quantum channels")
    subs = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text, **files):
        sub = subs.add_parser(name, help=help_text)
        for flag, (required, desc) in files.items():
            sub.add_argument(flag, required=required, help=desc)
        _add_common(sub)
        sub.set_defaults(handler=handler)
        return sub

    add("chi", _cmd_chi, "Holevo chi at a fixed average state",
        **{"--channel": (True, "channel file (.chan)"),
           "--state": (True, "state file (.state)")})
    add("hhat", _cmd_hhat, "convex closure of the output entropy",
        **{"--channel": (True, "channel file (.chan)"),
           "--state": (True, "state file (.state)")})
    add("nu", _cmd_nu, "output purity at an input observable",
        **{"--channel": (True, "channel file (.chan)"),
           "--obs": (True, "observable file (.herm)")})
    add("minent", _cmd_minent, "minimal output entropy",
        **{"--channel": (True, "channel file (.chan)")})
    add("fenchel-check", _cmd_fenchel_check,
        "compare the decomposition value with the double Fenchel transform",
        **{"--channel": (True, "channel file (.chan)"),
           "--state": (True, "state file (.state)")})

    addi = subs.add_parser("additivity",
                           help="evaluate one additivity statement (i..v)")
    addi.add_argument("--statement", required=True,
                      choices=("i", "ii", "iii", "iv", "v"))
    addi.add_argument("--channel-a", required=True)
    addi.add_argument("--channel-b", required=True)
    addi.add_argument("--state", help="joint input state (statement i)")
    addi.add_argument("--state-a", help="first factor state (iii, iv)")
    addi.add_argument("--state-b", help="second factor state (iii, iv)")
    addi.add_argument("--obs-a", help="first observable (ii; iv budget mode)")
    addi.add_argument("--obs-b", help="second observable (ii; iv budget mode)")
    addi.add_argument("--bound-a", type=float,
                      help="first output budget (iv budget mode)")
    addi.add_argument("--bound-b", type=float,
                      help="second output budget (iv budget mode)")
    addi.add_argument("--subdim-a", type=int,
                      help="restrict the first channel to the leading "
                           "coordinate subspace of this dimension (v)")
    addi.add_argument("--subdim-b", type=int,
                      help="restrict the second channel likewise (v)")
    _add_common(addi)
    addi.set_defaults(handler=_cmd_additivity)

    sub_eof = add("eof", _cmd_eof, "entanglement of formation",
                  **{"--state": (True, "bipartite state file (.state)")})
    sub_eof.add_argument("--dims", required=True,
                         help="tensor split, for example 2x2")

    add("truncation-sweep", _cmd_truncation_sweep,
        "chi across all spectral truncations of a state",
        **{"--channel": (True, "channel file (.chan)"),
           "--state": (True, "state file (.state)")})
    add("corollary4-track", _cmd_tracking,
        "transport truncation certificates to the full state and track them",
        **{"--channel": (True, "channel file (.chan)"),
           "--state": (True, "state file (.state)")})

    selftest = subs.add_parser("selftest", help="run the property suite")
    selftest.add_argument("--trials", type=int, default=None,
                          help="override the per-case trial counts")
    _add_common(selftest)
    selftest.set_defaults(handler=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
