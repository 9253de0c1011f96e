"""Command-line entry point.

Each subcommand writes ``<cmd>.csv`` and a plot-ready ``<cmd>_plot.csv``
(columns x, y, sigma) into ``--out``. Exit status: 0 on success, 1 for usage
or validation errors, 2 for failures while running.
"""

import argparse
import csv
import io
import math
import os
import sys
import warnings
from dataclasses import replace

import numpy as np

from . import __doc__ as _pkg_doc
from .config import ConfigError, load_config, parse_config
from .dynamics import cross_validate_rwa
from .estimation import fit_decay, fit_rabi, points_to_csv, points_to_plot_csv
from .model import SignalParams, SystemParams, contamination_closed_form, gap_closed_form, protection_analysis
from .protocols import (StirapParams, build_stirap_schedule, ramsey_contrast, run_rabi, run_ramsey,
                        stirap_fidelities)
from .scenarios import load_scenarios, run_sensitivity_sweep, shipped_table_text

TWO_PI = 2 * math.pi
COMMANDS = ("rabi", "ramsey", "stirap", "sensitivity", "protection", "validate-rwa")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def _table(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _seed_for(seed, i):
    return np.random.SeedSequence([int(seed), int(i)])


def cmd_rabi(cfg, args):
    T = np.linspace(cfg["rabi_t_start_s"], cfg["rabi_t_stop_s"], cfg["rabi_points"])
    n = cfg["n"]
    rows = []
    for i, t in enumerate(T):
        rec = run_rabi(cfg.system, cfg.signal, cfg.noise, cfg.stirap, float(t), n, _seed_for(cfg.seed, i),
                       T_add=cfg["T_add_s"] if cfg["prepare"] == "stirap" else None,
                       n_traj=cfg["trajectories"], dt=cfg["dt_s"], workers=cfg["workers"],
                       prepare=cfg["prepare"], warn_invalid=False)
        rows.append((t, rec.estimated_population, rec.delta_p, n, rec.p_true, rec.T_add))
    out = {"rabi.csv": _table(("T_s", "P_hat", "delta_p", "n", "P_expected", "T_add_s"), rows),
           "rabi_plot.csv": _table(("x", "y", "sigma"), [(r[0], r[1], r[2]) for r in rows])}
    summary = f"rabi: {len(rows)} points"
    try:
        fit = fit_rabi([(r[0], r[1], r[3]) for r in rows])
        out["rabi_fit.csv"] = _table(
            ("omega_g_hz", "omega_g_std_hz", "contrast_f", "contrast_std", "residual_rms", "converged"),
            [(fit.omega_g_hat / TWO_PI, fit.omega_g_std / TWO_PI, fit.contrast_f, fit.contrast_std,
              fit.residual_rms, int(fit.converged))])
        summary += f"; fitted omega_g = 2pi x {fit.omega_g_hat / TWO_PI:.4f} +- {fit.omega_g_std / TWO_PI:.4f} Hz"
    except ValueError as e:
        summary += f"; no fit ({e})"
    return out, summary


def cmd_ramsey(cfg, args):
    basis = cfg["ramsey_basis"]
    s = replace(cfg.signal, omega_g=TWO_PI * cfg["ramsey_rf_hz"])
    det = TWO_PI * cfg["ramsey_detuning_hz"]
    T = np.linspace(cfg["ramsey_t_start_s"], cfg["ramsey_t_stop_s"], cfg["ramsey_points"])
    n = cfg["n"]
    kw = dict(n_traj=cfg["trajectories"], dt=cfg["dt_s"], workers=cfg["workers"], prepare=cfg["prepare"])
    rows = []
    for i, t in enumerate(T):
        rec = run_ramsey(cfg.system, s, cfg.noise, cfg.stirap, float(t), det, n, _seed_for(cfg.seed, i),
                         basis=basis, **kw)
        c = ramsey_contrast(cfg.system, s, cfg.noise, cfg.stirap, float(t), det, basis, **kw) \
            if cfg["ramsey_contrast"] else float("nan")
        rows.append((t, rec.estimated_population, rec.delta_p, n, rec.p_true, c))
    out = {"ramsey.csv": _table(("T_R_s", "P_hat", "delta_p", "n", "P_expected", "contrast"), rows),
           "ramsey_plot.csv": _table(("x", "y", "sigma"), [(r[0], r[1], r[2]) for r in rows])}
    summary = f"ramsey ({basis}): {len(rows)} points"
    if cfg["ramsey_contrast"]:
        try:
            fit = fit_decay([(r[0], r[5]) for r in rows])
            summary += f"; contrast 1/e time {fit.T2:.4g} s (q={fit.q})"
        except ValueError as e:
            summary += f"; no decay fit ({e})"
    return out, summary


def cmd_stirap(cfg, args):
    freqs = np.linspace(cfg["stirap_omega_min_hz"], cfg["stirap_omega_max_hz"], cfg["stirap_points"])
    rows = []
    for f in freqs:
        sp = StirapParams(float(f), cfg["pulse_rabi_hz"])
        fp, fr = stirap_fidelities(sp, cfg["dt_s"])
        rows.append((f, sp.separation, sp.width, sp.time_increment, fp, fr))
    sp = cfg.stirap
    hold = sp.snap(cfg["stirap_hold_s"])
    sched = build_stirap_schedule(sp, "prepare", hold).then(build_stirap_schedule(sp, "reverse"))
    out = {"stirap.csv": _table(("f_omega_hz", "separation_s", "width_s", "increment_s",
                                 "prep_fidelity", "round_trip"), rows),
           "stirap_plot.csv": _table(("x", "y", "sigma"), [(r[0], r[5], 0.0) for r in rows]),
           "stirap_schedule.txt": sched.to_text()}
    worst = min(r[5] for r in rows)
    return out, f"stirap: {len(rows)} dressing frequencies, worst round trip {worst:.6f}"


def cmd_sensitivity(cfg, args):
    if args.scenarios:
        with open(args.scenarios, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = shipped_table_text()
    try:
        rows = load_scenarios(text)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    res = run_sensitivity_sweep(cfg, rows, workers=cfg["workers"])
    for i, err in res.failures:
        print(f"row {i + 1} failed: {err}", file=sys.stderr)
    if rows and not res.points:
        raise RuntimeError("every scenario row failed")
    out = {"sensitivity.csv": points_to_csv(res.points), "sensitivity_plot.csv": points_to_plot_csv(res.points)}
    return out, f"sensitivity: {len(res.points)} of {len(rows)} rows"


def cmd_protection(cfg, args):
    dmax = cfg["protection_delta_max_hz"]
    rows = []
    for d in np.linspace(-dmax, dmax, cfg["protection_points"]):
        r = protection_analysis(cfg.system, TWO_PI * d)
        rows.append((d, r.b_branch_shift / TWO_PI, abs(r.contamination_u), abs(r.contamination_d),
                     contamination_closed_form(cfg.system.Omega, TWO_PI * d), r.gap / TWO_PI,
                     gap_closed_form(cfg.system.Omega, TWO_PI * d) / TWO_PI))
    out = {"protection.csv": _table(("delta_hz", "b_branch_shift_hz", "contamination_u", "contamination_d",
                                     "contamination_closed_form", "gap_hz", "gap_closed_form_hz"), rows),
           "protection_plot.csv": _table(("x", "y", "sigma"), [(r[0], r[2], 0.0) for r in rows])}
    worst = max(abs(r[1]) for r in rows)
    return out, f"protection: {len(rows)} offsets, largest |B-branch shift| {worst:.3g} Hz"


def cmd_validate_rwa(cfg, args):
    lam = TWO_PI * cfg["rwa_lambda_hz"]
    p = SystemParams(omega0=TWO_PI * cfg["rwa_omega0_hz"], lambda_plus=lam, lambda_minus=lam,
                     Omega=TWO_PI * cfg["rwa_omega_hz"])
    s = SignalParams(omega_g=TWO_PI * cfg["rwa_omega_g_hz"], target=cfg["target"])
    dev = cross_validate_rwa(p, s, cfg["rwa_duration_s"], steps_per_period=cfg["rwa_steps_per_period"],
                             max_steps=cfg["rwa_max_steps"])
    row = (cfg["rwa_omega_hz"], cfg["rwa_lambda_hz"], cfg["rwa_omega_g_hz"], cfg["rwa_duration_s"], dev)
    out = {"validate-rwa.csv": _table(("omega_hz", "lambda_hz", "omega_g_hz", "duration_s", "max_deviation"),
                                      [row]),
           "validate-rwa_plot.csv": _table(("x", "y", "sigma"), [(row[0], dev, 0.0)])}
    return out, f"validate-rwa: max population deviation {dev:.3g}"


HANDLERS = {
    "rabi": cmd_rabi,
    "ramsey": cmd_ramsey,
    "stirap": cmd_stirap,
    "sensitivity": cmd_sensitivity,
    "protection": cmd_protection,
    "validate-rwa": cmd_validate_rwa,
}


def build_parser():
    parser = _Parser(prog="dressmag", description=_pkg_doc)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HANDLERS[name].__name__.replace("cmd_", "").replace("_", " "))
        p.add_argument("--config", help="key = value configuration file (Hz and seconds)")
        p.add_argument("--scenarios", help="scenario CSV (sensitivity); defaults to the shipped table")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--out", help="output directory (default: config output_dir)")
        p.add_argument("--trajectories", type=int, help="noise trajectories per ensemble")
        p.add_argument("--dt", type=float, help="maximum propagation step in seconds")
        p.add_argument("--workers", type=int, help="worker threads")
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else parse_config("")
    return cfg.with_overrides(seed=args.seed, trajectories=args.trajectories, dt_s=args.dt,
                              workers=args.workers, output_dir=args.out)


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        cfg = _load(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except (ConfigError, OSError) as e:
        print(f"dressmag: configuration error: {e}", file=sys.stderr)
        return 1

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            files, summary = HANDLERS[args.command](cfg, args)
    except ConfigError as e:
        print(f"dressmag: validation error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        print(f"dressmag: {args.command} failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 2

    try:
        os.makedirs(cfg.output_path, exist_ok=True)
        for name, text in files.items():
            with open(os.path.join(cfg.output_path, name), "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as e:
        print(f"dressmag: cannot write results: {e}", file=sys.stderr)
        return 2
    print(summary)
    return 0


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
