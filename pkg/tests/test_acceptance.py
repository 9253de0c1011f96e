"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]`` / ``[FAIL]`` line with the measured
quantity, the tolerance and the runtime against its budget. Run directly
(``python3 tests/test_acceptance.py``) for the summary lines alone.
"""

import math
import time

import numpy as np
import pytest

from dressmag.cli import cli_main
from dressmag.config import parse_config
from dressmag.dynamics import cross_validate_rwa
from dressmag.estimation import fit_decay, fit_rabi
from dressmag.model import SignalParams, SystemParams, build_rwa_hamiltonian, gap_closed_form, protection_analysis
from dressmag.protocols import StirapParams, ramsey_contrast, run_rabi, run_ramsey, sample_population, stirap_fidelities
from dressmag.scenarios import run_sensitivity_sweep, shipped_table

TWO_PI = 2 * math.pi
SEED = 2016
BIAS = dict(omega0=TWO_PI * 12.642812118e9, lambda_plus=TWO_PI * 14.076e6, lambda_minus=TWO_PI * 14.1e6)

CRITERIA = []


def criterion(number, title, budget_s):
    def register(fn):
        CRITERIA.append((number, title, budget_s, fn))
        return fn
    return register


def evaluate(number, title, budget_s, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    within = elapsed < budget_s
    passed = bool(ok) and within
    line = (f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {title}: {detail}; "
            f"runtime {elapsed:.1f} s (budget {budget_s:g} s{'' if within else ', exceeded'})")
    return passed, line


# ---------------------------------------------------------------------------

@criterion(1, "dressed spectrum", 1.0)
def dressed_spectrum():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for O in rng.uniform(TWO_PI * 1e3, TWO_PI * 100e3, 100):
        p = SystemParams(Omega=O, **BIAS)
        w = np.linalg.eigvalsh(build_rwa_hamiltonian(p, SignalParams()))
        g = O / math.sqrt(2)
        worst = max(worst, np.abs(w - [-g, 0, 0, g]).max() / g)
    return worst <= 1e-12, f"max relative eigenvalue error {worst:.2e} (tol 1e-12) over 100 random Omega"


@criterion(2, "protection identity", 1.0)
def protection_identity():
    rng = np.random.default_rng(SEED + 1)
    shift = gap = 0.0
    for _ in range(100):
        O = rng.uniform(TWO_PI * 1e3, TWO_PI * 100e3)
        d = rng.uniform(-1, 1) * O
        r = protection_analysis(SystemParams(Omega=O, **BIAS), d)
        shift = max(shift, abs(r.b_branch_shift) / O)
        gap = max(gap, abs(r.gap / gap_closed_form(O, d) - 1))
    return (shift <= 1e-10 and gap <= 1e-10,
            f"max |B-branch shift|/Omega {shift:.1e} (tol 1e-10), max gap relative error {gap:.1e} (tol 1e-10)")


_sweep_cache = {}


def sweep():
    if "points" not in _sweep_cache:
        _sweep_cache["points"] = run_sensitivity_sweep(parse_config(f"seed = {SEED}"), shipped_table()).points
    return _sweep_cache["points"]


def row(points, T, T_add):
    return next(q for q in points if abs(q.T - T) < 1e-9 and abs(q.T_add - T_add) < 1e-9)


@criterion(3, "SQL reproduction", 10.0)
def sql_reproduction():
    pts = sweep()
    green = row(pts, 1.5, 0.015).S_hz
    ok = abs(green / 0.130 - 1) <= 0.01
    parts = [f"green S_hz {green:.4f} vs 0.130 (tol 1%)"]
    for name, T, T_add, ref, unc in (("cyan", 0.5, 0.028, 0.278, 0.017), ("red", 1.0, 0.039, 0.200, 0.004)):
        S = row(pts, T, T_add).S_hz
        ok &= ref * 0.7 <= S <= ref + unc
        parts.append(f"{name} {S:.4f} vs {ref} ({(S / ref - 1) * 100:+.1f}%, window [-30%, +{unc}])")
    return ok, "; ".join(parts)


@criterion(4, "full sweep bound", 60.0)
def full_sweep_bound():
    pts = sweep()
    above = all(q.S >= q.S_Q for q in pts)
    order = sorted(pts, key=lambda q: q.T_s / q.T)
    ratios = [q.S / q.S_Q for q in order]
    monotone = all(b >= a * (1 - 1e-3) for a, b in zip(ratios, ratios[1:]))
    long_rows = [q.S / q.S_Q for q in pts if q.T >= 0.85]
    ok = above and monotone and len(pts) == 22 and len(long_rows) == 3 and max(long_rows) <= 1.05
    return ok, (f"{len(pts)} rows, S >= S_Q for all: {above}, S/S_Q monotone in T_s/T: {monotone}, "
                f"S/S_Q for T >= 0.85 s: {', '.join(f'{r:.4f}' for r in long_rows)} (tol 1.05)")


@criterion(5, "Rabi fidelity", 120.0)
def rabi_fidelity():
    p = SystemParams(Omega=TWO_PI * 18e3, **BIAS)
    s = SignalParams(omega_g=TWO_PI * 7.54)
    sp = StirapParams(18e3)
    T = np.linspace(0.1e-3, 0.5, 21)
    P = np.array([run_rabi(p, s, None, sp, t, None, T_add=0.028).p_true for t in T])
    exact = fit_rabi(np.column_stack([T, P, np.full(21, 30)]))
    rel = abs(exact.omega_g_hat / s.omega_g - 1)
    stds = []
    for i in range(100):
        est = [sample_population(x, 30, seed=(SEED, i, k)).estimated_population for k, x in enumerate(P)]
        stds.append(fit_rabi(np.column_stack([T, est, np.full(21, 30)])).omega_g_std)
    med = float(np.median(stds)) / TWO_PI
    ratio = med / 0.12
    ok = rel <= 1e-3 and 0.5 <= ratio <= 2.0
    return ok, (f"noiseless omega_g error {rel * 100:.3f}% (tol 0.1%); median fit std 2pi x {med:.4f} Hz "
                f"vs 2pi x 0.12 Hz, ratio {ratio:.3f} (window [0.5, 2])")


@criterion(6, "Ramsey period", 60.0)
def ramsey_period():
    p = SystemParams(Omega=TWO_PI * 18e3, **BIAS)
    s = SignalParams(omega_g=TWO_PI * 100)
    sp = StirapParams(18e3)
    det = TWO_PI * 0.52
    T = np.linspace(0.0, 4.0, 41)
    P = [run_ramsey(p, s, None, sp, t, det, None).estimated_population for t in T]
    fit = fit_rabi(np.column_stack([T, P, np.full(T.size, 10**6)]))
    period = TWO_PI / fit.omega_g_hat
    return abs(period / 1.923 - 1) <= 0.01, f"fringe period {period:.4f} s vs 1.923 s (tol 1%)"


@criterion(7, "coherence enhancement", 600.0)
def coherence_enhancement():
    cfg = parse_config(f"noise_enabled = true\nseed = {SEED}\nbare_t2_s = 5.3e-3\ntau_c_s = 1e-3")
    n_traj = 1000
    times = np.linspace(1e-3, 15e-3, 10)
    bare = [ramsey_contrast(cfg.system, SignalParams(), cfg.noise, cfg.stirap, t, 0.0, "bare",
                            n_traj=n_traj, workers=4) for t in times]
    T2 = fit_decay(np.column_stack([times, bare])).T2
    s = SignalParams(omega_g=TWO_PI * 100)
    dressed = ramsey_contrast(cfg.system, s, cfg.noise, cfg.stirap, 100 * 5.3e-3, 0.0, "dressed",
                              n_traj=n_traj, workers=4)
    ok = abs(T2 / 5.3e-3 - 1) <= 0.1 and dressed > math.exp(-1)
    return ok, (f"bare T2 {T2 * 1e3:.2f} ms vs 5.3 ms (tol 10%); dressed contrast at 530 ms {dressed:.3f} "
                f"(needs > 1/e = {math.exp(-1):.3f}); {n_traj} trajectories")


@criterion(8, "STIRAP fidelity", 60.0)
def stirap_fidelity():
    sp = StirapParams(18e3)
    timing = abs(sp.separation - 278e-6) < 0.5e-6 and abs(sp.width - 464e-6) < 0.5e-6
    res = [stirap_fidelities(StirapParams(f)) for f in np.linspace(18e3, 40e3, 12)]
    prep = min(r[0] for r in res)
    rnd = min(r[1] for r in res)
    ok = timing and prep >= 0.98 and rnd >= 0.98
    return ok, (f"separation {sp.separation * 1e6:.1f} us, width {sp.width * 1e6:.1f} us; worst over 12 Omega in "
                f"[18, 40] kHz: preparation {prep:.6f}, round trip {rnd:.6f} (tol 0.98)")


@criterion(9, "RWA validity", 300.0)
def rwa_validity():
    p = SystemParams(omega0=TWO_PI * 1e6, lambda_plus=TWO_PI * 2e5, lambda_minus=TWO_PI * 2e5, Omega=TWO_PI * 2e3)
    dev = cross_validate_rwa(p, SignalParams(omega_g=TWO_PI * 100), 5e-3)
    return dev <= 5e-3, f"max population deviation {dev:.2e} (tol 5e-3)"


@criterion(10, "determinism", 60.0)
def determinism():
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        cfg = d / "noisy.cfg"
        cfg.write_text("noise_enabled = true\nprepare = ideal\nramsey_points = 6\nramsey_t_stop_s = 0.02\n"
                       "ramsey_rf_hz = 500\ntrajectories = 200\n")
        runs = [("sensitivity", []), ("ramsey", ["--config", str(cfg)])]
        same = []
        for cmd, extra in runs:
            blobs = []
            for workers in ("1", "3", "8"):
                out = d / f"{cmd}{workers}"
                code = cli_main([cmd, *extra, "--seed", str(SEED), "--workers", workers, "--out", str(out)])
                if code != 0:
                    return False, f"{cmd} exited with {code}"
                blobs.append(b"".join(f.read_bytes() for f in sorted(out.iterdir())))
            same.append(blobs[0] == blobs[1] == blobs[2])
    return all(same), (f"sensitivity sweep identical for workers 1/3/8: {same[0]}; "
                       f"noisy Ramsey ensemble identical: {same[1]}")


# ---------------------------------------------------------------------------

@pytest.mark.parametrize("number, title, budget_s, fn", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, title, budget_s, fn, capsys):
    passed, line = evaluate(number, title, budget_s, fn)
    with capsys.disabled():
        print("\n" + line)
    assert passed, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    print(f"{sum(r[0] for r in results)}/{len(results)} criteria passed")
