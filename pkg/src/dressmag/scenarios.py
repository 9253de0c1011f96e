"""Table-driven sensitivity sweeps.

A scenario file lists operating points (signal Rabi frequency in Hz, its
reported uncertainty, shots per point, interrogation time T and overhead
T_add). Each row is simulated with the Rabi protocol and pushed through the
sensitivity chain; a failing row is reported without stopping the sweep.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from typing import NamedTuple

from .estimation import global_contrast, sensitivity_point
from .protocols import run_rabi

SCENARIO_COLUMNS = ("omega_g_hz", "delta_omega_g_hz", "n", "T_s", "T_add_s")
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ScenarioRow:
    omega_g_hz: float
    delta_omega_g_hz: float
    n: int
    T: float
    T_add: float

    def __post_init__(self):
        if not (self.omega_g_hz > 0 and self.delta_omega_g_hz > 0 and self.T > 0 and self.T_add > 0):
            raise ValueError("scenario values must be positive")
        if self.n < 1:
            raise ValueError("n must be at least 1")


def load_scenarios(csv_text):
    """Parse scenario CSV text; errors name the 1-based data row."""
    reader = csv.reader(io.StringIO(csv_text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != SCENARIO_COLUMNS:
        raise ValueError(f"scenario header must be {','.join(SCENARIO_COLUMNS)}")
    rows = []
    for i, rec in enumerate(reader, start=1):
        if not rec or all(not x.strip() for x in rec):
            continue
        if len(rec) != len(SCENARIO_COLUMNS):
            raise ValueError(f"scenario row {i}: expected {len(SCENARIO_COLUMNS)} fields, got {len(rec)}")
        try:
            n = float(rec[2])
            if n != int(n):
                raise ValueError("n must be an integer")
            rows.append(ScenarioRow(float(rec[0]), float(rec[1]), int(n), float(rec[3]), float(rec[4])))
        except ValueError as e:
            raise ValueError(f"scenario row {i}: {e}") from None
    return rows


def scenarios_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCENARIO_COLUMNS)
    for r in rows:
        w.writerow([repr(r.omega_g_hz), repr(r.delta_omega_g_hz), r.n, repr(r.T), repr(r.T_add)])
    return buf.getvalue()


def shipped_table_text():
    return resources.files("dressmag").joinpath("data/table1.csv").read_text(encoding="utf-8")


def shipped_table():
    """The 22 shipped reference operating points."""
    return load_scenarios(shipped_table_text())


class SweepResult(NamedTuple):
    points: list
    failures: list


def _row_signal(config, row):
    return replace(config.signal, omega_g=TWO_PI * row.omega_g_hz)


def _simulate_row(config, row):
    s = _row_signal(config, row)
    rec = run_rabi(config.system, s, config.noise, config.stirap, row.T, None, T_add=row.T_add,
                   n_traj=config["trajectories"], dt=config["dt_s"], prepare=config["prepare"],
                   warn_invalid=False)
    return rec.p_true


def run_sensitivity_sweep(config, scenarios, workers=1):
    """Simulate every row and evaluate its shot-noise-limited sensitivity.

    The expected population of each row comes from the simulated Rabi
    protocol; the fringe slope uses one contrast fitted across all rows whose
    signal is weak enough for the two-level picture (all rows if none is).
    Points are returned sorted by phase omega_g T.
    """
    scenarios = list(scenarios)

    def attempt(row):
        try:
            return _simulate_row(config, row), None
        except Exception as e:  # isolate per-row failures
            return None, f"{type(e).__name__}: {e}"

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(attempt, scenarios))
    else:
        outcomes = [attempt(r) for r in scenarios]

    ok = [(r, P) for r, (P, err) in zip(scenarios, outcomes) if err is None]
    failures = [(i, err) for i, (_, err) in enumerate(outcomes) if err is not None]
    valid = [(r, P) for r, P in ok if _row_signal(config, r).is_valid_for(config.system)] or ok
    f = global_contrast([TWO_PI * r.omega_g_hz * r.T for r, _ in valid], [P for _, P in valid]) if ok else 1.0
    points = []
    for r, P in ok:
        points.append(sensitivity_point(TWO_PI * r.omega_g_hz, r.n, r.T, r.T_add, P, f,
                                        TWO_PI * r.delta_omega_g_hz, config["kappa_t_per_rad_s"]))
    points.sort(key=lambda q: q.phi)
    return SweepResult(points, failures)
