"""Time propagation, Ornstein-Uhlenbeck noise and Monte-Carlo ensembles.

Schedules are integrated with piecewise-constant Hamiltonians: every step
freezes the drive envelopes and the noise at the step midpoint and applies the
exact step unitary. Noise enters as ``diag(0, -delta, eps, +delta)`` on top of
the rotating-wave drive Hamiltonian.

Every trajectory draws its randomness from ``SeedSequence([master_seed,
stream, index])`` so ensemble results do not depend on how trajectories are
distributed over workers.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels, linalg
from .model import build_rwa_hamiltonian, noise_diagonal, rotating_frame_hamiltonians, rwa_drive_hamiltonians

DELTA_STREAM = 0
EPS_STREAM = 1
CHUNK = 64
DEFAULT_TAU_C = 1e-3
RWA_STEP_BUDGET = 5_000_000

_GRID_RTOL = 1e-9


@dataclass(frozen=True)
class NoiseModel:
    """Ornstein-Uhlenbeck noise on the Zeeman shift ``delta`` and on |0'>.

    Standard deviations are in rad/s, the correlation time in seconds.
    """

    sigma_delta: float = 0.0
    tau_c: float = DEFAULT_TAU_C
    sigma_eps: float = 0.0
    master_seed: int = 0

    def __post_init__(self):
        if self.sigma_delta < 0 or self.sigma_eps < 0:
            raise ValueError("noise standard deviations must be non-negative")
        if not self.tau_c > 0:
            raise ValueError("tau_c must be positive")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    @property
    def enabled(self):
        return self.sigma_delta > 0 or self.sigma_eps > 0

    @property
    def max_dt(self):
        return self.tau_c / 10

    @classmethod
    def calibrated(cls, bare_t2, tau_c=DEFAULT_TAU_C, sigma_eps=0.0, master_seed=0):
        """Noise whose bare |0>,|-1> coherence decays to 1/e at ``bare_t2``."""
        return cls(calibrate_sigma(bare_t2, tau_c), tau_c, sigma_eps, master_seed)


def ou_dephasing(t, sigma, tau_c):
    """Exponent chi(t) of the bare coherence exp(-chi) under OU Zeeman noise.

    The bare |0>,|-1> phase is the integral of delta, a Gaussian variable of
    variance ``2 sigma^2 tau^2 (t/tau + exp(-t/tau) - 1)``.
    """
    x = np.asarray(t, dtype=np.float64) / tau_c
    # expm1 keeps the small-t limit sigma^2 t^2 / 2 accurate
    return sigma**2 * tau_c**2 * (x + np.expm1(-x))


def calibrate_sigma(bare_t2, tau_c=DEFAULT_TAU_C):
    """OU standard deviation (rad/s) giving chi(bare_t2) = 1."""
    if bare_t2 <= 0:
        raise ValueError("bare_t2 must be positive")
    x = bare_t2 / tau_c
    return 1.0 / (tau_c * math.sqrt(x + math.expm1(-x)))


def ou_autocorrelation(lag, sigma, tau_c):
    return sigma**2 * np.exp(-np.abs(lag) / tau_c)


def trajectory_rng(master_seed, index, stream=DELTA_STREAM):
    """Generator for one noise channel of one trajectory."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(stream), int(index)]))


def sample_ou(times, sigma, tau_c, rng):
    """Stationary OU process sampled exactly at increasing ``times``."""
    times = np.asarray(times, dtype=np.float64)
    n = times.shape[0]
    x = np.zeros(n)
    if sigma == 0 or n == 0:
        return x
    xi = rng.standard_normal(n)
    decay = np.exp(-np.diff(times) / tau_c)
    kick = sigma * np.sqrt(-np.expm1(-2 * np.diff(times) / tau_c))
    x[0] = sigma * xi[0]
    for k in range(1, n):
        x[k] = x[k - 1] * decay[k - 1] + kick[k - 1] * xi[k]
    return x


class Trajectory(NamedTuple):
    """One realisation of the noise: sample times and values (rad/s)."""

    times: np.ndarray
    delta_values: np.ndarray
    eps_values: np.ndarray


def _noise_on(m, times, index):
    delta = sample_ou(times, m.sigma_delta, m.tau_c, trajectory_rng(m.master_seed, index, DELTA_STREAM))
    eps = sample_ou(times, m.sigma_eps, m.tau_c, trajectory_rng(m.master_seed, index, EPS_STREAM))
    return delta, eps


def sample_ou_trajectory(m, duration, dt, index):
    """Noise trajectory on the uniform grid ``k dt``, ``k = 0 .. floor(duration/dt)``."""
    if dt <= 0 or duration < 0:
        raise ValueError("need dt > 0 and duration >= 0")
    if dt > m.max_dt * (1 + _GRID_RTOL):
        raise ValueError(f"dt={dt:g} s exceeds tau_c/10={m.max_dt:g} s")
    n = int(math.floor(duration / dt * (1 + _GRID_RTOL))) + 1
    times = np.arange(n) * dt
    delta, eps = _noise_on(m, times, index)
    return Trajectory(times, delta, eps)


class StepGrid(NamedTuple):
    """Compiled piecewise-constant schedule.

    ``hams[index[k]]`` is the noiseless Hamiltonian of step ``k`` which spans
    ``edges[k] .. edges[k+1]``; ``record`` lists the step counts at which the
    state is stored (times ``record_times``).
    """

    edges: np.ndarray
    hams: np.ndarray
    index: np.ndarray
    record: np.ndarray
    record_times: np.ndarray

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def midpoints(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def _merge_close(points, scale):
    points = np.unique(np.asarray(points, dtype=np.float64))
    if points.size < 2:
        return points
    keep = np.concatenate(([True], np.diff(points) > _GRID_RTOL * scale))
    return points[keep]


def build_step_grid(s, schedule, dt=None, record_times=None):
    """Cut a schedule into frozen steps.

    Breakpoints are segment boundaries and record times. Intervals where a
    Gaussian envelope is active are stepped at most one schedule increment at a
    time; ``dt`` bounds every step. Without ``dt`` a constant interval is a
    single exact step.
    """
    t0, t1 = schedule.span()
    scale = max(abs(t1), abs(t0), 1e-300)
    if record_times is None:
        record_times = [t1]
    record_times = np.asarray(record_times, dtype=np.float64)
    if record_times.size and (record_times.min() < t0 - _GRID_RTOL * scale
                              or record_times.max() > t1 + _GRID_RTOL * scale):
        raise ValueError("record times fall outside the simulated span")
    if dt is not None and dt <= 0:
        raise ValueError("dt must be positive")
    points = _merge_close(np.concatenate(([t0, t1], schedule.breakpoints(), record_times)), scale)
    points = points[(points >= t0 - _GRID_RTOL * scale) & (points <= t1 + _GRID_RTOL * scale)]

    edges = [points[:1]]
    for a, b in zip(points[:-1], points[1:]):
        h = b - a
        step = math.inf
        if schedule.is_smooth(a, b):
            step = schedule.increment
        if dt is not None:
            step = min(step, dt)
        nsub = 1 if math.isinf(step) else max(1, math.ceil(h / step * (1 - _GRID_RTOL)))
        edges.append(np.linspace(a, b, nsub + 1)[1:])
    edges = np.concatenate(edges)

    mid = 0.5 * (edges[1:] + edges[:-1])
    amps, phases = schedule.drives(mid)
    keys, index = np.unique(np.hstack([amps, phases]), axis=0, return_inverse=True)
    diag = np.asarray(schedule.frame_shift, dtype=np.float64) + noise_diagonal(0.0, 0.0, s.detuning)
    hams = rwa_drive_hamiltonians(keys[:, :3], keys[:, 3:], s.target, diag)
    record = np.searchsorted(edges, record_times - _GRID_RTOL * scale)
    return StepGrid(edges, np.ascontiguousarray(hams), np.ascontiguousarray(index.reshape(-1), dtype=np.int64),
                    np.ascontiguousarray(record, dtype=np.int64), record_times)


def _as_batch(psi0):
    psi = np.asarray(psi0, dtype=np.complex128)
    if psi.ndim == 1:
        psi = linalg.state(psi)[None, :]
    return np.ascontiguousarray(psi)


class Propagation(NamedTuple):
    times: np.ndarray
    states: np.ndarray
    final: np.ndarray


def propagate(p, s, schedule, traj, psi0, record_times=None, dt=None):
    """Propagate one state through a schedule under a given noise trajectory.

    ``traj`` may be None (noiseless). Noise is taken at step midpoints by
    linear interpolation of the trajectory samples, so the trajectory must
    cover the simulated span. With a trajectory and no ``dt`` the trajectory
    spacing bounds the step.
    """
    if traj is not None and dt is None and len(traj.times) > 1:
        dt = float(traj.times[1] - traj.times[0])
    grid = build_step_grid(s, schedule, dt, record_times)
    delta = eps = np.zeros((0, 0))
    if traj is not None:
        mid = grid.midpoints
        lo, hi = traj.times[0], traj.times[-1]
        tol = _GRID_RTOL * max(abs(hi), 1e-300) + (dt or 0.0)
        if mid.size and (mid[0] < lo - tol or mid[-1] > hi + tol):
            raise ValueError("noise trajectory does not cover the schedule")
        delta = np.interp(mid, traj.times, traj.delta_values)[None, :]
        eps = np.interp(mid, traj.times, traj.eps_values)[None, :]
    final, rec = kernels.evolve(grid.hams, grid.index, grid.widths, _as_batch(psi0),
                                np.ascontiguousarray(delta), np.ascontiguousarray(eps), grid.record)
    return Propagation(grid.record_times, rec[0], final[0])


class EnsembleResult(NamedTuple):
    """Trajectory-averaged probabilities at the readout times.

    ``mean_populations`` and ``std_error`` have shape (n_times, n_outcomes).
    """

    times: np.ndarray
    mean_populations: np.ndarray
    std_error: np.ndarray
    trajectory_count: int


def _run_chunk(grid, m, psi, first, count, measure):
    mid = grid.midpoints
    if m is not None and m.enabled:
        delta = np.empty((count, mid.size))
        eps = np.empty((count, mid.size))
        for j in range(count):
            delta[j], eps[j] = _noise_on(m, mid, first + j)
    else:
        delta = eps = np.zeros((0, 0))
    batch = np.ascontiguousarray(np.repeat(psi, count, axis=0))
    _, rec = kernels.evolve(grid.hams, grid.index, grid.widths, batch, delta, eps, grid.record)
    return np.abs(np.einsum("ij,trj->tri", measure, rec)) ** 2


def run_ensemble(p, s, schedule, m, psi0, n_traj, readout_times=None, dt=None, workers=1, measure=None):
    """Average populations over ``n_traj`` noise trajectories.

    Trajectories are processed in fixed chunks whatever the worker count and
    reduced in index order, so results are bit-identical for any ``workers``.
    ``measure`` is an optional matrix whose rows define the readout basis
    (bare basis by default).
    """
    if n_traj < 1:
        raise ValueError("n_traj must be at least 1")
    noisy = m is not None and m.enabled
    if noisy:
        dt = m.max_dt if dt is None else dt
        if dt > m.max_dt * (1 + _GRID_RTOL):
            raise ValueError(f"dt={dt:g} s exceeds tau_c/10={m.max_dt:g} s")
    measure = np.eye(4) if measure is None else np.asarray(measure, dtype=np.complex128)
    grid = build_step_grid(s, schedule, dt, readout_times)
    psi = _as_batch(psi0)

    if not noisy:
        pops = _run_chunk(grid, None, psi, 0, 1, measure)[0]
        return EnsembleResult(grid.record_times, pops, np.zeros_like(pops), n_traj)

    out = np.empty((n_traj, grid.record.size, measure.shape[0]))
    starts = list(range(0, n_traj, CHUNK))

    def work(first):
        count = min(CHUNK, n_traj - first)
        out[first:first + count] = _run_chunk(grid, m, psi, first, count, measure)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, starts))
    else:
        for first in starts:
            work(first)
    mean = out.mean(axis=0)
    err = out.std(axis=0, ddof=1) / math.sqrt(n_traj) if n_traj > 1 else np.zeros_like(mean)
    return EnsembleResult(grid.record_times, mean, err, n_traj)


def _max_rotating_frequency(p, s):
    f = [abs(p.omega_p), abs(p.omega_m), abs(p.lambda_plus), abs(p.lambda_minus), abs(p.omega0)]
    return 2 * max(f) + abs(s.detuning) + p.Omega + 2 * s.omega_g


def cross_validate_rwa(compressed, s, duration, psi0=None, steps_per_period=40,
                       max_steps=RWA_STEP_BUDGET, n_records=200, chunk=50_000):
    """Largest population difference between the full rotating-frame model and the RWA.

    The full model keeps every counter-rotating term and is integrated with
    ``steps_per_period`` steps per period of its fastest oscillation.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    psi0 = _as_batch(linalg.state(psi0) if psi0 is not None else np.array([0, 1, 0, 1]) / math.sqrt(2))
    f_max = _max_rotating_frequency(compressed, s) / (2 * math.pi)
    n_steps = math.ceil(duration * f_max * steps_per_period)
    if n_steps > max_steps:
        raise ValueError(f"cross-validation needs {n_steps} steps, above the budget of {int(max_steps)}")
    dt = duration / n_steps
    rec_steps = np.unique(np.linspace(0, n_steps, n_records + 1).round().astype(np.int64))

    psi = psi0
    full = []
    widths = np.full(chunk, dt)
    for a in range(0, n_steps, chunk):
        b = min(a + chunk, n_steps)
        mid = (np.arange(a, b) + 0.5) * dt
        hams = np.ascontiguousarray(rotating_frame_hamiltonians(compressed, s, mid))
        idx = np.arange(b - a, dtype=np.int64)
        local = rec_steps[(rec_steps >= a) & (rec_steps < b)] - a
        psi, rec = kernels.evolve(hams, idx, np.ascontiguousarray(widths[:b - a]), psi,
                                  np.zeros((0, 0)), np.zeros((0, 0)), np.ascontiguousarray(local))
        full.append(np.abs(rec[0]) ** 2)
    full.append(np.abs(psi) ** 2)
    full = np.concatenate(full)

    H = build_rwa_hamiltonian(compressed, s)
    w, v = np.linalg.eigh(H)
    c = v.conj().T @ psi0[0]
    t = rec_steps * dt
    rwa = np.abs((v[None, :, :] * np.exp(-1j * w[None, None, :] * t[:, None, None])) @ c) ** 2
    return float(np.abs(full - rwa).max())
