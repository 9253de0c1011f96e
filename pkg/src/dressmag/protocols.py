"""Experiment sequences: STIRAP dressing, Rabi and Ramsey runs, projective readout.

A sequence is a :class:`PulseSchedule` of segments on the channels
``mw_minus`` (|-1> <-> |0>), ``mw_plus`` (|+1> <-> |0>), ``rf_signal``
(|0'> <-> |+1> and/or |-1>) and ``laser`` (cooling, pumping, detection).
Laser segments only account for time; the coherent part of the schedule is
integrated in the rotating frame.

Segment amplitudes are Rabi frequencies in rad/s. A microwave segment of
amplitude ``A`` couples its transition with ``A/2``, so a pi pulse lasts
``pi/A``; an rf segment of amplitude ``omega_g`` drives |B> <-> |0'> at
``omega_g``.
"""

import csv
import io
import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from . import linalg
from .dynamics import run_ensemble
from .model import KET_B

CHANNELS = ("mw_minus", "mw_plus", "rf_signal", "laser")
DRIVE_CHANNELS = CHANNELS[:3]
ENVELOPES = ("gaussian", "constant", "off")

SEPARATION_CYCLES = 5.0
WIDTH_CYCLES = 8.35
INCREMENT_CYCLES = 0.1
DEFAULT_PULSE_RABI_HZ = 10e3

_TOL = 1e-9


@dataclass(frozen=True)
class Pulse:
    """One segment on one channel.

    Gaussian segments follow ``amplitude * exp(-(t - center)^2 / (2 sigma^2))``
    inside ``[start, start + duration)``. ``sensitive`` marks the time that
    counts towards the signal interrogation time T.
    """

    channel: str
    start: float
    duration: float
    envelope: str = "constant"
    amplitude: float = 0.0
    phase: float = 0.0
    label: str = ""
    center: float = None
    sigma: float = None
    sensitive: bool = False

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.envelope not in ENVELOPES:
            raise ValueError(f"unknown envelope {self.envelope!r}")
        if self.duration < 0:
            raise ValueError("segment duration must be non-negative")
        if self.amplitude < 0:
            raise ValueError("segment amplitude must be non-negative")
        if self.envelope == "gaussian" and (self.center is None or not (self.sigma or 0) > 0):
            raise ValueError("gaussian segments need a center and a positive sigma")

    @property
    def end(self):
        return self.start + self.duration

    def envelope_at(self, t):
        t = np.asarray(t, dtype=np.float64)
        inside = (t >= self.start) & (t < self.end)
        if self.envelope == "off":
            value = np.zeros_like(t)
        elif self.envelope == "constant":
            value = np.full_like(t, self.amplitude)
        else:
            value = self.amplitude * np.exp(-0.5 * ((t - self.center) / self.sigma) ** 2)
        return np.where(inside, value, 0.0)

    def shifted(self, offset):
        center = None if self.center is None else self.center + offset
        return replace(self, start=self.start + offset, center=center)


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered segments plus the frame offsets used while integrating them.

    ``increment`` is the envelope sampling step for Gaussian segments and
    ``frame_shift`` a constant diagonal (rad/s) added to the Hamiltonian.
    """

    pulses: tuple
    increment: float
    frame_shift: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(sorted(self.pulses, key=lambda q: (q.start, CHANNELS.index(q.channel)))))
        object.__setattr__(self, "frame_shift", tuple(float(x) for x in self.frame_shift))
        if not self.increment > 0:
            raise ValueError("increment must be positive")
        if len(self.frame_shift) != 4:
            raise ValueError("frame_shift needs four entries")
        scale = max([abs(q.end) for q in self.pulses] + [1.0])
        for ch in CHANNELS:
            seq = [q for q in self.pulses if q.channel == ch and q.duration > 0]
            for a, b in zip(seq[:-1], seq[1:]):
                if b.start < a.end - _TOL * scale:
                    raise ValueError(f"overlapping segments on {ch}: {a.label!r} and {b.label!r}")

    @property
    def start(self):
        return min((q.start for q in self.pulses), default=0.0)

    @property
    def end(self):
        return max((q.end for q in self.pulses), default=0.0)

    @property
    def total_T(self):
        return sum(q.duration for q in self.pulses if q.sensitive)

    @property
    def total_T_add(self):
        return (self.end - self.start) - self.total_T

    def coherent(self):
        return [q for q in self.pulses if q.channel != "laser"]

    def span(self):
        """Start and end of the coherent (microwave/rf) part."""
        qs = self.coherent()
        if not qs:
            return (self.start, self.start)
        return (min(q.start for q in qs), max(q.end for q in qs))

    def breakpoints(self):
        return np.array([t for q in self.coherent() for t in (q.start, q.end)])

    def is_smooth(self, a, b):
        """True when a Gaussian envelope is active somewhere in (a, b)."""
        return any(q.envelope == "gaussian" and q.start < b and q.end > a for q in self.coherent())

    def drives(self, times):
        """Amplitudes and phases of (mw_minus, mw_plus, rf_signal) at ``times``."""
        times = np.asarray(times, dtype=np.float64)
        amps = np.zeros((times.size, 3))
        phases = np.zeros((times.size, 3))
        for q in self.coherent():
            c = DRIVE_CHANNELS.index(q.channel)
            inside = (times >= q.start) & (times < q.end)
            amps[:, c] += q.envelope_at(times)
            phases[inside, c] = q.phase
        # an idle channel carries no phase, so equal Hamiltonians compare equal
        phases[amps == 0] = 0.0
        return amps, phases

    def shifted(self, offset):
        return replace(self, pulses=tuple(q.shifted(offset) for q in self.pulses))

    def then(self, other):
        """Append ``other`` so that it starts where this schedule ends."""
        if other.increment != self.increment or other.frame_shift != self.frame_shift:
            raise ValueError("cannot join schedules with different increment or frame")
        return replace(self, pulses=self.pulses + other.shifted(self.end - other.start).pulses)

    def to_text(self):
        return schedule_to_text(self)


# ---- text format -----------------------------------------------------------

TEXT_COLUMNS = ("channel", "start_s", "duration_s", "envelope", "amplitude_hz", "phase_rad",
                "center_s", "sigma_s", "sensitive", "label")


def _g(x):
    return "" if x is None else format(x, ".17g")


def schedule_to_text(schedule):
    """One segment per line; amplitudes in Hz (Rabi frequency / 2 pi)."""
    buf = io.StringIO()
    buf.write(f"# increment_s = {_g(schedule.increment)}\n")
    buf.write("# frame_shift_hz = " + " ".join(_g(x / (2 * math.pi)) for x in schedule.frame_shift) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TEXT_COLUMNS)
    for q in schedule.pulses:
        w.writerow([q.channel, _g(q.start), _g(q.duration), q.envelope, _g(q.amplitude / (2 * math.pi)),
                    _g(q.phase), _g(q.center), _g(q.sigma), int(q.sensitive), q.label])
    return buf.getvalue()


def schedule_from_text(text):
    lines = text.splitlines()
    meta = {}
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    if not rows or tuple(rows[0]) != TEXT_COLUMNS:
        raise ValueError("schedule text has an unexpected header")
    pulses = []
    for i, r in enumerate(rows[1:], start=1):
        if len(r) != len(TEXT_COLUMNS):
            raise ValueError(f"schedule row {i}: expected {len(TEXT_COLUMNS)} fields, got {len(r)}")
        pulses.append(Pulse(
            channel=r[0], start=float(r[1]), duration=float(r[2]), envelope=r[3],
            amplitude=float(r[4]) * 2 * math.pi, phase=float(r[5]),
            center=float(r[6]) if r[6] else None, sigma=float(r[7]) if r[7] else None,
            sensitive=bool(int(r[8])), label=r[9]))
    shift = tuple(float(x) * 2 * math.pi for x in meta.get("frame_shift_hz", "0 0 0 0").split())
    return PulseSchedule(tuple(pulses), float(meta["increment_s"]), shift)


# ---- STIRAP ------------------------------------------------------------------

@dataclass(frozen=True)
class StirapParams:
    """STIRAP timing fixed by the dressing frequency ``f_omega`` (Hz).

    Each ramp is a half Gaussian of standard deviation ``width / 4`` that
    rises to (or falls from) the full dressing amplitude over
    ``ramp_steps`` increments, i.e. it is cut four standard deviations from
    its peak. ``pulse_rabi_hz`` sets the pi pulses around the sequence.
    """

    f_omega: float
    pulse_rabi_hz: float = DEFAULT_PULSE_RABI_HZ

    def __post_init__(self):
        if not self.f_omega > 0 or not self.pulse_rabi_hz > 0:
            raise ValueError("STIRAP frequencies must be positive")

    @classmethod
    def from_omega(cls, Omega, **kw):
        return cls(Omega / (2 * math.pi), **kw)

    @property
    def omega(self):
        return 2 * math.pi * self.f_omega

    @property
    def separation(self):
        return SEPARATION_CYCLES / self.f_omega

    @property
    def width(self):
        return WIDTH_CYCLES / self.f_omega

    @property
    def time_increment(self):
        return INCREMENT_CYCLES / self.f_omega

    @property
    def sigma(self):
        return self.width / 4

    @property
    def ramp_steps(self):
        return math.ceil(self.width / self.time_increment - _TOL)

    @property
    def separation_steps(self):
        return round(self.separation / self.time_increment)

    @property
    def ramp(self):
        return self.ramp_steps * self.time_increment

    @property
    def lag(self):
        return self.separation_steps * self.time_increment

    @property
    def pi_duration(self):
        return 1.0 / (2.0 * self.pulse_rabi_hz)

    def snap(self, duration):
        """Smallest whole number of increments covering ``duration``."""
        k = math.ceil(duration / self.time_increment - _TOL)
        return max(k, 0) * self.time_increment


def _check_hold(sp, hold):
    if hold < 0:
        raise ValueError("hold must be non-negative")
    k = hold / sp.time_increment
    if abs(k - round(k)) > 1e-6:
        raise ValueError(f"hold {hold:g} s is not a whole number of {sp.time_increment:g} s increments")


def _nonzero(pulses):
    return tuple(q for q in pulses if q.duration > 0)


def build_stirap_schedule(sp, direction, hold=0.0, start=0.0, phase=math.pi):
    """Dressed-state preparation or its reversal.

    ``prepare``: pi pulse |0> -> |+1>, mw_minus ramps up, mw_plus follows
    one separation later with relative phase ``phase``, then both are held for
    ``hold``. ``reverse``: hold, mw_minus ramps down first, mw_plus one
    separation later, then a pi pulse maps |-1> -> |0>.
    """
    _check_hold(sp, hold)
    A, Apulse = sp.omega, 2 * math.pi * sp.pulse_rabi_hz
    r, lag, tp, s = sp.ramp, sp.lag, sp.pi_duration, sp.sigma
    if direction == "prepare":
        t = start + tp
        pulses = [
            Pulse("mw_plus", start, tp, "constant", Apulse, 0.0, "pi |0>->|+1>"),
            Pulse("mw_minus", t, r, "gaussian", A, 0.0, "stirap rise", center=t + r, sigma=s),
            Pulse("mw_minus", t + r, lag, "constant", A, 0.0, "stirap plateau"),
            Pulse("mw_plus", t, lag, "off", 0.0, 0.0, "stirap delay"),
            Pulse("mw_plus", t + lag, r, "gaussian", A, phase, "stirap rise", center=t + lag + r, sigma=s),
            Pulse("mw_minus", t + lag + r, hold, "constant", A, 0.0, "dressing hold"),
            Pulse("mw_plus", t + lag + r, hold, "constant", A, phase, "dressing hold"),
        ]
    elif direction == "reverse":
        t = start + hold
        pulses = [
            Pulse("mw_minus", start, hold, "constant", A, 0.0, "dressing hold"),
            Pulse("mw_plus", start, hold, "constant", A, phase, "dressing hold"),
            Pulse("mw_minus", t, r, "gaussian", A, 0.0, "stirap fall", center=t, sigma=s),
            Pulse("mw_plus", t, lag, "constant", A, phase, "stirap plateau"),
            Pulse("mw_plus", t + lag, r, "gaussian", A, phase, "stirap fall", center=t + lag, sigma=s),
            Pulse("mw_minus", t + r, lag, "off", 0.0, 0.0, "stirap delay"),
            Pulse("mw_minus", t + lag + r, tp, "constant", Apulse, 0.0, "pi |-1>->|0>"),
        ]
    else:
        raise ValueError("direction must be 'prepare' or 'reverse'")
    return PulseSchedule(_nonzero(pulses), sp.time_increment)


# ---- full sequences --------------------------------------------------------

@dataclass(frozen=True)
class Overhead:
    """Non-sensitive laser stages (s). Cooling fills up to a requested T_add."""

    cooling: float = 10e-3
    pumping: float = 0.1e-3
    detection: float = 2e-3

    def __post_init__(self):
        if min(self.cooling, self.pumping, self.detection) < 0:
            raise ValueError("overhead durations must be non-negative")


def _with_overhead(core, overhead, T_add):
    """Wrap a coherent schedule with cooling/pumping before and detection after."""
    coherent_overhead = core.total_T_add
    cooling = overhead.cooling
    if T_add is not None:
        if T_add < 0:
            raise ValueError("T_add must be non-negative")
        cooling = T_add - coherent_overhead - overhead.pumping - overhead.detection
        if cooling < -_TOL * max(T_add, 1.0):
            raise ValueError(f"T_add={T_add:g} s is shorter than the sequence overhead "
                             f"{T_add - cooling:g} s")
        cooling = max(cooling, 0.0)
    core = core.shifted(cooling + overhead.pumping - core.start)
    laser = [
        Pulse("laser", 0.0, cooling, "off", label="cooling"),
        Pulse("laser", cooling, overhead.pumping, "off", label="optical pumping"),
        Pulse("laser", core.end, overhead.detection, "off", label="detection"),
    ]
    return replace(core, pulses=core.pulses + _nonzero(laser))


def dressed_sequence(sp, window_pulses, window, T_add=None, overhead=Overhead(), phase=math.pi):
    """STIRAP preparation, dressed window with the given rf segments, reversal.

    ``window_pulses`` are placed relative to the start of the dressed hold,
    which is ``window`` rounded up to whole increments.
    """
    hold = sp.snap(window)
    prep = build_stirap_schedule(sp, "prepare", hold, phase=phase)
    hold_start = prep.end - hold
    rf = tuple(q.shifted(hold_start) for q in window_pulses)
    rev = build_stirap_schedule(sp, "reverse", 0.0, start=prep.end, phase=phase)
    core = replace(prep, pulses=prep.pulses + rev.pulses + _nonzero(rf))
    return _with_overhead(core, overhead, T_add)


def ideal_dressed_window(sp, window_pulses, window, phase=math.pi):
    """Only the dressed hold: for runs that start directly in |B>."""
    hold = max(window, max((q.end for q in window_pulses), default=0.0))
    A = sp.omega
    pulses = [Pulse("mw_minus", 0.0, hold, "constant", A, 0.0, "dressing hold"),
              Pulse("mw_plus", 0.0, hold, "constant", A, phase, "dressing hold")]
    return PulseSchedule(_nonzero(pulses) + _nonzero(window_pulses), sp.time_increment)


class SequenceTiming(NamedTuple):
    T: float
    T_add: float
    T_s: float
    sensitive: tuple
    overhead: tuple


def sequence_timing(schedule):
    """Split a schedule into signal-sensitive time T and overhead T_add."""
    T = schedule.total_T
    T_add = schedule.total_T_add
    sens = tuple(q.label for q in schedule.pulses if q.sensitive)
    over = tuple(q.label for q in schedule.pulses if not q.sensitive)
    return SequenceTiming(T, T_add, T + T_add, sens, over)


# ---- measurement -----------------------------------------------------------

@dataclass(frozen=True)
class MeasurementRecord:
    """Estimated population from ``n`` projective shots.

    ``p_true`` is the simulated expectation; with ``n`` None the estimate is
    that expectation and ``delta_p`` is 0.
    """

    estimated_population: float
    n: int
    delta_p: float
    T: float = 0.0
    T_add: float = 0.0
    p_true: float = None

    def __post_init__(self):
        if not 0.0 <= self.estimated_population <= 1.0:
            raise ValueError("estimated population outside [0, 1]")
        if self.delta_p < 0:
            raise ValueError("delta_p must be non-negative")


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _clip01(p):
    return float(min(max(p, 0.0), 1.0))


def sample_population(p_true, n, seed=None, T=0.0, T_add=0.0):
    """Binomial estimate of a probability with its projection-noise error."""
    p_true = _clip01(p_true)
    if n is None:
        return MeasurementRecord(p_true, None, 0.0, T, T_add, p_true)
    if n < 1:
        raise ValueError("n must be at least 1")
    k = _rng(seed).binomial(int(n), p_true)
    est = k / n
    return MeasurementRecord(est, int(n), math.sqrt(est * (1 - est) / n), T, T_add, p_true)


def measure_population(psi, target, n, seed=None):
    """Projective measurement of ``psi`` onto a basis ket (label or vector)."""
    ket = linalg.ket(target) if isinstance(target, str) else np.asarray(target, dtype=np.complex128)
    p = abs(linalg.inner(ket, psi)) ** 2
    return sample_population(p, n, seed)


def _evolve_expectation(p, s, schedule, m, psi0, measure, n_traj, dt, workers):
    res = run_ensemble(p, s, schedule, m, psi0, n_traj, None, dt, workers, measure=measure)
    return float(res.mean_populations[-1, 0])


def _warn_validity(p, s):
    if not s.is_valid_for(p):
        warnings.warn(f"omega_g={s.omega_g:.4g} rad/s is not small against the dressing; "
                      "the two-level dressed picture is approximate", RuntimeWarning, stacklevel=3)


def rabi_schedule(s, sp, T, T_add=None, prepare="stirap", overhead=Overhead()):
    rf = (Pulse("rf_signal", 0.0, T, "constant", s.omega_g, s.phi, "rf signal", sensitive=True),)
    if prepare == "stirap":
        return dressed_sequence(sp, rf, T, T_add, overhead)
    if prepare == "ideal":
        return ideal_dressed_window(sp, rf, T)
    raise ValueError("prepare must be 'stirap' or 'ideal'")


def run_rabi(p, s, m, sp, T, n, seed=None, T_add=None, n_traj=1, dt=None, workers=1,
             prepare="stirap", overhead=Overhead(), warn_invalid=True):
    """Dressed Rabi experiment: P is the probability to find the ion back in |B>.

    With ``prepare='stirap'`` the full sequence is simulated and P is the |0>
    population after the readout pi pulse; ``'ideal'`` starts in |B> and
    projects onto it directly.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    if warn_invalid:
        _warn_validity(p, s)
    schedule = rabi_schedule(s, sp, T, T_add, prepare, overhead)
    if prepare == "stirap":
        psi0, measure = linalg.KET_0, linalg.KET_0[None, :]
    else:
        psi0, measure = KET_B, KET_B.conj()[None, :]
    p_true = _evolve_expectation(p, s, schedule, m, psi0, measure, n_traj, dt, workers)
    timing = sequence_timing(schedule)
    T_add_out = timing.T_add if prepare == "stirap" else (T_add or 0.0)
    return sample_population(p_true, n, seed, timing.T, T_add_out)


def ramsey_schedule(s, sp, T_R, basis="dressed", readout_phase=0.0, detuning=0.0,
                    T_add=None, prepare="stirap", overhead=Overhead()):
    if T_R < 0:
        raise ValueError("T_R must be non-negative")
    if basis == "dressed":
        if not s.omega_g > 0:
            raise ValueError("dressed Ramsey needs a non-zero rf Rabi frequency for its pulses")
        tp = math.pi / (2 * s.omega_g)
        window = (
            Pulse("rf_signal", 0.0, tp, "constant", s.omega_g, s.phi, "rf pi/2"),
            Pulse("rf_signal", tp, T_R, "off", 0.0, 0.0, "free evolution", sensitive=True),
            Pulse("rf_signal", tp + T_R, tp, "constant", s.omega_g, s.phi + readout_phase, "rf pi/2"),
        )
        if prepare == "stirap":
            return dressed_sequence(sp, window, 2 * tp + T_R, T_add, overhead)
        if prepare == "ideal":
            return ideal_dressed_window(sp, window, 2 * tp + T_R)
        raise ValueError("prepare must be 'stirap' or 'ideal'")
    if basis == "bare":
        A = 2 * math.pi * sp.pulse_rabi_hz
        tp = sp.pi_duration / 2
        pulses = (
            Pulse("mw_minus", 0.0, tp, "constant", A, 0.0, "pi/2 |0>-|-1>"),
            Pulse("mw_minus", tp, T_R, "off", 0.0, 0.0, "free evolution", sensitive=True),
            Pulse("mw_minus", tp + T_R, tp, "constant", A, readout_phase, "pi/2 |0>-|-1>"),
        )
        core = PulseSchedule(_nonzero(pulses), sp.time_increment, (0.0, -detuning, 0.0, 0.0))
        return _with_overhead(core, overhead, T_add)
    raise ValueError("basis must be 'dressed' or 'bare'")


def _ramsey_expectation(p, s, m, sp, T_R, detuning, basis, readout_phase, n_traj, dt, workers, prepare):
    if basis == "dressed":
        s = replace(s, detuning=detuning)
    schedule = ramsey_schedule(s, sp, T_R, basis, readout_phase, detuning, prepare=prepare)
    if basis == "dressed" and prepare == "ideal":
        psi0, measure = KET_B, KET_B.conj()[None, :]
    else:
        psi0, measure = linalg.KET_0, linalg.KET_0[None, :]
    # P is the transferred fraction: everything not found back in the start state
    return 1.0 - _evolve_expectation(p, s, schedule, m, psi0, measure, n_traj, dt, workers), schedule


def run_ramsey(p, s, m, sp, T_R, detuning, n, seed=None, basis="dressed", readout_phase=0.0,
               n_traj=1, dt=None, workers=1, prepare="stirap"):
    """Ramsey experiment; P is the transferred population, 1 at T_R = 0.

    ``dressed`` uses two rf pi/2 pulses (Rabi frequency ``s.omega_g``) on
    |B> <-> |0'> with ``detuning`` on |0'>; ``bare`` uses microwave pi/2 pulses
    on |-1> <-> |0> with ``detuning`` on |-1>.
    """
    if basis == "dressed":
        _warn_validity(p, s)
    p_true, schedule = _ramsey_expectation(p, s, m, sp, T_R, detuning, basis, readout_phase,
                                           n_traj, dt, workers, prepare)
    timing = sequence_timing(schedule)
    return sample_population(p_true, n, seed, timing.T, timing.T_add)


READOUT_PHASES = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)


def ramsey_contrast(p, s, m, sp, T_R, detuning=0.0, basis="dressed", n_traj=1, dt=None,
                    workers=1, prepare="stirap"):
    """Fringe contrast from four readout phases of the second pulse.

    ``sqrt((P(pi) - P(0))^2 + (P(3pi/2) - P(pi/2))^2)`` is insensitive to the
    fringe position and to population lost from the two-level subspace.
    """
    P = [_ramsey_expectation(p, s, m, sp, T_R, detuning, basis, ph, n_traj, dt, workers, prepare)[0]
         for ph in READOUT_PHASES]
    return math.hypot(P[2] - P[0], P[3] - P[1])


def stirap_fidelities(sp, dt=None):
    """Noiseless |B> preparation fidelity and prepare+reverse return to |0>."""
    from .model import SignalParams, SystemParams

    p = SystemParams(omega0=1.0, lambda_plus=1.0, lambda_minus=1.0, Omega=sp.omega)
    s = SignalParams()
    prep = build_stirap_schedule(sp, "prepare", 0.0)
    f_prep = _evolve_expectation(p, s, prep, None, linalg.KET_0, KET_B.conj()[None, :], 1, dt, 1)
    rev = build_stirap_schedule(sp, "reverse", 0.0)
    both = prep.then(rev)
    f_round = _evolve_expectation(p, s, both, None, linalg.KET_0, linalg.KET_0[None, :], 1, dt, 1)
    return f_prep, f_round


__all__ = [
    "Pulse", "PulseSchedule", "StirapParams", "MeasurementRecord", "Overhead", "SequenceTiming",
    "build_stirap_schedule", "dressed_sequence", "ideal_dressed_window", "rabi_schedule",
    "ramsey_schedule", "run_rabi", "run_ramsey", "ramsey_contrast", "measure_population",
    "sample_population", "sequence_timing", "schedule_to_text", "schedule_from_text",
    "stirap_fidelities",
]
