"""Fits and metrology: Rabi/decay fits, projection-noise error propagation,
shot-noise-limited sensitivity and the standard quantum limit.

Frequencies are angular (rad/s) throughout; sensitivities are returned both
in rad s^-1 Hz^-1/2 and, divided by 2 pi, in Hz Hz^-1/2.
"""

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares

TWO_PI = 2 * math.pi
# field per unit signal Rabi frequency: 0.130 Hz/sqrt(Hz) <-> 4.6 pT/sqrt(Hz)
KAPPA_DEFAULT = 4.6e-12 / (TWO_PI * 0.130)
CONTRAST_BOUNDS = (0.0, 1.05)
SCAN_OVERSAMPLE = 20
MAX_SCAN = 200_000
REFINE_CANDIDATES = 5


class RabiFit(NamedTuple):
    omega_g_hat: float
    contrast_f: float
    omega_g_std: float
    residual_rms: float
    contrast_std: float = 0.0
    converged: bool = True


def rabi_model(T, omega, f):
    return 0.5 * (1.0 + f * np.cos(omega * np.asarray(T, dtype=np.float64)))


def rabi_weights(P, n):
    """Inverse binomial variance, regularised so P = 0 or 1 stays finite."""
    P = np.asarray(P, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    return n / (P * (1 - P) + 1 / (2 * n))


def _unpack(points):
    a = np.asarray(points, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != 3:
        raise ValueError("points must be a sequence of (T, P, n)")
    order = np.argsort(a[:, 0], kind="stable")
    return a[order, 0], a[order, 1], a[order, 2]


def _best_contrast(c, y, w):
    # weighted LS for f in y = f c / 2, y = P - 1/2
    den = np.sum(w * c * c, axis=-1)
    f = np.where(den > 0, 2 * np.sum(w * y * c, axis=-1) / np.where(den > 0, den, 1), 0.0)
    return np.clip(f, *CONTRAST_BOUNDS)


def scan_grid(T):
    """Deterministic frequency grid on [pi/(2 T_max), 4 pi/dT_min]."""
    T = np.unique(T)
    t_max = T.max()
    dt_min = np.diff(T).min()
    lo, hi = math.pi / (2 * t_max), 4 * math.pi / dt_min
    step = math.pi / (SCAN_OVERSAMPLE * t_max)
    n = int(min(MAX_SCAN, math.ceil((hi - lo) / step) + 1))
    return np.linspace(lo, hi, n)


def _chi2_scan(omegas, T, P, w):
    c = np.cos(omegas[:, None] * T[None, :])
    f = _best_contrast(c, P - 0.5, w)
    r = P - 0.5 * (1 + f[:, None] * c)
    return np.sum(w * r * r, axis=1), f


def fit_rabi(points):
    """Weighted fit of P(T) = (1 + f cos(omega T)) / 2.

    A deterministic frequency scan (contrast solved in closed form at each
    frequency) seeds local refinements of the best few minima. Minima whose
    chi^2 lies within the spread of the chi^2 statistic itself,
    ``sqrt(2 (N - 2))``, of the best are indistinguishable (typically aliases
    of a near-uniform time grid) and the lowest frequency among them wins.
    """
    T, P, n = _unpack(points)
    if T.size < 5:
        raise ValueError("need at least 5 points")
    if np.unique(T).size < 2:
        raise ValueError("need at least two distinct times")
    if np.ptp(P) == 0:
        raise ValueError("all populations are equal; no oscillation to fit")
    if np.any(n < 1) or np.any((P < 0) | (P > 1)):
        raise ValueError("need n >= 1 and populations in [0, 1]")
    w = rabi_weights(P, n)
    sw = np.sqrt(w)

    omegas = scan_grid(T)
    chi2, fs = _chi2_scan(omegas, T, P, w)
    interior = np.r_[True, chi2[1:-1] <= chi2[:-2], True] & np.r_[True, chi2[1:-1] <= chi2[2:], True]
    cand = np.flatnonzero(interior)
    cand = cand[np.argsort(chi2[cand], kind="stable")][:REFINE_CANDIDATES]

    def resid(x):
        return sw * (P - rabi_model(T, x[0], x[1]))

    results = []
    for i in cand:
        x0 = np.array([omegas[i], min(max(fs[i], 1e-6), CONTRAST_BOUNDS[1] - 1e-6)])
        sol = least_squares(resid, x0, bounds=([0.0, CONTRAST_BOUNDS[0]], [np.inf, CONTRAST_BOUNDS[1]]),
                            method="trf", x_scale=[1.0 / T.max(), 1.0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        results.append((float(np.sum(sol.fun**2)), sol))
    best = min(r[0] for r in results)
    window = max(1.0, math.sqrt(2.0 * (T.size - 2)))
    ties = [r for r in results if r[0] <= best + window]
    chi2_fit, sol = min(ties, key=lambda r: r[1].x[0])
    omega, f = sol.x
    try:
        cov = np.linalg.inv(sol.jac.T @ sol.jac)
        std = np.sqrt(np.abs(np.diag(cov)))
    except np.linalg.LinAlgError:
        std = np.array([np.inf, np.inf])
    rms = float(np.sqrt(np.mean((P - rabi_model(T, omega, f)) ** 2)))
    converged = bool(sol.success)
    if not converged:
        i = cand[0]
        omega, f = omegas[i], fs[i]
    return RabiFit(float(omega), float(f), float(std[0]), rms, float(std[1]), converged)


class DecayFit(NamedTuple):
    T2: float
    q: int
    residual_rms: float


def decay_model(t, T2, q):
    return np.exp(-((np.asarray(t, dtype=np.float64) / T2) ** q))


def fit_decay(points):
    """Fit contrast(t) = exp(-(t/T2)^q) for q = 1 and 2; keep the better one.

    T2 is the 1/e time in either case.
    """
    a = np.asarray(points, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != 2:
        raise ValueError("points must be a sequence of (t, contrast)")
    a = a[np.argsort(a[:, 0], kind="stable")]
    t, c = a[:, 0], a[:, 1]
    if t.size < 5:
        raise ValueError("need at least 5 points")
    if np.ptp(c) <= 1e-12 or c[-1] >= c[0]:
        raise ValueError("contrast does not decay")
    below = np.flatnonzero(c < math.exp(-1))
    guess = t[below[0]] if below.size else t[-1] * 2
    guess = max(guess, t[t > 0].min() if np.any(t > 0) else 1.0)

    best = None
    for q in (1, 2):
        def resid(x):
            return decay_model(t, math.exp(x[0]), q) - c

        sol = least_squares(resid, [math.log(guess)], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        rms = float(np.sqrt(np.mean(sol.fun**2)))
        if best is None or rms < best.residual_rms:
            best = DecayFit(float(math.exp(sol.x[0])), q, rms)
    return best


def delta_omega(delta_p, slope, T):
    """Smallest resolvable change of omega_g: dP / (|dP/dphi| T).

    A zero slope (fringe extremum) gives an infinite uncertainty.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if delta_p < 0:
        raise ValueError("delta_p must be non-negative")
    if delta_p == 0:
        return 0.0
    if slope == 0:
        return math.inf
    return delta_p / (abs(slope) * T)


def projection_noise(P, n):
    return math.sqrt(max(P * (1 - P), 0.0) / n)


class Sensitivity(NamedTuple):
    S: float
    S_hz: float


def sensitivity(delta_omega_g, T_tot):
    if T_tot <= 0:
        raise ValueError("T_tot must be positive")
    S = delta_omega_g * math.sqrt(T_tot)
    return Sensitivity(S, S / TWO_PI)


def sql(T):
    """Standard quantum limit 1/sqrt(T) in rad s^-1 Hz^-1/2."""
    if T <= 0:
        raise ValueError("T must be positive")
    return 1.0 / math.sqrt(T)


def sql_hz(T):
    return sql(T) / TWO_PI


def omega_to_field(omega_g, kappa=KAPPA_DEFAULT):
    """Field amplitude (T) for an angular signal Rabi frequency."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return kappa * omega_g


def fringe_slope(phi, f):
    """|dP/dphi| of (1 + f cos phi) / 2."""
    return 0.5 * f * abs(math.sin(phi))


def global_contrast(phis, P):
    """Least-squares f for P = (1 + f cos phi)/2 over a set of operating points."""
    c = np.cos(np.asarray(phis, dtype=np.float64))
    y = 2 * np.asarray(P, dtype=np.float64) - 1
    den = float(np.dot(c, c))
    if den == 0:
        return 1.0
    return float(np.clip(np.dot(y, c) / den, *CONTRAST_BOUNDS))


@dataclass(frozen=True)
class SensitivityPoint:
    """One operating point with its computed sensitivity (angular units)."""

    omega_g: float
    delta_omega_g_reported: float
    n: int
    T: float
    T_add: float
    phi: float
    delta_omega_g: float
    S: float
    S_hz: float
    S_Q: float
    P: float = float("nan")
    delta_p: float = float("nan")
    slope: float = float("nan")
    kappa: float = KAPPA_DEFAULT

    @property
    def T_s(self):
        return self.T + self.T_add

    @property
    def T_tot(self):
        return self.n * self.T_s

    @property
    def S_Q_hz(self):
        return self.S_Q / TWO_PI

    @property
    def B_sens(self):
        """Field sensitivity in T/sqrt(Hz)."""
        return omega_to_field(self.S, self.kappa)


def sensitivity_point(omega_g, n, T, T_add, P, f, delta_omega_g_reported=float("nan"), kappa=KAPPA_DEFAULT):
    """Evaluate the sensitivity chain at one operating point.

    ``P`` is the expected population there and ``f`` the fringe contrast used
    for the slope.
    """
    phi = omega_g * T
    dp = projection_noise(P, n)
    slope = fringe_slope(phi, f)
    dw = delta_omega(dp, slope, T)
    S = sensitivity(dw, n * (T + T_add))
    return SensitivityPoint(omega_g, delta_omega_g_reported, int(n), T, T_add, phi, dw,
                            S.S, S.S_hz, sql(T), P, dp, slope, kappa)


def ideal_point(omega_g, n, T, T_add, kappa=KAPPA_DEFAULT):
    """Point with ideal fringe P = (1 + cos phi)/2 and unit contrast."""
    return sensitivity_point(omega_g, n, T, T_add, 0.5 * (1 + math.cos(omega_g * T)), 1.0, kappa=kappa)


RESULT_COLUMNS = ("phi_rad", "T_s", "T_add_s", "n", "delta_omega_rad_s", "S_rad", "S_hz", "S_Q_rad", "B_sens_pT")
PLOT_COLUMNS = ("x", "y", "sigma")


def _fmt(x):
    return format(float(x), ".12g")


def points_to_csv(points):
    """Result table; ``T_s`` is the interrogation time T in seconds."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_COLUMNS)
    for q in points:
        w.writerow([_fmt(q.phi), _fmt(q.T), _fmt(q.T_add), q.n, _fmt(q.delta_omega_g), _fmt(q.S),
                    _fmt(q.S_hz), _fmt(q.S_Q), _fmt(q.B_sens * 1e12)])
    return buf.getvalue()


def points_to_plot_csv(points):
    """Plot data: x = T (s), y = S_hz, sigma = S_hz / sqrt(2 (n - 1))."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_COLUMNS)
    for q in points:
        sigma = q.S_hz / math.sqrt(2 * (q.n - 1)) if q.n > 1 else math.inf
        w.writerow([_fmt(q.T), _fmt(q.S_hz), _fmt(sigma)])
    return buf.getvalue()
