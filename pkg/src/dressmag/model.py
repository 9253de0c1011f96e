"""Hamiltonians for the microwave-dressed four-level system.

Conventions
-----------
* Bare energies (lab frame): |0> at omega0, |-1> at -lambda_minus, |0'> at 0,
  |+1> at +lambda_plus.
* A microwave of Rabi frequency ``Omega`` enters the lab Hamiltonian as
  ``Omega cos(w t + phase)`` on its transition, i.e. ``Omega/2`` after the
  rotating-wave approximation. Two such fields at relative phase pi couple
  |0> to |D> with strength ``Omega/sqrt(2)``, which is the dressed gap.
* ``omega_g`` is the Rabi frequency of the dressed |B> <-> |0'> oscillation,
  so the population returns as ``(1 + cos(omega_g T)) / 2``. A single rf field
  on |0'> <-> |+1> therefore needs a lab amplitude ``sqrt(2) omega_g``.
* The rotating frame carries an extra constant sign on |0>, chosen so that the
  dressing term reads ``+Omega/sqrt(2) (|D><0| + h.c.)`` and |u> sits at
  ``+Omega/sqrt(2)``. Populations are unaffected by this choice.
* Magnetic noise ``delta`` shifts |+1> by +delta and |-1> by -delta; the
  clock-state channel ``eps`` shifts |0'>.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg

SQRT2 = math.sqrt(2.0)
TARGETS = ("plus", "minus", "dual")

# validity of the single-rf picture: omega_g small against both the dressing
# and the splitting between the two microwave frequencies
SIGNAL_VALIDITY_RATIO = 100.0


@dataclass(frozen=True)
class SystemParams:
    """Static parameters of the lab Hamiltonian (all angular, rad/s).

    ``omega_p`` / ``omega_m`` default to the resonant microwave frequencies
    ``omega0 - lambda_plus`` and ``omega0 + lambda_minus``.
    """

    omega0: float
    lambda_plus: float
    lambda_minus: float
    Omega: float
    omega_p: float = None
    omega_m: float = None
    theta: float = math.pi
    bias_field: float = 1e-3

    def __post_init__(self):
        if self.Omega < 0:
            raise ValueError("dressing Rabi frequency Omega must be non-negative")
        if self.lambda_plus <= 0 or self.lambda_minus <= 0:
            raise ValueError("Zeeman splittings must be positive")
        if self.omega_p is None:
            object.__setattr__(self, "omega_p", self.omega0 - self.lambda_plus)
        if self.omega_m is None:
            object.__setattr__(self, "omega_m", self.omega0 + self.lambda_minus)

    @property
    def is_resonant(self):
        tol = 1e-12 * max(abs(self.omega0), 1.0)
        return (abs(self.omega_p - (self.omega0 - self.lambda_plus)) <= tol
                and abs(self.omega_m - (self.omega0 + self.lambda_minus)) <= tol)


@dataclass(frozen=True)
class SignalParams:
    """rf signal: dressed Rabi frequency, phase, detuning (rad/s) and addressed transition."""

    omega_g: float = 0.0
    phi: float = 0.0
    detuning: float = 0.0
    target: str = "plus"

    def __post_init__(self):
        if self.omega_g < 0:
            raise ValueError("signal Rabi frequency omega_g must be non-negative")
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}, got {self.target!r}")

    def is_valid_for(self, p):
        """True when omega_g is small enough for the dressed two-level picture."""
        if self.omega_g == 0:
            return True
        splitting = abs(p.omega_m - p.omega_p)
        return (self.omega_g * SIGNAL_VALIDITY_RATIO <= p.Omega
                and self.omega_g * SIGNAL_VALIDITY_RATIO <= splitting)


class DressedTransform(NamedTuple):
    """Unitary taking bare amplitudes (|0>,|-1>,|0'>,|+1>) to dressed (|B>,|0'>,|u>,|d>)."""

    U: np.ndarray

    labels = ("B", "0'", "u", "d")

    def to_dressed(self, psi):
        return self.U @ np.asarray(psi, dtype=np.complex128)

    def to_bare(self, amplitudes):
        return self.U.conj().T @ np.asarray(amplitudes, dtype=np.complex128)

    def operator_to_dressed(self, M):
        return self.U @ np.asarray(M) @ self.U.conj().T


def _dressed_rows():
    r = 1 / SQRT2
    B = np.array([0, r, 0, r])
    D = np.array([0, -r, 0, r])
    zero = np.array([1.0, 0, 0, 0])
    clock = np.array([0, 0, 1.0, 0])
    u = (D + zero) * r
    d = (D - zero) * r
    return np.array([B, clock, u, d], dtype=np.complex128)


_DRESSED = _dressed_rows()
_DRESSED.flags.writeable = False

KET_B = _DRESSED[0]
KET_D = linalg._frozen([0, -1 / SQRT2, 0, 1 / SQRT2])
KET_U = _DRESSED[2]
KET_DOWN = _DRESSED[3]


def dressed_transform():
    return DressedTransform(_DRESSED)


def _rf_amplitudes(target, omega_g):
    # lab-frame cosine amplitudes on (|+1><0'|, |-1><0'|)
    if target == "plus":
        return SQRT2 * omega_g, 0.0
    if target == "minus":
        return 0.0, SQRT2 * omega_g
    return omega_g / SQRT2, omega_g / SQRT2


def _rf_frequencies(p, s):
    return p.lambda_plus + s.detuning, p.lambda_minus - s.detuning


def bare_hamiltonians(p, s, times, delta=0.0):
    """Lab-frame Hamiltonians at each of ``times`` (vectorised; shape (n, 4, 4))."""
    t = np.atleast_1d(np.asarray(times, dtype=np.float64))
    delta = np.broadcast_to(np.asarray(delta, dtype=np.float64), t.shape)
    a_plus, a_minus = _rf_amplitudes(s.target, s.omega_g)
    f_plus, f_minus = _rf_frequencies(p, s)
    H = np.zeros((t.shape[0], 4, 4), dtype=np.complex128)
    H[:, 0, 0] = p.omega0
    H[:, 1, 1] = -p.lambda_minus - delta
    H[:, 3, 3] = p.lambda_plus + delta
    H[:, 1, 0] = p.Omega * np.cos(p.omega_m * t)
    H[:, 3, 0] = p.Omega * np.cos(p.omega_p * t + p.theta)
    H[:, 3, 2] = a_plus * np.cos(f_plus * t + s.phi)
    H[:, 1, 2] = a_minus * np.cos(f_minus * t + s.phi)
    H[:, 0, 1] = H[:, 1, 0]
    H[:, 0, 3] = H[:, 3, 0]
    H[:, 2, 3] = H[:, 3, 2]
    H[:, 2, 1] = H[:, 1, 2]
    return H


def build_bare_hamiltonian(p, s, t, delta=0.0):
    """Lab-frame Hamiltonian at time ``t`` with cosine microwave and rf drives."""
    return bare_hamiltonians(p, s, [t], delta)[0]


def frame_energies(p, s):
    """Diagonal of the frame that removes all carriers (|0> fixed at omega0)."""
    f_plus, f_minus = _rf_frequencies(p, s)
    e0 = p.omega0
    e_m = e0 - p.omega_m
    e_p = e0 - p.omega_p
    if s.target == "minus":
        e_clock = e_m + f_minus
    else:
        e_clock = e_p - f_plus
    return np.array([e0, e_m, e_clock, e_p])


_GAUGE = np.array([-1.0, 1.0, 1.0, 1.0])


def rotating_frame_hamiltonians(p, s, times, delta=0.0, eps=0.0):
    """Bare Hamiltonians in the carrier-free frame, counter-rotating terms kept.

    ``H_rot = R^H (H - E) R`` with ``R = G exp(-i E t)``, ``E`` from
    :func:`frame_energies` and ``G`` the constant sign on |0>.
    """
    t = np.atleast_1d(np.asarray(times, dtype=np.float64))
    E = frame_energies(p, s)
    H = bare_hamiltonians(p, s, t, delta)
    H[:, 2, 2] += eps
    H[:, np.arange(4), np.arange(4)] -= E
    phase = np.exp(1j * E[None, :] * t[:, None]) * _GAUGE
    return phase[:, :, None] * H * phase.conj()[:, None, :]


def rotating_frame_hamiltonian(p, s, t, delta=0.0, eps=0.0):
    return rotating_frame_hamiltonians(p, s, [t], delta, eps)[0]


def rwa_drive_hamiltonians(amplitudes, phases, target="plus", diag=None):
    """Rotating-frame Hamiltonians for per-step drive settings.

    Parameters
    ----------
    amplitudes : array (n, 3)
        Rabi frequencies of (mw_minus, mw_plus, rf_signal) in rad/s.
    phases : array (n, 3)
        Drive phases in radians (mw_plus phase plays the role of theta).
    target : str
        Which transition the rf addresses.
    diag : array (n, 4) or (4,), optional
        Extra diagonal terms (detunings, noise).

    Returns
    -------
    array (n, 4, 4)
    """
    amplitudes = np.atleast_2d(np.asarray(amplitudes, dtype=np.float64))
    phases = np.atleast_2d(np.asarray(phases, dtype=np.float64))
    n = amplitudes.shape[0]
    H = np.zeros((n, 4, 4), dtype=np.complex128)
    H[:, 1, 0] = -0.5 * amplitudes[:, 0] * np.exp(1j * phases[:, 0])
    H[:, 3, 0] = -0.5 * amplitudes[:, 1] * np.exp(1j * phases[:, 1])
    a_plus, a_minus = _rf_amplitudes(target, 1.0)
    H[:, 3, 2] = 0.5 * a_plus * amplitudes[:, 2] * np.exp(-1j * phases[:, 2])
    H[:, 1, 2] = 0.5 * a_minus * amplitudes[:, 2] * np.exp(1j * phases[:, 2])
    H = H + np.conj(np.transpose(H, (0, 2, 1)))
    if diag is not None:
        d = np.broadcast_to(np.asarray(diag, dtype=np.float64), (n, 4))
        H[:, np.arange(4), np.arange(4)] += d
    return H


def noise_diagonal(delta=0.0, eps=0.0, detuning=0.0):
    return np.array([0.0, -delta, detuning + eps, delta])


def build_rwa_hamiltonian(p, s, delta=0.0, eps=0.0):
    """Time-independent dressed Hamiltonian at theta = pi, phi = 0.

    ``Omega/sqrt(2) (|D><0| + h.c.) + omega_g/2 (|B><0'| + h.c.)
    + delta (|B><D| + h.c.) + (eps + detuning) |0'><0'|``, plus the
    off-resonant |D><0'| part when a single rf transition is addressed.
    """
    if not math.isclose(p.theta % (2 * math.pi), math.pi, abs_tol=1e-12):
        raise ValueError("the dressed Hamiltonian is defined for theta = pi only")
    if s.phi != 0:
        raise ValueError("the dressed Hamiltonian is defined for phi = 0 only")
    if not p.is_resonant:
        raise ValueError("the dressed Hamiltonian assumes resonant microwave dressing")
    H = rwa_drive_hamiltonians(
        [[p.Omega, p.Omega, s.omega_g]],
        [[0.0, p.theta, 0.0]],
        s.target,
        noise_diagonal(delta, eps, s.detuning),
    )
    return H[0]


class ProtectionResult(NamedTuple):
    b_branch_shift: float
    contamination_u: complex
    contamination_d: complex
    gap: float
    bare_shift_rate: float

    @property
    def sensitivity_ratio(self):
        """First-order dressed/bare shift ratio (0 means fully protected)."""
        if self.bare_shift_rate == 0:
            return 0.0
        return self.b_branch_shift / self.bare_shift_rate


def _noise_block(p, delta):
    H = build_rwa_hamiltonian(p, SignalParams(), delta=delta)
    return dressed_transform().operator_to_dressed(H)[np.ix_([0, 2, 3], [0, 2, 3])]


def protection_analysis(p, delta, steps=16):
    """Exact diagonalisation of the noise-coupled {|B>,|u>,|d>} block.

    The branch adiabatically connected to |B> is followed from ``delta = 0``
    in ``steps`` increments, keeping the eigenvector of largest overlap with
    the previous one (the branches never cross since the gap is at least
    ``Omega/sqrt(2)``). Returns its energy, its |u> and |d> amplitudes (phase
    fixed so the |B> amplitude is real positive) and the gap to the nearest
    other branch.
    """
    if p.Omega <= 0:
        raise ValueError("protection analysis needs Omega > 0")
    ref = np.array([1.0, 0.0, 0.0], dtype=np.complex128)
    for x in np.linspace(0.0, delta, steps + 1)[1:] if delta != 0 else [0.0]:
        w, v = np.linalg.eigh(_noise_block(p, x))
        k = int(np.argmax(np.abs(ref.conj() @ v)))
        ref = v[:, k]
    vec = ref * (np.conj(ref[0]) / abs(ref[0]))
    others = np.delete(w, k)
    gap = float(np.min(np.abs(others - w[k])))
    return ProtectionResult(
        b_branch_shift=float(w[k]),
        contamination_u=complex(vec[1]),
        contamination_d=complex(vec[2]),
        gap=gap,
        bare_shift_rate=2.0 * delta,
    )


def gap_closed_form(Omega, delta):
    return math.sqrt(Omega**2 / 2 + delta**2)


def contamination_closed_form(Omega, delta):
    return abs(delta) / math.sqrt(Omega**2 + 2 * delta**2)
