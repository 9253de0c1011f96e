"""Dense linear algebra on the four-level hyperfine space.

Basis order is fixed throughout the package::

    0: |0>    (F=0)
    1: |-1>   (F=1, mF=-1)
    2: |0'>   (F=1, mF=0)
    3: |+1>   (F=1, mF=+1)

States are complex numpy vectors of length 4 and operators are 4x4 complex
arrays; angular frequencies are in rad/s and times in seconds.
"""

from typing import NamedTuple

import numpy as np

DIM = 4
LABELS = ("0", "-1", "0'", "+1")

HERMITIAN_RTOL = 1e-12
UNITARY_ATOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


KET_0 = _frozen([1, 0, 0, 0])
KET_M1 = _frozen([0, 1, 0, 0])
KET_0P = _frozen([0, 0, 1, 0])
KET_P1 = _frozen([0, 0, 0, 1])

_BY_LABEL = {"0": KET_0, "-1": KET_M1, "0'": KET_0P, "+1": KET_P1}


class Spectrum(NamedTuple):
    """Ascending eigenvalues and the matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def ket(label):
    """Bare basis ket by label (``"0"``, ``"-1"``, ``"0'"``, ``"+1"``)."""
    try:
        return _BY_LABEL[label]
    except KeyError:
        raise ValueError(f"unknown basis label {label!r}; expected one of {LABELS}") from None


def state(amplitudes, normalize=False):
    """Validate (and optionally normalise) a 4-component state vector."""
    psi = np.array(amplitudes, dtype=np.complex128).reshape(-1)
    if psi.shape != (DIM,):
        raise ValueError(f"state needs {DIM} amplitudes, got {psi.shape[0]}")
    norm = np.linalg.norm(psi)
    if normalize:
        if norm == 0:
            raise ValueError("cannot normalise the zero vector")
        return psi / norm
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state is not normalised (norm={norm:.12g})")
    return psi


def populations(psi):
    return np.abs(np.asarray(psi)) ** 2


def is_hermitian(M, rtol=HERMITIAN_RTOL):
    M = np.asarray(M)
    scale = max(np.abs(M).max(), 1e-300)
    return M.shape == (DIM, DIM) and np.abs(M - M.conj().T).max() <= rtol * scale


def is_unitary(U, atol=UNITARY_ATOL):
    U = np.asarray(U)
    return U.shape == (DIM, DIM) and np.abs(U.conj().T @ U - np.eye(DIM)).max() <= atol


def _check_hermitian(M):
    M = np.asarray(M, dtype=np.complex128)
    if M.shape != (DIM, DIM):
        raise ValueError(f"expected a {DIM}x{DIM} operator, got shape {M.shape}")
    if not is_hermitian(M):
        raise ValueError("operator is not Hermitian")
    return M


def fix_phases(vectors):
    """Rotate each column so its largest-magnitude component is real and positive.

    Ties in magnitude are broken towards the lowest index.
    """
    v = np.array(vectors, dtype=np.complex128)
    for j in range(v.shape[1]):
        mags = np.abs(v[:, j])
        i = int(np.argmax(mags >= mags.max() * (1 - 1e-12)))
        v[:, j] *= np.conj(v[i, j]) / mags[i]
        v[i, j] = v[i, j].real
    return v


def eig_hermitian(M):
    """Eigen-decomposition of a Hermitian operator.

    Returns a :class:`Spectrum` with ascending eigenvalues and eigenvectors as
    columns, each with its largest component real and positive.
    """
    M = _check_hermitian(M)
    w, v = np.linalg.eigh(0.5 * (M + M.conj().T))
    return Spectrum(w, fix_phases(v))


def expm_step(H, dt):
    """Propagator exp(-i H dt) for Hermitian H.

    The spectral sum is formed in extended precision so that repeated
    application conserves the norm to ~1e-16 per step.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    H = _check_hermitian(H)
    w, v = np.linalg.eigh(0.5 * (H + H.conj().T))
    V = v.astype(np.clongdouble)
    for j in range(DIM):
        for k in range(j):
            V[:, j] -= np.vdot(V[:, k], V[:, j]) * V[:, k]
        V[:, j] /= np.sqrt(np.vdot(V[:, j], V[:, j]).real)
    phase = np.exp(-1j * w.astype(np.longdouble) * np.longdouble(dt))
    return ((V * phase) @ V.conj().T).astype(np.complex128)


def apply(U, psi):
    return np.asarray(U, dtype=np.complex128) @ np.asarray(psi, dtype=np.complex128)


def inner(psi, chi):
    """Hermitian inner product <psi|chi> (conjugate-linear in the first slot)."""
    return complex(np.vdot(psi, chi))


def projector(psi):
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())
