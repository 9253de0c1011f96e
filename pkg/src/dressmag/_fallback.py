"""Pure numpy implementation of the propagation kernels.

Same call signatures as the compiled ``_kernels`` module. Trajectories are
vectorised per step, so this path is reasonable for large batches and slow
for long single trajectories.
"""

import numpy as np

from .linalg import expm_step


def eigh4(H):
    w, v = np.linalg.eigh(np.asarray(H, dtype=np.complex128))
    return w, v


def expm4(H, width):
    return expm_step(np.asarray(H, dtype=np.complex128), width)


def _batch_propagators(H, widths):
    w, v = np.linalg.eigh(H)
    phase = np.exp(-1j * w * widths[:, None])
    return np.einsum("tik,tk,tjk->tij", v, phase, v.conj())


def evolve(hams, index, widths, psi0, delta, eps, record):
    hams = np.asarray(hams, dtype=np.complex128)
    index = np.asarray(index, dtype=np.int64)
    widths = np.asarray(widths, dtype=np.float64)
    record = np.asarray(record, dtype=np.int64)
    psi = np.array(psi0, dtype=np.complex128, copy=True)
    n_traj = psi.shape[0]
    n_steps = widths.shape[0]
    noisy = np.shape(delta)[0] > 0
    if index.shape[0] != n_steps:
        raise ValueError("index and widths differ in length")
    if noisy and (np.shape(delta) != (n_traj, n_steps) or np.shape(eps) != (n_traj, n_steps)):
        raise ValueError("noise arrays do not match (n_traj, n_steps)")

    recorded = np.zeros((n_traj, record.shape[0], 4), dtype=np.complex128)
    r = 0
    cache = {}
    for k in range(n_steps + 1):
        while r < record.shape[0] and record[r] == k:
            recorded[:, r, :] = psi
            r += 1
        if k == n_steps:
            break
        if noisy:
            H = np.repeat(hams[index[k]][None, :, :], n_traj, axis=0)
            H[:, 1, 1] -= delta[:, k]
            H[:, 3, 3] += delta[:, k]
            H[:, 2, 2] += eps[:, k]
            U = _batch_propagators(H, np.full(n_traj, widths[k]))
            psi = np.einsum("tij,tj->ti", U, psi)
        else:
            key = (int(index[k]), float(widths[k]))
            U = cache.get(key)
            if U is None:
                U = expm4(hams[index[k]], widths[k])
                cache[key] = U
            psi = psi @ U.T
    return psi, recorded
