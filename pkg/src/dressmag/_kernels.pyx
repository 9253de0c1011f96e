# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled propagation kernels for the fixed four-level Hilbert space.

The Hermitian eigenproblem is solved with a cyclic complex Jacobi sweep on
stack-allocated 4x4 arrays, so the step loop never touches the Python heap.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, sqrtl, cosl, sinl

cnp.import_array()

ctypedef double complex cplx
ctypedef long double complex lcplx

DEF N = 4
DEF MAX_SWEEPS = 40
# warm-started eigenbases are rebuilt from scratch this often to stop
# unitarity drift from accumulating along long trajectories
DEF WARM_RESET = 64


cdef inline double cabs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline cplx conj(cplx z) noexcept nogil:
    return z.real - 1j * z.imag


cdef void _set_identity(cplx V[N][N]) noexcept nogil:
    cdef int i, j
    for i in range(N):
        for j in range(N):
            V[i][j] = 1.0 if i == j else 0.0


cdef int _jacobi(cplx A[N][N], cplx V[N][N]) noexcept nogil:
    # Diagonalises A in place (A <- G^H A G, V <- V G); returns sweeps used.
    cdef int sweep, p, q, k
    cdef double off, scale, ab, zeta, t, c, s
    cdef cplx ph, gpp, gpq, gqp, gqq, akp, akq, apk, aqk
    scale = 0.0
    for p in range(N):
        for q in range(N):
            scale += cabs2(A[p][q])
    if scale == 0.0:
        return 0
    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(N - 1):
            for q in range(p + 1, N):
                off += cabs2(A[p][q])
        if off <= 1e-32 * scale:
            return sweep
        for p in range(N - 1):
            for q in range(p + 1, N):
                ab = sqrt(cabs2(A[p][q]))
                if ab <= 1e-300:
                    continue
                ph = A[p][q] / ab
                zeta = (A[q][q].real - A[p][p].real) / (2.0 * ab)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                gpp = c
                gpq = s
                gqp = -s * conj(ph)
                gqq = c * conj(ph)
                for k in range(N):
                    akp = A[k][p]
                    akq = A[k][q]
                    A[k][p] = akp * gpp + akq * gqp
                    A[k][q] = akp * gpq + akq * gqq
                for k in range(N):
                    apk = A[p][k]
                    aqk = A[q][k]
                    A[p][k] = conj(gpp) * apk + conj(gqp) * aqk
                    A[q][k] = conj(gpq) * apk + conj(gqq) * aqk
                for k in range(N):
                    akp = V[k][p]
                    akq = V[k][q]
                    V[k][p] = akp * gpp + akq * gqp
                    V[k][q] = akp * gpq + akq * gqq
                A[p][q] = 0.0
                A[q][p] = 0.0
                A[p][p] = A[p][p].real
                A[q][q] = A[q][q].real
    return MAX_SWEEPS


cdef inline long double lcabs2(lcplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline lcplx lconj(lcplx z) noexcept nogil:
    return z.real - 1j * z.imag


cdef void _propagator(cplx A[N][N], cplx V[N][N], double width,
                      cplx U[N][N]) noexcept nogil:
    # U = V exp(-i diag(A) width) V^H with A already diagonal. V is
    # re-orthonormalised (modified Gram-Schmidt) and the spectral sum formed
    # in extended precision, which keeps U unitary to the last bit so that
    # long products of the same step do not drift in norm.
    cdef int i, j, k
    cdef long double ang, nrm
    cdef lcplx W[N][N]
    cdef lcplx ph[N]
    cdef lcplx acc, proj
    for i in range(N):
        for j in range(N):
            W[i][j] = V[i][j]
    for j in range(N):
        for k in range(j):
            proj = 0.0
            for i in range(N):
                proj = proj + lconj(W[i][k]) * W[i][j]
            for i in range(N):
                W[i][j] = W[i][j] - proj * W[i][k]
        nrm = 0.0
        for i in range(N):
            nrm += lcabs2(W[i][j])
        nrm = sqrtl(nrm)
        for i in range(N):
            W[i][j] = W[i][j] / nrm
    for k in range(N):
        ang = <long double>A[k][k].real * <long double>width
        ph[k] = cosl(ang) - 1j * sinl(ang)
    for i in range(N):
        for j in range(N):
            acc = 0.0
            for k in range(N):
                acc = acc + W[i][k] * ph[k] * lconj(W[j][k])
            U[i][j] = <cplx>acc


cdef void _propagator_fast(cplx A[N][N], cplx V[N][N], double width,
                           cplx U[N][N]) noexcept nogil:
    # double-precision variant for noisy steps, where every step differs and
    # rounding errors do not compound coherently
    cdef int i, j, k
    cdef double ang, nrm
    cdef cplx ph[N]
    cdef cplx acc, proj
    for j in range(N):
        for k in range(j):
            proj = 0.0
            for i in range(N):
                proj = proj + conj(V[i][k]) * V[i][j]
            for i in range(N):
                V[i][j] = V[i][j] - proj * V[i][k]
        nrm = 0.0
        for i in range(N):
            nrm += cabs2(V[i][j])
        nrm = sqrt(nrm)
        for i in range(N):
            V[i][j] = V[i][j] / nrm
    for k in range(N):
        ang = A[k][k].real * width
        ph[k] = cos(ang) - 1j * sin(ang)
    for i in range(N):
        for j in range(N):
            acc = 0.0
            for k in range(N):
                acc = acc + V[i][k] * ph[k] * conj(V[j][k])
            U[i][j] = acc


def eigh4(cplx[:, ::1] H):
    """Eigen-decomposition of one Hermitian 4x4 matrix (unsorted, raw phases)."""
    cdef cplx A[N][N]
    cdef cplx V[N][N]
    cdef int i, j
    if H.shape[0] != N or H.shape[1] != N:
        raise ValueError("expected a 4x4 matrix")
    for i in range(N):
        for j in range(N):
            A[i][j] = H[i, j]
    _set_identity(V)
    with nogil:
        _jacobi(A, V)
    w = np.empty(N, dtype=np.float64)
    vec = np.empty((N, N), dtype=np.complex128)
    cdef double[::1] wv = w
    cdef cplx[:, ::1] vv = vec
    for i in range(N):
        wv[i] = A[i][i].real
        for j in range(N):
            vv[i, j] = V[i][j]
    return w, vec


def expm4(cplx[:, ::1] H, double width):
    """exp(-i H width) for one Hermitian 4x4 matrix."""
    cdef cplx A[N][N]
    cdef cplx V[N][N]
    cdef cplx U[N][N]
    cdef int i, j
    for i in range(N):
        for j in range(N):
            A[i][j] = H[i, j]
    _set_identity(V)
    with nogil:
        _jacobi(A, V)
        _propagator(A, V, width, U)
    out = np.empty((N, N), dtype=np.complex128)
    cdef cplx[:, ::1] ov = out
    for i in range(N):
        for j in range(N):
            ov[i, j] = U[i][j]
    return out


cdef void _evolve_one(const cplx[:, :, ::1] hams, const long[::1] index,
                      const double[::1] widths, const double[::1] delta,
                      const double[::1] eps, bint noisy,
                      cplx[::1] psi, const long[::1] record,
                      cplx[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n_steps = widths.shape[0]
    cdef Py_ssize_t n_rec = record.shape[0]
    cdef Py_ssize_t k, r = 0
    cdef int i, j, l
    cdef long last_idx = -1
    cdef double last_width = -1.0
    cdef cplx A[N][N]
    cdef cplx B[N][N]
    cdef cplx V[N][N]
    cdef cplx W[N][N]
    cdef cplx U[N][N]
    cdef cplx tmp[N]
    cdef cplx acc
    cdef bint warm = False
    cdef int since_reset = 0
    for k in range(n_steps + 1):
        while r < n_rec and record[r] == k:
            for i in range(N):
                out[r, i] = psi[i]
            r += 1
        if k == n_steps:
            break
        if noisy or index[k] != last_idx or widths[k] != last_width:
            for i in range(N):
                for j in range(N):
                    A[i][j] = hams[index[k], i, j]
            if noisy:
                A[1][1] = A[1][1] - delta[k]
                A[3][3] = A[3][3] + delta[k]
                A[2][2] = A[2][2] + eps[k]
            if warm:
                # rotate into the previous eigenbasis: B = W^H A W
                for i in range(N):
                    for j in range(N):
                        acc = 0.0
                        for l in range(N):
                            acc = acc + A[i][l] * W[l][j]
                        B[i][j] = acc
                for i in range(N):
                    for j in range(N):
                        acc = 0.0
                        for l in range(N):
                            acc = acc + conj(W[l][i]) * B[l][j]
                        A[i][j] = acc
                for i in range(N):
                    for j in range(N):
                        V[i][j] = W[i][j]
            else:
                _set_identity(V)
            _jacobi(A, V)
            for i in range(N):
                for j in range(N):
                    W[i][j] = V[i][j]
            since_reset += 1
            warm = noisy and since_reset < WARM_RESET
            if not warm:
                since_reset = 0
            if noisy:
                _propagator_fast(A, V, widths[k], U)
            else:
                _propagator(A, V, widths[k], U)
            last_idx = index[k]
            last_width = widths[k]
        for i in range(N):
            acc = 0.0
            for j in range(N):
                acc = acc + U[i][j] * psi[j]
            tmp[i] = acc
        for i in range(N):
            psi[i] = tmp[i]


cdef void _evolve_shared(const cplx[:, :, ::1] hams, const long[::1] index,
                         const double[::1] widths, cplx[:, ::1] psi,
                         const long[::1] record, cplx[:, :, ::1] out) noexcept nogil:
    # noiseless batch: each step's propagator is built once for all trajectories
    cdef Py_ssize_t n_traj = psi.shape[0]
    cdef Py_ssize_t n_steps = widths.shape[0]
    cdef Py_ssize_t n_rec = record.shape[0]
    cdef Py_ssize_t k, t, r = 0
    cdef int i, j
    cdef long last_idx = -1
    cdef double last_width = -1.0
    cdef cplx A[N][N]
    cdef cplx V[N][N]
    cdef cplx U[N][N]
    cdef cplx tmp[N]
    cdef cplx acc
    for k in range(n_steps + 1):
        while r < n_rec and record[r] == k:
            for t in range(n_traj):
                for i in range(N):
                    out[t, r, i] = psi[t, i]
            r += 1
        if k == n_steps:
            break
        if index[k] != last_idx or widths[k] != last_width:
            for i in range(N):
                for j in range(N):
                    A[i][j] = hams[index[k], i, j]
            _set_identity(V)
            _jacobi(A, V)
            _propagator(A, V, widths[k], U)
            last_idx = index[k]
            last_width = widths[k]
        for t in range(n_traj):
            for i in range(N):
                acc = 0.0
                for j in range(N):
                    acc = acc + U[i][j] * psi[t, j]
                tmp[i] = acc
            for i in range(N):
                psi[t, i] = tmp[i]


def evolve(cplx[:, :, ::1] hams, long[::1] index, double[::1] widths,
           cplx[:, ::1] psi0, double[:, ::1] delta, double[:, ::1] eps,
           long[::1] record):
    """Propagate a batch of trajectories through piecewise-constant steps.

    Step ``k`` applies ``exp(-i (hams[index[k]] + N_k) widths[k])`` where the
    noise part ``N_k = diag(0, -delta, eps, +delta)`` is taken per trajectory.
    An empty ``delta`` (shape ``(0, 0)``) means noiseless. ``record`` holds
    sorted step counts at which the state is stored.
    """
    cdef Py_ssize_t n_traj = psi0.shape[0]
    cdef Py_ssize_t n_steps = widths.shape[0]
    cdef Py_ssize_t n_rec = record.shape[0]
    cdef bint noisy = delta.shape[0] > 0
    if index.shape[0] != n_steps:
        raise ValueError("index and widths differ in length")
    if noisy and (delta.shape[0] != n_traj or delta.shape[1] != n_steps
                  or eps.shape[0] != n_traj or eps.shape[1] != n_steps):
        raise ValueError("noise arrays do not match (n_traj, n_steps)")
    final = np.array(psi0, dtype=np.complex128, copy=True)
    recorded = np.zeros((n_traj, n_rec, N), dtype=np.complex128)
    cdef cplx[:, ::1] fv = final
    cdef cplx[:, :, ::1] rv = recorded
    cdef Py_ssize_t j
    with nogil:
        if noisy:
            for j in range(n_traj):
                _evolve_one(hams, index, widths, delta[j], eps[j], True,
                            fv[j], record, rv[j])
        else:
            _evolve_shared(hams, index, widths, fv, record, rv)
    return final, recorded
