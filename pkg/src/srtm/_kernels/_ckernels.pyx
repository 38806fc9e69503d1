# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled combine kernels for the associative scans.

Same contract as ``_pykernels``: batched operands with a leading batch axis.
The batch loop runs without the GIL so scan workers execute concurrently.
"""

import numpy as np

from libc.math cimport fabs
from libc.stdlib cimport malloc, free

NAME = "compiled"


def _check_shapes(batch, n, mats, vecs):
    for a in mats:
        if a.shape[0] != batch or a.shape[1] != n or a.shape[2] != n:
            raise ValueError(f"operand shape {tuple(a.shape)[:3]} does not match ({batch}, {n}, {n})")
    for v in vecs:
        if v.shape[0] != batch or v.shape[1] != n:
            raise ValueError(f"operand shape {tuple(v.shape)[:2]} does not match ({batch}, {n})")


cdef int _lu_solve(double* M, double* rhs, int n, int m, int* piv) noexcept nogil:
    """Solve M X = rhs in place (M is n x n, rhs is n x m, row-major).

    Returns 1 on a zero pivot.
    """
    cdef int i, j, c, p
    cdef double big, tmp, f
    for c in range(n):
        p = c
        big = fabs(M[c * n + c])
        for i in range(c + 1, n):
            if fabs(M[i * n + c]) > big:
                big = fabs(M[i * n + c])
                p = i
        if big == 0.0:
            return 1
        piv[c] = p
        if p != c:
            for j in range(n):
                tmp = M[c * n + j]; M[c * n + j] = M[p * n + j]; M[p * n + j] = tmp
            for j in range(m):
                tmp = rhs[c * m + j]; rhs[c * m + j] = rhs[p * m + j]; rhs[p * m + j] = tmp
        for i in range(c + 1, n):
            f = M[i * n + c] / M[c * n + c]
            M[i * n + c] = f
            for j in range(c + 1, n):
                M[i * n + j] -= f * M[c * n + j]
            for j in range(m):
                rhs[i * m + j] -= f * rhs[c * m + j]
    for c in range(n - 1, -1, -1):
        for j in range(m):
            tmp = rhs[c * m + j]
            for i in range(c + 1, n):
                tmp -= M[c * n + i] * rhs[i * m + j]
            rhs[c * m + j] = tmp / M[c * n + c]
    return 0


cdef inline void _matmul(const double* a, int ars, int acs, const double* b, int brs, int bcs,
                         double* out, int r, int k, int c) noexcept nogil:
    """out (r x c, row-major) = a (r x k) @ b (k x c) with explicit strides."""
    cdef int i, j, t
    cdef double acc
    for i in range(r):
        for j in range(c):
            acc = 0.0
            for t in range(k):
                acc += a[i * ars + t * acs] * b[t * brs + j * bcs]
            out[i * c + j] = acc


def filter_combine(double[:, :, ::1] Fi, double[:, ::1] di, double[:, :, ::1] Di,
                   double[:, ::1] etai, double[:, :, ::1] Ji,
                   double[:, :, ::1] Fj, double[:, ::1] dj, double[:, :, ::1] Dj,
                   double[:, ::1] etaj, double[:, :, ::1] Jj):
    cdef Py_ssize_t batch = Fi.shape[0]
    cdef int n = <int>Fi.shape[1]
    cdef int n2 = n * n
    cdef int mx = 2 * n + 1
    cdef int my = n + 1
    _check_shapes(batch, n, (Fi, Di, Ji, Fj, Dj, Jj), (di, etai, dj, etaj))
    F_out = np.empty((batch, n, n))
    d_out = np.empty((batch, n))
    D_out = np.empty((batch, n, n))
    eta_out = np.empty((batch, n))
    J_out = np.empty((batch, n, n))
    cdef double[:, :, ::1] F = F_out
    cdef double[:, ::1] d = d_out
    cdef double[:, :, ::1] D = D_out
    cdef double[:, ::1] eta = eta_out
    cdef double[:, :, ::1] J = J_out
    cdef double* work = <double*>malloc((3 * n2 + n * mx + n * my + n2) * sizeof(double))
    cdef int* piv = <int*>malloc(n * sizeof(int))
    if work == NULL or piv == NULL:
        free(work); free(piv)
        raise MemoryError()
    cdef double* M = work
    cdef double* Mt = work + n2
    cdef double* X = work + 2 * n2
    cdef double* Y = X + n * mx
    cdef double* T = Y + n * my
    cdef double* T2 = T + n2
    cdef Py_ssize_t b
    cdef int i, j, t, bad = 0
    cdef double acc
    with nogil:
        for b in range(batch):
            # M = I + Di Jj, Mt = I + Jj Di
            _matmul(&Di[b, 0, 0], n, 1, &Jj[b, 0, 0], n, 1, M, n, n, n)
            _matmul(&Jj[b, 0, 0], n, 1, &Di[b, 0, 0], n, 1, Mt, n, n, n)
            for i in range(n):
                M[i * n + i] += 1.0
                Mt[i * n + i] += 1.0
            # X = M^{-1} [Fi | Di | di + Di etaj]
            for i in range(n):
                acc = di[b, i]
                for j in range(n):
                    X[i * mx + j] = Fi[b, i, j]
                    X[i * mx + n + j] = Di[b, i, j]
                    acc += Di[b, i, j] * etaj[b, j]
                X[i * mx + 2 * n] = acc
            # Y = Mt^{-1} [Jj | etaj - Jj di]
            for i in range(n):
                acc = etaj[b, i]
                for j in range(n):
                    Y[i * my + j] = Jj[b, i, j]
                    acc -= Jj[b, i, j] * di[b, j]
                Y[i * my + n] = acc
            if _lu_solve(M, X, n, mx, piv) or _lu_solve(Mt, Y, n, my, piv):
                bad = 1
                break
            # F = Fj X_F ; d = Fj X_d + dj
            _matmul(&Fj[b, 0, 0], n, 1, X, mx, 1, &F[b, 0, 0], n, n, n)
            for i in range(n):
                acc = dj[b, i]
                for t in range(n):
                    acc += Fj[b, i, t] * X[t * mx + 2 * n]
                d[b, i] = acc
            # D = sym(Fj X_D Fj^T + Dj)
            _matmul(&Fj[b, 0, 0], n, 1, X + n, mx, 1, T, n, n, n)
            _matmul(T, n, 1, &Fj[b, 0, 0], 1, n, T2, n, n, n)
            for i in range(n):
                for j in range(n):
                    D[b, i, j] = 0.5 * ((T2[i * n + j] + Dj[b, i, j]) + (T2[j * n + i] + Dj[b, j, i]))
            # eta = Fi^T Y_eta + etai
            for i in range(n):
                acc = etai[b, i]
                for t in range(n):
                    acc += Fi[b, t, i] * Y[t * my + n]
                eta[b, i] = acc
            # J = sym(Fi^T Y_J Fi + Ji)
            _matmul(&Fi[b, 0, 0], 1, n, Y, my, 1, T, n, n, n)
            _matmul(T, n, 1, &Fi[b, 0, 0], n, 1, T2, n, n, n)
            for i in range(n):
                for j in range(n):
                    J[b, i, j] = 0.5 * ((T2[i * n + j] + Ji[b, i, j]) + (T2[j * n + i] + Ji[b, j, i]))
    free(work)
    free(piv)
    if bad:
        from ..errors import NumericalError
        raise NumericalError("singular (I + D_i J_j) in filter combine")
    return F_out, d_out, D_out, eta_out, J_out


def smoother_combine(double[:, :, ::1] Ei, double[:, ::1] gi, double[:, :, ::1] Si,
                     double[:, :, ::1] Ej, double[:, ::1] gj, double[:, :, ::1] Sj):
    cdef Py_ssize_t batch = Ei.shape[0]
    cdef int n = <int>Ei.shape[1]
    _check_shapes(batch, n, (Ei, Si, Ej, Sj), (gi, gj))
    E_out = np.empty((batch, n, n))
    g_out = np.empty((batch, n))
    S_out = np.empty((batch, n, n))
    cdef double[:, :, ::1] E = E_out
    cdef double[:, ::1] g = g_out
    cdef double[:, :, ::1] S = S_out
    cdef double* T = <double*>malloc(2 * n * n * sizeof(double))
    if T == NULL:
        raise MemoryError()
    cdef double* T2 = T + n * n
    cdef Py_ssize_t b
    cdef int i, j, t
    cdef double acc
    with nogil:
        for b in range(batch):
            _matmul(&Ei[b, 0, 0], n, 1, &Ej[b, 0, 0], n, 1, &E[b, 0, 0], n, n, n)
            for i in range(n):
                acc = gi[b, i]
                for t in range(n):
                    acc += Ei[b, i, t] * gj[b, t]
                g[b, i] = acc
            _matmul(&Ei[b, 0, 0], n, 1, &Sj[b, 0, 0], n, 1, T, n, n, n)
            _matmul(T, n, 1, &Ei[b, 0, 0], 1, n, T2, n, n, n)
            for i in range(n):
                for j in range(n):
                    S[b, i, j] = 0.5 * ((T2[i * n + j] + Si[b, i, j]) + (T2[j * n + i] + Si[b, j, i]))
    free(T)
    return E_out, g_out, S_out
