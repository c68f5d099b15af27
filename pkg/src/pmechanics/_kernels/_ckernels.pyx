# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; signatures mirror ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, M_PI

cnp.import_array()


def twisted_convolution_direct(k1, k2, double dx, double dy, double hbar, int sign, double cutoff=0.0):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] a = np.ascontiguousarray(k1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] b = np.ascontiguousarray(k2, dtype=np.complex128)
    cdef Py_ssize_t nx = a.shape[0], ny = a.shape[1]
    cdef Py_ssize_t cx = nx // 2, cy = ny // 2
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros((nx, ny), dtype=np.complex128)
    cdef double theta = sign * M_PI * hbar * dx * dy
    cdef Py_ssize_t i, j, ip, jp, ti, tj
    cdef double complex v, w
    cdef double ph, ar, ai

    # source list of k1 entries above cutoff
    mask = np.abs(a) > cutoff
    src = np.argwhere(mask)
    cdef Py_ssize_t ns = src.shape[0], s
    cdef cnp.ndarray[cnp.intp_t, ndim=2] srcv = np.ascontiguousarray(src, dtype=np.intp)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] vals = np.ascontiguousarray(a[mask])

    for i in range(nx):
        for s in range(ns):
            ip = srcv[s, 0]
            ti = i - ip + cx
            if ti < 0 or ti >= nx:
                continue
            jp = srcv[s, 1]
            v = vals[s]
            for j in range(ny):
                tj = j - jp + cy
                if tj < 0 or tj >= ny:
                    continue
                ph = theta * ((i - cx) * (jp - cy) - (j - cy) * (ip - cx))
                w = v * b[ti, tj]
                ar = cos(ph)
                ai = sin(ph)
                out[i, j] = out[i, j] + w * (ar + 1j * ai)
    return out * (dx * dy)


def clifford_product_dense(a, b, index, factor):
    cdef const double[:, :] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, :] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef cnp.intp_t[:, :] idx = np.ascontiguousarray(index, dtype=np.intp)
    cdef const double[:, :] fac = np.ascontiguousarray(factor, dtype=np.float64)
    cdef Py_ssize_t m = av.shape[0], nb = av.shape[1]
    out_arr = np.zeros((m, nb), dtype=np.float64)
    cdef double[:, :] out = out_arr
    cdef Py_ssize_t r, x, y
    cdef double ax, f
    for r in range(m):
        for x in range(nb):
            ax = av[r, x]
            if ax == 0.0:
                continue
            for y in range(nb):
                f = fac[x, y]
                if f != 0.0:
                    out[r, idx[x, y]] += f * ax * bv[r, y]
    return out_arr


def kg_leapfrog(q, p0, p1, double a0, double a1, double mass2, double dt, double du,
                Py_ssize_t nsteps, Py_ssize_t record_every):
    cdef double[:] qv = np.array(q, dtype=np.float64)
    cdef double[:] p1v = np.array(p1, dtype=np.float64)
    cdef double[:] p0v = np.array(p0, dtype=np.float64)
    cdef Py_ssize_t N = qv.shape[0]
    cdef Py_ssize_t nrec = nsteps // record_every + 1
    q_rec = np.empty((nrec, N)); p1_rec = np.empty((nrec, N))
    p0m_rec = np.empty((nrec, N)); p0p_rec = np.empty((nrec, N))
    cdef double[:, :] qr = q_rec, p1r = p1_rec, p0mr = p0m_rec, p0pr = p0p_rec
    cdef double[:] half = np.empty(N), nxt = np.empty(N)
    cdef Py_ssize_t n, i, im, ip, r = 0
    cdef double ratio = a0 / a1

    for i in range(N):
        im = i - 1 if i > 0 else N - 1
        half[i] = p0v[i] - 0.5 * dt * (-mass2 * qv[i] - (p1v[i] - p1v[im]) / du)
    for n in range(nsteps + 1):
        for i in range(N):
            im = i - 1 if i > 0 else N - 1
            nxt[i] = half[i] + dt * (-mass2 * qv[i] - (p1v[i] - p1v[im]) / du)
        if n % record_every == 0:
            for i in range(N):
                qr[r, i] = qv[i]; p1r[r, i] = p1v[i]
                p0mr[r, i] = half[i]; p0pr[r, i] = nxt[i]
            r += 1
        if n == nsteps:
            break
        for i in range(N):
            ip = i + 1 if i < N - 1 else 0
            qv[i] = qv[i] + dt * a0 * nxt[i]
            p1v[i] = p1v[i] + dt * ratio * (nxt[ip] - nxt[i]) / du
        for i in range(N):
            half[i] = nxt[i]
    return q_rec, p1_rec, p0m_rec, p0p_rec
