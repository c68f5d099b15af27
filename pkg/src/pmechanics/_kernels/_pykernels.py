"""Pure numpy implementations of the hot kernels (fallback for ``_ckernels``)."""

import numpy as np


def twisted_convolution_direct(k1, k2, dx, dy, hbar, sign, cutoff=0.0):
    """Brute-force quadrature of the twisted convolution on a centred lattice.

    ``out[i, j] = dx*dy * sum_{i', j'} k1[i', j'] * k2[i - i' + c, j - j' + c]
    * exp(sign * 1j*pi*hbar * (x_i*y_j' - y_j*x_i'))`` with ``c = N // 2`` and
    ``x_i = (i - c)*dx``.  Entries of ``k1`` with modulus ``<= cutoff`` are skipped.
    """
    k1 = np.asarray(k1, dtype=np.complex128)
    k2 = np.asarray(k2, dtype=np.complex128)
    nx, ny = k1.shape
    cx, cy = nx // 2, ny // 2
    out = np.zeros((nx, ny), dtype=np.complex128)
    src_i, src_j = np.nonzero(np.abs(k1) > cutoff)
    if src_i.size == 0:
        return out
    vals = k1[src_i, src_j]
    xs = (src_i - cx).astype(np.float64)
    ys = (src_j - cy).astype(np.float64)
    theta = sign * np.pi * hbar * dx * dy
    jj = np.arange(ny)
    for i in range(nx):
        ti = i - src_i + cx
        ok_i = (ti >= 0) & (ti < nx)
        if not ok_i.any():
            continue
        v, xi, yi, si, sj, ti = vals[ok_i], xs[ok_i], ys[ok_i], src_i[ok_i], src_j[ok_i], ti[ok_i]
        tj = jj[:, None] - sj[None, :] + cy
        ok = (tj >= 0) & (tj < ny)
        tjc = np.where(ok, tj, 0)
        k2v = np.where(ok, k2[ti[None, :], tjc], 0.0)
        m = (i - cx) * yi[None, :] - (jj[:, None] - cy) * xi[None, :]
        out[i] = (k2v * v[None, :] * np.exp(1j * theta * m)).sum(axis=1)
    return out * (dx * dy)


def clifford_product_dense(a, b, index, factor):
    """Row-wise geometric product of dense multivectors ``a``, ``b`` of shape ``(M, 2**d)``."""
    nb = a.shape[1]
    out = np.zeros_like(a)
    for ba in range(nb):
        col_a = a[:, ba]
        if not col_a.any():
            continue
        for bb in range(nb):
            f = factor[ba, bb]
            if f != 0.0:
                out[:, index[ba, bb]] += f * col_a * b[:, bb]
    return out


def kg_leapfrog(q, p0, p1, a0, a1, mass2, dt, du, nsteps, record_every):
    """Staggered leapfrog for the 1+1 DW system of a Klein-Gordon type Hamiltonian.

    Fields on a periodic row of sites: ``q[i]`` and ``p0[i]`` at sites,
    ``p1[i]`` at the half-site ``i + 1/2``.  Returns recorded
    ``(q^n, p1^n, p0^{n-1/2}, p0^{n+1/2})`` for every ``record_every``-th step.
    """
    q = np.array(q, dtype=np.float64)
    p1 = np.array(p1, dtype=np.float64)
    p0 = np.array(p0, dtype=np.float64)

    def force(q, p1):
        return -mass2 * q - (p1 - np.roll(p1, 1)) / du

    p0_half = p0 - 0.5 * dt * force(q, p1)
    nrec = nsteps // record_every + 1
    shape = (nrec, q.size)
    q_rec, p1_rec = np.empty(shape), np.empty(shape)
    p0m_rec, p0p_rec = np.empty(shape), np.empty(shape)
    r = 0
    for n in range(nsteps + 1):
        p0_next = p0_half + dt * force(q, p1)
        if n % record_every == 0:
            q_rec[r], p1_rec[r] = q, p1
            p0m_rec[r], p0p_rec[r] = p0_half, p0_next
            r += 1
        if n == nsteps:
            break
        q = q + dt * a0 * p0_next
        p1 = p1 + dt * (a0 / a1) * (np.roll(p0_next, -1) - p0_next) / du
        p0_half = p0_next
    return q_rec, p1_rec, p0m_rec, p0p_rec
