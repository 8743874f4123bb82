# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled backend: tension evaluation, exponentiated-gradient descent over
channel kernels, and exhaustive composition-grid sweeps.  Mirrors the contract
documented in the package __init__ and the numpy fallback."""

from libc.math cimport log, exp
from libc.string cimport memcpy

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double INV_LN2 = 1.4426950408889634
cdef double TINY = 1e-300
cdef double INF = float("inf")
cdef double ETA_GROWTH = 1.25
cdef double ETA_CAP_FACTOR = 8.0


cdef inline double phi2(double t) noexcept nogil:
    if t > 0.0:
        return -t * log(t) * INV_LN2
    return 0.0


cdef void _marginals(const double[:, ::1] p, const double[:, ::1] w,
                     double[:, ::1] pxq, double[:, ::1] pyq,
                     double[::1] pq) noexcept nogil:
    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1], nq = w.shape[1]
    cdef Py_ssize_t x, y, q, r
    cdef double pr, v
    for x in range(nx):
        for q in range(nq):
            pxq[x, q] = 0.0
    for y in range(ny):
        for q in range(nq):
            pyq[y, q] = 0.0
    for q in range(nq):
        pq[q] = 0.0
    r = 0
    for x in range(nx):
        for y in range(ny):
            pr = p[x, y]
            if pr > 0.0:
                for q in range(nq):
                    v = pr * w[r, q]
                    pxq[x, q] += v
                    pyq[y, q] += v
            r += 1
    for x in range(nx):
        for q in range(nq):
            pq[q] += pxq[x, q]


cdef void _terms(const double[:, ::1] p, const double[:, ::1] w,
                 double[:, ::1] pxq, double[:, ::1] pyq, double[::1] pq,
                 double h_xy, double h_x, double h_y,
                 double* i1, double* i2, double* i3) noexcept nogil:
    """Tension terms in bits; also leaves the q-marginals in the scratch."""
    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1], nq = w.shape[1]
    cdef Py_ssize_t x, y, q, r
    cdef double h_xq = 0.0, h_yq = 0.0, h_q = 0.0, h_xyq = h_xy
    cdef double pr, rh
    _marginals(p, w, pxq, pyq, pq)
    for x in range(nx):
        for q in range(nq):
            h_xq += phi2(pxq[x, q])
    for y in range(ny):
        for q in range(nq):
            h_yq += phi2(pyq[y, q])
    for q in range(nq):
        h_q += phi2(pq[q])
    r = 0
    for x in range(nx):
        for y in range(ny):
            pr = p[x, y]
            if pr > 0.0:
                rh = 0.0
                for q in range(nq):
                    rh += phi2(w[r, q])
                h_xyq += pr * rh
            r += 1
    i1[0] = (h_xy - h_x) + h_xq - h_xyq
    i2[0] = (h_xy - h_y) + h_yq - h_xyq
    i3[0] = h_xq + h_yq - h_q - h_xyq


cdef void _base_entropies(const double[:, ::1] p, double* h_xy, double* h_x,
                          double* h_y) noexcept nogil:
    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1]
    cdef Py_ssize_t x, y
    cdef double s, hxy = 0.0, hx = 0.0, hy = 0.0
    for x in range(nx):
        s = 0.0
        for y in range(ny):
            s += p[x, y]
            hxy += phi2(p[x, y])
        hx += phi2(s)
    for y in range(ny):
        s = 0.0
        for x in range(nx):
            s += p[x, y]
        hy += phi2(s)
    h_xy[0] = hxy
    h_x[0] = hx
    h_y[0] = hy


def tension_terms(object p_in, object w_in):
    cdef cnp.ndarray p_arr = np.ascontiguousarray(p_in, dtype=np.float64)
    cdef cnp.ndarray w_arr = np.ascontiguousarray(w_in, dtype=np.float64)
    cdef const double[:, ::1] p = p_arr
    cdef const double[:, ::1] w = w_arr
    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1], nq = w.shape[1]
    if w.shape[0] != nx * ny:
        raise ValueError("kernel rows do not match joint cells")
    pxq_arr = np.empty((nx, nq))
    pyq_arr = np.empty((ny, nq))
    pq_arr = np.empty(nq)
    cdef double[:, ::1] pxq = pxq_arr
    cdef double[:, ::1] pyq = pyq_arr
    cdef double[::1] pq = pq_arr
    cdef double h_xy, h_x, h_y, i1, i2, i3
    with nogil:
        _base_entropies(p, &h_xy, &h_x, &h_y)
        _terms(p, w, pxq, pyq, pq, h_xy, h_x, h_y, &i1, &i2, &i3)
    return i1, i2, i3


def descend(object p_in, cnp.ndarray w_arr, double l1, double l2, double l3,
            long max_iter, double step_tol):
    cdef cnp.ndarray p_arr = np.ascontiguousarray(p_in, dtype=np.float64)
    cdef const double[:, ::1] p = p_arr
    if not (w_arr.flags["C_CONTIGUOUS"] and w_arr.dtype == np.float64):
        raise ValueError("descend requires a C-contiguous float64 kernel")
    cdef double[:, ::1] w = w_arr
    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1], nq = w.shape[1]
    cdef Py_ssize_t nxy = nx * ny
    if w.shape[0] != nxy:
        raise ValueError("kernel rows do not match joint cells")
    cdef double lam_sum = l1 + l2 + l3
    if lam_sum <= 0.0:
        return 0.0, 0, True

    pxq_arr = np.empty((nx, nq))
    pyq_arr = np.empty((ny, nq))
    pq_arr = np.empty(nq)
    cand_arr = np.empty((nxy, nq))
    grad_arr = np.empty((nxy, nq))
    cdef double[:, ::1] pxq = pxq_arr
    cdef double[:, ::1] pyq = pyq_arr
    cdef double[::1] pq = pq_arr
    cdef double[:, ::1] cand = cand_arr
    cdef double[:, ::1] grad = grad_arr

    cdef double h_xy, h_x, h_y
    cdef double i1, i2, i3, f, f_new, delta, eta, eta0
    cdef double c13 = l1 + l3, c23 = l2 + l3
    cdef Py_ssize_t x, y, q, r
    cdef long iters = 0
    cdef bint converged = False, accepted
    cdef double t, tmax, z, pr

    with nogil:
        _base_entropies(p, &h_xy, &h_x, &h_y)
        _terms(p, w, pxq, pyq, pq, h_xy, h_x, h_y, &i1, &i2, &i3)
        f = l1 * i1 + l2 * i2 + l3 * i3
        eta0 = 1.0 / lam_sum
        eta = eta0
        while iters < max_iter:
            iters += 1
            # gradient of the scalarized objective w.r.t. each kernel row
            # (per-row additive constants dropped; rows are renormalized)
            r = 0
            for x in range(nx):
                for y in range(ny):
                    if p[x, y] > 0.0:
                        for q in range(nq):
                            t = w[r, q]
                            grad[r, q] = (
                                lam_sum * log(t if t > TINY else TINY)
                                - c13 * log(pxq[x, q] if pxq[x, q] > TINY else TINY)
                                - c23 * log(pyq[y, q] if pyq[y, q] > TINY else TINY)
                                + l3 * log(pq[q] if pq[q] > TINY else TINY)
                            )
                    r += 1
            accepted = False
            while True:
                r = 0
                for x in range(nx):
                    for y in range(ny):
                        pr = p[x, y]
                        if pr > 0.0:
                            tmax = -INF
                            for q in range(nq):
                                t = w[r, q]
                                t = log(t if t > TINY else TINY) - eta * grad[r, q]
                                cand[r, q] = t
                                if t > tmax:
                                    tmax = t
                            z = 0.0
                            for q in range(nq):
                                t = exp(cand[r, q] - tmax)
                                cand[r, q] = t
                                z += t
                            for q in range(nq):
                                cand[r, q] /= z
                        else:
                            for q in range(nq):
                                cand[r, q] = w[r, q]
                        r += 1
                _terms(p, cand, pxq, pyq, pq, h_xy, h_x, h_y, &i1, &i2, &i3)
                f_new = l1 * i1 + l2 * i2 + l3 * i3
                if f_new <= f + 1e-15:
                    accepted = True
                    break
                eta *= 0.5
                iters += 1
                if eta < 1e-14 * eta0 or iters >= max_iter:
                    break
            if not accepted:
                converged = True
                # restore marginals of the accepted kernel for callers
                _terms(p, w, pxq, pyq, pq, h_xy, h_x, h_y, &i1, &i2, &i3)
                break
            delta = f - f_new
            for r in range(nxy):
                for q in range(nq):
                    w[r, q] = cand[r, q]
            f = f_new
            eta = eta * ETA_GROWTH
            if eta > ETA_CAP_FACTOR * eta0:
                eta = ETA_CAP_FACTOR * eta0
            if delta < step_tol:
                converged = True
                break
    return f, iters, converged


def oracle_sweep(object p_in, object comps_in, object rowent_in,
                 object head_in, object lams_in, double z_tol):
    cdef cnp.ndarray p_arr = np.ascontiguousarray(p_in, dtype=np.float64)
    cdef cnp.ndarray comps_arr = np.ascontiguousarray(comps_in, dtype=np.float64)
    cdef cnp.ndarray rowent_arr = np.ascontiguousarray(rowent_in, dtype=np.float64)
    cdef cnp.ndarray head_arr = np.ascontiguousarray(head_in, dtype=np.int64)
    cdef cnp.ndarray lams_arr = np.ascontiguousarray(lams_in, dtype=np.float64)

    cdef const double[:, ::1] p = p_arr
    cdef const double[:, ::1] comps = comps_arr
    cdef const double[::1] rowent = rowent_arr
    cdef const long[::1] head = head_arr
    cdef const double[:, ::1] lams = lams_arr

    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1], nq = comps.shape[1]
    cdef Py_ssize_t m = comps.shape[0], k = lams.shape[0]
    cdef Py_ssize_t flat_n = nx * ny

    # positive-mass rows only: zero rows cannot influence the tension
    rows_list = [r for r in range(flat_n) if p_arr.ravel()[r] > 0.0]
    cdef Py_ssize_t n_rows = len(rows_list)
    pr_arr = np.array([p_arr.ravel()[r] for r in rows_list], dtype=np.float64)
    xof_arr = np.array([r // ny for r in rows_list], dtype=np.int64)
    yof_arr = np.array([r % ny for r in rows_list], dtype=np.int64)
    cdef double[::1] pr = pr_arr
    cdef long[::1] x_of = xof_arr
    cdef long[::1] y_of = yof_arr

    cdef double h_xy, h_x, h_y
    cdef double hygx, hxgy

    minima_arr = np.full(k, np.inf)
    argmin_arr = np.zeros((k, n_rows), dtype=np.int64)
    slice_argmin_arr = np.zeros(n_rows, dtype=np.int64)
    cdef double[::1] minima = minima_arr
    cdef long[:, ::1] argmin = argmin_arr
    cdef long[::1] slice_argmin = slice_argmin_arr
    cdef double slice_min = INF

    # per-depth snapshots of the running q-marginals
    pxq_arr = np.zeros((n_rows + 1, nx, nq))
    pyq_arr = np.zeros((n_rows + 1, ny, nq))
    hof_arr = np.zeros(n_rows + 1)
    pos_arr = np.zeros(n_rows, dtype=np.int64)
    choice_arr = np.zeros(n_rows, dtype=np.int64)
    cdef double[:, :, ::1] pxq = pxq_arr
    cdef double[:, :, ::1] pyq = pyq_arr
    cdef double[::1] hof = hof_arr
    cdef long[::1] pos = pos_arr
    cdef long[::1] choice = choice_arr

    cdef Py_ssize_t d, q, x, y, kk, c
    cdef Py_ssize_t n_head = head.shape[0]
    cdef long long n_leaves = 0
    cdef double h_xq, h_yq, h_q, h_xyq, i1, i2, i3, v, s, w_scaled
    cdef Py_ssize_t xr, yr

    with nogil:
        _base_entropies(p, &h_xy, &h_x, &h_y)
        hygx = h_xy - h_x
        hxgy = h_xy - h_y
        d = 0
        pos[0] = -1
        while d >= 0:
            pos[d] += 1
            if (d == 0 and pos[d] >= n_head) or (d > 0 and pos[d] >= m):
                d -= 1
                continue
            c = head[pos[d]] if d == 0 else pos[d]
            choice[d] = c
            # snapshot update: level d+1 = level d plus row d's contribution
            memcpy(&pxq[d + 1, 0, 0], &pxq[d, 0, 0], nx * nq * sizeof(double))
            memcpy(&pyq[d + 1, 0, 0], &pyq[d, 0, 0], ny * nq * sizeof(double))
            xr = x_of[d]
            yr = y_of[d]
            for q in range(nq):
                w_scaled = pr[d] * comps[c, q]
                pxq[d + 1, xr, q] += w_scaled
                pyq[d + 1, yr, q] += w_scaled
            hof[d + 1] = hof[d] + pr[d] * rowent[c]
            if d == n_rows - 1:
                n_leaves += 1
                h_xq = 0.0
                for x in range(nx):
                    for q in range(nq):
                        h_xq += phi2(pxq[d + 1, x, q])
                h_yq = 0.0
                for y in range(ny):
                    for q in range(nq):
                        h_yq += phi2(pyq[d + 1, y, q])
                h_q = 0.0
                for q in range(nq):
                    s = 0.0
                    for x in range(nx):
                        s += pxq[d + 1, x, q]
                    h_q += phi2(s)
                h_xyq = h_xy + hof[d + 1]
                i1 = hygx + h_xq - h_xyq
                i2 = hxgy + h_yq - h_xyq
                i3 = h_xq + h_yq - h_q - h_xyq
                for kk in range(k):
                    v = lams[kk, 0] * i1 + lams[kk, 1] * i2 + lams[kk, 2] * i3
                    if v < minima[kk]:
                        minima[kk] = v
                        for x in range(n_rows):
                            argmin[kk, x] = choice[x]
                if i3 <= z_tol:
                    v = i1 + i2
                    if v < slice_min:
                        slice_min = v
                        for x in range(n_rows):
                            slice_argmin[x] = choice[x]
            else:
                d += 1
                pos[d] = -1
    return minima_arr, argmin_arr, float(slice_min), slice_argmin_arr, int(n_leaves)
