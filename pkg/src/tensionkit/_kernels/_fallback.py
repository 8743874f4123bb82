"""Pure-numpy backend. Same contract as the compiled core, much slower."""

import numpy as np

_TINY = 1e-300
_ETA_GROWTH = 1.25
_ETA_CAP_FACTOR = 8.0


def _phi2(t):
    """Elementwise -t*log2(t) with 0*log 0 = 0."""
    out = np.zeros_like(t, dtype=np.float64)
    mask = t > 0.0
    tm = t[mask]
    out[mask] = -tm * np.log2(tm)
    return out


def _base_entropies(p):
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    return _phi2(p).sum(), _phi2(px).sum(), _phi2(py).sum()


def _terms_from(p, w):
    nx, ny = p.shape
    nq = w.shape[1]
    w3 = w.reshape(nx, ny, nq)
    pxq = np.einsum("xy,xyq->xq", p, w3)
    pyq = np.einsum("xy,xyq->yq", p, w3)
    pq = pxq.sum(axis=0)
    h_xy, h_x, h_y = _base_entropies(p)
    h_xq = _phi2(pxq).sum()
    h_yq = _phi2(pyq).sum()
    h_q = _phi2(pq).sum()
    h_xyq = h_xy + float(p.ravel() @ _phi2(w).sum(axis=1))
    i1 = (h_xy - h_x) + h_xq - h_xyq
    i2 = (h_xy - h_y) + h_yq - h_xyq
    i3 = h_xq + h_yq - h_q - h_xyq
    return i1, i2, i3, pxq, pyq, pq


def tension_terms(p, w):
    p = np.ascontiguousarray(p, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    i1, i2, i3, *_ = _terms_from(p, w)
    return float(i1), float(i2), float(i3)


def descend(p, w, l1, l2, l3, max_iter, step_tol):
    p = np.ascontiguousarray(p, dtype=np.float64)
    nx, ny = p.shape
    nq = w.shape[1]
    lam_sum = l1 + l2 + l3
    if lam_sum <= 0.0:
        return 0.0, 0, True

    pos = (p.ravel() > 0.0)[:, None]
    x_of = np.repeat(np.arange(nx), ny)
    y_of = np.tile(np.arange(ny), nx)

    def objective(wm):
        i1, i2, i3, pxq, pyq, pq = _terms_from(p, wm)
        return l1 * i1 + l2 * i2 + l3 * i3, pxq, pyq, pq

    f, pxq, pyq, pq = objective(w)
    eta0 = 1.0 / lam_sum
    eta = eta0
    iters = 0
    converged = False
    while iters < max_iter:
        iters += 1
        lw = np.log(np.maximum(w, _TINY))
        g = (
            lam_sum * lw
            - (l1 + l3) * np.log(np.maximum(pxq, _TINY))[x_of]
            - (l2 + l3) * np.log(np.maximum(pyq, _TINY))[y_of]
            + l3 * np.log(np.maximum(pq, _TINY))[None, :]
        )
        accepted = False
        while True:
            t = lw - eta * g
            t -= t.max(axis=1, keepdims=True)
            cand = np.exp(t)
            cand /= cand.sum(axis=1, keepdims=True)
            cand = np.where(pos, cand, w)
            f_new, pxq_new, pyq_new, pq_new = objective(cand)
            if f_new <= f + 1e-15:
                accepted = True
                break
            eta *= 0.5
            iters += 1
            if eta < 1e-14 * eta0 or iters >= max_iter:
                break
        if not accepted:
            converged = True
            break
        delta = f - f_new
        w[:] = cand
        f, pxq, pyq, pq = f_new, pxq_new, pyq_new, pq_new
        eta = min(eta * _ETA_GROWTH, _ETA_CAP_FACTOR * eta0)
        if delta < step_tol:
            converged = True
            break
    return float(f), int(iters), bool(converged)


def oracle_sweep(p, comps, rowent, head_idx, lams, z_tol, chunk=1 << 15):
    p = np.ascontiguousarray(p, dtype=np.float64)
    comps = np.ascontiguousarray(comps, dtype=np.float64)
    rowent = np.ascontiguousarray(rowent, dtype=np.float64)
    head_idx = np.ascontiguousarray(head_idx, dtype=np.int64)
    lams = np.ascontiguousarray(lams, dtype=np.float64)

    nx, ny = p.shape
    nq = comps.shape[1]
    m = comps.shape[0]
    k = lams.shape[0]

    flat = p.ravel()
    rows = np.nonzero(flat > 0.0)[0]
    n_rows = rows.size
    pr = flat[rows]
    x_of = rows // ny
    y_of = rows % ny

    h_xy, h_x, h_y = _base_entropies(p)
    hygx = h_xy - h_x
    hxgy = h_xy - h_y

    allowed = [head_idx] + [np.arange(m, dtype=np.int64) for _ in range(n_rows - 1)]
    radices = np.array([a.size for a in allowed], dtype=np.int64)
    n_leaves = int(np.prod(radices))

    minima = np.full(k, np.inf)
    arg_flat = np.full(k, -1, dtype=np.int64)
    slice_min = np.inf
    slice_flat = -1

    for start in range(0, n_leaves, chunk):
        stop = min(start + chunk, n_leaves)
        idxs = np.arange(start, stop, dtype=np.int64)
        rem = idxs.copy()
        cidx = [None] * n_rows
        for r in range(n_rows - 1, -1, -1):
            cidx[r] = allowed[r][rem % radices[r]]
            rem //= radices[r]
        b = idxs.size
        pxq = np.zeros((b, nx, nq))
        pyq = np.zeros((b, ny, nq))
        hof = np.zeros(b)
        for r in range(n_rows):
            wc = comps[cidx[r]] * pr[r]
            pxq[:, x_of[r], :] += wc
            pyq[:, y_of[r], :] += wc
            hof += pr[r] * rowent[cidx[r]]
        h_xq = _phi2(pxq).sum(axis=(1, 2))
        h_yq = _phi2(pyq).sum(axis=(1, 2))
        h_q = _phi2(pxq.sum(axis=1)).sum(axis=1)
        h_xyq = h_xy + hof
        i1 = hygx + h_xq - h_xyq
        i2 = hxgy + h_yq - h_xyq
        i3 = h_xq + h_yq - h_q - h_xyq
        vals = np.column_stack([i1, i2, i3]) @ lams.T
        for kk in range(k):
            j = int(np.argmin(vals[:, kk]))
            if vals[j, kk] < minima[kk]:
                minima[kk] = vals[j, kk]
                arg_flat[kk] = idxs[j]
        feas = i3 <= z_tol
        if feas.any():
            sums = np.where(feas, i1 + i2, np.inf)
            j = int(np.argmin(sums))
            if sums[j] < slice_min:
                slice_min = float(sums[j])
                slice_flat = int(idxs[j])

    def decode(flat_index):
        out = np.zeros(n_rows, dtype=np.int64)
        if flat_index < 0:
            return out
        rem = flat_index
        for r in range(n_rows - 1, -1, -1):
            out[r] = allowed[r][rem % radices[r]]
            rem //= radices[r]
        return out

    argmin = np.stack([decode(int(i)) for i in arg_flat]) if k else np.zeros((0, n_rows), dtype=np.int64)
    slice_argmin = decode(slice_flat)
    return minima, argmin, float(slice_min), slice_argmin, n_leaves
