# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled training kernels.

Same contract as logembed._inner_py: all randomness is pre-drawn by the
trainer, a kernel call is a deterministic function of its inputs, and every
update is the gradient taken at the pre-update parameter values.  The GIL is
released for the whole sweep so multiple worker threads can hammer the shared
model concurrently (lock-free updates, lost writes tolerated).
"""

from libc.stdint cimport int32_t, int64_t
from libc.stdlib cimport free, malloc
from libc.math cimport exp, log1p

COMPILED = True

cdef double LR_FLOOR = 1e-4


cdef inline double _sigmoid(double x) noexcept nogil:
    cdef double t
    if x >= 0.0:
        t = exp(-x)
        return 1.0 / (1.0 + t)
    t = exp(x)
    return t / (1.0 + t)


cdef inline double _log_sigmoid(double x) noexcept nogil:
    if x >= 0.0:
        return -log1p(exp(-x))
    return x - log1p(exp(x))


cdef inline double _lr_factor(int64_t done, int64_t total) noexcept nogil:
    cdef double f = 1.0 - (<double> done) / (<double> total)
    return f if f > LR_FLOOR else LR_FLOOR


def gine_batch(double[:, ::1] source, double[::1] w_source,
               int32_t[:, ::1] lists, double eta, bint compute_loss=False):
    """Apply one ranked-list gradient step per row of `lists` (gine mapping)."""
    cdef Py_ssize_t n_lists = lists.shape[0]
    cdef Py_ssize_t K = lists.shape[1]
    cdef Py_ssize_t d = source.shape[1]
    cdef Py_ssize_t b, i, j, k
    cdef int32_t node
    cdef double s, x, t, c
    cdef double total = 0.0

    cdef double *f = <double *> malloc(K * sizeof(double))
    cdef double *coef = <double *> malloc(K * sizeof(double))
    cdef double *wgrad = <double *> malloc(d * sizeof(double))
    if f == NULL or coef == NULL or wgrad == NULL:
        free(f); free(coef); free(wgrad)
        raise MemoryError

    with nogil:
        for b in range(n_lists):
            for k in range(K):
                node = lists[b, k]
                s = 0.0
                for j in range(d):
                    s += source[node, j] * w_source[j]
                f[k] = s
                coef[k] = 0.0
            for i in range(K):
                for k in range(i + 1, K):
                    x = f[i] - f[k]
                    t = _sigmoid(x) - 1.0
                    coef[i] += t
                    coef[k] -= t
                    if compute_loss:
                        total -= _log_sigmoid(x)
            # w gradient from the pre-update rows
            for j in range(d):
                wgrad[j] = 0.0
            for k in range(K):
                node = lists[b, k]
                c = coef[k]
                for j in range(d):
                    wgrad[j] += c * source[node, j]
            # rows first (they use the pre-update w), then w itself
            for k in range(K):
                node = lists[b, k]
                c = eta * coef[k]
                for j in range(d):
                    source[node, j] -= c * w_source[j]
            for j in range(d):
                w_source[j] -= eta * wgrad[j]

    free(f); free(coef); free(wgrad)
    return total


def log_epoch(double[:, ::1] source, double[:, ::1] target,
              double[::1] w_source, double[::1] w_target,
              int64_t[::1] indptr, int32_t[::1] neighbors,
              int64_t[::1] visit_order,
              int32_t[::1] negatives, double[::1] gate,
              int32_t[:, ::1] level_lists,
              double lam, double eta1, double eta2, int n_negative,
              bint decay, int64_t progress_base, int64_t progress_total,
              bint compute_loss=False):
    """One pass of the joint local+global update over `visit_order`."""
    cdef Py_ssize_t n_visits = visit_order.shape[0]
    cdef Py_ssize_t K = level_lists.shape[1]
    cdef Py_ssize_t d = source.shape[1]
    cdef Py_ssize_t idx, e, i, j, k, n
    cdef int64_t v, edges_done = progress_base, e_local = 0
    cdef int32_t ctx, node
    cdef double s0, c0, s, x, t, c, eff
    cdef double loss_sum = 0.0
    cdef long n_global = 0

    cdef double *f = <double *> malloc(K * sizeof(double))
    cdef double *coef = <double *> malloc(K * sizeof(double))
    cdef double *wgrad_s = <double *> malloc(d * sizeof(double))
    cdef double *wgrad_t = <double *> malloc(d * sizeof(double))
    cdef double *cgrad = <double *> malloc(d * sizeof(double))
    cdef double *cneg = <double *> malloc((n_negative if n_negative > 0 else 1) * sizeof(double))
    if (f == NULL or coef == NULL or wgrad_s == NULL or wgrad_t == NULL
            or cgrad == NULL or cneg == NULL):
        free(f); free(coef); free(wgrad_s); free(wgrad_t); free(cgrad); free(cneg)
        raise MemoryError

    with nogil:
        for idx in range(n_visits):
            v = visit_order[idx]
            for e in range(indptr[v], indptr[v + 1]):
                ctx = neighbors[e]
                eff = eta1 * _lr_factor(edges_done, progress_total) if decay else eta1
                edges_done += 1
                # scores first: every coefficient is taken at the pre-update point
                s0 = 0.0
                for j in range(d):
                    s0 += source[v, j] * target[ctx, j]
                c0 = _sigmoid(s0) - 1.0
                if compute_loss:
                    loss_sum -= _log_sigmoid(s0)
                for n in range(n_negative):
                    node = negatives[e_local * n_negative + n]
                    s = 0.0
                    for j in range(d):
                        s += source[v, j] * target[node, j]
                    cneg[n] = _sigmoid(s)
                    if compute_loss:
                        loss_sum -= _log_sigmoid(-s)
                # center gradient reads the target rows before they move
                for j in range(d):
                    cgrad[j] = c0 * target[ctx, j]
                for n in range(n_negative):
                    node = negatives[e_local * n_negative + n]
                    c = cneg[n]
                    for j in range(d):
                        cgrad[j] += c * target[node, j]
                # target rows use the still-untouched center row
                c = eff * c0
                for j in range(d):
                    target[ctx, j] -= c * source[v, j]
                for n in range(n_negative):
                    node = negatives[e_local * n_negative + n]
                    c = eff * cneg[n]
                    for j in range(d):
                        target[node, j] -= c * source[v, j]
                for j in range(d):
                    source[v, j] -= eff * cgrad[j]
                e_local += 1
            if gate[idx] < lam:
                eff = eta2 * _lr_factor(edges_done, progress_total) if decay else eta2
                for k in range(K):
                    node = level_lists[idx, k]
                    s = 0.0
                    for j in range(d):
                        s += source[node, j] * w_source[j] + target[node, j] * w_target[j]
                    f[k] = s
                    coef[k] = 0.0
                for i in range(K):
                    for k in range(i + 1, K):
                        x = f[i] - f[k]
                        t = _sigmoid(x) - 1.0
                        coef[i] += t
                        coef[k] -= t
                        if compute_loss:
                            loss_sum -= _log_sigmoid(x)
                for j in range(d):
                    wgrad_s[j] = 0.0
                    wgrad_t[j] = 0.0
                for k in range(K):
                    node = level_lists[idx, k]
                    c = coef[k]
                    for j in range(d):
                        wgrad_s[j] += c * source[node, j]
                        wgrad_t[j] += c * target[node, j]
                for k in range(K):
                    node = level_lists[idx, k]
                    c = eff * coef[k]
                    for j in range(d):
                        source[node, j] -= c * w_source[j]
                        target[node, j] -= c * w_target[j]
                for j in range(d):
                    w_source[j] -= eff * wgrad_s[j]
                    w_target[j] -= eff * wgrad_t[j]
                n_global += 1

    free(f); free(coef); free(wgrad_s); free(wgrad_t); free(cgrad); free(cneg)
    return loss_sum, n_global
