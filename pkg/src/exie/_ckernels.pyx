# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled search kernels.

Operator application, the max-min counter reduction and the fused
32-child expansion used by the search loop. Signatures mirror
``exie._pykernels``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, fabs

cnp.import_array()

BACKEND = "cython"

BRIGHTNESS, CONTRAST, GAMMA = 0, 1, 2
ALL_CHANNELS = -1


cdef inline double _clip01(double v) noexcept nogil:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


cdef void _means(const double* x, Py_ssize_t npix, double* mu) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0
    for i in range(npix):
        s0 += x[3 * i]
        s1 += x[3 * i + 1]
        s2 += x[3 * i + 2]
    mu[0] = s0 / npix
    mu[1] = s1 / npix
    mu[2] = s2 / npix


cdef void _log_table(const double* x, double* lx, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t j
    for j in range(n):
        lx[j] = log(x[j])


cdef void _apply(const double* x, const double* lx, double* out, Py_ssize_t npix,
                 int family, double param, int channel, const double* mu,
                 double* mu_out) noexcept nogil:
    # writes every channel of out and the channel means of the result;
    # lx holds log(x) and is only read for gamma
    cdef Py_ssize_t i, j
    cdef int c
    cdef double v
    cdef double s[3]
    s[0] = 0.0
    s[1] = 0.0
    s[2] = 0.0
    for i in range(npix):
        for c in range(3):
            j = 3 * i + c
            v = x[j]
            if channel < 0 or channel == c:
                if family == 0:
                    v = _clip01(v + param)
                elif family == 1:
                    v = _clip01(mu[c] + param * (v - mu[c]))
                else:
                    # exp(-inf) = 0 covers x = 0
                    v = _clip01(exp(param * lx[j]))
            out[j] = v
            s[c] += v
    mu_out[0] = s[0] / npix
    mu_out[1] = s[1] / npix
    mu_out[2] = s[2] / npix


cdef double _heuristic(const double* x, const double* y, const double* log_y,
                       Py_ssize_t npix, const double* mu, const double* hp,
                       double eps_log, double eps_eq, double* sqdist) noexcept nogil:
    # also accumulates the squared distance, in the same order as _sqdist
    cdef double inv_step = hp[0], lcu = hp[1], lcd = hp[2], lgu = hp[3], lgd = hp[4]
    cdef double hmax = 0.0, ssum = 0.0
    cdef double diff, d, m, nc, ng, dx, dy, ratio, xc, yc, lg
    cdef Py_ssize_t i, j
    cdef int c
    for i in range(npix):
        for c in range(3):
            j = 3 * i + c
            diff = x[j] - y[j]
            ssum += diff * diff
            d = fabs(diff)
            if d <= eps_eq:
                continue
            m = d * inv_step
            # min over families cannot exceed the brightness counter
            if m <= hmax:
                continue
            dx = x[j] - mu[c]
            dy = y[j] - mu[c]
            if dx * dy > 0.0 and fabs(dx) > eps_eq and fabs(dy) > eps_eq:
                ratio = dy / dx
                if ratio > 1.0:
                    nc = log(ratio) / lcu
                else:
                    nc = log(ratio) / lcd
                if nc < m:
                    m = nc
                if m <= hmax:
                    continue
            xc = x[j]
            if xc < eps_log:
                xc = eps_log
            elif xc > 1.0 - eps_log:
                xc = 1.0 - eps_log
            yc = y[j]
            if yc < eps_log:
                yc = eps_log
            elif yc > 1.0 - eps_log:
                yc = 1.0 - eps_log
            lg = log(log_y[j] / log(xc))
            if xc >= yc:
                ng = lg / lgu
            else:
                ng = lg / lgd
            if ng < 0.0:
                ng = 0.0
            if ng < m:
                m = ng
            if m > hmax:
                hmax = m
    sqdist[0] = ssum
    return hmax


cdef double _sqdist(const double* a, const double* b, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t j
    cdef double s = 0.0, d
    for j in range(n):
        d = a[j] - b[j]
        s += d * d
    return s


cdef void _clamped_logs(const double* y, double* out, Py_ssize_t n, double eps_log) noexcept nogil:
    cdef Py_ssize_t j
    cdef double v
    for j in range(n):
        v = y[j]
        if v < eps_log:
            v = eps_log
        elif v > 1.0 - eps_log:
            v = 1.0 - eps_log
        out[j] = log(v)


def _as_buf(img):
    return np.ascontiguousarray(img, dtype=np.float64)


def apply_op(img, int family, double param, int channel):
    if family < 0 or family > 2:
        raise ValueError(f"unknown operator family code {family}")
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] src = _as_buf(img)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] out = np.empty_like(src)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] lx = src
    cdef Py_ssize_t npix = src.shape[0] * src.shape[1]
    cdef double mu[3]
    cdef double mu_out[3]
    cdef const double* xp = <const double*> src.data
    if family == 2:
        lx = np.empty_like(src)
    with nogil:
        _means(xp, npix, mu)
        if family == 2:
            _log_table(xp, <double*> lx.data, src.size)
        _apply(xp, <const double*> lx.data, <double*> out.data, npix, family, param,
               channel, mu, mu_out)
    return out


def distance(a, b):
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] pa = _as_buf(a)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] pb = _as_buf(b)
    return sqrt(_sqdist(<const double*> pa.data, <const double*> pb.data, pa.size))


def heuristic(x, target, params, double eps_log, double eps_eq):
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] px = _as_buf(x)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] py = _as_buf(target)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hp = np.asarray(params, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] ly = np.empty_like(py)
    cdef Py_ssize_t npix = px.shape[0] * px.shape[1]
    cdef double h, sq
    cdef double mu[3]
    with nogil:
        _clamped_logs(<const double*> py.data, <double*> ly.data, py.size, eps_log)
        _means(<const double*> px.data, npix, mu)
        h = _heuristic(<const double*> px.data, <const double*> py.data,
                       <const double*> ly.data, npix, mu, <const double*> hp.data,
                       eps_log, eps_eq, &sq)
    return h


def expand(x, target, families, ops_params, channels, hparams, double eps_log,
           double eps_eq):
    """Score every child of ``x``: returns (h, distance) arrays, one entry per op."""
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] px = _as_buf(x)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] py = _as_buf(target)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hp = np.asarray(hparams, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] fam = np.asarray(families, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] chan = np.asarray(channels, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] par = np.asarray(ops_params, dtype=np.float64)
    cdef Py_ssize_t nops = fam.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hs = np.empty(nops)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ds = np.empty(nops)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] ly = np.empty_like(py)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] lx = np.empty_like(px)
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] child = np.empty_like(px)
    cdef Py_ssize_t npix = px.shape[0] * px.shape[1]
    cdef Py_ssize_t n = px.size
    cdef Py_ssize_t k
    cdef double mu[3]
    cdef double mu_child[3]
    cdef double sq
    cdef bint need_log = False
    cdef const double* xp = <const double*> px.data
    cdef const double* yp = <const double*> py.data
    cdef double* cp = <double*> child.data
    for k in range(nops):
        if fam[k] < 0 or fam[k] > 2:
            raise ValueError(f"unknown operator family code {fam[k]}")
        if fam[k] == 2:
            need_log = True
    with nogil:
        _clamped_logs(yp, <double*> ly.data, n, eps_log)
        _means(xp, npix, mu)
        if need_log:
            _log_table(xp, <double*> lx.data, n)
        for k in range(nops):
            _apply(xp, <const double*> lx.data, cp, npix, fam[k], par[k], chan[k], mu,
                   mu_child)
            hs[k] = _heuristic(cp, yp, <const double*> ly.data, npix, mu_child,
                               <const double*> hp.data, eps_log, eps_eq, &sq)
            ds[k] = sqrt(sq)
    return hs, ds
