# cython: language_level=3
"""Compiled versions of the hot kernels in ``_kernels_py``.

Same signatures and results as the numpy fallback; loops are fused so no
temporaries are allocated per element. Complex arrays are processed as
interleaved float64 views with explicit real arithmetic: C99 complex
operators would otherwise go through the slow Annex G library calls.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, fabs, INFINITY

cnp.import_array()

BACKEND = "cython"


def _as_pairs(z):
    """Contiguous float64 view of ``z`` plus the number of components (1 or 2)."""
    z = np.asarray(z)
    if np.iscomplexobj(z):
        zc = np.ascontiguousarray(z, dtype=np.complex128)
        return zc, zc.reshape(-1).view(np.float64), 2
    zr = np.ascontiguousarray(z, dtype=np.float64)
    return zr, zr.reshape(-1), 1


cdef void _soft(const double[::1] z, const double[::1] thr, bint scalar_thr, int k,
                double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, n = z.shape[0] // k
    cdef double m, t, s, re, im
    for i in range(n):
        t = thr[0] if scalar_thr else thr[i]
        if k == 1:
            re = z[i]
            m = fabs(re)
            out[i] = re * (m - t) / m if m > t else 0.0
        else:
            re = z[2 * i]
            im = z[2 * i + 1]
            m = sqrt(re * re + im * im)
            if m > t:
                s = (m - t) / m
                out[2 * i] = re * s
                out[2 * i + 1] = im * s
            else:
                out[2 * i] = 0.0
                out[2 * i + 1] = 0.0


def soft_threshold(z, thr):
    arr, zf, k = _as_pairs(z)
    out = np.empty_like(arr)
    of = out.reshape(-1).view(np.float64)
    scalar = np.ndim(thr) == 0
    if scalar:
        tf = np.array([float(thr)])
    else:
        tf = np.ascontiguousarray(np.broadcast_to(thr, arr.shape), dtype=np.float64).reshape(-1)
    _soft(zf, tf, scalar, k, of)
    return out


cdef void _banded(const double[::1] z, Py_ssize_t S, Py_ssize_t P, int k,
                  const double[::1] w, const double[::1] lam, double inv_mu,
                  double[::1] out) noexcept nogil:
    cdef Py_ssize_t s, i, e
    cdef double ls, t, m, re, im, sc
    for s in range(S):
        ls = lam[s] * inv_mu
        for i in range(P):
            e = s * P + i
            t = ls * w[e]
            if k == 1:
                re = z[e]
                m = fabs(re)
                out[e] = re * (m - t) / m if m > t else 0.0
            else:
                re = z[2 * e]
                im = z[2 * e + 1]
                m = sqrt(re * re + im * im)
                sc = (m - t) / m if m > t else 0.0
                out[2 * e] = re * sc
                out[2 * e + 1] = im * sc


def banded_soft_threshold(z, lam, w, inv_mu):
    arr, zf, k = _as_pairs(z)
    S = arr.shape[0]
    lf = np.ascontiguousarray(lam, dtype=np.float64).reshape(-1)
    if lf.shape[0] != S:
        raise ValueError("one lambda per subband is required")
    wf = np.ascontiguousarray(np.broadcast_to(w, arr.shape), dtype=np.float64).reshape(-1)
    out = np.empty_like(arr)
    _banded(zf, S, arr.size // S, k, wf, lf, float(inv_mu), out.reshape(-1).view(np.float64))
    return out


cdef void _group(const double[::1] x, Py_ssize_t C, Py_ssize_t P, int k,
                 const double[::1] thr, bint scalar_thr, const double[::1] mult,
                 double[::1] out) noexcept nogil:
    cdef Py_ssize_t c, i, j, off
    cdef double acc, m, t, scale, a
    for i in range(P):
        acc = 0.0
        for c in range(C):
            off = (c * P + i) * k
            for j in range(k):
                a = x[off + j]
                acc = acc + mult[c] * a * a
        m = sqrt(acc)
        t = thr[0] if scalar_thr else thr[i]
        scale = (m - t) / m if m > t else 0.0
        for c in range(C):
            off = (c * P + i) * k
            for j in range(k):
                out[off + j] = x[off + j] * scale


def group_soft_threshold(x, thr, multiplicity):
    arr, xf, k = _as_pairs(x)
    C = arr.shape[0]
    P = arr.size // C
    mult = np.ascontiguousarray(multiplicity, dtype=np.float64)
    if mult.shape[0] != C:
        raise ValueError("one multiplicity per component is required")
    scalar = np.ndim(thr) == 0
    if scalar:
        tf = np.array([float(thr)])
    else:
        tf = np.ascontiguousarray(np.broadcast_to(thr, arr.shape[1:]), dtype=np.float64).reshape(-1)
    out = np.empty_like(arr)
    _group(xf, C, P, k, tf, scalar, mult, out.reshape(-1).view(np.float64))
    return out


ctypedef struct cplx:
    double re
    double im


cdef inline cplx _c(double re, double im) noexcept nogil:
    cdef cplx z
    z.re = re
    z.im = im
    return z


cdef inline cplx _mul(cplx a, cplx b) noexcept nogil:
    return _c(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)


cdef inline cplx _sub(cplx a, cplx b) noexcept nogil:
    return _c(a.re - b.re, a.im - b.im)


cdef inline cplx _add(cplx a, cplx b) noexcept nogil:
    return _c(a.re + b.re, a.im + b.im)


cdef inline cplx _conj(cplx a) noexcept nogil:
    return _c(a.re, -a.im)


cdef inline cplx _at(const double[::1] v, Py_ssize_t i) noexcept nogil:
    return _c(v[2 * i], v[2 * i + 1])


cdef inline void _put(double[::1] v, Py_ssize_t i, cplx z) noexcept nogil:
    v[2 * i] = z.re
    v[2 * i + 1] = z.im


def cramer3(b1, b2, b3, b4, b5, b6, r1, r2, r3):
    shape = np.broadcast(b1, b2, b3, b4, b5, b6, r1, r2, r3).shape

    def prep(a):
        a = np.ascontiguousarray(np.broadcast_to(a, shape), dtype=np.complex128)
        return a.reshape(-1).view(np.float64)

    cdef const double[::1] B1 = prep(b1)
    cdef const double[::1] B2 = prep(b2)
    cdef const double[::1] B3 = prep(b3)
    cdef const double[::1] B4 = prep(b4)
    cdef const double[::1] B5 = prep(b5)
    cdef const double[::1] B6 = prep(b6)
    cdef const double[::1] R1 = prep(r1)
    cdef const double[::1] R2 = prep(r2)
    cdef const double[::1] R3 = prep(r3)
    cdef Py_ssize_t N = B1.shape[0] // 2
    x1 = np.empty(shape, dtype=np.complex128)
    x2 = np.empty(shape, dtype=np.complex128)
    x3 = np.empty(shape, dtype=np.complex128)
    det = np.empty(shape, dtype=np.complex128)
    cdef double[::1] X1 = x1.reshape(-1).view(np.float64)
    cdef double[::1] X2 = x2.reshape(-1).view(np.float64)
    cdef double[::1] X3 = x3.reshape(-1).view(np.float64)
    cdef double[::1] D = det.reshape(-1).view(np.float64)
    cdef Py_ssize_t i
    cdef cplx a, b, c, p, q, r, cp, cq, cr, m11, m21, m31, dt, s1, s2, s3, u, v, w, inv
    cdef double dd
    with nogil:
        for i in range(N):
            a = _at(B1, i); b = _at(B2, i); c = _at(B3, i)
            p = _at(B4, i); q = _at(B5, i); r = _at(B6, i)
            cp = _conj(p); cq = _conj(q); cr = _conj(r)
            s1 = _at(R1, i); s2 = _at(R2, i); s3 = _at(R3, i)
            m11 = _sub(_mul(b, c), _mul(cr, r))
            m21 = _sub(_mul(p, c), _mul(cr, q))
            m31 = _sub(_mul(p, r), _mul(b, q))
            dt = _add(_sub(_mul(a, m11), _mul(cp, m21)), _mul(cq, m31))
            u = _sub(_mul(s2, c), _mul(cr, s3))
            v = _sub(_mul(s2, r), _mul(b, s3))
            w = _sub(_mul(p, s3), _mul(s2, q))
            dd = dt.re * dt.re + dt.im * dt.im
            inv = _c(dt.re / dd, -dt.im / dd)
            _put(X1, i, _mul(_add(_sub(_mul(s1, m11), _mul(cp, u)), _mul(cq, v)), inv))
            _put(X2, i, _mul(_add(_sub(_mul(a, u), _mul(s1, m21)), _mul(cq, w)), inv))
            _put(X3, i, _mul(_add(_sub(_mul(a, _sub(_mul(b, s3), _mul(s2, r))), _mul(cp, w)),
                                  _mul(s1, m31)), inv))
            _put(D, i, dt)
    return x1, x2, x3, det



cdef inline double _hat_integral(double f0, double fm, double f1, double length) noexcept nogil:
    # Simpson's rule, exact for the quadratic restriction of a bilinear hat
    return (f0 + 4.0 * fm + f1) * length / 6.0


cdef inline void _insertion_sort(double* a, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double key
    for i in range(1, m):
        key = a[i]
        j = i - 1
        while j >= 0 and a[j] > key:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = key


def radon_triplets(int n, cos_t, sin_t, det_pos):
    cdef const double[::1] C = np.ascontiguousarray(cos_t, dtype=np.float64)
    cdef const double[::1] S = np.ascontiguousarray(sin_t, dtype=np.float64)
    cdef const double[::1] T = np.ascontiguousarray(det_pos, dtype=np.float64)
    cdef Py_ssize_t n_ang = C.shape[0]
    cdef Py_ssize_t n_det = T.shape[0]
    cdef double c0 = 0.5 * (n - 1)
    cdef double lo = -c0, hi = c0
    # worst case: 2n + 1 segments per ray, 4 weights each
    cdef Py_ssize_t cap = n_ang * n_det * (2 * n + 2) * 4
    rows = np.empty(cap, dtype=np.int64)
    cols = np.empty(cap, dtype=np.int64)
    vals = np.empty(cap, dtype=np.float64)
    cdef long long[::1] R = rows
    cdef long long[::1] K = cols
    cdef double[::1] V = vals
    buf = np.empty(2 * n + 2, dtype=np.float64)
    cdef double[::1] sb = buf
    cdef Py_ssize_t a, k, m, q, cnt = 0, ci, cj, base
    cdef long long ray
    cdef double ct, st, px, py, dx, dy, s_in, s_out, s0, s1, sv
    cdef double sa, sbv, seg, sm, xm, ym, fx0, fy0, fx1, fy1, fxm, fym
    cdef bint ok
    with nogil:
        for a in range(n_ang):
            ct = C[a]; st = S[a]
            dx = -st; dy = ct
            for k in range(n_det):
                px = T[k] * ct
                py = T[k] * st
                s_in = -INFINITY
                s_out = INFINITY
                ok = True
                if fabs(dx) < 1e-15:
                    if px < lo or px > hi:
                        ok = False
                else:
                    s0 = (lo - px) / dx
                    s1 = (hi - px) / dx
                    s_in = max(s_in, min(s0, s1))
                    s_out = min(s_out, max(s0, s1))
                if fabs(dy) < 1e-15:
                    if py < lo or py > hi:
                        ok = False
                else:
                    s0 = (lo - py) / dy
                    s1 = (hi - py) / dy
                    s_in = max(s_in, min(s0, s1))
                    s_out = min(s_out, max(s0, s1))
                if not ok or not (s_out > s_in):
                    continue
                m = 0
                sb[m] = s_in; m += 1
                sb[m] = s_out; m += 1
                if fabs(dx) >= 1e-15:
                    for q in range(n):
                        sv = (q - c0 - px) / dx
                        if sv > s_in and sv < s_out:
                            sb[m] = sv; m += 1
                if fabs(dy) >= 1e-15:
                    for q in range(n):
                        sv = (q - c0 - py) / dy
                        if sv > s_in and sv < s_out:
                            sb[m] = sv; m += 1
                _insertion_sort(&sb[0], m)
                ray = a * n_det + k
                for q in range(m - 1):
                    sa = sb[q]
                    sbv = sb[q + 1]
                    seg = sbv - sa
                    if seg <= 1e-12:
                        continue
                    sm = 0.5 * (sa + sbv)
                    xm = px + sm * dx - lo
                    ym = py + sm * dy - lo
                    cj = <Py_ssize_t>floor(xm)
                    ci = <Py_ssize_t>floor(ym)
                    if cj < 0: cj = 0
                    if cj > n - 2: cj = n - 2
                    if ci < 0: ci = 0
                    if ci > n - 2: ci = n - 2
                    fx0 = px + sa * dx - lo - cj
                    fy0 = py + sa * dy - lo - ci
                    fx1 = px + sbv * dx - lo - cj
                    fy1 = py + sbv * dy - lo - ci
                    fxm = 0.5 * (fx0 + fx1)
                    fym = 0.5 * (fy0 + fy1)
                    base = ci * n + cj
                    R[cnt] = ray; K[cnt] = base
                    V[cnt] = _hat_integral((1 - fx0) * (1 - fy0), (1 - fxm) * (1 - fym), (1 - fx1) * (1 - fy1), seg)
                    cnt += 1
                    R[cnt] = ray; K[cnt] = base + 1
                    V[cnt] = _hat_integral(fx0 * (1 - fy0), fxm * (1 - fym), fx1 * (1 - fy1), seg)
                    cnt += 1
                    R[cnt] = ray; K[cnt] = base + n
                    V[cnt] = _hat_integral((1 - fx0) * fy0, (1 - fxm) * fym, (1 - fx1) * fy1, seg)
                    cnt += 1
                    R[cnt] = ray; K[cnt] = base + n + 1
                    V[cnt] = _hat_integral(fx0 * fy0, fxm * fym, fx1 * fy1, seg)
                    cnt += 1
    return rows[:cnt].copy(), cols[:cnt].copy(), vals[:cnt].copy()
