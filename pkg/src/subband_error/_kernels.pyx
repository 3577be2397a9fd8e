# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Must stay operation-for-operation identical to
``_fallback.py``; compile without -ffast-math and with -ffp-contract=off."""

import numpy as np

cdef double SPLITTER = 134217729.0

ctypedef struct dd:
    double hi
    double lo


cdef inline dd two_sum(double a, double b) noexcept nogil:
    cdef dd r
    cdef double bb
    r.hi = a + b
    bb = r.hi - a
    r.lo = (a - (r.hi - bb)) + (b - bb)
    return r


cdef inline dd quick_two_sum(double a, double b) noexcept nogil:
    cdef dd r
    r.hi = a + b
    r.lo = b - (r.hi - a)
    return r


cdef inline dd two_prod(double a, double b) noexcept nogil:
    cdef dd r
    cdef double t, ah, al, bh, bl
    r.hi = a * b
    t = SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    r.lo = ((ah * bh - r.hi) + ah * bl + al * bh) + al * bl
    return r


cdef inline dd dd_add(double ah, double al, double bh, double bl) noexcept nogil:
    cdef dd s, t
    cdef double e
    s = two_sum(ah, bh)
    t = two_sum(al, bl)
    e = s.lo + t.hi
    s = quick_two_sum(s.hi, e)
    e = s.lo + t.lo
    return quick_two_sum(s.hi, e)


cdef inline dd dd_mul(double ah, double al, double bh, double bl) noexcept nogil:
    cdef dd p = two_prod(ah, bh)
    cdef double e = p.lo + (ah * bl + al * bh)
    return quick_two_sum(p.hi, e)


cdef inline dd dd_mul_d(double ah, double al, double b) noexcept nogil:
    cdef dd p = two_prod(ah, b)
    cdef double e = p.lo + al * b
    return quick_two_sum(p.hi, e)


cdef inline Py_ssize_t wrap(Py_ssize_t k, Py_ssize_t n) noexcept nogil:
    k = k % n
    if k < 0:
        k += n
    return k


def conv_decimate(const double[::1] x, const double[::1] f):
    cdef Py_ssize_t n = x.shape[0], taps = f.shape[0], m = n // 2
    cdef Py_ssize_t i, j
    cdef double acc
    out = np.empty(m)
    cdef double[::1] y = out
    with nogil:
        for j in range(m):
            acc = 0.0
            for i in range(taps):
                acc = acc + f[i] * x[wrap(2 * j - i, n)]
            y[j] = acc
    return out


def dd_conv_decimate(const double[::1] xh, const double[::1] xl, const double[::1] f):
    cdef Py_ssize_t n = xh.shape[0], taps = f.shape[0], m = n // 2
    cdef Py_ssize_t i, j, k
    cdef dd acc, p
    out_h = np.empty(m)
    out_l = np.empty(m)
    cdef double[::1] yh = out_h
    cdef double[::1] yl = out_l
    with nogil:
        for j in range(m):
            acc.hi = 0.0
            acc.lo = 0.0
            for i in range(taps):
                k = wrap(2 * j - i, n)
                p = dd_mul_d(xh[k], xl[k], f[i])
                acc = dd_add(acc.hi, acc.lo, p.hi, p.lo)
            yh[j] = acc.hi
            yl[j] = acc.lo
    return out_h, out_l


def dd_fft(rh_in, rl_in, ih_in, il_in,
           const double[::1] tw_rh, const double[::1] tw_rl,
           const double[::1] tw_ih, const double[::1] tw_il, bint inverse):
    cdef Py_ssize_t n = rh_in.shape[0]
    cdef Py_ssize_t bits = 0
    cdef Py_ssize_t a, b, r, length, half, step, start, k, t
    cdef double sign = -1.0 if inverse else 1.0
    cdef double wrh, wrl, wih, wil
    cdef dd p1, p2, p3, p4, tr, ti, ur, ui, vr, vi
    cdef double[::1] src_rh = np.ascontiguousarray(rh_in, dtype=np.float64)
    cdef double[::1] src_rl = np.ascontiguousarray(rl_in, dtype=np.float64)
    cdef double[::1] src_ih = np.ascontiguousarray(ih_in, dtype=np.float64)
    cdef double[::1] src_il = np.ascontiguousarray(il_in, dtype=np.float64)
    out_rh = np.empty(n)
    out_rl = np.empty(n)
    out_ih = np.empty(n)
    out_il = np.empty(n)
    cdef double[::1] rh = out_rh
    cdef double[::1] rl = out_rl
    cdef double[::1] ih = out_ih
    cdef double[::1] il = out_il
    while (1 << bits) < n:
        bits += 1
    with nogil:
        for a in range(n):
            r = 0
            for b in range(bits):
                r |= ((a >> b) & 1) << (bits - 1 - b)
            rh[a] = src_rh[r]
            rl[a] = src_rl[r]
            ih[a] = src_ih[r]
            il[a] = src_il[r]
        length = 2
        while length <= n:
            half = length // 2
            step = n // length
            start = 0
            while start < n:
                for k in range(half):
                    t = k * step
                    wrh = tw_rh[t]
                    wrl = tw_rl[t]
                    wih = sign * tw_ih[t]
                    wil = sign * tw_il[t]
                    a = start + k
                    b = a + half
                    p1 = dd_mul(wrh, wrl, rh[b], rl[b])
                    p2 = dd_mul(wih, wil, ih[b], il[b])
                    tr = dd_add(p1.hi, p1.lo, -p2.hi, -p2.lo)
                    p3 = dd_mul(wrh, wrl, ih[b], il[b])
                    p4 = dd_mul(wih, wil, rh[b], rl[b])
                    ti = dd_add(p3.hi, p3.lo, p4.hi, p4.lo)
                    ur = dd_add(rh[a], rl[a], tr.hi, tr.lo)
                    ui = dd_add(ih[a], il[a], ti.hi, ti.lo)
                    vr = dd_add(rh[a], rl[a], -tr.hi, -tr.lo)
                    vi = dd_add(ih[a], il[a], -ti.hi, -ti.lo)
                    rh[a] = ur.hi
                    rl[a] = ur.lo
                    ih[a] = ui.hi
                    il[a] = ui.lo
                    rh[b] = vr.hi
                    rl[b] = vr.lo
                    ih[b] = vi.hi
                    il[b] = vi.lo
                start += length
            length *= 2
    return out_rh, out_rl, out_ih, out_il


def f1_enumerate(const double[::1] f, int z, bint same_scale):
    cdef Py_ssize_t taps = f.shape[0]
    cdef Py_ssize_t count = taps ** z
    cdef Py_ssize_t a, b, j, jp, k, t
    cdef double total = 0.0, prod
    dig_arr = np.empty((count, z), dtype=np.int64)
    w_arr = np.zeros(count, dtype=np.int64)
    part_arr = np.empty((count, z))
    cdef long long[:, ::1] digits = dig_arr
    cdef long long[::1] weights = w_arr
    cdef double[:, ::1] partial = part_arr
    with nogil:
        for a in range(count):
            t = a
            for k in range(z):
                digits[a, k] = t % taps
                t = t // taps
                weights[a] += digits[a, k] << k
            for j in range(z):
                prod = 1.0
                for k in range(z):
                    if k != j:
                        prod = prod * f[digits[a, k]]
                partial[a, j] = prod
        for a in range(count):
            for b in range(count):
                if weights[a] != weights[b]:
                    continue
                for j in range(z):
                    for jp in range(z):
                        if same_scale and j != jp:
                            continue
                        if digits[a, j] == digits[b, jp]:
                            total += partial[a, j] * partial[b, jp]
    return total
