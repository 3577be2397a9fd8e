"""Pure NumPy implementations of the hot kernels.

Every routine here performs, per output element, the same sequence of IEEE
double operations as its counterpart in ``_kernels.pyx``; the two backends
are expected to agree bit for bit (except ``f1_enumerate``, whose reduction
order differs).

Double-double values are carried as ``(hi, lo)`` pairs of float64 arrays.
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a, b):
    s = a + b
    e = b - (s - a)
    return s, e


def split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    lo = a - hi
    return hi, lo


def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return quick_two_sum(p, e)


def dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e = e + al * b
    return quick_two_sum(p, e)


def _gather_index(n: int, m: int, taps: int) -> np.ndarray:
    j = np.arange(m)[None, :]
    i = np.arange(taps)[:, None]
    return (2 * j - i) % n


def conv_decimate(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    """y[j] = sum_i f[i] * x[(2j - i) mod n], accumulated tap by tap."""
    n = x.shape[0]
    m = n // 2
    idx = _gather_index(n, m, f.shape[0])
    acc = np.zeros(m)
    for i in range(f.shape[0]):
        acc = acc + f[i] * x[idx[i]]
    return acc


def dd_conv_decimate(xh: np.ndarray, xl: np.ndarray, f: np.ndarray):
    n = xh.shape[0]
    m = n // 2
    idx = _gather_index(n, m, f.shape[0])
    acc_h = np.zeros(m)
    acc_l = np.zeros(m)
    for i in range(f.shape[0]):
        ph, pl = dd_mul_d(xh[idx[i]], xl[idx[i]], f[i])
        acc_h, acc_l = dd_add(acc_h, acc_l, ph, pl)
    return acc_h, acc_l


def dd_sub(ah, al, bh, bl):
    return dd_add(ah, al, -bh, -bl)


def bit_reverse_permutation(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def dd_fft(rh, rl, ih, il, tw_rh, tw_rl, tw_ih, tw_il, inverse: bool):
    """In-order radix-2 decimation-in-time FFT in double-double arithmetic.

    ``tw_*`` hold exp(-2*pi*i*k/n) for k < n/2. No 1/n scaling is applied.
    Returns new arrays ``(rh, rl, ih, il)``.
    """
    n = rh.shape[0]
    perm = bit_reverse_permutation(n)
    rh, rl, ih, il = rh[perm], rl[perm], ih[perm], il[perm]
    if inverse:
        tw_ih, tw_il = -tw_ih, -tw_il
    length = 2
    while length <= n:
        half = length // 2
        step = n // length
        k = np.arange(half) * step
        wrh, wrl, wih, wil = tw_rh[k], tw_rl[k], tw_ih[k], tw_il[k]
        shape = (n // length, length)
        blocks = [a.reshape(shape) for a in (rh, rl, ih, il)]
        arh, arl, aih, ail = (b[:, :half] for b in blocks)
        brh, brl, bih, bil = (b[:, half:] for b in blocks)
        # t = w * b
        p1h, p1l = dd_mul(wrh, wrl, brh, brl)
        p2h, p2l = dd_mul(wih, wil, bih, bil)
        trh, trl = dd_add(p1h, p1l, -p2h, -p2l)
        p3h, p3l = dd_mul(wrh, wrl, bih, bil)
        p4h, p4l = dd_mul(wih, wil, brh, brl)
        tih, til = dd_add(p3h, p3l, p4h, p4l)
        urh, url = dd_add(arh, arl, trh, trl)
        uih, uil = dd_add(aih, ail, tih, til)
        vrh, vrl = dd_add(arh, arl, -trh, -trl)
        vih, vil = dd_add(aih, ail, -tih, -til)
        rh = np.concatenate([urh, vrh], axis=1).ravel()
        rl = np.concatenate([url, vrl], axis=1).ravel()
        ih = np.concatenate([uih, vih], axis=1).ravel()
        il = np.concatenate([uil, vil], axis=1).ravel()
        length *= 2
    return rh, rl, ih, il


def _tuple_tables(f: np.ndarray, z: int):
    taps = f.shape[0]
    count = taps**z
    digits = np.empty((count, z), dtype=np.int64)
    t = np.arange(count)
    for k in range(z):
        digits[:, k] = t % taps
        t = t // taps
    weights = digits @ (2 ** np.arange(z))
    vals = f[digits]
    partial = np.empty((count, z))
    for j in range(z):
        prod = np.ones(count)
        for k in range(z):
            if k != j:
                prod = prod * vals[:, k]
        partial[:, j] = prod
    return digits, weights, partial


def f1_enumerate(f: np.ndarray, z: int, same_scale: bool) -> float:
    """Literal pairwise enumeration of the first-order noise-gain sum.

    Sums prod_{k!=j} f[i_k] * prod_{k!=j'} f[i'_k] over tuple pairs (i, i')
    and excluded positions (j, j') with i_j == i'_j' and equal weighted index
    sums sum_k 2**k i_k. With ``same_scale`` only j == j' is enumerated.
    """
    digits, weights, partial = _tuple_tables(f, z)
    count = digits.shape[0]
    chunk = max(1, 4_000_000 // count)
    total = 0.0
    for a0 in range(0, count, chunk):
        a1 = min(a0 + chunk, count)
        ia, ib = np.nonzero(weights[a0:a1, None] == weights[None, :])
        ia += a0
        for j in range(z):
            for jp in range(z):
                if same_scale and j != jp:
                    continue
                hit = digits[ia, j] == digits[ib, jp]
                total += float(np.sum(partial[ia[hit], j] * partial[ib[hit], jp]))
    return total
