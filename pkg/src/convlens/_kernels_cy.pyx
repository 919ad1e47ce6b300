# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: direct loops with a fixed per-output accumulation order.

Parallelism is only ever across independent output rows/channels, so results
are bit-identical for any thread count.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange

cnp.import_array()


def conv2d_forward(const float[:, :, ::1] x, const float[:, :, :, ::1] w,
                   const float[::1] b, int stride, int pad, int threads=1):
    cdef int o_ch = w.shape[0], i_ch = w.shape[1], kh = w.shape[2], kw = w.shape[3]
    cdef int h = x.shape[1], wd = x.shape[2]
    cdef int out_h = (h + 2 * pad - kh) // stride + 1
    cdef int out_w = (wd + 2 * pad - kw) // stride + 1
    out_arr = np.empty((o_ch, out_h, out_w), dtype=np.float32)
    cdef float[:, :, ::1] out = out_arr
    cdef int o, y, xx, i, ky, kx, iy, ix
    cdef float acc
    for o in prange(o_ch, nogil=True, schedule="static", num_threads=threads):
        for y in range(out_h):
            for xx in range(out_w):
                acc = b[o]
                for i in range(i_ch):
                    for ky in range(kh):
                        iy = y * stride + ky - pad
                        if iy < 0 or iy >= h:
                            continue
                        for kx in range(kw):
                            ix = xx * stride + kx - pad
                            if ix < 0 or ix >= wd:
                                continue
                            acc = acc + w[o, i, ky, kx] * x[i, iy, ix]
                out[o, y, xx] = acc
    return out_arr


def conv2d_input_grad(const float[:, :, ::1] gy, const float[:, :, :, ::1] w,
                      int stride, int pad, in_shape, int threads=1):
    cdef int o_ch = w.shape[0], i_ch = w.shape[1], kh = w.shape[2], kw = w.shape[3]
    cdef int h = in_shape[1], wd = in_shape[2]
    cdef int out_h = gy.shape[1], out_w = gy.shape[2]
    gx_arr = np.zeros((in_shape[0], h, wd), dtype=np.float32)
    cdef float[:, :, ::1] gx = gx_arr
    cdef int i, iy, ix, o, ky, kx, num, y, xx
    cdef float acc
    # gather form: each input element sums the output positions it fed
    for i in prange(i_ch, nogil=True, schedule="static", num_threads=threads):
        for iy in range(h):
            for ix in range(wd):
                acc = 0
                for o in range(o_ch):
                    for ky in range(kh):
                        num = iy + pad - ky
                        if num < 0 or num % stride != 0:
                            continue
                        y = num // stride
                        if y >= out_h:
                            continue
                        for kx in range(kw):
                            num = ix + pad - kx
                            if num < 0 or num % stride != 0:
                                continue
                            xx = num // stride
                            if xx >= out_w:
                                continue
                            acc = acc + w[o, i, ky, kx] * gy[o, y, xx]
                gx[i, iy, ix] = acc
    return gx_arr


def maxpool2x2(const float[:, :, ::1] x, int threads=1):
    cdef int c = x.shape[0], h = x.shape[1], wd = x.shape[2]
    cdef int oh = h // 2, ow = wd // 2
    out_arr = np.empty((c, oh, ow), dtype=np.float32)
    arg_arr = np.empty((c, oh, ow), dtype=np.int64)
    cdef float[:, :, ::1] out = out_arr
    cdef long long[:, :, ::1] arg = arg_arr
    cdef int ch, y, xx, dy, dx
    cdef float best, v
    cdef long long bidx
    for ch in prange(c, nogil=True, schedule="static", num_threads=threads):
        for y in range(oh):
            for xx in range(ow):
                best = x[ch, 2 * y, 2 * xx]
                bidx = <long long> ch * h * wd + (2 * y) * wd + 2 * xx
                for dy in range(2):
                    for dx in range(2):
                        v = x[ch, 2 * y + dy, 2 * xx + dx]
                        if v > best:
                            best = v
                            bidx = <long long> ch * h * wd + (2 * y + dy) * wd + (2 * xx + dx)
                out[ch, y, xx] = best
                arg[ch, y, xx] = bidx
    return out_arr, arg_arr


def dense_forward(const float[::1] x, const float[:, ::1] w, const float[::1] b,
                  int threads=1):
    cdef int m_dim = w.shape[0], n_dim = w.shape[1]
    out_arr = np.empty(m_dim, dtype=np.float32)
    cdef float[::1] out = out_arr
    cdef int m, n
    cdef float acc
    for m in prange(m_dim, nogil=True, schedule="static", num_threads=threads):
        acc = b[m]
        for n in range(n_dim):
            acc = acc + w[m, n] * x[n]
        out[m] = acc
    return out_arr


def dense_input_grad(const float[::1] gy, const float[:, ::1] w, int threads=1):
    cdef int m_dim = w.shape[0], n_dim = w.shape[1]
    out_arr = np.empty(n_dim, dtype=np.float32)
    cdef float[::1] out = out_arr
    cdef int m, n
    cdef float acc
    for n in prange(n_dim, nogil=True, schedule="static", num_threads=threads):
        acc = 0
        for m in range(m_dim):
            acc = acc + w[m, n] * gy[m]
        out[n] = acc
    return out_arr
