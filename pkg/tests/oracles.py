"""Brute-force reference implementations, independent of the production
kernels. Everything here is plain scalar loops over float64."""

import numpy as np


def conv2d_ref(x, w, b, stride, pad):
    o_ch, i_ch, kh, kw = w.shape
    _, h, wd = x.shape
    out_h = (h + 2 * pad - kh) // stride + 1
    out_w = (wd + 2 * pad - kw) // stride + 1
    out = np.zeros((o_ch, out_h, out_w), dtype=np.float64)
    for o in range(o_ch):
        for y in range(out_h):
            for xx in range(out_w):
                acc = float(b[o])
                for i in range(i_ch):
                    for ky in range(kh):
                        for kx in range(kw):
                            iy = y * stride + ky - pad
                            ix = xx * stride + kx - pad
                            if 0 <= iy < h and 0 <= ix < wd:
                                acc += float(w[o, i, ky, kx]) * float(x[i, iy, ix])
                out[o, y, xx] = acc
    return out


def maxpool_ref(x):
    c, h, w = x.shape
    out = np.zeros((c, h // 2, w // 2), dtype=np.float64)
    arg = np.zeros((c, h // 2, w // 2), dtype=np.int64)
    for ch in range(c):
        for y in range(h // 2):
            for xx in range(w // 2):
                best = None
                for dy in range(2):
                    for dx in range(2):
                        v = float(x[ch, 2 * y + dy, 2 * xx + dx])
                        if best is None or v > best:
                            best = v
                            arg[ch, y, xx] = (ch * h * w
                                              + (2 * y + dy) * w + (2 * xx + dx))
                out[ch, y, xx] = best
    return out, arg


def dense_ref(x, w, b):
    m, n = w.shape
    out = np.zeros(m, dtype=np.float64)
    for i in range(m):
        acc = float(b[i])
        for j in range(n):
            acc += float(w[i, j]) * float(x[j])
        out[i] = acc
    return out


def bilinear_ref(plane, out_h, out_w):
    h, w = plane.shape
    out = np.zeros((out_h, out_w), dtype=np.float64)
    for y in range(out_h):
        sy = min(max((y + 0.5) * h / out_h - 0.5, 0.0), h - 1)
        y0 = int(np.floor(sy))
        y1 = min(y0 + 1, h - 1)
        fy = sy - y0
        for x in range(out_w):
            sx = min(max((x + 0.5) * w / out_w - 0.5, 0.0), w - 1)
            x0 = int(np.floor(sx))
            x1 = min(x0 + 1, w - 1)
            fx = sx - x0
            top = float(plane[y0, x0]) * (1 - fx) + float(plane[y0, x1]) * fx
            bot = float(plane[y1, x0]) * (1 - fx) + float(plane[y1, x1]) * fx
            out[y, x] = top * (1 - fy) + bot * fy
    return out


def channel_mean_ref(grads):
    k, h, w = grads.shape
    out = np.zeros(k, dtype=np.float64)
    for c in range(k):
        acc = 0.0
        for y in range(h):
            for x in range(w):
                acc += float(grads[c, y, x])
        out[c] = acc / (h * w)
    return out


def weighted_sum_ref(acts, alphas):
    k, h, w = acts.shape
    out = np.zeros((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for c in range(k):
                acc += float(alphas[c]) * float(acts[c, y, x])
            out[y, x] = max(acc, 0.0)
    return out
