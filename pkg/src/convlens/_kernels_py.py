"""Pure-numpy kernels: the fallback backend when the compiled extension is absent.

All functions take/return plain float32 ndarrays. Shape validation happens one
level up in ops.py; these assume well-formed inputs.

im2col keeps the (i, ky, kx) patch axis order so the matmul reduces in the
same nominal order as the direct-loop definition.
"""

import numpy as np


def _im2col(x, kh, kw, stride, pad, out_h, out_w):
    c = x.shape[0]
    if pad:
        x = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    cols = np.empty((c, kh, kw, out_h, out_w), dtype=np.float32)
    for ky in range(kh):
        for kx in range(kw):
            cols[:, ky, kx] = x[:, ky:ky + stride * out_h:stride,
                                kx:kx + stride * out_w:stride]
    return cols.reshape(c * kh * kw, out_h * out_w)


def conv2d_forward(x, w, b, stride, pad, threads=1):
    o, i, kh, kw = w.shape
    out_h = (x.shape[1] + 2 * pad - kh) // stride + 1
    out_w = (x.shape[2] + 2 * pad - kw) // stride + 1
    cols = _im2col(x, kh, kw, stride, pad, out_h, out_w)
    out = w.reshape(o, i * kh * kw) @ cols
    out += b[:, None]
    return np.ascontiguousarray(out.reshape(o, out_h, out_w))


def conv2d_input_grad(gy, w, stride, pad, in_shape, threads=1):
    o, i, kh, kw = w.shape
    c, h, wd = in_shape
    out_h, out_w = gy.shape[1], gy.shape[2]
    # (i*kh*kw, out_h*out_w) column gradient, then scatter-add back (col2im)
    cols = w.reshape(o, i * kh * kw).T @ gy.reshape(o, out_h * out_w)
    cols = cols.reshape(i, kh, kw, out_h, out_w)
    gx = np.zeros((c, h + 2 * pad, wd + 2 * pad), dtype=np.float32)
    for ky in range(kh):
        for kx in range(kw):
            gx[:, ky:ky + stride * out_h:stride,
               kx:kx + stride * out_w:stride] += cols[:, ky, kx]
    if pad:
        gx = gx[:, pad:pad + h, pad:pad + wd]
    return np.ascontiguousarray(gx)


def maxpool2x2(x, threads=1):
    c, h, w = x.shape
    oh, ow = h // 2, w // 2
    # windows laid out row-major so argmax ties break at the first occurrence
    win = x.reshape(c, oh, 2, ow, 2).transpose(0, 1, 3, 2, 4).reshape(c, oh, ow, 4)
    local = win.argmax(axis=3)
    out = np.take_along_axis(win, local[..., None], axis=3)[..., 0]
    ci, yi, xi = np.meshgrid(np.arange(c), np.arange(oh), np.arange(ow), indexing="ij")
    iy = 2 * yi + local // 2
    ix = 2 * xi + local % 2
    argmax = (ci * h * w + iy * w + ix).astype(np.int64)
    return np.ascontiguousarray(out), np.ascontiguousarray(argmax)


def dense_forward(x, w, b, threads=1):
    return np.ascontiguousarray(w @ x + b)


def dense_input_grad(gy, w, threads=1):
    return np.ascontiguousarray(w.T @ gy)
