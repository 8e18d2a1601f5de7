"""numba kernels; see ``kernels`` for the calling convention."""

import math

import numpy as np
from numba import njit, types
from numba.extending import intrinsic

from ._consts import ADAM_EPS, LOG_EPS, SGD, SQUARED

# no nnan/ninf: divergence detection relies on inf/nan propagating
_FASTMATH = {"nsz", "arcp", "contract", "afn", "reassoc"}
_JIT = dict(nogil=True, cache=True, fastmath=_FASTMATH, error_model="numpy")

_LOG2E = 1.4426950408889634
_LN2_HI = 0.6931471803691238
_LN2_LO = 1.9082149292705877e-10


@intrinsic
def _bits_to_float(typingctx, x):
    sig = types.float64(types.int64)

    def codegen(context, builder, signature, args):
        return builder.bitcast(args[0], context.get_value_type(types.float64))

    return sig, codegen


@njit(inline="always", fastmath=_FASTMATH, error_model="numpy")
def _exp_nonpos(x):
    # exp(x) for x in [-40, 0]: Cody-Waite reduction, degree-11 Taylor, exponent by bit assembly
    nf = math.floor(x * _LOG2E + 0.5)
    r = (x - nf * _LN2_HI) - nf * _LN2_LO
    p = 1.0 + r * (1.0 + r * (1.0 / 2 + r * (1.0 / 6 + r * (1.0 / 24 + r * (
        1.0 / 120 + r * (1.0 / 720 + r * (1.0 / 5040 + r * (1.0 / 40320 + r * (
            1.0 / 362880 + r * (1.0 / 3628800 + r * (1.0 / 39916800)))))))))))
    return p * _bits_to_float((np.int64(nf) + 1023) << 52)


@njit(inline="always", fastmath=_FASTMATH, error_model="numpy")
def _sigma(z):
    # (1 - e^{-z}) / (1 + e^{-z}) == tanh(z / 2); |z| > 40 saturates in double
    e = _exp_nonpos(-min(abs(z), 40.0))
    return math.copysign((1.0 - e) / (1.0 + e), z)


@njit(inline="always", fastmath=_FASTMATH, error_model="numpy")
def _loss(h, s, kind):
    if kind == SQUARED:
        return (h - s) * (h - s)
    hc = min(max(h, -1.0 + LOG_EPS), 1.0 - LOG_EPS)
    if s > 0:
        return -math.log(0.5 * (1.0 + hc))
    return -math.log(0.5 * (1.0 - hc))


@njit(inline="always", fastmath=_FASTMATH, error_model="numpy")
def _dloss(h, s, kind):
    if kind == SQUARED:
        return 2.0 * (h - s)
    if h <= -1.0 + LOG_EPS or h >= 1.0 - LOG_EPS:
        return 0.0
    # d/dh of -log((1 + s h) / 2)
    return -s / (1.0 + s * h)


@njit(**_JIT)
def _hidden(x, AT, b, out):
    q, k = AT.shape
    for i in range(k):
        out[i] = b[i]
    for d in range(q):
        xd = x[d]
        for i in range(k):
            out[i] += AT[d, i] * xd
    for i in range(k):
        out[i] = _sigma(out[i])


@njit(**_JIT)
def _output(sig, c, c0):
    h = c0
    for i in range(sig.shape[0]):
        h += c[i] * sig[i]
    return h


@njit(**_JIT)
def nb_sigma(z):
    out = np.empty_like(z)
    for i in range(z.shape[0]):
        out[i] = _sigma(z[i])
    return out


@njit(**_JIT)
def nb_predict(X, AT, b, c, c0):
    n = X.shape[0]
    k = b.shape[0]
    out = np.empty(n)
    sig = np.empty(k)
    for j in range(n):
        _hidden(X[j], AT, b, sig)
        out[j] = _output(sig, c, c0[0])
    return out


@njit(**_JIT)
def nb_losses(h, s, kind):
    out = np.empty(h.shape[0])
    for j in range(h.shape[0]):
        out[j] = _loss(h[j], s[j], kind)
    return out


@njit(**_JIT)
def nb_batch_grad(X, s, order, lo, hi, AT, b, c, c0, kind, gAT, gb, gc, sig, gs):
    """Gradient of the mean loss over ``X[order[lo:hi]]``; returns d/dc0."""
    q, k = AT.shape
    gAT[:, :] = 0.0
    gb[:] = 0.0
    gc[:] = 0.0
    g0 = 0.0
    inv = 1.0 / (hi - lo)
    for jj in range(lo, hi):
        j = order[jj]
        x = X[j]
        _hidden(x, AT, b, sig)
        h = _output(sig, c, c0[0])
        g = _dloss(h, s[j], kind) * inv
        g0 += g
        for i in range(k):
            si = sig[i]
            gc[i] += g * si
            gi = g * c[i] * 0.5 * (1.0 - si * si)
            gs[i] = gi
            gb[i] += gi
        for d in range(q):
            xd = x[d]
            for i in range(k):
                gAT[d, i] += gs[i] * xd
    return g0


@njit(**_JIT)
def _step(p, g, m, v, lr, lr_t, b1, b2, opt):
    if opt == SGD:
        for i in range(p.shape[0]):
            p[i] -= lr * g[i]
    else:
        for i in range(p.shape[0]):
            m[i] = b1 * m[i] + (1.0 - b1) * g[i]
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i]
            p[i] -= lr_t * m[i] / (math.sqrt(v[i]) + ADAM_EPS)


@njit(**_JIT)
def nb_train_epoch(X, s, order, AT, b, c, c0, mAT, vAT, mb, vb, mc, vc, m0, v0,
                   step, batch_size, lr, b1, b2, opt, kind):
    """One shuffled pass over the data; returns the updated step counter."""
    q, k = AT.shape
    n = order.shape[0]
    gAT = np.empty((q, k))
    gb = np.empty(k)
    gc = np.empty(k)
    g0 = np.empty(1)
    sig = np.empty(k)
    gs = np.empty(k)
    flatAT = AT.reshape(-1)
    flat_gAT = gAT.reshape(-1)
    flat_mAT = mAT.reshape(-1)
    flat_vAT = vAT.reshape(-1)
    for lo in range(0, n, batch_size):
        hi = min(n, lo + batch_size)
        g0[0] = nb_batch_grad(X, s, order, lo, hi, AT, b, c, c0, kind, gAT, gb, gc, sig, gs)
        step += 1
        lr_t = lr * math.sqrt(1.0 - b2 ** step) / (1.0 - b1 ** step)
        _step(flatAT, flat_gAT, flat_mAT, flat_vAT, lr, lr_t, b1, b2, opt)
        _step(b, gb, mb, vb, lr, lr_t, b1, b2, opt)
        _step(c, gc, mc, vc, lr, lr_t, b1, b2, opt)
        _step(c0, g0, m0, v0, lr, lr_t, b1, b2, opt)
    return step
