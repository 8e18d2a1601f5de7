"""Pure-numpy kernels; see ``kernels`` for the calling convention."""

import math

import numpy as np

from ._consts import ADAM_EPS, LOG_EPS, SGD, SQUARED


_CHUNK = 4096


def np_sigma(z):
    return np.tanh(0.5 * z)


def np_predict(X, AT, b, c, c0):
    out = np.empty(X.shape[0])
    for lo in range(0, X.shape[0], _CHUNK):
        sig = np_sigma(X[lo:lo + _CHUNK] @ AT + b)
        out[lo:lo + _CHUNK] = c0[0] + sig @ c
    return out


def np_losses(h, s, kind):
    s = s.astype(float)
    if kind == SQUARED:
        return (h - s) ** 2
    hc = np.clip(h, -1.0 + LOG_EPS, 1.0 - LOG_EPS)
    return -np.log(0.5 * (1.0 + s * hc))


def _np_dloss(h, s, kind):
    if kind == SQUARED:
        return 2.0 * (h - s)
    inside = (h > -1.0 + LOG_EPS) & (h < 1.0 - LOG_EPS)
    return np.where(inside, -s / (1.0 + s * h), 0.0)


def np_batch_grad(X, s, order, lo, hi, AT, b, c, c0, kind, gAT, gb, gc, sig=None, gs=None):
    idx = order[lo:hi]
    Xb = X[idx]
    sb = s[idx].astype(float)
    S = np_sigma(Xb @ AT + b)
    h = c0[0] + S @ c
    g = _np_dloss(h, sb, kind) / idx.size
    gc[:] = S.T @ g
    G = (g[:, None] * c) * 0.5 * (1.0 - S * S)
    gb[:] = G.sum(axis=0)
    gAT[:, :] = Xb.T @ G
    return float(g.sum())


def _np_step(p, g, m, v, lr, lr_t, b1, b2, opt):
    if opt == SGD:
        p -= lr * g
    else:
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= lr_t * m / (np.sqrt(v) + ADAM_EPS)


def np_train_epoch(X, s, order, AT, b, c, c0, mAT, vAT, mb, vb, mc, vc, m0, v0,
                   step, batch_size, lr, b1, b2, opt, kind):
    gAT = np.empty_like(AT)
    gb = np.empty_like(b)
    gc = np.empty_like(c)
    g0 = np.empty(1)
    n = order.shape[0]
    for lo in range(0, n, batch_size):
        hi = min(n, lo + batch_size)
        g0[0] = np_batch_grad(X, s, order, lo, hi, AT, b, c, c0, kind, gAT, gb, gc)
        step += 1
        lr_t = lr * math.sqrt(1.0 - b2 ** step) / (1.0 - b1 ** step)
        _np_step(AT, gAT, mAT, vAT, lr, lr_t, b1, b2, opt)
        _np_step(b, gb, mb, vb, lr, lr_t, b1, b2, opt)
        _np_step(c, gc, mc, vc, lr, lr_t, b1, b2, opt)
        _np_step(c0, g0, m0, v0, lr, lr_t, b1, b2, opt)
    return step
