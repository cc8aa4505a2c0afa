"""numpy implementations of the batch kernels.

Mirrors ``_kernels.pyx``. The loops run over coordinates with the batch
dimension vectorised, so per-sample cost is still linear in ``n``.
numpy's SIMD ``log``/``expm1`` may differ from libm in the last ulp, so
results agree with the compiled kernels to rounding, not bitwise.
"""

from __future__ import annotations

import numpy as np

CLAMP_TOL = 1e-12


def _exponent(n: int, step: int, literal: bool) -> float:
    return float(n - 1) if literal else float(n - 1 - step)


def stick_breaking(u: np.ndarray, out: np.ndarray, literal: bool) -> int:
    rows, m = u.shape
    n = m + 1
    if out.shape != (rows, n):
        raise ValueError("output shape mismatch")
    cols = np.ascontiguousarray(u.T)
    r = np.ones(rows)
    res = np.empty((n, rows))
    powers = 0
    for j in range(m):
        k = _exponent(n, j, literal)
        if k == 1.0:
            x = r * cols[j]
        else:
            v = cols[j]
            w = 1.0 - v
            lg = np.log(w)
            inexact = (1.0 - w) != v
            if inexact.any():
                lg[inexact] = np.log1p(-v[inexact])
            x = r * -np.expm1(lg / k)
            powers += rows
        res[j] = x
        r = r - x
    if np.any(r < 0.0):
        if np.any(r < -CLAMP_TOL):
            raise FloatingPointError("stick-breaking residual below -1e-12")
        neg = np.flatnonzero(r < 0.0)
        big = np.argmax(res[:m, neg], axis=0)
        res[big, neg] += r[neg]
        r[neg] = 0.0
    res[m] = r
    out[...] = res.T
    return powers


def _sequential_sum(block: np.ndarray) -> np.ndarray:
    # left-to-right, matching the compiled loop bit for bit
    s = block[:, 0].copy()
    for t in range(1, block.shape[1]):
        s += block[:, t]
    return s


def rejection_scan(u, m, out, filled, count, max_trials, since):
    trials_avail = u.shape[0] // m
    if filled >= count or trials_avail == 0:
        return filled, 0, 0, since, False
    block = np.asarray(u[: trials_avail * m]).reshape(trials_avail, m)
    s = _sequential_sum(block)
    acc = s <= 1.0
    idx = np.arange(trials_avail)
    last_acc = np.maximum.accumulate(np.where(acc, idx, -1))
    # consecutive rejections up to and including each trial, with carry-in
    run = np.where(acc, 0, idx - last_acc + np.where(last_acc < 0, since, 0))
    exceed = np.flatnonzero(~acc & (run >= max_trials))
    first_exceed = int(exceed[0]) if exceed.size else trials_avail
    accepted = np.flatnonzero(acc[:first_exceed])
    need = count - filled
    if accepted.size >= need:
        last = int(accepted[need - 1])
        _copy_accepted(block, s, accepted[:need], out, filled)
        return count, (last + 1) * m, last + 1, 0, False
    _copy_accepted(block, s, accepted, out, filled)
    if exceed.size:
        stop = first_exceed + 1
        return filled + accepted.size, stop * m, stop, int(run[first_exceed]), True
    return filled + accepted.size, trials_avail * m, trials_avail, int(run[-1]), False


def _copy_accepted(block, s, idx, out, filled):
    if idx.size == 0:
        return
    rows = slice(filled, filled + idx.size)
    out[rows, :-1] = block[idx]
    out[rows, -1] = 1.0 - s[idx]


def pit(pts: np.ndarray, out: np.ndarray, literal: bool) -> None:
    rows, n = pts.shape
    m = n - 1
    cols = np.ascontiguousarray(pts.T)
    r = np.ones(rows)
    res = np.empty((m, rows))
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(m):
            x = cols[j]
            k = _exponent(n, j, literal)
            t = x / r if k == 1.0 else -np.expm1(k * np.log1p(-(x / r)))
            res[j] = np.where(x >= r, 1.0, t)
            r = r - x
    out[...] = res.T


def chain_log_density(pts: np.ndarray, out: np.ndarray, literal: bool) -> None:
    rows, n = pts.shape
    m = n - 1
    cols = np.ascontiguousarray(pts.T)
    r = np.ones(rows)
    acc = np.zeros(rows)
    alive = np.ones(rows, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(m):
            x = np.minimum(cols[j], r)
            k = _exponent(n, j, literal)
            step = acc + np.log(k) - np.log(r)
            if k != 1.0:
                step = step + (k - 1.0) * np.log1p(-(x / r))
            acc = np.where(alive, step, acc)
            r = r - x
            alive &= r > 0.0
    out[...] = acc
