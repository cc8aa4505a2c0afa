# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels.

Same signatures and semantics as ``unisimplex._kernels_py``. Every loop runs
without the GIL so batch shards can be generated from worker threads.
"""

from libc.math cimport expm1, log, log1p

cdef double CLAMP_TOL = 1e-12


cdef inline double _exponent(Py_ssize_t n, Py_ssize_t step, bint literal) noexcept nogil:
    # step is 0-based here
    if literal:
        return <double>(n - 1)
    return <double>(n - 1 - step)


def stick_breaking(const double[:, ::1] u, double[:, ::1] out, bint literal):
    """Fill ``out[i]`` from the ``n - 1`` uniforms in ``u[i]``.

    Returns the number of fractional-power evaluations performed.
    """
    cdef Py_ssize_t rows = u.shape[0], m = u.shape[1], n = m + 1
    cdef Py_ssize_t i, j, big
    cdef double r, x, k, v, w, lg
    cdef long long powers = 0
    cdef int bad = 0
    if out.shape[0] != rows or out.shape[1] != n:
        raise ValueError("output shape mismatch")
    with nogil:
        for i in range(rows):
            r = 1.0
            for j in range(m):
                k = _exponent(n, j, literal)
                if k == 1.0:
                    x = r * u[i, j]
                else:
                    v = u[i, j]
                    w = 1.0 - v
                    # log(w) is as accurate as log1p(-v) when w is exact, and cheaper
                    lg = log(w) if 1.0 - w == v else log1p(-v)
                    x = r * -expm1(lg / k)
                    powers += 1
                out[i, j] = x
                r = r - x
            if r < 0.0:
                if r < -CLAMP_TOL:
                    bad = 1
                    break
                big = 0
                for j in range(1, m):
                    if out[i, j] > out[i, big]:
                        big = j
                out[i, big] += r
                r = 0.0
            out[i, m] = r
    if bad:
        raise FloatingPointError("stick-breaking residual below -1e-12")
    return powers


def rejection_scan(const double[::1] u, Py_ssize_t m, double[:, ::1] out,
                   Py_ssize_t filled, Py_ssize_t count,
                   long long max_trials, long long since):
    """Scan cube trials of ``m`` values each, accepting those with sum <= 1.

    Returns ``(filled, consumed, trials, since, exceeded)``.
    """
    cdef Py_ssize_t size = u.shape[0], pos = 0, t
    cdef long long trials = 0
    cdef int exceeded = 0
    cdef double s
    with nogil:
        while filled < count and pos + m <= size:
            s = 0.0
            for t in range(m):
                s = s + u[pos + t]
            trials += 1
            since += 1
            if s <= 1.0:
                for t in range(m):
                    out[filled, t] = u[pos + t]
                out[filled, m] = 1.0 - s
                filled += 1
                since = 0
                pos += m
            else:
                pos += m
                if since >= max_trials:
                    exceeded = 1
                    break
    return filled, pos, trials, since, bool(exceeded)


def pit(const double[:, ::1] pts, double[:, ::1] out, bint literal):
    """Stepwise CDF transform of each point; ``out`` has shape (rows, n - 1)."""
    cdef Py_ssize_t rows = pts.shape[0], n = pts.shape[1], m = n - 1
    cdef Py_ssize_t i, j
    cdef double r, x, k, t
    with nogil:
        for i in range(rows):
            r = 1.0
            for j in range(m):
                x = pts[i, j]
                k = _exponent(n, j, literal)
                if x >= r:
                    t = 1.0
                elif k == 1.0:
                    t = x / r
                else:
                    t = -expm1(k * log1p(-(x / r)))
                out[i, j] = t
                r = r - x
    return None


def chain_log_density(const double[:, ::1] pts, double[::1] out, bint literal):
    """Sum over steps of the log conditional density at each point."""
    cdef Py_ssize_t rows = pts.shape[0], n = pts.shape[1], m = n - 1
    cdef Py_ssize_t i, j
    cdef double r, x, k, acc
    with nogil:
        for i in range(rows):
            r = 1.0
            acc = 0.0
            for j in range(m):
                x = pts[i, j]
                if x > r:
                    x = r
                k = _exponent(n, j, literal)
                acc = acc + log(k) - log(r)
                if k != 1.0:
                    acc = acc + (k - 1.0) * log1p(-(x / r))
                r = r - x
                if r <= 0.0:
                    break
            out[i] = acc
    return None
