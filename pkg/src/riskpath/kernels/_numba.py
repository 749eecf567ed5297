"""numba-compiled kernels. Same signatures and results as ``_numpy``."""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange, uint64

from .codes import (
    CONSTANT,
    EMPIRICAL,
    EXPONENTIAL,
    GAUSSIAN,
    LATENT,
    LOSS_CARRY,
    LOSS_IDENTITY,
    LOSS_NEG_INF,
    OUT_ACCUMULATE,
    OUT_CONSTANT,
    OUT_OFFSET,
    SHIFTED_MIN,
    UNIFORM,
)

NAME = "numba"

_GOLDEN = uint64(0x9E3779B97F4A7C15)
_M1 = uint64(0xBF58476D1CE4E5B9)
_M2 = uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0

# inverse normal CDF: Wichura's AS241 (PPND16), relative error ~1e-16
_PA = np.array([3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
                1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
                3.3430575583588128105e4, 2.5090809287301226727e3])
_PB = np.array([1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
                2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
                5.2264952788528545610e3])
_PC = np.array([1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
                3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
                2.27238449892691845833e-2, 7.74545014278341407640e-4])
_PD = np.array([1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
                1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                1.05075007164441684324e-9])
_PE = np.array([6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
                2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                2.71155556874348757815e-5, 2.01033439929228813265e-7])
_PF = np.array([1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
                7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                2.04426310338993978564e-15])


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> uint64(30))) * _M1
    z = (z ^ (z >> uint64(27))) * _M2
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def _uniform(key, i):
    z = _mix64(key + uint64(i + 1) * _GOLDEN)
    return (float(z >> uint64(11)) + 0.5) * _INV53


@njit(cache=True, inline="always")
def _poly(c, x):
    r = c[7]
    for i in range(6, -1, -1):
        r = r * x + c[i]
    return r


@njit(cache=True)
def _ndtri(p):
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_PA, r) / _poly(_PB, r)
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        x = _poly(_PC, r) / _poly(_PD, r)
    else:
        r -= 5.0
        x = _poly(_PE, r) / _poly(_PF, r)
    return -x if q < 0.0 else x


@njit(cache=True)
def _transform(kind, params, table, u, x):
    if kind == CONSTANT:
        return params[0]
    if kind == UNIFORM:
        return params[0] + (params[1] - params[0]) * u
    if kind == GAUSSIAN:
        return params[0] + params[1] * _ndtri(u)
    if kind == EXPONENTIAL:
        return params[1] - math.log1p(-u) / params[0]
    if kind == SHIFTED_MIN:
        return params[0] - params[1] * (1.0 - u ** (1.0 / params[2]))
    if kind == LATENT:
        rho = params[2]
        return params[0] + params[1] * (math.sqrt(rho) * x + math.sqrt(1.0 - rho) * _ndtri(u))
    if kind == EMPIRICAL:
        m = table.shape[0]
        j = int(u * m)
        if j >= m:
            j = m - 1
        return table[j]
    return np.nan


@njit(cache=True)
def uniforms(key, start, count):
    k = uint64(key)
    out = np.empty(count)
    for i in range(count):
        out[i] = _uniform(k, start + i)
    return out


@njit(cache=True)
def transform(kind, params, table, u, inputs):
    out = np.empty(u.shape[0])
    for i in range(u.shape[0]):
        out[i] = _transform(kind, params, table, u[i], inputs[i])
    return out


@njit(cache=True)
def draw_raw(kind, params, table, inputs, key):
    """One raw trace value per input, drawn from counters 0..n-1 of ``key``."""
    k = uint64(key)
    n = inputs.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = _transform(kind, params, table, _uniform(k, i), inputs[i])
    return out


@njit(cache=True)
def losses_from_raw(loss_code, raw, inputs):
    n = raw.shape[0]
    out = np.empty(n)
    for i in range(n):
        if loss_code == LOSS_IDENTITY:
            out[i] = raw[i]
        elif loss_code == LOSS_NEG_INF:
            out[i] = -np.inf
        else:
            out[i] = inputs[i] + raw[i]
    return out


@njit(cache=True)
def apply_output(out_code, out_value, inputs, raw):
    n = inputs.shape[0]
    out = np.empty(n)
    for i in range(n):
        if out_code == OUT_CONSTANT:
            out[i] = out_value
        elif out_code == OUT_OFFSET:
            out[i] = inputs[i] + out_value
        elif out_code == OUT_ACCUMULATE:
            out[i] = inputs[i] + raw[i]
        else:
            out[i] = inputs[i]
    return out


@njit(cache=True)
def _qselect(a, lo, hi, k):
    # k-th smallest (0-based) of a[lo..hi]; partially reorders a
    while hi > lo:
        mid = (lo + hi) >> 1
        x = a[lo]
        y = a[mid]
        z = a[hi]
        if x > y:
            x, y = y, x
        if y > z:
            y = z
        if x > y:
            y = x
        pivot = y
        i = lo
        j = hi
        while i <= j:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i <= j:
                t = a[i]
                a[i] = a[j]
                a[j] = t
                i += 1
                j -= 1
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            return a[k]
    return a[k]


@njit(cache=True)
def _select(a, n, k, cand):
    # exact k-th smallest (1-based) of a[:n]; a strided subsample gives a
    # threshold safely below it, so only the elements above it are selected
    if n < 1024:
        return _qselect(a, 0, n - 1, k - 1)
    m = n // 16
    for j in range(m):
        cand[j] = a[16 * j]
    p = k / n
    r = p - 6.0 * math.sqrt(p * (1.0 - p) / m) - 1.0 / m
    if r > 0.0:
        t = _qselect(cand, 0, m - 1, int(r * m))
        c = 0
        for i in range(n):
            if a[i] > t:
                cand[c] = a[i]
                c += 1
        rr = k - 1 - (n - c)
        if rr >= 0 and rr < c:
            return _qselect(cand, 0, c - 1, rr)
    return _qselect(a, 0, n - 1, k - 1)


@njit(cache=True)
def kth_smallest(values, k):
    """1-based order statistic; ``values`` is not modified."""
    a = values.copy()
    return _select(a, a.shape[0], k, np.empty(a.shape[0]))


@njit(cache=True)
def _uniform_kth(key, n, k, buf, cand):
    # exact k-th smallest of n counter uniforms; pre-filters below a
    # 6-sigma lower bound on its location, falls back to a full select
    for i in range(n):
        buf[i] = _uniform(key, i)
    p = k / n
    t = p - 6.0 * math.sqrt(p * (1.0 - p) / n) - 1.0 / n
    if t > 0.0:
        m = 0
        for i in range(n):
            if buf[i] > t:
                cand[m] = buf[i]
                m += 1
        r = k - 1 - (n - m)
        if r >= 0 and r < m:
            return _qselect(cand, 0, m - 1, r)
    return _qselect(buf, 0, n - 1, k - 1)


@njit(cache=True)
def _edge_quantile(kind, params, table, loss_code, inputs, key, k, buf, cand):
    n = inputs.shape[0]
    if loss_code == LOSS_NEG_INF:
        return -np.inf
    if loss_code == LOSS_IDENTITY and kind != LATENT:
        u = _uniform_kth(key, n, k, buf, cand)
        return _transform(kind, params, table, u, 0.0)
    for i in range(n):
        r = _transform(kind, params, table, _uniform(key, i), inputs[i])
        if loss_code == LOSS_CARRY:
            r += inputs[i]
        buf[i] = r
    return _select(buf, n, k, cand)


@njit(cache=True)
def edge_quantile(kind, params, table, loss_code, inputs, key, k):
    n = inputs.shape[0]
    return _edge_quantile(kind, params, table, loss_code, inputs, uint64(key), k,
                          np.empty(n), np.empty(n))


@njit(cache=True, parallel=True)
def quantile_table(kind, params, table, loss_code, inputs, input_row, keys, ks):
    """Edge quantiles for every (total budget b, predecessor budget a <= b).

    ``keys[b, a]`` seeds the fresh draws of that combination, ``ks[j]`` is the
    order-statistic rank for an edge budget of ``j`` buckets.  Entries with
    ``a > b`` stay ``+inf``.
    """
    nb = keys.shape[0]
    n = inputs.shape[1]
    out = np.full((nb, nb), np.inf)
    counts = np.zeros(nb, dtype=np.int64)
    for b in prange(nb):
        buf = np.empty(n)
        cand = np.empty(n)
        for a in range(b + 1):
            out[b, a] = _edge_quantile(kind, params, table, loss_code, inputs[input_row[a]],
                                       keys[b, a], ks[b - a], buf, cand)
            counts[b] += 1
    return out, counts.sum()


@njit(cache=True)
def quantile_table_reuse(kind, params, table, loss_code, inputs, input_row, keys, ks):
    """Like :func:`quantile_table` but one draw set per predecessor budget ``a``."""
    nb = keys.shape[0]
    n = inputs.shape[1]
    out = np.full((nb, nb), np.inf)
    count = 0
    for a in range(nb):
        x = inputs[input_row[a]]
        if loss_code == LOSS_NEG_INF:
            for b in range(a, nb):
                out[b, a] = -np.inf
                count += 1
            continue
        raw = draw_raw(kind, params, table, x, keys[a])
        s = np.sort(losses_from_raw(loss_code, raw, x))
        for b in range(a, nb):
            out[b, a] = s[ks[b - a] - 1]
            count += 1
    return out, count
