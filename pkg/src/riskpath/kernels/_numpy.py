"""Pure-numpy kernels, selected with ``RISKPATH_DISABLE_NUMBA=1``."""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

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

NAME = "numpy"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0


def mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(key, start, count):
    ctr = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = mix64(np.asarray([key], dtype=np.uint64) + ctr * _GOLDEN)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53


def transform(kind, params, table, u, inputs):
    u = np.asarray(u, dtype=np.float64)
    if kind == CONSTANT:
        return np.full(u.shape, params[0])
    if kind == UNIFORM:
        return params[0] + (params[1] - params[0]) * u
    if kind == GAUSSIAN:
        return params[0] + params[1] * ndtri(u)
    if kind == EXPONENTIAL:
        return params[1] - np.log1p(-u) / params[0]
    if kind == SHIFTED_MIN:
        return params[0] - params[1] * (1.0 - u ** (1.0 / params[2]))
    if kind == LATENT:
        rho = params[2]
        return params[0] + params[1] * (np.sqrt(rho) * inputs + np.sqrt(1.0 - rho) * ndtri(u))
    if kind == EMPIRICAL:
        m = table.shape[0]
        return table[np.minimum((u * m).astype(np.int64), m - 1)]
    raise ValueError(f"unknown kind code {kind}")


def draw_raw(kind, params, table, inputs, key):
    return transform(kind, params, table, uniforms(key, 0, inputs.shape[0]), inputs)


def losses_from_raw(loss_code, raw, inputs):
    if loss_code == LOSS_IDENTITY:
        return raw.copy()
    if loss_code == LOSS_NEG_INF:
        return np.full(raw.shape, -np.inf)
    return inputs + raw


def apply_output(out_code, out_value, inputs, raw):
    if out_code == OUT_CONSTANT:
        return np.full(inputs.shape, out_value, dtype=np.float64)
    if out_code == OUT_OFFSET:
        return inputs + out_value
    if out_code == OUT_ACCUMULATE:
        return inputs + raw
    return inputs.copy()


def kth_smallest(values, k):
    return np.partition(values, k - 1)[k - 1]


def edge_quantile(kind, params, table, loss_code, inputs, key, k):
    if loss_code == LOSS_NEG_INF:
        return -np.inf
    n = inputs.shape[0]
    if loss_code == LOSS_IDENTITY and kind != LATENT:
        u = kth_smallest(uniforms(key, 0, n), k)
        return float(transform(kind, params, table, np.array([u]), np.zeros(1))[0])
    raw = draw_raw(kind, params, table, inputs, key)
    if loss_code == LOSS_CARRY:
        raw = raw + inputs
    return float(kth_smallest(raw, k))


def quantile_table(kind, params, table, loss_code, inputs, input_row, keys, ks):
    nb = keys.shape[0]
    out = np.full((nb, nb), np.inf)
    count = 0
    for b in range(nb):
        for a in range(b + 1):
            out[b, a] = edge_quantile(kind, params, table, loss_code, inputs[input_row[a]],
                                      keys[b, a], ks[b - a])
            count += 1
    return out, count


def quantile_table_reuse(kind, params, table, loss_code, inputs, input_row, keys, ks):
    nb = keys.shape[0]
    out = np.full((nb, nb), np.inf)
    count = 0
    for a in range(nb):
        x = inputs[input_row[a]]
        if loss_code == LOSS_NEG_INF:
            out[a:, a] = -np.inf
        else:
            s = np.sort(losses_from_raw(loss_code, draw_raw(kind, params, table, x, keys[a]), x))
            out[a:, a] = s[ks[: nb - a] - 1]
        count += nb - a
    return out, count
