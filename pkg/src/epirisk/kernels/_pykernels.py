"""Pure-Python kernel implementations.

Fallback used when the compiled core (``_ckernels``) is unavailable or when
EPIRISK_PURE_PY=1 forces it. Both backends perform the same floating-point
operations in the same order, so results agree to the last bit in practice;
per-backend determinism is guaranteed either way.
"""

from __future__ import annotations

import math
from typing import Sequence


def sigmoid(z: float) -> float:
    """Numerically stable logistic function."""
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def mixture_mean(weights: Sequence[float], predictors: Sequence[float]) -> float:
    """Sum of w_c * sigmoid(z_c), accumulated sequentially."""
    total = 0.0
    for i in range(len(weights)):
        total += float(weights[i]) * sigmoid(float(predictors[i]))
    return total


def completion_offsets(linear_adds: Sequence[float], pair_matrix) -> list:
    """Predictor offsets for all 2^k completions of k binary unknowns.

    Offset of bitmask m = sum of linear_adds[i] for set bits i, plus
    pair_matrix[i][j] for every pair of set bits i < j. Built by the
    lowest-set-bit recurrence; completion order is mask = 0 .. 2^k - 1
    with bit i meaning "unknown i completed to 1".
    """
    k = len(linear_adds)
    out = [0.0] * (1 << k)
    for mask in range(1, 1 << k):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        val = out[rest] + float(linear_adds[i])
        m = rest
        while m:
            lb = m & -m
            val += float(pair_matrix[i, lb.bit_length() - 1])
            m ^= lb
        out[mask] = val
    return out


def completion_weights(priors: Sequence[float]) -> list:
    """Independent-Bernoulli probability of each completion bitmask."""
    k = len(priors)
    out = [0.0] * (1 << k)
    for mask in range(1 << k):
        w = 1.0
        for i in range(k):
            p = float(priors[i])
            w *= p if (mask >> i) & 1 else 1.0 - p
        out[mask] = w
    return out


def draw_risks(predictor: float, offsets: Sequence[float]) -> list:
    """sigmoid(predictor + offset) for every offset (Monte-Carlo draws)."""
    return [sigmoid(predictor + float(o)) for o in offsets]


def sequential_mean(values: Sequence[float]) -> float:
    total = 0.0
    for v in values:
        total += float(v)
    return total / len(values)
