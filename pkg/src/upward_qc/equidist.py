"""Sine-difference violation densities and their equidistribution prediction.

``sin(a k) - sin(a(k+p)) = -2 sin(a p / 2) cos(a k + a p / 2)``; with
``(a k) mod 2pi`` equidistributed the upward set has density equal to
the normalised length of the arc where the cosine term clears ``eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParams, DegenerateFrequency

DEGENERATE_SIN_TOL = 1e-12
_CHUNK = 1 << 20


@dataclass(frozen=True)
class ArcPrediction:
    p: int
    alpha: float
    epsilon: float
    s_p: float
    r: float
    predicted_density: float


def arc_density_prediction(p: int, alpha: float = 1.0, epsilon: float = 0.0) -> ArcPrediction:
    half = math.sin(alpha * p / 2)
    if abs(half) < DEGENERATE_SIN_TOL:
        raise DegenerateFrequency(f"sin(alpha*p/2) = 0 for alpha={alpha}, p={p}")
    if epsilon < 0:
        raise BadParams("epsilon must be nonnegative")
    s_p = 2 * abs(half)
    r = min(max(epsilon / s_p, 0.0), 1.0)
    return ArcPrediction(p, alpha, epsilon, s_p, r, math.acos(r) / math.pi)


def _count(p, alpha, epsilon, N, sign):
    total = 0
    for start in range(1, N - p + 1, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, N - p + 1), dtype=np.float64)
        d = np.sin(alpha * k) - np.sin(alpha * (k + p))
        total += int(np.count_nonzero(sign * d >= epsilon))
    return total


def sine_upward_density(p: int, alpha: float, epsilon: float, N: int) -> float:
    """``|{k <= N-p : sin(a k) - sin(a(k+p)) >= eps}| / N``."""
    if not epsilon > 0:
        raise BadParams("epsilon must be positive")
    if N <= p:
        raise BadParams("N must exceed p")
    return _count(p, alpha, epsilon, N, 1.0) / N


def sine_downward_density(p: int, alpha: float, epsilon: float, N: int) -> float:
    """``|{k <= N-p : sin(a k) - sin(a(k+p)) <= -eps}| / N``."""
    if not epsilon > 0:
        raise BadParams("epsilon must be positive")
    if N <= p:
        raise BadParams("N must exceed p")
    return _count(p, alpha, epsilon, N, -1.0) / N
