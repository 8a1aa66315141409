"""Bernstein operators and one-sided (undershoot) error control.

The undershoot ``U_n(t) = f(t) - B_n(f; t)`` is positive where the
operator underestimates ``f``.  A row of the safety table reports, for
one degree ``n``, the proportion of sampling points with
``U_n(t_k) >= eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence, Union

import numpy as np

from .errors import BadParams, DomainError, NotMonotone

ANALYTIC_CROSSCHECK_TOL = 1e-12
CONCAVE_TOL = 1e-12
DEFAULT_DEGREES = (10, 25, 50, 100, 200)
DEFAULT_EPSILON = 0.02
DEFAULT_GRID_N = 1000
DEFAULT_MARGINAL_CUT = 0.01
_RECURRENCE_MAX_N = 1000


@dataclass(frozen=True)
class SamplingGrid:
    """``t_k = k / N`` for ``k = 0..N``."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise BadParams(f"grid size must be a positive integer, got {self.N!r}")

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.N + 1) / self.N


GridLike = Union[SamplingGrid, Sequence[float], np.ndarray]


def _points(grid: GridLike) -> np.ndarray:
    if isinstance(grid, SamplingGrid):
        return grid.points
    pts = np.asarray(grid, dtype=np.float64)
    if pts.ndim != 1 or pts.size == 0:
        raise BadParams("sampling points must be a nonempty 1-d list")
    if np.any(pts < 0) or np.any(pts > 1) or not np.all(np.isfinite(pts)):
        raise DomainError("sampling points must lie in [0, 1]")
    return pts


def _weights(n: int, t: np.ndarray) -> np.ndarray:
    """Bernstein basis values, shape ``(len(t), n + 1)``."""
    mirror = t > 0.5
    s = np.where(mirror, 1.0 - t, t)
    k = np.arange(n)
    if n <= _RECURRENCE_MAX_N:
        # w_{k+1} = w_k * (n-k)/(k+1) * s/(1-s), started from w_0 = (1-s)^n
        ratio = ((n - k) / (k + 1))[None, :] * (s / (1.0 - s))[:, None]
        w = np.empty((t.size, n + 1))
        w[:, 0] = (1.0 - s) ** n
        w[:, 1:] = w[:, :1] * np.cumprod(ratio, axis=1)
    else:
        kk = np.arange(n + 1)
        log_binom = np.array([math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1) for j in kk])
        with np.errstate(divide="ignore", invalid="ignore"):
            logw = log_binom[None, :] + kk[None, :] * np.log(s)[:, None] + (n - kk)[None, :] * np.log1p(-s)[:, None]
        w = np.where(np.isnan(logw), 0.0, np.exp(logw))
        w[s == 0.0] = 0.0
        w[s == 0.0, 0] = 1.0
    w[mirror] = w[mirror, ::-1]
    return w


def bernstein_eval(f: Callable, n: int, t):
    """``B_n(f; t) = sum_k C(n,k) t^k (1-t)^(n-k) f(k/n)``; scalar or array ``t``."""
    if int(n) != n or n < 1:
        raise BadParams(f"degree must be a positive integer, got {n!r}")
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(tt < 0) or np.any(tt > 1) or not np.all(np.isfinite(tt)):
        raise DomainError("Bernstein operator is defined on [0, 1]")
    samples = np.asarray(f(np.arange(n + 1) / n), dtype=np.float64)
    out = _weights(int(n), tt) @ samples
    return float(out[0]) if scalar else out


def _quadratic_coeff(f) -> float | None:
    """Leading t^2 coefficient when ``f`` is a polynomial of degree <= 2."""
    from .funcanalysis import Kind

    if getattr(f, "kind", None) is Kind.POLYNOMIAL and len(f.params["coeffs"]) <= 3:
        coeffs = f.params["coeffs"]
        return coeffs[2] if len(coeffs) == 3 else 0.0
    return None


@dataclass(frozen=True)
class UndershootProfile:
    degree: int
    points: np.ndarray
    values: np.ndarray
    max_undershoot: float
    sup_error: float


def undershoot_profile(f: Callable, n: int, grid: GridLike) -> UndershootProfile:
    """``U_n(t_k) = f(t_k) - B_n(f; t_k)`` on the grid.

    For polynomials of degree <= 2 the exact form
    ``U_n(t) = -c2 t (1 - t) / n`` is used after checking it against
    the direct sum.
    """
    pts = _points(grid)
    direct = np.asarray(f(pts), dtype=np.float64) - bernstein_eval(f, n, pts)
    c2 = _quadratic_coeff(f)
    if c2 is not None:
        values = (-c2) * pts * (1 - pts) / n
        gap = float(np.max(np.abs(values - direct)))
        if gap > ANALYTIC_CROSSCHECK_TOL:
            raise ArithmeticError(f"analytic undershoot disagrees with direct sum by {gap:.3e}")
    else:
        values = direct
    return UndershootProfile(
        degree=n,
        points=pts,
        values=values,
        max_undershoot=float(values.max()),
        sup_error=float(np.abs(values).max()),
    )


class Safety(str, Enum):
    UNSAFE = "Unsafe"
    MARGINAL = "Marginal"
    SAFE = "Safe"


def safety_status(count: int, proportion: float, marginal_cut: float) -> Safety:
    if count == 0:
        return Safety.SAFE
    if proportion <= marginal_cut:
        return Safety.MARGINAL
    return Safety.UNSAFE


@dataclass(frozen=True)
class SafetyRow:
    n: int
    max_undershoot: float
    count: int
    total: int
    P: float
    sup_error: float
    status: Safety

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "max_undershoot": self.max_undershoot,
            "count": self.count,
            "total": self.total,
            "P": self.P,
            "sup_error": self.sup_error,
            "status": self.status.value,
        }


@dataclass(frozen=True)
class SafetyTable:
    epsilon: float
    marginal_cut: float
    rows: tuple[SafetyRow, ...]

    def row(self, n: int) -> SafetyRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)


def _row(n, values, epsilon, marginal_cut) -> SafetyRow:
    # compare the computed undershoot itself against eps; this fixes the
    # tie at U == eps (n = 50, t = 1/2 for the concentration curve)
    count = int(np.count_nonzero(values >= epsilon))
    total = int(values.size)
    P = count / total
    return SafetyRow(
        n=n,
        max_undershoot=float(values.max()),
        count=count,
        total=total,
        P=P,
        sup_error=float(np.abs(values).max()),
        status=safety_status(count, P, marginal_cut),
    )


def safety_table(
    f: Callable,
    degrees: Sequence[int] = DEFAULT_DEGREES,
    epsilon: float = DEFAULT_EPSILON,
    grid: GridLike = SamplingGrid(DEFAULT_GRID_N),
    marginal_cut: float = DEFAULT_MARGINAL_CUT,
) -> SafetyTable:
    if not degrees:
        raise BadParams("degrees must be nonempty")
    if not epsilon > 0:
        raise BadParams("epsilon must be positive")
    rows = tuple(
        _row(n, undershoot_profile(f, n, grid).values, epsilon, marginal_cut) for n in degrees
    )
    return SafetyTable(epsilon, marginal_cut, rows)


@dataclass(frozen=True)
class AveragedRow:
    n1: int
    n2: int
    row: SafetyRow
    count_n1: int
    count_n2: int

    @property
    def union_bound_holds(self) -> bool:
        return self.row.count <= self.count_n1 + self.count_n2


def average_operator_safety(
    f: Callable,
    n1: int,
    n2: int,
    epsilon: float = DEFAULT_EPSILON,
    grid: GridLike = SamplingGrid(DEFAULT_GRID_N),
    marginal_cut: float = DEFAULT_MARGINAL_CUT,
) -> AveragedRow:
    """Safety row for ``(B_{n1} + B_{n2}) / 2``."""
    u1 = undershoot_profile(f, n1, grid).values
    u2 = undershoot_profile(f, n2, grid).values
    row = _row(n1 if n1 == n2 else 0, 0.5 * (u1 + u2), epsilon, marginal_cut)
    out = AveragedRow(
        n1, n2, row,
        int(np.count_nonzero(u1 >= epsilon)),
        int(np.count_nonzero(u2 >= epsilon)),
    )
    if not out.union_bound_holds:
        raise AssertionError(f"union bound failed for averaged operator ({n1}, {n2})")
    return out


def asymmetry_report(
    f: Callable, n: int, epsilon: float = DEFAULT_EPSILON, grid: GridLike = SamplingGrid(DEFAULT_GRID_N)
) -> dict:
    u = undershoot_profile(f, n, grid).values
    return {
        "undershoot_proportion": int(np.count_nonzero(u >= epsilon)) / u.size,
        "overshoot_proportion": int(np.count_nonzero(-u >= epsilon)) / u.size,
    }


def reparametrize_grid(g: Callable, grid: GridLike) -> np.ndarray:
    """Sampling points ``g(t_k)`` for a non-decreasing ``g: [0,1] -> [0,1]``."""
    vals = np.asarray(g(_points(grid)), dtype=np.float64)
    if np.any(np.diff(vals) < 0):
        raise NotMonotone("reparametrization decreases on the grid")
    if vals.min() < 0 or vals.max() > 1:
        raise DomainError("reparametrization must map into [0, 1]")
    return vals
