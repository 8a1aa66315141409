"""Three-valued verdicts for membership in sequence classes.

Membership is a limit statement, so finite prefixes only ever give
evidence.  ``ExactMember`` is reserved for sequences with a certificate
(exact period, non-decreasing closed form, or fully known finite data);
``Violated`` needs an exact positive periodic density or violation
fractions that stay above ``floor`` on every grid point without a
decreasing trend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BadParams, InsufficientData
from .seqcore import (
    FLAT_TOLERANCE,
    DensityCurve,
    Mode,
    SequenceSpec,
    Trend,
    _check_grid,
    density_from_mask,
    period_differences,
    upward_differences,
)

DEFAULT_GRID = (1_000, 10_000, 100_000)
DEFAULT_FLOOR = 0.05
DEFAULT_EPS = (0.1, 0.5, 1.0)
JSON_SCHEMA_VERSION = 1


class Status(str, Enum):
    EXACT_MEMBER = "ExactMember"
    CONSISTENT = "ConsistentWithMembership"
    VIOLATED = "Violated"


class SeqClass(str, Enum):
    UPWARD_P = "statistically_p_upward_quasi_cauchy"
    UPWARD_1 = "statistically_upward_quasi_cauchy"
    QUASI_CAUCHY = "statistically_quasi_cauchy"
    CONVERGENT = "statistically_convergent"


@dataclass
class Verdict:
    cls: SeqClass
    status: Status
    p: int
    eps: tuple[float, ...]
    grid: tuple[int, ...]
    floor: float
    curves: dict[float, DensityCurve] = field(default_factory=dict)
    exact: dict[float, Fraction] = field(default_factory=dict)
    certificate: str | None = None
    witness_eps: float | None = None
    limit: float | None = None

    def to_dict(self) -> dict:
        out = {
            "schema_version": JSON_SCHEMA_VERSION,
            "class": self.cls.value,
            "status": self.status.value,
            "p": self.p,
            "eps": list(self.eps),
            "grid": list(self.grid),
            "fractions": {repr(e): list(c.fractions) for e, c in self.curves.items()},
            "trends": {repr(e): c.trend.value for e, c in self.curves.items()},
            "certificate": self.certificate,
            "witness_eps": self.witness_eps,
            "floor": self.floor,
        }
        if self.exact:
            out["exact_density"] = {repr(e): str(q) for e, q in self.exact.items()}
        if self.limit is not None:
            out["limit"] = self.limit
        return out


def _check_eps(eps_list) -> tuple[float, ...]:
    eps = tuple(float(e) for e in eps_list)
    if not eps or not all(e > 0 and math.isfinite(e) for e in eps):
        raise BadParams(f"eps_list must be nonempty and positive: {list(eps_list)}")
    return eps


def _measure(d: np.ndarray, mode: Mode) -> np.ndarray:
    return d if mode is Mode.UPWARD else np.abs(d)


def _violated_by_evidence(curves: dict[float, DensityCurve], floor: float) -> float | None:
    for eps, curve in curves.items():
        f = curve.fractions
        if min(f) < floor:
            continue
        if curve.trend is not Trend.DECREASING:
            return eps
        # still falling: require the next grid point, extrapolated along the
        # last step, to stay above the floor
        if len(f) >= 2 and f[-1] + (f[-1] - f[-2]) >= floor:
            return eps
    return None


def _classify(spec, p, eps_list, grid, floor, mode, cls) -> Verdict:
    eps = _check_eps(eps_list)
    grid = _check_grid(grid, p)
    n_max = grid[-1]
    if spec.length is not None and spec.length - p < n_max:
        raise InsufficientData(
            f"prefix {n_max} needs {n_max + p} terms, data has {spec.length}"
        )
    m = _measure(upward_differences(spec, p, n_max), mode)
    curves = {e: density_from_mask(m >= e, grid, FLAT_TOLERANCE) for e in eps}
    verdict = Verdict(cls, Status.CONSISTENT, p, eps, grid, floor, curves)

    if spec.period is not None:
        pm = _measure(period_differences(spec, p), mode)
        L = spec.period
        verdict.exact = {e: Fraction(int(np.count_nonzero(pm >= e)), L) for e in eps}
        top = float(pm.max())
        if top <= 0:
            verdict.status = Status.EXACT_MEMBER
            kind = "zero-difference" if not np.any(pm) else "nonpositive-difference"
            verdict.certificate = f"periodic (L={L}), {kind}: every p-step difference over one period is <= 0"
            return verdict
        verdict.status = Status.VIOLATED
        positive = [e for e in eps if verdict.exact[e] > 0]
        if positive:
            verdict.witness_eps = positive[0]
        else:
            verdict.witness_eps = top
            verdict.exact[top] = Fraction(int(np.count_nonzero(pm >= top)), L)
        verdict.certificate = (
            f"periodic (L={L}): exact density {verdict.exact[verdict.witness_eps]} "
            f"at eps={verdict.witness_eps!r}"
        )
        return verdict

    if mode is Mode.UPWARD and spec.nondecreasing:
        assert not np.any(m > 0), "non-decreasing spec produced a positive difference"
        verdict.status = Status.EXACT_MEMBER
        verdict.certificate = "non-decreasing: every p-step difference is <= 0"
        return verdict

    if spec.length is not None:
        full = _measure(upward_differences(spec, p, spec.length - p), mode)
        if not np.any(full > 0):
            verdict.status = Status.EXACT_MEMBER
            verdict.certificate = (
                f"complete data (length {spec.length}): every available p-step difference is <= 0"
            )
            return verdict

    hit = _violated_by_evidence(curves, floor)
    if hit is not None:
        verdict.status = Status.VIOLATED
        verdict.witness_eps = hit
        verdict.certificate = f"evidence: fractions >= {floor} on the whole grid at eps={hit!r}"
    else:
        verdict.certificate = "evidence only: no persistent violation density on the grid"
    return verdict


def classify_upward(
    spec: SequenceSpec,
    p: int,
    eps_list: Sequence[float] = DEFAULT_EPS,
    grid: Sequence[int] = DEFAULT_GRID,
    floor: float = DEFAULT_FLOOR,
) -> Verdict:
    cls = SeqClass.UPWARD_1 if p == 1 else SeqClass.UPWARD_P
    return _classify(spec, p, eps_list, grid, floor, Mode.UPWARD, cls)


def classify_symmetric(
    spec: SequenceSpec,
    p: int,
    eps_list: Sequence[float] = DEFAULT_EPS,
    grid: Sequence[int] = DEFAULT_GRID,
    floor: float = DEFAULT_FLOOR,
) -> Verdict:
    return _classify(spec, p, eps_list, grid, floor, Mode.SYMMETRIC, SeqClass.QUASI_CAUCHY)


def _deviation_curves(x, ell, eps, grid):
    dev = np.abs(x - ell)
    return {e: density_from_mask(dev >= e, grid) for e in eps}


def estimate_st_limit(
    spec: SequenceSpec,
    grid: Sequence[int] = DEFAULT_GRID,
    eps_list: Sequence[float] = DEFAULT_EPS,
    floor: float = DEFAULT_FLOOR,
) -> float | None:
    """Heuristic statistical limit.

    The candidate is the median of the second half of the longest
    prefix; it is returned only if, for each eps, the deviation set has
    density below ``floor`` at the largest N and is not trending up.
    """
    eps = _check_eps(eps_list)
    grid = _check_grid(grid, 0)
    x = spec.values(grid[-1])
    ell = float(np.median(x[grid[-1] // 2 :]))
    for curve in _deviation_curves(x, ell, eps, grid).values():
        if curve.fractions[-1] >= floor or curve.trend is Trend.INCREASING:
            return None
    return ell


def classify_convergent(
    spec: SequenceSpec,
    grid: Sequence[int] = DEFAULT_GRID,
    eps_list: Sequence[float] = DEFAULT_EPS,
    floor: float = DEFAULT_FLOOR,
) -> Verdict:
    eps = _check_eps(eps_list)
    grid = _check_grid(grid, 0)
    x = spec.values(grid[-1])
    tail_median = float(np.median(x[grid[-1] // 2 :]))
    verdict = Verdict(
        SeqClass.CONVERGENT, Status.CONSISTENT, 0, eps, grid, floor,
        _deviation_curves(x, tail_median, eps, grid),
    )
    L = spec.period
    if L is not None:
        one = spec.values(L)
        if np.all(one == one[0]):
            verdict.status = Status.EXACT_MEMBER
            verdict.limit = float(one[0])
            verdict.certificate = "constant sequence"
        else:
            verdict.status = Status.VIOLATED
            verdict.certificate = f"periodic (L={L}) and non-constant: every value recurs with density >= 1/{L}"
        return verdict
    ell = estimate_st_limit(spec, grid, eps, floor)
    if ell is not None:
        verdict.limit = ell
        verdict.certificate = f"tail-median candidate {ell!r} with deviation density < {floor}"
        return verdict
    hit = _violated_by_evidence(verdict.curves, floor)
    if hit is not None:
        verdict.status = Status.VIOLATED
        verdict.witness_eps = hit
        verdict.certificate = f"evidence: deviation from tail median {tail_median!r} persists at eps={hit!r}"
    else:
        verdict.certificate = "evidence only: no limit candidate, but no persistent deviation"
    return verdict


@dataclass
class ClassificationReport:
    verdicts: dict[SeqClass, Verdict]
    p: int
    eps: tuple[float, ...]
    grid: tuple[int, ...]
    floor: float

    def to_dict(self) -> dict:
        return {
            "schema_version": JSON_SCHEMA_VERSION,
            "p": self.p,
            "eps": list(self.eps),
            "grid": list(self.grid),
            "floor": self.floor,
            "verdicts": [v.to_dict() for v in self.verdicts.values()],
        }


def classify_report(
    spec: SequenceSpec,
    p: int,
    eps_list: Sequence[float] = DEFAULT_EPS,
    grid: Sequence[int] = DEFAULT_GRID,
    floor: float = DEFAULT_FLOOR,
) -> ClassificationReport:
    up_p = classify_upward(spec, p, eps_list, grid, floor)
    up_1 = up_p if p == 1 else classify_upward(spec, 1, eps_list, grid, floor)
    qc = classify_symmetric(spec, 1, eps_list, grid, floor)
    conv = classify_convergent(spec, grid, eps_list, floor)
    if qc.status is Status.EXACT_MEMBER and up_p.status is Status.VIOLATED:
        raise AssertionError("inclusion broken: quasi-Cauchy member marked p-upward violated")
    verdicts = {SeqClass.UPWARD_P: up_p, SeqClass.UPWARD_1: up_1, SeqClass.QUASI_CAUCHY: qc, SeqClass.CONVERGENT: conv}
    return ClassificationReport(verdicts, p, up_p.eps, up_p.grid, floor)
