"""Sequences, p-step differences, violation sets and prefix densities.

Indexing is 1-based throughout: ``x_1, x_2, ...``.  A violation set at
prefix length ``N`` collects the indices ``k <= N`` with
``x_k - x_{k+p} >= eps`` (closed comparison), so evaluating it needs the
first ``N + p`` terms.  Densities are normalised by ``N``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import BadParams, InsufficientData, MalformedSpec, NotPeriodic, OutOfRange

FLAT_TOLERANCE = 1e-3
CSV_SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Sequence specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BuiltinForm:
    """Closed form of a catalog sequence.

    ``func(ks, **params)`` evaluates the sequence at an integer array of
    1-based indices.  ``period`` and ``nondecreasing`` report the
    properties the closed form guarantees for given params.
    """

    name: str
    func: Callable[..., np.ndarray]
    defaults: Mapping[str, float] = field(default_factory=dict)
    validate: Callable[[Mapping[str, float]], None] | None = None
    period: Callable[[Mapping[str, float]], int | None] = lambda params: None
    nondecreasing: Callable[[Mapping[str, float]], bool] = lambda params: False
    unbounded: bool = False


_BUILTINS: dict[str, BuiltinForm] = {}


def register_builtin(form: BuiltinForm) -> BuiltinForm:
    _BUILTINS[form.name] = form
    return form


def builtin_form(name: str) -> BuiltinForm:
    from .errors import UnknownWitness

    try:
        return _BUILTINS[name]
    except KeyError:
        raise UnknownWitness(f"unknown builtin sequence {name!r}") from None


def builtin_names() -> list[str]:
    return sorted(_BUILTINS)


class SequenceSpec:
    """A real sequence ``(x_k)_{k >= 1}``.

    Subclasses implement :meth:`_eval` on integer index arrays and
    report structural properties used as membership certificates.
    """

    index_base = 1

    def _eval(self, ks: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def period(self) -> int | None:
        return None

    @property
    def nondecreasing(self) -> bool:
        return False

    @property
    def length(self) -> int | None:
        """Largest valid index, or ``None`` for infinite sequences."""
        return None

    def evaluate(self, ks) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size and ks.min() < 1:
            raise OutOfRange("sequence indices start at 1")
        return np.asarray(self._eval(ks), dtype=np.float64)

    def values(self, n: int) -> np.ndarray:
        """First ``n`` terms ``x_1..x_n``."""
        return self.evaluate(np.arange(1, n + 1, dtype=np.int64))


@dataclass(frozen=True)
class Builtin(SequenceSpec):
    name: str
    params: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        form = builtin_form(self.name)
        unknown = set(dict(self.params)) - set(form.defaults)
        if unknown:
            raise BadParams(f"{self.name}: unknown params {sorted(unknown)}")
        if form.validate is not None:
            form.validate(self.param_map)

    @property
    def param_map(self) -> dict[str, float]:
        form = _BUILTINS[self.name]
        merged = dict(form.defaults)
        merged.update(dict(self.params))
        return merged

    def _eval(self, ks):
        return _BUILTINS[self.name].func(ks, **self.param_map)

    @property
    def period(self):
        return _BUILTINS[self.name].period(self.param_map)

    @property
    def nondecreasing(self):
        return self.period == 1 or _BUILTINS[self.name].nondecreasing(self.param_map)


@dataclass(frozen=True)
class Sampled(SequenceSpec):
    data: tuple[float, ...]

    def __post_init__(self):
        if len(self.data) == 0:
            raise MalformedSpec("sampled sequence must be nonempty")
        if not all(math.isfinite(v) for v in self.data):
            raise MalformedSpec("sampled sequence must be finite")

    @property
    def length(self):
        return len(self.data)

    def _eval(self, ks):
        if ks.size and ks.max() > len(self.data):
            raise OutOfRange(f"index {int(ks.max())} beyond sampled length {len(self.data)}")
        return np.asarray(self.data, dtype=np.float64)[ks - 1]


class Op(str, Enum):
    SUM = "sum"
    SCALE = "scale"
    NEGATE = "negate"
    SHIFT = "shift"
    REPEAT_BLOCKS = "repeat_blocks"
    INTERLEAVE_CONST = "interleave_const"
    SHIFTED_INTERLEAVE = "shifted_interleave"
    MAP = "map"


class Order(str, Enum):
    X_FIRST = "x_first"
    CONST_FIRST = "const_first"


# (min children, max children, number of args)
_ARITY = {
    Op.SUM: (2, None, 0),
    Op.SCALE: (1, 1, 1),
    Op.NEGATE: (1, 1, 0),
    Op.SHIFT: (1, 1, 1),
    Op.REPEAT_BLOCKS: (1, 1, 1),
    Op.INTERLEAVE_CONST: (1, 1, 3),
    Op.SHIFTED_INTERLEAVE: (1, 1, 1),
    Op.MAP: (1, 1, 1),
}


def _positive_int(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise MalformedSpec(f"{what} must be a positive integer, got {value!r}")


@dataclass(frozen=True, eq=False)
class Combinator(SequenceSpec):
    op: Op
    children: tuple[SequenceSpec, ...]
    args: tuple = ()

    def __post_init__(self):
        try:
            op = Op(self.op)
        except ValueError:
            raise MalformedSpec(f"unknown combinator {self.op!r}") from None
        object.__setattr__(self, "op", op)
        lo, hi, nargs = _ARITY[op]
        n = len(self.children)
        if n < lo or (hi is not None and n > hi):
            raise MalformedSpec(f"{op.value}: wrong number of children ({n})")
        if len(self.args) != nargs:
            raise MalformedSpec(f"{op.value}: expected {nargs} args, got {len(self.args)}")
        if not all(isinstance(c, SequenceSpec) for c in self.children):
            raise MalformedSpec(f"{op.value}: children must be sequence specs")
        if op is Op.SCALE and not math.isfinite(float(self.args[0])):
            raise MalformedSpec("scale factor must be finite")
        if op is Op.SHIFT:
            d = self.args[0]
            if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 0:
                raise MalformedSpec(f"shift must be a nonnegative integer, got {d!r}")
        if op in (Op.REPEAT_BLOCKS, Op.SHIFTED_INTERLEAVE):
            _positive_int(self.args[0], "block length p")
        if op is Op.INTERLEAVE_CONST:
            ell, p, order = self.args
            _positive_int(p, "block length p")
            try:
                order = Order(order)
            except ValueError:
                raise MalformedSpec(f"unknown interleave order {order!r}") from None
            object.__setattr__(self, "args", (float(ell), p, order))
        if op is Op.MAP and not callable(self.args[0]):
            raise MalformedSpec("map requires a callable function")

    @property
    def child(self) -> SequenceSpec:
        return self.children[0]

    def _eval(self, ks):
        op = self.op
        if op is Op.SUM:
            return reduce(np.add, (c._eval(ks) for c in self.children))
        if op is Op.SCALE:
            return float(self.args[0]) * self.child._eval(ks)
        if op is Op.NEGATE:
            return -self.child._eval(ks)
        if op is Op.SHIFT:
            return self.child._eval(ks + self.args[0])
        if op is Op.REPEAT_BLOCKS:
            p = self.args[0]
            return self.child._eval((ks - 1) // p + 1)
        if op is Op.INTERLEAVE_CONST:
            ell, p, order = self.args
            block = (ks - 1) // p
            is_x = block % 2 == (0 if order is Order.X_FIRST else 1)
            out = np.full(ks.shape, ell, dtype=np.float64)
            if is_x.any():
                out[is_x] = self.child._eval(block[is_x] // 2 + 1)
            return out
        if op is Op.SHIFTED_INTERLEAVE:
            p = self.args[0]
            block = (ks - 1) // p
            pair = block // 2
            # pair j (0-based) is (x_{j+2} block, x_{j+1} block)
            return self.child._eval(np.where(block % 2 == 0, pair + 2, pair + 1))
        if op is Op.MAP:
            return np.asarray(self.args[0](self.child._eval(ks)), dtype=np.float64)
        raise MalformedSpec(f"unhandled combinator {op}")  # pragma: no cover

    @property
    def period(self):
        op = self.op
        if op is Op.SCALE and float(self.args[0]) == 0.0:
            return 1
        periods = [c.period for c in self.children]
        if any(q is None for q in periods):
            return None
        if op is Op.SUM:
            return reduce(math.lcm, periods)
        if op in (Op.SCALE, Op.NEGATE, Op.SHIFT, Op.MAP):
            return periods[0]
        if op is Op.REPEAT_BLOCKS:
            return periods[0] * self.args[0]
        if op is Op.INTERLEAVE_CONST:
            return 2 * self.args[1] * periods[0]
        if op is Op.SHIFTED_INTERLEAVE:
            return 2 * self.args[0] * periods[0]
        return None  # pragma: no cover

    @property
    def nondecreasing(self):
        if self.period == 1:
            return True
        op = self.op
        if op is Op.SUM:
            return all(c.nondecreasing for c in self.children)
        if op is Op.SCALE:
            return float(self.args[0]) >= 0 and self.child.nondecreasing
        if op in (Op.SHIFT, Op.REPEAT_BLOCKS):
            return self.child.nondecreasing
        if op is Op.MAP:
            return self.child.nondecreasing and bool(
                getattr(self.args[0], "monotone_nondecreasing", False)
            )
        return False

    @property
    def length(self):
        lengths = [c.length for c in self.children]
        if all(n is None for n in lengths):
            return None
        op = self.op
        if op is Op.SUM:
            return min(n for n in lengths if n is not None)
        n = lengths[0]
        if op is Op.SHIFT:
            return max(n - self.args[0], 0)
        if op is Op.REPEAT_BLOCKS:
            return n * self.args[0]
        if op is Op.INTERLEAVE_CONST:
            _, p, order = self.args
            return 2 * n * p if order is Order.X_FIRST else (2 * n + 1) * p
        if op is Op.SHIFTED_INTERLEAVE:
            return 2 * (n - 1) * self.args[0]
        return n


def eval_sequence(spec: SequenceSpec, k: int) -> float:
    """Value ``x_k`` of ``spec``."""
    if k < 1:
        raise OutOfRange("sequence indices start at 1")
    return float(spec.evaluate(np.array([k]))[0])


# ---------------------------------------------------------------------------
# Differences and violation sets
# ---------------------------------------------------------------------------


class Mode(str, Enum):
    UPWARD = "upward"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class StepParams:
    p: int
    epsilon: float
    N: int

    def __post_init__(self):
        if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 1:
            raise BadParams(f"step p must be a positive integer, got {self.p!r}")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise BadParams(f"epsilon must be positive, got {self.epsilon!r}")
        if int(self.N) != self.N or self.N <= self.p:
            raise BadParams(f"prefix length N must exceed p (N={self.N}, p={self.p})")


def p_step_differences(spec: SequenceSpec, p: int, N: int) -> np.ndarray:
    """``d_k = x_k - x_{k+p}`` for ``k = 1..N-p`` (uses ``x_1..x_N``)."""
    if N <= p:
        raise BadParams(f"N must exceed p (N={N}, p={p})")
    x = spec.values(N)
    return x[: N - p] - x[p:]


def upward_differences(spec: SequenceSpec, p: int, N: int) -> np.ndarray:
    """``d_k`` for ``k = 1..N`` (uses ``x_1..x_{N+p}``)."""
    x = spec.values(N + p)
    return x[:N] - x[p:]


def _violation_mask(d: np.ndarray, epsilon: float, mode: Mode) -> np.ndarray:
    if Mode(mode) is Mode.UPWARD:
        return d >= epsilon
    return np.abs(d) >= epsilon


@dataclass(eq=False)
class ViolationSet:
    """Indices ``k <= N`` whose p-step difference meets the threshold."""

    indices: np.ndarray
    differences: np.ndarray
    N: int
    p: int
    epsilon: float
    mode: Mode = Mode.UPWARD

    def __len__(self):
        return int(self.indices.size)

    def as_set(self) -> set[int]:
        return set(self.indices.tolist())

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"# schema_version: {CSV_SCHEMA_VERSION}\n")
            writer = csv.writer(fh)
            writer.writerow(["k", "d_k"])
            for k, d in zip(self.indices.tolist(), self.differences.tolist()):
                writer.writerow([k, repr(d)])


def violation_set(spec: SequenceSpec, params: StepParams, mode: Mode = Mode.UPWARD) -> ViolationSet:
    d = upward_differences(spec, params.p, params.N)
    mask = _violation_mask(d, params.epsilon, mode)
    idx = np.flatnonzero(mask)
    return ViolationSet(
        indices=idx + 1,
        differences=d[idx],
        N=params.N,
        p=params.p,
        epsilon=params.epsilon,
        mode=Mode(mode),
    )


def prefix_density(v: ViolationSet) -> float:
    return len(v) / v.N


class Trend(str, Enum):
    DECREASING = "Decreasing"
    INCREASING = "Increasing"
    FLAT = "Flat"
    MIXED = "Mixed"


def trend_of(fractions: Sequence[float], tol: float = FLAT_TOLERANCE) -> Trend:
    """Label the last three fractions (fewer if the curve is shorter)."""
    tail = list(fractions)[-3:]
    steps = [b - a for a, b in zip(tail, tail[1:])]
    # count/N fractions subtract inexactly; keep 1e-3 steps on the flat side
    tol = tol + 1e-12
    if all(abs(s) <= tol for s in steps):
        return Trend.FLAT
    if all(s <= tol for s in steps):
        return Trend.DECREASING
    if all(s >= -tol for s in steps):
        return Trend.INCREASING
    return Trend.MIXED


@dataclass(frozen=True)
class DensityCurve:
    grid: tuple[int, ...]
    fractions: tuple[float, ...]
    counts: tuple[int, ...]
    trend: Trend

    def to_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "counts": list(self.counts),
            "fractions": list(self.fractions),
            "trend": self.trend.value,
        }


def _check_grid(grid: Sequence[int], p: int) -> tuple[int, ...]:
    grid = tuple(int(n) for n in grid)
    if not grid:
        raise BadParams("grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise BadParams(f"grid must be strictly increasing: {list(grid)}")
    if grid[-1] <= p:
        raise InsufficientData(f"largest prefix {grid[-1]} does not exceed p={p}")
    if grid[0] <= p:
        raise BadParams(f"every grid point must exceed p={p}")
    return grid


def density_from_mask(mask: np.ndarray, grid: Sequence[int], tol: float = FLAT_TOLERANCE) -> DensityCurve:
    """Prefix densities of a violation mask (``mask[k-1]`` for index k)."""
    cum = np.cumsum(mask, dtype=np.int64)
    counts = tuple(int(cum[n - 1]) for n in grid)
    fractions = tuple(c / n for c, n in zip(counts, grid))
    return DensityCurve(tuple(grid), fractions, counts, trend_of(fractions, tol))


def density_curve(
    spec: SequenceSpec,
    p: int,
    epsilon: float,
    grid: Sequence[int],
    mode: Mode = Mode.UPWARD,
    tol: float = FLAT_TOLERANCE,
) -> DensityCurve:
    """Prefix violation densities along ``grid``.

    Violation of index k does not depend on N, so the set at each grid
    point is the restriction of the set at the largest one.
    """
    grid = _check_grid(grid, p)
    StepParams(p, epsilon, grid[-1])
    d = upward_differences(spec, p, grid[-1])
    return density_from_mask(_violation_mask(d, epsilon, mode), grid, tol)


def exact_period_density(
    spec: SequenceSpec, p: int, epsilon: float, mode: Mode = Mode.UPWARD
) -> Fraction:
    """Exact natural density of the violation set of a periodic spec."""
    L = spec.period
    if L is None:
        raise NotPeriodic("sequence has no declared period")
    StepParams(p, epsilon, p + 1)
    d = upward_differences(spec, p, L)
    return Fraction(int(np.count_nonzero(_violation_mask(d, epsilon, mode))), L)


def period_differences(spec: SequenceSpec, p: int) -> np.ndarray:
    """p-step differences over one full period."""
    L = spec.period
    if L is None:
        raise NotPeriodic("sequence has no declared period")
    return upward_differences(spec, p, L)


# ---------------------------------------------------------------------------
# CSV ingestion / export
# ---------------------------------------------------------------------------


def _data_lines(fh) -> Iterable[str]:
    for line in fh:
        if line.strip() and not line.lstrip().startswith("#"):
            yield line


def read_sequence_csv(path: str | Path) -> Sampled:
    """Read a ``n,x`` CSV with contiguous 1-based ``n``."""
    with open(path, newline="") as fh:
        reader = csv.reader(_data_lines(fh))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["n", "x"]:
            raise MalformedSpec(f"{path}: expected header 'n,x', got {header!r}")
        values = []
        for expected, row in enumerate(reader, start=1):
            try:
                n, x = int(row[0]), float(row[1])
            except (ValueError, IndexError):
                raise MalformedSpec(f"{path}: bad row {row!r}") from None
            if n != expected:
                raise MalformedSpec(f"{path}: index {n} out of sequence (expected {expected})")
            values.append(x)
    return Sampled(tuple(values))


def write_sequence_csv(spec: SequenceSpec, N: int, path: str | Path) -> None:
    x = spec.values(N)
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema_version: {CSV_SCHEMA_VERSION}\n")
        writer = csv.writer(fh)
        writer.writerow(["n", "x"])
        for k, v in enumerate(x.tolist(), start=1):
            writer.writerow([k, repr(v)])
