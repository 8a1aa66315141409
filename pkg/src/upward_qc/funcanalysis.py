"""Function catalog, image sequences and SUC_p membership evidence.

A function can only be *refuted* as a member of SUC_p from finite data:
find a witness sequence that is a certified member of the upward class
whose image is not.  Consistency over a suite is all that is ever
reported otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .classify import (
    DEFAULT_EPS,
    DEFAULT_FLOOR,
    DEFAULT_GRID,
    JSON_SCHEMA_VERSION,
    Status,
    Verdict,
    classify_upward,
)
from .errors import (
    BadParams,
    DegenerateFrequency,
    MalformedSpec,
    MissingMetadata,
    NotMonotone,
    SuiteInvalid,
    UnboundedFunction,
)
from .equidist import DEGENERATE_SIN_TOL
from .seqcore import Combinator, Op, SequenceSpec, upward_differences
from .witnesses import interleave_with_constant, make_builtin, repeat_blocks


class Kind(str, Enum):
    POLYNOMIAL = "Polynomial"
    SIN_WAVE = "SinWave"
    ARCTAN = "ArcTan"
    LOG_ONE_PLUS_EXP = "LogOnePlusExp"
    SQRT_MAX_ZERO = "SqrtMaxZero"
    AFFINE_MONOTONE = "AffineMonotone"
    PIECEWISE_LINEAR_MONOTONE = "PiecewiseLinearMonotone"
    PERTURBED = "Perturbed"


@dataclass(frozen=True)
class FunctionMetadata:
    monotone_nondecreasing: bool = False
    lipschitz_constant: float | None = None
    bounded: float | None = None
    concave: bool = False
    # (C, a) with |f(x) - f(y)| <= C |x - y|^a, for non-Lipschitz moduli
    holder: tuple[float, float] | None = None


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    kind: Kind
    params: Mapping
    metadata: FunctionMetadata = FunctionMetadata()

    @property
    def monotone_nondecreasing(self) -> bool:
        return self.metadata.monotone_nondecreasing

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        k, prm = self.kind, self.params
        if k is Kind.POLYNOMIAL:
            return np.polynomial.polynomial.polyval(x, prm["coeffs"])
        if k is Kind.SIN_WAVE:
            return prm["amplitude"] * np.sin(prm["frequency"] * x)
        if k is Kind.ARCTAN:
            return np.arctan(x)
        if k is Kind.LOG_ONE_PLUS_EXP:
            return np.logaddexp(0.0, x)
        if k is Kind.SQRT_MAX_ZERO:
            return np.sqrt(np.maximum(x, 0.0))
        if k is Kind.AFFINE_MONOTONE:
            return prm["a"] * x + prm["b"]
        if k is Kind.PIECEWISE_LINEAR_MONOTONE:
            xs, ys = zip(*prm["points"])
            return np.interp(x, xs, ys)
        if k is Kind.PERTURBED:
            return prm["base"](x) + prm["eps_prime"] * np.sin(prm["alpha"] * x)
        raise MalformedSpec(f"unknown function kind {k!r}")  # pragma: no cover

    def inverse_modulus(self, eps: float) -> float:
        """A ``delta`` with ``|x - y| < delta  =>  |f(x) - f(y)| < eps``."""
        md = self.metadata
        if md.lipschitz_constant is not None:
            return math.inf if md.lipschitz_constant == 0 else eps / md.lipschitz_constant
        if md.holder is not None:
            c, a = md.holder
            return (eps / c) ** (1.0 / a)
        raise MissingMetadata(f"{self.kind.value}: no Lipschitz constant or Hoelder modulus")

    def to_dict(self) -> dict:
        params = dict(self.params)
        if self.kind is Kind.PERTURBED:
            params["base"] = params["base"].to_dict()
        if self.kind is Kind.PIECEWISE_LINEAR_MONOTONE:
            params["points"] = [list(pt) for pt in params["points"]]
        if self.kind is Kind.POLYNOMIAL:
            params["coeffs"] = list(params["coeffs"])
        md = self.metadata
        return {
            "kind": self.kind.value,
            "params": params,
            "metadata": {
                "monotone_nondecreasing": md.monotone_nondecreasing,
                "lipschitz_constant": md.lipschitz_constant,
                "bounded": md.bounded,
                "concave": md.concave,
                "holder": list(md.holder) if md.holder else None,
            },
        }


# ---------------------------------------------------------------------------
# Constructors (metadata derived from the closed form)
# ---------------------------------------------------------------------------


def polynomial(coeffs: Sequence[float]) -> FunctionSpec:
    """``sum coeffs[i] * t**i`` (ascending order)."""
    c = [float(v) for v in coeffs]
    if not c or not all(math.isfinite(v) for v in c):
        raise BadParams("polynomial needs finite coefficients")
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    deg = len(c) - 1
    if deg == 0:
        md = FunctionMetadata(True, 0.0, abs(c[0]), True)
    elif deg == 1:
        md = FunctionMetadata(c[1] >= 0, abs(c[1]), None, True)
    else:
        md = FunctionMetadata(False, None, None, deg == 2 and c[2] < 0)
    return FunctionSpec(Kind.POLYNOMIAL, {"coeffs": tuple(c)}, md)


def sin_wave(amplitude: float = 1.0, frequency: float = 1.0) -> FunctionSpec:
    md = FunctionMetadata(amplitude == 0, abs(amplitude * frequency), abs(amplitude), amplitude == 0)
    return FunctionSpec(Kind.SIN_WAVE, {"amplitude": float(amplitude), "frequency": float(frequency)}, md)


def arctan() -> FunctionSpec:
    return FunctionSpec(Kind.ARCTAN, {}, FunctionMetadata(True, 1.0, math.pi / 2))


def log_one_plus_exp() -> FunctionSpec:
    return FunctionSpec(Kind.LOG_ONE_PLUS_EXP, {}, FunctionMetadata(True, 1.0))


def sqrt_max_zero() -> FunctionSpec:
    return FunctionSpec(Kind.SQRT_MAX_ZERO, {}, FunctionMetadata(True, None, holder=(1.0, 0.5)))


def affine_monotone(a: float, b: float = 0.0) -> FunctionSpec:
    if not (a >= 0 and math.isfinite(a) and math.isfinite(b)):
        raise BadParams(f"affine monotone needs finite a >= 0, got a={a!r}")
    return FunctionSpec(Kind.AFFINE_MONOTONE, {"a": float(a), "b": float(b)}, FunctionMetadata(True, float(a), None, True))


def piecewise_linear_monotone(points: Sequence[Sequence[float]]) -> FunctionSpec:
    """Linear interpolation through ``points``, constant outside their range."""
    pts = tuple((float(x), float(y)) for x, y in points)
    if len(pts) < 2:
        raise BadParams("need at least two points")
    xs, ys = zip(*pts)
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise BadParams("abscissae must be strictly increasing")
    if any(b < a for a, b in zip(ys, ys[1:])):
        raise NotMonotone("ordinates must be non-decreasing")
    slope = max((y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(pts, pts[1:]))
    md = FunctionMetadata(True, slope, max(abs(y) for y in ys))
    return FunctionSpec(Kind.PIECEWISE_LINEAR_MONOTONE, {"points": pts}, md)


def identity() -> FunctionSpec:
    return polynomial([0.0, 1.0])


def catalog() -> dict[str, FunctionSpec]:
    return {
        "identity": identity(),
        "neg_identity": polynomial([0.0, -1.0]),
        "neg_square": polynomial([0.0, 0.0, -1.0]),
        "sin": sin_wave(1.0, 1.0),
        "arctan": arctan(),
        "log_one_plus_exp": log_one_plus_exp(),
        "sqrt_max_zero": sqrt_max_zero(),
        "affine_2x": affine_monotone(2.0, 0.0),
        "piecewise_linear": piecewise_linear_monotone([(0, 0), (1, 3), (2, 4), (5, 5)]),
        "concentration": polynomial([0.0, 4.0, -4.0]),
    }


def monotone_catalog() -> dict[str, FunctionSpec]:
    return {k: f for k, f in catalog().items() if f.monotone_nondecreasing}


_BUILDERS = {
    Kind.POLYNOMIAL: lambda p: polynomial(p["coeffs"]),
    Kind.SIN_WAVE: lambda p: sin_wave(p.get("amplitude", 1.0), p.get("frequency", 1.0)),
    Kind.ARCTAN: lambda p: arctan(),
    Kind.LOG_ONE_PLUS_EXP: lambda p: log_one_plus_exp(),
    Kind.SQRT_MAX_ZERO: lambda p: sqrt_max_zero(),
    Kind.AFFINE_MONOTONE: lambda p: affine_monotone(p["a"], p.get("b", 0.0)),
    Kind.PIECEWISE_LINEAR_MONOTONE: lambda p: piecewise_linear_monotone(p["points"]),
    Kind.PERTURBED: lambda p: perturb_function(
        function_from_dict(p["base"]),
        PerturbationParams(p["eps_prime"], p["alpha"], p.get("p", 1)),
    ),
}


def function_from_dict(obj: Mapping) -> FunctionSpec:
    """Parse ``{kind, params, metadata}``; claimed metadata is checked."""
    try:
        kind = Kind(obj["kind"])
        f = _BUILDERS[kind](dict(obj.get("params", {})))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (BadParams, NotMonotone, MalformedSpec)):
            raise
        raise MalformedSpec(f"bad function spec {obj!r}: {exc}") from exc
    claimed = dict(obj.get("metadata") or {})
    md = f.metadata
    if claimed.get("monotone_nondecreasing") and not md.monotone_nondecreasing:
        raise MalformedSpec(f"{kind.value}: monotone claim not verifiable")
    if claimed.get("concave") and not md.concave:
        raise MalformedSpec(f"{kind.value}: concavity claim not verifiable")
    lip = claimed.get("lipschitz_constant")
    if lip is not None:
        if md.lipschitz_constant is None or lip < md.lipschitz_constant:
            raise MalformedSpec(f"{kind.value}: Lipschitz constant {lip} not verifiable")
        md = replace(md, lipschitz_constant=float(lip))
    bound = claimed.get("bounded")
    if bound is not None:
        if md.bounded is None or bound < md.bounded:
            raise MalformedSpec(f"{kind.value}: bound {bound} not verifiable")
        md = replace(md, bounded=float(bound))
    return replace(f, metadata=md)


def eval_function(f: FunctionSpec, x: float) -> float:
    return float(f(x))


def image_sequence(f: FunctionSpec, spec: SequenceSpec) -> SequenceSpec:
    """The lazily composed sequence ``(f(x_k))``."""
    return Combinator(Op.MAP, (spec,), (f,))


# ---------------------------------------------------------------------------
# SUC_p evidence
# ---------------------------------------------------------------------------


def default_suite(p: int) -> dict[str, SequenceSpec]:
    suite = {
        "linear": make_builtin("linear"),
        "n_plus_p": make_builtin("n_plus_p", p=p),
    }
    if p % 2 == 0:
        suite["alternating"] = make_builtin("alternating")
    if p >= 2:
        suite["cos_rational"] = make_builtin("cos_rational", L=p)
    suite["rapid_increasing"] = make_builtin("rapid_increasing")
    suite["repeat_blocks(linear)"] = repeat_blocks(make_builtin("linear"), p)
    suite["interleave(square_spikes,0)"] = interleave_with_constant(make_builtin("square_spikes"), 0.0, p)
    return suite


def suite_specs(names: Sequence[str], p: int) -> dict[str, SequenceSpec]:
    known = default_suite(p)
    out = {}
    for name in names:
        if name in known:
            out[name] = known[name]
        elif name == "n_plus_p":
            out[name] = make_builtin("n_plus_p", p=p)
        elif name == "cos_rational":
            out[name] = make_builtin("cos_rational", L=p)
        else:
            out[name] = make_builtin(name)
    return out


class Overall(str, Enum):
    NOT_MEMBER = "NotMember"
    CONSISTENT = "ConsistentWithMembership"


@dataclass
class SucEvidenceReport:
    function: FunctionSpec
    p: int
    witnesses: dict[str, Verdict]
    images: dict[str, Verdict]
    overall: Overall
    refuting_witness: str | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": JSON_SCHEMA_VERSION,
            "function": self.function.to_dict(),
            "p": self.p,
            "overall": self.overall.value,
            "refuting_witness": self.refuting_witness,
            "witnesses": {
                name: {"witness": self.witnesses[name].to_dict(), "image": self.images[name].to_dict()}
                for name in self.witnesses
            },
        }


def suc_evidence(
    f: FunctionSpec,
    p: int,
    suite: Sequence[str] | Mapping[str, SequenceSpec] | None = None,
    eps_list: Sequence[float] = DEFAULT_EPS,
    grid: Sequence[int] = DEFAULT_GRID,
    floor: float = DEFAULT_FLOOR,
) -> SucEvidenceReport:
    if suite is None:
        specs = default_suite(p)
    elif isinstance(suite, Mapping):
        specs = dict(suite)
    else:
        specs = suite_specs(suite, p)
    witnesses, images = {}, {}
    refuting = None
    for name, spec in specs.items():
        wv = classify_upward(spec, p, eps_list, grid, floor)
        if wv.status is Status.VIOLATED:
            raise SuiteInvalid(f"witness {name!r} is not in the p-upward class (p={p})")
        iv = classify_upward(image_sequence(f, spec), p, eps_list, grid, floor)
        witnesses[name], images[name] = wv, iv
        if refuting is None and wv.status is Status.EXACT_MEMBER and iv.status is Status.VIOLATED:
            refuting = name
    overall = Overall.NOT_MEMBER if refuting else Overall.CONSISTENT
    return SucEvidenceReport(f, p, witnesses, images, overall, refuting)


@dataclass(frozen=True)
class InclusionResult:
    holds: bool
    counterexample: int | None
    delta: float
    image_count: int
    source_count: int


def monotone_inclusion_check(
    f: FunctionSpec, spec: SequenceSpec, p: int, epsilon: float, N: int
) -> InclusionResult:
    """Check ``V_{f(x)}(p, eps, N)`` is contained in ``V_x(p, delta, N)``.

    ``delta`` comes from the modulus of ``f`` (``eps / L`` for Lipschitz f).
    """
    if not f.monotone_nondecreasing:
        raise MissingMetadata(f"{f.kind.value} is not flagged non-decreasing")
    delta = f.inverse_modulus(epsilon)
    x = spec.values(N + p)
    fx = np.asarray(f(x), dtype=np.float64)
    image = fx[:N] - fx[p:] >= epsilon
    source = x[:N] - x[p:] >= delta
    bad = np.flatnonzero(image & ~source)
    return InclusionResult(
        holds=bad.size == 0,
        counterexample=int(bad[0]) + 1 if bad.size else None,
        delta=delta,
        image_count=int(image.sum()),
        source_count=int(source.sum()),
    )


# ---------------------------------------------------------------------------
# Nowhere-density perturbation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationParams:
    eps_prime: float
    alpha: float = 1.0
    p: int = 1

    def __post_init__(self):
        if not (self.eps_prime > 0 and self.alpha > 0):
            raise BadParams("eps_prime and alpha must be positive")
        if abs(math.sin(self.alpha * self.p / 2)) < DEGENERATE_SIN_TOL:
            raise DegenerateFrequency(f"sin(alpha*p/2) = 0 for alpha={self.alpha}, p={self.p}")

    @property
    def s_p_alpha(self) -> float:
        return 2 * abs(math.sin(self.alpha * self.p / 2))

    @property
    def c(self) -> float:
        return self.eps_prime * self.s_p_alpha / 4


def perturb_function(f: FunctionSpec, params: PerturbationParams) -> FunctionSpec:
    """``g(x) = f(x) + eps' sin(alpha x)``, within ``eps'`` of ``f`` in sup norm."""
    if f.metadata.bounded is None:
        raise UnboundedFunction(f"{f.kind.value} has no known bound")
    lip = f.metadata.lipschitz_constant
    md = FunctionMetadata(
        monotone_nondecreasing=False,
        lipschitz_constant=None if lip is None else lip + params.eps_prime * params.alpha,
        bounded=f.metadata.bounded + params.eps_prime,
    )
    prm = {"base": f, "eps_prime": params.eps_prime, "alpha": params.alpha, "p": params.p}
    return FunctionSpec(Kind.PERTURBED, prm, md)


def perturbation_density(g: FunctionSpec, N: int) -> float:
    """Density of ``{k <= N : g(k) - g(k+p) >= c}`` along ``x_k = k``."""
    if g.kind is not Kind.PERTURBED:
        raise MalformedSpec("expected a perturbed function")
    prm = PerturbationParams(g.params["eps_prime"], g.params["alpha"], g.params["p"])
    d = upward_differences(image_sequence(g, make_builtin("linear")), prm.p, N)
    return int(np.count_nonzero(d >= prm.c)) / N
