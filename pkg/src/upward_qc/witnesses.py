"""Catalog of concrete sequences and the block constructions built on them.

Each catalog entry is registered as a builtin closed form with the
properties it provably has (exact period, non-decreasing, unbounded).
Where a construction only needs an inequality (``x_{k+1} < x_k - k``)
the catalog fixes the equality so outputs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, MalformedSpec, UnknownWitness
from .seqcore import (
    Builtin,
    BuiltinForm,
    Combinator,
    Op,
    Order,
    SequenceSpec,
    builtin_form,
    register_builtin,
)

PERIOD = "PeriodL"
SIGN_BOUNDED = "SignBoundedNegative"
UNBOUNDED = "Unbounded"


def _require_int(name, lo):
    def check(params):
        v = params[name]
        if float(v) != int(v) or v < lo:
            raise BadParams(f"{name} must be an integer >= {lo}, got {v!r}")

    return check


def _require_finite(*names):
    def check(params):
        for name in names:
            if not math.isfinite(float(params[name])):
                raise BadParams(f"{name} must be finite")

    return check


def _alternating(ks):
    return np.where(ks % 2 == 0, 1.0, -1.0)


def _cos_rational(ks, L):
    L = int(L)
    r = ks % L
    # fold r -> min(r, L-r) so that x_r == x_{L-r} bit-for-bit
    r = np.minimum(r, L - r)
    return np.cos(2.0 * np.pi * r / L)


def _decreasing_steps(ks):
    # x_1 = 0, x_{k+1} = x_k - k  =>  x_k = -k(k-1)/2
    k = ks.astype(np.float64)
    return k * (1.0 - k) / 2.0


def _rapid_increasing(ks):
    # x_1 = 1, x_{k+1} = x_k + k + 1  =>  x_k = 1 + (k-1)(k+2)/2
    k = ks.astype(np.float64)
    return 1.0 + (k - 1.0) * (k + 2.0) / 2.0


def _square_spikes(ks):
    r = np.sqrt(ks.astype(np.float64)).astype(np.int64)
    # correct for float sqrt rounding at large k
    r = np.where(r * r > ks, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= ks, r + 1, r)
    return np.where(r * r == ks, 1.0, 0.0)


register_builtin(
    BuiltinForm("alternating", lambda ks: _alternating(ks), period=lambda _: 2)
)
register_builtin(
    BuiltinForm(
        "linear",
        lambda ks, slope, offset: slope * ks.astype(np.float64) + offset,
        defaults={"slope": 1.0, "offset": 0.0},
        validate=_require_finite("slope", "offset"),
        period=lambda prm: 1 if prm["slope"] == 0 else None,
        nondecreasing=lambda prm: prm["slope"] >= 0,
        unbounded=True,
    )
)
register_builtin(
    BuiltinForm(
        "n_plus_p",
        lambda ks, p: ks.astype(np.float64) + p,
        defaults={"p": 1},
        validate=_require_int("p", 1),
        nondecreasing=lambda _: True,
        unbounded=True,
    )
)
register_builtin(
    BuiltinForm(
        "cos_rational",
        _cos_rational,
        defaults={"L": 3},
        validate=_require_int("L", 1),
        period=lambda prm: int(prm["L"]),
    )
)
register_builtin(BuiltinForm("sin_integers", lambda ks: np.sin(ks.astype(np.float64))))
register_builtin(BuiltinForm("decreasing_steps", lambda ks: _decreasing_steps(ks), unbounded=True))
register_builtin(
    BuiltinForm(
        "rapid_increasing",
        lambda ks: _rapid_increasing(ks),
        nondecreasing=lambda _: True,
        unbounded=True,
    )
)
register_builtin(
    BuiltinForm(
        "constant",
        lambda ks, c: np.full(ks.shape, float(c)),
        defaults={"c": 0.0},
        validate=_require_finite("c"),
        period=lambda _: 1,
    )
)
register_builtin(BuiltinForm("square_spikes", lambda ks: _square_spikes(ks)))


_ORIGINS = {
    "alternating": "period-2 sequence (-1)^n; 2-upward but not 1-upward",
    "linear": "x_n = slope*n + offset; slope 1 is the identity witness x_n = n",
    "n_plus_p": "x_n = n + p; p-upward but not statistically quasi-Cauchy",
    "cos_rational": "x_n = cos(2 pi n / L); exact period L, step-incomparability witness",
    "sin_integers": "x_n = sin n; equidistributed phases, positive violation density",
    "decreasing_steps": "unbounded-below construction x_{k+1} = x_k - k",
    "rapid_increasing": "unbounded-above subsequence x_{k+1} = x_k + k + 1",
    "constant": "x_n = c",
    "square_spikes": "1 at perfect squares, 0 elsewhere; statistically convergent to 0",
}


@dataclass(frozen=True)
class WitnessDescriptor:
    name: str
    params: dict = field(default_factory=dict)
    origin: str = ""
    declared_properties: frozenset = frozenset()

    def spec(self) -> SequenceSpec:
        return make_builtin(self.name, **self.params)

    def verify(self, probe: int = 200) -> None:
        """Check declared properties on indices ``1..probe``."""
        spec = self.spec()
        x = spec.values(probe + (spec.period or 0))
        if PERIOD in self.declared_properties:
            L = spec.period
            if not np.array_equal(x[:probe], x[L : L + probe]):
                raise AssertionError(f"{self.name}: not periodic with period {L}")
        if SIGN_BOUNDED in self.declared_properties:
            if np.any(np.diff(x) < 0):
                raise AssertionError(f"{self.name}: p-step differences not all <= 0")


def describe(name: str, **params) -> WitnessDescriptor:
    spec = make_builtin(name, **params)
    form = builtin_form(name)
    props = set()
    if spec.period is not None:
        props.add(PERIOD)
    if spec.nondecreasing:
        props.add(SIGN_BOUNDED)
    if form.unbounded and not (name == "linear" and spec.param_map["slope"] == 0):
        props.add(UNBOUNDED)
    return WitnessDescriptor(name, dict(params), _ORIGINS.get(name, ""), frozenset(props))


def catalog() -> list[WitnessDescriptor]:
    return [describe(name) for name in _ORIGINS]


def make_builtin(name: str, **params) -> Builtin:
    builtin_form(name)
    try:
        return Builtin(name, tuple(sorted(params.items())))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (BadParams, UnknownWitness)):
            raise
        raise BadParams(f"{name}: {exc}") from exc


def repeat_blocks(spec: SequenceSpec, p: int) -> SequenceSpec:
    """Repeat each term ``p`` times: ``y_{(j-1)p+i} = x_j``."""
    return Combinator(Op.REPEAT_BLOCKS, (spec,), (p,))


def interleave_with_constant(
    spec: SequenceSpec, ell: float, p: int, order: Order | str = Order.X_FIRST
) -> SequenceSpec:
    """Alternate ``p``-blocks of ``x_j`` with ``p``-blocks of ``ell``."""
    return Combinator(Op.INTERLEAVE_CONST, (spec,), (ell, p, order))


def shifted_interleave(spec: SequenceSpec, p: int) -> SequenceSpec:
    """Block order ``x_2, x_1, x_3, x_2, x_4, x_3, ...`` (each ``p`` times)."""
    return Combinator(Op.SHIFTED_INTERLEAVE, (spec,), (p,))


def combine(op: Op | str, *specs: SequenceSpec, arg=None) -> SequenceSpec:
    """Pointwise combinators: ``sum``, ``scale`` (arg=alpha), ``negate``, ``shift`` (arg=d)."""
    op = Op(op)
    if op not in (Op.SUM, Op.SCALE, Op.NEGATE, Op.SHIFT):
        raise MalformedSpec(f"combine does not handle {op.value}")
    args = () if arg is None else (arg,)
    return Combinator(op, tuple(specs), args)
