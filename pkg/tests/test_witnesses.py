import math

import numpy as np
import pytest

from upward_qc import Order, combine, interleave_with_constant, make_builtin, repeat_blocks, shifted_interleave
from upward_qc.errors import BadParams, MalformedSpec, UnknownWitness
from upward_qc.witnesses import PERIOD, SIGN_BOUNDED, UNBOUNDED, catalog, describe


@pytest.mark.parametrize(
    "name,params,expected",
    [
        ("alternating", {}, [-1, 1, -1, 1, -1, 1]),
        ("linear", {"slope": 2, "offset": -1}, [1, 3, 5, 7]),
        ("n_plus_p", {"p": 3}, [4, 5, 6]),
        ("decreasing_steps", {}, [0, -1, -3, -6, -10]),
        ("rapid_increasing", {}, [1, 3, 6, 10, 15]),
        ("constant", {"c": 2.5}, [2.5, 2.5, 2.5]),
        ("square_spikes", {}, [1, 0, 0, 1, 0, 0, 0, 0, 1, 0]),
    ],
)
def test_builtin_values(name, params, expected):
    assert make_builtin(name, **params).values(len(expected)).tolist() == expected


def test_sin_and_cos_match_math():
    np.testing.assert_allclose(make_builtin("sin_integers").values(50), [math.sin(k) for k in range(1, 51)], atol=1e-15)
    np.testing.assert_allclose(
        make_builtin("cos_rational", L=7).values(50),
        [math.cos(2 * math.pi * k / 7) for k in range(1, 51)],
        atol=1e-12,
    )


@pytest.mark.parametrize("L", [1, 2, 3, 5, 12])
def test_cos_rational_bit_exact_period(L):
    x = make_builtin("cos_rational", L=L).values(20 * L)
    assert np.array_equal(x[:-L], x[L:])


def test_decreasing_steps_drop_grows():
    x = make_builtin("decreasing_steps").values(60)
    for p in (1, 2, 5):
        k = np.arange(1, 61 - p)
        assert np.all(x[: len(k)] - x[p:] >= p * k)


def test_rapid_increasing_negative_steps():
    x = make_builtin("rapid_increasing").values(100)
    assert np.all(x[:-1] - x[1:] < 0)


def test_unknown_witness():
    with pytest.raises(UnknownWitness):
        make_builtin("nope")


@pytest.mark.parametrize(
    "name,params",
    [("cos_rational", {"L": 0}), ("cos_rational", {"L": 2.5}), ("n_plus_p", {"p": 0}), ("linear", {"bogus": 1}),
     ("linear", {"slope": float("nan")})],
)
def test_bad_params(name, params):
    with pytest.raises(BadParams):
        make_builtin(name, **params)


class TestBuilders:
    def test_repeat_blocks(self):
        y = repeat_blocks(make_builtin("linear"), 2)
        assert y.values(8).tolist() == [1, 1, 2, 2, 3, 3, 4, 4]

    def test_interleave_x_first(self):
        y = interleave_with_constant(make_builtin("linear"), 0.0, 2)
        assert y.values(8).tolist() == [1, 1, 0, 0, 2, 2, 0, 0]

    def test_interleave_const_first(self):
        y = interleave_with_constant(make_builtin("linear"), 9.0, 1, Order.CONST_FIRST)
        assert y.values(6).tolist() == [9, 1, 9, 2, 9, 3]

    def test_shifted_interleave(self):
        y = shifted_interleave(make_builtin("linear"), 1)
        assert y.values(6).tolist() == [2, 1, 3, 2, 4, 3]

    def test_shifted_interleave_blocks(self):
        y = shifted_interleave(make_builtin("linear"), 2)
        assert y.values(8).tolist() == [2, 2, 1, 1, 3, 3, 2, 2]

    def test_combine_rejects_structural_ops(self):
        with pytest.raises(MalformedSpec):
            combine("repeat_blocks", make_builtin("linear"), arg=2)

    def test_periods_propagate(self):
        alt = make_builtin("alternating")
        assert repeat_blocks(alt, 3).period == 6
        assert interleave_with_constant(alt, 0.0, 2).period == 8
        assert combine("scale", make_builtin("linear"), arg=0).period == 1
        assert combine("negate", alt).period == 2

    def test_sampled_lengths(self):
        from upward_qc import Sampled

        s = Sampled((1.0, 2.0, 3.0))
        assert repeat_blocks(s, 2).length == 6
        assert combine("shift", s, arg=1).length == 2
        assert interleave_with_constant(s, 0.0, 2).length == 12
        assert shifted_interleave(s, 1).length == 4
        assert shifted_interleave(s, 1).values(4).tolist() == [2, 1, 3, 2]


class TestCatalog:
    def test_every_entry_verifies(self):
        for w in catalog():
            assert w.origin
            w.verify()

    def test_declared_properties(self):
        assert describe("alternating").declared_properties == {PERIOD}
        assert describe("linear").declared_properties == {SIGN_BOUNDED, UNBOUNDED}
        assert describe("linear", slope=0).declared_properties == {PERIOD, SIGN_BOUNDED}
        assert UNBOUNDED in describe("decreasing_steps").declared_properties

    def test_false_declaration_caught(self):
        w = describe("sin_integers")
        bad = type(w)(w.name, {}, w.origin, frozenset({SIGN_BOUNDED}))
        with pytest.raises(AssertionError):
            bad.verify()
