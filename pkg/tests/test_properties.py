import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from upward_qc import StepParams, exact_period_density, interleave_with_constant, make_builtin, repeat_blocks, violation_set
from upward_qc.approx import SamplingGrid, bernstein_eval, undershoot_profile
from upward_qc.classify import Status, classify_upward
from upward_qc.equidist import arc_density_prediction, sine_downward_density, sine_upward_density
from upward_qc.funcanalysis import affine_monotone, catalog, image_sequence, piecewise_linear_monotone, polynomial
from upward_qc.witnesses import catalog as witness_catalog

FAST = settings(max_examples=60, derandomize=True, deadline=None, suppress_health_check=list(HealthCheck))
walks = st.lists(st.integers(-8, 8), min_size=40, max_size=300).map(lambda s: np.cumsum(s) / 4.0)


def sampled(values):
    from upward_qc import Sampled

    return Sampled(tuple(float(v) for v in values))


@FAST
@given(walks, st.integers(1, 4), st.sampled_from([0.25, 0.5, 1.0, 1.5]))
def test_repeat_blocks_index_identity(xs, p, eps):
    x = sampled(xs)
    M = len(xs) - 2
    y = repeat_blocks(x, p)
    vy = violation_set(y, StepParams(p, eps, p * (M + 1))).as_set()
    vx = violation_set(x, StepParams(1, eps, M + 1)).as_set()
    for j in range(1, M + 1):
        for i in range(1, p + 1):
            assert (((j - 1) * p + i) in vy) == (j in vx)


@FAST
@given(walks, st.integers(1, 4), st.sampled_from([-1.0, 0.0, 2.5]))
def test_interleave_differences(xs, p, ell):
    x = sampled(xs)
    y = interleave_with_constant(x, ell, p)
    M = len(xs) - 1
    yv = y.values(2 * p * M)
    for j in range(1, M):
        for i in range(p):
            x_pos = 2 * p * (j - 1) + i  # 0-based index into yv
            assert yv[x_pos] - yv[x_pos + p] == xs[j - 1] - ell
            assert yv[x_pos + p] - yv[x_pos + 2 * p] == ell - xs[j]


@pytest.mark.parametrize("p", [1, 2, 3, 7])
def test_decreasing_and_rapid_witnesses(p):
    x = make_builtin("decreasing_steps").values(400 + p)
    k = np.arange(1, 401)
    d = x[:400] - x[p : 400 + p]
    assert np.array_equal(d, [sum(kk + i for i in range(p)) for kk in k])
    assert np.all(d >= p * k)
    r = make_builtin("rapid_increasing")
    rv = r.values(400 + p)
    assert np.all(rv[:400] - rv[p:] < 0)
    assert classify_upward(r, p).status is Status.EXACT_MEMBER


@pytest.mark.parametrize("L", [2, 3, 5, 9])
def test_cos_rational_step_period_zero(L):
    v = make_builtin("cos_rational", L=L).values(30 * L)
    assert np.all(v[:-L] - v[L:] == 0)


@FAST
@given(st.sampled_from(["alternating", "cos_rational", "constant"]), st.integers(1, 6), st.floats(0.01, 2.5), st.integers(1, 20))
def test_exact_period_agrees_with_prefix(name, p, eps, reps):
    spec = make_builtin(name, **({"L": 7} if name == "cos_rational" else {}))
    N = spec.period * max(reps, p + 1)
    v = violation_set(spec, StepParams(p, eps, N))
    assert exact_period_density(spec, p, eps) * N == len(v)


@pytest.mark.parametrize("w", witness_catalog(), ids=lambda w: w.name)
@pytest.mark.parametrize("p", [1, 2])
def test_hierarchy_multiples(w, p):
    grid = (100, 1000, 10_000)
    v = classify_upward(w.spec(), p, grid=grid)
    if v.status is Status.EXACT_MEMBER and "zero-difference" in (v.certificate or ""):
        for m in (2, 3):
            assert classify_upward(w.spec(), m * p, grid=grid).status is not Status.VIOLATED


@FAST
@given(st.sampled_from(sorted(catalog())), st.sampled_from([0.25, 0.5, 2.0, 8.0]), st.integers(1, 3), st.floats(0.05, 2.0))
def test_positive_scaling_of_images(fname, alpha, p, eps):
    f = catalog()[fname]
    spec = make_builtin("sin_integers")
    scaled = image_sequence(f, spec)
    xs = scaled.values(2000 + p)
    a = {k for k in range(1, 2001) if alpha * xs[k - 1] - alpha * xs[k + p - 1] >= eps}
    b = violation_set(scaled, StepParams(p, eps / alpha, 2000)).as_set()
    assert a == b


@pytest.mark.parametrize("p", [1, 2, 3])
def test_negation_asymmetry_density_one(p):
    img = image_sequence(polynomial([0, -1]), make_builtin("linear"))
    for N in (10, 1000, 10_000):
        for eps in (0.5, float(p)):
            assert len(violation_set(img, StepParams(p, eps, N))) == N


@FAST
@given(st.integers(1, 3), st.floats(0.05, 1.0))
def test_cone_closure_finite_prefix(p, eps):
    w = make_builtin("rapid_increasing")
    f = affine_monotone(1.5, 2.0)
    g = piecewise_linear_monotone([(0, 0), (10, 1), (1e9, 2)])
    N = 5000
    for h in (f, g):
        assert len(violation_set(image_sequence(h, w), StepParams(p, eps / 2, N))) == 0
    total = piecewise_linear_monotone([(0, 2), (10, 18), (1e9, 1.5e9 + 4)])
    # f + g on the knots of g (both affine between knots)
    assert len(violation_set(image_sequence(total, w), StepParams(p, eps, N))) == 0


@pytest.mark.parametrize("p,eps", [(1, 0.4), (2, math.sin(1.0)), (3, 0.2)])
def test_sine_convergence_and_symmetry(p, eps):
    pred = arc_density_prediction(p, 1.0, eps).predicted_density
    gaps = [abs(sine_upward_density(p, 1.0, eps, n) - pred) for n in (10**4, 10**5, 10**6)]
    assert all(b <= a + 0.005 for a, b in zip(gaps, gaps[1:]))
    assert abs(sine_upward_density(p, 1.0, eps, 10**6) - sine_downward_density(p, 1.0, eps, 10**6)) <= 0.01


def test_positivity_at_half_amplitude():
    for p in (1, 2, 3, 4):
        s = 2 * abs(math.sin(p / 2))
        assert arc_density_prediction(p, 1.0, s / 2).predicted_density == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("fname", sorted(catalog()))
def test_endpoint_interpolation_exact(fname):
    f = catalog()[fname]
    for n in (1, 2, 17, 100, 499, 500):
        assert bernstein_eval(f, n, 0.0) == float(f(0.0))
        assert bernstein_eval(f, n, 1.0) == float(f(1.0))


@FAST
@given(st.integers(1, 120), st.lists(st.floats(-5, 5), min_size=1, max_size=121))
def test_operator_positivity(n, bumps):
    t = np.linspace(0, 1, 51)
    g = lambda s: np.sin(3 * s)
    extra = np.abs(np.resize(np.asarray(bumps), n + 1))
    f = lambda s: g(s) + extra[np.rint(np.asarray(s) * n).astype(int)]
    assert np.all(bernstein_eval(f, n, t) >= bernstein_eval(g, n, t) - 1e-13)


@pytest.mark.parametrize("n", [1, 3, 10, 50, 137, 500])
def test_concavity_one_sided(n):
    prof = undershoot_profile(polynomial([0.0, 4.0, -4.0]), n, SamplingGrid(1000))
    assert prof.values.min() >= -1e-12
