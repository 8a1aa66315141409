import math

import numpy as np
import pytest

from upward_qc.equidist import arc_density_prediction, sine_downward_density, sine_upward_density
from upward_qc.errors import BadParams, DegenerateFrequency


def arc_measure(p, alpha, eps, samples=2_000_000):
    """Fraction of phases theta with 2|sin(alpha p / 2)| cos(theta) >= eps, midpoint rule."""
    theta = (np.arange(samples) + 0.5) * (2 * math.pi / samples)
    return float(np.mean(2 * abs(math.sin(alpha * p / 2)) * np.cos(theta) >= eps))


def brute_density(p, alpha, eps, N, sign=1):
    hits = 0
    for k in range(1, N - p + 1):
        d = math.sin(alpha * k) - math.sin(alpha * (k + p))
        hits += sign * d >= eps
    return hits / N


class TestPrediction:
    @pytest.mark.parametrize("p,alpha,eps", [(1, 1.0, math.sin(0.5)), (2, 1.0, math.sin(1.0)), (3, 1.0, 0.2), (2, 0.7, 0.05)])
    def test_matches_arc_measure(self, p, alpha, eps):
        assert arc_density_prediction(p, alpha, eps).predicted_density == pytest.approx(arc_measure(p, alpha, eps), abs=1e-5)

    def test_one_third_cases(self):
        assert arc_density_prediction(1, 1.0, math.sin(0.5)).predicted_density == pytest.approx(1 / 3, abs=1e-12)
        assert arc_density_prediction(2, 1.0, math.sin(1.0)).predicted_density == pytest.approx(1 / 3, abs=1e-12)

    def test_p3_value(self):
        pred = arc_density_prediction(3, 1.0, 0.2)
        assert pred.s_p == pytest.approx(2 * math.sin(1.5), abs=1e-15)
        # arccos(0.10025)/pi; brute force over 10^6 terms gives 0.468045
        assert pred.predicted_density == pytest.approx(0.46804, abs=1e-5)

    def test_eps_above_amplitude(self):
        assert arc_density_prediction(1, 1.0, 5.0).predicted_density == 0.0

    def test_degenerate(self):
        with pytest.raises(DegenerateFrequency):
            arc_density_prediction(2, math.pi)


class TestEmpirical:
    @pytest.mark.parametrize("p,eps", [(1, 0.3), (3, 0.2), (5, 1.1)])
    def test_matches_brute_force(self, p, eps):
        N = 20_000
        assert sine_upward_density(p, 1.0, eps, N) == brute_density(p, 1.0, eps, N)
        assert sine_downward_density(p, 1.0, eps, N) == brute_density(p, 1.0, eps, N, sign=-1)

    def test_converges_to_prediction(self):
        for p, eps in [(1, 0.4), (3, 0.2), (4, 1.0)]:
            gap = abs(sine_upward_density(p, 1.0, eps, 200_000) - arc_density_prediction(p, 1.0, eps).predicted_density)
            assert gap < 0.005

    def test_up_down_symmetry(self):
        up = sine_upward_density(2, 1.0, 0.5, 100_000)
        down = sine_downward_density(2, 1.0, 0.5, 100_000)
        assert abs(up - down) < 0.005

    def test_chunking_consistent(self, monkeypatch):
        import upward_qc.equidist as eq

        whole = sine_upward_density(2, 1.0, 0.5, 50_000)
        monkeypatch.setattr(eq, "_CHUNK", 997)
        assert sine_upward_density(2, 1.0, 0.5, 50_000) == whole

    @pytest.mark.parametrize("args", [(1, 1.0, 0.0, 100), (1, 1.0, 0.5, 1)])
    def test_bad_params(self, args):
        with pytest.raises(BadParams):
            sine_upward_density(*args)
