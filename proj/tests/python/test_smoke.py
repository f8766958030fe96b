import json
import math

import numpy as np
import pytest

import vgauss as vg


def test_tail_and_closed_forms():
    assert vg.gaussian_tail(0.0) == pytest.approx(0.5)
    assert vg.closed_forms_n1(1.0, 2.0) == pytest.approx(1 / math.sqrt(math.pi))
    assert vg.closed_forms_n1(1.0, 2.0, 2.0) == pytest.approx(1 + 2 / math.sqrt(math.pi))
    lower, upper = vg.pickands_bounds(1, [1.0], 2.0)
    assert lower == pytest.approx(0.1410, abs=1e-4)
    assert upper == pytest.approx(0.5642, abs=1e-4)


def test_errors_are_python_exceptions():
    with pytest.raises(vg.DomainError):
        vg.gaussian_tail(float("nan"))
    with pytest.raises(vg.VgaussError):
        vg.closed_forms_n1(1.0, 1.5)


def test_sampling_shape_and_determinism():
    spec = vg.VectorProcessSpec([vg.Stationary(1.0, 1.0), vg.FractionalBrownian(1.5)], 1.0)
    grid = vg.SampleGrid.covering(0.0, 1.0, 1 / 64)
    s = vg.derive_stream(7, "py", 0)
    a = vg.sample_vector(spec, grid, 200, s)
    b = vg.sample_vector(spec, grid, 200, s)
    assert a.shape == (200, 2, 65)
    assert np.array_equal(a, b)
    assert np.all(a[:, 1, 0] == 0.0)


def test_orthant():
    pts = np.array([[-1.0, 0.0], [0.0, -1.0]])
    assert vg.ewv_exact(pts) == pytest.approx(2 * math.exp(-1) - math.exp(-2))
    est, se = vg.ewv_mc(pts, 20000, vg.derive_stream(1, "mc", 0))
    assert abs(est - vg.ewv_exact(pts)) < 4 * se
    assert vg.pareto_prune(np.array([[0.0, 0.0], [1.0, 1.0]])).shape == (1, 2)


def test_window_constant_and_approximation():
    e = vg.estimate_window_constant([1.0], 2.0, vg.DriftSpec.zero(1, 2.0), 0.0, 1.0, 1 / 256, 2000,
                                    vg.derive_stream(2, "w", 0))
    assert abs(e.value - (1 + 1 / math.sqrt(math.pi))) < 4 * e.se + 1e-3
    spec = vg.VectorProcessSpec([vg.Stationary(1.0, 1.0)], 1.0)
    a = vg.approx_locally_stationary(spec, vg.ThresholdFamily.uniform(1), 3.0, vg.ClosedFormProvider())
    assert a.value_at_u == pytest.approx(9 * vg.gaussian_tail(3.0))
    p = vg.estimate_conjunction_prob(spec, [2.0], vg.SampleGrid.covering(0.0, 1.0, 1 / 256), 2000,
                                     vg.derive_stream(3, "p", 0))
    assert 0 < p.value < 1


def test_run_experiment():
    doc = {
        "kind": "probability", "id": "py", "seed": 1,
        "processes": {"ou": {"horizon": 1.0, "coords": [{"type": "stationary", "a": 1.0, "kappa": 1.0}]}},
        "probability": {"process": "ou", "u": [1.0], "grid_step": 1 / 128, "replications": 2000},
    }
    out = vg.run_experiment(json.dumps(doc))
    assert out["exit_code"] == 0
    assert len(out["rows"]) == 1
    assert out["csv"] == vg.run_experiment(json.dumps(doc))["csv"]
    doc["probability"]["process"] = "missing"
    with pytest.raises(vg.ConfigError):
        vg.run_experiment(json.dumps(doc))
