import numpy as np
import pytest

from chernflow.chern import (
    MetricField,
    christoffel_numeric,
    constant_metric,
    curvature_numeric,
    log_det_field,
    ricci_numeric,
)
from chernflow.calculus import wirtinger_mixed
from chernflow.errors import NotPositiveDefinite, SingularPoint
from chernflow.hopf import (
    LambdaMetric,
    hopf_christoffel,
    hopf_curvature,
    hopf_det,
    hopf_metric_field,
    ricci_closed,
)

from .conftest import random_hopf, random_point

E1 = np.array([1.0, 0.0], dtype=complex)


def rel(a, b):
    return np.max(np.abs(a - b)) / np.max(np.abs(b))


def scaled(g, c):
    return MetricField(lambda w: c * g(w), label="scaled")


def test_flat_metric_is_flat(rng):
    g = constant_metric(np.array([[2.0, 0.5j], [-0.5j, 1.0]]))
    z = random_point(rng, 2)
    assert np.max(np.abs(christoffel_numeric(g, z))) == 0.0
    assert np.max(np.abs(curvature_numeric(g, z).components)) == 0.0
    assert np.max(np.abs(ricci_numeric(g, z))) <= 1e-12


def test_christoffel_matches_closed_form(rng):
    m = LambdaMetric(2, 0.5)
    got = christoffel_numeric(hopf_metric_field(m), E1)
    assert np.max(np.abs(got - hopf_christoffel(m, E1))) <= 1e-6
    for _ in range(100):
        m, z = random_hopf(rng)
        assert rel(christoffel_numeric(hopf_metric_field(m), z), hopf_christoffel(m, z)) <= 1e-5


def test_christoffel_and_ricci_invariant_under_constant_scaling(rng):
    m, z = random_hopf(rng)
    g = hopf_metric_field(m)
    np.testing.assert_allclose(christoffel_numeric(scaled(g, 3.0), z), christoffel_numeric(g, z), atol=1e-8)
    np.testing.assert_allclose(ricci_numeric(scaled(g, 3.0), z), ricci_numeric(g, z), atol=1e-6)


def test_curvature_negative_component():
    r = curvature_numeric(hopf_metric_field(LambdaMetric(2, -2.0)), E1)
    assert abs(r[1, 1, 1, 1] - (-1.0)) <= 1e-5
    assert not r.closed_form


def test_curvature_matches_closed_form(rng):
    for _ in range(30):
        m, z = random_hopf(rng)
        numeric = curvature_numeric(hopf_metric_field(m), z)
        assert rel(numeric.components, hopf_curvature(m, z).components) <= 1e-5
        assert numeric.symmetry_defect() <= 5e-6 * np.max(np.abs(numeric.components))


def test_symmetrized_tensor_is_symmetric(rng):
    m, z = random_hopf(rng)
    sym = curvature_numeric(hopf_metric_field(m), z).symmetrized()
    assert sym.symmetry_defect() <= 1e-15


def test_step_robustness(rng):
    for _ in range(10):
        m, z = random_hopf(rng)
        g = hopf_metric_field(m)
        full = curvature_numeric(g, z).components
        half = curvature_numeric(g, z, inner=0.5e-5, outer=0.5e-4).components
        assert rel(half, full) <= 4e-5


def test_ricci_numeric(rng):
    for _ in range(30):
        m, z = random_hopf(rng)
        ric = ricci_numeric(hopf_metric_field(m), z)
        closed = ricci_closed(m, z)
        assert np.max(np.abs(ric - closed)) / np.max(np.abs(closed)) <= 1e-6
        assert np.max(np.abs(ric - ric.conj().T)) <= 5e-6


def test_ricci_trace_route(rng):
    for _ in range(10):
        m, z = random_hopf(rng)
        direct = -wirtinger_mixed(lambda w: np.log(hopf_det(m, w)), z)
        assert np.max(np.abs(ricci_numeric(hopf_metric_field(m), z) - direct)) <= 1e-6
        via_field = -wirtinger_mixed(log_det_field(hopf_metric_field(m)), z)
        assert np.max(np.abs(via_field - direct)) <= 1e-6


def test_errors():
    with pytest.raises(SingularPoint):
        christoffel_numeric(hopf_metric_field(LambdaMetric(2, 0.5)), [0, 0])
    bad = constant_metric(np.diag([1.0, -1.0]))
    with pytest.raises(NotPositiveDefinite):
        curvature_numeric(bad, E1)
