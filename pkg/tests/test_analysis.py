import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chernflow.analysis import (
    GAP,
    NEGATIVE,
    NONNEG,
    ABForm,
    FramePair,
    ab_form,
    alternating_hbc,
    classify_lambda,
    classify_time,
    hbc,
    hbc_raw,
    hopf_hbc_closed,
    hopf_hsc_ab,
    hsc,
    min_hbc,
    min_hsc,
    negative_witness,
    threshold_bisect,
    witness_value,
)
from chernflow.calculus import random_unit_vectors
from chernflow.chern import CurvatureTensor
from chernflow.errors import (
    BracketInvalid,
    DimensionMismatch,
    ParameterOutOfRange,
    SymmetryViolation,
)
from chernflow.hopf import HopfFamily, LambdaMetric, hopf_curvature

from .conftest import random_hopf, random_point

E1 = np.array([1.0, 0.0], dtype=complex)
E2 = np.array([0.0, 1.0], dtype=complex)


def brute_hbc(r, xi, eta):
    # Explicit quadruple loop over R_{k jbar i qbar} xi^k conj(xi^j) eta^i conj(eta^q).
    n = len(xi)
    total = 0j
    for k in range(n):
        for j in range(n):
            for i in range(n):
                for q in range(n):
                    total += r[k, j, i, q] * xi[k] * np.conj(xi[j]) * eta[i] * np.conj(eta[q])
    return total


def test_frame_pair_requires_unit_vectors():
    FramePair(E1, E2)
    with pytest.raises(ParameterOutOfRange):
        FramePair(2 * E1, E2)


def test_ab_form_validation():
    with pytest.raises(ParameterOutOfRange):
        ABForm(2.0, 1.0, 1.0)
    with pytest.raises(ParameterOutOfRange):
        ABForm(-0.1, 1.0, 1.0)


def test_hbc_examples():
    lam = 0.5
    r = hopf_curvature(LambdaMetric(2, lam), E1)
    assert hbc(r, E2, E1) == pytest.approx((1 - lam) ** 2)
    for lam in (-3.0, 0.0, 0.7):
        assert hbc(hopf_curvature(LambdaMetric(2, lam), E1), E1, E2) == pytest.approx(0.0, abs=1e-15)
    assert hsc(hopf_curvature(LambdaMetric(2, -2.0), E1), E2) == pytest.approx(-1.0)


def test_hbc_matches_brute_force(rng):
    for _ in range(20):
        m, z = random_hopf(rng)
        r = hopf_curvature(m, z)
        xi, eta = random_unit_vectors(rng, 2, m.n)
        assert hbc_raw(r, xi, eta) == pytest.approx(brute_hbc(r.components, xi, eta), abs=1e-12)


def test_hsc_vanishes_along_z(rng):
    m, z = random_hopf(rng)
    xi = z / np.linalg.norm(z)
    assert abs(hsc(hopf_curvature(m, z), xi)) <= 1e-12


def test_hsc_is_diagonal_hbc(rng):
    m, z = LambdaMetric(3, 0.5), random_point(rng, 3)
    r = hopf_curvature(m, z)
    xi = random_unit_vectors(rng, 1, 3)[0]
    assert hsc(r, xi) == pytest.approx(hbc(r, xi, xi), abs=1e-15)


def test_hbc_errors():
    r = hopf_curvature(LambdaMetric(2, 0.5), E1)
    with pytest.raises(DimensionMismatch):
        hbc(r, np.ones(3), E1)
    skew = np.zeros((2, 2, 2, 2), dtype=complex)
    skew[0, 0, 0, 0] = 1j
    with pytest.raises(SymmetryViolation):
        hbc(CurvatureTensor(skew, E1), E1, E1)


def test_realness_and_homogeneity(rng):
    for _ in range(1000):
        m, z = random_hopf(rng)
        r = hopf_curvature(m, z)
        xi, eta = random_unit_vectors(rng, 2, m.n)
        assert abs(hbc_raw(r, xi, eta).imag) <= 1e-9
    c, d = 1.7 * np.exp(0.3j), 0.6
    base = hbc(r, xi, eta)
    assert hbc(r, c * xi, d * eta) == pytest.approx(abs(c) ** 2 * d**2 * base, abs=1e-12)


def test_closed_bisectional_formula(rng):
    lam = -0.7
    assert hopf_hbc_closed(lam, E1, E2, E1) == pytest.approx((1 - lam) ** 2)
    for _ in range(1000):
        m, z = random_hopf(rng)
        xi, eta = random_unit_vectors(rng, 2, m.n)
        assert abs(hopf_hbc_closed(m.lam, z, xi, eta) - hbc(hopf_curvature(m, z), xi, eta)) <= 1e-10


def test_third_term_vanishes_for_orthogonal_eta(rng):
    # With zbar . eta = 0 the lam^2 - 2 lam term drops out, so the result is affine in lam.
    z = random_point(rng, 3)
    eta = random_unit_vectors(rng, 1, 3)[0]
    eta = eta - z * np.vdot(z, eta) / np.vdot(z, z)
    eta /= np.linalg.norm(eta)
    xi = random_unit_vectors(rng, 1, 3)[0]
    vals = [hopf_hbc_closed(lam, z, xi, eta) for lam in (-2.0, 0.0, 0.5)]
    assert vals[1] - vals[0] == pytest.approx(4 * (vals[2] - vals[1]), rel=1e-10)


def test_ab_identity(rng):
    assert hopf_hsc_ab(-2.0, ABForm(0.0, 1.0, 1.0)) == pytest.approx(-1.0)
    for lam in (-4.0, 0.0, 0.9):
        assert hopf_hsc_ab(lam, ABForm(0.7, 0.7, 2.0)) == 0.0
    for _ in range(1000):
        m, z = random_hopf(rng)
        xi = random_unit_vectors(rng, 1, m.n)[0]
        assert abs(hsc(hopf_curvature(m, z), xi) - hopf_hsc_ab(m.lam, ab_form(z, xi))) <= 1e-10


def test_min_hbc_examples():
    rep = min_hbc(hopf_curvature(LambdaMetric(2, 0.5), E1), 32)
    assert rep.min_value >= -1e-9 and rep.verdict == NONNEG
    rep = min_hbc(hopf_curvature(LambdaMetric(2, -2.0), E1), 32)
    assert rep.min_value <= -1.0 + 1e-12 and rep.verdict == NEGATIVE
    zero = CurvatureTensor(np.zeros((2, 2, 2, 2), dtype=complex), E1)
    assert min_hbc(zero, 8).min_value == 0.0


def test_min_hbc_witness_attains_value(rng):
    m, z = LambdaMetric(3, -1.8), random_point(rng, 3)
    r = hopf_curvature(m, z)
    rep = min_hbc(r, 16, seed=7)
    assert hbc(r, rep.witness.xi, rep.witness.eta) == pytest.approx(rep.min_value, abs=1e-12)


def test_min_hbc_vs_grid_search():
    # Independent oracle for n = 2: dense grid over pairs of unit vectors in C^2 modulo phase.
    m, z = LambdaMetric(2, -1.5), np.array([0.6, 0.8j])
    r = hopf_curvature(m, z)
    th = np.linspace(0, np.pi / 2, 25)
    ph = np.linspace(0, 2 * np.pi, 48, endpoint=False)
    tt, pp = np.meshgrid(th, ph)
    v = np.stack([np.cos(tt).ravel(), (np.sin(tt) * np.exp(1j * pp)).ravel()], axis=-1)
    vals = np.einsum("kjiq,ak,aj,bi,bq->ab", r.components, v, v.conj(), v, v.conj()).real
    assert min_hbc(r, 32).min_value <= vals.min() + 1e-12
    assert min_hbc(r, 32).min_value >= vals.min() - 0.05


def test_min_hsc_boundary(rng):
    for lam in (-1.0, -0.5):
        for _ in range(5):
            z = random_point(rng, 3)
            assert min_hsc(hopf_curvature(LambdaMetric(3, lam), z), 16).min_value >= -1e-9


def test_alternating_descent_every_iterate(rng):
    for lam in (0.5, -0.9, -2.0):
        m, z = LambdaMetric(3, lam), random_point(rng, 3)
        r = hopf_curvature(m, z)
        run = alternating_hbc(r, random_unit_vectors(rng, 8, 3))
        steps = np.diff(run.values, axis=0)
        assert np.all(steps <= 1e-12 * np.max(np.abs(r.components)))


def test_negative_witness():
    w = negative_witness(-3.0, E1)
    assert abs(abs(w.xi[1]) - 1) <= 1e-15
    z = np.array([1.0, 1.0]) / np.sqrt(2)
    w = negative_witness(-2.0, z)
    phase = w.xi[0] / abs(w.xi[0])
    np.testing.assert_allclose(w.xi / phase, np.array([1, -1]) / np.sqrt(2), atol=1e-15)
    assert hsc(hopf_curvature(LambdaMetric(2, -2.0), z), w.xi) == pytest.approx(-1.0)
    with pytest.raises(ParameterOutOfRange):
        negative_witness(-1.0, E1)
    with pytest.raises(ParameterOutOfRange):
        negative_witness(-2.0, np.array([1.0]))


def test_witness_value_formula(rng):
    for lam in (-1.1, -2.0, -5.0):
        z = random_point(rng, 3)
        r = hopf_curvature(LambdaMetric(3, lam), z)
        w = negative_witness(lam, z)
        f = ab_form(z, w.xi)
        val = hsc(r, w.xi)
        assert abs(val - f.b**2 * (lam + 1) / f.z_norm8) <= 1e-10
        assert val == pytest.approx(witness_value(lam, z), abs=1e-10)
        assert min_hbc(r, 16).min_value <= val + 1e-9


def test_classify_lambda_nonneg_set():
    for lam in (0.0, 0.25, 0.5, 0.9, 0.99):
        rep = classify_lambda(2, lam, samples=50, starts=16)
        assert rep.min_value >= -1e-9 and rep.verdict == NONNEG


def test_classify_time_examples():
    fam = HopfFamily(2, 1.0)
    assert classify_time(fam, 0.3, samples=4, starts=16).verdict == NONNEG
    rep = classify_time(fam, 0.9, samples=4, starts=16)
    assert rep.verdict == NEGATIVE and rep.min_value <= -3.0 + 1e-9
    rep = classify_time(fam, 0.6, samples=4, starts=16)
    assert rep.verdict == GAP and np.isfinite(rep.min_value)
    assert rep.parameter == {"t": 0.6, "lambda": pytest.approx(-0.25)}


def test_classify_is_seeded():
    a = classify_lambda(3, -0.4, samples=3, starts=8, seed=5).to_dict()
    b = classify_lambda(3, -0.4, samples=3, starts=8, seed=5).to_dict()
    assert a == b and a["seed"] == 5


@pytest.mark.parametrize("T0,n", [(1.0, 2), (0.0, 2)])
def test_threshold_in_bracket(T0, n):
    fam = HopfFamily(n, T0)
    lo, hi = T0 / n, (2 * T0 + 1) / (2 * n)
    a = threshold_bisect(fam, "hsc", seed=3)
    b = threshold_bisect(fam, "hsc", seed=3)
    assert lo <= a.t_star <= hi
    assert abs(a.t_star - b.t_star) <= a.resolution
    assert a.first_negative - a.last_nonneg <= a.resolution


def test_threshold_rejects_bad_quantity():
    with pytest.raises(ValueError):
        threshold_bisect(HopfFamily(2, 1.0), "ricci")


def test_threshold_needs_a_sign_change():
    # Far too coarse a probe past the bracket lands beyond T_max, so no change is found.
    with pytest.raises(BracketInvalid):
        threshold_bisect(HopfFamily(2, 1.0), "hsc", resolution=0.5)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.999, 0.99), st.integers(0, 2**32 - 1))
def test_hsc_nonnegative_from_minus_one(lam, seed):
    rng = np.random.default_rng(seed)
    z = random_point(rng, 2)
    xi = random_unit_vectors(rng, 1, 2)[0]
    assert hsc(hopf_curvature(LambdaMetric(2, lam), z), xi) >= -1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 0.99), st.integers(0, 2**32 - 1))
def test_hbc_nonnegative_for_nonneg_lambda(lam, seed):
    rng = np.random.default_rng(seed)
    z = random_point(rng, 3)
    xi, eta = random_unit_vectors(rng, 2, 3)
    assert hopf_hbc_closed(lam, z, xi, eta) >= -1e-12
