"""The verification suite behind ``chernflow verify``.

Every check is deterministic for a given seed and returns a :class:`Check`.
``CRITERIA`` are the acceptance criteria; ``INVARIANTS`` are the per-module
property checks. Output lines contain no timings, so two runs with the same
seed print identical bytes.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from .analysis import (
    GAP,
    NEG_TOL,
    NEGATIVE,
    NONNEG,
    ab_form,
    alternating_hbc,
    classify_lambda,
    hbc,
    hbc_raw,
    hopf_hbc_closed,
    hopf_hsc_ab,
    hsc,
    min_hbc,
    min_hsc,
    negative_witness,
    threshold_bisect,
)
from .calculus import (
    ANTIHOLOMORPHIC,
    HOLOMORPHIC,
    hermitian_inverse_det,
    hermitian_min_eigen,
    random_unit_vectors,
    wirtinger_gradient,
    wirtinger_mixed,
)
from .chern import christoffel_numeric, curvature_numeric, ricci_numeric
from .flow import euler_flow, exact_flow_metric, flow_metric_field, flow_trace
from .hopf import (
    HopfFamily,
    HopfQuotient,
    LambdaMetric,
    hopf_christoffel,
    hopf_curvature,
    hopf_det,
    hopf_metric,
    hopf_metric_field,
    hopf_metric_inverse,
    lambda_of_t,
    quotient_invariance,
    ricci_closed,
    thresholds,
)
from .report import Report, RunConfig, to_csv


@dataclass
class Check:
    key: str
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.key:<4} {self.title}: {self.detail}"


def _rng(seed: int, key: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, sum(key.encode())]))


def _random_z(rng, n, lo=0.5, hi=2.0):
    return random_unit_vectors(rng, 1, n)[0] * rng.uniform(lo, hi)


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def _hopf_sample(rng):
    n = int(rng.integers(2, 5))
    return LambdaMetric(n, float(rng.uniform(-3.0, 0.99))), _random_z(rng, n)


# -- acceptance criteria ----------------------------------------------------


def criterion_1(seed: int) -> Check:
    rng = _rng(seed, "C1")
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        m, z = _hopf_sample(rng)
        closed = hopf_curvature(m, z).components
        numeric = curvature_numeric(hopf_metric_field(m), z).components
        worst = max(worst, _rel(numeric, closed))
    fast = time.perf_counter() - start <= 10.0
    ok = worst <= 1e-5 and fast
    return Check("C1", "closed-form curvature vs finite-difference oracle", ok,
                 f"max_rel={worst:.3e} (tol 1e-05), runtime<=10s={fast}")


def criterion_2(seed: int) -> Check:
    rng = _rng(seed, "C2")
    worst = {"contract": 0.0, "det_h": 0.0, "det_omega": 0.0, "rescale": 0.0}
    for _ in range(100):
        m, z = _hopf_sample(rng)
        n = m.n
        h = hopf_metric(m, z)
        contract = np.einsum("ij,kj->ik", hopf_metric_inverse(m, z), h)
        worst["contract"] = max(worst["contract"], float(np.max(np.abs(contract - np.eye(n)))))
        num_det = np.linalg.det(h).real
        worst["det_h"] = max(worst["det_h"], abs(num_det - hopf_det(m, z)) / hopf_det(m, z))

        fam = HopfFamily(n, float(rng.uniform(0.0, 3.0)))
        t = float(rng.uniform(0.0, 0.999)) * fam.t_max
        factor = 1.0 + fam.T0 - n * t
        omega = exact_flow_metric(fam, t, z)
        r2 = np.vdot(z, z).real
        expect = factor ** (n - 1) / r2**n
        worst["det_omega"] = max(worst["det_omega"], abs(np.linalg.det(omega).real - expect) / expect)
        lam_metric = hopf_metric(LambdaMetric(n, lambda_of_t(fam, t)), z)
        worst["rescale"] = max(worst["rescale"], _rel(omega / factor, lam_metric))
    ok = all(v <= 1e-10 for v in worst.values())
    detail = ", ".join(f"{k}={v:.3e}" for k, v in worst.items()) + " (tol 1e-10)"
    return Check("C2", "algebraic identities", ok, detail)


def criterion_3(seed: int) -> Check:
    rng = _rng(seed, "C3")
    worst = 0.0
    for n, T0 in ((2, 1.0), (3, 2.0), (4, 0.5), (2, 0.0)):
        fam = HopfFamily(n, T0)
        for frac in (0.0, 0.3, 0.6, 0.9):
            t = frac * fam.t_max
            field = flow_metric_field(fam, t)
            for _ in range(5):
                z = _random_z(rng, n)
                closed = ricci_closed(LambdaMetric(n, 0.0), z)
                worst = max(worst, _rel(ricci_numeric(field, z), closed))
    return Check("C3", "Ricci invariance along the flow", worst <= 1e-6,
                 f"max_rel={worst:.3e} (tol 1e-06)")


def _min_hbc_over(n, lam, points, starts, seed):
    seeds = np.random.SeedSequence(seed).spawn(len(points))
    m = LambdaMetric(n, lam)
    return min(min_hbc(hopf_curvature(m, z), starts, seed=s).min_value for z, s in zip(points, seeds))


def criterion_4(seed: int) -> Check:
    rng = _rng(seed, "C4")
    worst = np.inf
    for n in (2, 3):
        fam = HopfFamily(n, 1.0)
        points = random_unit_vectors(rng, 50, n)
        for t in np.linspace(0.0, fam.T0 / n, 10):
            worst = min(worst, _min_hbc_over(n, lambda_of_t(fam, t), points, 32, seed))
    return Check("C4", "non-negative HBC on [0, T0/n]", worst >= -NEG_TOL,
                 f"min_hbc={worst:.3e} (floor -1e-09)")


def criterion_5(seed: int) -> Check:
    rng = _rng(seed, "C5")
    formula_err, witness_max, gap = 0.0, -np.inf, -np.inf
    for n in (2, 3):
        fam = HopfFamily(n, 1.0)
        a, b = (2 * fam.T0 + 1) / (2 * n), 0.999 * fam.t_max
        points = random_unit_vectors(rng, 50, n)
        seeds = np.random.SeedSequence(seed).spawn(len(points))
        for k in range(1, 11):
            t = a + (b - a) * k / 10
            lam = lambda_of_t(fam, t)
            m = LambdaMetric(n, lam)
            for z, s in zip(points, seeds):
                tensor = hopf_curvature(m, z)
                w = negative_witness(lam, z)
                val = hsc(tensor, w.xi)
                f = ab_form(z, w.xi)
                formula = f.b**2 * (lam + 1.0) / f.z_norm8
                formula_err = max(formula_err, abs(val - formula))
                witness_max = max(witness_max, val)
                gap = max(gap, min_hbc(tensor, 32, seed=s).min_value - val)
    ok = formula_err <= 1e-10 and witness_max < -1e-6 and gap <= NEG_TOL
    return Check("C5", "negative HSC witness on ((2T0+1)/2n, 0.999 T_max)", ok,
                 f"formula_err={formula_err:.3e} (tol 1e-10), max_witness={witness_max:.3e} "
                 f"(< -1e-06), min_hbc-witness={gap:.3e} (<= 1e-09)")


def criterion_6(seed: int) -> Check:
    rng = _rng(seed, "C6")
    worst = 0.0
    for _ in range(1000):
        m, z = _hopf_sample(rng)
        xi = random_unit_vectors(rng, 1, m.n)[0]
        via_tensor = hsc(hopf_curvature(m, z), xi)
        worst = max(worst, abs(via_tensor - hopf_hsc_ab(m.lam, ab_form(z, xi))))
    return Check("C6", "(a,b)-form identity", worst <= 1e-10, f"max_abs={worst:.3e} (tol 1e-10)")


def criterion_7(seed: int) -> Check:
    rng = _rng(seed, "C7")
    worst = np.inf
    for n in (2, 3, 4):
        m = LambdaMetric(n, -1.0)
        for k in range(10):
            z = _random_z(rng, n)
            worst = min(worst, min_hsc(hopf_curvature(m, z), 32, seed=[seed, n, k]).min_value)
    return Check("C7", "HSC >= 0 at lambda = -1", worst >= -NEG_TOL, f"min_hsc={worst:.3e} (floor -1e-09)")


def criterion_8(seed: int) -> Check:
    rng = _rng(seed, "C8")
    fam = HopfFamily(2, 1.0)
    points = np.array([_random_z(rng, 2) for _ in range(20)])
    t_end = 0.9 * fam.t_max
    res = euler_flow(flow_metric_field(fam, 0.0), points, dt=1e-3, t_end=t_end)
    dev = float(np.max(np.abs(res.metrics - exact_flow_metric(fam, t_end, points))))
    return Check("C8", "Euler flow vs exact solution", dev <= 1e-5, f"max_abs={dev:.3e} (tol 1e-05)")


def criterion_9(seed: int) -> Check:
    found, ok = [], True
    for T0, n in ((1.0, 2), (2.0, 3), (0.0, 2)):
        fam = HopfFamily(n, T0)
        lo, hi, _ = thresholds(fam)
        res = threshold_bisect(fam, "hsc", resolution=1e-4, seed=seed)
        ok &= lo <= res.t_star <= hi
        found.append(f"(T0={T0:g},n={n}) t*={res.t_star:.6f} in [{lo:.6f}, {hi:.6f}]")
    return Check("C9", "threshold bracket", ok, "; ".join(found))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


# -- module invariants ------------------------------------------------------


# Linearity is checked at a coarse fixed step: at the default 1e-5 step the
# differencing itself loses about eps*|f|/h ~ 1e-11, above the 1e-12 target.
LINEARITY_STEP = 1e-2


def _poly(w):
    return np.sum(w**2 * np.conj(w), axis=-1)


def _mixed(w):
    return np.exp(w[..., 0]) * np.conj(w[..., 1])


def inv_wirtinger(seed: int) -> Check:
    rng = _rng(seed, "I0")
    lin, dual = 0.0, 0.0
    for _ in range(100):
        z = _random_z(rng, 3)
        a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        for kind in (HOLOMORPHIC, ANTIHOLOMORPHIC):
            lhs = wirtinger_gradient(lambda w: a * _poly(w) + b * _mixed(w), z, kind, scale=LINEARITY_STEP)
            rhs = (a * wirtinger_gradient(_poly, z, kind, scale=LINEARITY_STEP)
                   + b * wirtinger_gradient(_mixed, z, kind, scale=LINEARITY_STEP))
            lin = max(lin, float(np.max(np.abs(lhs - rhs))))
        anti = wirtinger_gradient(_mixed, z, ANTIHOLOMORPHIC)
        via_conj = np.conj(wirtinger_gradient(lambda w: np.conj(_mixed(w)), z, HOLOMORPHIC))
        dual = max(dual, float(np.max(np.abs(anti - via_conj))))
    ok = lin <= 1e-12 and dual <= 1e-12
    return Check("I0", "Wirtinger linearity and conjugation duality", ok,
                 f"linearity={lin:.3e}, duality={dual:.3e} (tol 1e-12)")


def inv_linear_algebra(seed: int) -> Check:
    rng = _rng(seed, "I1")
    sym, floor = 0.0, np.inf
    for _ in range(50):
        n = int(rng.integers(2, 6))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        m = a @ a.conj().T + 0.1 * np.eye(n)
        inv, _ = hermitian_inverse_det(m)
        raw_inv = np.linalg.inv(m)
        sym = max(sym, float(np.max(np.abs(raw_inv - raw_inv.conj().T))))
        mu, _ = hermitian_min_eigen(m)
        v = random_unit_vectors(rng, 20, n)
        quad = np.einsum("si,ij,sj->s", v.conj(), m, v).real
        floor = min(floor, float(np.min(quad - mu)) / np.linalg.norm(m, 2))
    ok = sym <= 1e-12 and floor >= -1e-10
    return Check("I1", "inverse symmetry and eigen floor", ok, f"asym={sym:.3e}, floor={floor:.3e}")


def inv_hopf_metric(seed: int) -> Check:
    rng = _rng(seed, "I2")
    eig, contract, scale, sym, ric = 0.0, 0.0, 0.0, 0.0, True
    for _ in range(100):
        m, z = _hopf_sample(rng)
        r2 = np.vdot(z, z).real
        prod = np.einsum("ij,kj->ik", hopf_metric_inverse(m, z), hopf_metric(m, z))
        contract = max(contract, float(np.max(np.abs(prod - np.eye(m.n)))))
        w = np.linalg.eigvalsh(hopf_metric(m, z))
        expect = np.sort([(1 - m.lam) / r2] + [1 / r2] * (m.n - 1))
        eig = max(eig, float(np.max(np.abs(w - expect))))
        c = complex(rng.standard_normal(), rng.standard_normal())
        r = hopf_curvature(m, z)
        scale = max(scale, _rel(hopf_curvature(m, c * z).components * abs(c) ** 4, r.components))
        sym = max(sym, r.symmetry_defect())
        ric &= np.array_equal(ricci_closed(m, z), ricci_closed(LambdaMetric(m.n, 0.25), z))
    ok = eig <= 1e-10 and contract <= 1e-12 and scale <= 1e-10 and sym <= 1e-12 and ric
    return Check("I2", "Hopf metric eigenvalues, inverse contract, scale covariance, Chern symmetry, "
                 "lambda-free Ricci", ok, f"eig={eig:.3e}, contract={contract:.3e}, scale={scale:.3e}, "
                 f"sym={sym:.3e}, ricci_equal={ric}")


def inv_quotient(seed: int) -> Check:
    rng = _rng(seed, "I3")
    worst = 0.0
    for _ in range(20):
        m, z = _hopf_sample(rng)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, m.n))
        worst = max(worst, quotient_invariance(m, HopfQuotient(tuple(2.0 * phases)), z))
    return Check("I3", "invariance under the Hopf identification", worst <= 1e-10, f"max_dev={worst:.3e}")


def inv_oracle(seed: int) -> Check:
    rng = _rng(seed, "I4")
    gam, ric, trace, robust = 0.0, 0.0, 0.0, 0.0
    for _ in range(100):
        m, z = _hopf_sample(rng)
        field = hopf_metric_field(m)
        gam = max(gam, _rel(christoffel_numeric(field, z), hopf_christoffel(m, z)))
        num_ric = ricci_numeric(field, z)
        ric = max(ric, _rel(num_ric, ricci_closed(m, z)))
        log_det = lambda w: np.log(hopf_det(m, w))
        trace = max(trace, float(np.max(np.abs(num_ric + wirtinger_mixed(log_det, z)))))
        full = curvature_numeric(field, z).components
        half = curvature_numeric(field, z, inner=0.5e-5, outer=0.5e-4).components
        robust = max(robust, _rel(half, full))
    ok = gam <= 1e-5 and ric <= 1e-5 and trace <= 1e-6 and robust <= 4e-5
    return Check("I4", "oracle agreement, trace route, step robustness", ok,
                 f"gamma={gam:.3e}, ricci={ric:.3e}, logdet_route={trace:.3e}, half_step={robust:.3e}")


def inv_contractions(seed: int) -> Check:
    rng = _rng(seed, "I5")
    imag, homog, closed = 0.0, 0.0, 0.0
    for _ in range(1000):
        m, z = _hopf_sample(rng)
        r = hopf_curvature(m, z)
        xi, eta = random_unit_vectors(rng, 2, m.n)
        imag = max(imag, abs(hbc_raw(r, xi, eta).imag))
        c, d = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 6)), rng.uniform(0.5, 2.0)
        base = hbc(r, xi, eta)
        homog = max(homog, abs(hbc(r, c * xi, d * eta) - abs(c) ** 2 * d**2 * base))
        closed = max(closed, abs(hopf_hbc_closed(m.lam, z, xi, eta) - base))
    ok = imag <= 1e-9 and homog <= 1e-12 and closed <= 1e-10
    return Check("I5", "realness, homogeneity, closed bisectional formula", ok,
                 f"imag={imag:.3e}, homog={homog:.3e}, closed={closed:.3e}")


def inv_signs(seed: int) -> Check:
    rng = _rng(seed, "I6")
    nonneg, hsc_gap, neg_err, descent = np.inf, np.inf, 0.0, 0.0
    for lam in (0.0, 0.25, 0.5, 0.9, 0.99):
        rep = classify_lambda(2, lam, samples=50, starts=16, seed=seed)
        nonneg = min(nonneg, rep.min_value)
    for lam in (-1.0, -0.5):
        for z in random_unit_vectors(rng, 5, 3):
            hsc_gap = min(hsc_gap, min_hsc(hopf_curvature(LambdaMetric(3, lam), z), 16, seed=seed).min_value)
    for lam in (-1.1, -2.0, -5.0):
        z = _random_z(rng, 2)
        tensor = hopf_curvature(LambdaMetric(2, lam), z)
        w = negative_witness(lam, z)
        r2 = np.vdot(z, z).real
        val = hsc(tensor, w.xi)
        neg_err = max(neg_err, abs(val - r2**2 * (lam + 1) / r2**4))
        neg_err = max(neg_err, min_hbc(tensor, 16, seed=seed).min_value - val - NEG_TOL, 0.0)
        run = alternating_hbc(tensor, random_unit_vectors(rng, 8, 2))
        descent = max(descent, float(np.max(np.diff(run.values, axis=0))))
    ok = nonneg >= -NEG_TOL and hsc_gap >= -NEG_TOL and neg_err <= 1e-10 and descent <= 1e-10
    return Check("I6", "sign statements and alternating descent", ok,
                 f"min_hbc(lam>=0)={nonneg:.3e}, min_hsc(lam in {{-1,-0.5}})={hsc_gap:.3e}, "
                 f"witness_err={neg_err:.3e}, max_increase={descent:.3e}")


def inv_flow(seed: int) -> Check:
    rng = _rng(seed, "I7")
    fam = HopfFamily(3, 1.5)
    const, deriv, repar, det = 0.0, 0.0, 0.0, 0.0
    for _ in range(5):
        z = _random_z(rng, 3)
        closed = ricci_closed(LambdaMetric(3, 0.0), z)
        for frac in (0.1, 0.5, 0.9):
            t = frac * fam.t_max
            const = max(const, _rel(ricci_numeric(flow_metric_field(fam, t), z), closed))
            d = 1e-5
            dg = (exact_flow_metric(fam, t + d, z) - exact_flow_metric(fam, t - d, z)) / (2 * d)
            deriv = max(deriv, float(np.max(np.abs(dg + closed))))
            factor = 1 + fam.T0 - fam.n * t
            lam_metric = hopf_metric(LambdaMetric(3, lambda_of_t(fam, t)), z)
            omega = exact_flow_metric(fam, t, z)
            repar = max(repar, float(np.max(np.abs(omega - factor * lam_metric))))
            expect = factor ** (fam.n - 1) / np.vdot(z, z).real ** fam.n
            det = max(det, abs(np.linalg.det(omega).real - expect) / expect)
    trace = flow_trace(HopfFamily(2, 1.0), [0.0, 0.25, 0.5, 0.8, 0.9, 0.99], samples=4, starts=16, seed=seed)
    verdicts = [r.verdict for r in trace.rows]
    want = [NONNEG] * 3 + [NEGATIVE] * 3
    ok = const <= 1e-6 and deriv <= 1e-6 and det <= 1e-10 and repar <= 1e-12 and verdicts == want
    return Check("I7", "Ricci constancy, exact-solution derivative, determinant law, reparametrization, "
                 "trace verdicts", ok, f"ricci={const:.3e}, d/dt={deriv:.3e}, det={det:.3e}, "
                 f"rescale={repar:.3e}, verdicts_ok={verdicts == want}")


def inv_report(seed: int) -> Check:
    cfg = RunConfig("min-bisec", n=2, lam=-2.0, seed=seed)

    def build():
        return Report(cfg, classify_lambda(2, -2.0, samples=2, starts=8, seed=seed).to_dict())

    rep = build()
    text = rep.to_json()
    same_bytes = build().to_json() == text
    again = Report.from_json(text)
    round_trip = again == rep and again.to_json() == text
    csv_text = to_csv(["t", "lambda"], [(0.1, 1 / 3)])
    schema = csv_text == "t,lambda\n0.10000000000000001,0.33333333333333331\n"
    ok = round_trip and schema and same_bytes and json.loads(text)["config"]["seed"] == seed
    return Check("I8", "report round-trip, determinism and CSV schema", ok,
                 f"round_trip={round_trip}, identical_bytes={same_bytes}, csv={schema}")


INVARIANTS = [inv_wirtinger, inv_linear_algebra, inv_hopf_metric, inv_quotient, inv_oracle,
              inv_contractions, inv_signs, inv_flow, inv_report]


def run_all(seed: int = 42, checks=None):
    """Yield every check result in a fixed order."""
    for fn in checks or (CRITERIA + INVARIANTS):
        yield fn(seed)
