"""Holomorphic sectional / bisectional curvature: evaluation, minimization, sign reports.

For a tensor stored ``R[k, j, i, q]`` the bisectional value is

    HBC(xi, eta) = sum R_{k jbar i qbar} xi^k conj(xi^j) eta^i conj(eta^q)

and HSC(xi) = HBC(xi, xi). Frames are taken unit length when minimizing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .calculus import as_point, hermitian_min_eigen, hermitian_part, random_unit_vectors
from .chern import CurvatureTensor
from .errors import (
    BracketInvalid,
    ConvergenceFailure,
    DimensionMismatch,
    ParameterOutOfRange,
    SymmetryViolation,
)
from .hopf import HopfFamily, LambdaMetric, hopf_curvature, lambda_of_t, thresholds

log = logging.getLogger(__name__)

NEG_TOL = 1e-9
IMAG_TOL = 1e-6
DEFAULT_STARTS = 32
MAX_ITER = 200
VALUE_TOL = 1e-10
# Sufficient-decrease constant; small values accept the 2/L zig-zag step.
ARMIJO = 0.4
# Allowed rounding increase between alternating half-steps, times tensor scale.
DESCENT_SLACK = 1e-11
DEFAULT_SEED = 42

NONNEG = "nonneg"
NEGATIVE = "negative"
GAP = "gap-explored"


@dataclass(frozen=True)
class FramePair:
    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        for name in ("xi", "eta"):
            v = np.asarray(getattr(self, name), dtype=complex)
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ParameterOutOfRange(f"{name} must be a unit vector")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class ABForm:
    """``a = |zbar . xi|^2``, ``b = |z|^2 |xi|^2``, ``z_norm8 = |z|^8``."""

    a: float
    b: float
    z_norm8: float

    def __post_init__(self):
        if self.a < 0 or self.a > self.b:
            raise ParameterOutOfRange(f"need 0 <= a <= b, got a={self.a}, b={self.b}")
        if self.z_norm8 <= 0:
            raise ParameterOutOfRange("z_norm8 must be positive")


@dataclass
class SignReport:
    """Minimum of a curvature quantity with the frame that attains it."""

    min_value: float
    verdict: str
    witness: FramePair | None = None
    point: np.ndarray | None = None
    parameter: dict = field(default_factory=dict)
    min_hsc: float | None = None
    seed: int | None = None
    samples: int | None = None

    def to_dict(self) -> dict:
        def vec(v):
            return None if v is None else [[float(x.real), float(x.imag)] for x in v]

        return {
            "parameter": dict(self.parameter),
            "min_value": float(self.min_value),
            "min_hsc": None if self.min_hsc is None else float(self.min_hsc),
            "verdict": self.verdict,
            "witness": None
            if self.witness is None
            else {"xi": vec(self.witness.xi), "eta": vec(self.witness.eta)},
            "point": vec(self.point),
            "seed": self.seed,
            "samples": self.samples,
        }


def _components(r) -> np.ndarray:
    c = r.components if isinstance(r, CurvatureTensor) else np.asarray(r, dtype=complex)
    if c.ndim != 4 or len(set(c.shape)) != 1:
        raise DimensionMismatch(f"expected an (n, n, n, n) tensor, got {c.shape}")
    return c


def _symmetrized(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + np.conj(c.transpose(1, 0, 3, 2)))


def _check_vec(v, n: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (n,):
        raise DimensionMismatch(f"{name} has shape {v.shape}, tensor dimension is {n}")
    return v


def hbc_raw(r, xi, eta) -> complex:
    """The complex contraction before the realness check."""
    c = _components(r)
    n = c.shape[0]
    xi, eta = _check_vec(xi, n, "xi"), _check_vec(eta, n, "eta")
    a = np.einsum("kjiq,i,q->kj", c, eta, eta.conj())
    return complex(np.einsum("kj,k,j->", a, xi, xi.conj()))


def hbc(r, xi, eta) -> float:
    """Holomorphic bisectional curvature contraction ``R(xi, xibar, eta, etabar)``.

    Raises SymmetryViolation if the contraction is not real to within 1e-6
    (relative to the tensor scale when that exceeds 1).
    """
    val = hbc_raw(r, xi, eta)
    c = _components(r)
    scale = max(1.0, float(np.max(np.abs(c))) * np.vdot(xi, xi).real * np.vdot(eta, eta).real)
    if abs(val.imag) > IMAG_TOL * scale:
        raise SymmetryViolation(f"imaginary residue {val.imag:.3e} in curvature contraction")
    return val.real


def hsc(r, xi) -> float:
    return hbc(r, xi, xi)


def hopf_hbc_closed(lam: float, z, xi, eta) -> float:
    """Bisectional curvature of the Hopf family without building the tensor.

    |eta|^2 (|z|^2|xi|^2 - |zbar.xi|^2) / |z|^6
    + lam |(delta_ij |z|^2 - zbar^i z^j) eta^i xibar^j|^2 / |z|^8
    + (lam^2 - 2 lam) |zbar.eta|^2 (|z|^2|xi|^2 - |z.xibar|^2) / |z|^8
    """
    z, xi, eta = (np.asarray(v, dtype=complex) for v in (z, xi, eta))
    r2 = np.vdot(z, z).real
    xi2, eta2 = np.vdot(xi, xi).real, np.vdot(eta, eta).real
    zxi = np.vdot(z, xi)  # sum conj(z^i) xi^i
    zeta = np.vdot(z, eta)
    mixed = r2 * np.vdot(xi, eta) - zeta * np.conj(zxi)
    perp = r2 * xi2 - abs(zxi) ** 2
    term1 = eta2 * perp / r2**3
    term2 = lam * abs(mixed) ** 2 / r2**4
    term3 = (lam**2 - 2.0 * lam) * abs(zeta) ** 2 * perp / r2**4
    return float(term1 + term2 + term3)


def ab_form(z, xi) -> ABForm:
    z, xi = np.asarray(z, dtype=complex), np.asarray(xi, dtype=complex)
    r2 = np.vdot(z, z).real
    b = r2 * np.vdot(xi, xi).real
    a = min(abs(np.vdot(z, xi)) ** 2, b)  # Cauchy-Schwarz; clamp rounding
    return ABForm(float(a), float(b), float(r2**4))


def hopf_hsc_ab(lam: float, f: ABForm) -> float:
    """``((b - a) a (lam - 1)^2 + (b - a)^2 (lam + 1)) / |z|^8``."""
    d = f.b - f.a
    return (d * f.a * (lam - 1.0) ** 2 + d * d * (lam + 1.0)) / f.z_norm8


# -- minimization -----------------------------------------------------------


def _xi_forms(c, eta):
    # Hermitian M(eta) with xi^H M xi = HBC(xi, eta), batched over rows of eta.
    return hermitian_part(np.einsum("kjiq,si,sq->sjk", c, eta, eta.conj()))


def _eta_forms(c, xi):
    return hermitian_part(np.einsum("kjiq,sk,sj->sqi", c, xi, xi.conj()))


def _scale(c) -> float:
    return max(1.0, float(np.max(np.abs(c))))


@dataclass
class AlternatingRun:
    xi: np.ndarray
    eta: np.ndarray
    values: np.ndarray  # (half_steps, starts)
    converged: np.ndarray


def alternating_hbc(r, eta0, max_iter: int = MAX_ITER, tol: float = VALUE_TOL) -> AlternatingRun:
    """Alternating exact minimization of HBC over unit (xi, eta), batched over starts.

    For fixed eta, HBC is a Hermitian quadratic form in xi and is minimized by
    the bottom eigenvector; then the roles swap. ``values`` records every
    half-step and is non-increasing up to rounding.
    """
    c = _components(r)
    eta = np.atleast_2d(np.asarray(eta0, dtype=complex))
    eta = eta / np.linalg.norm(eta, axis=-1, keepdims=True)
    thresh = tol * _scale(c)
    history = []
    xi = None
    prev = np.full(eta.shape[0], np.inf)
    done = np.zeros(eta.shape[0], dtype=bool)
    for _ in range(max_iter):
        mu, xi = hermitian_min_eigen(_xi_forms(c, eta))
        history.append(mu)
        mu, eta = hermitian_min_eigen(_eta_forms(c, xi))
        history.append(mu)
        done = np.abs(prev - mu) <= thresh
        prev = mu
        if np.all(done):
            break
    return AlternatingRun(xi, eta, np.array(history), done)


def _rgd_hsc(c, xi0, max_iter: int = 1000, tol: float = VALUE_TOL):
    """Riemannian gradient descent of HSC on the unit sphere, batched, Armijo backtracking."""
    x = xi0 / np.linalg.norm(xi0, axis=-1, keepdims=True)
    scale = _scale(c)

    def value_and_grad(x):
        xc = x.conj()
        a = np.einsum("kjiq,si,sq->skj", c, x, xc)
        f = np.einsum("skj,sk,sj->s", a, x, xc).real
        b = np.einsum("kjim,sk,sj->sim", c, x, xc)
        g = 2.0 * (np.einsum("skm,sk->sm", a, x) + np.einsum("sim,si->sm", b, x))
        g = g - np.sum(xc * g, axis=-1, keepdims=True).real * x
        return f, g

    f, g = value_and_grad(x)
    step = np.full(x.shape[0], 0.25 / (scale * c.shape[0] ** 2))
    active = np.ones(x.shape[0], dtype=bool)
    for _ in range(max_iter):
        gn2 = np.sum(np.abs(g) ** 2, axis=-1)
        active &= gn2 > (1e-12 * scale) ** 2
        if not np.any(active):
            break
        accepted = ~active
        for _ in range(60):
            trial = x - step[:, None] * g
            trial /= np.linalg.norm(trial, axis=-1, keepdims=True)
            ft, gt = value_and_grad(trial)
            ok = ~accepted & (ft <= f - ARMIJO * step * gn2)
            gain = f - ft
            x[ok], f[ok], g[ok] = trial[ok], ft[ok], gt[ok]
            step[ok] *= 2.0
            active[ok & (gain <= tol * scale * 1e-4)] = False
            accepted |= ok
            if np.all(accepted):
                break
            step[~accepted] *= 0.5
        active &= accepted
    return x, f


def _lex_key(*vecs) -> tuple:
    return tuple(v for vec in vecs for x in np.asarray(vec).ravel() for v in (x.real, x.imag))


def _best(values, keys) -> int:
    # Index of the minimum, ties broken by lexicographically smallest key.
    lo = np.min(values)
    ties = [i for i in range(len(values)) if values[i] == lo]
    return min(ties, key=lambda i: keys[i])


def _verdict(value: float) -> str:
    return NEGATIVE if value < -NEG_TOL else NONNEG


def min_hsc(r, starts: int = DEFAULT_STARTS, seed=DEFAULT_SEED) -> SignReport:
    """Multi-start minimum of HSC over unit xi."""
    c = _symmetrized(_components(r))
    n = c.shape[0]
    rng = np.random.default_rng(seed)
    x, _ = _rgd_hsc(c, random_unit_vectors(rng, starts, n))
    vals = [hsc(c, v) for v in x]
    i = _best(vals, [_lex_key(v) for v in x])
    return SignReport(vals[i], _verdict(vals[i]), FramePair(x[i], x[i]), seed=_seed_echo(seed))


def min_hbc(
    r,
    starts: int = DEFAULT_STARTS,
    tol: float = VALUE_TOL,
    seed=DEFAULT_SEED,
    max_iter: int = MAX_ITER,
    hsc_start: bool = True,
) -> SignReport:
    """Multi-start alternating minimization of HBC over unit frames.

    ``starts`` random initial eta are used; with ``hsc_start`` one extra start
    is seeded on the diagonal xi = eta at an HSC minimizer, which escapes the
    zero-valued plateau xi || z that traps random starts of the Hopf tensors.
    """
    c = _symmetrized(_components(r))
    n = c.shape[0]
    rng = np.random.default_rng(seed)
    eta0 = random_unit_vectors(rng, starts, n)
    if hsc_start:
        x, f = _rgd_hsc(c, random_unit_vectors(rng, max(4, starts // 4), n))
        eta0 = np.vstack([eta0, x[np.argmin(f)]])
    run = alternating_hbc(c, eta0, max_iter=max_iter, tol=tol)
    if np.any(np.diff(run.values, axis=0) > DESCENT_SLACK * _scale(c)):
        raise ConvergenceFailure("alternating minimization value increased")
    if not np.all(run.converged):
        log.warning("min_hbc: %d starts hit the iteration cap", int(np.sum(~run.converged)))
    vals = [hbc(c, a, b) for a, b in zip(run.xi, run.eta)]
    i = _best(vals, [_lex_key(a, b) for a, b in zip(run.xi, run.eta)])
    return SignReport(
        vals[i], _verdict(vals[i]), FramePair(run.xi[i], run.eta[i]), seed=_seed_echo(seed)
    )


def _seed_echo(seed):
    return seed if isinstance(seed, (int, np.integer)) else None


# -- Hopf-family sign analysis ---------------------------------------------


def negative_witness(lam: float, z) -> FramePair:
    """Unit xi with ``sum conj(z^i) xi^i = 0``, paired with itself.

    Built by orthogonalizing the standard basis vector least aligned with z.
    """
    z = np.asarray(z, dtype=complex)
    if lam >= -1:
        raise ParameterOutOfRange(f"witness requires lambda < -1, got {lam}")
    if z.ndim != 1 or z.size < 2:
        raise ParameterOutOfRange("witness requires n >= 2")
    r2 = np.vdot(z, z).real
    if r2 == 0:
        raise ParameterOutOfRange("z must be nonzero")
    m = int(np.argmin(np.abs(z)))
    e = np.zeros_like(z)
    e[m] = 1.0
    xi = e - z * (np.conj(z[m]) / r2)
    xi /= np.linalg.norm(xi)
    return FramePair(xi, xi)


def witness_value(lam: float, z) -> float:
    """``b^2 (lam + 1) / |z|^8`` with ``a = 0``, ``b = |z|^2`` for a unit witness."""
    r2 = float(np.vdot(z, z).real)
    return (lam + 1.0) * r2**2 / r2**4


def sample_points(n: int, samples: int, seed=DEFAULT_SEED) -> np.ndarray:
    """Unit-sphere z samples used by the sign analysis (seeded)."""
    ss = np.random.SeedSequence(seed)
    return random_unit_vectors(np.random.default_rng(ss.spawn(1)[0]), samples, n)


def _child_seeds(seed, count):
    return np.random.SeedSequence(seed).spawn(count + 1)[1:]


def _regime(lam: float) -> str:
    if lam >= 0:
        return NONNEG
    if lam < -1:
        return NEGATIVE
    return GAP


def classify_lambda(
    n: int,
    lam: float,
    samples: int = 8,
    starts: int = DEFAULT_STARTS,
    seed=DEFAULT_SEED,
    parameter: dict | None = None,
    regime: str | None = None,
    points=None,
) -> SignReport:
    """Sign report for the Hopf metric with parameter ``lam``.

    The regime (from ``lam`` unless given) decides how the result is read:

    * ``nonneg`` (lam in [0, 1)): verdict from the sampled HBC minimum.
    * ``negative`` (lam < -1): the explicit HSC witness joins the candidates.
    * ``gap-explored`` (lam in [-1, 0)): the minimum is data, never a verdict.

    ``points`` replaces the seeded unit-sphere samples when given.
    """
    regime = _regime(lam) if regime is None else regime
    metric = LambdaMetric(n, lam)
    if points is None:
        points = sample_points(n, samples, seed)
    else:
        points = np.atleast_2d(as_point(points, n))
        samples = len(points)
    seeds = _child_seeds(seed, samples)

    def one(k):
        tensor = hopf_curvature(metric, points[k])
        return min_hbc(tensor, starts, seed=seeds[k]), min_hsc(tensor, starts, seed=seeds[k])

    results = pmap(one, range(samples))
    hb_vals = [b.min_value for b, _ in results]
    hb_keys = [_lex_key(points[k], b.witness.xi, b.witness.eta) for k, (b, _) in enumerate(results)]
    k = _best(hb_vals, hb_keys)
    value, witness, point = results[k][0].min_value, results[k][0].witness, points[k]
    hsc_best = min(s.min_value for _, s in results)

    if regime == NONNEG:
        verdict = _verdict(value)
    elif regime == NEGATIVE:
        w = negative_witness(lam, points[0])
        w_val = hsc(hopf_curvature(metric, points[0]), w.xi)
        hsc_best = min(hsc_best, w_val)
        if w_val <= value:
            value, witness, point = w_val, w, points[0]
        # lam within ~1e-9 of -1 cannot be told apart from the boundary
        verdict = NEGATIVE if value < -NEG_TOL else GAP
    else:
        verdict = GAP
    params = {"lambda": lam} if parameter is None else dict(parameter)
    return SignReport(
        value, verdict, witness, point, params, min_hsc=hsc_best,
        seed=_seed_echo(seed), samples=samples,
    )


def classify_time(
    fam: HopfFamily,
    t: float,
    samples: int = 8,
    starts: int = DEFAULT_STARTS,
    seed=DEFAULT_SEED,
    points=None,
) -> SignReport:
    """Sign report for ``omega(t)``; the regime follows the time intervals, not rounded lambda."""
    lam = lambda_of_t(fam, t)
    t_nonneg, t_neg, _ = thresholds(fam)
    if t <= t_nonneg:
        regime = NONNEG
    elif t > t_neg:
        regime = NEGATIVE
    else:
        regime = GAP
    return classify_lambda(
        fam.n, lam, samples, starts, seed, parameter={"t": t, "lambda": lam}, regime=regime,
        points=points,
    )


@dataclass
class ThresholdResult:
    t_star: float
    bracket: tuple[float, float]
    last_nonneg: float
    first_negative: float
    at_upper_edge: bool
    quantity: str
    resolution: float
    seed: int | None
    samples: int
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "t_star": self.t_star,
            "bracket": list(self.bracket),
            "last_nonneg": self.last_nonneg,
            "first_negative": self.first_negative,
            "at_upper_edge": self.at_upper_edge,
            "quantity": self.quantity,
            "resolution": self.resolution,
            "seed": self.seed,
            "samples": self.samples,
            "evaluations": self.evaluations,
        }


def empirical_minimum(n: int, lam: float, quantity: str, points, starts: int, seed) -> float:
    """Smallest HSC or HBC over the given z samples."""
    metric = LambdaMetric(n, lam)
    minimize = {"hsc": min_hsc, "hbc": min_hbc}[quantity]
    seeds = _child_seeds(seed, len(points))
    vals = pmap(
        lambda k: minimize(hopf_curvature(metric, points[k]), starts, seed=seeds[k]).min_value,
        range(len(points)),
    )
    return min(vals)


def threshold_bisect(
    fam: HopfFamily,
    quantity: str = "hsc",
    resolution: float = 1e-4,
    samples: int = 4,
    starts: int = 16,
    seed=DEFAULT_SEED,
) -> ThresholdResult:
    """Locate the time where the sampled curvature minimum first drops below -1e-9.

    Bisection runs on ``[T0/n, (2 T0 + 1)/(2n)]``. If the predicate is still
    false at the upper end but true one resolution step past it, the change is
    reported at the upper end (``at_upper_edge``). ``t_star`` is the last time
    found non-negative, so it always lies in the closed bracket.
    """
    if quantity not in ("hsc", "hbc"):
        raise ValueError(f"quantity must be 'hsc' or 'hbc', got {quantity!r}")
    if not resolution >= 1e-8:
        raise ParameterOutOfRange("resolution must be >= 1e-8")
    lo, hi, t_max = thresholds(fam)
    points = sample_points(fam.n, samples, seed)
    count = 0

    def negative(t):
        nonlocal count
        count += 1
        lam = lambda_of_t(fam, t)
        return empirical_minimum(fam.n, lam, quantity, points, starts, seed) < -NEG_TOL

    if negative(lo):
        raise BracketInvalid(f"{quantity} minimum already negative at t={lo}")
    upper, edge = hi, False
    if not negative(hi):
        probe = hi + resolution
        if probe >= t_max or not negative(probe):
            raise BracketInvalid(f"{quantity} minimum does not change sign over [{lo}, {hi}]")
        upper, edge = probe, True
    a, b = lo, upper
    while b - a > resolution:
        mid = 0.5 * (a + b)
        if negative(mid):
            b = mid
        else:
            a = mid
    return ThresholdResult(
        t_star=min(a, hi), bracket=(lo, hi), last_nonneg=a, first_negative=b,
        at_upper_edge=edge, quantity=quantity, resolution=resolution,
        seed=_seed_echo(seed), samples=samples, evaluations=count,
    )
