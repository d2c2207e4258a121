"""Chern-Ricci flow on the Hopf family.

The exact solution from the initial metric

    omega_0 = ((1 + T0) delta_ij |z|^2 - T0 zbar^i z^j) / |z|^4

is ``omega(t) = omega_0 - t Ric(omega_0)``, which stays a metric until
``T_max = (T0 + 1) / n``. :func:`euler_flow` integrates the flow pointwise as
an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analysis import SignReport, classify_time, DEFAULT_SEED, DEFAULT_STARTS
from .calculus import as_point, hermitian_part
from .chern import MetricField, ricci_numeric
from .errors import NotPositiveDefinite, ParameterOutOfRange
from .hopf import HopfFamily, lambda_of_t

#: Default stopping fraction of T_max; closer requires ``allow_near_tmax``.
SAFE_FRACTION = 0.999
DEFAULT_DT = 1e-3
# Relative residual allowed when reading a sampled matrix as a Hopf-family member.
FAMILY_TOL = 1e-6


def max_time(fam: HopfFamily) -> float:
    return fam.t_max


def det_factor(fam: HopfFamily, t: float) -> float:
    """``1 + T0 - n t``, the factor relating omega(t) to the rescaled family."""
    return 1.0 + fam.T0 - fam.n * t


def _check_time(fam: HopfFamily, t: float):
    if not (0.0 <= t < fam.t_max):
        raise ParameterOutOfRange(f"t={t} outside [0, T_max={fam.t_max})")


def exact_flow_metric(fam: HopfFamily, t: float, z) -> np.ndarray:
    """``((1 + T0 - n t) delta_ij |z|^2 - (T0 - n t) zbar^i z^j) / |z|^4``."""
    _check_time(fam, t)
    z = as_point(z, fam.n)
    r2 = np.sum(np.abs(z) ** 2, axis=-1)[..., None, None]
    s = fam.T0 - fam.n * t
    num = (1.0 + s) * np.eye(fam.n) * r2 - s * np.conj(z)[..., :, None] * z[..., None, :]
    return num / r2**2


def flow_metric_field(fam: HopfFamily, t: float) -> MetricField:
    _check_time(fam, t)
    return MetricField(
        lambda z: exact_flow_metric(fam, t, z), label=f"omega(t={t!r})", closed_form=True
    )


# -- pointwise Euler integration -------------------------------------------

Extension = Callable[[np.ndarray, np.ndarray], MetricField]


def _align(param: np.ndarray, w: np.ndarray) -> np.ndarray:
    # Broadcast per-sample values (m,) against points (m, ..., n).
    return param.reshape(param.shape + (1,) * (w.ndim - 1))


def hopf_extension(points: np.ndarray, matrices: np.ndarray) -> MetricField:
    """Extend matrices of the form ``(A delta |z|^2 - B zbar z^T) / |z|^4`` to fields.

    ``A`` and ``B`` are recovered per sample point; the returned field takes
    points shaped ``(m, ..., n)`` aligned with the ``m`` samples.
    Raises ValueError if a matrix is not of that form.
    """
    z = np.asarray(points, dtype=complex)
    m = hermitian_part(matrices)
    n = z.shape[-1]
    r2 = np.sum(np.abs(z) ** 2, axis=-1)
    # zbar is the eigenvector with eigenvalue (A - B) / |z|^2; the rest have A / |z|^2.
    a_minus_b = np.einsum("si,sij,sj->s", z, m, np.conj(z)).real
    trace = np.trace(m, axis1=-2, axis2=-1).real
    a = (r2 * trace - a_minus_b) / (n - 1)
    b = a - a_minus_b

    def evaluate(w):
        w2 = np.sum(np.abs(w) ** 2, axis=-1)[..., None, None]
        aa, bb = _align(a, w2), _align(b, w2)
        outer = np.conj(w)[..., :, None] * w[..., None, :]
        return (aa * np.eye(n) * w2 - bb * outer) / w2**2

    rebuilt = evaluate(z)
    err = np.max(np.abs(rebuilt - m)) / max(np.max(np.abs(m)), 1e-300)
    if err > FAMILY_TOL:
        raise ValueError(f"matrices are not in the Hopf family (relative residual {err:.2e})")
    return MetricField(evaluate, label="hopf-extension", closed_form=True)


def constant_extension(points: np.ndarray, matrices: np.ndarray) -> MetricField:
    """Extend each sample matrix as a constant (flat) field near its point."""
    m = np.asarray(matrices, dtype=complex)

    def evaluate(w):
        lead = m.reshape((m.shape[0],) + (1,) * (w.ndim - 2) + m.shape[1:])
        return np.broadcast_to(lead, w.shape[:-1] + m.shape[1:])

    return MetricField(evaluate, label="constant-extension", closed_form=True)


@dataclass
class EulerFlowResult:
    points: np.ndarray
    metrics: np.ndarray
    t_end: float
    dt: float
    steps: int


def euler_flow(
    g0: MetricField,
    sample_points,
    dt: float = DEFAULT_DT,
    t_end: float = 1.0,
    extend: Extension = hopf_extension,
) -> EulerFlowResult:
    """Explicit Euler for ``d g / dt = -Ric(g)`` at a set of sample points.

    The evolving metric is known only at the samples; before each step
    ``extend(points, matrices)`` supplies a local field around every sample so
    that Ricci can be taken by finite differences.
    """
    if not dt > 0:
        raise ParameterOutOfRange("dt must be positive")
    if not t_end >= 0:
        raise ParameterOutOfRange("t_end must be non-negative")
    z = as_point(sample_points)
    z = np.atleast_2d(z)
    g = np.array(g0(z), dtype=complex)
    steps = max(0, math.ceil(t_end / dt - 1e-9))
    for k in range(steps):
        h = dt if k < steps - 1 else t_end - (steps - 1) * dt
        g = g - h * ricci_numeric(extend(z, g), z)
        try:
            np.linalg.cholesky(hermitian_part(g))
        except np.linalg.LinAlgError:
            bad = int(np.argmin(np.linalg.eigvalsh(hermitian_part(g))[:, 0]))
            t_now = (k + 1) * dt if k < steps - 1 else t_end
            raise NotPositiveDefinite(
                f"evolved metric lost positive-definiteness at t={t_now}", t=t_now, point=z[bad]
            ) from None
    return EulerFlowResult(z, g, t_end, dt, steps)


# -- traces -----------------------------------------------------------------


@dataclass
class TraceRow:
    t: float
    lam: float
    det_factor: float
    min_hsc: float
    min_hbc: float
    verdict: str
    report: SignReport = field(repr=False)


@dataclass
class FlowTrace:
    fam: HopfFamily
    rows: list[TraceRow]
    samples: int
    starts: int
    seed: int | None

    COLUMNS = ("t", "lambda", "det_factor", "min_hsc", "min_hbc", "verdict")

    def records(self) -> list[tuple]:
        return [(r.t, r.lam, r.det_factor, r.min_hsc, r.min_hbc, r.verdict) for r in self.rows]


def flow_trace(
    fam: HopfFamily,
    times,
    samples: int = 8,
    starts: int = DEFAULT_STARTS,
    seed=DEFAULT_SEED,
    allow_near_tmax: bool = False,
) -> FlowTrace:
    """Curvature sign data along the exact flow at the given times."""
    times = [float(t) for t in times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ParameterOutOfRange("times must be strictly increasing")
    limit = fam.t_max if allow_near_tmax else SAFE_FRACTION * fam.t_max
    for t in times:
        _check_time(fam, t)
        if t > limit:
            raise ParameterOutOfRange(
                f"t={t} beyond {SAFE_FRACTION} T_max; pass allow_near_tmax to go closer"
            )
    rows = []
    for t in times:
        rep = classify_time(fam, t, samples, starts, seed)
        rows.append(
            TraceRow(t, lambda_of_t(fam, t), det_factor(fam, t), rep.min_hsc, rep.min_value, rep.verdict, rep)
        )
    return FlowTrace(fam, rows, samples, starts, seed)
