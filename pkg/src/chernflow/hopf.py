"""Closed forms for the Hopf metric family.

The family is

    h_{i jbar}(z) = (delta_ij |z|^2 - lam * conj(z_i) z_j) / |z|^4,    lam < 1,

on C^n minus the origin. It descends to every diagonal Hopf quotient and is
related to the Chern-Ricci flow solution ``omega(t)`` by
``omega(t) = (1 + T0 - n t) * h`` with ``lam = (T0 - n t) / (1 + T0 - n t)``.

All functions evaluate the literal formulas at the given points and broadcast
over leading axes of ``z``. Storage follows :mod:`chernflow.chern`:
matrices ``[i, j]``, Christoffel symbols ``[p, k, i]``, curvature
``[k, j, i, q]`` for ``R_{k jbar i qbar}``. That last order matters: this
tensor is *not* symmetric under swapping the (k, j) and (i, q) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calculus import as_point
from .chern import CurvatureTensor, MetricField
from .errors import DimensionMismatch, ParameterOutOfRange

QUOTIENT_TOL = 1e-12


@dataclass(frozen=True)
class HopfFamily:
    """Initial data of the flow: dimension ``n >= 2`` and ``T0 >= 0``."""

    n: int
    T0: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ParameterOutOfRange(f"n must be an integer >= 2, got {self.n}")
        if not math.isfinite(self.T0) or self.T0 < 0:
            raise ParameterOutOfRange(f"T0 must be finite and >= 0, got {self.T0}")

    @property
    def t_max(self) -> float:
        return (self.T0 + 1.0) / self.n


@dataclass(frozen=True)
class LambdaMetric:
    n: int
    lam: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterOutOfRange(f"n must be a positive integer, got {self.n}")
        if not math.isfinite(self.lam) or self.lam >= 1:
            raise ParameterOutOfRange(f"lambda must be finite and < 1, got {self.lam}")


@dataclass(frozen=True)
class HopfQuotient:
    """Diagonal identification ``z ~ (alpha_1 z^1, ..., alpha_n z^n)``."""

    alpha: tuple

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=complex)
        if a.ndim != 1 or a.size == 0:
            raise ParameterOutOfRange("alpha must be a non-empty vector")
        mod = np.abs(a)
        if np.ptp(mod) > QUOTIENT_TOL:
            raise ParameterOutOfRange(f"moduli of alpha differ: {mod.tolist()}")
        if abs(mod[0] - 1.0) <= QUOTIENT_TOL:
            raise ParameterOutOfRange("common modulus of alpha must differ from 1")
        object.__setattr__(self, "alpha", tuple(complex(x) for x in a))


def _prep(m: LambdaMetric, z):
    z = as_point(z, m.n)
    r2 = np.sum(np.abs(z) ** 2, axis=-1)
    return z, np.conj(z), r2


def _projector(z, zb, r2):
    # delta_ab |z|^2 - conj(z_a) z_b
    n = z.shape[-1]
    return np.eye(n) * r2[..., None, None] - zb[..., :, None] * z[..., None, :]


def hopf_metric(m: LambdaMetric, z) -> np.ndarray:
    z, zb, r2 = _prep(m, z)
    n = m.n
    num = np.eye(n) * r2[..., None, None] - m.lam * zb[..., :, None] * z[..., None, :]
    return num / (r2**2)[..., None, None]


def hopf_metric_field(m: LambdaMetric) -> MetricField:
    return MetricField(lambda z: hopf_metric(m, z), label=f"hopf(lambda={m.lam!r})", closed_form=True)


def hopf_metric_inverse(m: LambdaMetric, z) -> np.ndarray:
    """``h^{i jbar}``, stored ``[i, j]``, with ``sum_j h^{i jbar} h_{k jbar} = delta_ik``.

    As a matrix this is the transpose of ``inv(hopf_metric(m, z))``.
    """
    z, zb, r2 = _prep(m, z)
    n = m.n
    rank_one = (m.lam / (1.0 - m.lam)) * z[..., :, None] * zb[..., None, :]
    return np.eye(n) * r2[..., None, None] + rank_one


def hopf_det(m: LambdaMetric, z):
    """``(1 - lam) |z|^{-2n}``."""
    _, _, r2 = _prep(m, z)
    return (1.0 - m.lam) * r2 ** (-m.n)


def hopf_christoffel(m: LambdaMetric, z) -> np.ndarray:
    """``Gamma^p_{ki} = lam zbar^i zbar^k z^p / |z|^4 - (lam delta_pk zbar^i + delta_ip zbar^k) / |z|^2``.

    Stored ``[p, k, i]``; not symmetric in (k, i).
    """
    z, zb, r2 = _prep(m, z)
    lam, eye = m.lam, np.eye(m.n)
    cubic = np.einsum("...i,...k,...p->...pki", zb, zb, z) / (r2**2)[..., None, None, None]
    linear = lam * np.einsum("pk,...i->...pki", eye, zb) + np.einsum("ip,...k->...pki", eye, zb)
    return lam * cubic - linear / r2[..., None, None, None]


def _curvature_components(lam: float, z, zb, r2) -> np.ndarray:
    eye = np.eye(z.shape[-1])
    a = _projector(z, zb, r2)
    r6 = (r2**3)[..., None, None, None, None]
    r8 = (r2**4)[..., None, None, None, None]
    t1 = np.einsum("iq,...kj->...kjiq", eye, a) / r6
    t2 = lam * np.einsum("...ij,...kq->...kjiq", a, a) / r8
    t3 = (lam**2 - 2.0 * lam) * np.einsum("...i,...q,...kj->...kjiq", zb, z, a) / r8
    return t1 + t2 + t3


def hopf_curvature(m: LambdaMetric, z) -> CurvatureTensor:
    """Chern curvature ``R_{k jbar i qbar}`` of the family, stored ``[k, j, i, q]``.

    R = delta_iq (delta_jk |z|^2 - zbar^k z^j) / |z|^6
      + lam (delta_ij |z|^2 - zbar^i z^j)(delta_kq |z|^2 - zbar^k z^q) / |z|^8
      + (lam^2 - 2 lam) zbar^i z^q (delta_kj |z|^2 - zbar^k z^j) / |z|^8
    """
    z, zb, r2 = _prep(m, z)
    return CurvatureTensor(_curvature_components(m.lam, z, zb, r2), z, closed_form=True)


def ricci_closed(m: LambdaMetric, z) -> np.ndarray:
    """Chern-Ricci coefficients ``n (delta_ij |z|^2 - zbar^i z^j) / |z|^4``; independent of lambda."""
    z, zb, r2 = _prep(m, z)
    return m.n * _projector(z, zb, r2) / (r2**2)[..., None, None]


def lambda_of_t(fam: HopfFamily, t: float) -> float:
    """``lam(t) = (T0 - n t) / (1 + T0 - n t)`` for ``0 <= t < T_max``."""
    if not (0.0 <= t < fam.t_max):
        raise ParameterOutOfRange(f"t={t} outside [0, {fam.t_max})")
    s = fam.T0 - fam.n * t
    return s / (1.0 + s)


def thresholds(fam: HopfFamily) -> tuple[float, float, float]:
    """(end of non-negativity interval, start of negativity interval, T_max)."""
    n, T0 = fam.n, fam.T0
    return T0 / n, (2.0 * T0 + 1.0) / (2.0 * n), (T0 + 1.0) / n


def quotient_invariance(m: LambdaMetric, q: HopfQuotient, z) -> float:
    """max_ij |alpha_i conj(alpha_j) h_{i jbar}(alpha z) - h_{i jbar}(z)|."""
    alpha = np.asarray(q.alpha)
    if alpha.size != m.n:
        raise DimensionMismatch(f"alpha has {alpha.size} entries, metric dimension is {m.n}")
    mod = np.abs(alpha)
    if np.ptp(mod) > QUOTIENT_TOL:
        raise ParameterOutOfRange(f"moduli of alpha differ: {mod.tolist()}")
    z = as_point(z, m.n)
    pulled = alpha[:, None] * np.conj(alpha)[None, :] * hopf_metric(m, alpha * z)
    return float(np.max(np.abs(pulled - hopf_metric(m, z))))
