"""Finite-difference Chern geometry for an arbitrary Hermitian metric field.

This is the independent oracle for the closed forms in :mod:`chernflow.hopf`:
nothing here knows about the Hopf family.

Conventions
-----------
* A metric matrix ``G`` stores ``G[i, j] = g_{i jbar}``.
* Christoffel symbols are stored ``Gamma[p, k, i]`` for
  ``Gamma^p_{ki} = g^{p jbar} d g_{i jbar} / dz^k``.
* Curvature is stored ``R[k, j, i, q]`` for ``R_{k jbar i qbar}``, with
  ``R^p_{k jbar i} = -d Gamma^p_{ki} / dzbar^j`` and
  ``R_{k jbar i qbar} = g_{p qbar} R^p_{k jbar i}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .calculus import (
    ANTIHOLOMORPHIC,
    COMPOSED_STEP,
    FIRST_STEP,
    HOLOMORPHIC,
    as_point,
    hermitian_part,
    wirtinger_gradient,
    wirtinger_mixed,
)
from .errors import NotPositiveDefinite


@dataclass(frozen=True)
class MetricField:
    """A Hermitian metric ``z -> g_{i jbar}(z)``.

    ``evaluate`` must broadcast over leading axes: ``(..., n) -> (..., n, n)``.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    closed_form: bool = False

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self.evaluate(np.asarray(z, dtype=complex)), dtype=complex)


def constant_metric(matrix, label: str = "constant") -> MetricField:
    """Metric field equal to ``matrix`` everywhere (flat)."""
    matrix = hermitian_part(matrix)

    def evaluate(z):
        return np.broadcast_to(matrix, z.shape[:-1] + matrix.shape)

    return MetricField(evaluate, label=label, closed_form=True)


def _conj_pair(r: np.ndarray) -> np.ndarray:
    # conj(R_{j kbar q ibar}) rearranged to the [k, j, i, q] slot.
    return np.conj(np.swapaxes(np.swapaxes(r, -4, -3), -2, -1))


@dataclass(frozen=True)
class CurvatureTensor:
    """Chern curvature ``R_{k jbar i qbar}`` at a point, stored ``[k, j, i, q]``."""

    components: np.ndarray
    base_point: np.ndarray = field(repr=False)
    closed_form: bool = False

    @property
    def n(self) -> int:
        return self.components.shape[-1]

    def __getitem__(self, idx):
        return self.components[idx]

    def symmetry_defect(self) -> float:
        """max |R_{k jbar i qbar} - conj(R_{j kbar q ibar})|."""
        return float(np.max(np.abs(self.components - _conj_pair(self.components))))

    def symmetrized(self) -> "CurvatureTensor":
        r = 0.5 * (self.components + _conj_pair(self.components))
        return CurvatureTensor(r, self.base_point, self.closed_form)


def _metric_at(g: MetricField, z: np.ndarray) -> np.ndarray:
    m = g(z)
    try:
        np.linalg.cholesky(hermitian_part(m))
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"metric {g.label!r} is not positive-definite", point=z) from None
    return m


def christoffel_numeric(g: MetricField, z, scale: float = FIRST_STEP) -> np.ndarray:
    """Chern connection coefficients ``Gamma[p, k, i]`` by first differences of ``g``."""
    z = as_point(z)
    m = _metric_at(g, z)
    dg = wirtinger_gradient(g, z, HOLOMORPHIC, scale=scale)  # (..., k, i, j)
    inv = np.linalg.inv(m)  # sum_j m[i, j] inv[j, p] = delta_ip
    return np.einsum("...kij,...jp->...pki", dg, inv)


def curvature_numeric(
    g: MetricField,
    z,
    inner: float = FIRST_STEP,
    outer: float = COMPOSED_STEP,
) -> CurvatureTensor:
    """Lowered Chern curvature by differencing numeric Christoffel symbols.

    Christoffel symbols are computed at displaced points with step
    ``inner * max(1, |z|)``, then differenced antiholomorphically with step
    ``outer * max(1, |z|)``. No symmetrization is applied.
    """
    z = as_point(z)
    m = _metric_at(g, z)
    gamma = lambda w: christoffel_numeric(g, w, scale=inner)
    d_gamma = wirtinger_gradient(gamma, z, ANTIHOLOMORPHIC, scale=outer)  # (..., j, p, k, i)
    r = -np.einsum("...jpki,...pq->...kjiq", d_gamma, m)
    return CurvatureTensor(r, z, closed_form=False)


def log_det_field(g: MetricField) -> Callable[[np.ndarray], np.ndarray]:
    """Scalar field ``log det g``."""

    def logdet(w):
        return np.linalg.slogdet(hermitian_part(g(w)))[1]

    return logdet


def ricci_numeric(g: MetricField, z, scale: float = COMPOSED_STEP) -> np.ndarray:
    """Chern-Ricci coefficients ``Ric_{i jbar} = -d_i d_jbar log det g``."""
    z = as_point(z)
    _metric_at(g, z)
    return -wirtinger_mixed(log_det_field(g), z, scale=scale)
