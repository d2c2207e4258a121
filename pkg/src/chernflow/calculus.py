"""Complex linear algebra and Wirtinger finite differences on C^n.

Fields are plain callables that broadcast over leading axes: a field maps an
array of points of shape ``(..., n)`` to values of shape ``(..., *out)``.
Derivatives are taken with real-coordinate central differences, so fields
need not be holomorphic.

Indices are 0-based throughout the Python API.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, SingularMatrix, SingularPoint

Field = Callable[[np.ndarray], np.ndarray]

#: Base step for a single derivative level, multiplied by max(1, |z|).
FIRST_STEP = 1e-5
#: Base step used on both levels when two derivative levels are composed.
COMPOSED_STEP = 1e-4

HOLOMORPHIC = "holomorphic"
ANTIHOLOMORPHIC = "antiholomorphic"

_SINGULAR_DET = 1e-300


def as_point(z, n: int | None = None) -> np.ndarray:
    """Coerce ``z`` to a complex array of points and validate it.

    Raises SingularPoint if any point is the origin.
    """
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    if n is not None and z.shape[-1] != n:
        raise DimensionMismatch(f"expected points in C^{n}, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("point has non-finite entries")
    if np.any(np.linalg.norm(z, axis=-1) == 0.0):
        raise SingularPoint("z = 0 is not in the domain")
    return z


def fd_step(z: np.ndarray, scale: float = FIRST_STEP) -> np.ndarray:
    """Step size ``scale * max(1, |z|)`` for each point in a batch."""
    return scale * np.maximum(1.0, np.linalg.norm(z, axis=-1))


def _stencil(n: int) -> np.ndarray:
    # Offsets (n, 4, n): +e_k, -e_k, +i e_k, -i e_k.
    eye = np.eye(n, dtype=complex)
    return np.stack([eye, -eye, 1j * eye, -1j * eye], axis=1)


def wirtinger_gradient(
    f: Field,
    z,
    kind: str = HOLOMORPHIC,
    step=None,
    scale: float = FIRST_STEP,
) -> np.ndarray:
    """All first Wirtinger derivatives of ``f`` at ``z``.

    Parameters
    ----------
    f : callable
        Field mapping ``(..., n)`` points to ``(..., *out)`` values.
    z : array_like
        Base point(s), shape ``(..., n)``.
    kind : {"holomorphic", "antiholomorphic"}
        ``d/dz^k = (d/dx^k - i d/dy^k) / 2`` or ``d/dzbar^k = (d/dx^k + i d/dy^k) / 2``.
    step : float or array, optional
        Explicit step; by default ``scale * max(1, |z|)``.

    Returns
    -------
    ndarray of shape ``(..., n, *out)``; axis ``-len(out)-1`` is the
    differentiation index k.
    """
    if kind not in (HOLOMORPHIC, ANTIHOLOMORPHIC):
        raise ValueError(f"unknown derivative kind {kind!r}")
    z = as_point(z)
    n = z.shape[-1]
    batch = z.shape[:-1]
    h = fd_step(z, scale) if step is None else np.broadcast_to(np.asarray(step, float), batch)

    pts = z[..., None, None, :] + h[..., None, None, None] * _stencil(n)
    vals = np.asarray(f(pts))
    out_ndim = vals.ndim - len(batch) - 2
    axis = len(batch) + 1
    hh = h.reshape(batch + (1,) * (1 + out_ndim))

    take = lambda m: np.take(vals, m, axis=axis)
    dx = (take(0) - take(1)) / (2.0 * hh)
    dy = (take(2) - take(3)) / (2.0 * hh)
    if kind == HOLOMORPHIC:
        return 0.5 * (dx - 1j * dy)
    return 0.5 * (dx + 1j * dy)


def wirtinger_derivative(f: Field, z, k: int, kind: str = HOLOMORPHIC, step=None):
    """Single Wirtinger derivative ``df/dz^k`` or ``df/dzbar^k`` at one point."""
    z = as_point(z)
    if z.ndim != 1:
        raise DimensionMismatch("wirtinger_derivative takes a single point; use wirtinger_gradient")
    n = z.shape[0]
    if not 0 <= k < n:
        raise DimensionMismatch(f"index {k} out of range for C^{n}")
    grad = wirtinger_gradient(f, z, kind, step)
    return grad[k]


def wirtinger_mixed(f: Field, z, scale: float = COMPOSED_STEP) -> np.ndarray:
    """Mixed second derivatives ``d^2 f / dz^i dzbar^j`` as an ``(..., n, n, *out)`` array.

    The antiholomorphic difference is applied to the holomorphic gradient; both
    levels use ``scale * max(1, |z|)``.
    """
    z = as_point(z)
    inner = lambda w: wirtinger_gradient(f, w, HOLOMORPHIC, scale=scale)
    outer = wirtinger_gradient(inner, z, ANTIHOLOMORPHIC, scale=scale)  # (..., j, i, *out)
    b = z.ndim - 1
    return np.swapaxes(outer, b, b + 1)


def hermitian_part(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + np.swapaxes(m, -1, -2).conj())


def hermitian_inverse_det(m) -> tuple[np.ndarray, complex]:
    """Inverse and determinant of a Hermitian matrix (or batch).

    The input is symmetrized first; so is the returned inverse.
    """
    m = hermitian_part(m)
    det = np.linalg.det(m)
    if np.any(np.abs(det) < _SINGULAR_DET):
        raise SingularMatrix("matrix is numerically singular")
    inv = hermitian_part(np.linalg.inv(m))
    return inv, det


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # Rotate each vector so its largest-modulus entry is real positive.
    idx = np.argmax(np.abs(v), axis=-1)
    lead = np.take_along_axis(v, idx[..., None], axis=-1)
    return v * (np.abs(lead) / lead)


def hermitian_min_eigen(m) -> tuple[np.ndarray | float, np.ndarray]:
    """Smallest eigenvalue and a unit eigenvector (phase-normalized).

    Works on a single matrix or a batch ``(..., n, n)``.
    """
    m = hermitian_part(m)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    mu = w[..., 0]
    vec = _fix_phase(v[..., :, 0])
    if np.ndim(mu) == 0:
        return float(mu), vec
    return mu, vec


def is_positive_definite(m) -> bool:
    """True if every matrix in the (batch of) Hermitian matrices is positive-definite."""
    try:
        np.linalg.cholesky(hermitian_part(m))
    except np.linalg.LinAlgError:
        return False
    return True


def random_unit_vectors(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """``count`` vectors uniform on the unit sphere of C^n."""
    v = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
