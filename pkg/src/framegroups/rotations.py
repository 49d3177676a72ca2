"""Rotation groups SO(d), their algebra so(d), and the Gamma series.

Coordinates on so(d) are vectors of length d(d-1)/2.  The basis is fixed so
that for d = 3 the hat map is the usual cross-product matrix
(hat(v) w = v x w) and for d = 2 the single coordinate generates a
counter-clockwise rotation.  For general d the basis enumerates index pairs
(i < j) in reverse-lexicographic order with sign (-1)^(i+j+1), which reduces
to those conventions at d = 2, 3 and makes hat/vee exact inverses.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import BranchCutError, ConvergenceError

_SMALL_ANGLE = 1e-4


def so_dim(d: int) -> int:
    """Dimension of so(d), i.e. d(d-1)/2."""
    return d * (d - 1) // 2


@lru_cache(maxsize=None)
def _basis(d: int):
    """(pair, sign) list for the so(d) coordinate basis."""
    if d < 2:
        raise ValueError(f"rotation dimension must be >= 2, got {d}")
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    pairs.sort(reverse=True)
    return [((i, j), float((-1) ** (i + j + 1))) for (i, j) in pairs]


def hat(v: np.ndarray, d: int) -> np.ndarray:
    """Embed coordinates v in R^{d(d-1)/2} as an antisymmetric d x d matrix."""
    v = np.asarray(v, dtype=float).reshape(-1)
    basis = _basis(d)
    if v.shape[0] != len(basis):
        raise ValueError(
            f"so({d}) coordinates must have length {len(basis)}, got {v.shape[0]}"
        )
    out = np.zeros((d, d))
    for coord, ((i, j), sign) in zip(v, basis):
        out[j, i] += sign * coord
        out[i, j] -= sign * coord
    return out


def vee(mat: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Inverse of :func:`hat`.  Rejects matrices that are not antisymmetric."""
    mat = np.asarray(mat, dtype=float)
    d = mat.shape[0]
    if mat.shape != (d, d):
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if np.linalg.norm(mat + mat.T) >= tol:
        raise ValueError("matrix is not antisymmetric within tolerance")
    skew = 0.5 * (mat - mat.T)
    return np.array([sign * skew[j, i] for ((i, j), sign) in _basis(d)])


def so_exp(v: np.ndarray, d: int) -> np.ndarray:
    """Exponential so(d) -> SO(d).

    Closed forms (Rodrigues and the planar analog) for d in {2, 3};
    truncated series with scaling and squaring otherwise.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if d == 2:
        a = v[0]
        c, s = math.cos(a), math.sin(a)
        return np.array([[c, -s], [s, c]])
    if d == 3:
        return gamma(0, v, 3)
    x = hat(v, d)
    norm = np.linalg.norm(x)
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    x = x / (2.0 ** squarings)
    out = np.eye(d)
    term = np.eye(d)
    for k in range(1, 300):
        term = term @ x / k
        out = out + term
        if np.linalg.norm(term) < 1e-16:
            break
    else:
        raise ConvergenceError("so_exp series did not converge")
    for _ in range(squarings):
        out = out @ out
    return out


def so_log(rot: np.ndarray) -> np.ndarray:
    """Principal logarithm SO(d) -> so(d) coordinates.

    Requires the rotation angle to be below pi - 1e-6.  For d = 3 the angle
    is taken from the trace; for general d the log is computed by inverse
    scaling and squaring (repeated matrix square roots, then a series log).
    """
    rot = np.asarray(rot, dtype=float)
    d = rot.shape[0]
    if d == 2:
        angle = math.atan2(rot[1, 0], rot[0, 0])
        if abs(angle) >= math.pi - 1e-6:
            raise BranchCutError("rotation angle too close to pi")
        return np.array([angle])
    if d == 3:
        cos_angle = min(1.0, max(-1.0, 0.5 * (np.trace(rot) - 1.0)))
        angle = math.acos(cos_angle)
        if angle >= math.pi - 1e-6:
            raise BranchCutError("rotation angle too close to pi")
        w = np.array([rot[2, 1] - rot[1, 2],
                      rot[0, 2] - rot[2, 0],
                      rot[1, 0] - rot[0, 1]])
        if angle < _SMALL_ANGLE:
            scale = 0.5 * (1.0 + angle ** 2 / 6.0 + 7.0 * angle ** 4 / 360.0)
        else:
            scale = 0.5 * angle / math.sin(angle)
        return scale * w
    return _so_log_general(rot)


def _so_log_general(rot: np.ndarray) -> np.ndarray:
    d = rot.shape[0]
    mat = rot.copy()
    squarings = 0
    while np.linalg.norm(mat - np.eye(d)) > 0.5:
        if squarings > 40:
            raise ConvergenceError("so_log square-root stage did not converge")
        mat = np.real(scipy.linalg.sqrtm(mat))
        squarings += 1
    err = mat - np.eye(d)
    log_m = np.zeros((d, d))
    term = np.eye(d)
    for k in range(1, 300):
        term = term @ err
        log_m = log_m + ((-1) ** (k + 1)) * term / k
        if np.linalg.norm(term) < 1e-16:
            break
    else:
        raise ConvergenceError("so_log series did not converge")
    log_m *= 2.0 ** squarings
    return vee(0.5 * (log_m - log_m.T), tol=np.inf)


def gamma(m: int, v: np.ndarray, d: int) -> np.ndarray:
    """Gamma_m(v) = sum_k hat(v)^k / (k+m)! for m in {0, 1, 2}.

    Gamma_0 is the rotation exponential, Gamma_1 its left Jacobian and
    Gamma_2 the second-order analog appearing in the filter updates.
    """
    if m not in (0, 1, 2):
        raise ValueError(f"gamma order must be 0, 1 or 2, got {m}")
    v = np.asarray(v, dtype=float).reshape(-1)
    if d == 3:
        return _gamma3(m, v)
    if d == 2:
        return _gamma2(m, v[0])
    return _gamma_series(m, hat(v, d))


def _gamma3(m: int, v: np.ndarray) -> np.ndarray:
    x = hat(v, 3)
    x2 = x @ x
    t = float(np.linalg.norm(v))
    eye = np.eye(3)
    if t < _SMALL_ANGLE:
        t2 = t * t
        if m == 0:
            c1 = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
            c2 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
            return eye + c1 * x + c2 * x2
        if m == 1:
            c1 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
            c2 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
            return eye + c1 * x + c2 * x2
        c1 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
        c2 = 1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0
        return 0.5 * eye + c1 * x + c2 * x2
    st, ct = math.sin(t), math.cos(t)
    if m == 0:
        return eye + (st / t) * x + ((1.0 - ct) / t ** 2) * x2
    if m == 1:
        return eye + ((1.0 - ct) / t ** 2) * x + ((t - st) / t ** 3) * x2
    return 0.5 * eye + ((t - st) / t ** 3) * x + \
        ((0.5 * t ** 2 + ct - 1.0) / t ** 4) * x2


def _gamma2(m: int, a: float) -> np.ndarray:
    eye = np.eye(2)
    rot90 = np.array([[0.0, -1.0], [1.0, 0.0]])
    if abs(a) < _SMALL_ANGLE:
        return _gamma_series(m, a * rot90)
    ca, sa = math.cos(a), math.sin(a)
    if m == 0:
        return ca * eye + sa * rot90
    if m == 1:
        return (sa / a) * eye + ((1.0 - ca) / a) * rot90
    return ((1.0 - ca) / a ** 2) * eye + ((a - sa) / a ** 2) * rot90


def _gamma_series(m: int, x: np.ndarray) -> np.ndarray:
    d = x.shape[0]
    out = np.eye(d) / math.factorial(m)
    term = np.eye(d)
    for k in range(1, 300):
        term = term @ x / k
        out = out + term * (math.factorial(k) / math.factorial(k + m))
        if np.linalg.norm(term) < 1e-16:
            break
    else:
        raise ConvergenceError("gamma series did not converge")
    return out


def is_rotation(rot: np.ndarray, tol: float = 1e-10) -> bool:
    """True if rot is orthogonal with unit determinant within tol."""
    rot = np.asarray(rot, dtype=float)
    d = rot.shape[0]
    if rot.shape != (d, d):
        return False
    return (np.linalg.norm(rot.T @ rot - np.eye(d)) < tol
            and abs(np.linalg.det(rot) - 1.0) < tol)
