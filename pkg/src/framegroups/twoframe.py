"""The two-frame group TFG(d, n, m) and its automorphism group SIM_{n+m}(d).

A two-frame element carries a rotation R in SO(d), n world-frame vectors
(columns of x) and m body-frame vectors (columns of y).  Its matrix
embedding is

    T = [ R  r ]      r = [ x  R y ]
        [ 0  I ]

of size (d+n+m) x (d+n+m), and group multiplication is the matrix product.
We store (R, x, y) directly; r is assembled on demand.

Automorphisms of the group are conjugations by block upper-triangular
matrices S = [[Omega, rho], [0, A]] with Omega in SO(d) and A invertible;
those S form the group SIM_{n+m}(d).

All values are immutable after construction and every operation is a pure
function, so concurrent use needs no synchronization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SignatureMismatchError
from .rotations import gamma, hat, is_rotation, so_dim, so_exp, so_log, vee


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class TfgElement:
    """Element of TFG(d, n, m): rotation plus world- and body-frame vectors."""

    rot: np.ndarray    # (d, d)
    world: np.ndarray  # (d, n)
    body: np.ndarray   # (d, m)

    def __post_init__(self):
        object.__setattr__(self, "rot", _frozen(self.rot))
        d = self.rot.shape[0]
        object.__setattr__(self, "world",
                           _frozen(np.reshape(self.world, (d, -1))))
        object.__setattr__(self, "body",
                           _frozen(np.reshape(self.body, (d, -1))))
        if self.rot.shape != (d, d):
            raise ValueError(f"rotation must be square, got {self.rot.shape}")

    @property
    def signature(self) -> tuple[int, int, int]:
        return (self.rot.shape[0], self.world.shape[1], self.body.shape[1])

    @property
    def d(self) -> int:
        return self.rot.shape[0]

    @property
    def r_block(self) -> np.ndarray:
        """The translation block r = [x, R y] of the embedding."""
        return np.hstack([self.world, self.rot @ self.body])

    def validate(self, tol: float = 1e-10) -> None:
        if not is_rotation(self.rot, tol):
            raise ValueError("rotation block is not in SO(d) within tolerance")


@dataclass(frozen=True)
class TfgTangent:
    """Lie algebra element of TFG(d, n, m) in (theta, u, v) coordinates."""

    theta: np.ndarray  # (d(d-1)/2,)
    u: np.ndarray      # (d, n)
    v: np.ndarray      # (d, m)

    def __post_init__(self):
        object.__setattr__(self, "theta",
                           _frozen(np.reshape(self.theta, (-1,))))
        object.__setattr__(self, "u", _frozen(self.u))
        object.__setattr__(self, "v", _frozen(self.v))

    @property
    def signature(self) -> tuple[int, int, int]:
        return (self.u.shape[0], self.u.shape[1], self.v.shape[1])

    def coords(self) -> np.ndarray:
        """Flat coordinates [theta; u columns; v columns]."""
        return np.concatenate([self.theta,
                               self.u.flatten(order="F"),
                               self.v.flatten(order="F")])

    @staticmethod
    def from_coords(coords: np.ndarray, signature: tuple[int, int, int]
                    ) -> "TfgTangent":
        d, n, m = signature
        q = so_dim(d)
        coords = np.asarray(coords, dtype=float).reshape(-1)
        if coords.shape[0] != q + d * (n + m):
            raise ValueError("tangent coordinate length does not match signature")
        theta = coords[:q]
        u = coords[q:q + d * n].reshape((d, n), order="F")
        v = coords[q + d * n:].reshape((d, m), order="F")
        return TfgTangent(theta, u, v)


def tangent_dim(signature: tuple[int, int, int]) -> int:
    d, n, m = signature
    return so_dim(d) + d * (n + m)


def tfg_identity(d: int, n: int, m: int) -> TfgElement:
    return TfgElement(np.eye(d), np.zeros((d, n)), np.zeros((d, m)))


def _check_signature(a: TfgElement, b: TfgElement) -> None:
    if a.signature != b.signature:
        raise SignatureMismatchError(
            f"signature mismatch: {a.signature} vs {b.signature}")


def tfg_compose(a: TfgElement, b: TfgElement) -> TfgElement:
    """Group product; matches the matrix product of the embeddings."""
    _check_signature(a, b)
    rot = a.rot @ b.rot
    world = a.world + a.rot @ b.world
    body = b.rot.T @ a.body + b.body
    return TfgElement(rot, world, body)


def tfg_inverse(a: TfgElement) -> TfgElement:
    return TfgElement(a.rot.T, -a.rot.T @ a.world, -a.rot @ a.body)


def tfg_embed(a: TfgElement) -> np.ndarray:
    d, n, m = a.signature
    size = d + n + m
    out = np.eye(size)
    out[:d, :d] = a.rot
    out[:d, d:] = a.r_block
    return out


def tfg_from_embedding(mat: np.ndarray, signature: tuple[int, int, int]
                       ) -> TfgElement:
    """Split an embedding into (R, x, y), solving R y = (second r block)."""
    d, n, m = signature
    mat = np.asarray(mat, dtype=float)
    if mat.shape != (d + n + m, d + n + m):
        raise ValueError(f"embedding has wrong shape {mat.shape}")
    rot = mat[:d, :d]
    world = mat[:d, d:d + n]
    body = np.linalg.solve(rot, mat[:d, d + n:])
    return TfgElement(rot, world, body)


def tfg_algebra_embed(xi: TfgTangent) -> np.ndarray:
    d, n, m = xi.signature
    size = d + n + m
    out = np.zeros((size, size))
    out[:d, :d] = hat(xi.theta, d)
    out[:d, d:d + n] = xi.u
    out[:d, d + n:] = xi.v
    return out


def tfg_exp(xi: TfgTangent) -> TfgElement:
    """Closed-form exponential: R = exp(theta), x = Gamma_1 u, y = R^-1 Gamma_1 v."""
    d, n, m = xi.signature
    rot = so_exp(xi.theta, d)
    g1 = gamma(1, xi.theta, d)
    world = g1 @ xi.u
    body = rot.T @ (g1 @ xi.v)
    return TfgElement(rot, world, body)


def tfg_log(a: TfgElement) -> TfgTangent:
    """Inverse of tfg_exp on its principal domain (Gamma_1 inverted by solve)."""
    d, n, m = a.signature
    theta = so_log(a.rot)
    g1 = gamma(1, theta, d)
    u = np.linalg.solve(g1, a.world)
    v = np.linalg.solve(g1, a.rot @ a.body)
    return TfgTangent(theta, u, v)


def _rotation_action(rot: np.ndarray) -> np.ndarray:
    """Matrix Q with hat(Q theta) = R hat(theta) R^T, acting on so(d) coords."""
    d = rot.shape[0]
    q = so_dim(d)
    out = np.empty((q, q))
    for k in range(q):
        e_k = np.zeros(q)
        e_k[k] = 1.0
        out[:, k] = vee(rot @ hat(e_k, d) @ rot.T, tol=np.inf)
    return out


def tfg_adjoint(a: TfgElement) -> np.ndarray:
    """Adjoint as a matrix on tangent coordinates [theta; u cols; v cols].

    Closed form of embed(a) . algebra . embed(a)^-1:
        theta' = Q theta,   w' = R w - hat(Q theta) r
    with Q the rotation action on so(d) coordinates and w = [u, v].
    """
    d, n, m = a.signature
    q = so_dim(d)
    r = a.r_block
    rot_q = _rotation_action(a.rot)
    dim = q + d * (n + m)
    out = np.zeros((dim, dim))
    out[:q, :q] = rot_q
    for k in range(n + m):
        rows = slice(q + k * d, q + (k + 1) * d)
        lever = np.empty((d, q))
        for l in range(q):
            lever[:, l] = hat(rot_q[:, l], d) @ r[:, k]
        out[rows, :q] = -lever
        out[rows, q + k * d:q + (k + 1) * d] = a.rot
    return out


@dataclass(frozen=True)
class SimElement:
    """Element of SIM_{n+m}(d): the automorphism group of TFG(d, n, m)."""

    omega: np.ndarray  # (d, d) rotation
    rho: np.ndarray    # (d, n+m)
    scale: np.ndarray  # (n+m, n+m) invertible

    def __post_init__(self):
        object.__setattr__(self, "omega", _frozen(self.omega))
        object.__setattr__(self, "rho", _frozen(self.rho))
        object.__setattr__(self, "scale", _frozen(self.scale))
        if abs(np.linalg.det(self.scale)) <= 1e-12:
            raise ValueError("SIM scale block must be invertible")

    @property
    def d(self) -> int:
        return self.omega.shape[0]

    def matrix(self) -> np.ndarray:
        d = self.d
        k = self.scale.shape[0]
        out = np.zeros((d + k, d + k))
        out[:d, :d] = self.omega
        out[:d, d:] = self.rho
        out[d:, d:] = self.scale
        return out

    def inverse_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.matrix())


def sim_identity(d: int, k: int) -> SimElement:
    return SimElement(np.eye(d), np.zeros((d, k)), np.eye(k))


def sim_conjugate(s: SimElement, a: TfgElement) -> TfgElement:
    """Apply the automorphism T -> S T S^-1.

    Closed form: R' = Omega R Omega^T, r' = (Omega r + rho - R' rho) A^-1.
    """
    d, n, m = a.signature
    rot = s.omega @ a.rot @ s.omega.T
    r_new = np.linalg.solve(
        s.scale.T, (s.omega @ a.r_block + s.rho - rot @ s.rho).T).T
    world = r_new[:, :n]
    body = rot.T @ r_new[:, n:]
    return TfgElement(rot, world, body)


@dataclass(frozen=True)
class SimTangent:
    """Element of sim_{n+m}(d): blocks (theta, gamma, L) of [[hat(theta), gamma], [0, L]]."""

    theta: np.ndarray  # (d(d-1)/2,)
    gam: np.ndarray    # (d, n+m)
    lower: np.ndarray  # (n+m, n+m)

    def __post_init__(self):
        object.__setattr__(self, "theta",
                           _frozen(np.reshape(self.theta, (-1,))))
        object.__setattr__(self, "gam", _frozen(self.gam))
        object.__setattr__(self, "lower", _frozen(self.lower))

    @property
    def d(self) -> int:
        return self.gam.shape[0]

    def matrix(self) -> np.ndarray:
        d = self.d
        k = self.lower.shape[0]
        out = np.zeros((d + k, d + k))
        out[:d, :d] = hat(self.theta, d)
        out[:d, d:] = self.gam
        out[d:, d:] = self.lower
        return out

    def __sub__(self, other: "SimTangent") -> "SimTangent":
        return SimTangent(self.theta - other.theta, self.gam - other.gam,
                          self.lower - other.lower)
