"""Shared random generators for the test suite."""

import numpy as np

from framegroups.dynamics import DynamicsSpec
from framegroups.multiframe import MfgElement
from framegroups.rotations import so_dim
from framegroups.twoframe import SimElement, TfgElement, TfgTangent


def rand_rot(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def rand_tfg(rng, sig):
    d, n, m = sig
    return TfgElement(rand_rot(rng, d), rng.normal(size=(d, n)),
                      rng.normal(size=(d, m)))


def rand_tfg_tangent(rng, sig, angle_scale=1.0):
    d, n, m = sig
    theta = rng.normal(size=so_dim(d))
    norm = np.linalg.norm(theta)
    if norm > 0:
        theta *= angle_scale * rng.uniform(0.1, 1.0) / norm
    return TfgTangent(theta, rng.normal(size=(d, n)), rng.normal(size=(d, m)))


def rand_sim(rng, sig):
    d, n, m = sig
    k = n + m
    return SimElement(rand_rot(rng, d), rng.normal(size=(d, k)),
                      rng.normal(size=(k, k)) + 3.0 * np.eye(k))


def rand_mfg(rng, sig):
    d, n, m, s, t = sig
    return MfgElement(rand_tfg(rng, (d, n, m)),
                      tuple(rand_tfg(rng, (d, n, m)) for _ in range(s)),
                      tuple(rand_tfg(rng, (d, n, m)) for _ in range(t)))


def rand_spec(rng, sig, input_dim=3, linear_in_u=False):
    """A random admissible dynamics spec (constant or linear-in-input)."""
    d, n, m, s, t = sig
    q = so_dim(d)
    k = n + m

    def gen(shape):
        if linear_in_u:
            coef = rng.normal(size=shape + (input_dim,))
            return lambda u, c=coef: c @ np.asarray(u, dtype=float)
        return rng.normal(size=shape)

    return DynamicsSpec.build(
        sig,
        l_theta=[gen((q,)) for _ in range(s + 1)],
        l_gamma=[gen((d, k)) for _ in range(s + 1)],
        l_L=[gen((k, k)) for _ in range(s + 1)],
        r_omega=[gen((q,)) for _ in range(t + 1)],
        r_rho=[gen((d, k)) for _ in range(t + 1)],
        r_L=[gen((k, k)) for _ in range(t)],
        l_omega=[gen((q,)) for _ in range(s)],
        l_rho=[gen((d, k)) for _ in range(s)],
        r_theta=[gen((q,)) for _ in range(t)],
        r_gamma=[gen((d, k)) for _ in range(t)],
    )
