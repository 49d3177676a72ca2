"""Group-affine dynamics on multi-frame groups.

A group-affine flow factors as chi(t) = S chi(0) W with S an automorphism
trajectory and W = S^-1 Phi(id); both are block diagonal with
SIM_{n+m}(d)-valued blocks whose lower-right factors are mutually inverse.
Writing their left/right logarithmic derivatives as sim-algebra blocks
gives, per accumulated diagonal block B_i,

    dB_i/dt = S_i B_i + B_i W_i .

A DynamicsSpec collects the free input-dependent components of those
blocks; every admissible system is obtained this way, and the checker
group_affine_residual verifies the affine identity

    f(ab) - f(a)b - a f(b) + a f(id) b = 0

on the embedding for any candidate vector field f.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import InvalidSpecError
from .multiframe import MfgElement, from_accumulated, mfg_identity
from .rotations import hat, so_dim
from .twoframe import SimTangent, tfg_embed, tfg_from_embedding

InputFn = Callable[[np.ndarray], np.ndarray]


def _as_fn(value, shape: tuple[int, ...]) -> InputFn:
    """Normalize a constant array or a callable of the input into a callable."""
    if callable(value):
        def wrapped(u, fn=value, shape=shape):
            out = np.asarray(fn(u), dtype=float).reshape(shape)
            return out
        return wrapped
    const = np.asarray(value, dtype=float).reshape(shape)

    def const_fn(u, c=const):
        return c
    return const_fn


@dataclass(frozen=True)
class DynamicsSpec:
    """Free components of one group-affine system on MFG(d, n, m, s, t).

    Each entry is a constant array or a callable of the control input.
    Lists are indexed by chain position: l_theta/l_gamma/l_L run j = 0..s,
    r_omega/r_rho/r_L run j = 0..t, and the cross terms l_omega/l_rho
    (j = 1..s) and r_theta/r_gamma (j = 1..t) start at 1.  The core
    lower-right blocks are constrained by r_L[0] = -l_L[0]; passing
    r_L0=None fills it in automatically.
    """

    signature: tuple[int, int, int, int, int]
    l_theta: tuple[InputFn, ...]
    l_gamma: tuple[InputFn, ...]
    l_L: tuple[InputFn, ...]
    r_omega: tuple[InputFn, ...]
    r_rho: tuple[InputFn, ...]
    r_L: tuple[InputFn, ...]
    l_omega: tuple[InputFn, ...]
    l_rho: tuple[InputFn, ...]
    r_theta: tuple[InputFn, ...]
    r_gamma: tuple[InputFn, ...]

    @staticmethod
    def build(signature, *, l_theta, l_gamma, l_L, r_omega, r_rho,
              r_L0=None, r_L=(), l_omega=(), l_rho=(), r_theta=(),
              r_gamma=()) -> "DynamicsSpec":
        d, n, m, s, t = signature
        q = so_dim(d)
        k = n + m

        def norm(seq, count, shape, name):
            seq = list(seq)
            if len(seq) != count:
                raise InvalidSpecError(
                    f"{name} must have {count} entries, got {len(seq)}")
            return tuple(_as_fn(v, shape) for v in seq)

        l_L = norm(l_L, s + 1, (k, k), "l_L")
        r_L_tail = norm(r_L, t, (k, k), "r_L") if t else ()
        if r_L0 is None:
            core_l_L = l_L[0]
            r_L0_fn = _as_fn(lambda u, f=core_l_L: -f(u), (k, k))
        else:
            r_L0_fn = _as_fn(r_L0, (k, k))
        return DynamicsSpec(
            signature=tuple(signature),
            l_theta=norm(l_theta, s + 1, (q,), "l_theta"),
            l_gamma=norm(l_gamma, s + 1, (d, k), "l_gamma"),
            l_L=l_L,
            r_omega=norm(r_omega, t + 1, (q,), "r_omega"),
            r_rho=norm(r_rho, t + 1, (d, k), "r_rho"),
            r_L=(r_L0_fn,) + r_L_tail,
            l_omega=norm(l_omega, s, (q,), "l_omega"),
            l_rho=norm(l_rho, s, (d, k), "l_rho"),
            r_theta=norm(r_theta, t, (q,), "r_theta"),
            r_gamma=norm(r_gamma, t, (d, k), "r_gamma"),
        )

    def eval(self, u: np.ndarray) -> "SpecValues":
        vals = SpecValues(
            l_theta=[f(u) for f in self.l_theta],
            l_gamma=[f(u) for f in self.l_gamma],
            l_L=[f(u) for f in self.l_L],
            r_omega=[f(u) for f in self.r_omega],
            r_rho=[f(u) for f in self.r_rho],
            r_L=[f(u) for f in self.r_L],
            l_omega=[f(u) for f in self.l_omega],
            l_rho=[f(u) for f in self.l_rho],
            r_theta=[f(u) for f in self.r_theta],
            r_gamma=[f(u) for f in self.r_gamma],
        )
        if np.linalg.norm(vals.l_L[0] + vals.r_L[0]) > 1e-12:
            raise InvalidSpecError(
                "core lower-right blocks must satisfy l_L0 = -r_L0")
        return vals


@dataclass
class SpecValues:
    l_theta: list
    l_gamma: list
    l_L: list
    r_omega: list
    r_rho: list
    r_L: list
    l_omega: list
    l_rho: list
    r_theta: list
    r_gamma: list


@dataclass(frozen=True)
class MfgVelocity:
    """Left/right sim-algebra blocks (S_i, W_i), ordered core, left 1..s, right 1..t.

    Paired blocks must carry opposite lower-right L factors (the group-level
    blocks are mutually inverse), which is checked at construction.
    """

    s_blocks: tuple[SimTangent, ...]
    w_blocks: tuple[SimTangent, ...]

    def __post_init__(self):
        object.__setattr__(self, "s_blocks", tuple(self.s_blocks))
        object.__setattr__(self, "w_blocks", tuple(self.w_blocks))
        if len(self.s_blocks) != len(self.w_blocks):
            raise InvalidSpecError("S and W must have the same block count")
        for s_blk, w_blk in zip(self.s_blocks, self.w_blocks):
            if np.linalg.norm(s_blk.lower + w_blk.lower) > 1e-9:
                raise InvalidSpecError(
                    "paired velocity blocks must have opposite L blocks")

    def __len__(self) -> int:
        return len(self.s_blocks)


def assemble_velocity(spec: DynamicsSpec, u: np.ndarray) -> MfgVelocity:
    """Evaluate a spec at input u and assemble the (S, W) velocity blocks.

    Chain W (left) and S (right) blocks are reconstructed from the free
    difference components as running sums starting from the core blocks.
    """
    d, n, m, s, t = spec.signature
    vals = spec.eval(u)
    s_blocks = [SimTangent(vals.l_theta[0], vals.l_gamma[0], vals.l_L[0])]
    w_blocks = [SimTangent(vals.r_omega[0], vals.r_rho[0], vals.r_L[0])]

    th = vals.r_omega[0].copy()
    ga = vals.r_rho[0].copy()
    for j in range(1, s + 1):
        s_blocks.append(SimTangent(vals.l_theta[j], vals.l_gamma[j], vals.l_L[j]))
        th = th + vals.l_omega[j - 1]
        ga = ga + vals.l_rho[j - 1]
        w_blocks.append(SimTangent(th, ga, -vals.l_L[j]))

    th = vals.l_theta[0].copy()
    ga = vals.l_gamma[0].copy()
    for j in range(1, t + 1):
        th = th + vals.r_theta[j - 1]
        ga = ga + vals.r_gamma[j - 1]
        s_blocks.append(SimTangent(th, ga, -vals.r_L[j]))
        w_blocks.append(SimTangent(vals.r_omega[j], vals.r_rho[j], vals.r_L[j]))

    return MfgVelocity(tuple(s_blocks), tuple(w_blocks))


def block_ode_rhs(vel: MfgVelocity, chi: MfgElement) -> list[np.ndarray]:
    """Time derivative of every two-frame factor, in the embedding.

    Core:    dT0   = S0 T0 + T0 W0
    Left j:  dlT_j = S_j lT_j + lT_j (Ad_{lacc_{j-1}} Wbar_j - S_{j-1})
    Right j: drT_j = (Ad^-1_{racc_{j-1}} Sbar_j - W_{j-1}) rT_j + rT_j W_j

    with Wbar/Sbar the consecutive differences of the chain blocks and
    lacc/racc the accumulated products up to j-1.
    """
    d, n, m, s, t = chi.signature
    acc = [tfg_embed(blk) for blk in chi.accumulated()]
    core_e = acc[0]
    out = [vel.s_blocks[0].matrix() @ core_e + core_e @ vel.w_blocks[0].matrix()]

    for j in range(1, s + 1):
        factor_e = tfg_embed(chi.left[j - 1])
        s_j = vel.s_blocks[j].matrix()
        s_prev = vel.s_blocks[j - 1].matrix() if j > 1 else vel.s_blocks[0].matrix()
        w_bar = (vel.w_blocks[j].matrix()
                 - (vel.w_blocks[j - 1].matrix() if j > 1
                    else vel.w_blocks[0].matrix()))
        acc_prev = acc[j - 1]
        coeff = acc_prev @ w_bar @ np.linalg.inv(acc_prev) - s_prev
        out.append(s_j @ factor_e + factor_e @ coeff)

    for j in range(1, t + 1):
        factor_e = tfg_embed(chi.right[j - 1])
        w_j = vel.w_blocks[s + j].matrix()
        w_prev = (vel.w_blocks[s + j - 1].matrix() if j > 1
                  else vel.w_blocks[0].matrix())
        s_bar = (vel.s_blocks[s + j].matrix()
                 - (vel.s_blocks[s + j - 1].matrix() if j > 1
                    else vel.s_blocks[0].matrix()))
        acc_prev = acc[s + j - 1] if j > 1 else acc[0]
        coeff = np.linalg.inv(acc_prev) @ s_bar @ acc_prev - w_prev
        out.append(coeff @ factor_e + factor_e @ w_j)

    return out


def component_ode_rhs(spec: DynamicsSpec, u: np.ndarray, chi: MfgElement
                      ) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Fully expanded componentwise derivatives (dR, dx, dy) per factor.

    Frame and vector equations are transcribed in terms of the free
    components and accumulated rotation products; dy is recovered from the
    derivative of r = [x, R y].  The factor's own lower-right coupling in
    the left-chain vector equation is -lr_j lL_j (equivalently the k = j
    term of the coupling sum), which is what the block-level equations
    produce.
    """
    d, n, m, s, t = chi.signature
    vals = spec.eval(u)

    core_rot = chi.core.rot
    core_r = chi.core.r_block
    l_rot = [core_rot] + [blk.rot for blk in chi.left]
    l_r = [core_r] + [blk.r_block for blk in chi.left]
    r_rot = [core_rot] + [blk.rot for blk in chi.right]
    r_r = [core_r] + [blk.r_block for blk in chi.right]

    def l_rbar(i: int, k: int) -> np.ndarray:
        # lR_i lR_{i-1} ... lR_k  (i >= k); empty product is identity
        out = np.eye(d)
        for idx in range(i, k - 1, -1):
            out = out @ l_rot[idx]
        return out

    def r_rbar(k: int, i: int) -> np.ndarray:
        # rR_k rR_{k+1} ... rR_i  (k <= i); empty product is identity
        out = np.eye(d)
        for idx in range(k, i + 1):
            out = out @ r_rot[idx]
        return out

    results = []

    lth0 = hat(vals.l_theta[0], d)
    rom0 = hat(vals.r_omega[0], d)
    d_rot0 = lth0 @ core_rot + core_rot @ rom0
    d_r0 = lth0 @ core_r + vals.l_gamma[0] + core_rot @ vals.r_rho[0] \
        + core_r @ vals.r_L[0]
    results.append(_split_vector_rate(chi.core, d_rot0, d_r0))

    for j in range(1, s + 1):
        rot_j = l_rot[j]
        r_j = l_r[j]
        th_j = hat(vals.l_theta[j], d)
        th_prev = hat(vals.l_theta[j - 1], d)
        om_j = hat(vals.l_omega[j - 1], d)
        lbar = (vals.l_L[j - 1] - vals.l_L[j])
        rbar_prev = l_rbar(j - 1, 0)
        ad_om = rbar_prev @ om_j @ rbar_prev.T
        d_rot = th_j @ rot_j + rot_j @ (ad_om - th_prev)
        d_r = np.zeros((d, n + m))
        for k in range(j):
            ad_k = l_rbar(k, 0)
            d_r += l_rbar(j, k + 1) @ (l_r[k] @ lbar
                                       - (ad_k @ om_j @ ad_k.T) @ l_r[k])
        d_r = d_r + vals.l_gamma[j] + l_rbar(j, 0) @ vals.l_rho[j - 1]
        d_r = d_r + th_j @ r_j - rot_j @ vals.l_gamma[j - 1] - r_j @ vals.l_L[j]
        results.append(_split_vector_rate(chi.left[j - 1], d_rot, d_r))

    for j in range(1, t + 1):
        rot_j = r_rot[j]
        r_j = r_r[j]
        th_j = hat(vals.r_theta[j - 1], d)
        om_j = hat(vals.r_omega[j], d)
        om_prev = hat(vals.r_omega[j - 1], d)
        lbar = (vals.r_L[j - 1] - vals.r_L[j])
        rbar_prev = r_rbar(0, j - 1)
        adinv_prev = rbar_prev.T @ th_j @ rbar_prev
        d_rot = (adinv_prev - om_prev) @ rot_j + rot_j @ om_j
        d_r = rbar_prev.T @ th_j @ r_r[0]
        for k in range(1, j):
            ad_k = r_rbar(0, k - 1)
            d_r += r_rbar(k, j - 1).T @ (ad_k.T @ th_j @ ad_k) @ r_r[k]
        d_r += adinv_prev @ r_j
        d_r -= vals.r_rho[j - 1]
        for k in range(j):
            d_r -= r_rbar(k, j - 1).T @ r_r[k] @ lbar
        d_r += rot_j @ vals.r_rho[j] + r_j @ vals.r_L[j] - om_prev @ r_j
        d_r += rbar_prev.T @ vals.r_gamma[j - 1]
        results.append(_split_vector_rate(chi.right[j - 1], d_rot, d_r))

    return results


def _split_vector_rate(factor, d_rot: np.ndarray, d_r: np.ndarray
                       ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Convert (dR, dr) into (dR, dx, dy) using r = [x, R y]."""
    d, n, m = factor.signature
    d_x = d_r[:, :n]
    d_y = np.linalg.solve(factor.rot, d_r[:, n:] - d_rot @ factor.body)
    return d_rot, d_x, d_y


def exact_flow_step(vel: MfgVelocity, chi: MfgElement, dt: float) -> MfgElement:
    """Advance chi by dt under a piecewise-constant velocity.

    Each accumulated block evolves exactly as
    B <- exp(dt S_i) B exp(dt W_i); factors are re-extracted afterwards.
    """
    d, n, m, s, t = chi.signature
    blocks = []
    for s_blk, w_blk, acc in zip(vel.s_blocks, vel.w_blocks, chi.accumulated()):
        left = scipy.linalg.expm(dt * s_blk.matrix())
        right = scipy.linalg.expm(dt * w_blk.matrix())
        blocks.append(tfg_from_embedding(left @ tfg_embed(acc) @ right,
                                         (d, n, m)))
    return from_accumulated(blocks, s, t)


def embedding_field(vel: MfgVelocity):
    """The vector field chi -> d(embed(chi))/dt as a block-diagonal matrix."""
    def field(chi: MfgElement) -> np.ndarray:
        blocks = []
        for s_blk, w_blk, acc in zip(vel.s_blocks, vel.w_blocks,
                                     chi.accumulated()):
            acc_e = tfg_embed(acc)
            blocks.append(s_blk.matrix() @ acc_e + acc_e @ w_blk.matrix())
        return scipy.linalg.block_diag(*blocks)
    return field


def group_affine_residual(field, chi1: MfgElement, chi2: MfgElement) -> float:
    """Frobenius norm of f(ab) - f(a)b - a f(b) + a f(id) b on the embedding.

    Zero (to roundoff) exactly for group-affine fields; the field callable
    maps an MfgElement to the derivative of its embedding.
    """
    from .multiframe import mfg_compose, mfg_embed

    sig = chi1.signature
    ident = mfg_identity(*sig)
    e1 = mfg_embed(chi1)
    e2 = mfg_embed(chi2)
    resid = (field(mfg_compose(chi1, chi2))
             - field(chi1) @ e2
             - e1 @ field(chi2)
             + e1 @ field(ident) @ e2)
    return float(np.linalg.norm(resid))


def integrate(spec: DynamicsSpec, u_fn: Callable[[float], np.ndarray],
              chi0: MfgElement, horizon: float, dt: float
              ) -> list[tuple[float, MfgElement]]:
    """Zero-order-hold integration with the exact blockwise flow."""
    steps = int(round(horizon / dt))
    out = [(0.0, chi0)]
    chi = chi0
    for k in range(steps):
        t = k * dt
        vel = assemble_velocity(spec, u_fn(t))
        chi = exact_flow_step(vel, chi, dt)
        out.append(((k + 1) * dt, chi))
    return out


def error_autonomy_check(spec: DynamicsSpec,
                         u_fn: Callable[[float], np.ndarray],
                         chi_a: MfgElement, chi_b: MfgElement,
                         horizon: float, dt: float,
                         chi_c: MfgElement | None = None) -> float:
    """Max deviation between left-invariant error trajectories.

    Integrates (chi_a, chi_b) and a second pair starting from chi_c with
    the same initial error eta(0) = chi_a^-1 chi_b; for group-affine
    dynamics eta(t) depends only on eta(0) and the inputs, so the two
    error trajectories must coincide.
    """
    from .multiframe import mfg_compose, mfg_embed, mfg_inverse

    if chi_c is None:
        chi_c = chi_b
    eta0 = mfg_compose(mfg_inverse(chi_a), chi_b)
    chi_d = mfg_compose(chi_c, eta0)

    states = [chi_a, chi_b, chi_c, chi_d]
    steps = int(round(horizon / dt))
    worst = 0.0
    for k in range(steps):
        vel = assemble_velocity(spec, u_fn(k * dt))
        states = [exact_flow_step(vel, s, dt) for s in states]
        eta_ab = mfg_compose(mfg_inverse(states[0]), states[1])
        eta_cd = mfg_compose(mfg_inverse(states[2]), states[3])
        worst = max(worst, float(np.linalg.norm(mfg_embed(eta_ab)
                                                - mfg_embed(eta_cd))))
    return worst
