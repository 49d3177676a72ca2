"""Algebraic observations on multi-frame groups.

An observation picks one diagonal block of the state embedding (core, a
left-accumulated or a right-accumulated product), twists it by a constant
SIM automorphism, and acts on a constant vector from the left (the block
itself) or the right (its inverse).  Only the first d rows of the acted
vector are exposed as the measurement; the classification gives closed
forms for all six (side x chain) cases in terms of accumulated rotations
and translations.

The innovation Jacobian here is the linearization the matched invariant
filter consumes: the finite-difference derivative of the frame-aligned
innovation with respect to exponential error coordinates.  Under the
matched convention (left action with left-invariant error, right action
with right-invariant error) it is state independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError
from .multiframe import (MfgElement, MfgTangent, mfg_compose, mfg_exp,
                         mfg_tangent_dim)
from .twoframe import SimElement, TfgElement, tfg_embed


@dataclass(frozen=True)
class ObservationSpec:
    """One linear-observed output: constants plus block/side selection.

    chain is "core", "left" or "right"; index selects the chain position
    (1-based) and is ignored for the core.  side "left" acts by the block,
    side "right" by its inverse.
    """

    side: str
    chain: str
    index: int
    omega: np.ndarray      # (d, d) constant rotation
    rho: np.ndarray        # (d, n+m) constant offset
    d1: np.ndarray         # (d,)
    d2: np.ndarray         # (n+m,)

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise InvalidSpecError(f"side must be left or right, got {self.side}")
        if self.chain not in ("core", "left", "right"):
            raise InvalidSpecError(f"unknown chain {self.chain}")
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=float))
        object.__setattr__(self, "d1",
                           np.asarray(self.d1, dtype=float).reshape(-1))
        object.__setattr__(self, "d2",
                           np.asarray(self.d2, dtype=float).reshape(-1))

    def check_chain(self, chi: MfgElement) -> None:
        _, _, _, s, t = chi.signature
        if self.chain == "left" and not 1 <= self.index <= s:
            raise InvalidSpecError(f"left chain index {self.index} not in [1, {s}]")
        if self.chain == "right" and not 1 <= self.index <= t:
            raise InvalidSpecError(f"right chain index {self.index} not in [1, {t}]")


def twisted_action(s: SimElement, block: TfgElement, vec: np.ndarray,
                   side: str) -> np.ndarray:
    """Left action v -> S T^{+/-1} S^-1 v obtained by twisting the matrix
    action with the automorphism S (sign of the exponent set by side)."""
    mat = tfg_embed(block)
    if side == "right":
        mat = np.linalg.inv(mat)
    elif side != "left":
        raise InvalidSpecError(f"side must be left or right, got {side}")
    return s.matrix() @ mat @ s.inverse_matrix() @ np.asarray(vec, dtype=float)


def _chain_rotations(chi: MfgElement, chain: str, index: int):
    """Per-factor rotations R_0..R_index along the requested chain."""
    rots = [chi.core.rot]
    factors = chi.left if chain == "left" else chi.right
    for j in range(index):
        rots.append(factors[j].rot)
    return rots


def _chain_translations(chi: MfgElement, chain: str, index: int):
    rs = [chi.core.r_block]
    factors = chi.left if chain == "left" else chi.right
    for j in range(index):
        rs.append(factors[j].r_block)
    return rs


def accumulated_rotation(chi: MfgElement, chain: str, index: int) -> np.ndarray:
    """Rotation of the selected diagonal block of the embedding."""
    if chain == "core":
        return chi.core.rot
    rots = _chain_rotations(chi, chain, index)
    if chain == "left":
        out = rots[0]
        for j in range(1, index + 1):
            out = rots[j] @ out
        return out
    out = rots[0]
    for j in range(1, index + 1):
        out = out @ rots[j]
    return out


def accumulated_translation(chi: MfgElement, chain: str, index: int,
                            side: str) -> np.ndarray:
    """The r-like sums of the classification theorem.

    side "left" gives the translation of the accumulated block itself
    (lrbar_j / rrbar_j); side "right" gives the sum whose negative is the
    translation of the inverse block (lrunder_j / rrunder_j).
    """
    d = chi.core.d
    rots = _chain_rotations(chi, chain, index)
    rs = _chain_translations(chi, chain, index)

    def prod_desc(i, k):
        # R_i R_{i-1} ... R_k, empty product identity
        out = np.eye(d)
        for idx in range(i, k - 1, -1):
            out = out @ rots[idx]
        return out

    def prod_asc(k, i):
        out = np.eye(d)
        for idx in range(k, i + 1):
            out = out @ rots[idx]
        return out

    if chain == "core":
        r0 = chi.core.r_block
        return r0 if side == "left" else np.linalg.solve(chi.core.rot, r0)
    if chain == "left":
        if side == "left":
            out = rs[index].copy()
            for k in range(index):
                out += prod_desc(index, k + 1) @ rs[k]
            return out
        out = np.zeros_like(rs[0])
        for k in range(index + 1):
            out += prod_desc(k, 0).T @ rs[k]
        return out
    if side == "left":
        out = rs[0].copy()
        for k in range(1, index + 1):
            out += prod_asc(0, k - 1) @ rs[k]
        return out
    out = np.zeros_like(rs[0])
    for k in range(index + 1):
        out += prod_asc(k, index).T @ rs[k]
    return out


def build_output(spec: ObservationSpec, chi: MfgElement) -> np.ndarray:
    """Evaluate the closed-form measurement (length d).

    Left action:  w = (C_Omega Rbar) d1 + (Omega rbar + rho) d2
    Right action: w = (C_Omega Rbar^-1) d1 + (rho - Omega runder) d2

    with Rbar the accumulated rotation, rbar/runder the accumulated
    translations and C_Omega the conjugation by Omega.
    """
    spec.check_chain(chi)
    idx = 0 if spec.chain == "core" else spec.index
    rbar = accumulated_rotation(chi, spec.chain, idx)
    trans = accumulated_translation(chi, spec.chain, idx, spec.side)
    om = spec.omega
    if spec.side == "left":
        return (om @ rbar @ om.T) @ spec.d1 + (om @ trans + spec.rho) @ spec.d2
    return (om @ rbar.T @ om.T) @ spec.d1 + (spec.rho - om @ trans) @ spec.d2


def observed_block(spec: ObservationSpec, chi: MfgElement) -> TfgElement:
    """The accumulated diagonal block the observation acts through."""
    spec.check_chain(chi)
    if spec.chain == "core":
        return chi.accumulated()[0]
    _, _, _, s, t = chi.signature
    offset = spec.index if spec.chain == "left" else s + spec.index
    return chi.accumulated()[offset]


def alignment_rotation(spec: ObservationSpec, chi: MfgElement) -> np.ndarray:
    """Rotation coefficient of d1 in the closed form; used to frame-align
    innovations before linearizing."""
    idx = 0 if spec.chain == "core" else spec.index
    rbar = accumulated_rotation(chi, spec.chain, idx)
    if spec.side == "right":
        rbar = rbar.T
    return spec.omega @ rbar @ spec.omega.T


def innovation_jacobian(spec: ObservationSpec, chi_hat: MfgElement,
                        error_convention: str, step: float = 1e-6
                        ) -> np.ndarray:
    """Central finite-difference Jacobian of the frame-aligned innovation.

    The state is perturbed through the exponential chart of the chosen
    invariant error (left: chi_hat exp(eps), right: exp(eps) chi_hat) and
    the innovation is pre-multiplied by the inverse alignment rotation at
    chi_hat.  Matched conventions yield a state-independent matrix.
    """
    if error_convention not in ("left", "right"):
        raise InvalidSpecError(
            f"error convention must be left or right, got {error_convention}")
    sig = chi_hat.signature
    _, _, _, s, t = sig
    dim = mfg_tangent_dim(sig)
    align_inv = alignment_rotation(spec, chi_hat).T

    def perturbed(coords: np.ndarray) -> np.ndarray:
        delta = mfg_exp(MfgTangent.from_coords(coords, sig), s, t)
        if error_convention == "left":
            chi = mfg_compose(chi_hat, delta)
        else:
            chi = mfg_compose(delta, chi_hat)
        return build_output(spec, chi)

    d = chi_hat.core.d
    jac = np.empty((d, dim))
    for i in range(dim):
        eps = np.zeros(dim)
        eps[i] = step
        jac[:, i] = align_inv @ (perturbed(eps) - perturbed(-eps)) / (2 * step)
    return jac
