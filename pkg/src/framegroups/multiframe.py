"""The multi-frame group MFG(d, n, m, s, t).

An element is a core two-frame transform T0 together with s left-chain and
t right-chain two-frame factors.  Its matrix embedding is block diagonal
with accumulated products as blocks:

    diag( T0,  lT1 T0,  lT2 lT1 T0, ...,  T0 rT1,  T0 rT1 rT2, ... )

so the group product, inverse, exponential and automorphisms all act
blockwise on the accumulated blocks; factors are recovered by dividing
consecutive blocks.  Factor elements (not accumulated products) are what we
store, since the dynamics ODEs and the error-update formulas are stated in
factor components.

Tangent vectors hold one TfgTangent per accumulated block, ordered
(core, left 1..s, right 1..t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SignatureMismatchError
from .twoframe import (SimElement, TfgElement, TfgTangent, sim_conjugate,
                       tangent_dim, tfg_compose, tfg_embed,
                       tfg_from_embedding, tfg_identity, tfg_inverse,
                       tfg_exp, tfg_log)


@dataclass(frozen=True)
class MfgElement:
    """Element of MFG(d, n, m, s, t): core plus left/right chains of factors."""

    core: TfgElement
    left: tuple[TfgElement, ...] = ()
    right: tuple[TfgElement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        sig = self.core.signature
        for blk in (*self.left, *self.right):
            if blk.signature != sig:
                raise SignatureMismatchError(
                    "all chain blocks must share the core signature")

    @property
    def signature(self) -> tuple[int, int, int, int, int]:
        d, n, m = self.core.signature
        return (d, n, m, len(self.left), len(self.right))

    def accumulated(self) -> list[TfgElement]:
        """Diagonal blocks of the embedding: core, left-accumulated, right-accumulated."""
        blocks = [self.core]
        acc = self.core
        for factor in self.left:
            acc = tfg_compose(factor, acc)
            blocks.append(acc)
        acc = self.core
        for factor in self.right:
            acc = tfg_compose(acc, factor)
            blocks.append(acc)
        return blocks

    def validate(self, tol: float = 1e-10) -> None:
        for blk in (self.core, *self.left, *self.right):
            blk.validate(tol)


@dataclass(frozen=True)
class MfgTangent:
    """Lie algebra element: one TfgTangent per accumulated block."""

    blocks: tuple[TfgTangent, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def coords(self) -> np.ndarray:
        return np.concatenate([b.coords() for b in self.blocks])

    @staticmethod
    def from_coords(coords: np.ndarray,
                    signature: tuple[int, int, int, int, int]) -> "MfgTangent":
        d, n, m, s, t = signature
        block_dim = tangent_dim((d, n, m))
        coords = np.asarray(coords, dtype=float).reshape(-1)
        if coords.shape[0] != (s + t + 1) * block_dim:
            raise ValueError("tangent coordinate length does not match signature")
        blocks = [TfgTangent.from_coords(coords[i * block_dim:(i + 1) * block_dim],
                                         (d, n, m))
                  for i in range(s + t + 1)]
        return MfgTangent(tuple(blocks))


def mfg_tangent_dim(signature: tuple[int, int, int, int, int]) -> int:
    d, n, m, s, t = signature
    return (s + t + 1) * tangent_dim((d, n, m))


def mfg_identity(d: int, n: int, m: int, s: int, t: int) -> MfgElement:
    eye = tfg_identity(d, n, m)
    return MfgElement(eye, (eye,) * s, (eye,) * t)


def from_accumulated(blocks: list[TfgElement], s: int, t: int) -> MfgElement:
    """Rebuild factors from accumulated diagonal blocks."""
    if len(blocks) != s + t + 1:
        raise ValueError(f"expected {s + t + 1} blocks, got {len(blocks)}")
    core = blocks[0]
    left = []
    prev = core
    for j in range(1, s + 1):
        left.append(tfg_compose(blocks[j], tfg_inverse(prev)))
        prev = blocks[j]
    right = []
    prev = core
    for j in range(1, t + 1):
        right.append(tfg_compose(tfg_inverse(prev), blocks[s + j]))
        prev = blocks[s + j]
    return MfgElement(core, tuple(left), tuple(right))


def _check_signature(a: MfgElement, b: MfgElement) -> None:
    if a.signature != b.signature:
        raise SignatureMismatchError(
            f"signature mismatch: {a.signature} vs {b.signature}")


def mfg_compose(a: MfgElement, b: MfgElement) -> MfgElement:
    _check_signature(a, b)
    _, _, _, s, t = a.signature
    blocks = [tfg_compose(x, y) for x, y in zip(a.accumulated(), b.accumulated())]
    return from_accumulated(blocks, s, t)


def mfg_inverse(a: MfgElement) -> MfgElement:
    _, _, _, s, t = a.signature
    return from_accumulated([tfg_inverse(blk) for blk in a.accumulated()], s, t)


def mfg_embed(a: MfgElement) -> np.ndarray:
    return scipy.linalg.block_diag(*[tfg_embed(blk) for blk in a.accumulated()])


def mfg_from_embedding(mat: np.ndarray,
                       signature: tuple[int, int, int, int, int]) -> MfgElement:
    d, n, m, s, t = signature
    size = d + n + m
    blocks = [tfg_from_embedding(mat[i * size:(i + 1) * size,
                                     i * size:(i + 1) * size], (d, n, m))
              for i in range(s + t + 1)]
    return from_accumulated(blocks, s, t)


def mfg_exp(xi: MfgTangent, s: int, t: int) -> MfgElement:
    blocks = [tfg_exp(b) for b in xi.blocks]
    return from_accumulated(blocks, s, t)


def mfg_log(a: MfgElement) -> MfgTangent:
    return MfgTangent(tuple(tfg_log(blk) for blk in a.accumulated()))


@dataclass(frozen=True)
class MfgAutomorphism:
    """Automorphism of MFG: conjugation by diag(S_1, ..., S_{s+t+1}), S_i in SIM."""

    blocks: tuple[SimElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))


def mfg_aut_apply(aut: MfgAutomorphism, a: MfgElement) -> MfgElement:
    _, _, _, s, t = a.signature
    acc = a.accumulated()
    if len(aut.blocks) != len(acc):
        raise SignatureMismatchError(
            f"automorphism has {len(aut.blocks)} blocks, element needs {len(acc)}")
    return from_accumulated([sim_conjugate(sim, blk)
                             for sim, blk in zip(aut.blocks, acc)], s, t)


def _conjugate(g: TfgElement, z: TfgElement) -> TfgElement:
    return tfg_compose(tfg_compose(g, z), tfg_inverse(g))


def left_error_recover(estimate: MfgElement, delta: MfgElement) -> MfgElement:
    """True state chi with delta = chi^-1 . estimate.

    delta enters through the diagonal blocks of its embedding (the
    accumulated blocks).  Componentwise, with D_i those blocks:

        T0   = T0_hat . D0^-1
        rT_j = D_{j-1} . rT_hat_j . D_j^-1
        lT_j = lT_hat_j . C_{lacc_hat_{j-1}}[ D_j^-1 . D_{j-1} ]

    where C_g is conjugation by g and lacc_hat_{j-1} is the estimate's
    accumulated left block (the composition of the nested conjugations by
    lT_hat_{j-1}, ..., T0_hat).
    """
    _check_signature(estimate, delta)
    _, _, _, s, t = estimate.signature
    d_blocks = delta.accumulated()
    est_acc = estimate.accumulated()

    core = tfg_compose(estimate.core, tfg_inverse(d_blocks[0]))
    left = []
    for j in range(1, s + 1):
        prev = d_blocks[j - 1] if j > 1 else d_blocks[0]
        inner = tfg_compose(tfg_inverse(d_blocks[j]), prev)
        left.append(tfg_compose(estimate.left[j - 1],
                                _conjugate(est_acc[j - 1], inner)))
    right = []
    for j in range(1, t + 1):
        prev = d_blocks[s + j - 1] if j > 1 else d_blocks[0]
        right.append(tfg_compose(tfg_compose(prev, estimate.right[j - 1]),
                                 tfg_inverse(d_blocks[s + j])))
    return MfgElement(core, tuple(left), tuple(right))


def right_error_recover(estimate: MfgElement, delta: MfgElement) -> MfgElement:
    """True state chi with delta = estimate . chi^-1.

    Mirror of the left-invariant case, derived from the accumulated-block
    relation acc_i(chi) = D_i^-1 . acc_i(estimate):

        T0   = D0^-1 . T0_hat
        lT_j = D_j^-1 . lT_hat_j . D_{j-1}
        rT_j = C_{racc_hat_{j-1}^-1}[ D_{j-1} . D_j^-1 ] . rT_hat_j
    """
    _check_signature(estimate, delta)
    _, _, _, s, t = estimate.signature
    d_blocks = delta.accumulated()
    est_acc = estimate.accumulated()

    core = tfg_compose(tfg_inverse(d_blocks[0]), estimate.core)
    left = []
    for j in range(1, s + 1):
        prev = d_blocks[j - 1] if j > 1 else d_blocks[0]
        left.append(tfg_compose(tfg_inverse(d_blocks[j]),
                                tfg_compose(estimate.left[j - 1], prev)))
    right = []
    for j in range(1, t + 1):
        prev_d = d_blocks[s + j - 1] if j > 1 else d_blocks[0]
        prev_acc = est_acc[s + j - 1] if j > 1 else est_acc[0]
        inner = tfg_compose(prev_d, tfg_inverse(d_blocks[s + j]))
        right.append(tfg_compose(_conjugate(tfg_inverse(prev_acc), inner),
                                 estimate.right[j - 1]))
    return MfgElement(core, tuple(left), tuple(right))
