"""Algebraic observations: closed forms vs the dense twisted-action oracle,
action axioms, accumulated translations, innovation Jacobians."""

import numpy as np
import pytest

from framegroups.errors import InvalidSpecError
from framegroups.observations import (ObservationSpec, accumulated_rotation,
                                      accumulated_translation,
                                      alignment_rotation, build_output,
                                      innovation_jacobian, observed_block,
                                      twisted_action)
from framegroups.twoframe import (SimElement, sim_identity, tfg_compose,
                                  tfg_embed, tfg_identity)
from framegroups.multiframe import mfg_identity

from helpers import rand_mfg, rand_rot, rand_sim, rand_tfg

ALL_CASES = [("left", "core", 0), ("left", "left", 1), ("left", "right", 1),
             ("right", "core", 0), ("right", "left", 1), ("right", "right", 1)]


def _rand_obs_spec(rng, side, chain, index, d, k):
    return ObservationSpec(side, chain, index, rand_rot(rng, d),
                           rng.normal(size=(d, k)), rng.normal(size=d),
                           rng.normal(size=k))


def test_twisted_action_axioms():
    rng = np.random.default_rng(0)
    sig = (3, 2, 1)
    ident = tfg_identity(*sig)
    vec = rng.normal(size=6)
    s = rand_sim(rng, sig)
    # identity block acts trivially
    assert np.allclose(twisted_action(s, ident, vec, "left"), vec)
    assert np.allclose(twisted_action(s, ident, vec, "right"), vec)
    # trivial automorphism reduces to the plain matrix action
    s_id = sim_identity(3, 3)
    a = rand_tfg(rng, sig)
    assert np.allclose(twisted_action(s_id, a, vec, "left"),
                       tfg_embed(a) @ vec)
    # composition law of the twisted action
    for side in ("left", "right"):
        for _ in range(50):
            a, b = rand_tfg(rng, sig), rand_tfg(rng, sig)
            ab = tfg_compose(a, b) if side == "left" else tfg_compose(b, a)
            lhs = twisted_action(s, ab, vec, side)
            rhs = twisted_action(s, a, twisted_action(s, b, vec, side), side)
            assert np.linalg.norm(lhs - rhs) < 1e-10


def test_build_output_identity_state():
    sig = (3, 1, 1, 1, 1)
    d, k = 3, 2
    rng = np.random.default_rng(1)
    chi = mfg_identity(*sig)
    d1 = rng.normal(size=d)
    for side, chain, idx in ALL_CASES:
        spec = ObservationSpec(side, chain, idx, np.eye(d), np.zeros((d, k)),
                               d1, rng.normal(size=k))
        # identity state, Omega = I, rho = 0: output is d1 (r = 0)
        assert np.allclose(build_output(spec, chi), d1)


def test_build_output_zero_d2_is_conjugated_rotation():
    rng = np.random.default_rng(2)
    sig = (3, 1, 1, 1, 1)
    chi = rand_mfg(rng, sig)
    for side, chain, idx in ALL_CASES:
        om = rand_rot(rng, 3)
        d1 = rng.normal(size=3)
        spec = ObservationSpec(side, chain, idx, om, rng.normal(size=(3, 2)),
                               d1, np.zeros(2))
        rbar = accumulated_rotation(chi, chain, idx)
        if side == "right":
            rbar = rbar.T
        assert np.allclose(build_output(spec, chi), om @ rbar @ om.T @ d1)


@pytest.mark.parametrize("side,chain,index", ALL_CASES)
def test_closed_form_matches_dense_oracle(side, chain, index):
    """Each closed form equals the first row block of the twisted matrix
    action on the corresponding diagonal block, with the constants mapped
    through the automorphism reparameterization d1 + rho d2, A d2."""
    sig = (3, 1, 1, 2, 2)
    d, k = 3, 2
    rng = np.random.default_rng(hash((side, chain, index)) % 2 ** 32)
    for _ in range(1000):
        chi = rand_mfg(rng, sig)
        spec = _rand_obs_spec(rng, side, chain, index, d, k)
        scale = rng.normal(size=(k, k)) + 3.0 * np.eye(k)
        sim = SimElement(spec.omega, spec.rho, scale)
        dense_vec = np.concatenate([spec.d1 + spec.rho @ spec.d2,
                                    scale @ spec.d2])
        dense = twisted_action(sim, observed_block(spec, chi), dense_vec, side)
        assert np.linalg.norm(build_output(spec, chi) - dense[:d]) < 1e-11


def test_chain_index_validation():
    rng = np.random.default_rng(3)
    chi = rand_mfg(rng, (3, 1, 1, 1, 0))
    spec = _rand_obs_spec(rng, "left", "right", 1, 3, 2)
    with pytest.raises(InvalidSpecError):
        build_output(spec, chi)


def test_accumulated_translation_identities():
    """The theorem's translation sums equal the blocks extracted from the
    accumulated chain embeddings."""
    rng = np.random.default_rng(4)
    sig = (3, 1, 1, 2, 2)
    for _ in range(200):
        chi = rand_mfg(rng, sig)
        acc = chi.accumulated()
        for chain, offset in (("left", 0), ("right", 2)):
            for j in (1, 2):
                blk = acc[offset + j]
                lhs = accumulated_translation(chi, chain, j, "left")
                assert np.linalg.norm(lhs - blk.r_block) < 1e-11
                under = accumulated_translation(chi, chain, j, "right")
                inv_trans = -np.linalg.solve(blk.rot, blk.r_block)
                assert np.linalg.norm(under + inv_trans) < 1e-11


def test_innovation_jacobian_zero_constants():
    rng = np.random.default_rng(5)
    chi = rand_mfg(rng, (3, 2, 0, 0, 1))
    spec = ObservationSpec("right", "right", 1, np.eye(3), np.zeros((3, 2)),
                           np.zeros(3), np.zeros(2))
    jac = innovation_jacobian(spec, chi, "right")
    assert np.linalg.norm(jac) < 1e-12


@pytest.mark.parametrize("side,chain,index,conv", [
    ("left", "core", 0, "left"),
    ("left", "left", 1, "left"),
    ("right", "core", 0, "right"),
    ("right", "right", 1, "right"),
])
def test_innovation_jacobian_state_independent_when_matched(side, chain,
                                                            index, conv):
    rng = np.random.default_rng(hash((side, chain)) % 2 ** 32)
    sig = (3, 1, 1, 1, 1)
    spec = _rand_obs_spec(rng, side, chain, index, 3, 2)
    jacs = [innovation_jacobian(spec, rand_mfg(rng, sig), conv)
            for _ in range(50)]
    dev = max(np.abs(a - b).max() for a in jacs for b in jacs)
    assert dev < 1e-5, dev


def test_innovation_jacobian_mismatched_convention_varies():
    rng = np.random.default_rng(6)
    sig = (3, 1, 1, 1, 1)
    spec = _rand_obs_spec(rng, "right", "right", 1, 3, 2)
    j1 = innovation_jacobian(spec, rand_mfg(rng, sig), "left")
    j2 = innovation_jacobian(spec, rand_mfg(rng, sig), "left")
    assert np.abs(j1 - j2).max() > 1e-2
    spec_l = _rand_obs_spec(rng, "left", "left", 1, 3, 2)
    j3 = innovation_jacobian(spec_l, rand_mfg(rng, sig), "right")
    j4 = innovation_jacobian(spec_l, rand_mfg(rng, sig), "right")
    assert np.abs(j3 - j4).max() > 1e-2


def test_alignment_rotation_is_rotation():
    rng = np.random.default_rng(7)
    chi = rand_mfg(rng, (3, 1, 1, 1, 1))
    for side, chain, idx in ALL_CASES:
        spec = _rand_obs_spec(rng, side, chain, idx, 3, 2)
        c_mat = alignment_rotation(spec, chi)
        assert np.linalg.norm(c_mat.T @ c_mat - np.eye(3)) < 1e-12
