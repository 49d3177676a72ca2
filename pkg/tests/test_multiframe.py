"""Multi-frame group: block structure, group laws, automorphisms, and the
left/right invariant error recovery maps."""

import numpy as np
import pytest
import scipy.linalg

from framegroups.errors import SignatureMismatchError
from framegroups.multiframe import (MfgAutomorphism, MfgTangent,
                                    left_error_recover, mfg_aut_apply,
                                    mfg_compose, mfg_embed, mfg_exp,
                                    mfg_from_embedding, mfg_identity,
                                    mfg_inverse, mfg_log, mfg_tangent_dim,
                                    right_error_recover)
from framegroups.twoframe import tfg_compose, tfg_embed, tfg_identity

from helpers import rand_mfg, rand_sim, rand_tfg, rand_tfg_tangent

SIGNATURES = [(3, 2, 0, 0, 1), (3, 1, 1, 1, 1), (2, 1, 0, 2, 0)]


def _embed_size(sig):
    d, n, m, s, t = sig
    return (s + t + 1) * (d + n + m)


@pytest.mark.parametrize("sig", SIGNATURES)
def test_group_axioms(sig):
    rng = np.random.default_rng(hash(sig) % 2 ** 32)
    ident = mfg_identity(*sig)
    for _ in range(100):
        a, b, c = (rand_mfg(rng, sig) for _ in range(3))
        lhs = mfg_embed(mfg_compose(mfg_compose(a, b), c))
        rhs = mfg_embed(mfg_compose(a, mfg_compose(b, c)))
        assert np.linalg.norm(lhs - rhs) < 1e-11
        assert np.linalg.norm(mfg_embed(mfg_compose(ident, b))
                              - mfg_embed(b)) < 1e-11
        assert np.linalg.norm(mfg_embed(mfg_compose(a, mfg_inverse(a)))
                              - np.eye(_embed_size(sig))) < 1e-11


@pytest.mark.parametrize("sig", SIGNATURES)
def test_embed_is_homomorphism(sig):
    rng = np.random.default_rng(1 + hash(sig) % 2 ** 32)
    for _ in range(100):
        a, b = rand_mfg(rng, sig), rand_mfg(rng, sig)
        assert np.linalg.norm(mfg_embed(mfg_compose(a, b))
                              - mfg_embed(a) @ mfg_embed(b)) < 1e-11


def test_degenerate_chain_reduces_to_tfg():
    rng = np.random.default_rng(2)
    sig = (3, 2, 1, 0, 0)
    a, b = rand_mfg(rng, sig), rand_mfg(rng, sig)
    ab = mfg_compose(a, b)
    direct = tfg_compose(a.core, b.core)
    assert np.linalg.norm(tfg_embed(ab.core) - tfg_embed(direct)) < 1e-12


def test_signature_mismatch():
    rng = np.random.default_rng(3)
    with pytest.raises(SignatureMismatchError):
        mfg_compose(rand_mfg(rng, (3, 1, 1, 1, 0)),
                    rand_mfg(rng, (3, 1, 1, 0, 1)))


def test_embed_accumulation_structure():
    # s=1, t=0, core identity: blocks are (I, embed(lT1))
    rng = np.random.default_rng(4)
    factor = rand_tfg(rng, (3, 1, 1))
    from framegroups.multiframe import MfgElement
    elem = MfgElement(tfg_identity(3, 1, 1), (factor,), ())
    mat = mfg_embed(elem)
    assert np.allclose(mat[:5, :5], np.eye(5))
    assert np.allclose(mat[5:, 5:], tfg_embed(factor))


@pytest.mark.parametrize("sig", SIGNATURES)
def test_embedding_round_trip(sig):
    rng = np.random.default_rng(5 + hash(sig) % 2 ** 32)
    for _ in range(30):
        a = rand_mfg(rng, sig)
        back = mfg_from_embedding(mfg_embed(a), sig)
        assert np.linalg.norm(mfg_embed(back) - mfg_embed(a)) < 1e-11


def test_exp_trivial_and_core_only():
    sig = (3, 1, 1, 1, 0)
    d, n, m, s, t = sig
    dim = mfg_tangent_dim(sig)
    ident = mfg_exp(MfgTangent.from_coords(np.zeros(dim), sig), s, t)
    assert np.allclose(mfg_embed(ident), np.eye(_embed_size(sig)))
    # only the core tangent block nonzero: the chain factor must compensate
    # so that the accumulated chain block stays at the identity
    rng = np.random.default_rng(6)
    core_tan = rand_tfg_tangent(rng, (d, n, m))
    core_only = MfgTangent.from_coords(
        np.concatenate([core_tan.coords(), np.zeros(9)]), sig)
    elem = mfg_exp(core_only, s, t)
    acc = elem.accumulated()
    assert np.linalg.norm(tfg_embed(acc[1]) - np.eye(5)) < 1e-12
    chain_expected = tfg_embed(elem.left[0]) @ tfg_embed(acc[0])
    assert np.linalg.norm(chain_expected - np.eye(5)) < 1e-12


@pytest.mark.parametrize("sig", SIGNATURES)
def test_exp_matches_blockwise_dense_expm(sig):
    from framegroups.twoframe import tfg_algebra_embed
    d, n, m, s, t = sig
    rng = np.random.default_rng(7 + hash(sig) % 2 ** 32)
    for _ in range(40):
        blocks = tuple(rand_tfg_tangent(rng, (d, n, m), angle_scale=2.5)
                       for _ in range(s + t + 1))
        xi = MfgTangent(blocks)
        dense = scipy.linalg.block_diag(
            *[scipy.linalg.expm(tfg_algebra_embed(b)) for b in blocks])
        assert np.linalg.norm(mfg_embed(mfg_exp(xi, s, t)) - dense) < 1e-10


@pytest.mark.parametrize("sig", SIGNATURES)
def test_log_exp_round_trip(sig):
    d, n, m, s, t = sig
    rng = np.random.default_rng(8 + hash(sig) % 2 ** 32)
    for _ in range(40):
        xi = MfgTangent(tuple(rand_tfg_tangent(rng, (d, n, m), angle_scale=1.5)
                              for _ in range(s + t + 1)))
        back = mfg_log(mfg_exp(xi, s, t))
        assert np.linalg.norm(back.coords() - xi.coords()) < 1e-8


@pytest.mark.parametrize("sig", SIGNATURES)
def test_automorphism_preserves_multiplication_and_closure(sig):
    d, n, m, s, t = sig
    rng = np.random.default_rng(9 + hash(sig) % 2 ** 32)
    for _ in range(100):
        aut = MfgAutomorphism(tuple(rand_sim(rng, (d, n, m))
                                    for _ in range(s + t + 1)))
        a, b = rand_mfg(rng, sig), rand_mfg(rng, sig)
        lhs = mfg_aut_apply(aut, mfg_compose(a, b))
        rhs = mfg_compose(mfg_aut_apply(aut, a), mfg_aut_apply(aut, b))
        assert np.linalg.norm(mfg_embed(lhs) - mfg_embed(rhs)) < 1e-10
        # closure: conjugated blocks are valid group elements
        lhs.validate(tol=1e-9)


def test_automorphism_identity():
    rng = np.random.default_rng(10)
    sig = (3, 1, 1, 1, 1)
    d, n, m, s, t = sig
    from framegroups.twoframe import sim_identity
    aut = MfgAutomorphism(tuple(sim_identity(d, n + m)
                                for _ in range(s + t + 1)))
    a = rand_mfg(rng, sig)
    assert np.linalg.norm(mfg_embed(mfg_aut_apply(aut, a))
                          - mfg_embed(a)) < 1e-12


@pytest.mark.parametrize("sig", SIGNATURES)
def test_left_error_recover_round_trip(sig):
    rng = np.random.default_rng(11 + hash(sig) % 2 ** 32)
    ident = mfg_identity(*sig)
    for _ in range(100):
        chi, chi_hat = rand_mfg(rng, sig), rand_mfg(rng, sig)
        delta = mfg_compose(mfg_inverse(chi), chi_hat)
        rec = left_error_recover(chi_hat, delta)
        assert np.linalg.norm(mfg_embed(rec) - mfg_embed(chi)) < 1e-10
        # identity error returns the estimate
        same = left_error_recover(chi_hat, ident)
        assert np.linalg.norm(mfg_embed(same) - mfg_embed(chi_hat)) < 1e-11


@pytest.mark.parametrize("sig", SIGNATURES)
def test_right_error_recover_round_trip(sig):
    # mirror formulas accepted only on bulk random validation
    rng = np.random.default_rng(12 + hash(sig) % 2 ** 32)
    trials = 1000 if sig == (3, 1, 1, 1, 1) else 200
    for _ in range(trials):
        chi, chi_hat = rand_mfg(rng, sig), rand_mfg(rng, sig)
        delta = mfg_compose(chi_hat, mfg_inverse(chi))
        rec = right_error_recover(chi_hat, delta)
        assert np.linalg.norm(mfg_embed(rec) - mfg_embed(chi)) < 1e-10


def test_error_recover_degenerate_core():
    # s = t = 0: left gives chi_hat delta^-1, right gives delta^-1 chi_hat
    rng = np.random.default_rng(13)
    sig = (3, 2, 1, 0, 0)
    chi_hat, delta = rand_mfg(rng, sig), rand_mfg(rng, sig)
    left = left_error_recover(chi_hat, delta)
    expected = mfg_compose(chi_hat, mfg_inverse(delta))
    assert np.linalg.norm(mfg_embed(left) - mfg_embed(expected)) < 1e-11
    right = right_error_recover(chi_hat, delta)
    expected = mfg_compose(mfg_inverse(delta), chi_hat)
    assert np.linalg.norm(mfg_embed(right) - mfg_embed(expected)) < 1e-11


@pytest.mark.parametrize("sig", SIGNATURES)
def test_left_recovery_componentwise_formulas(sig):
    """The nested-conjugation component formulas against the global product."""
    from framegroups.twoframe import tfg_inverse as inv

    rng = np.random.default_rng(14 + hash(sig) % 2 ** 32)
    _, _, _, s, t = sig
    for _ in range(50):
        chi, chi_hat = rand_mfg(rng, sig), rand_mfg(rng, sig)
        delta = mfg_compose(mfg_inverse(chi), chi_hat)
        d_blocks = delta.accumulated()
        est_acc = chi_hat.accumulated()
        rec = left_error_recover(chi_hat, delta)
        # core block: T0 = T0_hat D0^-1
        core = tfg_compose(chi_hat.core, inv(d_blocks[0]))
        assert np.linalg.norm(tfg_embed(core) - tfg_embed(rec.core)) < 1e-10
        # right chain blocks: D_{j-1} rT_hat_j D_j^-1
        for j in range(1, t + 1):
            prev = d_blocks[s + j - 1] if j > 1 else d_blocks[0]
            via = tfg_compose(tfg_compose(prev, chi_hat.right[j - 1]),
                              inv(d_blocks[s + j]))
            assert np.linalg.norm(tfg_embed(via)
                                  - tfg_embed(rec.right[j - 1])) < 1e-10
        # left chain blocks: nested conjugations, composed one at a time
        for j in range(1, s + 1):
            prev = d_blocks[j - 1] if j > 1 else d_blocks[0]
            inner = tfg_compose(inv(d_blocks[j]), prev)
            conjugators = [chi_hat.core] + list(chi_hat.left[:j - 1])
            for g in conjugators:  # innermost conjugation first
                inner = tfg_compose(tfg_compose(g, inner), inv(g))
            via = tfg_compose(chi_hat.left[j - 1], inner)
            assert np.linalg.norm(tfg_embed(via)
                                  - tfg_embed(rec.left[j - 1])) < 1e-10
