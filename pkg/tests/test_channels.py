import numpy as np
import pytest

from qdiscord.channels import (
    POVM,
    Channel,
    ChannelError,
    MeasurementBasis,
    apply,
    apply_local,
    channel_from_dict,
    channel_to_dict,
    compose,
    depolarizing_channel,
    discard_channel,
    embed,
    gamma_sigma,
    identity_channel,
    measure_and_prepare_example,
    povm_channel,
    projective_channel,
    random_channel,
    stinespring,
)
from qdiscord.measures import bloch_probe_bases
from qdiscord.qmat import DimPair, hs_norm, ket, partial_trace, proj, ptrace, purity, tensor, validate_density
from qdiscord.states import example_cc_state, example_post_channel_state, random_density, random_state

PLUS = proj(np.array([1, 1]) / np.sqrt(2))


def test_channel_requires_trace_preservation():
    with pytest.raises(ChannelError):
        Channel((np.eye(2) * 0.9,), 2, 2)


def test_identity_and_depolarizing(rng):
    rho = random_density(2, rng)
    np.testing.assert_allclose(apply(identity_channel(2), rho), rho)
    np.testing.assert_allclose(apply(depolarizing_channel(2), rho), np.eye(2) / 2, atol=1e-15)


def test_apply_random_pairs_stay_valid():
    for s in range(100):
        rng = np.random.default_rng(s)
        ch = random_channel(2, 3, int(rng.integers(1, 7)), seed=s)
        out = apply(ch, random_density(2, rng))
        assert validate_density(out) == []


def test_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        apply(identity_channel(2), np.eye(3) / 3)


def test_embed_identity():
    ch = embed(identity_channel(2), DimPair(2, 3), "A")
    np.testing.assert_allclose(ch.kraus[0], np.eye(6))


def test_embed_gamma_on_B_appends_ancilla(rng):
    state = random_state(2, 2, 11)
    sigma = random_density(3, rng)
    out = apply(embed(gamma_sigma(sigma, 2), state.dims, "B"), state.rho)
    np.testing.assert_allclose(out, tensor(state.rho, sigma), atol=1e-14)


def test_embed_commutes_with_partial_trace():
    for s in range(10):
        state = random_state(2, 3, s)
        ch = random_channel(3, 2, seed=100 + s)
        lhs = partial_trace(apply(embed(ch, state.dims, "B"), state.rho), DimPair(2, 2), "B")
        rhs = apply(ch, state.reduced("B"))
        assert hs_norm(lhs - rhs) < 1e-12


def test_gamma_sigma(rng):
    pure = proj(ket(1, 2))
    g = gamma_sigma(pure, 2)
    assert g.rank == 1 and g.d_out == 4
    assert purity(pure) == 1.0
    assert purity(np.eye(2) / 2) == pytest.approx(0.5)
    sigma = random_density(2, rng)
    rho = random_density(3, rng)
    assert np.max(np.abs(apply(gamma_sigma(sigma, 3), rho) - tensor(rho, sigma))) < 1e-14


def test_projective_channel():
    comp = projective_channel(MeasurementBasis.computational(2))
    np.testing.assert_allclose(apply(comp, np.diag([0.3, 0.7])), np.diag([0.3, 0.7]))
    np.testing.assert_allclose(apply(comp, PLUS), np.eye(2) / 2, atol=1e-15)


def test_projective_output_commutes_with_projectors(rng):
    basis = bloch_probe_bases(5)[3]
    out = apply(projective_channel(basis), random_density(2, rng))
    for p in basis.projectors():
        assert hs_norm(out @ p - p @ out) < 1e-14


def test_basis_rejects_non_orthonormal():
    with pytest.raises(ChannelError):
        MeasurementBasis(np.array([[1, 1], [0, 1]]))


def test_povm_from_basis_matches_projective(rng):
    basis = bloch_probe_bases(7)[2]
    rho = random_density(2, rng)
    out = apply(povm_channel(POVM.from_basis(basis)), rho)
    probs = [np.real(np.trace(p @ rho)) for p in basis.projectors()]
    np.testing.assert_allclose(out, np.diag(probs), atol=1e-14)


def test_trivial_povm(rng):
    out = apply(povm_channel(POVM((np.eye(2) / 2, np.eye(2) / 2))), random_density(2, rng))
    np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-15)


def test_povm_trace_and_larger_pointer(rng):
    # trine POVM: three outcomes on a qubit
    vs = [np.array([np.cos(t), np.sin(t)]) for t in (0, 2 * np.pi / 3, 4 * np.pi / 3)]
    povm = POVM(tuple(2 / 3 * proj(v) for v in vs))
    ch = povm_channel(povm)
    assert ch.d_out == 3
    for _ in range(20):
        rho = random_density(2, rng)
        assert abs(np.trace(apply(ch, rho)) - 1) < 1e-12


def test_povm_validation():
    with pytest.raises(ChannelError):
        POVM((np.eye(2) / 2,))


def test_stinespring_identity():
    v = stinespring(identity_channel(2))
    np.testing.assert_allclose(v, np.eye(2))


def test_stinespring_depolarizing():
    ch = depolarizing_channel(2)
    v = stinespring(ch)
    assert v.shape == (8, 2) and ch.rank == 4
    assert np.max(np.abs(v.conj().T @ v - np.eye(2))) < 1e-12


def test_stinespring_reproduces_channel():
    for s in range(100):
        rng = np.random.default_rng(s)
        ch = random_channel(2, 3, int(rng.integers(1, 7)), seed=s)
        rho = random_density(2, rng)
        v = stinespring(ch)
        dilated = ptrace(v @ rho @ v.conj().T, (ch.d_out, ch.rank), [0])
        assert hs_norm(dilated - apply(ch, rho)) < 1e-12


def test_measure_and_prepare_example():
    ch = measure_and_prepare_example()
    np.testing.assert_allclose(apply(ch, proj(ket(0, 2))), proj(ket(0, 2)), atol=1e-15)
    np.testing.assert_allclose(apply(ch, proj(ket(1, 2))), PLUS, atol=1e-15)
    out = apply_local(ch, example_cc_state(), "A")
    assert np.max(np.abs(out.rho - example_post_channel_state().rho)) < 1e-14


def test_random_channel_unitary_rank_one():
    ch = random_channel(3, 3, 1, seed=4)
    u = ch.kraus[0]
    np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(3), atol=1e-12)


def test_random_channel_completeness_and_determinism():
    for s in range(20):
        ch = random_channel(2, 3, seed=s)
        assert ch.rank == 6
        assert np.max(np.abs(sum(k.conj().T @ k for k in ch.kraus) - np.eye(2))) < 1e-10
    a, b = random_channel(2, 2, seed=8), random_channel(2, 2, seed=8)
    for x, y in zip(a.kraus, b.kraus):
        np.testing.assert_array_equal(x, y)


def test_random_doubling_channel_has_ancilla_shape():
    # a rank-one d -> 2d random channel is an isometry, like attaching a pure ancilla
    ch = random_channel(2, 4, 1, seed=3)
    g = gamma_sigma(proj(ket(0, 2)), 2)
    assert (ch.d_in, ch.d_out, ch.rank) == (g.d_in, g.d_out, g.rank)
    for k in (ch.kraus[0], g.kraus[0]):
        np.testing.assert_allclose(k.conj().T @ k, np.eye(2), atol=1e-12)
    rho = random_density(2, np.random.default_rng(0))
    assert purity(apply(ch, rho)) == pytest.approx(purity(rho))


def test_discard_and_compose(rng):
    rho, sigma = random_density(2, rng), random_density(3, rng)
    np.testing.assert_allclose(apply(discard_channel(2, 3, "last"), tensor(rho, sigma)), rho, atol=1e-14)
    np.testing.assert_allclose(apply(discard_channel(2, 3, "first"), tensor(sigma, rho)), rho, atol=1e-14)
    roundtrip = compose(discard_channel(2, 3), gamma_sigma(sigma, 2))
    np.testing.assert_allclose(apply(roundtrip, rho), rho, atol=1e-14)


def test_per_projector_scaling_identity(rng):
    # ||rho (x) sigma - (Pi (x) I)(rho (x) sigma)||^2 = ||rho - Pi(rho)||^2 Tr sigma^2, basis by basis
    for s in range(5):
        state = random_state(2, 2, s)
        sigma = random_density(2, rng)
        big = tensor(state.rho, sigma)
        for basis in bloch_probe_bases(32):
            pi = projective_channel(basis)
            lhs = hs_norm(big - apply(embed(pi, DimPair(2, 4), "A"), big)) ** 2
            rhs = hs_norm(state.rho - apply(embed(pi, state.dims, "A"), state.rho)) ** 2 * purity(sigma)
            assert abs(lhs - rhs) < 1e-12


def test_projective_idempotent(rng):
    for basis in bloch_probe_bases(8):
        pi = embed(projective_channel(basis), DimPair(2, 2), "A")
        rho = random_density(4, rng)
        once = apply(pi, rho)
        assert hs_norm(apply(pi, once) - once) < 1e-12


def test_channel_json_roundtrip():
    ch = random_channel(2, 3, 2, seed=1)
    back = channel_from_dict(channel_to_dict(ch))
    assert (back.d_in, back.d_out) == (2, 3)
    for a, b in zip(ch.kraus, back.kraus):
        np.testing.assert_array_equal(a, b)
    assert len(channel_to_dict(ch)["kraus"][0]) == 6
