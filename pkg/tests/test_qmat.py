import numpy as np
import pytest

from qdiscord.qmat import (
    DimensionError,
    DimPair,
    InvalidStateError,
    NotHermitianError,
    check_density,
    eig_hermitian,
    hs_norm,
    ket,
    partial_trace,
    permute_subsystems,
    proj,
    ptrace,
    purity,
    tensor,
    validate_density,
)
from qdiscord.states import bell_state, random_density


def random_matrix(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def test_tensor_identity():
    np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_basis_projector_ordering():
    np.testing.assert_array_equal(tensor(proj(ket(0, 2)), proj(ket(1, 2))), np.diag([0, 1, 0, 0]))


def test_tensor_mixed_product(rng):
    x, y, x2, y2 = (random_matrix(rng, 2) for _ in range(4))
    np.testing.assert_allclose(tensor(x, y) @ tensor(x2, y2), tensor(x @ x2, y @ y2), atol=1e-12)


def test_hs_norm_multiplicative(rng):
    for _ in range(20):
        x, s = random_matrix(rng, 2), random_matrix(rng, 2)
        direct = np.sqrt(np.sum(np.abs(np.kron(x, s)) ** 2))
        assert abs(hs_norm(tensor(x, s)) - direct) < 1e-12
        assert abs(hs_norm(tensor(x, s)) - hs_norm(x) * hs_norm(s)) < 1e-12


def test_hs_norm_examples():
    assert hs_norm(np.eye(3)) == pytest.approx(np.sqrt(3))
    assert hs_norm(proj(np.array([1, 1j]) / np.sqrt(2))) == pytest.approx(1.0)


def test_hs_distance_bell_computational():
    rho = bell_state().rho
    measured = np.diag(np.diag(rho))  # computational basis on A leaves only |00>,|11> diagonal
    assert hs_norm(rho - measured) == pytest.approx(np.sqrt(0.5), abs=1e-14)


def test_partial_trace_product(rng):
    a, b = random_density(2, rng), random_density(3, rng)
    np.testing.assert_allclose(partial_trace(tensor(a, b), DimPair(2, 3), "A"), a, atol=1e-14)
    np.testing.assert_allclose(partial_trace(tensor(a, b), DimPair(2, 3), "B"), b, atol=1e-14)


def test_partial_trace_bell():
    np.testing.assert_allclose(partial_trace(bell_state().rho, DimPair(2, 2), "A"), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_full_trace(rng):
    rho = random_density(6, rng)
    full = ptrace(ptrace(rho, (2, 3), [0]), (2,), [])
    assert full.shape == (1, 1)
    assert full[0, 0] == pytest.approx(np.trace(rho))


def test_partial_trace_matches_loops(rng):
    dims = (2, 3, 2)
    rho = random_density(12, rng)
    t = rho.reshape(dims + dims)
    expected = np.einsum("abcdbf->acdf", t).reshape(4, 4)
    np.testing.assert_allclose(ptrace(rho, dims, [0, 2]), expected, atol=1e-14)


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4) / 4, DimPair(2, 3), "A")


def test_permute_subsystems(rng):
    a, b, c = random_density(2, rng), random_density(3, rng), random_density(2, rng)
    np.testing.assert_allclose(permute_subsystems(tensor(a, b, c), (2, 3, 2), (2, 0, 1)),
                               tensor(c, a, b), atol=1e-14)


def test_eig_hermitian_examples():
    w, _ = eig_hermitian(np.diag([0.25, 0.75]))
    np.testing.assert_allclose(w, [0.25, 0.75])
    w, v = eig_hermitian(proj(np.array([1, 1]) / np.sqrt(2)))
    np.testing.assert_allclose(w, [0, 1], atol=1e-15)
    assert abs(abs(v[:, 1] @ np.array([1, 1]) / np.sqrt(2)) - 1) < 1e-14


def test_eig_hermitian_reconstruction(rng):
    for _ in range(100):
        g = random_matrix(rng, 8)
        h = (g + g.conj().T) / 2
        w, v = eig_hermitian(h)
        assert np.all(np.diff(w) >= 0)
        assert hs_norm(h - (v * w) @ v.conj().T) < 1e-10 * 8
        assert np.max(np.abs(v.conj().T @ v - np.eye(8))) < 1e-10


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("rho, expected", [
    (np.eye(2) / 2, 0.5),
    (proj(np.array([0.6, 0.8j])), 1.0),
    (np.diag([0.9, 0.1]), 0.82),
])
def test_purity(rho, expected):
    assert purity(rho) == pytest.approx(expected, abs=1e-14)


def test_purity_rejects_invalid():
    with pytest.raises(InvalidStateError):
        purity(np.diag([0.6, 0.6]))


def test_validate_density():
    assert validate_density(np.eye(2) / 2) == []
    (v,) = validate_density(np.diag([1.5, -0.5]))
    assert v.check == "positivity" and v.magnitude == pytest.approx(0.5)
    (v,) = validate_density(np.diag([0.6, 0.6]))
    assert v.check == "trace" and v.magnitude == pytest.approx(0.2)
    checks = {v.check for v in validate_density(np.array([[0.5, 1], [0, 0.5]]))}
    assert "hermiticity" in checks


def test_check_density_message_names_violation():
    with pytest.raises(InvalidStateError, match="trace"):
        check_density(np.diag([0.6, 0.6]))
