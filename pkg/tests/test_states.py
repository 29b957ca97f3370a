import json

import numpy as np
import pytest

from qdiscord.qmat import DimPair, InvalidStateError, hs_norm, ket, proj, purity, tensor, validate_density
from qdiscord.states import (
    BipartiteState,
    CQSpec,
    bell_state,
    cq_state,
    dumps_state,
    example_cc_state,
    example_post_channel_state,
    loads_state,
    random_cq_spec,
    random_cq_state,
    random_state,
    state_from_dict,
    state_to_dict,
)

P0, P1 = proj(ket(0, 2)), proj(ket(1, 2))


def test_cq_state_classical_classical():
    spec = CQSpec([0.5, 0.5], np.eye(2), [P0, P1])
    np.testing.assert_allclose(cq_state(spec).rho, (tensor(P0, P0) + tensor(P1, P1)) / 2)


def test_cq_state_product():
    spec = CQSpec([1.0], ket(0, 2), [np.eye(2) / 2])
    np.testing.assert_allclose(cq_state(spec).rho, tensor(P0, np.eye(2) / 2))


def test_cq_state_maximally_mixed():
    spec = CQSpec([0.5, 0.5], np.eye(2), [np.eye(2) / 2] * 2)
    np.testing.assert_allclose(cq_state(spec).rho, np.eye(4) / 4)


def test_cq_spec_validation():
    with pytest.raises(ValueError):
        CQSpec([0.6, 0.6], np.eye(2), [P0, P1])
    with pytest.raises(ValueError):
        CQSpec([0.5, 0.5], np.array([[1, 1], [0, 1]]), [P0, P1])
    with pytest.raises(InvalidStateError):
        CQSpec([0.5, 0.5], np.eye(2), [P0, np.diag([1.5, -0.5])])


def test_cq_state_linearity():
    spec = random_cq_spec(3, 2, 7)
    total = sum(p * tensor(proj(spec.basis[:, i]), b) for i, (p, b) in enumerate(zip(spec.probs, spec.blocks)))
    assert hs_norm(cq_state(spec).rho - total) < 1e-12


def test_example_cc_state():
    rho = example_cc_state().rho
    np.testing.assert_array_equal(rho, np.diag([0.5, 0, 0, 0.5]))
    assert purity(rho) == pytest.approx(0.5)


def test_example_post_channel_state():
    rho = example_post_channel_state().rho
    plus = proj(np.array([1, 1]) / np.sqrt(2))
    np.testing.assert_allclose(rho, (np.kron(P0, P0) + np.kron(plus, P1)) / 2, atol=1e-15)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rho).min() >= -1e-15


def test_bell_state():
    state = bell_state()
    assert purity(state.rho) == pytest.approx(1.0)
    assert state.rho[0, 3] == pytest.approx(0.5)


def test_bipartite_state_checks():
    with pytest.raises(InvalidStateError):
        BipartiteState(np.diag([0.6, 0.6, 0, 0]), DimPair(2, 2))
    with pytest.raises(ValueError):
        BipartiteState(np.eye(4) / 4, DimPair(2, 3))
    state = bell_state()
    with pytest.raises(ValueError):
        state.rho[0, 0] = 1.0


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_random_state_valid_and_deterministic(seed):
    a, b = random_state(2, 3, seed), random_state(2, 3, seed)
    assert validate_density(a.rho) == []
    np.testing.assert_array_equal(a.rho, b.rho)
    assert not np.allclose(a.rho, random_state(2, 3, seed + 1).rho)


def test_random_state_mean_purity():
    # Ginibre N x M induced ensemble: E Tr rho^2 = (N + M) / (N M + 1), here N = M = 4
    mean = np.mean([purity(random_state(2, 2, s).rho) for s in range(1000)])
    assert mean == pytest.approx(8 / 17, abs=0.02)


def test_random_cq_state():
    state = random_cq_state(2, 2, 3)
    assert validate_density(state.rho) == []
    np.testing.assert_array_equal(state.rho, random_cq_state(2, 2, 3).rho)


def test_json_roundtrip():
    state = random_state(2, 3, 5)
    back = loads_state(dumps_state(state))
    assert back.dims == state.dims
    np.testing.assert_array_equal(back.rho, state.rho)
    data = state_to_dict(bell_state())
    assert set(data) == {"d_A", "d_B", "entries"}
    assert len(data["entries"]) == 16 and data["entries"][3] == [0.5, 0.0]


def test_json_malformed():
    with pytest.raises(ValueError):
        state_from_dict({"d_A": 2, "d_B": 2, "entries": [[1, 0]] * 3})
    with pytest.raises(KeyError):
        state_from_dict(json.loads('{"d_A": 2}'))
    with pytest.raises(InvalidStateError):
        state_from_dict({"d_A": 1, "d_B": 2, "entries": [[0.6, 0], [0, 0], [0, 0], [0.6, 0]]})
