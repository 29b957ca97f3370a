"""Bipartite states: the paper's worked examples, classical-quantum states, random ensembles.

The measured party A is always the first tensor factor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .qmat import (
    DimPair,
    DimensionError,
    InvalidStateError,
    check_density,
    dag,
    ket,
    partial_trace,
    proj,
    tensor,
)

SIMPLEX_TOL = 1e-12
ORTHONORMAL_TOL = 1e-10


@dataclass(frozen=True)
class BipartiteState:
    rho: np.ndarray
    dims: DimPair

    def __post_init__(self):
        dims = DimPair(int(self.dims[0]), int(self.dims[1]))
        object.__setattr__(self, "dims", dims)
        rho = check_density(self.rho)
        if rho.shape != (dims.total, dims.total):
            raise DimensionError(f"dims {tuple(dims)} do not match rho of shape {rho.shape}")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def d_A(self) -> int:
        return self.dims.d_A

    @property
    def d_B(self) -> int:
        return self.dims.d_B

    def reduced(self, keep: str) -> np.ndarray:
        return partial_trace(self.rho, self.dims, keep)


@dataclass(frozen=True)
class CQSpec:
    """Ensemble ``{p_i, |i>_A, rho^i_B}`` defining ``sum_i p_i |i><i| (x) rho^i_B``."""

    probs: np.ndarray
    basis: np.ndarray  # columns are the orthonormal states |i> of A
    blocks: Sequence[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        basis = np.asarray(self.basis, dtype=complex)
        if basis.ndim == 1:
            basis = basis.reshape(-1, 1)
        blocks = [check_density(b) for b in self.blocks]
        if not (len(probs) == basis.shape[1] == len(blocks)):
            raise ValueError("probs, basis columns and blocks must have equal length")
        if np.any(probs < -SIMPLEX_TOL) or abs(probs.sum() - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"probabilities are not on the simplex: {probs}")
        gram = dag(basis) @ basis
        if np.max(np.abs(gram - np.eye(basis.shape[1]))) > ORTHONORMAL_TOL:
            raise ValueError("basis vectors are not orthonormal")
        if len({b.shape for b in blocks}) > 1:
            raise DimensionError("all B blocks must share one dimension")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "blocks", blocks)


def cq_state(spec: CQSpec) -> BipartiteState:
    d_A = spec.basis.shape[0]
    d_B = spec.blocks[0].shape[0]
    rho = sum(
        p * tensor(proj(spec.basis[:, i]), block)
        for i, (p, block) in enumerate(zip(spec.probs, spec.blocks))
    )
    return BipartiteState(rho, DimPair(d_A, d_B))


def plus_state() -> np.ndarray:
    return proj(np.array([1.0, 1.0]) / np.sqrt(2))


def example_cc_state() -> BipartiteState:
    """``(|00><00| + |11><11|)/2``, the classical-classical starting point."""
    p0, p1 = proj(ket(0, 2)), proj(ket(1, 2))
    return BipartiteState((tensor(p0, p0) + tensor(p1, p1)) / 2, DimPair(2, 2))


def example_post_channel_state() -> BipartiteState:
    """``(|0><0| (x) |0><0| + |+><+| (x) |1><1|)/2``."""
    p0, p1 = proj(ket(0, 2)), proj(ket(1, 2))
    return BipartiteState((tensor(p0, p0) + tensor(plus_state(), p1)) / 2, DimPair(2, 2))


def bell_state() -> BipartiteState:
    phi = np.kron(ket(0, 2), ket(0, 2)) + np.kron(ket(1, 2), ket(1, 2))
    return BipartiteState(proj(phi) / 2, DimPair(2, 2))


def product_state(rho_A, rho_B) -> BipartiteState:
    rho_A, rho_B = np.asarray(rho_A, complex), np.asarray(rho_B, complex)
    return BipartiteState(tensor(rho_A, rho_B), DimPair(rho_A.shape[0], rho_B.shape[0]))


def ginibre(dim_rows: int, dim_cols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((dim_rows, dim_cols)) + 1j * rng.standard_normal((dim_rows, dim_cols))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from QR of a Ginibre matrix with phase-fixed R."""
    q, r = np.linalg.qr(ginibre(dim, dim, rng))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Hilbert-Schmidt ensemble: ``G G^dag / Tr(G G^dag)`` with square Ginibre ``G``."""
    g = ginibre(dim, dim, rng)
    rho = g @ dag(g)
    rho = (rho + dag(rho)) / 2
    return rho / np.trace(rho).real


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_state(d_A: int, d_B: int, seed) -> BipartiteState:
    if d_A < 1 or d_B < 1:
        raise ValueError("dimensions must be positive")
    return BipartiteState(random_density(d_A * d_B, _rng(seed)), DimPair(d_A, d_B))


def random_cq_spec(d_A: int, d_B: int, seed) -> CQSpec:
    rng = _rng(seed)
    basis = haar_unitary(d_A, rng)
    probs = rng.dirichlet(np.ones(d_A))
    blocks = [random_density(d_B, rng) for _ in range(d_A)]
    return CQSpec(probs, basis, blocks)


def random_cq_state(d_A: int, d_B: int, seed) -> BipartiteState:
    return cq_state(random_cq_spec(d_A, d_B, seed))


# JSON encoding: {"d_A", "d_B", "entries": [[re, im], ...]} with entries row-major.


def matrix_to_entries(m: np.ndarray) -> list[list[float]]:
    m = np.asarray(m, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in m.reshape(-1)]


def entries_to_matrix(entries, rows: int, cols: int) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    if arr.shape != (rows * cols, 2):
        raise DimensionError(
            f"expected {rows * cols} [re, im] pairs for a {rows}x{cols} matrix, got shape {arr.shape}"
        )
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(rows, cols)


def state_to_dict(state: BipartiteState) -> dict:
    return {"d_A": state.d_A, "d_B": state.d_B, "entries": matrix_to_entries(state.rho)}


def state_from_dict(data: dict) -> BipartiteState:
    """Decode a state; raises ``KeyError``/``DimensionError`` on malformed input,
    ``InvalidStateError`` if the matrix is not a density matrix."""
    d_A, d_B = int(data["d_A"]), int(data["d_B"])
    if d_A < 1 or d_B < 1:
        raise DimensionError("dimensions must be positive")
    n = d_A * d_B
    return BipartiteState(entries_to_matrix(data["entries"], n, n), DimPair(d_A, d_B))


def dumps_state(state: BipartiteState) -> str:
    return json.dumps(state_to_dict(state))


def loads_state(text: str) -> BipartiteState:
    return state_from_dict(json.loads(text))


__all__ = [
    "BipartiteState",
    "CQSpec",
    "InvalidStateError",
    "bell_state",
    "cq_state",
    "dumps_state",
    "example_cc_state",
    "example_post_channel_state",
    "haar_unitary",
    "loads_state",
    "product_state",
    "random_cq_spec",
    "random_cq_state",
    "random_density",
    "random_state",
    "state_from_dict",
    "state_to_dict",
]
