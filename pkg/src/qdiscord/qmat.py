"""Dense complex linear algebra for finite-dimensional quantum systems.

Operators are plain ``numpy`` arrays of shape ``(d, d)``. Composite systems
use lexicographic index ordering: the basis state ``|i_A, i_B>`` sits at
index ``i_A * d_B + i_B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10


class DimensionError(ValueError):
    """Operator shape does not match the declared subsystem dimensions."""


class NotHermitianError(ValueError):
    pass


class InvalidStateError(ValueError):
    """Raised when an operator fails a density-matrix check."""

    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        msg = "; ".join(str(v) for v in self.violations)
        super().__init__(f"not a valid density matrix: {msg}")


class DimPair(NamedTuple):
    d_A: int
    d_B: int

    @property
    def total(self) -> int:
        return self.d_A * self.d_B


@dataclass(frozen=True)
class Violation:
    check: str  # "hermiticity" | "trace" | "positivity"
    magnitude: float

    def __str__(self) -> str:
        return f"{self.check} violated by {self.magnitude:.3g}"


def as_operator(x) -> np.ndarray:
    op = np.asarray(x, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {op.shape}")
    return op


def dag(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def proj(vec) -> np.ndarray:
    """Rank-one projector ``|v><v|`` (the vector is not normalized)."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def tensor(*ops) -> np.ndarray:
    """Kronecker product of the given operators, left factor most significant."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def _check_dims(rho: np.ndarray, dims: Sequence[int]) -> None:
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionError(
            f"dims {tuple(dims)} imply a {total}x{total} operator, got {rho.shape}"
        )


def ptrace(rho, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace over every subsystem not listed in ``keep``.

    The kept subsystems stay in their original relative order. An empty
    ``keep`` returns the full trace as a 1x1 operator.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    _check_dims(rho, dims)
    n = len(dims)
    keep = sorted(set(keep))
    traced = [i for i in range(n) if i not in keep]
    t = rho.reshape(dims + dims)
    # trace the highest axes first so lower axis numbers stay valid
    for count, ax in enumerate(sorted(traced, reverse=True)):
        remaining = n - count
        t = np.trace(t, axis1=ax, axis2=ax + remaining)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def partial_trace(rho, dims: DimPair, keep: str) -> np.ndarray:
    """Reduced operator of a bipartite operator; ``keep`` is ``"A"`` or ``"B"``."""
    if keep not in ("A", "B"):
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    return ptrace(rho, tuple(dims), [0] if keep == "A" else [1])


def permute_subsystems(rho, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors; ``order[k]`` is the old index of the new k-th factor."""
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    _check_dims(rho, dims)
    n = len(dims)
    t = rho.reshape(dims + dims)
    t = t.transpose(list(order) + [n + k for k in order])
    total = int(np.prod(dims))
    return t.reshape(total, total)


def hs_norm(x) -> float:
    """Hilbert-Schmidt (Frobenius) norm ``sqrt(Tr X^dag X)``."""
    return float(np.linalg.norm(np.asarray(x, dtype=complex)))


def hermiticity_error(x) -> float:
    x = np.asarray(x, dtype=complex)
    return hs_norm(x - dag(x))


def eig_hermitian(x, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian operator.

    Raises:
        NotHermitianError: if ``||X - X^dag||_2`` exceeds ``tol``.
    """
    x = as_operator(x)
    err = hermiticity_error(x)
    if err > tol:
        raise NotHermitianError(f"operator is not Hermitian: ||X - X^dag||_2 = {err:.3g}")
    return np.linalg.eigh((x + dag(x)) / 2)


def clamp_eigenvalues(evals: np.ndarray, tol: float = POSITIVITY_TOL) -> np.ndarray:
    """Zero out eigensolver noise in ``[-tol, 0)``; larger negatives are left alone."""
    evals = np.asarray(evals, dtype=float).copy()
    evals[(evals < 0) & (evals >= -tol)] = 0.0
    return evals


def validate_density(rho) -> list[Violation]:
    """List every density-matrix check the operator fails. Empty means valid."""
    rho = as_operator(rho)
    violations = []
    herm = hermiticity_error(rho)
    if herm > HERMITIAN_TOL:
        violations.append(Violation("hermiticity", herm))
    tr = abs(np.trace(rho) - 1.0)
    if tr > TRACE_TOL:
        violations.append(Violation("trace", float(tr)))
    min_eval = float(np.linalg.eigvalsh((rho + dag(rho)) / 2)[0])
    if min_eval < -POSITIVITY_TOL:
        violations.append(Violation("positivity", -min_eval))
    return violations


def check_density(rho) -> np.ndarray:
    """Return ``rho`` as a complex array, raising ``InvalidStateError`` if invalid."""
    rho = as_operator(rho)
    violations = validate_density(rho)
    if violations:
        raise InvalidStateError(violations)
    return rho


def purity(rho) -> float:
    rho = check_density(rho)
    return hs_norm(rho) ** 2
