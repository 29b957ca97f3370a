"""Derivative-free search over measurements on the first party.

Objectives here work on the conditional B-operators ``<u_i| rho |u_i>`` for a
set of vectors ``u_i`` on A (columns of ``U``). For an orthonormal ``U`` this is
a von Neumann measurement; for the columns of an isometry's adjoint it is a
rank-one POVM.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from .states import haar_unitary


@dataclass(frozen=True)
class OptimizerConfig:
    grid: tuple[int, int] = (64, 128)  # (theta, phi) points for a qubit A
    n_starts: int = 4  # best candidates handed to local refinement
    restarts: int = 32  # random unitaries sampled when d_A > 2
    povm_restarts: int = 4
    xatol: float = 1e-10
    fatol: float = 1e-15
    maxiter: int = 4000
    seed: int = 0
    max_d_A: int = 4

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SearchResult:
    value: float
    vectors: np.ndarray  # columns u_i
    restarts: int
    grid_resolution: tuple[int, int] | None
    refinement_iters: int
    converged: bool


def conditional_blocks(rho4: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """``<u_i| rho |u_i>`` for ``rho4`` of shape ``(dA, dB, dA, dB)``.

    ``vecs`` has shape ``(dA, m)`` or a leading batch axis ``(n, dA, m)``.
    Returns ``(m, dB, dB)`` or ``(n, m, dB, dB)``.
    """
    if vecs.ndim == 2:
        return np.einsum("ai,abcd,ci->ibd", vecs.conj(), rho4, vecs)
    return np.einsum("nai,abcd,nci->nibd", vecs.conj(), rho4, vecs)


def _h(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -x * np.log2(x)
    return np.where(x > 0, out, 0.0)


def hs_loss(blocks: np.ndarray, purity_total: float) -> np.ndarray:
    """``Tr rho^2 - sum_i ||<u_i|rho|u_i>||_2^2`` over the trailing block axes."""
    sq = np.sum(np.abs(blocks) ** 2, axis=(-1, -2))
    return purity_total - np.sum(sq, axis=-1)


def info_loss_from_blocks(blocks: np.ndarray, s_a_minus_s_ab: float) -> np.ndarray:
    """Mutual-information drop under the measurement defined by the blocks.

    With ``q_i = <u_i|rho|u_i>`` and ``p_i = Tr q_i`` the post-measurement
    mutual information is ``S(rho_B) - sum_i p_i S(q_i / p_i)``, so the drop
    is ``S(A) - S(AB) + sum_i [sum_k h(eig_k q_i) - h(p_i)]``.
    """
    herm = (blocks + np.conj(np.swapaxes(blocks, -1, -2))) / 2
    evals = np.linalg.eigvalsh(herm)
    p = np.trace(herm, axis1=-2, axis2=-1).real
    cond = np.sum(_h(evals), axis=-1) - _h(p)
    return s_a_minus_s_ab + np.sum(cond, axis=-1)


def bloch_bases(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Stack of qubit bases ``{|n>, |-n>}``, shape ``(n, 2, 2)``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 1, 0] = e * s
    out[..., 0, 1] = -np.conj(e) * s
    out[..., 1, 1] = c
    return out


def _hermitian_from_params(x: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, 1)
    n_off = len(iu[0])
    h[np.diag_indices(d)] = x[:d]
    h[iu] = x[d:d + n_off] + 1j * x[d + n_off:]
    return h + np.triu(h, 1).conj().T


def _nelder_mead(f: Callable, x0: np.ndarray, cfg: OptimizerConfig):
    return minimize(
        f, x0, method="Nelder-Mead",
        options={"xatol": cfg.xatol, "fatol": cfg.fatol, "maxiter": cfg.maxiter,
                 "maxfev": 2 * cfg.maxiter, "adaptive": len(x0) > 4},
    )


def search_qubit(objective: Callable[[np.ndarray], np.ndarray], cfg: OptimizerConfig) -> SearchResult:
    """Grid over Bloch angles followed by Nelder-Mead from the best grid points.

    ``objective`` maps a stack of bases ``(n, 2, 2)`` to ``n`` values.
    """
    n_theta, n_phi = cfg.grid
    theta, phi = np.meshgrid(np.linspace(0, np.pi, n_theta),
                             np.linspace(0, 2 * np.pi, n_phi, endpoint=False), indexing="ij")
    theta, phi = theta.ravel(), phi.ravel()
    values = objective(bloch_bases(theta, phi))
    order = np.argsort(values, kind="stable")[: max(cfg.n_starts, 1)]

    def f(x):
        return float(objective(bloch_bases(np.array([x[0]]), np.array([x[1]])))[0])

    best_x = np.array([theta[order[0]], phi[order[0]]])
    best_val = float(values[order[0]])
    iters, converged = 0, True
    for idx in order:
        res = _nelder_mead(f, np.array([theta[idx], phi[idx]]), cfg)
        iters += int(res.nit)
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
            converged = bool(res.success)
    vecs = bloch_bases(np.array([best_x[0]]), np.array([best_x[1]]))[0]
    return SearchResult(best_val, vecs, len(order), (n_theta, n_phi), iters, converged)


def search_unitary(objective: Callable[[np.ndarray], np.ndarray], d: int,
                   cfg: OptimizerConfig) -> SearchResult:
    """Random Haar starts, then Nelder-Mead over ``U0 expm(iH)`` from the best few."""
    rng = np.random.default_rng(cfg.seed)
    starts = [np.eye(d, dtype=complex)] + [haar_unitary(d, rng) for _ in range(cfg.restarts)]
    start_vals = objective(np.stack(starts))
    order = np.argsort(start_vals, kind="stable")[: max(cfg.n_starts, 1)]

    best_val = float(start_vals[order[0]])
    best_u = starts[order[0]]
    iters, converged = 0, True
    for idx in order:
        u0 = starts[idx]

        def f(x, u0=u0):
            u = u0 @ expm(1j * _hermitian_from_params(x, d))
            return float(objective(u[None])[0])

        res = _nelder_mead(f, np.zeros(d * d), cfg)
        iters += int(res.nit)
        if res.fun < best_val:
            best_val = float(res.fun)
            best_u = u0 @ expm(1j * _hermitian_from_params(res.x, d))
            converged = bool(res.success)
    return SearchResult(best_val, best_u, len(starts), None, iters, converged)


def isometry_from_params(x: np.ndarray, m: int, d: int) -> np.ndarray:
    """``m x d`` isometry ``G (G^dag G)^(-1/2)`` from ``2 m d`` real parameters."""
    g = (x[: m * d] + 1j * x[m * d:]).reshape(m, d)
    w, v = np.linalg.eigh(g.conj().T @ g)
    w = np.clip(w, 1e-300, None)
    return g @ (v * w ** -0.5) @ v.conj().T


def search_povm(objective: Callable[[np.ndarray], np.ndarray], d: int, m: int,
                seed_vectors: np.ndarray, cfg: OptimizerConfig) -> SearchResult:
    """Local search over rank-one POVMs ``{|w_i><w_i|}`` with ``m`` outcomes.

    The search starts from ``seed_vectors`` (typically the best projective
    basis padded with zero vectors) plus ``cfg.povm_restarts`` random isometries,
    so the result is never worse than the seed.
    """
    rng = np.random.default_rng(cfg.seed)

    def to_params(w: np.ndarray) -> np.ndarray:
        g = w.conj().T  # rows are the POVM "bra" vectors
        return np.concatenate([g.real.ravel(), g.imag.ravel()])

    seed_w = np.zeros((d, m), dtype=complex)
    seed_w[:, : seed_vectors.shape[1]] = seed_vectors
    starts = [to_params(seed_w)]
    for _ in range(cfg.povm_restarts):
        starts.append(to_params(haar_unitary(m, rng)[:, :d].conj().T))

    def vecs(x):
        return isometry_from_params(x, m, d).conj().T

    def f(x):
        return float(objective(vecs(x)[None])[0])

    best_val, best_w = f(starts[0]), seed_w
    iters, converged = 0, True
    for x0 in starts:
        res = _nelder_mead(f, x0, cfg)
        iters += int(res.nit)
        if res.fun < best_val:
            best_val, best_w = float(res.fun), vecs(res.x)
            converged = bool(res.success)
    return SearchResult(best_val, best_w, len(starts), None, iters, converged)
