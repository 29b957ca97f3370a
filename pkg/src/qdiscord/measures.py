"""Entropies, (conditional) mutual information and discord-type measures.

Entropies are in bits. Geometric values are bare squared Hilbert-Schmidt
distances with no normalization prefactor.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from .channels import (
    POVM,
    Channel,
    MeasurementBasis,
    apply,
    apply_local,
    discard_channel,
    embed,
    gamma_sigma,
    identity_channel,
    projective_channel,
    random_channel,
    stinespring,
)
from .optimize import (
    OptimizerConfig,
    SearchResult,
    conditional_blocks,
    hs_loss,
    info_loss_from_blocks,
    search_povm,
    search_qubit,
    search_unitary,
)
from .qmat import (
    POSITIVITY_TOL,
    DimensionError,
    DimPair,
    InvalidStateError,
    Violation,
    check_density,
    clamp_eigenvalues,
    dag,
    hs_norm,
    permute_subsystems,
    ptrace,
    purity,
    tensor,
)
from .states import BipartiteState

ZERO_CLAMP = 1e-9
PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class ClaimCheckError(AssertionError):
    """A numerical check of one of the reproduced claims failed."""


# --- entropies ---------------------------------------------------------------


def _entropy(rho: np.ndarray) -> float:
    evals = np.linalg.eigvalsh((rho + dag(rho)) / 2)
    if evals[0] < -POSITIVITY_TOL:
        raise InvalidStateError([Violation("positivity", float(-evals[0]))])
    evals = clamp_eigenvalues(evals)
    nz = evals[evals > 0]
    return float(-np.sum(nz * np.log2(nz)))


def vn_entropy(rho) -> float:
    """Von Neumann entropy ``-Tr rho log2 rho`` with ``0 log 0 = 0``."""
    return _entropy(check_density(rho))


def _mi(rho: np.ndarray, dims: Sequence[int], x: Sequence[int], y: Sequence[int]) -> float:
    s_x = _entropy(ptrace(rho, dims, x))
    s_y = _entropy(ptrace(rho, dims, y))
    s_xy = _entropy(ptrace(rho, dims, list(x) + list(y)))
    return s_x + s_y - s_xy


def mutual_info(state: BipartiteState) -> float:
    """``I(A:B) = S(A) + S(B) - S(AB)``."""
    return _mi(state.rho, state.dims, [0], [1])


def cond_mutual_info(rho, dims: Sequence[int]) -> float:
    """``I(B:C|A') = I(A'C:B) - I(A':B)`` for a state on ``A' (x) B (x) C``."""
    rho = check_density(rho)
    if len(dims) != 3:
        raise DimensionError("expected dims (d_A', d_B, d_C)")
    return _mi(rho, dims, [0, 2], [1]) - _mi(rho, dims, [0], [1])


def cond_mutual_info_alt(rho, dims: Sequence[int]) -> float:
    """The same quantity via the chain rule, ``I(A'B:C) - I(A':C)``.

    B enters only the first term, so monotonicity under channels on B is
    plain data processing. Note ``I(A':BC) - I(A':C)`` is ``I(A':B|C)``, a
    different quantity.
    """
    rho = check_density(rho)
    if len(dims) != 3:
        raise DimensionError("expected dims (d_A', d_B, d_C)")
    return _mi(rho, dims, [0, 1], [2]) - _mi(rho, dims, [0], [2])


def mutual_info_groups(rho, dims: Sequence[int], x: Sequence[int], y: Sequence[int]) -> float:
    """``I(X:Y)`` between two disjoint groups of subsystems of a multipartite state."""
    return _mi(check_density(rho), dims, x, y)


def info_loss(state: BipartiteState, ch_on_A: Channel) -> float:
    """Drop of ``I(A:B)`` when ``ch_on_A`` acts on the first party."""
    return mutual_info(state) - mutual_info(apply_local(ch_on_A, state, "A"))


def dilated_state(state: BipartiteState, ch_on_A: Channel) -> tuple[np.ndarray, tuple[int, int, int]]:
    """``(V (x) I) rho (V (x) I)^dag`` regrouped as ``A' (x) B (x) C``.

    ``V`` is the Stinespring isometry of ``ch_on_A``, C its environment.
    """
    if ch_on_A.d_in != state.d_A:
        raise DimensionError(f"channel input {ch_on_A.d_in} != d_A {state.d_A}")
    v = np.kron(stinespring(ch_on_A), np.eye(state.d_B))
    out = v @ state.rho @ dag(v)
    d_a2, d_c = ch_on_A.d_out, ch_on_A.rank
    out = permute_subsystems(out, (d_a2, d_c, state.d_B), (0, 2, 1))
    return out, (d_a2, state.d_B, d_c)


# --- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class ChannelClass:
    """Class of channels on A optimized over: ``"projective"`` or ``"povm"``."""

    tag: str = "projective"
    max_outcomes: int | None = None

    def __post_init__(self):
        if self.tag not in ("projective", "povm"):
            raise ValueError(f"unknown channel class {self.tag!r}")

    @classmethod
    def projective(cls) -> "ChannelClass":
        return cls("projective")

    @classmethod
    def povm(cls, max_outcomes: int | None = None) -> "ChannelClass":
        return cls("povm", max_outcomes)


@dataclass
class MeasureReport:
    measure: str
    value: float
    argmin: Any = None  # MeasurementBasis, POVM or a channel label
    optimizer: dict = field(default_factory=dict)
    clamped: bool = False

    def to_dict(self) -> dict:
        if isinstance(self.argmin, MeasurementBasis):
            arg = {"basis": self.argmin.describe()}
        elif isinstance(self.argmin, POVM):
            arg = {"povm_elements": len(self.argmin.elements)}
        else:
            arg = self.argmin
        return {"measure": self.measure, "value": self.value, "argmin": arg,
                "optimizer": self.optimizer, "clamped": self.clamped}


def _clamp(value: float) -> tuple[float, bool]:
    if -ZERO_CLAMP < value < 0:
        return 0.0, True
    return float(value), False


def _report(name: str, result, argmin, extra: dict | None = None) -> MeasureReport:
    value, clamped = _clamp(result.value)
    diag = {"restarts": result.restarts, "grid_resolution": result.grid_resolution,
            "refinement_iters": result.refinement_iters, "converged": result.converged}
    diag.update(extra or {})
    return MeasureReport(name, value, argmin, diag, clamped)


def _guard(state: BipartiteState, cfg: OptimizerConfig) -> None:
    if state.d_A > cfg.max_d_A:
        raise DimensionError(f"d_A = {state.d_A} exceeds the optimizer guard max_d_A = {cfg.max_d_A}")


def _search_projective(state: BipartiteState, objective, cfg: OptimizerConfig):
    if state.d_A == 1:
        val = float(objective(np.ones((1, 1, 1), dtype=complex))[0])
        return SearchResult(val, np.ones((1, 1), dtype=complex), 0, None, 0, True)
    if state.d_A == 2:
        return search_qubit(objective, cfg)
    return search_unitary(objective, state.d_A, cfg)


def _rho4(state: BipartiteState) -> np.ndarray:
    d_A, d_B = state.dims
    return np.asarray(state.rho).reshape(d_A, d_B, d_A, d_B)


def _entropic_objective(state: BipartiteState):
    rho4 = _rho4(state)
    offset = _entropy(state.reduced("A")) - _entropy(state.rho)
    return lambda vecs: info_loss_from_blocks(conditional_blocks(rho4, vecs), offset)


def _geometric_objective(state: BipartiteState):
    rho4 = _rho4(state)
    total = hs_norm(state.rho) ** 2
    return lambda vecs: hs_loss(conditional_blocks(rho4, vecs), total)


# --- discord measures ------------------------------------------------------------


def discord(state: BipartiteState, channel_class: ChannelClass | None = None,
            cfg: OptimizerConfig | None = None) -> MeasureReport:
    """Minimal mutual-information loss over a class of measurements on A.

    The optimizer returns an upper bound on the true infimum.
    """
    channel_class = channel_class or ChannelClass.projective()
    cfg = cfg or OptimizerConfig()
    _guard(state, cfg)
    objective = _entropic_objective(state)
    proj_result = _search_projective(state, objective, cfg)
    basis = MeasurementBasis(_orthonormalize(proj_result.vectors))
    if channel_class.tag == "projective":
        return _report("discord", proj_result, basis)

    d = state.d_A
    m = channel_class.max_outcomes or d * d
    if m < d:
        raise ValueError("max_outcomes must be at least d_A")
    result = search_povm(objective, d, m, proj_result.vectors, cfg)
    povm = POVM(tuple(np.outer(w, w.conj()) for w in _fix_povm_vectors(result.vectors).T))
    return _report("discord_povm", result, povm, {"max_outcomes": m,
                                                  "projective_value": proj_result.value})


def _orthonormalize(u: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(u)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _fix_povm_vectors(w: np.ndarray) -> np.ndarray:
    # tighten the isometry numerically so the POVM check at 1e-10 passes
    g = w.conj().T
    vals, vecs = np.linalg.eigh(g.conj().T @ g)
    return (g @ (vecs * vals ** -0.5) @ vecs.conj().T).conj().T


def geometric_discord(state: BipartiteState, cfg: OptimizerConfig | None = None) -> MeasureReport:
    """``min_Pi ||rho - Pi_A(rho)||_2^2`` over von Neumann measurements on A (upper bound)."""
    cfg = cfg or OptimizerConfig()
    _guard(state, cfg)
    result = _search_projective(state, _geometric_objective(state), cfg)
    return _report("geometric_discord", result, MeasurementBasis(_orthonormalize(result.vectors)))


def projection_distance_sq(state: BipartiteState, basis: MeasurementBasis) -> float:
    """``||rho - (Pi (x) I)(rho)||_2^2`` for one fixed basis, computed with explicit matrices."""
    pi = projective_channel(basis)
    return hs_norm(state.rho - apply(embed(pi, state.dims, "A"), state.rho)) ** 2


def correlation_gram(state: BipartiteState) -> np.ndarray:
    """Real 3x3 Gram matrix ``Re Tr(R_j R_k)`` of ``R_k = Tr_A[(sigma_k (x) I) rho]``."""
    if state.d_A != 2:
        raise DimensionError("the closed form needs a qubit on A")
    rho4 = _rho4(state)
    r = [np.einsum("ca,abcd->bd", s, rho4) for s in PAULIS]
    return np.array([[np.trace(a @ b).real for b in r] for a in r])


def geometric_discord_qubit_closed_form(state: BipartiteState) -> float:
    """Closed form for a qubit A and any B: ``(Tr G - lambda_max(G)) / 2``.

    Writing ``rho = (I (x) R_0 + sum_k sigma_k (x) R_k) / 2``, the measurement
    along Bloch direction ``n`` leaves ``||rho - Pi(rho)||^2 = (Tr G - n.G.n) / 2``.
    """
    g = correlation_gram(state)
    value = 0.5 * (np.trace(g) - np.linalg.eigvalsh(g)[-1])
    return _clamp(float(value))[0]


@dataclass(frozen=True)
class SamplerConfig:
    n_random: int = 48
    d_out_choices: tuple[int, ...] | None = None  # default: (d_B, 2 d_B)
    rank_choices: tuple[int | None, ...] = (1, 2, None)
    ancilla_dims: tuple[int, ...] = (2,)
    include_discards: bool = True


def _divisor_splits(d: int) -> list[tuple[int, int]]:
    return [(k, d // k) for k in range(1, d + 1) if d % k == 0 and 1 < d // k < d]


def candidate_channels_on_B(d_B: int, sampler: SamplerConfig, seed) -> list[Channel]:
    """Identity, ancilla attachments with pure ancillas, factor discards, random channels."""
    chans = [identity_channel(d_B)]
    for d_anc in sampler.ancilla_dims:
        pure = np.zeros((d_anc, d_anc), dtype=complex)
        pure[0, 0] = 1.0
        chans.append(gamma_sigma(pure, d_B))
    if sampler.include_discards:
        for keep, drop in _divisor_splits(d_B):
            chans.append(discard_channel(keep, drop, "last"))
            chans.append(discard_channel(drop, keep, "first"))
    d_outs = sampler.d_out_choices or (d_B, 2 * d_B)
    rng = np.random.default_rng(seed)
    for _ in range(sampler.n_random):
        d_out = int(rng.choice(d_outs))
        rank = sampler.rank_choices[int(rng.integers(len(sampler.rank_choices)))]
        if rank is not None and d_out * rank < d_B:
            rank = None
        chans.append(random_channel(d_B, d_out, rank, seed=int(rng.integers(2**63))))
    return chans


def tilde_geometric_discord(state: BipartiteState, sampler: SamplerConfig | None = None,
                            seed=0, cfg: OptimizerConfig | None = None) -> MeasureReport:
    """Sampled lower bound on ``sup_{Lambda_B} D_G(Lambda_B(rho))``.

    The identity channel is always among the candidates, so the estimate
    never falls below :func:`geometric_discord` with the same config.
    """
    sampler = sampler or SamplerConfig()
    cfg = cfg or OptimizerConfig()
    best, best_label, best_report = -np.inf, None, None
    evaluated = 0
    for ch in candidate_channels_on_B(state.d_B, sampler, seed):
        rep = geometric_discord(apply_local(ch, state, "B"), cfg)
        evaluated += 1
        if rep.value > best:
            best, best_label, best_report = rep.value, ch.label, rep
    diag = dict(best_report.optimizer)
    diag["channels_sampled"] = evaluated
    return MeasureReport("tilde_geometric_discord", best, best_label, diag, best_report.clamped)


# --- reproduced claims ----------------------------------------------------------


@dataclass
class ScalingReport:
    before: float
    after: float
    purity: float
    ratio: float | None  # after / before; None when before is zero
    inverse_factor: float  # discarding the ancilla multiplies D_G by this
    error: float  # |after - before * purity|
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def scaling_demo(state: BipartiteState, sigma, cfg: OptimizerConfig | None = None,
                 tol: float = 1e-8, check: bool = True) -> ScalingReport:
    """Geometric discord before and after attaching ancilla ``sigma`` to B."""
    sigma = check_density(sigma)
    p = purity(sigma)
    before = geometric_discord(state, cfg).value
    after = geometric_discord(apply_local(gamma_sigma(sigma, state.d_B), state, "B"), cfg).value
    err = abs(after - before * p)
    ratio = after / before if before > ZERO_CLAMP else None
    rep = ScalingReport(before, after, p, ratio, 1.0 / p, err, tol, err <= tol)
    if check and not rep.passed:
        raise ClaimCheckError(f"scaling law violated: |{after} - {before} * {p}| = {err:.3g} > {tol}")
    return rep


def compute_measure(name: str, state: BipartiteState, cfg: OptimizerConfig | None = None,
                    seed=0) -> MeasureReport:
    """Dispatch by measure name; used by the command-line front end."""
    if name == "discord":
        return discord(state, ChannelClass.projective(), cfg)
    if name == "discord_povm":
        return discord(state, ChannelClass.povm(), cfg)
    if name == "geometric_discord":
        return geometric_discord(state, cfg)
    if name == "geometric_discord_closed_form":
        return MeasureReport(name, geometric_discord_qubit_closed_form(state), None,
                             {"method": "closed form"})
    if name == "tilde_geometric_discord":
        return tilde_geometric_discord(state, seed=seed, cfg=cfg)
    if name == "mutual_info":
        return MeasureReport(name, _clamp(mutual_info(state))[0], None, {})
    if name == "entropy":
        return MeasureReport(name, vn_entropy(state.rho), None, {})
    raise ValueError(f"unknown measure {name!r}")


MEASURES = ("discord", "discord_povm", "geometric_discord", "geometric_discord_closed_form",
            "tilde_geometric_discord", "mutual_info", "entropy")


def bloch_probe_bases(n: int = 32) -> list[MeasurementBasis]:
    """Deterministic, roughly uniform qubit bases from a Fibonacci spiral on the sphere."""
    golden = np.pi * (3 - np.sqrt(5))
    out = []
    for k in range(n):
        z = 1 - 2 * (k + 0.5) / n
        out.append(MeasurementBasis.from_bloch(float(np.arccos(z)), float((golden * k) % (2 * np.pi))))
    return out


def attach(state: BipartiteState, sigma) -> BipartiteState:
    """``rho_AB (x) sigma`` with the ancilla grouped into B."""
    sigma = np.asarray(sigma, dtype=complex)
    return BipartiteState(tensor(state.rho, sigma), DimPair(state.d_A, state.d_B * sigma.shape[0]))
