"""CPTP maps in Kraus form, measurement channels and Stinespring dilations."""

from __future__ import annotations

import json
from dataclasses import dataclass
import numpy as np

from .qmat import (
    DimPair,
    DimensionError,
    check_density,
    dag,
    eig_hermitian,
    ket,
    proj,
    tensor,
)
from .states import BipartiteState, entries_to_matrix, haar_unitary, matrix_to_entries

TP_TOL = 1e-10
ORTHONORMAL_TOL = 1e-10
POVM_TOL = 1e-10
KRAUS_CLAMP = 1e-12


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class Channel:
    """Completely positive trace-preserving map ``X -> sum_i K_i X K_i^dag``."""

    kraus: tuple
    d_in: int
    d_out: int
    label: str = "channel"

    def __post_init__(self):
        kraus = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not kraus:
            raise ChannelError("a channel needs at least one Kraus operator")
        for k in kraus:
            if k.shape != (self.d_out, self.d_in):
                raise DimensionError(
                    f"Kraus operator of shape {k.shape}, expected {(self.d_out, self.d_in)}"
                )
            k.setflags(write=False)
        completeness = sum(dag(k) @ k for k in kraus)
        err = np.max(np.abs(completeness - np.eye(self.d_in)))
        if err > TP_TOL:
            raise ChannelError(f"Kraus family is not trace preserving (error {err:.3g})")
        object.__setattr__(self, "kraus", kraus)

    @property
    def rank(self) -> int:
        return len(self.kraus)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal basis of A, one vector per column."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionError(f"basis must be a square matrix of columns, got {v.shape}")
        gram_err = np.max(np.abs(dag(v) @ v - np.eye(v.shape[0])))
        if gram_err > ORTHONORMAL_TOL:
            raise ChannelError(f"basis is not orthonormal (Gram error {gram_err:.3g})")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def computational(cls, dim: int) -> "MeasurementBasis":
        return cls(np.eye(dim))

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "MeasurementBasis":
        """Qubit basis ``{|n>, |-n>}`` for the Bloch direction ``n(theta, phi)``."""
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        e = np.exp(1j * phi)
        return cls(np.array([[c, -np.conj(e) * s], [e * s, c]]))

    def projectors(self) -> list[np.ndarray]:
        return [proj(self.vectors[:, i]) for i in range(self.dim)]

    def describe(self) -> list[list[list[float]]]:
        return [matrix_to_entries(self.vectors[:, i][:, None]) for i in range(self.dim)]


@dataclass(frozen=True)
class POVM:
    elements: tuple

    def __post_init__(self):
        elems = tuple(np.array(m, dtype=complex) for m in self.elements)
        if not elems:
            raise ChannelError("empty POVM")
        d = elems[0].shape[0]
        for m in elems:
            if m.shape != (d, d):
                raise DimensionError("POVM elements must share one square shape")
            if np.linalg.eigvalsh((m + dag(m)) / 2)[0] < -POVM_TOL:
                raise ChannelError("POVM element is not positive semidefinite")
        err = np.max(np.abs(sum(elems) - np.eye(d)))
        if err > POVM_TOL:
            raise ChannelError(f"POVM elements do not sum to identity (error {err:.3g})")
        object.__setattr__(self, "elements", elems)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @classmethod
    def from_basis(cls, basis: MeasurementBasis) -> "POVM":
        return cls(tuple(basis.projectors()))


def apply(ch: Channel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.d_in, ch.d_in):
        raise DimensionError(f"channel expects a {ch.d_in}x{ch.d_in} input, got {rho.shape}")
    ks = np.stack(ch.kraus)
    return np.einsum("kij,jl,kml->im", ks, rho, ks.conj())


def identity_channel(dim: int) -> Channel:
    return Channel((np.eye(dim),), dim, dim, label=f"identity({dim})")


def unitary_channel(u) -> Channel:
    u = np.asarray(u, dtype=complex)
    return Channel((u,), u.shape[1], u.shape[0], label="unitary")


def depolarizing_channel(dim: int) -> Channel:
    """Completely depolarizing channel, Kraus family ``{|i><j| / sqrt(d)}``."""
    kraus = [np.outer(ket(i, dim), ket(j, dim)) / np.sqrt(dim) for i in range(dim) for j in range(dim)]
    return Channel(tuple(kraus), dim, dim, label=f"depolarizing({dim})")


def compose(outer: Channel, inner: Channel) -> Channel:
    """``outer o inner``."""
    if outer.d_in != inner.d_out:
        raise DimensionError("cannot compose: dimension mismatch")
    kraus = tuple(a @ b for a in outer.kraus for b in inner.kraus)
    return Channel(kraus, inner.d_in, outer.d_out, label=f"{outer.label}*{inner.label}")


def embed(ch: Channel, dims: DimPair, side: str) -> Channel:
    """Extend ``ch`` acting on one factor of ``A (x) B`` by the identity on the other."""
    d_A, d_B = dims
    if side == "A":
        if ch.d_in != d_A:
            raise DimensionError(f"channel input {ch.d_in} != d_A {d_A}")
        kraus = tuple(np.kron(k, np.eye(d_B)) for k in ch.kraus)
        return Channel(kraus, d_A * d_B, ch.d_out * d_B, label=f"{ch.label}@A")
    if side == "B":
        if ch.d_in != d_B:
            raise DimensionError(f"channel input {ch.d_in} != d_B {d_B}")
        kraus = tuple(np.kron(np.eye(d_A), k) for k in ch.kraus)
        return Channel(kraus, d_A * d_B, d_A * ch.d_out, label=f"{ch.label}@B")
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def apply_local(ch: Channel, state: BipartiteState, side: str) -> BipartiteState:
    """Apply ``ch`` to one party and return the state with updated dimensions."""
    out = apply(embed(ch, state.dims, side), state.rho)
    dims = DimPair(ch.d_out, state.d_B) if side == "A" else DimPair(state.d_A, ch.d_out)
    return BipartiteState(out, dims)


def gamma_sigma(sigma, d_in: int) -> Channel:
    """Ancilla-attach channel ``X -> X (x) sigma`` on a ``d_in``-dimensional input.

    The ancilla becomes the last tensor factor of the output.
    """
    sigma = check_density(sigma)
    evals, evecs = eig_hermitian(sigma)
    kraus = tuple(
        np.kron(np.eye(d_in), np.sqrt(lam) * evecs[:, [j]])
        for j, lam in enumerate(evals)
        if lam > KRAUS_CLAMP
    )
    return Channel(kraus, d_in, d_in * sigma.shape[0], label="attach-ancilla")


def discard_channel(d_keep: int, d_drop: int, drop: str = "last") -> Channel:
    """Partial trace over one factor of a ``d_keep * d_drop`` system."""
    if drop == "last":
        kraus = tuple(np.kron(np.eye(d_keep), ket(j, d_drop)[None, :]) for j in range(d_drop))
    elif drop == "first":
        kraus = tuple(np.kron(ket(j, d_drop)[None, :], np.eye(d_keep)) for j in range(d_drop))
    else:
        raise ValueError("drop must be 'first' or 'last'")
    return Channel(kraus, d_keep * d_drop, d_keep, label=f"discard-{drop}({d_drop})")


def projective_channel(basis: MeasurementBasis) -> Channel:
    return Channel(tuple(basis.projectors()), basis.dim, basis.dim, label="projective")


def povm_channel(povm: POVM) -> Channel:
    """Measurement channel ``X -> sum_i Tr(M_i X) |i><i|`` into an n-outcome pointer space."""
    n_out = len(povm.elements)
    kraus = []
    for i, m in enumerate(povm.elements):
        evals, evecs = eig_hermitian(m)
        for lam, v in zip(evals, evecs.T):
            if lam > KRAUS_CLAMP:
                kraus.append(np.outer(ket(i, n_out), np.sqrt(lam) * v.conj()))
    return Channel(tuple(kraus), povm.dim, n_out, label=f"povm({n_out})")


def stinespring(ch: Channel) -> np.ndarray:
    """Isometry ``V = sum_i K_i (x) |i>_C`` from the input to ``output (x) environment``."""
    ks = np.stack(ch.kraus, axis=1)  # (d_out, rank, d_in)
    return ks.reshape(ch.d_out * ch.rank, ch.d_in)


def measure_and_prepare_example() -> Channel:
    """``X -> <0|X|0> |0><0| + <1|X|1> |+><+|``: sends |0> to |0> and |1> to |+>."""
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    kraus = (np.outer(ket(0, 2), ket(0, 2)), np.outer(plus, ket(1, 2)))
    return Channel(kraus, 2, 2, label="measure-prepare(0->0,1->+)")


def random_channel(d_in: int, d_out: int, kraus_rank: int | None = None, seed=None) -> Channel:
    """Channel from a Haar-random isometry ``d_in -> d_out * kraus_rank``.

    ``kraus_rank`` defaults to ``d_in * d_out``.
    """
    rank = d_in * d_out if kraus_rank is None else int(kraus_rank)
    if rank < 1:
        raise ValueError("kraus_rank must be >= 1")
    if d_out * rank < d_in:
        raise ValueError("d_out * kraus_rank must be at least d_in")
    rng = np.random.default_rng(seed)
    v = haar_unitary(d_out * rank, rng)[:, :d_in]
    ks = v.reshape(d_out, rank, d_in)
    return Channel(tuple(ks[:, i, :] for i in range(rank)), d_in, d_out,
                   label=f"random({d_in}->{d_out},r={rank})")


def channel_to_dict(ch: Channel) -> dict:
    return {"d_in": ch.d_in, "d_out": ch.d_out, "kraus": [matrix_to_entries(k) for k in ch.kraus]}


def channel_from_dict(data: dict) -> Channel:
    d_in, d_out = int(data["d_in"]), int(data["d_out"])
    kraus = tuple(entries_to_matrix(k, d_out, d_in) for k in data["kraus"])
    return Channel(kraus, d_in, d_out, label=data.get("label", "channel"))


def dumps_channel(ch: Channel) -> str:
    return json.dumps(channel_to_dict(ch))


def loads_channel(text: str) -> Channel:
    return channel_from_dict(json.loads(text))


def local_dims(ch: Channel, dims: DimPair, side: str) -> DimPair:
    return DimPair(ch.d_out, dims.d_B) if side == "A" else DimPair(dims.d_A, ch.d_out)


def tensor_channels(first: Channel, second: Channel) -> Channel:
    kraus = tuple(tensor(a, b) for a in first.kraus for b in second.kraus)
    return Channel(kraus, first.d_in * second.d_in, first.d_out * second.d_out,
                   label=f"{first.label}(x){second.label}")


def bases_equal(a: MeasurementBasis, b: MeasurementBasis, tol: float = 1e-8) -> bool:
    """Same projective measurement, ignoring ordering and phases."""
    pa, pb = a.projectors(), b.projectors()
    return all(any(np.max(np.abs(x - y)) < tol for y in pb) for x in pa)
