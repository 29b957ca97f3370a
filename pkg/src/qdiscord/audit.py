"""Randomized audits: monotonicity under channels on B and the dilation identity."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .channels import (
    apply,
    apply_local,
    discard_channel,
    embed,
    identity_channel,
    random_channel,
)
from .measures import (
    ChannelClass,
    attach,
    cond_mutual_info,
    cond_mutual_info_alt,
    dilated_state,
    discord,
    geometric_discord,
    info_loss,
)
from .optimize import OptimizerConfig
from .qmat import DimPair, purity
from .states import bell_state, random_state

CSV_HEADER = ("trial", "seed", "before", "after", "delta", "channel_desc")
MEASURE_NAMES = {"D": "discord", "D_G": "geometric_discord"}


def trial_seed(master_seed: int, trial: int) -> int:
    """Per-trial seed derived only from the master seed and the trial index."""
    return int(np.random.SeedSequence([int(master_seed), int(trial)]).generate_state(1, np.uint64)[0])


def _evaluate(measure: str, state, cfg: OptimizerConfig) -> float:
    if measure == "D":
        return discord(state, ChannelClass.projective(), cfg).value
    if measure == "D_G":
        return geometric_discord(state, cfg).value
    raise ValueError(f"measure must be 'D' or 'D_G', got {measure!r}")


@dataclass
class AuditRow:
    trial: int
    seed: int
    before: float
    after: float
    delta: float
    channel_desc: str
    expected_delta: float | None = None  # only for ancilla-discard rows


@dataclass
class AuditTable:
    measure: str
    tolerance: float
    criterion: str
    rows: list[AuditRow] = field(default_factory=list)

    @property
    def max_violation(self) -> float:
        return max((r.delta for r in self.rows), default=0.0)

    @property
    def violations(self) -> list[AuditRow]:
        return [r for r in self.rows if r.delta > self.tolerance]

    def gamma_margin_rows(self, tol: float = 1e-6) -> list[AuditRow]:
        """Ancilla-discard rows that reach their guaranteed increase."""
        return [r for r in self.rows
                if r.expected_delta is not None and r.expected_delta > tol
                and r.delta >= r.expected_delta - tol]

    @property
    def passed(self) -> bool:
        if self.measure == "D":
            return self.max_violation <= self.tolerance
        return bool(self.gamma_margin_rows())

    def summary(self) -> dict:
        return {"measure": self.measure, "trials": len(self.rows),
                "max_violation": self.max_violation, "violations": len(self.violations),
                "gamma_margin_rows": len(self.gamma_margin_rows()),
                "tolerance": self.tolerance, "passed": self.passed}

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# criterion: {self.criterion}\n# tolerance: {self.tolerance!r}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([r.trial, r.seed, repr(r.before), repr(r.after), repr(r.delta), r.channel_desc])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"criterion": self.criterion, "tolerance": self.tolerance,
                           "summary": self.summary(), "rows": [asdict(r) for r in self.rows]},
                          indent=2)


def _random_trial(args) -> AuditRow:
    measure, trial, master, dims, channel, d_out, cfg = args
    s = trial_seed(master, trial)
    state = random_state(dims[0], dims[1], [s, 0])
    if channel == "identity":
        ch = identity_channel(dims[1])
    else:
        d_out = d_out or dims[1]
        rank = int(np.random.default_rng([s, 2]).integers(1, dims[1] * d_out + 1))
        ch = random_channel(dims[1], d_out, rank, seed=[s, 1])
    before = _evaluate(measure, state, cfg)
    after = _evaluate(measure, apply_local(ch, state, "B"), cfg)
    return AuditRow(trial, s, before, after, after - before, ch.label)


def _gamma_trial(args) -> AuditRow:
    measure, trial, master, dims, sigma, use_bell, cfg = args
    s = trial_seed(master, trial)
    base = bell_state() if use_bell else random_state(dims[0], dims[1], [s, 0])
    state = attach(base, sigma)
    p = purity(sigma)
    ch = discard_channel(base.d_B, sigma.shape[0], "last")
    before = _evaluate(measure, state, cfg)
    after = _evaluate(measure, apply_local(ch, state, "B"), cfg)
    desc = f"discard-ancilla(purity={p:.6g}){' on bell' if use_bell else ''}"
    return AuditRow(trial, s, before, after, after - before, desc, before * (1.0 / p - 1.0))


def _run(fn, jobs, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(fn, jobs))
    else:
        rows = [fn(j) for j in jobs]
    return sorted(rows, key=lambda r: r.trial)


def monotonicity_audit(measure: str, n_trials: int, dims=(2, 2), seed: int = 0,
                       channel: str = "random", cfg: OptimizerConfig | None = None,
                       d_out: int | None = None, gamma_trials: int | None = None,
                       tol: float = 1e-5, workers: int = 1) -> AuditTable:
    """Compare a measure before and after a channel on the unmeasured party B.

    For ``D_G`` the audit also adds ``gamma_trials`` rows (default 5, the first on
    the Bell state) in which a maximally mixed qubit ancilla is attached to B and
    then discarded; those rows carry their exact expected increase.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if measure not in MEASURE_NAMES:
        raise ValueError(f"measure must be 'D' or 'D_G', got {measure!r}")
    if channel not in ("random", "identity"):
        raise ValueError("channel must be 'random' or 'identity'")
    cfg = cfg or OptimizerConfig()
    dims = DimPair(*dims)
    if measure == "D":
        criterion = f"D(Lambda_B(rho)) - D(rho) <= {tol!r} on every trial"
    else:
        criterion = ("at least one ancilla-discard row increases D_G by its expected margin "
                     "before*(1/purity - 1) within 1e-06")
    table = AuditTable(measure, tol, criterion)
    jobs = [(measure, t, seed, tuple(dims), channel, d_out, cfg) for t in range(n_trials)]
    table.rows.extend(_run(_random_trial, jobs, workers))

    if gamma_trials is None:
        gamma_trials = 5 if (measure == "D_G" and channel == "random") else 0
    sigma = np.eye(2, dtype=complex) / 2
    jobs = [(measure, n_trials + k, seed, tuple(dims), sigma, k == 0, cfg) for k in range(gamma_trials)]
    table.rows.extend(_run(_gamma_trial, jobs, workers))
    return table


@dataclass
class IdentityRow:
    trial: int
    seed: int
    info_loss: float
    cmi: float
    cmi_alt: float
    cmi_after_B: float
    dilation_error: float  # |info_loss - cmi|
    rewrite_error: float  # |cmi - cmi_alt|
    cmi_increase: float  # cmi_after_B - cmi
    channel_desc: str

    def passed(self, tol_identity: float, tol_mono: float) -> bool:
        return (self.dilation_error <= tol_identity and self.rewrite_error <= tol_identity
                and self.cmi_increase <= tol_mono)


def identity_trial(state, ch_A, ch_B, trial: int = 0, seed: int = 0) -> IdentityRow:
    """Evaluate the information-loss / conditional-mutual-information chain for one pair."""
    loss = info_loss(state, ch_A)
    rho3, dims3 = dilated_state(state, ch_A)
    cmi = cond_mutual_info(rho3, dims3)
    alt = cond_mutual_info_alt(rho3, dims3)
    # Lambda_B on the middle factor of A' (x) B (x) C
    on_b = embed(embed(ch_B, DimPair(dims3[0], dims3[1]), "B"), DimPair(dims3[0] * dims3[1], dims3[2]), "A")
    rho3_b = apply(on_b, rho3)
    cmi_b = cond_mutual_info(rho3_b, (dims3[0], ch_B.d_out, dims3[2]))
    return IdentityRow(trial, seed, loss, cmi, alt, cmi_b, abs(loss - cmi), abs(cmi - alt),
                       cmi_b - cmi, f"{ch_A.label}|{ch_B.label}")


def identity_inputs(seed: int, dims=(2, 2)):
    """Random ``(state, channel on A, channel on B)`` for one identity trial."""
    dims = DimPair(*dims)
    rng = np.random.default_rng([seed, 2])
    rank = int(rng.integers(1, dims.d_A ** 2 + 1))
    state = random_state(dims.d_A, dims.d_B, [seed, 0])
    ch_A = random_channel(dims.d_A, dims.d_A, rank, seed=[seed, 1])
    ch_B = random_channel(dims.d_B, dims.d_B, None, seed=[seed, 3])
    return state, ch_A, ch_B


def verify_identity(n_trials: int = 100, dims=(2, 2), seed: int = 0) -> list[IdentityRow]:
    rows = []
    for t in range(n_trials):
        s = trial_seed(seed, t)
        rows.append(identity_trial(*identity_inputs(s, dims), trial=t, seed=s))
    return rows
