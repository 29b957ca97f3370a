"""Command-line front end.

Exit codes: 0 success, 2 malformed input, 3 state validation failure,
4 a reproduced claim failed its numerical check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .audit import identity_inputs, monotonicity_audit, verify_identity
from .channels import channel_to_dict
from .measures import MEASURES, compute_measure, scaling_demo
from .optimize import OptimizerConfig
from .qmat import DimPair, DimensionError, InvalidStateError
from .states import (
    bell_state,
    example_cc_state,
    example_post_channel_state,
    random_cq_state,
    random_state,
    state_from_dict,
    state_to_dict,
)

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_CLAIM = 0, 2, 3, 4

DEFAULT_TOLERANCES = {
    "scaling": 1e-8,
    "monotonicity": 1e-5,
    "identity": 1e-10,
    "cmi_monotonicity": 1e-5,
}
SCALING_PURITIES = (1.0, 0.75, 0.5)


@dataclass
class RunConfig:
    seed: int = 0
    trials: int = 1
    dims: DimPair = DimPair(2, 2)
    output_format: str = "json"
    output_path: Path | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive")


def _dims(text: str) -> DimPair:
    try:
        d_A, d_B = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--dims expects 'dA,dB', got {text!r}")
    if not (1 <= d_A <= 4 and 1 <= d_B <= 4):
        raise argparse.ArgumentTypeError("dimensions must lie in 1..4")
    return DimPair(d_A, d_B)


def _tol(text: str) -> tuple[str, float]:
    name, _, value = text.partition("=")
    if name not in DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(f"unknown tolerance {name!r}; known: {sorted(DEFAULT_TOLERANCES)}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value in {text!r}")


def _config(args) -> RunConfig:
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(dict(args.tol or []))
    return RunConfig(args.seed, args.trials, args.dims, args.format,
                     Path(args.out) if args.out else None, tolerances, args.workers)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        cfg.output_path.write_text(text if text.endswith("\n") else text + "\n")


def _table_csv(header: list[str], rows: list[list], comments: list[str]) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _qubit_ancilla(p: float) -> np.ndarray:
    """Diagonal qubit state with purity ``p`` in [1/2, 1]."""
    q = (1 + np.sqrt(2 * p - 1)) / 2
    return np.diag([q, 1 - q]).astype(complex)


def cmd_compute(args) -> int:
    cfg = _config(args)
    try:
        data = json.loads(Path(args.state_file).read_text())
        state = state_from_dict(data)
    except InvalidStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError, KeyError, TypeError, DimensionError) as exc:
        print(f"error: malformed state file: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report = compute_measure(args.measure, state, OptimizerConfig(seed=cfg.seed), seed=cfg.seed)
    out = report.to_dict()
    if cfg.output_format == "json":
        _emit(cfg, json.dumps(out, indent=2))
    else:
        _emit(cfg, _table_csv(["measure", "value", "argmin", "optimizer"],
                              [[out["measure"], out["value"], json.dumps(out["argmin"]),
                                json.dumps(out["optimizer"])]], []))
    return EXIT_OK


def scaling_rows(cfg: RunConfig) -> list[dict]:
    states = [("bell", bell_state()), ("cc_example", example_cc_state()),
              ("post_channel_example", example_post_channel_state()),
              ("random_cq", random_cq_state(cfg.dims.d_A, cfg.dims.d_B, [cfg.seed, 0]))]
    states += [(f"random_{k}", random_state(cfg.dims.d_A, cfg.dims.d_B, [cfg.seed, 1, k]))
               for k in range(cfg.trials)]
    opt = OptimizerConfig(seed=cfg.seed)
    rows = []
    for name, state in states:
        for p in SCALING_PURITIES:
            rep = scaling_demo(state, _qubit_ancilla(p), opt, tol=cfg.tolerances["scaling"], check=False)
            rows.append({"state": name, **asdict(rep)})
    return rows


def cmd_demo_scaling(args) -> int:
    cfg = _config(args)
    rows = scaling_rows(cfg)
    tol = cfg.tolerances["scaling"]
    criterion = f"|D_G(rho (x) sigma) - D_G(rho) * Tr(sigma^2)| <= {tol!r} for every row"
    failed = [r for r in rows if not r["passed"]]
    if cfg.output_format == "json":
        text = json.dumps({"criterion": criterion, "tolerance": tol, "passed": not failed,
                           "rows": rows}, indent=2)
    else:
        header = ["state", "purity", "before", "after", "ratio", "inverse_factor", "error", "passed"]
        text = _table_csv(header, [[r[h] for h in header] for r in rows],
                          [f"criterion: {criterion}", f"tolerance: {tol!r}"])
    _emit(cfg, text)
    if failed:
        print(f"FAIL: scaling law violated in row {json.dumps(failed[0])}", file=sys.stderr)
        return EXIT_CLAIM
    print(f"PASS: scaling law holds on {len(rows)} rows (tol {tol!r})", file=sys.stderr)
    return EXIT_OK


def cmd_audit(args) -> int:
    cfg = _config(args)
    table = monotonicity_audit(args.measure, cfg.trials, cfg.dims, cfg.seed, channel=args.channel,
                               cfg=OptimizerConfig(seed=cfg.seed), d_out=args.d_out,
                               tol=cfg.tolerances["monotonicity"], workers=cfg.workers)
    _emit(cfg, table.to_json() if cfg.output_format == "json" else table.to_csv())
    s = table.summary()
    status = "PASS" if table.passed else "FAIL"
    print(f"{status}: measure={s['measure']} rows={s['trials']} max_violation={s['max_violation']!r} "
          f"violations={s['violations']} gamma_margin_rows={s['gamma_margin_rows']}", file=sys.stderr)
    return EXIT_OK if table.passed else EXIT_CLAIM


def cmd_verify_identity(args) -> int:
    cfg = _config(args)
    tol_id, tol_mono = cfg.tolerances["identity"], cfg.tolerances["cmi_monotonicity"]
    rows = verify_identity(cfg.trials, cfg.dims, cfg.seed)
    criterion = (f"|info_loss - I(B:C|A')| <= {tol_id!r}; |I(B:C|A') - (I(A'B:C) - I(A':C))| <= {tol_id!r}; "
                 f"I(B:C|A') after a channel on B increases by <= {tol_mono!r}")
    failed = [r for r in rows if not r.passed(tol_id, tol_mono)]
    dicts = [asdict(r) for r in rows]
    if cfg.output_format == "json":
        text = json.dumps({"criterion": criterion, "passed": not failed, "rows": dicts}, indent=2)
    else:
        header = list(dicts[0])
        text = _table_csv(header, [[d[h] for h in header] for d in dicts],
                          [f"criterion: {criterion}"])
    _emit(cfg, text)
    if failed:
        row = failed[0]
        state, ch_A, ch_B = identity_inputs(row.seed, cfg.dims)
        counterexample = {"row": asdict(row), "state": state_to_dict(state),
                          "channel_A": channel_to_dict(ch_A), "channel_B": channel_to_dict(ch_B)}
        print("FAIL: counterexample " + json.dumps(counterexample), file=sys.stderr)
        return EXIT_CLAIM
    print(f"PASS: {len(rows)} random pairs satisfy all three checks", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--dims", type=_dims, default=DimPair(2, 2), help="dA,dB (default 2,2)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--tol", type=_tol, action="append", metavar="NAME=VALUE",
                        help=f"override a tolerance; names: {', '.join(DEFAULT_TOLERANCES)}")
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="qdiscord", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="evaluate one measure on a state file")
    p.add_argument("state_file")
    p.add_argument("measure", choices=MEASURES)
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("demo-scaling", parents=[common], help="ancilla purity scaling of D_G")
    p.add_argument("--trials", type=int, default=5, help="number of random states in the sweep")
    p.set_defaults(func=cmd_demo_scaling)

    p = sub.add_parser("audit", parents=[common], help="monotonicity under channels on B")
    p.add_argument("measure", choices=("D", "D_G"))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--channel", choices=("random", "identity"), default="random")
    p.add_argument("--d-out", type=int, default=None, help="output dimension of the random channels")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("verify-identity", parents=[common],
                       help="information loss equals conditional mutual information of the dilation")
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_verify_identity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.trials < 1:
        parser.error("--trials must be >= 1")
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
