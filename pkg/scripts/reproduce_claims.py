#!/usr/bin/env python3
"""Run every command-line demo and write the reports to one directory.

    python scripts/reproduce_claims.py --out results/ --seed 0
"""

import argparse
import sys
from pathlib import Path

from qdiscord.cli import main as qdiscord


def run(name, argv):
    code = qdiscord(argv)
    print(f"{name:<24} exit {code}")
    return code


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=200)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = ["--seed", str(args.seed)]

    codes = [
        run("demo-scaling", ["demo-scaling", *seed, "--trials", "50", "--format", "csv",
                             "--out", str(out / "scaling.csv")]),
        run("audit D", ["audit", "D", *seed, "--trials", str(args.trials), "--format", "csv",
                        "--out", str(out / "audit_discord.csv")]),
        run("audit D_G", ["audit", "D_G", *seed, "--trials", str(args.trials), "--format", "csv",
                          "--out", str(out / "audit_geometric.csv")]),
        run("verify-identity", ["verify-identity", *seed, "--out", str(out / "identity.json")]),
    ]
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
