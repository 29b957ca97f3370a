#!/usr/bin/env python3
"""Print the brute-force Bloch-grid values frozen into the test suite.

Uses tests/oracles.py, which shares no code with the package.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from oracles import grid_oracle  # noqa: E402

k0, k1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
plus = (k0 + k1) / np.sqrt(2)


def P(v):
    return np.outer(v, v.conj())


states = {
    "bell": P(np.kron(k0, k0) + np.kron(k1, k1)) / 2,
    "cc_example": (np.kron(P(k0), P(k0)) + np.kron(P(k1), P(k1))) / 2,
    "post_channel_example": (np.kron(P(k0), P(k0)) + np.kron(P(plus), P(k1))) / 2,
}

for name, rho in states.items():
    g, d = grid_oracle(rho, 2, n_theta=201, n_phi=400)
    print(f"{name:<22} D_G = {g!r:<22} D = {d!r}")
