#!/usr/bin/env python3
"""Sweep white noise into the pentagon state and locate the contextuality edge.

The state rho_w = (1-w)|psi><psi| + w*I/3 has pentagon sum
sqrt(5)*(1-w) + 5w/3, which crosses the noncontextual bound 2 at
w* = (sqrt(5)-2)/(sqrt(5)-5/3) ~ 0.4147.  The LP verdict should flip there.
"""

from __future__ import annotations

import math

from ctxcert.analyze import is_noncontextual, kcbs_value, zero_one_states
from ctxcert.catalog import kcbs_state, kcbs_system
from ctxcert.linalg import DensityMatrix


def main(steps: int = 21) -> None:
    system = kcbs_system()
    s01 = zero_one_states(system)
    psi = kcbs_state()
    mixed = DensityMatrix.maximally_mixed(3, backend="float")

    w_star = (math.sqrt(5) - 2) / (math.sqrt(5) - 5 / 3)
    print(f"predicted threshold w* = {w_star:.6f}")
    print(f"{'w':>8} {'pentagon sum':>14} {'verdict':>14}")
    last = None
    flip = None
    for k in range(steps):
        w = k / (steps - 1)
        rho = DensityMatrix.mixture([1 - w, w], [psi, mixed])
        state = system.state_from_density(rho)
        cert = is_noncontextual(state, s01)
        s = kcbs_value(state)
        print(f"{w:>8.3f} {s:>14.9f} {cert.verdict:>14}")
        if last and last != cert.verdict and flip is None:
            flip = w
        last = cert.verdict
    if flip is not None:
        print(f"verdict flipped between grid points around w = {flip:.3f}")


if __name__ == "__main__":
    main()
