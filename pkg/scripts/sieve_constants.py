"""Table of the Greaves functional values, solved U and exponents across theta.

    python scripts/sieve_constants.py
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from frobtrace.sieve import alpha_of, beta_of, greaves_values, r1_of, r2_of, solve_U


@dataclass
class SieveTableConfig:
    thetas: tuple[float, ...] = (0.5, 0.55, 0.6, 2 / 3, 0.75, 0.9)
    v_grid: int = 7


def main(cfg: SieveTableConfig = SieveTableConfig()) -> dict:
    anchors = {
        "J(0.83,1/6)": greaves_values(0.83, 1 / 6).J,
        "J(3/5,1/4)": greaves_values(0.6, 0.25).J,
        "U: J(U,1/4)=1/2": solve_U(0.25, 0.5),
    }
    vs = np.linspace(1 / 6, 0.25, cfg.v_grid)
    ab = [{"V": float(v), "alpha": alpha_of(v), "beta": beta_of(v)} for v in vs]
    near_line = [{"V": float(v), "J(1-V,V)": greaves_values(1 - v, v).J} for v in vs]
    exps = [{"theta": t, "r1": r1_of(t), "r2": r2_of(t)} for t in cfg.thetas]
    out = {"anchors": anchors, "alpha_beta": ab, "J_on_U_plus_V_eq_1": near_line, "exponents": exps}
    print(json.dumps(out, indent=2))
    return out


if __name__ == "__main__":
    main()
