"""Convergence of the C2 Euler product and the W(z) normalisation against Mertens' constant.

    python scripts/euler_convergence.py
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from frobtrace.gl2 import c2_with_bound, w_product


@dataclass
class ConvergenceConfig:
    m_E: int = 2
    cutoffs: tuple[int, ...] = (10**2, 10**3, 10**4, 10**5, 10**6)
    z_values: tuple[float, ...] = (1e2, 1e3, 1e4, 1e5, 1e6)


def main(cfg: ConvergenceConfig = ConvergenceConfig()) -> dict:
    ref = c2_with_bound(cfg.m_E, cutoff=cfg.cutoffs[-1])[0]
    c2 = []
    for y in cfg.cutoffs:
        value, bound, _ = c2_with_bound(cfg.m_E, cutoff=y)
        c2.append({"cutoff": y, "C2": value, "tail_bound": bound, "gap_to_last": abs(value - ref)})
    target = math.exp(-np.euler_gamma)
    w = [
        {"z": z, "W*log z/C2": w_product(cfg.m_E, z) * math.log(z) / ref, "e^-gamma": target}
        for z in cfg.z_values
    ]
    out = {"m_E": cfg.m_E, "C2": c2, "W": w}
    print(json.dumps(out, indent=2))
    return out


if __name__ == "__main__":
    main()
