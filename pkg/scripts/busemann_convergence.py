"""Replica-averaged Busemann window means against the boundary laws, for
several target distances and both target anchors."""
import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from lpplab.busemann import estimate_busemann, field_for
from lpplab.env import WeightDistribution, replica_seed
from lpplab.stationary import boundary_means


@dataclass(frozen=True)
class Config:
    a: float = 0.8
    window: int = 100
    replicas: int = 40
    seed: int = 1
    ns: str = "2000,4000,8000"


def run(cfg: Config):
    xi = (cfg.a, 1 - cfg.a)
    win = (0, 0, cfg.window, cfg.window)
    target = boundary_means(1.0, 1.0, xi)
    w = csv.writer(sys.stdout)
    w.writerow(["n", "anchor", "mean_B1", "se_B1", "mean_B2", "se_B2", "target_B1", "target_B2"])
    for n in (int(x) for x in cfg.ns.split(",")):
        for anchor in ("center", "corner"):
            m = np.empty((cfg.replicas, 2))
            for r in range(cfg.replicas):
                fld = field_for(WeightDistribution.exponential(), xi, n, replica_seed(cfg.seed, r), win)
                m[r] = estimate_busemann(fld, xi, n, win, anchor).means
            se = m.std(0, ddof=1) / np.sqrt(cfg.replicas)
            w.writerow([n, anchor, f"{m[:, 0].mean():.4f}", f"{se[0]:.4f}", f"{m[:, 1].mean():.4f}",
                        f"{se[1]:.4f}", f"{target[0]:.4f}", f"{target[1]:.4f}"])


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for f, d in Config.__dataclass_fields__.items():
        p.add_argument(f"--{f.replace('_', '-')}", type=type(d.default), default=d.default)
    run(Config(**vars(p.parse_args())))
