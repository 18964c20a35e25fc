"""n^-1 G_{0, floor(n xi)} for BernoulliMax weights over a range of n.

By superadditivity the mean increases with n toward g_pp(xi), so the values
bound the limit from below.
"""
import argparse
import csv
import sys
from dataclasses import dataclass

from lpplab.cone import flat_edge_check, right_edge


@dataclass(frozen=True)
class Config:
    p1: float = 0.95
    a: float = 0.99
    replicas: int = 20
    seed: int = 1
    ns: str = "250,500,1000,2000,4000"


def run(cfg: Config):
    beta = right_edge(cfg.p1, 2000, cfg.seed).beta_hat
    w = csv.writer(sys.stdout)
    w.writerow(["n", "xi1", "mean", "stderr", "beta_hat"])
    for n in (int(x) for x in cfg.ns.split(",")):
        r = flat_edge_check(cfg.p1, (cfg.a, 1 - cfg.a), n, cfg.replicas, cfg.seed)
        w.writerow([n, cfg.a, f"{r.mean:.5f}", f"{r.stderr:.5f}", f"{beta:.4f}"])


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for f, d in Config.__dataclass_fields__.items():
        p.add_argument(f"--{f.replace('_', '-')}", type=type(d.default), default=d.default)
    run(Config(**vars(p.parse_args())))
