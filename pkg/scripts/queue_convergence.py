"""Distance of the station-k inter-arrival law to the geometric fixed point,
starting from deterministic arrivals, plus sojourn means per station."""
import argparse
import csv
import sys
from dataclasses import dataclass

from lpplab.env import WeightDistribution
from lpplab.queueing import cesaro_distance, idle_fraction, iterate_tandem, station_stats


@dataclass(frozen=True)
class Config:
    alpha: float = 3.0
    m: float = 2.0
    customers: int = 100_000
    stations: int = 50
    seed: int = 1


def run(cfg: Config):
    S = WeightDistribution.geometric(cfg.m)
    law = WeightDistribution.geometric(cfg.alpha)
    tab = iterate_tandem(cfg.alpha, S, cfg.customers, cfg.stations + 1, cfg.seed)
    w = csv.writer(sys.stdout)
    w.writerow(["station", "mean_A", "cdf_distance", "ks_p", "P(W=0)"])
    ks = [1, 2, 3, 5, 10, 20, 30, 40, cfg.stations]
    for s in station_stats(tab, ks, law):
        idle = idle_fraction(tab, s.station) if s.station < cfg.stations + 1 else float("nan")
        w.writerow([s.station, f"{s.mean:.4f}", f"{s.ks_distance:.4f}", f"{s.ks.pvalue:.4f}", f"{idle:.4f}"])
    w.writerow(["cesaro", "", f"{cesaro_distance(tab, law, cfg.stations):.4f}", "", ""])


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for f, d in Config.__dataclass_fields__.items():
        p.add_argument(f"--{f.replace('_', '-')}", type=type(d.default), default=d.default)
    run(Config(**vars(p.parse_args())))
