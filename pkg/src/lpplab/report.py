"""Experiment configuration and report serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional, Tuple

from . import __version__

PROVENANCE = ("closed-form", "derived-oracle", "property")


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    dist: str = "exp"
    mean: Optional[float] = None
    p1: Optional[float] = None
    values: Optional[Tuple[float, ...]] = None
    xi: Tuple[float, float] = (0.5, 0.5)
    n: int = 1000
    L: int = 128
    window: int = 100
    replicas: int = 50
    seed: int = 0
    alpha: Optional[float] = None
    beta: Optional[float] = None
    s: Optional[float] = None
    stations: int = 50
    out: Optional[str] = None
    format: str = "csv"
    convention: str = "exclude-last"
    threads: int = 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("threads")  # scheduling only, never changes results
        return d


@dataclass
class ReportRow:
    """One metric; asserted rows carry [lower, upper] and a provenance tag."""

    metric: str
    estimate: float
    stderr: float = float("nan")
    target: Optional[float] = None
    provenance: Optional[str] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    passed: Optional[bool] = None
    replica: Optional[int] = None

    def __post_init__(self):
        if self.passed is not None and self.provenance not in PROVENANCE:
            raise ValueError(f"asserted row {self.metric!r} needs a provenance in {PROVENANCE}")


def check(metric, estimate, target, tol, provenance, stderr=float("nan"), replica=None) -> ReportRow:
    """Row that passes when |estimate - target| <= tol."""
    ok = bool(abs(estimate - target) <= tol)
    return ReportRow(metric, float(estimate), float(stderr), float(target), provenance,
                     float(target - tol), float(target + tol), ok, replica)


def bound(metric, estimate, lo, hi, provenance, stderr=float("nan")) -> ReportRow:
    """Row that passes when lo <= estimate <= hi."""
    ok = bool(lo <= estimate <= hi)
    return ReportRow(metric, float(estimate), float(stderr), None, provenance, float(lo), float(hi), ok)


def info(metric, estimate, stderr=float("nan"), target=None, replica=None) -> ReportRow:
    """Reported but not asserted."""
    return ReportRow(metric, float(estimate), float(stderr), None if target is None else float(target),
                     replica=replica)


def manifest(config: ExperimentConfig) -> dict:
    return {"config": config.to_dict(), "seed": config.seed, "version": __version__}


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "pass" if x else "fail"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render(config: ExperimentConfig, rows: List[ReportRow]) -> str:
    if config.format == "json":
        def clean(v):
            return None if isinstance(v, float) and not math.isfinite(v) else v
        payload = {"manifest": manifest(config),
                   "rows": [{k: clean(v) for k, v in asdict(r).items()} for r in rows]}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = [f.name for f in fields(ReportRow)]
    w.writerow(names)
    for r in rows:
        w.writerow([_fmt(getattr(r, k)) for k in names])
    return buf.getvalue()


def write_report(config: ExperimentConfig, rows: List[ReportRow]) -> Optional[str]:
    """Write the report and a sibling ``.manifest.json``; returns the text."""
    text = render(config, rows)
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if config.format == "csv":
            with open(config.out + ".manifest.json", "w", encoding="utf-8") as fh:
                json.dump(manifest(config), fh, indent=2, sort_keys=True)
                fh.write("\n")
    return text
