"""Command-line driver.

Every command builds an ``ExperimentConfig``, runs one chain of module
operations and writes report rows. Exit status is 0 when every asserted row
passes, 1 when one fails and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import busemann as bus
from . import cone as cn
from . import duality as du
from . import geodesics as geo
from . import queueing as qu
from . import stationary as st
from .env import Kind, WeightDistribution, distribution_constants, replica_seed, sample_field
from .errors import LPPError
from .invariants import exact_suite
from .lpp import Convention, estimate_shape, passage_time
from .report import ExperimentConfig, ReportRow, bound, check, info, write_report
from .stats import mean_stderr

ALPHA_GRID = 100


def make_distribution(cfg: ExperimentConfig) -> WeightDistribution:
    k = Kind(cfg.dist)
    if k is Kind.EXPONENTIAL:
        return WeightDistribution.exponential(1.0 if cfg.mean is None else cfg.mean)
    if k is Kind.GEOMETRIC:
        return WeightDistribution.geometric(2.0 if cfg.mean is None else cfg.mean)
    if k is Kind.BERNOULLI_MAX:
        return WeightDistribution.bernoulli_max(0.95 if cfg.p1 is None else cfg.p1)
    if not cfg.values:
        raise LPPError("custom distribution needs --values")
    v = np.asarray(cfg.values, float)
    return WeightDistribution.custom(v, float(v.mean()), float(v.var()) if len(v) > 1 else None)


def _model(dist: WeightDistribution) -> du.ClosedFormGamma:
    m, sigma = distribution_constants(dist)
    return du.ClosedFormGamma(m, sigma)


def cmd_shape(cfg: ExperimentConfig) -> List[ReportRow]:
    dist = make_distribution(cfg)
    est = estimate_shape(dist, [cfg.xi], cfg.n, cfg.replicas, cfg.seed, cfg.threads, Convention(cfg.convention))
    r = est.rows[0]
    if r.target is None:
        return [info("shape.n^-1G", r.mean, r.stderr)]
    return [check("shape.n^-1G", r.mean, r.target, 0.05, "closed-form", r.stderr)]


def cmd_busemann(cfg: ExperimentConfig) -> List[ReportRow]:
    dist = make_distribution(cfg)
    win = (0, 0, cfg.window, cfg.window)
    means = bus.replicated_means(dist, cfg.xi, cfg.n, win, cfg.replicas, cfg.seed)
    fld = bus.field_for(dist, cfg.xi, cfg.n, replica_seed(cfg.seed, 0), win)
    s = bus.estimate_busemann(fld, cfg.xi, cfg.n, win)
    rows = [bound("busemann.recovery", s.recovery_residual(), 0.0, 1e-9, "property"),
            bound("busemann.additivity", s.additivity_residual(), 0.0, 1e-9, "property")]
    for i, name in enumerate(("B1", "B2")):
        mu, se = mean_stderr(means[:, i])
        if dist.is_solvable:
            m, sigma = distribution_constants(dist)
            rows.append(check(f"busemann.mean_{name}", mu, st.boundary_means(m, sigma, cfg.xi)[i], 0.1,
                              "closed-form", se))
        else:
            rows.append(info(f"busemann.mean_{name}", mu, se))
    return rows


def cmd_stationary(cfg: ExperimentConfig) -> List[ReportRow]:
    dist = make_distribution(cfg)
    cf = st.stationary_field(dist, cfg.xi, cfg.L, cfg.L, cfg.seed)
    tol = 0.0 if dist.is_integer_valued else 1e-9
    rows = [bound("stationary.recovery", cf.recovery_residual(), 0.0, tol, "property"),
            bound("stationary.additivity", cf.additivity_residual(), 0.0, tol, "property"),
            bound("stationary.corner_independence", st.corner_independence_residual(cf), 0.0, tol, "property"),
            bound("stationary.variational", cf.variational_residual(), 0.0, tol, "property")]
    mu = cf.boundary.means
    rows += [info("stationary.tilt_1", cf.tilt[0], target=-mu[0]), info("stationary.tilt_2", cf.tilt[1], target=-mu[1]),
             info("stationary.-h.xi", float(-cf.tilt @ np.asarray(cfg.xi)),
                  target=du.gpp(_model(dist), cfg.xi))]
    if cfg.L >= 64:
        rows.append(info("stationary.two_box_ks_p", st.stationarity_ks(cf, cfg.L // 4)))
    return rows


def cmd_burke(cfg: ExperimentConfig) -> List[ReportRow]:
    dist = make_distribution(cfg)
    rows, passes = [], 0
    for r in range(cfg.replicas):
        rep = st.burke_check(st.stationary_field(dist, cfg.xi, cfg.L, cfg.L, replica_seed(cfg.seed, r)))
        passes += rep.passes(0.01)
        rows += [info("burke.Y_ks_p", rep.y.pvalue, replica=r), info("burke.B1_ks_p", rep.b1.pvalue, replica=r),
                 info("burke.B2_ks_p", rep.b2.pvalue, replica=r)]
    rows.append(bound("burke.pass_fraction", passes / cfg.replicas, 0.8, 1.0, "property"))
    return rows


def cmd_exit_point(cfg: ExperimentConfig) -> List[ReportRow]:
    dist = make_distribution(cfg)
    m, _ = distribution_constants(dist)
    alpha = cfg.alpha if cfg.alpha is not None else 2 * m
    s = cfg.s if cfg.s is not None else 4.0
    rep = st.exit_point(dist, alpha, s, cfg.n, cfg.replicas, cfg.seed)
    return [bound("exit.north_frequency", rep.north_frequency, 0.95, 1.0, "property"),
            check("exit.normalized_entry", rep.mean_normalized_entry, rep.target, 0.05, "derived-oracle",
                  rep.stderr_entry)]


def _alpha(cfg, dist) -> float:
    m, _ = distribution_constants(dist)
    return cfg.alpha if cfg.alpha is not None else m + 1.0


def cmd_queue(cfg: ExperimentConfig) -> List[ReportRow]:
    S = make_distribution(cfg)
    alpha = _alpha(cfg, S)
    law = qu.fixed_point_law(S, alpha)
    k = cfg.stations
    tab = qu.iterate_tandem(law, S, cfg.n, k + 1, cfg.seed)
    stt = qu.station_stats(tab, [0, k], law)[-1]
    model = _model(S)
    rows = [bound("queue.conservation", tab.conservation_residual(), 0.0, 0.0 if S.is_integer_valued else 1e-9,
                  "property"),
            bound(f"queue.station{k}_ks_p", stt.ks.pvalue, 0.01, 1.0, "property"),
            check(f"queue.station{k}_mean_A", stt.mean, float(tab.arrivals(0).mean()),
                  4 * distribution_constants(law)[1] / math.sqrt(len(tab.arrivals(k))), "property"),
            check(f"queue.sojourn_mean", qu.sojourn_mean(tab, k), model.f(alpha), 0.1, "closed-form")]
    if S.kind is Kind.GEOMETRIC:
        m = S.mean
        rows.append(check("queue.P(W=0)", qu.idle_fraction(tab, k), (alpha - m) / (alpha - 1), 0.02, "closed-form"))
    return rows


def cmd_couple(cfg: ExperimentConfig) -> List[ReportRow]:
    S = make_distribution(cfg)
    m, _ = distribution_constants(S)
    a = cfg.alpha if cfg.alpha is not None else m + 0.5
    b = cfg.beta if cfg.beta is not None else m + 1.0
    x, y = qu.coupled_monotone([a, b], S, cfg.n, cfg.stations, cfg.seed)
    return [bound("couple.violations", qu.monotone_violations(x, y), 0, 0, "property")]


def cmd_geodesic(cfg: ExperimentConfig) -> List[ReportRow]:
    dist = make_distribution(cfg)
    cf = st.stationary_field(dist, cfg.xi, cfg.L, cfg.L, cfg.seed)
    rows = []
    for rule in geo.TieRule:
        p = geo.cocycle_geodesic(cf, (0, 0), rule).path
        pts = p.points()
        end = tuple(int(c) for c in pts[-2])  # last site inside the bulk
        g = passage_time(cf.weights, (0, 0), end)
        w = float(cf.weights.values[pts[:-2, 0], pts[:-2, 1]].sum())
        rows.append(bound(f"geodesic.{rule.value}.weight_minus_G", abs(w - g), 0.0, 1e-9, "derived-oracle"))
        if len(p.steps) >= 100:
            d = geo.directedness(p)
            rows.append(check(f"geodesic.{rule.value}.direction_e1", d.endpoint[0], cfg.xi[0], 0.05, "closed-form"))
    return rows


def cmd_coalesce(cfg: ExperimentConfig) -> List[ReportRow]:
    dist = make_distribution(cfg)
    Ls = [cfg.L // 4, cfg.L // 2, cfg.L]
    rep = geo.coalescence_experiment(dist, cfg.xi, Ls, 8, cfg.replicas, cfg.seed)
    rows = [info(f"coalesce.fraction_L{L}", f) for L, f in zip(rep.L, rep.fraction)]
    rows.append(bound("coalesce.nondecreasing", float(all(np.diff(rep.fraction) >= 0)), 1.0, 1.0, "property"))
    rows.append(bound(f"coalesce.fraction_L{rep.L[-1]}", rep.fraction[-1], 0.9, 1.0, "derived-oracle"))
    return rows


def cmd_cif(cfg: ExperimentConfig) -> List[ReportRow]:
    from .invariants import interface_monotonicity_violation
    dist = make_distribution(cfg)
    fld = sample_field(dist, cfg.n, cfg.n, cfg.seed)
    rows = [bound("cif.D_nonincreasing", interface_monotonicity_violation(fld, cfg.n), 0.0,
                  0.0 if dist.is_integer_valued else 1e-9, "property")]
    variants = ("right", "left") if dist.is_integer_valued else ("unique",)
    for v in variants:
        tr = geo.competition_interface(fld, cfg.n, v)
        rows += [info(f"cif.{v}.direction_e1", tr.terminal_direction[0]), info(f"cif.{v}.theta", tr.theta)]
    return rows


def cmd_cif_law(cfg: ExperimentConfig) -> List[ReportRow]:
    dist = make_distribution(cfg)
    law = geo.cif_direction_law(dist, cfg.n, cfg.replicas, cfg.seed, cfg.threads)
    rows = []
    grid = np.linspace(0, math.pi / 2, 19)[1:-1]
    for v, d in law.ks.items():
        rows.append(bound(f"cif_law.{v}.ks_distance", d, 0.0, 0.05, "derived-oracle"))
        emp = law.empirical_cdf(v, grid)
        ana = law.cdfs[v](grid)
        rows += [info(f"cif_law.{v}.cdf[t={t:.4f}]", e, target=a) for t, e, a in zip(grid, emp, ana)]
    return rows


def cmd_cone(cfg: ExperimentConfig) -> List[ReportRow]:
    p1 = 0.95 if cfg.p1 is None else cfg.p1
    betas = [cn.right_edge(p1, cfg.n, replica_seed(cfg.seed, r)).beta_hat for r in range(cfg.replicas)]
    mu, se = mean_stderr(betas)
    rows = [info("cone.beta_hat", mu, se)]
    rep = cn.flat_edge_check(p1, cfg.xi, cfg.n, cfg.replicas, cfg.seed)
    rows.append(info("cone.survival_fraction", rep.survival))
    if rep.supercritical and min(cfg.xi) / sum(cfg.xi) > 1 - mu:
        rows.append(bound("cone.n^-1G_inside", rep.mean, 0.995, 1.0, "derived-oracle", rep.stderr))
    else:
        rows.append(bound("cone.n^-1G", rep.mean, 0.0, 1.0, "closed-form", rep.stderr))
    return rows


def cmd_duality(cfg: ExperimentConfig) -> List[ReportRow]:
    dist = make_distribution(cfg)
    model = _model(dist)
    m = model.m
    alphas = m + m * np.logspace(-3, 2, ALPHA_GRID)
    inv = max(abs(model.f(model.f(a)) - a) / a for a in alphas)
    rng = np.random.default_rng(cfg.seed)
    trip, gpl = 0.0, 0.0
    for a in rng.uniform(0.02, 0.98, 20):
        xi = (a, 1 - a)
        h = -du.grad_gpp(model, xi)
        rec = du.tilt_velocity(model, h)
        trip = max(trip, abs(rec.xi[0] - xi[0]))
        gpl = max(gpl, abs(du.point_to_line_limit(model, h)))
    return [bound("duality.involution_residual", inv, 0.0, 1e-9, "closed-form"),
            bound("duality.round_trip", trip, 0.0, 1e-10, "property"),
            bound("duality.gpl_at_minus_grad", gpl, 0.0, 1e-10, "closed-form")]


def cmd_selftest(cfg: ExperimentConfig) -> List[ReportRow]:
    return exact_suite()


COMMANDS: Dict[str, Callable[[ExperimentConfig], List[ReportRow]]] = {
    "shape": cmd_shape, "busemann": cmd_busemann, "stationary": cmd_stationary, "burke": cmd_burke,
    "exit-point": cmd_exit_point, "queue": cmd_queue, "couple": cmd_couple, "geodesic": cmd_geodesic,
    "coalesce": cmd_coalesce, "cif": cmd_cif, "cif-law": cmd_cif_law, "cone": cmd_cone,
    "duality": cmd_duality, "selftest": cmd_selftest,
}

HELP = {
    "shape": "replica mean of n^-1 G(0, floor(n xi)) against the closed form",
    "busemann": "window means of passage-time gradients toward floor(n xi)",
    "stationary": "exact identities and tilt of a stationary boundary model on an L x L box",
    "burke": "KS tests of the Burke property over replicas of an L x L stationary model",
    "exit-point": "exit side and entry point of stationary maximizers toward |v| = n",
    "queue": "tandem queues at the fixed point: station marginal, sojourn mean, idle fraction",
    "couple": "monotone coupling of two tandem systems with deterministic arrivals alpha < beta",
    "geodesic": "cocycle geodesics on a stationary model: optimality and direction",
    "coalesce": "coalescence of cocycle geodesics from 0 and 8 e2 for L/4, L/2, L",
    "cif": "competition interface on one field of n levels",
    "cif-law": "empirical law of the competition interface angle against the analytic CDF",
    "cone": "percolation right edge and the flat edge of the shape",
    "duality": "involution, round trip and point-to-line identities of the conjugate pair",
    "selftest": "all exact deterministic identities",
}


def _pair(text: str):
    a, b = (float(x) for x in text.split(","))
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpp-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    default_seed = int(os.environ.get("LPP_LAB_SEED", "0"))
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HELP[name], description=HELP[name])
        sp.add_argument("--dist", choices=[k.value for k in Kind], default="exp")
        sp.add_argument("--mean", type=float)
        sp.add_argument("--p1", type=float)
        sp.add_argument("--values", type=lambda t: tuple(float(x) for x in t.split(",")),
                        help="comma-separated support of a custom law")
        sp.add_argument("--xi", type=_pair, default=(0.5, 0.5), help="direction a,b")
        sp.add_argument("--n", type=int, default=1000)
        sp.add_argument("--L", type=int, default=128)
        sp.add_argument("--window", type=int, default=100)
        sp.add_argument("--replicas", type=int, default=50)
        sp.add_argument("--seed", type=int, default=default_seed)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--s", type=float, help="target slope for exit-point")
        sp.add_argument("--stations", type=int, default=50)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--convention", choices=[c.value for c in Convention], default="exclude-last")
        sp.add_argument("--threads", type=int, default=1)
    return p


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    d = {k: v for k, v in vars(ns).items()}
    return ExperimentConfig(**d)


def run(config: ExperimentConfig) -> int:
    rows = COMMANDS[config.command](config)
    text = write_report(config, rows)
    if not config.out:
        sys.stdout.write(text)
    failed = [r for r in rows if r.passed is False]
    for r in failed:
        sys.stderr.write(f"FAIL {r.metric}: {r.estimate!r} not in [{r.lower!r}, {r.upper!r}]\n")
    return 1 if failed else 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return run(config_from_args(ns))
    except LPPError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
