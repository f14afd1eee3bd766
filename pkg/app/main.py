import argparse
import os
import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import expm

# Add the current directory to sys.path to allow relative imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.coinv.checks import factorization_check, hat_iota_invariance_check
from app.coinv.problem import CoinvProblem, cc_dim
from app.exactnum.cyclotomic import CyclotomicField
from app.config.config_loader import apply_overrides, load_config
from app.config.config_schema import AppConfig
from app.kz.connection import KZSystem
from app.kz.rmatrix import (cybe_residual, degeneration_slope, equivariance_residual, random_spectral_points,
                            residue_is_casimir, unitarity_residual)
from app.kz.transport import constant_transport, transport
from app.report.checks import EXIT_CODES, Check, run_status
from app.report.writer import ReportWriter, dumps
from app.repmods.modules import build_module, node_pairing
from app.repmods.forms import RadicalData
from app.twistalg.matrices import GMat
from app.twistalg.weights import AffineWeight, is_dominant_integral, rep_dim, weight_tilde
from app.utils.errors import ConfigError, InconclusiveError, TwistWZWError
from app.utils.logger import logger, setup_logger
from app.wfun.sections import q_expand, split_singular
from app.wfun.wmul import check_quasiperiodicity, residue_at_one, wmul_product_value, wmul_q0, wmul_series

COMMANDS = ("w-eval", "w-check", "split", "coinv-dim", "factorize", "pairing-gram", "weight-map",
            "cybe", "kz-flatness", "kz-transport")

Result = Tuple[Dict, List[Check], List[Dict]]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistwzw", description="Twisted WZW computations on the q = 0 fiber")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default="config.yml")
    parser.add_argument("--N", dest="n", type=int)
    parser.add_argument("--k", type=Fraction, help="level, an integer or a fraction such as 1/2")
    parser.add_argument("--order", dest="q_order", type=int)
    parser.add_argument("--D", dest="max_degree", type=int)
    parser.add_argument("--P", dest="max_pole", type=int)
    parser.add_argument("--points", nargs="+")
    parser.add_argument("--V", dest="modules", nargs="+")
    parser.add_argument("--rank", choices=("exact", "modular"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output")
    parser.add_argument("--csv", action="store_true")
    parser.add_argument("--a", type=int, default=1)
    parser.add_argument("--b", type=int, default=0)
    parser.add_argument("--u", default="2")
    parser.add_argument("--q", default="0.1")
    parser.add_argument("--pole-order", type=int, default=1)
    parser.add_argument("--model", choices=("trig", "orb"), default="trig")
    parser.add_argument("--marked", choices=("weyl", "integrable"), default="weyl")
    parser.add_argument("--node", choices=("verma", "irreducible"), default="verma")
    parser.add_argument("--mu0", nargs="+", help="node-0 weight as values mu(H_i), i = 1..N-1")
    parser.add_argument("--muinf", nargs="+", help="node-infinity weight; defaults to -mu0")
    parser.add_argument("--lambda", dest="lam", nargs="+", help="finite weight as values lambda(H_i)")
    parser.add_argument("--samples", type=int, default=20)
    return parser


def _weight(values: Optional[List[str]], n: int, level) -> AffineWeight:
    if not values:
        return AffineWeight.zero(n, level)
    if len(values) != n - 1:
        raise ConfigError(f"A weight for N={n} needs {n - 1} values, got {len(values)}")
    return AffineWeight.from_h_values([Fraction(v) for v in values], level)


def _exact_points(config: AppConfig) -> List[Fraction]:
    try:
        return [Fraction(p) for p in config.compute.points]
    except ValueError as e:
        raise ConfigError(f"Points must be exact rationals: {e}")


def _complex_points(config: AppConfig) -> List[complex]:
    try:
        return [complex(p) for p in config.compute.points]
    except ValueError as e:
        raise ConfigError(f"Points must be numbers: {e}")


def cmd_w_eval(config: AppConfig, args) -> Result:
    c = config.compute
    u, q = complex(args.u), complex(args.q)
    w = wmul_series(c.n, args.a, args.b, c.q_order)
    series_value = w.eval_complex(u, q, tol=config.tolerance.pole)
    product_value = wmul_product_value(c.n, args.a, args.b, q, u)
    results = {"a": args.a, "b": args.b, "u": u, "q": q, "q0": repr(wmul_q0(c.n, args.a, args.b)),
               "series": series_value, "product": product_value, "difference": abs(series_value - product_value)}
    bound = 10 * abs(q) ** (c.q_order + 1)
    checks = [Check.from_bool("series matches product formula", abs(series_value - product_value) < max(bound, 1e-12),
                              f"difference {abs(series_value - product_value):.3e}")]
    return results, checks, []


def cmd_w_check(config: AppConfig, args) -> Result:
    n = config.compute.n
    expected_residue = CyclotomicField.get(n).from_rational(Fraction(1, n))
    results, checks = {}, []
    for a in range(n):
        for b in range(n):
            if (a, b) == (0, 0):
                continue
            w = wmul_series(n, a, b, config.compute.q_order)
            report = check_quasiperiodicity(w)
            results[f"{a},{b}"] = report.to_dict()
            checks.append(Check.from_bool(f"q^0 limit of w_{a}{b}", w.q0() == wmul_q0(n, a, b)))
            checks.append(Check.from_bool(f"periodicity of w_{a}{b}", report.eps_ok and report.q_ok,
                                          report.first_failure or ""))
            checks.append(Check.from_bool(f"residue of w_{a}{b} at 1", residue_at_one(n, a, b) == expected_residue))
    return results, checks, []


def cmd_split(config: AppConfig, args) -> Result:
    c = config.compute
    points = _exact_points(config)
    germs = {0: {(args.a, args.b): {m: 1 for m in range(1, args.pole_order + 1)}}}
    section, certificate = split_singular(c.n, points, germs)
    x_chart = q_expand(section, "x", min(c.q_order, 4))
    y_chart = q_expand(section, "y", min(c.q_order, 4))
    results = {"section": section.to_dict(), "x_failures": x_chart.failures, "y_failures": y_chart.failures}
    checks = [Check.from_bool("principal parts matched", certificate.ok),
              Check.from_bool("x-chart equivariance and pole bounds", x_chart.periodicity_ok and x_chart.pole_bound_ok),
              Check.from_bool("y-chart equivariance and pole bounds", y_chart.periodicity_ok and y_chart.pole_bound_ok)]
    return results, checks, []


def cmd_coinv_dim(config: AppConfig, args) -> Result:
    c = config.compute
    points = _exact_points(config)
    kind = "weyl" if args.marked == "weyl" else "integrable"
    marked = [build_module(kind, c.n, c.level, c.max_degree, rep=rep) for rep in c.modules]
    dominant = True
    if args.model == "orb":
        mu0 = _weight(args.mu0, c.n, c.level)
        muinf = _weight(args.muinf, c.n, c.level) if args.muinf else AffineWeight(mu0.level, tuple(-v for v in mu0.values))
        suffix = "0" if args.node == "irreducible" else ""
        node0 = build_module("irreducible0" if suffix else "verma0", c.n, c.level, c.max_degree, weight=mu0)
        nodeinf = build_module("irreducibleinf" if suffix else "vermainf", c.n, c.level, c.max_degree, weight=muinf)
        dominant = is_dominant_integral(mu0, "node0") and is_dominant_integral(muinf, "nodeinf")
        problem = CoinvProblem("orb", c.n, points, marked, node0, nodeinf, c.rank_method, c.primes)
    else:
        problem = CoinvProblem("trig", c.n, points, marked, rank_method=c.rank_method, primes=c.primes)
    result = cc_dim(problem, c.max_degree, c.pole_bound())
    checks = [Check("stabilized", "pass" if result.stabilized else "inconclusive", str(result.dims))]
    if args.model == "trig" and kind == "weyl" and result.stabilized:
        expected = int(np.prod([rep_dim(r, c.n) for r in c.modules]))
        checks.append(Check.from_bool("Weyl coinvariants are free of rank dim V", result.dim == expected,
                                      f"dim {result.dim}, expected {expected}"))
    if args.model == "orb" and not dominant and result.stabilized and kind == "integrable":
        checks.append(Check.from_bool("non-dominant node weight gives zero", result.dim == 0, f"dim {result.dim}"))
    rows = [{"degree": d, "dim": v} for d, v in result.dims.items()]
    return result.to_dict(), checks, rows


def cmd_factorize(config: AppConfig, args) -> Result:
    c = config.compute
    report = factorization_check(c.n, c.level, c.modules, _exact_points(config), c.max_degree,
                                 c.pole_bound(), c.rank_method, c.primes)
    status = {"ok": "pass", "fail": "fail", "inconclusive": "inconclusive"}[report.status]
    results = report.to_dict()
    results["equal"] = report.lhs.dim == report.rhs
    checks = [Check("trig coinvariants factor over dominant weights", status, f"LHS {report.lhs.dim}, RHS {report.rhs}")]
    return results, checks, []


def cmd_pairing_gram(config: AppConfig, args) -> Result:
    c = config.compute
    mu0 = _weight(args.mu0, c.n, c.level)
    pairing = node_pairing(mu0, c.max_degree)
    radical = RadicalData(pairing)
    hw0, hwinf = pairing.left.highest_weight_vector(), pairing.right.highest_weight_vector()
    results = {"weight": mu0.to_dict(), "verma_dims": pairing.left.graded_dims(), "ranks": radical.ranks()}
    checks = [Check.from_bool("<hw, hw> = 1", pairing.pair(hw0, hwinf) == 1)]
    rng = np.random.default_rng(c.seed)
    bad = 0
    field = pairing.field
    for _ in range(args.samples):
        d = int(rng.integers(0, c.max_degree))
        left = pairing.left.basis(d)
        u = {left[int(rng.integers(len(left)))]: field.one}
        depth = int(rng.integers(1, c.max_degree - d + 1))
        mode = pairing.left.modes_at_depth(depth)[int(rng.integers(len(pairing.left.modes_at_depth(depth))))]
        n_, a, b = mode
        right = pairing.right.basis(d + depth)
        v = {right[int(rng.integers(len(right)))]: field.one}
        lhs = pairing.pair(pairing.left.act(mode, u), v)
        rhs = pairing.pair(u, pairing.right.act((-n_, a, b), v)) * field.eps(b)
        if lhs + rhs:
            bad += 1
    checks.append(Check.from_bool("pairing invariance on random pairs", bad == 0, f"{bad} failures of {args.samples}"))
    for mode in (-1, 0, 1):
        report = hat_iota_invariance_check(mu0, GMat.elementary(field, 0, 1), mode, min(c.max_degree, 3))
        checks.append(Check.from_bool(f"dual-basis invariance for E_12, n = {mode}", report.ok, str(report.to_dict())))
    return results, checks, []


def cmd_weight_map(config: AppConfig, args) -> Result:
    c = config.compute
    lam = _weight(args.lam, c.n, 0)
    tilde, prime = weight_tilde(lam, c.level)
    results = {"lambda": lam.to_dict(), "tilde": tilde.to_dict(), "prime": prime.to_dict(),
               "tilde_pairings": tilde.pairing_values("node0"), "prime_pairings": prime.pairing_values("nodeinf"),
               "tilde_pairings_by_index": tilde.coroot_pairings("node0"),
               "dominant": is_dominant_integral(tilde, "node0")}
    return results, [Check("weight map computed", "pass")], []


def cmd_cybe(config: AppConfig, args) -> Result:
    c = config.compute
    tol = config.tolerance
    rng = np.random.default_rng(c.seed)
    rows = []
    worst = 0.0
    while len(rows) < args.samples:
        u12, u23 = random_spectral_points(rng, 2, c.n)
        if abs((u12 * u23) ** c.n - 1) < 0.1:
            continue
        value = cybe_residual(c.n, u12, u23, tol=tol.pole)
        worst = max(worst, value)
        rows.append({"sample": len(rows), "u12": repr(u12), "u23": repr(u23), "residual": value})
    u = complex(args.u)
    slope, norms = degeneration_slope(c.n, u, [1e-2, 1e-3, 1e-4], c.q_order, tol.pole)
    results = {"max_residual": worst, "unitarity": unitarity_residual(c.n, u, tol.pole),
               "equivariance": equivariance_residual(c.n, u, tol.pole), "degeneration_slope": slope,
               "degeneration_norms": norms}
    checks = [Check.from_bool("classical Yang-Baxter equation", worst < tol.cybe, f"max residual {worst:.3e}"),
              Check.from_bool("unitarity", results["unitarity"] < tol.cybe),
              Check.from_bool("eps-equivariance", results["equivariance"] < tol.cybe),
              Check.from_bool("residue at 1 is Casimir / N", residue_is_casimir(c.n)),
              Check.from_bool("degeneration slope", slope >= tol.degeneration_slope, f"slope {slope:.3f}")]
    return results, checks, rows


def cmd_kz_flatness(config: AppConfig, args) -> Result:
    c = config.compute
    system = KZSystem(c.n, c.level, list(c.modules), config.tolerance.pole)
    rng = np.random.default_rng(c.seed)
    rows = []
    worst = 0.0
    count = len(c.modules)
    configs = [_complex_points(config)] if len(c.points) == count else []
    while len(configs) < args.samples:
        pts = random_spectral_points(rng, count, c.n)
        if all(abs(pts[i] ** c.n - pts[j] ** c.n) > 0.1 for i in range(count) for j in range(i + 1, count)):
            configs.append(pts)
    for k, pts in enumerate(configs):
        for i in range(count):
            for j in range(i + 1, count):
                value = system.flatness_residual(i, j, pts)
                worst = max(worst, value)
                rows.append({"sample": k, "i": i, "j": j, "residual": value})
    checks = [Check.from_bool("KZ flatness", worst < config.tolerance.flatness, f"max residual {worst:.3e}")]
    return {"max_residual": worst, "configurations": len(configs)}, checks, rows


def cmd_kz_transport(config: AppConfig, args) -> Result:
    c = config.compute
    rtol, atol = config.tolerance.transport, config.tolerance.transport_atol
    system = KZSystem(c.n, c.level, list(c.modules), config.tolerance.pole)
    points = _complex_points(config)
    if len(points) != len(c.modules):
        raise ConfigError(f"{len(points)} points for {len(c.modules)} modules")
    rng = np.random.default_rng(c.seed)
    v0 = rng.normal(size=system.dim) + 1j * rng.normal(size=system.dim)
    x0 = complex(np.log(points[0]))
    loop = [x0 + 0.05 * np.exp(2j * np.pi * t / 8) - 0.05 for t in range(9)]
    around = transport(system, 0, points, loop, v0, rtol, atol)
    forward = transport(system, 0, points, [x0, x0 + 0.1 + 0.05j], v0, rtol, atol)
    back = transport(system, 0, points, [x0 + 0.1 + 0.05j, x0], forward.vector, rtol, atol)
    m = system.operator(0, points)
    stub = constant_transport(m, v0, rtol, atol)
    exact = expm(m) @ v0
    results = {"loop": around.to_dict(), "forward": forward.to_dict(),
               "loop_defect": float(np.linalg.norm(around.vector - v0)),
               "reversal_defect": float(np.linalg.norm(back.vector - v0)),
               "constant_defect": float(np.linalg.norm(stub.vector - exact))}
    checks = [Check.from_bool("closed loop returns the start vector", results["loop_defect"] < 1e-6),
              Check.from_bool("reversed path returns the start vector", results["reversal_defect"] < 1e-8),
              Check.from_bool("constant connection matches expm", results["constant_defect"] < 1e-10 * max(1.0, float(np.linalg.norm(exact))))]
    return results, checks, []


HANDLERS: Dict[str, Callable[[AppConfig, argparse.Namespace], Result]] = {
    "w-eval": cmd_w_eval, "w-check": cmd_w_check, "split": cmd_split, "coinv-dim": cmd_coinv_dim,
    "factorize": cmd_factorize, "pairing-gram": cmd_pairing_gram, "weight-map": cmd_weight_map,
    "cybe": cmd_cybe, "kz-flatness": cmd_kz_flatness, "kz-transport": cmd_kz_transport,
}


def config_summary(config: AppConfig) -> dict:
    c = config.compute
    return {"N": c.n, "k": c.level, "q_order": c.q_order, "max_degree": c.max_degree, "max_pole": c.pole_bound(),
            "points": c.points, "modules": c.modules, "rank_method": c.rank_method, "seed": c.seed}


def run(argv: Optional[List[str]] = None) -> int:
    """Parses flags, runs one command and writes its report; returns the exit code."""
    args = build_parser().parse_args(argv)
    try:
        config = apply_overrides(load_config(args.config), args)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return 2
    setup_logger(level=config.logging.level)
    start_time = time.time()
    logger.info(f"--- Starting {args.command} ---")
    try:
        results, checks, rows = HANDLERS[args.command](config, args)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return 2
    except InconclusiveError as e:
        logger.error(f"{args.command} is inconclusive: {e}", exc_info=True)
        results, checks, rows = {"error": str(e)}, [Check(args.command, "inconclusive", str(e))], []
    except TwistWZWError as e:
        logger.error(f"{args.command} failed after {time.time() - start_time:.2f}s: {e}", exc_info=True)
        results, checks, rows = {"error": str(e)}, [Check(args.command, "fail", str(e))], []
    status = run_status(checks)
    payload = {"command": args.command, "config": config_summary(config), "results": results,
               "checks": [c.to_dict() for c in checks], "status": status}
    writer = ReportWriter(config.output.output_path)
    writer.save_json(payload, f"{args.command}.json")
    if config.output.write_csv:
        writer.save_to_csv(rows, f"{args.command}.csv")
    print(dumps(payload))
    logger.info(f"--- {args.command} finished with status {status} in {time.time() - start_time:.2f} seconds ---")
    return EXIT_CODES[status]


def main():
    """Main entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
