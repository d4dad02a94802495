"""Batch front door: JSON config in, CSV tables and a JSON summary out.

Subcommands: analyze, decay, frac, mult, verify-examples.  Exit codes:
0 all checks pass, 1 an analysis or consistency check failed, 2 the
configuration is invalid (the diagnostic names the offending field).

Identical (config, seed) pairs produce byte-identical summary.json
regardless of --threads: workers only evaluate independent grid points,
reductions keep a fixed order, and wall-clock timings go to a separate
run_meta.json.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import battery as battery_mod
from . import decaylab, multiplier, numcore, operators, resolvent
from .errors import ConfigError, DomainError, InsufficientDataError

CSV_HEADER = ["case", "t_or_xi", "value", "fit_exponent", "predicted", "source", "verdict"]

DEFAULT_TOLERANCES = {"fit_tol": 0.1, "quad_tol": 1e-6, "consistency_tol": 0.05}

_OPERATOR_KINDS = ("dense-matrix", "diagonal-symbol", "jordan-sum", "operator-matrix")


def format_complex(z):
    """Fixed CSV encoding of complex values: 're+imi'."""
    z = complex(z)
    return f"{z.real:.12g}{z.imag:+.12g}i"


def _fail(field, msg):
    raise ConfigError(f"{field}: {msg}", field)


def _need(cfg, field, path, types=None):
    if field not in cfg:
        _fail(f"{path}.{field}" if path else field, "missing")
    val = cfg[field]
    if types is not None and not isinstance(val, types):
        _fail(f"{path}.{field}" if path else field, f"expected {types}, got {type(val).__name__}")
    return val


def _validate_grid(g, path, min_count=2):
    if not isinstance(g, dict):
        _fail(path, "expected an object with start/stop/count")
    start = _need(g, "start", path, (int, float))
    stop = _need(g, "stop", path, (int, float))
    count = _need(g, "count", path, int)
    if count < min_count:
        _fail(f"{path}.count", f"need at least {min_count} nodes, got {count}")
    if not (0 < start < stop):
        _fail(f"{path}.start", f"need 0 < start < stop, got [{start}, {stop}]")
    return numcore.geometric_grid(float(start), float(stop), int(count))


def _validate_operator(op):
    if not isinstance(op, dict):
        _fail("operator", "expected an object")
    kind = _need(op, "kind", "operator", str)
    if kind not in _OPERATOR_KINDS:
        _fail("operator.kind", f"unknown kind {kind!r}; expected one of {_OPERATOR_KINDS}")
    try:
        return operators.model_from_config(op)
    except KeyError as exc:
        _fail(f"operator.{exc.args[0]}", "missing")
    except DomainError as exc:
        _fail("operator", str(exc))


def _validate_geometry(geo):
    if geo is None:
        return decaylab.GeometryDescriptor(hilbert=True)
    if not isinstance(geo, dict):
        _fail("geometry", "expected an object")
    kwargs = {}
    for key in (
        "hilbert",
        "fourier_type",
        "type_p",
        "cotype_q",
        "positive_semigroup",
        "r_resolvent_growth_asserted",
        "zeta_negative_asserted",
    ):
        if key in geo:
            kwargs[key] = geo[key]
    if "lattice" in geo and geo["lattice"] is not None:
        lat = geo["lattice"]
        if not (isinstance(lat, (list, tuple)) and len(lat) == 2):
            _fail("geometry.lattice", "expected a [p_convex, q_concave] pair")
        kwargs["lattice"] = (float(lat[0]), float(lat[1]))
    try:
        return decaylab.GeometryDescriptor(**kwargs)
    except DomainError as exc:
        _fail("geometry", str(exc))


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        _fail("config", f"file not found: {path}")
    except json.JSONDecodeError as exc:
        _fail("config", f"invalid JSON: {exc}")
    return validate_config(raw)


def validate_config(raw):
    if not isinstance(raw, dict):
        _fail("config", "top level must be an object")
    cfg = {}
    cfg["raw"] = raw
    cfg["model"] = _validate_operator(_need(raw, "operator", ""))
    grids = raw.get("grids", {})
    if not isinstance(grids, dict):
        _fail("grids", "expected an object")
    cfg["t_grid"] = _validate_grid(
        grids.get("t_grid", {"start": 10.0, "stop": 1e4, "count": 32}), "grids.t_grid"
    )
    cfg["xi_grid"] = _validate_grid(
        grids.get("xi_grid", {"start": 1e-2, "stop": 1e3, "count": 64}), "grids.xi_grid"
    )
    fg = grids.get("fourier_grid", {"period": 200.0, "samples": 2**13})
    if not isinstance(fg, dict):
        _fail("grids.fourier_grid", "expected an object")
    try:
        cfg["fourier_grid"] = multiplier.FourierGridSpec(
            float(_need(fg, "period", "grids.fourier_grid", (int, float))),
            int(_need(fg, "samples", "grids.fourier_grid", int)),
        )
    except DomainError as exc:
        _fail("grids.fourier_grid", str(exc))
    cfg["geometry"] = _validate_geometry(raw.get("geometry"))
    indices = raw.get("indices", [[0.0, 1.0]])
    if not isinstance(indices, list) or not indices:
        _fail("indices", "expected a nonempty list of [sigma, tau] pairs")
    parsed = []
    for i, pair in enumerate(indices):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            _fail(f"indices[{i}]", "expected a [sigma, tau] pair")
        sigma, tau = float(pair[0]), float(pair[1])
        if sigma < 0 or tau < 0:
            _fail(f"indices[{i}]", "indices must be >= 0")
        parsed.append((sigma, tau))
    cfg["indices"] = parsed
    tols = dict(DEFAULT_TOLERANCES)
    for key, val in (raw.get("tolerances") or {}).items():
        if key not in DEFAULT_TOLERANCES:
            _fail(f"tolerances.{key}", "unknown tolerance")
        if not isinstance(val, (int, float)) or val <= 0:
            _fail(f"tolerances.{key}", "must be a positive number")
        tols[key] = float(val)
    cfg["tolerances"] = tols
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        _fail("seed", "must be an integer")
    cfg["seed"] = seed
    threads = raw.get("threads", 1)
    if not isinstance(threads, int) or threads < 1:
        _fail("threads", "must be a positive integer")
    cfg["threads"] = threads
    cfg["out_dir"] = raw.get("out_dir", "semistab-out")
    return cfg


def _pmap(fn, items, threads):
    """Order-preserving parallel map; reduction order is fixed by items."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _probe_table_parallel(model, xi_grid, eta, threads):
    def one(xi):
        return resolvent.probe_resolvent_norms(model, np.array([xi]), eta).entries

    pairs = _pmap(one, [float(xi) for xi in xi_grid.nodes], threads)
    return resolvent.ProbeTable([e for pair in pairs for e in pair])


def _digest(raw):
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _jsonable(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
    return x


def _write_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in CSV_HEADER})


def _write_summary(out_dir, summary, timings):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(os.path.join(out_dir, "run_meta.json"), "w", encoding="utf-8") as fh:
        json.dump({"timings_s": timings}, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _predictions_for(geometry, alpha, beta, sigma, tau, mu_hat):
    preds = [decaylab.predict_rate_general(alpha, beta, sigma, tau)]
    if geometry.fourier_type is not None:
        preds.append(decaylab.predict_rate_fourier_type(alpha, beta, sigma, tau, geometry))
    if geometry.type_p is not None and geometry.cotype_q is not None:
        preds.append(decaylab.predict_rate_type_cotype(alpha, beta, sigma, tau, geometry))
    if geometry.zeta_negative_asserted:
        preds.append(decaylab.predict_rate_asymptotically_analytic(alpha, sigma, geometry))
    if mu_hat is not None:
        ga = decaylab.predict_rate_growth_aware(alpha, beta, sigma, tau, max(0.0, mu_hat))
        preds.append(ga.plain)
        if ga.scaling is not None:
            preds.append(ga.scaling)
    return preds


def run_analyze(config, threads=None, measure_only=False):
    """probe -> fit profile -> measure per index -> predict -> check.

    Returns (summary dict, rows dict, timings, exit_code).
    """
    model = config["model"]
    threads = threads or config["threads"]
    tol = config["tolerances"]["consistency_tol"]
    timings = {}
    rows = {"probes": [], "decay": [], "predictions": []}
    summary = {
        "inputs_digest": _digest(config["raw"]),
        "operator_kind": model.info.kind,
        "seed": config["seed"],
    }

    t0 = time.perf_counter()
    table = _probe_table_parallel(model, config["xi_grid"], 0.0, threads)
    for e in table.entries:
        rows["probes"].append(
            {
                "case": f"probe;eta={e.eta:g}",
                "t_or_xi": f"{e.xi:.12g}",
                "value": "" if e.norm is None else f"{e.norm:.12g}",
                "source": "resolvent-probe",
                "verdict": e.status,
            }
        )
    timings["probe"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        profile = resolvent.fit_growth_profile(table)
    except InsufficientDataError as exc:
        return summary, rows, timings, (1, f"growth-profile fit failed: {exc}")
    summary["profile"] = {
        "alpha_hat": profile.alpha_hat,
        "beta_hat": profile.beta_hat,
        "m_constant": profile.m_constant,
        # finite probing cannot certify a half-plane bound, and guarantees
        # derived from an understated exponent can exceed what short or
        # pre-asymptotic measurement windows show
        "status": "probed",
    }
    timings["fit_profile"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    t_grid = config["t_grid"]
    growth_norms = np.array(
        _pmap(lambda t: model.semigroup_norm(t), t_grid.nodes, threads)
    )
    mu_hat = numcore.fit_power_law(t_grid, growth_norms).exponent
    summary["growth_mu_hat"] = mu_hat

    def measure(pair):
        sigma, tau = pair
        norms = np.array(
            _pmap(lambda t: model.fractional_norm(t, sigma, tau), t_grid.nodes, 1)
        )
        fit = numcore.fit_power_law(t_grid, norms)
        exp_fit = numcore.fit_exp_rate(t_grid.nodes, norms)
        meas = decaylab.DecayMeasurement(
            sigma, tau, t_grid, norms, fit, -fit.exponent, exp_fit,
            decaylab._classify_super_polynomial(fit, exp_fit), mu_hat,
        )
        return meas

    measurements = _pmap(measure, config["indices"], threads)
    fit_tol = config["tolerances"]["fit_tol"]
    summary["measurements"] = []
    summary["fit_warnings"] = []
    for meas in measurements:
        summary["measurements"].append(
            {
                "sigma": meas.sigma,
                "tau": meas.tau,
                "rho_hat": meas.rho_hat,
                "fit_residual": meas.fit.residual,
                "super_polynomial": meas.super_polynomial,
            }
        )
        if meas.fit.residual > fit_tol and not meas.super_polynomial:
            summary["fit_warnings"].append(
                f"sigma={meas.sigma:g};tau={meas.tau:g}: log-residual "
                f"{meas.fit.residual:.3g} exceeds fit_tol {fit_tol:g}"
            )
        for t, v in zip(t_grid.nodes, meas.norms):
            rows["decay"].append(
                {
                    "case": f"sigma={meas.sigma:g};tau={meas.tau:g}",
                    "t_or_xi": f"{t:.12g}",
                    "value": f"{v:.12g}",
                    "fit_exponent": f"{meas.fit.exponent:.12g}",
                    "source": "decay-measurement",
                }
            )
    timings["measure"] = time.perf_counter() - t0

    if measure_only:
        summary["overall"] = "PASS"
        return summary, rows, timings, (0, "")

    t0 = time.perf_counter()
    geometry = config["geometry"]
    alpha, beta = profile.alpha_hat, profile.beta_hat
    summary["predictions"] = []
    overall = True
    any_applicable = False
    for meas in measurements:
        for pred in _predictions_for(geometry, alpha, beta, meas.sigma, meas.tau, mu_hat):
            record = {
                "sigma": meas.sigma,
                "tau": meas.tau,
                "source": pred.source,
                "rho": _jsonable(pred.rho) if pred.rho is not None else None,
                "strict": pred.strict,
                "applicable": pred.applicable,
                "conditions": [
                    {"name": c.name, "passed": c.passed} for c in pred.conditions
                ],
            }
            verdict = "not-applicable"
            if pred.applicable:
                any_applicable = True
                rep = decaylab.check_consistency(meas, pred, tol)
                verdict = "PASS" if rep.passed else "FAIL"
                record["margin"] = None if rep.margin is None else rep.margin
                overall &= rep.passed
            record["verdict"] = verdict
            summary["predictions"].append(record)
            rows["predictions"].append(
                {
                    "case": f"sigma={meas.sigma:g};tau={meas.tau:g}",
                    "value": f"{meas.rho_hat:.12g}",
                    "fit_exponent": f"{-meas.rho_hat:.12g}",
                    "predicted": "" if pred.rho is None else str(_jsonable(pred.rho)),
                    "source": pred.source,
                    "verdict": verdict,
                }
            )
    timings["predict"] = time.perf_counter() - t0
    summary["overall"] = "PASS" if overall else "FAIL"
    code = 0 if overall else 1
    note = "" if overall else "a consistency check failed"
    if not any_applicable:
        note = "no applicable predictions; measurements reported"
    return summary, rows, timings, (code, note)


def _cmd_analyze(args, measure_only=False):
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.tol is not None:
        config["tolerances"]["consistency_tol"] = args.tol
    threads = args.threads or config["threads"]
    out_dir = args.out_dir or config["out_dir"]
    summary, rows, timings, (code, note) = run_analyze(
        config, threads=threads, measure_only=measure_only
    )
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(os.path.join(out_dir, "probes.csv"), rows["probes"])
    _write_csv(os.path.join(out_dir, "decay.csv"), rows["decay"])
    if not measure_only:
        _write_csv(os.path.join(out_dir, "predictions.csv"), rows["predictions"])
    _write_summary(out_dir, summary, timings)
    if note:
        print(note, file=sys.stderr)
    print(f"overall: {summary['overall']} (outputs in {out_dir})")
    return code


def _cmd_frac(args):
    quad_tol = args.tol if args.tol is not None else DEFAULT_TOLERANCES["quad_tol"]
    from . import fraccalc

    rows = []
    worst = 0.0
    for alpha, beta, eta, lam in battery_mod.contour_identity_battery():
        chk = fraccalc.verify_contour_identity(alpha, beta, eta, lam)
        worst = max(worst, chk.rel_error)
        rows.append(
            {
                "case": f"identity;alpha={alpha:g};beta={beta:g};eta={eta:g};lam={format_complex(lam)}",
                "value": f"{chk.rel_error:.6e}",
                "predicted": format_complex(chk.closed_form),
                "source": "contour-identity",
                "verdict": "PASS" if chk.rel_error < quad_tol else "FAIL",
            }
        )
    out_dir = args.out_dir or "semistab-out"
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(os.path.join(out_dir, "frac.csv"), rows)
    ok = worst < quad_tol
    _write_summary(out_dir, {"overall": "PASS" if ok else "FAIL", "worst_rel_error": worst}, {})
    print(f"contour identity battery: worst rel error {worst:.3e} ({'PASS' if ok else 'FAIL'})")
    return 0 if ok else 1


def _cmd_mult(args):
    config = load_config(args.config) if args.config else None
    seed = args.seed if args.seed is not None else (config["seed"] if config else 0)
    grid = config["fourier_grid"] if config else multiplier.FourierGridSpec(200.0, 2**13)
    rng = np.random.Generator(np.random.Philox(key=seed))
    rows = []
    ok = True
    for name, sym in battery_mod._mult_battery(rng):
        exact2 = multiplier.exact_l2_norm(sym, grid)
        for p, q in ((2.0, 2.0), (1.0, 2.0), (2.0, math.inf), (1.0, math.inf)):
            lower = multiplier.estimate_pq_norm_lower(sym, p, q, grid, trials=8, seed=seed)
            upper = multiplier.upper_bound_pq_norm_fourier_type(sym, p, q, grid)
            good = lower.lower_bound <= upper.upper_bound + 1e-6
            ok &= good
            rows.append(
                {
                    "case": f"{name};p={p:g};q={q:g}",
                    "value": f"{lower.lower_bound:.9g}",
                    "predicted": f"{upper.upper_bound:.9g}",
                    "source": "pq-norm",
                    "verdict": "PASS" if good else "FAIL",
                }
            )
        rows.append(
            {
                "case": f"{name};p=2;q=2",
                "value": f"{exact2:.9g}",
                "source": "plancherel-exact",
                "verdict": "",
            }
        )
    out_dir = args.out_dir or "semistab-out"
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(os.path.join(out_dir, "mult.csv"), rows)
    _write_summary(out_dir, {"overall": "PASS" if ok else "FAIL"}, {})
    print(f"multiplier battery: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _cmd_verify(args):
    seed = args.seed if args.seed is not None else 0
    results = battery_mod.run_battery(only=args.only, seed=seed)
    if not results:
        print(f"no cases match --only {args.only!r}", file=sys.stderr)
        return 2
    rows = []
    failures = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] criterion {res.criterion}: {res.name} ({res.duration:.1f}s)")
        for c in res.checks:
            tag = "info" if c.informative else ("pass" if c.passed else "FAIL")
            print(f"    [{tag}] {c.label}: {c.detail}")
        rows.extend(res.rows)
        if not res.passed:
            failures.append(res.name)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        _write_csv(os.path.join(args.out_dir, "verify.csv"), rows)
        summary = {
            "overall": "PASS" if not failures else "FAIL",
            "cases": [
                {
                    "name": r.name,
                    "criterion": r.criterion,
                    "passed": r.passed,
                    "checks": [
                        {
                            "label": c.label,
                            "passed": c.passed,
                            "informative": c.informative,
                        }
                        for c in r.checks
                    ],
                }
                for r in results
            ],
        }
        _write_summary(args.out_dir, summary, {r.name: r.duration for r in results})
    if failures:
        print("FAILED cases: " + ", ".join(failures))
        return 1
    print("all cases PASS")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="semistab",
        description="semigroup stability laboratory: analyses, fractional powers, multipliers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    env_threads = os.environ.get("SEMISTAB_THREADS")
    default_threads = int(env_threads) if env_threads and env_threads.isdigit() else None

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON config path")
        p.add_argument("--out-dir", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=default_threads, help="worker threads")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--tol", type=float, default=None, help="override the consistency tolerance")

    common(sub.add_parser("analyze", help="full probe/fit/measure/predict pipeline"))
    common(sub.add_parser("decay", help="decay measurements only"))
    p_frac = sub.add_parser("frac", help="contour-identity battery")
    common(p_frac, config_required=False)
    p_mult = sub.add_parser("mult", help="multiplier-norm battery")
    common(p_mult, config_required=False)
    p_ver = sub.add_parser("verify-examples", help="run the bundled verification battery")
    p_ver.add_argument("--only", default=None, help="case-name prefix filter (e.g. 'appendix')")
    p_ver.add_argument("--out-dir", default=None)
    p_ver.add_argument("--threads", type=int, default=default_threads)
    p_ver.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "decay":
            return _cmd_analyze(args, measure_only=True)
        if args.command == "frac":
            return _cmd_frac(args)
        if args.command == "mult":
            return _cmd_mult(args)
        if args.command == "verify-examples":
            return _cmd_verify(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, InsufficientDataError) as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
