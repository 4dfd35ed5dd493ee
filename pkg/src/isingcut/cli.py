"""Command-line front end: reduce, decide, partition, landscape, spectrum, glauber, verify, maxcut.

All subcommands are deterministic given identical flags and seed (seed defaults
to 0). JSON reports carry a top-level schema_version and print numbers with 17
significant digits; trajectory and sweep data go to CSV with fixed headers.
Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from .dynamics import CurieWeiss, default_burn_in, glauber_run
from .gadget import (GadgetParams, IsingInstance, build_instance, lab_params,
                     materialize_dense)
from .graphs import Graph, cut_size, max_cut_exact, parse_graph, signs_from_string, signs_to_string
from .landscape import maximize_phi_orthant, q_maximizer_scan, q_profile
from .partition import (ENUM_BUDGET_DEFAULT, brute_force_logZ, magnetization_logZ,
                        num_bias_vectors, orthant_logZ)
from .reduction import (ReductionCertificate, build_certificate, decide_gap,
                        verify_small)
from .spectral import diameter_bound_check, psd_shift, structured_spectrum

SCHEMA_VERSION = "1"


def load_schema(name: str) -> dict:
    """Load a shipped JSON schema by name, e.g. 'maxcut' or 'certificate'."""
    import importlib.resources
    import json
    ref = importlib.resources.files("isingcut") / "schemas" / f"{name}.schema.json"
    return json.loads(ref.read_text())


def format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if not math.isfinite(xf):
        raise ValueError(f"cannot serialize non-finite number {xf}")
    return format(xf, ".17g")


def dump_json(obj, indent: int = 0) -> str:
    """Serialize to JSON with sorted keys and 17-significant-digit floats."""
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, str):
        import json as _json
        return _json.dumps(obj)
    if isinstance(obj, (bool, int, float, np.integer, np.floating)):
        return format_number(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = [dump_json(x, indent + 1) for x in obj]
        if not items:
            return "[]"
        inner = ",\n".join("  " * (indent + 1) + it for it in items)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            items.append("  " * (indent + 1) + dump_json(str(key)) + ": "
                         + dump_json(obj[key], indent + 1))
        if not items:
            return "{}"
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _write_text(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _load_graph(path: str) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())


def _instance_from_args(g: Graph, args) -> tuple[IsingInstance, GadgetParams | None]:
    if args.t is None:
        raise ValueError("--t is required")
    if args.beta is not None:
        if args.gamma is None:
            raise ValueError("--beta requires --gamma")
        return IsingInstance(g, args.t, args.beta, args.gamma), None
    bhat, uhat = args.bhat, args.uhat
    if bhat is None and args.delta is not None:
        bhat = float(args.t) ** (0.75 + args.delta)
    if uhat is None and args.delta_prime is not None and bhat is not None:
        uhat = bhat + float(args.t) ** (0.75 + args.delta_prime)
    if bhat is None or uhat is None:
        raise ValueError("give --beta/--gamma, or --bhat/--uhat, or --delta/--delta-prime")
    p = lab_params(args.t, bhat, uhat,
                   max_degree=max(args.max_degree, g.max_degree), tau=getattr(args, "tau", None))
    return build_instance(g, p), p


def _cmd_maxcut(args) -> dict:
    g = _load_graph(args.graph)
    size, witness = max_cut_exact(g)
    return {"schema_version": SCHEMA_VERSION, "size": size,
            "witness": signs_to_string(witness), "n": g.n, "num_edges": g.num_edges}


def _cmd_partition(args) -> dict:
    g = _load_graph(args.graph)
    inst, _ = _instance_from_args(g, args)
    started = time.perf_counter()
    if args.method == "brute":
        log_z = brute_force_logZ(materialize_dense(inst), threads=args.threads)
        terms = 2**inst.num_sites
    elif args.method == "mag":
        log_z = magnetization_logZ(inst, budget=args.budget, threads=args.threads)
        terms = num_bias_vectors(inst)
    else:
        if args.signs is None:
            raise ValueError("orthant method needs --signs")
        signs = signs_from_string(args.signs)
        log_z = orthant_logZ(inst, signs, budget=args.budget, threads=args.threads)
        terms = (inst.t // 2 + 1) ** g.n
    seconds = time.perf_counter() - started
    return {"schema_version": SCHEMA_VERSION, "method": args.method, "log_z": log_z,
            "terms": terms, "seconds": seconds, "n": g.n, "t": inst.t,
            "beta": inst.beta, "gamma": inst.gamma}


def _cmd_landscape(args) -> dict:
    if args.scan_q:
        if args.beta is not None:
            beta = args.beta
        elif args.bhat is not None:
            from .gadget import beta_from_bhat
            beta = beta_from_bhat(args.t, args.bhat)
        else:
            raise ValueError("scan mode needs --beta or --bhat")
        scan = q_maximizer_scan(args.t, beta, grid=args.grid)
        return {"schema_version": SCHEMA_VERSION, "mode": "scan_q", "t": args.t,
                "beta": beta, "bmax": scan.bmax, "interior": scan.interior,
                "sign_changes": scan.sign_changes,
                "q_at_max": q_profile(scan.bmax, args.t, beta)}
    if not args.maximize:
        raise ValueError("landscape needs --scan-q or --maximize")
    g = _load_graph(args.graph)
    if args.bhat is None or args.uhat is None:
        raise ValueError("maximize mode needs --bhat and --uhat")
    p = lab_params(args.t, args.bhat, args.uhat,
                   max_degree=max(args.max_degree, g.max_degree))
    signs = signs_from_string(args.signs)
    result = maximize_phi_orthant(g, p.t, p.beta, p.gamma, p.uhat, signs)
    return {"schema_version": SCHEMA_VERSION, "mode": "maximize", "t": p.t,
            "beta": p.beta, "gamma": p.gamma, "uhat": p.uhat,
            "signs": args.signs, "b_star": list(result.b), "value": result.value,
            "residual": result.residual, "converged": result.converged,
            "rounds": result.rounds, "max_abs_b": result.max_abs_b,
            "uhat_ok": result.max_abs_b <= p.uhat + 1e-6 * p.t}


def _cmd_spectrum(args) -> tuple[dict, str | None]:
    g = _load_graph(args.graph)
    if args.sweep_t:
        if args.delta is None or args.delta_prime is None:
            raise ValueError("sweep mode needs --delta and --delta-prime")
        ts = sorted(int(x) for x in args.sweep_t.split(","))
        rows = []
        for t in ts:
            bh = float(t) ** (0.75 + args.delta)
            uh = bh + float(t) ** (0.75 + args.delta_prime)
            p = lab_params(t, bh, uh, max_degree=max(args.max_degree, g.max_degree))
            inst = build_instance(g, p)
            check = diameter_bound_check(inst, p)
            rows.append((t, check.actual, check.bound))
        csv_lines = ["t,diameter,bound"]
        csv_lines += [f"{t},{format_number(d)},{format_number(b)}" for (t, d, b) in rows]
        payload = {"schema_version": SCHEMA_VERSION, "sweep": [
            {"t": t, "diameter": d, "bound": b} for (t, d, b) in rows]}
        return payload, "\n".join(csv_lines)
    inst, p = _instance_from_args(g, args)
    report = structured_spectrum(inst, p)
    check = diameter_bound_check(inst, p)
    lam, lnk = psd_shift(inst)
    groups = [{"value": float(v), "multiplicity": int(m)}
              for v, m in zip(report.values, report.multiplicities)]
    return ({"schema_version": SCHEMA_VERSION, "groups": groups,
             "num_sites": report.num_sites, "lambda_min": report.lambda_min,
             "lambda_max": report.lambda_max, "diameter": report.diameter,
             "bound": check.bound, "window_bound": check.window_bound,
             "psd_shift": {"lambda_min": lam, "ln_k_shift": lnk}}, None)


def _certificate_payload(cert: ReductionCertificate) -> dict:
    d = asdict(cert)
    d["params"] = asdict(cert.params)
    d["schema_version"] = SCHEMA_VERSION
    return d


def _cmd_reduce(args) -> dict:
    g = _load_graph(args.graph)
    if args.mode == "paper":
        cert = build_certificate(g, args.A, mode="paper", epsilon=args.epsilon, tau=args.tau)
    else:
        if args.t is None or args.bhat is None or args.uhat is None:
            raise ValueError("lab mode needs --t, --bhat, --uhat")
        p = lab_params(args.t, args.bhat, args.uhat,
                       max_degree=max(args.max_degree, g.max_degree), tau=args.tau)
        cert = build_certificate(g, args.A, mode="lab", params=p)
    return _certificate_payload(cert)


def _cmd_decide(args) -> dict:
    with open(args.certificate) as fh:
        cert = ReductionCertificate.from_json(fh.read())
    decision = decide_gap(args.log_z_hat, args.ln_r, cert)
    return {"schema_version": SCHEMA_VERSION, "decision": decision.value,
            "log_z_estimate": args.log_z_hat - cert.ln_k_shift,
            "ln_r": args.ln_r, "log_t1": cert.log_t1, "log_t2": cert.log_t2,
            "ln_k_shift": cert.ln_k_shift}


def _cmd_verify(args) -> dict:
    g = _load_graph(args.graph)
    p = lab_params(args.t, args.bhat, args.uhat,
                   max_degree=max(args.max_degree, g.max_degree), tau=args.tau)
    report = verify_small(g, p, args.A, budget=args.budget)
    return {"schema_version": SCHEMA_VERSION, "log_z": report.log_z,
            "log_t1": report.log_t1, "log_t2": report.log_t2,
            "max_cut": report.max_cut, "A": report.A,
            "t1_lower_bound_applies": report.t1_lower_bound_applies,
            "z_minus_t2": report.z_minus_t2,
            "dominant_pattern_cut": report.dominant_pattern_cut,
            "dominant_is_max_cut": report.dominant_is_max_cut,
            "orthant_ranking": [
                {"pattern": pat, "log_weight": lw, "cut": cut}
                for (pat, lw, cut) in report.orthant_ranking]}


def _cmd_glauber(args) -> tuple[dict, str | None]:
    model = CurieWeiss(args.N, args.beta)
    burn = args.burn_in if args.burn_in is not None else default_burn_in(args.N)
    stride = args.stride if args.stride is not None else max(1, args.N)
    root = np.random.SeedSequence(args.seed)
    children = root.spawn(args.replicas)
    csv_lines = ["replica,step,m"]
    abs_acc = 0.0
    sq_acc = 0.0
    drift_max = 0.0
    samples = 0
    for r, child in enumerate(children):
        traj = glauber_run(model, steps=args.steps, seed=child, stride=stride, burn_in=burn)
        for k, m in enumerate(traj.m):
            csv_lines.append(f"{r},{(k + 1) * stride},{int(m)}")
        abs_acc += float(np.abs(traj.m).sum())
        sq_acc += float((traj.m.astype(float)**2).sum())
        drift_max = max(drift_max, traj.drift)
        samples = traj.m.size
    total = samples * args.replicas
    payload = {"schema_version": SCHEMA_VERSION, "beta": args.beta, "N": args.N,
               "steps": args.steps, "stride": stride, "burn_in": burn,
               "replicas": args.replicas, "seed": args.seed,
               "samples_per_replica": samples,
               "mean_abs_m": abs_acc / max(total, 1),
               "mean_m_sq": sq_acc / max(total, 1),
               "drift_max": drift_max}
    return payload, "\n".join(csv_lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isingcut",
                                     description="MAX-CUT to critical Ising reduction toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_instance_flags(p):
        p.add_argument("--t", type=int, help="cloud size (even)")
        p.add_argument("--beta", type=float, help="intra-cloud coupling")
        p.add_argument("--gamma", type=float, help="inter-cloud coupling magnitude")
        p.add_argument("--bhat", type=float, help="target cloud bias")
        p.add_argument("--uhat", type=float, help="bias cap")
        p.add_argument("--delta", type=float, help="bias exponent offset: bhat = t^(3/4+delta)")
        p.add_argument("--delta-prime", type=float, dest="delta_prime",
                       help="cap exponent offset: uhat = bhat + t^(3/4+delta')")
        p.add_argument("--max-degree", type=int, default=3, dest="max_degree")

    p = sub.add_parser("maxcut", help="exact MAX-CUT of a small graph")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=_cmd_maxcut, csv=None)

    p = sub.add_parser("partition", help="exact log partition function")
    p.add_argument("--graph", required=True)
    p.add_argument("--method", choices=("brute", "mag", "orthant"), required=True)
    add_common_instance_flags(p)
    p.add_argument("--signs", help="orthant sign pattern, e.g. '+-+'")
    p.add_argument("--budget", type=int, default=ENUM_BUDGET_DEFAULT)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_partition, csv=None)

    p = sub.add_parser("landscape", help="one-cloud profile scan or orthant maximization")
    p.add_argument("--scan-q", action="store_true", dest="scan_q")
    p.add_argument("--maximize", action="store_true")
    p.add_argument("--graph")
    add_common_instance_flags(p)
    p.add_argument("--grid", type=float, default=None, help="scan step size")
    p.add_argument("--signs", help="orthant sign pattern for --maximize")
    p.set_defaults(func=_cmd_landscape, csv=None)

    p = sub.add_parser("spectrum", help="structured spectrum, diameter bounds, psd shift")
    p.add_argument("--graph", required=True)
    add_common_instance_flags(p)
    p.add_argument("--sweep-t", dest="sweep_t",
                   help="comma list of cloud sizes; with fractional --bhat/--uhat "
                        "interpreted as exponent offsets delta, delta'")
    p.add_argument("--csv", help="CSV output path for sweeps")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("reduce", help="build a reduction certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--A", type=int, required=True, help="claimed cut bound")
    p.add_argument("--mode", choices=("paper", "lab"), default="lab")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--tau", type=float, required=True)
    add_common_instance_flags(p)
    p.set_defaults(func=_cmd_reduce, csv=None)

    p = sub.add_parser("decide", help="gap decision from a certificate and a log Z estimate")
    p.add_argument("--certificate", required=True)
    p.add_argument("--log-z-hat", type=float, required=True, dest="log_z_hat")
    p.add_argument("--ln-r", type=float, default=0.0, dest="ln_r")
    p.set_defaults(func=_cmd_decide, csv=None)

    p = sub.add_parser("verify", help="desk-scale exact verification of the certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    add_common_instance_flags(p)
    p.add_argument("--budget", type=int, default=ENUM_BUDGET_DEFAULT)
    p.set_defaults(func=_cmd_verify, csv=None)

    p = sub.add_parser("glauber", help="heat-bath dynamics on the complete graph")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--stride", type=int)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("--csv", help="CSV output path for the trajectory")
    p.set_defaults(func=_cmd_glauber)

    for sp in sub.choices.values():
        sp.add_argument("--output", help="JSON output path (default: stdout)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except (ValueError, OverflowError, ArithmeticError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if isinstance(result, tuple):
        payload, csv_text = result
    else:
        payload, csv_text = result, None
    if csv_text is not None and getattr(args, "csv", None):
        with open(args.csv, "w") as fh:
            fh.write(csv_text + "\n")
    _write_text(dump_json(payload), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
