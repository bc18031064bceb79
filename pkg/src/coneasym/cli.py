"""Command-line front end.

Exit codes: 0 success, 1 unreadable or malformed input, 2 the operator
violates a hypothesis of the theory (diagnostic on stderr).
"""
import argparse
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    check_simple_eigenvalue,
    corollary1_check,
    find_positivity_index,
    find_uniform_index,
    fundamental_inverse,
    limit_decomposition,
    normalize_spectral_radius,
)
from .exceptions import HypothesisError
from .io import dumps_report, read_array
from .markov_examples import (
    build_example1,
    build_example2,
    example2_closed_form,
    example2_eventual_positivity,
    example2_index_profile,
)
from .operator import PositiveOperator
from .oscillation import trace_until
from .semigroup import Generator, semigroup_limit

SCHEMA_VERSION = 1
COROLLARY_POWERS = (1, 2, 5, 17)


def _descriptor(path):
    raw = Path(path).read_bytes()
    return {"file": Path(path).name, "sha256": hashlib.sha256(raw).hexdigest()}


def _load_operator(path):
    arr, _ = read_array(path)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"matrix must be square, got shape {arr.shape}")
    return PositiveOperator.from_matrix(arr)


def analyze_operator(A, eps=1e-10, cap=None, normalize=False):
    """Full discrete pipeline; returns the report body as an ordered dict."""
    body = {}
    if normalize:
        A, rho = normalize_spectral_radius(A)
        body["preprocessing"] = {"normalized": True, "divided_by": rho}
    indices = [find_positivity_index(A, A.space.basis(j), cap) for j in range(A.dim)]
    body["regularity"] = {
        "per_basis_index": indices,
        "uniform_index": find_uniform_index(A, cap),
    }
    decomp = limit_decomposition(A, eps=eps, cap=cap)
    body["limit"] = decomp.to_dict()
    body["rho"] = decomp.rho
    cert = decomp.certificate
    body["certificate"] = None if cert is None else {
        "p": cert.p, "beta": cert.beta, "factor": cert.factor,
    }
    if not decomp.is_zero_limit:
        simple = check_simple_eigenvalue(A, decomp)
        body["simple_eigenvalue"] = {
            "nullity": simple.nullity,
            "fixed_residual": simple.fixed_residual,
            "adjoint_residual": simple.adjoint_residual,
        }
    body["corollary_residuals"] = {
        str(n): corollary1_check(A, decomp, n) for n in COROLLARY_POWERS
    }
    fi = fundamental_inverse(A, decomp)
    body["fundamental_inverse"] = {"terms_used": fi.terms_used, "residual": fi.residual}
    return body, decomp


def _write_report(outdir, report):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "report.json"
    path.write_text(dumps_report(report))
    return path


def _header(command, args, extra=None):
    rep = {"schema_version": SCHEMA_VERSION, "tool": "coneasym", "version": __version__,
           "command": command}
    if extra:
        rep.update(extra)
    return rep


def cmd_analyze(args):
    A = _load_operator(args.input)
    rep = _header("analyze", args, {
        "input": _descriptor(args.input),
        "flags": {"eps": args.eps, "cap": args.cap, "normalize": args.normalize},
    })
    t0 = time.perf_counter()
    body, _ = analyze_operator(A, args.eps, args.cap, args.normalize)
    rep.update(body)
    if args.timings:
        rep["timings"] = {"analyze_s": time.perf_counter() - t0}
    _write_report(args.output_dir, rep)
    return 0


def cmd_semigroup(args):
    arr, meta = read_array(args.input)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"generator must be square, got shape {arr.shape}")
    if meta.get("metzler") is False:
        raise ValueError('input is flagged "metzler": false')
    gen = Generator.from_matrix(arr)
    t0 = time.perf_counter()
    lim = semigroup_limit(gen, tau=args.tau, horizon=args.horizon, eps=args.eps,
                          cap=args.cap, n_random=args.samples, seed=args.seed)
    rep = _header("semigroup", args, {
        "input": _descriptor(args.input),
        "flags": {"tau": args.tau, "horizon": args.horizon, "eps": args.eps,
                  "cap": args.cap, "seed": args.seed, "samples": args.samples},
    })
    decomp = lim.decomp
    rep["regularity"] = {"per_basis_index": list(decomp.positivity_indices),
                         "uniform_index": decomp.uniform_index}
    rep["limit"] = decomp.to_dict()
    cert = decomp.certificate
    rep["certificate"] = None if cert is None else {"p": cert.p, "beta": cert.beta}
    rep["semigroup"] = {
        "row_sum_zero": gen.row_sum_zero,
        "tau": lim.tau,
        "bound_sample": lim.sample_kind,
        "seed": lim.seed,
        "residuals": lim.residuals,
        "bound_trace": [{"t": t, "bound": b, "actual": a} for t, b, a in lim.bound_trace],
    }
    if args.timings:
        rep["timings"] = {"semigroup_s": time.perf_counter() - t0}
    out = _write_report(args.output_dir, rep)
    (out.parent / "bound_trace.csv").write_text(lim.trace_csv())
    return 0


def cmd_example(args):
    if args.name == "example1":
        fx = build_example1(args.theta, args.grid, rule=args.quadrature)
        A = fx.operator
        fixture = {"name": "example1", "theta": fx.theta, "grid": fx.grid_size,
                   "quadrature": fx.rule, "markov_defect": fx.markov_defect()}
    else:
        fx = build_example2(args.n)
        A = fx.operator
        fixture = {"name": "example2", "N": fx.N}
    rep = _header("example", args, {"fixture": fixture,
                                    "flags": {"eps": args.eps, "normalize": args.normalize}})
    t0 = time.perf_counter()
    body, decomp = analyze_operator(A, args.eps, None, args.normalize)
    rep.update(body)
    if args.name == "example2":
        k = fx.N - 1
        closed = example2_closed_form(k)
        rep["closed_form"] = {
            "f0_closed": closed.tolist(),
            "f0_computed": decomp.f0[:k].tolist(),
            "max_abs_error": float(np.max(np.abs(decomp.f0[:k] - closed))),
        }
        rep["eventual_positivity"] = {
            "index_profile": example2_index_profile(fx),
            "pattern": [example2_eventual_positivity(fx, n).__dict__
                        for n in range(1, fx.N - 2)],
        }
    if args.timings:
        rep["timings"] = {"example_s": time.perf_counter() - t0}
    _write_report(args.output_dir, rep)
    return 0


def cmd_trace(args):
    A = _load_operator(args.input)
    try:
        x = np.array([float(v) for v in args.x.split(",")])
    except ValueError:
        raise ValueError(f"--x must be comma-separated numbers, got {args.x!r}") from None
    decomp = limit_decomposition(A, eps=args.eps)
    if decomp.is_zero_limit:
        raise HypothesisError("operator has zero limit: no fixed order unit to trace against")
    tr = trace_until(A, decomp.unit, x, eps=args.eps, max_steps=args.max_steps)
    text = tr.to_csv()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="coneasym",
        description="Limit operators and convergence certificates for positive matrices.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eps=1e-10):
        sp.add_argument("--eps", type=float, default=eps,
                        help="relative oscillation tolerance (default %(default)g)")
        sp.add_argument("--output-dir", default=".", help="where report files go")
        sp.add_argument("--timings", action="store_true",
                        help="add wall-clock timings (makes the report non-reproducible)")

    a = sub.add_parser("analyze", help="analyze a positive matrix")
    a.add_argument("--input", required=True, help="CSV or JSON matrix")
    a.add_argument("--cap", type=int, default=None, help="index search cap (default dim^2+1)")
    a.add_argument("--normalize", action="store_true",
                   help="divide by the computed spectral radius first")
    common(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("semigroup", help="analyze exp(tG) for a Metzler generator")
    s.add_argument("--input", required=True)
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--horizon", type=float, default=None)
    s.add_argument("--cap", type=int, default=None)
    s.add_argument("--seed", type=int, default=0, help="seed for random bound samples")
    s.add_argument("--samples", type=int, default=32,
                   help="random test vectors when the dimension is too large to enumerate")
    common(s)
    s.set_defaults(func=cmd_semigroup)

    e = sub.add_parser("example", help="build a fixture and analyze it")
    e.add_argument("name", choices=["example1", "example2"])
    e.add_argument("--theta", type=float, default=0.25)
    e.add_argument("--grid", type=int, default=512)
    e.add_argument("--quadrature", choices=["fractional", "truncated"], default="fractional")
    e.add_argument("--n", type=int, default=16, help="truncation size for example2")
    e.add_argument("--normalize", action="store_true")
    common(e)
    e.set_defaults(func=cmd_example)

    t = sub.add_parser("trace", help="write the oscillation trace n,M,m,delta as CSV")
    t.add_argument("--input", required=True)
    t.add_argument("--x", required=True, help="seed vector, comma separated")
    t.add_argument("--eps", type=float, default=1e-10)
    t.add_argument("--max-steps", type=int, default=10_000)
    t.add_argument("--output", default=None, help="CSV path (default stdout)")
    t.set_defaults(func=cmd_trace)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HypothesisError as exc:
        print(f"coneasym: hypothesis violated: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"coneasym: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
