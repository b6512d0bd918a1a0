"""Command-line front end.

Subcommands::

    stieltjes-cf certify PATH
    stieltjes-cf expand PATH --format jfraction|classical|sfraction
    stieltjes-cf composite hs|multicoat|laminate|keller|tartar|synthesize ...

Reports are JSON with sorted keys. ``certify`` and ``expand`` print the
report (or write it to ``--output``); ``composite`` prints a CSV grid and
writes the report to ``--output`` when given. Exit status is 0 when every
check passes, 1 on a domain failure and 2 on usage or parse errors.

Every shared flag has an environment default ``STIELTJES_CF_<FLAG>``
(for instance ``STIELTJES_CF_TOL_PSD``); flags on the command line win.
"""
import argparse
import csv
import hashlib
import io
import json
import os
import sys
import warnings

import numpy as np

from . import _linalg as la
from .composites import (CoatingSpec, LaminateSpec, extract_coating_parameters,
                         hs_coated, keller_residual, laminate_parallel,
                         laminate_perp, multicoat_effective, multicoat_eval,
                         multicoat_to_pole_residue, synthesize_laminate,
                         tartar_formula)
from .core import (certify_class_G, max_relative_deviation, reflect,
                   require_class_G, sample_kernel_certificates)
from .engine import classical_form, expand_j_fraction, s_fraction_of
from .errors import DocumentError, NotNormalized, StieltjesError
from .io import (coating_to_document, dumps, function_to_document,
                 j_fraction_to_document, laminate_to_document, load_document,
                 s_fraction_to_document)
from .sampling import VERIFICATION_SEED, off_axis_points, verification_points

ENV_PREFIX = "STIELTJES_CF_"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ROUNDTRIP_TOL = 1e-6


class UsageError(Exception):
    pass


def _env(name, kind, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return kind(raw)
    except ValueError as exc:
        raise UsageError(f"bad value for {ENV_PREFIX}{name}: {raw!r}") from exc


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _shared_parser():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol-psd", type=float, default=_env("TOL_PSD", float, la.TOL_PSD))
    p.add_argument("--tol-rank", type=float, default=_env("TOL_RANK", float, la.TOL_RANK))
    p.add_argument("--samples", type=int, default=_env("SAMPLES", int, 20))
    p.add_argument("--seed", type=int, default=_env("SEED", int, VERIFICATION_SEED))
    p.add_argument("--output", default=_env("OUTPUT", str, None),
                   help="write the JSON report here")
    return p


def build_parser():
    shared = _shared_parser()
    parser = argparse.ArgumentParser(
        prog="stieltjes-cf",
        description="Certify, expand and synthesize rational Stieltjes functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", parents=[shared], help="class-G certification")
    p.add_argument("path")

    p = sub.add_parser("expand", parents=[shared], help="continued-fraction expansion")
    p.add_argument("path")
    p.add_argument("--format", choices=["jfraction", "classical", "sfraction"],
                   default="jfraction")
    p.add_argument("--document", help="also write the coefficient document here")

    comp = sub.add_parser("composite", help="two-phase composite formulas")
    csub = comp.add_subparsers(dest="kind", required=True)

    def grid(p, sigma2=True):
        p.add_argument("--sigma1", type=complex,
                       help="single phase-1 value; default is a sample grid")
        if sigma2:
            p.add_argument("--sigma2", type=complex, default=1.0)

    p = csub.add_parser("hs", parents=[shared], help="coated sphere/disk assemblage")
    p.add_argument("--dim", type=int, choices=[2, 3], default=3)
    p.add_argument("--c1", type=float, required=True)
    grid(p)

    p = csub.add_parser("multicoat", parents=[shared], help="multicoated assemblage")
    p.add_argument("--dim", type=int, choices=[2, 3], default=2)
    p.add_argument("--fractions", type=_floats, required=True)
    p.add_argument("--core-phase", type=int, choices=[1, 2])
    p.add_argument("--emit-document", help="write the coating document here")
    p.add_argument("--emit-function", help="write the pole-residue function document here")
    grid(p)

    p = csub.add_parser("laminate", parents=[shared], help="laminate of laminates")
    p.add_argument("--weights", type=_floats, required=True)
    p.add_argument("--proportions", type=_floats, required=True)
    grid(p)

    p = csub.add_parser("keller", parents=[shared], help="phase interchange residual")
    p.add_argument("--dim", type=int, choices=[2, 3], default=2)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--c1", type=float)
    group.add_argument("--fractions", type=_floats)
    grid(p)

    p = csub.add_parser("tartar", parents=[shared], help="hierarchical laminate tensor")
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--m1", type=_floats, default=[0.5, 0.0, 0.5],
                   help="m11,m12,m22 of the symmetric matrix M1")
    grid(p)

    p = csub.add_parser("synthesize", parents=[shared], help="recover a microstructure")
    p.add_argument("path", help="function or coating document")
    p.add_argument("--target", choices=["coating", "laminate"], default="coating")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--emit-document", help="write the recovered document here")
    return parser


def _digest(data):
    return hashlib.sha256(data).hexdigest()


def _file_digest(path):
    try:
        with open(path, "rb") as fh:
            return _digest(fh.read())
    except OSError as exc:
        raise DocumentError("", f"cannot read {path}: {exc.strerror}") from exc


def _params_digest(args):
    keys = sorted(k for k, v in vars(args).items()
                  if k not in ("output", "emit_document", "emit_function"))
    text = json.dumps({k: repr(getattr(args, k)) for k in keys}, sort_keys=True)
    return _digest(text.encode())


def _check(name, value, threshold, passed):
    return {"name": name, "value": float(value), "threshold": float(threshold),
            "passed": bool(passed)}


def _report(args, digest, checks, residuals, **extra):
    out = {
        "command": args.command if args.command != "composite" else f"composite {args.kind}",
        "input_digest": digest,
        "checks": checks,
        "residuals": {k: float(v) for k, v in residuals.items()},
        "tolerances": {"tol_psd": args.tol_psd, "tol_rank": args.tol_rank},
        "seed": args.seed,
        "samples": args.samples,
        "passed": all(c["passed"] for c in checks),
    }
    out.update(extra)
    return out


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_function(path):
    obj = load_document(path)
    if isinstance(obj, CoatingSpec):
        return multicoat_to_pole_residue(obj)
    return obj


def cmd_certify(args, out):
    digest = _file_digest(args.path)
    f = _load_function(args.path)
    cert = certify_class_G(f, args.tol_psd)
    checks = [_check(c.name, c.value, c.threshold, c.passed) for c in cert.checks]
    points = off_axis_points(args.samples, args.seed)
    kernels = sample_kernel_certificates(f, points, args.tol_psd)
    checks.append(_check("kernels", kernels.worst_slack, -args.tol_psd, kernels.passed))
    return _report(args, digest, checks, {"kernel_worst_slack": kernels.worst_slack},
                   n=f.n, poles=len(f.poles))


def cmd_expand(args, out):
    digest = _file_digest(args.path)
    f = _load_function(args.path)
    if args.format == "sfraction" and f.n != 1:
        raise UsageError("--format sfraction needs a scalar (n = 1) function")
    require_class_G(f, args.tol_psd)
    if args.format == "jfraction":
        fraction = expand_j_fraction(f, args.tol_psd, args.tol_rank)
        doc = j_fraction_to_document(fraction)
    elif args.format == "classical":
        fraction = classical_form(expand_j_fraction(reflect(f, args.tol_psd),
                                                    args.tol_psd, args.tol_rank))
        doc = j_fraction_to_document(fraction)
    else:
        fraction = s_fraction_of(f, args.tol_psd)
        doc = s_fraction_to_document(fraction)
    points = verification_points(args.samples, args.seed)
    err = max_relative_deviation(fraction, f, points)
    checks = [_check("round_trip", err, ROUNDTRIP_TOL, err <= ROUNDTRIP_TOL)]
    if args.document:
        _write(args.document, dumps(doc))
    return _report(args, digest, checks, {"round_trip_max_rel": err},
                   format=args.format, coefficients=doc)


def _grid(args):
    if args.sigma1 is not None:
        return [complex(args.sigma1)]
    return list(verification_points(args.samples, args.seed))


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def _split(values):
    out = []
    for v in values:
        v = complex(v)
        out += [v.real, v.imag]
    return out


def cmd_composite(args, out):
    kind = args.kind
    if kind == "synthesize":
        return _synthesize(args, out)
    digest = _params_digest(args)
    zs = _grid(args)
    header = ["z_re", "z_im", "value_re", "value_im"]
    rows, checks, residuals, extra = [], [], {}, {}
    if kind == "hs":
        s2 = args.sigma2
        rows = [_split([z, hs_coated(z, s2, args.c1, args.dim)]) for z in zs]
        norm = abs(hs_coated(s2, s2, args.c1, args.dim) - s2) / abs(s2)
        checks.append(_check("equal_phases", norm, 1e-12, norm <= 1e-12))
    elif kind == "multicoat":
        spec = CoatingSpec(args.dim, tuple(args.fractions), args.core_phase)
        s2 = args.sigma2
        rows = [_split([z, multicoat_effective(z, s2, spec)]) for z in zs]
        norm = abs(multicoat_eval(1.0, spec) - 1.0)
        checks.append(_check("f(1)=1", norm, 1e-12, norm <= 1e-12))
        if args.emit_document:
            _write(args.emit_document, dumps(coating_to_document(spec)))
        if args.emit_function:
            _write(args.emit_function, dumps(function_to_document(
                multicoat_to_pole_residue(spec))))
        extra["coating"] = coating_to_document(spec)
    elif kind == "laminate":
        spec = LaminateSpec(tuple(args.weights), tuple(args.proportions))
        s2 = args.sigma2
        header += ["perp_re", "perp_im"]
        rows = [_split([z, laminate_parallel(z, s2, spec), laminate_perp(z, s2, spec)])
                for z in zs]
    elif kind == "keller":
        if args.fractions is not None:
            spec = CoatingSpec(args.dim, tuple(args.fractions))

            def effective(a, b):
                return multicoat_effective(a, b, spec)
        else:
            def effective(a, b):
                return hs_coated(a, b, args.c1, args.dim)
        s2 = args.sigma2
        header += ["forward_re", "forward_im", "backward_re", "backward_im"]
        worst = 0.0
        for z in zs:
            res = keller_residual(effective, z, s2)
            scale = max(abs(z * s2), np.finfo(float).tiny)
            worst = max(worst, abs(res) / scale if z != 0 else abs(res))
            rows.append(_split([z, res, effective(z, s2), effective(s2, z)]))
        residuals["keller_max_rel"] = worst
        if args.dim == 2:
            checks.append(_check("keller", worst, 1e-10, worst <= 1e-10))
    elif kind == "tartar":
        m11, m12, m22 = (args.m1 + [0.0, 0.0, 0.0])[:3]
        m1 = np.array([[m11, m12], [m12, m22]])
        s2 = args.sigma2
        for i in (1, 2):
            for j in (1, 2):
                header += [f"s{i}{j}_re", f"s{i}{j}_im"]
        for z in zs:
            t = tartar_formula(z * np.eye(2), s2, args.c1, m1)
            rows.append(_split([z, np.trace(t) / 2, *t.ravel()]))
    report = _report(args, digest, checks, residuals, **extra)
    out.write(_csv(header, rows))
    return report


def _synthesize(args, out):
    digest = _file_digest(args.path)
    f = _load_function(args.path)
    zs = list(verification_points(args.samples, args.seed))
    extra = {}
    if args.target == "coating":
        spec = extract_coating_parameters(f, 2, args.depth)
        doc = coating_to_document(spec)

        def rebuilt(z):
            return multicoat_eval(z, spec)
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NotNormalized)
            spec = synthesize_laminate(f, args.tol_psd)
        if caught:
            extra["warnings"] = [str(w.message) for w in caught]
        doc = laminate_to_document(spec)

        def rebuilt(z):
            return laminate_parallel(z, 1.0, spec)
    rows, worst = [], 0.0
    for z in zs:
        ref = complex(f(z)[0, 0])
        got = rebuilt(z)
        worst = max(worst, abs(got - ref) / max(abs(ref), np.finfo(float).tiny))
        rows.append(_split([z, ref, got]))
    if args.emit_document:
        _write(args.emit_document, dumps(doc))
    checks = [_check("round_trip", worst, 1e-8, worst <= 1e-8)]
    out.write(_csv(["z_re", "z_im", "value_re", "value_im", "rebuilt_re", "rebuilt_im"],
                   rows))
    return _report(args, digest, checks, {"round_trip_max_rel": worst},
                   recovered=doc, **extra)


COMMANDS = {"certify": cmd_certify, "expand": cmd_expand, "composite": cmd_composite}


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    report_to_stdout = args.command != "composite"
    try:
        report = COMMANDS[args.command](args, stdout)
    except (UsageError, DocumentError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except StieltjesError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    text = dumps(report)
    if args.output:
        _write(args.output, text)
    elif report_to_stdout:
        stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
