"""``remetrika`` command line.

Exit codes: 0 success, 1 the family has no attractor (or lacks a required
structure), 2 bad input or usage, 3 an internal verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import affine, converse
from .chainmetric import (
    MetricMatrix,
    discreteness_check,
    dmu_exact,
    dmu_truncated,
    parse_mu,
    prop38_suite,
    prop310_311_suite,
)
from .checks import Report
from .cover import prop36_suite, prop37_suite
from .errors import GateError, PreconditionError, RemetrikaError, ResourceError, VerificationError
from .instance import AffineInstance, FiniteInstance, load_instance
from .monoid import attractor_info, build_automaton, check_condition_a, has_attractor, require_attractor
from .remetrize import remetrize
from .render import render_svg
from .words import prefix

EXIT_OK, EXIT_GATE, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(RemetrikaError):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _positive_rational(text: str) -> Fraction:
    q = _rational(text)
    if q <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return q


def _unit_rational(text: str) -> Fraction:
    q = _rational(text)
    if not 0 < q < 1:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return q


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="remetrika", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("instance", help="instance JSON file, fixture id (T1..T5) or label, or 'sierpinski'")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--float", action="store_true", help="add decimal approximations next to exact values")
        return p

    add("check", "decide whether the family has an attractor")
    add("attractor", "attractor points, levels and addresses")

    p = add("metric", "chain distance matrix for a weight sequence")
    p.add_argument("--mu", default="geometric:1/2", help="constant:M | geometric:r | file:PATH")
    p.add_argument("--depth", type=_nonneg_int, help="only words up to this length")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--samples", type=_nonneg_int, default=64, help="sample points for affine instances")
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--figures", help="directory for a heatmap PNG")

    p = add("remetrize", "synthesize the contraction metric and its certificate")
    p.add_argument("--M", type=_positive_rational, default=Fraction(1))
    p.add_argument("--single", action="store_true", help="also emit the single-map geometric metric")
    p.add_argument("--alpha", type=_unit_rational, default=Fraction(1, 2))
    p.add_argument("--format", choices=["json", "csv"], default="json",
                   help="json certificate, or the phi breakpoint table as CSV")
    p.add_argument("--figures", help="directory for phi/metric PNGs and CSV tables")

    for name, text in [("bessaga", "single map: metric making it an alpha-contraction"),
                       ("wong", "common fixed point: metric making every map an alpha-contraction")]:
        p = add(name, text)
        p.add_argument("--alpha", type=_unit_rational, default=Fraction(1, 2))
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = add("unbounded", "extend the certified metric on X1 to the whole space")
    p.add_argument("--x1", required=True, help="JSON array of points, or a file containing one")
    p.add_argument("--a", type=_unit_rational, default=Fraction(1, 2))
    p.add_argument("--M", type=_positive_rational, default=Fraction(1))
    p.add_argument("--figures", help="directory for psi/D PNGs and CSV tables")

    p = add("verify", "run every property suite")
    p.add_argument("--depth", type=_nonneg_int, default=3)
    p.add_argument("--mu", default="geometric:1/2")
    p.add_argument("--M", type=_positive_rational, default=Fraction(1))

    p = add("render", "SVG chaos-game picture of an affine family")
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--samples", type=_nonneg_int, default=100_000)
    p.add_argument("--cylinders", type=_nonneg_int, help="outline the cylinders of this depth")
    return parser


# -- output helpers ------------------------------------------------------------

def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, doc):
    _emit(args, json.dumps(doc, indent=2) + "\n")


def _matrix_csv(matrix: MetricMatrix, as_float=False) -> str:
    cell = (lambda v: repr(float(v))) if as_float else str
    return "".join(",".join(cell(v) for v in row) + "\n" for row in matrix.rows)


def _emit_matrix(args, matrix: MetricMatrix, meta: dict):
    if args.format == "json":
        doc = dict(meta, points=matrix.size, matrix=matrix.to_json())
        if args.float:
            doc["matrix_float"] = [[float(v) for v in row] for row in matrix.rows]
        _emit_json(args, doc)
        return
    _emit(args, _matrix_csv(matrix))
    if args.float:
        if args.out:
            Path(_float_sibling(args.out)).write_text(_matrix_csv(matrix, True))
        else:
            sys.stdout.write("\n" + _matrix_csv(matrix, True))


def _float_sibling(path: str) -> str:
    p = Path(path)
    return str(p.with_name(p.stem + ".float.csv"))


def _figures_dir(args):
    if not getattr(args, "figures", None):
        return None
    d = Path(args.figures)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _finite(inst, command) -> FiniteInstance:
    if not isinstance(inst, FiniteInstance):
        raise UsageError(f"{command} needs a finite instance; use render for affine families")
    return inst


def _gated(inst: FiniteInstance):
    aut = build_automaton(inst)
    require_attractor(aut)
    return aut


# -- subcommands ---------------------------------------------------------------

def cmd_check(args, inst) -> int:
    aut = build_automaton(_finite(inst, "check"))
    cert = {"instance": inst.name, "states": len(aut.states)}
    cert.update(has_attractor(aut))
    if not cert["has_attractor"]:
        # follow the lasso for three times the state count as a sanity certificate
        lasso = check_condition_a(aut).lasso
        n = 3 * len(aut.states)
        cert["lasso_checked_prefixes"] = n
        cert["lasso_min_image"] = min(len(inst.image(prefix(lasso, j))) for j in range(n + 1))
    _emit_json(args, cert)
    return EXIT_OK if cert["has_attractor"] else EXIT_GATE


def cmd_attractor(args, inst) -> int:
    aut = _gated(_finite(inst, "attractor"))
    doc = {"instance": inst.name}
    doc.update(attractor_info(aut).to_json())
    _emit_json(args, doc)
    return EXIT_OK


def cmd_metric(args, inst) -> int:
    mu = parse_mu(args.mu)
    meta = {"kind": "dmu", "instance": inst.name, "mu": mu.to_json(), "exact": True}
    if isinstance(inst, AffineInstance):
        depth = 3 if args.depth is None else args.depth
        pts = affine.chaos_game(inst, args.seed, max(args.samples, 1))
        matrix = affine.approximate_dmu(inst, mu, depth, pts)
        meta.update(kind="dmu-approximate", exact=False, depth=depth)
    else:
        aut = _gated(inst)
        if args.depth is None:
            matrix = dmu_exact(aut, mu)
        else:
            matrix = dmu_truncated(aut, mu, args.depth)
            meta.update(kind="dmu-truncated", depth=args.depth)
    _emit_matrix(args, matrix, meta)
    figures = _figures_dir(args)
    if figures:
        from .plotting import matrix_figure

        matrix_figure(figures / "metric.png", matrix, meta["kind"])
    return EXIT_OK


def cmd_remetrize(args, inst) -> int:
    inst = _finite(inst, "remetrize")
    if args.single and inst.k != 1:
        raise UsageError("--single needs a one-map instance")
    aut = _gated(inst)
    cert = remetrize(aut, args.M)
    doc = {"instance": inst.name, "ok": cert.ok}
    doc.update(cert.to_json(args.float))
    if args.single:
        d = converse.bessaga_metric(inst, args.alpha)
        doc["bessaga"] = {"alpha": str(args.alpha), "matrix": d.to_json()}
    if args.format == "csv":
        _emit(args, cert.phi.to_csv(args.float))
    else:
        _emit_json(args, doc)
    figures = _figures_dir(args)
    if figures:
        from .plotting import comparison_figure, matrix_figure

        (figures / "phi.csv").write_text(cert.phi.to_csv(args.float))
        (figures / "d.csv").write_text(_matrix_csv(cert.d))
        comparison_figure(figures / "phi.png", cert.phi, 4 * cert.M)
        matrix_figure(figures / "d.png", cert.d, "d")
    if not cert.ok:
        failure = cert.checks.failures()[0]
        print(f"verification failed: {failure.id} at {failure.counterexample}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_alpha(args, inst, build, kind) -> int:
    inst = _finite(inst, kind)
    matrix = build(inst, args.alpha)
    meta = {"kind": kind, "instance": inst.name, "alpha": str(args.alpha), "exact": True}
    _emit_matrix(args, matrix, meta)
    return EXIT_OK


def cmd_bessaga(args, inst) -> int:
    return _cmd_alpha(args, inst, converse.bessaga_metric, "bessaga")


def cmd_wong(args, inst) -> int:
    return _cmd_alpha(args, inst, converse.wong_metric, "wong")


def _parse_x1(text: str) -> list:
    source = text
    if not text.lstrip().startswith("["):
        try:
            source = Path(text).read_text()
        except OSError as exc:
            raise PreconditionError(f"cannot read X1 from {text}: {exc.strerror}") from None
    try:
        value = json.loads(source)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"X1 is not JSON: {exc}") from None
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise PreconditionError("X1 must be a JSON array of point indices")
    return value


def cmd_unbounded(args, inst) -> int:
    inst = _finite(inst, "unbounded")
    result = converse.unbounded_metric(inst, _parse_x1(args.x1), args.a, args.M)
    doc = {"instance": inst.name, "ok": result.checks.ok, "a": str(args.a)}
    doc.update(result.to_json(args.float))
    _emit_json(args, doc)
    figures = _figures_dir(args)
    if figures:
        from .plotting import comparison_figure, matrix_figure

        (figures / "psi.csv").write_text(result.psi.to_csv(args.float))
        (figures / "D.csv").write_text(_matrix_csv(result.D))
        top = max(result.D.max(), 4 * result.scale)
        linear = lambda t: args.a * t  # noqa: E731
        comparison_figure(figures / "psi.png", result.psi, top, "psi",
                          extra=[("phi", result.certificate.phi), ("a t", linear)])
        matrix_figure(figures / "D.png", result.D, "D")
    return EXIT_OK if result.checks.ok else EXIT_VERIFY


def run_suites(aut, depth: int, mu, M) -> list:
    """(suite, Check) pairs for every property suite that applies to ``aut``."""
    inst = aut.instance
    out = []

    def take(name, report):
        out.extend((name, c) for c in report)

    take("cylinders", prop36_suite(aut, depth))
    take("extended-cylinders", prop37_suite(aut, depth))
    take("chain-metric", prop38_suite(aut, mu))
    take("discreteness", discreteness_check(aut, mu))
    take("truncation", prop310_311_suite(aut, mu, depth))
    take("remetrize", remetrize(aut, M).checks)
    conv = Report()
    if inst.k == 1:
        try:
            converse.bessaga_metric(inst, Fraction(1, 2))
            conv.add("bessaga")
        except VerificationError as exc:
            conv.add("bessaga", str(exc))
    if converse.common_fixed_points(inst):
        try:
            converse.wong_metric(inst, Fraction(1, 2))
            conv.add("wong")
        except VerificationError as exc:
            conv.add("wong", str(exc))
    fixed_ok = all(
        sum(1 for x in range(inst.points) if t[x] == x) == 1 for t in inst.maps
    )
    conv.add("one-fixed-point-per-map", None if fixed_ok else "a map lacks a unique fixed point")
    take("converse", conv)
    return out


def cmd_verify(args, inst) -> int:
    aut = _gated(_finite(inst, "verify"))
    mu = parse_mu(args.mu)
    results = run_suites(aut, args.depth, mu, args.M)
    checks = [dict(suite=s, **c.to_json()) for s, c in results]
    for c in checks:
        if c["counterexample"] is not None and not isinstance(c["counterexample"], (str, int)):
            c["counterexample"] = str(c["counterexample"])
    ok = all(c["pass"] for c in checks)
    _emit_json(args, {"instance": inst.name, "ok": ok, "depth": args.depth, "mu": mu.to_json(), "checks": checks})
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_render(args, inst) -> int:
    if not isinstance(inst, AffineInstance):
        raise UsageError("render needs an affine2d instance; use verify for finite families")
    _emit(args, render_svg(inst, args.seed, args.samples, args.cylinders))
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "attractor": cmd_attractor,
    "metric": cmd_metric,
    "remetrize": cmd_remetrize,
    "bessaga": cmd_bessaga,
    "wong": cmd_wong,
    "unbounded": cmd_unbounded,
    "verify": cmd_verify,
    "render": cmd_render,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        inst = load_instance(args.instance)
        return COMMANDS[args.command](args, inst)
    except GateError as exc:
        print(f"gate: {exc}", file=sys.stderr)
        return EXIT_GATE
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (PreconditionError, UsageError, ResourceError, RemetrikaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
