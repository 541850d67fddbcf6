"""Command-line front end: problem files in, CSV fields and verification
reports out.

Exit codes: 0 success, 2 input/validation error, 3 numerical failure,
4 I/O error, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .core import DomainError, FractionalOrder, Tolerance
from .expr import EvaluationError, ParseError, parse
from .fracops import QuadratureConfig, QuadratureError
from .solver import (
    ClosedFormSolution,
    Field2D,
    WaveProblem,
    evaluate_field,
    solve_dalembert,
    solve_first_order,
)
from .verify import (
    check_initial_conditions,
    compare_candidate_forms,
    candidate_product_forms,
    pde_residual,
    route_equivalence,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4
EXIT_VERIFY = 5

SCHEMA_VERSION = 1
_REQUIRED_KEYS = ("schema_version", "alpha", "c", "f", "g", "x_max", "t_max", "nx", "nt")
_OPTIONAL_KEYS = ("equation", "quadrature")
_QUAD_KEYS = ("n_panels", "abs_tol", "rel_tol")

FIGURE_ALPHAS = (0.7, 0.8, 0.9, 1.0)

_FIGURES_README = """\
Wave-equation example datasets
==============================

Each CSV holds one solved field u(x, t) with header `x,t,u`, rows in t-major
order, for the two worked example problems (c = 1, unit scale factors,
x_max = t_max = 2*pi):

  example1_alpha*.csv : displacement profile x^2, velocity profile sin(x)
  example2_alpha*.csv : zero displacement, velocity profile sin(x)

The velocity integral is evaluated by adaptive quadrature, which is the
ground truth here.  For example 2 the quadrature agrees with the product form

    u = (1/c^a) * sin(X') * sin(c^a * T'),   X' = x^a/gamma(1+a), T' = t^a/gamma(1+a)

at every grid point.  A cos(X')*cos(c^a*T') variant of this closed form is
sometimes quoted for the same problem; it fails the initial condition
u(x, 0) = 0 (it evaluates to (1/c^a)*cos(X') there) and disagrees with the
quadrature everywhere.  `fracwave verify` reports both candidates whenever a
problem matches one of the example shapes.

The solution depends visibly on the derivative order: for fixed (x, t) the
emitted datasets differ across alpha = 0.7, 0.8, 0.9, 1.0.
"""


class ProblemFileError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemFile:
    """Validated contents of a problem file plus solver-facing objects."""

    problem: WaveProblem
    nx: int
    nt: int
    equation: str  # 'dalembert' or 'first_order'
    cfg: QuadratureConfig


def _require_number(raw: dict, key: str, positive: bool = True) -> float:
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFileError(f"key '{key}' must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value) or (positive and value <= 0.0):
        raise ProblemFileError(f"key '{key}' must be a finite positive number, got {value!r}")
    return value


def load_problem_file(path: str | Path) -> ProblemFile:
    """Parse and fully validate a problem file; raises ProblemFileError with
    an explanatory message on any defect (unknown keys are rejected)."""
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ProblemFileError(f"{path} is not well-formed: {exc}") from exc
    if not isinstance(raw, dict):
        raise ProblemFileError(f"{path} must contain a mapping of keys")

    unknown = sorted(set(raw) - set(_REQUIRED_KEYS) - set(_OPTIONAL_KEYS))
    if unknown:
        raise ProblemFileError(f"unknown keys: {', '.join(unknown)}")
    missing = sorted(set(_REQUIRED_KEYS) - set(raw))
    if missing:
        raise ProblemFileError(f"missing keys: {', '.join(missing)}")
    if raw["schema_version"] != SCHEMA_VERSION:
        raise ProblemFileError(
            f"unsupported schema_version {raw['schema_version']!r} (expected {SCHEMA_VERSION})"
        )

    alpha = _require_number(raw, "alpha")
    if not 0.0 < alpha <= 1.0:
        raise ProblemFileError(f"alpha must lie in (0, 1], got {alpha}")
    c = _require_number(raw, "c")
    x_max = _require_number(raw, "x_max")
    t_max = _require_number(raw, "t_max")

    grids = {}
    for key in ("nx", "nt"):
        value = raw[key]
        if isinstance(value, bool) or not isinstance(value, int) or value < 2:
            raise ProblemFileError(f"key '{key}' must be an integer >= 2, got {value!r}")
        grids[key] = value

    exprs = {}
    for key in ("f", "g"):
        text = raw[key]
        if not isinstance(text, str):
            raise ProblemFileError(f"key '{key}' must be an expression string, got {text!r}")
        try:
            exprs[key] = parse(text)
        except ParseError as exc:
            raise ProblemFileError(f"key '{key}': {exc}") from exc

    equation = raw.get("equation", "dalembert")
    if equation not in ("dalembert", "first_order"):
        raise ProblemFileError(
            f"equation must be 'dalembert' or 'first_order', got {equation!r}"
        )

    quad = raw.get("quadrature", {})
    if not isinstance(quad, dict):
        raise ProblemFileError("key 'quadrature' must be a mapping")
    unknown_q = sorted(set(quad) - set(_QUAD_KEYS))
    if unknown_q:
        raise ProblemFileError(f"unknown quadrature keys: {', '.join(unknown_q)}")
    n_panels = quad.get("n_panels", 1024)
    if isinstance(n_panels, bool) or not isinstance(n_panels, int) or n_panels < 8:
        raise ProblemFileError(f"quadrature n_panels must be an integer >= 8, got {n_panels!r}")
    abs_tol = float(quad.get("abs_tol", 1e-10))
    rel_tol = float(quad.get("rel_tol", 0.0))
    try:
        cfg = QuadratureConfig(n_panels, Tolerance(abs_tol, rel_tol))
        problem = WaveProblem(
            FractionalOrder(alpha), c, exprs["f"], exprs["g"], x_max, t_max
        )
    except (DomainError, EvaluationError) as exc:
        raise ProblemFileError(str(exc)) from exc
    return ProblemFile(problem, grids["nx"], grids["nt"], equation, cfg)


def _solve(pf: ProblemFile) -> ClosedFormSolution:
    if pf.equation == "first_order":
        return solve_first_order(pf.problem)
    return solve_dalembert(pf.problem, pf.cfg)


def write_field_csv(field: Field2D, path: str | Path) -> None:
    """CSV with header x,t,u; rows iterate x within each t (t-major order);
    17 significant digits, so files round-trip and are byte-deterministic."""
    lines = ["x,t,u"]
    for j, t in enumerate(field.t):
        row = field.values[j]
        for i, x in enumerate(field.x):
            lines.append(f"{x:.17g},{t:.17g},{row[i]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


# --- subcommands ----------------------------------------------------------------


def cmd_solve(args) -> int:
    try:
        pf = load_problem_file(args.problem)
    except ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    nx = args.nx or pf.nx
    nt = args.nt or pf.nt
    pf = _override_tol(pf, args.tol)
    try:
        field = evaluate_field(_solve(pf), nx, nt)
    except (QuadratureError, EvaluationError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    try:
        write_field_csv(field, args.out)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _override_tol(pf: ProblemFile, tol: float | None) -> ProblemFile:
    if tol is None:
        return pf
    cfg = QuadratureConfig(pf.cfg.n_panels, Tolerance(tol, pf.cfg.adaptive_tol.rel_tol))
    return ProblemFile(pf.problem, pf.nx, pf.nt, pf.equation, cfg)


def cmd_verify(args) -> int:
    try:
        pf = load_problem_file(args.problem)
    except ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    pf = _override_tol(pf, args.tol)
    base_nx = args.nx or 64
    base_nt = args.nt or 64
    report: dict = {"schema_version": SCHEMA_VERSION, "problem": str(args.problem),
                    "alpha": pf.problem.alpha, "equation": pf.equation}
    failures: list[str] = []
    try:
        sol = _solve(pf)
        candidate = getattr(args, "candidate_form", "quadrature")
        subject = sol
        if candidate != "quadrature":
            forms = candidate_product_forms(pf.problem)
            if forms is None or candidate not in forms:
                print(
                    f"error: --candidate-form {candidate} requires a problem matching "
                    "one of the worked example shapes",
                    file=sys.stderr,
                )
                return EXIT_INPUT
            subject = forms[candidate]
            report["candidate_form"] = candidate

        ic = check_initial_conditions(pf.problem, subject)
        report["initial_conditions"] = ic.to_dict()
        if not ic.passed:
            failures.append("initial-condition check failed")

        if pf.equation == "dalembert":
            resid = pde_residual(pf.problem, subject, base_nx, base_nt)
            report["residual"] = resid.to_dict()
            if not resid.monotone:
                failures.append("residual did not decrease under grid refinement")
            forms_report = compare_candidate_forms(pf.problem, sol)
            if forms_report is not None:
                report["candidate_forms"] = forms_report.to_dict()
            report["route_equivalence"] = {"applicable": False}
        else:
            deviation = route_equivalence(pf.problem)
            report["route_equivalence"] = {
                "applicable": True,
                "max_deviation": deviation,
                "tol": 1e-12,
            }
            if deviation > 1e-12:
                failures.append("characteristics and transform routes disagree")
    except (QuadratureError, EvaluationError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    report["failures"] = failures
    report["passed"] = not failures
    try:
        Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(_verify_text_block(report))
    return EXIT_OK if not failures else EXIT_VERIFY


def _verify_text_block(report: dict) -> str:
    lines = [
        f"verification of {report['problem']} (alpha = {report['alpha']}, "
        f"{report['equation']})"
    ]
    if "candidate_form" in report:
        lines.append(f"  subject: candidate closed form '{report['candidate_form']}'")
    ic = report["initial_conditions"]
    lines.append(
        f"  u(x,0) = f(X'):        max error {ic['position_max_error']:.3e}  "
        f"[{'pass' if ic['position_pass'] else 'FAIL'}]"
    )
    if ic["velocity_max_error"] is not None:
        lines.append(
            f"  alpha-velocity at t=0: max error {ic['velocity_max_error']:.3e}  "
            f"[{'pass' if ic['velocity_pass'] else 'FAIL'}]"
        )
    if "residual" in report:
        resid = report["residual"]
        seq = " -> ".join(f"{lv['linf']:.4e}" for lv in resid["levels"])
        lines.append(
            f"  wave-equation residual Linf across refinements: {seq}  "
            f"[{'pass' if resid['monotone'] else 'FAIL'}]"
        )
        lines.append(f"    interior-core Linf at finest level: {resid['levels'][-1]['core_linf']:.3e}")
        for note in resid["notes"]:
            lines.append(f"    note: {note}")
    if "candidate_forms" in report:
        forms = report["candidate_forms"]
        for name in forms["candidates"]:
            lines.append(
                f"  candidate '{name}': IC error {forms['ic_max_error'][name]:.3e}, "
                f"max gap vs quadrature {forms['gap_vs_quadrature'][name]:.3e}"
            )
        lines.append(f"    note: {forms['note']}")
    route = report.get("route_equivalence", {})
    if route.get("applicable"):
        lines.append(
            f"  route equivalence: max deviation {route['max_deviation']:.3e}  "
            f"[{'pass' if route['max_deviation'] <= route['tol'] else 'FAIL'}]"
        )
    lines.append("  result: " + ("PASS" if report["passed"] else "FAIL"))
    return "\n".join(lines)


def _example_problem(example: int, alpha: float) -> WaveProblem:
    f_text = "x^2" if example == 1 else "0"
    return WaveProblem(
        FractionalOrder(alpha),
        1.0,
        parse(f_text),
        parse("sin(x)"),
        2.0 * math.pi,
        2.0 * math.pi,
    )


def cmd_figures(args) -> int:
    outdir = Path(args.out)
    cfg = QuadratureConfig(1024, Tolerance(args.tol if args.tol is not None else 1e-12, 0.0))
    nx = args.nx or 65
    nt = args.nt or 65
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        for example in (1, 2):
            for alpha in FIGURE_ALPHAS:
                problem = _example_problem(example, alpha)
                field = evaluate_field(solve_dalembert(problem, cfg), nx, nt)
                write_field_csv(field, outdir / f"example{example}_alpha{alpha:g}.csv")
        (outdir / "README.md").write_text(_FIGURES_README)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (QuadratureError, EvaluationError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        pf = load_problem_file(args.problem)
        alphas = []
        for tok in args.alphas.split(","):
            try:
                alpha = float(tok)
            except ValueError:
                raise ProblemFileError(f"alpha list entry {tok!r} is not a number") from None
            if not 0.0 < alpha <= 1.0:
                raise ProblemFileError(f"alpha {alpha} outside (0, 1]")
            alphas.append(alpha)
        if not alphas:
            raise ProblemFileError("empty alpha list")
    except ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    nx = args.nx or pf.nx
    nt = args.nt or pf.nt
    pf = _override_tol(pf, args.tol)
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        for alpha in alphas:
            base = pf.problem
            problem = WaveProblem(
                FractionalOrder(alpha), base.speed, base.f, base.g, base.x_max, base.t_max
            )
            sub = ProblemFile(problem, nx, nt, pf.equation, pf.cfg)
            field = evaluate_field(_solve(sub), nx, nt)
            write_field_csv(field, outdir / f"alpha_{alpha:g}.csv")
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (QuadratureError, EvaluationError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracwave",
        description="closed-form solutions of fractional wave equations, "
        "with numerical verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_grid_flags(p):
        p.add_argument("--nx", type=int, default=None, help="grid points along x")
        p.add_argument("--nt", type=int, default=None, help="grid points along t")
        p.add_argument("--tol", type=float, default=None,
                       help="absolute tolerance for the velocity-profile integral")

    p_solve = sub.add_parser("solve", help="solve a problem file and write a CSV field")
    p_solve.add_argument("problem")
    p_solve.add_argument("--out", required=True)
    add_grid_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="run verification checks and write a report")
    p_verify.add_argument("problem")
    p_verify.add_argument("--out", required=True)
    p_verify.add_argument(
        "--candidate-form",
        choices=("quadrature", "sin_product", "cos_product"),
        default="quadrature",
        help="verify a printed closed-form candidate instead of the "
        "quadrature solution (worked example shapes only)",
    )
    add_grid_flags(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_fig = sub.add_parser(
        "figures", help="emit the example datasets for alpha = 0.7, 0.8, 0.9, 1.0"
    )
    p_fig.add_argument("--out", required=True)
    add_grid_flags(p_fig)
    p_fig.set_defaults(func=cmd_figures)

    p_sweep = sub.add_parser("sweep", help="solve one problem across several orders")
    p_sweep.add_argument("problem")
    p_sweep.add_argument("--alphas", required=True, help="comma-separated orders in (0, 1]")
    p_sweep.add_argument("--out", required=True)
    add_grid_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
