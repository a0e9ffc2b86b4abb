"""Command-line interface: solve, certify, scan, table, bubble, selfcheck.

Exit codes: 0 success, 1 input/usage/solver error, 2 converged but an
identity check failed. A symmetry verdict is data, never an exit code.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .errors import ParameterError, ToolkitError
from .params import make_params, q_threshold, s2_closed_form
from .profile import DEFAULT_HALF_WIDTH, DEFAULT_POINTS, Grid, write_profile
from .results import ResultEnvelope, dumps, read_csv, write_csv
from .solver import SolverOptions, solve_radial
from .symmetry import bs_window, bubble_comparison, certify, lambda_star, s_star
from .verify import IdentityReport, verify_ground_state

log = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_VERIFY = 0, 1, 2

_DEFAULTS = {
    "solve": {"half_width": DEFAULT_HALF_WIDTH, "points": DEFAULT_POINTS, "tol": 1e-8},
    "certify": {"half_width": DEFAULT_HALF_WIDTH, "points": DEFAULT_POINTS, "tol": 1e-8},
    "scan": {"steps": 40, "half_width": DEFAULT_HALF_WIDTH, "points": DEFAULT_POINTS, "format": "json"},
    "table": {"n_range": "5:12", "lambda_range": "-10:0", "steps": 11, "linear": False, "windows": False, "format": "csv"},
    "bubble": {"offsets": "0", "format": "csv"},
    "selfcheck": {},
}
_REQUIRED = {
    "solve": ("n", "q", "lambda"),
    "certify": ("n", "q", "lambda"),
    "scan": ("n", "q", "lambda_range"),
    "table": (),
    "bubble": ("n", "lambda"),
    "selfcheck": (),
}
_VALUE_FLAGS = ("--lambda", "--lambda-range", "--n-range", "--offsets")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _range(text: str, name: str) -> tuple[float, float]:
    m = re.fullmatch(r"\s*([^:]+):([^:]+)\s*", str(text))
    if not m:
        raise UsageError(f"{name} must look like lo:hi, got {text!r}")
    try:
        lo, hi = float(m.group(1)), float(m.group(2))
    except ValueError:
        raise UsageError(f"{name} must look like lo:hi, got {text!r}") from None
    if lo > hi:
        raise UsageError(f"{name} is reversed: {lo} > {hi}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    parser = _Parser(prog="biharmonic-gs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=False):
        p.add_argument("--config", default=sup, help="JSON file with the same keys as the flags")
        p.add_argument("--out", default=sup, help="output path (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=("json", "csv"), default=sup)

    def params(p, q=True):
        p.add_argument("--n", type=int, default=sup)
        if q:
            p.add_argument("--q", type=float, default=sup)
        p.add_argument("--lambda", dest="lambda", type=float, default=sup)

    def grid(p):
        p.add_argument("--half-width", dest="half_width", type=float, default=sup)
        p.add_argument("--points", type=int, default=sup)

    p = sub.add_parser("solve", help="radial ground state with identity checks")
    params(p)
    grid(p)
    p.add_argument("--tol", type=float, default=sup)
    common(p)

    p = sub.add_parser("certify", help="first-harmonic symmetry-breaking certificate")
    params(p)
    grid(p)
    p.add_argument("--tol", type=float, default=sup)
    common(p)

    p = sub.add_parser("scan", help="sign changes of the second-variation gap in lambda")
    p.add_argument("--n", type=int, default=sup)
    p.add_argument("--q", type=float, default=sup)
    p.add_argument("--lambda-range", dest="lambda_range", default=sup)
    p.add_argument("--steps", type=int, default=sup)
    grid(p)
    common(p, fmt=True)

    p = sub.add_parser("table", help="constants per dimension")
    p.add_argument("--n-range", dest="n_range", default=sup)
    p.add_argument("--linear", action="store_true", default=sup, help="add S_2(lambda) = mu^2 - lambda*nu")
    p.add_argument("--windows", action="store_true", default=sup, help="add the exponent window ends")
    p.add_argument("--lambda-range", dest="lambda_range", default=sup)
    p.add_argument("--steps", type=int, default=sup)
    common(p, fmt=True)

    p = sub.add_parser("bubble", help="translated bubble quotients in the critical case")
    p.add_argument("--n", type=int, default=sup)
    p.add_argument("--lambda", dest="lambda", type=float, default=sup)
    p.add_argument("--offsets", default=sup, help="comma separated |y| values")
    common(p, fmt=True)

    p = sub.add_parser("selfcheck", help="run the built-in invariant suite")
    common(p)
    return parser


def _join_negative_values(argv: list[str]) -> list[str]:
    # "--lambda-range -1000:-1" would otherwise be read as an option
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and re.match(r"-[\d.]", argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def resolve_config(command: str, given: dict) -> dict:
    """Defaults, then the --config file, then explicit flags."""
    cfg = dict(_DEFAULTS[command])
    path = given.pop("config", None)
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError(f"config {path} must hold a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in data.items()})
    cfg.update(given)
    missing = [k for k in _REQUIRED[command] if cfg.get(k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"{command}: missing required argument(s) {flags}")
    return cfg


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# --- commands -------------------------------------------------------------------


def _linear_message(n, lam) -> str:
    p = make_params(n, 2.0, lam)
    return (
        f"q = 2 has no minimizer: the infimum mu^2 - lambda*nu = {s2_closed_form(p):.17g} "
        "is not attained; use `table --linear` for the closed form"
    )


def _ground_state(cfg):
    n, q, lam = cfg["n"], cfg["q"], cfg["lambda"]
    if float(q) == 2.0:
        raise ParameterError(_linear_message(n, lam))
    p = make_params(n, q, lam)
    grid = Grid(float(cfg["half_width"]), int(cfg["points"]))
    return solve_radial(p, grid, SolverOptions(tol=float(cfg["tol"])))


def cmd_solve(cfg) -> int:
    gs = _ground_state(cfg)
    reports = verify_ground_state(gs)
    out = cfg.get("out")
    profile_path = None
    if out is not None:
        profile_path = str(Path(out).with_suffix(".profile.csv"))
        write_profile(gs.w, profile_path)
    env = ResultEnvelope("solve", cfg, gs.to_dict(profile_path), reports)
    _emit(env.dumps(), out)
    return EXIT_OK if gs.converged and env.verified else EXIT_VERIFY


def cmd_certify(cfg) -> int:
    gs = _ground_state(cfg)
    reports = verify_ground_state(gs)
    cert = certify(gs)
    payload = {"certificate": cert.to_dict(), "ground_state": gs.to_dict()}
    env = ResultEnvelope("certify", cfg, payload, reports)
    _emit(env.dumps(), cfg.get("out"))
    return EXIT_OK if env.verified and cert.routes_agree else EXIT_VERIFY


SCAN_COLUMNS = ["lambda", "D", "s_rad", "verdict"]
BRACKET_COLUMNS = ["bracket_lo", "bracket_hi"]


def scan_csv(result) -> str:
    text = write_csv([r.to_dict() for r in result.rows], SCAN_COLUMNS)
    if result.brackets:
        rows = [dict(zip(BRACKET_COLUMNS, b)) for b in result.brackets]
        text += "\n" + write_csv(rows, BRACKET_COLUMNS)
    return text


def parse_scan_csv(text: str) -> tuple[list[dict], list[dict]]:
    """Inverse of ``scan_csv``: (table rows, bracket rows)."""
    table, _, brackets = text.partition("\n\n")
    return read_csv(table), (read_csv(brackets) if brackets.strip() else [])


def cmd_scan(cfg) -> int:
    lo, hi = _range(cfg["lambda_range"], "--lambda-range")
    n, q = cfg["n"], float(cfg["q"])
    make_params(n, q, lo)
    make_params(n, q, hi)
    steps = int(cfg["steps"])
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    grid = Grid(float(cfg["half_width"]), int(cfg["points"]))
    result = lambda_star(n, q, (lo, hi), steps, grid)
    ok = all(r.verified for r in result.rows)
    if cfg["format"] == "csv":
        _emit(scan_csv(result), cfg.get("out"))
    else:
        env = ResultEnvelope("scan", cfg, result.to_dict())
        _emit(env.dumps(), cfg.get("out"))
    return EXIT_OK if ok else EXIT_VERIFY


def constants_rows(n_lo: int, n_hi: int, windows=False, linear=False, lambdas=()) -> list[dict]:
    rows = []
    for n in range(n_lo, n_hi + 1):
        p = make_params(n, 2.0 * n / (n - 4), 0.0)
        win = bs_window(n)
        base = {
            "n": n,
            "mu": p.mu,
            "nu": p.nu,
            "lambda_max": p.lambda_max,
            "omega_n": p.omega_n,
            "q_crit": p.q_crit,
            "q_n": q_threshold(n),
            "window_nonempty": win is not None,
        }
        if windows:
            base["window_lo"] = win[0] if win else None
            base["window_hi"] = win[1] if win else None
        if linear:
            for lam in lambdas:
                rows.append({**base, "lambda": float(lam), "S2": s2_closed_form(p.with_lambda(lam))})
        else:
            rows.append(base)
    return rows


def cmd_table(cfg) -> int:
    n_lo, n_hi = _range(cfg["n_range"], "--n-range")
    if n_lo != int(n_lo) or n_hi != int(n_hi):
        raise UsageError("--n-range needs integer ends")
    lambdas = ()
    if cfg["linear"]:
        lo, hi = _range(cfg["lambda_range"], "--lambda-range")
        steps = int(cfg["steps"])
        if steps < 1:
            raise UsageError("--steps must be at least 1")
        lambdas = [lo] if steps == 1 else [float(x) for x in np.linspace(lo, hi, steps)]
        for lam in lambdas:
            make_params(int(n_lo), 4.0, lam)
    rows = constants_rows(int(n_lo), int(n_hi), bool(cfg["windows"]), bool(cfg["linear"]), lambdas)
    if cfg["format"] == "csv":
        _emit(write_csv(rows), cfg.get("out"))
    else:
        _emit(ResultEnvelope("table", cfg, {"rows": rows}).dumps(), cfg.get("out"))
    return EXIT_OK


def _offsets(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--offsets must be a comma separated list of numbers, got {text!r}") from None


def cmd_bubble(cfg) -> int:
    n, lam = cfg["n"], float(cfg["lambda"])
    make_params(n, 2.0 * n / (n - 4) if n > 4 else 4.0, lam)
    offsets = _offsets(cfg["offsets"])
    if any(y < 0 for y in offsets):
        raise UsageError("offsets must be non-negative")
    rows = [r.to_dict() for r in bubble_comparison(n, lam, offsets)]
    star = s_star(n)
    report = IdentityReport.equality("s_star_routes", star.value, star.ef_value, 1e-8)
    if cfg["format"] == "csv":
        _emit(write_csv(rows, ["offset", "R", "S_star", "gap"]), cfg.get("out"))
    else:
        payload = {"rows": rows, "s_star": star.to_dict()}
        _emit(ResultEnvelope("bubble", cfg, payload, [report]).dumps(), cfg.get("out"))
    return EXIT_OK if report.passed else EXIT_VERIFY


def _selfchecks():
    from .symmetry import spherical_mean_weight

    def coefficients():
        for n in range(5, 15):
            for lam in np.linspace(-100, n * n / 4 - 0.5, 10):
                p = make_params(n, 3.0, lam)
                lhs = p.a_coeff**2 - p.b_coeff
                rhs = (lam / 2 - (n - 2)) ** 2
                if abs(lhs - rhs) > 1e-12 * max(abs(rhs), 1.0):
                    return False
        return True

    def solve_verify():
        gs = solve_radial(make_params(5, 4.0, 0.0))
        return gs.converged and all(r.passed for r in verify_ground_state(gs))

    def certificate():
        cert = certify(solve_radial(make_params(7, 4.5, -500.0)))
        return cert.routes_agree and cert.verdict == "SymmetryBroken"

    def windows():
        return bs_window(5) is None and bs_window(6) is None and all(bs_window(n) for n in range(7, 13))

    def star():
        return all(s_star(n).agreement < 1e-8 for n in (5, 6))

    def bubble_zero():
        return all(abs(r.gap) <= 1e-10 * r.s_star for r in bubble_comparison(6, 0.0, [0.0, 8.0]))

    def mean_weight():
        return abs(spherical_mean_weight(1.0, 2.0, 3) - np.log(3.0) / 4.0) < 1e-12

    def backends():
        p = make_params(6, 3.0, -10.0)
        vals = []
        for name in kernels.available():
            with kernels.use_backend(name):
                vals.append(solve_radial(p).s_rad)
        return max(vals) - min(vals) <= 1e-12 * vals[0]

    return [
        ("coefficient_identity", coefficients),
        ("solve_and_verify", solve_verify),
        ("symmetry_certificate", certificate),
        ("exponent_windows", windows),
        ("critical_constant_routes", star),
        ("bubble_without_hardy_term", bubble_zero),
        ("spherical_mean_closed_form", mean_weight),
        ("backend_agreement", backends),
    ]


def cmd_selfcheck(cfg) -> int:
    results = []
    for name, check in _selfchecks():
        t0 = time.perf_counter()
        try:
            ok = bool(check())
        except ToolkitError as exc:
            log.error("%s raised %s", name, exc)
            ok = False
        results.append({"check": name, "pass": ok, "seconds": time.perf_counter() - t0})
        print(f"{'PASS' if ok else 'FAIL'}  {name}", file=sys.stderr)
    if cfg.get("out") is not None:
        ResultEnvelope("selfcheck", cfg, {"checks": results}).write(cfg["out"])
    return EXIT_OK if all(r["pass"] for r in results) else EXIT_VERIFY


COMMANDS = {
    "solve": cmd_solve,
    "certify": cmd_certify,
    "scan": cmd_scan,
    "table": cmd_table,
    "bubble": cmd_bubble,
    "selfcheck": cmd_selfcheck,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = vars(parser.parse_args(_join_negative_values(argv)))
        command = ns.pop("command")
        verbose = ns.pop("verbose")
        logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format="%(levelname)s %(message)s")
        cfg = resolve_config(command, ns)
        return COMMANDS[command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ToolkitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
