"""Command line front end: one subcommand per experiment, JSON or CSV output."""
from __future__ import annotations

import argparse
import math
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import FrstrError, UsageError
from .io import csv_text, json_text, write_text

COMMANDS = ("string", "dims", "tube", "spectrum", "mwb", "lapmai", "qop", "fzeta", "zeros")
FAMILIES = ("cantor", "golden", "a-string", "self-similar", "explicit")

DEFAULT_FORMAT = {
    "string": "json", "dims": "json", "tube": "csv", "spectrum": "csv", "mwb": "json",
    "lapmai": "json", "qop": "json", "fzeta": "json", "zeros": "json",
}

_HELP = {
    "string": ("Build a fractal string; estimate D and Minkowski content from the inner "
               "tube volume V(eps) = sum_j min(l_j, 2 eps) ~ M eps^(1-D)."),
    "dims": ("Complex dimensions of a self-similar string: poles of zeta_L(s) = "
             "gap^s / (1 - sum_i m_i r_i^s), with residues gap^w / (sum_i m_i r_i^w log(1/r_i))."),
    "tube": ("Fractal tube formula V(eps) = sum_w res(zeta_L; w) (2 eps)^(1-w) / (w (1-w)) "
             "+ zeta_L(0) 2 eps, truncated at n_trunc conjugate pairs, against the exact V."),
    "spectrum": ("Frequency counting N_nu(x) = sum_j floor(l_j x) and the second term "
                 "(W(x) - N_nu(x)) / x^D ~ -zeta(D) L^D with W(x) = |Omega| x."),
    "mwb": ("Constant consistency c_D M = -zeta(D) L^D with c_D = (1-D) 2^(D-1) (-zeta(D)) "
            "and M = 2^(1-D) L^D / (1-D)."),
    "lapmai": ("Inverse spectral experiment: N_L(x) = floor(x^D (1 + 2 beta cos(tau log x))); "
               "the spectral oscillation at frequency tau scales with |zeta(D + i tau)|."),
    "qop": ("Quasi-invertibility probe: the truncated operator spectrum is the image "
            "zeta([c - iT, c + iT]); reports min |zeta| on the segment."),
    "fzeta": ("Relative drum zeta functions: distance zeta sum 2 min(l/2, delta)^s / s, "
              "tube zeta int_0^delta t^(s-2) V(t) dt, abscissa D and res = (1-D) res_tilde."),
    "zeros": "Nontrivial zero of zeta(1/2 + it) nearest to a given height (Hardy Z sign change).",
}


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    output_format: str = "json"
    output_path: str | None = None
    seed: int = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        m = re.search(r"argument (-[-\w]+)", message) or re.search(r"required: (-[-\w]+)", message)
        raise UsageError(f"{self.prog}: {message}", m.group(1) if m else None)


def _family_args(p: argparse.ArgumentParser, default: str | None = "cantor",
                 choices=FAMILIES) -> None:
    p.add_argument("--family", choices=choices, default=default)
    p.add_argument("--a", type=float, default=1.0, help="a-string exponent")
    p.add_argument("--ratios", default=None, help="comma separated ratios, e.g. 1/3,1/4")
    p.add_argument("--mults", default=None, help="comma separated multiplicities")
    p.add_argument("--gap", default=None, help="generator gap")
    p.add_argument("--lengths", default=None, help="comma separated lengths (explicit)")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--output", default=None, help="output file (default stdout)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frstr", description="Fractal string and zeta function experiments.")
    parser.add_argument("--version", action="version", version=f"frstr {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}",
                                parser_class=_Parser)

    def add(name):
        p = sub.add_parser(name, help=_HELP[name].split(":")[0], description=_HELP[name])
        _common(p)
        return p

    p = add("string")
    _family_args(p)
    p.add_argument("--eps-min", type=float, default=1e-8)
    p.add_argument("--eps-max", type=float, default=1e-2)
    p.add_argument("--samples", type=int, default=64)

    p = add("dims")
    _family_args(p, choices=("cantor", "golden", "self-similar"))
    p.add_argument("--re-min", type=float, default=-1.0)
    p.add_argument("--re-max", type=float, default=1.5)
    p.add_argument("--im-min", type=float, default=-30.0)
    p.add_argument("--im-max", type=float, default=30.0)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("tube")
    _family_args(p, choices=("cantor", "golden", "self-similar"))
    p.add_argument("--eps-min", type=float, default=1e-6)
    p.add_argument("--eps-max", type=float, default=1e-2)
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--n-trunc", type=int, default=50)

    p = add("spectrum")
    _family_args(p, default="a-string")
    p.add_argument("--x-min", type=float, default=10.0)
    p.add_argument("--x-max", type=float, default=1e6)
    p.add_argument("--per-decade", type=int, default=16)

    p = add("mwb")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--d-min", type=float, default=0.1)
    p.add_argument("--d-max", type=float, default=0.9)
    p.add_argument("--l-min", type=float, default=0.5)
    p.add_argument("--l-max", type=float, default=2.0)

    p = add("lapmai")
    p.add_argument("--D", type=float, default=0.5)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--beta", type=float, default=None, help="default 0.85 beta_max")
    p.add_argument("--x-max", type=float, default=1e5)
    p.add_argument("--per-decade", type=int, default=64)

    p = add("qop")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--grid", type=int, default=2000)
    p.add_argument("--curve-points", type=int, default=401)

    p = add("fzeta")
    _family_args(p, default="a-string")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--s-min", type=float, default=None)
    p.add_argument("--s-max", type=float, default=None)
    p.add_argument("--points", type=int, default=41)

    p = add("zeros")
    p.add_argument("--near", type=float, required=True)
    return parser


def _check(cond: bool, message: str, flag: str) -> None:
    if not cond:
        raise UsageError(message, flag)


def _validate(ns: argparse.Namespace) -> None:
    c = ns.command
    if hasattr(ns, "family"):
        if ns.family == "self-similar":
            _check(ns.ratios is not None and ns.gap is not None,
                   "--family self-similar needs --ratios and --gap", "--ratios")
        if ns.family == "explicit":
            _check(ns.lengths is not None, "--family explicit needs --lengths", "--lengths")
        if ns.family == "a-string":
            _check(ns.a > 0, "--a must be positive", "--a")
    for lo, hi in (("eps_min", "eps_max"), ("x_min", "x_max")):
        if hasattr(ns, lo):
            flag = "--" + lo.replace("_", "-")
            _check(0 < getattr(ns, lo) < getattr(ns, hi), f"{flag} must be positive and below the maximum", flag)
    if c == "dims":
        _check(ns.re_min < ns.re_max, "--re-min must be below --re-max", "--re-min")
        _check(ns.im_min < ns.im_max, "--im-min must be below --im-max", "--im-min")
    if c == "tube":
        _check(ns.n_trunc >= 0, "--n-trunc must be nonnegative", "--n-trunc")
        _check(ns.points >= 2, "--points must be at least 2", "--points")
    if c == "mwb":
        _check(ns.pairs >= 1, "--pairs must be positive", "--pairs")
        _check(0 < ns.d_min <= ns.d_max < 1, "--d-min/--d-max must lie in (0, 1)", "--d-min")
        _check(0 < ns.l_min <= ns.l_max, "--l-min/--l-max must be positive", "--l-min")
    if c == "lapmai":
        from .inverse_spectral import beta_max
        _check(0 < ns.D < 1, "--D must lie in (0, 1)", "--D")
        _check(ns.tau > 0, "--tau must be positive", "--tau")
        bmax = beta_max(ns.D, ns.tau)
        if ns.beta is None:
            ns.beta = 0.85 * bmax
        _check(0 <= ns.beta < bmax, f"--beta must lie in [0, {bmax:.6g}) for this D and tau", "--beta")
        _check(ns.x_max >= 1e4, "--x-max must be at least 1e4", "--x-max")
    if c == "qop":
        _check(ns.c > 0, "--c must be positive", "--c")
        _check(ns.T > 0, "--T must be positive", "--T")
    if c == "fzeta" and ns.delta is not None:
        _check(ns.delta > 0, "--delta must be positive", "--delta")


def parse(argv: list[str]) -> ExperimentConfig:
    """Parse and validate a token list into an :class:`ExperimentConfig`.

    Raises
    ------
    UsageError
        Naming the offending flag (or listing subcommands when none is given).
    """
    parser = build_parser()
    if not argv:
        raise UsageError("missing subcommand; choose one of: " + ", ".join(COMMANDS), None)
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise UsageError("missing subcommand; choose one of: " + ", ".join(COMMANDS), None)
    _validate(ns)
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "format", "output", "seed")}
    fmt = ns.format or DEFAULT_FORMAT[ns.command]
    return ExperimentConfig(ns.command, params, fmt, ns.output, ns.seed)


# -- runners ---------------------------------------------------------------------

def _fractions(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse number list {text!r}", None) from None


def _spec(params: dict):
    from .strings import SelfSimilarSpec

    fam = params["family"]
    if fam == "cantor":
        return SelfSimilarSpec.cantor()
    if fam == "golden":
        return SelfSimilarSpec((Fraction(1, 2), Fraction(1, 4)), (1, 1), Fraction(1, 4))
    if fam == "self-similar":
        ratios = _fractions(params["ratios"])
        mults = [int(m) for m in _fractions(params["mults"])] if params.get("mults") else [1] * len(ratios)
        gap = _fractions(params["gap"])[0]
        return SelfSimilarSpec(tuple(ratios), tuple(mults), gap)
    return None


def _string(params: dict):
    from .strings import a_string, from_lengths, self_similar_string

    fam = params["family"]
    if fam == "a-string":
        return a_string(params["a"])
    if fam == "explicit":
        return from_lengths(_fractions(params["lengths"]))
    return self_similar_string(_spec(params))


def _run_string(p):
    from .strings import estimate_dimension, tube_volume

    s = _string(p)
    est = estimate_dimension(s, (p["eps_min"], p["eps_max"]), p["samples"])
    result = {
        "string": s.to_json(),
        "dimension": s.dimension(),
        "total_length": s.total_length(),
        "estimate": {"D": est.D, "L": est.L, "lower_content": est.lower_content,
                     "upper_content": est.upper_content, "measurable": est.measurable.value},
    }
    eps = np.geomspace(p["eps_min"], p["eps_max"], p["samples"])
    rows = [(float(e), tube_volume(s, float(e))) for e in eps]
    return result, (["eps", "volume"], rows)


def _run_dims(p):
    from .complex_dims import Window, find_complex_dimensions

    spec = _spec(p)
    dims = find_complex_dimensions(spec, Window((p["re_min"], p["re_max"]), (p["im_min"], p["im_max"]), p["tol"]))
    result = {"spec": spec.to_json(), "dimension": spec.dimension, "lattice": spec.is_lattice(),
              "dimensions": [d.to_json() for d in dims]}
    rows = [(d.omega.real, d.omega.imag, d.residue.real, d.residue.imag, int(d.simple)) for d in dims]
    return result, (["re", "im", "residue_re", "residue_im", "simple"], rows)


def _run_tube(p):
    from .complex_dims import (Window, find_complex_dimensions, lattice_dimensions,
                               tube_formula_eval, zeta_at_zero)
    from .strings import self_similar_string, tube_volume

    spec = _spec(p)
    s = self_similar_string(spec)
    n = p["n_trunc"]
    if len(spec.ratios) == 1:
        dims = lattice_dimensions(spec, n)
    else:
        dims = find_complex_dimensions(spec, Window((-1.0, spec.dimension + 0.01), (-100.0, 100.0)))
    z0 = zeta_at_zero(spec)
    rows = []
    for e in np.geomspace(p["eps_min"], p["eps_max"], p["points"]):
        exact = tube_volume(s, float(e))
        approx = tube_formula_eval(dims, float(e), n, z0)
        rows.append((float(e), exact, approx, abs(approx - exact) / exact))
    result = {"max_rel_err": max(r[3] for r in rows), "n_dimensions": len(dims), "points": len(rows)}
    return result, (["eps", "exact", "formula", "rel_err"], rows)


def _run_spectrum(p):
    from .spectrum import geometric_grid, second_term_profile
    from .zeta_engine import zeta

    s = _string(p)
    D = s.dimension()
    if not 0 < D < 1:
        raise UsageError("spectrum needs an infinite string with 0 < D < 1", "--family")
    prof = second_term_profile(s, D, geometric_grid(p["x_min"], p["x_max"], p["per_decade"]))
    predicted = None
    if p["family"] == "a-string":
        # l_j ~ a j^-(a+1) gives N_L(x) ~ (a x)^D, so L = a
        predicted = -zeta(D).real * p["a"] ** D
    result = {"D": D, "final_x": float(prof.xs[-1]), "final_residual_over_xD": float(prof.residual_over_xD[-1]),
              "predicted_limit": predicted}
    rows = [(float(x), int(n), float(w), float(r))
            for x, n, w, r in zip(prof.xs, prof.n_nu, prof.weyl, prof.residual_over_xD)]
    return result, (["x", "n_nu", "weyl", "residual_over_xD"], rows)


def _run_mwb(p, seed):
    from .spectrum import c_D
    from .strings import content_from_limit
    from .zeta_engine import zeta

    rng = np.random.default_rng(seed)
    Ds = np.linspace(p["d_min"], p["d_max"], p["pairs"])
    Ls = rng.uniform(p["l_min"], p["l_max"], p["pairs"])
    rows = []
    for D, L in zip(Ds, Ls):
        D, L = float(D), float(L)
        cd, M = c_D(D), content_from_limit(D, L)
        rhs = -zeta(D).real * L**D
        rows.append((D, L, cd, M, cd * M, rhs, abs(cd * M - rhs)))
    result = {"max_abs_err": max(r[6] for r in rows), "pairs": len(rows)}
    return result, (["D", "L", "c_D", "M", "c_D_times_M", "minus_zeta_D_L_pow_D", "abs_err"], rows)


def _run_lapmai(p):
    from .inverse_spectral import lapmai_experiment

    rep = lapmai_experiment(p["D"], p["tau"], p["beta"], p["x_max"], p["per_decade"])
    rows = [(float(x), float(y)) for x, y in zip(rep.spec_series.x, rep.spec_series.y)]
    return rep.to_json(), (["x", "residual_over_xD"], rows)


def _run_qop(p):
    from .quantized import quasi_invertibility_probe

    res = quasi_invertibility_probe(p["c"], p["T"], p["grid"], p["curve_points"])
    rows = [(float(t), z.real, z.imag, abs(z)) for t, z in zip(res.curve_t, res.curve)]
    return res.to_json(), (["t", "re", "im", "abs"], rows)


def _run_fzeta(p):
    from .fractal_zeta import RelativeDrum1D, distance_zeta_value, estimate_abscissa, residue_at_D

    s = _string(p)
    drum = RelativeDrum1D(s, p["delta"])
    D = s.dimension()
    result = {"delta": drum.delta, "dimension": D, "abscissa": estimate_abscissa(drum)}
    if 0 < D < 1:
        rt, rd = residue_at_D(drum, D)
        result.update(res_tilde=rt, res_dist=rd, ratio=rd / rt, one_minus_D=1.0 - D)
    s_min = p["s_min"] if p["s_min"] is not None else D + 0.05
    s_max = p["s_max"] if p["s_max"] is not None else 2.0
    if not D < s_min < s_max:
        raise UsageError("need D < --s-min < --s-max", "--s-min")
    rows = []
    for sv in np.linspace(s_min, s_max, p["points"]):
        z = distance_zeta_value(drum, float(sv))
        rows.append((float(sv), z.real, z.imag))
    return result, (["s", "re", "im"], rows)


def _run_zeros(p):
    from .zeta_engine import find_zero_near, hardy_z

    t = find_zero_near(p["near"])
    return {"t": t, "hardy_z": hardy_z(t)}, (["t"], [(t,)])


def run(config: ExperimentConfig) -> int:
    """Execute a validated config; returns the process exit status."""
    start = time.perf_counter()
    p = config.params
    try:
        if config.command == "mwb":
            result, table = _run_mwb(p, config.seed)
        else:
            result, table = globals()[f"_run_{config.command}"](p)
    except UsageError as exc:
        _report_error(exc)
        return 2
    except (FrstrError, ArithmeticError, ValueError) as exc:
        print(f"frstr: error: {exc}", file=sys.stderr)
        return 1
    if config.output_format == "csv":
        text = csv_text(*table)
    else:
        text = json_text({
            "command": config.command,
            "params": p,
            "version": __version__,
            "seed": config.seed,
            "wall_time_s": round(time.perf_counter() - start, 6),
            "result": result,
        })
    write_text(text, config.output_path)
    return 0


def _report_error(exc: UsageError) -> None:
    flag = f" [{exc.flag}]" if exc.flag else ""
    print(f"frstr: usage error{flag}: {exc}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse(argv)
    except UsageError as exc:
        _report_error(exc)
        if exc.flag is None:
            build_parser().print_usage(sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
