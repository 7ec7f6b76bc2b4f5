"""Command-line front end.

Every command resolves its parameters (physical --L/--ell/--g or scaled
--lambda/--Z/--scale, mutually exclusive), runs the corresponding solver and
writes CSV or JSON.  Output is deterministic: identical configurations
produce byte-identical files, every numeric default is echoed in the JSON
header, and floats are printed with 17 significant digits.

Exit codes: 0 success (including legitimately empty spectra), 1 bad
arguments, 2 numeric failure (non-convergence, broken symmetry), with a
diagnostic on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .continuation import ContinuationError, find_exceptional, sweep
from .continuation import classify_levels as _classify_levels
from .model import PhysicalParams, ScaledParams, physical_params, scale_params
from .oracle import GridSpec, PTSymmetryError, oracle_spectrum
from .secular import SigmaTau, eval_Dratio
from .shallow import ShallowParams, solution_curve, solve_levels
from .spectrum import Spectrum, default_R_max, scan_roots


class CliError(Exception):
    """Bad command line; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # keep argparse from sys.exit(2)
        raise CliError(message)


def _fmt(x: float) -> str:
    return format(float(x), ".16e")


def _add_param_group(p: argparse.ArgumentParser) -> None:
    p.add_argument("--L", type=float, help="well half-width (physical group)")
    p.add_argument("--ell", type=float, help="step onset (physical group)")
    p.add_argument("--g", type=float, help="step height (physical group)")
    p.add_argument("--lambda", dest="lam", type=float, help="shift ratio ell/(L-ell) (scaled group)")
    p.add_argument("--Z", type=float, help="scaled coupling g(L-ell)^2/2 (scaled group)")
    p.add_argument("--scale", type=float, default=None, help="length scale L-ell (scaled group, default 1)")


def _resolve_params(args: argparse.Namespace) -> ScaledParams:
    physical = [args.L, args.ell, args.g]
    scaled = [args.lam, args.Z]
    has_physical = any(v is not None for v in physical)
    has_scaled = any(v is not None for v in scaled) or args.scale is not None
    if has_physical and has_scaled:
        raise CliError("give either --L/--ell/--g or --lambda/--Z/--scale, not both")
    if has_physical:
        if any(v is None for v in physical):
            raise CliError("the physical group needs all of --L, --ell and --g")
        return scale_params(PhysicalParams(L=args.L, ell=args.ell, g=args.g))
    if args.lam is None or args.Z is None:
        raise CliError("the scaled group needs both --lambda and --Z")
    return ScaledParams(lam=args.lam, Z=args.Z, scale=args.scale if args.scale is not None else 1.0)


def _header(command: str, parameters: dict[str, Any]) -> dict[str, Any]:
    return {"tool": "ptwell", "version": __version__, "command": command, "parameters": parameters}


def _params_dict(s: ScaledParams) -> dict[str, float]:
    p = physical_params(s)
    return {"lambda": s.lam, "Z": s.Z, "scale": s.scale, "L": p.L, "ell": p.ell, "g": p.g}


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(rows: list[list[str]]) -> str:
    return "".join(",".join(cells) + "\n" for cells in rows)


def _roots_rows(spec: Spectrum) -> list[list[str]]:
    rows = [["index", "R", "sigma", "tau", "energy", "residual", "stability"]]
    for r in spec.roots:
        rows.append(
            [str(r.index), _fmt(r.R), _fmt(r.sigma), _fmt(r.tau), _fmt(r.energy), _fmt(r.residual), r.stability.value]
        )
    return rows


def _roots_json(spec: Spectrum) -> list[dict[str, Any]]:
    out = []
    for r in spec.roots:
        item: dict[str, Any] = {
            "index": r.index,
            "R": r.R,
            "sigma": r.sigma,
            "tau": r.tau,
            "energy": r.energy,
            "residual": r.residual,
            "stability": r.stability.value,
        }
        if r.critical_Z is not None:
            item["critical_Z"] = r.critical_Z
        out.append(item)
    return out


def _diag_json(spec: Spectrum) -> dict[str, Any]:
    d = spec.diagnostics
    return {
        "raw_sign_changes": d.raw_sign_changes,
        "rejected_spurious": d.rejected_spurious,
        "near_tangencies": [
            {"R": t.R, "min_abs_det": t.min_abs_det, "local_scale": t.local_scale} for t in d.near_tangencies
        ],
        "bracket_width": d.bracket_width,
    }


def _parse_span(text: str, default_n: int = 201) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise CliError(f"range must look like lo:hi or lo:hi:n, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    n = int(parts[2]) if len(parts) == 3 else default_n
    if not (hi > lo and n >= 2):
        raise CliError(f"invalid range {text!r}")
    return lo, hi, n


def _parse_clip(text: str | None) -> tuple[float, float] | None:
    if text is None:
        return None
    parts = text.split(":")
    if len(parts) == 1:
        c = float(parts[0])
        return (-c, c)
    if len(parts) == 2:
        return (float(parts[0]), float(parts[1]))
    raise CliError(f"clip must be c or lo:hi, got {text!r}")


# ---------------------------------------------------------------------------
# commands


def _cmd_spectrum(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    r_max = args.rmax if args.rmax is not None else default_R_max(params)
    spec = scan_roots(params, R_max=r_max)
    if args.format == "json":
        doc = {
            "header": _header("spectrum", {**_params_dict(params), "R_max": r_max}),
            "roots": _roots_json(spec),
            "diagnostics": _diag_json(spec),
        }
        _write(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        _write(args.out, _csv(_roots_rows(spec)))
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    r_max = args.rmax if args.rmax is not None else default_R_max(params)
    spec = _classify_levels(params, Z_cap=args.zcap, R_max=r_max)
    if args.format == "json":
        doc = {
            "header": _header("classify", {**_params_dict(params), "R_max": r_max, "Z_cap": args.zcap}),
            "roots": _roots_json(spec),
            "diagnostics": _diag_json(spec),
        }
        _write(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        _write(args.out, _csv(_roots_rows(spec)))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    lo, hi, steps = _parse_span(args.range, default_n=31)
    branch = sweep(params, args.param, (lo, hi), steps, R_max=args.rmax)
    rows = [["param", "track_id", "R", "status"]]
    for tr in branch.tracks:
        for p, r in zip(tr.param_values, tr.R_values):
            rows.append([_fmt(p), str(tr.id), _fmt(r), "real"])
        if tr.status == "merged":
            rows.append([_fmt(tr.merged_at), str(tr.id), _fmt(tr.R_values[-1]), "merged"])
    if args.format == "json":
        doc = {
            "header": _header(
                "sweep",
                {**_params_dict(params), "swept": args.param, "range": [lo, hi], "steps": steps, "R_max": args.rmax},
            ),
            "tracks": [
                {
                    "id": tr.id,
                    "status": tr.status,
                    "merged_at": tr.merged_at,
                    "merged_with": tr.merged_with,
                    "born_at": tr.born_at,
                    "param": tr.param_values,
                    "R": tr.R_values,
                }
                for tr in branch.tracks
            ],
        }
        _write(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        _write(args.out, _csv(rows))
    return 0


def _cmd_ep(args: argparse.Namespace) -> int:
    hint = args.hint
    free = args.free
    # the free parameter may be omitted from the group; the hint supplies it
    if args.L is None:
        if free == "Z" and args.Z is None:
            args.Z = hint
        if free == "lambda" and args.lam is None:
            args.lam = hint
    params = _resolve_params(args)
    params_hint = ScaledParams(
        lam=hint if free == "lambda" else params.lam,
        Z=hint if free == "Z" else params.Z,
        scale=params.scale,
    )
    if args.rhint is not None:
        r_hint = args.rhint
    else:
        spec = scan_roots(params_hint)
        if len(spec.roots) < 2:
            raise ContinuationError("cannot derive an R hint: fewer than two roots at the hint point")
        gaps = [(b.R - a.R, 0.5 * (a.R + b.R)) for a, b in zip(spec.roots, spec.roots[1:])]
        r_hint = min(gaps)[1]
    ep = find_exceptional(params_hint, r_hint, free)
    doc = {
        "header": _header(
            "ep",
            {**_params_dict(params), "free": free, "hint": hint, "R_hint": r_hint},
        ),
        "exceptional_point": {
            "lambda": ep.lam,
            "Z": ep.Z,
            "R_double": ep.R_double,
            "pair_indices": list(ep.pair_indices),
            "residual_det": ep.residual_det,
            "residual_slope": ep.residual_slope,
            "second_derivative": ep.second_derivative,
        },
    }
    if args.format == "csv":
        rows = [
            ["lambda", "Z", "R_double", "pair_lo", "pair_hi", "residual_det", "residual_slope"],
            [
                _fmt(ep.lam),
                _fmt(ep.Z),
                _fmt(ep.R_double),
                str(ep.pair_indices[0]),
                str(ep.pair_indices[1]),
                _fmt(ep.residual_det),
                _fmt(ep.residual_slope),
            ],
        ]
        _write(args.out, _csv(rows))
    else:
        _write(args.out, json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_nodal_grid(args: argparse.Namespace) -> int:
    lam = args.lam
    if lam is None or lam < 0.0:
        raise CliError("nodal-grid needs --lambda >= 0")
    slo, shi, sn = _parse_span(args.sigma)
    tlo, thi, tn = _parse_span(args.tau)
    clip = _parse_clip(args.clip)
    sigmas = np.linspace(slo, shi, sn)
    taus = np.linspace(tlo, thi, tn)
    rows = [["sigma", "tau", "D"]]
    for s in sigmas:
        for t in taus:
            cell = ""
            if t > abs(s):
                r = math.sqrt(t * t - s * s)
                sample = eval_Dratio(SigmaTau(float(s), float(t)), r, lam)
                v = sample.value_Q if args.surface == "Q" else sample.value_Dratio
                if not sample.singular_flag and math.isfinite(v):
                    if clip is None or (clip[0] <= v <= clip[1]):
                        cell = _fmt(v)
            rows.append([_fmt(s), _fmt(t), cell])
    if args.format == "json":
        doc = {
            "header": _header(
                "nodal-grid",
                {
                    "lambda": lam,
                    "sigma": [slo, shi, sn],
                    "tau": [tlo, thi, tn],
                    "clip": list(clip) if clip else None,
                    "surface": args.surface,
                },
            ),
            "grid": [
                {"sigma": float(r[0]), "tau": float(r[1]), "D": float(r[2]) if r[2] else None}
                for r in (rows[i] for i in range(1, len(rows)))
            ],
        }
        _write(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        _write(args.out, _csv(rows))
    return 0


def _cmd_shallow(args: argparse.Namespace) -> int:
    if args.T <= 0.0:
        raise CliError("shallow needs --T > 0")
    params = ShallowParams(ell=args.ell, T=args.T)
    levels = solve_levels(params, args.nmax)
    level_rows = [["N", "omega", "k", "energy", "p", "q", "alpha", "G_plus", "G_minus"]]
    for lv in levels:
        level_rows.append(
            [
                str(lv.N),
                _fmt(lv.omega),
                _fmt(lv.k),
                _fmt(lv.energy),
                _fmt(lv.p),
                _fmt(lv.q),
                _fmt(lv.alpha),
                _fmt(lv.G_plus),
                _fmt(lv.G_minus),
            ]
        )
    if args.format == "csv":
        _write(args.out, _csv(level_rows))
        return 0
    omega, y = solution_curve(params)
    doc = {
        "header": _header("shallow", {"ell": params.ell, "T": params.T, "N_max": args.nmax}),
        "levels": [
            {
                "N": lv.N,
                "omega": lv.omega,
                "k": lv.k,
                "energy": lv.energy,
                "p": lv.p,
                "q": lv.q,
                "alpha": lv.alpha,
                "G_plus": lv.G_plus,
                "G_minus": lv.G_minus,
            }
            for lv in levels
        ],
        "curve": {"omega": [float(w) for w in omega], "y": [float(v) for v in y]},
        "lines": [
            {"N": n, "intercept": (2.0 * n + 2.0) / (4.0 * params.T), "slope": -1.0 / (4.0 * params.T)}
            for n in range(args.nmax + 1)
        ],
    }
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    return 0


def _default_emax(params: ScaledParams, levels: int) -> float:
    p = physical_params(params)
    return (math.pi * (levels + 1.5) / (2.0 * p.L)) ** 2 + p.g


def _cmd_oracle(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    phys = physical_params(params)
    e_max = args.emax if args.emax is not None else _default_emax(params, args.levels)
    refine = tuple(int(v) for v in args.refine.split(",")) if args.refine else None
    grid = GridSpec(n=args.n, E_max=e_max, refine_levels=refine)
    out = oracle_spectrum(phys, grid)
    if args.format == "json":
        doc = {
            "header": _header(
                "oracle",
                {**_params_dict(params), "n": args.n, "E_max": e_max, "refine_levels": list(out.ns)},
            ),
            "eigenvalues": out.eigenvalues,
            "extrapolated": out.extrapolated,
            "imag_residual": out.imag_residual,
            "h": out.h,
        }
        _write(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        rows = [["index", "energy", "energy_extrapolated"]]
        for i, e in enumerate(out.eigenvalues):
            ext = out.extrapolated[i] if out.extrapolated and i < len(out.extrapolated) else None
            rows.append([str(i), _fmt(e), _fmt(ext) if ext is not None else ""])
        _write(args.out, _csv(rows))
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    params = _resolve_params(args)
    phys = physical_params(params)
    r_max = args.rmax if args.rmax is not None else default_R_max(params)
    spec = scan_roots(params, R_max=r_max)
    count = min(args.levels, len(spec.roots))
    if count == 0:
        raise ContinuationError("no analytic roots to compare against")
    e_top = spec.roots[count - 1].energy
    e_max = args.emax if args.emax is not None else 1.15 * e_top + 1.0
    grid = GridSpec(n=args.n, E_max=e_max)
    oracle = oracle_spectrum(phys, grid)
    oracle_e = oracle.extrapolated or oracle.eigenvalues
    rows = [["index", "energy_solver", "energy_oracle", "energy_oracle_extrapolated", "rel_diff"]]
    pairs = []
    for i in range(count):
        e_solver = spec.roots[i].energy
        e_raw = oracle.eigenvalues[i] if i < len(oracle.eigenvalues) else math.nan
        e_ext = oracle_e[i] if i < len(oracle_e) else math.nan
        rel = abs(e_ext - e_solver) / abs(e_solver) if math.isfinite(e_ext) else math.nan
        pairs.append({"index": i, "energy_solver": e_solver, "energy_oracle": e_raw,
                      "energy_oracle_extrapolated": e_ext, "rel_diff": rel})
        rows.append([str(i), _fmt(e_solver), _fmt(e_raw), _fmt(e_ext), _fmt(rel)])
    if args.format == "json":
        doc = {
            "header": _header(
                "compare",
                {**_params_dict(params), "levels": count, "n": args.n, "E_max": e_max, "R_max": r_max},
            ),
            "levels": pairs,
        }
        _write(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        _write(args.out, _csv(rows))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="ptwell", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"ptwell {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, fmt_default: str = "csv") -> None:
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    p = sub.add_parser("spectrum", help="real roots and energies at one parameter point")
    _add_param_group(p)
    p.add_argument("--rmax", type=float, default=None, help="scan ceiling in R (default: 8.5*pi/max(lambda,1))")
    common(p)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("classify", help="robust/fragile classification by continuation in Z")
    _add_param_group(p)
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--zcap", type=float, default=50.0, help="coupling ceiling for the continuation (default 50)")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("sweep", help="track levels over a parameter range")
    _add_param_group(p)
    p.add_argument("--param", choices=("Z", "lambda"), required=True)
    p.add_argument("--range", required=True, help="lo:hi or lo:hi:steps (default 31 steps)")
    p.add_argument("--rmax", type=float, default=None)
    common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ep", help="locate an exceptional point (double root)")
    _add_param_group(p)
    p.add_argument("--free", choices=("Z", "lambda"), required=True)
    p.add_argument("--hint", type=float, required=True, help="initial value of the free parameter")
    p.add_argument("--rhint", type=float, default=None, help="R hint (default: closest pair midpoint)")
    common(p, fmt_default="json")
    p.set_defaults(func=_cmd_ep)

    p = sub.add_parser("nodal-grid", help="sample the ratio-form determinant on a sigma-tau grid")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--sigma", required=True, help="lo:hi or lo:hi:n (default n=201)")
    p.add_argument("--tau", required=True, help="lo:hi or lo:hi:n (default n=201)")
    p.add_argument("--clip", default=None, help="c for [-c, c] or lo:hi; outside values become nulls")
    p.add_argument("--surface", choices=("D", "Q"), default="D")
    common(p)
    p.set_defaults(func=_cmd_nodal_grid)

    p = sub.add_parser("shallow", help="levels of the infinite-width limit")
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--T", type=float, required=True, help="square root of the step height")
    p.add_argument("--nmax", type=int, default=8)
    common(p, fmt_default="json")
    p.set_defaults(func=_cmd_shallow)

    p = sub.add_parser("oracle", help="finite-difference eigenvalues (independent check)")
    _add_param_group(p)
    p.add_argument("--n", type=int, default=401, help="interior grid points (default 401)")
    p.add_argument("--emax", type=float, default=None)
    p.add_argument("--levels", type=int, default=8, help="levels targeted by the default E_max")
    p.add_argument("--refine", default=None, help="comma-separated interior counts, e.g. 201,401,801")
    common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("compare", help="solver vs finite-difference energies")
    _add_param_group(p)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--n", type=int, default=401)
    p.add_argument("--emax", type=float, default=None)
    p.add_argument("--rmax", type=float, default=None)
    common(p)
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ContinuationError, PTSymmetryError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
