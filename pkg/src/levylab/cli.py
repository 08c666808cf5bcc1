"""Command-line front end.

Subcommands: simulate, cf, spectrum, pvar, cauchy, check. Options may come
from flags or from a key=value config file (flags win). Grids use the range
syntax a:b:step (inclusive of the endpoint up to rounding) or a comma list;
integer level ranges accept a:b. Artifacts are CSV tables plus a JSON
summary; every artifact embeds the semantic config echo (command, kernels,
seed, sizes) so runs are reproducible from their outputs alone. Execution
knobs (thread count, output paths) are deliberately not part of the echo:
outputs are bit-identical for the same config and seed at any --threads.

Exit codes: 0 success, 1 invariant failure, 2 usage error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import checks
from . import covariance as cov
from . import levy_kernel as lk
from . import pvariation as pv
from . import simulate as sim
from . import spectral as sp
from .errors import NumericalError

SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    """Fixed shortest-roundtrip decimal; '.' separator, locale-free."""
    return format(float(x), ".17g")


def parse_range(text: str):
    """a:b:step range, a:b integer range, or a comma list."""
    text = text.strip()
    if "," in text:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    if ":" in text:
        parts = text.split(":")
        if len(parts) == 2:
            a, b = float(parts[0]), float(parts[1])
            if not (a.is_integer() and b.is_integer() and b >= a):
                raise argparse.ArgumentTypeError(
                    f"two-part ranges must be increasing integers a:b, got {text!r}"
                )
            return [float(v) for v in range(int(a), int(b) + 1)]
        if len(parts) == 3:
            a, b, step = (float(p) for p in parts)
            if step <= 0 or b < a:
                raise argparse.ArgumentTypeError(f"bad range {text!r}")
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            return [a + i * step for i in range(count)]
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return [float(text)]


def _read_config_file(path):
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise argparse.ArgumentTypeError(f"config line without '=': {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


_FILE_KEYS = {
    "kernel", "kernel1", "kernel2", "hurst", "seed", "samples", "level",
    "levels", "t", "p", "refine", "pairs", "grid", "format", "prefix",
    "emit_samples", "threads",
}


def _merge_config(args):
    """Fill argparse gaps from the config file; flags always win."""
    if not getattr(args, "config", None):
        return args
    fields = _read_config_file(args.config)
    unknown = set(fields) - _FILE_KEYS
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown config keys {sorted(unknown)}")
    for key, raw in fields.items():
        if getattr(args, key, None) is not None:
            continue
        if not hasattr(args, key):
            continue
        if key in ("seed", "samples", "level", "refine", "pairs", "grid", "threads"):
            setattr(args, key, int(raw))
        elif key == "hurst":
            setattr(args, key, float(raw))
        elif key in ("t", "levels"):
            setattr(args, key, parse_range(raw))
        elif key == "emit_samples":
            setattr(args, key, raw.lower() in ("1", "true", "yes"))
        else:
            setattr(args, key, raw)
    return args


def _resolve_kernel(spec, hurst):
    if spec is None:
        raise argparse.ArgumentTypeError("a kernel spec is required (--kernel)")
    if hurst is not None and "hurst" not in spec:
        spec = f"{spec} hurst={hurst}"
    kernel = cov.parse_kernel_spec(spec)
    if hurst is not None and kernel.kind != cov.FBM:
        raise argparse.ArgumentTypeError("--hurst only applies to fbm kernels")
    return kernel


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return max(1, args.threads)
    env = os.environ.get("LEVY_LAB_THREADS")
    return max(1, int(env)) if env else 1


def _echo(command: str, **fields) -> dict:
    echo = {"schema_version": SCHEMA_VERSION, "command": command}
    echo.update({k: v for k, v in fields.items() if v is not None})
    return echo


def _echo_line(echo: dict) -> str:
    parts = []
    for key, val in echo.items():
        if isinstance(val, list):
            val = ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in val)
        parts.append(f"{key}={val}")
    return "# " + " ".join(parts)


def _write_csv(path: Path, echo: dict, header: str, rows):
    lines = [_echo_line(echo), header]
    lines.extend(rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_summary(path: Path, echo: dict, payload: dict):
    doc = dict(echo)
    doc.update(payload)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _out_path(args, name: str) -> Path:
    prefix = getattr(args, "prefix", None) or ""
    out_dir = Path(getattr(args, "out", None) or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / f"{prefix}{name}"


def cmd_simulate(args) -> int:
    k1 = _resolve_kernel(args.kernel1 or args.kernel, None)
    k2 = _resolve_kernel(args.kernel2 or args.kernel, None)
    config = sim.MCConfig(
        seed=args.seed if args.seed is not None else 0,
        n_samples=args.samples if args.samples is not None else 10_000,
        level=args.level if args.level is not None else 8,
        kernel1=k1,
        kernel2=k2,
    )
    t_grid = args.t if args.t is not None else parse_range("0:3:0.5")
    echo = _echo(
        "simulate",
        kernel1=cov.kernel_spec_string(k1),
        kernel2=cov.kernel_spec_string(k2),
        seed=config.seed,
        samples=config.n_samples,
        level=config.level,
        t=[float(t) for t in t_grid],
    )
    result = sim.run_mc(config, threads=_threads(args))
    ecf = sim.empirical_cf(result, t_grid)
    cf_rows = [
        f"{_fmt(t)},{_fmt(e.real)},{_fmt(e.imag)},{_fmt(se)}"
        for t, e, se in zip(ecf.t_grid, ecf.estimates, ecf.std_errors)
    ]
    payload = {
        "mean": result.mean,
        "variance": result.variance,
        "cf": [
            {"t": float(t), "re": e.real, "im": e.imag, "stderr": float(se)}
            for t, e, se in zip(ecf.t_grid, ecf.estimates, ecf.std_errors)
        ],
    }
    if args.format == "json":
        _write_summary(_out_path(args, "summary.json"), echo, payload)
    else:
        _write_csv(_out_path(args, "cf.csv"), echo, "t,re,im,stderr", cf_rows)
        if args.emit_samples:
            sample_rows = [f"{i},{_fmt(a)}" for i, a in enumerate(result.samples)]
            _write_csv(_out_path(args, "samples.csv"), echo, "sample,area", sample_rows)
        _write_summary(
            _out_path(args, "summary.json"), echo, {"mean": result.mean, "variance": result.variance}
        )
    return 0


def cmd_cf(args) -> int:
    kernel = _resolve_kernel(args.kernel, args.hurst)
    t_grid = args.t if args.t is not None else parse_range("0:3:0.1")
    pairs = args.pairs if args.pairs is not None else 10_000
    echo = _echo(
        "cf",
        kernel=cov.kernel_spec_string(kernel),
        t=[float(t) for t in t_grid],
        pairs=pairs if kernel.kind == cov.BROWNIAN else None,
        level=args.level if kernel.kind in (cov.FBM, cov.TABULATED) else None,
    )
    rows = []
    if kernel.kind == cov.BROWNIAN:
        spectrum = sp.classical_spectrum(pairs)
        for res in sp.cf_curve(spectrum, t_grid):
            rows.append((res.z.imag, res.value.real, res.value.imag, res.tail_bound))
    elif kernel.kind == cov.WEIGHTED:
        norm_sq = kernel.weight.norm_sq
        for t in t_grid:
            rows.append((float(t), sp.weighted_cf(norm_sq, float(t)), 0.0, 0.0))
    else:
        level = args.level if args.level is not None else 7
        spectrum = sp.general_spectrum(kernel, kernel, level)
        for res in sp.cf_curve(spectrum, t_grid):
            rows.append((res.z.imag, res.value.real, res.value.imag, res.tail_bound))
    csv_rows = [f"{_fmt(t)},{_fmt(re)},{_fmt(im)},{_fmt(tb)}" for t, re, im, tb in rows]
    table = [{"t": t, "re": re, "im": im, "tail_bound": tb} for t, re, im, tb in rows]
    if args.format == "json":
        _write_summary(_out_path(args, "summary.json"), echo, {"cf": table})
    else:
        _write_csv(_out_path(args, "cf.csv"), echo, "t,re,im,tail_bound", csv_rows)
        _write_summary(_out_path(args, "summary.json"), echo, {"n_points": len(rows)})
    return 0


def cmd_spectrum(args) -> int:
    kernel = _resolve_kernel(args.kernel, args.hurst)
    if kernel.kind == cov.BROWNIAN and args.level is None:
        grid = args.grid if args.grid is not None else 256
        matrix = sp.discretize_classical_operator(grid)
        spectrum = sp.eigen_solve(matrix)
        route = {"route": "classical-midpoint", "grid": grid}
    else:
        level = args.level if args.level is not None else 7
        spectrum = sp.general_spectrum(kernel, kernel, level)
        route = {"route": "step-kernel", "level": level}
    report = sp.symmetry_check(spectrum)
    echo = _echo("spectrum", kernel=cov.kernel_spec_string(kernel), **route)
    rows = [f"{_fmt(a)},{m}" for a, m in spectrum.entries]
    payload = {
        "spectral_radius": spectrum.spectral_radius,
        "symmetry_ok": report.ok,
        "symmetry_violations": list(report.violations),
    }
    if args.format == "json":
        payload["spectrum"] = [{"alpha": a, "multiplicity": m} for a, m in spectrum.entries]
        _write_summary(_out_path(args, "summary.json"), echo, payload)
    else:
        _write_csv(_out_path(args, "spectrum.csv"), echo, "alpha,multiplicity", rows)
        _write_summary(_out_path(args, "summary.json"), echo, payload)
    return 0


def cmd_pvar(args) -> int:
    kernel = _resolve_kernel(args.kernel, args.hurst)
    if args.p in (None, "auto"):
        index = cov.variation_index(kernel)
        if index is None:
            raise argparse.ArgumentTypeError(
                "--p auto needs a kernel with a known variation index"
            )
        p = index
    else:
        p = float(args.p)
    max_level = args.level if args.level is not None else 10
    profile = pv.variation_profile(kernel, p, max_level)
    echo = _echo("pvar", kernel=cov.kernel_spec_string(kernel), p=float(p), max_level=max_level)
    rows = [f"{n},{_fmt(est)},{profile.verdict}" for n, est in profile.levels]
    payload = {
        "p": float(p),
        "verdict": profile.verdict,
        "levels": [{"level": n, "estimate": est} for n, est in profile.levels],
    }
    if args.format == "json":
        _write_summary(_out_path(args, "summary.json"), echo, payload)
    else:
        _write_csv(_out_path(args, "pvar.csv"), echo, "level,estimate,verdict", rows)
        _write_summary(
            _out_path(args, "summary.json"), echo, {"p": float(p), "verdict": profile.verdict}
        )
    return 0


def cmd_cauchy(args) -> int:
    k1 = _resolve_kernel(args.kernel1 or args.kernel, None)
    k2 = _resolve_kernel(args.kernel2 or args.kernel, None)
    levels = [int(v) for v in (args.levels or parse_range("1:6"))]
    table = lk.cauchy_table(levels, k1, k2, refine=args.refine)
    echo = _echo(
        "cauchy",
        kernel1=cov.kernel_spec_string(k1),
        kernel2=cov.kernel_spec_string(k2),
        levels=levels,
        refine=args.refine,
    )
    rows = [
        f"{n},{m},{_fmt(norm.value)},{norm.refine},{table.flag}"
        for n, m, norm in table.rows
    ]
    payload = {
        "slope": table.slope,
        "flag": table.flag,
        "rows": [
            {"n": n, "m": m, "norm_sq": norm.value, "refine": norm.refine, "method": norm.method}
            for n, m, norm in table.rows
        ],
    }
    if args.format == "json":
        _write_summary(_out_path(args, "summary.json"), echo, payload)
    else:
        _write_csv(_out_path(args, "cauchy.csv"), echo, "n,m,norm_sq,refine,flag", rows)
        _write_summary(
            _out_path(args, "summary.json"), echo, {"slope": table.slope, "flag": table.flag}
        )
    return 0


def cmd_check(args) -> int:
    results = checks.run_all()
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        suffix = f" — {detail}" if detail else ""
        print(f"{status} {name}{suffix}")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} invariant checks passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levylab",
        description="Generalised Levy areas: sampling, spectra and diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file; flags override")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--prefix", help="artifact filename prefix")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (or LEVY_LAB_THREADS)")

    p = sub.add_parser("simulate", help="Monte Carlo areas and empirical CF")
    common(p)
    p.add_argument("--kernel", help="kernel spec for both processes")
    p.add_argument("--kernel1")
    p.add_argument("--kernel2")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--level", type=int)
    p.add_argument("--t", type=parse_range, help="CF argument grid a:b:step or list")
    p.add_argument("--emit-samples", action="store_const", const=True,
                   dest="emit_samples", default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("cf", help="analytic / spectral characteristic function curves")
    common(p)
    p.add_argument("--kernel", required=False)
    p.add_argument("--hurst", type=float)
    p.add_argument("--t", type=parse_range)
    p.add_argument("--pairs", type=int, help="classical spectrum truncation (pairs)")
    p.add_argument("--level", type=int, help="step-kernel level for non-classical kernels")
    p.set_defaults(fn=cmd_cf)

    p = sub.add_parser("spectrum", help="discretized operator spectrum + symmetry audit")
    common(p)
    p.add_argument("--kernel")
    p.add_argument("--hurst", type=float)
    p.add_argument("--grid", type=int, help="classical midpoint grid size")
    p.add_argument("--level", type=int, help="step-kernel dyadic level")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("pvar", help="grid p-variation profile of a kernel")
    common(p)
    p.add_argument("--kernel")
    p.add_argument("--hurst", type=float)
    p.add_argument("--p", help="variation exponent or 'auto'")
    p.add_argument("--level", type=int, help="maximum grid level (default 10)")
    p.set_defaults(fn=cmd_pvar)

    p = sub.add_parser("cauchy", help="inter-level chaos distances with decay fit")
    common(p)
    p.add_argument("--kernel")
    p.add_argument("--kernel1")
    p.add_argument("--kernel2")
    p.add_argument("--levels", type=parse_range, help="level ladder a:b")
    p.add_argument("--refine", type=int)
    p.set_defaults(fn=cmd_cauchy)

    p = sub.add_parser("check", help="run the full invariant suite")
    common(p)
    p.set_defaults(fn=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _merge_config(args)
        if getattr(args, "format", None) is None:
            args.format = "csv"
        return args.fn(args)
    except argparse.ArgumentTypeError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
