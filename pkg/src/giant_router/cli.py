"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import oracle, spectra
from .configio import config_hash, config_to_dict, load_config
from .errors import (
    AnalyticAssumptionError,
    BandEdgeError,
    ConfigError,
    RouterError,
)
from .figures import FIGURES, INSET_SAMPLES, INSET_SPAN

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class _UsageError(Exception):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_spectrum_csv(spec: spectra.RateSpectrum, fh):
    fh.write(f"# config_sha256={config_hash(spec.config)}\n")
    fh.write(f"# method={spec.method}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(spec.columns)
    for row in spec.table():
        writer.writerow([_fmt(v) for v in row])


def spectrum_to_json(spec: spectra.RateSpectrum) -> str:
    doc = {
        "config_sha256": config_hash(spec.config),
        "method": spec.method,
        "config": config_to_dict(spec.config),
        "columns": spec.columns,
        "rows": [[float(_fmt(v)) for v in row] for row in spec.table()],
    }
    return json.dumps(doc, indent=1)


def read_spectrum_csv(path):
    """Read a spectrum CSV back as ``(meta, columns, array)``."""
    meta = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        else:
            body.append(line)
    columns = body[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in body[1:]])
    return meta, columns, data


def _write(spec, out, fmt):
    if out in (None, "-"):
        fh = sys.stdout
        close = False
    else:
        fh = open(out, "w", encoding="utf-8", newline="")
        close = True
    try:
        if fmt == "json":
            fh.write(spectrum_to_json(spec) + "\n")
        else:
            write_spectrum_csv(spec, fh)
    finally:
        if close:
            fh.close()


def _load(path):
    try:
        return load_config(path)
    except OSError as exc:
        raise _UsageError(f"cannot read config: {exc}") from None
    except ConfigError as exc:
        raise _UsageError(f"invalid config {path}: {exc}") from None


def _grid(k_min, k_max, points):
    try:
        return spectra.GridSpec(k_min, k_max, points)
    except (BandEdgeError, ConfigError) as exc:
        raise _UsageError(str(exc)) from None


def cmd_spectrum(args) -> int:
    cfg = _load(args.config)
    grid = _grid(args.k_min, args.k_max, args.points)
    try:
        spec = spectra.sweep(cfg, grid, args.method, workers=args.workers)
    except AnalyticAssumptionError as exc:
        raise _UsageError(f"{exc} (try --method oracle)") from None
    _write(spec, args.out, args.format)
    return EXIT_OK


def _oracle_only_checks(cfg, ks, tol):
    base = oracle.solve_grid(ks, cfg)
    longer = oracle.solve_grid(ks, cfg, truncation=2 * oracle.DEFAULT_TRUNCATION)
    flux = np.array([s.flux_residual for s in base])
    dev = np.array([
        max([abs(a.reflection_amplitude - b.reflection_amplitude)]
            + [abs(x - y) for x, y in zip(a.transfer_amplitudes, b.transfer_amplitudes)])
        for a, b in zip(base, longer)
    ])
    return {
        "max_flux_residual_oracle": float(flux.max()),
        "max_truncation_deviation": float(dev.max()),
        "worst_k": float(ks[int(np.argmax(np.maximum(flux, dev)))]),
        "passed": bool(flux.max() <= tol and dev.max() <= tol),
    }


def cmd_verify(args) -> int:
    cfg = _load(args.config)
    grid = _grid(args.k_min, args.k_max, args.points)
    ks = grid.points()
    report = oracle.verify_against_analytic(cfg, ks)
    doc = {"config_sha256": config_hash(cfg), "tolerance": args.tol, "points": len(ks)}
    lines = [f"config {doc['config_sha256']}  points={len(ks)}  tol={args.tol:g}"]
    if report.oracle_only:
        checks = _oracle_only_checks(cfg, ks, args.tol)
        doc.update(mode="oracle-only", reason=report.analytic_error, **checks)
        passed = checks["passed"]
        lines += [
            f"closed forms unavailable: {report.analytic_error}",
            f"max oracle flux residual      {checks['max_flux_residual_oracle']:.3e}",
            f"max truncation deviation      {checks['max_truncation_deviation']:.3e}",
        ]
    else:
        passed = report.passes(args.tol)
        doc.update(
            mode="analytic-vs-oracle",
            max_deviation_r=report.max_deviation_r,
            max_deviation_t=list(report.max_deviation_t),
            max_flux_residual_analytic=report.max_flux_residual_analytic,
            max_flux_residual_oracle=report.max_flux_residual_oracle,
            worst_points=[{"k": k, "deviation": d} for k, d in report.worst_points],
            passed=passed,
        )
        lines += [
            f"max |r_analytic - r_oracle|   {report.max_deviation_r:.3e}",
            *(f"max |t_{i + 1} analytic - oracle|  {d:.3e}" for i, d in enumerate(report.max_deviation_t)),
            f"max flux residual (analytic)  {report.max_flux_residual_analytic:.3e}",
            f"max flux residual (oracle)    {report.max_flux_residual_oracle:.3e}",
            "worst offenders:",
            *(f"  k={k:.17g}  deviation={d:.3e}" for k, d in report.worst_points),
        ]
    lines.append("PASS" if passed else "FAIL")
    print("\n".join(lines))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_zeros(args) -> int:
    cfg = _load(args.config)
    grid = _grid(args.k_min, args.k_max, args.points)
    try:
        rep = spectra.find_reflection_zeros(cfg, args.site, grid, args.method)
    except ConfigError as exc:
        raise _UsageError(str(exc)) from None
    print(f"site l={rep.site}")
    if rep.global_perfect_transfer:
        print(f"global perfect transfer: max R = {rep.max_reflection:.3e} over the grid")
    print("n,k_predicted,k_found,abs_dk")
    for n, kp, kf, dk in rep.matches:
        print(f"{n},{_fmt(kp)},{_fmt(kf)},{dk:.3e}")
    for n, kp in rep.unmatched_predicted:
        print(f"{n},{_fmt(kp)},,", file=sys.stdout)
        print(f"unmatched prediction n={n} k={kp!r}", file=sys.stderr)
    for z in rep.unmatched_found:
        print(f",,{_fmt(z.k)},")
        print(f"unpredicted zero at k={z.k!r} (R={z.reflection_rate:.3e})", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_figure(args) -> int:
    panel = FIGURES.get(args.name)
    if panel is None:
        raise _UsageError(f"unknown figure {args.name!r}; valid names: {', '.join(FIGURES)}")
    os.makedirs(args.out_dir, exist_ok=True)
    ext = "json" if args.format == "json" else "csv"
    grid = _grid(args.k_min, args.k_max, args.points)
    written = []
    spec = spectra.sweep(panel.config, grid, args.method)
    path = os.path.join(args.out_dir, f"{panel.name}.{ext}")
    _write(spec, path, args.format)
    written.append(path)
    if panel.insets:
        for edge in ("lower", "upper"):
            prof = spectra.band_edge_profile(panel.config, edge, INSET_SPAN, INSET_SAMPLES, args.method)
            path = os.path.join(args.out_dir, f"{panel.name}_inset_{edge}.{ext}")
            _write(prof.spectrum, path, args.format)
            written.append(path)
    for path in written:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="giant-router",
        description="Single-photon routing through a driven giant atom coupled to semi-infinite waveguides.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def grid_args(p, points):
        p.add_argument("--k-min", type=float, default=spectra.DEFAULT_GRID.k_min)
        p.add_argument("--k-max", type=float, default=spectra.DEFAULT_GRID.k_max)
        p.add_argument("--points", type=int, default=points)

    p = sub.add_parser("spectrum", help="sweep R and T over a k grid")
    p.add_argument("--config", required=True)
    grid_args(p, spectra.DEFAULT_GRID.count)
    p.add_argument("--method", choices=spectra.METHODS, default="analytic")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="compare closed forms with the lattice solver")
    p.add_argument("--config", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    grid_args(p, 1000)
    p.add_argument("--json", help="also write the report as JSON to this path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zeros", help="predicted vs found reflection zeros")
    p.add_argument("--config", required=True)
    p.add_argument("--site", type=int, default=None)
    p.add_argument("--method", choices=spectra.METHODS, default="analytic")
    grid_args(p, spectra.DEFAULT_GRID.count)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("figure", help="write the dataset behind a figure panel")
    p.add_argument("--name", required=True, help=f"one of: {', '.join(FIGURES)}")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--method", choices=spectra.METHODS, default="analytic")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    grid_args(p, spectra.DEFAULT_GRID.count)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RouterError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
