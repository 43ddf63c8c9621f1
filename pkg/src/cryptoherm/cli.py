"""Command-line interface.

Exit codes: 0 success or verification passed, 1 verification failed,
2 usage or input error, 3 numerical breakdown.

The default tolerance for ``verify`` and ``penta`` is 1e-10 and can be
overridden with the ``CRYPTOHERM_TOL`` environment variable.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import BreakdownError, CryptohermError, DimensionError, ResidualError, SpectrumError
from .linalg import (
    SymmetricBandMetric,
    as_dense,
    dieudonne_residual,
    min_eigenvalue_symmetric,
    null_space_band,
    relative_dieudonne_residual,
)
from .metric import (
    MetricComponents,
    diagonal_metric,
    pentadiagonal_metric,
    positivity_scan,
    tridiagonal_metric,
)
from .penta import PentaSeeds, build_penta_pair, verify_penta
from .polyfam import TridiagonalHamiltonian, build_hamiltonian, family_params, make_family, spectrum
from .spectral import biorthogonal_basis, kappa_from_band_metric

log = logging.getLogger("cryptoherm")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BREAKDOWN = 3

MEMBERSHIP_TOL = 1e-9


class UsageError(Exception):
    pass


def default_tol() -> float:
    raw = os.environ.get("CRYPTOHERM_TOL")
    if not raw:
        return 1e-10
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"CRYPTOHERM_TOL={raw!r} is not a number") from None
    if not value > 0:
        raise UsageError("CRYPTOHERM_TOL must be positive")
    return value


def _emit_text(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, out) -> None:
    _emit_text(json.dumps(doc, indent=2, allow_nan=False) + "\n", out)


def _load(path, *kinds):
    try:
        mf = io.MatrixFile.read(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except io.MatrixFileError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if kinds and mf.kind not in kinds:
        raise UsageError(f"{path}: expected {' or '.join(kinds)}, got {mf.kind}")
    try:
        return mf, mf.to_object()
    except io.MatrixFileError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _csv_text(header, rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _floats(values):
    return [float(x) for x in np.asarray(values).ravel()]


# -- subcommands -----------------------------------------------------------


def cmd_hamiltonian(args) -> int:
    if args.size < 1:
        raise UsageError("--size must be at least 1")
    params = {}
    if args.family in ("gegenbauer", "laguerre"):
        if args.a is None:
            raise UsageError(f"--a is required for {args.family}")
        params["a"] = args.a
    elif args.family == "jacobi":
        if args.mu is None or args.nu is None:
            raise UsageError("--mu and --nu are required for jacobi")
        params.update(mu=args.mu, nu=args.nu)
    try:
        family = make_family(args.family, **params)
        h = build_hamiltonian(family, args.size)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    meta = {"family": family.name, "params": family_params(family)}
    _emit_text(io.MatrixFile.from_object(h, meta).to_json(), args.out)
    return EXIT_OK


def cmd_metric(args) -> int:
    if args.band not in (0, 1, 2):
        raise UsageError(f"unsupported band {args.band}: choose 0, 1 or 2")
    mf, h = _load(args.hamiltonian, "tridiagonal-hamiltonian")
    if args.band == 0:
        theta = diagonal_metric(h, 1.0 if args.theta1 is None else args.theta1)
        seeds = {"theta1": 1.0 if args.theta1 is None else args.theta1}
    elif args.band == 1:
        b12 = 1.0 if args.b12 is None else args.b12
        theta = tridiagonal_metric(h, b12)
        seeds = {"b12": b12}
    else:
        seeds = {
            "b11": 0.0 if args.b11 is None else args.b11,
            "b12": 0.0 if args.b12 is None else args.b12,
            "b13": 1.0 if args.b13 is None else args.b13,
        }
        theta = pentadiagonal_metric(h, seeds["b13"], seeds["b12"], seeds["b11"])
    meta = {"band": args.band, "seeds": seeds, "hamiltonian": mf.metadata}
    _emit_text(io.MatrixFile.from_object(theta, meta).to_json(), args.out)
    return EXIT_OK


def _metric_bandwidth(theta) -> int:
    if isinstance(theta, SymmetricBandMetric):
        return theta.bandwidth
    return SymmetricBandMetric.from_dense(theta).bandwidth


def verify_report(h, theta, tol: float, require_positive: bool = False, want_kappa: bool = False) -> dict:
    """Residuals, positivity and oracle data for a Hamiltonian/metric pair."""
    dense_h = as_dense(h)
    dense_t = as_dense(theta)
    if dense_h.shape != dense_t.shape:
        raise UsageError(f"size mismatch: Hamiltonian is {dense_h.shape[0]}, metric is {dense_t.shape[0]}")
    if not np.array_equal(dense_t, dense_t.T):
        raise UsageError("metric is not symmetric")
    residual = dieudonne_residual(dense_h, dense_t)
    relative = relative_dieudonne_residual(dense_h, dense_t)
    min_eig = min_eigenvalue_symmetric(dense_t)
    k = _metric_bandwidth(theta)
    ns = null_space_band(dense_h, k)
    report = {
        "residual": residual,
        "relative_residual": relative,
        "min_eigenvalue": min_eig,
        "null_space_dimension": ns.dimension,
        "bandwidth": k,
        "projection_residual": ns.projection_residual(dense_t),
        "kappa": None,
    }
    if want_kappa and isinstance(h, TridiagonalHamiltonian):
        try:
            kv = kappa_from_band_metric(biorthogonal_basis(h), dense_t)
            report["kappa"] = _floats(kv.kappa)
        except (ResidualError, SpectrumError) as exc:
            log.warning("kappa extraction skipped: %s", exc)
    passed = relative <= tol and (min_eig > 0 or not require_positive)
    report["tolerance"] = tol
    report["require_positive"] = require_positive
    report["pass"] = bool(passed)
    return report


def cmd_verify(args) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    _, h = _load(args.hamiltonian, "tridiagonal-hamiltonian", "pentadiagonal-hamiltonian", "dense")
    _, theta = _load(args.metric, "symmetric-band-metric", "dense")
    try:
        report = verify_report(h, theta, tol, args.require_positive, args.kappa)
    except DimensionError as exc:
        raise UsageError(str(exc)) from None
    _emit_json(report, args.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_scan(args) -> int:
    if args.grid < 1:
        raise UsageError("--grid must be positive")
    _, h = _load(args.hamiltonian, "tridiagonal-hamiltonian")
    band = args.band_max
    if band == 1 and tuple(args.beta_range) != (0.0, 0.0):
        raise UsageError("--beta-range needs --band-max 2")
    comps = MetricComponents.solve(h, band)
    result = positivity_scan(comps, args.alpha_range, args.beta_range, args.grid)
    _emit_text(_csv_text(["alpha", "beta", "min_eig"], result.rows()), args.out)
    return EXIT_OK


def cmd_penta(args) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    _, off = _load(args.offdiag, "pentadiagonal-hamiltonian")
    try:
        seeds = PentaSeeds(args.b11, args.b12, args.b22, args.b23, args.a11)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    h, theta = build_penta_pair(off, seeds)
    ns = verify_penta(h)
    membership = ns.projection_residual(theta)
    report = {
        "residual": dieudonne_residual(h, theta),
        "relative_residual": relative_dieudonne_residual(h, theta),
        "min_eigenvalue": min_eigenvalue_symmetric(theta),
        "null_space_dimension": ns.dimension,
        "projection_residual": membership,
        "kappa": None,
        "tolerance": tol,
    }
    report["pass"] = bool(report["relative_residual"] <= tol and membership <= MEMBERSHIP_TOL)
    prefix = args.out_prefix
    seeds_meta = {"b11": args.b11, "b12": args.b12, "b22": args.b22, "b23": args.b23, "a11": args.a11}
    io.save(h, f"{prefix}.hamiltonian.json", {"seeds": seeds_meta})
    io.save(theta, f"{prefix}.metric.json", {"seeds": seeds_meta})
    _emit_json(report, args.report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_spectrum(args) -> int:
    _, h = _load(args.hamiltonian, "tridiagonal-hamiltonian")
    spec = spectrum(h, method=args.method)
    rows = ((i, float(e)) for i, e in enumerate(spec.energies))
    _emit_text(_csv_text(["index", "energy"], rows), args.out)
    return EXIT_OK


def cmd_basis(args) -> int:
    _, h = _load(args.hamiltonian, "tridiagonal-hamiltonian")
    basis = biorthogonal_basis(h)
    doc = {
        "format_version": io.FORMAT_VERSION,
        "kind": "biorthogonal-basis",
        "n": basis.n,
        "energies": _floats(basis.spectrum.energies),
        "kets": [_floats(col) for col in basis.kets.T],
        "ketkets": [_floats(col) for col in basis.ketkets.T],
        "omega": _floats(basis.omega),
        "alpha": _floats(basis.alpha),
        "beta": _floats(basis.beta),
        "biorthogonality_residual": basis.biorthogonality_residual(),
        "completeness_residual": basis.completeness_residual(),
        "kappa": None,
    }
    if args.metric:
        _, theta = _load(args.metric, "symmetric-band-metric", "dense")
        try:
            kv = kappa_from_band_metric(basis, theta)
        except DimensionError as exc:
            raise UsageError(str(exc)) from None
        doc["kappa"] = _floats(kv.kappa)
        doc["fit_residuals"] = _floats(kv.fit_residuals)
    _emit_json(doc, args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cryptoherm",
        description="Band-matrix metrics for tridiagonal non-Hermitian Hamiltonians.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hamiltonian", help="build a polynomial-family Hamiltonian")
    p.add_argument("--family", required=True, choices=["gegenbauer", "laguerre", "tschebyshev", "hermite", "legendre", "jacobi"])
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--a", type=float, help="Gegenbauer/Laguerre parameter")
    p.add_argument("--mu", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_hamiltonian)

    p = sub.add_parser("metric", help="recurrent band metric for a tridiagonal Hamiltonian")
    p.add_argument("hamiltonian")
    p.add_argument("--band", type=int, required=True, help="0 diagonal, 1 tridiagonal, 2 pentadiagonal")
    p.add_argument("--theta1", type=float)
    p.add_argument("--b11", type=float)
    p.add_argument("--b12", type=float)
    p.add_argument("--b13", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("verify", help="check a Hamiltonian/metric pair")
    p.add_argument("hamiltonian")
    p.add_argument("metric")
    p.add_argument("--tol", type=float, help="relative residual tolerance (default: CRYPTOHERM_TOL or 1e-10)")
    p.add_argument("--require-positive", action="store_true")
    p.add_argument("--kappa", action="store_true", help="also report spectral coordinates")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="minimum metric eigenvalue over an (alpha, beta) grid")
    p.add_argument("hamiltonian")
    p.add_argument("--alpha-range", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--beta-range", type=float, nargs=2, default=[0.0, 0.0], metavar=("LO", "HI"))
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--band-max", type=int, choices=[1, 2], default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("penta", help="hermitizable pentadiagonal Hamiltonian and its tridiagonal metric")
    p.add_argument("offdiag", help="pentadiagonal-hamiltonian file; its diagonal is ignored")
    p.add_argument("--b11", type=float, default=1.0)
    p.add_argument("--b12", type=float, default=1.0)
    p.add_argument("--b22", type=float, default=1.0)
    p.add_argument("--b23", type=float, default=1.0)
    p.add_argument("--a11", type=float, default=0.0)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--report", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_penta)

    p = sub.add_parser("spectrum", help="energies as CSV")
    p.add_argument("hamiltonian")
    p.add_argument("--method", choices=["auto", "symmetric", "general"], default="auto")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("basis", help="biorthogonal basis (and kappa of a metric) as JSON")
    p.add_argument("hamiltonian")
    p.add_argument("--metric")
    p.add_argument("--out")
    p.set_defaults(func=cmd_basis)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BreakdownError, SpectrumError, ResidualError, ArithmeticError) as exc:
        index = getattr(exc, "index", None)
        where = f" (index {index})" if index is not None else ""
        print(f"numerical breakdown: {exc}{where}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except (CryptohermError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
