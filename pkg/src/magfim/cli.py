"""Command-line interface.

Subcommands: scan, validate, qfim, fim, povm-check. Exit codes: 0 success,
1 validation/check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import DENSE_CAP_ENV
from .errors import ConfigError, MagfimError
from .measurements import measured_fim, povm_ghz_projectors, povm_pauli_strings
from .povm import check_validity, check_validity_dense
from .probes import dense_statevector, probe_two_site_marginal, triple_ghz_probe
from .qfim import (
    qfim_closed_form,
    qfim_dense,
    qfim_finite_difference,
    qfim_from_marginals,
    total_variance,
)
from .operators import DensityMatrix
from .scan import DEFAULT_N_VALUES, DEFAULT_PHI, ScanConfig, emit_report, run_scan, run_validation

__all__ = ["main", "entry_point"]


def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magfim",
        description=(
            "Simultaneous estimation of the three components of a uniform "
            "magnetic field: quantum and measured Fisher information, "
            "benchmark strategies and system-size scans. "
            f"The dense-backend qubit cap honours ${DENSE_CAP_ENV}."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=8):
        p.add_argument("--phi", type=_floats, default=DEFAULT_PHI, metavar="X,Y,Z",
                       help="field phases (default %(default)s)")
        p.add_argument("--n", type=int, default=n_default, help="number of sites")

    p_scan = sub.add_parser("scan", help="scan system sizes and emit a report")
    p_scan.add_argument("--phi", type=_floats, default=DEFAULT_PHI, metavar="X,Y,Z")
    p_scan.add_argument("--n-list", type=_ints, default=DEFAULT_N_VALUES, metavar="N1,N2,...")
    p_scan.add_argument("--povm", type=_ints, default=(1, 2), metavar="1,2",
                        help="measurement families to include")
    p_scan.add_argument("--deltas", type=_floats, default=None, metavar="A,B,C",
                        help="explicit GHZ-projector phases (default: automatic search)")
    p_scan.add_argument("--backend", choices=("auto", "dense", "superposition"), default="auto")
    p_scan.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p_scan.add_argument("--format", choices=("csv", "json"), default="csv")

    p_val = sub.add_parser("validate", help="run the cross-validation suite")
    p_val.add_argument("--phi", type=_floats, default=DEFAULT_PHI, metavar="X,Y,Z")
    p_val.add_argument("--deltas", type=_floats, default=None, metavar="A,B,C")
    p_val.add_argument("--povm", type=_ints, default=(1, 2), metavar="1,2")
    p_val.add_argument("--n-list", type=_ints, default=DEFAULT_N_VALUES, metavar="N1,N2,...")

    p_qfim = sub.add_parser("qfim", help="quantum Fisher information of the probe")
    common(p_qfim)
    p_qfim.add_argument("--route", choices=("closed", "dense", "fd", "marginal"),
                        default="closed")

    p_fim = sub.add_parser("fim", help="measured Fisher information of a POVM family")
    common(p_fim)
    p_fim.add_argument("--povm", type=int, choices=(1, 2), default=1)
    p_fim.add_argument("--deltas", type=_floats, default=None, metavar="A,B,C")
    p_fim.add_argument("--backend", choices=("auto", "dense", "superposition"), default="auto")

    p_chk = sub.add_parser("povm-check", help="validate the measurement families at one N")
    p_chk.add_argument("--n", type=int, default=8)
    p_chk.add_argument("--povm", type=_ints, default=(1, 2), metavar="1,2")
    p_chk.add_argument("--deltas", type=_floats, default=None, metavar="A,B,C")
    return parser


def _matrix_payload(entries: np.ndarray) -> dict:
    payload = {
        "matrix": [[float(f"{x:.12g}") for x in row] for row in entries],
        "eigenvalues": [float(f"{x:.12g}") for x in np.linalg.eigvalsh(entries)],
    }
    try:
        from .qfim import FisherMatrix

        payload["total_variance"] = float(f"{total_variance(FisherMatrix(entries)):.12g}")
    except MagfimError as exc:
        payload["total_variance_error"] = str(exc)
    return payload


def _cmd_scan(args) -> int:
    config = ScanConfig(
        phi=args.phi,
        n_values=args.n_list,
        povm_families=args.povm,
        deltas=args.deltas,
        backend=args.backend,
        output_path=args.out,
        fmt=args.format,
    )
    text = emit_report(run_scan(config), config)
    if config.output_path == "-":
        sys.stdout.write(text)
    else:
        print(f"wrote {len(text.splitlines())} lines to {config.output_path}", file=sys.stderr)
    return 0


def _cmd_validate(args) -> int:
    config = ScanConfig(
        phi=args.phi, n_values=args.n_list, povm_families=args.povm, deltas=args.deltas
    )
    report = run_validation(config)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def _cmd_qfim(args) -> int:
    n = args.n
    if args.route == "closed":
        info = qfim_closed_form(args.phi, n)
    elif args.route == "marginal":
        rho2, exact = probe_two_site_marginal(n)
        if not exact:
            print(f"note: marginal route is exact only at N = 8, 16, ...; N={n}", file=sys.stderr)
        info = qfim_from_marginals(DensityMatrix(0.5 * np.eye(2)), rho2, args.phi, n)
    else:
        psi = dense_statevector(triple_ghz_probe(n))
        if args.route == "dense":
            info = qfim_dense(psi, args.phi, n)
        else:
            info = qfim_finite_difference(psi, args.phi, n)
    payload = {"n": n, "phi": list(args.phi), "route": args.route}
    payload.update(_matrix_payload(info.entries))
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_fim(args) -> int:
    n = args.n
    if args.povm == 1:
        povm = povm_ghz_projectors(n, args.deltas)
    else:
        povm = povm_pauli_strings(n)
    probe = triple_ghz_probe(n)
    fim = measured_fim(probe, args.phi, povm, backend=args.backend)
    payload = {
        "n": n,
        "phi": list(args.phi),
        "povm_family": args.povm,
        "deltas": list(povm.deltas) if povm.deltas is not None else None,
        "backend": args.backend,
    }
    payload.update(_matrix_payload(fim.entries))
    if fim.warnings:
        payload["warnings"] = list(fim.warnings)
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_povm_check(args) -> int:
    failed = False
    for family in args.povm:
        name = f"family {family} at N={args.n}"
        try:
            if family == 1:
                povm = povm_ghz_projectors(args.n, args.deltas)
            elif family == 2:
                povm = povm_pauli_strings(args.n)
            else:
                raise ConfigError(f"unknown POVM family {family}")
            structural = check_validity(povm)
            detail = structural.detail
            if args.n <= 12:
                dense = check_validity_dense(povm)
                detail += (
                    f"; dense min eigenvalue {dense.min_eigenvalue:.2e}, "
                    f"completeness residual {dense.completeness_residual:.2e}"
                )
                ok = structural.ok and dense.ok
            else:
                ok = structural.ok
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
            failed |= not ok
        except (MagfimError, ValueError) as exc:
            print(f"FAIL  {name}: {exc}")
            failed = True
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "scan": _cmd_scan,
        "validate": _cmd_validate,
        "qfim": _cmd_qfim,
        "fim": _cmd_fim,
        "povm-check": _cmd_povm_check,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except MagfimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


def entry_point():
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
