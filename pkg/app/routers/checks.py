import argparse
import logging
from pathlib import Path
from typing import List

import numpy as np

from app.models.scenario import CouplingSpec
from utils.classical_utils import SCAN_COLUMNS, amplitude_scan
from utils.file_utils import format_table, write_csv, write_json
from utils.identity_utils import ACCEPTANCE_CUTOFF, DEFAULT_BOUND, identity_suite, monotone_by_name
from utils.rindler_utils import coupling_k_grid, coupling_selectivity_report, uniform_chain

logger = logging.getLogger(__name__)


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers, got '{text}'")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got '{text}'")


def verify_identities_command(args: argparse.Namespace) -> int:
    """
    Run the identity suite and print one line per identity and cutoff

    Exit code 0 iff every residual at cutoff 10 and above (or at the largest cutoff
    when all are below 10) is within its bound and every residual series is monotone.
    """
    cutoffs = sorted(set(args.cutoffs))
    reports = identity_suite(args.gamma, cutoffs, bound=args.bound)
    rows = [[r.name, r.cutoff, f"{r.residual_norm:.3e}", f"{r.bound:.1e}", "yes" if r.passed else "no"] for r in reports]
    print(format_table(["identity", "cutoff", "residual", "bound", "passed"], rows))

    required_from = min(ACCEPTANCE_CUTOFF, max(cutoffs))
    failed = [r for r in reports if r.cutoff >= required_from and not r.passed]
    monotone = monotone_by_name(reports)
    for name, ok in sorted(monotone.items()):
        if not ok:
            logger.warning(f"Residual of '{name}' does not improve monotonically with the cutoff")
    if args.json:
        write_json(args.json, {
            "gamma": args.gamma,
            "cutoffs": cutoffs,
            "reports": [r.model_dump(mode="json") for r in reports],
            "monotone": monotone,
        })
    return 0 if not failed and all(monotone.values()) else 1


def classical_scan_command(args: argparse.Namespace) -> int:
    """Tabulate the classical amplitude scan over a uniform k grid"""
    k_grid = np.linspace(args.kmin, args.kmax, args.points)
    rows = amplitude_scan(args.omega, args.epsilon, k_grid, args.c)
    write_csv(args.output, SCAN_COLUMNS, (row.as_list() for row in rows))
    peak = max(rows, key=lambda row: row.max_psi2)
    logger.info(f"Amplitude peak {peak.max_psi2:.6g} at kc/omega = {peak.kc_over_omega:.6g}")
    return 0


def coupling_report_command(args: argparse.Namespace) -> int:
    """
    |S(k, Omega)| tables for uniform chains and their dominance statistics

    Without a k axis the table is taken at the resonant wavenumbers of the requested
    frequencies. Exit code 0 iff the dominance grows strictly with the chain length.
    """
    spec = CouplingSpec(sizes=args.sizes, spacing=args.spacing, a=args.a, c=args.c, omegas=args.omegas,
                        k_min=args.kmin, k_max=args.kmax, k_points=args.points)
    sizes = sorted(set(spec.sizes))
    dominance = []
    for size in sizes:
        geom = uniform_chain(size, spec.spacing, spec.a, spec.c)
        k_grid = coupling_k_grid(geom, spec.omegas, spec.k_min, spec.k_max, spec.k_points)
        report = coupling_selectivity_report(geom, spec.omegas, k_grid)
        dominance.append(report.dominance)
        if args.output:
            path = args.output if len(sizes) == 1 else args.output.with_name(f"{args.output.stem}_M{size}{args.output.suffix}")
            write_csv(path, ["k"] + [f"Omega={w:g}" for w in report.omega_grid], report.rows())
    print(format_table(["M", "dominance"], [[m, f"{d:.6g}"] for m, d in zip(sizes, dominance)]))
    grows = all(b > a for a, b in zip(dominance, dominance[1:]))
    if not grows:
        logger.warning("Dominance does not grow with the chain length")
    return 0 if grows else 1


def register(subparsers) -> None:
    """Add the verify-identities, classical-scan and coupling-report subcommands"""
    identities = subparsers.add_parser("verify-identities", help="Check the operator and state identities")
    identities.add_argument("--gamma", type=float, default=0.5, help="Squeezing parameter (default: 0.5)")
    identities.add_argument("--cutoffs", type=_int_list, default=[6, 8, 10, 12], help="Comma-separated cutoffs (default: 6,8,10,12)")
    identities.add_argument("--bound", type=float, default=DEFAULT_BOUND, help=f"Residual bound (default: {DEFAULT_BOUND:g})")
    identities.add_argument("--json", type=Path, default=None, help="Write the reports as JSON")
    identities.set_defaults(func=verify_identities_command)

    classical = subparsers.add_parser(
        "classical-scan",
        help="Classical dispersion and amplitude scan over k",
        epilog=f"CSV columns: {', '.join(SCAN_COLUMNS)}",
    )
    classical.add_argument("--omega", type=float, required=True, help="Oscillator frequency")
    classical.add_argument("--epsilon", type=float, required=True, help="Coupling strength")
    classical.add_argument("--kmin", type=float, required=True, help="Scan start")
    classical.add_argument("--kmax", type=float, required=True, help="Scan end")
    classical.add_argument("--points", type=int, required=True, help="Scan points")
    classical.add_argument("--c", type=float, default=1.0, help="Speed of light (default: 1)")
    classical.add_argument("--output", type=Path, default=None, help="CSV path (default: stdout)")
    classical.set_defaults(func=classical_scan_command)

    coupling = subparsers.add_parser(
        "coupling-report",
        help="Collective-coupling selectivity of uniform chains",
        epilog="CSV columns: k, then one |S(k, Omega)| column per Omega (Omega=<value>); one file per chain length",
    )
    coupling.add_argument("--sizes", type=_int_list, default=[16, 64, 256], help="Comma-separated chain lengths")
    coupling.add_argument("--spacing", type=float, default=1.0, help="Oscillator spacing in z-bar")
    coupling.add_argument("--a", type=float, default=1.0, help="Proper acceleration at z-bar = 0")
    coupling.add_argument("--c", type=float, default=1.0, help="Speed of light")
    coupling.add_argument("--omegas", type=_float_list, default=[0.5, 1.0, 1.5, 2.0, 2.5, 3.0], help="Comma-separated Rindler frequencies")
    coupling.add_argument("--kmin", type=float, default=None, help="Start of a uniform k axis (with --kmax and --points)")
    coupling.add_argument("--kmax", type=float, default=None, help="End of the uniform k axis")
    coupling.add_argument("--points", type=int, default=None, help="Points of the uniform k axis (default: resonant wavenumbers only)")
    coupling.add_argument("--output", type=Path, default=None, help="CSV path (suffixed _M<size> for several sizes)")
    coupling.set_defaults(func=coupling_report_command)
