"""Command-line front end.

Reports are JSON documents on stdout; a one-line human summary goes to
stderr.  Exit codes: 0 success, 1 domain failure, 2 I/O, parse or usage
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

import numpy as np

from . import io
from .duality import povm_to_vn_map, statistical_map, vn_to_predual
from .effects import (
    FiniteBoolean,
    HilbertEffects,
    UnitInterval,
    check_effect_algebra_axioms,
    check_module_axioms,
)
from .errors import BadParameter, PovmLabError
from .operators import check_density, hermitian_part, operator_norm
from .povm import POVM, BRUTE_FORCE_LIMIT, check_mu_continuous, is_pvm, variation
from .sequential import sequential_compose
from .spin import DEFAULT_POINTS, DEFAULT_SCHEME, SCHEMES, build_grid, region_from_spec, run_spin_experiment
from .suites import THRESHOLDS, run_roundtrips
from .tolerance import ENV_VAR, Tolerance, default_tolerance

log = logging.getLogger("povmlab")

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


class DomainFailure(Exception):
    """Carries a report for a run whose checks failed."""

    def __init__(self, report: dict, message: str):
        super().__init__(message)
        self.report = report


def _emit(report: dict) -> None:
    sys.stdout.write(io.dump_json(report) + "\n")


def _spectra(effects: np.ndarray) -> list[list[float]]:
    return [np.linalg.eigvalsh(hermitian_part(E)).tolist() for E in effects]


# verbs --------------------------------------------------------------------


def cmd_validate(args, tol: Tolerance) -> dict:
    space, effects, measure = io.parse_povm_doc(io.load_json(args.povm))
    d = effects.shape[1]
    residual = operator_norm(effects.sum(axis=0) - np.eye(d))
    report = {
        "atoms": list(space.atoms),
        "hilbert_dim": d,
        "normalization_residual": residual,
        "spectra": _spectra(effects),
    }
    try:
        A = POVM(space, effects, tol)
    except PovmLabError as exc:
        report.update(valid=False, error=f"{type(exc).__name__}: {exc}")
        raise DomainFailure(report, f"invalid POVM: {exc}") from None
    report.update(valid=True, is_pvm=is_pvm(A, tol))
    if measure is not None:
        report["mu_continuous"] = check_mu_continuous(A, measure, tol)
    log.info("valid POVM on %d atoms, d=%d, residual %.3e", len(A), d, residual)
    return report


def cmd_convert(args, tol: Tolerance) -> dict:
    A, block = io.povm_from_doc(io.load_json(args.povm), tol)
    report: dict = {"to": args.to, "atoms": list(A.space.atoms)}
    if args.to == "statistical":
        if not args.state:
            raise BadParameter("--to statistical needs at least one --state file")
        alpha = statistical_map(A)
        rows = []
        for path in args.state:
            rho = check_density(io.matrix_from_doc(io.load_json(path)), tol)
            rows.append({"state": path, "distribution": alpha(rho).as_dict()})
        report["distributions"] = rows
        return report

    mu = io.measure_from_doc(io.load_json(args.measure)) if args.measure else block
    if mu is None:
        raise BadParameter(f"--to {args.to} needs --measure or a measure block in the POVM file")
    if mu.space != A.space:
        raise BadParameter("measure atoms do not match the POVM atoms")
    psi = povm_to_vn_map(A, mu, tol)
    if args.to == "vn":
        report["images"] = {a: io.matrix_to_doc(E) for a, E in zip(A.space.atoms, psi.images)}
    else:
        Phi = vn_to_predual(psi)
        report["kernels"] = {a: io.matrix_to_doc(K) for a, K in zip(A.space.atoms, Phi.kernel)}
        report["trace_residual"] = Phi.trace_residual
    return report


def cmd_compose(args, tol: Tolerance) -> dict:
    A, _ = io.povm_from_doc(io.load_json(args.first), tol)
    mu = io.measure_from_doc(io.load_json(args.measure))
    family = io.family_from_doc(io.load_json(args.family), tol)
    if mu.space != A.space:
        raise BadParameter("measure atoms do not match the first POVM")
    AB = sequential_compose(A, mu, family, tol)
    marginal = float(np.abs(AB.marginal() - A.effects).max())
    report = {
        "atoms": len(AB),
        "normalization_residual": AB.normalization_residual,
        "marginal_recovery_residual": marginal,
        "max_effect_norm": {
            y: max((operator_norm(E) for (x, yy), E in zip(AB.space.pairs, AB.effects) if yy == y), default=0.0)
            for y in sorted({y for _, y in AB.space.pairs})
        },
    }
    if args.out:
        io.dump_json(io.povm_to_doc(AB), args.out)
        report["output"] = args.out
    return report


def cmd_variation(args, tol: Tolerance) -> dict:
    A, measure = io.povm_from_doc(io.load_json(args.povm), tol)
    report = {"closed_form": variation(A, "closed_form")}
    if args.brute_force:
        if len(A) > BRUTE_FORCE_LIMIT:
            raise BadParameter(f"brute force is limited to {BRUTE_FORCE_LIMIT} atoms")
        report["brute_force"] = variation(A, "brute_force")
        report["difference"] = abs(report["brute_force"] - report["closed_form"])
    if measure is not None:
        report["mu_continuous"] = check_mu_continuous(A, measure, tol)
    return report


def cmd_axioms(args, tol: Tolerance) -> dict:
    if args.structure == "unit":
        inst = UnitInterval(tol)
    elif args.structure == "effects":
        inst = HilbertEffects(args.dim, tol)
    else:
        inst = FiniteBoolean([f"a{i}" for i in range(args.atoms)], tol)
    reports = [check_effect_algebra_axioms(inst, args.samples, args.seed)]
    if args.structure != "boolean":
        reports.append(check_module_axioms(inst, args.samples, args.seed))
    report = {
        "structure": inst.name,
        "effect_algebra": reports[0].to_dict(),
        "effect_module": reports[1].to_dict() if len(reports) > 1 else None,
    }
    if not all(r.ok for r in reports):
        raise DomainFailure(report, f"axiom violations found on {inst.name}")
    return report


def cmd_spin_demo(args, tol: Tolerance) -> dict:
    grid = build_grid(args.points, args.scheme)
    region = region_from_spec(grid, args.region)
    rep = run_spin_experiment(grid, region, tol, threshold=args.threshold)
    report = rep.to_dict()
    log.info(
        "spin demo: minus %.2e, plus deviation %.2e, %.3fs",
        rep.minus_branch_norm,
        rep.plus_branch_deviation,
        rep.elapsed_seconds,
    )
    if not rep.claims_hold:
        raise DomainFailure(report, "spin claims failed")
    return report


def cmd_roundtrip(args, tol: Tolerance) -> dict:
    errors = run_roundtrips(args.trials, args.seed, parallel=args.parallel, tol=tol)
    limits = {k: args.threshold or v for k, v in THRESHOLDS.items()}
    report = {"trials": args.trials, "seed": args.seed, "thresholds": limits, "max_error": errors}
    if any(errors[k] > limits[k] for k in errors):
        raise DomainFailure(report, "round trip exceeded the threshold")
    return report


# parser -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="povmlab", description="Finite POVM toolkit.")
    p.add_argument("--tol", help=f"tolerance override, e.g. 1e-8 or recon=1e-8,psd=1e-10 (also ${ENV_VAR})")
    p.add_argument("--parallel", action="store_true", help="run independent trials on a thread pool")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check the POVM invariants of a file")
    s.add_argument("povm")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("convert", help="convert a POVM to another representation")
    s.add_argument("povm")
    s.add_argument("--to", required=True, choices=("statistical", "vn", "predual"))
    s.add_argument("--state", action="append", default=[], help="density matrix file (repeatable)")
    s.add_argument("--measure", help="measure file (default: the POVM's measure block)")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("compose", help="sequential composition (A;B)")
    s.add_argument("first")
    s.add_argument("measure")
    s.add_argument("family")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("variation", help="variation of a POVM")
    s.add_argument("povm")
    s.add_argument("--brute-force", action="store_true", help="also enumerate all partitions")
    s.set_defaults(func=cmd_variation)

    s = sub.add_parser("axioms", help="run the effect-algebra/module axiom suites")
    s.add_argument("--structure", choices=("unit", "effects", "boolean"), default="unit")
    s.add_argument("--dim", type=_positive_int, default=2)
    s.add_argument("--atoms", type=_positive_int, default=4)
    s.add_argument("--samples", type=_positive_int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_axioms)

    s = sub.add_parser("spin-demo", help="spin direction then spin component")
    s.add_argument("--points", type=int, default=DEFAULT_POINTS)
    s.add_argument("--scheme", choices=SCHEMES, default=DEFAULT_SCHEME)
    s.add_argument("--region", default="north", help="north|south|all|none|axis:x,y,z|indices:i,j,...")
    s.add_argument("--threshold", type=float, default=1e-10)
    s.set_defaults(func=cmd_spin_demo)

    s = sub.add_parser("roundtrip", help="randomized round trips through every representation")
    s.add_argument("--trials", type=_positive_int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threshold", type=float, help="override every per-suite threshold")
    s.set_defaults(func=cmd_roundtrip)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        tol = Tolerance.parse(args.tol, default_tolerance()) if args.tol else default_tolerance()
    except ValueError as exc:
        log.error("bad tolerance: %s", exc)
        return EXIT_IO

    try:
        report = args.func(args, tol)
    except io.FormatError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except BadParameter as exc:
        log.error("parameter error: %s", exc)
        return EXIT_IO
    except DomainFailure as exc:
        _emit(exc.report)
        log.error("%s", exc)
        return EXIT_DOMAIN
    except PovmLabError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_DOMAIN
    _emit(report)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
