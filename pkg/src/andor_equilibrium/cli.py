"""andor-equilibrium — alpha-beta cost and eigen-distributions."""

import argparse
import logging
import math
import sys
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

from . import equilibrium, poly
from .config import (
    COMMANDS,
    DEFAULT_CONFIG,
    RunConfig,
    build_run_config,
    load_config,
)
from .distributions import enumerate_reluctant, reluctant_count
from .errors import (
    CapabilityError,
    CertificationError,
    DomainError,
    InputError,
)
from .report import envelope, render_csv, render_json, write_output
from .tree import (
    ENUMERATION_LIMIT,
    MAX_HEIGHT,
    GateKind,
    TreeShape,
    evaluate,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_CAPABILITY = 3


# ---------------------------------------------------------------------------
# Argument parser
# ---------------------------------------------------------------------------


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--gate",
        choices=[g.value for g in GateKind],
        help="Root gate of the tree (default: and)",
    )
    common.add_argument(
        "--height", type=int, metavar="N", help="Tree height (default: 1)"
    )
    common.add_argument(
        "--r",
        metavar="PROB",
        help='Root probability constraint, e.g. "0.75" or "3/4"',
    )
    common.add_argument(
        "--grid", type=int, metavar="N", help="Lattice or sample grid size"
    )
    common.add_argument(
        "--tol", type=float, metavar="FLOAT", help="Argmax / bracket tolerance"
    )
    common.add_argument(
        "--emit", choices=["json", "csv"], help="Report format (default: json)"
    )
    common.add_argument(
        "--out", metavar="PATH", help="Write the report here instead of stdout"
    )
    common.add_argument(
        "--seed", type=int, metavar="N", help="Base seed for random starts"
    )
    common.add_argument(
        "--starts", type=int, metavar="N", help="Number of ascent starts"
    )
    common.add_argument(
        "--config",
        default=None,
        metavar="FILE",
        help=f"YAML file with default settings (default: {DEFAULT_CONFIG})",
    )
    return common


_HELP = {
    "poly": "Exact cost and probability polynomials",
    "lemma1": "Certify c/p decreasing for the OR family",
    "lemma2": "Certify c'/p' decreasing for the OR family",
    "duality": "Check the AND/OR duality identities",
    "identities": "Check the closed-form identities at small height",
    "alpha": "Locate the root alpha of the odd-height factor",
    "cep1": "Solve the constrained problem on an OR root's children",
    "eigen": "Search the ID eigen-distribution under --r",
    "prop": "Check the forced-root values on a probability lattice",
    "isets": "Count and list reluctant assignments",
    "compare": "ID equilibrium versus a correlated witness",
    "maxiid": "Maximize the IID cost without a constraint",
}


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="andor-equilibrium",
        description=(
            "Exact and numerical analysis of alpha-beta pruning cost on"
            " uniform binary AND-OR trees."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Precedence: command-line flags override the YAML config file, which
overrides built-in defaults.

Exit codes:
  0  every check passed
  1  a check or certificate failed
  2  invalid flags or values
  3  request exceeds a size limit (e.g. exhaustive search above h=3)
        """,
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True, metavar="CMD")
    for name in COMMANDS:
        cmd = sub.add_parser(name, parents=[common], help=_HELP[name])
        if name == "prop":
            cmd.add_argument(
                "--i",
                type=int,
                choices=[0, 1],
                help="Forced root value (default: both)",
            )
    return parser


# ---------------------------------------------------------------------------
# Command handlers (private)
# ---------------------------------------------------------------------------


@dataclass
class _Outcome:
    result: object
    checks: dict[str, bool] = field(default_factory=dict)
    rows: list[dict] | None = None
    columns: list[str] | None = None


def _shape(config: RunConfig) -> TreeShape:
    return TreeShape(config.gate, config.height)


def _require_r(config: RunConfig):
    if config.r is None:
        raise InputError(f"{config.command} needs --r")
    return config.r


def _cmd_poly(config: RunConfig) -> _Outcome:
    pair = poly.cost_prob(config.gate, config.height)
    checks: dict[str, bool] = {}
    if config.height <= poly.CERTIFICATE_LIMIT:
        cert = poly.positive_derivative_certificate(config.gate, config.height)
        checks["prob_increasing"] = cert.certified
    else:
        log.info(
            "Skipping the p' > 0 certificate above height %d",
            poly.CERTIFICATE_LIMIT,
        )
    cost, prob = pair.cost.coefficients, pair.prob.coefficients
    rows = [
        {
            "degree": k,
            "cost": cost[k] if k < len(cost) else 0,
            "prob": prob[k] if k < len(prob) else 0,
        }
        for k in range(max(len(cost), len(prob)))
    ]
    return _Outcome(
        result=pair,
        checks=checks,
        rows=rows,
        columns=["degree", "cost", "prob"],
    )


def _cmd_lemma(config: RunConfig, which: int) -> _Outcome:
    rows = None
    if config.output_format == "csv":
        rows = poly.ratio_curve(config.height)
    if which == 1:
        cert = poly.lemma1_report(config.height)
        column = "c_over_p"
    else:
        cert = poly.lemma2_report(config.height)
        column = "dc_over_dp"
    if rows is not None:
        rows.append(
            {"x": "certificate", column: str(cert.certified).lower()}
        )
    return _Outcome(
        result=cert,
        checks={"certified": cert.certified},
        rows=rows,
        columns=["x", column],
    )


def _cmd_duality(config: RunConfig) -> _Outcome:
    checks = {"duality": poly.duality_check(config.height, config.grid)}
    if config.height + 2 <= MAX_HEIGHT:
        checks["two_level"] = poly.two_level_consistency(config.height)
    return _Outcome(result={"height": config.height}, checks=checks)


def _cmd_identities(config: RunConfig) -> _Outcome:
    checks = {
        "identity_and2": poly.identity38_check(),
        "factorization_or3": poly.factorization35_check(),
    }
    for h in range(1, min(config.height, MAX_HEIGHT - 2) + 1):
        checks[f"two_level_h{h}"] = poly.two_level_consistency(h)
    return _Outcome(result={"alpha_factor": poly.ALPHA_POLY}, checks=checks)


def _cmd_alpha(config: RunConfig) -> _Outcome:
    count = poly.alpha_root_count()
    alpha = poly.find_alpha(config.tol)
    checks = {"unique_root": count == 1}
    for k in (1, 2):
        checks[f"odd_bound_k{k}"] = equilibrium.odd_height_bound_check(k)
    return _Outcome(
        result={"alpha": alpha, "roots_in_interval": count, "tol": config.tol},
        checks=checks,
    )


def _cmd_cep1(config: RunConfig) -> _Outcome:
    r = _require_r(config)
    solution = equilibrium.cep1_solve(
        config.height, r, config.tol, config.inverse_tol
    )
    expected = 1 - math.sqrt(1 - float(r))
    pair = solution.pair
    error = max(abs(pair.z - expected), abs(pair.w - expected))
    return _Outcome(
        result={**solution.to_json(), "closed_form": expected, "error": error},
        checks={
            "decreasing_f1": solution.f1_decreasing,
            "closed_form": error < config.tol,
            "constraint": solution.pair.satisfies(r, config.constraint_tol),
        },
    )


def _cmd_eigen(config: RunConfig) -> _Outcome:
    report = equilibrium.eigen_search(
        _shape(config),
        _require_r(config),
        config.tol,
        starts=config.starts,
        seed=config.seed,
        constraint_tol=config.constraint_tol,
        inverse_tol=config.inverse_tol,
    )
    return _Outcome(
        result=report,
        checks={
            "iid": report.certified_iid,
            "constraint": report.residual <= config.constraint_tol,
        },
    )


def _cmd_prop(config: RunConfig) -> _Outcome:
    shape = _shape(config)
    values = [config.i] if config.i is not None else [0, 1]
    reports, witnesses, checks = [], {}, {}
    for i in values:
        report = equilibrium.proposition_report(shape, i, config.grid)
        reports.append(report)
        checks[f"forced_{i}"] = report.holds
        witnesses[str(i)] = equilibrium.endpoint_non_iid_witness(shape, i)
    return _Outcome(
        result={"reports": reports, "non_iid_witnesses": witnesses},
        checks=checks,
    )


def _cmd_isets(config: RunConfig) -> _Outcome:
    shape = _shape(config)
    result: dict = {"tree": shape}
    checks: dict[str, bool] = {}
    rows = []
    for i in (0, 1):
        count = reluctant_count(shape, i)
        entry: dict = {"count": count}
        if shape.height <= ENUMERATION_LIMIT:
            iset = enumerate_reluctant(shape, i)
            entry["members"] = iset
            checks[f"count_{i}"] = len(iset) == count
            checks[f"root_{i}"] = all(
                evaluate(shape, a) == i for a in iset.members
            )
            rows += [
                {"i": i, "assignment": a.to_string()} for a in iset.members
            ]
        result[f"{i}-set"] = entry
    return _Outcome(
        result=result,
        checks=checks,
        rows=rows if shape.height <= ENUMERATION_LIMIT else None,
        columns=["i", "assignment"],
    )


def _cmd_compare(config: RunConfig) -> _Outcome:
    shape = _shape(config)
    if config.r is None:
        comparison = equilibrium.compare_unconstrained(shape)
    else:
        comparison = equilibrium.compare_id_vs_correlated(
            shape,
            config.r,
            config.tol,
            starts=config.starts,
            seed=config.seed,
            constraint_tol=config.constraint_tol,
            inverse_tol=config.inverse_tol,
        )
    return _Outcome(result=comparison, checks={"strict": comparison.strict})


def _cmd_maxiid(config: RunConfig) -> _Outcome:
    shape = _shape(config)
    best = equilibrium.maximize_iid(shape, config.tol)
    checks: dict[str, bool] = {}
    if shape.height >= 2:
        checks["interior"] = equilibrium.unconstrained_interior_check(shape)
    k, odd = divmod(shape.height, 2)
    if shape.root_gate is GateKind.AND and not odd and k <= 4:
        checks["even_dominance"] = equilibrium.even_height_dominance_check(k)
    if shape.root_gate is GateKind.OR and odd and k in (1, 2):
        checks["odd_bound"] = equilibrium.odd_height_bound_check(k)
    return _Outcome(result=best, checks=checks)


_HANDLERS: dict[str, Callable[[RunConfig], _Outcome]] = {
    "poly": _cmd_poly,
    "lemma1": lambda config: _cmd_lemma(config, 1),
    "lemma2": lambda config: _cmd_lemma(config, 2),
    "duality": _cmd_duality,
    "identities": _cmd_identities,
    "alpha": _cmd_alpha,
    "cep1": _cmd_cep1,
    "eigen": _cmd_eigen,
    "prop": _cmd_prop,
    "isets": _cmd_isets,
    "compare": _cmd_compare,
    "maxiid": _cmd_maxiid,
}


def _render(config: RunConfig, outcome: _Outcome) -> str:
    if config.output_format == "csv":
        if outcome.rows is None or outcome.columns is None:
            raise InputError(
                f"{config.command} at this height has no tabular output;"
                " use --emit json"
            )
        return render_csv(outcome.rows, outcome.columns)
    return render_json(
        envelope(config.command, config, outcome.result, outcome.checks)
    )


# ---------------------------------------------------------------------------
# Main
# ---------------------------------------------------------------------------


def run(config: RunConfig) -> int:
    """Dispatch one command and write its report; return the exit code."""
    try:
        outcome = _HANDLERS[config.command](config)
        text = _render(config, outcome)
    except CapabilityError as e:
        log.error("Error: %s", e)
        return EXIT_CAPABILITY
    except (InputError, DomainError) as e:
        log.error("Error: %s", e)
        return EXIT_USAGE
    except CertificationError as e:
        log.error("Certification failed: %s (interval %s)", e, e.interval)
        return EXIT_CHECK_FAILED

    write_output(text, config.output_path)
    failed = [name for name, ok in outcome.checks.items() if not ok]
    if failed:
        log.error("Failed checks: %s", ", ".join(failed))
        return EXIT_CHECK_FAILED
    log.info("Done.")
    return EXIT_OK


def main(argv: list[str] | None = None) -> None:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_arg_parser().parse_args(argv)

    explicit = args.config is not None
    config_path = Path(args.config) if explicit else DEFAULT_CONFIG
    file_config = load_config(config_path, explicit=explicit)

    try:
        config = build_run_config(args, file_config)
    except InputError as e:
        log.error("Error: %s", e)
        sys.exit(EXIT_USAGE)

    sys.exit(run(config))
