"""Command-line interface: closed-form tables, deterministic verification,
Monte Carlo estimation and protocol simulation.

Exit codes: 0 on success, 1 when a check fails, 2 on invalid usage or
configuration.  Output is human-readable text or a single JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .errors import UsidError
from .linalg import operator_norm
from .montecarlo import run_monte_carlo
from .povm import (
    Povm,
    closed_form_global,
    closed_form_separable,
    exact_success_probability,
    global_optimal_povm,
    optimal_separable_povm,
    validate,
    x_operator,
    x_spectrum,
)
from .protocol import build_protocol, induced_povm, run_protocol_trials, verify_equivalence
from .symmetry import (
    SpaceSpec,
    build_DA,
    conjugate_by_transposition,
    dimension_identity_gap,
    embed_party_operator,
    pair_projectors,
    sector_dims,
    transposition,
    young_projectors,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

MAX_TOTAL_DIM = 12
Z_HARD_LIMIT = 5.0
DEFAULT_TOL = 1e-10


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="usid",
        description="Measurement schemes for unambiguous identification of two "
        "bipartite pure states from single reference copies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--da", type=int, default=2, help="Alice's local dimension")
        p.add_argument("--db", type=int, default=2, help="Bob's local dimension")
        p.add_argument("--seed", type=int, default=12345)
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="operator residual tolerance")
        p.add_argument("--output", choices=["text", "json"], default="text")

    table = sub.add_parser("table", help="print closed-form success probabilities")
    add_common(table)

    verify = sub.add_parser("verify", help="run the deterministic identity/POVM check suite")
    add_common(verify)

    simulate = sub.add_parser("simulate", help="Monte Carlo estimate vs the closed form")
    add_common(simulate)
    simulate.add_argument("--samples", type=int, default=10000)
    simulate.add_argument("--workers", type=int, default=1)
    simulate.add_argument("--scheme", choices=["global", "separable", "locc"], default="global")

    protocol = sub.add_parser("protocol", help="simulate round-by-round protocol runs")
    add_common(protocol)
    protocol.add_argument("--samples", type=int, default=10000)
    protocol.add_argument("--workers", type=int, default=1)
    protocol.add_argument("--transcript", type=str, default=None, help="write per-run records here")

    return parser


def _config_error(args: argparse.Namespace) -> str | None:
    if args.da < 1 or args.db < 1:
        return f"party dimensions must be >= 1, got ({args.da}, {args.db})"
    if args.da * args.db > MAX_TOTAL_DIM:
        return f"d_a*d_b must be <= {MAX_TOTAL_DIM}, got {args.da * args.db}"
    if args.tol <= 0:
        return f"tolerance must be positive, got {args.tol}"
    if hasattr(args, "samples") and args.samples < 1:
        return f"samples must be >= 1, got {args.samples}"
    if hasattr(args, "workers") and args.workers < 1:
        return f"workers must be >= 1, got {args.workers}"
    return None


def _config_echo(args: argparse.Namespace) -> dict:
    echo = {"command": args.command, "d_a": args.da, "d_b": args.db, "tol": args.tol}
    for key in ("seed", "samples", "workers", "scheme", "transcript"):
        if hasattr(args, key):
            echo[key] = getattr(args, key)
    return echo


def _check(checks: list, name: str, measured: float, expected: float, tolerance: float,
           ok: bool | None = None) -> bool:
    if ok is None:
        ok = abs(measured - expected) <= tolerance
    checks.append(
        {
            "name": name,
            "measured": float(measured),
            "expected": float(expected),
            "tolerance": float(tolerance),
            "pass": bool(ok),
        }
    )
    return bool(ok)


def _closed_form_row(d_a: int, d_b: int) -> dict:
    p_global = closed_form_global(d_a * d_b)
    p_sep = closed_form_separable(d_a, d_b)
    return {
        "d_a": d_a,
        "d_b": d_b,
        "d": d_a * d_b,
        "p_global": p_global,
        "p_separable": p_sep,
        "gap": p_global - p_sep,
    }


def cmd_table(args: argparse.Namespace) -> tuple[dict, int]:
    rows = [_closed_form_row(args.da, args.db)]
    for d_a in range(2, 5):
        for d_b in range(2, 5):
            if (d_a, d_b) != (args.da, args.db):
                rows.append(_closed_form_row(d_a, d_b))
    report = {
        "config": _config_echo(args),
        "rows": rows,
        "limits": {"p_global": 1.0 / 3.0, "p_separable": 11.0 / 36.0, "gap": 1.0 / 36.0},
    }
    return report, EXIT_OK


def _povm_checks(checks: list, tag: str, povm: Povm, spec: SpaceSpec, tol: float) -> None:
    report = validate(povm, spec)
    _check(checks, f"{tag}_min_eigenvalue", min(report.min_eigenvalues), 0.0, 1e-10,
           ok=min(report.min_eigenvalues) >= -1e-10)
    _check(checks, f"{tag}_completeness", report.completeness_residual, 0.0, tol)
    _check(checks, f"{tag}_no_error", max(report.no_error_residuals), 0.0, 1e-12)
    exchange = max(
        operator_norm(povm[2] - conjugate_by_transposition(povm[1], 1, 2, spec.d)),
        operator_norm(povm[0] - conjugate_by_transposition(povm[0], 1, 2, spec.d)),
    )
    _check(checks, f"{tag}_exchange_symmetry", exchange, 0.0, 1e-12)


def cmd_verify(args: argparse.Namespace) -> tuple[dict, int]:
    spec = SpaceSpec(args.da, args.db)
    d = spec.d
    tol = args.tol
    checks: list = []
    eye = np.eye(d**3)

    pairs = ((0, 1), (0, 2), (1, 2))
    swap_involution = max(
        operator_norm(transposition(i, j, d) @ transposition(i, j, d) - eye) for i, j in pairs
    )
    _check(checks, "transposition_involution", swap_involution, 0.0, 1e-12)

    s3, a3, m3 = young_projectors(d)
    _check(checks, "sector_completeness", operator_norm(s3 + a3 + m3 - eye), 0.0, 1e-12)
    _check(
        checks,
        "sector_idempotence",
        max(operator_norm(p @ p - p) for p in (s3, a3, m3)),
        0.0,
        1e-12,
    )
    dim_s, dim_a, dim_m = sector_dims(d)
    trace_gap = max(
        abs(np.trace(p).real - expected)
        for p, expected in ((s3, dim_s), (a3, dim_a), (m3, dim_m))
    )
    _check(checks, "sector_traces", trace_gap, 0.0, 1e-9)

    diff_op, avg_op = build_DA(d)
    _check(checks, "difference_squared_is_mixed", operator_norm(diff_op @ diff_op - 0.75 * m3),
           0.0, 1e-12)
    _check(checks, "squares_sum_to_identity",
           operator_norm(avg_op @ avg_op + diff_op @ diff_op - eye), 0.0, 1e-12)
    _check(checks, "anticommutator_vanishes",
           operator_norm(diff_op @ avg_op + avg_op @ diff_op), 0.0, 1e-12)

    avg_mixed_evals = np.linalg.eigvalsh(m3 @ avg_op @ m3)
    n_plus = int(np.sum(np.abs(avg_mixed_evals - 0.5) <= 1e-8))
    n_minus = int(np.sum(np.abs(avg_mixed_evals + 0.5) <= 1e-8))
    _check(checks, "mixed_sector_half_eigenvalues", float(n_plus + n_minus), float(dim_m),
           0.5, ok=(n_plus == dim_m // 2 and n_minus == dim_m // 2))

    s01, _ = pair_projectors(0, 1, d)
    _check(checks, "pair_symmetric_trace", float(np.trace(s01).real),
           d * d * (d + 1) / 2.0, 1e-9)

    swap_a = transposition(1, 2, spec.d_a)
    swap_b = transposition(1, 2, spec.d_b)
    factorization = operator_norm(
        embed_party_operator(swap_a, "a", spec) @ embed_party_operator(swap_b, "b", spec)
        - transposition(1, 2, d)
    )
    _check(checks, "swap_factorizes_over_parties", factorization, 0.0, 1e-12)

    s02_a, a02_a = pair_projectors(0, 2, spec.d_a)
    s02_b, a02_b = pair_projectors(0, 2, spec.d_b)
    s02, _ = pair_projectors(0, 2, d)
    decomposition = operator_norm(
        embed_party_operator(s02_a, "a", spec) @ embed_party_operator(s02_b, "b", spec)
        + embed_party_operator(a02_a, "a", spec) @ embed_party_operator(a02_b, "b", spec)
        - s02
    )
    _check(checks, "pair_projector_party_decomposition", decomposition, 0.0, 1e-12)

    _check(checks, "sector_dimension_identity",
           float(dimension_identity_gap(spec.d_a, spec.d_b)), 0.0, 0.0)

    if d >= 2:
        global_povm = global_optimal_povm(d)
        _povm_checks(checks, "global_povm", global_povm, spec, tol)
        _check(checks, "global_probability",
               exact_success_probability(global_povm, spec), closed_form_global(d), tol)

    separable = optimal_separable_povm(spec)
    _povm_checks(checks, "separable_povm", separable, spec, tol)
    _check(checks, "separable_probability",
           exact_success_probability(separable, spec),
           closed_form_separable(spec.d_a, spec.d_b), tol)

    gap = closed_form_global(d) - closed_form_separable(spec.d_a, spec.d_b)
    if min(spec.d_a, spec.d_b) >= 2:
        _check(checks, "global_strictly_beats_separable", gap, 0.0, 0.0, ok=gap > 0.0)
    else:
        # a trivial party makes the separable optimum coincide with the global one
        _check(checks, "separable_matches_global_degenerate", gap, 0.0, 1e-15)

    if min(spec.d_a, spec.d_b) >= 2:
        beta1 = beta2 = 0.5
        analytic = x_spectrum(beta1, beta2)
        _, _, m_a = sector_dims(spec.d_a)
        _, _, m_b = sector_dims(spec.d_b)
        block_multiplicity = (m_a // 2) * (m_b // 2)
        padding = d**3 - 4 * block_multiplicity
        expected_evals = np.sort(np.concatenate(
            [np.repeat(analytic, block_multiplicity), np.zeros(padding)]))
        numeric_evals = np.linalg.eigvalsh(x_operator(spec, beta1, beta2))
        _check(checks, "mixed_block_spectrum",
               float(np.max(np.abs(numeric_evals - expected_evals))), 0.0, 1e-8)
        _check(checks, "mixed_block_boundary_saturation",
               float(numeric_evals[-1]), 1.0, 1e-10)

    tree = build_protocol(spec)
    step_residual = 0.0
    for step in tree.steps():
        total = sum(step.elements)
        d_p = spec.party_dim(step.party)
        if step.step_id.startswith("sector"):
            target = np.eye(d_p**3)
        else:
            target = young_projectors(d_p)[2]
        step_residual = max(step_residual, operator_norm(total - target))
    _check(checks, "protocol_step_completeness", step_residual, 0.0, 1e-12)

    equivalence = verify_equivalence(tree)
    _check(checks, "protocol_equivalence", equivalence.max_element_residual, 0.0, tol)
    _check(checks, "protocol_probability", abs(equivalence.probability_gap), 0.0, tol)

    s3_a, a3_a, _ = young_projectors(spec.d_a)
    s3_b, a3_b, _ = young_projectors(spec.d_b)
    unreachable = (
        embed_party_operator(s3_a, "a", spec) @ embed_party_operator(a3_b, "b", spec)
        + embed_party_operator(a3_a, "a", spec) @ embed_party_operator(s3_b, "b", spec)
    )
    _check(checks, "unreachable_branches_totally_antisymmetric",
           operator_norm(unreachable - a3 @ unreachable), 0.0, 1e-12)

    overall = all(c["pass"] for c in checks)
    report = {"config": _config_echo(args), "checks": checks, "overall_pass": overall}
    return report, EXIT_OK if overall else EXIT_CHECK_FAILED


def _scheme_povm(scheme: str, spec: SpaceSpec) -> tuple[Povm, float]:
    if scheme == "global":
        return global_optimal_povm(spec.d), closed_form_global(spec.d)
    if scheme == "separable":
        return optimal_separable_povm(spec), closed_form_separable(spec.d_a, spec.d_b)
    return induced_povm(build_protocol(spec)), closed_form_separable(spec.d_a, spec.d_b)


def cmd_simulate(args: argparse.Namespace) -> tuple[dict, int]:
    spec = SpaceSpec(args.da, args.db)
    povm, target = _scheme_povm(args.scheme, spec)
    mc = run_monte_carlo(povm, spec, args.samples, args.seed, args.workers)
    z = abs(mc.mean_success - target) / mc.stderr_success if mc.stderr_success > 0 else 0.0
    ok = z <= Z_HARD_LIMIT
    report = {
        "config": _config_echo(args),
        "closed_form": target,
        "mc": {
            "n_samples": mc.n_samples,
            "mean_success": mc.mean_success,
            "stderr_success": mc.stderr_success,
            "mean_error": mc.mean_error,
            "max_error_sample": mc.max_error_sample,
            "seed": mc.seed,
        },
        "z_score": z,
        "overall_pass": ok,
    }
    return report, EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_protocol(args: argparse.Namespace) -> tuple[dict, int]:
    spec = SpaceSpec(args.da, args.db)
    tree = build_protocol(spec)
    stats, records = run_protocol_trials(tree, args.samples, args.seed, args.workers)
    equivalence = verify_equivalence(tree)

    if args.transcript is not None:
        with open(args.transcript, "w", encoding="utf-8") as handle:
            for record in records:
                handle.write(
                    f"{record.index},{record.transcript.branch_path()},"
                    f"{record.transcript.final_label}\n"
                )

    ok = (
        stats.misidentification_count == 0
        and equivalence.max_element_residual <= args.tol
        and abs(equivalence.probability_gap) <= args.tol
    )
    n = stats.n_trials
    report = {
        "config": _config_echo(args),
        "n_trials": n,
        "label_frequencies": [count / n for count in stats.label_counts],
        "success_frequency": stats.success_count / n,
        "misidentification_count": stats.misidentification_count,
        "closed_form_separable": closed_form_separable(spec.d_a, spec.d_b),
        "equivalence_residuals": list(equivalence.element_residuals),
        "probability_gap": equivalence.probability_gap,
        "transcript_path": args.transcript,
        "overall_pass": ok,
    }
    return report, EXIT_OK if ok else EXIT_CHECK_FAILED


def _print_text(report: dict) -> None:
    config = report.get("config", {})
    print(f"command: {config.get('command')}  d_a={config.get('d_a')} d_b={config.get('d_b')}")
    if "rows" in report:
        print(f"{'d_a':>4} {'d_b':>4} {'d':>4} {'p_global':>14} {'p_separable':>14} {'gap':>14}")
        for row in report["rows"]:
            print(
                f"{row['d_a']:>4} {row['d_b']:>4} {row['d']:>4} "
                f"{row['p_global']:>14.10f} {row['p_separable']:>14.10f} {row['gap']:>14.10f}"
            )
        limits = report["limits"]
        print(
            f"{'inf':>4} {'inf':>4} {'inf':>4} "
            f"{limits['p_global']:>14.10f} {limits['p_separable']:>14.10f} {limits['gap']:>14.10f}"
        )
    if "checks" in report:
        for check in report["checks"]:
            status = "PASS" if check["pass"] else "FAIL"
            print(
                f"[{status}] {check['name']}: measured={check['measured']:.3e} "
                f"expected={check['expected']:.3e} tol={check['tolerance']:.1e}"
            )
    for key in (
        "closed_form",
        "z_score",
        "n_trials",
        "label_frequencies",
        "success_frequency",
        "misidentification_count",
        "closed_form_separable",
        "equivalence_residuals",
        "probability_gap",
        "transcript_path",
    ):
        if key in report:
            print(f"{key}: {report[key]}")
    if "mc" in report:
        for key, value in report["mc"].items():
            print(f"mc.{key}: {value}")
    if "overall_pass" in report:
        print(f"overall: {'PASS' if report['overall_pass'] else 'FAIL'}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    error = _config_error(args)
    if error is not None:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_USAGE

    handlers = {
        "table": cmd_table,
        "verify": cmd_verify,
        "simulate": cmd_simulate,
        "protocol": cmd_protocol,
    }
    start = time.perf_counter()
    try:
        report, code = handlers[args.command](args)
    except UsidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report["seconds"] = time.perf_counter() - start

    if args.output == "json":
        print(json.dumps(report, indent=2))
    else:
        _print_text(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
