"""Command line interface.

Subcommands:
    solve      smallest support for one data vector (JSON)
    spans      span family and pair listing at one level (JSON)
    constants  constant sets for the configured levels (CSV)
    estimate   Monte Carlo estimates for the configured cells (CSV)
    validate   estimates against analytic bounds, pass/fail matrix (CSV)

Exit codes: 0 success (and, for validate, no failed cells); 2 validate
found failing cells; 1 any error.  Seed and thread count can also come
from L0GEOM_SEED and L0GEOM_THREADS; explicit flags win over the
environment, which wins over the config file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .bounds import assemble_constants, constants_to_csv
from .config import ConfigError, ExperimentConfig, load_config
from .montecarlo import (
    LevelSetExperiment,
    MCEstimate,
    Quantity,
    report_to_csv,
    validate_bounds,
)
from .norms import ball_volume
from .solver import L0Solver
from .subspaces import enumerate_pairs, enumerate_spans

ENV_SEED = "L0GEOM_SEED"
ENV_THREADS = "L0GEOM_THREADS"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l0geom",
        description="Smallest-support solver, span families, bound constants, "
        "and Monte Carlo validation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="path to JSON config")
        p.add_argument("--output", help="write result here instead of stdout")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--threads", type=int, help="override worker thread count")
        p.add_argument("--samples", type=int, help="override Monte Carlo sample count")

    p_solve = sub.add_parser("solve", help="solve one data vector")
    common(p_solve)
    p_solve.add_argument("--data", required=True, help="comma-separated data vector")
    p_solve.add_argument("--tau", type=float, help="tolerance (default: first config tau)")

    p_spans = sub.add_parser("spans", help="list the span family at one level")
    common(p_spans)
    p_spans.add_argument("--level", type=int, required=True, help="subset size K")

    common(sub.add_parser("constants", help="constant sets for configured levels"))
    common(sub.add_parser("estimate", help="Monte Carlo estimates for configured cells"))
    common(sub.add_parser("validate", help="estimates versus analytic bounds"))
    return parser


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as err:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from err


def _apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    seed = args.seed if args.seed is not None else _env_int(ENV_SEED)
    threads = args.threads if args.threads is not None else _env_int(ENV_THREADS)
    if seed is not None:
        if seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {seed}")
        config = replace(config, seed=seed)
    if threads is not None:
        if threads < 1:
            raise ConfigError(f"threads must be >= 1, got {threads}")
        config = replace(config, threads=threads)
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {args.samples}")
        config = replace(config, n_samples=args.samples)
    return config


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cmd_solve(config: ExperimentConfig, args: argparse.Namespace) -> int:
    try:
        data = np.array([float(part) for part in args.data.split(",")])
    except ValueError as err:
        raise ConfigError(f"--data must be comma-separated reals: {err}") from err
    if data.size != config.dictionary.n_dim:
        raise ConfigError(
            f"--data has {data.size} entries, dictionary dimension is "
            f"{config.dictionary.n_dim}"
        )
    tau = args.tau if args.tau is not None else config.tau_grid[0]
    if not tau > 0:
        raise ConfigError(f"tau must be positive, got {tau}")
    solver = L0Solver(
        config.dictionary, config.fidelity, config.span_tol, config.feas_tol, config.dist_tol
    )
    result = solver.solve(data, tau)
    _emit(
        _json(
            {
                "value": result.value,
                "support": list(result.support),
                "coefficients": list(result.coefficients),
                "residual": result.residual,
                "tau": tau,
            }
        ),
        args.output,
    )
    return 0


def _cmd_spans(config: ExperimentConfig, args: argparse.Namespace) -> int:
    n = config.dictionary.n_dim
    if not 0 <= args.level <= n:
        raise ConfigError(f"--level must lie in [0, {n}], got {args.level}")
    family = enumerate_spans(config.dictionary, args.level, config.span_tol)
    pairs = {
        str(k): [list(pair) for pair in enumerate_pairs(family, k, config.span_tol)]
        for k in range(max(0, 2 * args.level - n), args.level)
    }
    _emit(
        _json(
            {
                "K": args.level,
                "ambient_dim": n,
                "members": [
                    {"index": i, "atoms": list(member.provenance)}
                    for i, member in enumerate(family.members)
                ],
                "pairs": pairs,
            }
        ),
        args.output,
    )
    return 0


def _cmd_constants(config: ExperimentConfig, args: argparse.Namespace) -> int:
    vol_samples = config.constants_samples or config.n_samples
    sets = [
        assemble_constants(
            config.dictionary, config.fidelity, config.data, k,
            config.span_tol, vol_samples, config.seed, config.threads,
        )
        for k in config.K_list
    ]
    _emit(constants_to_csv(sets), args.output)
    return 0


def _estimates_csv(estimates: list[MCEstimate]) -> str:
    lines = ["quantity,K,tau,theta,estimate,ci,n,seed"]
    for e in estimates:
        lines.append(
            ",".join(
                [
                    e.quantity.value,
                    "" if e.K is None else str(e.K),
                    repr(e.tau),
                    repr(e.theta),
                    repr(e.mean),
                    repr(e.half_width_95),
                    str(e.n_samples),
                    str(e.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _cmd_estimate(config: ExperimentConfig, args: argparse.Namespace) -> int:
    experiment = LevelSetExperiment(
        config.dictionary, config.fidelity, config.data, config.theta,
        config.n_samples, config.seed, config.span_tol, config.feas_tol,
        config.dist_tol, config.threads,
    )
    ball = ball_volume(
        config.data, config.dictionary.n_dim,
        config.constants_samples or config.n_samples, config.seed, config.threads,
    )
    estimates: list[MCEstimate] = []
    for quantity in config.quantities:
        for tau in config.tau_grid:
            if quantity is Quantity.EXPECT:
                estimates.append(experiment.expect(tau))
                continue
            for K in config.K_list:
                if quantity is Quantity.PROB_LEQ:
                    estimates.append(experiment.prob(K, tau, "leq"))
                elif quantity is Quantity.PROB_EQ:
                    estimates.append(experiment.prob(K, tau, "eq"))
                elif quantity is Quantity.MEASURE_LEQ:
                    estimates.append(experiment.measure(K, tau, "leq", ball))
                else:
                    estimates.append(experiment.measure(K, tau, "eq", ball))
    _emit(_estimates_csv(estimates), args.output)
    return 0


def _cmd_validate(config: ExperimentConfig, args: argparse.Namespace) -> int:
    # Surface validity problems before any long computation: the gates only
    # need the norm comparison constants, never Monte Carlo.
    from .norms import compute_equiv_constants  # local import to keep startup light

    equiv = compute_equiv_constants(
        config.fidelity, config.data, config.dictionary.n_dim
    )
    euclidean = config.fidelity.kind == "l2" and config.data.kind == "l2"
    delta_hat = 1.0 if euclidean else equiv.delta_bar
    pair = 2.0 if euclidean else 3.0 * equiv.delta_bar
    worst_gate = max(delta_hat, pair)
    bad = [
        tau
        for tau in config.tau_grid
        if config.theta < worst_gate * tau and max(config.K_list, default=0) >= 1
    ]
    if bad:
        sys.stderr.write(
            f"warning: theta={config.theta} is below the validity gate "
            f"{worst_gate} * tau for tau in {bad}; those cells will be "
            "flagged, not checked\n"
        )

    report = validate_bounds(
        config.dictionary, config.fidelity, config.data, config.tau_grid,
        config.theta, config.K_list, config.quantities, config.n_samples,
        config.seed, config.span_tol, config.feas_tol, config.dist_tol,
        config.constants_samples, config.threads,
    )
    _emit(report_to_csv(report), args.output)
    if report.n_fail:
        sys.stderr.write(f"{report.n_fail} of {len(report.rows)} cells failed\n")
        return 2
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _apply_overrides(load_config(args.config), args)
        if args.command == "solve":
            return _cmd_solve(config, args)
        if args.command == "spans":
            return _cmd_spans(config, args)
        if args.command == "constants":
            return _cmd_constants(config, args)
        if args.command == "estimate":
            return _cmd_estimate(config, args)
        return _cmd_validate(config, args)
    except (ConfigError, ValueError, OSError, RuntimeError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
