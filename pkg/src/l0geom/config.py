"""Experiment configuration: JSON schema, defaults, and validation.

A config file is one JSON object.  Required: "dictionary" (list of
vectors, one per row) and either "tau" (scalar) or "tau_grid" (list).
Optional, with defaults:

    fidelity           {"kind": "l2"}     norm for the approximation residual
    data               {"kind": "l2"}     norm whose ball is sampled/measured
    theta              1.0                data-ball radius
    K / K_list         all of 0..N        sparsity levels
    quantities         all five           subset of measure_leq, measure_eq,
                                          prob_leq, prob_eq, expect
    samples            100000             Monte Carlo draws per estimate
    constants_samples  same as samples    draws for volume constants
    seed               42                 base seed for all streams
    span_tol           1e-9               span comparison tolerance
    feas_tol           1e-10              relative feasibility slack on tau
    dist_tol           1e-9               distance solver tolerance
    threads            1                  worker threads (never affects results)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .bounds import Quantity
from .norms import NormSpec
from .subspaces import Dictionary


class ConfigError(ValueError):
    """Raised for a malformed or inconsistent configuration."""


_KNOWN_KEYS = {
    "dictionary", "fidelity", "data", "theta", "tau", "tau_grid", "K", "K_list",
    "quantities", "samples", "constants_samples", "seed", "span_tol", "feas_tol",
    "dist_tol", "threads",
}


@dataclass(frozen=True)
class ExperimentConfig:
    dictionary: Dictionary
    fidelity: NormSpec
    data: NormSpec
    theta: float
    tau_grid: tuple[float, ...]
    K_list: tuple[int, ...]
    quantities: tuple[Quantity, ...]
    n_samples: int
    constants_samples: int | None
    seed: int
    span_tol: float
    feas_tol: float
    dist_tol: float
    threads: int


def _positive(obj: dict[str, Any], key: str, default: float) -> float:
    value = obj.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
        raise ConfigError(f"'{key}' must be a positive number, got {value!r}")
    return float(value)


def _positive_int(obj: dict[str, Any], key: str, default: int) -> int:
    value = obj.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(f"'{key}' must be a positive integer, got {value!r}")
    return value


def config_from_dict(obj: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(obj, dict):
        raise ConfigError(f"config must be a JSON object, got {type(obj).__name__}")
    unknown = set(obj) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "dictionary" not in obj:
        raise ConfigError("config needs a 'dictionary' field")

    span_tol = _positive(obj, "span_tol", 1e-9)
    try:
        dictionary = Dictionary.from_vectors(obj["dictionary"], span_tol=span_tol)
    except (ValueError, TypeError) as err:
        raise ConfigError(f"bad dictionary: {err}") from err
    n = dictionary.n_dim

    try:
        fidelity = NormSpec.from_dict(obj.get("fidelity", {"kind": "l2"}))
        data = NormSpec.from_dict(obj.get("data", {"kind": "l2"}))
    except ValueError as err:
        raise ConfigError(f"bad norm spec: {err}") from err
    for label, spec in (("fidelity", fidelity), ("data", data)):
        if spec.kind == "wlp" and len(spec.weights) != n:
            raise ConfigError(
                f"{label} norm has {len(spec.weights)} weights, dictionary dimension is {n}"
            )

    if "tau" in obj and "tau_grid" in obj:
        raise ConfigError("give either 'tau' or 'tau_grid', not both")
    if "tau" in obj:
        tau_grid = (_positive(obj, "tau", 0.0),)
    elif "tau_grid" in obj:
        grid = obj["tau_grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError("'tau_grid' must be a nonempty list")
        if any(not isinstance(t, (int, float)) or isinstance(t, bool) or not t > 0 for t in grid):
            raise ConfigError("'tau_grid' entries must be positive numbers")
        tau_grid = tuple(float(t) for t in grid)
    else:
        raise ConfigError("config needs 'tau' or 'tau_grid'")

    theta = _positive(obj, "theta", 1.0)

    if "K" in obj and "K_list" in obj:
        raise ConfigError("give either 'K' or 'K_list', not both")
    if "K" in obj:
        raw_levels = [obj["K"]]
    elif "K_list" in obj:
        raw_levels = obj["K_list"]
        if not isinstance(raw_levels, list) or not raw_levels:
            raise ConfigError("'K_list' must be a nonempty list")
    else:
        raw_levels = list(range(n + 1))
    for k in raw_levels:
        if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k <= n:
            raise ConfigError(f"sparsity levels must be integers in [0, {n}], got {k!r}")
    K_list = tuple(raw_levels)

    raw_quantities = obj.get("quantities", [q.value for q in Quantity])
    if not isinstance(raw_quantities, list) or not raw_quantities:
        raise ConfigError("'quantities' must be a nonempty list")
    try:
        quantities = tuple(Quantity(q) for q in raw_quantities)
    except ValueError as err:
        raise ConfigError(
            f"unknown quantity; expected one of {[q.value for q in Quantity]}: {err}"
        ) from err

    constants_samples = (
        _positive_int(obj, "constants_samples", 0) if "constants_samples" in obj else None
    )
    seed = obj.get("seed", 42)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"'seed' must be a nonnegative integer, got {seed!r}")
    return ExperimentConfig(
        dictionary=dictionary,
        fidelity=fidelity,
        data=data,
        theta=theta,
        tau_grid=tau_grid,
        K_list=K_list,
        quantities=quantities,
        n_samples=_positive_int(obj, "samples", 100_000),
        constants_samples=constants_samples,
        seed=seed,
        span_tol=span_tol,
        feas_tol=_positive(obj, "feas_tol", 1e-10),
        dist_tol=_positive(obj, "dist_tol", 1e-9),
        threads=_positive_int(obj, "threads", 1),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            obj = json.load(handle)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path} is not valid JSON: {err}") from err
    return config_from_dict(obj)
