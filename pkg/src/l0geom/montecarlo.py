"""Monte Carlo estimation and validation of the analytic bounds.

One batch of uniform draws from the data ball serves every cell of a
validation run.  Each sample's distance profile (nearest size-k span for
every k) is computed once; after that, any tolerance tau prices the whole
batch by thresholding, so probabilities across K, tau, and all five
quantities share common random numbers and stay mutually consistent:
frequencies sum to one over K, are monotone in K, and the mean value
matches the expectation identity by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bounds import (
    ConstantSet,
    Quantity,
    assemble_constants,
    bound_report,
)
from .norms import NormSpec, VolumeEstimate, ball_volume
from .sampling import sample_levelset_batch
from .solver import (
    DEFAULT_DIST_TOL,
    DEFAULT_FEAS_TOL,
    L0Solver,
    member_distances,
    values_from_profiles,
)
from .subspaces import DEFAULT_SPAN_TOL, Dictionary, SubspaceBasis

Z95 = 1.959963984540054


def wilson_half_width(p_hat: float, n: int) -> float:
    """Half width of the 95% Wilson score interval for a binomial rate."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    z2 = Z95 * Z95
    return (
        Z95
        * math.sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n))
        / (1.0 + z2 / n)
    )


@dataclass(frozen=True)
class MCEstimate:
    """One Monte Carlo estimate with a 95% confidence half width."""

    quantity: Quantity
    K: int | None
    tau: float
    theta: float
    mean: float
    half_width_95: float
    n_samples: int
    seed: int

    @property
    def std_err(self) -> float:
        return self.half_width_95 / Z95


class LevelSetExperiment:
    """Uniform data-ball samples plus their distance profiles, shared by all cells.

    Sampling and profile computation happen lazily on first use and are
    reused afterwards; ``workers`` splits the chunked work without changing
    any result.
    """

    def __init__(
        self,
        dictionary: Dictionary,
        fidelity: NormSpec,
        data: NormSpec,
        theta: float,
        n_samples: int,
        seed: int,
        span_tol: float = DEFAULT_SPAN_TOL,
        feas_tol: float = DEFAULT_FEAS_TOL,
        dist_tol: float = DEFAULT_DIST_TOL,
        workers: int = 1,
    ) -> None:
        if n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {n_samples}")
        if not theta > 0.0:
            raise ValueError(f"theta must be > 0, got {theta}")
        self.dictionary = dictionary
        self.fidelity = fidelity
        self.data = data
        self.theta = float(theta)
        self.n_samples = int(n_samples)
        self.seed = int(seed)
        self.feas_tol = feas_tol
        self.dist_tol = dist_tol
        self.workers = workers
        self.solver = L0Solver(dictionary, fidelity, span_tol, feas_tol, dist_tol)
        self._points: np.ndarray | None = None
        self._profiles: np.ndarray | None = None

    @property
    def points(self) -> np.ndarray:
        if self._points is None:
            self._points = sample_levelset_batch(
                self.data,
                self.theta,
                self.dictionary.n_dim,
                self.n_samples,
                self.seed,
                self.workers,
            )
        return self._points

    @property
    def profiles(self) -> np.ndarray:
        if self._profiles is None:
            self._profiles = self.solver.distance_profiles(self.points, self.workers)
        return self._profiles

    def values(self, tau: float) -> np.ndarray:
        if not tau > 0.0:
            raise ValueError(f"tau must be > 0, got {tau}")
        return values_from_profiles(self.profiles, tau, self.feas_tol)

    def data_ball_volume(self) -> VolumeEstimate:
        return ball_volume(
            self.data, self.dictionary.n_dim, self.n_samples, self.seed, self.workers
        )

    def _check_level(self, K: int) -> None:
        if not 0 <= K <= self.dictionary.n_dim:
            raise ValueError(f"K must lie in [0, {self.dictionary.n_dim}], got {K}")

    def prob(self, K: int, tau: float, mode: str = "leq") -> MCEstimate:
        """Empirical frequency of value <= K (mode "leq") or == K (mode "eq")."""
        self._check_level(K)
        vals = self.values(tau)
        if mode == "leq":
            hits = int(np.count_nonzero(vals <= K))
            quantity = Quantity.PROB_LEQ
        elif mode == "eq":
            hits = int(np.count_nonzero(vals == K))
            quantity = Quantity.PROB_EQ
        else:
            raise ValueError(f"mode must be 'leq' or 'eq', got {mode!r}")
        p_hat = hits / self.n_samples
        return MCEstimate(
            quantity,
            K,
            tau,
            self.theta,
            p_hat,
            wilson_half_width(p_hat, self.n_samples),
            self.n_samples,
            self.seed,
        )

    def expect(self, tau: float) -> MCEstimate:
        vals = self.values(tau)
        spread = float(vals.std(ddof=1)) if self.n_samples > 1 else 0.0
        return MCEstimate(
            Quantity.EXPECT,
            None,
            tau,
            self.theta,
            float(vals.mean()),
            Z95 * spread / math.sqrt(self.n_samples),
            self.n_samples,
            self.seed,
        )

    def measure(
        self,
        K: int,
        tau: float,
        mode: str = "leq",
        data_ball_vol: VolumeEstimate | None = None,
    ) -> MCEstimate:
        """Volume estimate: frequency rescaled by the sampling ball's volume."""
        p = self.prob(K, tau, mode)
        vol = data_ball_vol if data_ball_vol is not None else self.data_ball_volume()
        scale = self.theta**self.dictionary.n_dim
        quantity = Quantity.MEASURE_LEQ if mode == "leq" else Quantity.MEASURE_EQ
        return MCEstimate(
            quantity,
            K,
            tau,
            self.theta,
            p.mean * scale * vol.value,
            scale * (p.half_width_95 * vol.value + Z95 * vol.std_err * p.mean),
            self.n_samples,
            self.seed,
        )

    def tube_overlap_measure(
        self,
        first: SubspaceBasis,
        second: SubspaceBasis,
        tau: float,
        data_ball_vol: VolumeEstimate | None = None,
    ) -> MCEstimate:
        """Measure of the set within tau of both spans, inside the data ball."""
        if not tau > 0.0:
            raise ValueError(f"tau must be > 0, got {tau}")
        thresh = tau * (1.0 + self.feas_tol)
        near_first = member_distances(self.fidelity, first, self.points, self.dist_tol) <= thresh
        near_second = member_distances(self.fidelity, second, self.points, self.dist_tol) <= thresh
        p_hat = int(np.count_nonzero(near_first & near_second)) / self.n_samples
        vol = data_ball_vol if data_ball_vol is not None else self.data_ball_volume()
        scale = self.theta**self.dictionary.n_dim
        return MCEstimate(
            Quantity.MEASURE_LEQ,
            None,
            tau,
            self.theta,
            p_hat * scale * vol.value,
            scale
            * (
                wilson_half_width(p_hat, self.n_samples) * vol.value
                + Z95 * vol.std_err * p_hat
            ),
            self.n_samples,
            self.seed,
        )


def estimate_prob(
    dictionary: Dictionary,
    fidelity: NormSpec,
    data: NormSpec,
    K: int,
    tau: float,
    theta: float,
    n_samples: int,
    seed: int,
    mode: str = "leq",
    span_tol: float = DEFAULT_SPAN_TOL,
    feas_tol: float = DEFAULT_FEAS_TOL,
    dist_tol: float = DEFAULT_DIST_TOL,
    workers: int = 1,
) -> MCEstimate:
    return LevelSetExperiment(
        dictionary, fidelity, data, theta, n_samples, seed, span_tol, feas_tol, dist_tol, workers
    ).prob(K, tau, mode)


def estimate_expect(
    dictionary: Dictionary,
    fidelity: NormSpec,
    data: NormSpec,
    tau: float,
    theta: float,
    n_samples: int,
    seed: int,
    span_tol: float = DEFAULT_SPAN_TOL,
    feas_tol: float = DEFAULT_FEAS_TOL,
    dist_tol: float = DEFAULT_DIST_TOL,
    workers: int = 1,
) -> MCEstimate:
    return LevelSetExperiment(
        dictionary, fidelity, data, theta, n_samples, seed, span_tol, feas_tol, dist_tol, workers
    ).expect(tau)


def estimate_measure(
    dictionary: Dictionary,
    fidelity: NormSpec,
    data: NormSpec,
    K: int,
    tau: float,
    theta: float,
    n_samples: int,
    seed: int,
    mode: str = "leq",
    span_tol: float = DEFAULT_SPAN_TOL,
    feas_tol: float = DEFAULT_FEAS_TOL,
    dist_tol: float = DEFAULT_DIST_TOL,
    workers: int = 1,
) -> MCEstimate:
    return LevelSetExperiment(
        dictionary, fidelity, data, theta, n_samples, seed, span_tol, feas_tol, dist_tol, workers
    ).measure(K, tau, mode)


@dataclass(frozen=True)
class FitResult:
    """Through-origin least squares fit y ~ slope * x^exponent."""

    slope: float
    r_squared: float


def fit_asymptote(x: Sequence[float], y: Sequence[float], exponent: int) -> FitResult:
    """Fit y against x**exponent through the origin.

    r_squared uses the uncentered total sum of squares, the natural choice
    for a through-origin model.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError(f"x and y must be equal-length vectors, got {xs.shape}, {ys.shape}")
    if xs.size < 3:
        raise ValueError(f"need at least 3 points, got {xs.size}")
    if exponent < 1:
        raise ValueError(f"exponent must be >= 1, got {exponent}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("x and y must be finite")
    basis = xs**exponent
    denom = float(basis @ basis)
    if denom <= 0.0:
        raise ValueError("x**exponent has no energy; cannot fit through the origin")
    slope = float(basis @ ys) / denom
    ss_res = float(np.sum((ys - slope * basis) ** 2))
    ss_tot = float(ys @ ys)
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(slope=slope, r_squared=r_squared)


@dataclass(frozen=True)
class ValidationRow:
    """One cell of the pass/fail matrix.

    ``passed`` is None when the cell sits outside the bounds' validity
    region; such cells are flagged, never silently dropped.  ``ratio``
    compares the estimate with the leading term of the bounds, where that
    term is defined.
    """

    quantity: Quantity
    K: int | None
    tau: float
    theta: float
    estimate: float
    half_width_95: float
    lower: float | None
    upper: float | None
    lower_std_err: float
    upper_std_err: float
    ratio: float | None
    valid: bool
    passed: bool | None


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ValidationRow, ...]
    theta: float
    n_samples: int
    seed: int

    @property
    def n_pass(self) -> int:
        return sum(1 for r in self.rows if r.passed is True)

    @property
    def n_fail(self) -> int:
        return sum(1 for r in self.rows if r.passed is False)

    @property
    def n_invalid(self) -> int:
        return sum(1 for r in self.rows if r.passed is None)

    @property
    def all_pass(self) -> bool:
        return self.n_fail == 0


def _row_from(
    est: MCEstimate, bound, leading: float | None, sigma_rule: float = 3.0
) -> ValidationRow:
    ratio = None
    if leading is not None and leading > 0.0:
        ratio = est.mean / leading
    if not bound.valid:
        return ValidationRow(
            est.quantity, est.K, est.tau, est.theta, est.mean, est.half_width_95,
            None, None, 0.0, 0.0, ratio, False, None,
        )
    low_slack = sigma_rule * (est.std_err + bound.lower_std_err)
    up_slack = sigma_rule * (est.std_err + bound.upper_std_err)
    ok = (bound.lower - low_slack <= est.mean) and (est.mean <= bound.upper + up_slack)
    return ValidationRow(
        est.quantity, est.K, est.tau, est.theta, est.mean, est.half_width_95,
        bound.lower, bound.upper, bound.lower_std_err, bound.upper_std_err,
        ratio, True, ok,
    )


def validate_bounds(
    dictionary: Dictionary,
    fidelity: NormSpec,
    data: NormSpec,
    tau_grid: Sequence[float],
    theta: float,
    K_list: Sequence[int],
    quantities: Iterable[Quantity | str] = tuple(Quantity),
    n_samples: int = 100_000,
    seed: int = 42,
    span_tol: float = DEFAULT_SPAN_TOL,
    feas_tol: float = DEFAULT_FEAS_TOL,
    dist_tol: float = DEFAULT_DIST_TOL,
    constants_samples: int | None = None,
    workers: int = 1,
) -> ValidationReport:
    """Cross every requested quantity, level, and tau against its bounds.

    A cell passes when the estimate sits within the analytic sandwich with
    3 standard errors of slack, pooling the estimate's uncertainty with
    the bound's own Monte Carlo uncertainty.  Cells outside the validity
    region are flagged with passed = None.
    """
    quantities = tuple(Quantity(q) for q in quantities)
    tau_grid = tuple(float(t) for t in tau_grid)
    K_list = tuple(int(k) for k in K_list)
    if not tau_grid or any(t <= 0 for t in tau_grid):
        raise ValueError("tau_grid must be nonempty and positive")
    n = dictionary.n_dim
    for k in K_list:
        if not 0 <= k <= n:
            raise ValueError(f"K must lie in [0, {n}], got {k}")

    levels = set()
    for q in quantities:
        if q is Quantity.EXPECT:
            levels.update(range(n))
        else:
            levels.update(K_list)
            if q in (Quantity.MEASURE_EQ, Quantity.PROB_EQ):
                levels.update(k - 1 for k in K_list if k >= 1)
    vol_samples = constants_samples if constants_samples is not None else n_samples
    consts: dict[int, ConstantSet] = {
        k: assemble_constants(
            dictionary, fidelity, data, k, span_tol, vol_samples, seed, workers
        )
        for k in sorted(levels)
    }
    data_ball_vol = ball_volume(data, n, vol_samples, seed, workers)
    experiment = LevelSetExperiment(
        dictionary, fidelity, data, theta, n_samples, seed,
        span_tol, feas_tol, dist_tol, workers,
    )

    def leading_for(q: Quantity, K: int, tau: float) -> float | None:
        c = consts[K].c_total.value
        if q in (Quantity.MEASURE_LEQ, Quantity.MEASURE_EQ):
            return c * tau ** (n - K) * theta**K
        if q in (Quantity.PROB_LEQ, Quantity.PROB_EQ):
            return c / data_ball_vol.value * (tau / theta) ** (n - K)
        return None

    rows: list[ValidationRow] = []
    for q in quantities:
        if q is Quantity.EXPECT:
            all_consts = tuple(consts[k] for k in range(n))
            for tau in tau_grid:
                est = experiment.expect(tau)
                bound = bound_report(
                    q, tau, theta, all_constants=all_consts, data_ball_vol=data_ball_vol
                )
                rows.append(_row_from(est, bound, None))
            continue
        for K in K_list:
            prev = consts.get(K - 1) if K >= 1 else None
            for tau in tau_grid:
                if q is Quantity.MEASURE_LEQ:
                    est = experiment.measure(K, tau, "leq", data_ball_vol)
                    bound = bound_report(q, tau, theta, consts[K])
                elif q is Quantity.MEASURE_EQ:
                    est = experiment.measure(K, tau, "eq", data_ball_vol)
                    bound = bound_report(q, tau, theta, consts[K], constants_prev=prev)
                elif q is Quantity.PROB_LEQ:
                    est = experiment.prob(K, tau, "leq")
                    bound = bound_report(
                        q, tau, theta, consts[K], data_ball_vol=data_ball_vol
                    )
                else:
                    est = experiment.prob(K, tau, "eq")
                    bound = bound_report(
                        q, tau, theta, consts[K], constants_prev=prev,
                        data_ball_vol=data_ball_vol,
                    )
                rows.append(_row_from(est, bound, leading_for(q, K, tau)))
    return ValidationReport(
        rows=tuple(rows), theta=float(theta), n_samples=int(n_samples), seed=int(seed)
    )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Quantity):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_to_csv(report: ValidationReport) -> str:
    """Deterministic CSV rendering of a validation report."""
    header = (
        "quantity,K,tau,theta,estimate,ci,lower,upper,lower_err,upper_err,"
        "ratio,valid,pass"
    )
    lines = [header]
    for r in report.rows:
        lines.append(
            ",".join(
                _cell(v)
                for v in (
                    r.quantity, r.K, r.tau, r.theta, r.estimate, r.half_width_95,
                    r.lower, r.upper, r.lower_std_err, r.upper_std_err,
                    r.ratio, r.valid, r.passed,
                )
            )
        )
    return "\n".join(lines) + "\n"
