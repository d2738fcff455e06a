"""Volume constants and analytic sandwich bounds for sparsity level sets.

The measure of the set of data vectors solvable with K atoms at tolerance
tau, inside a data-norm ball of radius theta, is squeezed between two
explicit polynomials in tau and theta.  Their shared leading constant is a
sum over the size-K span family of per-subspace cylinder constants: the
volume of the fidelity ball's shadow on the subspace's orthogonal
complement times the volume of the data ball's slice through the
subspace.  Pairwise overlaps between family members enter the lower bound
through correction constants indexed by intersection dimension.

All bounds here are rigorous only when theta is large enough relative to
tau; each report carries that validity flag, and Monte Carlo uncertainty
in the constants propagates into one-standard-error fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .norms import (
    EquivConstants,
    NormSpec,
    VolumeEstimate,
    ball_volume,
    compute_equiv_constants,
    euclid_ball_volume,
    hit_or_miss_volume,
    norm_eval,
)
from .solver import subspace_distance
from .streams import PURPOSE_PROJECTED, PURPOSE_SLICE, stream_id
from .subspaces import (
    DEFAULT_SPAN_TOL,
    Dictionary,
    SpanFamily,
    SubspaceBasis,
    enumerate_pairs,
    enumerate_spans,
    intersection_basis,
    spans_equal,
)

DEFAULT_VOLUME_SAMPLES = 200_000


def _alpha(n: int) -> float:
    """Euclidean unit-ball volume with the zero-dimensional convention 1."""
    return 1.0 if n == 0 else euclid_ball_volume(n)


def euclid_ck(K: int, n: int) -> float:
    """Fully Euclidean leading constant: alpha(K) * alpha(n - K) per span.

    For K in {0, n} one factor degenerates to the zero-dimensional
    convention and the constant is alpha(n), the ball volume itself.
    """
    if not 0 <= K <= n:
        raise ValueError(f"K must lie in [0, {n}], got {K}")
    return _alpha(K) * _alpha(n - K)


def projected_ball_volume(
    fidelity: NormSpec,
    basis: SubspaceBasis,
    n_samples: int = DEFAULT_VOLUME_SAMPLES,
    seed: int = 0,
    workers: int = 1,
    method: str = "auto",
    subid: int = 0,
) -> VolumeEstimate:
    """Volume of the fidelity unit ball's shadow on the orthogonal complement.

    Measured in (N - K) dimensions, where K is the subspace dimension; by
    convention the K = N shadow is the single point 0 with volume 1.
    Closed form for Euclidean fidelity (method "auto"); otherwise
    hit-or-miss Monte Carlo over the box |y_i| <= delta2, using the
    fidelity distance to the subspace as membership test.  method "mc"
    forces the Monte Carlo path even when a closed form exists.
    """
    if method not in ("auto", "mc"):
        raise ValueError(f"method must be 'auto' or 'mc', got {method!r}")
    n, k = basis.ambient_dim, basis.dim
    if k == n:
        return VolumeEstimate(1.0)
    if method == "auto":
        if fidelity.kind == "l2":
            return VolumeEstimate(euclid_ball_volume(n - k))
        if k == 0:
            return ball_volume(fidelity, n, n_samples, seed, workers)
    complement = basis.complement()
    delta2 = compute_equiv_constants(fidelity, fidelity, n).delta2

    if fidelity.kind == "l2":
        def member(points: np.ndarray) -> np.ndarray:
            # The shadow of the Euclidean ball is the Euclidean ball of V-perp.
            return np.linalg.norm(points, axis=1) <= 1.0
    elif k == 0:
        def member(points: np.ndarray) -> np.ndarray:
            return np.asarray(norm_eval(fidelity, points @ complement.matrix.T)) <= 1.0
    else:
        def member(points: np.ndarray) -> np.ndarray:
            ambient = points @ complement.matrix.T
            return np.array(
                [subspace_distance(fidelity, basis, row)[0] <= 1.0 for row in ambient]
            )

    return hit_or_miss_volume(
        member,
        np.full(n - k, delta2),
        n_samples,
        seed,
        stream_id(PURPOSE_PROJECTED, subid),
        workers,
    )


def slice_volume(
    data: NormSpec,
    basis: SubspaceBasis,
    n_samples: int = DEFAULT_VOLUME_SAMPLES,
    seed: int = 0,
    workers: int = 1,
    method: str = "auto",
    subid: int = 0,
) -> VolumeEstimate:
    """K-dimensional volume of the data unit ball's slice through the subspace.

    The K = 0 slice is the single point 0 with volume 1.  Closed form for
    Euclidean data norm and for full-dimensional slices of closed-form
    kinds; otherwise hit-or-miss Monte Carlo over |y_i| <= delta3 in
    subspace coordinates.
    """
    if method not in ("auto", "mc"):
        raise ValueError(f"method must be 'auto' or 'mc', got {method!r}")
    n, k = basis.ambient_dim, basis.dim
    if k == 0:
        return VolumeEstimate(1.0)
    if method == "auto":
        if data.kind == "l2":
            return VolumeEstimate(euclid_ball_volume(k))
        if k == n:
            return ball_volume(data, n, n_samples, seed, workers)
    delta3 = compute_equiv_constants(data, data, n).delta3

    def member(points: np.ndarray) -> np.ndarray:
        if data.kind == "l2":
            return np.linalg.norm(points, axis=1) <= 1.0
        return np.asarray(norm_eval(data, points @ basis.matrix.T)) <= 1.0

    return hit_or_miss_volume(
        member,
        np.full(k, delta3),
        n_samples,
        seed,
        stream_id(PURPOSE_SLICE, subid),
        workers,
    )


def _product(a: VolumeEstimate, b: VolumeEstimate) -> VolumeEstimate:
    err = abs(a.value) * b.std_err + abs(b.value) * a.std_err + a.std_err * b.std_err
    return VolumeEstimate(a.value * b.value, err)


def cylinder_constant(
    fidelity: NormSpec,
    data: NormSpec,
    basis: SubspaceBasis,
    n_samples: int = DEFAULT_VOLUME_SAMPLES,
    seed: int = 0,
    workers: int = 1,
    subid: int = 0,
) -> VolumeEstimate:
    """Leading constant of one subspace: shadow volume times slice volume."""
    shadow = projected_ball_volume(
        fidelity, basis, n_samples, seed, workers, subid=subid
    )
    inner = slice_volume(data, basis, n_samples, seed, workers, subid=subid)
    return _product(shadow, inner)


def overlap_constant(
    fidelity: NormSpec,
    data: NormSpec,
    first: SubspaceBasis,
    second: SubspaceBasis,
    n_samples: int = DEFAULT_VOLUME_SAMPLES,
    seed: int = 0,
    workers: int = 1,
    span_tol: float = DEFAULT_SPAN_TOL,
    subid: int = 0,
) -> VolumeEstimate:
    """Correction constant for one ordered pair of distinct equal-size spans.

    alpha(N - k) (2 delta2)^(N - k) times the data-ball slice volume of the
    k-dimensional intersection.  Symmetric in its two spans.
    """
    if first.ambient_dim != second.ambient_dim or first.dim != second.dim:
        raise ValueError("overlap constants need two equal-dimension spans")
    if spans_equal(first, second, span_tol):
        raise ValueError("overlap constants are defined for distinct spans only")
    n = first.ambient_dim
    meet = intersection_basis(first, second, span_tol)
    k = meet.dim
    delta2 = compute_equiv_constants(fidelity, data, n).delta2
    factor = _alpha(n - k) * (2.0 * delta2) ** (n - k)
    inner = (
        VolumeEstimate(1.0)
        if k == 0
        else slice_volume(data, meet, n_samples, seed, workers, subid=subid)
    )
    return VolumeEstimate(factor * inner.value, factor * inner.std_err)


def overlap_cap(
    n_dim: int, k: int, family_size: int, equiv: EquivConstants
) -> float:
    """Cheap certified upper bound on the summed overlap constants at level k.

    family_size * (family_size - 1) ordered pairs, each at most
    alpha(N - k) (2 delta2)^(N - k) alpha(k) delta3^k.
    """
    if not 0 <= k <= n_dim:
        raise ValueError(f"k must lie in [0, {n_dim}], got {k}")
    if family_size < 0:
        raise ValueError(f"family_size must be nonnegative, got {family_size}")
    pairs = family_size * (family_size - 1)
    return (
        pairs
        * _alpha(n_dim - k)
        * (2.0 * equiv.delta2) ** (n_dim - k)
        * _alpha(k)
        * equiv.delta3**k
    )


@dataclass(frozen=True)
class ConstantSet:
    """Everything the sandwich bounds need at one sparsity level K.

    c_total sums the per-member cylinder constants; q_totals[k] sums the
    overlap constants over ordered pairs meeting in dimension k, for k
    from k_min = max(0, 2K - N) to K - 1.  delta_hat widens the sandwich,
    delta_pair[k] widens the overlap corrections, and reports built from
    this set are valid when theta >= delta_gate * tau.  Standard errors are
    combined conservatively (linearly) everywhere.
    """

    K: int
    n_dim: int
    family: SpanFamily
    c_members: tuple[VolumeEstimate, ...]
    c_total: VolumeEstimate
    q_totals: dict[int, VolumeEstimate]
    delta_hat: float
    delta_pair: dict[int, float]
    delta_gate: float
    k_min: int
    equiv: EquivConstants
    euclidean: bool


def _delta_gate(K: int, n_dim: int, delta_hat: float, delta_pair: float) -> float:
    gate = delta_hat  # level 0
    for j in range(1, K + 1):
        step = delta_hat if j == n_dim else max(delta_hat, delta_pair)
        gate = max(gate, step)
    return gate


def assemble_constants(
    dictionary: Dictionary,
    fidelity: NormSpec,
    data: NormSpec,
    K: int,
    span_tol: float = DEFAULT_SPAN_TOL,
    n_samples: int = DEFAULT_VOLUME_SAMPLES,
    seed: int = 0,
    workers: int = 1,
) -> ConstantSet:
    """Compute the full constant set for sparsity level K.

    Euclidean fidelity and data norms short-circuit every volume to closed
    form and tighten the width factors to delta_hat = 1, delta_pair = 2;
    any other norm pair uses the general factors delta_hat = delta_bar and
    delta_pair = 3 delta_bar from the comparison constants.
    """
    n = dictionary.n_dim
    if not 0 <= K <= n:
        raise ValueError(f"K must lie in [0, {n}], got {K}")
    equiv = compute_equiv_constants(fidelity, data, n)
    euclidean = fidelity.kind == "l2" and data.kind == "l2"
    family = enumerate_spans(dictionary, K, span_tol)

    c_members = tuple(
        cylinder_constant(fidelity, data, member, n_samples, seed, workers, subid=i)
        for i, member in enumerate(family.members)
    )
    c_total = VolumeEstimate(
        sum(c.value for c in c_members), sum(c.std_err for c in c_members)
    )

    k_min = max(0, 2 * K - n)
    q_totals: dict[int, VolumeEstimate] = {}
    pair_cache: dict[tuple[int, int], VolumeEstimate] = {}
    for k in range(k_min, K):
        value = 0.0
        err = 0.0
        for i, j in enumerate_pairs(family, k, span_tol):
            key = (min(i, j), max(i, j))
            if key not in pair_cache:
                pair_cache[key] = overlap_constant(
                    fidelity,
                    data,
                    family.members[key[0]],
                    family.members[key[1]],
                    n_samples,
                    seed,
                    workers,
                    span_tol,
                    subid=len(pair_cache),
                )
            value += pair_cache[key].value
            err += pair_cache[key].std_err
        q_totals[k] = VolumeEstimate(value, err)

    delta_hat = 1.0 if euclidean else equiv.delta_bar
    pair_factor = 2.0 if euclidean else 3.0 * equiv.delta_bar
    return ConstantSet(
        K=K,
        n_dim=n,
        family=family,
        c_members=c_members,
        c_total=c_total,
        q_totals=q_totals,
        delta_hat=delta_hat,
        delta_pair={k: pair_factor for k in q_totals},
        delta_gate=_delta_gate(K, n, delta_hat, pair_factor),
        k_min=k_min,
        equiv=equiv,
        euclidean=euclidean,
    )


def overlap_budget(
    constants: ConstantSet, tau: float, theta: float
) -> tuple[float, float]:
    """Total overlap correction at (tau, theta), with its standard error.

    Zero by definition at the extreme levels K = 0 and K = N; otherwise
    sum_k Q_k (tau/theta)^(N-k) (1 + delta_pair_k tau/theta)^k, the
    normalized overspill of pairwise tube intersections.
    """
    if not (tau > 0.0 and theta > 0.0):
        raise ValueError("tau and theta must be positive")
    if constants.K in (0, constants.n_dim):
        return 0.0, 0.0
    r = tau / theta
    total = 0.0
    err = 0.0
    for k, q in constants.q_totals.items():
        factor = r ** (constants.n_dim - k) * (1.0 + constants.delta_pair[k] * r) ** k
        total += q.value * factor
        err += q.std_err * factor
    return total, err


def constants_to_csv(sets: list[ConstantSet] | tuple[ConstantSet, ...]) -> str:
    """Deterministic CSV rendering of constant sets, one row per level K.

    ``ci`` is the 95% half width (1.96 standard errors) on C_K; the
    trailing columns are the matching half widths for the Q columns.  The
    Q columns cover every intersection dimension up to N - 1; levels where
    a dimension cannot occur leave its cells empty.
    """
    if not sets:
        raise ValueError("need at least one constant set")
    n = sets[0].n_dim
    if any(c.n_dim != n for c in sets):
        raise ValueError("constant sets mix ambient dimensions")
    z95 = 1.959963984540054
    header = ["K", "C_K", "kK"]
    header += [f"Q_{k}" for k in range(n)]
    header += ["deltaHat", "Delta_K", "ci", "deltaPrime"]
    header += [f"Q_{k}_ci" for k in range(n)]
    lines = [",".join(header)]
    for c in sorted(sets, key=lambda s: s.K):
        prime = next(iter(c.delta_pair.values()), None)
        cells = [str(c.K), repr(c.c_total.value), str(c.k_min)]
        qs = [c.q_totals.get(k) for k in range(n)]
        cells += ["" if q is None else repr(q.value) for q in qs]
        cells += [
            repr(c.delta_hat),
            repr(c.delta_gate),
            repr(z95 * c.c_total.std_err),
            "" if prime is None else repr(prime),
        ]
        cells += ["" if q is None else repr(z95 * q.std_err) for q in qs]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


class Quantity(str, Enum):
    """What a bound or estimate refers to.

    Measures are Lebesgue volumes inside the data ball of radius theta;
    probabilities divide by that ball's volume; expect is the mean
    smallest-support value under the uniform distribution on the ball.
    """

    MEASURE_LEQ = "measure_leq"
    MEASURE_EQ = "measure_eq"
    PROB_LEQ = "prob_leq"
    PROB_EQ = "prob_eq"
    EXPECT = "expect"


@dataclass(frozen=True)
class BoundReport:
    """Two-sided analytic bound for one quantity at one (tau, theta).

    ``valid`` records whether theta clears the validity gate; when it does
    not, both bounds are None.  ``eps_terms`` itemizes the correction
    terms entering the bounds (already scaled to the quantity's units).
    Lower bounds may be negative and are reported unclamped.
    """

    quantity: Quantity
    K: int | None
    tau: float
    theta: float
    lower: float | None
    upper: float | None
    lower_std_err: float = 0.0
    upper_std_err: float = 0.0
    valid: bool = True
    eps_terms: dict[str, float] = field(default_factory=dict)


def _measure_leq_parts(
    constants: ConstantSet, tau: float, theta: float
) -> tuple[float, float, float, float, float, float]:
    """(lower, upper, lower_err, upper_err, eps0_scaled, eps0_err_scaled)."""
    n, K = constants.n_dim, constants.K
    eps0, eps0_err = overlap_budget(constants, tau, theta)
    scale = theta**n
    down = constants.c_total.value * tau ** (n - K) * (theta - constants.delta_hat * tau) ** K
    up = constants.c_total.value * tau ** (n - K) * (theta + constants.delta_hat * tau) ** K
    down_err = constants.c_total.std_err * tau ** (n - K) * abs(
        theta - constants.delta_hat * tau
    ) ** K + scale * eps0_err
    up_err = constants.c_total.std_err * tau ** (n - K) * (theta + constants.delta_hat * tau) ** K
    return down - scale * eps0, up, down_err, up_err, scale * eps0, scale * eps0_err


def bound_report(
    quantity: Quantity | str,
    tau: float,
    theta: float,
    constants: ConstantSet | None = None,
    constants_prev: ConstantSet | None = None,
    all_constants: tuple[ConstantSet, ...] | None = None,
    data_ball_vol: VolumeEstimate | None = None,
) -> BoundReport:
    """Analytic sandwich for one quantity.

    Required inputs by quantity:
      measure_leq:            constants (level K)
      measure_eq:             constants, plus constants_prev (level K - 1) when K >= 1
      prob_leq / prob_eq:     as above, plus data_ball_vol
      expect:                 all_constants (levels 0 .. N - 1, in order) and
                              data_ball_vol; constants is ignored

    Bounds are None (with valid=False) when theta < delta_gate * tau.
    """
    quantity = Quantity(quantity)
    if not (tau > 0.0 and theta > 0.0):
        raise ValueError("tau and theta must be positive")

    if quantity is Quantity.EXPECT:
        if all_constants is None or data_ball_vol is None:
            raise ValueError("expect bounds need all_constants and data_ball_vol")
        n = all_constants[0].n_dim
        if tuple(c.K for c in all_constants) != tuple(range(n)):
            raise ValueError("all_constants must cover K = 0 .. N - 1 in order")
        gate = max(c.delta_gate for c in all_constants)
        if theta < gate * tau:
            return BoundReport(quantity, None, tau, theta, None, None, valid=False)
        lower = float(n)
        upper = float(n)
        lower_err = 0.0
        upper_err = 0.0
        for c in all_constants:
            sub = bound_report(
                Quantity.PROB_LEQ, tau, theta, constants=c, data_ball_vol=data_ball_vol
            )
            upper -= sub.lower
            lower -= sub.upper
            upper_err += sub.lower_std_err
            lower_err += sub.upper_std_err
        return BoundReport(
            quantity, None, tau, theta, lower, upper, lower_err, upper_err, True
        )

    if constants is None:
        raise ValueError(f"{quantity.value} bounds need a constant set")
    n, K = constants.n_dim, constants.K

    if quantity in (Quantity.MEASURE_EQ, Quantity.PROB_EQ):
        if K >= 1 and constants_prev is None:
            raise ValueError("level-K == bounds need the level K - 1 constant set")
        if constants_prev is not None and constants_prev.K != K - 1:
            raise ValueError(
                f"constants_prev is for level {constants_prev.K}, expected {K - 1}"
            )

    gate = constants.delta_gate
    if constants_prev is not None and quantity in (Quantity.MEASURE_EQ, Quantity.PROB_EQ):
        gate = max(gate, constants_prev.delta_gate)
    if theta < gate * tau:
        return BoundReport(quantity, K, tau, theta, None, None, valid=False)

    lower, upper, lower_err, upper_err, eps0s, eps0s_err = _measure_leq_parts(
        constants, tau, theta
    )
    eps_terms = {"overlap": eps0s}

    if quantity in (Quantity.MEASURE_EQ, Quantity.PROB_EQ) and K >= 1:
        prev = constants_prev
        prev_down = (
            prev.c_total.value
            * tau ** (n - K + 1)
            * (theta - prev.delta_hat * tau) ** (K - 1)
        )
        prev_up = (
            prev.c_total.value
            * tau ** (n - K + 1)
            * (theta + prev.delta_hat * tau) ** (K - 1)
        )
        prev_eps0, prev_eps0_err = overlap_budget(prev, tau, theta)
        scale = theta**n
        # Remove at least the certified part of the previous level, and at
        # most its certified ceiling; the second correction may tighten the
        # upper bound below the plain level-K one and is not clamped.
        lower -= prev_up
        upper += scale * prev_eps0 - prev_down
        lower_err += (
            prev.c_total.std_err
            * tau ** (n - K + 1)
            * (theta + prev.delta_hat * tau) ** (K - 1)
        )
        upper_err += scale * prev_eps0_err + prev.c_total.std_err * tau ** (
            n - K + 1
        ) * abs(theta - prev.delta_hat * tau) ** (K - 1)
        eps_terms["previous_ceiling"] = prev_up
        eps_terms["previous_floor"] = prev_down
        eps_terms["previous_overlap"] = scale * prev_eps0

    if quantity in (Quantity.MEASURE_LEQ, Quantity.MEASURE_EQ):
        return BoundReport(
            quantity, K, tau, theta, lower, upper, lower_err, upper_err, True, eps_terms
        )

    if data_ball_vol is None:
        raise ValueError(f"{quantity.value} bounds need data_ball_vol")
    denom = data_ball_vol.value * theta**n
    if denom <= 0.0:
        raise ValueError("data ball volume must be positive")
    rel_vol = data_ball_vol.std_err / data_ball_vol.value
    p_lower = lower / denom
    p_upper = upper / denom
    p_lower_err = lower_err / denom + abs(p_lower) * rel_vol
    p_upper_err = upper_err / denom + abs(p_upper) * rel_vol
    eps_terms = {key: value / denom for key, value in eps_terms.items()}
    return BoundReport(
        quantity, K, tau, theta, p_lower, p_upper, p_lower_err, p_upper_err, True, eps_terms
    )
