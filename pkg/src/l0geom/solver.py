"""Exact smallest-support approximation by exhaustive span search.

For data d, tolerance tau, and fidelity norm f, the solver finds the
smallest number of dictionary atoms whose combination lands within tau of
d, searching support sizes upward.  Feasibility at size k only depends on
the span of the chosen atoms, so the search runs over the distinct spans
of size-k subsets instead of the subsets themselves; rank-deficient
subsets never help and are skipped.  The attained value never exceeds the
ambient dimension N, because the dictionary spans R^N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import simplex
from .norms import NormSpec, norm_eval
from .streams import map_chunks
from .subspaces import (
    DEFAULT_SPAN_TOL,
    Dictionary,
    SpanFamily,
    SubspaceBasis,
    enumerate_spans,
)

DEFAULT_FEAS_TOL = 1e-10
DEFAULT_DIST_TOL = 1e-9

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_minimize(fn, lo: float, hi: float, tol: float) -> float:
    """Argmin of a unimodal function on [lo, hi] to argument tolerance tol."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _wlp_projection(
    spec: NormSpec, basis: np.ndarray, d: np.ndarray, dist_tol: float
) -> tuple[np.ndarray, float]:
    """Minimize the wlp distance from d to the column span of ``basis``.

    p = 1 reduces exactly to an l1 program after scaling each row by its
    weight.  For p > 1 the objective is smooth and convex, so cyclic
    coordinate descent with golden-section line searches converges to the
    global minimum.
    """
    w = np.asarray(spec.weights, dtype=float)
    if spec.p == 1.0:
        return simplex.l1_projection(basis * w[:, None], d * w)
    k = basis.shape[1]
    y = basis.T @ d  # Euclidean projection as warm start

    def value(coeffs: np.ndarray) -> float:
        return float(norm_eval(spec, d - basis @ coeffs))

    best = value(y)
    for _ in range(500):
        previous = best
        for i in range(k):
            def along(t: float, i: int = i) -> float:
                trial = y.copy()
                trial[i] = t
                return value(trial)

            # Expand around the current coordinate until a bracket appears.
            center = y[i]
            half = 1.0
            for _ in range(80):
                if along(center - half) >= best and along(center + half) >= best:
                    break
                half *= 2.0
            y[i] = _golden_minimize(along, center - half, center + half, dist_tol)
            best = value(y)
        if previous - best <= dist_tol * 1e-3:
            break
    return y, best


def subspace_distance(
    fidelity: NormSpec,
    basis: SubspaceBasis,
    d: np.ndarray,
    dist_tol: float = DEFAULT_DIST_TOL,
) -> tuple[float, np.ndarray]:
    """Distance from d to the subspace in the fidelity norm, with a closest point.

    Euclidean distances are orthogonal projections; l1 and linf are solved
    as small linear programs over the basis coefficients; wlp falls back to
    coordinate descent (exact scaled program when p = 1).
    """
    d = np.asarray(d, dtype=float)
    if d.shape != (basis.ambient_dim,):
        raise ValueError(f"data has shape {d.shape}, ambient dimension is {basis.ambient_dim}")
    if basis.dim == 0:
        return float(norm_eval(fidelity, d)), np.zeros_like(d)
    bm = basis.matrix
    if fidelity.kind == "l2":
        v = bm @ (bm.T @ d)
        return float(np.linalg.norm(d - v)), v
    try:
        if fidelity.kind == "l1":
            coeffs, dist = simplex.l1_projection(bm, d)
        elif fidelity.kind == "linf":
            coeffs, dist = simplex.linf_projection(bm, d)
        else:
            coeffs, dist = _wlp_projection(fidelity, bm, d, dist_tol)
    except simplex.SimplexError as err:
        raise simplex.SimplexError(
            f"projection program failed for basis {basis.provenance or basis.matrix.shape}: {err}"
        ) from err
    return float(dist), bm @ coeffs


def member_distances(
    fidelity: NormSpec,
    basis: SubspaceBasis,
    rows: np.ndarray,
    dist_tol: float = DEFAULT_DIST_TOL,
) -> np.ndarray:
    """Fidelity distance from each row to the subspace, vectorized when possible.

    Euclidean distances come from one pair of matrix products; other norms
    fall back to the per-row projection programs.
    """
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != basis.ambient_dim:
        raise ValueError(f"expected (n, {basis.ambient_dim}) rows, got {rows.shape}")
    if basis.dim == 0:
        return np.asarray(norm_eval(fidelity, rows))
    if fidelity.kind == "l2":
        proj = rows @ basis.matrix
        gap = np.einsum("ij,ij->i", rows, rows) - np.einsum("ij,ij->i", proj, proj)
        return np.sqrt(np.maximum(gap, 0.0))
    return np.array(
        [subspace_distance(fidelity, basis, row, dist_tol)[0] for row in rows]
    )


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one smallest-support solve.

    ``support`` is the lexicographically smallest atom subset attaining the
    optimum, ``coefficients`` its weights, and ``residual`` the fidelity
    norm of the approximation error (at most tau up to the feasibility
    slack).
    """

    value: int
    support: tuple[int, ...]
    coefficients: np.ndarray
    residual: float


class L0Solver:
    """Shared search state for many solves against one dictionary and norm.

    Span families are built once per size and reused; the solver itself is
    read-only after construction, so distinct data vectors may be solved
    concurrently.
    """

    def __init__(
        self,
        dictionary: Dictionary,
        fidelity: NormSpec,
        span_tol: float = DEFAULT_SPAN_TOL,
        feas_tol: float = DEFAULT_FEAS_TOL,
        dist_tol: float = DEFAULT_DIST_TOL,
    ) -> None:
        if feas_tol < 0 or dist_tol <= 0 or span_tol <= 0:
            raise ValueError("tolerances must be positive (feas_tol may be zero)")
        self.dictionary = dictionary
        self.fidelity = fidelity
        self.span_tol = span_tol
        self.feas_tol = feas_tol
        self.dist_tol = dist_tol
        self._families: dict[int, SpanFamily] = {}

    def family(self, k: int) -> SpanFamily:
        if k not in self._families:
            self._families[k] = enumerate_spans(self.dictionary, k, self.span_tol)
        return self._families[k]

    def _check_data(self, d: np.ndarray, tau: float) -> np.ndarray:
        d = np.asarray(d, dtype=float)
        if d.shape != (self.dictionary.n_dim,):
            raise ValueError(
                f"data has shape {d.shape}, expected ({self.dictionary.n_dim},)"
            )
        if not tau > 0.0:
            raise ValueError(f"tau must be > 0, got {tau}")
        return d

    def solve(self, d: np.ndarray, tau: float) -> SolveResult:
        d = self._check_data(d, tau)
        thresh = tau * (1.0 + self.feas_tol)
        for k in range(self.dictionary.n_dim + 1):
            winner: SubspaceBasis | None = None
            winner_point: np.ndarray | None = None
            for member in self.family(k).members:
                dist, point = subspace_distance(self.fidelity, member, d, self.dist_tol)
                if dist <= thresh and (winner is None or member.provenance < winner.provenance):
                    winner, winner_point = member, point
            if winner is not None:
                atoms = self.dictionary.subset(winner.provenance)
                coeffs = (
                    np.linalg.lstsq(atoms, winner_point, rcond=None)[0]
                    if k
                    else np.zeros(0)
                )
                residual = float(norm_eval(self.fidelity, atoms @ coeffs - d)) if k else float(
                    norm_eval(self.fidelity, d)
                )
                return SolveResult(
                    value=k,
                    support=winner.provenance,
                    coefficients=coeffs,
                    residual=residual,
                )
        raise AssertionError("unreachable: the full-space span is always feasible")

    def value(self, d: np.ndarray, tau: float) -> int:
        return self.solve(d, tau).value

    def value_leq(self, d: np.ndarray, tau: float, K: int) -> bool:
        """True when some K atoms approximate d within tau.

        Only the size-K spans need checking: every smaller feasible span is
        contained in a size-K one, which is then feasible too.
        """
        d = self._check_data(d, tau)
        if not 0 <= K <= self.dictionary.n_dim:
            raise ValueError(f"K must lie in [0, {self.dictionary.n_dim}], got {K}")
        thresh = tau * (1.0 + self.feas_tol)
        return any(
            subspace_distance(self.fidelity, member, d, self.dist_tol)[0] <= thresh
            for member in self.family(K).members
        )

    def value_eq(self, d: np.ndarray, tau: float, K: int) -> bool:
        if K == 0:
            return self.value_leq(d, tau, 0)
        return self.value_leq(d, tau, K) and not self.value_leq(d, tau, K - 1)

    def distance_profiles(self, data: np.ndarray, workers: int = 1) -> np.ndarray:
        """(n, N + 1) matrix of distances to the nearest size-k span, k = 0..N.

        Row i column k is the fidelity distance from data[i] to the closest
        member of the size-k family; column N is identically zero.  The
        value of a solve is the first column whose entry is within the
        feasibility threshold, so one profile matrix serves every tau.
        """
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[1] != self.dictionary.n_dim:
            raise ValueError(f"expected (n, {self.dictionary.n_dim}) data, got {data.shape}")
        n_dim = self.dictionary.n_dim
        families = [self.family(k) for k in range(n_dim + 1)]
        block = 4096
        n_blocks = max(1, -(-data.shape[0] // block))

        def profile_block(b: int) -> np.ndarray:
            rows = data[b * block : (b + 1) * block]
            out = np.empty((rows.shape[0], n_dim + 1))
            out[:, 0] = np.asarray(norm_eval(self.fidelity, rows))
            out[:, n_dim] = 0.0
            for k in range(1, n_dim):
                best = np.full(rows.shape[0], np.inf)
                for member in families[k].members:
                    dists = member_distances(self.fidelity, member, rows, self.dist_tol)
                    np.minimum(best, dists, out=best)
                out[:, k] = best
            return out

        return np.vstack(map_chunks(profile_block, n_blocks, workers))


def values_from_profiles(
    profiles: np.ndarray, tau: float, feas_tol: float = DEFAULT_FEAS_TOL
) -> np.ndarray:
    """Smallest-support values for every profile row at tolerance tau."""
    thresh = tau * (1.0 + feas_tol)
    return np.argmax(profiles <= thresh, axis=1)


def solve_l0(
    dictionary: Dictionary,
    fidelity: NormSpec,
    d: np.ndarray,
    tau: float,
    span_tol: float = DEFAULT_SPAN_TOL,
    feas_tol: float = DEFAULT_FEAS_TOL,
    dist_tol: float = DEFAULT_DIST_TOL,
) -> SolveResult:
    return L0Solver(dictionary, fidelity, span_tol, feas_tol, dist_tol).solve(d, tau)


def val_leq(
    dictionary: Dictionary,
    fidelity: NormSpec,
    d: np.ndarray,
    tau: float,
    K: int,
    span_tol: float = DEFAULT_SPAN_TOL,
    feas_tol: float = DEFAULT_FEAS_TOL,
    dist_tol: float = DEFAULT_DIST_TOL,
) -> bool:
    return L0Solver(dictionary, fidelity, span_tol, feas_tol, dist_tol).value_leq(d, tau, K)


def val_eq(
    dictionary: Dictionary,
    fidelity: NormSpec,
    d: np.ndarray,
    tau: float,
    K: int,
    span_tol: float = DEFAULT_SPAN_TOL,
    feas_tol: float = DEFAULT_FEAS_TOL,
    dist_tol: float = DEFAULT_DIST_TOL,
) -> bool:
    return L0Solver(dictionary, fidelity, span_tol, feas_tol, dist_tol).value_eq(d, tau, K)
