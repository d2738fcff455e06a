"""Uniform sampling from scaled norm balls.

The Euclidean ball is sampled directly (isotropic direction times a
U^(1/n) radius); every other menu norm is sampled by rejection from its
bounding box.  Draws come from the counter-based streams in ``streams``,
so sample i of a run is a pure function of (seed, i) and can be
regenerated in isolation with ``sample_levelset``.
"""

from __future__ import annotations

import numpy as np

from . import streams
from .norms import NormSpec, norm_eval

# Rejection batches per chunk before giving up.  The lowest menu acceptance
# rate at desk scale (l1 in R^8) needs about 41k batches on average.
_MAX_REJECTION_BATCHES = 200_000


def _box_half_widths(spec: NormSpec, theta: float, dim: int) -> np.ndarray:
    """Tight coordinate box around the ball of radius theta."""
    if spec.kind == "wlp":
        return theta / np.asarray(spec.weights, dtype=float)
    # l1, l2, linf unit balls all touch the cube |x_i| <= 1.
    return np.full(dim, theta)


def _levelset_chunk(
    spec: NormSpec, theta: float, dim: int, seed: int, chunk_index: int
) -> np.ndarray:
    gen = streams.chunk_generator(
        seed, streams.stream_id(streams.PURPOSE_LEVELSET), chunk_index
    )
    m = streams.CHUNK
    if spec.kind == "l2":
        normals = gen.standard_normal((m, dim))
        lengths = np.linalg.norm(normals, axis=1)
        degenerate = lengths == 0.0
        if np.any(degenerate):
            normals[degenerate, 0] = 1.0
            lengths[degenerate] = 1.0
        radii = theta * gen.random(m) ** (1.0 / dim)
        return normals * (radii / lengths)[:, None]
    half = _box_half_widths(spec, theta, dim)
    accepted = np.empty((m, dim))
    filled = 0
    for _ in range(_MAX_REJECTION_BATCHES):
        draw = (2.0 * gen.random((m, dim)) - 1.0) * half
        hits = draw[np.asarray(norm_eval(spec, draw)) <= theta]
        take = min(m - filled, hits.shape[0])
        accepted[filled : filled + take] = hits[:take]
        filled += take
        if filled == m:
            return accepted
    raise RuntimeError(
        f"rejection sampling for {spec.kind} in dimension {dim} accepted "
        f"{filled}/{m} samples after {_MAX_REJECTION_BATCHES} batches"
    )


def _check_args(spec: NormSpec, theta: float, dim: int) -> None:
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if not theta > 0.0:
        raise ValueError(f"theta must be > 0, got {theta}")
    if spec.kind == "wlp" and len(spec.weights) != dim:
        raise ValueError(
            f"wlp norm has {len(spec.weights)} weights but dimension is {dim}"
        )


def sample_levelset_batch(
    spec: NormSpec,
    theta: float,
    dim: int,
    n_samples: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """(n_samples, dim) array of points uniform on the ball norm <= theta."""
    _check_args(spec, theta, dim)
    total = streams.n_chunks_for(n_samples)
    chunks = streams.map_chunks(
        lambda i: _levelset_chunk(spec, theta, dim, seed, i), total, workers
    )
    return np.vstack(chunks)[:n_samples]


def sample_levelset(
    spec: NormSpec, theta: float, dim: int, sample_index: int, seed: int
) -> np.ndarray:
    """Regenerate one sample of a batch without producing the others.

    Bitwise identical to row ``sample_index`` of any ``sample_levelset_batch``
    call with the same (spec, theta, dim, seed), regardless of batch size or
    worker count.
    """
    _check_args(spec, theta, dim)
    if sample_index < 0:
        raise ValueError(f"sample_index must be nonnegative, got {sample_index}")
    chunk, row = divmod(sample_index, streams.CHUNK)
    return _levelset_chunk(spec, theta, dim, seed, chunk)[row].copy()
