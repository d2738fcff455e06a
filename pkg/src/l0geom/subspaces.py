"""Dictionaries, orthonormal subspace bases, and span-family enumeration.

A dictionary is a finite list of nonzero vectors spanning R^N.  For each
size K this module enumerates the distinct K-dimensional subspaces spanned
by K-element subsets of the dictionary, keeping one representative per
span together with the lexicographically smallest index subset that
produced it.  Pairs of distinct family members are indexed by the
dimension of their intersection, which drives the overlap corrections in
the measure bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Sequence

import numpy as np

DEFAULT_SPAN_TOL = 1e-9


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of R^N, possibly zero-dimensional.

    ``matrix`` has shape (N, dim) with orthonormal columns; ``provenance``
    records the dictionary indices the span came from (empty for bases not
    derived from a dictionary subset).
    """

    matrix: np.ndarray
    provenance: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError(f"basis matrix must be 2-d, got shape {m.shape}")
        if m.shape[1] > m.shape[0]:
            raise ValueError(f"basis has more columns than ambient dimensions: {m.shape}")
        gram = m.T @ m
        if gram.size and not np.allclose(gram, np.eye(m.shape[1]), atol=1e-10):
            raise ValueError("basis columns are not orthonormal within 1e-10")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "provenance", tuple(int(i) for i in self.provenance))

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def projector(self) -> np.ndarray:
        return self.matrix @ self.matrix.T

    def complement(self) -> "SubspaceBasis":
        """Orthonormal basis of the orthogonal complement."""
        n, k = self.matrix.shape
        if k == 0:
            return SubspaceBasis(np.eye(n))
        u, _, _ = np.linalg.svd(self.matrix, full_matrices=True)
        return SubspaceBasis(u[:, k:])


def empty_basis(ambient_dim: int) -> SubspaceBasis:
    return SubspaceBasis(np.zeros((ambient_dim, 0)))


@dataclass(frozen=True)
class Dictionary:
    """Finite spanning set of R^N, atoms stored as the columns of ``atoms``."""

    atoms: np.ndarray
    span_tol: float = DEFAULT_SPAN_TOL

    def __post_init__(self) -> None:
        a = np.asarray(self.atoms, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"atom matrix must be (N, m) with N, m >= 1, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("atoms must be finite")
        lengths = np.linalg.norm(a, axis=0)
        scale = lengths.max()
        if scale == 0.0 or np.any(lengths <= self.span_tol * scale):
            raise ValueError("dictionary contains a zero atom")
        s = np.linalg.svd(a, compute_uv=False)
        if np.sum(s > self.span_tol * s[0]) < a.shape[0]:
            raise ValueError(
                f"dictionary does not span R^{a.shape[0]} "
                f"(numerical rank {int(np.sum(s > self.span_tol * s[0]))})"
            )
        object.__setattr__(self, "atoms", a)

    @staticmethod
    def from_vectors(
        vectors: Iterable[Sequence[float]], span_tol: float = DEFAULT_SPAN_TOL
    ) -> "Dictionary":
        arr = np.asarray(list(vectors), dtype=float)
        if arr.ndim != 2:
            raise ValueError("expected a list of equal-length vectors")
        return Dictionary(atoms=arr.T, span_tol=span_tol)

    @staticmethod
    def from_dict(obj: dict[str, Any], span_tol: float = DEFAULT_SPAN_TOL) -> "Dictionary":
        """Parse the JSON form {"dictionary": [[...], ...]} (one vector per row)."""
        if not isinstance(obj, dict) or "dictionary" not in obj:
            raise ValueError("expected an object with a 'dictionary' field")
        return Dictionary.from_vectors(obj["dictionary"], span_tol=span_tol)

    def to_dict(self) -> dict[str, Any]:
        return {"dictionary": self.atoms.T.tolist()}

    @property
    def n_dim(self) -> int:
        return self.atoms.shape[0]

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[1]

    def subset(self, indices: Sequence[int]) -> np.ndarray:
        return self.atoms[:, list(indices)]


def orthonormal_basis(
    vectors: Iterable[Sequence[float]] | np.ndarray,
    tol: float = DEFAULT_SPAN_TOL,
    provenance: tuple[int, ...] = (),
) -> SubspaceBasis:
    """Orthonormal basis of the span of the given vectors (one per row).

    Near-dependent directions are dropped: the dimension is the numerical
    rank at relative tolerance ``tol``.
    """
    arr = np.asarray(list(vectors) if not isinstance(vectors, np.ndarray) else vectors, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d stack of vectors, got shape {arr.shape}")
    m = arr.T  # columns spanning the subspace
    if m.shape[1] == 0:
        return empty_basis(m.shape[0])
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s[0] == 0.0:
        return empty_basis(m.shape[0])
    rank = int(np.sum(s > tol * s[0]))
    return SubspaceBasis(u[:, :rank], provenance=provenance)


def spans_equal(a: SubspaceBasis, b: SubspaceBasis, tol: float = DEFAULT_SPAN_TOL) -> bool:
    """True when the two spans coincide (projector distance within tol)."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("bases live in different ambient dimensions")
    if a.dim != b.dim:
        return False
    return bool(np.linalg.norm(a.projector() - b.projector()) <= tol)


def intersection_dim(a: SubspaceBasis, b: SubspaceBasis, tol: float = DEFAULT_SPAN_TOL) -> int:
    """dim(span a  intersect  span b) = dim a + dim b - rank [A | B]."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("bases live in different ambient dimensions")
    if a.dim == 0 or b.dim == 0:
        return 0
    stacked = np.hstack([a.matrix, b.matrix])
    s = np.linalg.svd(stacked, compute_uv=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return a.dim + b.dim - rank


def intersection_basis(
    a: SubspaceBasis, b: SubspaceBasis, tol: float = DEFAULT_SPAN_TOL
) -> SubspaceBasis:
    """Orthonormal basis of the intersection of the two spans.

    The dimension always matches ``intersection_dim``; the basis consists of
    the principal directions of span a closest to span b.
    """
    k = intersection_dim(a, b, tol)
    if k == 0:
        return empty_basis(a.ambient_dim)
    u, _, _ = np.linalg.svd(a.matrix.T @ b.matrix)
    return SubspaceBasis(a.matrix @ u[:, :k])


@dataclass(frozen=True)
class SpanFamily:
    """All distinct K-dimensional dictionary spans, one representative each.

    Members are ordered by their provenance subsets (lexicographically);
    each provenance is the smallest index subset generating that span.
    """

    K: int
    ambient_dim: int
    members: tuple[SubspaceBasis, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.members)


def enumerate_spans(
    dictionary: Dictionary, K: int, tol: float = DEFAULT_SPAN_TOL
) -> SpanFamily:
    """Distinct spans of K-element dictionary subsets.

    Rank-deficient subsets are skipped: their spans already appear at a
    smaller size.  The family size is at most C(n_atoms, K); for K = 0 it is
    the single zero-dimensional span and for K = N the whole space.
    """
    n = dictionary.n_dim
    if not 0 <= K <= n:
        raise ValueError(f"K must lie in [0, {n}], got {K}")
    if K == 0:
        return SpanFamily(K=0, ambient_dim=n, members=(empty_basis(n),))
    members: list[SubspaceBasis] = []
    projectors: list[np.ndarray] = []
    for subset in combinations(range(dictionary.n_atoms), K):
        basis = orthonormal_basis(dictionary.subset(subset).T, tol=tol, provenance=subset)
        if basis.dim < K:
            continue
        proj = basis.projector()
        if any(np.linalg.norm(proj - q) <= tol for q in projectors):
            continue
        members.append(basis)
        projectors.append(proj)
    return SpanFamily(K=K, ambient_dim=n, members=tuple(members))


def enumerate_pairs(
    family: SpanFamily, k: int, tol: float = DEFAULT_SPAN_TOL
) -> tuple[tuple[int, int], ...]:
    """Ordered pairs (i, j), i != j, of members whose spans meet in dimension k.

    Empty whenever k is not attainable, in particular for any k below
    max(0, 2K - N) and for families with fewer than two members.
    """
    if not 0 <= k <= family.K:
        raise ValueError(f"k must lie in [0, {family.K}], got {k}")
    pairs = []
    dims: dict[tuple[int, int], int] = {}
    for i, j in combinations(range(len(family.members)), 2):
        dims[(i, j)] = intersection_dim(family.members[i], family.members[j], tol)
    for i in range(len(family.members)):
        for j in range(len(family.members)):
            if i == j:
                continue
            d = dims[(i, j) if i < j else (j, i)]
            if d == k:
                pairs.append((i, j))
    return tuple(pairs)
