"""Cosine-similarity maps of an environment.

Each member is represented by its citation distribution over the other
members: the column of the sub-matrix (who cites it) in a cited
environment, the row (whom it cites) in a citing environment. Pairs whose
cosine falls below the suppression threshold get no edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .environment import CITED, Environment, NodeGeometry

INCLUDE_SELF = "include-self-cites"
ZERO_DIAGONAL = "zero-diagonal"
DIAGONAL_POLICIES = (INCLUDE_SELF, ZERO_DIAGONAL)

DEFAULT_SUPPRESSION = 0.2


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine of the angle between ``u`` and ``v``; 0 when either is the zero vector."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1 or u.size == 0:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def distribution_vectors(env: Environment, diagonal_policy: str = INCLUDE_SELF) -> np.ndarray:
    """One row per member holding its citation distribution over the members."""
    if diagonal_policy not in DIAGONAL_POLICIES:
        raise ValueError(f"diagonal_policy must be one of {DIAGONAL_POLICIES}")
    counts = np.array(env.sub_matrix.counts, dtype=float)
    if diagonal_policy == ZERO_DIAGONAL:
        np.fill_diagonal(counts, 0.0)
    return counts.T if env.direction == CITED else counts


def similarity_matrix(env: Environment, diagonal_policy: str = INCLUDE_SELF) -> np.ndarray:
    vectors = distribution_vectors(env, diagonal_policy)
    norms = np.linalg.norm(vectors, axis=1)
    nonzero = norms > 0
    unit = np.zeros_like(vectors)
    unit[nonzero] = vectors[nonzero] / norms[nonzero, None]
    sim = unit @ unit.T
    # BLAS gives no exact-symmetry guarantee; mirror the upper triangle.
    sim = np.triu(sim) + np.triu(sim, 1).T
    np.clip(sim, 0.0, 1.0, out=sim)
    np.fill_diagonal(sim, nonzero.astype(float))
    return sim


@dataclass(frozen=True)
class Edge:
    a: str
    b: str
    cosine: float


@dataclass(frozen=True)
class SimilarityGraph:
    """Undirected weighted map of an environment.

    ``geometry`` may be empty for graphs read back from formats that do not
    carry node sizes (Pajek).
    """

    labels: tuple[str, ...]
    edges: tuple[Edge, ...]
    geometry: Mapping[str, NodeGeometry] = field(default_factory=dict)
    suppression_threshold: float = DEFAULT_SUPPRESSION
    environment: Environment | None = None

    @property
    def nodes(self) -> list[tuple[str, NodeGeometry | None]]:
        return [(j, self.geometry.get(j)) for j in self.labels]

    def degree(self, label: str) -> int:
        return sum(label in (e.a, e.b) for e in self.edges)

    def require_geometry(self) -> None:
        missing = [j for j in self.labels if j not in self.geometry]
        if missing:
            raise ValueError(f"no geometry for node {missing[0]!r}")


def build_graph(
    env: Environment,
    sim: np.ndarray,
    geometry: Sequence[NodeGeometry],
    suppression_threshold: float = DEFAULT_SUPPRESSION,
) -> SimilarityGraph:
    """Keep every pair with cosine >= ``suppression_threshold`` (and > 0) as an edge."""
    n = env.size
    sim = np.asarray(sim, dtype=float)
    if sim.shape != (n, n):
        raise ValueError(f"similarity matrix is {sim.shape}, environment has {n} members")
    if not np.array_equal(sim, sim.T):
        raise ValueError("similarity matrix is not symmetric")
    if suppression_threshold < 0:
        raise ValueError("suppression_threshold must be non-negative")

    by_journal = {g.journal: g for g in geometry}
    for j in env.members:
        if j not in by_journal:
            raise ValueError(f"no geometry for member {j!r}")

    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            c = float(sim[i, j])
            if c > 0 and c >= suppression_threshold:
                edges.append(Edge(env.members[i], env.members[j], c))
    return SimilarityGraph(
        labels=env.members,
        edges=tuple(edges),
        geometry={j: by_journal[j] for j in env.members},
        suppression_threshold=suppression_threshold,
        environment=env,
    )
