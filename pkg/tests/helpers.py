"""Random inputs shared by property and acceptance tests."""

from __future__ import annotations

import numpy as np

from citescope.environment import NodeGeometry
from citescope.ingest import CitationMatrix
from citescope.simgraph import Edge, SimilarityGraph


def random_matrix(rng, n: int | None = None, high: int = 20, density: float = 0.7) -> CitationMatrix:
    n = n or int(rng.integers(2, 9))
    counts = rng.integers(0, high, size=(n, n)) * (rng.random((n, n)) < density)
    labels = tuple(f"J{i:02d}" for i in range(n))
    return CitationMatrix(labels, labels, counts)


def naive_cosine(u, v) -> float:
    dot = sum(a * b for a, b in zip(u, v))
    nu = sum(a * a for a in u) ** 0.5
    nv = sum(b * b for b in v) ** 0.5
    if nu == 0 or nv == 0:
        return 0.0
    return dot / (nu * nv)


def random_graph(rng) -> SimilarityGraph:
    n = int(rng.integers(1, 12))
    labels = tuple(f"Journal {chr(65 + i)}{i}" for i in range(n))
    shares = rng.random(n) + 1e-3
    shares /= shares.sum()
    geometry = {j: NodeGeometry(j, float(s), float(s * rng.random())) for j, s in zip(labels, shares)}
    edges = tuple(
        Edge(labels[i], labels[j], float(rng.uniform(0.2, 1.0)))
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < 0.4
    )
    return SimilarityGraph(labels=labels, edges=edges, geometry=geometry)
