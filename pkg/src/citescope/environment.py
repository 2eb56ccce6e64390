"""Cited and citing environments of a seed journal.

The *cited* environment of a seed holds every journal that cites the seed
with at least ``threshold_fraction`` of the seed's received citations; the
*citing* environment holds every journal the seed cites with at least that
fraction of the seed's issued citations. The seed is always a member.

Within an environment each journal is drawn as an ellipse whose vertical
axis is its share of all in-environment citations (received for ``cited``,
issued for ``citing``) and whose horizontal axis is the same share with
self-citations removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyEnvironmentError, ZeroVarianceError
from .ingest import CitationMatrix, canonical_label

CITED = "cited"
CITING = "citing"
DIRECTIONS = (CITED, CITING)

DEFAULT_THRESHOLD = 0.01


@dataclass(frozen=True)
class Environment:
    seed: str
    direction: str
    members: tuple[str, ...]
    sub_matrix: CitationMatrix
    threshold_fraction: float = DEFAULT_THRESHOLD

    @property
    def size(self) -> int:
        return len(self.members)

    def index(self, journal: str) -> int:
        return self.members.index(canonical_label(journal))


@dataclass(frozen=True)
class NodeGeometry:
    journal: str
    share_total: float
    share_excl_self: float

    @property
    def cn_percent(self) -> float:
        return 100.0 * self.share_total


def _check_direction(direction: str) -> None:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")


def build_environment(
    m: CitationMatrix,
    seed: str,
    direction: str,
    threshold_fraction: float = DEFAULT_THRESHOLD,
) -> Environment:
    """Select the members of ``seed``'s environment in ``direction``.

    A candidate is kept when its flow to (or from) the seed is at least
    ``threshold_fraction`` times the seed's total flow; exactly at the
    threshold counts as kept. Members follow the order of the candidate axis,
    with the seed prepended if it is not on that axis.
    """
    _check_direction(direction)
    if not 0 <= threshold_fraction < 1:
        raise ValueError(f"threshold_fraction must lie in [0, 1), got {threshold_fraction}")
    seed = canonical_label(seed)

    if direction == CITED:
        flows = m.counts[:, m.col_of(seed)]
        candidates = m.citing_labels
    else:
        flows = m.counts[m.row_of(seed), :]
        candidates = m.cited_labels

    total = int(flows.sum())
    if total == 0:
        raise EmptyEnvironmentError(f"empty environment: {seed!r} has no {direction} citations")

    cutoff = threshold_fraction * total
    members = [
        label
        for label, flow in zip(candidates, flows)
        if label == seed or (flow > 0 and flow >= cutoff)
    ]
    if seed not in members:
        members.insert(0, seed)
    return Environment(seed, direction, tuple(members), m.restrict(members), threshold_fraction)


def raw_sizes(env: Environment) -> np.ndarray:
    """In-environment indegree (cited) or outdegree (citing) per member."""
    axis = 0 if env.direction == CITED else 1
    return env.sub_matrix.counts.sum(axis=axis)


def cn_values(env: Environment) -> list[NodeGeometry]:
    raw = raw_sizes(env)
    grand = int(raw.sum())
    if grand == 0:
        raise EmptyEnvironmentError("degenerate environment: no citations among members")
    diag = np.diag(env.sub_matrix.counts)
    return [
        NodeGeometry(j, int(r) / grand, int(r - d) / grand)
        for j, r, d in zip(env.members, raw, diag)
    ]


def grand_total(env: Environment) -> int:
    return int(raw_sizes(env).sum())


def self_cite_rate(m: CitationMatrix, journal: str) -> float:
    """Self-citations over all citations received by ``journal``; 0 if it receives none."""
    i = m.row_of(journal)
    j = m.col_of(journal)
    received = int(m.counts[:, j].sum())
    if received == 0:
        return 0.0
    return int(m.counts[i, j]) / received


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise ValueError("need at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if np.ptp(x) == 0 or np.ptp(y) == 0 or sxx == 0 or syy == 0:
        raise ZeroVarianceError("zero variance")
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))

