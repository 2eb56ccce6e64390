"""Principal component analysis of citing patterns with varimax rotation.

Variables are the citing journals of an environment (rows of its
sub-matrix); observations are the cited journals (columns). Components are
extracted from the Pearson correlation matrix and rotated with Kaiser's
varimax, optionally under Kaiser row normalization.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .environment import Environment
from .errors import ConvergenceError, ZeroVarianceError

log = logging.getLogger(__name__)

KAISER = "kaiser"
EIGEN_RESIDUAL_TOL = 1e-10
VARIMAX_TOL = 1e-6
VARIMAX_MAX_SWEEPS = 100


def correlation_matrix(env: Environment, orientation: str = "rows-as-variables") -> np.ndarray:
    if orientation != "rows-as-variables":
        raise ValueError(f"unsupported orientation {orientation!r}")
    return correlation_of_rows(env.sub_matrix.counts, env.members)


def correlation_of_rows(data: np.ndarray, names: Sequence[str] | None = None) -> np.ndarray:
    """Pearson correlation between the rows of ``data``."""
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least two variables")
    if x.shape[1] < 2:
        raise ValueError("need at least two observations per variable")
    centered = x - x.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered**2).sum(axis=1))
    for i, norm in enumerate(norms):
        if norm == 0 or np.ptp(x[i]) == 0:
            name = names[i] if names is not None else f"variable {i}"
            raise ZeroVarianceError(f"zero variance variable: {name}")
    z = centered / norms[:, None]
    corr = z @ z.T
    corr = np.triu(corr) + np.triu(corr, 1).T
    np.clip(corr, -1.0, 1.0, out=corr)
    np.fill_diagonal(corr, 1.0)
    return corr


def sign_normalize(loadings: np.ndarray) -> np.ndarray:
    """Per-column signs (+1/-1) making each column's largest-magnitude entry positive."""
    loadings = np.asarray(loadings, dtype=float)
    if loadings.size == 0:
        return np.ones(loadings.shape[1] if loadings.ndim == 2 else 0)
    idx = np.argmax(np.abs(loadings), axis=0)
    picked = loadings[idx, np.arange(loadings.shape[1])]
    return np.where(picked < 0, -1.0, 1.0)


@dataclass(frozen=True)
class Components:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    loadings: np.ndarray

    @property
    def k(self) -> int:
        return self.loadings.shape[1]


def principal_components(corr: np.ndarray, k: int | str = KAISER) -> Components:
    """Eigendecompose ``corr`` and return the first ``k`` loading columns.

    Loadings are eigenvectors scaled by the square root of their eigenvalue,
    ordered by descending eigenvalue. ``k="kaiser"`` keeps eigenvalues
    strictly above 1.
    """
    corr = np.asarray(corr, dtype=float)
    if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
        raise ValueError(f"correlation matrix must be square, got {corr.shape}")
    if not np.allclose(corr, corr.T, rtol=0, atol=1e-12):
        raise ValueError("correlation matrix is not symmetric")
    if not np.allclose(np.diag(corr), 1.0, rtol=0, atol=1e-12):
        raise ValueError("correlation matrix must have a unit diagonal")
    p = corr.shape[0]

    try:
        values, vectors = np.linalg.eigh(corr)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(values, kind="stable")[::-1]
    values = values[order]
    vectors = vectors[:, order]

    residual = np.linalg.norm(corr @ vectors - vectors * values, axis=0)
    worst = float(residual.max()) if p else 0.0
    if worst > EIGEN_RESIDUAL_TOL:
        raise ConvergenceError(f"eigenpair residual norm {worst:.3e} exceeds {EIGEN_RESIDUAL_TOL}")

    if k == KAISER:
        k = int(np.sum(values > 1.0))
    elif not isinstance(k, (int, np.integer)) or not 0 <= k <= p:
        raise ValueError(f"component count must be an integer in [0, {p}] or 'kaiser', got {k!r}")

    vectors = vectors * sign_normalize(vectors)
    loadings = vectors[:, :k] * np.sqrt(np.clip(values[:k], 0.0, None))
    return Components(values, vectors, loadings)


def varimax_criterion(loadings: np.ndarray) -> float:
    """Sum over columns of the variance of the squared loadings."""
    sq = np.asarray(loadings, dtype=float) ** 2
    if sq.size == 0:
        return 0.0
    return float(np.sum(sq.var(axis=0)))


@dataclass(frozen=True)
class Rotation:
    loadings: np.ndarray
    matrix: np.ndarray
    iterations: int
    converged: bool
    criterion_history: tuple[float, ...]


def _plane_angle(x: np.ndarray, y: np.ndarray) -> float:
    # Kaiser's closed-form optimum for one pair of columns.
    p = x.size
    u = x * x - y * y
    v = 2.0 * x * y
    a = u.sum()
    b = v.sum()
    c = (u * u - v * v).sum()
    d = 2.0 * (u * v).sum()
    num = d - 2.0 * a * b / p
    den = c - (a * a - b * b) / p
    return 0.25 * math.atan2(num, den)


def varimax_rotate(
    loadings: np.ndarray,
    kaiser_normalize: bool = True,
    tolerance: float = VARIMAX_TOL,
    max_iterations: int = VARIMAX_MAX_SWEEPS,
    names: Sequence[str] | None = None,
) -> Rotation:
    """Orthogonal varimax rotation by sweeps of pairwise planar rotations.

    Each sweep rotates every column pair by the angle that maximizes the
    criterion in that plane, so the criterion never decreases. Iteration stops
    once a sweep improves the criterion by less than ``tolerance`` relative to
    its previous value. Column signs are normalized afterwards (largest
    magnitude positive) and the rotation matrix carries those flips, so
    ``loadings @ matrix`` equals the returned loadings.
    """
    a = np.array(loadings, dtype=float)
    if a.ndim != 2:
        raise ValueError("loadings must be a 2-D array")
    p, k = a.shape
    if k < 1 or p < k:
        raise ValueError(f"need 1 <= k <= p, got p={p}, k={k}")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")

    if k == 1:
        c = varimax_criterion(a)
        return Rotation(a, np.eye(1), 0, True, (c,))

    if kaiser_normalize:
        h = np.sqrt((a**2).sum(axis=1))
        zero = np.flatnonzero(h == 0)
        if zero.size:
            name = names[zero[0]] if names is not None else f"row {zero[0]}"
            raise ZeroVarianceError(f"zero communality under Kaiser normalization: {name}")
        b = a / h[:, None]
    else:
        h = None
        b = a.copy()

    rot = np.eye(k)
    history = [varimax_criterion(b)]
    converged = False
    sweeps = 0
    while sweeps < max_iterations:
        sweeps += 1
        for i in range(k - 1):
            for j in range(i + 1, k):
                phi = _plane_angle(b[:, i], b[:, j])
                if phi == 0.0:
                    continue
                cs, sn = math.cos(phi), math.sin(phi)
                plane = np.array([[cs, -sn], [sn, cs]])
                b[:, [i, j]] = b[:, [i, j]] @ plane
                rot[:, [i, j]] = rot[:, [i, j]] @ plane
        history.append(varimax_criterion(b))
        prev, cur = history[-2], history[-1]
        if cur - prev <= tolerance * max(abs(prev), np.finfo(float).tiny):
            converged = True
            break

    if not converged:
        log.warning("varimax did not converge in %d sweeps", max_iterations)

    signs = sign_normalize(b)
    rot = rot * signs
    rotated = a @ rot
    return Rotation(rotated, rot, sweeps, converged, tuple(history))


@dataclass(frozen=True)
class FactorModel:
    variables: tuple[str, ...]
    correlation: np.ndarray
    eigenvalues: np.ndarray
    loadings_unrotated: np.ndarray
    loadings_rotated: np.ndarray
    rotation: np.ndarray
    variance_explained_total: float
    iterations_used: int
    converged: bool = True

    @property
    def k(self) -> int:
        return self.loadings_rotated.shape[1]

    @property
    def communalities(self) -> np.ndarray:
        return (self.loadings_rotated**2).sum(axis=1)

    def variance_explained(self) -> np.ndarray:
        """Per-component share of total variance after rotation."""
        return (self.loadings_rotated**2).sum(axis=0) / len(self.variables)


def fit_factors(
    env: Environment,
    k: int | str = 3,
    kaiser_normalize: bool = True,
    tolerance: float = VARIMAX_TOL,
    max_iterations: int = VARIMAX_MAX_SWEEPS,
) -> FactorModel:
    """Correlation, extraction and varimax rotation for the citing rows of ``env``."""
    corr = correlation_matrix(env)
    return fit_correlation(corr, env.members, k, kaiser_normalize, tolerance, max_iterations)


def fit_correlation(
    corr: np.ndarray,
    variables: Sequence[str],
    k: int | str = 3,
    kaiser_normalize: bool = True,
    tolerance: float = VARIMAX_TOL,
    max_iterations: int = VARIMAX_MAX_SWEEPS,
) -> FactorModel:
    comps = principal_components(corr, k)
    if comps.k == 0:
        raise ValueError("no component retained (no eigenvalue above 1)")
    if k == KAISER:
        log.info(
            "kaiser criterion retained %d components; eigenvalues: %s",
            comps.k,
            ", ".join(f"{v:.4f}" for v in comps.eigenvalues),
        )
    rotation = varimax_rotate(comps.loadings, kaiser_normalize, tolerance, max_iterations, names=variables)
    p = corr.shape[0]
    return FactorModel(
        variables=tuple(variables),
        correlation=corr,
        eigenvalues=comps.eigenvalues,
        loadings_unrotated=comps.loadings,
        loadings_rotated=rotation.loadings,
        rotation=rotation.matrix,
        variance_explained_total=float(comps.eigenvalues[: comps.k].sum() / p),
        iterations_used=rotation.iterations,
        converged=rotation.converged,
    )


def loadings_table(
    model: FactorModel,
    display_cutoff: float = 0.1,
    sort_rows: bool = False,
    decimals: int = 3,
) -> list[list[str]]:
    """Header plus one row per variable; loadings below the cutoff in magnitude are blank.

    With ``sort_rows`` variables are grouped by their dominant component and
    ordered by descending loading within each group.
    """
    loadings = model.loadings_rotated
    order = list(range(len(model.variables)))
    if sort_rows:
        dominant = np.argmax(np.abs(loadings), axis=1)
        order.sort(key=lambda i: (dominant[i], -abs(loadings[i, dominant[i]])))

    header = ["journal"] + [str(c + 1) for c in range(model.k)]
    rows = [header]
    for i in order:
        cells = [model.variables[i]]
        for value in loadings[i]:
            if abs(value) < display_cutoff:
                cells.append("")
            else:
                text = f"{value:.{decimals}f}"
                # -0.000 reads as a sign error in a table.
                cells.append(text[1:] if text.startswith("-") and float(text) == 0 else text)
        rows.append(cells)
    return rows
