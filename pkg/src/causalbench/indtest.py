"""Correlation sufficient statistics and the Fisher Z conditional-independence
test used by every constraint-based search variant.

Partial correlations come from inverting the correlation submatrix over
{x, y} union s (precision form): r = -theta_xy / sqrt(theta_xx * theta_yy).
A pseudo-inverse stands in when the submatrix is numerically singular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Dag, d_separated

# condition number past which the conditioning submatrix counts as collinear
_COLLINEARITY_LIMIT = 1e12


class CollinearityError(ValueError):
    """Conditioning/parent set is collinear; the regression is singular."""


@dataclass(frozen=True)
class CorrMatrix:
    """Pearson correlation matrix plus the sample count it came from."""

    values: np.ndarray
    n: int

    def __post_init__(self):
        m = np.asarray(self.values, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("correlation matrix must be square")
        if not np.allclose(m, m.T, atol=1e-12):
            raise ValueError("correlation matrix must be symmetric")
        if np.any(np.abs(m) > 1 + 1e-12):
            raise ValueError("correlations must lie in [-1, 1]")
        object.__setattr__(self, "values", m)

    @property
    def num_vars(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class IndResult:
    independent: bool
    p_value: float
    statistic: float


def correlation_matrix(data) -> CorrMatrix:
    """Pearson correlations of the dataset columns; keeps the sample count."""
    values = data.values
    if values.shape[0] < 2:
        raise ValueError("need at least two samples")
    sd = values.std(axis=0)
    for k in np.flatnonzero(sd == 0):
        raise ValueError(f"column {data.names[int(k)]} is constant")
    corr = np.corrcoef(values, rowvar=False)
    corr = np.clip((corr + corr.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return CorrMatrix(values=corr, n=values.shape[0])


def partial_correlation(c: CorrMatrix, x: int, y: int, s) -> float:
    """Partial correlation of x and y given s, via the precision submatrix."""
    s = sorted(s)
    if x == y:
        raise ValueError("x and y must be distinct")
    if x in s or y in s:
        raise ValueError("x and y must not be in the conditioning set")
    if not s:
        return float(c.values[x, y])
    idx = [x, y] + s
    sub = c.values[np.ix_(idx, idx)]
    try:
        if np.linalg.cond(sub) > _COLLINEARITY_LIMIT:
            theta = np.linalg.pinv(sub)
        else:
            theta = np.linalg.inv(sub)
    except np.linalg.LinAlgError:
        raise CollinearityError(
            f"collinear conditioning set {s} for pair ({x}, {y})"
        ) from None
    denom = theta[0, 0] * theta[1, 1]
    if denom <= 0:
        raise CollinearityError(
            f"collinear conditioning set {s} for pair ({x}, {y})"
        )
    return float(-theta[0, 1] / math.sqrt(denom))


def fisher_z_test(c: CorrMatrix, x: int, y: int, s, alpha: float) -> IndResult:
    """Fisher Z test of x _||_ y | s at level alpha.

    z = sqrt(n - |s| - 3) * atanh(r); p is the two-sided normal tail. A
    perfectly correlated pair is dependent with p = 0.
    """
    s = sorted(s)
    dof = c.n - len(s) - 3
    if dof < 1:
        raise ValueError(f"sample size {c.n} too small for |s| = {len(s)}")
    r = partial_correlation(c, x, y, s)
    if abs(r) >= 1.0:
        return IndResult(independent=False, p_value=0.0, statistic=math.inf)
    z = math.sqrt(dof) * math.atanh(r)
    p = math.erfc(abs(z) / math.sqrt(2.0))  # == 2 * (1 - Phi(|z|))
    return IndResult(independent=p > alpha, p_value=p, statistic=z)


class FisherZTest:
    """Callable independence test bound to one correlation matrix and alpha."""

    def __init__(self, corr: CorrMatrix, alpha: float):
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        self.corr = corr
        self.alpha = alpha

    @property
    def num_vars(self) -> int:
        return self.corr.num_vars

    def __call__(self, x: int, y: int, s) -> IndResult:
        return fisher_z_test(self.corr, x, y, s, self.alpha)


class DsepOracleTest:
    """Independence oracle answering from d-separation on a known true DAG.

    p-values are 1 for separation and 0 for connection, so it plugs into the
    same orientation machinery as the data-driven test. Queries are memoized.
    """

    def __init__(self, dag: Dag):
        self.dag = dag
        self.alpha = 0.5  # only the independent/dependent decision matters
        self._cache: dict[tuple[int, int, frozenset[int]], bool] = {}

    @property
    def num_vars(self) -> int:
        return self.dag.num_nodes

    def __call__(self, x: int, y: int, s) -> IndResult:
        key = (x, y, frozenset(s)) if x < y else (y, x, frozenset(s))
        sep = self._cache.get(key)
        if sep is None:
            sep = d_separated(self.dag, x, y, key[2])
            self._cache[key] = sep
        p = 1.0 if sep else 0.0
        return IndResult(independent=sep, p_value=p, statistic=0.0)
