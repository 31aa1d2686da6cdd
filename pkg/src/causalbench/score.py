"""Decomposable local scores driving the greedy equivalence search.

Three kinds share one duck-typed surface (num_vars, initial_deltas,
insert_delta, delete_delta):

* SemBicScore: Gaussian BIC with a penalty multiplier, local form
  -n * ln(residual variance) - penalty * |parents| * ln(n). Summed over nodes
  this is 2L - c*k*ln N up to a model-independent constant.
* FisherZScore: the alpha - p pseudo-score. Not a proper score; it is consumed
  only as an edge delta conditioned on the operator's conditioning set, which
  is exactly where the search needs a dependence decision.
* DsepOracleScore: +1 for conditional d-connection, -1 for d-separation on a
  known DAG, for correctness checks without data.

Residual variances come from the correlation matrix by Schur complement; raw
data is never refit.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import Dag, d_separated
from .indtest import CollinearityError, CorrMatrix, fisher_z_test


_erfc_vec = np.vectorize(math.erfc, otypes=[float])


def sem_bic_local(c: CorrMatrix, node: int, parents, penalty: float) -> float:
    """Local BIC contribution of one node given its parent set."""
    parents = sorted(parents)
    if node in parents:
        raise ValueError("a node cannot be its own parent")
    n = c.n
    var = _residual_variance(c, node, parents)
    return -n * math.log(var) - penalty * len(parents) * math.log(n)


def _residual_variance(c: CorrMatrix, node: int, parents: list[int]) -> float:
    """Residual variance of the (standardized) node regressed on parents."""
    if not parents:
        return 1.0
    r_yp = c.values[node, parents]
    r_pp = c.values[np.ix_(parents, parents)]
    try:
        beta = np.linalg.solve(r_pp, r_yp)
    except np.linalg.LinAlgError:
        raise CollinearityError(f"collinear parents {parents} for node {node}") from None
    var = 1.0 - float(r_yp @ beta)
    if var < 1e-15:
        raise CollinearityError(f"collinear parents {parents} for node {node}")
    return var


def fisher_z_local_delta(c: CorrMatrix, x: int, y: int, cond, alpha: float) -> float:
    """alpha - p for the test x _||_ y | cond; positive favors the edge."""
    return alpha - fisher_z_test(c, x, y, cond, alpha).p_value


def dsep_oracle_delta(dag: Dag, x: int, y: int, cond) -> float:
    """+1 for conditional d-connection, -1 for d-separation."""
    return -1.0 if d_separated(dag, x, y, cond) else 1.0


class SemBicScore:
    """BIC score bound to one correlation matrix, with local-score memoization."""

    def __init__(self, corr: CorrMatrix, penalty: float = 2.0):
        if penalty <= 0:
            raise ValueError("penalty discount must be positive")
        self.corr = corr
        self.penalty = penalty
        self._cache: dict[tuple[int, frozenset[int]], float] = {}

    @property
    def num_vars(self) -> int:
        return self.corr.num_vars

    def local(self, node: int, parents) -> float:
        key = (node, frozenset(parents))
        hit = self._cache.get(key)
        if hit is None:
            hit = sem_bic_local(self.corr, node, key[1], self.penalty)
            self._cache[key] = hit
        return hit

    def total(self, dag: Dag) -> float:
        return sum(self.local(v, dag.parents(v)) for v in range(dag.num_nodes))

    def insert_delta(self, x: int, y: int, cond) -> float:
        cond = frozenset(cond)
        return self.local(y, cond | {x}) - self.local(y, cond)

    def delete_delta(self, x: int, y: int, cond) -> float:
        cond = frozenset(cond) - {x}
        return self.local(y, cond) - self.local(y, cond | {x})

    def initial_deltas(self) -> np.ndarray:
        """Single-edge insertion deltas against the empty graph, vectorized."""
        r2 = np.clip(self.corr.values**2, 0.0, 1.0 - 1e-15)
        n = self.corr.n
        deltas = -n * np.log1p(-r2) - self.penalty * math.log(n)
        np.fill_diagonal(deltas, -math.inf)
        return deltas


class FisherZScore:
    """alpha - p edge deltas from the Fisher Z test on one correlation matrix."""

    def __init__(self, corr: CorrMatrix, alpha: float = 1e-3):
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        self.corr = corr
        self.alpha = alpha
        self._pcache: dict[tuple[int, int, frozenset[int]], float] = {}

    @property
    def num_vars(self) -> int:
        return self.corr.num_vars

    def _p(self, x: int, y: int, cond: frozenset) -> float:
        key = (x, y, cond) if x < y else (y, x, cond)
        hit = self._pcache.get(key)
        if hit is None:
            hit = fisher_z_test(self.corr, x, y, cond, self.alpha).p_value
            self._pcache[key] = hit
        return hit

    def insert_delta(self, x: int, y: int, cond) -> float:
        return self.alpha - self._p(x, y, frozenset(cond) - {x, y})

    def delete_delta(self, x: int, y: int, cond) -> float:
        return self._p(x, y, frozenset(cond) - {x, y}) - self.alpha

    def initial_deltas(self) -> np.ndarray:
        n = self.corr.n
        r = np.clip(self.corr.values, -1 + 1e-15, 1 - 1e-15)
        z = math.sqrt(n - 3) * np.arctanh(r)
        p = _erfc_vec(np.abs(z) / math.sqrt(2.0))
        deltas = self.alpha - p
        np.fill_diagonal(deltas, -math.inf)
        return deltas


class DsepOracleScore:
    """Conditional d-connection score (+1 / -1) against a known true DAG."""

    def __init__(self, dag: Dag):
        self.dag = dag
        self._cache: dict[tuple[int, int, frozenset[int]], float] = {}

    @property
    def num_vars(self) -> int:
        return self.dag.num_nodes

    @property
    def names(self) -> list[str]:
        return self.dag.names

    def insert_delta(self, x: int, y: int, cond) -> float:
        cond = frozenset(cond) - {x, y}
        key = (x, y, cond) if x < y else (y, x, cond)
        hit = self._cache.get(key)
        if hit is None:
            hit = dsep_oracle_delta(self.dag, x, y, cond)
            self._cache[key] = hit
        return hit

    def delete_delta(self, x: int, y: int, cond) -> float:
        return -self.insert_delta(x, y, cond)

    def initial_deltas(self) -> np.ndarray:
        v = self.num_vars
        deltas = np.full((v, v), -1.0)
        for x in range(v):
            for y in range(x + 1, v):
                deltas[x, y] = deltas[y, x] = self.insert_delta(x, y, ())
        np.fill_diagonal(deltas, -math.inf)
        return deltas
