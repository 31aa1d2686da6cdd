"""Random forward-edge DAG generation and recursive linear-Gaussian simulation.

The generating process: place variables in a linear order, sample exactly
v * degree / 2 distinct forward pairs uniformly, draw edge coefficients from
U(0.2, 0.9) and exogenous error variances from U(1, 3), then simulate each
sample in topological order. Column shuffling happens last so no algorithm can
exploit causal ordering of the columns.

All randomness flows through seeded numpy PCG64 generators (normals via the
ziggurat method), with per-dataset streams derived from a master seed and the
cell coordinates, so a corpus regenerates bit-identically from its seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Dag

VARS_LEVELS = (50, 100, 500)
DEGREE_LEVELS = (2, 4, 6)
SAMPLE_LEVELS = (100, 500, 1000)
RUNS_PER_CELL = 10


@dataclass(frozen=True)
class SimCell:
    """One coordinate of the 27-cell grid (x 10 runs each)."""

    vars: int
    avg_degree: int
    n: int
    run: int = 0


@dataclass(frozen=True)
class Rng:
    """Seeded random stream; identical seeds give bit-identical output."""

    seed: int

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    @staticmethod
    def for_cell(master_seed: int, cell: SimCell) -> "np.random.Generator":
        """Independent per-dataset stream derived from the master seed."""
        seq = np.random.SeedSequence(
            entropy=master_seed,
            spawn_key=(cell.vars, cell.avg_degree, cell.n, cell.run),
        )
        return np.random.Generator(np.random.PCG64(seq))


@dataclass
class SemModel:
    """Linear Gaussian SEM: DAG plus edge coefficients and error variances."""

    dag: Dag
    coef: dict[tuple[int, int], float]
    err_var: dict[int, float]

    def coefficient_matrix(self) -> np.ndarray:
        """B with B[p, c] = coefficient of edge p -> c."""
        v = self.dag.num_nodes
        b = np.zeros((v, v))
        for (p, c), w in self.coef.items():
            b[p, c] = w
        return b

    def analytic_covariance(self) -> np.ndarray:
        """Population covariance (I - B)^{-T} Omega (I - B)^{-1}."""
        v = self.dag.num_nodes
        imb = np.eye(v) - self.coefficient_matrix()
        omega = np.diag([self.err_var[j] for j in range(v)])
        inv = np.linalg.inv(imb)
        return inv.T @ omega @ inv


@dataclass
class DataSet:
    """n x v sample matrix with one name per column."""

    names: list[str]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ValueError("value matrix shape does not match the name list")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("dataset contains non-finite entries")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def num_vars(self) -> int:
        return self.values.shape[1]


def default_names(v: int) -> list[str]:
    return [f"X{i + 1}" for i in range(v)]


def random_dag(vars: int, avg_degree: int, rng: np.random.Generator) -> Dag:
    """DAG with exactly vars * avg_degree / 2 uniformly chosen forward edges.

    Nodes sit in the linear order 0..vars-1 and every edge points forward, so
    acyclicity holds by construction and the average degree is exact.
    """
    if vars < 2:
        raise ValueError("need at least two variables")
    if avg_degree < 0:
        raise ValueError("average degree must be nonnegative")
    if (vars * avg_degree) % 2 != 0:
        raise ValueError("vars * avg_degree must be even for an exact edge count")
    num_edges = vars * avg_degree // 2
    max_pairs = vars * (vars - 1) // 2
    if num_edges > max_pairs:
        raise ValueError(
            f"{num_edges} edges exceed the {max_pairs} available forward pairs"
        )
    chosen = rng.choice(max_pairs, size=num_edges, replace=False)
    edges = [_pair_from_rank(int(k), vars) for k in chosen]
    return Dag(default_names(vars), sorted(edges))


def _pair_from_rank(rank: int, v: int) -> tuple[int, int]:
    """Decode 0 <= rank < C(v,2) to the rank-th pair (i, j), i < j, in
    lexicographic order."""
    i = 0
    remaining = rank
    row = v - 1
    while remaining >= row:
        remaining -= row
        row -= 1
        i += 1
    return i, i + 1 + remaining


COEF_LOW, COEF_HIGH = 0.2, 0.9
VAR_LOW, VAR_HIGH = 1.0, 3.0


def draw_params(
    dag: Dag, rng: np.random.Generator, *, signed: bool = False
) -> SemModel:
    """Coefficients ~ U(0.2, 0.9) per edge, error variances ~ U(1, 3) per node.

    Coefficients are positive, following the generating description; pass
    signed=True to flip each sign with probability 1/2.
    """
    edges = [(a, b) for a, b, _, _ in dag.edges()]
    coefs = rng.uniform(COEF_LOW, COEF_HIGH, size=len(edges))
    if signed:
        coefs = coefs * rng.choice([-1.0, 1.0], size=len(edges))
    variances = rng.uniform(VAR_LOW, VAR_HIGH, size=dag.num_nodes)
    return SemModel(
        dag=dag,
        coef={e: float(c) for e, c in zip(edges, coefs)},
        err_var={j: float(s) for j, s in enumerate(variances)},
    )


def simulate_recursive(model: SemModel, n: int, rng: np.random.Generator) -> DataSet:
    """Draw n i.i.d. samples: each variable, in topological order, is the
    coefficient-weighted sum of its parents plus N(0, err_var) noise."""
    if n < 1:
        raise ValueError("need at least one sample")
    from .graph import topological_order

    dag = model.dag
    v = dag.num_nodes
    scale = np.sqrt([model.err_var[j] for j in range(v)])
    noise = rng.standard_normal((n, v)) * scale
    values = np.empty((n, v))
    for j in topological_order(dag):
        parents = sorted(dag.parents(j))
        values[:, j] = noise[:, j]
        if parents:
            weights = np.array([model.coef[(p, j)] for p in parents])
            values[:, j] += values[:, parents] @ weights
    return DataSet(names=list(dag.names), values=values)


def shuffle_columns(
    data: DataSet, rng: np.random.Generator
) -> tuple[DataSet, np.ndarray]:
    """Apply one uniformly random permutation to names and columns alike.

    Returns the shuffled dataset and the permutation p, where output column k
    is input column p[k].
    """
    perm = rng.permutation(data.num_vars)
    shuffled = DataSet(
        names=[data.names[k] for k in perm],
        values=data.values[:, perm],
    )
    return shuffled, perm


def simulate_cell(master_seed: int, cell: SimCell) -> tuple[Dag, SemModel, DataSet, np.ndarray]:
    """Full pipeline for one corpus cell: DAG, parameters, data, shuffle.

    Draw order within the cell's stream is fixed (edges, coefficients,
    variances, noise, permutation) so regeneration is bit-identical.
    """
    rng = Rng.for_cell(master_seed, cell)
    dag = random_dag(cell.vars, cell.avg_degree, rng)
    model = draw_params(dag, rng)
    data = simulate_recursive(model, cell.n, rng)
    shuffled, perm = shuffle_columns(data, rng)
    return dag, model, shuffled, perm


def all_cells(
    vars_levels=VARS_LEVELS,
    degree_levels=DEGREE_LEVELS,
    sample_levels=SAMPLE_LEVELS,
    runs: int = RUNS_PER_CELL,
) -> list[SimCell]:
    """The full factorial grid, 27 cells x runs by default."""
    return [
        SimCell(v, d, n, r)
        for v in vars_levels
        for d in degree_levels
        for n in sample_levels
        for r in range(runs)
    ]
