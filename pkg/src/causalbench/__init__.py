"""Benchmark suite for causal structure discovery on linear Gaussian data."""

from .graph import (
    ARROW,
    TAIL,
    CycleError,
    Dag,
    Endpoint,
    MixedGraph,
    adjacent,
    consistent_extension,
    cpdag_of,
    d_separated,
    meek_closure,
    topological_order,
)
from .indtest import (
    CollinearityError,
    CorrMatrix,
    DsepOracleTest,
    FisherZTest,
    IndResult,
    correlation_matrix,
    fisher_z_test,
    partial_correlation,
)
from .simulate import (
    DataSet,
    Rng,
    SemModel,
    SimCell,
    draw_params,
    random_dag,
    shuffle_columns,
    simulate_cell,
    simulate_recursive,
)
from .score import (
    DsepOracleScore,
    FisherZScore,
    SemBicScore,
    dsep_oracle_delta,
    fisher_z_local_delta,
    sem_bic_local,
)
from .pc import (
    ConflictRule,
    OrientationStrategy,
    PcVariant,
    SepsetMap,
    TripleMark,
    TripleStatus,
    adjacency_search,
    classify_triple,
    make_variant,
    orient_colliders_cpc,
    orient_colliders_maxp,
    orient_colliders_sepset,
    run_pc,
)
from .fges import (
    FgesConfig,
    apply_delete,
    apply_insert,
    fges_search,
    rebuild_pattern,
    valid_delete,
    valid_insert,
)
from .metrics import (
    ConfusionCounts,
    adjacency_confusion,
    arrowhead_confusion,
    confusion_counts,
    matthews,
    precision_recall,
)

__all__ = [name for name in dir() if not name.startswith("_")]
