"""Half-space proximal neighborhoods, the classifiers built on them, and
exact/approximate k-nearest-neighbor baselines with weighted voting."""

from .bench import (
    CSV_HEADER,
    ExperimentConfig,
    ExperimentReport,
    ResultRow,
    accuracy_curve,
    best_accuracy,
    config_from_json,
    format_row,
    report_to_csv,
    run_experiment,
    split_dataset,
    summarize_max,
    total_variation,
    write_report_csv,
)
from .classifiers import (
    AsymptoticHspClassifier,
    HspClassifier,
    KnnClassifier,
    ProbabilisticAsymptoticHspClassifier,
    ProbabilisticKnnClassifier,
    classify_asymptotic_hsp,
    classify_hsp,
    classify_knn,
    classify_probabilistic_asymptotic_hsp,
    classify_probabilistic_knn,
)
from .dataset import (
    FeatureVector,
    LabeledDataset,
    distance,
    dists_to,
    sq_dists_to,
)
from .errors import (
    ContractViolationError,
    DataError,
    DimensionMismatchError,
    DisconnectedGraphError,
    EmptyCandidatesError,
    EmptyDatasetError,
    EmptyNeighborhoodError,
    FormatError,
    HspError,
    StaleIndexError,
)
from .hsp import (
    HspGraph,
    Neighborhood,
    build_hsp_graph,
    check_neighborhood,
    empirical_stretch,
    euclidean_mst,
    hsp_neighbors,
    out_degree_stats,
    verify_mst_containment,
)
from .index import (
    IndexParams,
    SmallWorldIndex,
    ann_search,
    build_index,
    recall_at_k,
)
from .io import (
    load_dataset,
    load_fvecs,
    load_labels,
    load_vectors,
    save_fvecs,
    save_labels,
)
from .knn import KnnResult, knn_search
from .synthetic import GeneratorSpec, generate
from .voting import (
    Prediction,
    VoteRule,
    resolve_winner,
    tally_and_predict,
    vote_weights,
)

__version__ = "0.1.0"
