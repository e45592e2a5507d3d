"""Time series clustering through similarity networks and community detection.

Pipeline: z-normalize a dataset, compute a pairwise distance matrix under
one of ten measures, build a k-NN or eps-NN graph, then detect communities
to obtain the clusters. Baseline partitional/hierarchical algorithms and a
Rand-index sweep harness are included for comparisons.
"""

from .baselines import Dendrogram, agglomerative, cut, diana, pam
from .communities import (
    Algorithm,
    detect,
    fast_greedy,
    infomap,
    label_propagation,
    map_equation,
    modularity,
    multilevel,
    walktrap,
)
from .datasets import generate_cbf, generate_two_patterns, load_ucr, save_ucr
from .distances import (
    DistanceMatrix,
    DistanceMeasure,
    MeasureKind,
    cid_distance,
    cor_distance,
    dissim_distance,
    distance_matrix,
    dtw_distance,
    dwt_distance,
    intper_distance,
    lp_distance,
    pair_distance,
    sts_distance,
)
from .errors import (
    DegenerateInputError,
    FormatError,
    InvalidInputError,
    LengthMismatchError,
    ParameterError,
    TsnetclustError,
)
from .evaluation import (
    SweepResult,
    SummaryRow,
    baseline_best_ri,
    derive_seed,
    rand_index,
    summarize,
    sweep_eps,
    sweep_k,
    truth_partition,
)
from .network import Graph, GraphMethod, components, eps_graph, knn_graph, write_edge_list
from .partition import Partition, write_partition
from .series import Dataset, TimeSeries, normalize_dataset, z_normalize

__version__ = "0.1.0"
