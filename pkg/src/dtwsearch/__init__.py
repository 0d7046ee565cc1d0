"""Exact DTW nearest-neighbor retrieval with LB_Keogh / LB_Improved pruning."""

from .bounds import lb_improved, lb_keogh, project
from .core import (
    INF,
    DataFormatError,
    Dataset,
    EmptyDatabaseError,
    InvalidInputError,
    SearchParams,
    UnsupportedExponentError,
    lp_dist,
    lp_norm,
    point_interval_dist,
)
from .datagen import Family, GeneratorSpec, generate, generate_database
from .dtw import WarpingPath, cost_matrix, dtw, dtw_bruteforce
from .envelope import Envelope, envelope_naive, envelope_streaming
from .io import load_dataset, save_dataset
from .reduction import Hyperrectangle, PiecewiseCover, envelope_rect, make_cover, project_series, rect_dist_l1
from .rtree import CandidateStream, RTreeIndex
from .search import (
    SearchOutcome,
    Strategy,
    build_index,
    nearest_neighbor,
    nn_exhaustive,
    nn_indexed,
    nn_linear_improved,
    nn_linear_keogh,
)

__version__ = "0.1.0"
