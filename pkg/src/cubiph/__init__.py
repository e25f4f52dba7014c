"""Cubical persistent homology of grey-scale images.

Pipeline: image -> cubical complex -> filtration -> boundary matrix ->
reduction -> persistence diagrams -> feature vectors, plus dataset
statistics, graph/label export, a brute-force verification oracle, and a
batch CLI (``cubiph``).
"""

from .boundary import (
    BoundaryMatrix,
    CellGraph,
    build_boundary_matrix,
    export_cc_graph,
    export_fcc_graph,
    fcc_weight_matrix,
    symmetrize,
)
from .cubical import (
    CubicalComplex,
    Filtration,
    build_cubical_complex,
    build_filtration,
    validate_filtration,
)
from .errors import (
    CorruptFileError,
    CubiphError,
    DomainError,
    FormatError,
    InvalidOrderError,
    OracleScopeError,
    ParameterError,
    TruncatedStreamError,
)
from .features import (
    BlobSummary,
    PersistenceImage,
    PIParams,
    TropicalVector,
    bar_lengths,
    binary_bar_feature,
    count_blobs,
    fourier_coefficients,
    mean_bar_length,
    persistence_image,
    persistence_image_averaged,
    tropical_coordinates,
)
from .ingest import (
    GreyImage,
    LabeledDataset,
    RawImage,
    grey_from_raw,
    load_cifar10,
    load_csv_image,
    load_idx,
    load_pgm,
    rgb_to_grey,
)
from .oracle import (
    BettiCurves,
    betti_curve_bruteforce,
    betti_curve_from_diagrams,
    tropical_bruteforce,
)
from .reduction import (
    DiagramSet,
    PersistencePair,
    Reduction,
    compute_ph,
    extract_diagrams,
    read_diagrams,
    reduce_matrix,
    write_diagrams,
)
from .stats import DatasetStats, compute_stats, stats_from_feature_csv

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
