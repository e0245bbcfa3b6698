"""Persistent sheaf Laplacian spectra over filtered complexes built from
charge-labeled point clouds, and mutation-site feature vectors on top."""

__version__ = "0.1.0"

from .engine import (
    PslOperator,
    SpectrumSummary,
    assemble_psl,
    parallel_map,
    psl_over_filtration,
    spectrum,
    sweep_to_dict,
    sweep_to_json,
)
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    GridMismatch,
    InputError,
    InstanceTooLarge,
    InvalidPartition,
    MalformedRecord,
    NonSymmetric,
    NotAFace,
    NumericalError,
    OverlappingPoints,
    PslapError,
    ResidueIdentityMismatch,
    ResidueNotFound,
    SemanticError,
    ZeroF,
)
from .filtration import (
    FilteredComplex,
    Simplex,
    SnapshotPair,
    build_alpha,
    build_vr,
    dump_complex,
    signed_incidence,
    snapshot_pair,
)
from .geometry import (
    DistanceSpec,
    LabeledPoint,
    LabeledPointCloud,
    euclidean_matrix,
    pairwise_distances,
)
from .oracle import (
    OracleReport,
    dense_psl,
    persistent_betti0_unionfind,
    run_verification,
)
from .protein import (
    FeatureConfig,
    MutationSpec,
    PqrAtom,
    SiteFeatureVector,
    element_pair_sets,
    feature_layout,
    featurize_site,
    parse_pqr,
    select_atom_sets,
    stats_block,
    write_features_csv,
)
from .sheaf import (
    CoboundaryMatrix,
    SheafWeighting,
    check_composition,
    coboundary_matrix,
    restriction_scalar,
)

__all__ = [
    "__version__",
    "PslOperator", "SpectrumSummary", "assemble_psl", "parallel_map",
    "psl_over_filtration", "spectrum", "sweep_to_dict", "sweep_to_json",
    "PslapError", "InputError", "NumericalError", "SemanticError",
    "OverlappingPoints", "InvalidPartition", "DegenerateInput", "NotAFace",
    "ZeroF", "DimensionMismatch", "NonSymmetric", "MalformedRecord",
    "ResidueNotFound", "ResidueIdentityMismatch", "GridMismatch", "InstanceTooLarge",
    "FilteredComplex", "Simplex", "SnapshotPair", "build_alpha", "build_vr",
    "dump_complex", "signed_incidence", "snapshot_pair",
    "DistanceSpec", "LabeledPoint", "LabeledPointCloud",
    "euclidean_matrix", "pairwise_distances",
    "OracleReport", "dense_psl", "persistent_betti0_unionfind", "run_verification",
    "FeatureConfig", "MutationSpec", "PqrAtom", "SiteFeatureVector",
    "element_pair_sets", "feature_layout", "featurize_site", "parse_pqr",
    "select_atom_sets", "stats_block", "write_features_csv",
    "CoboundaryMatrix", "SheafWeighting", "check_composition",
    "coboundary_matrix", "restriction_scalar",
]
