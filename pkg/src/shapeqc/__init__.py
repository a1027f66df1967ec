"""shapeqc: quality assessment for 3D organ-shape point clouds.

Pipeline: load or synthesize triangle meshes, sample area-weighted surface
point clouds, extract 14 geometric features, train classical classifiers to
call each shape Good or Bad, score rater agreement (accuracy, macro F1,
Cohen's kappa), and explain predictions with exact interventional Shapley
attributions rendered as a beeswarm summary plot.
"""

from ._kernels import BACKEND
from .classifiers import (
    DEFAULTS,
    KINDS,
    Prediction,
    StandardizationStats,
    TrainedModel,
    fit,
    load_model,
    model_from_json,
    model_to_json,
    predict,
    predict_batch,
    save_model,
    score_matrix,
)
from .corpus import (
    DEFAULT_FRACTIONS,
    DEFECT_KINDS,
    CorpusItem,
    CorpusManifest,
    DefectSpec,
    LabeledDataset,
    QualityLabel,
    SourceCategory,
    map_label,
    read_features_csv,
    read_reference_csv,
    read_split_csv,
    split_dataset,
    split_sizes,
    write_features_csv,
    write_split_csv,
)
from .errors import (
    DegenerateMeshError,
    EmptyCloudError,
    EmptyEvaluationError,
    EmptyMeshError,
    FaceIndexError,
    InvalidSpecError,
    LengthMismatchError,
    ParseError,
    SchemaMismatchError,
    ShapeQCError,
    TooFewRowsError,
)
from .explain import (
    DEFAULT_BACKGROUND,
    Attribution,
    BackgroundSet,
    shapley_exact,
    shapley_sampled,
    summary_table,
    write_attributions_csv,
    write_summary_csv,
)
from .beeswarm import render_beeswarm
from .features import (
    FEATURE_NAMES,
    N_FEATURES,
    FeatureVector,
    extract_features,
    feature_matrix,
)
from .manifest import RunManifest
from .mesh_io import (
    PointCloud,
    TriangleMesh,
    load_mesh,
    load_point_cloud,
    save_mesh,
    save_point_cloud,
)
from .metrics import (
    AgreementReport,
    ConfusionMatrix,
    ModelAgreement,
    accuracy,
    agreement_row,
    cohens_kappa,
    f1_macro,
    labels_from_predictions,
    prediction_rates,
    render_rates,
)
from .sampler import SamplerConfig, face_areas, sample_surface
from .synth import (
    DEFAULT_DEFECT_MIX,
    MAGNITUDE_RANGES,
    GeneratedShape,
    generate_corpus,
    generate_shape,
    icosphere,
    write_corpus,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # mesh and cloud IO
    "TriangleMesh",
    "PointCloud",
    "load_mesh",
    "save_mesh",
    "load_point_cloud",
    "save_point_cloud",
    # sampling
    "SamplerConfig",
    "sample_surface",
    "face_areas",
    # features
    "FEATURE_NAMES",
    "N_FEATURES",
    "FeatureVector",
    "extract_features",
    "feature_matrix",
    # corpus and labels
    "QualityLabel",
    "SourceCategory",
    "map_label",
    "DefectSpec",
    "DEFECT_KINDS",
    "LabeledDataset",
    "DEFAULT_FRACTIONS",
    "split_sizes",
    "split_dataset",
    "write_features_csv",
    "read_features_csv",
    "write_split_csv",
    "read_split_csv",
    "read_reference_csv",
    "CorpusItem",
    "CorpusManifest",
    # synthetic shapes
    "icosphere",
    "generate_shape",
    "generate_corpus",
    "write_corpus",
    "GeneratedShape",
    "DEFAULT_DEFECT_MIX",
    "MAGNITUDE_RANGES",
    # classifiers
    "KINDS",
    "DEFAULTS",
    "fit",
    "predict",
    "predict_batch",
    "score_matrix",
    "TrainedModel",
    "Prediction",
    "StandardizationStats",
    "save_model",
    "load_model",
    "model_to_json",
    "model_from_json",
    # metrics
    "ConfusionMatrix",
    "accuracy",
    "f1_macro",
    "cohens_kappa",
    "prediction_rates",
    "render_rates",
    "ModelAgreement",
    "AgreementReport",
    "agreement_row",
    "labels_from_predictions",
    # explanation
    "BackgroundSet",
    "Attribution",
    "DEFAULT_BACKGROUND",
    "shapley_exact",
    "shapley_sampled",
    "summary_table",
    "write_attributions_csv",
    "write_summary_csv",
    "render_beeswarm",
    # run manifests
    "RunManifest",
    # errors
    "ShapeQCError",
    "ParseError",
    "FaceIndexError",
    "EmptyMeshError",
    "DegenerateMeshError",
    "EmptyCloudError",
    "InvalidSpecError",
    "TooFewRowsError",
    "SchemaMismatchError",
    "LengthMismatchError",
    "EmptyEvaluationError",
]
