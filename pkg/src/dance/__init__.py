"""Kaleidoscopic chaos-game images for protein sequences, plus a desk-scale
classification and evaluation pipeline."""

from .cgr import CgrWalk, FcgrGrid, cgr_walk, fcgr_grid
from .classify import (
    KnnModel,
    LogRegConfig,
    LogRegModel,
    Prediction,
    PredictionSet,
    knn_fit,
    knn_predict,
    load_model,
    logreg_predict,
    logreg_train,
    save_model,
)
from .errors import ConfigError, DanceError, DataError
from .features import (
    FeatureMatrix,
    FeatureVector,
    fcgr_features,
    ohe_decode,
    ohe_encode,
    pixels_features,
)
from .kaleidoscope import (
    COORDINATE_TABLE,
    KaleidoscopeParams,
    SegmentSet,
    coordinate_rule,
    generate_kaleidoscope,
    segment_count_oracle,
)
from .metrics import (
    EvalReport,
    binary_auc,
    classification_metrics,
    confusion_matrix,
    roc_auc_ovr,
)
from .raster import (
    RasterImage,
    Viewport,
    draw_segment,
    fit_viewport,
    pgm_bytes,
    rasterize,
    rasterize_points,
    read_pgm,
    read_png,
    write_pgm,
    write_png,
)
from .rng import SplitMix64
from .seqdata import (
    ALPHABET,
    DatasetManifest,
    ManifestEntry,
    ProteinSequence,
    SplitSpec,
    manifest_from_sequences,
    parse_fasta,
    parse_labels_csv,
    per_class_test_counts,
    stratified_split,
    synth_dataset,
    write_fasta,
)

__version__ = "0.1.0"
