"""Toy-scale CNN harness for kaleidoscope image datasets.

Reads manifest JSON plus PGM/PNG images produced by the rendering
pipeline, trains a small configurable CNN, and writes predictions in the
shared wire schema for the pipeline's eval command to score.
"""

from .data import HarnessDataset, SplitTensors, load_dataset
from .errors import ConfigError, DataError, HarnessError
from .model import (
    CHANNEL_WIDTHS,
    CnnClassifier,
    CnnSpec,
    build_model,
    pooled_size,
    spatial_chain,
)
from .train import TrainConfig, train_and_predict

__version__ = "0.1.0"
