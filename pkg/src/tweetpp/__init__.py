"""Joint tweet purpose and position classification.

RAkEL over label-powerset linear SVMs, with KNN-based repair of predictions
that do not carry exactly one purpose and one position label.
"""

from .corpus import Dataset, LabelSpace, LabelVector, Tweet, load_dataset, save_dataset, split
from .features import PRESETS, FeatureConfig, Vocabulary, build_vocabulary, featurize, tokenize
from .kernels import BACKEND
from .rakel import EnsembleConfig, EnsembleModel, train_ensemble
from .postprocess import PostprocessConfig
from .evaluation import hamming_loss, run_comparison, sweep_k

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "PRESETS",
    "Dataset",
    "EnsembleConfig",
    "EnsembleModel",
    "FeatureConfig",
    "LabelSpace",
    "LabelVector",
    "PostprocessConfig",
    "Tweet",
    "Vocabulary",
    "build_vocabulary",
    "featurize",
    "hamming_loss",
    "load_dataset",
    "run_comparison",
    "save_dataset",
    "split",
    "sweep_k",
    "tokenize",
    "train_ensemble",
]
