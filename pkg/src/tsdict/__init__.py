"""Dictionary-based time series classification.

Bag-of-words classifiers built from symbolic words of sliding windows (BOP,
BOSS and their component swaps, SAXVSM), spatial-pyramid BOSS, bag of
temporal SIFT words, plus UCR data handling and rank-based comparison.
"""

from .bagging import Approx, BagConfig, Disc, bag_dataset, bag_series
from .botsw import BOTSW, BotswGrid
from .classifiers import SAXVSM, VARIANTS, DictionaryClassifier, ParameterGrid, make_variant
from .data import LabeledDataset, generate_dictionary_data, read_ucr, read_ucr_split, stratified_resample
from .persistence import load_model, save_model
from .pyramid import SpatialPyramidBOSS

__version__ = "0.1.0"

__all__ = [
    "Approx",
    "BagConfig",
    "Disc",
    "bag_dataset",
    "bag_series",
    "BOTSW",
    "BotswGrid",
    "SAXVSM",
    "VARIANTS",
    "DictionaryClassifier",
    "ParameterGrid",
    "make_variant",
    "LabeledDataset",
    "generate_dictionary_data",
    "read_ucr",
    "read_ucr_split",
    "stratified_resample",
    "load_model",
    "save_model",
    "SpatialPyramidBOSS",
]
