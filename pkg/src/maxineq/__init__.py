"""Numerical verification of maximal inequalities and strong laws of large numbers
for dependent random sequences."""

from .process_models import PathEnsemble, ProcessModel, generate, stream_paths, theoretical_bound
from .sequence_calculus import NormalizerSequence, WeightSequence, constant_transfer

__all__ = ["PathEnsemble", "ProcessModel", "generate", "stream_paths", "theoretical_bound",
           "NormalizerSequence", "WeightSequence", "constant_transfer"]
__version__ = "0.1.0"
