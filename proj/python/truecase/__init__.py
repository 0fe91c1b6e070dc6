"""Character-level truecaser (CNN + BiLSTM + CRF)."""

from ._truecase import (
    FormatError,
    Model,
    NumericError,
    baseline,
    derive_labels,
    gradcheck,
    train,
)

__all__ = [
    "FormatError",
    "Model",
    "NumericError",
    "baseline",
    "derive_labels",
    "gradcheck",
    "train",
]
