"""Corpus analytics for online hate speech: featurization, shallow classifiers,
keyword and collocation extraction, embeddings, lexicon profiling and reports."""

from hatescope.errors import (
    DataError,
    DatasetError,
    FormatError,
    HatescopeError,
    ParameterError,
    PersistenceError,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "DatasetError",
    "FormatError",
    "HatescopeError",
    "ParameterError",
    "PersistenceError",
    "__version__",
]
