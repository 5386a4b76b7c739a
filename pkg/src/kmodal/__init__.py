"""Decide and construct k-modal planar embeddings of digraphs."""

from .decompose import NonplanarError
from .digraph import (
    INN,
    OUT,
    Digraph,
    GraphError,
    Orientation,
    ParseError,
    RotationSystem,
    bimodal_test,
    is_k_modal,
    modalities,
    parse_digraph,
    serialize_digraph,
)
from .tuples import (
    EmbeddingTuple,
    UnsupportedInstance,
    find_embedding,
    k_modality,
    max_modality,
)

__version__ = "0.1.0"

__all__ = [
    "INN",
    "OUT",
    "Digraph",
    "EmbeddingTuple",
    "GraphError",
    "NonplanarError",
    "Orientation",
    "ParseError",
    "RotationSystem",
    "UnsupportedInstance",
    "bimodal_test",
    "find_embedding",
    "is_k_modal",
    "k_modality",
    "max_modality",
    "modalities",
    "parse_digraph",
    "serialize_digraph",
]
