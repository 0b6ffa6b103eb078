"""Cell complex neural networks.

Combinatorial cell complexes, their boundary / adjacency operators,
message passing forward passes and cell embedding trainers.
"""

from . import errors, fixtures, io, kernels
from .complex import Cell, CellComplex, ValidationReport, build_complex, build_polygonal, build_simplicial, validate
from .errors import CxnError
from .message_passing import (
    AffineLayer,
    AffineStack,
    CcxnWeights,
    FeatureMap,
    SchemeConfig,
    aggregate,
    ccxn_forward,
    cxn_forward,
    cxn_forward_hodge,
    hodge_neighborhood,
    init_scheme_config,
)
from .operators import (
    SparseMatrix,
    adjacency_matrix,
    boundary_matrix,
    coadjacency_matrix,
    degree_matrix,
    normalized_operator,
)
from .representation import (
    EmbeddingTable,
    SimilarityMeasure,
    TrainConfig,
    WalkCorpus,
    cooccurrence,
    decode,
    generate_walks,
    gradients,
    loss_per_dim,
    loss_total,
    similarity_from_adjacency,
    train_embeddings,
)

__version__ = "0.1.0"
