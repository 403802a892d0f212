"""topomargin: point clouds -> persistence diagrams -> margin classifiers.

Pipeline stages, one module each: ingest (PDB/xyz parsing, contact
graphs), embed (graph -> point cloud), persistence (Vietoris-Rips
diagrams), metrics (diagram distances), vectorize (feature vectors),
classify (soft-margin QP), harness (benchmark protocol), synth (synthetic
ground-truth data). Hot kernels run through topomargin.backend, which
picks the compiled extension when built and an equivalent pure-Python
fallback otherwise.
"""

from . import backend, vectorize
from .classify import (
    ConvergenceError,
    InfeasibleError,
    LabeledSet,
    MarginModel,
    QPProblem,
    assemble_qp,
    predict,
    solve_qp,
    train,
)
from .embed import (
    EmbeddingConfig,
    WalkCorpus,
    embed_graph,
    generate_walks,
    spectral_embedding,
    train_embedding,
)
from .harness import (
    EvalConfig,
    EvalReport,
    SplitError,
    evaluate,
    misclass_report,
    predict_function,
    split,
)
from .ingest import (
    ContactGraph,
    EmptyStructureError,
    ParseError,
    PointCloud,
    contact_graph,
    parse_pdb,
    parse_structure,
    parse_xyz,
    write_xyz,
)
from .metrics import (
    DistanceMatrix,
    component_distance,
    diagram_distance,
    distance_matrix,
    truncate_infinities,
)
from .persistence import (
    Filtration,
    PersistenceDiagram,
    ResourceLimitError,
    compute_persistence,
    filter_noise,
    load_diagram,
    rips_filtration,
    save_diagram,
)
from .synth import noisy_circle, synth_dataset, two_blobs
from .vectorize import (
    FeatureVector,
    bs_vectorize,
    stats_vector_1,
    stats_vector_2,
    stats_vector_3,
)

__version__ = "0.1.0"

__all__ = [
    "backend",
    "ConvergenceError", "InfeasibleError", "LabeledSet", "MarginModel",
    "QPProblem", "assemble_qp", "predict", "solve_qp", "train",
    "EmbeddingConfig", "WalkCorpus", "embed_graph", "generate_walks",
    "spectral_embedding", "train_embedding",
    "EvalConfig", "EvalReport", "SplitError", "evaluate",
    "misclass_report", "predict_function", "split",
    "ContactGraph", "EmptyStructureError", "ParseError", "PointCloud",
    "contact_graph", "parse_pdb", "parse_structure", "parse_xyz", "write_xyz",
    "DistanceMatrix", "component_distance", "diagram_distance",
    "distance_matrix", "truncate_infinities",
    "Filtration", "PersistenceDiagram", "ResourceLimitError",
    "compute_persistence", "filter_noise", "load_diagram",
    "rips_filtration", "save_diagram",
    "noisy_circle", "synth_dataset", "two_blobs",
    "FeatureVector", "bs_vectorize", "stats_vector_1", "stats_vector_2",
    "stats_vector_3", "vectorize",
    "__version__",
]
