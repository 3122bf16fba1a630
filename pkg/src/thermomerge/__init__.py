"""Entropy-deformed tropical semirings over syntax trees: tree embeddings in
sampled function spaces, workspace coproducts with a merge Markov chain, and
a sinusoidal phase-synchronization realization with term recovery."""

from .semiring import (
    INF,
    RY2,
    ExpansionFit,
    InfoMeasure,
    SemiringError,
    ThermoParams,
    beta_expansion_probe,
    entropy,
    lambda_min_ry2,
    max_entropy,
    odot,
    oplus,
    parse_measure,
    renyi,
    shannon,
    successor,
    successor_inverse,
    tsallis,
)
from .syntree import (
    HeadMarking,
    Leaf,
    LexItem,
    Lexicon,
    Node,
    SynTree,
    TreeError,
    Workspace,
    accessible_terms,
    enumerate_trees,
    first_child_marking,
    format_tree,
    head_paths,
    leaf,
    leaves,
    merge,
    parse_tree,
    quotient,
    quotient_many,
    workspace,
)
from .treeval import argmin_lambda, bracket_eval, bracket_eval_lambda, coeffs, tree_entropy
from .embed import (
    AuditReport,
    EmbeddingError,
    FuncVec,
    LexEmbedding,
    SampleGrid,
    embed_tree,
    embed_tree_with_lambdas,
    generate_embedding,
    high_temp_beta,
    injectivity_audit,
    load_embedding_csv,
    save_embedding_csv,
    wall_crossing_check,
)
from .workspace import (
    CoproductTerm,
    MarkovTrajectory,
    WorkspaceSum,
    circuit_value,
    coproduct,
    markov_sample,
    merge_chain_step,
    pi2,
    targeted_merge,
)
from .waves import (
    ExtractionReport,
    PhaseExtractionError,
    SyncNode,
    SyncResult,
    Wave,
    WaveError,
    WavePacket,
    extract_pair,
    extraction_errors,
    fft_phase_recovery,
    freq_multipliers,
    multibeta_extract,
    product_phase_candidates,
    recovery_grid,
    resolve_principal,
    sync_pair,
    sync_tree,
    wave_merge_operator,
    workspace_wave,
    wrap_phase,
)

__version__ = "0.1.0"
