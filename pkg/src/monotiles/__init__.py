"""Congruent Folner ladders of monotiles, hierarchical block subshifts over
them, and exact finite-depth approximants of their invariant-measure simplex.
"""

from .analysis import (
    CosetAddress,
    CylinderId,
    KRReport,
    SyndeticityReport,
    address,
    boundary_mass_bound,
    check_partitions,
    return_times,
    scan_occurrences,
    syndeticity_window,
)
from .blocks import (
    Assignment,
    BlockHierarchy,
    C3Report,
    Pattern,
    assemble_level,
    assignment_from_matrix,
    augment_matrix,
    base_blocks,
    build_hierarchy,
    verify_c3,
    x0_patch,
)
from .errors import (
    AugmentationError,
    ConfigError,
    DistinctnessError,
    EncodingError,
    HypothesisError,
    InfeasibleError,
    InvarianceUnreachableError,
    MonotileError,
    NotCosetRepsError,
    OutOfWindowError,
    RenderUnsupportedError,
    SelectionExhaustedError,
    UnsupportedGroupError,
)
from .folner import (
    CongruenceReport,
    FolnerLadder,
    InvarianceReport,
    build_abelian_chain_ladder,
    build_heisenberg_ladder,
    build_lattice_ladder,
    build_pruefer_ladder,
    check_congruent,
    compose_exact_sequence,
    extend_virtually,
    first_level_containing,
    folner_defect,
    group_ladder,
    invariance_table,
    iterated_glue,
    map_ladder,
    right_invariance_defect,
)
from .groups import (
    Cyclic,
    DirectProduct,
    FiniteExtension,
    FiniteSubset,
    GroupContext,
    Heisenberg,
    Lattice,
    Pruefer,
    Rationals,
    context_from_descriptor,
    product_set,
    standard_generators,
)
from .matrices import (
    ManagedMatrix,
    ManagedSequence,
    group_matrices,
    positivity_horizon,
    select_subsequence_lemma8,
)
from .pipeline import (
    DEFAULT_CONFIG,
    PipelineConfig,
    RunReport,
    StageResult,
    run_pipeline,
)
from .simplex import (
    NestingCertificate,
    RealizationResult,
    SimplexApproximant,
    SimplexPoint,
    approximate_limit,
    check_nesting,
    hull_contains,
    incidence_from_hierarchy,
    push,
    realize_finite_simplex,
    standard_vertices,
    tail_cluster_diameters,
)
from .cli import render_pattern

__version__ = "0.1.0"
