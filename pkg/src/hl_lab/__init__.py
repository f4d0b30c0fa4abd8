"""Finitary Halpern-Lauchli laboratory.

Truncated rooted trees, strong subtrees, dense-witness searches, least
witness heights, tail-cone fusion, a dimension-raising pipeline,
polarized partition constructions with their degree calculators, and a
small algebra of forcing-style conditions.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    CapExceededError,
    HLError,
    IncompatibleConditionsError,
    InvalidInputError,
    OracleContradictionError,
    OutOfRangeError,
    PreconditionError,
    UnknownNodeError,
    UnsupportedAlphabetError,
)
from .conditions import (
    Condition,
    DeltaSystemOutcome,
    WMap,
    WMapLawReport,
    build_w_map,
    compatible,
    condition_leq,
    copying_action,
    delta_system,
    glb,
    restrict_condition,
    verify_wmap_laws,
)
from .polarized import (
    AlmostAllReport,
    DegreeTable,
    LowerBoundReport,
    PolarizedOutcome,
    TupleType,
    almost_all_homogenize,
    build_degree_table,
    devlin_lower_bound,
    height_permutation_coloring,
    permutation_rank,
    polarized_search,
    tangent,
    tuple_type,
    validate_splitting_tree,
    verify_lower_bound,
)
from .search import Caps
from .tailcone import (
    ColoringFamily,
    FuseOutcome,
    GrowOutcome,
    HLOutcome,
    InductionOutcome,
    PartialOutcome,
    TailConeCertificate,
    apply_tailcone_partial,
    check_partial_tailcone,
    check_tail_cone,
    dimension_induction,
    fuse,
    grow_shared_subtrees,
    hl_search,
)
from .subtrees import (
    SubtreeReport,
    ValidationResult,
    enumerate_strong_subtrees,
    subtree_restrict,
    trim,
    validate_strong_subtree,
)
from .trees import TreeSpace, lex_compare, lex_sorted, restrict, sort_nodes
from .witness import (
    BuildOutcome,
    Coloring,
    DefaultLargenessOracle,
    FiniteHLReport,
    SDHLWitness,
    SomewhereDenseWitness,
    antichain_split_coloring,
    build_monochromatic_subtree,
    check_dshl_witness,
    check_hl_strong_subtree,
    check_sdhl_witness,
    check_somewhere_dense_witness,
    coloring_from_json,
    constant_coloring,
    dshl_search,
    expr_coloring,
    finite_hl_number,
    level_parity_coloring,
    random_table_coloring,
    sdhl_prime_search,
    sdhl_search,
    seeded_hash_coloring,
    table_coloring,
)

__all__ = [
    "Caps",
    "TreeSpace",
    "SubtreeReport",
    "ValidationResult",
    "Coloring",
    "SDHLWitness",
    "SomewhereDenseWitness",
    "FiniteHLReport",
    "BuildOutcome",
    "DefaultLargenessOracle",
    "HLError",
    "InvalidInputError",
    "UnsupportedAlphabetError",
    "OutOfRangeError",
    "UnknownNodeError",
    "PreconditionError",
    "IncompatibleConditionsError",
    "OracleContradictionError",
    "CapExceededError",
    "lex_compare",
    "lex_sorted",
    "sort_nodes",
    "restrict",
    "validate_strong_subtree",
    "enumerate_strong_subtrees",
    "trim",
    "subtree_restrict",
    "table_coloring",
    "constant_coloring",
    "level_parity_coloring",
    "antichain_split_coloring",
    "seeded_hash_coloring",
    "expr_coloring",
    "random_table_coloring",
    "coloring_from_json",
    "check_sdhl_witness",
    "sdhl_search",
    "check_dshl_witness",
    "dshl_search",
    "check_hl_strong_subtree",
    "check_somewhere_dense_witness",
    "sdhl_prime_search",
    "finite_hl_number",
    "build_monochromatic_subtree",
    "ColoringFamily",
    "TailConeCertificate",
    "GrowOutcome",
    "FuseOutcome",
    "PartialOutcome",
    "HLOutcome",
    "InductionOutcome",
    "grow_shared_subtrees",
    "fuse",
    "check_tail_cone",
    "apply_tailcone_partial",
    "check_partial_tailcone",
    "hl_search",
    "dimension_induction",
    "tangent",
    "devlin_lower_bound",
    "DegreeTable",
    "build_degree_table",
    "permutation_rank",
    "TupleType",
    "tuple_type",
    "height_permutation_coloring",
    "LowerBoundReport",
    "verify_lower_bound",
    "AlmostAllReport",
    "almost_all_homogenize",
    "PolarizedOutcome",
    "polarized_search",
    "validate_splitting_tree",
    "Condition",
    "restrict_condition",
    "condition_leq",
    "compatible",
    "glb",
    "copying_action",
    "DeltaSystemOutcome",
    "delta_system",
    "WMap",
    "WMapLawReport",
    "build_w_map",
    "verify_wmap_laws",
]
