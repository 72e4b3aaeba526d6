"""Executable combinatorics of bubble-tree compactified instanton moduli:
stratification posets and flip resolution, weighted configuration
degeneration limits, exact equivariant localization residues, and the b+=1
wall-crossing polynomial structure."""

from .exact_algebra import (
    EquivariantLaurent,
    GradedPolynomial,
    GradedSymbol,
    Rational,
    constant_u_term,
    laurent_mul,
    poly_truncate,
)
from .bubble_trees import (
    BubbleTree,
    StratumInfo,
    canonical_form,
    contract,
    cut_at_end,
    ends,
    enumerate_trees,
    ghost_vertices,
    psi_contraction,
    stratum_info,
    total_charge,
    tree_leq,
    validate_tree,
)
from .notation import parse_config, parse_tree, print_config, print_tree
from .fm_config import (
    LimitStratum,
    PolynomialFamily,
    WeightedConfiguration,
    balance_class,
    balanced_check,
    enumerate_fm_strata,
    limit_stratum,
    stratum_format,
)
from .flip_resolution import (
    FlipEvent,
    StratumPoset,
    audit_dimensions,
    build_poset,
    exceptional_assignment,
    flip_step,
    resolve,
)
from .localization import (
    FixedLocusDatum,
    PushforwardRules,
    apply_pushforward,
    boundary_pairing,
    euler_invert,
    localize_sum,
    spin_substitute,
)
from .wallcross import (
    DeltaParams,
    DeltaPolynomial,
    IntersectionForm,
    PeriodPoint,
    Wall,
    delta_assemble,
    delta_block,
    enumerate_walls,
    epsilon,
    is_p_type_wall,
    wall_crossing_difference,
    wall_invariants,
)

__version__ = "0.1.0"
