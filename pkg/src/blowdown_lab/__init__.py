"""blowdown-lab: exact homology-lattice calculus for rational blowdowns,
fiber sums, Seiberg-Witten basic-class bookkeeping, and the geography of
simply connected symplectic 4-manifolds with one basic class.

All arithmetic is exact (integers and rationals); every value is immutable
and every operation is a pure function.
"""

from .errors import ConsistencyError, DomainError
from .exact_lattice import (
    HomClass,
    IntLattice,
    RationalClass,
    express_in_basis,
    format_class,
    gram_of,
    orthogonal_complement,
    pair,
    solve_class,
    span_lattice,
    square,
)
from .geography import (
    Recipe,
    construct_Xp,
    construct_Xp_prime,
    construct_Xpk,
    construct_Xpk_prime,
    construct_Z,
    construction1_recipe,
    execute_recipe,
    geography_recipe,
    geography_sweep,
)
from .manifold_ledger import (
    EmbeddedSurface,
    ManifoldLedger,
    adjunction_genus,
    blow_down,
    blow_up,
    make_ledger,
    noether_flags,
    noether_position,
    push_forward,
)
from .rational_surfaces import (
    build_E,
    build_R,
    build_S,
    build_Sprime,
    horizontal_fiber_class,
    smooth_double_points,
)
from .surgery_calculus import (
    ConfigCn,
    SurgeryRecipe,
    assemble_minus4_sphere,
    fiber_sum,
    find_configs,
    rational_blowdown,
    verify_config,
    verify_prop_P,
    verify_prop_Pprime,
)
from .sw_bookkeeping import (
    BasicClassSet,
    SWLatticeFragment,
    adjunction_zero_check,
    basic_classes_E,
    blowup_formula,
    canonical_class_E_blowup,
    config_in_E_blowup,
    lead_sphere_class,
    taut_filter,
    taut_filter_counts,
)

__version__ = "0.1.0"
