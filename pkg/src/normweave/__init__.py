"""normweave: perfect-necklace construction and alphabet-extension insertion.

The library builds the combinatorial blocks of normal symbol streams
(perfect and nested perfect necklaces), transfers them to a one-symbol-larger
alphabet by liberal insertion or by sigma-only insertion, and verifies every
claimed guarantee with exact counters.
"""

from .words import (
    Alphabet,
    Word,
    aligned_occurrences,
    canonical_necklace,
    occurrences,
    rotate,
)
from .necklaces import (
    AstuteGraph,
    Necklace,
    PointedEulerianCycle,
    arithmetic_necklace,
    build_astute_graph,
    count_perfect,
    cycle_from_word,
    enumerate_perfect,
    eulerian_perfect_necklace,
    nested_perfect,
    nested_stream,
    ordered_necklace,
    perfect_stream,
)
from .analysis import (
    check_crucial,
    check_discrepancy_conversion,
    discrete_discrepancy,
    is_nested,
    is_perfect,
    is_subsequence,
    ps_statistic,
    sigma_gaps,
    star_discrepancy,
)
from .liberal import (
    DistributionGraph,
    PetalsTree,
    Section,
    build_petals_tree,
    distribution_matching,
    liberal_insert,
    liberal_insert_stream,
    sections,
)
from .onesymbol import (
    ExpansionOrder,
    ExpansionSchedule,
    expand,
    one_symbol_stream,
    paper_schedule,
    retract,
    scaled_schedule,
    sigma_positions,
    wildcard,
    wildcard_index,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
