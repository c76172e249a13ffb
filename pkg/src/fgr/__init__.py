"""Subgroup calculus for free groups.

Words, Stallings core graphs, abelianized visibility and transfer maps,
the explicit covering-graph families, and retract-intersection
verdicts, with seeded randomized property suites and a CLI (``fgr``).
"""

from .abelian import (
    AbelianVector,
    abelianize_in_subgroup,
    ambient_vector,
    apply_projection,
    cycle_chain,
    homology_projection,
    is_visible,
    is_visible_in_subgroup,
    transfer,
)
from .constructions import (
    DihedralElement,
    dihedral_image,
    gamma_graph,
    hm_graph,
    lm_graph,
    subgroup_t_word,
    wk_square_rewrite,
    wk_word,
)
from .retracts import (
    IntersectionReport,
    RetractPresentation,
    SuiteReport,
    bergman_counterexample,
    cyclic_retract,
    cyclic_retract_check,
    intersection_report,
    random_retract,
    run_suite,
    smallest_power_in,
    suite_names,
    turner_power_word,
)
from .stallings import (
    BasisWord,
    CoreGraph,
    Edge,
    InfiniteIndexError,
    NotAMemberError,
    Permutation,
    SpanningTree,
    basis,
    canonical_relabeling,
    canonicalize,
    contains,
    coset_permutation,
    evaluate_basis_word,
    fold,
    from_generators,
    graph_from_json,
    graph_to_json,
    pullback,
    rewrite_in_basis,
    schreier_graph,
    spanning_tree,
    subgroup_index,
    subgroup_rank,
    tree_path_word,
    trivial_graph,
    walk,
)
from .words import (
    MAX_RANK,
    ParseError,
    Word,
    add_vectors,
    checked_int64,
    commutator,
    exponent_sums,
    identity,
    parse_word,
    reduce_word,
    render_word,
    substitute,
    with_rank,
)

__version__ = "0.1.0"
