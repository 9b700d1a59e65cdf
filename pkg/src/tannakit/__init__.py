"""tannakit: exact relative simplicial homology, Basic-Lemma filtrations,
Cech total-complex models and diagram Tannaka duality, with machine-checkable
certificates for everything computed."""

__version__ = "0.1.0"

from .linalg import (                                           # noqa: F401
    QQ, ZZ, FgModule, Matrix, ModuleMap, SmithForm, Subquotient, dual_map,
    kernel, smith_normal_form, solve_in_submodule, subquotient,
)
from .simplicial import (                                       # noqa: F401
    ChainComplex, SimplicialComplex, SimplicialMap, SimplicialPair,
    cech_total_complex, ez_aw_maps, induced_map_on_homology, les_exactness,
    product_pair, relative_chain_complex, relative_cup_product,
    relative_homology, triple_boundary,
)
from .filtration import (                                       # noqa: F401
    Filtration, compare_filtration_homology, filtration_complex,
    find_very_good_refinement, is_very_good_pair, product_filtration,
    pushforward_filtration, very_good_report,
)
from .tannaka import (                                          # noqa: F401
    CoalgebraTrunc, Diagram, DiagramRep, EndAlgebra, Subdiagram,
    build_pairs_diagram, coaction, dual_coalgebra, end_algebra,
    factorization_check, transition_map,
)
from .bialgebra import (                                        # noqa: F401
    PairsContext, TauIso, bialgebra_axiom_check, kunneth_tau,
    product_on_truncations, sigma_directed_system, sigma_element,
)
from .comodule import (                                         # noqa: F401
    Comodule, check_comodule_axioms, extended_comodule, tensor_comodules,
    torsionfree_cover,
)
from .corpus import Corpus, load_corpus                         # noqa: F401
