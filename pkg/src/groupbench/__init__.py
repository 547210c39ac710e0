"""Finite-group construction and verification workbench."""

from .gf2 import ClosureCapExceeded, Gf2Automorphism, matrix_closure
from .groups import (
    CommutingInvolutionSequence,
    DirectProductGroup,
    Element,
    ElementaryAbelian2,
    EnumerationCapError,
    FiniteGroup,
    G2Group,
    Gf2SemidirectGroup,
    GroupMismatchError,
    SymmetricGroup,
    associativity_report,
    centralizer_count,
    commutator,
    invert,
    multiply,
    product_over,
    regular_representation,
)
from .words import (
    AlgebraicSet,
    SectionSet,
    WordTerm,
    evaluate,
    fubini_markov_positive_part,
    parse_word,
    print_word,
    section,
    solution_count,
    solution_density,
)
from .crbuild import (
    CRParams,
    CRWitness,
    build_g1,
    build_g2,
    build_pi,
    build_toy_g2,
    check_params,
    relation_check,
    smallest_params,
    toy_witness,
    verify_pi,
)
from .verify import (
    CountReport,
    CrucialWitness,
    PartitionReport,
    check_b_partition,
    check_cr_axioms,
    check_equation_star,
    count_x_naive,
    count_x_structured,
    crucial_witness,
    find_partition_istar,
)
from .measure import (
    CylinderSet,
    ProductTruncation,
    ProfileParams,
    Slalom,
    Tower,
    build_witness_cbar,
    cylinder_measure,
    parse_profile,
    slalom_cover_bounds,
    tail_cover_measure,
    tower_cmp,
    validate_profile,
    x_cbar,
)

__version__ = "0.1.0"
