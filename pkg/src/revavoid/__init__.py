"""Verification toolkit for avoidability of formulas with reversal."""
from .bounds import BoundReport, amplification_ratio, derive_caps, solve_symmetric_system
from .formulas import (
    Assignment,
    Formula,
    FormulaSyntaxError,
    SearchBudgetExceeded,
    avoids,
    find_occurrence,
    flatten,
    instantiate,
    is_occurrence,
    longest_avoiding,
    parse_formula,
    phi,
    psi,
    reversal_symmetric,
    serialize,
)
from .generator import EnumerationSpec, count_free, enumerate_free, iter_free, lex_least_free, sample_free
from .morphisms import UniformMorphism, apply, paper_morphism_9, paper_morphism_21, parse_morphism, psi_morphism
from .replay import (
    ReplayReport,
    construct_phi_occurrence,
    rauzy_graph,
    replay_formula_nonoccurrence,
    replay_nonavoid2,
    replay_psi,
    replay_theorem,
    replay_theorem1_lower,
    replay_theorem1_upper,
    replay_transfer,
    shortest_circuit,
)
from .words import (
    Alphabet,
    FactorIndex,
    FreenessSpec,
    RepetitionWitness,
    directedness,
    is_d_directed,
    is_free,
    max_exponent_violation,
    periodic_word,
    reverse,
)

__version__ = "0.1.0"
