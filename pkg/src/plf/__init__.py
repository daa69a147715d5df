"""plf: proof search and verification for pure logical frameworks.

A deductive system is a typed context-free expression grammar plus a set of
axiomatic assertions; nothing about any particular logic is baked in.  The
package provides a goal-directed proof-search engine built on unification of
substitution sets, an independent witness-checking verifier, and a
brute-force saturation oracle for cross-validation at desk scale.
"""

from .errors import (
    AmbiguousParseError,
    DuplicateIdError,
    FrameworkError,
    GoalNotDerivedError,
    KindMismatchError,
    NoParseError,
    ProofSyntaxError,
    SystemSyntaxError,
    UndeclaredVariableError,
    UnknownAssertionError,
    UnknownKindError,
    UnknownStatementError,
    UniverseOverflowError,
)
from .grammar import (
    Apply,
    Expression,
    Grammar,
    Kind,
    Lit,
    Production,
    Slot,
    Var,
    VariableDecl,
    kind_coercible,
    parse_all,
    parse_any_kind,
    parse_expression,
    render_expression,
    render_string,
)
from .oracle import (
    Saturation,
    SaturationBounds,
    dump_derived,
    expression_universe,
    oracle_proofs,
    provable,
    saturate,
)
from .proof import (
    Inference,
    ProofNode,
    ProofTree,
    Violation,
    check_proof,
    check_statement_proof,
    congruent,
    generality,
    parse_proof,
    proof_leaves,
    serialize_proof,
    substitute_proof,
)
from .search import (
    Certificate,
    Exhausted,
    GoalNode,
    LimitReached,
    Proved,
    RuleNode,
    SearchLimits,
    SearchOutcome,
    SearchState,
    SearchStats,
    expand_enode,
    extract_proof,
    init_search,
    propagate_anode,
    propagate_enode,
    run,
    seed_leaf_spts,
)
from .system import (
    Assertion,
    DeductiveSystem,
    FreshSupply,
    Statement,
    assertion_variables,
    fresh_variable_map,
    load_system,
    rename_assertion,
    render_system,
)
from .term import (
    EMPTY,
    Substitution,
    apply,
    compose,
    freeze_expression,
    match_expression,
    match_many,
    replaceable_variables,
    restrict,
    substitution_text,
    unify_expressions,
    unify_substitutions,
    variables_of,
)

__version__ = "0.1.0"
