//! Tree automata with memory: a tree-shaped memory is pushed, popped and
//! compared while the input is read bottom-up.

pub mod decide;
pub mod encodings;
pub mod error;
pub mod format;
pub(crate) mod lex;
pub mod model;
pub mod oracle;
pub mod saturation;
pub mod ta;
pub mod term;
pub mod transform;

pub use decide::{
    eliminate_negative, eliminate_negative_report, equivalent, included, is_empty, member,
    memory_languages, universal, witness, Budget, MemoryLanguages, NegCase,
};
pub use encodings::{
    build_example, encode_3sat, lift_ta_to_memory, parse_dimacs, Cnf, ContextDef, Translation,
};
pub use error::{Error, Result};
pub use format::{load_vtam, parse_vtam, print_vtam};
pub use model::{
    complete, is_deterministic, memory_shape, step_root, struct_eq, term_struct_eq, Action,
    Category, Configuration, Guard, MemShape, PartitionedSignature, Relation, Rule, Runner, Vtam,
    DEFAULT_RUN_BUDGET,
};
pub use oracle::{brute_accepts, brute_memory, brute_memory_bounded, enumerate_terms, EnumBudget};
pub use saturation::{
    relation_system, saturate, Atom, Clause, MemoryTa, Order, RelationKind, RelationSystem,
    Saturated, SaturationOptions,
};
pub use ta::{parse_ta, print_ta, ProductMode, Ta, TaRule};
pub use term::{parse_term, parse_term_free, Position, Signature, SymbolDecl, Term, BOT};
pub use transform::{complement, determinize, intersection, union, DetState};
