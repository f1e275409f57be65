//! Strichartz exponent bookkeeping: admissible pairs, Sobolev-equivalence windows and
//! the Hölder/scaling relations behind each named construction, checked exactly when
//! the inputs are rational.

mod constructions;
mod pairs;
mod value;

pub use constructions::{
    applicable_constructions, build_holder_splits, build_named_pairs, construction_hypotheses,
    verify_construction, verify_holder_split, verify_named_pair, verify_with_small_parameters,
    Check, CheckOutcome, Construction, ConstructionReport, HolderSplit, NamedPair, Region,
    Relation, Requirement, SplitReport,
};
pub use pairs::{
    is_dual_hs_admissible, is_hs_admissible, is_s_admissible, sobolev_equivalence_window,
    PairClass, PairQR,
};
pub use value::{Value, TOLERANCE};
