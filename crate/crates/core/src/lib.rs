//! Exact computation with association schemes and weakly distance-regular
//! digraphs: intersection numbers, closed subsets and products, two-way
//! distance partitions, and the diameter-2 classification for schemes with
//! a single non-symmetric pair.

pub mod bits;
pub mod classify;
pub mod closure;
pub mod digraph;
pub mod generators;
pub mod io;
pub mod scheme;
pub mod wdrd;

pub use classify::{
    classify_scheme, crosscheck, oracle_enumerate, ClassificationReport, CrosscheckReport, Verdict,
    Witness,
};
pub use closure::{closure, quotient_scheme, subscheme, wreath_product, ClosedSubset, IndexSet};
pub use digraph::{profile, Digraph, DigraphProfile};
pub use generators::{catalog, circulant_scheme, enumerate_circulant, CirculantSpec};
pub use io::{InputError, InputErrorKind};
pub use scheme::{build_scheme, one_class_scheme, verify_identities, Scheme, SchemeError};
pub use wdrd::{attached_scheme, distance_regular_test, is_wdrd_with_scheme};
