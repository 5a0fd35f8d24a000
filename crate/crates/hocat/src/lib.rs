//! A computation engine for finite categories given by explicit composition
//! tables: localizations of a category at a class of morphisms, model
//! structures, Kan and Quillen homotopy categories, homotopy relations, Kan
//! extensions and derived functors.
//!
//! Everything here is exhaustive and deterministic. "For all" is a finite
//! loop, "there exists" is a search in a fixed canonical order (least object
//! id first, then least morphism id), and every positive verdict carries
//! enough evidence to be replayed. Searches are bounded by an explicit node
//! budget instead of wall-clock time, so a given input either produces the
//! same answer every time or the same refusal every time.

pub mod battery;
pub mod corpus;
pub mod derived;
pub mod error;
pub mod fincat;
pub mod homotopy;
pub mod localization;
pub mod model;
pub mod report;

pub use battery::Battery;
pub use derived::{
    compare_kf, compare_ks, derive_f, derive_k_kan, derive_k_quillen, derive_s,
    derive_s_with_quasi_inverse, right_kan_extension, CertRow, DerivedF, DerivedK, DerivedKan,
    DerivedS, ExplicitS, KfReport, KsReport, UniversalPair,
};
pub use error::{EngineError, Meter, DEFAULT_BUDGET};
pub use fincat::{CatRef, FinCategory, Functor, MorId, MorphismClass, NatTransformation, ObjId};
pub use homotopy::{
    build_ho, build_ho_on, build_hok, evaluate_zigzag, strict_factor, HoCategory, HoKCategory,
    HoRoute,
};
pub use localization::{
    classify, compare_localizations, localize_by_rewriting, Flag, LocalizationWitness, Step,
    Zigzag,
};
pub use model::{validate_model, ModelData};
