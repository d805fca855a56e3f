//! Round fold map calculus: descriptors, constructions, surgery, Reeb space
//! homology and classification of the source manifolds.

pub mod chain;
pub mod classify;
pub mod constructions;
pub mod descriptor;
pub mod dsl;
pub mod error;
pub mod expr;
pub mod presets;
pub mod reeb;
pub mod report;
pub mod snf;
pub mod surgery;

pub use chain::{homology, ChainComplex, HomologyGroup, HomologyProfile};
pub use classify::{
    classify, dim5_recognizer, synthesize, ClassificationResult, Confidence, Dim5Decision, Dim5Input, Dim5Verdict,
    RuleApplication,
};
pub use constructions::{from_bundle, iterated_bundle_spin, trivial_spinning, MorseTrace};
pub use descriptor::{
    component_forest, regular_fibers, validate, Assertion, AxisFiber, ComponentForest, ComponentId,
    FiberConfiguration, FoldEvent, RoundFoldDescriptor, Triviality, ValidationReport, Violation,
};
pub use error::{Error, Result};
pub use expr::{ManifoldExpr, NamedManifold, Twist};
pub use dsl::{parse, print, Diagnostic, Parsed};
pub use presets::{list_presets, preset, Preset};
pub use reeb::{build_reeb, euler_characteristic, prop1_report, Prop1Report, ReebComplex};
pub use snf::{smith_normal_form, IntMatrix, SmithForm};
pub use surgery::{combine, combine_iterated, decompose, isomorphic, Combined, Decomposed, NullHomotopy};
