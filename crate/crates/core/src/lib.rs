//! Weighted Hardy spaces of entire functions and weighted composition
//! operators with affine symbols.
//!
//! ```
//! use hardy_core::operators::{AffineSymbol, WeightedCompOp};
//! use hardy_core::{classify, ClassifyConfig, Complex64, Property, WeightSequence};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let w = WeightSequence::fock();
//! let rotation = WeightedCompOp::composition(AffineSymbol::linear(Complex64::new(0.0, 1.0))?);
//! let report = classify(&rotation, &w, &ClassifyConfig::default())?;
//! assert!(report.verdict(Property::CoIsometry).unwrap().agree);
//! # Ok(())
//! # }
//! ```

pub mod classify;
mod ddouble;
pub mod expr;
pub mod operators;
pub mod space;
pub mod weights;

pub use num_complex::Complex64;

pub use classify::{
    classify, classify_pair, Agreement, ClassificationReport, ClassifyConfig, Grid, Property,
    Symbolic, Tolerances,
};
pub use operators::{
    adjoint_on_kernel, adjoint_section, composition_section, multiplication_section,
    section_norm_growth, weighted_comp_section, AffineSymbol, Exactness, OperatorDesc,
    OperatorSection, UpsilonForm, WeightedCompOp,
};
pub use space::{
    inner_product, kernel_eval, norm, reproduce, Certified, EntireFunction, EvalConfig,
    KernelFunction, SpaceError,
};
pub use weights::{entireness_estimate, WeightError, WeightSequence};
