//! Harmonic analysis on Damek–Ricci spaces: radial spherical functions, the
//! spherical transform, moduli of continuity and numerical audits of
//! Titchmarsh-type theorems.

pub mod checks;
pub mod error;
pub mod gamma;
pub mod jacobi;
pub mod moduli;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod radial;
pub mod report;

pub use checks::{BesovTruncations, ChainConstants, HolderParams, TailWeight, Tolerances};
pub use error::{Error, Result};
pub use jacobi::{SphericalEval, SpectralScaling};
pub use moduli::{Modulus, ModulusKind, ModulusTail};
pub use params::{derive_params, DrParams};
pub use quadrature::PanelGrid;
pub use radial::{LipDeviation, RadialFunction, SmoothnessHint, SpectralFunction, TailModel};
pub use report::{CheckReport, Hypothesis, Verdict};
