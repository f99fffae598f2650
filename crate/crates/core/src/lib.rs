//! Rickart ordered *-algebras in two executable models: complex matrix
//! algebras and functions measurable for the countable/co-countable
//! sigma-algebra on `[0, 1]`.
//!
//! The [`Element`] trait is the model-independent contract. On top of it
//! sit the randomized axiom audit ([`audit_axioms`]), the order norm of
//! the bounded part ([`order_norm`]), lattice operations built from
//! annihilator projections ([`positive_part`], [`sup_increasing`]), and
//! spectral families with Riemann reconstruction ([`SpectralFamily`]).

pub mod acceptance;
pub mod algebra;
pub mod audit;
pub mod cocountable;
pub mod document;
pub mod error;
pub mod lattice;
pub mod matrix;
pub mod norm;
pub mod report;
pub mod spectral;
pub mod tolerance;

pub use algebra::{between, commutator, hermitian_parts, in_cone, leq, star_square, AlgebraContract, Element, C64};
pub use audit::{audit_axioms, audit_axioms_with, Model};
pub use cocountable::{
    fr_sup_fn, not_baer_witness, rp_fn, CocountableSet, Op, Point, Probe, SetTag, StepFnModel, StepFunction, TailExpr,
};
pub use document::{AnyElement, ElementDocument};
pub use error::{Error, Result};
pub use lattice::{abs, join, meet, positive_part, sup_increasing, IncreasingSequence, JoinConstruction};
pub use matrix::{
    bicommutant, commutant, contraction_adjoint_check, masa_check, masa_check_projections, right_projection,
    CommutantBasis, MatrixElement, MatrixModel, ProjectionMatrix,
};
pub use norm::{
    cstar_identity_check, extract_bounded, fr_sup, gns_inequality, order_norm, series_sup, state_norm,
    BoundedCertificate, DominatedSeries, GeometricTail, State,
};
pub use report::{AxiomReport, CheckRecord};
pub use spectral::{riemann_reconstruct, Partition, Reconstruction, Spectral, SpectralFamily, TagRule};
pub use tolerance::Tolerance;
