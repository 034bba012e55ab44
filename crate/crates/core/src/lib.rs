//! Dynamical zeta functions of probabilistic and quantum cellular automata
//! on a finite line of sites.
//!
//! A model is a 4×4 local operator acting on neighbouring pairs. The global
//! operator `Q_N` is the ordered product of local updates. From it we get
//! traces `tr(Q_N^r)`, the normalized log-zeta series, closed forms for
//! special families and exact time evolution.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the `*64`
//! and `*32` aliases fix it.

pub mod config;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod matrix;
pub mod models;
pub mod operator;
pub mod scalar;
pub mod special;
pub mod verify;
pub mod zeta;

pub use config::Tolerances;
pub use dynamics::{evolve, initial_state, trajectory, StateKind, StateVector};
pub use error::{Error, Result};
pub use matrix::CMatrix;
pub use models::{build_local, classify, factor_tensor, LocalOperator, ModelClass, ModelSpec, TensorFactors};
pub use operator::{Configuration, GlobalOperator, TraceSequence, TraceStrategy};
pub use scalar::{Real, C};
pub use verify::{run_formula, FormulaId, VerifyOptions};
pub use zeta::{zeta_log_series, ClosedFormReport, ZetaLogSeries};

pub type Complex64 = C<f64>;
pub type CMatrix64 = CMatrix<f64>;
pub type LocalOperator64 = LocalOperator<f64>;
pub type GlobalOperator64 = GlobalOperator<f64>;
pub type ModelSpec64 = ModelSpec<f64>;
pub type TensorFactors64 = TensorFactors<f64>;
pub type TraceSequence64 = TraceSequence<f64>;
pub type ZetaLogSeries64 = ZetaLogSeries<f64>;
pub type StateVector64 = StateVector<f64>;

pub type Complex32 = C<f32>;
pub type CMatrix32 = CMatrix<f32>;
pub type LocalOperator32 = LocalOperator<f32>;
pub type GlobalOperator32 = GlobalOperator<f32>;
pub type ModelSpec32 = ModelSpec<f32>;
pub type TraceSequence32 = TraceSequence<f32>;
pub type ZetaLogSeries32 = ZetaLogSeries<f32>;
