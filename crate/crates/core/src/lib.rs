//! Exact extension of partial graph metrics.
//!
//! A [`PartialMetric`] assigns positive rational weights to some doubletons of
//! a finite vertex set. This crate computes the shortest-path pseudometric
//! `hat`, the doubleton distance `ddot`, and the lower envelope `check`; decides
//! floppiness (`check < hat` on every non-edge); performs one-step and full
//! extensions that keep a metric floppy; referees the metric-extending game;
//! and glues patchworks of pieces onto a full base metric.

pub mod choice;
pub mod error;
pub mod extension;
pub mod game;
pub mod generators;
pub mod glue;
pub mod metric;
pub mod rational;

pub use choice::{ChoiceSet, Diameter, OpenInterval};
pub use error::{Error, Result};
pub use extension::{
    admissible_interval, full_extend, one_step_extend, verify_pstep, AdmissibleInterval,
    ChoicePolicy, ExtensionTrace, Mode, OrderPolicy, PropertyReport,
};
pub use game::{
    judge, play, sabotage_witness, GameTranscript, Move, PlayerOne, PlayerTwo, SabotagePlan,
    Verdict, Witness,
};
pub use generators::{cantor_tree, random_floppy, GenKind, GenSpec};
pub use glue::{
    floppy_certificate, glue, glue_hat, lambda, validate_patchwork, CertReport, Patchwork,
    PatchworkReport,
};
pub use metric::{
    check, ddot, hat, is_floppy, minimal_floppy_extension, validate, DistanceTables, Doubleton,
    FloppyReport, PartialMetric, ValidationReport, VertexId,
};
pub use rational::Rational;
