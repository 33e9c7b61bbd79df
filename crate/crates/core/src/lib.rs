//! Radon-projection texture features for scanned handwritten document strips.
//!
//! The crate computes two strip-level descriptors:
//!
//! - the *generalized slant*: the angle minimizing the entropy of the ink
//!   projection profile taken along a family of parallel lines ([`slant`]),
//! - the *column-occupancy autocorrelation*: a binarized per-column ink
//!   sequence of the joined sub-strips and its normalized autocorrelation
//!   ([`seqfeat`]).
//!
//! Both feed a provisional nearest-neighbor ranking in [`classify`].
//! [`synth`] produces strips with known slant for verification, and
//! [`imageio`] handles netpbm input and binarization.
//!
//! With the default `parallel` feature the per-angle, per-step and
//! per-gallery-entry loops run on rayon. Disabling it gives a sequential
//! build with bit-identical output.

pub mod classify;
pub mod cli;
pub mod error;
pub mod imageio;
pub mod par;
pub mod radon;
pub mod report;
pub mod seqfeat;
pub mod slant;
pub mod synth;

pub use classify::{distance, feature_vector, nearest, ExtractConfig, FeatureVector, Weights};
pub use error::{Error, Result};
pub use imageio::{binarize, load_netpbm, reshape_strip, Binarization, BinaryImage, GrayImage};
pub use par::Execution;
pub use radon::{mass_check, offset_index, project, AngleDeg, ProjectionProfile};
pub use seqfeat::{autocorrelation, column_bits, step_sweep, AutocorrCurve, AutocorrMatrix, BitSequence};
pub use slant::{entropy, entropy_curve, estimate_slant, AngleGrid, EntropyCurve, SlantEstimate};
pub use synth::{synth_strokes, SynthConfig};
