//! Unsupervised pixel-wise anomaly detection on images.
//!
//! The pipeline has three trainable stages and a scoring stage:
//!
//! 1. A convolutional VQ-VAE maps images to grids of discrete codebook
//!    indices and back ([`vqvae`]).
//! 2. The learned codebook is rebuilt from k-means centers of all training
//!    encodings and the autoencoder is fine-tuned, which repairs codebook
//!    collapse ([`aggregate`]).
//! 3. A full-attention transformer over flattened code sequences is trained
//!    to restore randomly tampered codes, so it learns which code belongs at
//!    which position given the whole image ([`prior`]).
//! 4. At test time an image's code sequence is resampled several times from
//!    the prior; the decoded restorations are compared against the decode of
//!    the original sequence and fused into a smoothed per-pixel anomaly score
//!    ([`scoring`]).
//!
//! [`dataset`] loads PNG datasets and synthesizes small labeled datasets for
//! verification, [`metrics`] provides pixel-wise AP / AUROC / Dice, and
//! [`pipeline`] wires the stages together for the CLI and the ablation
//! harness.

pub mod aggregate;
pub mod checkpoint;
pub mod config;
pub mod dataset;
pub mod error;
pub mod image_data;
pub mod metrics;
pub mod nn;
pub mod pipeline;
pub mod prior;
pub mod scoring;
pub mod seeds;
pub mod synth;
pub mod vqvae;

pub use config::{Profile, RunConfig};
pub use dataset::{AnomalyKind, DatasetManifest, Split};
pub use error::{Error, Result};
pub use image_data::{ImageBuffer, ImageSample, Mask};
