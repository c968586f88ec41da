//! Recognition-aware quality pseudo-labels for identity-labeled embeddings.
//!
//! For each sample the crate collects the cosine similarities to its
//! same-identity partners (genuine) and to everyone else (impostor), and
//! scores the sample by the Wasserstein-1 distance between the two
//! empirical distributions: a sample that sits close to its own class and
//! far from the others gets a large distance. Distances are min-max scaled
//! to [0, 100].
//!
//! Modules:
//!
//! - [`dataset`]: loading, validation, similarity profiles (exhaustive and sampled)
//! - [`transport`]: exact 1-D Wasserstein-1 and a brute-force coupling oracle
//! - [`labels`]: exact and O(n) sampled pseudo-label generation
//! - [`eval`]: FMR/FNMR, threshold inversion, EVRC, AOC, leave-one-out FNMR oracle
//! - [`regressor`]: Huber-loss MLP mapping embeddings to quality scores
//! - [`scores`]: `index,score` files read by the evaluation commands
//! - [`synth`]: synthetic identity clusters with known corruption
//! - [`cli`]: the `sddq` command-line front end

pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod labels;
pub mod regressor;
pub mod scores;
pub mod seeding;
pub mod stats;
pub mod synth;
pub mod transport;

pub use error::{Error, Result};
