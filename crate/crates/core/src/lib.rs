//! Finite-length waterfall analysis of LDPC code ensembles.
//!
//! The bit error rate of a length-`N` code is predicted by conditioning
//! density evolution on the channel quality a single codeword actually sees,
//! then averaging over the distribution of that realized quality:
//!
//! ```text
//! P_b = Σ_k Pr(e_k) · P_b|k
//! ```
//!
//! * [`ensemble`]: degree distributions, perspectives, design rate.
//! * [`channel`]: BEC, BSC and BIAWGN parameterizations and conversions.
//! * [`de`]: channel-conditioned density evolution for erasure decoding,
//!   Gallager A and Gaussian-approximated belief propagation, plus thresholds.
//! * [`predictor`]: realization grids, marginalization and sweeps.
//! * [`sim`]: Monte Carlo reference with sampled Tanner graphs and the three
//!   message-passing decoders.
//! * [`output`]: CSV schemas shared with the command-line tool.
//!
//! ```
//! use ldpc_waterfall::channel::ChannelSpec;
//! use ldpc_waterfall::de::DEConfig;
//! use ldpc_waterfall::ensemble::Ensemble;
//! use ldpc_waterfall::predictor::{predict, GridOptions};
//!
//! let code = Ensemble::regular(3, 6, 1024)?;
//! let p = predict(&code, &ChannelSpec::bec(0.40)?, &DEConfig::default(), &GridOptions::default())?;
//! assert!(p.p_b > 1e-4 && p.p_b < 1e-1);
//! # Ok::<(), ldpc_waterfall::Error>(())
//! ```

pub mod channel;
pub mod de;
pub mod ensemble;
mod error;
pub mod output;
pub mod predictor;
pub mod sim;
pub mod sweep;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    pub mod ensembles {}
    #[doc = include_str!("../../../book/src/channels.md")]
    pub mod channels {}
    #[doc = include_str!("../../../book/src/density-evolution.md")]
    pub mod density_evolution {}
    #[doc = include_str!("../../../book/src/gaussian-approximation.md")]
    pub mod gaussian_approximation {}
    #[doc = include_str!("../../../book/src/prediction.md")]
    pub mod prediction {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
