//! Monte Carlo bit error rates from sampled graphs and real decoders.
//!
//! Every frame transmits the all-zero codeword (BPSK maps bit 0 to `+1`),
//! which is sufficient because the three channels are output-symmetric and
//! the decoders are symmetric message-passing rules; [`symmetry_check`]
//! exercises that claim. Frame `i` draws its graph and noise from ChaCha8
//! stream `i` of the configured seed, and frame outcomes are accumulated in
//! frame order, so a result depends only on the seed and configuration.
//!
//! | channel | decoder |
//! |---------|---------|
//! | BEC     | peeling ([`decode_bec`]) |
//! | BSC     | Gallager A ([`decode_gallager_a`]) |
//! | BIAWGN  | sum-product on LLRs ([`decode_bp_awgn`]) |

mod decoders;
mod graph;

pub use decoders::{
    decode_bec, decode_bp_awgn, decode_gallager_a, BpDecoder, Decoded, ErasureDecoder, GallagerADecoder, TANH_CLAMP,
};
pub use graph::{build_graph, node_counts, NodeCounts, TannerGraph, MULTI_EDGE_ATTEMPTS};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::ChannelSpec;
use crate::ensemble::Ensemble;
use crate::{Error, Result};

/// Whether each frame gets a fresh graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMode {
    PerFrame,
    Fixed,
}

impl GraphMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphMode::PerFrame => "per-frame",
            GraphMode::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub max_frames: u64,
    /// Stop once this many bit errors are counted; 0 runs all frames.
    pub min_bit_errors: u64,
    pub l_max: usize,
    pub seed: u64,
    pub graph_resample: GraphMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            max_frames: 10_000_000,
            min_bit_errors: 100,
            l_max: 200,
            seed: 1,
            graph_resample: GraphMode::PerFrame,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_frames == 0 {
            return Err(Error::Domain("max_frames must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub channel: ChannelSpec,
    pub n: usize,
    pub frames: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub seed: u64,
}

impl SimResult {
    fn new(channel: ChannelSpec, n: usize, frames: u64, bit_errors: u64, seed: u64) -> Self {
        let bits = frames as f64 * n as f64;
        let ber = bit_errors as f64 / bits;
        let half = 1.96 * (ber * (1.0 - ber) / bits).sqrt();
        SimResult {
            channel,
            n,
            frames,
            bit_errors,
            ber,
            ci95_low: (ber - half).max(0.0),
            ci95_high: (ber + half).min(1.0),
            seed,
        }
    }
}

/// Stream reserved for the graph in [`GraphMode::Fixed`].
const FIXED_GRAPH_STREAM: u64 = u64::MAX;

fn frame_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-worker buffers reused across frames.
#[derive(Default)]
struct Workspace {
    erasure: ErasureDecoder,
    gallager: GallagerADecoder,
    bp: BpDecoder,
    events: Vec<bool>,
    noise: Vec<f64>,
    erasable: Vec<Option<u8>>,
    hard: Vec<u8>,
    llr: Vec<f64>,
    out: Vec<u8>,
}

impl Workspace {
    fn sample(&mut self, c: &ChannelSpec, n: usize, rng: &mut ChaCha8Rng) {
        self.events.clear();
        self.noise.clear();
        match c {
            ChannelSpec::Awgn { .. } => self.noise.extend((0..n).map(|_| c.sample_noise(rng))),
            _ => self.events.extend((0..n).map(|_| c.sample_event(rng))),
        }
    }

    /// Decodes the sampled channel output for codeword `bit^n` and counts
    /// bit errors. With `bit = 1` the noise enters with its sign reversed.
    fn decode(&mut self, g: &TannerGraph, c: &ChannelSpec, bit: u8, l_max: usize) -> u64 {
        match *c {
            ChannelSpec::Bec { .. } => {
                self.erasable.clear();
                self.erasable.extend(self.events.iter().map(|&erased| (!erased).then_some(bit)));
                self.erasure.run(g, &self.erasable, l_max);
                self.erasure.bits().iter().filter(|&&b| b != Some(bit)).count() as u64
            }
            ChannelSpec::Bsc { .. } => {
                self.hard.clear();
                self.hard.extend(self.events.iter().map(|&flip| bit ^ u8::from(flip)));
                self.gallager.run(g, &self.hard, l_max, &mut self.out);
                self.out.iter().filter(|&&b| b != bit).count() as u64
            }
            ChannelSpec::Awgn { sigma } => {
                let sign = if bit == 0 { 1.0 } else { -1.0 };
                let scale = 2.0 / (sigma * sigma);
                self.llr.clear();
                self.llr.extend(self.noise.iter().map(|&z| scale * sign * (1.0 + z)));
                self.bp.run(g, &self.llr, l_max, &mut self.out);
                self.out.iter().filter(|&&b| b != bit).count() as u64
            }
        }
    }
}

/// Estimates the bit error rate of the ensemble at its block length.
///
/// Frames run in parallel on the current rayon pool in fixed-size batches;
/// the stop rule is applied in frame order, so the result does not depend on
/// the number of workers.
pub fn run_monte_carlo(e: &Ensemble, c: &ChannelSpec, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let n = e.n();
    node_counts(e, n)?;
    let fixed = match cfg.graph_resample {
        GraphMode::Fixed => Some(build_graph(e, n, &mut frame_rng(cfg.seed, FIXED_GRAPH_STREAM))?),
        GraphMode::PerFrame => None,
    };
    let batch = (rayon::current_num_threads() as u64 * 8).max(16);
    let mut frames = 0u64;
    let mut bit_errors = 0u64;
    'outer: while frames < cfg.max_frames {
        let end = (frames + batch).min(cfg.max_frames);
        let outcomes: Vec<u64> = (frames..end)
            .into_par_iter()
            .map_init(Workspace::default, |ws, i| {
                let mut rng = frame_rng(cfg.seed, i);
                let sampled;
                let g = match &fixed {
                    Some(g) => g,
                    None => {
                        sampled = build_graph(e, n, &mut rng)?;
                        &sampled
                    }
                };
                ws.sample(c, n, &mut rng);
                Ok(ws.decode(g, c, 0, cfg.l_max))
            })
            .collect::<Result<_>>()?;
        for errs in outcomes {
            frames += 1;
            bit_errors += errs;
            if cfg.min_bit_errors > 0 && bit_errors >= cfg.min_bit_errors {
                break 'outer;
            }
        }
    }
    Ok(SimResult::new(*c, n, frames, bit_errors, cfg.seed))
}

/// Error counts of the all-zero and all-one transmissions over the same
/// graphs and noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryReport {
    pub frames: u64,
    pub errors_zero: u64,
    pub errors_one: u64,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.errors_zero == self.errors_one
    }
}

/// Decodes `cfg.max_frames` frames twice: as the all-zero codeword, and as
/// the all-one codeword with every flip, erasure or noise sample mirrored.
/// Symmetric channels and decoders must give identical error counts.
///
/// The all-one word is a codeword only when every check degree is even.
pub fn symmetry_check(e: &Ensemble, c: &ChannelSpec, cfg: &SimConfig) -> Result<SymmetryReport> {
    cfg.validate()?;
    if e.check_nodes().terms().iter().any(|&(d, _)| d % 2 == 1) {
        return Err(Error::Mismatch("symmetry check needs even check degrees".into()));
    }
    let n = e.n();
    let mut ws = Workspace::default();
    let mut report = SymmetryReport { frames: cfg.max_frames, errors_zero: 0, errors_one: 0 };
    let fixed = match cfg.graph_resample {
        GraphMode::Fixed => Some(build_graph(e, n, &mut frame_rng(cfg.seed, FIXED_GRAPH_STREAM))?),
        GraphMode::PerFrame => None,
    };
    for i in 0..cfg.max_frames {
        let mut rng = frame_rng(cfg.seed, i);
        let g = match &fixed {
            Some(g) => g.clone(),
            None => build_graph(e, n, &mut rng)?,
        };
        ws.sample(c, n, &mut rng);
        report.errors_zero += ws.decode(&g, c, 0, cfg.l_max);
        report.errors_one += ws.decode(&g, c, 1, cfg.l_max);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(max_frames: u64, l_max: usize) -> SimConfig {
        SimConfig { max_frames, min_bit_errors: 0, l_max, ..SimConfig::default() }
    }

    #[test]
    fn noiseless_erasure_channel() {
        let e = Ensemble::regular(3, 6, 128).unwrap();
        let r = run_monte_carlo(&e, &ChannelSpec::bec(0.0).unwrap(), &cfg(20, 50)).unwrap();
        assert_eq!((r.frames, r.bit_errors, r.ber), (20, 0, 0.0));
        assert_eq!((r.ci95_low, r.ci95_high), (0.0, 0.0));
    }

    #[test]
    fn undecoded_bsc_is_raw_channel() {
        let e = Ensemble::regular(3, 6, 256).unwrap();
        let r = run_monte_carlo(&e, &ChannelSpec::bsc(0.5).unwrap(), &cfg(40, 0)).unwrap();
        assert!(r.ci95_low <= 0.5 && 0.5 <= r.ci95_high, "{r:?}");
    }

    #[test]
    fn stop_rule_and_bounds() {
        let e = Ensemble::regular(3, 6, 64).unwrap();
        let c = SimConfig { max_frames: 1000, min_bit_errors: 50, l_max: 20, ..SimConfig::default() };
        let r = run_monte_carlo(&e, &ChannelSpec::bec(0.45).unwrap(), &c).unwrap();
        assert!(r.bit_errors >= 50 && r.frames < 1000);
        assert!(r.ci95_low <= r.ber && r.ber <= r.ci95_high);
        assert_eq!(r.ber, r.bit_errors as f64 / (r.frames as f64 * 64.0));
        assert!(run_monte_carlo(&e, &ChannelSpec::bec(0.4).unwrap(), &cfg(0, 5)).is_err());
    }

    #[test]
    fn fixed_graph_mode_runs() {
        let e = Ensemble::regular(3, 6, 64).unwrap();
        let c = SimConfig { graph_resample: GraphMode::Fixed, ..cfg(30, 30) };
        let a = run_monte_carlo(&e, &ChannelSpec::bsc(0.04).unwrap(), &c).unwrap();
        let b = run_monte_carlo(&e, &ChannelSpec::bsc(0.04).unwrap(), &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn odd_check_degree_rejected() {
        let e = Ensemble::regular(4, 7, 70).unwrap();
        assert!(symmetry_check(&e, &ChannelSpec::bsc(0.05).unwrap(), &cfg(2, 5)).is_err());
    }
}
