//! Density evolution conditioned on a realized channel statistic.
//!
//! Each recursion tracks a single scalar per message direction: erasure
//! probability (BEC), error probability under Gallager A (BSC), or mean LLR
//! under the Gaussian approximation (AWGN). Alongside the message statistics
//! every run reports the bit error probability a decoder would have after its
//! last iteration.
//!
//! Initialization makes the first variable-to-check message equal the raw
//! channel message in every case: BEC starts from `m_c = 1`, Gallager A from
//! `m_v = m_ch`, and the Gaussian approximation from `m_c = 0`.

mod phi;
mod quad;

pub use phi::{phi, phi_direct, phi_inv};

use crate::channel::{q_func, ChannelKind};
use crate::ensemble::Ensemble;
use crate::{Error, Result};

use phi::{phi_fast, phi_inv_fast};

/// Smallest argument handed to `φ⁻¹` in the check-node update.
pub const PHI_INV_CLAMP: f64 = 1e-300;

/// Iteration budget and stopping rules for one DE run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DEConfig {
    /// Maximum number of decoding iterations.
    pub l_max: usize,
    /// Stop at a fixed point: successive message statistics differ by less
    /// than this, relative to the statistic's magnitude.
    pub convergence_tol: f64,
    /// Bit error probabilities below this count as decoded: the run stops and
    /// reports zero. A floor of zero disables the rule.
    pub floor: f64,
}

impl Default for DEConfig {
    fn default() -> Self {
        DEConfig {
            l_max: 500,
            convergence_tol: 1e-10,
            floor: 1e-12,
        }
    }
}

impl DEConfig {
    pub fn new(l_max: usize, convergence_tol: f64, floor: f64) -> Result<Self> {
        let cfg = DEConfig { l_max, convergence_tol, floor };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_l_max(self, l_max: usize) -> Self {
        DEConfig { l_max, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_max == 0 {
            return Err(Error::Domain("l_max must be at least 1".into()));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::Domain("convergence_tol must be positive".into()));
        }
        if !(self.floor >= 0.0) {
            return Err(Error::Domain("floor must be non-negative".into()));
        }
        Ok(())
    }
}

/// Which recursion to run and the channel statistic that drives it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalChannel {
    kind: ChannelKind,
    m_ch: f64,
}

impl ConditionalChannel {
    /// Erasure probability `m_ch ∈ [0, 1]`.
    pub fn bec(m_ch: f64) -> Result<Self> {
        Self::probability(ChannelKind::Bec, m_ch)
    }

    /// Crossover probability `m_ch ∈ [0, 1]`.
    pub fn bsc(m_ch: f64) -> Result<Self> {
        Self::probability(ChannelKind::Bsc, m_ch)
    }

    /// Mean channel LLR `m_ch ≥ 0`.
    pub fn awgn(m_ch: f64) -> Result<Self> {
        if !(m_ch >= 0.0 && m_ch.is_finite()) {
            return Err(Error::Domain(format!("mean channel LLR {m_ch} must be finite and >= 0")));
        }
        Ok(ConditionalChannel { kind: ChannelKind::Awgn, m_ch })
    }

    pub fn new(kind: ChannelKind, m_ch: f64) -> Result<Self> {
        match kind {
            ChannelKind::Awgn => Self::awgn(m_ch),
            _ => Self::probability(kind, m_ch),
        }
    }

    fn probability(kind: ChannelKind, m_ch: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m_ch) {
            return Err(Error::Domain(format!("channel probability {m_ch} outside [0, 1]")));
        }
        Ok(ConditionalChannel { kind, m_ch })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn m_ch(&self) -> f64 {
        self.m_ch
    }
}

/// Outcome of one conditional DE run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DERunResult {
    /// Variable-to-check statistic after the last iteration.
    pub final_mv: f64,
    /// Check-to-variable statistic after the last iteration.
    pub final_mc: f64,
    pub iterations_used: usize,
    /// Conditional bit error (or erasure) probability `P_b|k`.
    pub pb_conditional: f64,
    /// The error probability fell below the configured floor.
    pub converged: bool,
    /// A `φ⁻¹` argument was clamped to [`PHI_INV_CLAMP`] (AWGN only).
    pub saturated: bool,
}

/// Dispatches on the channel kind.
pub fn de_run(e: &Ensemble, ch: ConditionalChannel, cfg: &DEConfig) -> DERunResult {
    match ch.kind {
        ChannelKind::Bec => de_run_bec(e, ch, cfg),
        ChannelKind::Bsc => de_run_gallager_a(e, ch, cfg),
        ChannelKind::Awgn => de_run_awgn_ga(e, ch, cfg),
    }
}

struct Tracker<'a> {
    cfg: &'a DEConfig,
    prev: f64,
}

impl<'a> Tracker<'a> {
    fn new(cfg: &'a DEConfig) -> Self {
        Tracker { cfg, prev: f64::NAN }
    }

    /// Returns `Some(converged)` when the run should stop after this iteration.
    fn stop(&mut self, statistic: f64, pb: f64) -> Option<bool> {
        if pb < self.cfg.floor {
            return Some(true);
        }
        // Relative, so a statistic decaying geometrically toward zero is not
        // mistaken for a fixed point.
        let settled = (statistic - self.prev).abs() <= self.cfg.convergence_tol * statistic.abs();
        self.prev = statistic;
        settled.then_some(false)
    }
}

fn finish(mv: f64, mc: f64, l: usize, pb: f64, converged: bool, saturated: bool) -> DERunResult {
    DERunResult {
        final_mv: mv,
        final_mc: mc,
        iterations_used: l,
        pb_conditional: if converged { 0.0 } else { pb.clamp(0.0, 1.0) },
        converged,
        saturated,
    }
}

/// Erasure decoding on the BEC:
/// `m_v = m_ch λ(m_c)`, `m_c = 1 - ρ(1 - m_v)`, `P_b = m_ch v(m_c)`.
pub fn de_run_bec(e: &Ensemble, ch: ConditionalChannel, cfg: &DEConfig) -> DERunResult {
    debug_assert_eq!(ch.kind, ChannelKind::Bec);
    let (lambda, rho, v) = (e.lambda(), e.rho(), e.var_nodes());
    let m_ch = ch.m_ch;
    let mut tracker = Tracker::new(cfg);
    let (mut mv, mut mc, mut pb) = (m_ch, 1.0, m_ch);
    for l in 1..=cfg.l_max {
        mv = m_ch * lambda.eval_unchecked(mc);
        mc = 1.0 - rho.eval_unchecked(1.0 - mv);
        pb = m_ch * v.eval_unchecked(mc);
        if let Some(converged) = tracker.stop(mv, pb) {
            return finish(mv, mc, l, pb, converged, false);
        }
    }
    finish(mv, mc, cfg.l_max, pb, false, false)
}

/// Gallager A on the BSC:
/// `m_c = (1 - ρ(1 - 2 m_v)) / 2`,
/// `m_v = (1 - m_ch) λ(m_c) + m_ch (1 - λ(1 - m_c))`,
/// `P_b = (1 - m_ch) v(m_c) + m_ch (1 - v(1 - m_c))`.
pub fn de_run_gallager_a(e: &Ensemble, ch: ConditionalChannel, cfg: &DEConfig) -> DERunResult {
    debug_assert_eq!(ch.kind, ChannelKind::Bsc);
    let (lambda, rho, v) = (e.lambda(), e.rho(), e.var_nodes());
    let m_ch = ch.m_ch;
    let mut tracker = Tracker::new(cfg);
    let (mut mv, mut mc, mut pb) = (m_ch, 0.0, m_ch);
    for l in 1..=cfg.l_max {
        mc = 0.5 * (1.0 - rho.eval_unchecked(1.0 - 2.0 * mv));
        mv = (1.0 - m_ch) * lambda.eval_unchecked(mc) + m_ch * (1.0 - lambda.eval_unchecked(1.0 - mc));
        pb = (1.0 - m_ch) * v.eval_unchecked(mc) + m_ch * (1.0 - v.eval_unchecked(1.0 - mc));
        if let Some(converged) = tracker.stop(mv, pb) {
            return finish(mv, mc, l, pb, converged, false);
        }
    }
    finish(mv, mc, cfg.l_max, pb, false, false)
}

/// Gaussian-approximation DE for belief propagation on the BIAWGN channel.
///
/// Tracks LLR means of symmetric Gaussian densities (`σ² = 2μ`):
/// `m_v = Σ_i λ_i (m_ch + (i-1) m_c)`,
/// `m_c = Σ_j ρ_j φ⁻¹(1 - [1 - Σ_i λ_i φ(m_ch + (i-1) m_c)]^(j-1))`,
/// `P_b = Σ_i v_i Q(sqrt((m_ch + i m_c) / 2))`.
pub fn de_run_awgn_ga(e: &Ensemble, ch: ConditionalChannel, cfg: &DEConfig) -> DERunResult {
    debug_assert_eq!(ch.kind, ChannelKind::Awgn);
    let (lambda, rho) = (e.lambda(), e.rho());
    let m_ch = ch.m_ch;
    let mut tracker = Tracker::new(cfg);
    let mut saturated = false;
    let (mut mv, mut mc, mut pb) = (m_ch, 0.0, 0.5);
    for l in 1..=cfg.l_max {
        let mut mean = 0.0;
        let mut s = 0.0;
        for &(i, frac) in lambda.terms() {
            let m = m_ch + f64::from(i - 1) * mc;
            mean += frac * m;
            s += frac * phi_fast(m);
        }
        mv = mean;
        // 1 - (1 - s)^(j-1) without cancellation when s is tiny
        let log1m = (-s).ln_1p();
        let mut next = 0.0;
        for &(j, frac) in rho.terms() {
            let mut arg = -(f64::from(j - 1) * log1m).exp_m1();
            if !(arg >= PHI_INV_CLAMP) {
                arg = PHI_INV_CLAMP;
                saturated = true;
            }
            next += frac * phi_inv_fast(arg.min(1.0));
        }
        mc = next;
        pb = awgn_bit_error(e, m_ch, mc);
        if let Some(converged) = tracker.stop(mc, pb) {
            return finish(mv, mc, l, pb, converged, saturated);
        }
    }
    finish(mv, mc, cfg.l_max, pb, false, saturated)
}

fn awgn_bit_error(e: &Ensemble, m_ch: f64, mc: f64) -> f64 {
    e.var_nodes()
        .terms()
        .iter()
        .map(|&(i, frac)| frac * q_func(((m_ch + f64::from(i) * mc) / 2.0).sqrt()))
        .sum()
}

/// DE channel statistic for a channel parameter: ε for BEC/BSC, `2/σ²` for AWGN.
pub fn conditional_for_param(kind: ChannelKind, param: f64) -> Result<ConditionalChannel> {
    match kind {
        ChannelKind::Awgn => {
            if !(param > 0.0) {
                return Err(Error::Domain(format!("sigma {param} must be positive")));
            }
            ConditionalChannel::awgn(2.0 / (param * param))
        }
        _ => ConditionalChannel::new(kind, param),
    }
}

/// Whether DE reaches the floor within the iteration budget at this parameter.
pub fn converges_at(e: &Ensemble, kind: ChannelKind, param: f64, cfg: &DEConfig) -> Result<bool> {
    Ok(de_run(e, conditional_for_param(kind, param)?, cfg).converged)
}

/// Default bisection bracket `(good, bad)` per channel kind, in ε or σ.
pub fn default_bracket(kind: ChannelKind) -> (f64, f64) {
    match kind {
        ChannelKind::Bec => (0.0, 1.0),
        ChannelKind::Bsc => (0.0, 0.5),
        ChannelKind::Awgn => (0.05, 5.0),
    }
}

/// Decoding threshold: the worst channel parameter (largest ε, or largest σ
/// for AWGN) at which DE converges, located by bisection to `bisect_tol`.
pub fn find_threshold(e: &Ensemble, kind: ChannelKind, cfg: &DEConfig, bisect_tol: f64) -> Result<f64> {
    find_threshold_in(e, kind, cfg, bisect_tol, default_bracket(kind))
}

/// [`find_threshold`] over an explicit `(good, bad)` bracket.
pub fn find_threshold_in(
    e: &Ensemble,
    kind: ChannelKind,
    cfg: &DEConfig,
    bisect_tol: f64,
    (mut good, mut bad): (f64, f64),
) -> Result<f64> {
    cfg.validate()?;
    if !(bisect_tol > 0.0) {
        return Err(Error::Domain("bisect_tol must be positive".into()));
    }
    let at_good = converges_at(e, kind, good, cfg)?;
    let at_bad = converges_at(e, kind, bad, cfg)?;
    if !at_good || at_bad {
        return Err(Error::NonBracketing(format!(
            "{kind}: converges at {good} = {at_good}, at {bad} = {at_bad}"
        )));
    }
    while (bad - good).abs() > bisect_tol {
        let mid = 0.5 * (good + bad);
        if converges_at(e, kind, mid, cfg)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(0.5 * (good + bad))
}
