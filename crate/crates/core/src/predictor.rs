//! Finite-length bit error prediction.
//!
//! A codeword of length `N` sees a realized channel quality `e` that
//! fluctuates around the nominal one. The predictor discretizes the
//! distribution of `e` into a [`RealizationGrid`], runs conditional density
//! evolution once per cell and marginalizes:
//!
//! ```text
//! P_b = Σ_k Pr(e_k) · P_b|k
//! ```
//!
//! On the BEC and BSC the realized fraction of erasures or flips is
//! `Binomial(N, ε) / N`; cells sit at `e_k = k/N`. On the BIAWGN channel the
//! equivalent error probability of the realized LLR mean is modeled as
//! `N(p_c, p_c (1 - p_c) / N)` with `p_c = Q(1/σ)`, quantized uniformly in
//! `e`, and each cell is driven by the mean LLR `m = 2 Q⁻¹(e)²`.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::channel::{normal_cdf, q_func, q_inv, ChannelKind, ChannelSpec};
use crate::de::{de_run, ConditionalChannel, DEConfig, DERunResult};
use crate::ensemble::Ensemble;
use crate::sweep::{round_sig12, SweepPoint};
use crate::{Error, Result};

/// Distance kept from the ends of `(0, 0.5)` on the AWGN error axis.
pub const AWGN_EDGE: f64 = 1e-12;

/// How the realized-channel distribution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealizationSource {
    ExactBinomial,
    GaussianApprox,
}

/// One quantization cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    /// Realized erasure, crossover or error probability `e_k`.
    pub e: f64,
    /// Channel statistic that drives conditional DE for this cell.
    pub m_ch: f64,
    /// Probability mass `Pr(e_k)`.
    pub mass: f64,
}

/// Discretized distribution of the realized channel quality.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationGrid {
    pub cells: Vec<GridCell>,
    pub source: RealizationSource,
}

impl RealizationGrid {
    fn single(e: f64, m_ch: f64, source: RealizationSource) -> Self {
        RealizationGrid {
            cells: vec![GridCell { e, m_ch, mass: 1.0 }],
            source,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.cells.iter().map(|c| c.mass).sum()
    }

    fn normalize(mut self) -> Self {
        let total = self.total_mass();
        for c in &mut self.cells {
            c.mass /= total;
        }
        self
    }
}

/// Quantization and truncation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Realization model on the BEC and BSC.
    pub discrete: RealizationSource,
    /// Total tail mass discarded on the BEC/BSC grids, split evenly per side.
    pub truncation: f64,
    /// Number of uniform cells on the AWGN error-probability axis.
    pub awgn_cells: usize,
    /// Half-width of the AWGN grid in standard deviations.
    pub awgn_span_sigmas: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            discrete: RealizationSource::ExactBinomial,
            truncation: 1e-10,
            awgn_cells: 512,
            awgn_span_sigmas: 6.0,
        }
    }
}

/// Standard deviation of a realized probability `p` over `n` trials.
fn realized_std(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Grid of realized erasure/crossover fractions `k/n` on the BEC or BSC.
pub fn realization_grid_discrete(
    c: &ChannelSpec,
    n: usize,
    mode: RealizationSource,
    truncation: f64,
) -> Result<RealizationGrid> {
    let eps = match *c {
        ChannelSpec::Bec { epsilon } | ChannelSpec::Bsc { epsilon } => epsilon,
        ChannelSpec::Awgn { .. } => {
            return Err(Error::Mismatch("discrete realization grid needs a BEC or BSC channel".into()))
        }
    };
    if n == 0 {
        return Err(Error::Domain("block length must be positive".into()));
    }
    if !(truncation > 0.0 && truncation < 1.0) {
        return Err(Error::Domain(format!("truncation {truncation} outside (0, 1)")));
    }
    if eps == 0.0 || eps == 1.0 {
        return Ok(RealizationGrid::single(eps, eps, mode));
    }
    let nf = n as f64;
    let sd = (nf * eps * (1.0 - eps)).sqrt();
    let window = 15.0 * sd + 30.0;
    let k_lo = (nf * eps - window).floor().max(0.0) as usize;
    let k_hi = ((nf * eps + window).ceil() as usize).min(n);

    let ln_norm = libm::lgamma(nf + 1.0);
    let (ln_p, ln_q) = (eps.ln(), (-eps).ln_1p());
    let masses: Vec<f64> = (k_lo..=k_hi)
        .map(|k| {
            let kf = k as f64;
            (ln_norm - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0) + kf * ln_p + (nf - kf) * ln_q).exp()
        })
        .collect();

    // smallest contiguous range holding all but `truncation` of the binomial mass;
    // the Gaussian model reuses it
    let per_side = 0.5 * truncation;
    let mut first = 0;
    let mut tail = 0.0;
    while first + 1 < masses.len() && tail + masses[first] <= per_side {
        tail += masses[first];
        first += 1;
    }
    let mut last = masses.len() - 1;
    tail = 0.0;
    while last > first && tail + masses[last] <= per_side {
        tail += masses[last];
        last -= 1;
    }
    let std = realized_std(eps, n);
    let cdf = |k: f64| normal_cdf(((k - 0.5) / nf - eps) / std);
    let cells = (first..=last)
        .map(|i| {
            let k = (k_lo + i) as f64;
            let mass = match mode {
                RealizationSource::ExactBinomial => masses[i],
                RealizationSource::GaussianApprox => cdf(k + 1.0) - cdf(k),
            };
            GridCell { e: k / nf, m_ch: k / nf, mass }
        })
        .collect();
    Ok(RealizationGrid { cells, source: mode }.normalize())
}

/// Grid on the AWGN error-probability axis with cells mapped to mean LLRs.
pub fn realization_grid_awgn(c: &ChannelSpec, n: usize, cells: usize, span_sigmas: f64) -> Result<RealizationGrid> {
    let sigma = match *c {
        ChannelSpec::Awgn { sigma } => sigma,
        _ => return Err(Error::Mismatch("AWGN realization grid needs an AWGN channel".into())),
    };
    if n == 0 {
        return Err(Error::Domain("block length must be positive".into()));
    }
    if cells < 8 {
        return Err(Error::Domain(format!("need at least 8 cells, got {cells}")));
    }
    if !(span_sigmas > 0.0) {
        return Err(Error::Domain("span_sigmas must be positive".into()));
    }
    let source = RealizationSource::GaussianApprox;
    let p_c = q_func(1.0 / sigma);
    let std = realized_std(p_c, n);
    let lo = (p_c - span_sigmas * std).max(AWGN_EDGE);
    let hi = (p_c + span_sigmas * std).min(0.5 - AWGN_EDGE);
    if p_c <= AWGN_EDGE || hi <= lo || std == 0.0 {
        return Ok(RealizationGrid::single(p_c, 2.0 / (sigma * sigma), source));
    }
    let width = (hi - lo) / cells as f64;
    let cdf = |e: f64| normal_cdf((e - p_c) / std);
    let grid = (0..cells)
        .map(|k| {
            let left = lo + k as f64 * width;
            let e = left + 0.5 * width;
            let x = q_inv(e)?;
            Ok(GridCell { e, m_ch: 2.0 * x * x, mass: cdf(left + width) - cdf(left) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RealizationGrid { cells: grid, source }.normalize())
}

/// The grid [`predict`] uses for this channel.
pub fn realization_grid(c: &ChannelSpec, n: usize, opts: &GridOptions) -> Result<RealizationGrid> {
    match c.kind() {
        ChannelKind::Bec | ChannelKind::Bsc => realization_grid_discrete(c, n, opts.discrete, opts.truncation),
        ChannelKind::Awgn => realization_grid_awgn(c, n, opts.awgn_cells, opts.awgn_span_sigmas),
    }
}

fn awgn_pb(e: &Ensemble, err: f64, cfg: &DEConfig) -> f64 {
    q_inv(err)
        .and_then(|x| ConditionalChannel::awgn(2.0 * x * x))
        .map_or(0.0, |ch| de_run(e, ch, cfg).pb_conditional)
}

/// Realized error probability at which conditional GA density evolution
/// stops reaching the floor.
///
/// Uniform cells straddling this point are split there so the jump in
/// `P_b|e` is not smeared over a whole cell.
fn awgn_step(e: &Ensemble, cfg: &DEConfig) -> Option<f64> {
    let (mut good, mut bad) = (AWGN_EDGE, 0.5 - AWGN_EDGE);
    if awgn_pb(e, good, cfg) > 0.0 || awgn_pb(e, bad, cfg) == 0.0 {
        return None;
    }
    while bad - good > 1e-13 {
        let mid = 0.5 * (good + bad);
        if awgn_pb(e, mid, cfg) == 0.0 {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some(0.5 * (good + bad))
}

/// Marginalized prediction at one channel parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub p_b: f64,
    /// Number of grid cells evaluated.
    pub cells: usize,
    /// Cells whose DE run clamped a `φ⁻¹` argument.
    pub saturated_cells: usize,
}

/// Evaluates several grids for one ensemble, sharing DE runs between cells
/// whose channel statistic agrees to 12 significant digits.
///
/// Unique statistics are evaluated in parallel on the current rayon pool and
/// summed in grid order, so the result does not depend on the worker count.
fn marginalize_grids(e: &Ensemble, kind: ChannelKind, grids: &[RealizationGrid], cfg: &DEConfig) -> Result<Vec<Prediction>> {
    cfg.validate()?;
    let keys: BTreeSet<u64> = grids
        .iter()
        .flat_map(|g| g.cells.iter().map(|c| round_sig12(c.m_ch).to_bits()))
        .collect();
    let keys: Vec<u64> = keys.into_iter().collect();
    let runs: Vec<DERunResult> = keys
        .par_iter()
        .map(|&bits| ConditionalChannel::new(kind, f64::from_bits(bits)).map(|ch| de_run(e, ch, cfg)))
        .collect::<Result<_>>()?;
    let memo: HashMap<u64, DERunResult> = keys.into_iter().zip(runs).collect();
    let run_at = |m_ch: f64| &memo[&round_sig12(m_ch).to_bits()];
    let mut step: Option<Option<f64>> = None;

    Ok(grids
        .iter()
        .map(|grid| {
            let mut terms: Vec<f64> = grid.cells.iter().map(|c| c.mass * run_at(c.m_ch).pb_conditional).collect();
            if kind == ChannelKind::Awgn {
                for i in 1..grid.cells.len() {
                    let (a, b) = (&grid.cells[i - 1], &grid.cells[i]);
                    if run_at(a.m_ch).pb_conditional > 0.0 || run_at(b.m_ch).pb_conditional == 0.0 {
                        continue;
                    }
                    let Some(edge) = *step.get_or_insert_with(|| awgn_step(e, cfg)) else { break };
                    if edge <= a.e || edge >= b.e {
                        continue;
                    }
                    let width = b.e - a.e;
                    let boundary = 0.5 * (a.e + b.e);
                    let (j, right) = if edge < boundary { (i - 1, boundary) } else { (i, b.e + 0.5 * width) };
                    let inner = awgn_pb(e, 0.5 * (edge + right), cfg);
                    terms[j] = grid.cells[j].mass * (right - edge) / width * inner;
                }
            }
            let p_b: f64 = terms.iter().sum();
            let saturated_cells = grid.cells.iter().filter(|c| run_at(c.m_ch).saturated).count();
            Prediction {
                p_b: p_b.clamp(0.0, 1.0),
                cells: grid.cells.len(),
                saturated_cells,
            }
        })
        .collect())
}

/// Predicted bit error probability of the ensemble (at its block length) on
/// channel `c`.
pub fn predict(e: &Ensemble, c: &ChannelSpec, cfg: &DEConfig, opts: &GridOptions) -> Result<Prediction> {
    let grid = realization_grid(c, e.n(), opts)?;
    let out = marginalize_grids(e, c.kind(), std::slice::from_ref(&grid), cfg)?;
    if out[0].saturated_cells > 0 {
        log::warn!("{c}: {} of {} cells saturated the phi_inv clamp", out[0].saturated_cells, out[0].cells);
    }
    Ok(out[0])
}

/// Which estimate a curve holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Proposed,
    ThresholdBaseline,
    Simulation,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::ThresholdBaseline => "threshold-baseline",
            Method::Simulation => "simulation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub param: f64,
    pub p_b: f64,
    pub cells: usize,
}

/// A predicted (or baseline) error curve over a channel sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionCurve {
    pub points: Vec<CurvePoint>,
    pub ensemble: String,
    pub n: usize,
    pub kind: ChannelKind,
    pub method: Method,
    pub de: DEConfig,
}

/// Runs [`predict`] at every sweep point, in sweep order.
///
/// All points must share one channel kind.
pub fn predict_curve(e: &Ensemble, points: &[SweepPoint], cfg: &DEConfig, opts: &GridOptions) -> Result<PredictionCurve> {
    let kind = common_kind(points)?;
    let grids = points
        .iter()
        .map(|p| realization_grid(&p.channel, e.n(), opts))
        .collect::<Result<Vec<_>>>()?;
    let preds = marginalize_grids(e, kind, &grids, cfg)?;
    for (p, pred) in points.iter().zip(&preds) {
        if pred.saturated_cells > 0 {
            log::warn!("{}: {} of {} cells saturated the phi_inv clamp", p.channel, pred.saturated_cells, pred.cells);
        }
    }
    Ok(PredictionCurve {
        points: points
            .iter()
            .zip(preds)
            .map(|(p, pred)| CurvePoint { param: p.param, p_b: pred.p_b, cells: pred.cells })
            .collect(),
        ensemble: e.label(),
        n: e.n(),
        kind,
        method: Method::Proposed,
        de: *cfg,
    })
}

fn common_kind(points: &[SweepPoint]) -> Result<ChannelKind> {
    let kind = points.first().map_or(ChannelKind::Bec, |p| p.channel.kind());
    if points.iter().any(|p| p.channel.kind() != kind) {
        return Err(Error::Mismatch("sweep mixes channel kinds".into()));
    }
    Ok(kind)
}

/// Block error estimate `Pr(realized channel worse than threshold)`.
///
/// `threshold` is in the channel's own parameter: ε* for BEC/BSC, σ* for
/// AWGN. Exact-binomial grids sum the retained cells beyond ε*; Gaussian
/// models use the closed-form tail.
pub fn threshold_baseline(e: &Ensemble, c: &ChannelSpec, threshold: f64, opts: &GridOptions) -> Result<f64> {
    let n = e.n();
    match *c {
        ChannelSpec::Bec { epsilon } | ChannelSpec::Bsc { epsilon } => match opts.discrete {
            RealizationSource::ExactBinomial => {
                let grid = realization_grid_discrete(c, n, opts.discrete, opts.truncation)?;
                Ok(grid.cells.iter().filter(|cell| cell.e > threshold).map(|cell| cell.mass).sum())
            }
            RealizationSource::GaussianApprox => Ok(gaussian_exceedance(epsilon, realized_std(epsilon, n), threshold)),
        },
        ChannelSpec::Awgn { sigma } => {
            if !(threshold > 0.0) {
                return Err(Error::Domain("AWGN threshold sigma must be positive".into()));
            }
            let p_c = q_func(1.0 / sigma);
            Ok(gaussian_exceedance(p_c, realized_std(p_c, n), q_func(1.0 / threshold)))
        }
    }
}

fn gaussian_exceedance(mean: f64, std: f64, threshold: f64) -> f64 {
    if std == 0.0 {
        return if mean > threshold { 1.0 } else { 0.0 };
    }
    1.0 - normal_cdf((threshold - mean) / std)
}

/// [`threshold_baseline`] at every sweep point.
pub fn baseline_curve(
    e: &Ensemble,
    points: &[SweepPoint],
    threshold: f64,
    cfg: &DEConfig,
    opts: &GridOptions,
) -> Result<PredictionCurve> {
    let kind = common_kind(points)?;
    let curve = points
        .iter()
        .map(|p| {
            let p_b = threshold_baseline(e, &p.channel, threshold, opts)?;
            let cells = match kind {
                ChannelKind::Awgn => opts.awgn_cells,
                _ => realization_grid(&p.channel, e.n(), opts)?.cells.len(),
            };
            Ok(CurvePoint { param: p.param, p_b, cells })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredictionCurve {
        points: curve,
        ensemble: e.label(),
        n: e.n(),
        kind,
        method: Method::ThresholdBaseline,
        de: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_case() {
        let g = realization_grid_discrete(&ChannelSpec::bec(0.5).unwrap(), 4, RealizationSource::ExactBinomial, 1e-10)
            .unwrap();
        assert_eq!(g.cells.len(), 5);
        let k2 = g.cells.iter().find(|c| c.e == 0.5).unwrap();
        assert!((k2.mass - 0.375).abs() < 1e-14);
        assert!((g.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_channels() {
        for mode in [RealizationSource::ExactBinomial, RealizationSource::GaussianApprox] {
            let g = realization_grid_discrete(&ChannelSpec::bec(0.0).unwrap(), 100, mode, 1e-10).unwrap();
            assert_eq!(g.cells, vec![GridCell { e: 0.0, m_ch: 0.0, mass: 1.0 }]);
        }
        let g = realization_grid_awgn(&ChannelSpec::awgn_sigma(0.1).unwrap(), 1000, 64, 6.0).unwrap();
        assert_eq!(g.cells.len(), 1);
        assert!((g.cells[0].m_ch - 200.0).abs() < 1e-9);
    }

    #[test]
    fn awgn_cell_statistic() {
        let g = realization_grid_awgn(&ChannelSpec::awgn_sigma(1.0).unwrap(), 1024, 64, 6.0).unwrap();
        assert_eq!(g.cells.len(), 64);
        assert!((g.total_mass() - 1.0).abs() < 1e-9);
        for w in g.cells.windows(2) {
            assert!(w[0].e < w[1].e);
            assert!(w[0].m_ch > w[1].m_ch);
        }
        for c in &g.cells {
            let x = (c.m_ch / 2.0).sqrt();
            assert!(((q_func(x) - c.e) / c.e).abs() < 1e-10);
        }
    }

    #[test]
    fn argument_validation() {
        let bec = ChannelSpec::bec(0.3).unwrap();
        let awgn = ChannelSpec::awgn_sigma(0.9).unwrap();
        assert!(realization_grid_discrete(&awgn, 10, RealizationSource::ExactBinomial, 1e-10).is_err());
        assert!(realization_grid_discrete(&bec, 0, RealizationSource::ExactBinomial, 1e-10).is_err());
        assert!(realization_grid_discrete(&bec, 10, RealizationSource::ExactBinomial, 0.0).is_err());
        assert!(realization_grid_awgn(&bec, 10, 64, 6.0).is_err());
        assert!(realization_grid_awgn(&awgn, 10, 4, 6.0).is_err());
    }

    #[test]
    fn mixed_sweep_rejected() {
        let e = Ensemble::regular(3, 6, 64).unwrap();
        let pts = [
            SweepPoint { param: 0.3, channel: ChannelSpec::bec(0.3).unwrap() },
            SweepPoint { param: 0.03, channel: ChannelSpec::bsc(0.03).unwrap() },
        ];
        assert!(predict_curve(&e, &pts, &DEConfig::default(), &GridOptions::default()).is_err());
    }
}
