//! Binary-input memoryless channels and their parameter conversions.
//!
//! BPSK maps bit 0 to `+1` and bit 1 to `-1` throughout the crate. Eb/N0 is
//! energy per information bit, so converting it to a noise level needs the
//! code rate.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Gaussian tail `Q(x) = P(Z > x)` for a standard normal `Z`.
pub fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    q_func(-x)
}

/// Inverse of [`q_func`] for `p ∈ (0, 1)`.
///
/// Safeguarded Newton on `ln Q` inside a bracket, so tiny tail probabilities
/// keep full relative precision.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("q_inv argument {p} outside (0, 1)")));
    }
    if p > 0.5 {
        return Ok(-q_inv(1.0 - p)?);
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let target = p.ln();
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    let mut x = (-2.0 * (2.0 * p).ln()).sqrt().min(39.0);
    for _ in 0..200 {
        let q = q_func(x);
        let g = q.ln() - target;
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut next = x + g * q / pdf;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Noise standard deviation for a given Eb/N0 (dB) and code rate:
/// `σ = 1 / sqrt(2 R 10^(EbN0/10))`.
pub fn ebn0_to_sigma(ebn0_db: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    if !ebn0_db.is_finite() {
        return Err(Error::Domain(format!("Eb/N0 {ebn0_db} dB is not finite")));
    }
    Ok(1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0)).sqrt())
}

/// Inverse of [`ebn0_to_sigma`].
pub fn sigma_to_ebn0(sigma: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("sigma {sigma} must be positive")));
    }
    Ok(10.0 * (1.0 / (2.0 * rate * sigma * sigma)).log10())
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("code rate {rate} outside (0, 1)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Bec,
    Bsc,
    Awgn,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Bec => "bec",
            ChannelKind::Bsc => "bsc",
            ChannelKind::Awgn => "awgn",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully parameterized channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSpec {
    /// Binary erasure channel with erasure probability `epsilon ∈ [0, 1]`.
    Bec { epsilon: f64 },
    /// Binary symmetric channel with crossover probability `epsilon ∈ [0, 0.5]`.
    Bsc { epsilon: f64 },
    /// Binary-input AWGN channel with noise standard deviation `sigma > 0`.
    Awgn { sigma: f64 },
}

impl ChannelSpec {
    pub fn bec(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Domain(format!("BEC erasure probability {epsilon} outside [0, 1]")));
        }
        Ok(ChannelSpec::Bec { epsilon })
    }

    pub fn bsc(epsilon: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&epsilon) {
            return Err(Error::Domain(format!("BSC crossover probability {epsilon} outside [0, 0.5]")));
        }
        Ok(ChannelSpec::Bsc { epsilon })
    }

    pub fn awgn_sigma(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("AWGN sigma {sigma} must be positive and finite")));
        }
        Ok(ChannelSpec::Awgn { sigma })
    }

    pub fn awgn_ebn0(ebn0_db: f64, rate: f64) -> Result<Self> {
        Self::awgn_sigma(ebn0_to_sigma(ebn0_db, rate)?)
    }

    /// Builds a channel of `kind` from its natural parameter (ε or σ).
    pub fn from_param(kind: ChannelKind, param: f64) -> Result<Self> {
        match kind {
            ChannelKind::Bec => Self::bec(param),
            ChannelKind::Bsc => Self::bsc(param),
            ChannelKind::Awgn => Self::awgn_sigma(param),
        }
    }

    pub fn kind(&self) -> ChannelKind {
        match self {
            ChannelSpec::Bec { .. } => ChannelKind::Bec,
            ChannelSpec::Bsc { .. } => ChannelKind::Bsc,
            ChannelSpec::Awgn { .. } => ChannelKind::Awgn,
        }
    }

    /// The natural parameter: ε for BEC/BSC, σ for AWGN.
    pub fn param(&self) -> f64 {
        match *self {
            ChannelSpec::Bec { epsilon } | ChannelSpec::Bsc { epsilon } => epsilon,
            ChannelSpec::Awgn { sigma } => sigma,
        }
    }

    /// Per-bit channel error (or erasure) probability; `Q(1/σ)` for AWGN.
    pub fn error_prob(&self) -> f64 {
        match *self {
            ChannelSpec::Bec { epsilon } | ChannelSpec::Bsc { epsilon } => epsilon,
            ChannelSpec::Awgn { sigma } => q_func(1.0 / sigma),
        }
    }

    /// Draws one Bernoulli(ε) erasure/flip event. Always false for AWGN.
    #[inline]
    pub fn sample_event<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        match *self {
            ChannelSpec::Bec { epsilon } | ChannelSpec::Bsc { epsilon } => {
                rng.random::<f64>() < epsilon
            }
            ChannelSpec::Awgn { .. } => false,
        }
    }

    /// Draws one noise sample `σ z`, zero for BEC/BSC.
    #[inline]
    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ChannelSpec::Awgn { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
            _ => 0.0,
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ChannelSpec::Bec { epsilon } => write!(f, "bec:{epsilon}"),
            ChannelSpec::Bsc { epsilon } => write!(f, "bsc:{epsilon}"),
            ChannelSpec::Awgn { sigma } => write!(f, "awgn:sigma={sigma}"),
        }
    }
}

/// `p_c = Q(1/σ)` for an AWGN channel.
pub fn awgn_error_prob(c: &ChannelSpec) -> Result<f64> {
    match *c {
        ChannelSpec::Awgn { sigma } => Ok(q_func(1.0 / sigma)),
        other => Err(Error::Mismatch(format!("{other} is not an AWGN channel"))),
    }
}

/// A channel log-likelihood ratio `ln p(x=+1|y) / p(x=-1|y)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Llr(pub f64);

/// `L = 2y / σ²`.
pub fn channel_llr(c: &ChannelSpec, y: f64) -> Result<Llr> {
    match *c {
        ChannelSpec::Awgn { sigma } => Ok(Llr(2.0 * y / (sigma * sigma))),
        other => Err(Error::Mismatch(format!("{other} has no Gaussian LLR"))),
    }
}

/// How an AWGN channel was given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AwgnParam {
    EbN0(f64),
    Sigma(f64),
}

/// Command-line channel syntax: `bec`, `bec:0.40`, `bsc:0.04`,
/// `awgn`, `awgn:ebn0=1.5`, `awgn:sigma=0.9`.
///
/// The parameter is optional so the same flag can name the channel family
/// for a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelArg {
    Bec(Option<f64>),
    Bsc(Option<f64>),
    Awgn(Option<AwgnParam>),
}

impl ChannelArg {
    pub fn kind(&self) -> ChannelKind {
        match self {
            ChannelArg::Bec(_) => ChannelKind::Bec,
            ChannelArg::Bsc(_) => ChannelKind::Bsc,
            ChannelArg::Awgn(_) => ChannelKind::Awgn,
        }
    }

    pub fn has_param(&self) -> bool {
        match self {
            ChannelArg::Bec(p) | ChannelArg::Bsc(p) => p.is_some(),
            ChannelArg::Awgn(p) => p.is_some(),
        }
    }
}

impl FromStr for ChannelArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((name, rest)) => (name, Some(rest)),
            None => (s, None),
        };
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad channel parameter `{t}` in `{s}`")))
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "bec" => Ok(ChannelArg::Bec(rest.map(number).transpose()?)),
            "bsc" => Ok(ChannelArg::Bsc(rest.map(number).transpose()?)),
            "awgn" | "biawgn" => {
                let param = match rest {
                    None => None,
                    Some(r) => {
                        let (key, value) = r.split_once('=').ok_or_else(|| {
                            Error::Parse(format!("expected `awgn:ebn0=<dB>` or `awgn:sigma=<s>`, got `{s}`"))
                        })?;
                        let value = number(value)?;
                        match key.trim() {
                            "ebn0" => Some(AwgnParam::EbN0(value)),
                            "sigma" => Some(AwgnParam::Sigma(value)),
                            other => {
                                return Err(Error::Parse(format!("unknown AWGN parameter `{other}`")))
                            }
                        }
                    }
                };
                Ok(ChannelArg::Awgn(param))
            }
            other => Err(Error::Parse(format!("unknown channel `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn q_func_reference_values() {
        // 40-digit erfc reference values
        let table = [
            (0.0, 0.5),
            (0.5, 0.30853753872598689636),
            (1.0, 0.15865525393145705141),
            (2.0, 0.0227501319481792072),
            (3.0, 0.0013498980316300945267),
            (5.0, 2.8665157187919391167e-7),
            (8.0, 6.2209605742717841235e-16),
            (10.0, 7.619853024160526066e-24),
            (20.0, 2.7536241186062336951e-89),
            (-1.0, 0.84134474606854294859),
            (-2.5, 0.99379033467422386483),
        ];
        for (x, want) in table {
            assert!(rel(q_func(x), want) <= 1e-12, "Q({x}) = {} want {want}", q_func(x));
        }
        for x in [0.1, 0.7, 1.9, 4.2] {
            assert!((q_func(x) + q_func(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn q_inv_roundtrip() {
        for p in [0.5, 0.4, 0.158655253931457, 1e-3, 1e-10, 1e-100, 5.7255712225245768227e-300, 0.9, 0.999] {
            let x = q_inv(p).unwrap();
            assert!(rel(q_func(x), p) < 1e-12, "p={p} x={x}");
        }
        assert!((q_inv(0.15865525393145705141).unwrap() - 1.0).abs() < 1e-12);
        assert!((q_inv(5.7255712225245768227e-300).unwrap() - 37.0).abs() < 1e-10);
        assert!(q_inv(0.0).is_err());
        assert!(q_inv(1.0).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn awgn_conversions() {
        assert_eq!(ebn0_to_sigma(0.0, 0.5).unwrap(), 1.0);
        assert!((ebn0_to_sigma(10.0 * 2f64.log10(), 0.5).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((ebn0_to_sigma(3.0103, 0.5).unwrap() - 0.7071).abs() < 1e-4);
        for db in [-2.0, 0.0, 1.5, 3.7] {
            let s = ebn0_to_sigma(db, 0.4).unwrap();
            assert!((sigma_to_ebn0(s, 0.4).unwrap() - db).abs() < 1e-12);
        }
        assert!(ebn0_to_sigma(1.0, 1.0).is_err());
        assert!(ebn0_to_sigma(1.0, 0.0).is_err());

        let c = ChannelSpec::awgn_sigma(1.0).unwrap();
        assert!((awgn_error_prob(&c).unwrap() - 0.158655).abs() < 1e-6);
        let c = ChannelSpec::awgn_ebn0(0.0, 0.5).unwrap();
        assert!((awgn_error_prob(&c).unwrap() - 0.158655).abs() < 1e-6);
        let tiny = ChannelSpec::awgn_sigma(0.05).unwrap();
        assert!(awgn_error_prob(&tiny).unwrap() < 1e-80);
        assert!(awgn_error_prob(&ChannelSpec::bec(0.3).unwrap()).is_err());
    }

    #[test]
    fn llr_examples() {
        let one = ChannelSpec::awgn_sigma(1.0).unwrap();
        assert_eq!(channel_llr(&one, 1.0).unwrap(), Llr(2.0));
        assert_eq!(channel_llr(&one, 0.0).unwrap(), Llr(0.0));
        let half = ChannelSpec::awgn_sigma(0.5).unwrap();
        assert_eq!(channel_llr(&half, -0.25).unwrap(), Llr(-2.0));
        assert!(channel_llr(&ChannelSpec::bsc(0.1).unwrap(), 1.0).is_err());
    }

    #[test]
    fn parameter_ranges() {
        assert!(ChannelSpec::bec(1.0).is_ok());
        assert!(ChannelSpec::bec(1.1).is_err());
        assert!(ChannelSpec::bsc(0.5).is_ok());
        assert!(ChannelSpec::bsc(0.6).is_err());
        assert!(ChannelSpec::awgn_sigma(0.0).is_err());
    }

    #[test]
    fn channel_syntax() {
        assert_eq!("bec:0.40".parse::<ChannelArg>().unwrap(), ChannelArg::Bec(Some(0.40)));
        assert_eq!("bsc".parse::<ChannelArg>().unwrap(), ChannelArg::Bsc(None));
        assert_eq!(
            "awgn:ebn0=1.5".parse::<ChannelArg>().unwrap(),
            ChannelArg::Awgn(Some(AwgnParam::EbN0(1.5)))
        );
        assert_eq!(
            "awgn:sigma=0.9".parse::<ChannelArg>().unwrap(),
            ChannelArg::Awgn(Some(AwgnParam::Sigma(0.9)))
        );
        assert!("awgn:snr=3".parse::<ChannelArg>().is_err());
        assert!("bec:abc".parse::<ChannelArg>().is_err());
        assert!("fading".parse::<ChannelArg>().is_err());
    }
}
