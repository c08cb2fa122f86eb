//! Channel-parameter sweeps: `start:stop:step` ranges and the axis they run on.

use std::fmt;
use std::str::FromStr;

use crate::channel::{ChannelKind, ChannelSpec};
use crate::{Error, Result};

/// An arithmetic range that includes `stop` when it falls within half a step
/// of the last point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) {
            return Err(Error::Parse("range bounds must be finite".into()));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Parse(format!("range step {step} must be positive")));
        }
        Ok(SweepRange { start, stop, step })
    }

    /// A single point.
    pub fn point(value: f64) -> Self {
        SweepRange { start: value, stop: value, step: 1.0 }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.stop < self.start {
            return Vec::new();
        }
        let count = ((self.stop - self.start) / self.step + 0.5).floor() as usize + 1;
        (0..count)
            .map(|i| round_sig12(self.start + i as f64 * self.step))
            .collect()
    }
}

impl FromStr for SweepRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(Error::Parse(format!("expected `start:stop:step`, got `{s}`")));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in range `{s}`")))
        };
        SweepRange::new(num(start)?, num(stop)?, num(step)?)
    }
}

impl fmt::Display for SweepRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Rounds to 12 significant digits, removing accumulation noise such as
/// `0.30000000000000004`.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// What the swept number means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Erasure or crossover probability (BEC/BSC).
    Epsilon,
    /// AWGN noise standard deviation.
    Sigma,
    /// AWGN Eb/N0 in dB, converted with the code rate.
    EbN0,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Epsilon => "epsilon",
            Axis::Sigma => "sigma",
            Axis::EbN0 => "ebn0",
        }
    }
}

/// One sweep position: the axis value reported in outputs and the channel it
/// stands for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub param: f64,
    pub channel: ChannelSpec,
}

/// Maps axis values to channels. `rate` is only used for [`Axis::EbN0`].
pub fn sweep_points(kind: ChannelKind, axis: Axis, values: &[f64], rate: f64) -> Result<Vec<SweepPoint>> {
    values
        .iter()
        .map(|&param| {
            let channel = match (kind, axis) {
                (ChannelKind::Bec | ChannelKind::Bsc, Axis::Epsilon) => ChannelSpec::from_param(kind, param)?,
                (ChannelKind::Awgn, Axis::Sigma) => ChannelSpec::awgn_sigma(param)?,
                (ChannelKind::Awgn, Axis::EbN0) => ChannelSpec::awgn_ebn0(param, rate)?,
                _ => {
                    return Err(Error::Mismatch(format!(
                        "{kind} channel cannot be swept over {}",
                        axis.as_str()
                    )))
                }
            };
            Ok(SweepPoint { param, channel })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_ranges() {
        let r: SweepRange = "0.30:0.44:0.01".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 15);
        assert_eq!(v[0], 0.30);
        assert_eq!(v[14], 0.44);
        assert_eq!(v[3], 0.33);
        assert_eq!("0.5:3.0:0.25".parse::<SweepRange>().unwrap().values().len(), 11);
        // stop lands within half a step
        assert_eq!("0:1.04:0.1".parse::<SweepRange>().unwrap().values().len(), 11);
        assert_eq!("0:1.06:0.1".parse::<SweepRange>().unwrap().values().len(), 12);
        assert!("1:0:0.1".parse::<SweepRange>().unwrap().values().is_empty());
        assert_eq!(SweepRange::point(0.4).values(), vec![0.4]);
    }

    #[test]
    fn bad_ranges() {
        assert!("0.3:0.4".parse::<SweepRange>().is_err());
        assert!("0.3:0.4:0".parse::<SweepRange>().is_err());
        assert!("0.3:x:0.1".parse::<SweepRange>().is_err());
    }

    #[test]
    fn axis_mapping() {
        let pts = sweep_points(ChannelKind::Awgn, Axis::EbN0, &[0.0], 0.5).unwrap();
        assert_eq!(pts[0].channel, ChannelSpec::Awgn { sigma: 1.0 });
        assert_eq!(pts[0].param, 0.0);
        assert!(sweep_points(ChannelKind::Bec, Axis::EbN0, &[1.0], 0.5).is_err());
        assert!(sweep_points(ChannelKind::Bsc, Axis::Epsilon, &[0.6], 0.5).is_err());
    }
}
