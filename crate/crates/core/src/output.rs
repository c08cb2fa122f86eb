//! CSV output shared by the library and the command-line tool.
//!
//! Real numbers are written with 10 significant digits in scientific
//! notation, so identical inputs always produce identical bytes.

use std::io::{self, Write};

use crate::channel::ChannelKind;
use crate::predictor::{Method, PredictionCurve};
use crate::sim::SimResult;

pub const PREDICTION_HEADER: &str = "method,channel,param,n,p_b,cells,l_max";
pub const SIMULATION_HEADER: &str = "channel,param,n,frames,bit_errors,ber,ci95_low,ci95_high,seed";
/// Prediction columns followed by the simulation-only ones; empty where a
/// method has no value.
pub const COMPARE_HEADER: &str = "method,channel,param,n,p_b,cells,l_max,frames,bit_errors,ci95_low,ci95_high,seed";

/// Formats a real with 10 significant digits, e.g. `4.294028282e-1`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.9e}")
}

/// A simulated point together with the sweep value it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimRow {
    pub param: f64,
    pub result: SimResult,
}

fn prediction_fields(curve: &PredictionCurve, i: usize) -> String {
    let p = &curve.points[i];
    format!(
        "{},{},{},{},{},{},{}",
        curve.method.as_str(),
        curve.kind,
        fmt_real(p.param),
        curve.n,
        fmt_real(p.p_b),
        p.cells,
        curve.de.l_max
    )
}

pub fn write_predictions<W: Write>(mut w: W, curves: &[PredictionCurve]) -> io::Result<()> {
    writeln!(w, "{PREDICTION_HEADER}")?;
    for curve in curves {
        for i in 0..curve.points.len() {
            writeln!(w, "{}", prediction_fields(curve, i))?;
        }
    }
    Ok(())
}

fn sim_fields(row: &SimRow) -> String {
    let r = &row.result;
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.channel.kind(),
        fmt_real(row.param),
        r.n,
        r.frames,
        r.bit_errors,
        fmt_real(r.ber),
        fmt_real(r.ci95_low),
        fmt_real(r.ci95_high),
        r.seed
    )
}

pub fn write_simulations<W: Write>(mut w: W, rows: &[SimRow]) -> io::Result<()> {
    writeln!(w, "{SIMULATION_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", sim_fields(row))?;
    }
    Ok(())
}

/// Writes prediction curves, then simulated rows tagged `simulation`.
///
/// Simulated rows report their BER in `p_b` and the decoder iteration limit
/// in `l_max`.
pub fn write_comparison<W: Write>(
    mut w: W,
    curves: &[PredictionCurve],
    sims: &[SimRow],
    sim_l_max: usize,
) -> io::Result<()> {
    writeln!(w, "{COMPARE_HEADER}")?;
    for curve in curves {
        for i in 0..curve.points.len() {
            writeln!(w, "{},,,,,", prediction_fields(curve, i))?;
        }
    }
    for row in sims {
        let r = &row.result;
        writeln!(
            w,
            "{},{},{},{},{},,{},{},{},{},{},{}",
            Method::Simulation.as_str(),
            r.channel.kind(),
            fmt_real(row.param),
            r.n,
            fmt_real(r.ber),
            sim_l_max,
            r.frames,
            r.bit_errors,
            fmt_real(r.ci95_low),
            fmt_real(r.ci95_high),
            r.seed
        )?;
    }
    Ok(())
}

/// Header-checked parse of a comparison CSV into `(method, kind, param, n, p_b)`.
pub fn read_comparison(text: &str) -> crate::Result<Vec<(String, ChannelKind, f64, usize, f64)>> {
    let bad = |msg: String| crate::Error::Parse(msg);
    let mut lines = text.lines();
    if lines.next() != Some(COMPARE_HEADER) {
        return Err(bad("missing comparison header".into()));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 12 {
                return Err(bad(format!("row {}: expected 12 fields, got {}", i + 2, f.len())));
            }
            let kind = match f[1] {
                "bec" => ChannelKind::Bec,
                "bsc" => ChannelKind::Bsc,
                "awgn" => ChannelKind::Awgn,
                other => return Err(bad(format!("row {}: unknown channel `{other}`", i + 2))),
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("row {}: bad number `{s}`", i + 2)));
            let n = f[3].parse().map_err(|_| bad(format!("row {}: bad n `{}`", i + 2, f[3])))?;
            Ok((f[0].to_string(), kind, num(f[2])?, n, num(f[4])?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelSpec;
    use crate::de::DEConfig;
    use crate::predictor::CurvePoint;

    fn curve(method: Method) -> PredictionCurve {
        PredictionCurve {
            points: vec![CurvePoint { param: 0.4, p_b: 7.237e-3, cells: 203 }],
            ensemble: "regular(3,6)".into(),
            n: 1024,
            kind: ChannelKind::Bec,
            method,
            de: DEConfig::default(),
        }
    }

    fn sim() -> SimRow {
        SimRow {
            param: 0.4,
            result: SimResult {
                channel: ChannelSpec::bec(0.4).unwrap(),
                n: 1024,
                frames: 12,
                bit_errors: 190,
                ber: 190.0 / 12288.0,
                ci95_low: 0.013,
                ci95_high: 0.018,
                seed: 7,
            },
        }
    }

    #[test]
    fn real_format() {
        assert_eq!(fmt_real(0.4294028282165527), "4.294028282e-1");
        assert_eq!(fmt_real(0.0), "0.000000000e0");
        assert_eq!(fmt_real(1.0), "1.000000000e0");
    }

    #[test]
    fn prediction_rows() {
        let mut buf = Vec::new();
        write_predictions(&mut buf, &[curve(Method::Proposed)]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "method,channel,param,n,p_b,cells,l_max\nproposed,bec,4.000000000e-1,1024,7.237000000e-3,203,500\n"
        );
    }

    #[test]
    fn simulation_rows() {
        let mut buf = Vec::new();
        write_simulations(&mut buf, &[sim()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some(SIMULATION_HEADER));
        assert_eq!(
            text.lines().nth(1),
            Some("bec,4.000000000e-1,1024,12,190,1.546223958e-2,1.300000000e-2,1.800000000e-2,7")
        );
    }

    #[test]
    fn comparison_roundtrip() {
        let mut buf = Vec::new();
        write_comparison(&mut buf, &[curve(Method::Proposed), curve(Method::ThresholdBaseline)], &[sim()], 200).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines() {
            assert_eq!(line.split(',').count(), 12, "{line}");
        }
        let rows = read_comparison(&text).unwrap();
        let methods: Vec<&str> = rows.iter().map(|r| r.0.as_str()).collect();
        assert_eq!(methods, ["proposed", "threshold-baseline", "simulation"]);
        assert_eq!(rows[2].4, 1.546223958e-2);
        assert!(read_comparison("nope\n").is_err());
    }
}
