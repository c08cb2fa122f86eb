//! Degree distributions and LDPC ensembles.
//!
//! A distribution is stored sparsely as `(degree, fraction)` pairs sorted by
//! degree. The same container serves the four perspectives: variable-node
//! `v(x) = Σ v_i x^i`, check-node `h(x) = Σ h_i x^i`, and the edge
//! perspectives `λ(x) = Σ λ_i x^(i-1)` and `ρ(x) = Σ ρ_i x^(i-1)`.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Largest node degree accepted in a distribution.
pub const MAX_DEGREE: u32 = 4096;

/// Coefficient sums within this distance of one are renormalized silently.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

/// Which polynomial a [`DegreeDistribution`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Perspective {
    /// `v(x)`: fraction of variable nodes of each degree.
    VariableNode,
    /// `h(x)`: fraction of check nodes of each degree.
    CheckNode,
    /// `λ(x)`: fraction of edges attached to variable nodes of each degree.
    VariableEdge,
    /// `ρ(x)`: fraction of edges attached to check nodes of each degree.
    CheckEdge,
}

impl Perspective {
    pub fn is_edge(self) -> bool {
        matches!(self, Perspective::VariableEdge | Perspective::CheckEdge)
    }

    /// The same side of the graph seen from the other perspective.
    pub fn counterpart(self) -> Perspective {
        match self {
            Perspective::VariableNode => Perspective::VariableEdge,
            Perspective::CheckNode => Perspective::CheckEdge,
            Perspective::VariableEdge => Perspective::VariableNode,
            Perspective::CheckEdge => Perspective::CheckNode,
        }
    }
}

/// A normalized degree distribution in one perspective.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    perspective: Perspective,
    terms: Vec<(u32, f64)>,
}

impl DegreeDistribution {
    /// Builds a distribution from `(degree, fraction)` pairs.
    ///
    /// Repeated degrees are summed and zero fractions dropped. Degrees must lie
    /// in `2..=MAX_DEGREE`. A total within [`RENORMALIZE_TOLERANCE`] of one is
    /// rescaled to one; anything further off is rejected.
    pub fn new<I>(perspective: Perspective, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, f64)>,
    {
        let mut terms: Vec<(u32, f64)> = Vec::new();
        for (degree, frac) in coeffs {
            if degree < 2 {
                return Err(Error::InvalidDistribution(format!(
                    "degree {degree} not allowed, minimum degree is 2"
                )));
            }
            if degree > MAX_DEGREE {
                return Err(Error::InvalidDistribution(format!(
                    "degree {degree} exceeds maximum {MAX_DEGREE}"
                )));
            }
            if !frac.is_finite() || frac < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "fraction {frac} for degree {degree} must be finite and non-negative"
                )));
            }
            match terms.iter_mut().find(|(d, _)| *d == degree) {
                Some((_, c)) => *c += frac,
                None => terms.push((degree, frac)),
            }
        }
        terms.retain(|&(_, c)| c > 0.0);
        terms.sort_by_key(|&(d, _)| d);
        let total: f64 = terms.iter().map(|&(_, c)| c).sum();
        if terms.is_empty() || (total - 1.0).abs() > RENORMALIZE_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "fractions sum to {total}, expected 1"
            )));
        }
        for (_, c) in terms.iter_mut() {
            *c /= total;
        }
        Ok(DegreeDistribution { perspective, terms })
    }

    /// A single-degree distribution.
    pub fn regular(perspective: Perspective, degree: u32) -> Result<Self> {
        Self::new(perspective, [(degree, 1.0)])
    }

    pub fn perspective(&self) -> Perspective {
        self.perspective
    }

    /// Nonzero `(degree, fraction)` pairs in increasing degree order.
    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    pub fn coeff(&self, degree: u32) -> f64 {
        self.terms
            .iter()
            .find(|&&(d, _)| d == degree)
            .map_or(0.0, |&(_, c)| c)
    }

    pub fn min_degree(&self) -> u32 {
        self.terms[0].0
    }

    pub fn max_degree(&self) -> u32 {
        self.terms[self.terms.len() - 1].0
    }

    /// Evaluates the polynomial at `x ∈ [0, 1]`.
    ///
    /// Edge perspectives use exponent `i - 1`, node perspectives exponent `i`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!(
                "polynomial argument {x} outside [0, 1]"
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        let shift = i32::from(self.perspective.is_edge());
        self.terms
            .iter()
            .map(|&(d, c)| c * x.powi(d as i32 - shift))
            .sum()
    }

    /// Mean of `1/degree` under an edge distribution, or mean degree under a
    /// node distribution.
    fn edge_node_ratio(&self) -> f64 {
        if self.perspective.is_edge() {
            self.terms.iter().map(|&(d, c)| c / f64::from(d)).sum()
        } else {
            self.terms.iter().map(|&(d, c)| c * f64::from(d)).sum()
        }
    }

    /// Average node degree on this side of the graph.
    pub fn average_degree(&self) -> f64 {
        if self.perspective.is_edge() {
            1.0 / self.edge_node_ratio()
        } else {
            self.edge_node_ratio()
        }
    }

    /// Converts an edge-perspective distribution to node perspective:
    /// `v_i = (λ_i / i) / Σ_j (λ_j / j)`.
    pub fn edge_to_node(&self) -> Result<Self> {
        if !self.perspective.is_edge() {
            return Err(Error::Mismatch(
                "edge_to_node needs an edge-perspective distribution".into(),
            ));
        }
        let norm = self.edge_node_ratio();
        let terms = self
            .terms
            .iter()
            .map(|&(d, c)| (d, c / f64::from(d) / norm))
            .collect();
        Ok(DegreeDistribution {
            perspective: self.perspective.counterpart(),
            terms,
        })
    }

    /// Converts a node-perspective distribution to edge perspective:
    /// `λ_i = i v_i / Σ_j j v_j`.
    pub fn node_to_edge(&self) -> Result<Self> {
        if self.perspective.is_edge() {
            return Err(Error::Mismatch(
                "node_to_edge needs a node-perspective distribution".into(),
            ));
        }
        let norm = self.edge_node_ratio();
        let terms = self
            .terms
            .iter()
            .map(|&(d, c)| (d, c * f64::from(d) / norm))
            .collect();
        Ok(DegreeDistribution {
            perspective: self.perspective.counterpart(),
            terms,
        })
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shift = u32::from(self.perspective.is_edge());
        for (idx, &(d, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}x^{}", d - shift)?;
        }
        Ok(())
    }
}

/// An LDPC ensemble: edge-perspective degree pair plus block length.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    lambda: DegreeDistribution,
    rho: DegreeDistribution,
    var_nodes: DegreeDistribution,
    check_nodes: DegreeDistribution,
    n: usize,
}

impl Ensemble {
    pub fn new(lambda: DegreeDistribution, rho: DegreeDistribution, n: usize) -> Result<Self> {
        if lambda.perspective() != Perspective::VariableEdge {
            return Err(Error::Mismatch("lambda must be variable-edge perspective".into()));
        }
        if rho.perspective() != Perspective::CheckEdge {
            return Err(Error::Mismatch("rho must be check-edge perspective".into()));
        }
        if n == 0 {
            return Err(Error::InvalidDistribution("block length must be positive".into()));
        }
        let var_nodes = lambda.edge_to_node()?;
        let check_nodes = rho.edge_to_node()?;
        let ensemble = Ensemble {
            lambda,
            rho,
            var_nodes,
            check_nodes,
            n,
        };
        let rate = ensemble.design_rate();
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "design rate {rate} outside (0, 1)"
            )));
        }
        Ok(ensemble)
    }

    /// The `(dv, dc)`-regular ensemble.
    pub fn regular(dv: u32, dc: u32, n: usize) -> Result<Self> {
        Self::new(
            DegreeDistribution::regular(Perspective::VariableEdge, dv)?,
            DegreeDistribution::regular(Perspective::CheckEdge, dc)?,
            n,
        )
    }

    /// Same degree pair at a different block length.
    pub fn with_block_length(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("block length must be positive".into()));
        }
        Ok(Ensemble { n, ..self.clone() })
    }

    pub fn lambda(&self) -> &DegreeDistribution {
        &self.lambda
    }

    pub fn rho(&self) -> &DegreeDistribution {
        &self.rho
    }

    /// Node-perspective variable distribution `v(x)`.
    pub fn var_nodes(&self) -> &DegreeDistribution {
        &self.var_nodes
    }

    /// Node-perspective check distribution `h(x)`.
    pub fn check_nodes(&self) -> &DegreeDistribution {
        &self.check_nodes
    }

    /// Block length `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `R = 1 - (Σ ρ_j / j) / (Σ λ_i / i)`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.rho.edge_node_ratio() / self.lambda.edge_node_ratio()
    }

    /// `R = 1 - (Σ v_i i) / (Σ h_i i)`, the node-perspective form of the rate.
    pub fn design_rate_from_nodes(&self) -> f64 {
        1.0 - self.var_nodes.edge_node_ratio() / self.check_nodes.edge_node_ratio()
    }

    /// Expected number of check nodes `M = N (1 - R)`, not rounded.
    pub fn expected_checks(&self) -> f64 {
        self.n as f64 * (1.0 - self.design_rate())
    }

    /// Short identifier used in reports, e.g. `regular(3,6)`.
    pub fn label(&self) -> String {
        if self.lambda.terms().len() == 1 && self.rho.terms().len() == 1 {
            format!("regular({},{})", self.lambda.min_degree(), self.rho.min_degree())
        } else {
            format!("lambda=[{}];rho=[{}]", self.lambda, self.rho)
        }
    }
}

/// Contents of an ensemble text file.
///
/// ```text
/// # irregular rate-1/2 ensemble
/// lambda 3 0.4
/// lambda 6 0.4
/// lambda 9 0.2
/// rho 9 1.0
/// n 1024
/// ```
///
/// Degrees are node degrees `i`, so `lambda 3 0.4` is the `0.4 x^2` term.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFile {
    pub lambda: DegreeDistribution,
    pub rho: DegreeDistribution,
    pub n: Option<usize>,
}

impl EnsembleFile {
    /// Materializes the ensemble at block length `n`.
    pub fn ensemble(&self, n: usize) -> Result<Ensemble> {
        Ensemble::new(self.lambda.clone(), self.rho.clone(), n)
    }
}

impl FromStr for EnsembleFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lambda = Vec::new();
        let mut rho = Vec::new();
        let mut n = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}: `{raw}`", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [kind @ ("lambda" | "rho"), degree, coeff] => {
                    let degree: u32 = degree.parse().map_err(|_| bad("bad degree"))?;
                    let coeff: f64 = coeff.parse().map_err(|_| bad("bad coefficient"))?;
                    if *kind == "lambda" {
                        lambda.push((degree, coeff));
                    } else {
                        rho.push((degree, coeff));
                    }
                }
                ["n", value] => {
                    let value: usize = value.parse().map_err(|_| bad("bad block length"))?;
                    if value == 0 {
                        return Err(bad("block length must be positive"));
                    }
                    n = Some(value);
                }
                _ => return Err(bad("unrecognized line")),
            }
        }
        if lambda.is_empty() || rho.is_empty() {
            return Err(Error::Parse("ensemble needs both lambda and rho lines".into()));
        }
        let file = EnsembleFile {
            lambda: DegreeDistribution::new(Perspective::VariableEdge, lambda)?,
            rho: DegreeDistribution::new(Perspective::CheckEdge, rho)?,
            n,
        };
        // validates the rate
        file.ensemble(file.n.unwrap_or(1))?;
        Ok(file)
    }
}

/// Parses the `dv,dc` shorthand for a regular ensemble.
pub fn parse_regular(text: &str) -> Result<(u32, u32)> {
    let (dv, dc) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected `dv,dc`, got `{text}`")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| Error::Parse(format!("bad degree `{s}` in `{text}`")))
    };
    Ok((parse(dv)?, parse(dc)?))
}
