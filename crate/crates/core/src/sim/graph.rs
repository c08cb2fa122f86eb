//! Tanner graphs sampled from an ensemble by the configuration model.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ensemble::{DegreeDistribution, Ensemble};
use crate::{Error, Result};

/// Pairing passes spent removing repeated variable-check pairs.
pub const MULTI_EDGE_ATTEMPTS: usize = 100;

/// A bipartite graph in compressed form.
///
/// Edges are numbered by variable socket: the edges of variable `v` are
/// `var_start[v]..var_start[v + 1]`. `check_edges` lists edge numbers grouped
/// by check socket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    var_start: Vec<usize>,
    edge_check: Vec<u32>,
    check_start: Vec<usize>,
    check_edges: Vec<u32>,
    edge_var: Vec<u32>,
}

impl TannerGraph {
    /// Builds a graph from `(variable, check)` pairs.
    pub fn from_edges(n: usize, m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if let Some(&(v, c)) = edges.iter().find(|&&(v, c)| v >= n || c >= m) {
            return Err(Error::Domain(format!("edge ({v}, {c}) outside a {n}x{m} graph")));
        }
        let mut sorted = edges.to_vec();
        sorted.sort_by_key(|&(v, _)| v);
        let mut var_deg = vec![0usize; n];
        for &(v, _) in &sorted {
            var_deg[v] += 1;
        }
        let checks: Vec<u32> = sorted.iter().map(|&(_, c)| c as u32).collect();
        Ok(Self::assemble(&var_deg, m, checks))
    }

    fn assemble(var_deg: &[usize], m: usize, edge_check: Vec<u32>) -> Self {
        let mut var_start = Vec::with_capacity(var_deg.len() + 1);
        let mut acc = 0;
        var_start.push(0);
        for &d in var_deg {
            acc += d;
            var_start.push(acc);
        }
        let mut edge_var = vec![0u32; edge_check.len()];
        for v in 0..var_deg.len() {
            for e in var_start[v]..var_start[v + 1] {
                edge_var[e] = v as u32;
            }
        }
        let mut check_start = vec![0usize; m + 1];
        for &c in &edge_check {
            check_start[c as usize + 1] += 1;
        }
        for c in 0..m {
            check_start[c + 1] += check_start[c];
        }
        let mut fill = check_start.clone();
        let mut check_edges = vec![0u32; edge_check.len()];
        for (e, &c) in edge_check.iter().enumerate() {
            check_edges[fill[c as usize]] = e as u32;
            fill[c as usize] += 1;
        }
        TannerGraph { var_start, edge_check, check_start, check_edges, edge_var }
    }

    pub fn n(&self) -> usize {
        self.var_start.len() - 1
    }

    pub fn m(&self) -> usize {
        self.check_start.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_check.len()
    }

    /// Edge numbers of variable `v`.
    #[inline]
    pub fn var_edges(&self, v: usize) -> std::ops::Range<usize> {
        self.var_start[v]..self.var_start[v + 1]
    }

    /// Edge numbers of check `c`.
    #[inline]
    pub fn check_edges(&self, c: usize) -> &[u32] {
        &self.check_edges[self.check_start[c]..self.check_start[c + 1]]
    }

    #[inline]
    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e] as usize
    }

    #[inline]
    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e] as usize
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_start[v + 1] - self.var_start[v]
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_start[c + 1] - self.check_start[c]
    }

    /// `(degree, node count)` pairs of the variable side, ascending by degree.
    pub fn var_histogram(&self) -> Vec<(usize, usize)> {
        histogram((0..self.n()).map(|v| self.var_degree(v)))
    }

    pub fn check_histogram(&self) -> Vec<(usize, usize)> {
        histogram((0..self.m()).map(|c| self.check_degree(c)))
    }

    /// Number of variable-check pairs joined by more than one edge.
    pub fn multi_edges(&self) -> usize {
        (0..self.n())
            .map(|v| {
                let mut cs: Vec<u32> = self.var_edges(v).map(|e| self.edge_check[e]).collect();
                cs.sort_unstable();
                cs.windows(2).filter(|w| w[0] == w[1]).count()
            })
            .sum()
    }

    /// Whether `bits` satisfies every parity check.
    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        (0..self.m()).all(|c| self.check_edges(c).iter().fold(0u8, |acc, &e| acc ^ bits[self.edge_var(e as usize)]) == 0)
    }
}

fn histogram(degrees: impl Iterator<Item = usize>) -> Vec<(usize, usize)> {
    let mut h = std::collections::BTreeMap::new();
    for d in degrees {
        *h.entry(d).or_insert(0usize) += 1;
    }
    h.into_iter().collect()
}

/// Integer node counts per degree class for a length-`n` graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCounts {
    /// `(degree, count)` for variable nodes.
    pub var: Vec<(u32, usize)>,
    /// `(degree, count)` for check nodes.
    pub check: Vec<(u32, usize)>,
}

impl NodeCounts {
    pub fn var_sockets(&self) -> usize {
        sockets(&self.var)
    }

    pub fn check_sockets(&self) -> usize {
        sockets(&self.check)
    }

    pub fn checks(&self) -> usize {
        self.check.iter().map(|&(_, k)| k).sum()
    }
}

fn sockets(classes: &[(u32, usize)]) -> usize {
    classes.iter().map(|&(d, k)| d as usize * k).sum()
}

/// Largest-remainder apportionment of `total` nodes; ties go to the larger degree.
fn apportion(dist: &DegreeDistribution, total: usize) -> Vec<(u32, usize)> {
    let quotas: Vec<(u32, f64)> = dist.terms().iter().map(|&(d, p)| (d, p * total as f64)).collect();
    let mut counts: Vec<(u32, usize)> = quotas.iter().map(|&(d, q)| (d, q.floor() as usize)).collect();
    let assigned: usize = counts.iter().map(|&(_, k)| k).sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a].1 - quotas[a].1.floor();
        let rb = quotas[b].1 - quotas[b].1.floor();
        rb.total_cmp(&ra).then(quotas[b].0.cmp(&quotas[a].0))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i].1 += 1;
    }
    counts
}

/// Rounds the ensemble's node distributions to integer counts with equal
/// socket totals on both sides.
///
/// Counts start from largest-remainder rounding of `n·v_i` and `m·h_j`. A
/// socket mismatch is repaired by changing check classes by at most one node
/// each and moving at most one variable node between classes; among repairs
/// of equal size the one touching the largest degrees wins.
pub fn node_counts(e: &Ensemble, n: usize) -> Result<NodeCounts> {
    if n == 0 {
        return Err(Error::Rounding("block length must be positive".into()));
    }
    let var = apportion(e.var_nodes(), n);
    let m0 = (n as f64 * e.expected_checks() / e.n() as f64).round().max(1.0) as usize;
    let check = apportion(e.check_nodes(), m0);
    let counts = NodeCounts { var, check };
    let diff = counts.var_sockets() as i64 - counts.check_sockets() as i64;
    if diff == 0 {
        return Ok(counts);
    }
    repair(counts, diff).ok_or_else(|| {
        Error::Rounding(format!(
            "no integer node assignment within one node per degree class balances the sockets for n={n}"
        ))
    })
}

fn repair(counts: NodeCounts, diff: i64) -> Option<NodeCounts> {
    let kc = counts.check.len();
    if kc > 12 {
        return None;
    }
    // variable moves: none, or one node from class a to class b
    let kv = counts.var.len();
    let mut moves: Vec<Option<(usize, usize)>> = vec![None];
    for a in 0..kv {
        for b in 0..kv {
            if a != b && counts.var[a].1 > 0 {
                moves.push(Some((a, b)));
            }
        }
    }
    let mut best: Option<((usize, i64), NodeCounts)> = None;
    for code in 0..3usize.pow(kc as u32) {
        let deltas: Vec<i64> = (0..kc).map(|j| (code / 3usize.pow(j as u32) % 3) as i64 - 1).collect();
        if deltas.iter().zip(&counts.check).any(|(&d, &(_, k))| d < 0 && k == 0) {
            continue;
        }
        let check_change: i64 = deltas.iter().zip(&counts.check).map(|(&d, &(deg, _))| d * deg as i64).sum();
        for mv in &moves {
            let var_change = mv.map_or(0, |(a, b)| counts.var[b].0 as i64 - counts.var[a].0 as i64);
            // sockets: var + var_change must equal check + check_change
            if var_change - check_change != -diff {
                continue;
            }
            let touched = deltas.iter().filter(|&&d| d != 0).count() + if mv.is_some() { 2 } else { 0 };
            let weight: i64 = deltas
                .iter()
                .zip(&counts.check)
                .filter(|(&d, _)| d != 0)
                .map(|(_, &(deg, _))| deg as i64)
                .sum::<i64>()
                + mv.map_or(0, |(a, b)| (counts.var[a].0 + counts.var[b].0) as i64);
            let key = (touched, -weight);
            if best.as_ref().is_some_and(|(k, _)| *k <= key) {
                continue;
            }
            let mut fixed = counts.clone();
            for (slot, d) in fixed.check.iter_mut().zip(&deltas) {
                slot.1 = (slot.1 as i64 + d) as usize;
            }
            if let Some((a, b)) = *mv {
                fixed.var[a].1 -= 1;
                fixed.var[b].1 += 1;
            }
            if fixed.checks() == 0 {
                continue;
            }
            best = Some((key, fixed));
        }
    }
    best.map(|(_, c)| c)
}

/// Samples a graph with `n` variable nodes from the ensemble.
///
/// Check sockets are paired with variable sockets by a uniform random
/// permutation. Repeated variable-check pairs are then broken up by swapping
/// one of their check sockets with a random edge, for up to
/// [`MULTI_EDGE_ATTEMPTS`] passes; leftovers are kept with a warning.
pub fn build_graph<R: Rng + ?Sized>(e: &Ensemble, n: usize, rng: &mut R) -> Result<TannerGraph> {
    let counts = node_counts(e, n)?;
    let var_deg: Vec<usize> = counts
        .var
        .iter()
        .flat_map(|&(d, k)| std::iter::repeat_n(d as usize, k))
        .collect();
    let mut check_sockets: Vec<u32> = Vec::with_capacity(counts.check_sockets());
    let mut c = 0u32;
    for &(d, k) in &counts.check {
        for _ in 0..k {
            check_sockets.extend(std::iter::repeat_n(c, d as usize));
            c += 1;
        }
    }
    check_sockets.shuffle(rng);
    remove_multi_edges(&var_deg, &mut check_sockets, rng);
    Ok(TannerGraph::assemble(&var_deg, counts.checks(), check_sockets))
}

fn remove_multi_edges<R: Rng + ?Sized>(var_deg: &[usize], edge_check: &mut [u32], rng: &mut R) {
    let edges = edge_check.len();
    if edges < 2 {
        return;
    }
    let mut start = Vec::with_capacity(var_deg.len());
    let mut acc = 0;
    for &d in var_deg {
        start.push(acc);
        acc += d;
    }
    for _ in 0..MULTI_EDGE_ATTEMPTS {
        let mut clean = true;
        for (v, &d) in var_deg.iter().enumerate() {
            let s = start[v];
            for i in 1..d {
                if edge_check[s..s + i].contains(&edge_check[s + i]) {
                    clean = false;
                    let other = rng.random_range(0..edges);
                    edge_check.swap(s + i, other);
                }
            }
        }
        if clean {
            return;
        }
    }
    log::warn!("graph keeps repeated edges after {MULTI_EDGE_ATTEMPTS} passes");
}
