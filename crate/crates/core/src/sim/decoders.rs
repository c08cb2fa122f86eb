//! Message-passing decoders on a [`TannerGraph`], flooding schedule.

use super::graph::TannerGraph;

/// Largest magnitude a `tanh` product may take before `atanh`.
pub const TANH_CLAMP: f64 = 1.0 - 1e-15;

/// Result of a hard-output decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded<T> {
    pub bits: Vec<T>,
    /// Iterations that ran before the stop rule fired.
    pub iterations: usize,
}

/// Peeling decoder for the erasure channel. `None` marks an erasure.
#[derive(Debug, Clone, Default)]
pub struct ErasureDecoder {
    bits: Vec<Option<u8>>,
    pending: Vec<(usize, u8)>,
}

impl ErasureDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self, received: &[Option<u8>]) {
        self.bits.clear();
        self.bits.extend_from_slice(received);
    }

    pub fn bits(&self) -> &[Option<u8>] {
        &self.bits
    }

    pub fn erasures(&self) -> usize {
        self.bits.iter().filter(|b| b.is_none()).count()
    }

    /// One round: every check with exactly one erased neighbor fixes it from
    /// the parity of the others. Returns the number of bits resolved.
    pub fn step(&mut self, g: &TannerGraph) -> usize {
        self.pending.clear();
        for c in 0..g.m() {
            let mut erased = None;
            let mut count = 0;
            let mut parity = 0u8;
            for &e in g.check_edges(c) {
                let v = g.edge_var(e as usize);
                match self.bits[v] {
                    Some(b) => parity ^= b,
                    None => {
                        count += 1;
                        erased = Some(v);
                    }
                }
            }
            if count == 1 {
                self.pending.push((erased.unwrap_or_default(), parity));
            }
        }
        let mut resolved = 0;
        for &(v, b) in &self.pending {
            if self.bits[v].is_none() {
                self.bits[v] = Some(b);
                resolved += 1;
            }
        }
        resolved
    }

    pub fn run(&mut self, g: &TannerGraph, received: &[Option<u8>], l_max: usize) -> usize {
        self.reset(received);
        let mut iterations = 0;
        while iterations < l_max && self.erasures() > 0 {
            if self.step(g) == 0 {
                break;
            }
            iterations += 1;
        }
        iterations
    }
}

/// Resolves erasures by iterated single-unknown parity checks.
pub fn decode_bec(g: &TannerGraph, received: &[Option<u8>], l_max: usize) -> Decoded<Option<u8>> {
    assert_eq!(received.len(), g.n(), "received word length");
    let mut dec = ErasureDecoder::new();
    let iterations = dec.run(g, received, l_max);
    Decoded { bits: dec.bits, iterations }
}

/// Hard-decision Gallager A decoder.
///
/// A variable sends a value `b` to a check only when every other check told
/// it `b`; otherwise it repeats its received bit. The final decision flips
/// the received bit only when all incoming check messages contradict it.
#[derive(Debug, Clone, Default)]
pub struct GallagerADecoder {
    received: Vec<u8>,
    v2c: Vec<u8>,
    c2v: Vec<u8>,
    checked: bool,
}

impl GallagerADecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self, g: &TannerGraph, received: &[u8]) {
        self.received.clear();
        self.received.extend_from_slice(received);
        self.v2c.clear();
        self.v2c.extend((0..g.edge_count()).map(|e| received[g.edge_var(e)]));
        self.c2v.clear();
        self.c2v.resize(g.edge_count(), 0);
        self.checked = false;
    }

    pub fn v2c(&self) -> &[u8] {
        &self.v2c
    }

    pub fn c2v(&self) -> &[u8] {
        &self.c2v
    }

    /// Check update then variable update. Returns whether any variable
    /// message changed.
    pub fn step(&mut self, g: &TannerGraph) -> bool {
        for c in 0..g.m() {
            let edges = g.check_edges(c);
            let parity = edges.iter().fold(0u8, |acc, &e| acc ^ self.v2c[e as usize]);
            for &e in edges {
                self.c2v[e as usize] = parity ^ self.v2c[e as usize];
            }
        }
        self.checked = true;
        let mut changed = false;
        for v in 0..g.n() {
            let edges = g.var_edges(v);
            let ones = edges.clone().filter(|&e| self.c2v[e] == 1).count();
            let deg = edges.len();
            let r = self.received[v];
            for e in edges {
                let others = deg - 1;
                let others_one = ones - self.c2v[e] as usize;
                let msg = if others > 0 && others_one == others {
                    1
                } else if others > 0 && others_one == 0 {
                    0
                } else {
                    r
                };
                changed |= msg != self.v2c[e];
                self.v2c[e] = msg;
            }
        }
        changed
    }

    /// Hard decisions; the received word until a check update has run.
    pub fn decisions(&self, g: &TannerGraph, out: &mut Vec<u8>) {
        out.clear();
        if !self.checked {
            out.extend_from_slice(&self.received);
            return;
        }
        out.extend((0..g.n()).map(|v| {
            let r = self.received[v];
            let edges = g.var_edges(v);
            let deg = edges.len();
            let disagree = edges.filter(|&e| self.c2v[e] != r).count();
            if deg > 0 && disagree == deg {
                r ^ 1
            } else {
                r
            }
        }));
    }

    /// Runs until `l_max` iterations, a fixed point, or a codeword decision.
    pub fn run(&mut self, g: &TannerGraph, received: &[u8], l_max: usize, out: &mut Vec<u8>) -> usize {
        self.reset(g, received);
        self.decisions(g, out);
        let mut iterations = 0;
        while iterations < l_max && !g.is_codeword(out) {
            let changed = self.step(g);
            iterations += 1;
            self.decisions(g, out);
            if !changed {
                break;
            }
        }
        iterations
    }
}

pub fn decode_gallager_a(g: &TannerGraph, received: &[u8], l_max: usize) -> Decoded<u8> {
    assert_eq!(received.len(), g.n(), "received word length");
    let mut dec = GallagerADecoder::new();
    let mut bits = Vec::new();
    let iterations = dec.run(g, received, l_max, &mut bits);
    Decoded { bits, iterations }
}

/// Sum-product decoder in the LLR domain (positive favors bit 0).
#[derive(Debug, Clone, Default)]
pub struct BpDecoder {
    llr: Vec<f64>,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    total: Vec<f64>,
    scratch: Vec<f64>,
}

impl BpDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self, g: &TannerGraph, llr: &[f64]) {
        self.llr.clear();
        self.llr.extend_from_slice(llr);
        self.v2c.clear();
        self.v2c.extend((0..g.edge_count()).map(|e| llr[g.edge_var(e)]));
        self.c2v.clear();
        self.c2v.resize(g.edge_count(), 0.0);
        self.total.clear();
        self.total.extend_from_slice(llr);
    }

    pub fn v2c(&self) -> &[f64] {
        &self.v2c
    }

    pub fn c2v(&self) -> &[f64] {
        &self.c2v
    }

    /// Posterior LLR of every variable.
    pub fn totals(&self) -> &[f64] {
        &self.total
    }

    pub fn step(&mut self, g: &TannerGraph) {
        for c in 0..g.m() {
            let edges = g.check_edges(c);
            if let [a, b] = *edges {
                self.c2v[a as usize] = self.v2c[b as usize];
                self.c2v[b as usize] = self.v2c[a as usize];
                continue;
            }
            // suffix products of tanh(m/2), then a forward sweep
            let d = edges.len();
            self.scratch.clear();
            self.scratch.resize(d + 1, 1.0);
            for i in (0..d).rev() {
                self.scratch[i] = self.scratch[i + 1] * libm::tanh(0.5 * self.v2c[edges[i] as usize]);
            }
            let mut prefix = 1.0;
            for i in 0..d {
                let e = edges[i] as usize;
                let t = (prefix * self.scratch[i + 1]).clamp(-TANH_CLAMP, TANH_CLAMP);
                prefix *= libm::tanh(0.5 * self.v2c[e]);
                self.c2v[e] = 2.0 * libm::atanh(t);
            }
        }
        for v in 0..g.n() {
            let edges = g.var_edges(v);
            let total = self.llr[v] + edges.clone().map(|e| self.c2v[e]).sum::<f64>();
            self.total[v] = total;
            for e in edges {
                self.v2c[e] = total - self.c2v[e];
            }
        }
    }

    /// Hard decisions; an exactly zero LLR decides 1.
    pub fn decisions(&self, out: &mut Vec<u8>) {
        out.clear();
        out.extend(self.total.iter().map(|&l| u8::from(l <= 0.0)));
    }

    pub fn run(&mut self, g: &TannerGraph, llr: &[f64], l_max: usize, out: &mut Vec<u8>) -> usize {
        self.reset(g, llr);
        self.decisions(out);
        let mut iterations = 0;
        while iterations < l_max && !g.is_codeword(out) {
            self.step(g);
            iterations += 1;
            self.decisions(out);
        }
        iterations
    }
}

pub fn decode_bp_awgn(g: &TannerGraph, llr: &[f64], l_max: usize) -> Decoded<u8> {
    assert_eq!(llr.len(), g.n(), "LLR vector length");
    assert!(llr.iter().all(|l| l.is_finite()), "LLRs must be finite");
    let mut dec = BpDecoder::new();
    let mut bits = Vec::new();
    let iterations = dec.run(g, llr, l_max, &mut bits);
    Decoded { bits, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Ensemble;
    use crate::sim::graph::build_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn regular_graph(n: usize, seed: u64) -> TannerGraph {
        build_graph(&Ensemble::regular(3, 6, n).unwrap(), n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn bec_trivial_cases() {
        let g = regular_graph(60, 1);
        let clean = vec![Some(0u8); 60];
        let out = decode_bec(&g, &clean, 50);
        assert_eq!((out.bits, out.iterations), (clean, 0));

        let all_erased = vec![None; 60];
        let out = decode_bec(&g, &all_erased, 50);
        assert!(out.bits.iter().all(|b| b.is_none()));
        assert_eq!(out.iterations, 0);

        let mut one = vec![Some(0u8); 60];
        one[17] = None;
        let out = decode_bec(&g, &one, 50);
        assert_eq!(out.bits[17], Some(0));
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn bec_uses_parity_not_zero() {
        // single check over three bits of the codeword 1,1,0
        let g = TannerGraph::from_edges(3, 1, &[(0, 0), (1, 0), (2, 0)]).unwrap();
        let out = decode_bec(&g, &[Some(1), None, Some(0)], 5);
        assert_eq!(out.bits, vec![Some(1), Some(1), Some(0)]);
    }

    #[test]
    fn gallager_a_clean_word() {
        let g = regular_graph(60, 2);
        let mut dec = GallagerADecoder::new();
        dec.reset(&g, &[0; 60]);
        assert!(!dec.step(&g));
        assert!(dec.v2c().iter().chain(dec.c2v()).all(|&m| m == 0));
        assert_eq!(decode_gallager_a(&g, &[0; 60], 10).iterations, 0);
    }

    #[test]
    fn gallager_a_single_error_on_tree() {
        // bit 0 has checks 0,1,2; every other bit hangs off exactly one of them
        let mut edges = vec![(0, 0), (0, 1), (0, 2)];
        let mut next = 1;
        for c in 0..3 {
            for _ in 0..5 {
                edges.push((next, c));
                next += 1;
            }
        }
        let g = TannerGraph::from_edges(next, 3, &edges).unwrap();
        let mut received = vec![0u8; next];
        received[0] = 1;
        let out = decode_gallager_a(&g, &received, 10);
        assert!(out.bits.iter().all(|&b| b == 0));
        assert!(out.iterations <= 2);
    }

    #[test]
    fn bp_saturated_input_exits_immediately() {
        let g = regular_graph(60, 3);
        let out = decode_bp_awgn(&g, &[300.0; 60], 20);
        assert_eq!(out.iterations, 0);
        assert!(out.bits.iter().all(|&b| b == 0));
    }

    #[test]
    fn bp_degree_two_check_passes_through() {
        let g = TannerGraph::from_edges(2, 1, &[(0, 0), (1, 0)]).unwrap();
        let mut dec = BpDecoder::new();
        dec.reset(&g, &[0.123456789, -7.5]);
        dec.step(&g);
        assert_eq!(dec.c2v()[0], -7.5);
        assert_eq!(dec.c2v()[1], 0.123456789);
    }

    #[test]
    fn bp_corrects_single_bad_llr() {
        let g = TannerGraph::from_edges(6, 1, &(0..6).map(|v| (v, 0)).collect::<Vec<_>>()).unwrap();
        let out = decode_bp_awgn(&g, &[-1.0, 9.0, 9.0, 9.0, 9.0, 9.0], 5);
        assert_eq!(out.bits, vec![0; 6]);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn bp_zero_llr_decides_one() {
        let g = TannerGraph::from_edges(2, 1, &[(0, 0), (1, 0)]).unwrap();
        let out = decode_bp_awgn(&g, &[0.0, 0.0], 0);
        assert_eq!(out.bits, vec![1, 1]);
    }

    #[test]
    fn bp_messages_are_odd_in_the_input() {
        let g = regular_graph(120, 4);
        let llr: Vec<f64> = (0..120).map(|i| ((i * 37 % 101) as f64 - 40.0) / 13.0).collect();
        let neg: Vec<f64> = llr.iter().map(|x| -x).collect();
        let (mut a, mut b) = (BpDecoder::new(), BpDecoder::new());
        a.reset(&g, &llr);
        b.reset(&g, &neg);
        for _ in 0..30 {
            a.step(&g);
            b.step(&g);
            assert!(a.totals().iter().zip(b.totals()).all(|(x, y)| *x == -*y));
        }
    }
}
