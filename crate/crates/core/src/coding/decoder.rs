use super::LdpcCode;

// Keeps atanh finite; caps check-to-variable messages near ±30.
const TANH_LIMIT: f64 = 1.0 - 1e-13;
/// Channel LLRs are clipped below the message cap so that agreeing checks can
/// still overturn a confidently wrong bit.
pub const INPUT_LLR_CLAMP: f64 = 25.0;

/// `tanh(m/2)` through a single exponential of a non-positive argument.
fn half_tanh(m: f64) -> f64 {
    let e = (-m.abs()).exp();
    ((1.0 - e) / (1.0 + e)).copysign(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub info: Vec<u8>,
    pub codeword: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
}

impl LdpcCode {
    /// Sum-product decoding with a flooding schedule in the tanh domain.
    ///
    /// `llr[v] > 0` favours bit 0. Stops as soon as the hard decision satisfies
    /// every check (the channel decision is tested before the first iteration);
    /// otherwise returns the last hard decision with `converged = false`.
    /// Inputs are clipped to `±INPUT_LLR_CLAMP`.
    pub fn decode(&self, llr: &[f64]) -> DecodeResult {
        assert_eq!(llr.len(), self.n, "LLR length must equal the code length");
        let llr: Vec<f64> = llr.iter().map(|l| l.clamp(-INPUT_LLR_CLAMP, INPUT_LLR_CLAMP)).collect();
        let edges = self.edge_var.len();
        let mut v2c: Vec<f64> = self.edge_var.iter().map(|&v| llr[v]).collect();
        let mut c2v = vec![0.0; edges];
        let mut hard: Vec<u8> = llr.iter().map(|&l| u8::from(l < 0.0)).collect();
        let mut scratch = Vec::new();
        let mut suffix = Vec::new();
        let mut iterations = 0;
        let mut converged = self.syndrome_is_zero(&hard);
        while !converged && iterations < self.max_iterations {
            iterations += 1;
            for c in 0..self.rows.len() {
                let (lo, hi) = (self.edge_start[c], self.edge_start[c + 1]);
                scratch.clear();
                scratch.extend(v2c[lo..hi].iter().map(|&m| half_tanh(m)));
                // Leave-one-out products via a backward suffix pass and a running prefix.
                let deg = hi - lo;
                suffix.clear();
                suffix.resize(deg + 1, 1.0);
                for i in (0..deg).rev() {
                    suffix[i] = suffix[i + 1] * scratch[i];
                }
                let mut prefix = 1.0;
                for i in 0..deg {
                    let p = (prefix * suffix[i + 1]).clamp(-TANH_LIMIT, TANH_LIMIT);
                    c2v[lo + i] = ((1.0 + p) / (1.0 - p)).ln();
                    prefix *= scratch[i];
                }
            }
            for (v, es) in self.var_edges.iter().enumerate() {
                let total = llr[v] + es.iter().map(|&e| c2v[e]).sum::<f64>();
                for &e in es {
                    v2c[e] = total - c2v[e];
                }
                hard[v] = u8::from(total < 0.0);
            }
            converged = self.syndrome_is_zero(&hard);
        }
        DecodeResult { info: self.extract_info(&hard), codeword: hard, converged, iterations }
    }
}
