//! LDPC coding: sparse parity-check matrices, systematic encoding and
//! sum-product decoding.
//!
//! Parity-check files are plain text. Lines starting with `#` are comments; the
//! first remaining line is `<columns> <rows>`, and each further line lists a row
//! index followed by the column indices of its ones, all 0-based.

mod decoder;
mod encoder;

use std::fmt::Write as _;
use std::path::Path;

pub use decoder::DecodeResult;
use encoder::SystematicEncoder;

use crate::error::{Error, Result};

const DEFAULT_MATRIX: &str = include_str!("../../data/qc_672_rate_half.txt");
pub const DEFAULT_MAX_ITERATIONS: usize = 50;

/// A binary LDPC code defined by its parity-check matrix.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    rows: Vec<Vec<usize>>,
    // Edges are numbered row by row: row c owns edge_start[c]..edge_start[c + 1].
    edge_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
    encoder: SystematicEncoder,
    pub max_iterations: usize,
}

impl LdpcCode {
    /// The shipped quasi-cyclic rate-1/2 code with `n = 672` (circulant size 42).
    pub fn default_code() -> Self {
        Self::parse(DEFAULT_MATRIX).expect("shipped parity-check matrix is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ParityMatrix(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| Error::ParityMatrix(m);
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| bad("missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad header '{header}'"))))
            .collect::<Result<_>>()?;
        let [n, m] = dims[..] else {
            return Err(bad(format!("header must be '<columns> <rows>', got '{header}'")));
        };
        if n == 0 || m == 0 || m >= n {
            return Err(bad(format!("unusable dimensions {n} x {m}")));
        }
        let mut rows: Vec<Option<Vec<usize>>> = vec![None; m];
        for (lineno, line) in lines {
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(format!("line {lineno}: bad integer '{t}'"))))
                .collect::<Result<_>>()?;
            let (&r, cols) = nums.split_first().expect("non-empty line");
            if r >= m {
                return Err(bad(format!("line {lineno}: row {r} out of range")));
            }
            if rows[r].is_some() {
                return Err(bad(format!("line {lineno}: row {r} listed twice")));
            }
            let mut cols = cols.to_vec();
            cols.sort_unstable();
            if cols.windows(2).any(|w| w[0] == w[1]) {
                return Err(bad(format!("line {lineno}: duplicate column in row {r}")));
            }
            if let Some(&c) = cols.last() {
                if c >= n {
                    return Err(bad(format!("line {lineno}: column {c} out of range")));
                }
            }
            if cols.is_empty() {
                return Err(bad(format!("line {lineno}: row {r} is empty")));
            }
            rows[r] = Some(cols);
        }
        let rows: Vec<Vec<usize>> = rows
            .into_iter()
            .enumerate()
            .map(|(r, v)| v.ok_or_else(|| bad(format!("row {r} missing"))))
            .collect::<Result<_>>()?;
        Self::from_rows(n, rows)
    }

    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut edge_start = vec![0];
        let mut edge_var = Vec::new();
        let mut var_edges = vec![Vec::new(); n];
        for row in &rows {
            for &v in row {
                if v >= n {
                    return Err(Error::ParityMatrix(format!("column {v} out of range")));
                }
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
            edge_start.push(edge_var.len());
        }
        let encoder = SystematicEncoder::new(n, &rows)?;
        Ok(Self { n, rows, edge_start, edge_var, var_edges, encoder, max_iterations: DEFAULT_MAX_ITERATIONS })
    }

    pub fn with_max_iterations(mut self, iters: usize) -> Self {
        self.max_iterations = iters;
        self
    }

    /// Codeword length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Information length (`n` minus the rank of `H`).
    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Codeword positions holding the information bits, ascending.
    pub fn info_positions(&self) -> &[usize] {
        self.encoder.info_positions()
    }

    pub fn syndrome_is_zero(&self, word: &[u8]) -> bool {
        self.rows.iter().all(|r| r.iter().fold(0u8, |acc, &v| acc ^ word[v]) == 0)
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), actual: info.len() });
        }
        Ok(self.encoder.encode(info))
    }

    pub fn extract_info(&self, word: &[u8]) -> Vec<u8> {
        self.info_positions().iter().map(|&p| word[p]).collect()
    }

    pub fn to_sparse_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            let _ = write!(s, "{r}");
            for c in row {
                let _ = write!(s, " {c}");
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_info(code: &LdpcCode, seed: u64) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..code.k()).map(|_| rng.gen_range(0..2u8)).collect()
    }

    #[test]
    fn default_code_dimensions() {
        let code = LdpcCode::default_code();
        assert_eq!(code.n(), 672);
        assert_eq!(code.k(), 336);
        assert_eq!(code.rate(), 0.5);
        assert_eq!(code.info_positions(), (0..336).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn default_code_is_quasi_cyclic() {
        let code = LdpcCode::default_code();
        let z = 42;
        let mut dense = vec![vec![0u8; 672]; 336];
        for (r, row) in code.rows().iter().enumerate() {
            for &c in row {
                dense[r][c] = 1;
            }
        }
        for br in 0..8 {
            for bc in 0..16 {
                let shift = (0..z).find(|&c| dense[br * z][bc * z + c] == 1);
                for t in 0..z {
                    for c in 0..z {
                        let want = matches!(shift, Some(s) if c == (t + s) % z);
                        assert_eq!(dense[br * z + t][bc * z + c] == 1, want, "block ({br},{bc})");
                    }
                }
            }
        }
    }

    #[test]
    fn all_zero_info_gives_zero_codeword() {
        let code = LdpcCode::default_code();
        assert!(code.encode(&vec![0; 336]).unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn encoder_output_satisfies_parity() {
        let code = LdpcCode::default_code();
        for seed in 0..20 {
            let info = random_info(&code, seed);
            let cw = code.encode(&info).unwrap();
            assert!(code.syndrome_is_zero(&cw));
            assert_eq!(code.extract_info(&cw), info);
        }
    }

    #[test]
    fn encoder_is_linear() {
        let code = LdpcCode::default_code();
        let (u, v) = (random_info(&code, 1), random_info(&code, 2));
        let sum: Vec<u8> = u.iter().zip(&v).map(|(a, b)| a ^ b).collect();
        let lhs = code.encode(&sum).unwrap();
        let rhs: Vec<u8> = code.encode(&u).unwrap().iter().zip(code.encode(&v).unwrap()).map(|(a, b)| a ^ b).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn length_mismatch() {
        let code = LdpcCode::default_code();
        assert_eq!(code.encode(&[0; 10]).unwrap_err(), Error::LengthMismatch { expected: 336, actual: 10 });
    }

    #[test]
    fn text_round_trip() {
        let code = LdpcCode::default_code();
        let again = LdpcCode::parse(&code.to_sparse_text()).unwrap();
        assert_eq!(again.rows(), code.rows());
    }

    #[test]
    fn parse_errors() {
        assert!(LdpcCode::parse("").is_err());
        assert!(LdpcCode::parse("4 2\n0 0 1\n").is_err());
        assert!(LdpcCode::parse("4 2\n0 0 1\n1 2 9\n").is_err());
        assert!(LdpcCode::parse("4 2\n0 0 1\n0 2 3\n").is_err());
        assert!(LdpcCode::parse("4 2\n0 0 0\n1 2 3\n").is_err());
        assert!(LdpcCode::parse("# c\n4 2\n0 0 1\n1 1 2 3\n").is_ok());
    }

    #[test]
    fn rank_deficient_matrix_raises_rate() {
        // Third row is the sum of the first two.
        let code = LdpcCode::parse("6 3\n0 0 1 2\n1 2 3 4\n2 0 1 3 4\n").unwrap();
        assert_eq!(code.k(), 4);
        let cw = code.encode(&[1, 0, 1, 1]).unwrap();
        assert!(code.syndrome_is_zero(&cw));
    }
}
