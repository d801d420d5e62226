use crate::error::{Error, Result};

type Row = Vec<u64>;

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn get(row: &[u64], i: usize) -> bool {
    (row[i / 64] >> (i % 64)) & 1 == 1
}

fn set(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

/// Systematic encoder from Gauss–Jordan elimination of `H` over GF(2).
///
/// Pivots are searched from the last column backwards, so a parity-check
/// matrix with an invertible right half yields information bits first and
/// parity last.
#[derive(Debug, Clone)]
pub(crate) struct SystematicEncoder {
    n: usize,
    info_positions: Vec<usize>,
    /// For each pivot: its codeword position and a bitmask over information bits.
    parity: Vec<(usize, Row)>,
}

impl SystematicEncoder {
    pub(crate) fn new(n: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let w = words(n);
        let mut h: Vec<Row> = rows
            .iter()
            .map(|r| {
                let mut row = vec![0u64; w];
                for &c in r {
                    set(&mut row, c);
                }
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in (0..n).rev() {
            let Some(p) = (rank..h.len()).find(|&r| get(&h[r], col)) else { continue };
            h.swap(rank, p);
            let pivot_row = h[rank].clone();
            for (r, row) in h.iter_mut().enumerate() {
                if r != rank && get(row, col) {
                    for (a, b) in row.iter_mut().zip(&pivot_row) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == h.len() {
                break;
            }
        }
        if rank == 0 {
            return Err(Error::ParityMatrix("parity-check matrix has rank 0".into()));
        }
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let k = info_positions.len();
        let parity = pivots
            .iter()
            .enumerate()
            .map(|(r, &col)| {
                let mut mask = vec![0u64; words(k)];
                for (i, &pos) in info_positions.iter().enumerate() {
                    if get(&h[r], pos) {
                        set(&mut mask, i);
                    }
                }
                (col, mask)
            })
            .collect();
        Ok(Self { n, info_positions, parity })
    }

    pub(crate) fn k(&self) -> usize {
        self.info_positions.len()
    }

    pub(crate) fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub(crate) fn encode(&self, info: &[u8]) -> Vec<u8> {
        let mut packed = vec![0u64; words(self.k())];
        for (i, &b) in info.iter().enumerate() {
            if b & 1 == 1 {
                set(&mut packed, i);
            }
        }
        let mut cw = vec![0u8; self.n];
        for (&pos, &b) in self.info_positions.iter().zip(info) {
            cw[pos] = b & 1;
        }
        for (pos, mask) in &self.parity {
            let ones: u32 = mask.iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
            cw[*pos] = (ones & 1) as u8;
        }
        cw
    }
}
