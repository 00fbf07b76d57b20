//! (2,k,v)-Steiner block designs as incidence matrices.
//!
//! Two generator families are enough for an open-ended supply of ETF shapes:
//! all-pairs systems (k = 2, any v) and affine planes AG(2,q) for prime q
//! (k = q, v = q²). `validate` is the independent oracle both generators are
//! tested against: it checks the defining pair-coverage property directly.

use crate::error::{FrameError, Result};

/// A (2,k,v)-Steiner system: b blocks of size k over v points, every pair of
/// points together in exactly one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerSystem {
    v: usize,
    k: usize,
    /// Blocks in generation order; each block lists its points ascending.
    blocks: Vec<Vec<usize>>,
}

impl SteinerSystem {
    /// Number of points v.
    pub fn points(&self) -> usize {
        self.v
    }

    /// Block size k.
    pub fn block_size(&self) -> usize {
        self.k
    }

    /// Number of blocks b = v(v−1)/(k(k−1)).
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Replication number r = (v−1)/(k−1): blocks through each point.
    pub fn replication(&self) -> usize {
        (self.v - 1) / (self.k - 1)
    }

    /// Block `i` as an ascending point list.
    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    /// Incidence entry: is point `p` in block `i`?
    pub fn incidence(&self, i: usize, p: usize) -> bool {
        self.blocks[i].binary_search(&p).is_ok()
    }

    /// Indices of the blocks containing point `p`, in increasing block order.
    pub fn blocks_through(&self, p: usize) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| self.incidence(i, p)).collect()
    }
}

/// The (2,2,v) system of all two-element blocks, ordered lexicographically.
pub fn pair_system(v: usize) -> Result<SteinerSystem> {
    if v < 2 {
        return Err(FrameError::Domain(format!("pair system needs v ≥ 2, got {v}")));
    }
    let mut blocks = Vec::with_capacity(v * (v - 1) / 2);
    for i in 0..v {
        for j in (i + 1)..v {
            blocks.push(vec![i, j]);
        }
    }
    Ok(SteinerSystem { v, k: 2, blocks })
}

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The (2,q,q²) system of lines in the affine plane AG(2,q), prime q ≤ 31.
///
/// Point (a,b) maps to index a·q+b. Blocks enumerate the lines y = cx+d for
/// each slope c (outer) and intercept d (inner), then the verticals x = d.
pub fn affine_plane_system(q: usize) -> Result<SteinerSystem> {
    if !is_prime(q) {
        return Err(FrameError::Domain(format!("affine plane needs a prime order, got {q}")));
    }
    if q > 31 {
        return Err(FrameError::Domain(format!("affine plane order capped at 31, got {q}")));
    }
    let v = q * q;
    let mut blocks = Vec::with_capacity(v + q);
    for c in 0..q {
        for d in 0..q {
            let mut line: Vec<usize> = (0..q).map(|x| x * q + (c * x + d) % q).collect();
            line.sort_unstable();
            blocks.push(line);
        }
    }
    for d in 0..q {
        blocks.push((0..q).map(|y| d * q + y).collect());
    }
    Ok(SteinerSystem { v, k: q, blocks })
}

/// Checks the defining invariants from scratch: every block has k points,
/// every point lies on r blocks, and every pair of points shares exactly one
/// block. This is the oracle the generators are verified against.
pub fn validate(s: &SteinerSystem) -> bool {
    let (v, k) = (s.v, s.k);
    if k < 2 || v < k {
        return false;
    }
    if (v - 1) % (k - 1) != 0 {
        return false;
    }
    let r = (v - 1) / (k - 1);
    if v * (v - 1) % (k * (k - 1)) != 0 || s.blocks.len() != v * (v - 1) / (k * (k - 1)) {
        return false;
    }

    let mut col_sums = vec![0usize; v];
    let mut pair_cover = vec![0u8; v * v];
    for block in &s.blocks {
        if block.len() != k {
            return false;
        }
        if block.iter().any(|&p| p >= v) {
            return false;
        }
        for (idx, &p) in block.iter().enumerate() {
            col_sums[p] += 1;
            for &q in &block[idx + 1..] {
                if p == q {
                    return false;
                }
                pair_cover[p * v + q] += 1;
                pair_cover[q * v + p] += 1;
            }
        }
    }
    if col_sums.iter().any(|&c| c != r) {
        return false;
    }
    for p in 0..v {
        for q in (p + 1)..v {
            if pair_cover[p * v + q] != 1 {
                return false;
            }
        }
    }
    true
}
