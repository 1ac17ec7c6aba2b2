//! Deliberately naive enumeration: every assignment of interior edges,
//! filtered by the ice rule. Only for checking the transfer matrix.

use super::{VertexType, WeightGrid, YoungProfile};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const NAIVE_CAP: usize = 3;

const TYPES: [(VertexType, [bool; 4]); 6] = [
    // (left is L, right is L, top is U, bottom is U)
    (VertexType::A1, [false, false, true, true]),
    (VertexType::A2, [true, true, false, false]),
    (VertexType::B3, [false, false, false, false]),
    (VertexType::B4, [true, true, true, true]),
    (VertexType::C5, [true, false, false, true]),
    (VertexType::C6, [false, true, true, false]),
];

/// A configuration together with its horizontal edges, `h[row][k]` is
/// true when `h_k` of that row points left.
pub struct Configuration {
    pub vertices: Vec<Vec<VertexType>>,
    pub h: Vec<Vec<bool>>,
}

/// All domain-wall configurations of the `n×n` lattice.
pub fn naive_configurations(n: usize) -> Result<Vec<Configuration>> {
    if n > NAIVE_CAP {
        return Err(Error::TooLarge {
            what: "N",
            got: n,
            cap: NAIVE_CAP,
        });
    }
    let interior = n * n.saturating_sub(1);
    let mut out = Vec::new();
    for hbits in 0u64..(1u64 << interior) {
        for vbits in 0u64..(1u64 << interior) {
            // h[row][k], k = 0..=n; v[col][m], m = 0..=n edges from the top
            let h: Vec<Vec<bool>> = (0..n)
                .map(|row| {
                    (0..=n)
                        .map(|k| match k {
                            0 => false,
                            k if k == n => true,
                            k => hbits >> (row * (n - 1) + k - 1) & 1 == 1,
                        })
                        .collect()
                })
                .collect();
            let v: Vec<Vec<bool>> = (0..n)
                .map(|col| {
                    (0..=n)
                        .map(|m| match m {
                            0 => false,
                            m if m == n => true,
                            m => vbits >> (col * (n - 1) + m - 1) & 1 == 1,
                        })
                        .collect()
                })
                .collect();
            let mut vertices = Vec::with_capacity(n);
            let mut ok = true;
            'rows: for row in 0..n {
                let mut line = Vec::with_capacity(n);
                for col in 0..n {
                    let key = [h[row][col + 1], h[row][col], v[col][row], v[col][row + 1]];
                    match TYPES.iter().find(|(_, k)| *k == key) {
                        Some((t, _)) => line.push(*t),
                        None => {
                            ok = false;
                            break 'rows;
                        }
                    }
                }
                vertices.push(line);
            }
            if ok {
                out.push(Configuration { vertices, h });
            }
        }
    }
    Ok(out)
}

fn reduced_weight<S: Scalar>(grid: &WeightGrid<S>, conf: &Configuration, c2: &S) -> S {
    let mut w = S::one();
    for (row, line) in conf.vertices.iter().enumerate() {
        for (col, t) in line.iter().enumerate() {
            w = w * &grid.weight(row + 1, col + 1, *t, c2);
        }
    }
    w
}

/// `Z_N / c^N` by enumeration.
pub fn naive_reduced_partition<S: Scalar>(grid: &WeightGrid<S>) -> Result<S> {
    let c2 = grid.c_squared();
    Ok(naive_configurations(grid.n())?
        .iter()
        .fold(S::zero(), |acc, conf| acc + &reduced_weight(grid, conf, &c2)))
}

/// GEFP by enumeration, from the edge definition.
pub fn naive_gefp<S: Scalar>(grid: &WeightGrid<S>, profile: &YoungProfile) -> Result<S> {
    let c2 = grid.c_squared();
    let mut num = S::zero();
    let mut den = S::zero();
    for conf in naive_configurations(grid.n())? {
        let w = reduced_weight(grid, &conf, &c2);
        if profile.r().iter().enumerate().all(|(j, &r)| conf.h[j][r]) {
            num = num + &w;
        }
        den = den + &w;
    }
    num.checked_div(&den)
}
