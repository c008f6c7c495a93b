//! Breadth-first reference for spanning-cluster counts.
//!
//! Adjacency comes from positions in the plane rather than the stencil used
//! by the library: site `(i, j)` sits at doubled abscissa `2j + i`, and two
//! sites touch when they are one lattice spacing apart in some periodic image.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCount {
    pub n_spanning: u32,
    pub wrap_excluded: bool,
    /// Spanning clusters of any kind, winding or not.
    pub all_spanning: u32,
}

/// Neighbours of every site with the displacement, in doubled abscissa units,
/// that reaches them in the universal cover.
pub fn adjacency(rows: usize, width: usize) -> Vec<Vec<(usize, i64)>> {
    let period = 2 * width as i64;
    let mut adj = vec![Vec::new(); rows * width];
    for (a, nbrs) in adj.iter_mut().enumerate() {
        let (ia, ja) = ((a / width) as i64, (a % width) as i64);
        for b in 0..rows * width {
            if a == b {
                continue;
            }
            let (ib, jb) = ((b / width) as i64, (b % width) as i64);
            let di = ib - ia;
            for image in -1..=1 {
                let dx = (2 * jb + ib + image * period) - (2 * ja + ia);
                let touching = (di == 0 && dx.abs() == 2) || (di.abs() == 1 && dx.abs() == 1);
                if touching {
                    nbrs.push((b, dx));
                }
            }
        }
    }
    adj
}

pub fn count(rows: usize, width: usize, adj: &[Vec<(usize, i64)>], blue: &[bool]) -> OracleCount {
    let n = rows * width;
    let mut pos: Vec<Option<i64>> = vec![None; n];
    let mut queue = VecDeque::new();
    let mut result = OracleCount {
        n_spanning: 0,
        wrap_excluded: false,
        all_spanning: 0,
    };
    for start in 0..n {
        if !blue[start] || pos[start].is_some() {
            continue;
        }
        pos[start] = Some(0);
        queue.push_back(start);
        let (mut bottom, mut top, mut wraps) = (false, false, false);
        while let Some(s) = queue.pop_front() {
            let here = pos[s].unwrap();
            bottom |= s < width;
            top |= s >= (rows - 1) * width;
            for &(t, dx) in &adj[s] {
                if !blue[t] {
                    continue;
                }
                match pos[t] {
                    None => {
                        pos[t] = Some(here + dx);
                        queue.push_back(t);
                    }
                    Some(p) => wraps |= p != here + dx,
                }
            }
        }
        if bottom && top {
            result.all_spanning += 1;
            if wraps {
                result.wrap_excluded = true;
            } else {
                result.n_spanning += 1;
            }
        }
    }
    result
}
