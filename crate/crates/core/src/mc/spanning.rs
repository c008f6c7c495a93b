//! Counting clusters that span the cylinder without winding around it.
//!
//! Clusters are built with a union-find whose nodes carry the column
//! displacement to their parent in the universal cover of the cylinder. Two
//! sites already in one cluster that are joined by a new edge close a loop;
//! the loop winds around the cylinder exactly when the displacements disagree.

use serde::Serialize;

use crate::mc::lattice::Coloring;

const TOP: u8 = 1;
const BOTTOM: u8 = 2;
const WRAPS: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Red,
}

/// Result of [`count_spanning`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpanningCount {
    /// Distinct clusters touching both edges and not winding around.
    pub n_spanning: u32,
    /// A spanning cluster was dropped because it also winds around.
    pub wrap_excluded: bool,
}

/// Reusable union-find buffers for repeated counts on one lattice size.
#[derive(Debug, Default, Clone)]
pub struct SpanningCounter {
    parent: Vec<u32>,
    size: Vec<u32>,
    // pos(x) − pos(parent(x)) in unwrapped columns
    offset: Vec<i32>,
    flags: Vec<u8>,
}

impl SpanningCounter {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self, sites: usize, width: usize, rows: usize) {
        self.parent.clear();
        self.parent.extend(0..sites as u32);
        self.size.clear();
        self.size.resize(sites, 1);
        self.offset.clear();
        self.offset.resize(sites, 0);
        self.flags.clear();
        self.flags.resize(sites, 0);
        for f in &mut self.flags[..width] {
            *f |= BOTTOM;
        }
        for f in &mut self.flags[(rows - 1) * width..] {
            *f |= TOP;
        }
    }

    /// Root of `x` and `pos(x) − pos(root)`, halving the path on the way.
    #[inline]
    fn find(&mut self, mut x: usize) -> (usize, i32) {
        let mut displacement = 0;
        loop {
            let p = self.parent[x] as usize;
            if p == x {
                return (x, displacement);
            }
            let gp = self.parent[p] as usize;
            if gp != p {
                self.offset[x] += self.offset[p];
                self.parent[x] = gp as u32;
            }
            displacement += self.offset[x];
            x = self.parent[x] as usize;
        }
    }

    /// Joins `a` and `b`, where `pos(b) = pos(a) + step`.
    #[inline]
    fn union(&mut self, a: usize, b: usize, step: i32) {
        let (ra, da) = self.find(a);
        let (rb, db) = self.find(b);
        if ra == rb {
            if da + step != db {
                self.flags[ra] |= WRAPS;
            }
            return;
        }
        // pos(rb) − pos(ra)
        let shift = step + da - db;
        let (child, root, child_offset) = if self.size[ra] >= self.size[rb] {
            (rb, ra, shift)
        } else {
            (ra, rb, -shift)
        };
        self.parent[child] = root as u32;
        self.offset[child] = child_offset;
        self.size[root] += self.size[child];
        self.flags[root] |= self.flags[child];
    }

    /// Counts spanning clusters of `color`.
    pub fn count(&mut self, coloring: &Coloring, color: Color) -> SpanningCount {
        let geometry = coloring.geometry();
        let (rows, width) = (geometry.rows(), geometry.width());
        let cells = coloring.cells();
        let want = color == Color::Blue;
        self.reset(cells.len(), width, rows);

        for i in 0..rows {
            let row = i * width;
            for j in 0..width {
                let site = row + j;
                if cells[site] != want {
                    continue;
                }
                let right = row + if j + 1 == width { 0 } else { j + 1 };
                if cells[right] == want {
                    self.union(site, right, 1);
                }
                if i + 1 < rows {
                    let up = site + width;
                    if cells[up] == want {
                        self.union(site, up, 0);
                    }
                    let up_left = row + width + if j == 0 { width - 1 } else { j - 1 };
                    if cells[up_left] == want {
                        self.union(site, up_left, -1);
                    }
                }
            }
        }

        let mut result = SpanningCount {
            n_spanning: 0,
            wrap_excluded: false,
        };
        for (site, &cell) in cells.iter().enumerate() {
            if cell != want || self.parent[site] as usize != site {
                continue;
            }
            let flags = self.flags[site];
            if flags & (TOP | BOTTOM) == TOP | BOTTOM {
                if flags & WRAPS != 0 {
                    result.wrap_excluded = true;
                } else {
                    result.n_spanning += 1;
                }
            }
        }
        result
    }
}

/// Number of blue clusters spanning the cylinder, excluding any that wind
/// around it.
pub fn count_spanning(coloring: &Coloring) -> SpanningCount {
    SpanningCounter::new().count(coloring, Color::Blue)
}
