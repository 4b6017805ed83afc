use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice node addressed as (row, col), rows counted top to bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub row: i32,
    pub col: i32,
}

impl GridPoint {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }

    pub fn offset(self, dr: i32, dc: i32) -> Self {
        Self::new(self.row + dr, self.col + dc)
    }

    /// One-based `(row, col)` as used in answers.
    pub fn one_based(self) -> (u32, u32) {
        (self.row as u32 + 1, self.col as u32 + 1)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Undirected edge stored with endpoints in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(pub GridPoint, pub GridPoint);

impl Edge {
    pub fn new(a: GridPoint, b: GridPoint) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn translate(self, dr: i32, dc: i32) -> Self {
        Edge::new(self.0.offset(dr, dc), self.1.offset(dr, dc))
    }

    pub fn touches(self, p: GridPoint) -> bool {
        self.0 == p || self.1 == p
    }

    pub fn other(self, p: GridPoint) -> GridPoint {
        if self.0 == p {
            self.1
        } else {
            self.0
        }
    }
}

pub type EdgeSet = BTreeSet<Edge>;

/// An `rows x cols` node lattice with its admissible unit edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub rows: usize,
    pub cols: usize,
    pub admissible: Vec<Edge>,
}

impl Lattice {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        Ok(Self {
            rows,
            cols,
            admissible: admissible_edges(rows, cols)?,
        })
    }

    pub fn node_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.row >= 0 && p.col >= 0 && (p.row as usize) < self.rows && (p.col as usize) < self.cols
    }

    pub fn nodes(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (0..self.rows as i32).flat_map(move |r| (0..self.cols as i32).map(move |c| GridPoint::new(r, c)))
    }

    pub fn index_of(&self, p: GridPoint) -> usize {
        p.row as usize * self.cols + p.col as usize
    }

    /// Edges along the outer rectangle, in admissible order.
    pub fn perimeter(&self) -> Vec<Edge> {
        let (mr, mc) = (self.rows as i32 - 1, self.cols as i32 - 1);
        self.admissible
            .iter()
            .copied()
            .filter(|e| {
                (e.0.row == e.1.row && (e.0.row == 0 || e.0.row == mr))
                    || (e.0.col == e.1.col && (e.0.col == 0 || e.0.col == mc))
            })
            .collect()
    }
}

/// Unit horizontal, vertical and both diagonal edges of an `rows x cols` lattice.
pub fn admissible_edges(rows: usize, cols: usize) -> Result<Vec<Edge>> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidDimension { rows, cols });
    }
    let (r, c) = (rows as i32, cols as i32);
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1) + 2 * (rows - 1) * (cols - 1));
    for row in 0..r {
        for col in 0..c {
            let p = GridPoint::new(row, col);
            if col + 1 < c {
                edges.push(Edge::new(p, p.offset(0, 1)));
            }
            if row + 1 < r {
                edges.push(Edge::new(p, p.offset(1, 0)));
            }
            if row + 1 < r && col + 1 < c {
                edges.push(Edge::new(p, p.offset(1, 1)));
                edges.push(Edge::new(p.offset(0, 1), p.offset(1, 0)));
            }
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(rows: i32, cols: i32) -> usize {
        // All unordered node pairs at Chebyshev distance one.
        let nodes: Vec<_> = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect();
        let mut n = 0;
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                if (a.0 - b.0).abs().max((a.1 - b.1).abs()) == 1 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn small_lattices() {
        assert_eq!(admissible_edges(2, 2).unwrap().len(), 6);
        assert_eq!(admissible_edges(3, 3).unwrap().len(), 20);
        assert_eq!(
            admissible_edges(1, 5),
            Err(Error::InvalidDimension { rows: 1, cols: 5 })
        );
    }

    #[test]
    fn formula_matches_enumeration() {
        for m in 2..=8usize {
            for n in 2..=8usize {
                let edges = admissible_edges(m, n).unwrap();
                let formula = m * (n - 1) + n * (m - 1) + 2 * (m - 1) * (n - 1);
                assert_eq!(edges.len(), formula);
                assert_eq!(edges.len(), brute_force_count(m as i32, n as i32));
                let set: EdgeSet = edges.iter().copied().collect();
                assert_eq!(set.len(), edges.len(), "duplicates in {m}x{n}");
            }
        }
    }

    #[test]
    fn perimeter_of_three_by_three() {
        let lat = Lattice::new(3, 3).unwrap();
        assert_eq!(lat.perimeter().len(), 8);
    }
}
