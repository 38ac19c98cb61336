//! Rectangular lattices with a first-order (4-neighbor) neighborhood.
//!
//! Sites are indexed in raster order, `site = row * width + col`. Every
//! unordered neighbor pair is stored once in [`NeighborhoodGraph::edges`];
//! the per-site neighbor lists hold the full symmetric neighborhood.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Cyclic boundary conditions in both directions.
    Toroidal,
    /// Open boundary: border sites have fewer than four neighbors.
    Free,
}

impl Boundary {
    pub fn as_str(&self) -> &'static str {
        match self {
            Boundary::Toroidal => "torus",
            Boundary::Free => "free",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "torus" | "toroidal" | "periodic" => Ok(Boundary::Toroidal),
            "free" | "open" => Ok(Boundary::Free),
            other => Err(Error::Parse(format!("unknown boundary `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodGraph {
    width: usize,
    height: usize,
    boundary: Boundary,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl NeighborhoodGraph {
    /// Builds a `width x height` lattice.
    ///
    /// Tori smaller than 3 in either direction are rejected: the wrap-around
    /// edge would coincide with an interior edge or close on itself.
    pub fn lattice(width: usize, height: usize, boundary: Boundary) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "lattice dimensions must be positive, got {width}x{height}"
            )));
        }
        if boundary == Boundary::Toroidal && (width < 3 || height < 3) {
            return Err(Error::DimensionTooSmall { width, height });
        }

        let n = width * height;
        let mut edges = Vec::with_capacity(2 * n);
        for row in 0..height {
            for col in 0..width {
                let site = row * width + col;
                match boundary {
                    Boundary::Toroidal => {
                        edges.push((site, row * width + (col + 1) % width));
                        edges.push((site, ((row + 1) % height) * width + col));
                    }
                    Boundary::Free => {
                        if col + 1 < width {
                            edges.push((site, site + 1));
                        }
                        if row + 1 < height {
                            edges.push((site, site + width));
                        }
                    }
                }
            }
        }

        let mut neighbors = vec![Vec::with_capacity(4); n];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }

        Ok(Self {
            width,
            height,
            boundary,
            edges,
            neighbors,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn num_sites(&self) -> usize {
        self.width * self.height
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.neighbors[site]
    }

    pub fn degree(&self, site: usize) -> usize {
        self.neighbors[site].len()
    }
}

impl fmt::Display for NeighborhoodGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} {}", self.width, self.height, self.boundary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn check_invariants(g: &NeighborhoodGraph) {
        let mut seen = HashSet::new();
        for &(a, b) in g.edges() {
            assert_ne!(a, b);
            assert!(seen.insert((a.min(b), a.max(b))), "duplicate edge {a}-{b}");
        }
        for a in 0..g.num_sites() {
            for &b in g.neighbors(a) {
                assert!(g.neighbors(b).contains(&a));
            }
        }
    }

    #[test]
    fn free_two_by_two() {
        let g = NeighborhoodGraph::lattice(2, 2, Boundary::Free).unwrap();
        assert_eq!(g.num_sites(), 4);
        assert_eq!(g.num_edges(), 4);
        check_invariants(&g);
    }

    #[test]
    fn torus_three_by_three() {
        let g = NeighborhoodGraph::lattice(3, 3, Boundary::Toroidal).unwrap();
        assert_eq!(g.num_sites(), 9);
        assert_eq!(g.num_edges(), 18);
        assert!((0..9).all(|s| g.degree(s) == 4));
        check_invariants(&g);
    }

    #[test]
    fn degenerate_torus_rejected() {
        assert!(matches!(
            NeighborhoodGraph::lattice(2, 2, Boundary::Toroidal),
            Err(Error::DimensionTooSmall { .. })
        ));
        assert!(NeighborhoodGraph::lattice(1, 5, Boundary::Toroidal).is_err());
        assert!(NeighborhoodGraph::lattice(0, 5, Boundary::Free).is_err());
    }

    #[test]
    fn edge_counts_match_formulas() {
        for w in 1..7 {
            for h in 1..7 {
                let g = NeighborhoodGraph::lattice(w, h, Boundary::Free).unwrap();
                assert_eq!(g.num_edges(), w * (h - 1) + h * (w - 1));
                check_invariants(&g);
                if w >= 3 && h >= 3 {
                    let t = NeighborhoodGraph::lattice(w, h, Boundary::Toroidal).unwrap();
                    assert_eq!(t.num_edges(), 2 * w * h);
                    check_invariants(&t);
                }
            }
        }
    }

    #[test]
    fn boundary_parse() {
        assert_eq!("torus".parse::<Boundary>().unwrap(), Boundary::Toroidal);
        assert_eq!("toroidal".parse::<Boundary>().unwrap(), Boundary::Toroidal);
        assert_eq!("FREE".parse::<Boundary>().unwrap(), Boundary::Free);
        assert!("mobius".parse::<Boundary>().is_err());
    }
}
