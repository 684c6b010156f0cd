//! Finite hypercubes in Z^d with free boundaries.
//!
//! Sites are enumerated row-major with coordinate 0 varying fastest, so the
//! linear index of `x = (x^0, .., x^{d-1})` is `sum_k x^k L^k`. Site `i` is
//! bit `i` of every [`SiteSet`] and spin configuration mask.

use std::fmt;

use crate::error::{Error, Result};

/// Hard limit imposed by the 64-bit masks.
pub const MAX_SITES: usize = 64;

/// Largest lattice any quantum builder accepts, whatever the configured cap.
pub const MAX_QUANTUM_SITES: usize = 20;

/// Default site caps for the three size-sensitive code paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteCaps {
    /// Largest lattice the quantum builders accept (Hilbert dimension 2^quantum).
    pub quantum: usize,
    /// Largest lattice handed to the dense eigensolver.
    pub dense: usize,
    /// Largest lattice summed over by exact classical enumeration.
    pub enumeration: usize,
}

impl Default for SiteCaps {
    fn default() -> Self {
        SiteCaps {
            quantum: 14,
            dense: 12,
            enumeration: 24,
        }
    }
}

/// Set of lattice sites stored as a bitmask over linear site indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteSet(u64);

impl SiteSet {
    pub const EMPTY: SiteSet = SiteSet(0);

    pub const fn from_mask(mask: u64) -> Self {
        SiteSet(mask)
    }

    pub fn single(site: usize) -> Self {
        assert!(site < MAX_SITES, "site index {site} out of range");
        SiteSet(1 << site)
    }

    pub fn from_sites<I: IntoIterator<Item = usize>>(sites: I) -> Self {
        sites
            .into_iter()
            .fold(SiteSet::EMPTY, |acc, i| acc.union(SiteSet::single(i)))
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, site: usize) -> bool {
        site < MAX_SITES && self.0 >> site & 1 == 1
    }

    pub const fn union(self, other: SiteSet) -> SiteSet {
        SiteSet(self.0 | other.0)
    }

    pub const fn intersection(self, other: SiteSet) -> SiteSet {
        SiteSet(self.0 & other.0)
    }

    pub const fn difference(self, other: SiteSet) -> SiteSet {
        SiteSet(self.0 & !other.0)
    }

    pub const fn symmetric_difference(self, other: SiteSet) -> SiteSet {
        SiteSet(self.0 ^ other.0)
    }

    pub const fn is_subset(self, other: SiteSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Site indices in increasing order.
    pub fn sites(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// All subsets of this set, starting from the empty set.
    pub fn subsets(self) -> impl Iterator<Item = SiteSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(SiteSet(cur))
        })
    }

    /// Checks that no bit is set at or above `sites`.
    pub fn check_within(self, sites: usize) -> Result<()> {
        if sites >= MAX_SITES || self.0 >> sites == 0 {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange { mask: self.0, sites })
        }
    }
}

impl fmt::Debug for SiteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sites()).finish()
    }
}

/// A `side_length^dimension` block of Z^d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    dimension: usize,
    side_length: usize,
    coords: Vec<Vec<i64>>,
}

impl Lattice {
    /// Builds the hypercube, limited only by the 64-bit mask width.
    pub fn hypercube(dimension: usize, side_length: usize) -> Result<Self> {
        Self::hypercube_capped(dimension, side_length, MAX_SITES)
    }

    /// Builds the hypercube, rejecting it if it has more than `cap` sites.
    pub fn hypercube_capped(dimension: usize, side_length: usize, cap: usize) -> Result<Self> {
        if dimension == 0 || side_length == 0 {
            return Err(Error::InvalidArgument(format!(
                "hypercube needs d >= 1 and L >= 1 (got d={dimension}, L={side_length})"
            )));
        }
        let cap = cap.min(MAX_SITES);
        let sites = u32::try_from(dimension)
            .ok()
            .and_then(|d| side_length.checked_pow(d))
            .filter(|&n| n <= cap)
            .ok_or(Error::SizeLimit {
                what: "hypercube",
                sites: side_length.saturating_pow(dimension.min(64) as u32),
                cap,
                hint: "reduce d or L",
            })?;

        let coords = (0..sites)
            .map(|mut i| {
                (0..dimension)
                    .map(|_| {
                        let c = (i % side_length) as i64;
                        i /= side_length;
                        c
                    })
                    .collect()
            })
            .collect();
        Ok(Lattice {
            dimension,
            side_length,
            coords,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn side_length(&self) -> usize {
        self.side_length
    }

    /// Number of sites |Λ|.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Every site of the lattice.
    pub fn all_sites(&self) -> SiteSet {
        SiteSet(if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        })
    }

    pub fn coordinate(&self, index: usize) -> &[i64] {
        &self.coords[index]
    }

    /// Inverse of [`Lattice::coordinate`]; `None` for points outside the block.
    pub fn index(&self, coordinate: &[i64]) -> Option<usize> {
        if coordinate.len() != self.dimension {
            return None;
        }
        let l = self.side_length as i64;
        coordinate.iter().rev().try_fold(0usize, |acc, &c| {
            (0..l).contains(&c).then(|| acc * self.side_length + c as usize)
        })
    }

    /// Nearest-neighbour pairs `(x, y)` with `x` lexicographically before `y`,
    /// each unordered pair listed once.
    pub fn nearest_neighbor_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::with_capacity(self.dimension * self.len());
        for i in 0..self.len() {
            let mut stride = 1;
            for axis in 0..self.dimension {
                if self.coords[i][axis] + 1 < self.side_length as i64 {
                    pairs.push((i, i + stride));
                }
                stride *= self.side_length;
            }
        }
        pairs
    }

    /// Coordinate sum `x^1 + .. + x^d` of a site.
    pub fn linear_height(&self, index: usize) -> i64 {
        linear_height(&self.coords[index])
    }

    /// Rejects the lattice if it is larger than `cap`.
    pub fn ensure_at_most(&self, cap: usize, what: &'static str, hint: &'static str) -> Result<()> {
        if self.len() > cap {
            Err(Error::SizeLimit {
                what,
                sites: self.len(),
                cap,
                hint,
            })
        } else {
            Ok(())
        }
    }
}

/// Coordinate sum of a point in Z^d.
pub fn linear_height(coordinate: &[i64]) -> i64 {
    coordinate.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_hypercubes() {
        for (d, l, sites, pairs) in [(1, 4, 4, 3), (2, 3, 9, 12), (3, 2, 8, 12), (2, 2, 4, 4), (1, 1, 1, 0)] {
            let lat = Lattice::hypercube(d, l).unwrap();
            assert_eq!(lat.len(), sites);
            assert_eq!(lat.nearest_neighbor_pairs().len(), pairs, "d={d} L={l}");
        }
        let chain = Lattice::hypercube(1, 3).unwrap();
        assert_eq!(chain.nearest_neighbor_pairs(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn coordinate_zero_is_fastest() {
        let lat = Lattice::hypercube(2, 3).unwrap();
        assert_eq!(lat.coordinate(1), &[1, 0]);
        assert_eq!(lat.coordinate(3), &[0, 1]);
        assert_eq!(lat.index(&[2, 1]), Some(5));
        assert_eq!(lat.index(&[3, 0]), None);
        assert_eq!(lat.linear_height(5), 3);
        assert_eq!(linear_height(&[0, 0]), 0);
        assert_eq!(linear_height(&[2, 1]), 3);
    }

    #[test]
    fn caps_are_enforced() {
        let err = Lattice::hypercube_capped(2, 5, 24).unwrap_err();
        assert!(err.to_string().contains("cap of 24"), "{err}");
        assert!(Lattice::hypercube(3, 5).is_err());
        assert!(Lattice::hypercube(0, 3).is_err());
        assert!(Lattice::hypercube(2, 8).is_ok());
    }

    #[test]
    fn site_set_basics() {
        let a = SiteSet::from_sites([0, 2, 5]);
        assert_eq!(a.len(), 3);
        assert_eq!(a.sites().collect::<Vec<_>>(), vec![0, 2, 5]);
        assert_eq!(a.subsets().count(), 8);
        assert!(a.subsets().all(|b| b.is_subset(a)));
        assert_eq!(SiteSet::EMPTY.subsets().count(), 1);
        assert!(a.check_within(6).is_ok());
        assert!(a.check_within(5).is_err());
    }

    #[test]
    fn hypercube_invariants() {
        for (d, l) in [(1, 7), (2, 4), (3, 3), (4, 2)] {
            let lat = Lattice::hypercube(d, l).unwrap();
            for i in 0..lat.len() {
                assert_eq!(lat.index(lat.coordinate(i)), Some(i));
            }
            let pairs = lat.nearest_neighbor_pairs();
            assert_eq!(pairs.len(), d * l.pow(d as u32 - 1) * (l - 1));
            for &(x, y) in &pairs {
                assert!(x < y);
                let diff: Vec<i64> = lat
                    .coordinate(y)
                    .iter()
                    .zip(lat.coordinate(x))
                    .map(|(a, b)| a - b)
                    .collect();
                assert_eq!(diff.iter().filter(|&&c| c != 0).count(), 1);
                assert_eq!(diff.iter().sum::<i64>(), 1);
                assert_eq!((lat.linear_height(x) - lat.linear_height(y)).abs(), 1);
            }
        }
    }
}
