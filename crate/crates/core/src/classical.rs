//! The classical Ising-type system behind the Gibbsian state: the potential
//! U₀ as a multilinear polynomial in ±1 spins, spin flips, flip energies and
//! exact Gibbs averages by enumeration.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, SiteSet};
use crate::scalar::Real;

pub mod metropolis;

/// One classical configuration `s ∈ {−1,+1}^Λ`. Bit `i` set means `s_i = −1`,
/// so the all-up configuration is the zero mask. The mask doubles as the
/// quantum basis index.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinConfiguration(u64);

impl SpinConfiguration {
    pub const ALL_UP: SpinConfiguration = SpinConfiguration(0);

    pub const fn from_mask(mask: u64) -> Self {
        SpinConfiguration(mask)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// Spin value `s_site ∈ {−1, +1}`.
    pub const fn spin(self, site: usize) -> i8 {
        if self.0 >> site & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// `Π_{x∈B} s_x`.
    pub const fn product(self, sites: SiteSet) -> i8 {
        if (self.0 & sites.mask()).count_ones() % 2 == 1 {
            -1
        } else {
            1
        }
    }

    /// `s^A`: signs negated exactly on `sites`.
    pub const fn flip(self, sites: SiteSet) -> SpinConfiguration {
        SpinConfiguration(self.0 ^ sites.mask())
    }

    /// Builds a configuration from explicit ±1 values, site 0 first.
    pub fn from_spins(spins: &[i8]) -> Self {
        SpinConfiguration(
            spins
                .iter()
                .enumerate()
                .filter(|(_, &s)| s < 0)
                .fold(0, |m, (i, _)| m | 1 << i),
        )
    }
}

impl fmt::Debug for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinConfiguration({:#b})", self.0)
    }
}

/// Free function form of [`SpinConfiguration::flip`].
pub fn flip(s: SpinConfiguration, sites: SiteSet) -> SpinConfiguration {
    s.flip(sites)
}

/// `U₀(s) = Σ_B c_B Π_{x∈B} s_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPotential<T> {
    terms: Vec<(SiteSet, T)>,
}

impl<T: Real> Default for ClassicalPotential<T> {
    fn default() -> Self {
        ClassicalPotential { terms: Vec::new() }
    }
}

impl<T: Real> ClassicalPotential<T> {
    /// Rejects duplicate monomials and non-finite coefficients.
    pub fn new(terms: Vec<(SiteSet, T)>) -> Result<Self> {
        let mut keys: Vec<(SiteSet, usize)> = terms.iter().enumerate().map(|(i, t)| (t.0, i)).collect();
        keys.sort();
        if let Some(w) = keys.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateKey {
                what: "potential monomial",
                index: w[1].1,
            });
        }
        if let Some((i, (_, c))) = terms.iter().enumerate().find(|(_, t)| !t.1.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "potential term {i} has non-finite coefficient {c}"
            )));
        }
        Ok(ClassicalPotential { terms })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `Σ_x u_x s_x`.
    pub fn linear(field: &[T]) -> Self {
        ClassicalPotential {
            terms: field
                .iter()
                .enumerate()
                .filter(|(_, u)| !u.is_zero())
                .map(|(i, &u)| (SiteSet::single(i), u))
                .collect(),
        }
    }

    /// `−K Σ_{⟨x,y⟩} s_x s_y` over the lattice's nearest-neighbour bonds.
    pub fn ising_nearest_neighbor(lattice: &Lattice, coupling: T) -> Self {
        ClassicalPotential {
            terms: lattice
                .nearest_neighbor_pairs()
                .into_iter()
                .map(|(x, y)| (SiteSet::from_sites([x, y]), -coupling))
                .collect(),
        }
    }

    /// `Σ_x u_x s_x` with `u_x` the coordinate sum of site `x`.
    pub fn linear_height(lattice: &Lattice) -> Self {
        let field: Vec<T> = (0..lattice.len())
            .map(|i| T::from_i64(lattice.linear_height(i)).unwrap())
            .collect();
        Self::linear(&field)
    }

    pub fn terms(&self) -> &[(SiteSet, T)] {
        &self.terms
    }

    pub fn support(&self) -> SiteSet {
        self.terms.iter().fold(SiteSet::EMPTY, |acc, t| acc.union(t.0))
    }

    pub fn check_within(&self, lattice: &Lattice) -> Result<()> {
        self.support().check_within(lattice.len())
    }

    /// `U₀(s)`.
    pub fn eval(&self, s: SpinConfiguration) -> T {
        self.terms.iter().fold(
            T::zero(),
            |acc, &(b, c)| {
                if s.product(b) < 0 {
                    acc - c
                } else {
                    acc + c
                }
            },
        )
    }

    /// `W_A(s) = U₀(s^A) − U₀(s)`. Only monomials overlapping `A` in an odd
    /// number of sites change sign, each contributing `−2 c_B s_[B]`.
    pub fn flip_energy(&self, s: SpinConfiguration, sites: SiteSet) -> T {
        let two = T::lit(2.0);
        self.terms
            .iter()
            .filter(|(b, _)| b.intersection(sites).len() % 2 == 1)
            .fold(
                T::zero(),
                |acc, &(b, c)| {
                    if s.product(b) < 0 {
                        acc + two * c
                    } else {
                        acc - two * c
                    }
                },
            )
    }

    /// Per-site lists of the monomials containing that site.
    pub(crate) fn site_index(&self, sites: usize) -> Vec<Vec<usize>> {
        let mut index = vec![Vec::new(); sites];
        for (k, (b, _)) in self.terms.iter().enumerate() {
            for x in b.sites() {
                index[x].push(k);
            }
        }
        index
    }
}

/// Free function form of [`ClassicalPotential::eval`].
pub fn eval_potential<T: Real>(potential: &ClassicalPotential<T>, s: SpinConfiguration) -> T {
    potential.eval(s)
}

/// Free function form of [`ClassicalPotential::flip_energy`].
pub fn flip_energy<T: Real>(potential: &ClassicalPotential<T>, s: SpinConfiguration, sites: SiteSet) -> T {
    potential.flip_energy(s, sites)
}

/// Validated inverse-temperature parameter α ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsParameters<T> {
    alpha: T,
}

impl<T: Real> GibbsParameters<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha.is_finite() && alpha >= T::zero() {
            Ok(GibbsParameters { alpha })
        } else {
            Err(Error::InvalidArgument(format!(
                "alpha must be finite and >= 0, got {alpha}"
            )))
        }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
}

const CHUNK: usize = 1 << 12;

/// Sums `f` over `0..n` in fixed-size chunks whose partial results are
/// combined in index order, so the result does not depend on thread count.
pub(crate) fn ordered_chunk_reduce<A, F, G>(n: usize, init: A, chunk: F, combine: G) -> A
where
    A: Send + Clone,
    F: Fn(std::ops::Range<usize>) -> A + Sync,
    G: Fn(A, A) -> A,
{
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| chunk(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect();
    partials.into_iter().fold(init, combine)
}

/// Exact Gibbs measure `e^{−αU₀(s)}/Z` over all `2^|Λ|` configurations.
#[derive(Debug, Clone, Copy)]
pub struct GibbsMeasure<'a, T> {
    lattice: &'a Lattice,
    potential: &'a ClassicalPotential<T>,
    alpha: T,
    cap: usize,
}

impl<'a, T: Real> GibbsMeasure<'a, T> {
    pub fn new(lattice: &'a Lattice, potential: &'a ClassicalPotential<T>, alpha: T) -> Result<Self> {
        GibbsParameters::new(alpha)?;
        potential.check_within(lattice)?;
        Ok(GibbsMeasure {
            lattice,
            potential,
            alpha,
            cap: crate::lattice::SiteCaps::default().enumeration,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn lattice(&self) -> &'a Lattice {
        self.lattice
    }

    pub fn potential(&self) -> &'a ClassicalPotential<T> {
        self.potential
    }

    fn states(&self) -> Result<usize> {
        self.lattice.ensure_at_most(
            self.cap,
            "exact enumeration",
            "use the Metropolis sampler for larger lattices",
        )?;
        Ok(1usize << self.lattice.len())
    }

    /// Minimum of `U₀` over all configurations.
    pub fn ground_energy(&self) -> Result<T> {
        let n = self.states()?;
        let u = self.potential;
        Ok(ordered_chunk_reduce(
            n,
            T::infinity(),
            |r| {
                r.map(|i| u.eval(SpinConfiguration(i as u64)))
                    .fold(T::infinity(), T::min)
            },
            T::min,
        ))
    }

    /// `ln Z` computed with the ground energy factored out.
    pub fn log_partition_function(&self) -> Result<T> {
        let shift = self.ground_energy()?;
        let reduced = self.shifted_sums(shift, &[])?.0;
        Ok(reduced.ln() - self.alpha * shift)
    }

    /// `Z = Σ_s e^{−αU₀(s)}`.
    pub fn partition_function(&self) -> Result<T> {
        Ok(self.log_partition_function()?.exp())
    }

    /// `Z^{-1} Σ_s f(s) e^{−αU₀(s)}`.
    pub fn expectation<F>(&self, f: F) -> Result<T>
    where
        F: Fn(SpinConfiguration) -> T + Sync,
    {
        Ok(self.expectations(&[&f])?[0])
    }

    /// Several expectations from a single pass over the configurations.
    pub fn expectations(&self, fs: &[&(dyn Fn(SpinConfiguration) -> T + Sync)]) -> Result<Vec<T>> {
        let shift = self.ground_energy()?;
        let (z, sums) = self.shifted_sums(shift, fs)?;
        Ok(sums.into_iter().map(|s| s / z).collect())
    }

    /// `(Σ w, [Σ f_k w])` with `w = e^{−α(U₀ − shift)}`.
    fn shifted_sums(&self, shift: T, fs: &[&(dyn Fn(SpinConfiguration) -> T + Sync)]) -> Result<(T, Vec<T>)> {
        let n = self.states()?;
        let (u, alpha) = (self.potential, self.alpha);
        let zero = (T::zero(), vec![T::zero(); fs.len()]);
        Ok(ordered_chunk_reduce(
            n,
            zero.clone(),
            |r| {
                let mut acc = zero.clone();
                for i in r {
                    let s = SpinConfiguration(i as u64);
                    let w = (-alpha * (u.eval(s) - shift)).exp();
                    acc.0 = acc.0 + w;
                    for (a, f) in acc.1.iter_mut().zip(fs) {
                        *a = *a + f(s) * w;
                    }
                }
                acc
            },
            |mut a, b| {
                a.0 = a.0 + b.0;
                for (x, y) in a.1.iter_mut().zip(b.1) {
                    *x = *x + y;
                }
                a
            },
        ))
    }
}

/// `Z_Λ(α)` by exact enumeration with the default cap.
pub fn partition_function<T: Real>(potential: &ClassicalPotential<T>, alpha: T, lattice: &Lattice) -> Result<T> {
    GibbsMeasure::new(lattice, potential, alpha)?.partition_function()
}

/// Classical Gibbs average of `f` by exact enumeration with the default cap.
pub fn classical_expectation<T, F>(f: F, potential: &ClassicalPotential<T>, alpha: T, lattice: &Lattice) -> Result<T>
where
    T: Real,
    F: Fn(SpinConfiguration) -> T + Sync,
{
    GibbsMeasure::new(lattice, potential, alpha)?.expectation(f)
}
