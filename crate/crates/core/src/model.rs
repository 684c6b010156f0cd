//! Hamiltonians with a prescribed Gibbsian eigenstate.
//!
//! A coupling table `φ_{A,A'}` (disjoint `A`, `A'`) defines the off-diagonal
//! part `H₀ = Σ φ_{A,A'} S¹_[A] S²_[A']`. Grouping the entries by the union
//! `A ∪ A'` gives the diagonal couplings
//! `J_A(s_A) = Σ_{A'⊆A} (−i)^{|A'|} φ_{A∖A',A'} s_[A']`, and the diagonal
//! counterterm `V = −Σ_A J_A(S³_A) e^{−(α/2)W_A(S³)}` makes
//! `Ψ = Σ_s e^{−(α/2)U₀(s)} Ψ⁰(s)` an eigenvector of `H = H₀ + V` with
//! eigenvalue zero.
//!
//! `H` is assembled twice, once as `H₀ + V` and once as
//! `Σ_{|A|>0} J_A(S³_A)(S¹_[A] − e^{−(α/2)W_A(S³)})`, and the two must agree.

use num_traits::{One, Zero};

use crate::classical::{ClassicalPotential, GibbsParameters, SpinConfiguration};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SiteCaps, SiteSet, MAX_QUANTUM_SITES};
use crate::operators::{Axis, OperatorMatrix, StateVector};
use crate::scalar::{Complex, Real};

/// One `φ_{A,A'}` entry: `S¹` acts on `flip`, `S²` on `twist`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingEntry<T> {
    pub flip: SiteSet,
    pub twist: SiteSet,
    pub phi: T,
}

impl<T> CouplingEntry<T> {
    pub fn new(flip: SiteSet, twist: SiteSet, phi: T) -> Self {
        CouplingEntry { flip, twist, phi }
    }

    /// `A ∪ A'`, the set `S¹` ends up flipping once `S²` is rewritten.
    pub fn support(&self) -> SiteSet {
        self.flip.union(self.twist)
    }
}

/// The map `(A, A') ↦ φ_{A,A'}` plus the `A = A' = ∅` constant.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable<T> {
    entries: Vec<CouplingEntry<T>>,
    constant: T,
}

impl<T: Real> Default for CouplingTable<T> {
    fn default() -> Self {
        CouplingTable {
            entries: Vec::new(),
            constant: T::zero(),
        }
    }
}

impl<T: Real> CouplingTable<T> {
    pub fn new(entries: Vec<CouplingEntry<T>>, constant: T) -> Result<Self> {
        for (index, e) in entries.iter().enumerate() {
            let overlap = e.flip.intersection(e.twist);
            if !overlap.is_empty() {
                return Err(Error::OverlappingSets {
                    index,
                    overlap: overlap.mask(),
                });
            }
            if e.support().is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "coupling entry {index} has A = A' = ∅; put it in the constant term"
                )));
            }
            if !e.phi.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "coupling entry {index} has non-finite φ"
                )));
            }
        }
        let mut keys: Vec<_> = entries.iter().enumerate().map(|(i, e)| (e.flip, e.twist, i)).collect();
        keys.sort();
        if let Some(w) = keys.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::DuplicateKey {
                what: "coupling (A, A')",
                index: w[1].2,
            });
        }
        Ok(CouplingTable { entries, constant })
    }

    /// `Σ_{pairs} φ (S¹_x S¹_y + S²_x S²_y)`, each pair once.
    pub fn xx(pairs: &[(usize, usize)], phi: T) -> Result<Self> {
        let entries = pairs
            .iter()
            .flat_map(|&(x, y)| {
                let b = SiteSet::from_sites([x, y]);
                [
                    CouplingEntry::new(b, SiteSet::EMPTY, phi),
                    CouplingEntry::new(SiteSet::EMPTY, b, phi),
                ]
            })
            .collect();
        Self::new(entries, T::zero())
    }

    pub fn entries(&self) -> &[CouplingEntry<T>] {
        &self.entries
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.constant.is_zero()
    }

    pub fn support(&self) -> SiteSet {
        self.entries
            .iter()
            .fold(SiteSet::EMPTY, |acc, e| acc.union(e.support()))
    }

    pub fn check_within(&self, lattice: &Lattice) -> Result<()> {
        self.support().check_within(lattice.len())
    }

    /// Entries with nonzero `φ` and an odd number of `S²` factors.
    pub fn odd_twist_entries(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.twist.len() % 2 == 1 && !e.phi.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// The pair couplings `φ_{x,y}` if this is an XX table: every entry is
    /// `({x,y}, ∅)` or `(∅, {x,y})`, both present with equal `φ`, no constant.
    pub fn xx_pairs(&self) -> Option<Vec<(usize, usize, T)>> {
        if !self.constant.is_zero() {
            return None;
        }
        let mut flips = Vec::new();
        let mut twists = Vec::new();
        for e in &self.entries {
            match (e.flip.len(), e.twist.len()) {
                (2, 0) => flips.push((e.flip, e.phi)),
                (0, 2) => twists.push((e.twist, e.phi)),
                _ => return None,
            }
        }
        flips.sort_by_key(|p| p.0);
        twists.sort_by_key(|p| p.0);
        if flips != twists {
            return None;
        }
        Some(
            flips
                .into_iter()
                .map(|(b, phi)| {
                    let mut s = b.sites();
                    (s.next().unwrap(), s.next().unwrap(), phi)
                })
                .collect(),
        )
    }
}

/// `(−i)^k`.
fn minus_i_pow<T: Real>(k: usize) -> Complex<T> {
    match k % 4 {
        0 => Complex::one(),
        1 => -Complex::i(),
        2 => -Complex::one(),
        _ => Complex::i(),
    }
}

/// `J_A(s_A) = Σ_k c_k s_[A'_k]` for one support set `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalCoupling<T> {
    support: SiteSet,
    terms: Vec<(SiteSet, Complex<T>)>,
}

impl<T: Real> DiagonalCoupling<T> {
    pub fn support(&self) -> SiteSet {
        self.support
    }

    /// `(A', (−i)^{|A'|} φ_{A∖A',A'})` pairs.
    pub fn terms(&self) -> &[(SiteSet, Complex<T>)] {
        &self.terms
    }

    /// Value at a configuration; only the spins inside the support matter.
    pub fn value(&self, s: SpinConfiguration) -> Complex<T> {
        self.terms.iter().fold(
            Complex::zero(),
            |acc, &(twist, c)| {
                if s.product(twist) < 0 {
                    acc - c
                } else {
                    acc + c
                }
            },
        )
    }

    /// True when every coefficient is real, i.e. every contributing `|A'|` is even.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.im.is_zero())
    }

    /// Values over all `2^|A|` restricted configurations of the support.
    pub fn restricted_values(&self) -> impl Iterator<Item = (SpinConfiguration, Complex<T>)> + '_ {
        self.support.subsets().map(move |down| {
            let s = SpinConfiguration::from_mask(down.mask());
            (s, self.value(s))
        })
    }
}

/// Groups the table by `A ∪ A'`. The constant, if nonzero, becomes `J_∅`.
/// Output is sorted by support mask.
pub fn build_ja<T: Real>(table: &CouplingTable<T>) -> Vec<DiagonalCoupling<T>> {
    let mut grouped: Vec<DiagonalCoupling<T>> = Vec::new();
    if !table.constant.is_zero() {
        grouped.push(DiagonalCoupling {
            support: SiteSet::EMPTY,
            terms: vec![(SiteSet::EMPTY, Complex::from(table.constant))],
        });
    }
    let mut entries: Vec<&CouplingEntry<T>> = table.entries.iter().collect();
    entries.sort_by_key(|e| (e.support(), e.twist));
    for e in entries {
        let c = minus_i_pow::<T>(e.twist.len()) * e.phi;
        match grouped.last_mut() {
            Some(g) if g.support == e.support() => g.terms.push((e.twist, c)),
            _ => grouped.push(DiagonalCoupling {
                support: e.support(),
                terms: vec![(e.twist, c)],
            }),
        }
    }
    grouped
}

/// Phase of `S²_[A'] Ψ⁰(s)`: `i` per up spin, `−i` per down spin in `A'`.
fn twist_phase<T: Real>(s: SpinConfiguration, twist: SiteSet) -> Complex<T> {
    let down = (s.mask() & twist.mask()).count_ones() as usize;
    let up = twist.len() - down;
    minus_i_pow(3 * up + down)
}

fn quantum_dim(lattice: &Lattice, cap: usize) -> Result<usize> {
    lattice.ensure_at_most(cap, "quantum model", "raise the quantum cap or use the classical paths")?;
    Ok(1 << lattice.len())
}

fn default_quantum_cap() -> usize {
    SiteCaps::default().quantum
}

/// Cap for the free-standing builders; [`ModelInstance`] applies the
/// configurable (default 14-site) cap before calling them.
fn builder_cap() -> usize {
    MAX_QUANTUM_SITES
}

/// `H₀ = Σ φ_{A,A'} S¹_[A] S²_[A']`, assembled entry by entry from the
/// action of the Pauli strings on basis vectors.
pub fn build_h0<T: Real>(table: &CouplingTable<T>, lattice: &Lattice) -> Result<OperatorMatrix<T>> {
    table.check_within(lattice)?;
    let dim = quantum_dim(lattice, builder_cap())?;
    let mut triplets = Vec::with_capacity(dim * (table.entries.len() + 1));
    for col in 0..dim {
        let t = SpinConfiguration::from_mask(col as u64);
        if !table.constant.is_zero() {
            triplets.push((col, col, Complex::from(table.constant)));
        }
        for e in &table.entries {
            let row = t.flip(e.support()).index();
            triplets.push((row, col, twist_phase::<T>(t, e.twist) * e.phi));
        }
    }
    OperatorMatrix::from_triplets(dim, triplets)
}

/// `Σ_A J_A(S³_A) S¹_[A]`, the regrouped form of `H₀`.
pub fn build_h0_regrouped<T: Real>(couplings: &[DiagonalCoupling<T>], lattice: &Lattice) -> Result<OperatorMatrix<T>> {
    let dim = quantum_dim(lattice, builder_cap())?;
    let mut triplets = Vec::with_capacity(dim * couplings.len());
    for row in 0..dim {
        let s = SpinConfiguration::from_mask(row as u64);
        for j in couplings {
            j.support.check_within(lattice.len())?;
            triplets.push((row, s.flip(j.support).index(), j.value(s)));
        }
    }
    OperatorMatrix::from_triplets(dim, triplets)
}

/// `V = −Σ_A J_A(S³_A) e^{−(α/2)W_A(S³)}`, diagonal.
pub fn build_v<T: Real>(
    table: &CouplingTable<T>,
    potential: &ClassicalPotential<T>,
    alpha: T,
    lattice: &Lattice,
) -> Result<OperatorMatrix<T>> {
    GibbsParameters::new(alpha)?;
    table.check_within(lattice)?;
    potential.check_within(lattice)?;
    let dim = quantum_dim(lattice, builder_cap())?;
    let couplings = build_ja(table);
    let half = alpha / T::lit(2.0);
    let diagonal = (0..dim)
        .map(|i| {
            let s = SpinConfiguration::from_mask(i as u64);
            couplings.iter().fold(Complex::zero(), |acc, j| {
                acc - j.value(s) * (-half * potential.flip_energy(s, j.support)).exp()
            })
        })
        .collect();
    OperatorMatrix::from_diagonal(diagonal)
}

/// `Σ_{|A|>0} J_A(S³_A) P_A` with `P_A = S¹_[A] − e^{−(α/2)W_A(S³)}`.
pub fn build_flip_form<T: Real>(
    couplings: &[DiagonalCoupling<T>],
    potential: &ClassicalPotential<T>,
    alpha: T,
    lattice: &Lattice,
) -> Result<OperatorMatrix<T>> {
    let dim = quantum_dim(lattice, builder_cap())?;
    let half = alpha / T::lit(2.0);
    let mut triplets = Vec::with_capacity(2 * dim * couplings.len());
    for row in 0..dim {
        let s = SpinConfiguration::from_mask(row as u64);
        for j in couplings.iter().filter(|j| !j.support.is_empty()) {
            let value = j.value(s);
            triplets.push((row, s.flip(j.support).index(), value));
            triplets.push((row, row, -value * (-half * potential.flip_energy(s, j.support)).exp()));
        }
    }
    OperatorMatrix::from_triplets(dim, triplets)
}

/// `Ψ = Σ_s e^{−(α/2)U₀(s)} Ψ⁰(s)` (not normalized).
pub fn build_gibbs_state<T: Real>(
    potential: &ClassicalPotential<T>,
    alpha: T,
    lattice: &Lattice,
) -> Result<StateVector<T>> {
    GibbsParameters::new(alpha)?;
    potential.check_within(lattice)?;
    let dim = quantum_dim(lattice, builder_cap())?;
    let half = alpha / T::lit(2.0);
    StateVector::from_real(
        (0..dim)
            .map(|i| (-half * potential.eval(SpinConfiguration::from_mask(i as u64))).exp())
            .collect(),
    )
}

/// `H⁺` from its action `(H⁺F)(s) = −Σ_A J_A(s_A) e^{−(α/2)W_A(s)} (F(s) − F(s^A))`.
pub fn build_hplus_direct<T: Real>(
    couplings: &[DiagonalCoupling<T>],
    potential: &ClassicalPotential<T>,
    alpha: T,
    lattice: &Lattice,
) -> Result<OperatorMatrix<T>> {
    let dim = quantum_dim(lattice, builder_cap())?;
    let half = alpha / T::lit(2.0);
    let mut triplets = Vec::with_capacity(2 * dim * couplings.len());
    for row in 0..dim {
        let s = SpinConfiguration::from_mask(row as u64);
        for j in couplings.iter().filter(|j| !j.support.is_empty()) {
            let rate = j.value(s) * (-half * potential.flip_energy(s, j.support)).exp();
            triplets.push((row, s.flip(j.support).index(), rate));
            triplets.push((row, row, -rate));
        }
    }
    OperatorMatrix::from_triplets(dim, triplets)
}

/// `e^{(α/2)U₀(S³)} H e^{−(α/2)U₀(S³)}`, entrywise.
pub fn similarity_transform<T: Real>(
    h: &OperatorMatrix<T>,
    potential: &ClassicalPotential<T>,
    alpha: T,
) -> Result<OperatorMatrix<T>> {
    let half = alpha / T::lit(2.0);
    let u = |i: usize| potential.eval(SpinConfiguration::from_mask(i as u64));
    let triplets = h
        .triplets()
        .map(|(r, c, v)| (r, c, v * (half * (u(r) - u(c))).exp()))
        .collect();
    OperatorMatrix::from_triplets(h.dim(), triplets)
}

/// A fully assembled model with its cached operators and Gibbsian state.
#[derive(Clone)]
pub struct ModelInstance<T> {
    lattice: Lattice,
    couplings: CouplingTable<T>,
    potential: ClassicalPotential<T>,
    alpha: T,
    diagonal_couplings: Vec<DiagonalCoupling<T>>,
    h0: OperatorMatrix<T>,
    v: OperatorMatrix<T>,
    h: OperatorMatrix<T>,
    flip_form: OperatorMatrix<T>,
    psi: StateVector<T>,
}

impl<T: Real> std::fmt::Debug for ModelInstance<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelInstance")
            .field("sites", &self.lattice.len())
            .field("entries", &self.couplings.entries().len())
            .field("alpha", &self.alpha)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ModelInstance<T> {
    /// Builds every operator with the default quantum cap.
    pub fn new(
        lattice: Lattice,
        couplings: CouplingTable<T>,
        potential: ClassicalPotential<T>,
        alpha: T,
    ) -> Result<Self> {
        Self::with_cap(lattice, couplings, potential, alpha, default_quantum_cap())
    }

    /// Builds every operator, failing with a consistency error if the two
    /// assemblies of `H` disagree beyond `1e−12·‖H‖_max`.
    pub fn with_cap(
        lattice: Lattice,
        couplings: CouplingTable<T>,
        potential: ClassicalPotential<T>,
        alpha: T,
        quantum_cap: usize,
    ) -> Result<Self> {
        quantum_dim(&lattice, quantum_cap)?;
        let h0 = build_h0(&couplings, &lattice)?;
        let v = build_v(&couplings, &potential, alpha, &lattice)?;
        let h = h0.add(&v)?;
        let diagonal_couplings = build_ja(&couplings);
        let flip_form = build_flip_form(&diagonal_couplings, &potential, alpha, &lattice)?;
        let psi = build_gibbs_state(&potential, alpha, &lattice)?;
        let model = ModelInstance {
            lattice,
            couplings,
            potential,
            alpha,
            diagonal_couplings,
            h0,
            v,
            h,
            flip_form,
            psi,
        };
        let deviation = model.assembly_deviation();
        let tolerance = T::tolerance(1e-12) * model.h.max_abs();
        if deviation > tolerance {
            return Err(Error::Consistency {
                what: "H0 + V against the flip-form assembly",
                deviation: deviation.as_f64(),
                tolerance: tolerance.as_f64(),
            });
        }
        Ok(model)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn couplings(&self) -> &CouplingTable<T> {
        &self.couplings
    }

    pub fn potential(&self) -> &ClassicalPotential<T> {
        &self.potential
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn diagonal_couplings(&self) -> &[DiagonalCoupling<T>] {
        &self.diagonal_couplings
    }

    pub fn h0(&self) -> &OperatorMatrix<T> {
        &self.h0
    }

    pub fn v(&self) -> &OperatorMatrix<T> {
        &self.v
    }

    /// `H = H₀ + V`.
    pub fn hamiltonian(&self) -> &OperatorMatrix<T> {
        &self.h
    }

    /// `Σ_{|A|>0} J_A(S³_A) P_A`.
    pub fn flip_form(&self) -> &OperatorMatrix<T> {
        &self.flip_form
    }

    /// The Gibbsian state `Ψ`.
    pub fn gibbs_state(&self) -> &StateVector<T> {
        &self.psi
    }

    /// `max |(H₀ + V) − flip form|`.
    pub fn assembly_deviation(&self) -> T {
        self.h.max_abs_diff(&self.flip_form).expect("same lattice")
    }

    /// `H⁺` from its flip-difference action, checked against the similarity
    /// transform of `H` at `1e−10` relative to the larger of the two max norms.
    pub fn hplus(&self) -> Result<OperatorMatrix<T>> {
        let direct = build_hplus_direct(&self.diagonal_couplings, &self.potential, self.alpha, &self.lattice)?;
        let conjugated = similarity_transform(&self.h, &self.potential, self.alpha)?;
        let deviation = direct.max_abs_diff(&conjugated)?;
        let tolerance = T::tolerance(1e-10) * self.h.max_abs().max(direct.max_abs());
        if deviation > tolerance {
            return Err(Error::Consistency {
                what: "H+ action formula against the similarity transform",
                deviation: deviation.as_f64(),
                tolerance: tolerance.as_f64(),
            });
        }
        Ok(direct)
    }
}

/// Free function form of [`ModelInstance::hamiltonian`] for an already built model.
pub fn build_h<T: Real>(model: &ModelInstance<T>) -> &OperatorMatrix<T> {
    model.hamiltonian()
}

/// Coefficients `u_x` if the potential is purely linear, `Σ_x u_x s_x`.
pub fn linear_field<T: Real>(potential: &ClassicalPotential<T>, sites: usize) -> Option<Vec<T>> {
    let mut field = vec![T::zero(); sites];
    for &(b, c) in potential.terms() {
        if b.len() != 1
            || !b.is_subset(SiteSet::from_mask(if sites >= 64 {
                u64::MAX
            } else {
                (1 << sites) - 1
            }))
        {
            return None;
        }
        field[b.sites().next().unwrap()] = c;
    }
    Some(field)
}

/// The closed form of `V` for an XX table and linear potential:
/// `Σ φ_{x,y}[S³_xS³_y cosh αΔ − (S³_x − S³_y) sinh αΔ − cosh αΔ]`, `Δ = u_x − u_y`.
pub fn xxz_closed_form<T: Real>(
    table: &CouplingTable<T>,
    field: &[T],
    alpha: T,
    lattice: &Lattice,
) -> Result<OperatorMatrix<T>> {
    let pairs = table.xx_pairs().ok_or_else(|| {
        Error::UnsupportedModel("closed form needs an XX pair table; use build_v for general tables".into())
    })?;
    if field.len() != lattice.len() {
        return Err(Error::DimensionMismatch {
            expected: lattice.len(),
            found: field.len(),
        });
    }
    table.check_within(lattice)?;
    let dim = quantum_dim(lattice, builder_cap())?;
    let diagonal = (0..dim)
        .map(|i| {
            let s = SpinConfiguration::from_mask(i as u64);
            let v = pairs.iter().fold(T::zero(), |acc, &(x, y, phi)| {
                let delta = alpha * (field[x] - field[y]);
                let (sx, sy) = (T::from_i8(s.spin(x)).unwrap(), T::from_i8(s.spin(y)).unwrap());
                acc + phi * (sx * sy * delta.cosh() - (sx - sy) * delta.sinh() - delta.cosh())
            });
            Complex::from(v)
        })
        .collect();
    OperatorMatrix::from_diagonal(diagonal)
}

/// The nearest-neighbour XXZ Hamiltonian with `q = e^α`:
///
/// `J Σ_{x,y} [S¹_xS¹_y + S²_xS²_y + ((q+q⁻¹)/2) S³_xS³_y]
///   + 2J Σ_{x<y} [((q−q⁻¹)/2)(S³_x − S³_y) − (q+q⁻¹)/2]`
///
/// where the first sum runs over ordered neighbour pairs (each bond twice)
/// and `x < y` is the lexicographic order. Its Gibbsian state is that of
/// `U₀ = Σ_x u_x s_x` with `u_x` the coordinate sum; see [`xxz_model`].
#[derive(Debug, Clone, PartialEq)]
pub struct XxzHamiltonian<T> {
    bonds: Vec<(usize, usize)>,
    exchange: T,
    zz: T,
    linear: Vec<T>,
    constant: T,
    sites: usize,
}

impl<T: Real> XxzHamiltonian<T> {
    pub fn new(coupling: T, alpha: T, lattice: &Lattice) -> Result<Self> {
        GibbsParameters::new(alpha)?;
        let q = alpha.exp();
        let (c, d) = ((q + q.recip()) / T::lit(2.0), (q - q.recip()) / T::lit(2.0));
        let two_j = coupling + coupling;
        let bonds = lattice.nearest_neighbor_pairs();
        let mut linear = vec![T::zero(); lattice.len()];
        for &(x, y) in &bonds {
            linear[x] = linear[x] + two_j * d;
            linear[y] = linear[y] - two_j * d;
        }
        Ok(XxzHamiltonian {
            constant: -two_j * c * T::from_usize(bonds.len()).unwrap(),
            bonds,
            exchange: two_j,
            zz: two_j * c,
            linear,
            sites: lattice.len(),
        })
    }

    /// Coefficient of `S³_x`; zero away from the boundary.
    pub fn linear_coefficient(&self, site: usize) -> T {
        self.linear[site]
    }

    /// Coefficient of each `S³_xS³_y` bond term, `2J(q+q⁻¹)/2`.
    pub fn anisotropy(&self) -> T {
        self.zz
    }

    pub fn to_operator(&self) -> Result<OperatorMatrix<T>> {
        let n = self.sites;
        let mut h = OperatorMatrix::identity(n)?.scale(Complex::from(self.constant));
        for &(x, y) in &self.bonds {
            let b = SiteSet::from_sites([x, y]);
            for (axis, coef) in [(Axis::X, self.exchange), (Axis::Y, self.exchange), (Axis::Z, self.zz)] {
                let pair = OperatorMatrix::product_operator(axis, SiteSet::single(x), n)?
                    .matmul(&OperatorMatrix::product_operator(axis, SiteSet::single(y), n)?)?;
                debug_assert!(axis != Axis::X || pair == OperatorMatrix::product_operator(Axis::X, b, n)?);
                h = h.add(&pair.scale(Complex::from(coef)))?;
            }
        }
        for (x, &coef) in self.linear.iter().enumerate() {
            if !coef.is_zero() {
                h = h.add(
                    &OperatorMatrix::product_operator(Axis::Z, SiteSet::single(x), n)?.scale(Complex::from(coef)),
                )?;
            }
        }
        Ok(h)
    }
}

/// Operator form of [`XxzHamiltonian`].
pub fn xxz_hamiltonian<T: Real>(coupling: T, alpha: T, lattice: &Lattice) -> Result<OperatorMatrix<T>> {
    lattice.ensure_at_most(builder_cap(), "quantum model", "use the classical paths")?;
    XxzHamiltonian::new(coupling, alpha, lattice)?.to_operator()
}

/// The generic model behind [`xxz_hamiltonian`]: an XX table with
/// `φ = 2J` per bond (the ordered-pair sum) and `U₀ = Σ_x u_x s_x`.
pub fn xxz_model<T: Real>(coupling: T, lattice: &Lattice) -> Result<(CouplingTable<T>, ClassicalPotential<T>)> {
    let table = CouplingTable::xx(&lattice.nearest_neighbor_pairs(), coupling + coupling)?;
    Ok((table, ClassicalPotential::linear_height(lattice)))
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn one_site_flip(phi: f64) -> CouplingTable<f64> {
        CouplingTable::new(vec![CouplingEntry::new(SiteSet::single(0), SiteSet::EMPTY, phi)], 0.0).unwrap()
    }

    #[test]
    fn table_validation() {
        let a = SiteSet::from_sites([0, 1]);
        let err = CouplingTable::new(vec![CouplingEntry::new(a, SiteSet::single(1), 1.0)], 0.0).unwrap_err();
        assert!(matches!(err, Error::OverlappingSets { index: 0, .. }));
        let dup = vec![
            CouplingEntry::new(a, SiteSet::EMPTY, 1.0),
            CouplingEntry::new(a, SiteSet::EMPTY, 2.0),
        ];
        assert!(CouplingTable::new(dup, 0.0).is_err());
        assert!(CouplingTable::new(vec![CouplingEntry::new(SiteSet::EMPTY, SiteSet::EMPTY, 1.0)], 0.0).is_err());
    }

    #[test]
    fn h0_examples() {
        let lat1 = Lattice::hypercube(1, 1).unwrap();
        let h0 = build_h0(&one_site_flip(1.0), &lat1).unwrap();
        assert_eq!(
            h0,
            OperatorMatrix::product_operator(Axis::X, SiteSet::single(0), 1).unwrap()
        );

        let lat = Lattice::hypercube(1, 3).unwrap();
        let table = CouplingTable::xx(&[(0, 2)], 0.7).unwrap();
        let h0 = build_h0(&table, &lat).unwrap();
        let pp = |axis| {
            OperatorMatrix::<f64>::product_operator(axis, SiteSet::single(0), 3)
                .unwrap()
                .matmul(&OperatorMatrix::product_operator(axis, SiteSet::single(2), 3).unwrap())
                .unwrap()
        };
        let expect = pp(Axis::X).add(&pp(Axis::Y)).unwrap().scale(C::from(0.7));
        assert!(h0.max_abs_diff(&expect).unwrap() < 1e-15);

        let empty = build_h0(&CouplingTable::<f64>::default(), &lat).unwrap();
        assert_eq!(empty.nnz(), 0);
    }

    #[test]
    fn ja_examples() {
        let phi = -0.8;
        let js = build_ja(&CouplingTable::xx(&[(1, 3)], phi).unwrap());
        assert_eq!(js.len(), 1);
        assert_eq!(js[0].support(), SiteSet::from_sites([1, 3]));
        for (s, v) in js[0].restricted_values() {
            let expect = phi * (1.0 - (s.spin(1) * s.spin(3)) as f64);
            assert_eq!(v, C::from(expect));
        }

        let js = build_ja(&one_site_flip(2.5));
        assert_eq!(js[0].terms(), &[(SiteSet::EMPTY, C::from(2.5))]);

        let twist = CouplingTable::new(vec![CouplingEntry::new(SiteSet::EMPTY, SiteSet::single(2), 1.5)], 0.0).unwrap();
        let js = build_ja(&twist);
        assert!(!js[0].is_real());
        for m in [0u64, 4] {
            let s = SpinConfiguration::from_mask(m);
            assert_eq!(js[0].value(s), C::new(0.0, -1.5 * s.spin(2) as f64));
        }
    }

    #[test]
    fn v_examples() {
        let lat = Lattice::hypercube(1, 3).unwrap();
        let table = CouplingTable::xx(&[(0, 1), (1, 2)], 0.6).unwrap();
        let u = ClassicalPotential::linear(&[0.2, -0.4, 1.1]);
        let v = build_v(&table, &u, 0.0, &lat).unwrap();
        for m in 0..8 {
            let s = SpinConfiguration::from_mask(m);
            let expect = -0.6 * (2.0 - (s.spin(0) * s.spin(1)) as f64 - (s.spin(1) * s.spin(2)) as f64);
            assert!((v.get(m as usize, m as usize).re - expect).abs() < 1e-15);
        }
        let zero = CouplingTable::xx(&[(0, 1)], 0.0).unwrap();
        assert_eq!(build_v(&zero, &u, 1.0, &lat).unwrap().nnz(), 0);
    }

    #[test]
    fn single_site_model() {
        let lat = Lattice::hypercube(1, 1).unwrap();
        for alpha in [0.0, 0.7, 3.0] {
            let m = ModelInstance::new(lat.clone(), one_site_flip(-1.0), ClassicalPotential::zero(), alpha).unwrap();
            let x = OperatorMatrix::product_operator(Axis::X, SiteSet::single(0), 1).unwrap();
            let expect = x
                .sub(&OperatorMatrix::identity(1).unwrap())
                .unwrap()
                .scale(C::from(-1.0));
            assert_eq!(m.hamiltonian(), &expect);
        }
        let empty = ModelInstance::new(lat, CouplingTable::default(), ClassicalPotential::zero(), 1.0).unwrap();
        assert_eq!(empty.hamiltonian().nnz(), 0);
    }

    #[test]
    fn constant_shift_cancels() {
        let lat = Lattice::hypercube(1, 2).unwrap();
        let mut entries = CouplingTable::xx(&[(0, 1)], -1.0).unwrap().entries().to_vec();
        entries.push(CouplingEntry::new(SiteSet::single(1), SiteSet::EMPTY, -0.5));
        let table = CouplingTable::new(entries, 3.25).unwrap();
        let m = ModelInstance::new(lat, table, ClassicalPotential::linear(&[0.3, 0.9]), 1.2).unwrap();
        assert!(m.assembly_deviation() <= 1e-12 * m.hamiltonian().max_abs());
        assert_eq!(m.diagonal_couplings()[0].support(), SiteSet::EMPTY);
    }

    #[test]
    fn gibbs_state_examples() {
        let lat = Lattice::hypercube(1, 1).unwrap();
        let (u, alpha) = (0.8f64, 1.5f64);
        let psi = build_gibbs_state(&ClassicalPotential::linear(&[u]), alpha, &lat).unwrap();
        assert_eq!(psi.amplitudes()[0].re, (-alpha * u / 2.0).exp());
        assert_eq!(psi.amplitudes()[1].re, (alpha * u / 2.0).exp());
        let lat = Lattice::hypercube(2, 2).unwrap();
        let ising = ClassicalPotential::ising_nearest_neighbor(&lat, 1.0);
        let flat = build_gibbs_state(&ising, 0.0, &lat).unwrap();
        assert!(flat.amplitudes().iter().all(|a| *a == C::one()));
        assert!(build_gibbs_state(&ising, 1.0, &Lattice::hypercube(1, 21).unwrap()).is_err());
        let chain = Lattice::hypercube(1, 15).unwrap();
        let zero = ClassicalPotential::<f64>::zero();
        assert!(matches!(
            ModelInstance::new(chain.clone(), CouplingTable::default(), zero.clone(), 1.0),
            Err(Error::SizeLimit { cap: 14, .. })
        ));
        assert!(ModelInstance::with_cap(chain, CouplingTable::default(), zero, 1.0, 15).is_ok());
    }

    #[test]
    fn hplus_examples() {
        let lat = Lattice::hypercube(1, 3).unwrap();
        let table = CouplingTable::xx(&[(0, 1), (1, 2)], -0.9).unwrap();
        let u = ClassicalPotential::linear(&[0.4, -0.3, 0.8]);
        let m = ModelInstance::new(lat.clone(), table.clone(), u.clone(), 0.0).unwrap();
        assert!(m.hplus().unwrap().max_abs_diff(m.hamiltonian()).unwrap() < 1e-15);

        let m = ModelInstance::new(lat, table, u, 1.3).unwrap();
        let hp = m.hplus().unwrap();
        let ones = StateVector::from_real(vec![1.0; 8]).unwrap();
        assert!(hp.apply(&ones).unwrap().norm() < 1e-12 * m.hamiltonian().max_abs());

        // one site, single flip term J = φ: generator [[-φe^{αu}, φe^{αu}], [φe^{-αu}, -φe^{-αu}]]
        let lat = Lattice::hypercube(1, 1).unwrap();
        let (phi, uu, alpha) = (-1.5, 0.6, 0.9);
        let m = ModelInstance::new(lat, one_site_flip(phi), ClassicalPotential::linear(&[uu]), alpha).unwrap();
        let hp = m.hplus().unwrap();
        let (up, dn) = ((alpha * uu).exp(), (-alpha * uu).exp());
        let expect = [[-phi * up, phi * up], [phi * dn, -phi * dn]];
        for (r, row) in expect.iter().enumerate() {
            for (c, &e) in row.iter().enumerate() {
                assert!((hp.get(r, c).re - e).abs() < 1e-14, "({r},{c})");
            }
        }
    }

    #[test]
    fn xx_detection() {
        let table = CouplingTable::xx(&[(0, 1), (2, 3)], 1.0).unwrap();
        assert_eq!(table.xx_pairs().unwrap(), vec![(0, 1, 1.0), (2, 3, 1.0)]);
        let lopsided = CouplingTable::new(
            vec![CouplingEntry::new(SiteSet::from_sites([0, 1]), SiteSet::EMPTY, 1.0)],
            0.0,
        )
        .unwrap();
        assert!(lopsided.xx_pairs().is_none());
        let lat = Lattice::hypercube(1, 2).unwrap();
        let err = xxz_closed_form(&lopsided, &[0.0, 1.0], 1.0, &lat).unwrap_err();
        assert!(matches!(err, Error::UnsupportedModel(_)));
    }

    #[test]
    fn closed_form_constant_field() {
        let lat = Lattice::hypercube(1, 3).unwrap();
        let table = CouplingTable::xx(&[(0, 1), (1, 2)], 0.5).unwrap();
        let v = xxz_closed_form(&table, &[0.7; 3], 2.0, &lat).unwrap();
        for m in 0..8 {
            let s = SpinConfiguration::from_mask(m);
            let expect = 0.5 * ((s.spin(0) * s.spin(1)) as f64 - 1.0) + 0.5 * ((s.spin(1) * s.spin(2)) as f64 - 1.0);
            assert!((v.get(m as usize, m as usize).re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn xxz_structure() {
        let alpha = 0.8;
        let q = f64::exp(alpha);
        let lat = Lattice::hypercube(1, 5).unwrap();
        let xxz = XxzHamiltonian::new(1.5, alpha, &lat).unwrap();
        assert!((xxz.anisotropy() - 2.0 * 1.5 * (q + 1.0 / q) / 2.0).abs() < 1e-14);
        for x in 1..4 {
            assert_eq!(xxz.linear_coefficient(x), 0.0);
        }
        assert!(xxz.linear_coefficient(0) > 0.0 && xxz.linear_coefficient(4) < 0.0);

        let flat = XxzHamiltonian::new(1.5, 0.0, &lat).unwrap();
        assert!((0..5).all(|x| flat.linear_coefficient(x) == 0.0));
    }

    #[test]
    fn xxz_matches_generic_builder() {
        for (d, l) in [(1, 4), (2, 2)] {
            let lat = Lattice::hypercube(d, l).unwrap();
            let (table, u) = xxz_model(-0.7, &lat).unwrap();
            let m = ModelInstance::new(lat.clone(), table, u, 1.1).unwrap();
            let h = xxz_hamiltonian(-0.7, 1.1, &lat).unwrap();
            let scale = m.hamiltonian().max_abs();
            assert!(h.max_abs_diff(m.hamiltonian()).unwrap() <= 1e-12 * scale);
        }
    }
}
