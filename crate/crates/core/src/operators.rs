//! Pauli algebra on the `2^|Λ|`-dimensional tensor-product space.
//!
//! Basis vector `Ψ⁰(s)` sits at index `s.mask()`; bit clear means the site
//! is in `ψ₀(+1) = (1,0)`, bit set means `ψ₀(−1) = (0,1)`. With this layout
//! `S¹_[A]` is an XOR of the index and `S³_[A]` a parity sign.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::classical::{ClassicalPotential, SpinConfiguration};
use crate::error::{Error, Result};
use crate::lattice::{SiteSet, MAX_SITES};
use crate::scalar::{Complex, Real};

/// Pauli axis: `X` is S¹, `Y` is S², `Z` is S³.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl TryFrom<u8> for Axis {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Axis::X),
            2 => Ok(Axis::Y),
            3 => Ok(Axis::Z),
            other => Err(Error::InvalidArgument(format!(
                "Pauli axis must be 1, 2 or 3, got {other}"
            ))),
        }
    }
}

/// The 2×2 Pauli matrix: S¹ = [[0,1],[1,0]], S² = [[0,−i],[i,0]], S³ = diag(1,−1).
pub fn pauli<T: Real>(axis: Axis) -> [[Complex<T>; 2]; 2] {
    let (o, z, i) = (Complex::one(), Complex::zero(), Complex::i());
    match axis {
        Axis::X => [[z, o], [o, z]],
        Axis::Y => [[z, -i], [i, z]],
        Axis::Z => [[o, z], [z, -o]],
    }
}

fn dimension_for(sites: usize) -> Result<usize> {
    if sites >= MAX_SITES.min(usize::BITS as usize - 1) {
        return Err(Error::SizeLimit {
            what: "Hilbert space",
            sites,
            cap: 40,
            hint: "quantum objects need 2^|Λ| amplitudes",
        });
    }
    Ok(1 << sites)
}

/// Complex amplitudes indexed by spin-configuration mask.
#[derive(Clone, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> fmt::Debug for StateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector")
            .field("dim", &self.dim())
            .finish_non_exhaustive()
    }
}

impl<T: Real> StateVector<T> {
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "state dimension {} is not a power of two",
                amplitudes.len()
            )));
        }
        if let Some((i, a)) = amplitudes
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::NonFinite {
                config: i as u64,
                value: a.norm().as_f64(),
            });
        }
        Ok(StateVector { amplitudes })
    }

    pub fn from_real(values: Vec<T>) -> Result<Self> {
        Self::new(values.into_iter().map(Complex::from).collect())
    }

    pub fn zeros(sites: usize) -> Result<Self> {
        Ok(StateVector {
            amplitudes: vec![Complex::zero(); dimension_for(sites)?],
        })
    }

    /// `Ψ⁰(s)`: one unit amplitude at the index of `s`.
    pub fn basis(sites: usize, s: SpinConfiguration) -> Result<Self> {
        SiteSet::from_mask(s.mask()).check_within(sites)?;
        let mut v = Self::zeros(sites)?;
        v.amplitudes[s.index()] = Complex::one();
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn sites(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, s: SpinConfiguration) -> Complex<T> {
        self.amplitudes[s.index()]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other,
            })
        }
    }

    /// Euclidean `(self, other) = Σ conj(self_s) other_s`.
    pub fn inner(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        self.check_dim(other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Multiplies every amplitude by a per-configuration factor.
    pub fn scaled_by<F: Fn(SpinConfiguration) -> T>(&self, factor: F) -> Self {
        StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(i, a)| a * factor(SpinConfiguration::from_mask(i as u64)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &StateVector<T>) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
        }
    }
}

/// `(F, G)_{U₀} = Σ_s e^{−αU₀(s)} conj(F(s)) G(s)`.
pub fn weighted_inner_product<T: Real>(
    f: &StateVector<T>,
    g: &StateVector<T>,
    potential: &ClassicalPotential<T>,
    alpha: T,
) -> Result<Complex<T>> {
    f.check_dim(g.dim())?;
    potential.support().check_within(f.sites())?;
    Ok(f.amplitudes
        .iter()
        .zip(&g.amplitudes)
        .enumerate()
        .fold(Complex::zero(), |acc, (i, (a, b))| {
            let w = (-alpha * potential.eval(SpinConfiguration::from_mask(i as u64))).exp();
            acc + a.conj() * b * w
        }))
}

/// Sparse complex square matrix in compressed-row form. Explicit zeros are
/// never stored.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex<T>>,
}

impl<T: Real> fmt::Debug for OperatorMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorMatrix")
            .field("dim", &self.dim)
            .field("nnz", &self.nnz())
            .finish()
    }
}

impl<T: Real> OperatorMatrix<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// entries that end up exactly zero are dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex<T>)>) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "operator dimension {dim} is not a power of two"
            )));
        }
        if let Some(&(r, c, _)) = triplets.iter().find(|t| t.0 >= dim || t.1 >= dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.max(c) + 1,
            });
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex<T>> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match (rows.last(), cols.last()) {
                (Some(&lr), Some(&lc)) if lr == r && lc == c => {
                    let last = values.last_mut().unwrap();
                    *last = *last + v;
                }
                _ => {
                    rows.push(r);
                    cols.push(c);
                    values.push(v);
                }
            }
        }
        let mut out_cols = Vec::with_capacity(cols.len());
        let mut out_values = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(values) {
            if !v.is_zero() {
                row_ptr[r + 1] += 1;
                out_cols.push(c);
                out_values.push(v);
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(OperatorMatrix {
            dim,
            row_ptr,
            cols: out_cols,
            values: out_values,
        })
    }

    pub fn zero(sites: usize) -> Result<Self> {
        Self::from_triplets(dimension_for(sites)?, Vec::new())
    }

    pub fn identity(sites: usize) -> Result<Self> {
        Self::from_diagonal((0..dimension_for(sites)?).map(|_| Complex::one()).collect())
    }

    pub fn from_diagonal(diagonal: Vec<Complex<T>>) -> Result<Self> {
        let dim = diagonal.len();
        Self::from_triplets(dim, diagonal.into_iter().enumerate().map(|(i, v)| (i, i, v)).collect())
    }

    /// `S^axis_[A]`: the Pauli matrix on every site of `A`, identity elsewhere.
    pub fn product_operator(axis: Axis, sites_set: SiteSet, sites: usize) -> Result<Self> {
        sites_set.check_within(sites)?;
        let dim = dimension_for(sites)?;
        let a = sites_set.mask();
        let triplets = (0..dim)
            .map(|col| {
                let s = SpinConfiguration::from_mask(col as u64);
                match axis {
                    Axis::X => (col ^ a as usize, col, Complex::one()),
                    Axis::Y => (col ^ a as usize, col, y_string_phase(s, sites_set)),
                    Axis::Z => (col, col, Complex::from(T::from_i8(s.product(sites_set)).unwrap())),
                }
            })
            .collect();
        Self::from_triplets(dim, triplets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzero entries `(col, value)` of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => Complex::zero(),
        }
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other,
            })
        }
    }

    /// Sparse matrix–vector product, parallel over rows.
    pub fn apply(&self, v: &StateVector<T>) -> Result<StateVector<T>> {
        self.check_dim(v.dim())?;
        let x = v.amplitudes();
        let amplitudes = (0..self.dim)
            .into_par_iter()
            .map(|r| self.row(r).fold(Complex::zero(), |acc, (c, a)| acc + a * x[c]))
            .collect();
        Ok(StateVector { amplitudes })
    }

    fn combine(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        self.check_dim(other.dim)?;
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        triplets.extend(self.triplets().map(|(r, c, v)| (r, c, f(v, Complex::zero()))));
        triplets.extend(other.triplets().map(|(r, c, v)| (r, c, f(Complex::zero(), v))));
        Self::from_triplets(self.dim, triplets)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        if c.is_zero() {
            return Self::from_triplets(self.dim, Vec::new()).unwrap();
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = *v * c);
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let mut triplets = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                triplets.extend(other.row(k).map(|(c, b)| (r, c, a * b)));
            }
        }
        Self::from_triplets(self.dim, triplets)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let triplets = self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.dim, triplets).unwrap()
    }

    /// `‖H‖_max`, the largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_dim(other.dim)?;
        let mut worst = T::zero();
        for r in 0..self.dim {
            let (mut a, mut b) = (self.row(r).peekable(), other.row(r).peekable());
            loop {
                let d = match (a.peek().copied(), b.peek().copied()) {
                    (None, None) => break,
                    (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                        a.next();
                        b.next();
                        va - vb
                    }
                    (Some((ca, va)), Some((cb, _))) if ca < cb => {
                        a.next();
                        va
                    }
                    (Some((_, va)), None) => {
                        a.next();
                        va
                    }
                    (_, Some((_, vb))) => {
                        b.next();
                        vb
                    }
                };
                worst = worst.max(d.norm());
            }
        }
        Ok(worst)
    }

    /// `max |H − H†|` entrywise.
    pub fn hermitian_deviation(&self) -> T {
        self.max_abs_diff(&self.adjoint()).unwrap()
    }

    /// Hermiticity judged at `1e−14·‖H‖_max`.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= T::tolerance(1e-14) * self.max_abs()
    }

    /// True when no stored entry has an imaginary part.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.is_zero())
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }
}

/// Phase of `S²_[A] Ψ⁰(s)`: each site contributes `i` if up, `−i` if down.
fn y_string_phase<T: Real>(s: SpinConfiguration, sites: SiteSet) -> Complex<T> {
    let down = (s.mask() & sites.mask()).count_ones();
    let up = sites.len() as u32 - down;
    // i^up (−i)^down = i^(up + 3 down)
    match (up + 3 * down) % 4 {
        0 => Complex::one(),
        1 => Complex::i(),
        2 => -Complex::one(),
        _ => -Complex::i(),
    }
}

/// Free function form of [`OperatorMatrix::product_operator`].
pub fn product_operator<T: Real>(axis: Axis, sites_set: SiteSet, sites: usize) -> Result<OperatorMatrix<T>> {
    OperatorMatrix::product_operator(axis, sites_set, sites)
}

/// Diagonal matrix with entry `g(s)` at the index of `s`.
pub fn diagonal_operator<T, G>(g: G, sites: usize) -> Result<OperatorMatrix<T>>
where
    T: Real,
    G: Fn(SpinConfiguration) -> T,
{
    let dim = dimension_for(sites)?;
    let diagonal = (0..dim)
        .map(|i| {
            let s = SpinConfiguration::from_mask(i as u64);
            let v = g(s);
            if v.is_finite() {
                Ok(Complex::from(v))
            } else {
                Err(Error::NonFinite {
                    config: s.mask(),
                    value: v.as_f64(),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorMatrix::from_diagonal(diagonal)
}

/// Free function form of [`OperatorMatrix::apply`].
pub fn apply<T: Real>(op: &OperatorMatrix<T>, v: &StateVector<T>) -> Result<StateVector<T>> {
    op.apply(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn mul2(a: [[C; 2]; 2], b: [[C; 2]; 2]) -> [[C; 2]; 2] {
        let mut out = [[C::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli::<f64>(Axis::X), pauli::<f64>(Axis::Y), pauli::<f64>(Axis::Z));
        let id = [[C::one(), C::zero()], [C::zero(), C::one()]];
        assert_eq!(mul2(z, z), id);
        // S² = −i S³ S¹ = i S¹ S³
        let zx = mul2(z, x);
        let xz = mul2(x, z);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(y[i][j], -C::i() * zx[i][j]);
                assert_eq!(y[i][j], C::i() * xz[i][j]);
            }
        }
        for p in [x, y, z] {
            assert_eq!(mul2(p, p), id);
            assert_eq!(p[0][1], p[1][0].conj());
            // traceless, involutive and Hermitian: eigenvalues ±1
            assert_eq!(p[0][0] + p[1][1], C::zero());
        }
        assert!(Axis::try_from(4).is_err());
        assert_eq!(Axis::try_from(2).unwrap(), Axis::Y);
    }

    #[test]
    fn basis_vectors() {
        let up = StateVector::<f64>::basis(1, SpinConfiguration::ALL_UP).unwrap();
        assert_eq!(up.amplitudes(), &[C::one(), C::zero()]);
        for s in 0..4 {
            for t in 0..4 {
                let a = StateVector::<f64>::basis(2, SpinConfiguration::from_mask(s)).unwrap();
                let b = StateVector::<f64>::basis(2, SpinConfiguration::from_mask(t)).unwrap();
                let expect = if s == t { 1.0 } else { 0.0 };
                assert_eq!(a.inner(&b).unwrap(), C::from(expect));
            }
        }
        assert!(StateVector::<f64>::basis(2, SpinConfiguration::from_mask(4)).is_err());
    }

    #[test]
    fn product_operator_actions() {
        let n = 4;
        let a = SiteSet::from_sites([0, 2]);
        let x = OperatorMatrix::<f64>::product_operator(Axis::X, a, n).unwrap();
        let z = OperatorMatrix::<f64>::product_operator(Axis::Z, SiteSet::single(1), n).unwrap();
        for m in 0..16 {
            let s = SpinConfiguration::from_mask(m);
            let v = StateVector::basis(n, s).unwrap();
            assert_eq!(x.apply(&v).unwrap(), StateVector::basis(n, s.flip(a)).unwrap());
            assert_eq!(z.apply(&v).unwrap(), v.scale(C::from(s.spin(1) as f64)));
        }
        let id = OperatorMatrix::<f64>::identity(n).unwrap();
        assert_eq!(
            OperatorMatrix::product_operator(Axis::Y, SiteSet::EMPTY, n).unwrap(),
            id
        );
        assert_eq!(x.matmul(&x).unwrap(), id);
    }

    #[test]
    fn y_on_basis_vector() {
        // S² (1,0) = (0, i)
        let y = OperatorMatrix::<f64>::product_operator(Axis::Y, SiteSet::single(0), 1).unwrap();
        let up = StateVector::basis(1, SpinConfiguration::ALL_UP).unwrap();
        assert_eq!(y.apply(&up).unwrap().amplitudes(), &[C::zero(), C::i()]);
    }

    #[test]
    fn y_string_identity() {
        // S²_[A] = (−i)^|A| S³_[A] S¹_[A]
        let n = 5;
        for mask in 0u64..32 {
            let a = SiteSet::from_mask(mask);
            if a.len() > 4 {
                continue;
            }
            let y = OperatorMatrix::<f64>::product_operator(Axis::Y, a, n).unwrap();
            let zx = OperatorMatrix::product_operator(Axis::Z, a, n)
                .unwrap()
                .matmul(&OperatorMatrix::product_operator(Axis::X, a, n).unwrap())
                .unwrap();
            let phase = (0..a.len()).fold(C::one(), |p, _| p * -C::i());
            assert_eq!(y.max_abs_diff(&zx.scale(phase)).unwrap(), 0.0);
        }
    }

    #[test]
    fn diagonal_operators() {
        let id = OperatorMatrix::<f64>::identity(3).unwrap();
        assert_eq!(diagonal_operator(|_| 1.0, 3).unwrap(), id);
        let u = ClassicalPotential::<f64>::linear(&[0.3, -1.0, 2.0]);
        assert_eq!(diagonal_operator(|s| (-0.0 * u.eval(s) / 2.0).exp(), 3).unwrap(), id);
        let err = diagonal_operator(|s| if s.mask() == 5 { f64::NAN } else { 1.0 }, 3).unwrap_err();
        assert!(matches!(err, Error::NonFinite { config: 5, .. }));

        // e^{−(α/2)U₀(S³)} S¹_[A] = S¹_[A] e^{−(α/2)U₀(S^{3A})}
        let alpha = 0.9f64;
        let a = SiteSet::from_sites([0, 2]);
        let x = OperatorMatrix::product_operator(Axis::X, a, 3).unwrap();
        let left = diagonal_operator(|s| (-alpha / 2.0 * u.eval(s)).exp(), 3)
            .unwrap()
            .matmul(&x)
            .unwrap();
        let right = x
            .matmul(&diagonal_operator(|s| (-alpha / 2.0 * u.eval(s.flip(a))).exp(), 3).unwrap())
            .unwrap();
        assert!(left.max_abs_diff(&right).unwrap() < 1e-15);
    }

    #[test]
    fn weighted_product() {
        let u = ClassicalPotential::linear(&[0.5, -1.5]);
        let f = StateVector::from_real(vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let g = StateVector::from_real(vec![0.25, 1.0, -1.0, 2.0]).unwrap();
        assert_eq!(weighted_inner_product(&f, &g, &u, 0.0).unwrap(), f.inner(&g).unwrap());
        assert!(weighted_inner_product(&f, &f, &u, 1.7).unwrap().re > 0.0);
        let short = StateVector::from_real(vec![1.0, 1.0]).unwrap();
        assert!(weighted_inner_product(&f, &short, &u, 1.0).is_err());
        assert!(OperatorMatrix::<f64>::identity(1).unwrap().apply(&f).is_err());
    }

    #[test]
    fn sparse_bookkeeping() {
        let m = OperatorMatrix::<f64>::from_triplets(
            4,
            vec![(0, 1, C::one()), (0, 1, -C::one()), (2, 3, C::i()), (2, 3, C::i())],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(2, 3), C::new(0.0, 2.0));
        assert_eq!(m.adjoint().get(3, 2), C::new(0.0, -2.0));
        assert!(!m.is_hermitian());
        assert_eq!(m.hermitian_deviation(), 2.0);
        assert!(OperatorMatrix::<f64>::from_triplets(4, vec![(4, 0, C::one())]).is_err());
    }

    proptest! {
        #[test]
        fn flips_compose_and_sites_commute(a in 0u64..64, b in 0u64..64, x in 0usize..6, y in 0usize..6, k in 1u8..4, l in 1u8..4) {
            let n = 6;
            let sa = OperatorMatrix::<f64>::product_operator(Axis::X, SiteSet::from_mask(a), n).unwrap();
            let sb = OperatorMatrix::<f64>::product_operator(Axis::X, SiteSet::from_mask(b), n).unwrap();
            let sab = OperatorMatrix::<f64>::product_operator(Axis::X, SiteSet::from_mask(a ^ b), n).unwrap();
            prop_assert_eq!(sa.matmul(&sb).unwrap(), sab);

            prop_assume!(x != y);
            let p = OperatorMatrix::<f64>::product_operator(Axis::try_from(k).unwrap(), SiteSet::single(x), n).unwrap();
            let q = OperatorMatrix::<f64>::product_operator(Axis::try_from(l).unwrap(), SiteSet::single(y), n).unwrap();
            prop_assert_eq!(p.matmul(&q).unwrap(), q.matmul(&p).unwrap());
        }

        #[test]
        fn basis_vectors_diagonalize_diagonals(s in 0u64..32, c in prop::collection::vec(-2.0f64..2.0, 5)) {
            let u = ClassicalPotential::linear(&c);
            let d = diagonal_operator(|t| u.eval(t), 5).unwrap();
            let s = SpinConfiguration::from_mask(s);
            let v = StateVector::basis(5, s).unwrap();
            prop_assert_eq!(d.apply(&v).unwrap(), v.scale(C::from(u.eval(s))));
        }
    }
}
