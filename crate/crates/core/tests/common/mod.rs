//! Test-only oracles, written from the operator definitions and independent
//! of the library's assembly code.

#![allow(dead_code)]

use gibbs_ground::{ClassicalPotential, Complex, CouplingEntry, CouplingTable, Lattice, SiteSet, SpinConfiguration};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex<f64>;

/// `op` (a 2×2 matrix in the basis |↑⟩, |↓⟩) applied to one site of `v`.
pub fn apply_site(v: &[C], site: usize, op: [[C; 2]; 2]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); v.len()];
    let bit = 1usize << site;
    for (i, &a) in v.iter().enumerate() {
        let col = (i & bit != 0) as usize;
        for (row, entries) in op.iter().enumerate() {
            let j = if row == col { i } else { i ^ bit };
            out[j] += entries[col] * a;
        }
    }
    out
}

pub fn sigma_x() -> [[C; 2]; 2] {
    let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
    [[z, o], [o, z]]
}

pub fn sigma_y() -> [[C; 2]; 2] {
    let (i, z) = (C::new(0.0, 1.0), C::new(0.0, 0.0));
    [[z, -i], [i, z]]
}

/// `Σ φ S¹_[A] S²_[A'] v + constant·v`, one Pauli factor at a time.
pub fn apply_h0(table: &CouplingTable<f64>, v: &[C]) -> Vec<C> {
    let mut out: Vec<C> = v.iter().map(|a| a * table.constant()).collect();
    for e in table.entries() {
        let mut w = v.to_vec();
        for y in e.twist.sites() {
            w = apply_site(&w, y, sigma_y());
        }
        for x in e.flip.sites() {
            w = apply_site(&w, x, sigma_x());
        }
        for (o, a) in out.iter_mut().zip(w) {
            *o += a * e.phi;
        }
    }
    out
}

/// `V(t) = −Σ_entries φ (−i)^{|A'|} t_[A'] e^{−(α/2)(U₀(t^B) − U₀(t))}`, `B = A ∪ A'`,
/// straight from the table; the constant entry contributes `−φ_∅`.
pub fn v_diagonal(table: &CouplingTable<f64>, u: &ClassicalPotential<f64>, alpha: f64, t: SpinConfiguration) -> C {
    let mut v = C::new(-table.constant(), 0.0);
    for e in table.entries() {
        let b = e.flip.union(e.twist);
        let phase = match e.twist.len() % 4 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, -1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, 1.0),
        };
        let w = u.eval(t.flip(b)) - u.eval(t);
        v -= phase * e.phi * f64::from(t.product(e.twist)) * (-alpha / 2.0 * w).exp();
    }
    v
}

/// `Ψ(s) = e^{−(α/2)U₀(s)}`.
pub fn gibbs_vector(u: &ClassicalPotential<f64>, alpha: f64, sites: usize) -> Vec<C> {
    (0..1u64 << sites)
        .map(|m| C::new((-alpha / 2.0 * u.eval(SpinConfiguration::from_mask(m))).exp(), 0.0))
        .collect()
}

/// `H v` with `H₀` from Pauli factors and `V` from [`v_diagonal`].
pub fn apply_h(table: &CouplingTable<f64>, u: &ClassicalPotential<f64>, alpha: f64, v: &[C]) -> Vec<C> {
    let mut out = apply_h0(table, v);
    for (i, o) in out.iter_mut().enumerate() {
        *o += v_diagonal(table, u, alpha, SpinConfiguration::from_mask(i as u64)) * v[i];
    }
    out
}

pub fn norm(v: &[C]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Open 1D Ising chain `U₀ = −K Σ s_x s_{x+1}`: `⟨s_x s_y⟩` from 2×2 transfer matrices.
pub fn transfer_matrix_correlation(l: usize, k: f64, alpha: f64, x: usize, y: usize) -> f64 {
    type M = [[f64; 2]; 2];
    let mul = |a: M, b: M| -> M {
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    };
    let pow = |m: M, n: usize| (0..n).fold([[1.0, 0.0], [0.0, 1.0]], |acc, _| mul(acc, m));
    let (p, q) = ((alpha * k).exp(), (-alpha * k).exp());
    let t = [[p, q], [q, p]];
    let sigma = [[1.0, 0.0], [0.0, -1.0]];
    let (x, y) = (x.min(y), x.max(y));
    let num = mul(mul(mul(mul(pow(t, x), sigma), pow(t, y - x)), sigma), pow(t, l - 1 - y));
    let den = pow(t, l - 1);
    let total = |m: M| m[0][0] + m[0][1] + m[1][0] + m[1][1];
    total(num) / total(den)
}

/// A random site set of the given size.
fn random_set(rng: &mut ChaCha8Rng, sites: usize, size: usize) -> SiteSet {
    let mut all: Vec<usize> = (0..sites).collect();
    all.shuffle(rng);
    SiteSet::from_sites(all.into_iter().take(size))
}

pub struct RandomModel {
    pub lattice: Lattice,
    pub couplings: CouplingTable<f64>,
    pub potential: ClassicalPotential<f64>,
    pub alpha: f64,
    /// Built to satisfy the sign conditions on `J_A`.
    pub ferromagnetic: bool,
}

/// Real `φ` with even `|A'|`, multilinear `U₀` with `|B| ≤ 2`. Every other
/// draw pairs `φ_{B,∅} = −a` with `φ_{∅,B} = −b`, `0 ≤ b ≤ a`, which keeps
/// `J_B = −a + b s_[B] ≤ 0`.
pub fn random_model(seed: u64) -> RandomModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattice = if rng.random_bool(0.7) {
        Lattice::hypercube(1, rng.random_range(4..=10)).unwrap()
    } else {
        Lattice::hypercube(2, rng.random_range(2..=3)).unwrap()
    };
    let n = lattice.len();
    let ferromagnetic = seed.is_multiple_of(2);
    let mut entries: Vec<CouplingEntry<f64>> = Vec::new();
    let mut used = Vec::new();
    for _ in 0..rng.random_range(1..=6) {
        if ferromagnetic {
            let b = random_set(&mut rng, n, 2);
            if used.contains(&b) {
                continue;
            }
            used.push(b);
            let a = rng.random_range(0.1..1.0);
            let c = rng.random_range(0.0..=a);
            entries.push(CouplingEntry::new(b, SiteSet::EMPTY, -a));
            entries.push(CouplingEntry::new(SiteSet::EMPTY, b, -c));
        } else {
            let size = rng.random_range(1..=3);
            let b = random_set(&mut rng, n, size);
            let twist = if b.len() >= 2 && rng.random_bool(0.5) {
                SiteSet::from_sites(b.sites().take(2))
            } else {
                SiteSet::EMPTY
            };
            let flip = b.difference(twist);
            if entries.iter().any(|e| e.flip == flip && e.twist == twist) {
                continue;
            }
            entries.push(CouplingEntry::new(flip, twist, rng.random_range(-1.0..1.0)));
        }
    }
    let constant = if ferromagnetic {
        0.0
    } else {
        rng.random_range(-0.5..0.5)
    };
    let couplings = CouplingTable::new(entries, constant).unwrap();
    let mut terms: Vec<(SiteSet, f64)> = Vec::new();
    for _ in 0..rng.random_range(1..=2 * n) {
        let size = rng.random_range(1..=2);
        let b = random_set(&mut rng, n, size);
        if terms.iter().all(|(t, _)| *t != b) {
            terms.push((b, rng.random_range(-1.0..1.0)));
        }
    }
    let potential = ClassicalPotential::new(terms).unwrap();
    let alpha = [0.0, 0.5, 1.0, 2.0][rng.random_range(0..4)];
    RandomModel {
        lattice,
        couplings,
        potential,
        alpha,
        ferromagnetic,
    }
}
