mod common;

use common::{apply_h, gibbs_vector, norm};
use gibbs_ground::model::build_hplus_direct;
use gibbs_ground::verify::{eigen_residual, hplus_on_constants, s1_bound_check};
use gibbs_ground::{ClassicalPotential, CouplingEntry, CouplingTable, Lattice, Model, SiteSet};
use proptest::prelude::*;

/// Entries on a chain of `l` sites with supports of size ≤ 3.
fn table(l: usize, even_twist: bool) -> impl Strategy<Value = CouplingTable<f64>> {
    let entry = (0..l, 1usize..=3, 0u8..4, -1.0..1.0f64).prop_map(move |(start, len, twist_bits, phi)| {
        let sites: Vec<usize> = (start..(start + len).min(l)).collect();
        let mut twist: Vec<usize> = sites
            .iter()
            .copied()
            .filter(|x| twist_bits >> (x - start) & 1 == 1)
            .collect();
        if even_twist && twist.len() % 2 == 1 {
            twist.pop();
        }
        let twist = SiteSet::from_sites(twist);
        CouplingEntry::new(SiteSet::from_sites(sites).difference(twist), twist, phi)
    });
    (prop::collection::vec(entry, 1..6), -0.5..0.5f64).prop_map(|(mut entries, constant)| {
        entries.retain(|e| !e.flip.union(e.twist).is_empty());
        let mut seen = Vec::new();
        entries.retain(|e| {
            let key = (e.flip, e.twist);
            let fresh = !seen.contains(&key);
            seen.push(key);
            fresh
        });
        CouplingTable::new(entries, constant).unwrap()
    })
}

fn potential(l: usize) -> impl Strategy<Value = ClassicalPotential<f64>> {
    prop::collection::vec((0..l, 0..l, -1.5..1.5f64), 0..8).prop_map(|terms| {
        let mut out: Vec<(SiteSet, f64)> = Vec::new();
        for (x, y, c) in terms {
            let b = SiteSet::from_sites([x, y]);
            if out.iter().all(|(t, _)| *t != b) {
                out.push((b, c));
            }
        }
        ClassicalPotential::new(out).unwrap()
    })
}

fn model(even_twist: bool) -> impl Strategy<Value = Model> {
    (2usize..=7)
        .prop_flat_map(move |l| (Just(l), table(l, even_twist), potential(l), 0.0..3.0f64))
        .prop_map(|(l, t, u, alpha)| Model::new(Lattice::hypercube(1, l).unwrap(), t, u, alpha).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gibbs_state_is_a_zero_eigenvector(m in model(true)) {
        let h_max = m.hamiltonian().max_abs();
        prop_assert!(eigen_residual(m.hamiltonian(), m.gibbs_state()).unwrap() <= 1e-10 * h_max);
        let psi = gibbs_vector(m.potential(), m.alpha(), m.lattice().len());
        let oracle = apply_h(m.couplings(), m.potential(), m.alpha(), &psi);
        prop_assert!(norm(&oracle) / norm(&psi) <= 1e-10 * h_max);
    }

    #[test]
    fn even_twist_gives_hermitian_h(m in model(true)) {
        prop_assert!(m.hamiltonian().is_hermitian());
        prop_assert!(m.couplings().odd_twist_entries().is_empty());
    }

    #[test]
    fn eigenvector_survives_odd_twist(m in model(false)) {
        // the zero eigenvalue holds without the evenness condition
        let h_max = m.hamiltonian().max_abs().max(1.0);
        prop_assert!(eigen_residual(m.hamiltonian(), m.gibbs_state()).unwrap() <= 1e-10 * h_max);
    }

    #[test]
    fn hplus_annihilates_constants(m in model(false)) {
        let hp = build_hplus_direct(m.diagonal_couplings(), m.potential(), m.alpha(), m.lattice()).unwrap();
        prop_assert!(hplus_on_constants(&hp).unwrap() <= 1e-12 * m.hamiltonian().max_abs().max(1.0));
    }

    #[test]
    fn s1_expectation_above_bound(u in potential(6), alpha in 0.0..4.0f64, x in 0usize..6, y in 0usize..6) {
        let m = Model::new(Lattice::hypercube(1, 6).unwrap(), CouplingTable::default(), u, alpha).unwrap();
        let b = s1_bound_check(&m, SiteSet::from_sites([x, y])).unwrap();
        prop_assert!(b.agreement);
        prop_assert!(b.holds);
        prop_assert!(b.quantum <= 1.0 + 1e-12);
    }
}
