//! Single-spin-flip Metropolis sampling of `e^{−αU₀(s)}` for lattices past
//! the enumeration cap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ClassicalPotential, GibbsParameters, SpinConfiguration};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SiteSet};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MetropolisConfig {
    /// Measured sweeps (one sweep = |Λ| proposals).
    pub sweeps: usize,
    /// Discarded sweeps before measuring.
    pub burn_in: usize,
    pub seed: u64,
    /// Number of batches for the batch-means standard error.
    pub batches: usize,
}

impl MetropolisConfig {
    pub fn new(sweeps: usize, burn_in: usize, seed: u64) -> Self {
        MetropolisConfig {
            sweeps,
            burn_in,
            seed,
            batches: 50,
        }
    }
}

/// Monte Carlo estimate with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetropolisRun {
    pub estimates: Vec<Estimate>,
    pub acceptance_rate: f64,
    pub config: MetropolisConfig,
}

/// A Markov chain over spin configurations. Proposals pick a site uniformly
/// and accept with probability `min(1, e^{−α W_{x}(s)})`.
pub struct MetropolisChain<'a, T> {
    potential: &'a ClassicalPotential<T>,
    site_terms: Vec<Vec<usize>>,
    sites: usize,
    alpha: T,
    state: SpinConfiguration,
    rng: ChaCha8Rng,
    proposed: u64,
    accepted: u64,
}

impl<'a, T: Real> MetropolisChain<'a, T> {
    /// Starts from the all-up configuration.
    pub fn new(lattice: &Lattice, potential: &'a ClassicalPotential<T>, alpha: T, seed: u64) -> Result<Self> {
        GibbsParameters::new(alpha)?;
        potential.check_within(lattice)?;
        Ok(MetropolisChain {
            potential,
            site_terms: potential.site_index(lattice.len()),
            sites: lattice.len(),
            alpha,
            state: SpinConfiguration::ALL_UP,
            rng: ChaCha8Rng::seed_from_u64(seed),
            proposed: 0,
            accepted: 0,
        })
    }

    pub fn state(&self) -> SpinConfiguration {
        self.state
    }

    /// `W_{x}(s)` from the monomials touching `x` only.
    fn site_flip_energy(&self, x: usize) -> T {
        let two = T::lit(2.0);
        let terms = self.potential.terms();
        self.site_terms[x].iter().fold(T::zero(), |acc, &k| {
            let (b, c) = terms[k];
            if self.state.product(b) < 0 {
                acc + two * c
            } else {
                acc - two * c
            }
        })
    }

    pub fn step(&mut self) {
        let x = self.rng.random_range(0..self.sites);
        let w = self.site_flip_energy(x);
        self.proposed += 1;
        let accept = w <= T::zero() || {
            let u: f64 = self.rng.random();
            u < (-self.alpha * w).exp().as_f64()
        };
        if accept {
            self.state = self.state.flip(SiteSet::single(x));
            self.accepted += 1;
        }
    }

    pub fn sweep(&mut self) {
        for _ in 0..self.sites {
            self.step();
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

/// Runs one chain and measures every observable after each sweep.
pub fn metropolis_run<T: Real>(
    observables: &[&dyn Fn(SpinConfiguration) -> T],
    potential: &ClassicalPotential<T>,
    alpha: T,
    lattice: &Lattice,
    config: MetropolisConfig,
) -> Result<MetropolisRun> {
    if config.sweeps == 0 || config.batches == 0 || config.batches > config.sweeps {
        return Err(Error::InvalidArgument(format!(
            "need sweeps > 0 and 0 < batches <= sweeps (sweeps={}, batches={})",
            config.sweeps, config.batches
        )));
    }
    let mut chain = MetropolisChain::new(lattice, potential, alpha, config.seed)?;
    for _ in 0..config.burn_in {
        chain.sweep();
    }
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(config.sweeps); observables.len()];
    for _ in 0..config.sweeps {
        chain.sweep();
        let s = chain.state();
        for (values, f) in series.iter_mut().zip(observables) {
            values.push(f(s).as_f64());
        }
    }
    Ok(MetropolisRun {
        estimates: series.iter().map(|v| batch_means(v, config.batches)).collect(),
        acceptance_rate: chain.acceptance_rate(),
        config,
    })
}

/// Single-observable convenience wrapper around [`metropolis_run`].
pub fn metropolis_estimate<T, F>(
    f: F,
    potential: &ClassicalPotential<T>,
    alpha: T,
    lattice: &Lattice,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Estimate>
where
    T: Real,
    F: Fn(SpinConfiguration) -> T,
{
    let run = metropolis_run(
        &[&f],
        potential,
        alpha,
        lattice,
        MetropolisConfig::new(sweeps, burn_in, seed),
    )?;
    Ok(run.estimates[0])
}

/// Mean of the full series; the error comes from the spread of `batches`
/// equal-length batch means (a trailing remainder is left out of the error).
fn batch_means(values: &[f64], batches: usize) -> Estimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let len = values.len() / batches;
    let means: Vec<f64> = values
        .chunks_exact(len)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / len as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = if batches > 1 {
        means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64
    } else {
        0.0
    };
    Estimate {
        mean,
        std_error: (var / batches as f64).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_expectation;

    #[test]
    fn uniform_measure_at_zero_alpha() {
        let lat = Lattice::hypercube(1, 8).unwrap();
        let ising = ClassicalPotential::ising_nearest_neighbor(&lat, 1.0);
        let e = metropolis_estimate(|s| s.spin(3) as f64, &ising, 0.0, &lat, 20_000, 100, 7).unwrap();
        assert!(e.mean.abs() < 3.0 * e.std_error, "{e:?}");
        // every proposal is accepted, so each sweep moves the magnetization
        let run = metropolis_run(
            &[&|s: SpinConfiguration| s.spin(0) as f64],
            &ising,
            0.0,
            &lat,
            MetropolisConfig::new(100, 0, 1),
        )
        .unwrap();
        assert_eq!(run.acceptance_rate, 1.0);
    }

    #[test]
    fn constant_observable_is_exact() {
        let lat = Lattice::hypercube(2, 3).unwrap();
        let ising = ClassicalPotential::ising_nearest_neighbor(&lat, 1.0);
        let e = metropolis_estimate(|_| 1.0, &ising, 0.8, &lat, 1000, 10, 3).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn matches_enumeration_on_short_chain() {
        let lat = Lattice::hypercube(1, 8).unwrap();
        let ising = ClassicalPotential::ising_nearest_neighbor(&lat, 1.0);
        let f = |s: SpinConfiguration| (s.spin(0) * s.spin(1)) as f64;
        let exact = classical_expectation(f, &ising, 0.5, &lat).unwrap();
        let e = metropolis_estimate(f, &ising, 0.5, &lat, 20_000, 500, 11).unwrap();
        assert!((e.mean - exact).abs() < 3.0 * e.std_error, "{e:?} vs {exact}");
    }

    #[test]
    fn seeded_runs_repeat() {
        let lat = Lattice::hypercube(2, 4).unwrap();
        let ising = ClassicalPotential::ising_nearest_neighbor(&lat, 1.0);
        let f = |s: SpinConfiguration| s.spin(5) as f64;
        let a = metropolis_estimate(f, &ising, 0.3, &lat, 500, 10, 99).unwrap();
        let b = metropolis_estimate(f, &ising, 0.3, &lat, 500, 10, 99).unwrap();
        assert_eq!(a, b);
        assert!(metropolis_estimate(f, &ising, 0.3, &lat, 0, 10, 99).is_err());
    }
}
