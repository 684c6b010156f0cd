//! JSON run configuration for the command-line front end.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "lattice": { "dimension": 1, "side_length": 6 },
//!   "couplings": { "preset": "xx", "j": -1.0 },
//!   "potential": { "terms": [ { "sites": [0], "c": 0.3 } ] },
//!   "alpha": 1.0,
//!   "pairs": [[0, 3]]
//! }
//! ```
//!
//! Presets are expanded to explicit tables at parse time. `couplings` may be
//! `{"entries": [{"a": [..], "a_prime": [..], "phi": x}], "constant": c}` or
//! a preset `"xx"` / `"xxz"` with coupling `j`; `potential` may be
//! `{"terms": [{"sites": [..], "c": x}]}` or a preset `"ising-nn"` (with `k`)
//! or `"linear-height"`. The `"xxz"` preset fixes the potential to the linear
//! height and doubles `j` per bond.

use serde::Deserialize;

use crate::classical::metropolis::MetropolisConfig;
use crate::classical::ClassicalPotential;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SiteCaps, SiteSet, MAX_QUANTUM_SITES, MAX_SITES};
use crate::model::{xxz_model, CouplingEntry, CouplingTable};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: u32,
    lattice: RawLattice,
    couplings: Option<RawCouplings>,
    potential: Option<RawPotential>,
    alpha: Option<f64>,
    alphas: Option<Vec<f64>>,
    #[serde(default)]
    pairs: Vec<[usize; 2]>,
    sweeps: Option<usize>,
    burn_in: Option<usize>,
    batches: Option<usize>,
    seed: Option<u64>,
    trials: Option<usize>,
    caps: Option<RawCaps>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    dimension: usize,
    side_length: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCouplings {
    preset: Option<String>,
    j: Option<f64>,
    entries: Option<Vec<RawEntry>>,
    constant: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    a: Vec<usize>,
    #[serde(default)]
    a_prime: Vec<usize>,
    phi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    preset: Option<String>,
    k: Option<f64>,
    terms: Option<Vec<RawTerm>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    sites: Vec<usize>,
    c: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCaps {
    quantum: Option<usize>,
    dense: Option<usize>,
    enumeration: Option<usize>,
}

/// A validated configuration with presets expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lattice: Lattice,
    pub couplings: CouplingTable<f64>,
    pub potential: ClassicalPotential<f64>,
    /// Nonempty; a single `alpha` becomes a one-point grid.
    pub alphas: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub sweeps: usize,
    pub burn_in: usize,
    pub batches: usize,
    pub seed: u64,
    pub trials: usize,
    pub caps: SiteCaps,
}

impl RunConfig {
    /// The first grid point, used by single-α commands.
    pub fn alpha(&self) -> f64 {
        self.alphas[0]
    }

    pub fn metropolis(&self) -> MetropolisConfig {
        MetropolisConfig {
            batches: self.batches,
            ..MetropolisConfig::new(self.sweeps, self.burn_in, self.seed)
        }
    }
}

fn field(field: &str, message: impl Into<String>) -> Error {
    Error::ConfigField {
        field: field.to_owned(),
        message: message.into(),
    }
}

fn site_set(name: &str, sites: &[usize], lattice: &Lattice) -> Result<SiteSet> {
    if let Some(&x) = sites.iter().find(|&&x| x >= lattice.len()) {
        return Err(field(
            name,
            format!("site {x} outside a lattice of {} sites", lattice.len()),
        ));
    }
    let set = SiteSet::from_sites(sites.iter().copied());
    if set.len() != sites.len() {
        return Err(field(name, "repeated site"));
    }
    Ok(set)
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(field(name, "must be finite"))
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::ConfigSyntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.schema != SCHEMA_VERSION {
        return Err(field(
            "schema",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", raw.schema),
        ));
    }

    let RawLattice { dimension, side_length } = raw.lattice;
    if dimension == 0 || side_length == 0 {
        return Err(field("lattice", "dimension and side_length must be at least 1"));
    }
    let lattice =
        Lattice::hypercube_capped(dimension, side_length, MAX_SITES).map_err(|e| field("lattice", e.to_string()))?;

    let mut xxz = false;
    let couplings = match raw.couplings {
        None => CouplingTable::default(),
        Some(c) => match (c.preset.as_deref(), c.entries) {
            (Some(_), Some(_)) => return Err(field("couplings", "give either a preset or entries, not both")),
            (None, None) => return Err(field("couplings", "needs a preset or entries")),
            (Some(preset), None) => {
                if c.constant.is_some() {
                    return Err(field("couplings.constant", "not allowed with a preset"));
                }
                let j = finite(
                    "couplings.j",
                    c.j.ok_or_else(|| field("couplings.j", "required by the preset"))?,
                )?;
                match preset {
                    "xx" => CouplingTable::xx(&lattice.nearest_neighbor_pairs(), j)?,
                    "xxz" => {
                        xxz = true;
                        xxz_model(j, &lattice)?.0
                    }
                    other => return Err(field("couplings.preset", format!("unknown preset '{other}' (xx, xxz)"))),
                }
            }
            (None, Some(entries)) => {
                if c.j.is_some() {
                    return Err(field("couplings.j", "only used with a preset"));
                }
                let mut table = Vec::with_capacity(entries.len());
                for (i, e) in entries.iter().enumerate() {
                    let flip = site_set(&format!("couplings.entries[{i}].a"), &e.a, &lattice)?;
                    let twist = site_set(&format!("couplings.entries[{i}].a_prime"), &e.a_prime, &lattice)?;
                    let phi = finite(&format!("couplings.entries[{i}].phi"), e.phi)?;
                    table.push(CouplingEntry::new(flip, twist, phi));
                }
                let constant = finite("couplings.constant", c.constant.unwrap_or(0.0))?;
                CouplingTable::new(table, constant).map_err(|e| field("couplings.entries", e.to_string()))?
            }
        },
    };

    let potential = match raw.potential {
        None if xxz => ClassicalPotential::linear_height(&lattice),
        None => ClassicalPotential::zero(),
        Some(_) if xxz => {
            return Err(field(
                "potential",
                "the xxz preset fixes the potential to the linear height",
            ))
        }
        Some(p) => match (p.preset.as_deref(), p.terms) {
            (Some(_), Some(_)) => return Err(field("potential", "give either a preset or terms, not both")),
            (None, None) => return Err(field("potential", "needs a preset or terms")),
            (Some("ising-nn"), None) => {
                let k = finite(
                    "potential.k",
                    p.k.ok_or_else(|| field("potential.k", "required by ising-nn"))?,
                )?;
                ClassicalPotential::ising_nearest_neighbor(&lattice, k)
            }
            (Some("linear-height"), None) => {
                if p.k.is_some() {
                    return Err(field("potential.k", "not used by linear-height"));
                }
                ClassicalPotential::linear_height(&lattice)
            }
            (Some(other), None) => {
                return Err(field(
                    "potential.preset",
                    format!("unknown preset '{other}' (ising-nn, linear-height)"),
                ))
            }
            (None, Some(terms)) => {
                if p.k.is_some() {
                    return Err(field("potential.k", "only used with a preset"));
                }
                let mut out = Vec::with_capacity(terms.len());
                for (i, t) in terms.iter().enumerate() {
                    let b = site_set(&format!("potential.terms[{i}].sites"), &t.sites, &lattice)?;
                    out.push((b, finite(&format!("potential.terms[{i}].c"), t.c)?));
                }
                ClassicalPotential::new(out).map_err(|e| field("potential.terms", e.to_string()))?
            }
        },
    };

    let alphas = match (raw.alpha, raw.alphas) {
        (Some(_), Some(_)) => return Err(field("alpha", "give either alpha or alphas, not both")),
        (None, None) => return Err(field("alpha", "required (or alphas)")),
        (Some(a), None) => vec![a],
        (None, Some(v)) if v.is_empty() => return Err(field("alphas", "must be nonempty")),
        (None, Some(v)) => v,
    };
    if let Some(a) = alphas.iter().find(|a| !a.is_finite() || **a < 0.0) {
        return Err(field("alpha", format!("{a} is not a finite value >= 0")));
    }

    let mut pairs = Vec::with_capacity(raw.pairs.len());
    for (i, &[x, y]) in raw.pairs.iter().enumerate() {
        let name = format!("pairs[{i}]");
        if x == y {
            return Err(field(&name, "sites must differ"));
        }
        site_set(&name, &[x, y], &lattice)?;
        pairs.push((x, y));
    }

    let defaults = SiteCaps::default();
    let caps = match raw.caps {
        None => defaults,
        Some(c) => SiteCaps {
            quantum: c.quantum.unwrap_or(defaults.quantum),
            dense: c.dense.unwrap_or(defaults.dense),
            enumeration: c.enumeration.unwrap_or(defaults.enumeration),
        },
    };
    if caps.enumeration > 30 || caps.quantum > MAX_QUANTUM_SITES || caps.dense > caps.quantum {
        return Err(field(
            "caps",
            format!("need enumeration <= 30, quantum <= {MAX_QUANTUM_SITES} and dense <= quantum"),
        ));
    }

    let sweeps = raw.sweeps.unwrap_or(20_000);
    let batches = raw.batches.unwrap_or(50);
    if sweeps == 0 || batches == 0 || batches > sweeps {
        return Err(field("sweeps", "need sweeps > 0 and 0 < batches <= sweeps"));
    }

    Ok(RunConfig {
        lattice,
        couplings,
        potential,
        alphas,
        pairs,
        sweeps,
        burn_in: raw.burn_in.unwrap_or(sweeps / 10),
        batches,
        seed: raw.seed.unwrap_or(0),
        trials: raw.trials.unwrap_or(20),
        caps,
    })
}
