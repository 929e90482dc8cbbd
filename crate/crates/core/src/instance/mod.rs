//! 3-regular 3-XORSAT instances and their Ising encodings.
//!
//! A clause `(i, j, k)` with parity `p ∈ {+1, -1}` is satisfied by a spin
//! assignment exactly when `m_i * m_j * m_k == p`. Under the bit map
//! `x = (1 - m) / 2` that is the parity equation `x_i ⊕ x_j ⊕ x_k = (1 - p) / 2`.

mod gf2;
mod io;
mod model;
mod transform;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::seed::{self, Stream};

pub use gf2::{ground_energy_gf2, Gf2Solution};
pub use io::{read_instance, write_instance};
pub use model::{Convention, IsingModel};
pub use transform::{
    bipolar_to_binary, cubicize, cubicize_from_quadratic, quadratize, GADGET_OFFSET,
};

/// Pairing attempts before `generate_3r3x` gives up on a seed.
pub const MAX_PAIRING_ATTEMPTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorsatInstance {
    pub num_vars: usize,
    /// Zero-based variable indices, one triple per clause.
    pub clauses: Vec<[usize; 3]>,
    /// Satisfying spin product of each clause.
    pub parities: Vec<i8>,
    pub planted: Option<Vec<i8>>,
    pub seed: u64,
}

/// Benchmark problem size: spins of the quadratized form, `n = 2k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProblemSize(pub usize);

impl ProblemSize {
    pub fn from_vars(k: usize) -> Self {
        ProblemSize(2 * k)
    }

    pub fn num_vars(self) -> usize {
        self.0 / 2
    }
}

impl XorsatInstance {
    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn problem_size(&self) -> ProblemSize {
        ProblemSize::from_vars(self.num_vars)
    }

    pub fn is_satisfied_by(&self, spins: &[i8]) -> bool {
        self.unsatisfied_count(spins) == 0
    }

    pub fn unsatisfied_count(&self, spins: &[i8]) -> usize {
        self.clauses
            .iter()
            .zip(&self.parities)
            .filter(|(c, &p)| spins[c[0]] * spins[c[1]] * spins[c[2]] != p)
            .count()
    }

    /// Energy of the native cubic form, `-Σ_c p_c m_i m_j m_k`.
    pub fn cubic_energy(&self, spins: &[i8]) -> i64 {
        self.clauses
            .iter()
            .zip(&self.parities)
            .map(|(c, &p)| -(p as i64) * (spins[c[0]] * spins[c[1]] * spins[c[2]]) as i64)
            .sum()
    }

    /// Checks every structural invariant: clause count, index range, distinct
    /// variables per clause, 3-regularity, no repeated clause, and (when
    /// present) that the planted assignment satisfies all clauses.
    pub fn validate(&self) -> Result<()> {
        let k = self.num_vars;
        if k < 4 {
            return Err(Error::InvalidSize(format!("k = {k}, need k >= 4")));
        }
        if self.parities.len() != self.clauses.len() {
            return Err(Error::Validation(format!(
                "{} clauses but {} parities",
                self.clauses.len(),
                self.parities.len()
            )));
        }
        let mut occurrences = vec![0usize; k];
        let mut seen = HashSet::with_capacity(self.clauses.len());
        for (ci, clause) in self.clauses.iter().enumerate() {
            for &v in clause {
                if v >= k {
                    return Err(Error::Validation(format!(
                        "clause {} references variable {} of {k}",
                        ci + 1,
                        v + 1
                    )));
                }
                occurrences[v] += 1;
            }
            if clause[0] == clause[1] || clause[0] == clause[2] || clause[1] == clause[2] {
                return Err(Error::Validation(format!(
                    "clause {} repeats a variable",
                    ci + 1
                )));
            }
            if !seen.insert(sorted(*clause)) {
                return Err(Error::Validation(format!(
                    "clause {} duplicates an earlier clause",
                    ci + 1
                )));
            }
            let p = self.parities[ci];
            if p != 1 && p != -1 {
                return Err(Error::Validation(format!(
                    "clause {} has parity {p}",
                    ci + 1
                )));
            }
        }
        if let Some((v, &count)) = occurrences.iter().enumerate().find(|(_, &c)| c != 3) {
            return Err(Error::Regularity(format!(
                "variable {} appears in {count} clauses",
                v + 1
            )));
        }
        if self.clauses.len() != k {
            return Err(Error::Regularity(format!(
                "{} clauses for {k} variables",
                self.clauses.len()
            )));
        }
        if let Some(planted) = &self.planted {
            if planted.len() != k || planted.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::Validation("malformed planted assignment".into()));
            }
            if !self.is_satisfied_by(planted) {
                return Err(Error::Validation(
                    "planted assignment violates a clause".into(),
                ));
            }
        }
        Ok(())
    }
}

pub(crate) fn sorted(mut c: [usize; 3]) -> [usize; 3] {
    c.sort_unstable();
    c
}

/// Random planted 3R3X instance over `k` variables.
///
/// The 3k variable stubs are shuffled onto 3k clause slots; pairings that put
/// a variable twice in one clause or repeat a clause are redrawn whole.
pub fn generate_3r3x(k: usize, seed: u64) -> Result<XorsatInstance> {
    if k < 4 {
        return Err(Error::InvalidSize(format!("k = {k}, need k >= 4")));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed::derive(
        seed,
        Stream::Generation,
        &[k as u64],
    ));
    let mut stubs: Vec<usize> = (0..k).flat_map(|v| [v, v, v]).collect();
    let mut seen = HashSet::with_capacity(k);
    for _ in 0..MAX_PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        seen.clear();
        let mut clauses = Vec::with_capacity(k);
        let ok = stubs.chunks_exact(3).all(|c| {
            let clause = [c[0], c[1], c[2]];
            let distinct = c[0] != c[1] && c[0] != c[2] && c[1] != c[2];
            clauses.push(clause);
            distinct && seen.insert(sorted(clause))
        });
        if !ok {
            continue;
        }
        let planted: Vec<i8> = (0..k)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        let parities = clauses
            .iter()
            .map(|c| planted[c[0]] * planted[c[1]] * planted[c[2]])
            .collect();
        return Ok(XorsatInstance {
            num_vars: k,
            clauses,
            parities,
            planted: Some(planted),
            seed,
        });
    }
    Err(Error::GenerationFailed {
        k,
        seed,
        attempts: MAX_PAIRING_ATTEMPTS,
    })
}
