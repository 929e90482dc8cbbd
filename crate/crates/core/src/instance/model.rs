use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Spins in {-1, +1}.
    Bipolar,
    /// Spins in {0, 1}.
    Binary,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Bipolar => "bipolar",
            Convention::Binary => "binary",
        })
    }
}

impl Convention {
    /// Maps a bipolar spin into this convention.
    pub fn from_bipolar(self, m: i8) -> i8 {
        match self {
            Convention::Bipolar => m,
            Convention::Binary => (m + 1) / 2,
        }
    }

    pub fn to_bipolar(self, s: i8) -> i8 {
        match self {
            Convention::Bipolar => s,
            Convention::Binary => 2 * s - 1,
        }
    }
}

/// Ising or PUBO Hamiltonian with up to cubic terms:
///
/// `E(m) = -Σ_{i<j<k} J3_ijk m_i m_j m_k - Σ_{i<j} J2_ij m_i m_j - Σ_i h_i m_i + energy_offset`
///
/// in either spin convention.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    pub order: u8,
    pub convention: Convention,
    pub num_spins: usize,
    pub h: Vec<f64>,
    pub j2: BTreeMap<(usize, usize), f64>,
    pub j3: BTreeMap<(usize, usize, usize), f64>,
    pub energy_offset: f64,
    pub ground_energy: Option<f64>,
    /// Auxiliary spins introduced by quadratization (empty otherwise).
    pub auxiliary: Vec<usize>,
}

impl IsingModel {
    pub fn new(order: u8, convention: Convention, num_spins: usize) -> Self {
        IsingModel {
            order,
            convention,
            num_spins,
            h: vec![0.0; num_spins],
            j2: BTreeMap::new(),
            j3: BTreeMap::new(),
            energy_offset: 0.0,
            ground_energy: None,
            auxiliary: Vec::new(),
        }
    }

    /// Accumulates `w` onto the pair `{i, j}`.
    pub fn add_pair(&mut self, i: usize, j: usize, w: f64) {
        assert!(i != j, "self-interaction on spin {i}");
        let key = if i < j { (i, j) } else { (j, i) };
        *self.j2.entry(key).or_insert(0.0) += w;
    }

    /// Accumulates `w` onto the triple `{i, j, k}`.
    pub fn add_triple(&mut self, i: usize, j: usize, k: usize, w: f64) {
        let mut t = [i, j, k];
        t.sort_unstable();
        assert!(t[0] != t[1] && t[1] != t[2], "repeated spin in triple {t:?}");
        *self.j3.entry((t[0], t[1], t[2])).or_insert(0.0) += w;
    }

    /// Drops interaction entries that cancelled to exactly zero.
    pub fn prune_zeros(&mut self) {
        self.j2.retain(|_, w| *w != 0.0);
        self.j3.retain(|_, w| *w != 0.0);
    }

    pub fn validate(&self) -> Result<()> {
        if self.order != 2 && self.order != 3 {
            return Err(Error::InvalidModel(format!("order {}", self.order)));
        }
        if self.h.len() != self.num_spins {
            return Err(Error::InvalidModel(format!(
                "{} biases for {} spins",
                self.h.len(),
                self.num_spins
            )));
        }
        if self.order == 2 && !self.j3.is_empty() {
            return Err(Error::InvalidModel("order-2 model with cubic terms".into()));
        }
        for &(i, j) in self.j2.keys() {
            if !(i < j && j < self.num_spins) {
                return Err(Error::InvalidModel(format!("bad pair key ({i}, {j})")));
            }
        }
        for &(i, j, k) in self.j3.keys() {
            if !(i < j && j < k && k < self.num_spins) {
                return Err(Error::InvalidModel(format!("bad triple key ({i}, {j}, {k})")));
            }
        }
        if self.auxiliary.iter().any(|&a| a >= self.num_spins) {
            return Err(Error::InvalidModel("auxiliary index out of range".into()));
        }
        Ok(())
    }

    /// Full Hamiltonian at `state`, given in this model's convention.
    pub fn energy(&self, state: &[i8]) -> f64 {
        debug_assert_eq!(state.len(), self.num_spins);
        let s = |i: usize| state[i] as f64;
        let mut e = self.energy_offset;
        for (i, &h) in self.h.iter().enumerate() {
            e -= h * s(i);
        }
        for (&(i, j), &w) in &self.j2 {
            e -= w * s(i) * s(j);
        }
        for (&(i, j, k), &w) in &self.j3 {
            e -= w * s(i) * s(j) * s(k);
        }
        e
    }

    /// Adjacency of the 2-section (clique) graph: spins are adjacent when they
    /// share any pair or triple term.
    pub fn clique_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_spins];
        let mut link = |a: usize, b: usize| {
            adj[a].push(b);
            adj[b].push(a);
        };
        for &(i, j) in self.j2.keys() {
            link(i, j);
        }
        for &(i, j, k) in self.j3.keys() {
            link(i, j);
            link(i, k);
            link(j, k);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Adds isolated spins until the model has `n` spins.
    pub fn padded(&self, n: usize) -> Result<IsingModel> {
        if n < self.num_spins {
            return Err(Error::SizeMismatch(format!(
                "cannot pad {} spins down to {n}",
                self.num_spins
            )));
        }
        let mut m = self.clone();
        m.num_spins = n;
        m.h.resize(n, 0.0);
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<IsingModel> {
        let doc: ModelDoc = serde_json::from_str(text)?;
        let model = IsingModel::try_from(doc)?;
        model.validate()?;
        Ok(model)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<IsingModel> {
        IsingModel::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk model document. Spin indices are zero-based.
#[derive(Serialize, Deserialize)]
struct ModelDoc {
    order: u8,
    convention: Convention,
    num_spins: usize,
    h: Vec<f64>,
    j2: Vec<(usize, usize, f64)>,
    j3: Vec<(usize, usize, usize, f64)>,
    energy_offset: f64,
    ground_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    auxiliary: Vec<usize>,
}

impl From<&IsingModel> for ModelDoc {
    fn from(m: &IsingModel) -> Self {
        ModelDoc {
            order: m.order,
            convention: m.convention,
            num_spins: m.num_spins,
            h: m.h.clone(),
            j2: m.j2.iter().map(|(&(i, j), &w)| (i, j, w)).collect(),
            j3: m.j3.iter().map(|(&(i, j, k), &w)| (i, j, k, w)).collect(),
            energy_offset: m.energy_offset,
            ground_energy: m.ground_energy,
            auxiliary: m.auxiliary.clone(),
        }
    }
}

impl TryFrom<ModelDoc> for IsingModel {
    type Error = Error;

    fn try_from(d: ModelDoc) -> Result<Self> {
        let mut m = IsingModel::new(d.order, d.convention, d.num_spins);
        if d.h.len() != d.num_spins {
            return Err(Error::InvalidModel("bias vector length".into()));
        }
        m.h = d.h;
        for (i, j, w) in d.j2 {
            if i >= j {
                return Err(Error::InvalidModel(format!("pair key ({i}, {j}) not ordered")));
            }
            m.j2.insert((i, j), w);
        }
        for (i, j, k, w) in d.j3 {
            if !(i < j && j < k) {
                return Err(Error::InvalidModel(format!(
                    "triple key ({i}, {j}, {k}) not ordered"
                )));
            }
            m.j3.insert((i, j, k), w);
        }
        m.energy_offset = d.energy_offset;
        m.ground_energy = d.ground_energy;
        m.auxiliary = d.auxiliary;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_energy_is_offset() {
        let mut m = IsingModel::new(2, Convention::Bipolar, 4);
        m.energy_offset = 2.5;
        assert_eq!(m.energy(&[1, -1, 1, 1]), 2.5);
    }

    #[test]
    fn json_round_trip() {
        let mut m = IsingModel::new(3, Convention::Binary, 5);
        m.h[1] = 0.5;
        m.add_pair(3, 1, -4.0);
        m.add_triple(4, 0, 2, 8.0);
        m.energy_offset = -1.0;
        m.ground_energy = Some(-3.0);
        let back = IsingModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_unordered_keys() {
        let text = r#"{"order":2,"convention":"bipolar","num_spins":2,"h":[0,0],
            "j2":[[1,0,1.0]],"j3":[],"energy_offset":0,"ground_energy":null}"#;
        assert!(IsingModel::from_json(text).is_err());
    }
}
