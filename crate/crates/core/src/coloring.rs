//! Colorings that define the chromatic update schedule.
//!
//! Quadratic models are colored directly with DSATUR. Cubic models get a
//! strong hypergraph coloring by running DSATUR on the clique (2-section)
//! graph, so no two spins that share any term are ever updated together.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::IsingModel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorSchedule {
    pub num_colors: usize,
    pub color_of: Vec<usize>,
    /// Spins of each color in increasing index order; updated block by block.
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strength {
    /// Every pair of spins sharing a term has distinct colors.
    Strong,
    /// Every term spans at least two colors.
    Weak,
}

#[derive(Serialize, Deserialize)]
struct ColoringDoc {
    num_colors: usize,
    color_of: Vec<usize>,
}

impl ColorSchedule {
    pub fn from_colors(color_of: Vec<usize>) -> Self {
        let num_colors = color_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); num_colors];
        for (i, &c) in color_of.iter().enumerate() {
            blocks[c].push(i);
        }
        ColorSchedule { num_colors, color_of, blocks }
    }

    pub fn num_spins(&self) -> usize {
        self.color_of.len()
    }

    /// Appends isolated spins, colored 0, up to `n` spins.
    pub fn padded(&self, n: usize) -> ColorSchedule {
        let mut colors = self.color_of.clone();
        colors.resize(n.max(colors.len()), 0);
        ColorSchedule::from_colors(colors)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ColoringDoc {
            num_colors: self.num_colors,
            color_of: self.color_of.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ColoringDoc = serde_json::from_str(text)?;
        let schedule = ColorSchedule::from_colors(doc.color_of);
        if schedule.num_colors != doc.num_colors {
            return Err(Error::InvalidModel(format!(
                "coloring declares {} colors but uses {}",
                doc.num_colors, schedule.num_colors
            )));
        }
        Ok(schedule)
    }
}

/// DSATUR over an adjacency list.
///
/// Picks the uncolored vertex of highest saturation, breaking ties by
/// degree and then by lowest index, and gives it the smallest free color.
pub fn dsatur(adjacency: &[Vec<usize>]) -> ColorSchedule {
    let n = adjacency.len();
    let mut color: Vec<Option<usize>> = vec![None; n];
    let mut saturation: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v].is_none())
            .max_by(|&a, &b| {
                (saturation[a].len(), adjacency[a].len())
                    .cmp(&(saturation[b].len(), adjacency[b].len()))
                    .then(b.cmp(&a))
            })
            .expect("an uncolored vertex remains");
        let c = (0..).find(|c| !saturation[v].contains(c)).unwrap();
        color[v] = Some(c);
        for &u in &adjacency[v] {
            saturation[u].insert(c);
        }
    }
    ColorSchedule::from_colors(color.into_iter().map(Option::unwrap).collect())
}

/// Proper coloring of a model with only pairwise terms.
pub fn color_graph(model: &IsingModel) -> Result<ColorSchedule> {
    if !model.j3.is_empty() {
        return Err(Error::InvalidModel(
            "graph coloring needs a model without cubic terms".into(),
        ));
    }
    Ok(dsatur(&model.clique_adjacency()))
}

/// Strong hypergraph coloring via the clique graph of all pair and triple
/// terms.
pub fn color_hypergraph(model: &IsingModel) -> ColorSchedule {
    dsatur(&model.clique_adjacency())
}

/// Colors any model: DSATUR on its clique graph.
pub fn color_model(model: &IsingModel) -> ColorSchedule {
    color_hypergraph(model)
}

pub fn verify_coloring(
    model: &IsingModel,
    schedule: &ColorSchedule,
    strength: Strength,
) -> Result<bool> {
    if schedule.num_spins() != model.num_spins {
        return Err(Error::SizeMismatch(format!(
            "schedule covers {} spins, model has {}",
            schedule.num_spins(),
            model.num_spins
        )));
    }
    let c = &schedule.color_of;
    let partition_ok = {
        let mut seen = vec![false; model.num_spins];
        let mut ok = schedule.blocks.len() == schedule.num_colors;
        for (b, block) in schedule.blocks.iter().enumerate() {
            for &i in block {
                ok &= i < seen.len() && !seen[i] && c[i] == b;
                if i < seen.len() {
                    seen[i] = true;
                }
            }
        }
        ok && seen.iter().all(|&s| s)
    };
    if !partition_ok {
        return Ok(false);
    }
    let pairs_ok = model.j2.keys().all(|&(i, j)| c[i] != c[j]);
    let triples_ok = model.j3.keys().all(|&(i, j, k)| match strength {
        Strength::Strong => c[i] != c[j] && c[i] != c[k] && c[j] != c[k],
        Strength::Weak => !(c[i] == c[j] && c[j] == c[k]),
    });
    Ok(pairs_ok && triples_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{cubicize, generate_3r3x, quadratize, Convention};

    fn graph(n: usize, edges: &[(usize, usize)]) -> IsingModel {
        let mut m = IsingModel::new(2, Convention::Bipolar, n);
        for &(i, j) in edges {
            m.add_pair(i, j, 1.0);
        }
        m
    }

    #[test]
    fn triangle_needs_three_colors() {
        let m = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let s = color_graph(&m).unwrap();
        assert_eq!(s.num_colors, 3);
        assert!(verify_coloring(&m, &s, Strength::Strong).unwrap());
    }

    #[test]
    fn edgeless_graph_uses_one_color() {
        let s = color_graph(&graph(5, &[])).unwrap();
        assert_eq!(s.num_colors, 1);
        assert_eq!(s.blocks, vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn single_hyperedge_needs_three_colors() {
        let mut m = IsingModel::new(3, Convention::Bipolar, 3);
        m.add_triple(0, 1, 2, 1.0);
        let s = color_hypergraph(&m);
        assert_eq!(s.num_colors, 3);
        assert!(verify_coloring(&m, &s, Strength::Strong).unwrap());
        assert!(verify_coloring(&m, &s, Strength::Weak).unwrap());
    }

    #[test]
    fn weak_and_monochrome_schedules() {
        let mut m = IsingModel::new(3, Convention::Bipolar, 3);
        m.add_triple(0, 1, 2, 1.0);
        let weak = ColorSchedule::from_colors(vec![0, 1, 1]);
        assert!(!verify_coloring(&m, &weak, Strength::Strong).unwrap());
        assert!(verify_coloring(&m, &weak, Strength::Weak).unwrap());
        let mono = ColorSchedule::from_colors(vec![0, 0, 0]);
        assert!(!verify_coloring(&m, &mono, Strength::Strong).unwrap());
        assert!(!verify_coloring(&m, &mono, Strength::Weak).unwrap());
    }

    #[test]
    fn size_mismatch_is_error() {
        let m = graph(3, &[(0, 1)]);
        let s = ColorSchedule::from_colors(vec![0, 1]);
        assert!(verify_coloring(&m, &s, Strength::Strong).is_err());
    }

    #[test]
    fn cubic_clique_graph_is_quadratic_graph_without_auxiliaries() {
        let inst = generate_3r3x(16, 5).unwrap();
        let quad = quadratize(&inst);
        let cubic = cubicize(&inst);
        let quad_adj = quad.clique_adjacency();
        let cubic_adj = cubic.clique_adjacency();
        for v in 0..inst.num_vars {
            let without_aux: Vec<usize> =
                quad_adj[v].iter().copied().filter(|&u| u < inst.num_vars).collect();
            assert_eq!(without_aux, cubic_adj[v]);
        }
    }

    #[test]
    fn dsatur_is_deterministic() {
        let quad = quadratize(&generate_3r3x(20, 2).unwrap());
        assert_eq!(color_graph(&quad).unwrap(), color_graph(&quad).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let s = ColorSchedule::from_colors(vec![0, 2, 1, 0]);
        assert_eq!(ColorSchedule::from_json(&s.to_json().unwrap()).unwrap(), s);
    }
}
