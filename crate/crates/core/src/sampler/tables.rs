//! p-bit-major synapse tables.
//!
//! Every p-bit owns `slots` neighbor lists, one per multiplexed instance:
//! entry `(i, s)` lives at `i * slots + s`. A standalone network is the
//! one-slot case.

use crate::instance::IsingModel;

#[derive(Clone, Debug)]
pub struct SynapseTables<W> {
    num_pbits: usize,
    slots: usize,
    pair_start: Vec<u32>,
    pairs: Vec<(u32, W)>,
    triple_start: Vec<u32>,
    triples: Vec<(u32, u32, W)>,
    bias: Vec<W>,
}

type Adjacency = (Vec<Vec<(u32, f64)>>, Vec<Vec<(u32, u32, f64)>>);

fn adjacency(model: &IsingModel, n: usize) -> Adjacency {
    let mut pairs = vec![Vec::new(); n];
    let mut triples = vec![Vec::new(); n];
    for (&(i, j), &w) in &model.j2 {
        pairs[i].push((j as u32, w));
        pairs[j].push((i as u32, w));
    }
    for (&(i, j, k), &w) in &model.j3 {
        triples[i].push((j as u32, k as u32, w));
        triples[j].push((i as u32, k as u32, w));
        triples[k].push((i as u32, j as u32, w));
    }
    for list in &mut pairs {
        list.sort_by_key(|e| e.0);
    }
    for list in &mut triples {
        list.sort_by_key(|e| (e.0, e.1));
    }
    (pairs, triples)
}

impl SynapseTables<f64> {
    /// Interleaves the models' couplings p-bit by p-bit. All models must
    /// already have `n` spins.
    pub fn build(models: &[IsingModel]) -> Self {
        let n = models.first().map_or(0, |m| m.num_spins);
        let slots = models.len();
        let adj: Vec<Adjacency> = models.iter().map(|m| adjacency(m, n)).collect();
        let mut t = SynapseTables {
            num_pbits: n,
            slots,
            pair_start: Vec::with_capacity(n * slots + 1),
            pairs: Vec::new(),
            triple_start: Vec::with_capacity(n * slots + 1),
            triples: Vec::new(),
            bias: Vec::with_capacity(n * slots),
        };
        for i in 0..n {
            for (s, (pairs, triples)) in adj.iter().enumerate() {
                t.pair_start.push(t.pairs.len() as u32);
                t.pairs.extend_from_slice(&pairs[i]);
                t.triple_start.push(t.triples.len() as u32);
                t.triples.extend_from_slice(&triples[i]);
                t.bias.push(models[s].h[i]);
            }
        }
        t.pair_start.push(t.pairs.len() as u32);
        t.triple_start.push(t.triples.len() as u32);
        t
    }
}

impl<W: Copy> SynapseTables<W> {
    pub fn num_pbits(&self) -> usize {
        self.num_pbits
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    #[inline]
    pub fn pairs(&self, i: usize, slot: usize) -> &[(u32, W)] {
        let e = i * self.slots + slot;
        &self.pairs[self.pair_start[e] as usize..self.pair_start[e + 1] as usize]
    }

    #[inline]
    pub fn triples(&self, i: usize, slot: usize) -> &[(u32, u32, W)] {
        let e = i * self.slots + slot;
        &self.triples[self.triple_start[e] as usize..self.triple_start[e + 1] as usize]
    }

    #[inline]
    pub fn bias(&self, i: usize, slot: usize) -> W {
        self.bias[i * self.slots + slot]
    }

    /// Number of distinct neighbor p-bits of `i` in one slot.
    pub fn fan_in(&self, i: usize, slot: usize) -> usize {
        let mut nbrs: Vec<u32> = self.pairs(i, slot).iter().map(|e| e.0).collect();
        for &(j, k, _) in self.triples(i, slot) {
            nbrs.push(j);
            nbrs.push(k);
        }
        nbrs.sort_unstable();
        nbrs.dedup();
        nbrs.len()
    }

    /// Copies one slot into a single-slot table, mapping every weight.
    pub fn extract_slot<V>(&self, slot: usize, mut f: impl FnMut(W) -> V) -> SynapseTables<V> {
        let n = self.num_pbits;
        let mut t = SynapseTables {
            num_pbits: n,
            slots: 1,
            pair_start: Vec::with_capacity(n + 1),
            pairs: Vec::new(),
            triple_start: Vec::with_capacity(n + 1),
            triples: Vec::new(),
            bias: Vec::with_capacity(n),
        };
        for i in 0..n {
            t.pair_start.push(t.pairs.len() as u32);
            t.pairs.extend(self.pairs(i, slot).iter().map(|&(j, w)| (j, f(w))));
            t.triple_start.push(t.triples.len() as u32);
            t.triples
                .extend(self.triples(i, slot).iter().map(|&(j, k, w)| (j, k, f(w))));
            t.bias.push(f(self.bias(i, slot)));
        }
        t.pair_start.push(t.pairs.len() as u32);
        t.triple_start.push(t.triples.len() as u32);
        t
    }
}
