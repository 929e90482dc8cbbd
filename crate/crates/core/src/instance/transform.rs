use std::collections::BTreeMap;

use super::model::{Convention, IsingModel};
use super::XorsatInstance;
use crate::error::{Error, Result};

/// Constant separating the minimised gadget energy from the cubic clause
/// energy: `min_a E_gadget(m, a) = -p m1 m2 m3 - GADGET_OFFSET`.
pub const GADGET_OFFSET: f64 = 3.0;

/// Variable-variable coupling inside a gadget.
const GADGET_PAIR: f64 = -1.0;
/// Variable-auxiliary coupling.
const GADGET_AUX: f64 = 2.0;

/// Native third-order form: one `J3 = p` term per clause on `k` spins.
pub fn cubicize(inst: &XorsatInstance) -> IsingModel {
    let mut m = IsingModel::new(3, Convention::Bipolar, inst.num_vars);
    for (c, &p) in inst.clauses.iter().zip(&inst.parities) {
        m.add_triple(c[0], c[1], c[2], p as f64);
    }
    m.ground_energy = Some(-(inst.num_clauses() as f64));
    m
}

/// Second-order form with one auxiliary spin per clause.
///
/// Clause `c` over `(i, j, k)` with parity `p` gets auxiliary spin `k_vars + c`
/// and the K4 gadget
///
/// `E = m_i m_j + m_i m_k + m_j m_k - 2a (m_i + m_j + m_k) - p (m_i + m_j + m_k) + 2 p a`
///
/// whose minimum over `a` is `-p m_i m_j m_k - 3`. The `+3` per clause is
/// carried in `energy_offset`, so a satisfying configuration (with optimal
/// auxiliaries) has energy `-k`.
pub fn quadratize(inst: &XorsatInstance) -> IsingModel {
    let k = inst.num_vars;
    let mut m = IsingModel::new(2, Convention::Bipolar, k + inst.num_clauses());
    for (ci, (c, &p)) in inst.clauses.iter().zip(&inst.parities).enumerate() {
        let a = k + ci;
        let p = p as f64;
        m.add_pair(c[0], c[1], GADGET_PAIR);
        m.add_pair(c[0], c[2], GADGET_PAIR);
        m.add_pair(c[1], c[2], GADGET_PAIR);
        for &v in c {
            m.add_pair(v, a, GADGET_AUX);
            m.h[v] += p;
        }
        m.h[a] = -2.0 * p;
        m.auxiliary.push(a);
    }
    m.prune_zeros();
    m.energy_offset = GADGET_OFFSET * inst.num_clauses() as f64;
    m.ground_energy = Some(-(inst.num_clauses() as f64));
    m
}

/// Recovers the cubic form from a quadratized model by reading each
/// auxiliary spin's gadget.
///
/// The sign of the product of an auxiliary spin's three couplings and its
/// bias fixes the clause: a positive product means the clause XOR value is 1
/// (satisfying spin product -1), a negative one means XOR value 0. The three
/// coupled spins receive a unit cubic weight of that satisfying product.
pub fn cubicize_from_quadratic(model: &IsingModel) -> Result<IsingModel> {
    if model.convention != Convention::Bipolar || model.order != 2 {
        return Err(Error::InvalidModel(
            "expected a bipolar second-order model".into(),
        ));
    }
    let mut is_aux = vec![false; model.num_spins];
    for &a in &model.auxiliary {
        is_aux[a] = true;
    }
    let mut incident: BTreeMap<usize, Vec<(usize, f64)>> =
        model.auxiliary.iter().map(|&a| (a, Vec::new())).collect();
    for (&(i, j), &w) in &model.j2 {
        match (is_aux[i], is_aux[j]) {
            (true, true) => {
                return Err(Error::MalformedGadget(i, format!("coupled to auxiliary {j}")))
            }
            (true, false) => incident.get_mut(&i).unwrap().push((j, w)),
            (false, true) => incident.get_mut(&j).unwrap().push((i, w)),
            (false, false) => {}
        }
    }
    // Non-auxiliary spins keep their relative order.
    let mut new_index = vec![usize::MAX; model.num_spins];
    let mut next = 0;
    for (i, slot) in new_index.iter_mut().enumerate() {
        if !is_aux[i] {
            *slot = next;
            next += 1;
        }
    }
    let mut out = IsingModel::new(3, Convention::Bipolar, next);
    for &a in &model.auxiliary {
        let edges = &incident[&a];
        if edges.len() != 3 {
            return Err(Error::MalformedGadget(
                a,
                format!("{} couplings, expected 3", edges.len()),
            ));
        }
        let product: f64 = edges.iter().map(|&(_, w)| w).product::<f64>() * model.h[a];
        if product == 0.0 {
            return Err(Error::MalformedGadget(a, "zero weight-bias product".into()));
        }
        let parity = if product > 0.0 { -1.0 } else { 1.0 };
        let [x, y, z] = [edges[0].0, edges[1].0, edges[2].0].map(|v| new_index[v]);
        if out.j3.contains_key(&sorted_key(x, y, z)) {
            return Err(Error::MalformedGadget(a, "clause repeated".into()));
        }
        out.add_triple(x, y, z, parity);
    }
    out.ground_energy = Some(-(model.auxiliary.len() as f64));
    Ok(out)
}

fn sorted_key(x: usize, y: usize, z: usize) -> (usize, usize, usize) {
    let mut t = [x, y, z];
    t.sort_unstable();
    (t[0], t[1], t[2])
}

/// Rewrites a bipolar model over binary spins via `m = 2s - 1`.
///
/// `J3' = 8 J3`, `J2'_ij = 4 J2_ij - 4 Σ_k J3_ijk`,
/// `h'_i = 2 h_i - 2 Σ_j J2_ij + Σ_{j≠k} J3_ijk` (ordered pairs, i.e. twice
/// each unordered triple), and the constant terms move into `energy_offset`,
/// so `E_binary(s) = E_bipolar(2s - 1)` for every state.
pub fn bipolar_to_binary(model: &IsingModel) -> Result<IsingModel> {
    if model.convention == Convention::Binary {
        return Err(Error::InvalidConvention("binary"));
    }
    let mut out = IsingModel::new(model.order, Convention::Binary, model.num_spins);
    out.ground_energy = model.ground_energy;
    out.auxiliary = model.auxiliary.clone();
    let mut offset = model.energy_offset;
    for (&(i, j, k), &w) in &model.j3 {
        out.add_triple(i, j, k, 8.0 * w);
        out.add_pair(i, j, -4.0 * w);
        out.add_pair(i, k, -4.0 * w);
        out.add_pair(j, k, -4.0 * w);
        for v in [i, j, k] {
            out.h[v] += 2.0 * w;
        }
        offset += w;
    }
    for (&(i, j), &w) in &model.j2 {
        out.add_pair(i, j, 4.0 * w);
        out.h[i] -= 2.0 * w;
        out.h[j] -= 2.0 * w;
        offset -= w;
    }
    for (i, &h) in model.h.iter().enumerate() {
        out.h[i] += 2.0 * h;
        offset += h;
    }
    out.energy_offset = offset;
    out.prune_zeros();
    Ok(out)
}
