//! Exact satisfiability of XORSAT systems by Gaussian elimination over GF(2).

use super::XorsatInstance;

#[derive(Clone, Debug, PartialEq)]
pub struct Gf2Solution {
    pub satisfiable: bool,
    /// Ground energy of the cubic form; `None` for unsatisfiable systems
    /// (MAX-XORSAT is not computed).
    pub ground_energy: Option<f64>,
    /// One satisfying spin assignment (free variables set to +1).
    pub assignment: Option<Vec<i8>>,
    pub rank: usize,
}

/// Packed row: `words` coefficient bits followed by the right-hand side.
struct Row {
    bits: Vec<u64>,
    rhs: bool,
}

impl Row {
    fn get(&self, col: usize) -> bool {
        self.bits[col / 64] >> (col % 64) & 1 == 1
    }

    fn xor_with(&mut self, other: &Row) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }
}

/// Solves `M x = b` where row `c` has ones at the clause's variables and
/// `b_c = (1 - p_c) / 2`, with `x = (1 - m) / 2`.
pub fn ground_energy_gf2(inst: &XorsatInstance) -> Gf2Solution {
    let n = inst.num_vars;
    let words = n.div_ceil(64).max(1);
    let mut rows: Vec<Row> = inst
        .clauses
        .iter()
        .zip(&inst.parities)
        .map(|(c, &p)| {
            let mut bits = vec![0u64; words];
            for &v in c {
                // Repeated variables cancel.
                bits[v / 64] ^= 1 << (v % 64);
            }
            Row { bits, rhs: p == -1 }
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(found) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(r, found);
        let (head, tail) = rows.split_at_mut(r);
        let (pivot, tail) = tail.split_first_mut().unwrap();
        for row in head.iter_mut().chain(tail.iter_mut()) {
            if row.get(col) {
                row.xor_with(pivot);
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let satisfiable = rows[r..].iter().all(|row| !row.rhs);
    if !satisfiable {
        return Gf2Solution {
            satisfiable,
            ground_energy: None,
            assignment: None,
            rank: r,
        };
    }
    // Reduced row echelon form: each pivot row fixes its pivot variable with
    // free variables at zero.
    let mut bits = vec![false; n];
    for (row, &col) in rows.iter().zip(&pivots) {
        bits[col] = row.rhs;
    }
    let assignment = bits.iter().map(|&x| if x { -1 } else { 1 }).collect();
    Gf2Solution {
        satisfiable,
        ground_energy: Some(-(inst.num_clauses() as f64)),
        assignment: Some(assignment),
        rank: r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_3r3x;

    fn brute_force_min(inst: &XorsatInstance) -> i64 {
        let k = inst.num_vars;
        (0..1u64 << k)
            .map(|b| {
                let s: Vec<i8> = (0..k).map(|i| if b >> i & 1 == 1 { -1 } else { 1 }).collect();
                inst.cubic_energy(&s)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn toy_single_clause_is_satisfiable() {
        // Padded with a disjoint second clause so the system has two rows.
        let inst = XorsatInstance {
            num_vars: 6,
            clauses: vec![[0, 1, 2], [3, 4, 5]],
            parities: vec![1, -1],
            planted: None,
            seed: 0,
        };
        let sol = ground_energy_gf2(&inst);
        assert!(sol.satisfiable);
        assert!(inst.is_satisfied_by(sol.assignment.as_ref().unwrap()));
    }

    #[test]
    fn contradictory_copies_are_unsatisfiable() {
        let inst = XorsatInstance {
            num_vars: 3,
            clauses: vec![[0, 1, 2], [0, 1, 2]],
            parities: vec![1, -1],
            planted: None,
            seed: 0,
        };
        let sol = ground_energy_gf2(&inst);
        assert!(!sol.satisfiable);
        assert_eq!(sol.ground_energy, None);
    }

    #[test]
    fn planted_k12_matches_enumeration() {
        let inst = generate_3r3x(12, 4).unwrap();
        let sol = ground_energy_gf2(&inst);
        assert!(sol.satisfiable);
        assert_eq!(sol.ground_energy, Some(-12.0));
        assert_eq!(brute_force_min(&inst), -12);
        assert!(inst.is_satisfied_by(sol.assignment.as_ref().unwrap()));
    }

    #[test]
    fn random_parities_agree_with_enumeration() {
        // Flipped parities make some systems inconsistent; elimination must
        // agree with exhaustive search either way.
        let mut seen_unsat = false;
        for seed in 0..40 {
            let mut inst = generate_3r3x(10, seed).unwrap();
            inst.parities[(seed as usize) % 10] *= -1;
            let sol = ground_energy_gf2(&inst);
            let min = brute_force_min(&inst);
            assert_eq!(sol.satisfiable, min == -10, "seed {seed}");
            seen_unsat |= !sol.satisfiable;
        }
        assert!(seen_unsat);
    }
}
