//! Dense joint distributions over a few small discrete variables, with
//! exact entropy and mutual information by brute-force marginalization.
//!
//! These are deliberately tiny and exact: they serve as numeric oracles
//! for the inequality that justifies treating ν as supermodular when the
//! conditioning sets are independent of the added feature.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed::SeedStream;

/// A probability table over the product space of `dims` discrete
/// variables, stored dense with the last variable varying fastest.
#[derive(Debug, Clone)]
pub struct DiscreteJoint {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl DiscreteJoint {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let cells: usize = dims.iter().product();
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidInput("every variable needs alphabet ≥ 1".into()));
        }
        if probs.len() != cells {
            return Err(Error::LengthMismatch {
                left: cells,
                right: probs.len(),
            });
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput("probabilities must be finite and ≥ 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { dims, probs })
    }

    pub fn n_vars(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Marginal table over `vars` (deduplicated, kept in ascending order).
    pub fn marginal(&self, vars: &[usize]) -> Result<DiscreteJoint> {
        let mut vars: Vec<usize> = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        if vars.is_empty() {
            return Err(Error::InvalidInput("marginal over no variables".into()));
        }
        if let Some(&bad) = vars.iter().find(|&&v| v >= self.dims.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                p: self.dims.len(),
            });
        }
        let out_dims: Vec<usize> = vars.iter().map(|&v| self.dims[v]).collect();
        let out_cells: usize = out_dims.iter().product();
        let mut out = vec![0.0; out_cells];
        let strides = self.strides();
        let mut out_strides = vec![1; vars.len()];
        for i in (0..vars.len().saturating_sub(1)).rev() {
            out_strides[i] = out_strides[i + 1] * out_dims[i + 1];
        }
        for (cell, &p) in self.probs.iter().enumerate() {
            let mut idx = 0;
            for (k, &v) in vars.iter().enumerate() {
                let coord = cell / strides[v] % self.dims[v];
                idx += coord * out_strides[k];
            }
            out[idx] += p;
        }
        DiscreteJoint::new(out_dims, out)
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }

    /// I(A;B) in bits by direct summation over the (A,B) marginal:
    /// Σ p(a,b) log₂ [ p(a,b) / (p(a) p(b)) ], zero-probability cells
    /// contributing nothing.
    pub fn mutual_information(&self, group_a: &[usize], group_b: &[usize]) -> Result<f64> {
        if group_a.is_empty() || group_b.is_empty() {
            return Err(Error::InvalidInput("mutual information needs two nonempty groups".into()));
        }
        if group_a.iter().any(|v| group_b.contains(v)) {
            return Err(Error::OverlappingGroups);
        }
        let union: Vec<usize> = {
            let mut u: Vec<usize> = group_a.iter().chain(group_b).copied().collect();
            u.sort_unstable();
            u.dedup();
            u
        };
        let m_ab = self.marginal(&union)?;
        let m_a = self.marginal(group_a)?;
        let m_b = self.marginal(group_b)?;

        // Positions of A's and B's variables within the sorted union.
        let pos = |vs: &[usize]| -> Vec<usize> {
            let mut sorted = vs.to_vec();
            sorted.sort_unstable();
            sorted
                .iter()
                .map(|v| union.binary_search(v).unwrap())
                .collect()
        };
        let a_pos = pos(group_a);
        let b_pos = pos(group_b);
        let strides = m_ab.strides();
        let project = |cell: usize, positions: &[usize], target: &DiscreteJoint| -> f64 {
            let t_strides = target.strides();
            let mut idx = 0;
            for (k, &p) in positions.iter().enumerate() {
                let coord = cell / strides[p] % m_ab.dims[p];
                idx += coord * t_strides[k];
            }
            target.probs[idx]
        };

        let mut mi = 0.0;
        for (cell, &p_ab) in m_ab.probs.iter().enumerate() {
            if p_ab <= 0.0 {
                continue;
            }
            let p_a = project(cell, &a_pos, &m_a);
            let p_b = project(cell, &b_pos, &m_b);
            mi += p_ab * (p_ab / (p_a * p_b)).log2();
        }
        Ok(mi)
    }

    /// I(A;B | C) in bits: Σ p(a,b,c) log₂ [ p(a,b,c) p(c) / (p(a,c) p(b,c)) ].
    pub fn conditional_mutual_information(
        &self,
        group_a: &[usize],
        group_b: &[usize],
        cond: &[usize],
    ) -> Result<f64> {
        if group_a.is_empty() || group_b.is_empty() || cond.is_empty() {
            return Err(Error::InvalidInput("conditional MI needs three nonempty groups".into()));
        }
        let mut all: Vec<usize> = group_a
            .iter()
            .chain(group_b)
            .chain(cond)
            .copied()
            .collect();
        let count = all.len();
        all.sort_unstable();
        all.dedup();
        if all.len() != count {
            return Err(Error::OverlappingGroups);
        }

        let union = all;
        let m_abc = self.marginal(&union)?;
        let m_c = self.marginal(cond)?;
        let ac: Vec<usize> = group_a.iter().chain(cond).copied().collect();
        let bc: Vec<usize> = group_b.iter().chain(cond).copied().collect();
        let m_ac = self.marginal(&ac)?;
        let m_bc = self.marginal(&bc)?;

        let pos = |vs: &[usize]| -> Vec<usize> {
            let mut sorted = vs.to_vec();
            sorted.sort_unstable();
            sorted
                .iter()
                .map(|v| union.binary_search(v).unwrap())
                .collect()
        };
        let strides = m_abc.strides();
        let project = |cell: usize, positions: &[usize], target: &DiscreteJoint| -> f64 {
            let t_strides = target.strides();
            let mut idx = 0;
            for (k, &p) in positions.iter().enumerate() {
                let coord = cell / strides[p] % m_abc.dims[p];
                idx += coord * t_strides[k];
            }
            target.probs[idx]
        };
        let c_pos = pos(cond);
        let ac_pos = pos(&ac);
        let bc_pos = pos(&bc);

        let mut mi = 0.0;
        for (cell, &p_abc) in m_abc.probs.iter().enumerate() {
            if p_abc <= 0.0 {
                continue;
            }
            let p_c = project(cell, &c_pos, &m_c);
            let p_ac = project(cell, &ac_pos, &m_ac);
            let p_bc = project(cell, &bc_pos, &m_bc);
            mi += p_abc * (p_abc * p_c / (p_ac * p_bc)).log2();
        }
        Ok(mi)
    }
}

fn random_prob_vector(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| rng.random::<f64>().max(1e-12)).collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Numerically checks, over random distributions, the inequality
/// I(Y; S,f,X) − I(Y; S,X) ≥ I(Y; S,f) − I(Y; S) whenever S, f, X are
/// mutually independent and Y is arbitrary given them. Returns the
/// fraction of trials violating it beyond 1e−9 — zero unless the MI
/// machinery is broken, since the inequality is a theorem.
pub fn verify_supermodularity(trials: usize, alphabet: usize, stream: &SeedStream) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    if !(2..=4).contains(&alphabet) {
        return Err(Error::InvalidInput(format!(
            "alphabet must be 2..4, got {alphabet}"
        )));
    }
    let k = alphabet;
    let violations: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream.child(t as u64).rng();
            // Variables: 0 = Y, 1 = S, 2 = f, 3 = X. S, f, X mutually
            // independent by construction (product of marginals); Y has an
            // arbitrary conditional given (S, f, X).
            let p_s = random_prob_vector(&mut rng, k);
            let p_f = random_prob_vector(&mut rng, k);
            let p_x = random_prob_vector(&mut rng, k);
            let mut probs = vec![0.0; k * k * k * k];
            for s in 0..k {
                for f in 0..k {
                    for x in 0..k {
                        let base = p_s[s] * p_f[f] * p_x[x];
                        let p_y = random_prob_vector(&mut rng, k);
                        for y in 0..k {
                            probs[((y * k + s) * k + f) * k + x] = p_y[y] * base;
                        }
                    }
                }
            }
            let joint = DiscreteJoint::new(vec![k; 4], probs).expect("valid joint");
            let lhs = joint.mutual_information(&[0], &[1, 2, 3]).unwrap()
                - joint.mutual_information(&[0], &[1, 3]).unwrap();
            let rhs = joint.mutual_information(&[0], &[1, 2]).unwrap()
                - joint.mutual_information(&[0], &[1]).unwrap();
            usize::from(lhs < rhs - 1e-9)
        })
        .sum();
    Ok(violations as f64 / trials as f64)
}
