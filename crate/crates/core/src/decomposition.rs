//! The Λ and Ξ coefficient products and the exact Hilbert–Schmidt
//! decomposition of `Γ^(k)` into blocks `L_s(D)`.
//!
//! Notation used throughout the crate: for a core `D` with `|D| = N - r` and
//! `0 <= s <= r`,
//!
//! ```text
//! L_s(D)  = Σ_{|ε|=|η|=r-s} Σ_{|α|=|β|=s} Λ(D; α, β; ε, η)
//! G(s, r) = Σ_{|D|=N-r} L_s(D)
//! ```
//!
//! and `‖Γ^(k)‖²_HS = Σ_s Σ_r C(N-r, k-s) G(s, r)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiindex::{binomial, count, sign_parity, MultiIndex};
use crate::rdm::rdm_slater;
use crate::state::SlaterExpansion;

/// Default cap on the pair-of-pairs enumeration.
pub const DEFAULT_MAX_OPS: f64 = 1e10;

/// `(D; α, β; ε, η)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaInputs {
    pub d: MultiIndex,
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub eps: MultiIndex,
    pub eta: MultiIndex,
}

impl LambdaInputs {
    fn check_sizes(&self) -> Result<()> {
        if self.alpha.len() != self.beta.len() {
            return Err(Error::Size(format!("|α| = {} but |β| = {}", self.alpha.len(), self.beta.len())));
        }
        if self.eps.len() != self.eta.len() {
            return Err(Error::Size(format!("|ε| = {} but |η| = {}", self.eps.len(), self.eta.len())));
        }
        Ok(())
    }

    fn pairwise_disjoint(&self) -> bool {
        let parts = [self.d, self.alpha, self.beta, self.eps, self.eta];
        let total: usize = parts.iter().map(|p| p.len()).sum();
        parts.iter().fold(MultiIndex::EMPTY, |acc, p| acc.join(*p)).len() == total
    }
}

/// `c` of a union, zero when the parts repeat an index.
fn coeff_of(state: &SlaterExpansion, parts: &[MultiIndex]) -> Complex64 {
    let mut acc = MultiIndex::EMPTY;
    for &p in parts {
        match acc.union(p) {
            Ok(u) => acc = u,
            Err(_) => return Complex64::default(),
        }
    }
    state.coeff(acc)
}

/// `sgn(α∪β, ε∪η) c_{Dαε} c̄_{Dαη} c̄_{Dβε} c_{Dβη}`, zero unless all five
/// parts are pairwise disjoint.
pub fn lambda_eval(state: &SlaterExpansion, x: &LambdaInputs) -> Result<Complex64> {
    x.check_sizes()?;
    if !x.pairwise_disjoint() {
        return Ok(Complex64::default());
    }
    let sign = sign_parity(x.alpha.join(x.beta), x.eps.join(x.eta));
    let v = xi_eval(state, x)?;
    Ok(if sign { -v } else { v })
}

/// The same product without the sign and without zeroing overlaps
/// (a coefficient whose key repeats an index is still zero).
pub fn xi_eval(state: &SlaterExpansion, x: &LambdaInputs) -> Result<Complex64> {
    x.check_sizes()?;
    let c = |a: MultiIndex, b: MultiIndex| coeff_of(state, &[x.d, a, b]);
    Ok(c(x.alpha, x.eps) * c(x.alpha, x.eta).conj() * c(x.beta, x.eps).conj() * c(x.beta, x.eta))
}

/// All blocks `L_s(D)` of a state.
///
/// Built from ordered pairs of support keys `(K, K')`, grouped by
/// `(α, β) = (K \ K', K' \ K)` with common part `C = K ∩ K'`. Two members
/// `(C₁, w₁)`, `(C₂, w₂)` of a group give the single term
/// `Λ(C₁∩C₂; α, β; C₁\C₂, C₂\C₁) = sgn · w₁ w̄₂` where `w = c_K c̄_{K'}`;
/// every nonzero Λ arises exactly once this way.
#[derive(Clone, Debug)]
pub struct LambdaTable {
    n: usize,
    m: usize,
    blocks: BTreeMap<MultiIndex, Vec<f64>>,
    totals: Vec<Vec<f64>>,
    max_imag: f64,
    terms: u64,
}

type PairGroups = BTreeMap<(MultiIndex, MultiIndex), Vec<(MultiIndex, Complex64)>>;

impl LambdaTable {
    pub fn build(state: &SlaterExpansion, max_ops: f64) -> Result<LambdaTable> {
        let (n, m) = (state.n(), state.m());
        let support: Vec<(MultiIndex, Complex64)> = state.coeffs().iter().map(|(&k, &c)| (k, c)).collect();
        let mut groups: PairGroups = BTreeMap::new();
        for &(k1, c1) in &support {
            for &(k2, c2) in &support {
                let common = k1.intersect(k2);
                groups
                    .entry((k1.difference(k2), k2.difference(k1)))
                    .or_default()
                    .push((common, c1 * c2.conj()));
            }
        }
        let ops: f64 = groups.values().map(|g| (g.len() as f64).powi(2)).sum();
        if ops > max_ops {
            return Err(Error::Budget { what: "Λ pair enumeration", needed: ops, cap: max_ops });
        }

        // flat slot for (D, s): offset[|D|] + rank(D), times (n + 1)
        let mut offset = vec![0usize; n + 2];
        for d in 0..=n {
            offset[d + 1] = offset[d] + count(m, d) as usize;
        }
        let slots = offset[n + 1] * (n + 1);
        if slots as f64 > 5e8 {
            return Err(Error::Budget { what: "Λ table slots", needed: slots as f64, cap: 5e8 });
        }
        let slot = |d: MultiIndex, s: usize| (offset[d.len()] + d.rank()) * (n + 1) + s;

        let groups: Vec<_> = groups.into_iter().collect();
        let chunks = if slots > 4_000_000 { 1 } else { (groups.len() / 512).clamp(1, 4) };
        let per = groups.len().div_ceil(chunks).max(1);
        let partials: Vec<Vec<Complex64>> = groups
            .par_chunks(per)
            .map(|chunk| {
                let mut acc = vec![Complex64::default(); slots];
                for ((alpha, beta), members) in chunk {
                    let s = alpha.len();
                    let ab = alpha.join(*beta);
                    for &(c1, w1) in members {
                        for &(c2, w2) in members {
                            let d = c1.intersect(c2);
                            let ee = c1.difference(c2).join(c2.difference(c1));
                            let v = w1 * w2.conj();
                            acc[slot(d, s)] += if sign_parity(ab, ee) { -v } else { v };
                        }
                    }
                }
                acc
            })
            .collect();
        let mut flat = vec![Complex64::default(); slots];
        for p in partials {
            for (a, b) in flat.iter_mut().zip(p) {
                *a += b;
            }
        }

        let mut blocks = BTreeMap::new();
        let mut totals = vec![vec![0.0; n + 1]; n + 1];
        let mut max_imag = 0.0f64;
        for d_len in 0..=n {
            let r = n - d_len;
            for d in crate::multiindex::enumerate(d_len, m) {
                let base = slot(d, 0);
                let cells = &flat[base..=base + r];
                if cells.iter().all(|c| *c == Complex64::default()) {
                    continue;
                }
                for (s, c) in cells.iter().enumerate() {
                    max_imag = max_imag.max(c.im.abs());
                    totals[s][r] += c.re;
                }
                blocks.insert(d, cells.iter().map(|c| c.re).collect());
            }
        }
        debug_assert!(max_imag <= 1e-12, "Λ block with imaginary part {max_imag:e}");
        Ok(LambdaTable { n, m, blocks, totals, max_imag, terms: ops as u64 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Largest imaginary part seen in any block (zero in exact arithmetic).
    pub fn max_imag(&self) -> f64 {
        self.max_imag
    }

    /// Number of Λ terms accumulated.
    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// `L_s(D)`; zero when `s > N - |D|` or no term touches `D`.
    pub fn block(&self, d: MultiIndex, s: usize) -> f64 {
        self.blocks.get(&d).and_then(|v| v.get(s)).copied().unwrap_or(0.0)
    }

    /// `G(s, r)`; zero outside `0 <= s <= r <= N`.
    pub fn total(&self, s: usize, r: usize) -> f64 {
        if s > r || r > self.n {
            0.0
        } else {
            self.totals[s][r]
        }
    }

    /// Same as [`LambdaTable::total`] for signed indices.
    pub fn total_i(&self, s: i64, r: i64) -> f64 {
        if s < 0 || r < 0 {
            0.0
        } else {
            self.total(s as usize, r as usize)
        }
    }

    /// Cores with at least one nonzero block.
    pub fn cores(&self) -> impl Iterator<Item = (MultiIndex, &[f64])> {
        self.blocks.iter().map(|(d, v)| (*d, v.as_slice()))
    }

    /// `L_t(D)` for a given core, or `G(t, r)` summed over cores.
    pub fn group_sum(&self, t: usize, r: usize, d: Option<MultiIndex>) -> Result<f64> {
        if t > r || r > self.n {
            return Err(Error::Size(format!("need t <= r <= N, got t={t}, r={r}, N={}", self.n)));
        }
        match d {
            Some(d) => {
                if d.len() + r != self.n {
                    return Err(Error::Size(format!("core {d} has size {}, expected {}", d.len(), self.n - r)));
                }
                Ok(self.block(d, t))
            }
            None => Ok(self.total(t, r)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCell {
    pub s: usize,
    pub r: usize,
    pub weight: f64,
    pub inner_sum: f64,
    pub contribution: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub cells: Vec<DecompositionCell>,
    pub total: f64,
    pub direct_hs_sq: f64,
    pub residual: f64,
    pub max_imag: f64,
}

impl DecompositionReport {
    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / self.direct_hs_sq.abs().max(1.0)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.relative_residual() <= tol
    }
}

/// Both sides of `‖Γ^(k)‖²_HS = Σ_s Σ_r C(N-r, k-s) G(s, r)`.
pub fn hs_decomposition(state: &SlaterExpansion, k: usize, max_ops: f64) -> Result<DecompositionReport> {
    let table = LambdaTable::build(state, max_ops)?;
    let direct = rdm_slater(state, k)?.hs_norm_sqr();
    decomposition_from_table(&table, k, direct)
}

pub fn decomposition_from_table(table: &LambdaTable, k: usize, direct_hs_sq: f64) -> Result<DecompositionReport> {
    let n = table.n();
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds particle count {n}")));
    }
    let mut cells = Vec::new();
    let mut total = 0.0;
    for s in 0..=k {
        for r in 0..=n {
            let weight = binomial(n as i64 - r as i64, (k - s) as i64);
            let inner_sum = table.total(s, r);
            let contribution = weight * inner_sum;
            total += contribution;
            cells.push(DecompositionCell { s, r, weight, inner_sum, contribution });
        }
    }
    Ok(DecompositionReport {
        n,
        m: table.m(),
        k,
        cells,
        total,
        direct_hs_sq,
        residual: total - direct_hs_sq,
        max_imag: table.max_imag(),
    })
}
