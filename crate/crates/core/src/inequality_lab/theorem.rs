//! The descending induction that turns the decomposition into a bound on
//! `‖Γ^(k)‖²_HS`.

use serde::Serialize;

use super::{
    proposition_coefficients, scale, ConstantLedger, Core, InequalityReport, LedgerEntry, Scaling, REL_TOL,
};
use crate::decomposition::LambdaTable;
use crate::error::{Error, Result};
use crate::multiindex::binomial;

#[derive(Clone, Debug, Serialize)]
pub struct TheoremTrace {
    pub n: usize,
    pub k: usize,
    pub direct_hs_sq: f64,
    /// `max_r C_{0,0}(r)`: holds for every normalized state of this `N`.
    pub bound: f64,
    /// `Σ_r C_{0,0}(r) G(0, r)` for this state.
    pub state_bound: f64,
    /// `bound / N^k`.
    pub realized_ck: f64,
    /// Multiplier applied to each eliminated order, `t = k` first.
    pub multipliers: Vec<f64>,
    pub ledger: ConstantLedger,
    pub reports: Vec<InequalityReport>,
    pub pass: bool,
}

/// Runs `t = k, k-1, ..., 1`. At each step the order-`t` blocks
/// `Σ_r C_{t,t}(r) G(t, r)` are raised to `K Σ_r G(t, r)` with
/// `K = max(0, max_r C_{t,t}(r))` by adding `Σ_r (K - C_{t,t}(r)) Q_t(r) ≥ 0`,
/// and then replaced using the order-`t` proposition.
pub fn trace(table: &LambdaTable, k: usize, direct_hs_sq: f64) -> Result<TheoremTrace> {
    let n = table.n();
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds particle count {n}")));
    }
    let ni = n as i64;
    // cur[s][r] = C_{s,t}(r)
    let mut cur: Vec<Vec<f64>> = (0..=k)
        .map(|s| (0..=n).map(|r| binomial(ni - r as i64, (k - s) as i64)).collect())
        .collect();
    let mut entries = Vec::new();
    let mut record = |cur: &Vec<Vec<f64>>, t: usize| {
        for (s, row) in cur.iter().enumerate().take(t + 1) {
            for (r, &value) in row.iter().enumerate() {
                entries.push(LedgerEntry { s, t, r, value });
            }
        }
    };
    record(&cur, k);
    let mut multipliers = Vec::new();
    for t in (1..=k).rev() {
        let ctt = cur[t].clone();
        let big_k = (t..=n).map(|r| ctt[r]).fold(0.0, f64::max);
        let prop = proposition_coefficients(n, t, None)?;
        for (s, row) in cur.iter_mut().enumerate().take(t) {
            for (r, slot) in row.iter_mut().enumerate() {
                let rho = r + t - s;
                if rho <= n {
                    *slot += (big_k - ctt[rho]) * binomial((n - r) as i64, (t - s) as i64);
                }
                *slot += big_k * prop.get(s, r);
            }
        }
        cur.truncate(t);
        multipliers.push(big_k);
        record(&cur, t - 1);
    }
    let c00 = &cur[0];
    let bound = c00.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let state_bound: f64 = c00.iter().enumerate().map(|(r, c)| c * table.total(0, r)).sum();
    let reports = vec![
        InequalityReport::new("theorem", k, None, None, Core::Summed, direct_hs_sq, bound),
        InequalityReport::new("theorem-state", k, None, None, Core::Summed, direct_hs_sq, state_bound),
    ];
    let pass = reports.iter().all(|r| r.pass)
        && state_bound <= bound + REL_TOL * scale(state_bound, bound);
    let realized_ck = bound / (n as f64).powi(k as i32);
    Ok(TheoremTrace {
        n,
        k,
        direct_hs_sq,
        bound,
        state_bound,
        realized_ck,
        multipliers,
        ledger: ConstantLedger::new(n, Scaling::Theorem { k }, entries),
        reports,
        pass,
    })
}
