//! Both sides of every inequality in the Hilbert–Schmidt bound, evaluated on
//! concrete states, plus the constants the bound is built from.
//!
//! All sums are indexed like [`crate::decomposition`]: a core `D` has
//! `|D| = N - r`, and `L_s(D)`, `G(s, r)` are the Λ-blocks of that module.

use serde::{Serialize, Serializer};

use crate::decomposition::LambdaTable;
use crate::error::{Error, Result};
use crate::multiindex::{enumerate, MultiIndex};
use crate::state::SlaterExpansion;

mod coefficients;
mod squares;
mod theorem;

pub use coefficients::{
    default_tau, even_printed_coeffs, even_rhs_coeffs, odd_rhs_coeffs, proposition_coefficients,
    PropositionCoefficients,
};
pub use squares::{SquareIdentity, SquareVariant};
pub use theorem::TheoremTrace;

/// Relative tolerance of every pass/fail decision.
pub const REL_TOL: f64 = 1e-10;

/// `max(1, |lhs|, |rhs|)`.
pub fn scale(lhs: f64, rhs: f64) -> f64 {
    1f64.max(lhs.abs()).max(rhs.abs())
}

/// Which core a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Core {
    Summed,
    At(MultiIndex),
}

impl Core {
    /// Hex of the bitset, or `"summed"`; used as a table key.
    pub fn key(&self) -> String {
        match self {
            Core::Summed => "summed".into(),
            Core::At(d) => format!("{:#x}", d.bits()),
        }
    }
}

impl Serialize for Core {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Core::Summed => s.serialize_str("summed"),
            Core::At(d) => d.serialize(s),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub label: String,
    pub t: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub core: Core,
    pub core_key: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    /// Right-hand side as literally printed, where that differs from the
    /// form that is evaluated. Informational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed_rhs: Option<f64>,
}

impl InequalityReport {
    pub fn new(label: &str, t: usize, r: Option<usize>, tau: Option<f64>, core: Core, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        InequalityReport {
            label: label.into(),
            t,
            r,
            tau,
            core,
            core_key: core.key(),
            lhs,
            rhs,
            slack,
            pass: slack >= -REL_TOL * scale(lhs, rhs),
            printed_rhs: None,
        }
    }
}

/// What the ledger's scaling check divides by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scaling {
    /// `|C_{s,t}(r)| / N^{t-s}`.
    Proposition { t: usize },
    /// `|C_{s,t}(r)| / N^{k-s}`.
    Theorem { k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub s: usize,
    pub t: usize,
    pub r: usize,
    pub value: f64,
}

/// Realized constants `C_{s,t}(r, N)`.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantLedger {
    pub n: usize,
    pub scaling: Scaling,
    pub entries: Vec<LedgerEntry>,
    pub cap_check: f64,
}

impl ConstantLedger {
    pub fn new(n: usize, scaling: Scaling, entries: Vec<LedgerEntry>) -> Self {
        let nn = n as f64;
        let cap_check = entries
            .iter()
            .map(|e| {
                let p = match scaling {
                    Scaling::Proposition { t } => t - e.s,
                    Scaling::Theorem { k } => k - e.s,
                };
                e.value.abs() / nn.powi(p as i32)
            })
            .fold(0.0, f64::max);
        ConstantLedger { n, scaling, entries, cap_check }
    }

    pub fn get(&self, s: usize, t: usize, r: usize) -> Option<f64> {
        self.entries.iter().find(|e| (e.s, e.t, e.r) == (s, t, r)).map(|e| e.value)
    }

    pub fn all_finite(&self) -> bool {
        self.cap_check.is_finite() && self.entries.iter().all(|e| e.value.is_finite())
    }
}

/// A state together with its Λ-blocks.
pub struct Lab {
    state: SlaterExpansion,
    table: LambdaTable,
}

impl Lab {
    pub fn new(state: &SlaterExpansion, max_ops: f64) -> Result<Self> {
        Ok(Lab { state: state.clone(), table: LambdaTable::build(state, max_ops)? })
    }

    pub fn with_table(state: SlaterExpansion, table: LambdaTable) -> Self {
        Lab { state, table }
    }

    pub fn state(&self) -> &SlaterExpansion {
        &self.state
    }

    pub fn table(&self) -> &LambdaTable {
        &self.table
    }

    fn n(&self) -> usize {
        self.state.n()
    }

    /// `L_t(D)` when a core is given, else `G(t, r)`.
    pub fn group_sum(&self, t: usize, r: usize, d: Option<MultiIndex>) -> Result<f64> {
        self.table.group_sum(t, r, d)
    }

    fn blocks(&self, r: usize, core: Core, upto: usize) -> Vec<f64> {
        (0..=upto)
            .map(|s| match core {
                Core::At(d) => self.table.block(d, s),
                Core::Summed => self.table.total(s, r),
            })
            .collect()
    }

    fn check_args(&self, t: usize, r: usize, core: Core) -> Result<()> {
        if t > r || r > self.n() {
            return Err(Error::Size(format!("need t <= r <= N, got t={t}, r={r}, N={}", self.n())));
        }
        if let Core::At(d) = core {
            if d.len() + r != self.n() || !d.within(self.state.m()) {
                return Err(Error::Size(format!("core {d} does not have size N - r = {}", self.n() - r)));
            }
        }
        Ok(())
    }

    /// `L_t(D) ≤ ½C(r,t) L_0(D) + ½ Σ_{s≤t} (-1)^s C(r-s,t) C(r-s,t-s) L_s(D)`.
    pub fn odd_lemma_check(&self, t: usize, r: usize, core: Core) -> Result<InequalityReport> {
        self.check_args(t, r, core)?;
        let l = self.blocks(r, core, t);
        let a = odd_rhs_coeffs(t, r);
        let rhs = a.iter().zip(&l).map(|(a, l)| a * l).sum();
        Ok(InequalityReport::new("odd-lemma", t, Some(r), None, core, l[t], rhs))
    }

    /// The even-order bound for one core (or summed), at a given `τ > 0`.
    pub fn even_lemma_check(&self, t: usize, r: usize, core: Core, tau: f64) -> Result<InequalityReport> {
        if t == 0 {
            return Err(Error::Domain("even lemma needs t >= 1".into()));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        self.check_args(t, r, core)?;
        let l = self.blocks(r, core, t + 1);
        let dot = |c: Vec<f64>| c.iter().zip(&l).map(|(a, l)| a * l).sum::<f64>();
        let rhs = dot(even_rhs_coeffs(t, r, tau));
        let mut rep = InequalityReport::new("even-lemma", t, Some(r), Some(tau), core, l[t], rhs);
        rep.printed_rhs = Some(dot(even_printed_coeffs(t, r, tau)));
        Ok(rep)
    }

    /// Every core of every admissible `r`, followed by one summed report per `r`.
    pub fn odd_lemma_suite(&self, t: usize) -> Result<Vec<InequalityReport>> {
        self.suite(t, |r, core| self.odd_lemma_check(t, r, core))
    }

    pub fn even_lemma_suite(&self, t: usize, tau: f64) -> Result<Vec<InequalityReport>> {
        self.suite(t, |r, core| self.even_lemma_check(t, r, core, tau))
    }

    fn suite<F>(&self, t: usize, f: F) -> Result<Vec<InequalityReport>>
    where
        F: Fn(usize, Core) -> Result<InequalityReport>,
    {
        let (n, m) = (self.n(), self.state.m());
        let mut out = Vec::new();
        for r in t..=n {
            for d in enumerate(n - r, m) {
                out.push(f(r, Core::At(d))?);
            }
            out.push(f(r, Core::Summed)?);
        }
        Ok(out)
    }

    /// `Σ_r G(t, r) ≤ Σ_{s<t} Σ_r C_{s,t}(r) G(s, r)` with constructive constants.
    /// `tau` only matters for even `t`; `None` picks [`default_tau`].
    pub fn proposition_check(&self, t: usize, tau: Option<f64>) -> Result<(InequalityReport, ConstantLedger)> {
        let coeffs = proposition_coefficients(self.n(), t, tau)?;
        let n = self.n();
        let lhs: f64 = (0..=n).map(|r| self.table.total(t, r)).sum();
        let mut rhs = 0.0;
        for s in 0..t {
            for r in 0..=n {
                rhs += coeffs.get(s, r) * self.table.total(s, r);
            }
        }
        let report = InequalityReport::new("proposition", t, None, coeffs.tau, Core::Summed, lhs, rhs);
        Ok((report, coeffs.ledger()))
    }

    pub fn square_identity_check(&self, t: usize, variant: SquareVariant) -> Result<SquareIdentity> {
        squares::check(self, t, variant)
    }

    /// The descending induction from `t = k` to `t = 0`. `direct_hs_sq` is
    /// `‖Γ^(k)‖²_HS` computed independently.
    pub fn theorem_trace(&self, k: usize, direct_hs_sq: f64) -> Result<TheoremTrace> {
        theorem::trace(&self.table, k, direct_hs_sq)
    }
}
