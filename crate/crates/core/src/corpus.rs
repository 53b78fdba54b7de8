//! The reproducible test corpus and the checks run over it.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::{decomposition_from_table, LambdaTable};
use crate::error::{Error, Result};
use crate::inequality_lab::{Lab, SquareVariant};
use crate::json;
use crate::multiindex::{
    binomial, count, relative_sign, sums, MultiIndex, Sign, MAX_ORBITALS,
};
use crate::rdm::{entropy_certificate_of, rdm_dense_oracle, rdm_dense_oracle_from, rdm_slater, spectrum};
use crate::state::SlaterExpansion;

/// Support size of a corpus state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SupportSpec {
    Count(usize),
    Keyword(FullSupport),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FullSupport {
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub seeds: Vec<u64>,
    pub particles: Vec<usize>,
    /// `m` runs over `n+1..=max_orbitals`.
    pub max_orbitals: usize,
    pub supports: Vec<SupportSpec>,
    /// States with `m^n` above this skip the dense comparison.
    pub dense_limit: f64,
    pub max_ops: f64,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            seeds: (1..=20).collect(),
            particles: (3..=6).collect(),
            max_orbitals: 10,
            supports: vec![
                SupportSpec::Count(3),
                SupportSpec::Count(8),
                SupportSpec::Keyword(FullSupport::Full),
            ],
            dense_limit: 1e6,
            max_ops: crate::decomposition::DEFAULT_MAX_OPS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CorpusEntry {
    pub n: usize,
    pub m: usize,
    pub support: usize,
    pub seed: u64,
}

impl CorpusEntry {
    pub fn state(&self) -> Result<SlaterExpansion> {
        SlaterExpansion::random_state(self.n, self.m, self.support, self.seed)
    }
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Manifest> {
        let m: Manifest = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, json::to_canonical_string(self)?)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_orbitals > MAX_ORBITALS {
            return Err(Error::Validation(format!("max_orbitals above {MAX_ORBITALS}")));
        }
        if self.particles.contains(&0) {
            return Err(Error::Validation("particle counts must be positive".into()));
        }
        if self.supports.contains(&SupportSpec::Count(0)) {
            return Err(Error::Validation("support sizes must be positive".into()));
        }
        if !(self.dense_limit > 0.0 && self.max_ops > 0.0) {
            return Err(Error::Validation("budgets must be positive".into()));
        }
        Ok(())
    }

    /// Every `(n, m, support, seed)`, supports clamped to `C(m, n)`, deduplicated.
    pub fn entries(&self) -> Vec<CorpusEntry> {
        let mut out = BTreeSet::new();
        for &n in &self.particles {
            for m in n + 1..=self.max_orbitals {
                let full = usize::try_from(count(m, n)).unwrap_or(usize::MAX);
                for spec in &self.supports {
                    let support = match spec {
                        SupportSpec::Count(c) => (*c).min(full),
                        SupportSpec::Keyword(FullSupport::Full) => full,
                    };
                    for &seed in &self.seeds {
                        out.insert(CorpusEntry { n, m, support, seed });
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Distinct `(n, m)` pairs.
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.entries().iter().map(|e| (e.n, e.m)).collect();
        v.dedup();
        v
    }
}

/// A corpus state with its Λ-blocks.
pub struct Prepared {
    pub entry: CorpusEntry,
    pub lab: Lab,
}

impl Prepared {
    pub fn state(&self) -> &SlaterExpansion {
        self.lab.state()
    }
}

pub fn prepare(manifest: &Manifest) -> Result<Vec<Prepared>> {
    manifest
        .entries()
        .into_par_iter()
        .map(|entry| {
            let state = entry.state()?;
            let table = LambdaTable::build(&state, manifest.max_ops)?;
            Ok(Prepared { entry, lab: Lab::with_table(state, table) })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub checked: usize,
    pub detail: String,
    pub seconds: f64,
    /// Up to 20 failing items.
    pub failures: Vec<serde_json::Value>,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} checked={:<7} {} ({:.1}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checked,
            self.detail,
            self.seconds
        )
    }
}

struct Tally {
    checked: usize,
    failures: Vec<serde_json::Value>,
    failed: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally { checked: 0, failures: Vec::new(), failed: 0, worst: 0.0 }
    }

    fn record<T: Serialize>(&mut self, ok: bool, measure: f64, item: impl FnOnce() -> T) {
        self.checked += 1;
        self.worst = if self.worst.is_nan() || measure.is_nan() { f64::NAN } else { self.worst.max(measure) };
        if !ok {
            self.failed += 1;
            if self.failures.len() < 20 {
                self.failures.push(serde_json::to_value(item()).unwrap_or_default());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.failed += other.failed;
        self.worst = if self.worst.is_nan() || other.worst.is_nan() { f64::NAN } else { self.worst.max(other.worst) };
        for f in other.failures {
            if self.failures.len() < 20 {
                self.failures.push(f);
            }
        }
        self
    }

    fn finish(self, id: u8, name: &'static str, start: Instant, what: &str) -> Outcome {
        Outcome {
            id,
            name,
            pass: self.failed == 0 && self.checked > 0,
            checked: self.checked,
            detail: format!("failed={} worst {what}={:.3e}", self.failed, self.worst),
            seconds: start.elapsed().as_secs_f64(),
            failures: self.failures,
        }
    }
}

fn per_state<F>(corpus: &[Prepared], f: F) -> Tally
where
    F: Fn(&Prepared, &mut Tally) + Sync,
{
    corpus
        .par_iter()
        .map(|p| {
            let mut t = Tally::new();
            f(p, &mut t);
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::new(), Tally::merge)
}

fn err_item(entry: &CorpusEntry, e: &Error) -> serde_json::Value {
    serde_json::json!({"entry": entry, "error": e.to_string()})
}

/// Criterion 1: Sparse and dense constructions agree entrywise.
pub fn oracle_equivalence(corpus: &[Prepared], dense_limit: f64) -> Outcome {
    let start = Instant::now();
    let tally = per_state(corpus, |p, t| {
        let (n, m) = (p.entry.n, p.entry.m);
        if (m as f64).powi(n as i32) > dense_limit {
            return;
        }
        let dense = match p.state().to_dense(dense_limit) {
            Ok(d) => d,
            Err(e) => return t.record(false, f64::NAN, || err_item(&p.entry, &e)),
        };
        for k in 0..=n {
            let diff = rdm_slater(p.state(), k)
                .and_then(|a| Ok(a.max_abs_diff(&rdm_dense_oracle_from(&dense, n, k)?)));
            match diff {
                Ok(d) => t.record(d <= 1e-12, d, || serde_json::json!({"entry": p.entry, "k": k, "diff": d})),
                Err(e) => t.record(false, f64::NAN, || err_item(&p.entry, &e)),
            }
        }
    });
    tally.finish(1, "oracle-equivalence", start, "entry diff")
}

/// Criterion 2: `Tr Γ^(k) = C(N, k)` for `k <= 3`.
pub fn trace_identity(corpus: &[Prepared]) -> Outcome {
    let start = Instant::now();
    let tally = per_state(corpus, |p, t| {
        for k in 0..=p.entry.n.min(3) {
            match rdm_slater(p.state(), k) {
                Ok(g) => {
                    let d = (g.trace() - binomial(p.entry.n as i64, k as i64)).abs();
                    t.record(d <= 1e-10, d, || serde_json::json!({"entry": p.entry, "k": k, "diff": d}))
                }
                Err(e) => t.record(false, f64::NAN, || err_item(&p.entry, &e)),
            }
        }
    });
    tally.finish(2, "trace-identity", start, "abs diff")
}

/// Criterion 3: The Λ-block decomposition reproduces `‖Γ^(k)‖²_HS`, `k ∈ {1,2,3}`.
pub fn decomposition_identity(corpus: &[Prepared]) -> Outcome {
    let start = Instant::now();
    let tally = per_state(corpus, |p, t| {
        for k in 1..=p.entry.n.min(3) {
            let rep = rdm_slater(p.state(), k).and_then(|g| decomposition_from_table(p.lab.table(), k, g.hs_norm_sqr()));
            match rep {
                Ok(rep) => {
                    let rel = rep.relative_residual();
                    t.record(rel <= 1e-10, rel, || serde_json::json!({"entry": p.entry, "k": k, "residual": rep.residual}))
                }
                Err(e) => t.record(false, f64::NAN, || err_item(&p.entry, &e)),
            }
        }
    });
    tally.finish(3, "hs-decomposition", start, "rel residual")
}

/// Slater determinants used for the extremality check: lowest, highest and
/// one seeded key per shape.
pub fn slater_probes(manifest: &Manifest) -> Vec<SlaterExpansion> {
    let mut out = Vec::new();
    for (n, m) in manifest.shapes() {
        let total = count(m, n);
        let mut rng = ChaCha8Rng::seed_from_u64((n * 100 + m) as u64);
        for rank in [0, total - 1, rng.gen_range(0..total)] {
            let key = MultiIndex::unrank(rank, n);
            out.push(SlaterExpansion::slater_state(key, m).expect("key inside space"));
        }
    }
    out
}

/// Criterion 4: Slater states: `‖Γ^(k)‖_HS = √C(N,k)`, `S(γ^(k)) = log C(N,k)`.
pub fn slater_extremality(manifest: &Manifest) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::new();
    for s in slater_probes(manifest) {
        for k in 0..=s.n() {
            let b = binomial(s.n() as i64, k as i64);
            match rdm_slater(&s, k).and_then(|g| spectrum(&g, true).map(|sp| (g.hs_norm_sqr().sqrt(), sp))) {
                Ok((hs, sp)) => {
                    let dh = (hs - b.sqrt()).abs();
                    let de = (sp.von_neumann - b.ln()).abs();
                    t.record(dh <= 1e-12 && de <= 1e-10, dh.max(de), || {
                        serde_json::json!({"n": s.n(), "m": s.m(), "k": k, "hs": hs, "entropy": sp.von_neumann})
                    })
                }
                Err(e) => t.record(false, f64::NAN, || e.to_string()),
            }
        }
    }
    t.finish(4, "slater-extremality", start, "deviation")
}

/// Sign of the permutation sorting `(a, b)`, by counting inversions of the
/// concatenated label list.
pub fn inversion_sign(a: MultiIndex, b: MultiIndex) -> Sign {
    let v: Vec<usize> = a.orbitals().chain(b.orbitals()).collect();
    let mut inv = 0usize;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inv += 1;
            }
        }
    }
    Sign::from_parity(inv % 2 == 1)
}

/// Random pairwise disjoint `(a, b, d)` inside `{1..m}`.
fn random_disjoint(rng: &mut ChaCha8Rng, m: usize) -> (MultiIndex, MultiIndex, MultiIndex) {
    let mut parts = [MultiIndex::EMPTY; 3];
    for o in 1..=m {
        let slot = rng.gen_range(0..4);
        if slot < 3 {
            parts[slot] = parts[slot].join(MultiIndex::singleton(o));
        }
    }
    (parts[0], parts[1], parts[2])
}

/// Criterion 5: Sign-calculus laws on random tuples; exhaustive agreement with the
/// inversion count for `m <= 10`.
pub fn sign_calculus(samples: usize, seed: u64) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let m = rng.gen_range(1..=12);
        let (a, b, d) = random_disjoint(&mut rng, m);
        let sab = relative_sign(a, b).unwrap();
        let element = a
            .orbitals()
            .map(|x| relative_sign(MultiIndex::singleton(x), b).unwrap())
            .fold(Sign::Plus, |acc, s| acc * s);
        let flip = Sign::from_parity(a.len() * b.len() % 2 == 1);
        let reverse = flip * relative_sign(b, a).unwrap();
        let union = relative_sign(a, b.join(d)).unwrap();
        let product = sab * relative_sign(a, d).unwrap();
        let ok = sab == element && sab == reverse && union == product;
        t.record(ok, 0.0, || serde_json::json!({"a": a, "b": b, "d": d}));
    }
    for m in 0..=10usize {
        // every disjoint pair: each orbital goes to a, b, or neither
        let total = 3usize.pow(m as u32);
        for code in 0..total {
            let (mut a, mut b, mut c) = (MultiIndex::EMPTY, MultiIndex::EMPTY, code);
            for o in 1..=m {
                match c % 3 {
                    0 => a = a.join(MultiIndex::singleton(o)),
                    1 => b = b.join(MultiIndex::singleton(o)),
                    _ => {}
                }
                c /= 3;
            }
            let ok = relative_sign(a, b).unwrap() == inversion_sign(a, b);
            t.record(ok, 0.0, || serde_json::json!({"a": a, "b": b}));
        }
    }
    t.finish(5, "sign-calculus", start, "mismatch")
}

fn mix(mut x: u64) -> u64 {
    // splitmix64 finalizer
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// A random integer table on pairs of multi-indices.
pub fn random_table(seed: u64, a: MultiIndex, b: MultiIndex) -> i64 {
    let h = mix(seed ^ mix(a.bits() as u64) ^ mix(mix(b.bits() as u64)));
    (h % 2001) as i64 - 1000
}

/// Criterion 6: The three sum-rewriting identities as exact integer equalities.
pub fn combinatorial_lemmas(tables: usize, seed: u64) -> Outcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..tables {
        let n = rng.gen_range(1..=4usize);
        let m = rng.gen_range(n..=4usize);
        let space = rng.gen_range(n.max(m)..=8usize);
        let ts: u64 = rng.gen();
        let f = |a: MultiIndex, b: MultiIndex| random_table(ts, a, b);
        let g = |a: MultiIndex, b: MultiIndex| if a.is_disjoint(b) { random_table(ts, a, b) } else { 0 };
        let h = |a: MultiIndex| random_table(ts, a, MultiIndex::EMPTY);
        let (l1, r1) = sums::core_split(n, m, space, f);
        let (l2, r2) = sums::merge_pairs(n, m, space, g);
        let (l3, r3) = sums::merged_multiplicity(n, m, space, h);
        let ok = l1 == r1 && l2 == r2 && l3 == r3;
        t.record(ok, 0.0, || serde_json::json!({"table": i, "n": n, "m": m, "space": space, "sides": [l1, r1, l2, r2, l3, r3]}));
    }
    t.finish(6, "combinatorial-lemmas", start, "mismatch")
}

/// Criterion 7: Per-core odd (`t ∈ {1,3}`) and even (`t = 2`, `τ ∈ {½, 1, N}`) bounds.
pub fn inequality_suite(corpus: &[Prepared]) -> Outcome {
    let start = Instant::now();
    let tally = per_state(corpus, |p, t| {
        let lab = &p.lab;
        let n = p.entry.n;
        let mut reports = Vec::new();
        for order in [1, 3] {
            if order <= n {
                match lab.odd_lemma_suite(order) {
                    Ok(r) => reports.extend(r),
                    Err(e) => return t.record(false, f64::NAN, || err_item(&p.entry, &e)),
                }
            }
        }
        for tau in [0.5, 1.0, n as f64] {
            match lab.even_lemma_suite(2, tau) {
                Ok(r) => reports.extend(r),
                Err(e) => return t.record(false, f64::NAN, || err_item(&p.entry, &e)),
            }
        }
        for r in reports {
            let viol = -r.slack / crate::inequality_lab::scale(r.lhs, r.rhs);
            t.record(r.pass, viol, || serde_json::json!({"entry": p.entry, "report": r}));
        }
    });
    tally.finish(7, "inequality-suite", start, "rel violation")
}

/// Criterion 8: Sums-of-squares identities, every variant, `t ∈ {1,2,3}`.
pub fn square_identities(corpus: &[Prepared]) -> Outcome {
    let start = Instant::now();
    let tally = per_state(corpus, |p, t| {
        let lab = &p.lab;
        for order in 1..=p.entry.n.min(3) {
            for v in SquareVariant::ALL {
                match lab.square_identity_check(order, v) {
                    Ok(id) => t.record(id.pass, id.worst_relative, || serde_json::json!({"entry": p.entry, "identity": id})),
                    Err(e) => t.record(false, f64::NAN, || err_item(&p.entry, &e)),
                }
            }
        }
    });
    tally.finish(8, "square-identities", start, "rel residual")
}

/// Realized constants across the corpus.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CertificateSummary {
    /// `max realized C_k` for `k = 1, 2, 3`.
    pub max_realized_ck: [f64; 3],
    /// `max ‖Γ^(2)‖_HS / N`.
    pub max_hs2_over_n: f64,
    /// `max cap_check` of the proposition ledgers, `t = 1, 2, 3`.
    pub max_prop_cap: [f64; 3],
}

/// Criterion 9: soundness of the induction bound for `k ∈ {1,2,3}` and the propositions it uses.
pub fn certificate_soundness(corpus: &[Prepared]) -> (Outcome, CertificateSummary) {
    let start = Instant::now();
    let results: Vec<(Tally, CertificateSummary)> = corpus
        .par_iter()
        .map(|p| {
            let mut t = Tally::new();
            let mut sum = CertificateSummary::default();
            let lab = &p.lab;
            for k in 1..=p.entry.n.min(3) {
                let out = rdm_slater(p.state(), k).and_then(|g| {
                    let hs = g.hs_norm_sqr();
                    lab.theorem_trace(k, hs).map(|tr| (hs, tr))
                });
                match out {
                    Ok((hs, tr)) => {
                        let ok = tr.pass && tr.realized_ck.is_finite() && tr.ledger.all_finite();
                        sum.max_realized_ck[k - 1] = sum.max_realized_ck[k - 1].max(tr.realized_ck);
                        if k == 2 {
                            sum.max_hs2_over_n = sum.max_hs2_over_n.max(hs.sqrt() / p.entry.n as f64);
                        }
                        let gap = (tr.direct_hs_sq - tr.state_bound) / tr.direct_hs_sq.max(1.0);
                        t.record(ok, gap, || serde_json::json!({"entry": p.entry, "k": k, "reports": tr.reports}));
                    }
                    Err(e) => t.record(false, f64::NAN, || err_item(&p.entry, &e)),
                }
                match lab.proposition_check(k, None) {
                    Ok((rep, ledger)) => {
                        sum.max_prop_cap[k - 1] = sum.max_prop_cap[k - 1].max(ledger.cap_check);
                        let viol = -rep.slack / crate::inequality_lab::scale(rep.lhs, rep.rhs);
                        t.record(rep.pass && ledger.all_finite(), viol, || serde_json::json!({"entry": p.entry, "report": rep}));
                    }
                    Err(e) => t.record(false, f64::NAN, || err_item(&p.entry, &e)),
                }
            }
            (t, sum)
        })
        .collect();
    let mut tally = Tally::new();
    let mut summary = CertificateSummary::default();
    for (t, s) in results {
        tally = tally.merge(t);
        for i in 0..3 {
            summary.max_realized_ck[i] = summary.max_realized_ck[i].max(s.max_realized_ck[i]);
            summary.max_prop_cap[i] = summary.max_prop_cap[i].max(s.max_prop_cap[i]);
        }
        summary.max_hs2_over_n = summary.max_hs2_over_n.max(s.max_hs2_over_n);
    }
    let mut out = tally.finish(9, "certificate-soundness", start, "rel gap (<=0 ok)");
    out.detail.push_str(&format!(
        " realized C_1..3 max = {:.3} {:.3} {:.3}",
        summary.max_realized_ck[0], summary.max_realized_ck[1], summary.max_realized_ck[2]
    ));
    (out, summary)
}

/// Criterion 10: `S ≥ -log ‖γ‖²_HS` and `S₂` on the floor, `k <= 3`.
pub fn entropy_floors(corpus: &[Prepared]) -> Outcome {
    let start = Instant::now();
    let tally = per_state(corpus, |p, t| {
        for k in 0..=p.entry.n.min(3) {
            match rdm_slater(p.state(), k).and_then(|g| entropy_certificate_of(&g)) {
                Ok(c) => {
                    let bad = (-c.floor_gap).max(c.renyi_gap.abs());
                    t.record(c.floor_gap >= -1e-10 && c.renyi_gap.abs() <= 1e-10, bad, || {
                        serde_json::json!({"entry": p.entry, "certificate": c})
                    })
                }
                Err(e) => t.record(false, f64::NAN, || err_item(&p.entry, &e)),
            }
        }
    });
    tally.finish(10, "entropy-floors", start, "violation")
}

/// Criterion 11: The pairing state beats a Slater determinant in `λ_max(Γ^(2))` but
/// stays within `N`.
pub fn yang_sanity() -> Outcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let run = || -> Result<(f64, f64)> {
        let y = SlaterExpansion::yang_pairing_state(4, 8)?;
        let s = SlaterExpansion::slater_state(MultiIndex::from_orbitals(&[1, 2, 3, 4])?, 8)?;
        let ly = spectrum(&rdm_dense_oracle(&y, 2, 1e8)?, false)?.op_norm;
        let ls = spectrum(&rdm_dense_oracle(&s, 2, 1e8)?, false)?.op_norm;
        Ok((ly, ls))
    };
    let detail = match run() {
        Ok((ly, ls)) => {
            t.record(ly <= 4.0 + 1e-8, 0.0, || serde_json::json!({"yang_lambda_max": ly}));
            t.record(ly > ls, 0.0, || serde_json::json!({"yang_lambda_max": ly, "slater_lambda_max": ls}));
            format!("lambda_max yang={ly:.12} slater={ls:.12} bound=4")
        }
        Err(e) => {
            t.record(false, f64::NAN, || e.to_string());
            e.to_string()
        }
    };
    let mut out = t.finish(11, "yang-sanity", start, "n/a");
    out.detail = format!("{} {detail}", out.detail.split(" worst").next().unwrap_or(""));
    out
}

/// The full suite in criterion order.
pub fn run_all(manifest: &Manifest) -> Result<(Vec<Outcome>, CertificateSummary)> {
    let corpus = prepare(manifest)?;
    let (cert, summary) = certificate_soundness(&corpus);
    let out = vec![
        oracle_equivalence(&corpus, manifest.dense_limit),
        trace_identity(&corpus),
        decomposition_identity(&corpus),
        slater_extremality(manifest),
        sign_calculus(10_000, 12),
        combinatorial_lemmas(100, 6),
        inequality_suite(&corpus),
        square_identities(&corpus),
        cert,
        entropy_floors(&corpus),
        yang_sanity(),
    ];
    Ok((out, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_manifest_shape() {
        let m = Manifest::default();
        let e = m.entries();
        // (3: 7 shapes, 4: 6, 5: 5, 6: 4) x 3 supports x 20 seeds, minus clamped duplicates
        assert!(e.len() > 1200 && e.len() <= 22 * 3 * 20);
        assert!(e.iter().all(|x| x.support as u128 <= count(x.m, x.n)));
        let text = json::to_canonical_string(&m).unwrap();
        let back: Manifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn inversion_oracle_examples() {
        let a = MultiIndex::from_orbitals(&[2, 4]).unwrap();
        let b = MultiIndex::from_orbitals(&[1, 3]).unwrap();
        assert_eq!(inversion_sign(a, b), Sign::Minus);
    }
}
