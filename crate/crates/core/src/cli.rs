//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when any identity or inequality
//! fails, 2 on usage or validation errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{self, Manifest};
use crate::decomposition::{decomposition_from_table, LambdaTable, DEFAULT_MAX_OPS};
use crate::error::{Error, Result};
use crate::inequality_lab::{default_tau, scale, ConstantLedger, InequalityReport, Lab, TheoremTrace, REL_TOL};
use crate::json;
use crate::multiindex::{count, MultiIndex};
use crate::rdm::{rdm_slater, spectrum, SpectrumReport};
use crate::state::{SlaterExpansion, DEFAULT_MAX_DENSE_ENTRIES};

#[derive(Debug, Parser)]
#[command(name = "fermi-rdm", version, about = "Fermionic reduced density matrices and their norm bounds")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "FERMI_RDM_THREADS")]
    pub threads: Option<usize>,
    /// JSON file with defaults for the options below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub max_dense_entries: Option<f64>,
    #[arg(long, global = true)]
    pub max_ops: Option<f64>,
    /// Relative tolerance for identities and inequalities.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a state file.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        support: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Occupied orbitals of a Slater determinant, e.g. `1,2,5`.
        #[arg(long, value_delimiter = ',')]
        orbitals: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum and entropies of `Γ^(k)`.
    Rdm {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        k: usize,
        /// Report `γ^(k) = Γ^(k) / C(N,k)` instead.
        #[arg(long)]
        normalized: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the Λ-block decomposition of `‖Γ^(k)‖²_HS`.
    VerifyIdentity {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the per-core bounds, the summed bound and the induction.
    VerifyInequalities {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        tau: Option<f64>,
        /// Restrict to one check; default runs every check applicable to `t`.
        #[arg(long, value_enum)]
        lemma: Option<LemmaKind>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaling table over `n`, with `m = 2n`.
    Sweep {
        #[arg(long, value_enum, default_value_t = Family::Random)]
        family: Family,
        #[arg(long)]
        k: usize,
        /// Inclusive, `lo:hi`.
        #[arg(long, default_value = "3:6")]
        n_range: String,
        /// Seeds `1..=seeds` (random family only).
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value_t = 8)]
        support: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the whole acceptance suite over a corpus.
    Corpus {
        /// Manifest JSON; the built-in corpus when omitted.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Slater,
    Yang,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaKind {
    Odd,
    Even,
    Prop,
    Theorem,
}

/// Contents of `--config`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub threads: Option<usize>,
    pub max_dense_entries: Option<f64>,
    pub max_ops: Option<f64>,
    pub tolerance: Option<f64>,
}

/// Resolved settings: flags, then config file, then defaults.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub threads: Option<usize>,
    pub max_dense_entries: f64,
    pub max_ops: f64,
    pub tolerance: f64,
}

impl Settings {
    pub fn resolve(global: &GlobalOpts) -> Result<Settings> {
        let file = match &global.config {
            Some(p) => serde_json::from_str::<ConfigFile>(&std::fs::read_to_string(p)?)
                .map_err(|e| Error::Validation(format!("config {}: {e}", p.display())))?,
            None => ConfigFile::default(),
        };
        let s = Settings {
            threads: global.threads.or(file.threads),
            max_dense_entries: global.max_dense_entries.or(file.max_dense_entries).unwrap_or(DEFAULT_MAX_DENSE_ENTRIES),
            max_ops: global.max_ops.or(file.max_ops).unwrap_or(DEFAULT_MAX_OPS),
            tolerance: global.tolerance.or(file.tolerance).unwrap_or(REL_TOL),
        };
        if s.threads == Some(0) {
            return Err(Error::Validation("threads must be positive".into()));
        }
        for (name, v) in [("max_dense_entries", s.max_dense_entries), ("max_ops", s.max_ops), ("tolerance", s.tolerance)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(s)
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) | Error::ZeroState => 1,
        _ => 2,
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// `Ok(true)` when everything checked passes.
pub fn run(cli: &Cli) -> Result<bool> {
    let settings = Settings::resolve(&cli.global)?;
    if let Some(n) = settings.threads {
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Gen { family, n, m, support, seed, orbitals, out } => {
            let state = generate(*family, *n, *m, *support, *seed, orbitals.as_deref())?;
            emit(out.as_deref(), &state.to_json()?)?;
            Ok(true)
        }
        Command::Rdm { state, k, normalized, out } => {
            let state = SlaterExpansion::load(state)?;
            let rdm = rdm_slater(&state, *k)?;
            let report = RdmReport { method: "slater", spectrum: spectrum(&rdm, *normalized)? };
            emit(out.as_deref(), &json::to_canonical_string(&report)?)?;
            Ok(true)
        }
        Command::VerifyIdentity { state, k, out } => {
            let state = SlaterExpansion::load(state)?;
            let table = LambdaTable::build(&state, settings.max_ops)?;
            let direct = rdm_slater(&state, *k)?.hs_norm_sqr();
            let decomposition = decomposition_from_table(&table, *k, direct)?;
            let pass = decomposition.passes(settings.tolerance);
            let report = IdentityReport {
                relative_residual: decomposition.relative_residual(),
                tolerance: settings.tolerance,
                pass,
                decomposition,
            };
            emit(out.as_deref(), &json::to_canonical_string(&report)?)?;
            Ok(pass)
        }
        Command::VerifyInequalities { state, t, tau, lemma, out } => {
            let state = SlaterExpansion::load(state)?;
            let report = verify_inequalities(&state, *t, *tau, *lemma, &settings)?;
            emit(out.as_deref(), &json::to_canonical_string(&report)?)?;
            Ok(report.pass)
        }
        Command::Sweep { family, k, n_range, seeds, support, out } => {
            let (lo, hi) = parse_range(n_range)?;
            let rows = sweep(*family, *k, lo, hi, *seeds, *support, settings.max_ops)?;
            let text = sweep_csv(&rows)?;
            emit(out.as_deref(), &text)?;
            Ok(rows.iter().all(|r| r.certified))
        }
        Command::Corpus { manifest, out } => {
            let mut manifest = match manifest {
                Some(p) => Manifest::load(p)?,
                None => Manifest::default(),
            };
            if cli.global.max_ops.is_some() || cli.global.config.is_some() {
                manifest.max_ops = settings.max_ops;
            }
            let (outcomes, summary) = corpus::run_all(&manifest)?;
            for o in &outcomes {
                println!("{}", o.line());
            }
            let pass = outcomes.iter().all(|o| o.pass);
            if let Some(p) = out {
                let report = serde_json::json!({
                    "entries": manifest.entries().len(),
                    "outcomes": outcomes,
                    "summary": summary,
                    "pass": pass,
                });
                std::fs::write(p, json::to_canonical_string(&report)?)?;
            }
            Ok(pass)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn generate(
    family: Family,
    n: usize,
    m: usize,
    support: usize,
    seed: u64,
    orbitals: Option<&[usize]>,
) -> Result<SlaterExpansion> {
    if orbitals.is_some() && family != Family::Slater {
        return Err(Error::Validation("--orbitals only applies to the slater family".into()));
    }
    match family {
        Family::Slater => {
            let key = match orbitals {
                Some(o) => MultiIndex::from_orbitals(o)?,
                None => MultiIndex::full(n),
            };
            if key.len() != n {
                return Err(Error::Validation(format!("{} orbitals given for n = {n}", key.len())));
            }
            SlaterExpansion::slater_state(key, m)
        }
        Family::Yang => SlaterExpansion::yang_pairing_state(n, m),
        Family::Random => SlaterExpansion::random_state(n, m, support, seed),
    }
}

#[derive(Serialize)]
struct RdmReport {
    method: &'static str,
    #[serde(flatten)]
    spectrum: SpectrumReport,
}

#[derive(Serialize)]
struct IdentityReport {
    decomposition: crate::decomposition::DecompositionReport,
    relative_residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
pub struct InequalityRun {
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub tau: Option<f64>,
    pub checks: Vec<LemmaKind>,
    pub tolerance: f64,
    pub reports: Vec<InequalityReport>,
    pub ledgers: Vec<ConstantLedger>,
    pub theorem: Option<TheoremTrace>,
    pub total: usize,
    /// Failing reports, repeated here for quick inspection.
    pub failures: Vec<InequalityReport>,
    pub pass: bool,
}

pub fn verify_inequalities(
    state: &SlaterExpansion,
    t: usize,
    tau: Option<f64>,
    lemma: Option<LemmaKind>,
    settings: &Settings,
) -> Result<InequalityRun> {
    let n = state.n();
    if t == 0 || t > n {
        return Err(Error::Validation(format!("need 1 <= t <= N = {n}, got {t}")));
    }
    let even = t % 2 == 0;
    let checks = match lemma {
        Some(LemmaKind::Odd) if even => return Err(Error::Validation(format!("odd lemma needs odd t, got {t}"))),
        Some(LemmaKind::Even) if !even => return Err(Error::Validation(format!("even lemma needs even t, got {t}"))),
        Some(l) => vec![l],
        None => vec![if even { LemmaKind::Even } else { LemmaKind::Odd }, LemmaKind::Prop, LemmaKind::Theorem],
    };
    let lab = Lab::new(state, settings.max_ops)?;
    let mut reports = Vec::new();
    let mut ledgers = Vec::new();
    let mut theorem = None;
    for check in &checks {
        match check {
            LemmaKind::Odd => reports.extend(lab.odd_lemma_suite(t)?),
            LemmaKind::Even => reports.extend(lab.even_lemma_suite(t, tau.unwrap_or_else(|| default_tau(n, t)))?),
            LemmaKind::Prop => {
                let (r, l) = lab.proposition_check(t, tau)?;
                reports.push(r);
                ledgers.push(l);
            }
            LemmaKind::Theorem => {
                let direct = rdm_slater(state, t)?.hs_norm_sqr();
                let tr = lab.theorem_trace(t, direct)?;
                reports.extend(tr.reports.iter().cloned());
                theorem = Some(tr);
            }
        }
    }
    for r in &mut reports {
        r.pass = r.slack >= -settings.tolerance * scale(r.lhs, r.rhs);
    }
    let failures: Vec<_> = reports.iter().filter(|r| !r.pass).cloned().collect();
    Ok(InequalityRun {
        n,
        m: state.m(),
        t,
        tau,
        checks,
        tolerance: settings.tolerance,
        total: reports.len(),
        pass: failures.is_empty(),
        reports,
        ledgers,
        theorem,
        failures,
    })
}

pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Validation(format!("range must look like lo:hi, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: usize = a.trim().parse().map_err(|_| bad())?;
    let hi: usize = b.trim().parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// One row of the scaling table. `certified_bound` bounds `‖Γ^(k)‖²_HS` for
/// every normalized state with this `N`; `realized_ck = certified_bound / N^k`.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    pub hs_norm: f64,
    pub op_norm: f64,
    pub trace: f64,
    pub entropy: f64,
    pub renyi2: f64,
    pub certified_bound: f64,
    pub realized_ck: f64,
    #[serde(skip)]
    pub certified: bool,
}

pub fn sweep(family: Family, k: usize, lo: usize, hi: usize, seeds: u64, support: usize, max_ops: f64) -> Result<Vec<SweepRow>> {
    let mut cells = Vec::new();
    for n in lo..=hi {
        if n < k || (family == Family::Yang && n % 2 == 1) {
            continue;
        }
        let m = 2 * n;
        let seed_list: Vec<u64> = if family == Family::Random { (1..=seeds).collect() } else { vec![0] };
        for seed in seed_list {
            cells.push((n, m, seed));
        }
    }
    if cells.is_empty() {
        return Err(Error::Validation(format!("no admissible n in {lo}:{hi} for k = {k}")));
    }
    cells
        .into_par_iter()
        .map(|(n, m, seed)| {
            let supp = support.min(usize::try_from(count(m, n)).unwrap_or(usize::MAX));
            let state = generate(family, n, m, supp, seed, None)?;
            let rdm = rdm_slater(&state, k)?;
            let sp = spectrum(&rdm, false)?;
            let lab = Lab::new(&state, max_ops)?;
            let tr = lab.theorem_trace(k, rdm.hs_norm_sqr())?;
            Ok(SweepRow {
                n,
                m,
                k,
                seed,
                hs_norm: sp.hs_norm,
                op_norm: sp.op_norm,
                trace: sp.trace,
                entropy: sp.von_neumann,
                renyi2: sp.renyi2,
                certified_bound: tr.bound,
                realized_ck: tr.realized_ck,
                certified: tr.pass,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record([
        "n", "m", "k", "seed", "hs_norm", "op_norm", "trace", "S", "S2", "certified_bound", "realized_Ck",
    ])
    .map_err(io)?;
    for r in rows {
        let f = json::format_f64;
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            r.seed.to_string(),
            f(r.hs_norm),
            f(r.op_norm),
            f(r.trace),
            f(r.entropy),
            f(r.renyi2),
            f(r.certified_bound),
            f(r.realized_ck),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}
