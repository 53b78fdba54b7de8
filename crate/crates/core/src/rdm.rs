//! k-particle reduced density matrices, their spectra and entropies.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiindex::{binomial, count, enumerate, sign_parity, subset_stream, MultiIndex};
use crate::state::{permutation_parity, SlaterExpansion};

/// Eigenvalues below this are treated as zero in entropies.
pub const EIGEN_CLAMP: f64 = 1e-14;
/// More negative than this and the matrix is not PSD.
pub const NEGATIVE_EIGEN_LIMIT: f64 = -1e-8;
/// Largest basis dimension we are willing to store densely.
pub const MAX_BASIS: u128 = 6000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RdmMethod {
    Slater,
    DenseOracle,
}

/// `Γ^(k)` over the full basis of `k`-subsets of `{1..m}`, in [`enumerate`] order.
#[derive(Clone, Debug)]
pub struct Rdm {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub method: RdmMethod,
    pub basis: Vec<MultiIndex>,
    pub matrix: DMatrix<Complex64>,
}

impl Rdm {
    fn zeros(n: usize, m: usize, k: usize, method: RdmMethod) -> Result<Rdm> {
        if k > n {
            return Err(Error::Domain(format!("k = {k} exceeds particle count {n}")));
        }
        let dim = count(m, k);
        if dim > MAX_BASIS {
            return Err(Error::Budget { what: "rdm basis dimension", needed: dim as f64, cap: MAX_BASIS as f64 });
        }
        let basis: Vec<_> = enumerate(k, m).collect();
        let dim = basis.len();
        Ok(Rdm { n, m, k, method, basis, matrix: DMatrix::zeros(dim, dim) })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    pub fn hs_norm_sqr(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Rdm) -> f64 {
        assert_eq!(self.basis, other.basis);
        self.matrix.iter().zip(other.matrix.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn entry(&self, alpha: MultiIndex, beta: MultiIndex) -> Complex64 {
        self.matrix[(alpha.rank(), beta.rank())]
    }
}

/// `Γ_{αβ} = Σ_{|A|=N-k} sgn(α,A) sgn(β,A) c_{A∪α} c̄_{A∪β}`.
///
/// Every support key `K` is split as `A ∪ α` in all `C(N,k)` ways; keys that
/// share the same remainder `A` contribute an outer product.
pub fn rdm_slater(state: &SlaterExpansion, k: usize) -> Result<Rdm> {
    let mut rdm = Rdm::zeros(state.n(), state.m(), k, RdmMethod::Slater)?;
    let mut groups: BTreeMap<MultiIndex, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (&key, &c) in state.coeffs() {
        for alpha in subset_stream(key, k) {
            let rest = key.difference(alpha);
            let v = if sign_parity(alpha, rest) { -c } else { c };
            groups.entry(rest).or_default().push((alpha.rank(), v));
        }
    }
    let groups: Vec<_> = groups.into_values().collect();
    let dim = rdm.dim();
    // chunking depends only on the input, so the summation order is fixed
    let chunks = (groups.len() / 256).clamp(1, 8);
    let per = groups.len().div_ceil(chunks).max(1);
    let partials: Vec<DMatrix<Complex64>> = groups
        .par_chunks(per)
        .map(|chunk| {
            let mut part = DMatrix::zeros(dim, dim);
            for g in chunk {
                for &(a, va) in g {
                    for &(b, vb) in g {
                        part[(a, b)] += va * vb.conj();
                    }
                }
            }
            part
        })
        .collect();
    for p in partials {
        rdm.matrix += p;
    }
    Ok(rdm)
}

/// `C(N,k) Tr_{k+1..N} |Ψ⟩⟨Ψ|` from the dense tensor, projected on `u_α ⊗ 1`
/// before tracing out the last `N - k` slots.
pub fn rdm_dense_oracle(state: &SlaterExpansion, k: usize, max_entries: f64) -> Result<Rdm> {
    let mut rdm = Rdm::zeros(state.n(), state.m(), k, RdmMethod::DenseOracle)?;
    let dense = state.to_dense(max_entries)?;
    rdm_from_dense(&mut rdm, &dense);
    Ok(rdm)
}

/// Same as [`rdm_dense_oracle`] with a tensor built once for several `k`.
pub fn rdm_dense_oracle_from(dense: &crate::state::DenseTensor, n: usize, k: usize) -> Result<Rdm> {
    let mut rdm = Rdm::zeros(n, dense.dim(), k, RdmMethod::DenseOracle)?;
    rdm_from_dense(&mut rdm, dense);
    Ok(rdm)
}

fn rdm_from_dense(rdm: &mut Rdm, dense: &crate::state::DenseTensor) {
    let (n, m, k) = (rdm.n, rdm.m, rdm.k);
    assert_eq!(dense.rank(), n);
    let tail = m.pow((n - k) as u32);
    let inv_sqrt_kfact = 1.0 / (1..=k).map(|i| i as f64).product::<f64>().sqrt();
    let mut w: BTreeMap<usize, BTreeMap<usize, Complex64>> = BTreeMap::new();
    for (off, &val) in dense.data().iter().enumerate() {
        if val == Complex64::default() {
            continue;
        }
        let z = off % tail;
        let head = dense.tuple(off);
        let x = &head[..k];
        let labels: Vec<usize> = x.iter().map(|&o| o + 1).collect();
        let Ok(alpha) = MultiIndex::from_orbitals(&labels) else {
            continue; // repeated label: orthogonal to every u_α
        };
        let sign = if permutation_parity(x) { -1.0 } else { 1.0 };
        *w.entry(z).or_default().entry(alpha.rank()).or_default() += val * (sign * inv_sqrt_kfact);
    }
    let weight = binomial(n as i64, k as i64);
    for row in w.values() {
        for (&a, &wa) in row {
            for (&b, &wb) in row {
                rdm.matrix[(a, b)] += wa * wb.conj() * weight;
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub normalized: bool,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    pub op_norm: f64,
    pub hs_norm: f64,
    /// Nats, of the trace-normalized spectrum.
    pub von_neumann: f64,
    pub renyi2: f64,
}

/// Descending eigenvalues of a Hermitian matrix.
///
/// The QR sweep tests convergence relative to the diagonal and can run into
/// subnormals (and NaN) when a diagonal block is vanishingly small. The
/// fallback shifts by `c·I`, `c ≈ ‖M‖_F`, which leaves absolute accuracy at
/// machine precision of the norm.
pub fn hermitian_eigenvalues(mat: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let solve = |m: DMatrix<Complex64>| -> Vec<f64> { SymmetricEigen::new(m).eigenvalues.iter().copied().collect() };
    let mut eig = solve(mat.clone());
    if eig.iter().any(|x| !x.is_finite()) {
        let shift = mat.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1.0);
        let d = mat.nrows();
        let shifted = mat + DMatrix::<Complex64>::identity(d, d) * Complex64::new(shift, 0.0);
        eig = solve(shifted).into_iter().map(|l| l - shift).collect();
        if eig.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("eigensolver did not converge".into()));
        }
    }
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig)
}

/// Eigen-decomposition of `Γ^(k)` (or `γ^(k)` when `normalized`).
pub fn spectrum(rdm: &Rdm, normalized: bool) -> Result<SpectrumReport> {
    let defect = rdm.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::Numerical(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    let binom = binomial(rdm.n as i64, rdm.k as i64);
    let scale = if normalized { 1.0 / binom } else { 1.0 };
    let mat = rdm.matrix.map(|c| c * scale);
    let eig = hermitian_eigenvalues(&mat)?;
    if let Some(&low) = eig.last() {
        if low < NEGATIVE_EIGEN_LIMIT {
            return Err(Error::Numerical(format!("eigenvalue {low:e} is negative")));
        }
    }
    let trace = mat.diagonal().iter().map(|c| c.re).sum();
    let hs_norm = mat.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let op_norm = eig.first().copied().unwrap_or(0.0);
    // entropies always on γ = Γ / C(N,k)
    let to_gamma = if normalized { 1.0 } else { 1.0 / binom };
    let probs: Vec<f64> = eig
        .iter()
        .map(|&l| l * to_gamma)
        .map(|p| if p < EIGEN_CLAMP { 0.0 } else { p })
        .collect();
    let von_neumann = -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>();
    let renyi2 = -probs.iter().map(|p| p * p).sum::<f64>().ln();
    Ok(SpectrumReport {
        n: rdm.n,
        m: rdm.m,
        k: rdm.k,
        normalized,
        eigenvalues: eig,
        trace,
        op_norm,
        hs_norm,
        von_neumann: von_neumann + 0.0,
        renyi2: renyi2 + 0.0,
    })
}

/// Entropies of `γ^(k)` against the floor `-log ‖γ^(k)‖²_HS`.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyCertificate {
    pub k: usize,
    pub von_neumann: f64,
    pub renyi2: f64,
    pub jensen_floor: f64,
    /// `S - floor`; nonnegative up to rounding.
    pub floor_gap: f64,
    /// `S₂ - floor`; zero up to rounding.
    pub renyi_gap: f64,
}

impl EntropyCertificate {
    pub fn holds(&self, tol: f64) -> bool {
        self.floor_gap >= -tol && self.renyi_gap >= -tol
    }
}

pub fn entropy_certificates(state: &SlaterExpansion, k: usize) -> Result<EntropyCertificate> {
    let rdm = rdm_slater(state, k)?;
    entropy_certificate_of(&rdm)
}

pub fn entropy_certificate_of(rdm: &Rdm) -> Result<EntropyCertificate> {
    let spec = spectrum(rdm, true)?;
    let jensen_floor = -(spec.hs_norm * spec.hs_norm).ln() + 0.0;
    Ok(EntropyCertificate {
        k: rdm.k,
        von_neumann: spec.von_neumann,
        renyi2: spec.renyi2,
        jensen_floor,
        floor_gap: spec.von_neumann - jensen_floor,
        renyi_gap: spec.renyi2 - jensen_floor,
    })
}
