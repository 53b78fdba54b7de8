//! First-quantized tensors. Only used as an independent reference.
//!
//! Axis values are 0-based orbital positions (orbital `i` is value `i - 1`).

use itertools::Itertools;
use num_complex::Complex64;

use super::SlaterExpansion;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DENSE_ENTRIES: f64 = 1e8;

/// Parity of a permutation by brute-force inversion counting.
pub fn permutation_parity(p: &[usize]) -> bool {
    let mut inv = 0usize;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Rank-`n` complex array with every axis of length `m`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    n: usize,
    m: usize,
    data: Vec<Complex64>,
}

impl DenseTensor {
    pub fn zeros(n: usize, m: usize, max_entries: f64) -> Result<Self> {
        let entries = (m as f64).powi(n as i32);
        if entries > max_entries {
            return Err(Error::Budget { what: "dense tensor entries", needed: entries, cap: max_entries });
        }
        Ok(DenseTensor { n, m, data: vec![Complex64::default(); m.pow(n as u32)] })
    }

    /// `Σ_A c_A u_A` with `u_A` carrying `sgn(σ)/√N!` on every ordering of `A`.
    pub fn from_state(state: &SlaterExpansion, max_entries: f64) -> Result<Self> {
        let (n, m) = (state.n(), state.m());
        let mut t = DenseTensor::zeros(n, m, max_entries)?;
        let scale = 1.0 / factorial(n).sqrt();
        for (key, &c) in state.coeffs() {
            let orbs: Vec<usize> = key.orbitals().map(|o| o - 1).collect();
            for perm in (0..n).permutations(n) {
                let sign = if permutation_parity(&perm) { -1.0 } else { 1.0 };
                let tuple: Vec<usize> = perm.iter().map(|&p| orbs[p]).collect();
                let at = t.offset(&tuple);
                t.data[at] += c * (sign * scale);
            }
        }
        Ok(t)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn offset(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.n);
        tuple.iter().fold(0, |acc, &x| acc * self.m + x)
    }

    pub fn tuple(&self, mut offset: usize) -> Vec<usize> {
        let mut t = vec![0; self.n];
        for slot in t.iter_mut().rev() {
            *slot = offset % self.m;
            offset /= self.m;
        }
        t
    }

    pub fn get(&self, tuple: &[usize]) -> Complex64 {
        self.data[self.offset(tuple)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::default())
            .map(|(i, &c)| (self.tuple(i), c))
    }

    /// `U_σ`: slot `j` of the result carries what slot `σ(j)` carried.
    pub fn permute(&self, sigma: &[usize]) -> DenseTensor {
        assert_eq!(sigma.len(), self.n);
        let mut out = DenseTensor { n: self.n, m: self.m, data: vec![Complex64::default(); self.data.len()] };
        let mut x = vec![0; self.n];
        for (i, &c) in self.data.iter().enumerate() {
            if c == Complex64::default() {
                continue;
            }
            let y = self.tuple(i);
            for j in 0..self.n {
                x[j] = y[sigma[j]];
            }
            let at = out.offset(&x);
            out.data[at] = c;
        }
        out
    }

    pub fn swap_axes(&self, i: usize, j: usize) -> DenseTensor {
        let mut sigma: Vec<usize> = (0..self.n).collect();
        sigma.swap(i, j);
        self.permute(&sigma)
    }

    pub fn scale(&self, s: f64) -> DenseTensor {
        DenseTensor { n: self.n, m: self.m, data: self.data.iter().map(|c| c * s).collect() }
    }

    pub fn max_abs_diff(&self, other: &DenseTensor) -> f64 {
        assert_eq!((self.n, self.m), (other.n, other.m));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `ψ∧φ = (p! q! (p+q)!)^{-1/2} Σ_σ sgn(σ) U_σ(ψ⊗φ)`.
    pub fn wedge(&self, other: &DenseTensor, max_entries: f64) -> Result<DenseTensor> {
        assert_eq!(self.m, other.m);
        let (p, q) = (self.n, other.n);
        let n = p + q;
        let mut out = DenseTensor::zeros(n, self.m, max_entries)?;
        let norm = 1.0 / (factorial(p) * factorial(q) * factorial(n)).sqrt();
        let left: Vec<_> = self.nonzeros().collect();
        let right: Vec<_> = other.nonzeros().collect();
        let perms: Vec<(Vec<usize>, f64)> = (0..n)
            .permutations(n)
            .map(|s| {
                let sg = if permutation_parity(&s) { -1.0 } else { 1.0 };
                (s, sg)
            })
            .collect();
        let mut y = vec![0; n];
        let mut x = vec![0; n];
        for (a, ca) in &left {
            for (b, cb) in &right {
                y[..p].copy_from_slice(a);
                y[p..].copy_from_slice(b);
                let v = ca * cb * norm;
                for (sigma, sg) in &perms {
                    for j in 0..n {
                        x[j] = y[sigma[j]];
                    }
                    let at = out.offset(&x);
                    out.data[at] += v * *sg;
                }
            }
        }
        Ok(out)
    }
}
