//! Sparse N-fermion states expanded in Slater determinants.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::multiindex::{count, enumerate, MultiIndex, MAX_ORBITALS};

mod dense;

pub use dense::{permutation_parity, DenseTensor, DEFAULT_MAX_DENSE_ENTRIES};

/// Amplitudes below this magnitude are dropped by [`SlaterExpansion::normalize`].
pub const PRUNE_BELOW: f64 = 1e-15;

/// `Ψ = Σ_A c_A u_A` over `N`-subsets `A` of `{1..M}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlaterExpansion {
    n: usize,
    m: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl SlaterExpansion {
    /// Validates sizes and keys; does not normalize.
    pub fn new<I>(n: usize, m: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        if n == 0 {
            return Err(Error::Validation("particle count must be positive".into()));
        }
        if m < n || m > MAX_ORBITALS {
            return Err(Error::Validation(format!(
                "orbital count {m} must satisfy {n} <= m <= {MAX_ORBITALS}"
            )));
        }
        let mut map = BTreeMap::new();
        for (key, c) in coeffs {
            if key.len() != n {
                return Err(Error::Validation(format!(
                    "key {key} has {} orbitals, expected {n}",
                    key.len()
                )));
            }
            if !key.within(m) {
                return Err(Error::Validation(format!("key {key} exceeds orbital count {m}")));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Validation(format!("non-finite amplitude at {key}")));
            }
            if map.insert(key, c).is_some() {
                return Err(Error::Validation(format!("duplicate key {key}")));
            }
        }
        Ok(SlaterExpansion { n, m, coeffs: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.coeffs
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_A`, zero off the support.
    #[inline]
    pub fn coeff(&self, key: MultiIndex) -> Complex64 {
        self.coeffs.get(&key).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Rescales to unit norm, then prunes amplitudes below [`PRUNE_BELOW`].
    pub fn normalize(&self) -> Result<SlaterExpansion> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        let coeffs: BTreeMap<_, _> = self
            .coeffs
            .iter()
            .map(|(&k, &c)| (k, c / norm))
            .filter(|(_, c)| c.norm() >= PRUNE_BELOW)
            .collect();
        if coeffs.is_empty() {
            return Err(Error::ZeroState);
        }
        Ok(SlaterExpansion { n: self.n, m: self.m, coeffs })
    }

    /// The single determinant `u_a` in an `m`-orbital space.
    pub fn slater_state(a: MultiIndex, m: usize) -> Result<SlaterExpansion> {
        if a.is_empty() {
            return Err(Error::Domain("Slater determinant needs at least one orbital".into()));
        }
        if !a.within(m) || m > MAX_ORBITALS {
            return Err(Error::Domain(format!("{a} is not inside 1..={m}")));
        }
        SlaterExpansion::new(a.len(), m, [(a, Complex64::new(1.0, 0.0))])
    }

    /// Geminal power over the pairs `(2i-1, 2i)`: equal weight on every union
    /// of `n/2` pairs.
    pub fn yang_pairing_state(n: usize, m: usize) -> Result<SlaterExpansion> {
        if n == 0 || n % 2 == 1 || m % 2 == 1 {
            return Err(Error::Domain(format!(
                "pairing state needs positive even n and even m, got n={n}, m={m}"
            )));
        }
        if n > m || m > MAX_ORBITALS {
            return Err(Error::Domain(format!("need n <= m <= {MAX_ORBITALS}, got n={n}, m={m}")));
        }
        let amp = 1.0 / (count(m / 2, n / 2) as f64).sqrt();
        let keys = enumerate(n / 2, m / 2).map(|pairs| {
            let mut bits = 0;
            for p in pairs.orbitals() {
                bits |= 0b11 << (2 * (p - 1));
            }
            (MultiIndex::from_bits(bits), Complex64::new(amp, 0.0))
        });
        SlaterExpansion::new(n, m, keys)
    }

    /// `support` distinct keys drawn uniformly, i.i.d. complex Gaussian
    /// amplitudes, normalized. Same seed, same state.
    pub fn random_state(n: usize, m: usize, support: usize, seed: u64) -> Result<SlaterExpansion> {
        if n == 0 || m < n || m > MAX_ORBITALS {
            return Err(Error::Domain(format!("need 1 <= n <= m <= {MAX_ORBITALS}")));
        }
        let total = count(m, n);
        if support == 0 || support as u128 > total {
            return Err(Error::Domain(format!(
                "support {support} outside 1..={total} for n={n}, m={m}"
            )));
        }
        let total = usize::try_from(total)
            .map_err(|_| Error::Domain("key space too large to sample".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ranks = index::sample(&mut rng, total, support);
        let mut keys: Vec<MultiIndex> =
            ranks.iter().map(|r| MultiIndex::unrank(r as u128, n)).collect();
        keys.sort_unstable();
        let coeffs: Vec<_> = keys
            .into_iter()
            .map(|k| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                (k, Complex64::new(re, im))
            })
            .collect();
        SlaterExpansion::new(n, m, coeffs)?.normalize()
    }

    pub fn to_dense(&self, max_entries: f64) -> Result<DenseTensor> {
        DenseTensor::from_state(self, max_entries)
    }

    pub fn to_file_repr(&self) -> StateFile {
        StateFile {
            n: self.n,
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| CoeffEntry { idx: k.to_vec(), re: c.re, im: c.im })
                .collect(),
        }
    }

    pub fn from_file_repr(file: StateFile) -> Result<SlaterExpansion> {
        let mut entries = Vec::with_capacity(file.coeffs.len());
        for e in file.coeffs {
            if e.idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Validation(format!(
                    "index {:?} is not strictly increasing",
                    e.idx
                )));
            }
            let key = MultiIndex::from_orbitals(&e.idx)?;
            entries.push((key, Complex64::new(e.re, e.im)));
        }
        SlaterExpansion::new(file.n, file.m, entries)
    }

    pub fn to_json(&self) -> Result<String> {
        json::to_canonical_string(&self.to_file_repr())
    }

    pub fn from_json(text: &str) -> Result<SlaterExpansion> {
        let file: StateFile = serde_json::from_str(text)?;
        SlaterExpansion::from_file_repr(file)
    }

    /// Writes the state file. Only normalized states are saved.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        if !self.is_normalized(1e-10) {
            return Err(Error::Validation(format!(
                "refusing to save a state with norm^2 {}",
                self.norm_sqr()
            )));
        }
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SlaterExpansion> {
        SlaterExpansion::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk form: `{"n", "m", "coeffs": [{"idx": [1-based], "re", "im"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n: usize,
    pub m: usize,
    pub coeffs: Vec<CoeffEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffEntry {
    pub idx: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[usize]) -> MultiIndex {
        MultiIndex::from_orbitals(v).unwrap()
    }

    #[test]
    fn slater_single_key() {
        let s = SlaterExpansion::slater_state(mi(&[1, 2, 3]), 6).unwrap();
        assert_eq!(s.support_len(), 1);
        assert_eq!(s.coeff(mi(&[1, 2, 3])), Complex64::new(1.0, 0.0));
        assert!(SlaterExpansion::slater_state(mi(&[1, 7]), 6).is_err());
    }

    #[test]
    fn yang_keys() {
        let y = SlaterExpansion::yang_pairing_state(2, 4).unwrap();
        let keys: Vec<_> = y.coeffs().keys().map(|k| k.to_vec()).collect();
        assert_eq!(keys, vec![vec![1, 2], vec![3, 4]]);
        for c in y.coeffs().values() {
            assert!((c.re - 0.5f64.sqrt()).abs() < 1e-15);
        }
        let y = SlaterExpansion::yang_pairing_state(4, 8).unwrap();
        assert_eq!(y.support_len(), 6);
        assert!((y.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(matches!(
            SlaterExpansion::yang_pairing_state(3, 8),
            Err(Error::Domain(_))
        ));
        assert!(SlaterExpansion::yang_pairing_state(4, 7).is_err());
    }

    #[test]
    fn random_is_deterministic_and_normalized() {
        let a = SlaterExpansion::random_state(3, 6, 5, 7).unwrap();
        let b = SlaterExpansion::random_state(3, 6, 5, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.support_len(), 5);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        let full = SlaterExpansion::random_state(3, 6, 20, 1).unwrap();
        assert_eq!(full.support_len(), 20);
        assert!(SlaterExpansion::random_state(3, 6, 21, 1).is_err());
        assert_ne!(a, SlaterExpansion::random_state(3, 6, 5, 8).unwrap());
    }

    #[test]
    fn zero_state_rejected() {
        let z = SlaterExpansion::new(2, 3, [(mi(&[1, 2]), Complex64::new(0.0, 0.0))]).unwrap();
        assert!(matches!(z.normalize(), Err(Error::ZeroState)));
    }

    #[test]
    fn normalize_prunes_tiny() {
        let s = SlaterExpansion::new(
            1,
            3,
            [(mi(&[1]), Complex64::new(1.0, 0.0)), (mi(&[2]), Complex64::new(1e-17, 0.0))],
        )
        .unwrap();
        assert_eq!(s.normalize().unwrap().support_len(), 1);
    }

    #[test]
    fn json_validation() {
        let bad = r#"{"n":3,"m":4,"coeffs":[{"idx":[1,1,2],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(SlaterExpansion::from_json(bad), Err(Error::Validation(_))));
        let short = r#"{"n":3,"m":4,"coeffs":[{"idx":[1,2],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(SlaterExpansion::from_json(short), Err(Error::Validation(_))));
        assert!(matches!(SlaterExpansion::from_json("{not json"), Err(Error::Format(_))));
        let unsorted = r#"{"n":2,"m":4,"coeffs":[{"idx":[2,1],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(SlaterExpansion::from_json(unsorted), Err(Error::Validation(_))));
    }
}
