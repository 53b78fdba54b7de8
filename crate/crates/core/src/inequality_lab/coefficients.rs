//! Coefficients of the per-core bounds and of the summed bound that
//! eliminates the order-`t` block.

use super::{ConstantLedger, LedgerEntry, Scaling};
use crate::error::{Error, Result};
use crate::multiindex::binomial;

fn c(n: i64, k: i64) -> f64 {
    binomial(n, k)
}

fn sign(s: usize) -> f64 {
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coefficients `a_0..=a_t` of `L_t ≤ Σ_s a_s L_s` for a core of order `r`.
pub fn odd_rhs_coeffs(t: usize, r: usize) -> Vec<f64> {
    let (ti, ri) = (t as i64, r as i64);
    (0..=t)
        .map(|s| {
            let si = s as i64;
            let mut a = 0.5 * sign(s) * c(ri - si, ti) * c(ri - si, ti - si);
            if s == 0 {
                a += 0.5 * c(ri, ti);
            }
            a
        })
        .collect()
}

/// Coefficients `a_0..=a_{t+1}` of the even-order bound as derived:
///
/// ```text
/// Σ_{s=1}^{t-1} (-1)^{s+t+1} (s/t) C(r-s,t-s) L_s
///   + 1/(2tτ) Σ_{s=0}^{t+1} Σ_{u=0}^{min(1,s)} (-1)^s C(r-s,t-s+u) C(r-s,1-u) C(s,u)² L_s
///   + τ/(2t)  Σ_{s=0}^{t-1} (-1)^s C(r-s,t-1-s) L_s
/// ```
pub fn even_rhs_coeffs(t: usize, r: usize, tau: f64) -> Vec<f64> {
    even_coeffs(t, r, tau, false)
}

/// The same bound with the first block `(-1)^{s+t} C(r-s,t-s)` and without
/// the `C(s,u)²` factor. It does not hold in general; kept for reporting.
pub fn even_printed_coeffs(t: usize, r: usize, tau: f64) -> Vec<f64> {
    even_coeffs(t, r, tau, true)
}

fn even_coeffs(t: usize, r: usize, tau: f64, printed: bool) -> Vec<f64> {
    let (ti, ri) = (t as i64, r as i64);
    let tf = t as f64;
    let mut a = vec![0.0; t + 2];
    for s in 1..t {
        let si = s as i64;
        a[s] += if printed {
            sign(s + t) * c(ri - si, ti - si)
        } else {
            sign(s + t + 1) * (s as f64 / tf) * c(ri - si, ti - si)
        };
    }
    for s in 0..=t + 1 {
        let si = s as i64;
        for u in 0..=s.min(1) {
            let ui = u as i64;
            let mult = if printed { 1.0 } else { c(si, ui).powi(2) };
            a[s] += sign(s) / (2.0 * tf * tau) * c(ri - si, ti - si + ui) * c(ri - si, 1 - ui) * mult;
        }
    }
    for s in 0..t {
        let si = s as i64;
        a[s] += sign(s) * tau / (2.0 * tf) * c(ri - si, ti - 1 - si);
    }
    a
}

/// `τ = N (1 + t²) / t` for even `t`.
///
/// The order-`t` block produced by the even bound carries
/// `(N - t)(1 + t²)/(2tτ)`, which this choice keeps below ½ for every `N`,
/// so it can be absorbed on the left while every constant stays of order
/// `N^{t-s}`.
pub fn default_tau(n: usize, t: usize) -> f64 {
    let tf = t as f64;
    n as f64 * (1.0 + tf * tf) / tf
}

/// `C_{s,t}(r)` for `s < t`, `0 <= r <= N`.
#[derive(Clone, Debug)]
pub struct PropositionCoefficients {
    pub n: usize,
    pub t: usize,
    pub tau: Option<f64>,
    /// Share of the order-`t` block re-absorbed on the left (even `t` only).
    pub absorbed: Option<f64>,
    values: Vec<Vec<f64>>,
}

impl PropositionCoefficients {
    pub fn get(&self, s: usize, r: usize) -> f64 {
        if s >= self.t || r > self.n {
            0.0
        } else {
            self.values[s][r]
        }
    }

    pub fn ledger(&self) -> ConstantLedger {
        let mut entries = Vec::new();
        for s in 0..self.t {
            for r in 0..=self.n {
                entries.push(LedgerEntry { s, t: self.t, r, value: self.values[s][r] });
            }
        }
        ConstantLedger::new(self.n, Scaling::Proposition { t: self.t }, entries)
    }
}

/// Builds the constants by following the proofs: odd `t` moves the order-`t`
/// term left and divides by `1 + C(r-t,t)/2`; even `t` drops the `(t+1)`
/// block (its sum over `r` is minus a sum of squares) and absorbs the
/// order-`t` block after adding a nonnegative sum of squares.
pub fn proposition_coefficients(n: usize, t: usize, tau: Option<f64>) -> Result<PropositionCoefficients> {
    if t == 0 || t > n {
        return Err(Error::Domain(format!("need 1 <= t <= N, got t={t}, N={n}")));
    }
    let mut values = vec![vec![0.0; n + 1]; t];
    let ti = t as i64;
    if t % 2 == 1 {
        for r in t..=n {
            let ri = r as i64;
            let den = 2.0 + c(ri - ti, ti);
            for (s, row) in values.iter_mut().enumerate() {
                let si = s as i64;
                let mut v = sign(s) * c(ri - si, ti) * c(ri - si, ti - si);
                if s == 0 {
                    v += c(ri, ti);
                }
                row[r] = v / den;
            }
        }
        return Ok(PropositionCoefficients { n, t, tau: None, absorbed: None, values });
    }

    let tau = tau.unwrap_or_else(|| default_tau(n, t));
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let per_r: Vec<Vec<f64>> = (0..=n).map(|r| even_rhs_coeffs(t, r, tau)).collect();
    // the (t+1) block must carry one nonpositive coefficient for every r
    // where it can be nonzero, so that it can be dropped
    let tail: Vec<f64> = (t + 1..=n).map(|r| per_r[r][t + 1]).collect();
    if let Some(&c0) = tail.first() {
        if c0 > 0.0 || tail.iter().any(|&x| (x - c0).abs() > 1e-12 * c0.abs().max(1.0)) {
            return Err(Error::Numerical(format!("order-{} coefficients {tail:?} cannot be dropped", t + 1)));
        }
    }
    let b: Vec<f64> = (0..=n).map(|r| if r >= t { per_r[r][t] } else { 0.0 }).collect();
    let beta = b[t..].iter().copied().fold(0.0, f64::max);
    if beta >= 1.0 {
        return Err(Error::Domain(format!(
            "tau = {tau} leaves {beta} of the order-{t} block to absorb; need < 1"
        )));
    }
    let lambda = |rho: usize| beta - b[rho];
    for (s, row) in values.iter_mut().enumerate() {
        for (r, slot) in row.iter_mut().enumerate() {
            let mut v = if r >= t { per_r[r][s] } else { 0.0 };
            let rho = r + t - s;
            if rho <= n {
                v += lambda(rho) * c((n - r) as i64, (t - s) as i64);
            }
            *slot = v / (1.0 - beta);
        }
    }
    Ok(PropositionCoefficients { n, t, tau: Some(tau), absorbed: Some(beta), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_coefficients_match_hand_values() {
        // t = 1, r = 2: ½C(2,1) + ½C(2,1)C(2,1) = 3 ; s = 1: -½ C(1,1) C(1,0) = -½
        assert_eq!(odd_rhs_coeffs(1, 2), vec![3.0, -0.5]);
        let p = proposition_coefficients(4, 1, None).unwrap();
        // r = 2: (C(2,1)C(2,1) + C(2,1)) / (2 + C(1,1)) = 6 / 3
        assert_eq!(p.get(0, 2), 2.0);
        assert_eq!(p.get(0, 0), 0.0);
    }

    #[test]
    fn even_blocks_at_small_r() {
        // r = t = 2: the (t+1) block and u = 0, s = 3 vanish
        let a = even_rhs_coeffs(2, 2, 1.0);
        assert_eq!(a[3], 0.0);
        // r = 3, t = 2: the (t+1) coefficient is -(t+1)²/(2tτ)
        let a = even_rhs_coeffs(2, 3, 1.0);
        assert!((a[3] + 9.0 / 4.0).abs() < 1e-15);
        // order-t coefficient (r - t)(1 + t²)/(2tτ)
        assert!((a[2] - 5.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn even_proposition_absorbs_below_half() {
        for n in 2..=40 {
            let p = proposition_coefficients(n, 2, None).unwrap();
            assert!(p.absorbed.unwrap() < 0.5);
            assert!(p.ledger().all_finite());
        }
        assert!(proposition_coefficients(12, 2, Some(1.0)).is_err());
    }
}
