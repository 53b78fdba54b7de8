//! Sums of squares that the bounds rely on, expanded literally from the
//! coefficients and compared with their Λ-block closed forms.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::{scale, Lab, REL_TOL};
use crate::error::{Error, Result};
use crate::multiindex::{binomial, enumerate, sign_parity, subset_stream, MultiIndex};
use crate::state::SlaterExpansion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SquareVariant {
    /// `Σ_{α,β} |Σ_A sgn(α∪β,A) c_{Aα} c̄_{Aβ}|² = Σ_r G(t+1, r)` with `|α| = t+1`.
    Drop,
    /// `Σ_D Σ_{ε,η} |Σ_α sgn(α,ε∪η) c_{Dαε} c̄_{Dαη}|²
    ///  = Σ_s C(N-r+t-s, t-s) G(s, r-t+s)`, one identity per `r`.
    Add,
    /// The square whose expansion gives the odd-order bound, per core.
    OddSquare,
    /// `Σ |X|²` of the even-order bound, per core.
    EvenFirst,
    /// `Σ |Y|²` of the even-order bound, per core.
    EvenSecond,
    /// `Σ Re X Ȳ` of the even-order bound, per core.
    EvenCross,
}

impl SquareVariant {
    pub const ALL: [SquareVariant; 6] = [
        SquareVariant::Drop,
        SquareVariant::Add,
        SquareVariant::OddSquare,
        SquareVariant::EvenFirst,
        SquareVariant::EvenSecond,
        SquareVariant::EvenCross,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SquareVariant::Drop => "drop",
            SquareVariant::Add => "add",
            SquareVariant::OddSquare => "odd-square",
            SquareVariant::EvenFirst => "even-first",
            SquareVariant::EvenSecond => "even-second",
            SquareVariant::EvenCross => "even-cross",
        }
    }
}

impl fmt::Display for SquareVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SquareVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SquareVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown square identity {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SquareIdentity {
    pub variant: SquareVariant,
    pub t: usize,
    /// Summed over all parts (cores, or `r` for `add`).
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Largest `|lhs - rhs| / max(1, |lhs|, |rhs|)` over the parts.
    pub worst_relative: f64,
    pub parts: usize,
    pub pass: bool,
}

struct Acc {
    lhs: f64,
    rhs: f64,
    worst: f64,
    parts: usize,
}

impl Acc {
    fn new() -> Self {
        Acc { lhs: 0.0, rhs: 0.0, worst: 0.0, parts: 0 }
    }

    fn push(&mut self, l: f64, r: f64) {
        self.lhs += l;
        self.rhs += r;
        self.worst = self.worst.max((l - r).abs() / scale(l, r));
        self.parts += 1;
    }
}

fn sgn(a: MultiIndex, b: MultiIndex) -> f64 {
    if sign_parity(a, b) {
        -1.0
    } else {
        1.0
    }
}

fn sign(s: usize) -> f64 {
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn c(n: i64, k: i64) -> f64 {
    binomial(n, k)
}

pub(super) fn check(lab: &Lab, t: usize, variant: SquareVariant) -> Result<SquareIdentity> {
    let st = lab.state();
    let (n, m) = (st.n(), st.m());
    if t == 0 && matches!(variant, SquareVariant::EvenFirst | SquareVariant::EvenSecond | SquareVariant::EvenCross) {
        return Err(Error::Domain("even-order squares need t >= 1".into()));
    }
    if t > n {
        return Err(Error::Size(format!("t = {t} exceeds N = {n}")));
    }
    let table = lab.table();
    let mut acc = Acc::new();
    match variant {
        SquareVariant::Drop => {
            let l = drop_square(st, t + 1);
            let r = (0..=n).map(|r| table.total(t + 1, r)).sum();
            acc.push(l, r);
        }
        SquareVariant::Add => {
            for rho in t..=n {
                let l = add_square(st, t, rho);
                let r = (0..=t)
                    .map(|s| c((n - rho + t - s) as i64, (t - s) as i64) * table.total(s, rho - t + s))
                    .sum();
                acc.push(l, r);
            }
        }
        _ => {
            for r in t..=n {
                for d in enumerate(n - r, m) {
                    let block = |s: usize| table.block(d, s);
                    let (ri, ti) = (r as i64, t as i64);
                    let (l, rhs) = match variant {
                        SquareVariant::OddSquare => (
                            odd_square(st, d, t, r),
                            (0..=t)
                                .map(|s| {
                                    let si = s as i64;
                                    sign(s) * c(ri - si, ti) * c(ri - si, ti - si) * block(s)
                                })
                                .sum(),
                        ),
                        SquareVariant::EvenFirst => (
                            even_parts(st, d, t, r).0,
                            (0..t).map(|s| sign(s) * c(ri - s as i64, ti - 1 - s as i64) * block(s)).sum(),
                        ),
                        SquareVariant::EvenSecond => {
                            let mut rhs = 0.0;
                            for s in 0..=t + 1 {
                                let si = s as i64;
                                for u in 0..=s.min(1) {
                                    let ui = u as i64;
                                    rhs += sign(s)
                                        * c(ri - si, ti - si + ui)
                                        * c(ri - si, 1 - ui)
                                        * c(si, ui).powi(2)
                                        * block(s);
                                }
                            }
                            (even_parts(st, d, t, r).1, rhs)
                        }
                        SquareVariant::EvenCross => {
                            let mut rhs = sign(t + 1) * t as f64 * block(t);
                            for s in 1..t {
                                rhs += sign(s + 1) * s as f64 * c(ri - s as i64, ti - s as i64) * block(s);
                            }
                            (even_parts(st, d, t, r).2, rhs)
                        }
                        SquareVariant::Drop | SquareVariant::Add => unreachable!(),
                    };
                    acc.push(l, rhs);
                }
            }
        }
    }
    let pass = acc.worst <= REL_TOL && (acc.lhs - acc.rhs).abs() <= REL_TOL * scale(acc.lhs, acc.rhs);
    Ok(SquareIdentity {
        variant,
        t,
        lhs: acc.lhs,
        rhs: acc.rhs,
        residual: acc.lhs - acc.rhs,
        worst_relative: acc.worst,
        parts: acc.parts,
        pass,
    })
}

fn complement(st: &SlaterExpansion, d: MultiIndex) -> MultiIndex {
    MultiIndex::full(st.m()).difference(d)
}

/// `Σ_{α,β disjoint, |α|=|β|=s} |Σ_{|A|=N-s} sgn(α∪β, A) c_{A∪α} c̄_{A∪β}|²`.
fn drop_square(st: &SlaterExpansion, s: usize) -> f64 {
    let n = st.n();
    if s > n {
        return 0.0;
    }
    let mut total = 0.0;
    for alpha in enumerate(s, st.m()) {
        let rest = complement(st, alpha);
        for beta in subset_stream(rest, s) {
            let ab = alpha.join(beta);
            let mut inner = Complex64::default();
            for a in subset_stream(rest.difference(beta), n - s) {
                inner += st.coeff(a.join(alpha)) * st.coeff(a.join(beta)).conj() * sgn(ab, a);
            }
            total += inner.norm_sqr();
        }
    }
    total
}

/// One `r` of the added nonnegative quantity.
fn add_square(st: &SlaterExpansion, t: usize, rho: usize) -> f64 {
    let n = st.n();
    let mut total = 0.0;
    for d in enumerate(n - rho, st.m()) {
        let comp = complement(st, d);
        for eps in subset_stream(comp, rho - t) {
            for eta in subset_stream(comp.difference(eps), rho - t) {
                let ee = eps.join(eta);
                let mut inner = Complex64::default();
                for alpha in subset_stream(comp.difference(ee), t) {
                    let da = d.join(alpha);
                    inner += st.coeff(da.join(eps)) * st.coeff(da.join(eta)).conj() * sgn(alpha, ee);
                }
                total += inner.norm_sqr();
            }
        }
    }
    total
}

/// `Σ_{ε,η} Σ_{α⊂ε} |Σ_{β⊂η} sgn(β, (ε∪η)\β) c_{D∪α∪(η\β)} c_{D∪β∪(ε\α)}|²`, `|ε|=|η|=r`.
fn odd_square(st: &SlaterExpansion, d: MultiIndex, t: usize, r: usize) -> f64 {
    let comp = complement(st, d);
    let mut total = 0.0;
    for eps in subset_stream(comp, r) {
        for eta in subset_stream(comp.difference(eps), r) {
            let ee = eps.join(eta);
            for alpha in subset_stream(eps, t) {
                let mut y = Complex64::default();
                for beta in subset_stream(eta, t) {
                    let a = st.coeff(d.join(alpha).join(eta.difference(beta)));
                    let b = st.coeff(d.join(beta).join(eps.difference(alpha)));
                    y += a * b * sgn(beta, ee.difference(beta));
                }
                total += y.norm_sqr();
            }
        }
    }
    total
}

/// `(Σ|X|², Σ|Y|², Σ Re X Ȳ)` with `|ε| = r+t-1`, `|η| = r-t+1`.
fn even_parts(st: &SlaterExpansion, d: MultiIndex, t: usize, r: usize) -> (f64, f64, f64) {
    let comp = complement(st, d);
    let (mut j1, mut j2, mut cross) = (0.0, 0.0, 0.0);
    for eps in subset_stream(comp, r + t - 1) {
        for eta in subset_stream(comp.difference(eps), r + 1 - t) {
            let ee = eps.join(eta);
            let mut x = Complex64::default();
            for beta in subset_stream(eps, t - 1) {
                let a = st.coeff(d.join(eps.difference(beta)));
                let b = st.coeff(d.join(beta).join(eta));
                x += a * b * sgn(beta, ee.difference(beta));
            }
            let mut y = Complex64::default();
            for alpha in subset_stream(eps, t) {
                for delta in subset_stream(eta, 1) {
                    let ad = alpha.join(delta);
                    let a = st.coeff(d.join(delta).join(eps.difference(alpha)));
                    let b = st.coeff(d.join(alpha).join(eta.difference(delta)));
                    y += a * b * sgn(ad, ee.difference(ad));
                }
            }
            j1 += x.norm_sqr();
            j2 += y.norm_sqr();
            cross += (x * y.conj()).re;
        }
    }
    (j1, j2, cross)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::DEFAULT_MAX_OPS;

    #[test]
    fn names_round_trip() {
        for v in SquareVariant::ALL {
            assert_eq!(v.name().parse::<SquareVariant>().unwrap(), v);
        }
        assert!("nope".parse::<SquareVariant>().is_err());
    }

    #[test]
    fn all_variants_on_a_random_state() {
        let s = SlaterExpansion::random_state(4, 7, 10, 23).unwrap();
        let lab = Lab::new(&s, DEFAULT_MAX_OPS).unwrap();
        for t in 1..=3 {
            for v in SquareVariant::ALL {
                let id = lab.square_identity_check(t, v).unwrap();
                assert!(id.pass, "{v} t={t}: {id:?}");
            }
        }
        let add = lab.square_identity_check(1, SquareVariant::Add).unwrap();
        assert!(add.lhs >= 0.0);
    }

    #[test]
    fn slater_squares() {
        let s = SlaterExpansion::slater_state(MultiIndex::from_orbitals(&[1, 2, 4]).unwrap(), 6).unwrap();
        let lab = Lab::new(&s, DEFAULT_MAX_OPS).unwrap();
        for v in SquareVariant::ALL {
            let id = lab.square_identity_check(1, v).unwrap();
            assert!(id.pass, "{v}: {id:?}");
        }
    }
}
