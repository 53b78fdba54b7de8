//! Both sides of the three sum-rewriting identities, for functions of
//! multi-indices. Each function returns `(lhs, rhs)`; sizes are the number
//! of labels in each argument and `space` is the orbital bound.
//!
//! Functions are given on sets, so "repeated indices" can only arise from
//! overlapping unions; those terms are skipped, which is exactly the
//! vanishing hypothesis of each identity.

use std::ops::{AddAssign, Mul};

use num_traits::Zero;

use super::{count, enumerate, subset_stream, MultiIndex};

/// `Σ_{|A|=n} Σ_{|B|=m} f(A,B)` against
/// `Σ_r Σ_{|D|=n-r} Σ_{|A|=r} Σ_{|B|=m-n+r, A∩B=∅} f(D∪A, D∪B)`. Needs `n <= m`.
pub fn core_split<T, F>(n: usize, m: usize, space: usize, f: F) -> (T, T)
where
    T: Copy + Zero + AddAssign,
    F: Fn(MultiIndex, MultiIndex) -> T,
{
    assert!(n <= m, "core_split needs n <= m");
    let mut lhs = T::zero();
    for a in enumerate(n, space) {
        for b in enumerate(m, space) {
            lhs += f(a, b);
        }
    }
    let full = MultiIndex::full(space);
    let mut rhs = T::zero();
    for r in 0..=n {
        for d in enumerate(n - r, space) {
            let rest = full.difference(d);
            for a in subset_stream(rest, r) {
                for b in subset_stream(rest.difference(a), m - n + r) {
                    rhs += f(d.join(a), d.join(b));
                }
            }
        }
    }
    (lhs, rhs)
}

/// `Σ_{|A|=n} Σ_{|B|=m} f(A,B)` over disjoint pairs against
/// `Σ_{|A|=n+m} Σ_{B⊂A, |B|=m} f(A\B, B)`.
pub fn merge_pairs<T, F>(n: usize, m: usize, space: usize, f: F) -> (T, T)
where
    T: Copy + Zero + AddAssign,
    F: Fn(MultiIndex, MultiIndex) -> T,
{
    let mut lhs = T::zero();
    for a in enumerate(n, space) {
        for b in enumerate(m, space) {
            if a.is_disjoint(b) {
                lhs += f(a, b);
            }
        }
    }
    let mut rhs = T::zero();
    for a in enumerate(n + m, space) {
        for b in subset_stream(a, m) {
            rhs += f(a.difference(b), b);
        }
    }
    (lhs, rhs)
}

/// `Σ_{|A|=n} Σ_{|B|=m} g(A∪B)` over disjoint pairs against
/// `C(n+m, n) Σ_{|A|=n+m} g(A)`.
pub fn merged_multiplicity<T, F>(n: usize, m: usize, space: usize, g: F) -> (T, T)
where
    T: Copy + Zero + AddAssign + Mul<Output = T> + From<u32>,
    F: Fn(MultiIndex) -> T,
{
    let mut lhs = T::zero();
    for a in enumerate(n, space) {
        for b in enumerate(m, space) {
            if a.is_disjoint(b) {
                lhs += g(a.join(b));
            }
        }
    }
    let mut inner = T::zero();
    for a in enumerate(n + m, space) {
        inner += g(a);
    }
    let mult = u32::try_from(count(n + m, n)).expect("multiplicity fits u32");
    (lhs, T::from(mult) * inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_counts() {
        // f = 1 on disjoint pairs: both sides count disjoint (A,B)
        let (l, r) = merge_pairs::<i64, _>(2, 1, 5, |_, _| 1);
        assert_eq!(l, r);
        assert_eq!(l, 10 * 3);
        let (l, r) = merged_multiplicity::<i64, _>(2, 2, 6, |_| 1);
        assert_eq!(l, r);
        // f = 1 everywhere: core split counts all pairs
        let (l, r) = core_split::<i64, _>(2, 3, 5, |_, _| 1);
        assert_eq!(l, 10 * 10);
        assert_eq!(l, r);
    }
}
