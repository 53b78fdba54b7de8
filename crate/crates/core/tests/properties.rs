use fermi_rdm::decomposition::{LambdaTable, DEFAULT_MAX_OPS};
use fermi_rdm::inequality_lab::Lab;
use fermi_rdm::multiindex::{binomial, count, enumerate, merge_triple, split_triple, subset_stream};
use fermi_rdm::rdm::{rdm_slater, spectrum};
use fermi_rdm::{relative_sign, MultiIndex, Sign, SlaterExpansion};
use proptest::prelude::*;

/// Three pairwise disjoint multi-indices inside `{1..m}`.
fn disjoint3(max_m: usize) -> impl Strategy<Value = (MultiIndex, MultiIndex, MultiIndex)> {
    (1..=max_m).prop_flat_map(|m| proptest::collection::vec(0u8..4, m)).prop_map(|slots| {
        let mut parts = [MultiIndex::EMPTY; 3];
        for (i, s) in slots.into_iter().enumerate() {
            if s < 3 {
                parts[s as usize] = parts[s as usize].join(MultiIndex::singleton(i + 1));
            }
        }
        (parts[0], parts[1], parts[2])
    })
}

fn subset_of(m: usize) -> impl Strategy<Value = MultiIndex> {
    proptest::collection::vec(any::<bool>(), m).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .filter(|(_, b)| *b)
            .fold(MultiIndex::EMPTY, |acc, (i, _)| acc.join(MultiIndex::singleton(i + 1)))
    })
}

/// `(n, m, support, seed)` small enough for exhaustive checks.
fn small_state() -> impl Strategy<Value = SlaterExpansion> {
    (1usize..=4, 0usize..=4, any::<u64>()).prop_flat_map(|(n, extra, seed)| {
        let m = n + extra;
        let full = count(m, n) as usize;
        (1..=full).prop_map(move |support| SlaterExpansion::random_state(n, m, support, seed).unwrap())
    })
}

fn sign_f(s: Sign) -> i32 {
    s.value()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn element_product_law((a, b, _) in disjoint3(14)) {
        let prod: i32 = a.orbitals().map(|x| sign_f(relative_sign(MultiIndex::singleton(x), b).unwrap())).product();
        prop_assert_eq!(sign_f(relative_sign(a, b).unwrap()), prod);
    }

    #[test]
    fn reverse_order_law((a, b, _) in disjoint3(14)) {
        let flip = if (a.len() * b.len()) % 2 == 1 { -1 } else { 1 };
        prop_assert_eq!(sign_f(relative_sign(a, b).unwrap()), flip * sign_f(relative_sign(b, a).unwrap()));
    }

    #[test]
    fn union_product_law((a, b, d) in disjoint3(14)) {
        let lhs = relative_sign(a, b.union(d).unwrap()).unwrap();
        prop_assert_eq!(lhs, relative_sign(a, b).unwrap() * relative_sign(a, d).unwrap());
    }

    #[test]
    fn overlap_is_rejected(a in subset_of(10), b in subset_of(10)) {
        prop_assert_eq!(relative_sign(a, b).is_ok(), a.is_disjoint(b));
        prop_assert_eq!(a.union(b).is_ok(), a.is_disjoint(b));
    }

    #[test]
    fn split_merge_round_trip(a in subset_of(12), b in subset_of(12)) {
        let (d, x, y) = split_triple(a, b);
        prop_assert!(d.is_disjoint(x) && d.is_disjoint(y) && x.is_disjoint(y));
        prop_assert_eq!(merge_triple(d, x, y), (a, b));
    }

    #[test]
    fn rank_unrank_round_trip(a in subset_of(20)) {
        prop_assert_eq!(MultiIndex::unrank(a.rank() as u128, a.len()), a);
    }

    #[test]
    fn json_round_trip(a in subset_of(30)) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<MultiIndex>(&text).unwrap(), a);
    }

    #[test]
    fn subsets_are_complete(a in subset_of(9), len in 0usize..6) {
        let subs: Vec<_> = subset_stream(a, len).collect();
        prop_assert_eq!(subs.len() as f64, binomial(a.len() as i64, len as i64));
        prop_assert!(subs.iter().all(|s| s.is_subset_of(a) && s.len() == len));
        prop_assert!(subs.windows(2).all(|w| w[0].bits() < w[1].bits()));
    }

    #[test]
    fn dense_tensor_is_antisymmetric(state in small_state(), i in 0usize..4, j in 0usize..4) {
        let d = state.to_dense(1e6).unwrap();
        let (i, j) = (i % state.n(), j % state.n());
        prop_assume!(i != j);
        prop_assert!(d.swap_axes(i, j).max_abs_diff(&d.scale(-1.0)) < 1e-14);
    }

    #[test]
    fn wedge_of_slater_tensors((a, b, _) in disjoint3(6)) {
        prop_assume!(!a.is_empty() && !b.is_empty() && a.len() + b.len() <= 5);
        let ua = SlaterExpansion::slater_state(a, 6).unwrap().to_dense(1e6).unwrap();
        let ub = SlaterExpansion::slater_state(b, 6).unwrap().to_dense(1e6).unwrap();
        let uab = SlaterExpansion::slater_state(a.union(b).unwrap(), 6).unwrap().to_dense(1e6).unwrap();
        let w = ua.wedge(&ub, 1e6).unwrap();
        let expect = uab.scale(relative_sign(a, b).unwrap().as_f64());
        prop_assert!(w.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn rdm_is_hermitian_psd_with_binomial_trace(state in small_state(), k in 0usize..5) {
        let k = k.min(state.n());
        let g = rdm_slater(&state, k).unwrap();
        prop_assert!(g.hermiticity_defect() < 1e-14);
        let n = state.n() as i64;
        prop_assert!((g.trace() - binomial(n, k as i64)).abs() < 1e-11);
        let sp = spectrum(&g, false).unwrap();
        prop_assert!(sp.eigenvalues.iter().all(|&l| l > -1e-10));
        // Pauli: every eigenvalue of Γ^(1) is at most one
        if k == 1 {
            prop_assert!(sp.op_norm <= 1.0 + 1e-12);
        }
        // ‖Γ‖_op ≤ ‖Γ‖_HS ≤ Tr Γ
        prop_assert!(sp.op_norm <= sp.hs_norm * (1.0 + 1e-12) + 1e-14);
        prop_assert!(sp.hs_norm <= sp.trace * (1.0 + 1e-12) + 1e-14);
        // and the normalized entropy sits in [floor, log rank]
        let sn = spectrum(&g, true).unwrap();
        prop_assert!(sn.von_neumann >= -(sn.hs_norm * sn.hs_norm).ln() - 1e-10);
        prop_assert!(sn.von_neumann <= (g.dim() as f64).ln() + 1e-10);
    }

    #[test]
    fn sparse_and_dense_constructions_agree(state in small_state(), k in 0usize..5) {
        let k = k.min(state.n());
        let a = rdm_slater(&state, k).unwrap();
        let b = fermi_rdm::rdm::rdm_dense_oracle(&state, k, 1e6).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn cells_are_real_and_level_zero_sums_to_one(state in small_state()) {
        let table = LambdaTable::build(&state, DEFAULT_MAX_OPS).unwrap();
        prop_assert!(table.max_imag() < 1e-12);
        let n = state.n();
        let g0: f64 = (0..=n).map(|r| table.total(0, r)).sum();
        prop_assert!((g0 - 1.0).abs() < 1e-12);
        // every level-zero block is a square norm
        for (_, blocks) in table.cores() {
            prop_assert!(blocks[0] >= -1e-14);
        }
    }

    #[test]
    fn lemmas_and_propositions_hold(state in small_state()) {
        let lab = Lab::new(&state, DEFAULT_MAX_OPS).unwrap();
        let n = state.n();
        for t in (1..=n).step_by(2) {
            prop_assert!(lab.odd_lemma_suite(t).unwrap().iter().all(|r| r.pass));
        }
        for t in (2..=n).step_by(2) {
            prop_assert!(lab.even_lemma_suite(t, 1.0).unwrap().iter().all(|r| r.pass));
        }
        for t in 1..=n {
            let (rep, ledger) = lab.proposition_check(t, None).unwrap();
            prop_assert!(rep.pass && ledger.all_finite());
        }
    }

    #[test]
    fn theorem_bound_is_sound(state in small_state(), k in 1usize..4) {
        let k = k.min(state.n());
        let direct = rdm_slater(&state, k).unwrap().hs_norm_sqr();
        let tr = Lab::new(&state, DEFAULT_MAX_OPS).unwrap().theorem_trace(k, direct).unwrap();
        prop_assert!(tr.pass && tr.state_bound <= tr.bound * (1.0 + 1e-12));
        prop_assert!(tr.realized_ck.is_finite());
    }

    #[test]
    fn yang_op_norm_within_n(half_n in 1usize..4, half_extra in 0usize..3) {
        let (n, m) = (2 * half_n, 2 * (half_n + half_extra));
        let y = SlaterExpansion::yang_pairing_state(n, m).unwrap();
        let sp = spectrum(&rdm_slater(&y, 2.min(n)).unwrap(), false).unwrap();
        prop_assert!(sp.op_norm <= n as f64 + 1e-8);
    }
}

#[test]
fn enumerate_count_and_order() {
    for m in 0..=12 {
        for len in 0..=m + 1 {
            let v: Vec<_> = enumerate(len, m).collect();
            assert_eq!(v.len() as u128, count(m, len), "m={m} len={len}");
            assert!(v.windows(2).all(|w| w[0].bits() < w[1].bits()));
            assert!(v.iter().all(|x| x.len() == len && x.within(m)));
            for (i, x) in v.iter().enumerate() {
                assert_eq!(x.rank(), i);
            }
        }
    }
}
