use hk_core::decide::{decide, sksat, Algorithm, Options};
use hk_core::formula::{parse, Var};
use hk_core::hset::{check_k, parse_set, render_set, sim_n, tcl_structure, HSet};
use hk_core::limits::Limits;
use hk_core::oracle::{random_formula, random_set, rng};
use hk_core::structure::{embeds, enumerate, isomorphic, TclStructure};
use proptest::prelude::*;

fn sets(seed: u64, k: usize, height: usize, l: usize) -> Vec<HSet> {
    let mut r = rng(seed);
    (0..l).map(|_| random_set(&mut r, k, height)).collect()
}

/// Same graph, nodes renamed by a permutation.
fn relabel(s: &TclStructure, perm: &[usize]) -> TclStructure {
    let name = |n: &str| {
        let i = s.names().iter().position(|x| x == n).unwrap();
        format!("v{}", perm[i])
    };
    let nodes: Vec<String> = (0..s.len()).map(|i| format!("v{}", perm[i])).collect();
    let edges: Vec<(String, String)> = s.edges().iter().map(|(u, v)| (name(u), name(v))).collect();
    let tuple: Vec<String> = s.tuple_names().iter().map(|t| name(t)).collect();
    TclStructure::from_parts(&nodes, &edges, &tuple).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formulas_round_trip(seed in any::<u64>(), free in 0usize..3, rank in 0u32..4) {
        let vars: Vec<Var> = (0..free).map(|i| Var::new(&format!("x{i}"))).collect();
        let f = random_formula(&mut rng(seed), &vars, rank, 5, 6);
        let text = f.to_string();
        prop_assert_eq!(parse(&text).unwrap(), f);
    }

    #[test]
    fn sets_round_trip(seed in any::<u64>(), k in 0usize..4, h in 0usize..4) {
        let s = sets(seed, k, h, 1).pop().unwrap();
        prop_assert!(check_k(&s, k));
        prop_assert_eq!(parse_set(&render_set(&s)).unwrap(), s);
    }

    #[test]
    fn canonical_key_ignores_labels(seed in any::<u64>(), k in 1usize..4, m in 0u64..4, l in 1usize..3) {
        let s = tcl_structure(&sets(seed, k, 4, l), m);
        let mut perm: Vec<usize> = (0..s.len()).collect();
        perm.reverse();
        perm.rotate_left((seed % (s.len() as u64)) as usize);
        let t = relabel(&s, &perm);
        prop_assert!(isomorphic(&s, &t));
        prop_assert_eq!(s.canonical_key(), t.canonical_key());
        prop_assert_eq!(s.canonicalize().0, t.canonicalize().0);
    }

    #[test]
    fn closures_and_restrictions_are_valid(seed in any::<u64>(), k in 0usize..4, m in 0u64..4, l in 1usize..4) {
        let tuple = sets(seed, k, 5, l);
        let s = tcl_structure(&tuple, m);
        prop_assert!(s.validate(k, m));
        for sub in 0..=m {
            let all: Vec<usize> = (0..l).collect();
            let r = s.restrict(sub, &all);
            prop_assert!(r.validate(k, sub));
            prop_assert!(isomorphic(&r, &tcl_structure(&tuple, sub)));
            prop_assert!(embeds(&r, &s));
            let first = s.restrict(sub, &[0]);
            prop_assert!(isomorphic(&first, &tcl_structure(&tuple[..1], sub)));
        }
    }

    #[test]
    fn similarity_is_monotone(seed in any::<u64>(), k in 1usize..3, n in 0u64..5) {
        let a = sets(seed, k, 4, 2);
        let b = sets(seed.wrapping_add(1), k, 4, 2);
        if sim_n(&a, &b, n) {
            for lower in 0..n {
                prop_assert!(sim_n(&a, &b, lower));
            }
        }
        prop_assert!(sim_n(&a, &a, n));
    }

    #[test]
    fn memo_does_not_change_results(seed in any::<u64>()) {
        let f = random_formula(&mut rng(seed), &[], 2, 3, 5);
        let cached = Options { algorithm: Algorithm::Rank, ..Options::default() };
        let plain = Options { cache_entries: 0, ..cached.clone() };
        let a = decide(1, &f, &cached).unwrap();
        let b = decide(1, &f, &plain).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(a.structures_enumerated, b.structures_enumerated);
    }

    #[test]
    fn truth_depends_only_on_the_closure(seed in any::<u64>()) {
        // k = 1, rank 1 formulas need level 3.
        let x = Var::new("x");
        let f = random_formula(&mut rng(seed), std::slice::from_ref(&x), 1, 2, 4);
        let a = sets(seed, 1, 10, 1);
        let b = sets(seed.wrapping_add(1), 1, 10, 1);
        if sim_n(&a, &b, 3) {
            let opts = Options::default();
            let va = sksat(&tcl_structure(&a, 3), 3, &f, std::slice::from_ref(&x), 1, &opts).unwrap();
            let vb = sksat(&tcl_structure(&b, 3), 3, &f, std::slice::from_ref(&x), 1, &opts).unwrap();
            prop_assert_eq!(va.value, vb.value);
        }
    }
}

#[test]
fn sequential_and_parallel_enumeration_agree() {
    for (k, m, l) in [(1, 4, 2), (2, 1, 2), (2, 1, 3)] {
        let seq = enumerate(k, m, l, &Limits::default().with_parallel(false)).unwrap();
        let par = enumerate(k, m, l, &Limits::default().with_parallel(true)).unwrap();
        assert_eq!(seq, par);
    }
}
