use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use randtree::oracle::{enumerate_shapes, ShapeKey};
use randtree::prng::{derive_trial_seed, RngState, MAX_STATE, RAW_RANGE};
use randtree::shape::{
    depth_from_lattice, fill_alternating, first_min_index, is_valid_preorder, knuth_shuffle,
    random_shape, rotate_left,
};
use randtree::tree::{depth_recursive_oracle, DEFAULT_RECURSION_LIMIT};
use randtree::{random_tree, to_sexpr, PrimitiveSet, ShapeSequence, Tree};

/// Test-side s-expression reader; shares nothing with the renderer.
fn parse_sexpr(text: &str, prims: &PrimitiveSet) -> Vec<u8> {
    text.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .filter(|t| *t != "(" && *t != ")")
        .map(|t| prims.opcode_of(t).expect("known primitive"))
        .collect()
}

fn shape_tree(seq: &ShapeSequence) -> Tree {
    let prims = Arc::new(PrimitiveSet::new(["x"], ["ADD"]).unwrap());
    Tree::from_opcodes(seq.as_bytes().to_vec(), prims, 1).unwrap()
}

#[test]
fn park_miller_never_leaves_range() {
    let mut r = RngState::new(1).unwrap();
    let mut seen_start = false;
    for _ in 0..1_000_000 {
        let v = r.next_raw();
        assert!((1..=MAX_STATE).contains(&v));
        seen_start |= v == 1;
    }
    // The period is m - 1, far longer than this window.
    assert!(!seen_start);
}

#[test]
fn residue_census_within_five_sigma() {
    let draws = 1_000_000u64;
    for bound in [2u64, 3, 7, 100] {
        let mut r = RngState::new(1).unwrap();
        let mut bins = vec![0u64; bound as usize];
        for _ in 0..draws {
            bins[r.uniform_below(bound).unwrap() as usize] += 1;
        }
        let p = 1.0 / bound as f64;
        let expect = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (i, &c) in bins.iter().enumerate() {
            assert!(
                (c as f64 - expect).abs() < 5.0 * sigma,
                "bound {bound} residue {i}: {c} vs {expect}"
            );
        }
    }
}

#[test]
fn trial_seeds_are_distinct() {
    let seeds: HashSet<u64> = (0..100_000)
        .map(|i| derive_trial_seed(1, i).unwrap())
        .collect();
    assert_eq!(seeds.len(), 100_000);
}

#[test]
fn exactly_one_valid_rotation_and_first_minimum_finds_it() {
    for n in 0..=6u64 {
        let len = 2 * n + 1;
        for mask in 0u64..1 << len {
            if mask.count_ones() as u64 != n {
                continue;
            }
            let seq = ShapeSequence::parse(
                &format!("{mask:0w$b}", w = len as usize)
                    .replace('1', "F")
                    .replace('0', "L"),
            )
            .unwrap();
            let valid: Vec<usize> = (0..len as usize)
                .filter(|&k| {
                    let mut r = seq.clone();
                    rotate_left(&mut r, k).unwrap();
                    is_valid_preorder(&r)
                })
                .collect();
            assert_eq!(valid.len(), 1, "{seq}");
            assert_eq!(first_min_index(&seq) % len as usize, valid[0], "{seq}");
        }
    }
}

#[test]
fn lattice_depth_matches_recursion_exhaustively() {
    for n in 0..=10 {
        for seq in enumerate_shapes(n).unwrap() {
            let t = shape_tree(&seq);
            let rec = depth_recursive_oracle(&t, DEFAULT_RECURSION_LIMIT).unwrap();
            assert_eq!(depth_from_lattice(&seq).unwrap() as u64, rec, "{seq}");
        }
    }
}

#[test]
fn shape_census_n4_reaches_every_shape() {
    let all: HashSet<ShapeKey> = enumerate_shapes(4)
        .unwrap()
        .iter()
        .map(ShapeKey::of)
        .collect();
    let mut seen = HashSet::new();
    for i in 0..14_000 {
        let mut rng = RngState::new(derive_trial_seed(1, i).unwrap()).unwrap();
        let seq = random_shape(4, &mut rng).unwrap();
        let key = ShapeKey::of(&seq);
        assert!(all.contains(&key));
        seen.insert(key);
    }
    assert_eq!(seen, all);
}

#[test]
fn random_shapes_valid_for_many_sizes() {
    let mut pick = RngState::new(2024).unwrap();
    for trial in 0..10_000u64 {
        let n = pick.uniform_below(10_000).unwrap() + 1;
        let mut rng = RngState::new(derive_trial_seed(3, trial).unwrap()).unwrap();
        let seq = random_shape(n, &mut rng).unwrap();
        assert!(is_valid_preorder(&seq));
        assert_eq!(seq.internal_count() as u64, n);
    }
}

#[test]
fn labeling_is_balanced_across_terminals() {
    let prims = Arc::new(PrimitiveSet::new(["x", "y"], ["ADD"]).unwrap());
    let trials = 10_000u64;
    let ys = (0..trials)
        .filter(|&i| {
            let t = random_tree(1, &prims, derive_trial_seed(11, i).unwrap()).unwrap();
            t.opcodes()[0] == 1
        })
        .count() as f64;
    let sigma = (trials as f64 * 0.25).sqrt();
    assert!((ys - trials as f64 / 2.0).abs() < 5.0 * sigma, "{ys}");
}

#[test]
fn generation_is_deterministic() {
    let prims = Arc::new(PrimitiveSet::default_set());
    for seed in [1, 42, 2_147_483_646] {
        let a = random_tree(100_001, &prims, seed).unwrap();
        let b = random_tree(100_001, &prims, seed).unwrap();
        assert_eq!(a, b);
    }
}

fn small_n() -> impl Strategy<Value = u64> {
    0u64..2_000
}

fn seed() -> impl Strategy<Value = u64> {
    1u64..=MAX_STATE as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shuffle_preserves_tag_counts(n in small_n(), s in seed()) {
        let mut seq = fill_alternating(n).unwrap();
        knuth_shuffle(&mut seq, &mut RngState::new(s).unwrap());
        prop_assert_eq!(seq.internal_count() as u64, n);
        prop_assert_eq!(seq.len() as u64, 2 * n + 1);
    }

    #[test]
    fn rotation_inverts(n in small_n(), s in seed(), frac in 0.0f64..=1.0) {
        let mut seq = fill_alternating(n).unwrap();
        knuth_shuffle(&mut seq, &mut RngState::new(s).unwrap());
        let orig = seq.clone();
        let len = seq.len();
        let k = ((len as f64) * frac) as usize;
        rotate_left(&mut seq, k).unwrap();
        prop_assert_eq!(seq.internal_count(), orig.internal_count());
        if k < len {
            prop_assert_eq!(seq.tag(0), orig.tag(k));
        }
        rotate_left(&mut seq, len - k).unwrap();
        prop_assert_eq!(seq, orig);
    }

    #[test]
    fn depth_bounds_hold(n in 1u64..5_000, s in seed()) {
        let seq = random_shape(n, &mut RngState::new(s).unwrap()).unwrap();
        let d = depth_from_lattice(&seq).unwrap() as u64;
        // 1 + ceil(log2(n + 1)) is 1 + the bit length of n.
        let lower = 1 + (64 - n.leading_zeros() as u64);
        prop_assert!(d >= lower, "depth {} below {}", d, lower);
        prop_assert!(d <= n + 1);
    }

    #[test]
    fn depth_field_matches_recursion(half in 0u64..10_000, s in seed()) {
        let prims = Arc::new(PrimitiveSet::default_set());
        let t = random_tree(2 * half + 1, &prims, s).unwrap();
        prop_assert!(t.wellformed());
        prop_assert_eq!(depth_recursive_oracle(&t, DEFAULT_RECURSION_LIMIT).unwrap(), t.depth());
    }

    #[test]
    fn sexpr_round_trips(half in 0u64..300, s in seed()) {
        let prims = Arc::new(PrimitiveSet::default_set());
        let t = random_tree(2 * half + 1, &prims, s).unwrap();
        prop_assert_eq!(parse_sexpr(&to_sexpr(&t), &prims), t.opcodes().to_vec());
    }

    #[test]
    fn wide_and_narrow_bounds_in_range(s in seed(), bound in 1u64..(4 * RAW_RANGE)) {
        use randtree::UniformSource;
        let mut r = RngState::new(s).unwrap();
        prop_assert!(r.below(bound) < bound);
    }
}

#[test]
fn depth_lower_bound_formula_sanity() {
    // 1 + ceil(log2(n + 1)) for a few hand-checked n.
    let f = |n: u64| 1 + (64 - n.leading_zeros() as u64);
    let g = |n: u64| 1 + ((n + 1) as f64).log2().ceil() as u64;
    for n in 1..100_000 {
        assert_eq!(f(n), g(n));
    }
    assert_eq!(f(1), 2);
    assert_eq!(f(2), 3);
    assert_eq!(f(3), 3);
    assert_eq!(f(4), 4);
    assert_eq!(f(7), 4);
}
