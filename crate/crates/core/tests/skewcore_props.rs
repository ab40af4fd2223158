mod common;

use common::permute_dense;
use proptest::prelude::*;
use skewltl::oracle::{gauss_elim_exact, rational_dense, reconstruct_exact};
use skewltl::skewcore::*;

fn tau_vec(max_m: usize) -> impl Strategy<Value = Vec<f64>> {
    (1..=max_m).prop_flat_map(|m| prop::collection::vec(-10.0f64..10.0, m - 1))
}

fn pivots_for(m: usize) -> impl Strategy<Value = Vec<usize>> {
    (0..m).map(move |k| 0..(m - k)).collect::<Vec<_>>()
}

proptest! {
    #[test]
    fn splitting_reproduces_t_and_has_zero_odd_rows(tau in tau_vec(64)) {
        let t = SkewTridiagonal::new(tau.clone());
        let s = form_s_splitting(&t).to_dense();
        let m = t.dim();
        for i in 0..m {
            for j in 0..m {
                prop_assert_eq!(s[(i, j)] - s[(j, i)], t.get(i, j));
                if i % 2 == 1 {
                    prop_assert_eq!(s[(i, j)], 0.0);
                }
            }
        }
        for (i, &v) in tau.iter().enumerate() {
            prop_assert_eq!(s[(i + 1, i)] - s[(i, i + 1)], v);
        }
    }

    #[test]
    fn pivot_chain_matches_dense_permutation(
        (m, seed, piv) in (1usize..12).prop_flat_map(|m| (Just(m), any::<u64>(), pivots_for(m)))
    ) {
        let mut x = SkewMatrix::random_gaussian(m, seed);
        let dense = x.to_dense();
        for (k, &p) in piv.iter().enumerate() {
            apply_symmetric_pivot(&mut x, k, p).unwrap();
        }
        let perm = compose_permutation(&PermutationVector::new(piv), m).unwrap();
        prop_assert_eq!(x.to_dense(), permute_dense(&dense, &perm));
    }

    #[test]
    fn compose_matches_sequential_swaps(piv in pivots_for(6)) {
        let p = PermutationVector::new(piv.clone());
        let mut v: Vec<f64> = (0..6).map(|i| i as f64).collect();
        p.apply_to(&mut v, true);
        let perm = compose_permutation(&p, 6).unwrap();
        let composed: Vec<f64> = perm.iter().map(|&i| i as f64).collect();
        prop_assert_eq!(&v, &composed);
        p.apply_to(&mut v, false);
        prop_assert_eq!(v, (0..6).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn pack_then_unpack_is_identity(m in 1usize..20, seed in any::<u64>()) {
        let x = SkewMatrix::random_gaussian(m, seed);
        let d = Mat::from_fn(m, m, |i, j| if i == j { 1.0 } else if i > j && j > 0 { x.get(i, j) } else { 0.0 });
        let mut l = UnitLowerFactor::from_dense(&d).unwrap();
        let before = l.clone();
        let t = SkewTridiagonal::with_dim(m, (1..m).map(|i| x.get(i, 0)).collect());
        pack_in_place(&mut l, &t).unwrap();
        prop_assert_eq!(l.mode(), StorageMode::PackedShifted);
        for j in 1..m {
            prop_assert_eq!(l.storage().raw(j, j - 1), t.tau[j - 1]);
        }
        prop_assert_eq!(unpack(&mut l), t);
        prop_assert_eq!(l, before);
    }

    #[test]
    fn matrix_market_round_trip(m in 0usize..15, seed in any::<u64>()) {
        let x = SkewMatrix::random_gaussian(m, seed);
        prop_assert_eq!(parse_mm(&format_mm(&x)).unwrap(), x);
    }

    #[test]
    fn exact_factorization_reconstructs_integer_matrices(
        m in 1usize..=8,
        entries in prop::collection::vec(-9i32..=9, 28),
        pivot in any::<bool>(),
    ) {
        let mut it = entries.into_iter();
        let x = SkewMatrix::from_lower_fn(m, |_, _| it.next().unwrap() as f64);
        match gauss_elim_exact(&x, pivot) {
            Ok(f) => prop_assert_eq!(reconstruct_exact(&f), rational_dense(&x)),
            Err(e) => prop_assert!(!pivot, "pivoted elimination failed: {e}"),
        }
    }
}

#[test]
fn matrix_market_files_on_disk() {
    let dir = std::env::temp_dir().join(format!("skewltl-mm-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("x.mtx");
    let x = SkewMatrix::random_gaussian(9, 77);
    mm_write(&path, &x).unwrap();
    assert_eq!(mm_read(&path).unwrap(), x);
    let l = Mat::identity(3);
    mm_write_general(dir.join("l.mtx"), &l).unwrap();
    let text = std::fs::read_to_string(dir.join("l.mtx")).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n3 3 3\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn upper_entries_are_negated_and_duplicates_summed() {
    let text = "%%MatrixMarket matrix coordinate real skew-symmetric\n3 3 3\n1 2 4.0\n3 1 1.0\n3 1 2.0\n";
    let x = parse_mm(text).unwrap();
    assert_eq!(x.raw(1, 0), -4.0);
    assert_eq!(x.raw(2, 0), 3.0);
}
