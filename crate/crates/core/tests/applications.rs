mod common;

use common::{hashed, EPS};
use proptest::prelude::*;
use skewltl::apps::*;
use skewltl::factor::{FactorOptions, Variant};
use skewltl::oracle::{det_dense, gauss_elim_exact, pfaffian_bruteforce, pfaffian_exact, rat};
use skewltl::skewcore::*;
use skewltl::Error;

fn matvec(x: &SkewMatrix, y: &[f64]) -> Vec<f64> {
    let d = x.to_dense();
    (0..x.dim()).map(|i| (0..x.dim()).map(|j| d[(i, j)] * y[j]).sum()).collect()
}

#[test]
fn worked_example_pfaffian_and_solve() {
    let x = SkewMatrix::worked_example();
    assert_eq!(pfaffian(&x), 21.0);
    assert_eq!(pfaffian_bruteforce(&x), 21.0);
    assert_eq!(pfaffian_exact(&gauss_elim_exact(&x, false).unwrap()), rat(21.0));
    let b = matvec(&x, &[1.0; 4]);
    let y = solve_vec(&x, &b).unwrap();
    assert!(y.iter().all(|v| (v - 1.0).abs() <= 1e-12), "{y:?}");
}

#[test]
fn two_by_two_conventions() {
    let x = SkewMatrix::from_lower_entries(2, &[3.0]).unwrap();
    assert_eq!(x.get(0, 1), -3.0);
    assert_eq!(pfaffian(&x), -3.0);
    assert_eq!(solve_vec(&x, &[0.0, 3.0]).unwrap(), vec![1.0, 0.0]);
    assert_eq!(pfaffian(&SkewMatrix::random_gaussian(3, 2)), 0.0);
    assert_eq!(pfaffian(&SkewMatrix::zeros(0)), 1.0);
}

#[test]
fn pfaffian_squared_is_determinant() {
    let mut count = 0;
    for seed in 0..50u64 {
        for m in [2usize, 4, 6, 8, 10, 12] {
            if count == 100 {
                break;
            }
            count += 1;
            let x = SkewMatrix::random_gaussian(m, seed * 31 + m as u64);
            let pf = pfaffian(&x);
            let det = det_dense(&x.to_dense());
            assert!((pf * pf - det).abs() <= 1e-10 * det.abs(), "m={m}: {} vs {det}", pf * pf);
            if m <= 8 {
                let bf = pfaffian_bruteforce(&x);
                assert!((pf - bf).abs() <= 1e-10 * bf.abs(), "m={m}: {pf} vs {bf}");
            }
        }
    }
    assert_eq!(count, 100);
}

#[test]
fn pfaffian_is_the_same_for_every_variant() {
    for m in [2usize, 6, 24, 50] {
        let x = SkewMatrix::random_gaussian(m, 4 + m as u64);
        let reference = pfaffian(&x);
        for v in Variant::ALL {
            for pivot in [false, true] {
                let opts = FactorOptions::new(v, pivot).with_block(5);
                match pfaffian_with(&x, &opts) {
                    Ok(pf) => assert!((pf - reference).abs() <= 1e-9 * reference.abs(), "{v} pivot={pivot}"),
                    Err(e) => assert!(pivot && e == Error::PivotUnsupported, "{v}: {e}"),
                }
            }
        }
    }
}

#[test]
fn solve_multiple_right_hand_sides() {
    let m = 64;
    let x = SkewMatrix::random_gaussian(m, 8);
    let b = hashed(m, 7, 9);
    let y = solve(&x, &b).unwrap();
    for j in 0..7 {
        let col: Vec<f64> = (0..m).map(|i| b[(i, j)]).collect();
        let single = solve_vec(&x, &col).unwrap();
        for i in 0..m {
            assert_eq!(y[(i, j)], single[i]);
        }
    }
    assert!(matches!(solve(&x, &hashed(m - 1, 1, 0)), Err(Error::DimensionMismatch(_))));
}

#[test]
fn singular_matrix_is_reported() {
    let u = [1.0, 2.0, -1.0, 0.5];
    let v = [0.0, 1.0, 3.0, -2.0];
    let x = SkewMatrix::from_lower_fn(4, |i, j| u[i] * v[j] - v[i] * u[j]);
    assert!(matches!(solve_vec(&x, &[1.0, 0.0, 0.0, 0.0]), Err(Error::SingularT { .. })));
    assert!(matches!(solve_vec(&SkewMatrix::random_gaussian(5, 1), &[1.0; 5]), Err(Error::SingularT { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn solve_has_small_backward_error(half in 1usize..40, seed in any::<u64>()) {
        let m = 2 * half;
        let x = SkewMatrix::random_gaussian(m, seed);
        let b = hashed(m, 1, seed ^ 1).data;
        let y = solve_vec(&x, &b).unwrap();
        let r: f64 = matvec(&x, &y).iter().zip(&b).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(r <= 100.0 * EPS * m as f64 * (x.frobenius() * ynorm + bnorm));
    }
}
