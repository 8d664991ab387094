//! Randomized invariants for the exact linear algebra underneath the
//! kernel. Matrices are small and integral; every identity is checked with
//! exact rational arithmetic.

use proptest::prelude::*;
use weyljf_core::matrix::{solve_square, RatMat};
use weyljf_core::rat::{rat_i, Rat};

fn int_matrix(n: usize) -> impl Strategy<Value = RatMat> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, n), n)
        .prop_map(|rows| RatMat::from_i64(&rows))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinant_is_multiplicative(a in int_matrix(3), b in int_matrix(3)) {
        prop_assert_eq!(a.mul(&b).det(), a.det() * b.det());
    }

    #[test]
    fn inverse_and_solve_agree(a in int_matrix(3), v in prop::collection::vec(-6i64..=6, 3)) {
        let rhs: Vec<Rat> = v.iter().map(|x| rat_i(*x)).collect();
        let rows: Vec<Vec<Rat>> = (0..3).map(|i| a.row(i).to_vec()).collect();
        if a.det() == rat_i(0) {
            prop_assert!(a.inverse().is_none());
        } else {
            let inv = a.inverse().expect("nonzero determinant");
            prop_assert_eq!(a.mul(&inv), RatMat::identity(3));
            let x = solve_square(&rows, &rhs).expect("unique solution");
            let ax = a.mul_vec(&x);
            prop_assert_eq!(ax, rhs);
        }
    }
}
