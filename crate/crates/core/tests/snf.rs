mod common;

use bianchi::homology::snf::{smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn snf_of_sparse_matrices(a in common::any_sparse_matrix()) {
        common::snf_check(&a).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn snf_of_10_by_12(a in common::sparse_matrix(10, 12)) {
        common::snf_check(&a).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn snf_of_rank_deficient_product() {
    // a 6x6 product of a 6x3 and a 3x6 has rank at most 3
    let l = IntMatrix::from_rows(&[
        vec![1, 2, 0],
        vec![0, 3, 1],
        vec![4, 0, 2],
        vec![1, 1, 1],
        vec![2, 0, 6],
        vec![0, 0, 1],
    ]);
    let a = l.mul(&l.transpose());
    assert_eq!(smith_normal_form(&a).rank(), 3);
    assert_eq!(common::rational_rank(&a.to_dense()), 3);
    common::snf_check(&a).unwrap();
}

#[test]
fn determinant_oracle_matches() {
    let a = IntMatrix::from_rows(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
    let prod: BigInt = smith_normal_form(&a).diag.iter().product();
    assert_eq!(prod, common::abs_det(&a.to_dense()));
    assert_eq!(prod, BigInt::from(18));
}
