#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use bianchi::report::Pipeline;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub const M_SET: [i64; 8] = [2, 5, 6, 7, 10, 11, 13, 15];

/// Pipelines are shared across the tests of one binary.
pub fn pipeline(m: i64) -> &'static Pipeline {
    static CACHE: OnceLock<Mutex<HashMap<i64, &'static Pipeline>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p;
    }
    let p: &'static Pipeline = Box::leak(Box::new(Pipeline::compute(m).expect("pipeline")));
    cache.lock().unwrap().entry(m).or_insert(p)
}

pub fn discriminant(m: i64) -> i64 {
    if m % 4 == 3 {
        -m
    } else {
        -4 * m
    }
}

/// Class number as the number of reduced positive definite binary quadratic
/// forms of discriminant `d`.
pub fn class_number_by_forms(d: i64) -> usize {
    assert!(d < 0);
    let mut h = 0;
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if a == c && b < 0 {
                continue;
            }
            h += 1;
        }
        a += 1;
    }
    h
}

/// Rank over Q by fraction-free elimination.
pub fn rational_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..n_cols {
        let Some(p) = (rank..n_rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in 0..n_rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                let pivot = a[rank].clone();
                for (x, y) in a[r][c..].iter_mut().zip(&pivot[c..]) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn abs_det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut det = BigRational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return BigInt::zero() };
        a.swap(c, p);
        det *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            let pivot = a[c].clone();
            for (x, y) in a[r][c..].iter_mut().zip(&pivot[c..]) {
                *x -= &f * y;
            }
        }
    }
    assert!(det.is_integer());
    det.to_integer().abs()
}

/// Checks `U A V = D`, unimodularity of `U` and `V`, the divisibility chain,
/// and the rank against [`rational_rank`].
pub fn snf_check(a: &bianchi::homology::snf::IntMatrix) -> Result<(), String> {
    use bianchi::homology::snf::{smith_normal_form, IntMatrix};
    use num_integer::Integer;
    use num_traits::One;

    let s = smith_normal_form(a);
    let fail = |what: &str| Err(format!("{what} for {a:?}"));
    if s.u.mul(a).mul(&s.v) != s.d {
        return fail("U A V != D");
    }
    if !s.u.det().abs().is_one() || !s.v.det().abs().is_one() {
        return fail("transform not unimodular");
    }
    if s.u.mul(&s.u_inv) != IntMatrix::identity(a.rows) || s.v.mul(&s.v_inv) != IntMatrix::identity(a.cols) {
        return fail("stored inverse is wrong");
    }
    if s.d.nonzeros().any(|(r, c, x)| r != c || !x.is_positive()) {
        return fail("D is not a nonnegative diagonal");
    }
    let diag: Vec<BigInt> = (0..a.rows.min(a.cols)).map(|i| s.d.get(i, i)).collect();
    let nz = diag.iter().take_while(|x| !x.is_zero()).count();
    if diag[nz..].iter().any(|x| !x.is_zero()) || diag[..nz] != s.diag[..] {
        return fail("zeros interleaved on the diagonal");
    }
    if s.diag.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
        return fail("divisibility chain broken");
    }
    if s.rank() != rational_rank(&a.to_dense()) {
        return fail("rank disagrees with elimination");
    }
    Ok(())
}

pub fn sparse_matrix(rows: usize, cols: usize) -> impl proptest::strategy::Strategy<Value = bianchi::homology::snf::IntMatrix> {
    use proptest::strategy::Strategy;
    proptest::collection::vec((0..rows, 0..cols, -4i64..=4), 0..=rows * cols / 2).prop_map(move |entries| {
        let mut a = vec![vec![0i64; cols]; rows];
        for (r, c, x) in entries {
            a[r][c] = x;
        }
        bianchi::homology::snf::IntMatrix::from_rows(&a)
    })
}

pub fn any_sparse_matrix() -> impl proptest::strategy::Strategy<Value = bianchi::homology::snf::IntMatrix> {
    use proptest::strategy::Strategy;
    (1usize..=12, 1usize..=12).prop_flat_map(|(r, c)| sparse_matrix(r, c))
}
