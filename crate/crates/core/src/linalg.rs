//! Fraction-free elimination over `R_d`.
//!
//! Bareiss elimination keeps every intermediate entry inside the ring: after
//! step `k` each entry is a `(k+1) x (k+1)` minor of the input, so dividing by
//! the previous pivot is always exact.

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Monomial, PolyMatrix};

fn exact(num: &LaurentPoly, den: &LaurentPoly) -> LaurentPoly {
    num.div_exact(den)
        .expect("matching dimensions")
        .expect("Bareiss step must divide exactly")
}

/// Rank of `m` over the fraction field of `R_d`.
pub fn rank(m: &PolyMatrix) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut prev = LaurentPoly::one(a.dim());
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, col).is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let pivot = a.get(r, col).clone();
        for i in r + 1..rows {
            let lead = a.get(i, col).clone();
            for j in col + 1..cols {
                let num = &(&pivot * a.get(i, j)) - &(&lead * a.get(r, j));
                a.set(i, j, exact(&num, &prev));
            }
            a.set(i, col, LaurentPoly::zero(a.dim()));
        }
        prev = pivot;
        r += 1;
    }
    r
}

/// Determinant of a square matrix.
pub fn determinant(m: &PolyMatrix) -> Result<LaurentPoly> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidInput(format!("{}x{} matrix is not square", n, m.ncols())));
    }
    let dim = m.dim();
    if n == 0 {
        return Ok(LaurentPoly::one(dim));
    }
    let mut a = m.clone();
    let mut prev = LaurentPoly::one(dim);
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
            return Ok(LaurentPoly::zero(dim));
        };
        if p != k {
            a.swap_rows(p, k);
            negate = !negate;
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            let lead = a.get(i, k).clone();
            for j in k + 1..n {
                let num = &(&pivot * a.get(i, j)) - &(&lead * a.get(k, j));
                a.set(i, j, exact(&num, &prev));
            }
            a.set(i, k, LaurentPoly::zero(dim));
        }
        prev = pivot;
    }
    let det = a.get(n - 1, n - 1).clone();
    Ok(if negate { -det } else { det })
}

/// Coefficients of `f` as a polynomial in variable `var`, lowest degree
/// first. `f` must have nonnegative exponents in `var`.
pub fn coefficients_in(f: &LaurentPoly, var: usize) -> Result<Vec<LaurentPoly>> {
    let dim = f.dim();
    if var >= dim {
        return Err(Error::InvalidInput(format!("variable index {var} out of range")));
    }
    let Some(maxe) = f.max_exponents() else {
        return Ok(Vec::new());
    };
    let mine = f.min_exponents().unwrap();
    if mine[var] < 0 {
        return Err(Error::InvalidInput("negative exponent in elimination variable".into()));
    }
    let mut out = vec![LaurentPoly::zero(dim); maxe[var] as usize + 1];
    for (m, c) in f.terms() {
        let e = m.0[var] as usize;
        let mut rest = m.0.clone();
        rest[var] = 0;
        out[e] = &out[e] + &LaurentPoly::monomial(dim, Monomial(rest), c.clone());
    }
    Ok(out)
}

/// Sylvester matrix of `f` and `g` viewed as polynomials in `var`.
pub fn sylvester(f: &LaurentPoly, g: &LaurentPoly, var: usize) -> Result<PolyMatrix> {
    let fc = coefficients_in(f, var)?;
    let gc = coefficients_in(g, var)?;
    if fc.is_empty() || gc.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    let size = m + n;
    let mut s = PolyMatrix::zeros(f.dim(), size, size);
    for i in 0..n {
        for (k, c) in fc.iter().rev().enumerate() {
            s.set(i, i + k, c.clone());
        }
    }
    for i in 0..m {
        for (k, c) in gc.iter().rev().enumerate() {
            s.set(n + i, i + k, c.clone());
        }
    }
    Ok(s)
}

/// Resultant of `f` and `g` with respect to `var`; the result does not
/// involve `var`.
pub fn resultant(f: &LaurentPoly, g: &LaurentPoly, var: usize) -> Result<LaurentPoly> {
    determinant(&sylvester(f, g, var)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use num_bigint::BigInt;

    fn p(s: &str, d: usize) -> LaurentPoly {
        parse_poly(s, Some(d)).unwrap()
    }

    fn mat(d: usize, rows: &[&[&str]]) -> PolyMatrix {
        let cols = rows[0].len();
        PolyMatrix::from_rows(
            d,
            cols,
            rows.iter().map(|r| r.iter().map(|s| p(s, d)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&mat(2, &[&["1 + u1 + u2"]])), 1);
        assert_eq!(rank(&mat(1, &[&["u1", "1"], &["u1^2", "u1"]])), 1);
        assert_eq!(rank(&mat(1, &[&["u1", "1"], &["1", "u1"]])), 2);
        assert_eq!(rank(&mat(1, &[&["0", "0"]])), 0);
        assert_eq!(rank(&PolyMatrix::zeros(2, 0, 3)), 0);
    }

    #[test]
    fn rank_skips_zero_columns() {
        let m = mat(2, &[&["0", "u1", "u2"], &["0", "2*u1", "2*u2"], &["0", "1", "u1"]]);
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn determinant_matches_cofactor() {
        let m = mat(2, &[&["u1", "1", "0"], &["u2", "u1 - 1", "3"], &["1", "u2", "u1*u2"]]);
        // cofactor expansion along the first row
        let a = |i, j| m.get(i, j).clone();
        let minor =
            |r0: usize, r1: usize, c0: usize, c1: usize| &(&a(r0, c0) * &a(r1, c1)) - &(&a(r0, c1) * &a(r1, c0));
        let expect =
            &(&(&a(0, 0) * &minor(1, 2, 1, 2)) - &(&a(0, 1) * &minor(1, 2, 0, 2))) + &(&a(0, 2) * &minor(1, 2, 0, 1));
        assert_eq!(determinant(&m).unwrap(), expect);
    }

    #[test]
    fn determinant_with_row_swap() {
        let m = mat(1, &[&["0", "1"], &["1", "0"]]);
        assert_eq!(determinant(&m).unwrap(), LaurentPoly::constant(1, -1));
    }

    #[test]
    fn resultant_counts_periodic_points() {
        // res(u - 2, u^N - 1) = ±(2^N - 1)
        for n in 1..=12u32 {
            let r = resultant(&p("u1 - 2", 1), &p(&format!("u1^{n} - 1"), 1), 0).unwrap();
            let expect = BigInt::from(2).pow(n) - 1;
            assert!(r.is_constant());
            let c = r.coeff(&Monomial::one(1));
            assert!(c == expect || c == -expect.clone(), "n={n}: {c}");
        }
    }

    #[test]
    fn resultant_detects_common_root() {
        let r = resultant(&p("u1^2 - 1", 1), &p("u1^3 - 1", 1), 0).unwrap();
        assert!(r.is_zero());
    }
}
