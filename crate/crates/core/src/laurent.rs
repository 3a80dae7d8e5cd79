//! Multivariate Laurent polynomials with integer coefficients.
//!
//! Elements of `R_d = Z[u1^±1, ..., ud^±1]` are stored as finite maps from
//! exponent vectors to nonzero [`BigInt`] coefficients. Terms are kept in
//! graded-lexicographic order on exponent vectors (total degree first, ties
//! broken lexicographically), so two polynomials are equal exactly when their
//! term maps are.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent vector `n` of the monomial `u^n = u1^n1 ... ud^nd`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of `Z[u1^±1, ..., ud^±1]` in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, 1)
    }

    pub fn constant(dim: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(dim, Monomial::one(dim), c)
    }

    pub fn monomial(dim: usize, m: Monomial, c: impl Into<BigInt>) -> Self {
        assert_eq!(m.dim(), dim, "monomial dimension");
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { dim, terms }
    }

    /// The variable `u_{i+1}` (zero-based index `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::monomial(dim, Monomial(e), 1)
    }

    /// `u^n - 1` for an exponent vector `n`.
    pub fn unit_minus_one(n: &[i32]) -> Self {
        let dim = n.len();
        Self::monomial(dim, Monomial(n.to_vec()), 1) - Self::one(dim)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I, C>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i32>, C)>,
        C: Into<BigInt>,
    {
        let mut p = LaurentPoly::zero(dim);
        for (e, c) in terms {
            assert_eq!(e.len(), dim, "exponent vector length");
            p.add_term(Monomial(e), c.into());
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// `±u^n`, the units of the ring.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().next().is_some_and(|c| c.abs().is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = LaurentPoly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero(self.dim);
        }
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Multiplication by the unit monomial `u^shift`.
    pub fn shift(&self, shift: &Monomial) -> Self {
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.mul(shift), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = LaurentPoly::one(self.dim);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Greatest common divisor of the coefficients; zero iff `self` is zero.
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Componentwise minimum of the exponents in the support.
    pub fn min_exponents(&self) -> Option<Vec<i32>> {
        let mut it = self.terms.keys();
        let first = it.next()?.0.clone();
        Some(it.fold(first, |mut acc, m| {
            for (a, &e) in acc.iter_mut().zip(&m.0) {
                *a = (*a).min(e);
            }
            acc
        }))
    }

    /// Componentwise maximum of the exponents in the support.
    pub fn max_exponents(&self) -> Option<Vec<i32>> {
        let mut it = self.terms.keys();
        let first = it.next()?.0.clone();
        Some(it.fold(first, |mut acc, m| {
            for (a, &e) in acc.iter_mut().zip(&m.0) {
                *a = (*a).max(e);
            }
            acc
        }))
    }

    /// Moves `self` into the positive orthant touching every coordinate
    /// hyperplane, returning the result and the unit monomial used.
    pub fn normalize_with_shift(&self) -> (Self, Monomial) {
        match self.min_exponents() {
            None => (self.clone(), Monomial::one(self.dim)),
            Some(mins) => {
                let shift = Monomial(mins.iter().map(|e| -e).collect());
                (self.shift(&shift), shift)
            }
        }
    }

    /// The canonical representative of `self` up to unit monomials.
    pub fn monomial_normalize(&self) -> Self {
        self.normalize_with_shift().0
    }

    /// True if every exponent is nonnegative.
    pub fn in_positive_orthant(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e >= 0))
    }

    /// Image under `u_i -> t^{n_i}`, a Laurent polynomial in one variable.
    pub fn substitute_monomial(&self, n: &[i32]) -> Result<Self> {
        if n.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: n.len(),
            });
        }
        if n.iter().all(|&x| x == 0) {
            return Err(Error::ZeroDirection);
        }
        let mut out = LaurentPoly::zero(1);
        for (m, c) in &self.terms {
            let e: i64 = m.0.iter().zip(n).map(|(&a, &b)| a as i64 * b as i64).sum();
            let e = i32::try_from(e).map_err(|_| Error::InvalidInput("exponent overflow".into()))?;
            out.add_term(Monomial(vec![e]), c.clone());
        }
        Ok(out)
    }

    /// Evaluates at a point with nonzero coordinates using Neumaier
    /// compensated summation on the real and imaginary parts.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: z.len(),
            });
        }
        if let Some(i) = z.iter().position(|w| w.re == 0.0 && w.im == 0.0) {
            return Err(Error::ZeroCoordinate(i));
        }
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for (m, c) in &self.terms {
            let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (w, &e) in z.iter().zip(&m.0) {
                if e != 0 {
                    t *= w.powi(e);
                }
            }
            re.add(t.re);
            im.add(t.im);
        }
        Ok(Complex64::new(re.sum(), im.sum()))
    }

    /// Exact quotient `self / g` in the Laurent ring, or `None` when `g`
    /// does not divide `self`.
    pub fn div_exact(&self, g: &Self) -> Result<Option<Self>> {
        self.check_dim(g)?;
        if g.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_zero() {
            return Ok(Some(LaurentPoly::zero(self.dim)));
        }
        let (f, sf) = self.normalize_with_shift();
        let (g, sg) = g.normalize_with_shift();
        // Normalized polynomials have normalized quotients, so plain
        // polynomial division with the graded-lex order suffices.
        let (glead_m, glead_c) = g.terms.iter().next_back().expect("nonzero");
        let mut rem = f;
        let mut quot = LaurentPoly::zero(self.dim);
        while let Some((m, c)) = rem.terms.iter().next_back() {
            let e: Vec<i32> = m.0.iter().zip(&glead_m.0).map(|(a, b)| a - b).collect();
            if e.iter().any(|&x| x < 0) {
                return Ok(None);
            }
            let (q, r) = c.div_rem(glead_c);
            if !r.is_zero() {
                return Ok(None);
            }
            let t = LaurentPoly::monomial(self.dim, Monomial(e), q);
            rem = &rem - &(&t * &g);
            quot = &quot + &t;
        }
        // self = u^{-sf} f, g_orig = u^{-sg} g
        Ok(Some(quot.shift(&sg.mul(&sf.inverse()))))
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .sum()
    }
}

#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("dimension mismatch in add")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("dimension mismatch in sub")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("dimension mismatch in mul")
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl fmt::Display for LaurentPoly {
    /// Prints in the text grammar accepted by [`crate::parse::parse_poly`],
    /// highest graded-lex term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e != 0)
                    .map(|(j, &e)| {
                        if e == 1 {
                            format!("u{}", j + 1)
                        } else {
                            format!("u{}^{}", j + 1, e)
                        }
                    })
                    .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A matrix of Laurent polynomials sharing one ambient dimension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    dim: usize,
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl PolyMatrix {
    pub fn zeros(dim: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            dim,
            rows,
            cols,
            entries: vec![LaurentPoly::zero(dim); rows * cols],
        }
    }

    pub fn from_rows(dim: usize, cols: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::RankMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for p in row {
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: p.dim(),
                    });
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix {
            dim,
            rows: nrows,
            cols,
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        assert_eq!(p.dim(), self.dim);
        self.entries[i * self.cols + j] = p;
    }

    pub fn row(&self, i: usize) -> &[LaurentPoly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[LaurentPoly]> {
        self.entries.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

/// Multiplies a whole row by the unit monomial that moves it into the
/// positive orthant with every used coordinate touching zero.
pub fn normalize_row(row: &[LaurentPoly]) -> Vec<LaurentPoly> {
    let mut mins: Option<Vec<i32>> = None;
    for p in row {
        if let Some(m) = p.min_exponents() {
            mins = Some(match mins {
                None => m,
                Some(acc) => acc.iter().zip(&m).map(|(a, b)| *a.min(b)).collect(),
            });
        }
    }
    match mins {
        None => row.to_vec(),
        Some(m) => {
            let shift = Monomial(m.iter().map(|e| -e).collect());
            row.iter().map(|p| p.shift(&shift)).collect()
        }
    }
}
