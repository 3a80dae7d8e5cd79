#![allow(dead_code)]

use std::collections::BTreeMap;

use algdyn::{LaurentPoly, Monomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

pub fn poly(dim: usize, terms: &[(Vec<i32>, i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(dim, terms.iter().map(|(e, c)| (e.clone(), *c)))
}

/// Laurent polynomials with up to `max_terms` terms, exponents in
/// `[-emax, emax]` and coefficients in `[-cmax, cmax]`.
pub fn laurent(dim: usize, max_terms: usize, emax: i32, cmax: i64) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-emax..=emax, dim), -cmax..=cmax), 0..=max_terms)
        .prop_map(move |t| poly(dim, &t))
}

/// Polynomials (nonnegative exponents) of total degree at most `deg`.
pub fn polynomial(dim: usize, max_terms: usize, deg: i32, cmax: i64) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(0..=deg, dim), -cmax..=cmax), 1..=max_terms).prop_map(move |t| {
        let t: Vec<(Vec<i32>, i64)> = t.into_iter().filter(|(e, _)| e.iter().sum::<i32>() <= deg).collect();
        poly(dim, &t)
    })
}

/// All exponent vectors in `dim` variables of total degree at most `deg`.
pub fn monomials_upto(dim: usize, deg: i32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i32>| {
                (0..=deg).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out.retain(|e| e.iter().sum::<i32>() <= deg);
    out
}

/// Row echelon basis of a sublattice of `Z^(columns)`, built with unimodular
/// two-row operations.
#[derive(Default)]
pub struct Lattice {
    pivots: BTreeMap<Vec<i32>, BTreeMap<Vec<i32>, BigInt>>,
}

fn first(v: &BTreeMap<Vec<i32>, BigInt>) -> Option<(Vec<i32>, BigInt)> {
    v.iter()
        .find(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k.clone(), c.clone()))
}

fn combine(
    a: &BigInt,
    x: &BTreeMap<Vec<i32>, BigInt>,
    b: &BigInt,
    y: &BTreeMap<Vec<i32>, BigInt>,
) -> BTreeMap<Vec<i32>, BigInt> {
    let mut out = BTreeMap::new();
    for (k, c) in x {
        *out.entry(k.clone()).or_insert_with(BigInt::zero) += a * c;
    }
    for (k, c) in y {
        *out.entry(k.clone()).or_insert_with(BigInt::zero) += b * c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn vector(p: &LaurentPoly) -> BTreeMap<Vec<i32>, BigInt> {
    p.terms().map(|(m, c)| (m.0.clone(), c.clone())).collect()
}

impl Lattice {
    pub fn insert(&mut self, p: &LaurentPoly) {
        let mut v = vector(p);
        while let Some((col, vc)) = first(&v) {
            let Some(r) = self.pivots.get(&col).cloned() else {
                let v = self.reduce_tail(v, &col);
                self.set_pivot(col, v);
                return;
            };
            let rc = r[&col].clone();
            let e = rc.extended_gcd(&vc);
            let g = e.gcd;
            let new_pivot = self.reduce_tail(combine(&e.x, &r, &e.y, &v), &col);
            let rest = combine(&(&rc / &g), &v, &(-(&vc / &g)), &r);
            self.set_pivot(col.clone(), new_pivot);
            v = self.reduce_tail(rest, &col);
        }
    }

    /// Installs a pivot row and reduces the same column of every other row
    /// modulo it, keeping the basis in reduced Hermite form.
    fn set_pivot(&mut self, col: Vec<i32>, row: BTreeMap<Vec<i32>, BigInt>) {
        let pc = row[&col].clone();
        for (k, other) in self.pivots.iter_mut() {
            if *k >= col {
                continue;
            }
            if let Some(x) = other.get(&col) {
                let q = x.div_floor(&pc);
                if !q.is_zero() {
                    *other = combine(&BigInt::one(), other, &(-q), &row);
                }
            }
        }
        self.pivots.insert(col, row);
    }

    /// Reduces the entries of `v` after `lead` modulo the pivots of their
    /// columns.
    fn reduce_tail(&self, mut v: BTreeMap<Vec<i32>, BigInt>, lead: &Vec<i32>) -> BTreeMap<Vec<i32>, BigInt> {
        let cols: Vec<Vec<i32>> = v.keys().filter(|k| *k > lead).cloned().collect();
        for c in cols {
            let (Some(r), Some(x)) = (self.pivots.get(&c), v.get(&c)) else {
                continue;
            };
            let q = x.div_floor(&r[&c]);
            if !q.is_zero() {
                v = combine(&BigInt::one(), &v, &(-q), r);
            }
        }
        v
    }

    pub fn contains(&self, p: &LaurentPoly) -> bool {
        let mut v = vector(p);
        while let Some((col, vc)) = first(&v) {
            let Some(r) = self.pivots.get(&col) else {
                return false;
            };
            let (q, rem) = vc.div_rem(&r[&col]);
            if !rem.is_zero() {
                return false;
            }
            v = combine(&BigInt::one(), &v, &(-q), r);
        }
        true
    }
}

/// Whether `v` is a Z-linear combination of `m * g` over generators `g` and
/// monomials `m` of degree at most `deg`.
pub fn in_bounded_span(v: &LaurentPoly, gens: &[LaurentPoly], deg: i32) -> bool {
    let dim = v.dim();
    let mut lat = Lattice::default();
    for g in gens {
        for m in monomials_upto(dim, deg) {
            lat.insert(&g.shift(&Monomial(m)));
        }
    }
    lat.contains(v)
}
