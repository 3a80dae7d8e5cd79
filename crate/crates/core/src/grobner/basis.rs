//! Strong Gröbner bases for submodules of `Z[x1, ..., xn]^k`.
//!
//! The completion loop follows Möller's construction for principal ideal
//! domains: every critical pair contributes an S-polynomial (cancellation of
//! leading terms through the coefficient lcm) and, when neither leading
//! coefficient divides the other, a G-polynomial (the Bézout combination that
//! produces the coefficient gcd). Reduction divides with remainder, keeping
//! coefficients in `[0, |lc|)`, which makes normal forms unique with respect to
//! a strong basis.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::order::{MonomialOrder, Term};
use crate::error::{Error, Result};

/// Resource limits for basis computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of critical pairs processed by one completion.
    pub max_pairs: usize,
    /// Maximum coefficient size in bits before giving up.
    pub max_coeff_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_pairs: 20_000,
            max_coeff_bits: 8_192,
        }
    }
}

/// An element of `Z[x1..xn]^k`, terms stored in increasing order so the
/// leading term is last.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModElem {
    terms: Vec<(Term, BigInt)>,
}

impl ModElem {
    pub fn zero() -> Self {
        ModElem { terms: Vec::new() }
    }

    /// Builds an element from arbitrary terms, summing duplicates.
    pub fn from_terms(mut terms: Vec<(Term, BigInt)>, order: &MonomialOrder) -> Self {
        terms.sort_by(|a, b| order.cmp(&a.0, &b.0));
        let mut out: Vec<(Term, BigInt)> = Vec::with_capacity(terms.len());
        for (t, c) in terms {
            match out.last_mut() {
                Some((lt, lc)) if *lt == t => *lc += c,
                _ => out.push((t, c)),
            }
            if out.last().is_some_and(|(_, c)| c.is_zero()) {
                out.pop();
            }
        }
        ModElem { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&(Term, BigInt)> {
        self.terms.last()
    }

    fn lead_term(&self) -> &Term {
        &self.terms.last().expect("nonzero element").0
    }

    fn lead_coeff(&self) -> &BigInt {
        &self.terms.last().expect("nonzero element").1
    }

    /// Terms in decreasing order.
    pub fn terms(&self) -> impl Iterator<Item = &(Term, BigInt)> {
        self.terms.iter().rev()
    }

    pub fn max_bits(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c.bits()).max().unwrap_or(0)
    }

    fn neg(&self) -> Self {
        ModElem {
            terms: self.terms.iter().map(|(t, c)| (t.clone(), -c)).collect(),
        }
    }

    /// `self + c * x^shift * other`.
    fn axpy(&self, c: &BigInt, shift: &[u32], other: &ModElem, order: &MonomialOrder) -> ModElem {
        if c.is_zero() {
            return self.clone();
        }
        let shifted = other.terms.iter().map(|(t, x)| {
            (
                Term {
                    pos: t.pos,
                    exp: t.exp.iter().zip(shift).map(|(a, b)| a + b).collect(),
                },
                x * c,
            )
        });
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().cloned().peekable();
        let mut b = shifted.peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => out.push(b.next().unwrap()),
                (Some(x), Some(y)) => match order.cmp(&x.0, &y.0) {
                    std::cmp::Ordering::Less => out.push(a.next().unwrap()),
                    std::cmp::Ordering::Greater => out.push(b.next().unwrap()),
                    std::cmp::Ordering::Equal => {
                        let (t, c1) = a.next().unwrap();
                        let (_, c2) = b.next().unwrap();
                        let s = c1 + c2;
                        if !s.is_zero() {
                            out.push((t, s));
                        }
                    }
                },
            }
        }
        ModElem { terms: out }
    }

    fn positive_lead(self) -> Self {
        if self.lead().is_some_and(|(_, c)| c.is_negative()) {
            self.neg()
        } else {
            self
        }
    }

    /// Component `pos` as a list of `(exponents, coefficient)`.
    pub fn component(&self, pos: usize) -> Vec<(Vec<u32>, BigInt)> {
        self.terms
            .iter()
            .filter(|(t, _)| t.pos == pos)
            .map(|(t, c)| (t.exp.clone(), c.clone()))
            .collect()
    }
}

/// A strong Gröbner basis: minimal, tail-reduced, leading coefficients positive.
#[derive(Clone, Debug)]
pub struct StrongGBasis {
    gens: Vec<ModElem>,
    order: MonomialOrder,
    nvars: usize,
    rank: usize,
    pairs_used: usize,
}

impl StrongGBasis {
    pub fn gens(&self) -> &[ModElem] {
        &self.gens
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pairs_used(&self) -> usize {
        self.pairs_used
    }

    pub fn leading_coefficients(&self) -> Vec<BigInt> {
        self.gens.iter().map(|g| g.lead_coeff().clone()).collect()
    }

    pub fn normal_form(&self, v: &ModElem) -> ModElem {
        reduce(v, &self.gens, &self.order, None).expect("unbounded reduction cannot fail")
    }

    pub fn contains(&self, v: &ModElem) -> bool {
        self.normal_form(v).is_zero()
    }

    /// True if the basis generates the whole free module.
    pub fn is_whole_module(&self) -> bool {
        (0..self.rank).all(|pos| {
            self.gens.iter().any(|g| {
                let (t, c) = g.lead().unwrap();
                t.pos == pos && c.is_one() && t.exp.iter().all(|&e| e == 0)
            })
        })
    }
}

/// Full normal form of `f` with respect to `basis` using division with
/// remainder on leading coefficients.
fn reduce(f: &ModElem, basis: &[ModElem], order: &MonomialOrder, limits: Option<(&Limits, usize)>) -> Result<ModElem> {
    let mut p = f.clone();
    let mut rem: Vec<(Term, BigInt)> = Vec::new();
    while let Some((t, c)) = p.terms.last().cloned() {
        let divisor = basis
            .iter()
            .filter(|g| g.lead_term().divides(&t))
            .min_by(|a, b| a.lead_coeff().abs().cmp(&b.lead_coeff().abs()));
        if let Some(g) = divisor {
            let a = g.lead_coeff();
            let (q, _r) = c.div_mod_floor(a);
            if !q.is_zero() {
                let shift = g.lead_term().quotient(&t);
                p = p.axpy(&(-q), &shift, g, order);
                if let Some((lim, pairs)) = limits {
                    if p.max_bits() > lim.max_coeff_bits {
                        return Err(Error::Budget {
                            pairs,
                            reason: format!("coefficient exceeded {} bits", lim.max_coeff_bits),
                        });
                    }
                }
            }
        }
        if let Some((lt, _)) = p.terms.last() {
            if *lt == t {
                rem.push(p.terms.pop().unwrap());
            }
        }
    }
    rem.reverse();
    Ok(ModElem { terms: rem })
}

fn lcm_term(a: &Term, b: &Term) -> Term {
    Term {
        pos: a.pos,
        exp: a.lcm_exp(b),
    }
}

fn coprime_monomials(a: &Term, b: &Term) -> bool {
    a.exp.iter().zip(&b.exp).all(|(x, y)| *x == 0 || *y == 0)
}

/// S-polynomial of a critical pair.
fn s_poly(f: &ModElem, g: &ModElem, order: &MonomialOrder) -> ModElem {
    let (tf, a) = f.lead().unwrap();
    let (tg, b) = g.lead().unwrap();
    let m = lcm_term(tf, tg);
    let c = a.lcm(b);
    let lhs = ModElem::zero().axpy(&(&c / a), &tf.quotient(&m), f, order);
    lhs.axpy(&(-(&c / b)), &tg.quotient(&m), g, order)
}

/// G-polynomial: Bézout combination with leading term `gcd(a, b) * lcm`.
fn g_poly(f: &ModElem, g: &ModElem, order: &MonomialOrder) -> ModElem {
    let (tf, a) = f.lead().unwrap();
    let (tg, b) = g.lead().unwrap();
    let m = lcm_term(tf, tg);
    let e = a.extended_gcd(b);
    let lhs = ModElem::zero().axpy(&e.x, &tf.quotient(&m), f, order);
    lhs.axpy(&e.y, &tg.quotient(&m), g, order)
}

struct Completion<'a> {
    order: &'a MonomialOrder,
    limits: &'a Limits,
    rank: usize,
    gens: Vec<ModElem>,
    pairs: BTreeSet<(u64, usize, usize)>,
    used: usize,
}

impl Completion<'_> {
    fn push(&mut self, f: ModElem) {
        let f = f.positive_lead();
        let idx = self.gens.len();
        let tf = f.lead_term().clone();
        for (j, g) in self.gens.iter().enumerate() {
            let tg = g.lead_term();
            if tg.pos == tf.pos {
                let deg = lcm_term(&tf, tg).degree();
                self.pairs.insert((deg, idx, j));
            }
        }
        self.gens.push(f);
    }

    fn budget(&self, reason: &str) -> Error {
        Error::Budget {
            pairs: self.used,
            reason: reason.to_string(),
        }
    }

    fn run(&mut self) -> Result<()> {
        while let Some((_, i, j)) = self.pairs.pop_first() {
            self.used += 1;
            if self.used > self.limits.max_pairs {
                return Err(self.budget(&format!("more than {} critical pairs", self.limits.max_pairs)));
            }
            let (f, g) = (&self.gens[i], &self.gens[j]);
            let (tf, a) = f.lead().unwrap();
            let (tg, b) = g.lead().unwrap();
            let product_criterion = self.rank == 1 && coprime_monomials(tf, tg) && a.gcd(b).is_one();
            let need_g = !(b.is_multiple_of(a) || a.is_multiple_of(b));
            let mut new = Vec::new();
            if !product_criterion {
                new.push(s_poly(f, g, self.order));
            }
            if need_g {
                new.push(g_poly(f, g, self.order));
            }
            for h in new {
                let r = reduce(&h, &self.gens, self.order, Some((self.limits, self.used)))?;
                if !r.is_zero() {
                    self.push(r);
                }
            }
        }
        Ok(())
    }
}

/// Computes a strong Gröbner basis of the submodule generated by `gens`.
pub fn strong_groebner(
    gens: &[ModElem],
    nvars: usize,
    rank: usize,
    order: &MonomialOrder,
    limits: &Limits,
) -> Result<StrongGBasis> {
    let mut c = Completion {
        order,
        limits,
        rank,
        gens: Vec::new(),
        pairs: BTreeSet::new(),
        used: 0,
    };
    for g in gens {
        if let Some((t, _)) = g.lead() {
            if t.exp.len() != nvars || t.pos >= rank {
                return Err(Error::InvalidInput("generator does not match ring shape".into()));
            }
            c.push(g.clone());
        }
    }
    c.run()?;
    let pairs_used = c.used;
    let gens = interreduce(c.gens, order);
    Ok(StrongGBasis {
        gens,
        order: order.clone(),
        nvars,
        rank,
        pairs_used,
    })
}

fn lead_divides(g: &ModElem, f: &ModElem) -> bool {
    g.lead_term().divides(f.lead_term()) && f.lead_coeff().is_multiple_of(g.lead_coeff())
}

fn interreduce(mut gens: Vec<ModElem>, order: &MonomialOrder) -> Vec<ModElem> {
    gens.sort_by(|a, b| {
        order
            .cmp(a.lead_term(), b.lead_term())
            .then_with(|| a.lead_coeff().cmp(b.lead_coeff()))
    });
    let mut minimal: Vec<ModElem> = Vec::new();
    for f in gens {
        if !minimal.iter().any(|g| lead_divides(g, &f)) {
            minimal.retain(|g| !lead_divides(&f, g));
            minimal.push(f);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<ModElem> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let f = &minimal[i];
        let mut lead_only = f.clone();
        let lead = lead_only.terms.pop().unwrap();
        let mut tail = reduce(&lead_only, &others, order, None).expect("unbounded");
        tail.terms.push(lead);
        out.push(tail);
    }
    out.sort_by(|a, b| order.cmp(a.lead_term(), b.lead_term()));
    out
}

/// Normal form of `v` with respect to a strong basis; zero iff `v` lies in
/// the submodule.
pub fn normal_form(v: &ModElem, basis: &StrongGBasis) -> ModElem {
    basis.normal_form(v)
}

/// Checks the strong-basis criterion directly: every S- and G-polynomial of
/// every pair reduces to zero.
pub fn is_strong_groebner(basis: &StrongGBasis) -> bool {
    let g = basis.gens();
    let order = basis.order();
    for i in 0..g.len() {
        for j in 0..i {
            if g[i].lead_term().pos != g[j].lead_term().pos {
                continue;
            }
            if !reduce(&s_poly(&g[i], &g[j], order), g, order, None).unwrap().is_zero() {
                return false;
            }
            if !reduce(&g_poly(&g[i], &g[j], order), g, order, None).unwrap().is_zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly1(coeffs: &[(u32, i64)]) -> ModElem {
        let order = MonomialOrder::grevlex();
        ModElem::from_terms(
            coeffs
                .iter()
                .map(|&(e, c)| (Term { pos: 0, exp: vec![e] }, BigInt::from(c)))
                .collect(),
            &order,
        )
    }

    fn gb(gens: &[ModElem]) -> StrongGBasis {
        strong_groebner(gens, 1, 1, &MonomialOrder::grevlex(), &Limits::default()).unwrap()
    }

    #[test]
    fn two_and_u() {
        let b = gb(&[poly1(&[(0, 2)]), poly1(&[(1, 1)])]);
        assert_eq!(b.gens().len(), 2);
        assert!(is_strong_groebner(&b));
        assert_eq!(b.normal_form(&poly1(&[(0, 3)])), poly1(&[(0, 1)]));
        assert!(b.normal_form(&ModElem::zero()).is_zero());
    }

    #[test]
    fn u_minus_one_and_u_plus_one() {
        let b = gb(&[poly1(&[(1, 1), (0, -1)]), poly1(&[(1, 1), (0, 1)])]);
        assert!(b.contains(&poly1(&[(0, 2)])));
        assert!(!b.contains(&poly1(&[(0, 1)])));
        let mut gens: Vec<ModElem> = b.gens().to_vec();
        gens.sort_by_key(|g| g.terms.len());
        assert_eq!(gens, vec![poly1(&[(0, 2)]), poly1(&[(1, 1), (0, 1)])]);
    }

    #[test]
    fn unit_ideal() {
        let b = gb(&[poly1(&[(0, 1)]), poly1(&[(3, 7), (1, 2)])]);
        assert_eq!(b.gens(), &[poly1(&[(0, 1)])]);
        assert!(b.is_whole_module());
    }

    #[test]
    fn divisibility_membership() {
        let b = gb(&[poly1(&[(1, 1), (0, -1)])]);
        assert!(b.contains(&poly1(&[(2, 1), (0, -1)])));
        assert!(!b.contains(&poly1(&[(2, 1), (0, 1)])));
    }

    #[test]
    fn budget_is_explicit() {
        let limits = Limits {
            max_pairs: 0,
            max_coeff_bits: 64,
        };
        let r = strong_groebner(
            &[poly1(&[(1, 2)]), poly1(&[(1, 3), (0, 1)])],
            1,
            1,
            &MonomialOrder::grevlex(),
            &limits,
        );
        assert!(matches!(r, Err(Error::Budget { .. })));
    }

    #[test]
    fn normal_form_idempotent() {
        let b = gb(&[poly1(&[(2, 3), (0, 1)]), poly1(&[(1, 2), (0, 5)])]);
        let v = poly1(&[(4, 7), (3, -2), (1, 11), (0, 4)]);
        let n = b.normal_form(&v);
        assert_eq!(b.normal_form(&n), n);
        assert!(is_strong_groebner(&b));
    }
}
