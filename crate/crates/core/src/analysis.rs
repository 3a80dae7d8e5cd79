//! Decision procedures on a finitely presented dual module.
//!
//! An algebraic `Z^d`-action on a compact abelian group `X` is encoded by its
//! dual module `M = X^`, a module over `R_d = Z[u1^±1, ..., ud^±1]` in which
//! `u^n` acts as the dual of the shift by `n`. Every finitely generated module
//! is finitely presented, `M = R_d^k / U` with `U` spanned by relation rows, and
//! finitely generated is the same as Noetherian since `R_d` is Noetherian. On
//! the group side this is the descending chain condition on closed invariant
//! subgroups.
//!
//! - `X` is connected iff `M` has no nonzero element of finite additive order.
//! - `M` is a torsion module iff it has rank zero over the fraction field of
//!   `R_d`, iff the action has finite topological entropy.
//! - The action is mixing iff no `u^n - 1` (`n != 0`) lies in an associated
//!   prime of `M`, i.e. iff no `u^n - 1` is a zero divisor on `M`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grobner::{Limits, SubmoduleHandle};
use crate::laurent::{LaurentPoly, PolyMatrix};
use crate::linalg;
use crate::serde_util::{big_str, poly_vec};

/// `M = R_d^k / (row span of the relations)`.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    name: Option<String>,
    relations: PolyMatrix,
    submodule: SubmoduleHandle,
}

impl ModulePresentation {
    pub fn new(dim: usize, k: usize, relations: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        Self::with_limits(dim, k, relations, Limits::default())
    }

    pub fn with_limits(dim: usize, k: usize, relations: Vec<Vec<LaurentPoly>>, limits: Limits) -> Result<Self> {
        let submodule =
            SubmoduleHandle::with_options(dim, k, relations, crate::grobner::MonomialOrder::grevlex(), limits)?;
        let relations = PolyMatrix::from_rows(dim, k, submodule.rows().to_vec())?;
        Ok(ModulePresentation {
            name: None,
            relations,
            submodule,
        })
    }

    /// The cyclic module `R_d / (gens)`.
    pub fn cyclic(dim: usize, gens: Vec<LaurentPoly>) -> Result<Self> {
        Self::new(dim, 1, gens.into_iter().map(|g| vec![g]).collect())
    }

    /// `R_d / (f)`.
    pub fn principal(f: LaurentPoly) -> Result<Self> {
        let dim = f.dim();
        Self::cyclic(dim, vec![f])
    }

    /// The free module `R_d^k`, dual to the full shift on `(T^k)^{Z^d}`.
    pub fn free(dim: usize, k: usize) -> Result<Self> {
        Self::new(dim, k, Vec::new())
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.relations.dim()
    }

    pub fn generators(&self) -> usize {
        self.relations.ncols()
    }

    pub fn relations(&self) -> &PolyMatrix {
        &self.relations
    }

    pub fn submodule(&self) -> &SubmoduleHandle {
        &self.submodule
    }

    /// `f` when the module is `R_d / (f)` with a single relation.
    pub fn principal_polynomial(&self) -> Option<&LaurentPoly> {
        if self.generators() == 1 && self.relations.nrows() == 1 {
            Some(self.relations.get(0, 0))
        } else {
            None
        }
    }

    pub fn is_zero_module(&self) -> Result<bool> {
        self.submodule.is_whole_module()
    }
}

/// Rank of `M` over the fraction field of `R_d`: generators minus the rank of
/// the relation matrix.
pub fn fraction_field_rank(m: &ModulePresentation) -> usize {
    m.generators() - linalg::rank(m.relations())
}

/// True iff every element of `M` is annihilated by a nonzero ring element.
pub fn is_torsion(m: &ModulePresentation) -> bool {
    fraction_field_rank(m) == 0
}

/// Always true for a finite presentation; kept so reports state the hypothesis.
pub fn is_noetherian(_m: &ModulePresentation) -> (bool, &'static str) {
    (
        true,
        "finitely presented over the Noetherian ring R_d, hence Noetherian (descending chain condition on closed invariant subgroups)",
    )
}

/// Evidence that `M` has additive torsion: `c * v` lies in the relations
/// while `v` does not.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionCertificate {
    #[serde(serialize_with = "big_str")]
    pub prime: BigInt,
    #[serde(serialize_with = "poly_vec")]
    pub element: Vec<LaurentPoly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectednessMethod {
    FreeModule,
    Content,
    LeadingCoefficientColon,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectednessReport {
    pub connected: bool,
    pub certificate: Option<TorsionCertificate>,
    pub method: ConnectednessMethod,
    #[serde(serialize_with = "crate::serde_util::big_vec")]
    pub primes_tested: Vec<BigInt>,
}

/// Trial-division factorization; a cofactor with no factor below the bound is
/// returned as is.
fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2u32);
    let bound = BigInt::from(1_000_000u32);
    while n > BigInt::one() && p <= bound && &p * &p <= n {
        if n.is_multiple_of(&p) {
            out.push(p.clone());
            while n.is_multiple_of(&p) {
                n /= &p;
            }
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if n > BigInt::one() {
        out.push(n);
    }
    out
}

/// Decides whether `M` is torsion-free as an abelian group, which by duality
/// is connectedness of `X_M`.
///
/// For `R_d/(f)` the answer is `content(f) == 1` by Gauss's lemma. In general
/// only primes dividing a leading coefficient of the strong basis can occur:
/// if `p v` is in `U` with `v` reduced, the leading coefficient of `v` would
/// have to be a multiple of the basis coefficient unless `p` divides it.
pub fn is_connected(m: &ModulePresentation) -> Result<ConnectednessReport> {
    if m.relations().nrows() == 0 {
        return Ok(ConnectednessReport {
            connected: true,
            certificate: None,
            method: ConnectednessMethod::FreeModule,
            primes_tested: Vec::new(),
        });
    }
    if let Some(f) = m.principal_polynomial() {
        let c = f.content();
        if c.is_one() {
            return Ok(ConnectednessReport {
                connected: true,
                certificate: None,
                method: ConnectednessMethod::Content,
                primes_tested: Vec::new(),
            });
        }
        let p = prime_factors(&c).into_iter().next().expect("content > 1");
        let v = f.div_exact(&LaurentPoly::constant(f.dim(), p.clone()))?;
        return Ok(ConnectednessReport {
            connected: false,
            certificate: Some(TorsionCertificate {
                prime: p.clone(),
                element: vec![v.expect("p divides the content")],
            }),
            method: ConnectednessMethod::Content,
            primes_tested: vec![p],
        });
    }
    connected_by_colon(m)
}

/// The general procedure, also used to cross-check the content shortcut.
pub fn connected_by_colon(m: &ModulePresentation) -> Result<ConnectednessReport> {
    let u = m.submodule();
    let basis = u.saturated_basis()?;
    let mut primes: Vec<BigInt> = basis.leading_coefficients().iter().flat_map(prime_factors).collect();
    primes.sort();
    primes.dedup();
    let mut tested = Vec::new();
    for p in primes {
        tested.push(p.clone());
        let colon = u.module_colon(&LaurentPoly::constant(m.dim(), p.clone()))?;
        if let Some(v) = colon.generator_outside(u)? {
            return Ok(ConnectednessReport {
                connected: false,
                certificate: Some(TorsionCertificate { prime: p, element: v }),
                method: ConnectednessMethod::LeadingCoefficientColon,
                primes_tested: tested,
            });
        }
    }
    Ok(ConnectednessReport {
        connected: true,
        certificate: None,
        method: ConnectednessMethod::LeadingCoefficientColon,
        primes_tested: tested,
    })
}

/// Outcome of the bounded search for a direction `n` with `u^n - 1` a zero
/// divisor on `M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum MixingStatus {
    NotMixing {
        witness: Vec<i32>,
        #[serde(serialize_with = "poly_vec")]
        certificate: Vec<LaurentPoly>,
    },
    NoWitnessUpTo {
        bound: u32,
    },
    MixingCertified {
        reason: String,
    },
}

impl MixingStatus {
    pub fn is_not_mixing(&self) -> bool {
        matches!(self, MixingStatus::NotMixing { .. })
    }
}

/// Directions `n` with `max|n_i| == shell`, one of `{n, -n}` (first nonzero
/// entry positive), in lexicographic order.
pub fn shell_directions(dim: usize, shell: i32) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    let mut cur = vec![-shell; dim];
    loop {
        let max = cur.iter().map(|x| x.abs()).max().unwrap_or(0);
        let first = cur.iter().find(|&&x| x != 0).copied().unwrap_or(0);
        if max == shell && first > 0 {
            out.push(cur.clone());
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < shell {
                cur[i] += 1;
                for x in cur.iter_mut().skip(i + 1) {
                    *x = -shell;
                }
                break;
            }
        }
    }
}

/// Checks a `NotMixing` certificate with two membership calls.
pub fn verify_not_mixing(m: &ModulePresentation, witness: &[i32], v: &[LaurentPoly]) -> Result<bool> {
    let u = m.submodule();
    if u.is_member(v)? {
        return Ok(false);
    }
    let h = LaurentPoly::unit_minus_one(witness);
    let hv: Vec<LaurentPoly> = v.iter().map(|x| &h * x).collect();
    u.is_member(&hv)
}

fn zero_divisor_witness(m: &ModulePresentation, n: &[i32]) -> Result<Option<Vec<LaurentPoly>>> {
    let u = m.submodule();
    let colon = u.module_colon(&LaurentPoly::unit_minus_one(n))?;
    colon.generator_outside(u)
}

/// Smallest `m >= 1` with `gcd(f, t^m - 1) != 1`, looking at every `m` whose
/// cyclotomic polynomial could divide a polynomial of this degree.
fn cyclotomic_index(f: &LaurentPoly) -> Result<Option<u32>> {
    let f = f.monomial_normalize();
    let deg = f.max_exponents().map(|e| e[0]).unwrap_or(0).max(0) as u32;
    // phi(m) >= sqrt(m/2), so phi(m) <= deg forces m <= 2 deg^2
    let top = (2 * deg * deg).max(2);
    for m in 1..=top {
        let r = linalg::resultant(&f, &LaurentPoly::unit_minus_one(&[m as i32]), 0)?;
        if r.is_zero() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Bounded semi-decision of mixing.
pub fn mixing_search(m: &ModulePresentation, bound: u32) -> Result<MixingStatus> {
    if bound == 0 {
        return Err(Error::InvalidInput("mixing bound must be at least 1".into()));
    }
    if m.relations().nrows() == 0 {
        return Ok(MixingStatus::MixingCertified {
            reason: "free module: the only associated prime is zero".into(),
        });
    }
    if m.is_zero_module()? {
        return Ok(MixingStatus::MixingCertified {
            reason: "zero module: no associated primes".into(),
        });
    }
    if let (1, Some(f)) = (m.dim(), m.principal_polynomial()) {
        match cyclotomic_index(f)? {
            None => {
                return Ok(MixingStatus::MixingCertified {
                    reason: "d = 1 principal relation with no cyclotomic factor".into(),
                })
            }
            Some(idx) => {
                let n = vec![idx as i32];
                if let Some(v) = zero_divisor_witness(m, &n)? {
                    if idx <= bound {
                        return Ok(MixingStatus::NotMixing {
                            witness: n,
                            certificate: v,
                        });
                    }
                    return Ok(MixingStatus::NoWitnessUpTo { bound });
                }
            }
        }
    }
    for shell in 1..=bound as i32 {
        let dirs = shell_directions(m.dim(), shell);
        let results: Vec<Result<Option<Vec<LaurentPoly>>>> =
            dirs.par_iter().map(|n| zero_divisor_witness(m, n)).collect();
        for (n, r) in dirs.into_iter().zip(results) {
            if let Some(v) = r? {
                return Ok(MixingStatus::NotMixing {
                    witness: n,
                    certificate: v,
                });
            }
        }
    }
    Ok(MixingStatus::NoWitnessUpTo { bound })
}
