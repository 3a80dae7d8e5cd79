//! Submodules of `R_d^k` for the Laurent ring `R_d`.
//!
//! A Laurent submodule is represented by its polynomial part: rows are moved
//! into the positive orthant and the polynomial submodule they generate is
//! saturated with respect to `u1 * ... * ud`. Membership, colon and equality
//! are then polynomial questions answered by strong Gröbner bases.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;

use super::basis::{strong_groebner, Limits, ModElem, StrongGBasis};
use super::order::{ModuleOrder, MonomialOrder, Term};
use crate::error::{Error, Result};
use crate::laurent::{normalize_row, LaurentPoly, Monomial};

/// Finitely generated submodule of `R_d^k`, with a lazily computed strong
/// basis of its saturation.
#[derive(Debug)]
pub struct SubmoduleHandle {
    dim: usize,
    rank: usize,
    rows: Vec<Vec<LaurentPoly>>,
    order: MonomialOrder,
    limits: Limits,
    known_saturated: bool,
    basis: OnceLock<StrongGBasis>,
}

impl Clone for SubmoduleHandle {
    fn clone(&self) -> Self {
        let basis = OnceLock::new();
        if let Some(b) = self.basis.get() {
            let _ = basis.set(b.clone());
        }
        SubmoduleHandle {
            dim: self.dim,
            rank: self.rank,
            rows: self.rows.clone(),
            order: self.order.clone(),
            limits: self.limits,
            known_saturated: self.known_saturated,
            basis,
        }
    }
}

pub(crate) fn row_to_elem(row: &[LaurentPoly], order: &MonomialOrder) -> ModElem {
    row_to_elem_at(row, 0, order)
}

fn row_to_elem_at(row: &[LaurentPoly], offset: usize, order: &MonomialOrder) -> ModElem {
    let row = normalize_row(row);
    let mut terms = Vec::new();
    for (pos, p) in row.iter().enumerate() {
        for (m, c) in p.terms() {
            let exp = m.0.iter().map(|&e| e as u32).collect();
            terms.push((Term { pos: pos + offset, exp }, c.clone()));
        }
    }
    ModElem::from_terms(terms, order)
}

fn elem_to_row(e: &ModElem, dim: usize, rank: usize, offset: usize) -> Vec<LaurentPoly> {
    (0..rank)
        .map(|i| {
            LaurentPoly::from_terms(
                dim,
                e.component(i + offset)
                    .into_iter()
                    .map(|(exp, c)| (exp.iter().map(|&x| x as i32).collect::<Vec<_>>(), c)),
            )
        })
        .collect()
}

fn unit_vector(dim: usize, rank: usize, i: usize) -> Vec<LaurentPoly> {
    (0..rank)
        .map(|j| {
            if i == j {
                LaurentPoly::one(dim)
            } else {
                LaurentPoly::zero(dim)
            }
        })
        .collect()
}

impl SubmoduleHandle {
    /// Creates the submodule of `R_d^rank` generated by `rows`. Zero rows are
    /// dropped and each row is normalized by a unit monomial.
    pub fn new(dim: usize, rank: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        Self::with_options(dim, rank, rows, MonomialOrder::grevlex(), Limits::default())
    }

    pub fn with_options(
        dim: usize,
        rank: usize,
        rows: Vec<Vec<LaurentPoly>>,
        order: MonomialOrder,
        limits: Limits,
    ) -> Result<Self> {
        if dim == 0 || rank == 0 {
            return Err(Error::InvalidInput("dimension and rank must be positive".into()));
        }
        let mut clean = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    found: row.len(),
                });
            }
            if let Some(p) = row.iter().find(|p| p.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if row.iter().all(LaurentPoly::is_zero) {
                continue;
            }
            clean.push(normalize_row(&row));
        }
        Ok(SubmoduleHandle {
            dim,
            rank,
            rows: clean,
            order,
            limits,
            known_saturated: false,
            basis: OnceLock::new(),
        })
    }

    /// An ideal of `R_d` generated by `gens`.
    pub fn ideal(dim: usize, gens: Vec<LaurentPoly>) -> Result<Self> {
        Self::new(dim, 1, gens.into_iter().map(|g| vec![g]).collect())
    }

    fn derived(&self, rows: Vec<Vec<LaurentPoly>>, rank: usize, basis: Option<StrongGBasis>) -> Self {
        let cell = OnceLock::new();
        if let Some(b) = basis {
            let _ = cell.set(b);
        }
        SubmoduleHandle {
            dim: self.dim,
            rank,
            rows,
            order: self.order.clone(),
            limits: self.limits,
            known_saturated: true,
            basis: cell,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> &[Vec<LaurentPoly>] {
        &self.rows
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// Same generators, different order; the cached basis is dropped.
    pub fn with_order(&self, order: MonomialOrder) -> Self {
        SubmoduleHandle {
            order,
            basis: OnceLock::new(),
            ..self.clone()
        }
    }

    pub fn is_zero_submodule(&self) -> bool {
        self.rows.is_empty()
    }

    fn elems(&self, rows: &[Vec<LaurentPoly>]) -> Vec<ModElem> {
        rows.iter().map(|r| row_to_elem(r, &self.order)).collect()
    }

    fn groebner(&self, gens: &[ModElem], rank: usize, order: &MonomialOrder) -> Result<StrongGBasis> {
        strong_groebner(gens, self.dim, rank, order, &self.limits)
    }

    /// Strong basis of the polynomial part of the Laurent submodule.
    pub fn saturated_basis(&self) -> Result<&StrongGBasis> {
        if let Some(b) = self.basis.get() {
            return Ok(b);
        }
        let b = if self.known_saturated {
            self.groebner(&self.elems(&self.rows), self.rank, &self.order)?
        } else {
            self.saturate_basis()?
        };
        let _ = self.basis.set(b);
        Ok(self.basis.get().expect("just set"))
    }

    /// Iterated colon by `u1 * ... * ud` until the chain stabilizes.
    fn saturate_basis(&self) -> Result<StrongGBasis> {
        let mut current = self.groebner(&self.elems(&self.rows), self.rank, &self.order)?;
        if current.gens().is_empty() {
            return Ok(current);
        }
        let all_vars = LaurentPoly::monomial(self.dim, Monomial(vec![1; self.dim]), 1);
        loop {
            let next_gens = colon_elems(&current, &all_vars, false, self)?;
            let grew = next_gens.iter().any(|g| !current.contains(g));
            if !grew {
                return Ok(current);
            }
            current = self.groebner(&next_gens, self.rank, &self.order)?;
        }
    }

    fn vector_elem(&self, v: &[LaurentPoly]) -> Result<ModElem> {
        if v.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: v.len(),
            });
        }
        if let Some(p) = v.iter().find(|p| p.dim() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        Ok(row_to_elem(v, &self.order))
    }

    /// Membership in the Laurent span of the rows.
    pub fn is_member(&self, v: &[LaurentPoly]) -> Result<bool> {
        let e = self.vector_elem(v)?;
        Ok(self.saturated_basis()?.contains(&e))
    }

    /// Normal form of `v` modulo the saturated submodule, as a Laurent vector
    /// in the positive orthant.
    pub fn normal_form(&self, v: &[LaurentPoly]) -> Result<Vec<LaurentPoly>> {
        let e = self.vector_elem(v)?;
        let nf = self.saturated_basis()?.normal_form(&e);
        Ok(elem_to_row(&nf, self.dim, self.rank, 0))
    }

    /// `(U : (u1 ... ud)^inf)` as a new handle whose rows are the strong basis.
    pub fn saturate_vars(&self) -> Result<SubmoduleHandle> {
        let b = self.saturated_basis()?.clone();
        let rows = b
            .gens()
            .iter()
            .map(|g| elem_to_row(g, self.dim, self.rank, 0))
            .collect();
        Ok(self.derived(rows, self.rank, Some(b)))
    }

    /// `{v : h v in U}` over the Laurent ring.
    pub fn module_colon(&self, h: &LaurentPoly) -> Result<SubmoduleHandle> {
        if h.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: h.dim(),
            });
        }
        let basis = self.saturated_basis()?;
        let gens = colon_elems(basis, h, true, self)?;
        let rows = gens
            .iter()
            .map(|g| elem_to_row(g, self.dim, self.rank, 0))
            .filter(|r| r.iter().any(|p| !p.is_zero()))
            .collect();
        Ok(self.derived(rows, self.rank, None))
    }

    /// The annihilator ideal `{g in R_d : g v in U}`.
    pub fn annihilator(&self, v: &[LaurentPoly]) -> Result<SubmoduleHandle> {
        let ve = self.vector_elem(v)?;
        let basis = self.saturated_basis()?;
        let k = self.rank;
        let order = self.order.clone().with_module(ModuleOrder::PositionOverTerm);
        let mut gens: Vec<ModElem> = basis.gens().iter().map(|g| reorder(g, &order)).collect();
        let mut terms: Vec<(Term, BigInt)> = ve.terms().cloned().collect();
        terms.push((
            Term {
                pos: k,
                exp: vec![0; self.dim],
            },
            BigInt::one(),
        ));
        gens.push(ModElem::from_terms(terms, &order));
        let b = self.groebner(&gens, k + 1, &order)?;
        let rows = b
            .gens()
            .iter()
            .filter(|g| g.lead().is_some_and(|(t, _)| t.pos >= k))
            .map(|g| elem_to_row(g, self.dim, 1, k))
            .collect();
        let mut out = self.derived(rows, 1, None);
        out.order = self.order.clone();
        Ok(out)
    }

    /// True when every generator of `other` lies in `self`.
    pub fn contains_submodule(&self, other: &SubmoduleHandle) -> Result<bool> {
        if other.rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        let b = self.saturated_basis()?;
        for row in &other.rows {
            if !b.contains(&row_to_elem(row, &self.order)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Laurent equality by mutual membership after saturation.
    pub fn submodule_equal(&self, other: &SubmoduleHandle) -> Result<bool> {
        Ok(self.contains_submodule(other)? && other.contains_submodule(self)?)
    }

    /// The first generator of `self` that is not in `other`, if any.
    pub fn generator_outside(&self, other: &SubmoduleHandle) -> Result<Option<Vec<LaurentPoly>>> {
        let b = other.saturated_basis()?;
        let own = self.saturated_basis()?;
        for g in own.gens() {
            if !b.contains(g) {
                return Ok(Some(elem_to_row(g, self.dim, self.rank, 0)));
            }
        }
        Ok(None)
    }

    /// True if the quotient `R_d^k / U` is zero.
    pub fn is_whole_module(&self) -> Result<bool> {
        for i in 0..self.rank {
            if !self.is_member(&unit_vector(self.dim, self.rank, i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn reorder(e: &ModElem, order: &MonomialOrder) -> ModElem {
    ModElem::from_terms(e.terms().cloned().collect(), order)
}

/// Generators of `(U : h)` given a strong basis of `U`, via elimination of the
/// first `k` components in `R^{2k}` from `(h e_i, e_i)` and `(u, 0)`.
fn colon_elems(basis: &StrongGBasis, h: &LaurentPoly, normalize: bool, ctx: &SubmoduleHandle) -> Result<Vec<ModElem>> {
    let k = basis.rank();
    let dim = ctx.dim;
    let order = ctx.order.clone().with_module(ModuleOrder::PositionOverTerm);
    let h = if normalize { h.monomial_normalize() } else { h.clone() };
    let mut gens: Vec<ModElem> = basis.gens().iter().map(|g| reorder(g, &order)).collect();
    for i in 0..k {
        let mut terms = Vec::new();
        for (m, c) in h.terms() {
            terms.push((
                Term {
                    pos: i,
                    exp: m.0.iter().map(|&e| e as u32).collect(),
                },
                c.clone(),
            ));
        }
        terms.push((
            Term {
                pos: k + i,
                exp: vec![0; dim],
            },
            BigInt::one(),
        ));
        gens.push(ModElem::from_terms(terms, &order));
    }
    let b = strong_groebner(&gens, dim, 2 * k, &order, &ctx.limits)?;
    Ok(b.gens()
        .iter()
        .filter(|g| g.lead().is_some_and(|(t, _)| t.pos >= k))
        .map(|g| {
            let terms = g
                .terms()
                .map(|(t, c)| {
                    (
                        Term {
                            pos: t.pos - k,
                            exp: t.exp.clone(),
                        },
                        c.clone(),
                    )
                })
                .collect();
            ModElem::from_terms(terms, &ctx.order)
        })
        .filter(|g| !g.is_zero())
        .collect())
}

/// Builds a strong basis for the polynomial submodule generated by positive
/// orthant rows, without saturation.
pub fn strong_groebner_rows(
    dim: usize,
    rank: usize,
    rows: &[Vec<LaurentPoly>],
    order: &MonomialOrder,
    limits: &Limits,
) -> Result<StrongGBasis> {
    let mut gens = Vec::with_capacity(rows.len());
    for r in rows {
        if r.iter().any(|p| !p.in_positive_orthant()) {
            return Err(Error::InvalidInput(
                "generators must lie in the positive orthant; apply monomial_normalize first".into(),
            ));
        }
        let mut terms = Vec::new();
        for (pos, p) in r.iter().enumerate() {
            for (m, c) in p.terms() {
                terms.push((
                    Term {
                        pos,
                        exp: m.0.iter().map(|&e| e as u32).collect(),
                    },
                    c.clone(),
                ));
            }
        }
        gens.push(ModElem::from_terms(terms, order));
    }
    strong_groebner(&gens, dim, rank, order, limits)
}

/// Converts a Laurent vector into a module element, normalizing by a unit.
pub fn laurent_to_elem(v: &[LaurentPoly], order: &MonomialOrder) -> ModElem {
    row_to_elem(v, order)
}

/// Converts a module element back into a Laurent vector of length `rank`.
pub fn elem_to_laurent(e: &ModElem, dim: usize, rank: usize) -> Vec<LaurentPoly> {
    elem_to_row(e, dim, rank, 0)
}

pub fn is_member(v: &[LaurentPoly], u: &SubmoduleHandle) -> Result<bool> {
    u.is_member(v)
}

pub fn saturate_vars(u: &SubmoduleHandle) -> Result<SubmoduleHandle> {
    u.saturate_vars()
}

pub fn module_colon(u: &SubmoduleHandle, h: &LaurentPoly) -> Result<SubmoduleHandle> {
    u.module_colon(h)
}

pub fn submodule_equal(u: &SubmoduleHandle, v: &SubmoduleHandle) -> Result<bool> {
    u.submodule_equal(v)
}
