//! Topological entropy of algebraic actions.
//!
//! Entropy is finite exactly for torsion modules. For `R_d/(f)` the entropy
//! is the logarithmic Mahler measure
//!
//! ```text
//! m(f) = integral over T^d of log|f(e^{2 pi i t})| dt
//! ```
//!
//! which for `d = 1` is `log|lead| + sum log max(1, |root|)`. All values are
//! in nats.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{is_torsion, ModulePresentation};
use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Neumaier};
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MahlerMethod {
    RootFormula,
    Quadrature,
    RootsOfUnityLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MahlerEstimate {
    pub estimate: f64,
    pub method: MahlerMethod,
    /// Per-axis grid size, root-of-unity order, or polynomial degree.
    pub resolution: usize,
    pub error: f64,
    /// Sample points dropped because `f` vanishes there.
    pub skipped: usize,
}

/// Natural log of a positive big integer without overflowing `f64`.
pub fn big_ln(n: &BigInt) -> f64 {
    let n = n.abs();
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (&n >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn newton_polish(coeffs: &[f64], mut z: Complex64) -> (Complex64, f64) {
    let mut step = f64::INFINITY;
    for _ in 0..60 {
        let (p, dp) = horner(coeffs, z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            return (z, 0.0);
        }
        let dz = p / dp;
        let next = z - dz;
        if horner(coeffs, next).0.norm() > p.norm() {
            break;
        }
        step = dz.norm();
        z = next;
        if step <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    (z, step)
}

/// Aberth-Ehrlich simultaneous iteration, used when the QR iteration on the
/// companion matrix stalls.
fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].abs();
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.abs() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= w;
            moved = moved.max(w.norm() / z[k].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

type Upoly = Vec<BigInt>;

fn trim(mut a: Upoly) -> Upoly {
    while a.len() > 1 && a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

fn primitive(a: Upoly) -> Upoly {
    let g = a.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return a;
    }
    let sign = if a.last().is_some_and(Signed::is_negative) {
        -g
    } else {
        g
    };
    a.into_iter().map(|c| c / &sign).collect()
}

fn is_const(a: &Upoly) -> bool {
    a.len() <= 1
}

fn derivative(a: &Upoly) -> Upoly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .chain(std::iter::once(BigInt::zero()))
            .collect(),
    )
}

/// Pseudo-remainder of `a` by `b`.
fn prem(a: &Upoly, b: &Upoly) -> Upoly {
    let mut r = a.clone();
    let lb = b.last().expect("nonzero");
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let lr = r.last().unwrap().clone();
        let off = r.len() - b.len();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, c) in b.iter().enumerate() {
            r[off + i] -= &lr * c;
        }
        r.pop();
        if r.is_empty() {
            r.push(BigInt::zero());
        }
        r = trim(r);
    }
    r
}

fn upoly_gcd(a: &Upoly, b: &Upoly) -> Upoly {
    let (mut a, mut b) = (primitive(a.clone()), primitive(b.clone()));
    while !(b.len() == 1 && b[0].is_zero()) {
        let r = primitive(prem(&a, &b));
        a = b;
        b = r;
    }
    primitive(a)
}

fn upoly_div(a: &Upoly, b: &Upoly) -> Upoly {
    let mut r = a.clone();
    let lb = b.last().expect("nonzero");
    let mut q = vec![BigInt::zero(); a.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let off = r.len() - b.len();
        let c = r.last().unwrap() / lb;
        for (i, bc) in b.iter().enumerate() {
            r[off + i] -= &c * bc;
        }
        q[off] = c;
        r.pop();
        if r.is_empty() {
            r.push(BigInt::zero());
        }
        r = trim(r);
    }
    debug_assert!(r.iter().all(Zero::is_zero), "inexact division");
    trim(q)
}

fn sub(a: &Upoly, b: &Upoly) -> Upoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

/// Yun's square-free factorization of a primitive polynomial of positive
/// degree: `a = prod g_i^i` up to sign.
fn squarefree(a: &Upoly) -> Vec<(Upoly, u32)> {
    let da = derivative(a);
    let g = upoly_gcd(a, &da);
    let mut c = upoly_div(a, &g);
    let mut d = sub(&upoly_div(&da, &g), &derivative(&c));
    let mut out = Vec::new();
    let mut i = 1;
    while !is_const(&c) {
        let h = upoly_gcd(&c, &d);
        c = upoly_div(&c, &h);
        d = sub(&upoly_div(&d, &h), &derivative(&c));
        if !is_const(&h) {
            out.push((h, i));
        }
        i += 1;
    }
    out
}

/// `sum log max(1, |root|)` and an error indicator for a square-free
/// polynomial, roots from the companion matrix then Newton polishing.
fn outer_roots(coeffs: &Upoly) -> Result<(f64, f64)> {
    let n = coeffs.len() - 1;
    let cf: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    if cf.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numerical("coefficients exceed floating-point range".into()));
    }
    let roots: Vec<Complex64> = if n == 1 {
        vec![Complex64::new(-cf[0] / cf[1], 0.0)]
    } else {
        let companion = DMatrix::<f64>::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -cf[i] / cf[n]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        match Schur::try_new(companion, f64::EPSILON, 1000 * n) {
            Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
            None => aberth(&cf),
        }
    };
    let mut sum = Neumaier::default();
    let mut error = 0.0;
    for r in roots {
        if !r.re.is_finite() || !r.im.is_finite() {
            return Err(Error::Numerical("root finder did not converge".into()));
        }
        let (z, step) = newton_polish(&cf, r);
        let scale: f64 = cf.iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.abs());
        let resid = horner(&cf, z).0.norm() / scale.max(f64::MIN_POSITIVE);
        if resid > 1e-8 {
            return Err(Error::Numerical(format!(
                "root finder did not converge (residual {resid:.1e})"
            )));
        }
        let m = z.norm();
        if m > 1.0 {
            sum.add(m.ln());
        }
        let perturb = if step.is_finite() { n as f64 * step } else { 0.0 };
        error += (perturb / m.max(1.0)).min(1.0);
    }
    Ok((sum.sum(), error))
}

/// Mahler measure of a one-variable polynomial from its roots. Repeated
/// factors are split off exactly first so that every root is simple.
pub fn mahler_d1_exact(f: &LaurentPoly) -> Result<MahlerEstimate> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.dim(),
        });
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let g = f.monomial_normalize();
    let coeffs: Upoly = linalg::coefficients_in(&g, 0)?
        .iter()
        .map(|c| c.coeff(&crate::Monomial::one(1)))
        .collect();
    let n = coeffs.len() - 1;
    let mut value = big_ln(&f.content());
    let mut error = 0.0;
    if n > 0 {
        for (h, mult) in squarefree(&primitive(coeffs)) {
            let (outer, err) = outer_roots(&h)?;
            value += mult as f64 * (big_ln(h.last().unwrap()) + outer);
            error += mult as f64 * (err + 1e-15 * h.len() as f64);
        }
    }
    Ok(MahlerEstimate {
        estimate: value,
        method: MahlerMethod::RootFormula,
        resolution: n,
        error,
        skipped: 0,
    })
}

/// Precomputed evaluation of `f` on a product grid `((j + s_i) / n)_i`.
struct GridEval {
    dim: usize,
    n: usize,
    terms: Vec<(Vec<usize>, f64)>,
    /// `tables[i][j][e]` is `exp(2 pi i (mins[i] + e) t_j)` on axis `i`.
    tables: Vec<Vec<Vec<Complex64>>>,
}

impl GridEval {
    fn new(f: &LaurentPoly, n: usize, shift: &[f64]) -> Self {
        let dim = f.dim();
        let mins = f.min_exponents().expect("nonzero");
        let maxs = f.max_exponents().expect("nonzero");
        let terms = f
            .terms()
            .map(|(m, c)| {
                let idx = m.0.iter().zip(&mins).map(|(e, lo)| (e - lo) as usize).collect();
                (idx, c.to_f64().unwrap_or(f64::NAN))
            })
            .collect();
        let tables = (0..dim)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let t = (j as f64 + shift[i]) / n as f64;
                        (mins[i]..=maxs[i])
                            .map(|e| Complex64::from_polar(1.0, 2.0 * PI * ((e as f64 * t) % 1.0)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        GridEval { dim, n, terms, tables }
    }

    fn at(&self, idx: &[usize]) -> f64 {
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for (e, c) in &self.terms {
            let mut z = Complex64::new(*c, 0.0);
            for i in 0..self.dim {
                z *= self.tables[i][idx[i]][e[i]];
            }
            re.add(z.re);
            im.add(z.im);
        }
        re.sum().hypot(im.sum())
    }

    /// Sum of `log|f|` over the grid, skipping points with `|f| <= zero_tol`.
    /// Returns (sum, summed points, skipped, points below `small`).
    fn log_sum(&self, zero_tol: f64, small: f64) -> (f64, usize, usize, usize) {
        let rows: Vec<(f64, usize, usize, usize)> = (0..self.n)
            .into_par_iter()
            .map(|first| {
                let mut acc = Neumaier::default();
                let (mut used, mut skipped, mut tiny) = (0, 0, 0);
                let mut idx = vec![0usize; self.dim];
                idx[0] = first;
                loop {
                    let v = self.at(&idx);
                    if v < small {
                        tiny += 1;
                    }
                    if v <= zero_tol {
                        skipped += 1;
                    } else {
                        acc.add(v.ln());
                        used += 1;
                    }
                    let mut i = self.dim;
                    loop {
                        i -= 1;
                        if i == 0 {
                            return (acc.sum(), used, skipped, tiny);
                        }
                        idx[i] += 1;
                        if idx[i] < self.n {
                            break;
                        }
                        idx[i] = 0;
                    }
                }
            })
            .collect();
        let mut total = Neumaier::default();
        let (mut used, mut skipped, mut tiny) = (0, 0, 0);
        for (s, u, k, t) in rows {
            total.add(s);
            used += u;
            skipped += k;
            tiny += t;
        }
        (total.sum(), used, skipped, tiny)
    }
}

/// Irrational per-axis offsets `frac(j * sqrt 2)`; each retry moves to the
/// next block of multiples.
pub fn quadrature_shift(dim: usize, attempt: usize) -> Vec<f64> {
    (0..dim)
        .map(|i| (((attempt * dim + i + 1) as f64) * SQRT_2).fract())
        .collect()
}

const SINGULAR_THRESHOLD: f64 = 1e-13;
const MAX_SHIFT_ATTEMPTS: usize = 4;

fn quadrature_mean(f: &LaurentPoly, n: usize, shift: &[f64]) -> Option<f64> {
    let (sum, used, _, tiny) = GridEval::new(f, n, shift).log_sum(0.0, SINGULAR_THRESHOLD);
    let total = n.pow(f.dim() as u32);
    if tiny as f64 > 1e-3 * total as f64 || used == 0 {
        return None;
    }
    Some(sum / used as f64)
}

/// Mean of `log|f|` over a shifted `N^d` lattice, compared against the
/// `2N` lattice for an error indicator. The finer mean is reported.
pub fn mahler_quadrature(f: &LaurentPoly, n: usize) -> Result<MahlerEstimate> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if n == 0 {
        return Err(Error::InvalidInput("grid must be positive".into()));
    }
    for attempt in 0..MAX_SHIFT_ATTEMPTS {
        let shift = quadrature_shift(f.dim(), attempt);
        let (Some(coarse), Some(fine)) = (quadrature_mean(f, n, &shift), quadrature_mean(f, 2 * n, &shift)) else {
            continue;
        };
        let error = (coarse - fine).abs();
        if fine < -(error + 1e-12) {
            return Err(Error::Numerical(format!("negative Mahler estimate {fine}")));
        }
        return Ok(MahlerEstimate {
            estimate: fine.max(0.0),
            method: MahlerMethod::Quadrature,
            resolution: n,
            error,
            skipped: 0,
        });
    }
    Err(Error::Numerical(
        "singular grid: too many samples near the zero set".into(),
    ))
}

fn roots_mean(f: &LaurentPoly, n: usize) -> Option<(f64, usize)> {
    let tol = 1e-9 * f.l1_norm();
    let (sum, used, skipped, _) = GridEval::new(f, n, &vec![0.0; f.dim()]).log_sum(tol, 0.0);
    (used > 0).then(|| (sum / used as f64, skipped))
}

/// Mean of `log|f|` over the `N`-torsion points of the torus, skipping zeros.
/// The error indicator compares against order `N/2`.
pub fn mahler_roots_of_unity(f: &LaurentPoly, n: usize) -> Result<MahlerEstimate> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if n < 2 {
        return Err(Error::InvalidInput("order must be at least 2".into()));
    }
    let (estimate, skipped) =
        roots_mean(f, n).ok_or_else(|| Error::Numerical(format!("f vanishes at every point of order {n}")))?;
    let error = if n >= 4 {
        roots_mean(f, n / 2)
            .map(|(m, _)| (m - estimate).abs())
            .unwrap_or(f64::MAX)
    } else {
        0.0
    };
    Ok(MahlerEstimate {
        estimate,
        method: MahlerMethod::RootsOfUnityLimit,
        resolution: n,
        error,
        skipped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicCount {
    pub order: u32,
    #[serde(serialize_with = "crate::serde_util::big_str")]
    pub count: BigInt,
    /// `log(count) / N^d`, absent when the count is zero.
    pub growth: Option<f64>,
    pub degenerate: bool,
}

/// Number of points of `X_{R_d/(f)}` fixed by the subgroup `N Z^d`, which is
/// `|prod f(w)|` over `w` in `(mu_N)^d`, computed by iterated resultants.
pub fn periodic_point_count(f: &LaurentPoly, order: u32) -> Result<BigInt> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if order == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    let d = f.dim();
    let mut g = f.monomial_normalize();
    for var in (0..d).rev() {
        let mut e = vec![0i32; d];
        e[var] = order as i32;
        g = linalg::resultant(&g, &LaurentPoly::unit_minus_one(&e), var)?;
        if g.is_zero() {
            return Ok(BigInt::zero());
        }
    }
    debug_assert!(g.is_constant() || g.is_zero());
    Ok(g.coeff(&crate::Monomial::one(d)).abs())
}

pub fn periodic_point_growth(f: &LaurentPoly, orders: &[u32]) -> Result<Vec<PeriodicCount>> {
    orders
        .iter()
        .map(|&n| {
            let count = periodic_point_count(f, n)?;
            let degenerate = count.is_zero();
            let growth = (!degenerate).then(|| big_ln(&count) / (n as f64).powi(f.dim() as i32));
            Ok(PeriodicCount {
                order: n,
                count,
                growth,
                degenerate,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntropyValue {
    Infinite,
    Zero,
    Exact {
        value: f64,
        method: String,
    },
    Interval {
        lo: f64,
        hi: f64,
        method: String,
    },
    UpperBound {
        value: f64,
        method: String,
    },
    /// Finite, but no numerical value was obtained.
    Unknown {
        reason: String,
    },
}

impl EntropyValue {
    /// A number that is at least the entropy, when one is known.
    pub fn upper(&self) -> Option<f64> {
        match self {
            EntropyValue::Zero => Some(0.0),
            EntropyValue::Exact { value, .. } | EntropyValue::UpperBound { value, .. } => Some(*value),
            EntropyValue::Interval { hi, .. } => Some(*hi),
            EntropyValue::Infinite | EntropyValue::Unknown { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EntropyDiagnostics {
    pub quadrature_grid: Option<usize>,
    pub roots_order: Option<usize>,
    pub estimates: Vec<MahlerEstimate>,
    pub discrepancy: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub finite: bool,
    pub value: EntropyValue,
    pub diagnostics: EntropyDiagnostics,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EntropyOptions {
    pub quadrature_grid: usize,
    pub roots_order: usize,
    /// Cap on `(2N)^d` quadrature samples; the grid is halved until it fits.
    pub max_samples: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            quadrature_grid: 512,
            roots_order: 64,
            max_samples: 1 << 24,
        }
    }
}

fn fit_grid(mut n: usize, factor: usize, dim: usize, cap: usize) -> usize {
    while n > 2 && (factor * n).checked_pow(dim as u32).is_none_or(|s| s > cap) {
        n /= 2;
    }
    n
}

/// Entropy of `R_d/(f)` for nonzero `f`.
pub fn principal_entropy(f: &LaurentPoly, opts: &EntropyOptions) -> Result<(EntropyValue, EntropyDiagnostics)> {
    let mut diag = EntropyDiagnostics::default();
    if f.is_zero() {
        return Ok((EntropyValue::Infinite, diag));
    }
    if f.is_unit() {
        return Ok((EntropyValue::Zero, diag));
    }
    if f.is_constant() {
        let v = big_ln(&f.content());
        diag.notes.push("constant relation: entropy log|c|".into());
        return Ok((
            EntropyValue::Exact {
                value: v,
                method: "root-formula".into(),
            },
            diag,
        ));
    }
    if f.dim() == 1 {
        let est = mahler_d1_exact(f)?;
        let value = est.estimate;
        diag.estimates.push(est);
        return Ok((
            EntropyValue::Exact {
                value,
                method: "root-formula".into(),
            },
            diag,
        ));
    }
    let grid = fit_grid(opts.quadrature_grid, 2, f.dim(), opts.max_samples);
    let order = fit_grid(opts.roots_order, 1, f.dim(), opts.max_samples);
    if grid != opts.quadrature_grid {
        diag.notes.push(format!("quadrature grid reduced to {grid} per axis"));
    }
    diag.quadrature_grid = Some(grid);
    diag.roots_order = Some(order);
    let q = mahler_quadrature(f, grid)?;
    let mut half = (3.0 * q.error).max(1e-12);
    match mahler_roots_of_unity(f, order) {
        Ok(r) => {
            let gap = (q.estimate - r.estimate).abs();
            diag.discrepancy = Some(gap);
            half = half.max(gap);
            diag.estimates.push(q.clone());
            diag.estimates.push(r);
        }
        Err(e) => {
            diag.notes.push(format!("roots-of-unity oracle unavailable: {e}"));
            diag.estimates.push(q.clone());
        }
    }
    Ok((
        EntropyValue::Interval {
            lo: (q.estimate - half).max(0.0),
            hi: q.estimate + half,
            method: "quadrature+roots-of-unity".into(),
        },
        diag,
    ))
}

/// Classifies the entropy of `X_M` and estimates it where possible.
pub fn entropy_classify(m: &ModulePresentation, opts: &EntropyOptions) -> Result<EntropyReport> {
    let finite = is_torsion(m);
    if !finite {
        return Ok(EntropyReport {
            finite,
            value: EntropyValue::Infinite,
            diagnostics: EntropyDiagnostics::default(),
        });
    }
    if m.is_zero_module()? {
        return Ok(EntropyReport {
            finite,
            value: EntropyValue::Zero,
            diagnostics: EntropyDiagnostics::default(),
        });
    }
    if let Some(f) = m.principal_polynomial() {
        let (value, diagnostics) = principal_entropy(f, opts)?;
        return Ok(EntropyReport {
            finite,
            value,
            diagnostics,
        });
    }
    let mut diag = EntropyDiagnostics::default();
    let annihilators: Vec<Vec<LaurentPoly>> = if m.generators() == 1 {
        vec![m
            .relations()
            .rows()
            .map(|r| r[0].clone())
            .filter(|g| !g.is_zero())
            .collect()]
    } else {
        diag.notes.push("sum over generators of annihilator bounds".into());
        (0..m.generators())
            .map(|i| {
                let e: Vec<LaurentPoly> = (0..m.generators())
                    .map(|j| {
                        if i == j {
                            LaurentPoly::one(m.dim())
                        } else {
                            LaurentPoly::zero(m.dim())
                        }
                    })
                    .collect();
                Ok(m.submodule()
                    .annihilator(&e)?
                    .rows()
                    .iter()
                    .map(|r| r[0].clone())
                    .collect())
            })
            .collect::<Result<_>>()?
    };
    let mut total = 0.0;
    for gens in &annihilators {
        let mut best: Option<f64> = None;
        for g in gens {
            let (v, _) = principal_entropy(g, opts)?;
            if let Some(u) = v.upper() {
                best = Some(best.map_or(u, |b: f64| b.min(u)));
            }
        }
        match best {
            Some(b) => total += b,
            None => {
                return Ok(EntropyReport {
                    finite,
                    value: EntropyValue::Unknown {
                        reason: "no nonzero annihilator available for some generator".into(),
                    },
                    diagnostics: diag,
                })
            }
        }
    }
    let method = if m.generators() == 1 {
        "min over relations of m(g)"
    } else {
        "sum over generators of min m(g) over annihilators"
    };
    Ok(EntropyReport {
        finite,
        value: EntropyValue::UpperBound {
            value: total,
            method: method.into(),
        },
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(s: &str) -> LaurentPoly {
        parse_poly(s, None).unwrap()
    }

    const LEDRAPPIER: f64 = 0.3230659472;

    #[test]
    fn d1_root_formula() {
        let e = mahler_d1_exact(&p("u1 - 2")).unwrap();
        assert!((e.estimate - 2f64.ln()).abs() < 1e-12);
        assert_eq!(mahler_d1_exact(&p("u1")).unwrap().estimate, 0.0);
        let golden = mahler_d1_exact(&p("u1^2 - u1 - 1")).unwrap();
        assert!((golden.estimate - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
        let c = mahler_d1_exact(&p("3*u1^-2*(u1 - 1)^3")).unwrap();
        assert!((c.estimate - 3f64.ln()).abs() < 1e-14, "{}", c.estimate);
        let m = mahler_d1_exact(&p("(u1^2 + u1 + 1)^2*(2*u1 - 5)^3*(u1 + 1)")).unwrap();
        assert!((m.estimate - 3.0 * 5f64.ln()).abs() < 1e-12, "{}", m.estimate);
        assert!(mahler_d1_exact(&p("u1 + u2")).is_err());
    }

    #[test]
    fn stalled_qr_falls_back() {
        // the companion QR iteration does not converge for this one
        let f = p("-4*u1^6 - 5*u1^4 - 1");
        let e = mahler_d1_exact(&f).unwrap();
        let q = mahler_quadrature(&f, 4096).unwrap();
        assert!((e.estimate - q.estimate).abs() < 1e-9);
    }

    #[test]
    fn aberth_roots() {
        // (x - 2)(2x + 1)(x^2 + 1)
        let mut z = aberth(&[-2.0, -3.0, 0.0, -3.0, 2.0]);
        z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let want = [
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, 0.0),
        ];
        for (a, b) in z.iter().zip(want) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn vanishing_on_torsion_counts_zero() {
        let f = p("1 + u1 + u2 + u1*u2");
        assert!(periodic_point_count(&f, 2).unwrap().is_zero());
        let g = periodic_point_growth(&f, &[2, 3]).unwrap();
        assert!(g[0].degenerate && !g[1].degenerate);
    }

    #[test]
    fn squarefree_parts() {
        let b = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Upoly>();
        // (u - 1)^2 (u + 2) = u^3 - 3u + 2
        let parts = squarefree(&b(&[2, -3, 0, 1]));
        assert_eq!(parts, vec![(b(&[2, 1]), 1), (b(&[-1, 1]), 2)]);
        assert_eq!(upoly_gcd(&b(&[-1, 0, 1]), &b(&[-1, 0, 0, 1])), b(&[-1, 1]));
    }

    #[test]
    fn quadrature_examples() {
        let two = LaurentPoly::constant(2, 2);
        assert!((mahler_quadrature(&two, 8).unwrap().estimate - 2f64.ln()).abs() < 1e-15);
        let q = mahler_quadrature(&p("u1 - 2"), 1024).unwrap();
        assert!((q.estimate - 2f64.ln()).abs() < 1e-4);
        let l = mahler_quadrature(&p("1 + u1 + u2"), 512).unwrap();
        assert!((l.estimate - LEDRAPPIER).abs() < 5e-3, "{l:?}");
    }

    #[test]
    fn roots_of_unity_examples() {
        let r = mahler_roots_of_unity(&p("u1 - 2"), 16).unwrap();
        assert!((r.estimate - (65535f64).ln() / 16.0).abs() < 1e-12);
        let c = mahler_roots_of_unity(&LaurentPoly::constant(2, -5), 7).unwrap();
        assert!((c.estimate - 5f64.ln()).abs() < 1e-14);
        let l = mahler_roots_of_unity(&p("1 + u1 + u2"), 64).unwrap();
        assert!((l.estimate - LEDRAPPIER).abs() < 5e-3, "{l:?}");
        let z = mahler_roots_of_unity(&p("u1 - 1"), 8).unwrap();
        assert_eq!(z.skipped, 1);
    }

    #[test]
    fn periodic_points_d1() {
        for n in 1..=30u32 {
            let c = periodic_point_count(&p("u1 - 2"), n).unwrap();
            assert_eq!(c, BigInt::from(2).pow(n) - 1);
        }
        let g = periodic_point_growth(&p("u1 - 1"), &[1, 2, 3]).unwrap();
        assert!(g.iter().all(|c| c.degenerate && c.growth.is_none()));
    }

    #[test]
    fn periodic_points_d2_match_product() {
        let f = p("1 + u1 + u2");
        for n in [2u32, 4, 5] {
            let c = periodic_point_count(&f, n).unwrap();
            let mut prod = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let z = [
                        Complex64::from_polar(1.0, 2.0 * PI * a as f64 / n as f64),
                        Complex64::from_polar(1.0, 2.0 * PI * b as f64 / n as f64),
                    ];
                    prod += f.eval(&z).unwrap().norm().ln();
                }
            }
            assert!((big_ln(&c) - prod).abs() < 1e-9, "n={n}");
        }
        assert!(periodic_point_count(&f, 3).unwrap().is_zero());
    }

    #[test]
    fn classify_examples() {
        let full = ModulePresentation::free(1, 1).unwrap();
        assert_eq!(
            entropy_classify(&full, &EntropyOptions::default()).unwrap().value,
            EntropyValue::Infinite
        );
        let zero = ModulePresentation::principal(LaurentPoly::one(2)).unwrap();
        assert_eq!(
            entropy_classify(&zero, &EntropyOptions::default()).unwrap().value,
            EntropyValue::Zero
        );
        let led = ModulePresentation::principal(p("1 + u1 + u2")).unwrap();
        let r = entropy_classify(&led, &EntropyOptions::default()).unwrap();
        assert!(r.finite);
        match r.value {
            EntropyValue::Interval { lo, hi, .. } => {
                assert!(lo <= LEDRAPPIER && LEDRAPPIER <= hi);
                assert!(hi - lo < 1e-3, "[{lo}, {hi}]");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_principal_upper_bounds() {
        let m = ModulePresentation::cyclic(1, vec![p("u1 - 2"), p("u1^2 - 4")]).unwrap();
        match entropy_classify(&m, &EntropyOptions::default()).unwrap().value {
            EntropyValue::UpperBound { value, .. } => assert!((value - 2f64.ln()).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        // R^2 / ((u1 - 2, 0), (0, u1 - 3)) has entropy log 6
        let one = LaurentPoly::zero(1);
        let m = ModulePresentation::new(1, 2, vec![vec![p("u1 - 2"), one.clone()], vec![one, p("u1 - 3")]]).unwrap();
        match entropy_classify(&m, &EntropyOptions::default()).unwrap().value {
            EntropyValue::UpperBound { value, .. } => assert!((value - 6f64.ln()).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quadrature_is_deterministic() {
        let f = p("3 + u1^2 - u1*u2^-1 + 2*u2");
        let a = mahler_quadrature(&f, 128).unwrap();
        let b = mahler_quadrature(&f, 128).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    }

    #[test]
    fn grid_fitting() {
        assert_eq!(fit_grid(512, 2, 2, 1 << 24), 512);
        assert_eq!(fit_grid(512, 2, 3, 1 << 24), 128);
    }
}
