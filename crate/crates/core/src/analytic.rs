//! Numerical checks of the analytic facts behind rigidity.
//!
//! A continuous `f: T^m -> T` with `f(0) = 1` splits uniquely as
//! `f = phi * exp(2 pi i S(f))` with `phi` a character and `S(f)` a real
//! continuous function vanishing at the origin. On a sampled grid the
//! character is read off from winding numbers and `S(f)` from phase
//! unwrapping.
//!
//! The second half tests that nonzero `g` in `Z[Z^d]` is not a zero divisor
//! on square-summable functions, through a truncated convolution kernel and
//! the Fourier identity `(f*g)^ = f^ g^`, and that the zero set of a nonzero
//! Laurent polynomial has Haar measure zero.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

/// Largest phase step, in turns, accepted between neighboring samples.
pub const MAX_STEP: f64 = 0.4;

/// Samples of a circle-valued map on the grid `(j_1, ..., j_m) / N`, stored
/// with the first axis varying slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTorusMap {
    m: usize,
    n: usize,
    values: Vec<Complex64>,
}

fn turns(z: Complex64) -> f64 {
    z.arg() / (2.0 * PI)
}

impl SampledTorusMap {
    /// Builds a map from samples, dividing by the value at the origin.
    pub fn from_values(m: usize, n: usize, values: Vec<Complex64>) -> Result<Self> {
        if m == 0 || n < 2 {
            return Err(Error::InvalidInput("need m >= 1 and N >= 2".into()));
        }
        let len = n
            .checked_pow(m as u32)
            .ok_or_else(|| Error::InvalidInput("grid too large".into()))?;
        if values.len() != len {
            return Err(Error::GridMismatch(format!(
                "expected {len} samples, found {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| (v.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidInput(format!("sample {i} is not of unit modulus")));
        }
        let base = values[0].conj();
        let values = values.into_iter().map(|v| v * base).collect();
        Ok(SampledTorusMap { m, n, values })
    }

    /// Samples `x -> exp(2 pi i phase(x))`, `phase` in turns.
    pub fn from_phase_fn(m: usize, n: usize, phase: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let len = n
            .checked_pow(m as u32)
            .ok_or_else(|| Error::InvalidInput("grid too large".into()))?;
        let strides = strides(m, n);
        let mut x = vec![0.0; m];
        let values = (0..len)
            .map(|i| {
                for (t, st) in x.iter_mut().zip(&strides) {
                    *t = ((i / st) % n) as f64 / n as f64;
                }
                Complex64::from_polar(1.0, 2.0 * PI * phase(&x).rem_euclid(1.0))
            })
            .collect();
        Self::from_values(m, n, values)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    fn unflatten(m: usize, n: usize, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; m];
        for k in (0..m).rev() {
            idx[k] = i % n;
            i /= n;
        }
        idx
    }

    pub fn at(&self, idx: &[usize]) -> Complex64 {
        self.values[self.flatten(idx)]
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::GridMismatch(format!(
                "{}-dimensional grid of size {} vs {}-dimensional grid of size {}",
                self.m, self.n, other.m, other.n
            )));
        }
        Ok(())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Self::from_values(self.m, self.n, values)
    }

    /// `x -> f(x + a) / f(a)` for a grid translation `a`.
    pub fn translate(&self, a: &[usize]) -> Result<Self> {
        if a.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                found: a.len(),
            });
        }
        let values = (0..self.values.len())
            .map(|i| {
                let idx: Vec<usize> = Self::unflatten(self.m, self.n, i)
                    .iter()
                    .zip(a)
                    .map(|(j, s)| (j + s) % self.n)
                    .collect();
                self.at(&idx)
            })
            .collect();
        Self::from_values(self.m, self.n, values)
    }

    /// `x -> f(A x)` for an integer matrix `A` acting on grid indices mod N.
    pub fn compose(&self, a: &[Vec<i64>]) -> Result<Self> {
        check_matrix(a, self.m)?;
        let values = (0..self.values.len())
            .map(|i| self.at(&apply(a, &Self::unflatten(self.m, self.n, i), self.n)))
            .collect();
        Self::from_values(self.m, self.n, values)
    }

    /// Text fixture: a header `torus-map <m> <N>` then one phase in turns per
    /// line, first axis slowest.
    pub fn to_text(&self) -> String {
        let mut s = format!("torus-map {} {}\n", self.m, self.n);
        for v in &self.values {
            let _ = writeln!(s, "{:.17e}", turns(*v));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty fixture".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let bad = || Error::InvalidInput(format!("bad fixture header '{header}'"));
        if parts.len() != 3 || parts[0] != "torus-map" {
            return Err(bad());
        }
        let m: usize = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        let values = lines
            .flat_map(str::split_whitespace)
            .map(|t| {
                t.parse::<f64>()
                    .map(|p| Complex64::from_polar(1.0, 2.0 * PI * p))
                    .map_err(|_| Error::InvalidInput(format!("bad phase '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(m, n, values)
    }
}

fn check_matrix(a: &[Vec<i64>], m: usize) -> Result<()> {
    if a.len() != m || a.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidInput(format!(
            "endomorphism must be a {m}x{m} integer matrix"
        )));
    }
    Ok(())
}

fn apply(a: &[Vec<i64>], idx: &[usize], n: usize) -> Vec<usize> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(idx)
                .map(|(c, &j)| c * j as i64)
                .sum::<i64>()
                .rem_euclid(n as i64) as usize
        })
        .collect()
}

/// Order in which grid points are reached from the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sweep {
    /// Along the first axis, then fan out along later axes.
    FirstAxisFirst,
    /// Along the last axis, then fan out along earlier axes.
    LastAxisFirst,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VKDecomposition {
    pub character: Vec<i64>,
    /// `S(f)` on the grid, same layout as the samples.
    pub lift: Vec<f64>,
    /// Largest `|f - phi exp(2 pi i S(f))|` over the grid.
    pub residual: f64,
}

/// Wrapped phase difference `b / a` in turns, in `(-1/2, 1/2]`.
fn step(a: Complex64, b: Complex64) -> f64 {
    turns(b * a.conj())
}

fn strides(m: usize, n: usize) -> Vec<usize> {
    (0..m).map(|k| n.pow((m - 1 - k) as u32)).collect()
}

/// Flat index of the neighbor one step forward along the axis with `stride`.
fn forward(i: usize, stride: usize, n: usize) -> usize {
    if (i / stride) % n == n - 1 {
        i - (n - 1) * stride
    } else {
        i + stride
    }
}

fn check_steps(f: &SampledTorusMap) -> Result<()> {
    let strides = strides(f.m, f.n);
    for (i, &v) in f.values.iter().enumerate() {
        for &st in &strides {
            let s = step(v, f.values[forward(i, st, f.n)]).abs();
            if s >= MAX_STEP {
                return Err(Error::ResolutionTooCoarse { step: s, index: i });
            }
        }
    }
    Ok(())
}

fn winding(f: &SampledTorusMap, axis: usize, base: &[usize]) -> Result<i64> {
    let mut idx = base.to_vec();
    let mut total = 0.0;
    for j in 0..f.n {
        idx[axis] = j;
        let a = f.at(&idx);
        idx[axis] = (j + 1) % f.n;
        total += step(a, f.at(&idx));
    }
    let r = total.round();
    if (total - r).abs() > 1e-6 {
        return Err(Error::Numerical(format!("winding sum {total} is not an integer")));
    }
    Ok(r as i64)
}

fn decompose(f: &SampledTorusMap, sweep: Sweep) -> Result<VKDecomposition> {
    check_steps(f)?;
    let (m, n) = (f.m, f.n);
    let base: Vec<usize> = match sweep {
        Sweep::FirstAxisFirst => vec![0; m],
        Sweep::LastAxisFirst => vec![n / 2; m],
    };
    let character = (0..m).map(|k| winding(f, k, &base)).collect::<Result<Vec<_>>>()?;
    // Points are visited in flattened order; each is reached from a neighbor
    // with one smaller coordinate, which was visited earlier.
    let strides = strides(m, n);
    let mut unwrapped = vec![0.0; f.values.len()];
    for i in 1..f.values.len() {
        let coord = |k: usize| (i / strides[k]) % n;
        let k = match sweep {
            Sweep::FirstAxisFirst => (0..m).rev().find(|&k| coord(k) > 0),
            Sweep::LastAxisFirst => (0..m).find(|&k| coord(k) > 0),
        }
        .expect("not the origin");
        let p = i - strides[k];
        unwrapped[i] = unwrapped[p] + step(f.values[p], f.values[i]);
    }
    let mut residual: f64 = 0.0;
    let lift: Vec<f64> = unwrapped
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let linear: f64 = (0..m)
                .map(|k| character[k] as f64 * ((i / strides[k]) % n) as f64 / n as f64)
                .sum();
            let s = u - linear;
            let rebuilt = Complex64::from_polar(1.0, 2.0 * PI * (linear.rem_euclid(1.0) + s));
            residual = residual.max((rebuilt - f.values[i]).norm());
            s
        })
        .collect();
    Ok(VKDecomposition {
        character,
        lift,
        residual,
    })
}

/// Splits `f` into a character and a real lift.
pub fn vk_decompose(f: &SampledTorusMap) -> Result<VKDecomposition> {
    decompose(f, Sweep::FirstAxisFirst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub unique: bool,
    pub characters: [Vec<i64>; 2],
    pub max_discrepancy: f64,
}

/// Decomposes along two independent sweeps, with winding numbers taken on
/// different base loops, and compares.
pub fn vk_verify_uniqueness(f: &SampledTorusMap) -> Result<UniquenessReport> {
    let a = decompose(f, Sweep::FirstAxisFirst)?;
    let b = decompose(f, Sweep::LastAxisFirst)?;
    let max_discrepancy = a
        .lift
        .iter()
        .zip(&b.lift)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(UniquenessReport {
        unique: a.character == b.character && max_discrepancy < 1e-9,
        characters: [a.character, b.character],
        max_discrepancy,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomomorphismReport {
    pub characters_add: bool,
    pub max_error: f64,
}

/// Checks `S(f1 f2) = S(f1) + S(f2)` pointwise.
pub fn vk_homomorphism_check(f1: &SampledTorusMap, f2: &SampledTorusMap) -> Result<HomomorphismReport> {
    let prod = f1.mul(f2)?;
    let (a, b, c) = (vk_decompose(f1)?, vk_decompose(f2)?, vk_decompose(&prod)?);
    let characters_add = a
        .character
        .iter()
        .zip(&b.character)
        .map(|(x, y)| x + y)
        .eq(c.character.iter().copied());
    let max_error = (0..c.lift.len())
        .map(|i| (c.lift[i] - a.lift[i] - b.lift[i]).abs())
        .fold(0.0, f64::max);
    Ok(HomomorphismReport {
        characters_add,
        max_error,
    })
}

/// Checks `S(f o theta) = S(f) o theta` for the toral endomorphism given by
/// an integer matrix.
pub fn vk_endomorphism_check(f: &SampledTorusMap, theta: &[Vec<i64>]) -> Result<f64> {
    let g = f.compose(theta)?;
    let (sf, sg) = (vk_decompose(f)?, vk_decompose(&g)?);
    let err = (0..g.values.len())
        .map(|i| {
            let image = apply(theta, &SampledTorusMap::unflatten(f.m, f.n, i), f.n);
            (sg.lift[i] - sf.lift[f.flatten(&image)]).abs()
        })
        .fold(0.0, f64::max);
    Ok(err)
}

/// A smooth test lift `S(x) = sum a (sin(2 pi (k.x) + p) - sin p)`, which
/// vanishes at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigLift {
    pub modes: Vec<(Vec<i32>, f64, f64)>,
}

impl TrigLift {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.modes
            .iter()
            .map(|(k, a, p)| {
                let t: f64 = k.iter().zip(x).map(|(&k, &x)| k as f64 * x).sum();
                a * ((2.0 * PI * t + p).sin() - p.sin())
            })
            .sum()
    }

    /// Random modes with frequencies in `[-3, 3]` and total amplitude below
    /// `amplitude`.
    pub fn random(m: usize, modes: usize, amplitude: f64, rng: &mut impl Rng) -> Self {
        let modes = (0..modes)
            .map(|_| {
                let k = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
                let a = rng.gen_range(-1.0..1.0) * amplitude / modes as f64;
                (k, a, rng.gen_range(0.0..2.0 * PI))
            })
            .collect();
        TrigLift { modes }
    }

    /// Samples `x -> exp(2 pi i (c.x + S(x)))`.
    pub fn sample(&self, character: &[i64], n: usize) -> Result<SampledTorusMap> {
        let m = character.len();
        SampledTorusMap::from_phase_fn(m, n, |x| {
            let linear: f64 = character.iter().zip(x).map(|(&c, &x)| c as f64 * x).sum();
            linear + self.eval(x)
        })
    }
}

/// A finitely supported function on `Z^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSupport {
    pub dim: usize,
    pub entries: Vec<(Vec<i32>, Complex64)>,
}

impl FiniteSupport {
    pub fn from_poly(p: &LaurentPoly) -> Self {
        use num_traits::ToPrimitive;
        FiniteSupport {
            dim: p.dim(),
            entries: p
                .terms()
                .map(|(m, c)| (m.0.clone(), Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)))
                .collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, c)| c.norm() == 0.0)
    }

    fn random(dim: usize, radius: i32, rng: &mut impl Rng) -> Self {
        let entries = box_points(dim, -radius, radius)
            .into_iter()
            .map(|n| (n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        FiniteSupport { dim, entries }
    }

    fn fourier(&self, z: &[Complex64]) -> Complex64 {
        self.entries
            .iter()
            .map(|(n, c)| n.iter().zip(z).fold(*c, |acc, (&e, w)| acc * w.powi(e)))
            .sum()
    }

    fn convolve(&self, other: &Self) -> Self {
        let mut out: std::collections::BTreeMap<Vec<i32>, Complex64> = Default::default();
        for (a, x) in &self.entries {
            for (b, y) in &other.entries {
                let k: Vec<i32> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                *out.entry(k).or_default() += x * y;
            }
        }
        FiniteSupport {
            dim: self.dim,
            entries: out.into_iter().collect(),
        }
    }

    fn l1(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c.norm()).sum()
    }
}

fn box_points(dim: usize, lo: i32, hi: i32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroDivisorReport {
    pub radius: i32,
    pub unknowns: usize,
    /// Number of singular values below `1e-8` times the largest.
    pub kernel_dim: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Largest `|P f| / |f|` over random `f`, `P` the projection onto the
    /// numerical kernel of the truncated convolution.
    pub norm_ratio: f64,
    /// Largest `|(f*g)^ - f^ g^| / (|f|_1 |g|_1)` over random pairs.
    pub fourier_residual: f64,
    pub trials: usize,
}

/// Looks for nonzero `f` supported in `[-R, R]^d` with `f * g = 0`.
pub fn zero_divisor_check(g: &FiniteSupport, trials: usize, radius: i32, seed: u64) -> Result<ZeroDivisorReport> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if radius < 0 {
        return Err(Error::InvalidInput("radius must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = g.dim;
    let unknowns = box_points(d, -radius, radius);
    let col: std::collections::BTreeMap<&Vec<i32>, usize> = unknowns.iter().zip(0..).collect();
    let mut rows: std::collections::BTreeMap<Vec<i32>, usize> = Default::default();
    for u in &unknowns {
        for (s, _) in &g.entries {
            let k: Vec<i32> = u.iter().zip(s).map(|(a, b)| a + b).collect();
            let next = rows.len();
            rows.entry(k).or_insert(next);
        }
    }
    let mut a = DMatrix::<Complex64>::zeros(rows.len().max(unknowns.len()), unknowns.len());
    for u in &unknowns {
        for (s, c) in &g.entries {
            let k: Vec<i32> = u.iter().zip(s).map(|(a, b)| a + b).collect();
            a[(rows[&k], col[u])] += c;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let sigma_min = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    let small: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] < 1e-8 * sigma_max).collect();
    let mut norm_ratio: f64 = 0.0;
    let mut fourier_residual: f64 = 0.0;
    for _ in 0..trials {
        let f: Vec<Complex64> = (0..unknowns.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = f.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let proj: f64 = small
            .iter()
            .map(|&i| (0..f.len()).map(|j| v_t[(i, j)] * f[j]).sum::<Complex64>().norm_sqr())
            .fold(0.0, |a, b| a + b)
            .sqrt();
        norm_ratio = norm_ratio.max(proj / norm);

        let fr = FiniteSupport::random(d, 4, &mut rng);
        let gr = FiniteSupport::random(d, 4, &mut rng);
        let h = fr.convolve(&gr);
        let z: Vec<Complex64> = (0..d)
            .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let r = (h.fourier(&z) - fr.fourier(&z) * gr.fourier(&z)).norm() / (fr.l1() * gr.l1());
        fourier_residual = fourier_residual.max(r);
    }
    Ok(ZeroDivisorReport {
        radius,
        unknowns: unknowns.len(),
        kernel_dim: small.len(),
        sigma_min,
        sigma_max,
        norm_ratio,
        fourier_residual,
        trials,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarietyReport {
    pub samples: usize,
    pub near_zero: usize,
    pub fraction: f64,
    pub min_abs: f64,
}

/// Fraction of uniform random torus points where `|p| < 1e-12`.
pub fn variety_measure_check(p: &LaurentPoly, samples: usize, seed: u64) -> Result<VarietyReport> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut near_zero = 0;
    let mut min_abs = f64::INFINITY;
    let mut z = vec![Complex64::new(1.0, 0.0); p.dim()];
    for _ in 0..samples {
        for w in z.iter_mut() {
            *w = Complex64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>());
        }
        let v = p.eval(&z)?.norm();
        min_abs = min_abs.min(v);
        if v < 1e-12 {
            near_zero += 1;
        }
    }
    Ok(VarietyReport {
        samples,
        near_zero,
        fraction: if samples == 0 {
            0.0
        } else {
            near_zero as f64 / samples as f64
        },
        min_abs,
    })
}
