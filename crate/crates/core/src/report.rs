//! System specification files and the structured report documents.
//!
//! A specification is JSON of the form
//!
//! ```json
//! {"name": "ledrappier", "d": 2, "k": 1, "relations": ["1 + u1 + u2"], "options": {"mixing_bound": 4}}
//! ```
//!
//! For `k > 1` each relation is an array of `k` polynomial strings. Reports
//! contain no timestamps or paths, so identical inputs give identical bytes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{fraction_field_rank, is_torsion, MixingStatus, ModulePresentation};
use crate::analytic::{
    variety_measure_check, vk_decompose, vk_verify_uniqueness, zero_divisor_check, FiniteSupport, SampledTorusMap,
    TrigLift, UniquenessReport, VarietyReport, ZeroDivisorReport,
};
use crate::entropy::{
    mahler_d1_exact, mahler_quadrature, mahler_roots_of_unity, periodic_point_growth, EntropyOptions, EntropyValue,
    MahlerEstimate, PeriodicCount,
};
use crate::error::{Error, Result};
use crate::grobner::Limits;
use crate::laurent::LaurentPoly;
use crate::parse::parse_poly;
use crate::rigidity::{verdict_with, SystemTrail, Verdict};

pub const SCHEMA: &str = "algdyn-report/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Relation {
    Scalar(String),
    Row(Vec<String>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing_bound: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mahler_grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gb_max_pairs: Option<usize>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub name: String,
    pub d: usize,
    #[serde(default = "one")]
    pub k: usize,
    pub relations: Vec<Relation>,
    #[serde(default)]
    pub options: SpecOptions,
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: format!("spec file line {}: {e}", e.line()),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn presentation(&self, limits: Limits) -> Result<ModulePresentation> {
        let rows = self
            .relations
            .iter()
            .map(|r| {
                let texts: Vec<&String> = match r {
                    Relation::Scalar(s) => vec![s],
                    Relation::Row(v) => v.iter().collect(),
                };
                if texts.len() != self.k {
                    return Err(Error::RankMismatch {
                        expected: self.k,
                        found: texts.len(),
                    });
                }
                texts.into_iter().map(|t| parse_poly(t, Some(self.d))).collect()
            })
            .collect::<Result<Vec<Vec<LaurentPoly>>>>()?;
        Ok(ModulePresentation::with_limits(self.d, self.k, rows, limits)?.named(self.name.clone()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisOptions {
    pub mixing_bound: u32,
    pub mahler_grid: usize,
    pub roots_order: usize,
    pub gb_max_pairs: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            mixing_bound: 4,
            mahler_grid: 512,
            roots_order: 64,
            gb_max_pairs: Limits::default().max_pairs,
        }
    }
}

impl AnalysisOptions {
    /// Values set in the spec file replace the current ones.
    pub fn merged(mut self, o: &SpecOptions) -> Self {
        if let Some(v) = o.mixing_bound {
            self.mixing_bound = v;
        }
        if let Some(v) = o.mahler_grid {
            self.mahler_grid = v;
        }
        if let Some(v) = o.roots_order {
            self.roots_order = v;
        }
        if let Some(v) = o.gb_max_pairs {
            self.gb_max_pairs = v;
        }
        self
    }

    pub fn limits(&self) -> Limits {
        Limits {
            max_pairs: self.gb_max_pairs,
            ..Limits::default()
        }
    }

    pub fn entropy(&self) -> EntropyOptions {
        EntropyOptions {
            quadrature_grid: self.mahler_grid,
            roots_order: self.roots_order,
            ..EntropyOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// Decided exactly, or witnessed by a checkable certificate.
    Certified,
    /// No counterexample within the stated search bound.
    BoundedSearch,
    /// A numerical value with an error indicator.
    Numerical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim<T> {
    pub certification: Certification,
    #[serde(flatten)]
    pub value: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemReport {
    pub name: Option<String>,
    pub d: usize,
    pub k: usize,
    pub relations: Vec<Vec<String>>,
    pub fraction_field_rank: usize,
    pub torsion: Claim<serde_json::Value>,
    pub connected: Claim<crate::analysis::ConnectednessReport>,
    pub mixing: Claim<MixingStatus>,
    pub noetherian: Claim<serde_json::Value>,
    pub entropy: Claim<crate::entropy::EntropyReport>,
}

impl SystemReport {
    fn build(m: &ModulePresentation, trail: SystemTrail) -> Self {
        let mixing_cert = match trail.mixing {
            MixingStatus::NoWitnessUpTo { .. } => Certification::BoundedSearch,
            _ => Certification::Certified,
        };
        let entropy_cert = match trail.entropy.value {
            EntropyValue::Interval { .. } | EntropyValue::UpperBound { .. } | EntropyValue::Unknown { .. } => {
                Certification::Numerical
            }
            EntropyValue::Exact { .. }
                if m.dim() == 1 && m.principal_polynomial().is_some_and(|f| !f.is_constant()) =>
            {
                Certification::Numerical
            }
            _ => Certification::Certified,
        };
        SystemReport {
            name: trail.name,
            d: m.dim(),
            k: m.generators(),
            relations: m
                .relations()
                .rows()
                .map(|r| r.iter().map(|p| p.to_string()).collect())
                .collect(),
            fraction_field_rank: fraction_field_rank(m),
            torsion: Claim {
                certification: Certification::Certified,
                value: serde_json::json!({ "torsion": is_torsion(m) }),
            },
            connected: Claim {
                certification: Certification::Certified,
                value: trail.connected,
            },
            mixing: Claim {
                certification: mixing_cert,
                value: trail.mixing,
            },
            noetherian: Claim {
                certification: Certification::Certified,
                value: serde_json::json!({ "noetherian": trail.noetherian, "note": trail.noetherian_note }),
            },
            entropy: Claim {
                certification: entropy_cert,
                value: trail.entropy,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigiditySummary {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReportDoc {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub parameters: AnalysisOptions,
    pub systems: Vec<SystemReport>,
    pub rigidity: Option<RigiditySummary>,
}

impl AnalysisReportDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn is_inapplicable(&self) -> bool {
        matches!(
            self.rigidity,
            Some(RigiditySummary {
                verdict: Verdict::Inapplicable { .. },
                ..
            })
        )
    }

    /// A short human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.systems {
            out += &format!("system {}\n", s.name.as_deref().unwrap_or("(unnamed)"));
            out += &format!(
                "  d = {}, k = {}, rank over fraction field = {}\n",
                s.d, s.k, s.fraction_field_rank
            );
            out += &format!(
                "  connected: {}\n",
                if s.connected.value.connected { "yes" } else { "no" }
            );
            if let Some(c) = &s.connected.value.certificate {
                out += &format!(
                    "    certificate: {} * ({}) lies in the relations\n",
                    c.prime,
                    join(&c.element)
                );
            }
            out += &match &s.mixing.value {
                MixingStatus::NotMixing { witness, certificate } => {
                    format!(
                        "  mixing: no, witness n = {witness:?}, certificate ({})\n",
                        join(certificate)
                    )
                }
                MixingStatus::NoWitnessUpTo { bound } => format!("  mixing: no witness up to {bound}\n"),
                MixingStatus::MixingCertified { reason } => format!("  mixing: yes ({reason})\n"),
            };
            out += &format!("  entropy: {}\n", describe(&s.entropy.value.value));
        }
        if let Some(r) = &self.rigidity {
            out += &match &r.verdict {
                Verdict::Rigid => "verdict: rigid\n".to_string(),
                Verdict::NotRigid => "verdict: not rigid\n".to_string(),
                Verdict::Inapplicable { failed } => format!("verdict: inapplicable\n  {}\n", failed.join("\n  ")),
            };
            for a in &r.assumptions {
                out += &format!("  assumption: {a}\n");
            }
        }
        out
    }
}

fn join(v: &[LaurentPoly]) -> String {
    v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

fn describe(v: &EntropyValue) -> String {
    match v {
        EntropyValue::Infinite => "infinite".into(),
        EntropyValue::Zero => "0".into(),
        EntropyValue::Exact { value, method } => format!("{value:.10} nats ({method})"),
        EntropyValue::Interval { lo, hi, method } => format!("in [{lo:.6}, {hi:.6}] nats ({method})"),
        EntropyValue::UpperBound { value, method } => format!("at most {value:.6} nats ({method})"),
        EntropyValue::Unknown { reason } => format!("finite ({reason})"),
    }
}

/// Connectedness, mixing search and entropy for one system.
pub fn analyze(spec: &SystemSpec, opts: &AnalysisOptions) -> Result<AnalysisReportDoc> {
    let m = spec.presentation(opts.limits())?;
    let trail = SystemTrail::analyze(&m, opts.mixing_bound, &opts.entropy())?;
    Ok(AnalysisReportDoc {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "analyze",
        parameters: *opts,
        systems: vec![SystemReport::build(&m, trail)],
        rigidity: None,
    })
}

/// The rigidity verdict for maps `X1 -> X2`.
pub fn rigidity(source: &SystemSpec, target: &SystemSpec, opts: &AnalysisOptions) -> Result<AnalysisReportDoc> {
    let m1 = source.presentation(opts.limits())?;
    let m2 = target.presentation(opts.limits())?;
    let v = verdict_with(&m1, &m2, opts.mixing_bound, &opts.entropy())?;
    Ok(AnalysisReportDoc {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "rigidity",
        parameters: *opts,
        systems: vec![SystemReport::build(&m1, v.source), SystemReport::build(&m2, v.target)],
        rigidity: Some(RigiditySummary {
            verdict: v.verdict,
            assumptions: v.assumptions,
        }),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MahlerDoc {
    pub schema: &'static str,
    pub polynomial: String,
    pub d: usize,
    pub estimates: Vec<MahlerEstimate>,
    pub periodic_points: Vec<PeriodicCount>,
    pub notes: Vec<String>,
}

/// All Mahler measure estimates for `f`, plus periodic-point growth at the
/// given orders.
pub fn mahler_doc(f: &LaurentPoly, grid: usize, roots_order: usize, orders: &[u32]) -> Result<MahlerDoc> {
    let mut estimates = Vec::new();
    let mut notes = Vec::new();
    if f.dim() == 1 {
        estimates.push(mahler_d1_exact(f)?);
    }
    estimates.push(mahler_quadrature(f, grid)?);
    match mahler_roots_of_unity(f, roots_order) {
        Ok(e) => estimates.push(e),
        Err(e) => notes.push(format!("roots-of-unity oracle: {e}")),
    }
    Ok(MahlerDoc {
        schema: SCHEMA,
        polynomial: f.to_string(),
        d: f.dim(),
        estimates,
        periodic_points: periodic_point_growth(f, orders)?,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VkDoc {
    pub schema: &'static str,
    pub m: usize,
    pub resolution: usize,
    /// The character used to build the map, for constructed inputs.
    pub expected_character: Option<Vec<i64>>,
    pub character: Vec<i64>,
    pub residual: f64,
    /// Sup distance between recovered and constructed lifts.
    pub lift_error: Option<f64>,
    pub uniqueness: UniquenessReport,
}

/// Decomposes a fixture map.
pub fn vk_doc(f: &SampledTorusMap) -> Result<VkDoc> {
    let d = vk_decompose(f)?;
    Ok(VkDoc {
        schema: SCHEMA,
        m: f.dim(),
        resolution: f.resolution(),
        expected_character: None,
        character: d.character,
        residual: d.residual,
        lift_error: None,
        uniqueness: vk_verify_uniqueness(f)?,
    })
}

/// A random constructed pair (character, lift) and its round trip.
pub fn vk_constructed(m: usize, n: usize, seed: u64) -> Result<VkDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let character: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
    let lift = TrigLift::random(m, 3, 2.0, &mut rng);
    let f = lift.sample(&character, n)?;
    let d = vk_decompose(&f)?;
    let mut err: f64 = 0.0;
    for (i, s) in d.lift.iter().enumerate() {
        let mut x = vec![0.0; m];
        let mut r = i;
        for k in (0..m).rev() {
            x[k] = (r % n) as f64 / n as f64;
            r /= n;
        }
        err = err.max((s - lift.eval(&x)).abs());
    }
    Ok(VkDoc {
        schema: SCHEMA,
        m,
        resolution: n,
        expected_character: Some(character),
        character: d.character,
        residual: d.residual,
        lift_error: Some(err),
        uniqueness: vk_verify_uniqueness(&f)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZdcDoc {
    pub schema: &'static str,
    pub polynomial: String,
    pub kernel: ZeroDivisorReport,
    pub variety: VarietyReport,
}

pub fn zdc_doc(g: &LaurentPoly, radius: i32, trials: usize, samples: usize, seed: u64) -> Result<ZdcDoc> {
    Ok(ZdcDoc {
        schema: SCHEMA,
        polynomial: g.to_string(),
        kernel: zero_divisor_check(&FiniteSupport::from_poly(g), trials, radius, seed)?,
        variety: variety_measure_check(g, samples, seed)?,
    })
}
