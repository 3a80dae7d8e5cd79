//! Topological rigidity verdicts.
//!
//! Let `X1` and `X2` be connected, mixing, Noetherian algebraic
//! `Z^d`-actions. Every equivariant continuous map `X1 -> X2` is affine if
//! and only if `X2` has finite topological entropy. The verdict checks each
//! hypothesis and records how it was established before applying this
//! equivalence.

use serde::Serialize;

use crate::analysis::{
    is_connected, is_noetherian, mixing_search, ConnectednessReport, MixingStatus, ModulePresentation,
};
use crate::entropy::{entropy_classify, EntropyOptions, EntropyReport};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Rigid,
    NotRigid,
    Inapplicable { failed: Vec<String> },
}

/// Hypotheses and entropy for one system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemTrail {
    pub name: Option<String>,
    pub d: usize,
    pub connected: ConnectednessReport,
    pub mixing: MixingStatus,
    pub noetherian: bool,
    pub noetherian_note: String,
    pub entropy: EntropyReport,
}

impl SystemTrail {
    pub fn analyze(m: &ModulePresentation, mixing_bound: u32, opts: &EntropyOptions) -> Result<Self> {
        let (connected, (mixing, entropy)) = rayon::join(
            || is_connected(m),
            || rayon::join(|| mixing_search(m, mixing_bound), || entropy_classify(m, opts)),
        );
        let (noetherian, note) = is_noetherian(m);
        Ok(SystemTrail {
            name: m.name().map(str::to_string),
            d: m.dim(),
            connected: connected?,
            mixing: mixing?,
            noetherian,
            noetherian_note: note.to_string(),
            entropy: entropy?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidityVerdict {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub source: SystemTrail,
    pub target: SystemTrail,
    /// Hypotheses taken on trust, e.g. mixing with only a bounded search.
    pub assumptions: Vec<String>,
}

fn check(label: &str, t: &SystemTrail, failed: &mut Vec<String>, assumptions: &mut Vec<String>) {
    if !t.connected.connected {
        let p = t
            .connected
            .certificate
            .as_ref()
            .map(|c| c.prime.to_string())
            .unwrap_or_default();
        failed.push(format!("{label}: not connected (element of additive order {p})"));
    }
    match &t.mixing {
        MixingStatus::NotMixing { witness, .. } => {
            failed.push(format!(
                "{label}: not mixing (u^n - 1 is a zero divisor for n = {witness:?})"
            ));
        }
        MixingStatus::NoWitnessUpTo { bound } => {
            assumptions.push(format!("{label}: mixing assumed, no witness up to {bound}"));
        }
        MixingStatus::MixingCertified { .. } => {}
    }
    if !t.noetherian {
        failed.push(format!("{label}: not Noetherian"));
    }
}

/// Decides whether every equivariant continuous map `X_{M1} -> X_{M2}` is
/// affine, or reports which hypotheses prevent an answer.
pub fn verdict(m1: &ModulePresentation, m2: &ModulePresentation, mixing_bound: u32) -> Result<RigidityVerdict> {
    verdict_with(m1, m2, mixing_bound, &EntropyOptions::default())
}

pub fn verdict_with(
    m1: &ModulePresentation,
    m2: &ModulePresentation,
    mixing_bound: u32,
    opts: &EntropyOptions,
) -> Result<RigidityVerdict> {
    let (source, target) = rayon::join(
        || SystemTrail::analyze(m1, mixing_bound, opts),
        || SystemTrail::analyze(m2, mixing_bound, opts),
    );
    let (source, target) = (source?, target?);
    let mut failed = Vec::new();
    let mut assumptions = Vec::new();
    if source.d != target.d {
        failed.push(format!(
            "acting groups differ: Z^{} on X1, Z^{} on X2",
            source.d, target.d
        ));
    }
    check("X1", &source, &mut failed, &mut assumptions);
    check("X2", &target, &mut failed, &mut assumptions);
    let verdict = if !failed.is_empty() {
        Verdict::Inapplicable { failed }
    } else if target.entropy.finite {
        Verdict::Rigid
    } else {
        Verdict::NotRigid
    };
    Ok(RigidityVerdict {
        verdict,
        source,
        target,
        assumptions,
    })
}
