//! Report assembly. Reports are plain data with a fixed field order and
//! sorted maps throughout, so a fixed seed and input produce byte-identical
//! output across runs.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// One checked law. `law` is a stable identifier from the catalog below,
/// `witness` carries a counterexample or a measured value worth keeping.
#[derive(Debug, Clone, Serialize)]
pub struct LawResult {
    pub law: &'static str,
    pub holds: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl LawResult {
    pub fn pass(law: &'static str, detail: impl Into<String>) -> LawResult {
        LawResult {
            law,
            holds: true,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn fail(law: &'static str, detail: impl Into<String>, witness: Option<Value>) -> LawResult {
        LawResult {
            law,
            holds: false,
            detail: detail.into(),
            witness,
        }
    }

    pub fn checked(
        law: &'static str,
        holds: bool,
        detail: impl Into<String>,
        witness: Option<Value>,
    ) -> LawResult {
        LawResult {
            law,
            holds,
            detail: detail.into(),
            witness: if holds { None } else { witness },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub laws: Vec<LawResult>,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, scenario: &str) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            scenario: scenario.into(),
            seed: None,
            laws: Vec::new(),
            result: Value::Null,
        }
    }

    pub fn violated(&self) -> bool {
        self.laws.iter().any(|l| !l.holds)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports are plain data");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "{} :: {}", self.command, self.scenario);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed {seed}");
        }
        for l in &self.laws {
            let mark = if l.holds { "ok      " } else { "VIOLATED" };
            let _ = writeln!(out, "  {mark} {:<28} {}", l.law, l.detail);
            if let Some(w) = &l.witness {
                let _ = writeln!(out, "           witness: {w}");
            }
        }
        let _ = writeln!(
            out,
            "{} laws checked, {} violated",
            self.laws.len(),
            self.laws.iter().filter(|l| !l.holds).count()
        );
        if !self.result.is_null() {
            let _ = writeln!(out, "result: {}", self.result);
        }
        out
    }
}

// Law identifier catalog. Identifiers are part of the report schema: stable
// names, never reused for a different check.
pub mod law {
    pub const AXIOM_IDENTITY_DOMAIN: &str = "axioms.identity-domain";
    pub const AXIOM_IDENTITY_FIXES: &str = "axioms.identity-fixes";
    pub const AXIOM_COMPATIBILITY: &str = "axioms.compatibility";
    pub const AXIOM_COMPOSITION: &str = "axioms.composition";
    pub const GROUPOID_INVOLUTION: &str = "groupoid.involution";
    pub const GROUPOID_INTERTWINER: &str = "groupoid.intertwiner";
    pub const VF_MEMBERSHIP: &str = "vf.membership";
    pub const VF_COMPOSITION: &str = "vf.composition";
    pub const POLY_REVALIDATION: &str = "poly.revalidation";
    pub const POLY_DUAL_POINTS: &str = "poly.dual-points";
    pub const POLY_RECONSTRUCTION: &str = "poly.reconstruction";
    pub const ISO_REPRESENTATION: &str = "isotypic.representation";
    pub const ISO_SCHUR_PATTERN: &str = "isotypic.schur-pattern";
    pub const ISO_PROJECTORS: &str = "isotypic.projectors";
    pub const ISO_COMPLETENESS: &str = "isotypic.completeness";
    pub const CONV_ASSOCIATIVITY: &str = "conv.associativity";
    pub const CONV_STAR: &str = "conv.star-antiautomorphism";
    pub const CONV_LEFT_UNIT: &str = "conv.left-unit";
    pub const CONV_RIGHT_UNIT: &str = "conv.right-unit";
    pub const CONV_IDEAL: &str = "conv.polynomial-ideal";
    pub const CONV_EIGEN: &str = "conv.eigen-implication";
    pub const DECOMP_RECONSTRUCTION: &str = "decomp.reconstruction";
    pub const DECOMP_CONVERSE: &str = "decomp.converse";
    pub const SUITE_CLEAN: &str = "suite.instance-clean";
    pub const SUITE_FAULT: &str = "suite.fault-detected";
}
