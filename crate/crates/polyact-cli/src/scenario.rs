//! Scenario documents: a JSON description of an action, some functions and
//! the parameters a subcommand needs. Unknown fields are rejected so typos
//! surface as schema errors instead of silently ignored knobs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use polyact::action::{PartialAction, ProbeSet};
use polyact::func::Func;
use polyact::group::{GroupModel, SubgroupHandle};
use polyact::isotypic::{QuotientSpec, Representation};
use polyact::space::{OpenSet, SpaceModel};
use polyact::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub action: ActionDescriptor,
    /// Named functions the operations refer to ("f", "g", ...).
    #[serde(default)]
    pub functions: BTreeMap<String, Func>,
    /// Descending subgroup chain for polynomial detection.
    #[serde(default)]
    pub chain: Vec<SubgroupHandle>,
    /// Explicit probes for law sweeps on infinite models.
    #[serde(default)]
    pub probes: Option<ProbeSet>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Compact open subgroup for saturation, projections and units.
    #[serde(default)]
    pub subgroup: Option<SubgroupHandle>,
    /// Finite quotient the isotypic machinery works over.
    #[serde(default)]
    pub quotient: Option<QuotientSpec>,
    /// Which irreducible family to project with.
    #[serde(default)]
    pub irreps: Option<IrrepFamily>,
    /// Invariant set to decompose.
    #[serde(default)]
    pub set: Option<OpenSet>,
    /// Working depth for canonical chains and probe levels.
    #[serde(default)]
    pub depth: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum IrrepFamily {
    Cyclic { n: usize },
    Symmetric3,
    Dihedral4,
    Quaternion,
}

impl IrrepFamily {
    pub fn representations(&self) -> Vec<Representation> {
        match self {
            IrrepFamily::Cyclic { n } => Representation::cyclic_irreps(*n),
            IrrepFamily::Symmetric3 => Representation::s3_irreps(),
            IrrepFamily::Dihedral4 => Representation::d4_irreps(),
            IrrepFamily::Quaternion => Representation::q8_irreps(),
        }
    }
}

/// Constructor tree mirroring the library's action combinators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionDescriptor {
    RightTranslation {
        group: GroupModel,
    },
    LeftTranslation {
        group: GroupModel,
    },
    Trivial {
        space: SpaceModel,
        group: GroupModel,
    },
    FiniteTable {
        space: SpaceModel,
        group: GroupModel,
        table: Vec<Vec<Option<usize>>>,
    },
    RestrictOpen {
        base: Box<ActionDescriptor>,
        y: OpenSet,
    },
    RestrictSubgroup {
        base: Box<ActionDescriptor>,
        h: SubgroupHandle,
    },
    DerivedFirst {
        base: Box<ActionDescriptor>,
    },
    DerivedSecond {
        base: Box<ActionDescriptor>,
    },
    CommutingProduct {
        left: Box<ActionDescriptor>,
        right: Box<ActionDescriptor>,
    },
}

impl ActionDescriptor {
    /// Probes are needed only by commuting products on infinite models,
    /// where the exchange law cannot be swept exhaustively.
    pub fn build(&self, probes: Option<&ProbeSet>) -> Result<PartialAction> {
        match self {
            ActionDescriptor::RightTranslation { group } => {
                Ok(PartialAction::right_translation(group.clone()))
            }
            ActionDescriptor::LeftTranslation { group } => {
                Ok(PartialAction::left_translation(group.clone()))
            }
            ActionDescriptor::Trivial { space, group } => {
                Ok(PartialAction::trivial(space.clone(), group.clone()))
            }
            ActionDescriptor::FiniteTable {
                space,
                group,
                table,
            } => PartialAction::finite_table(space.clone(), group.clone(), table.clone()),
            ActionDescriptor::RestrictOpen { base, y } => {
                base.build(probes)?.restrict_to_open(y.clone())
            }
            ActionDescriptor::RestrictSubgroup { base, h } => {
                base.build(probes)?.restrict_to_subgroup(h.clone())
            }
            ActionDescriptor::DerivedFirst { base } => Ok(base.build(probes)?.derived_first()),
            ActionDescriptor::DerivedSecond { base } => {
                Ok(base.build(probes)?.derived_second())
            }
            ActionDescriptor::CommutingProduct { left, right } => {
                let l = left.build(probes)?;
                let r = right.build(probes)?;
                match probes {
                    Some(pr) => PartialAction::commuting_product(l, r, pr),
                    None => PartialAction::commuting_product_exhaustive(l, r),
                }
            }
        }
    }
}

impl Scenario {
    pub fn build_action(&self) -> Result<PartialAction> {
        self.action.build(self.probes.as_ref())
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        let sc: Scenario = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("scenario does not match the schema: {e}")))?;
        if sc.schema_version != SCHEMA_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported schema_version {} (this build reads {})",
                sc.schema_version, SCHEMA_VERSION
            )));
        }
        Ok(sc)
    }

    pub fn function(&self, name: &str) -> Result<&Func> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::Malformed(format!("scenario defines no function \"{name}\"")))
    }

    pub fn depth(&self) -> i64 {
        self.params.depth.unwrap_or(2)
    }
}
