//! Partial (local) actions of group models on space models.
//!
//! An action is an immutable constructor tree: a small catalog of global
//! actions (right translation of a group on itself, a trivial action, a
//! finite table) closed under open restriction, restriction to a closed
//! subgroup, the two derived actions on the domain, coordinate lifts to a
//! product space, and products of commuting actions. The domain Γ of an
//! action is never materialized: `in_domain` decides membership by
//! structural recursion, and `domain_status` answers the same question for
//! whole cells (all in / all out / mixed), exactly.
//!
//! A tree's point universe can be smaller than its ambient space model: an
//! open restriction acts on Y, a derived action acts on Γ itself. Points of
//! the ambient space outside the universe are rejected as out-of-model
//! rather than treated as absent.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::group::{
    cell_as_identity_subgroup, cell_subgroup_relation, group_inv_cell, group_op_cell,
    subgroup_cells, subgroup_contains, subgroup_intersection, subgroup_is_compact,
    subgroup_is_open, translate_cell_elt, validate_subgroup, GroupModel, Side, SubgroupHandle,
};
use crate::space::{
    cell_point, cell_sample_point, Cell, Elt, OpenSet, SetRelation, SpaceModel,
};
use crate::{Error, Result};

/// Catalog of globally defined actions the constructors grow from.
#[derive(Debug, Clone, PartialEq)]
enum Catalog {
    /// G acting on itself by right multiplication. Left multiplication is
    /// this same catalog entry over the opposite group.
    RightTranslation,
    /// Every group element fixes every point.
    Trivial,
    /// Finite space, finite group, and an explicit table of images. Only the
    /// table's shape is validated here, so unlawful tables can be built and
    /// fed to `check_axioms`.
    FiniteTable {
        table: Vec<Vec<Option<usize>>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DerivedKind {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Catalog {
        space: SpaceModel,
        group: GroupModel,
        kind: Catalog,
    },
    RestrictOpen {
        base: PartialAction,
        y: OpenSet,
    },
    RestrictSubgroup {
        base: PartialAction,
        h: SubgroupHandle,
    },
    /// The two actions of G on Γ itself: (x,p) ◁₁ q = (x·q, q⁻¹p) and
    /// (x,p) ◁₂ q = (x, pq). `space` caches the ambient product model.
    Derived {
        base: PartialAction,
        kind: DerivedKind,
        space: SpaceModel,
    },
    /// The base action moved through one coordinate of a product space,
    /// leaving the other coordinate untouched.
    FactorLift {
        base: PartialAction,
        carried: SpaceModel,
        slot: Slot,
        space: SpaceModel,
    },
    /// Two commuting actions on the same space, acting jointly: the left
    /// tree carries a left action as a right action of the opposite group,
    /// and x·(h,k) = (x·h)·k over the product group.
    CommutingProduct {
        left: PartialAction,
        right: PartialAction,
        group: GroupModel,
    },
}

/// A partial action, cheap to clone and safe to share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ActionRepr", into = "ActionRepr")]
pub struct PartialAction {
    node: Arc<Node>,
}

fn wrap(node: Node) -> PartialAction {
    PartialAction {
        node: Arc::new(node),
    }
}

impl PartialAction {
    /// G acting on itself by right multiplication, globally.
    pub fn right_translation(group: GroupModel) -> PartialAction {
        wrap(Node::Catalog {
            space: group.as_space(),
            group,
            kind: Catalog::RightTranslation,
        })
    }

    /// G acting on itself by left multiplication, carried as right
    /// translation of the opposite group.
    pub fn left_translation(group: GroupModel) -> PartialAction {
        PartialAction::right_translation(GroupModel::opposite(group))
    }

    /// Every element acts as the identity.
    pub fn trivial(space: SpaceModel, group: GroupModel) -> PartialAction {
        wrap(Node::Catalog {
            space,
            group,
            kind: Catalog::Trivial,
        })
    }

    /// A finite action given by an images table, `table[x][g]` holding the
    /// image point or None where (x,g) is outside the domain. Shape-checked
    /// only; lawfulness is `check_axioms`' business.
    pub fn finite_table(
        space: SpaceModel,
        group: GroupModel,
        table: Vec<Vec<Option<usize>>>,
    ) -> Result<PartialAction> {
        let n = match &space {
            SpaceModel::FinitePoints { labels } => labels.len(),
            _ => {
                return Err(Error::Unsupported(
                    "table actions need a finite point space".into(),
                ))
            }
        };
        let m = match &group {
            GroupModel::Finite(g) => g.order(),
            _ => {
                return Err(Error::Unsupported(
                    "table actions need a finite group".into(),
                ))
            }
        };
        if table.len() != n {
            return Err(Error::Malformed(format!(
                "table has {} rows for {} points",
                table.len(),
                n
            )));
        }
        for row in &table {
            if row.len() != m {
                return Err(Error::Malformed(format!(
                    "table row has {} entries for {} group elements",
                    row.len(),
                    m
                )));
            }
            if let Some(bad) = row.iter().flatten().find(|&&i| i >= n) {
                return Err(Error::Malformed(format!(
                    "table image {bad} is outside the {n}-point space"
                )));
            }
        }
        Ok(wrap(Node::Catalog {
            space,
            group,
            kind: Catalog::FiniteTable { table },
        }))
    }

    /// Restriction to an open subset: the new universe is Y, and (y,p) stays
    /// in the domain exactly when y·p lands back in Y.
    pub fn restrict_to_open(&self, y: OpenSet) -> Result<PartialAction> {
        for c in y.cells() {
            if !self.space().admits_cell(c) {
                return Err(Error::NotInModel(format!(
                    "cell {c:?} does not belong to the action's space"
                )));
            }
        }
        Ok(wrap(Node::RestrictOpen {
            base: self.clone(),
            y,
        }))
    }

    /// Restriction of the translators to a closed subgroup: Γ ∩ (X × H),
    /// same values.
    pub fn restrict_to_subgroup(&self, h: SubgroupHandle) -> Result<PartialAction> {
        validate_subgroup(self.group(), &h)?;
        Ok(wrap(Node::RestrictSubgroup {
            base: self.clone(),
            h,
        }))
    }

    /// First derived action of G on Γ: (x,p) ◁₁ q = (x·q, q⁻¹p), defined
    /// when (x,q) and the resulting pair are in Γ.
    pub fn derived_first(&self) -> PartialAction {
        self.derived(DerivedKind::First)
    }

    /// Second derived action of G on Γ: (x,p) ◁₂ q = (x, pq), defined when
    /// (x, pq) is in Γ.
    pub fn derived_second(&self) -> PartialAction {
        self.derived(DerivedKind::Second)
    }

    /// Both derived actions at once.
    pub fn derived_actions(&self) -> (PartialAction, PartialAction) {
        (self.derived_first(), self.derived_second())
    }

    fn derived(&self, kind: DerivedKind) -> PartialAction {
        let space = SpaceModel::product(self.space().clone(), self.group().as_space());
        wrap(Node::Derived {
            base: self.clone(),
            kind,
            space,
        })
    }

    /// The action moved through the first coordinate of `space × carried`.
    pub fn first_factor(&self, carried: SpaceModel) -> PartialAction {
        let space = SpaceModel::product(self.space().clone(), carried.clone());
        wrap(Node::FactorLift {
            base: self.clone(),
            carried,
            slot: Slot::First,
            space,
        })
    }

    /// The action moved through the second coordinate of `carried × space`.
    pub fn second_factor(carried: SpaceModel, base: &PartialAction) -> PartialAction {
        let space = SpaceModel::product(carried.clone(), base.space().clone());
        wrap(Node::FactorLift {
            base: base.clone(),
            carried,
            slot: Slot::Second,
            space,
        })
    }

    /// Joint action x·(h,k) = (x·h)·k of two commuting actions on the same
    /// space (the left one given as a right action of the opposite group).
    /// The exchange condition is verified on the probe set first: whenever
    /// x·h and x·k both exist, (x·h)·k and (x·k)·h must exist together and
    /// agree. Probe translators are pairs (h,k).
    pub fn commuting_product(
        left: PartialAction,
        right: PartialAction,
        probes: &ProbeSet,
    ) -> Result<PartialAction> {
        let cand = PartialAction::commuting_product_unchecked(left, right)?;
        cand.commuting_check(probes)?;
        Ok(cand)
    }

    /// Same, enumerating all points and translator pairs of a finite
    /// instance.
    pub fn commuting_product_exhaustive(
        left: PartialAction,
        right: PartialAction,
    ) -> Result<PartialAction> {
        let cand = PartialAction::commuting_product_unchecked(left, right)?;
        let probes = ProbeSet::exhaustive(&cand).ok_or_else(|| {
            Error::Unsupported("exhaustive probing needs a finite space and group".into())
        })?;
        cand.commuting_check(&probes)?;
        Ok(cand)
    }

    fn commuting_product_unchecked(
        left: PartialAction,
        right: PartialAction,
    ) -> Result<PartialAction> {
        if left.space() != right.space() {
            return Err(Error::Unsupported(
                "commuting product needs two actions on the same space".into(),
            ));
        }
        let group = GroupModel::product(left.group().clone(), right.group().clone());
        Ok(wrap(Node::CommutingProduct { left, right, group }))
    }

    fn commuting_check(&self, probes: &ProbeSet) -> Result<()> {
        let (left, right) = match &*self.node {
            Node::CommutingProduct { left, right, .. } => (left, right),
            _ => unreachable!("checked on commuting products only"),
        };
        for x in &probes.points {
            if !self.space().contains(x) || !self.valid_point(x) {
                continue;
            }
            for t in &probes.translators {
                let (h, k) = match t {
                    Elt::Pair(h, k) => (h.as_ref(), k.as_ref()),
                    _ => continue,
                };
                if !left.group().contains(h) || !right.group().contains(k) {
                    continue;
                }
                if !left.domain_holds(x, h) || !right.domain_holds(x, k) {
                    continue;
                }
                let xh = left.value(x, h);
                let xk = right.value(x, k);
                let via_right = right.valid_point(&xh) && right.domain_holds(&xh, k);
                let via_left = left.valid_point(&xk) && left.domain_holds(&xk, h);
                if via_right != via_left {
                    return Err(Error::NotCommuting(format!(
                        "definedness differs at x={x:?}, h={h:?}, k={k:?}"
                    )));
                }
                if via_right && right.value(&xh, k) != left.value(&xk, h) {
                    return Err(Error::NotCommuting(format!(
                        "values differ at x={x:?}, h={h:?}, k={k:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Ambient space model. The point universe can be smaller; see
    /// `valid_point`.
    pub fn space(&self) -> &SpaceModel {
        match &*self.node {
            Node::Catalog { space, .. } => space,
            Node::RestrictOpen { base, .. } | Node::RestrictSubgroup { base, .. } => base.space(),
            Node::Derived { space, .. } => space,
            Node::FactorLift { space, .. } => space,
            Node::CommutingProduct { left, .. } => left.space(),
        }
    }

    pub fn group(&self) -> &GroupModel {
        match &*self.node {
            Node::Catalog { group, .. } => group,
            Node::RestrictOpen { base, .. } | Node::RestrictSubgroup { base, .. } => base.group(),
            Node::Derived { base, .. } => base.group(),
            Node::FactorLift { base, .. } => base.group(),
            Node::CommutingProduct { group, .. } => group,
        }
    }

    /// Whether x belongs to the action's point universe: Y for an open
    /// restriction, Γ itself for a derived action, the whole space for the
    /// catalog.
    pub fn valid_point(&self, x: &Elt) -> bool {
        if !self.space().contains(x) {
            return false;
        }
        match &*self.node {
            Node::Catalog { .. } => true,
            Node::RestrictOpen { base, y } => y.contains(x) && base.valid_point(x),
            Node::RestrictSubgroup { base, .. } => base.valid_point(x),
            Node::Derived { base, .. } => match x {
                Elt::Pair(a, p) => {
                    base.valid_point(a)
                        && base.group().contains(p)
                        && base.domain_holds(a, p)
                }
                _ => false,
            },
            Node::FactorLift { base, carried, slot, .. } => match (x, slot) {
                (Elt::Pair(a, b), Slot::First) => base.valid_point(a) && carried.contains(b),
                (Elt::Pair(a, b), Slot::Second) => carried.contains(a) && base.valid_point(b),
                _ => false,
            },
            Node::CommutingProduct { left, right, .. } => {
                left.valid_point(x) && right.valid_point(x)
            }
        }
    }

    /// Subgroup the translators are confined to by the tree's subgroup
    /// restrictions (Full when unconstrained).
    pub fn translator_constraint(&self) -> Result<SubgroupHandle> {
        match &*self.node {
            Node::Catalog { .. } => Ok(SubgroupHandle::Full),
            Node::RestrictOpen { base, .. } => base.translator_constraint(),
            Node::RestrictSubgroup { base, h } => {
                subgroup_intersection(self.group(), &base.translator_constraint()?, h)
            }
            Node::Derived { base, .. } => base.translator_constraint(),
            Node::FactorLift { base, .. } => base.translator_constraint(),
            Node::CommutingProduct { left, right, .. } => Ok(SubgroupHandle::product(
                left.translator_constraint()?,
                right.translator_constraint()?,
            )),
        }
    }

    fn check_inputs(&self, x: &Elt, g: &Elt) -> Result<()> {
        if !self.space().contains(x) {
            return Err(Error::NotInModel(format!(
                "{x:?} is not a point of the action's space"
            )));
        }
        if !self.valid_point(x) {
            return Err(Error::NotInModel(format!(
                "{x:?} is outside the action's point universe"
            )));
        }
        if !self.group().contains(g) {
            return Err(Error::NotInModel(format!(
                "{g:?} is not an element of the acting group"
            )));
        }
        Ok(())
    }

    /// Whether (x,g) lies in the domain Γ.
    pub fn in_domain(&self, x: &Elt, g: &Elt) -> Result<bool> {
        self.check_inputs(x, g)?;
        Ok(self.domain_holds(x, g))
    }

    /// x·g when (x,g) ∈ Γ, None otherwise. Absence is a value, not an
    /// error; errors mean x or g is not even eligible.
    pub fn act(&self, x: &Elt, g: &Elt) -> Result<Option<Elt>> {
        self.check_inputs(x, g)?;
        Ok(if self.domain_holds(x, g) {
            Some(self.value(x, g))
        } else {
            None
        })
    }

    // Domain predicate. Inputs are assumed well-typed (x in the universe, g
    // in the group); public wrappers enforce that.
    fn domain_holds(&self, x: &Elt, g: &Elt) -> bool {
        match &*self.node {
            Node::Catalog { kind, .. } => match kind {
                Catalog::RightTranslation | Catalog::Trivial => true,
                Catalog::FiniteTable { table } => match (x, g) {
                    (Elt::Finite(i), Elt::Finite(j)) => table
                        .get(*i)
                        .and_then(|row| row.get(*j))
                        .map_or(false, Option::is_some),
                    _ => false,
                },
            },
            Node::RestrictOpen { base, y } => {
                base.domain_holds(x, g) && y.contains(&base.value(x, g))
            }
            Node::RestrictSubgroup { base, h } => {
                subgroup_contains(self.group(), h, g) && base.domain_holds(x, g)
            }
            Node::Derived { base, kind, .. } => {
                let (a, p) = match x {
                    Elt::Pair(a, p) => (a.as_ref(), p.as_ref()),
                    _ => return false,
                };
                let bg = base.group();
                match kind {
                    DerivedKind::First => {
                        base.domain_holds(a, g) && {
                            let aq = base.value(a, g);
                            let qinv_p = bg
                                .inv(g)
                                .and_then(|qi| bg.op(&qi, p))
                                .expect("group elements validated");
                            base.domain_holds(&aq, &qinv_p)
                        }
                    }
                    DerivedKind::Second => {
                        let pq = bg.op(p, g).expect("group elements validated");
                        base.domain_holds(a, &pq)
                    }
                }
            }
            Node::FactorLift { base, slot, .. } => match (x, slot) {
                (Elt::Pair(a, _), Slot::First) => base.domain_holds(a, g),
                (Elt::Pair(_, b), Slot::Second) => base.domain_holds(b, g),
                _ => false,
            },
            Node::CommutingProduct { left, right, .. } => {
                let (h, k) = match g {
                    Elt::Pair(h, k) => (h.as_ref(), k.as_ref()),
                    _ => return false,
                };
                left.domain_holds(x, h) && right.domain_holds(x, k) && {
                    let xh = left.value(x, h);
                    right.valid_point(&xh) && right.domain_holds(&xh, k)
                }
            }
        }
    }

    // Action value. Callers must have established domain_holds.
    fn value(&self, x: &Elt, g: &Elt) -> Elt {
        match &*self.node {
            Node::Catalog { group, kind, .. } => match kind {
                Catalog::RightTranslation => group.op(x, g).expect("validated inputs"),
                Catalog::Trivial => x.clone(),
                Catalog::FiniteTable { table } => match (x, g) {
                    (Elt::Finite(i), Elt::Finite(j)) => {
                        Elt::Finite(table[*i][*j].expect("domain checked"))
                    }
                    _ => unreachable!("domain checked"),
                },
            },
            Node::RestrictOpen { base, .. } | Node::RestrictSubgroup { base, .. } => {
                base.value(x, g)
            }
            Node::Derived { base, kind, .. } => {
                let (a, p) = match x {
                    Elt::Pair(a, p) => (a.as_ref(), p.as_ref()),
                    _ => unreachable!("domain checked"),
                };
                let bg = base.group();
                match kind {
                    DerivedKind::First => {
                        let aq = base.value(a, g);
                        let qinv_p = bg
                            .inv(g)
                            .and_then(|qi| bg.op(&qi, p))
                            .expect("group elements validated");
                        Elt::pair(aq, qinv_p)
                    }
                    DerivedKind::Second => {
                        Elt::pair(a.clone(), bg.op(p, g).expect("validated"))
                    }
                }
            }
            Node::FactorLift { base, slot, .. } => match (x, slot) {
                (Elt::Pair(a, b), Slot::First) => {
                    Elt::pair(base.value(a, g), b.as_ref().clone())
                }
                (Elt::Pair(a, b), Slot::Second) => {
                    Elt::pair(a.as_ref().clone(), base.value(b, g))
                }
                _ => unreachable!("domain checked"),
            },
            Node::CommutingProduct { left, right, .. } => match g {
                Elt::Pair(h, k) => right.value(&left.value(x, h), k),
                _ => unreachable!("domain checked"),
            },
        }
    }

    /// The two factors of a commuting product, in (left, right) order.
    pub fn commuting_factors(&self) -> Option<(&PartialAction, &PartialAction)> {
        match &*self.node {
            Node::CommutingProduct { left, right, .. } => Some((left, right)),
            _ => None,
        }
    }

    /// Whether this is the unrestricted trivial catalog action.
    pub fn is_total_trivial(&self) -> bool {
        matches!(
            &*self.node,
            Node::Catalog {
                kind: Catalog::Trivial,
                ..
            }
        )
    }

    // The catalog entry the value map delegates to, when every node on the
    // way down is value-preserving (restrictions only).
    fn value_catalog(&self) -> Option<&Catalog> {
        match &*self.node {
            Node::Catalog { kind, .. } => Some(kind),
            Node::RestrictOpen { base, .. } | Node::RestrictSubgroup { base, .. } => {
                base.value_catalog()
            }
            _ => None,
        }
    }

    // Over-approximation of {q : (x,q) ∈ Γ for all x ∈ c0} by finitely many
    // translator cells: None means no finite family exists because the
    // constraint is vacuous (the set is all of G), Some(w) means the set is
    // contained in the union of w. Computing exact V_f descriptions starts
    // from this window; trees whose open-restriction constraint does not
    // reduce to a translation window are reported unsupported (membership
    // queries stay available through domain_status_at).
    pub(crate) fn vf_window(&self, c0: &Cell) -> Result<Option<Vec<Cell>>> {
        match &*self.node {
            Node::Catalog { group, kind, .. } => match kind {
                Catalog::RightTranslation | Catalog::Trivial => Ok(None),
                Catalog::FiniteTable { .. } => Ok(Some(
                    group
                        .as_space()
                        .finite_point_cells()
                        .expect("finite table groups are finite"),
                )),
            },
            Node::RestrictSubgroup { base, h } => match base.vf_window(c0)? {
                Some(w) => Ok(Some(w)),
                None => match h {
                    SubgroupHandle::Full => Ok(None),
                    _ => Ok(Some(subgroup_cells(self.group(), h)?)),
                },
            },
            Node::RestrictOpen { base, y } => match base.value_catalog() {
                // The image is x itself; the constraint is on the support,
                // not the translator.
                Some(Catalog::Trivial) => base.vf_window(c0),
                // c0·q ⊆ Y forces c0·q to meet some cell of Y, and
                // {q : c0·q ∩ D ≠ ∅} = c0⁻¹·D.
                Some(Catalog::RightTranslation) => {
                    let g = self.group();
                    let ci = group_inv_cell(g, c0)?;
                    let mut cells = Vec::new();
                    for d in y.cells() {
                        cells.push(group_op_cell(g, &ci, d)?);
                    }
                    Ok(Some(cells))
                }
                _ => Err(Error::Unsupported(
                    "no finite translator-cell description for this tree; \
                     membership queries remain exact"
                        .into(),
                )),
            },
            Node::Derived { base, kind, .. } => {
                let (ca, cp) = match c0 {
                    Cell::Pair(a, p) => (a.as_ref(), p.as_ref()),
                    _ => {
                        return Err(Error::NotInModel(format!(
                            "cell {c0:?} does not belong to the derived action's space"
                        )))
                    }
                };
                match kind {
                    // (a,q) ∈ Γ is necessary, so the base window over the
                    // point part already bounds the set.
                    DerivedKind::First => base.vf_window(ca),
                    // (a, pq) ∈ Γ puts pq in the base window, so q lands in
                    // cp⁻¹ times it.
                    DerivedKind::Second => match base.vf_window(ca)? {
                        None => Ok(None),
                        Some(w) => {
                            let bg = base.group();
                            let cpi = group_inv_cell(bg, cp)?;
                            let mut cells = Vec::new();
                            for wc in &w {
                                cells.push(group_op_cell(bg, &cpi, wc)?);
                            }
                            Ok(Some(cells))
                        }
                    },
                }
            }
            Node::FactorLift { base, slot, .. } => {
                let (ca, cb) = match c0 {
                    Cell::Pair(a, b) => (a.as_ref(), b.as_ref()),
                    _ => {
                        return Err(Error::NotInModel(format!(
                            "cell {c0:?} does not belong to the lifted action's space"
                        )))
                    }
                };
                match slot {
                    Slot::First => base.vf_window(ca),
                    Slot::Second => base.vf_window(cb),
                }
            }
            Node::CommutingProduct { .. } => Err(Error::Unsupported(
                "no finite translator-cell description for a commuting product \
                 with two nontrivial factors; membership queries remain exact"
                    .into(),
            )),
        }
    }

    /// The involution γ(x,p) = (x·p, p⁻¹) of Γ.
    pub fn gamma_map(&self, x: &Elt, p: &Elt) -> Result<(Elt, Elt)> {
        match self.act(x, p)? {
            Some(xp) => Ok((xp, self.group().inv(p)?)),
            None => Err(Error::OutsideDomain(format!(
                "({x:?}, {p:?}) is not in the domain"
            ))),
        }
    }

    /// Same map under its groupoid name: the inverse arrow of (x,p).
    pub fn groupoid_inverse(&self, x: &Elt, p: &Elt) -> Result<(Elt, Elt)> {
        self.gamma_map(x, p)
    }

    /// Groupoid composition on Γ: (x₁,p₁)(x₂,p₂) = (x₁, p₁p₂) when
    /// x₁·p₁ = x₂, None when the arrows don't meet. Both arguments must lie
    /// in Γ.
    pub fn groupoid_compose(
        &self,
        a: (&Elt, &Elt),
        b: (&Elt, &Elt),
    ) -> Result<Option<(Elt, Elt)>> {
        let not_in = |x: &Elt, p: &Elt| {
            Error::OutsideDomain(format!("({x:?}, {p:?}) is not in the domain"))
        };
        let xa = self.act(a.0, a.1)?.ok_or_else(|| not_in(a.0, a.1))?;
        if !self.in_domain(b.0, b.1)? {
            return Err(not_in(b.0, b.1));
        }
        if &xa != b.0 {
            return Ok(None);
        }
        Ok(Some((a.0.clone(), self.group().op(a.1, b.1)?)))
    }

    /// Exact status of Γ over a product of cells: every pair in, every pair
    /// out, or genuinely both. Pairs whose point falls outside the universe
    /// count as out.
    pub fn domain_status(&self, cx: &Cell, cg: &Cell) -> Result<DomainStatus> {
        if !self.space().admits_cell(cx) {
            return Err(Error::NotInModel(format!(
                "cell {cx:?} does not belong to the action's space"
            )));
        }
        if !self.group().as_space().admits_cell(cg) {
            return Err(Error::NotInModel(format!(
                "cell {cg:?} does not belong to the acting group"
            )));
        }
        self.status_rec(cx, cg, STATUS_DEPTH)
    }

    fn status_rec(&self, cx: &Cell, cg: &Cell, depth: u32) -> Result<DomainStatus> {
        if depth == 0 {
            return Err(Error::Unsupported(
                "domain status did not stabilize under refinement".into(),
            ));
        }
        // Point-sized cells are decided directly; this also grounds the
        // refinement recursion.
        if let (Some(x), Some(g)) = (cell_point(cx), cell_point(cg)) {
            return Ok(
                if self.valid_point(&x) && self.domain_holds(&x, &g) {
                    DomainStatus::In
                } else {
                    DomainStatus::Out
                },
            );
        }
        match &*self.node {
            Node::Catalog { kind, .. } => match kind {
                // Total actions on a universe that is the whole space.
                Catalog::RightTranslation | Catalog::Trivial => Ok(DomainStatus::In),
                Catalog::FiniteTable { .. } => {
                    unreachable!("finite cells are points and were decided above")
                }
            },
            Node::RestrictOpen { base, y } => match y.locate(cx) {
                SetRelation::Disjoint => Ok(DomainStatus::Out),
                SetRelation::Straddles => {
                    self.combine(cx.split().iter().map(|c| (c.clone(), cg.clone())), depth)
                }
                SetRelation::Inside => match base.status_rec(cx, cg, depth - 1)? {
                    DomainStatus::Out => Ok(DomainStatus::Out),
                    DomainStatus::Mixed => self.split_both(cx, cg, depth),
                    DomainStatus::In => match base.image_cell_exact(cx, cg)? {
                        // The image cell is covered onto, so its relation to
                        // Y transfers verbatim.
                        Some(img) => Ok(match y.locate(&img) {
                            SetRelation::Inside => DomainStatus::In,
                            SetRelation::Disjoint => DomainStatus::Out,
                            SetRelation::Straddles => DomainStatus::Mixed,
                        }),
                        None => self.split_both(cx, cg, depth),
                    },
                },
            },
            Node::RestrictSubgroup { base, h } => {
                match cell_subgroup_relation(self.group(), cg, h)? {
                    SetRelation::Disjoint => Ok(DomainStatus::Out),
                    SetRelation::Inside => base.status_rec(cx, cg, depth - 1),
                    SetRelation::Straddles => {
                        self.combine(cg.split().iter().map(|c| (cx.clone(), c.clone())), depth)
                    }
                }
            }
            Node::Derived { base, kind, .. } => {
                let (ca, cp) = match cx {
                    Cell::Pair(a, p) => (a.as_ref(), p.as_ref()),
                    _ => unreachable!("admitted product cell"),
                };
                match base.status_rec(ca, cp, depth - 1)? {
                    DomainStatus::Out => Ok(DomainStatus::Out),
                    DomainStatus::Mixed => {
                        // The point universe itself is split across cx.
                        self.combine(
                            cx.split().iter().map(|c| (c.clone(), cg.clone())),
                            depth,
                        )
                    }
                    DomainStatus::In => {
                        let bg = base.group();
                        match kind {
                            DerivedKind::Second => {
                                // {(a, pq)} covers ca × (cp·cg) in full, so
                                // the base status is exact here.
                                let pq = group_op_cell(bg, cp, cg)?;
                                base.status_rec(ca, &pq, depth - 1)
                            }
                            DerivedKind::First => {
                                match base.status_rec(ca, cg, depth - 1)? {
                                    DomainStatus::Out => Ok(DomainStatus::Out),
                                    DomainStatus::Mixed => self.split_both(cx, cg, depth),
                                    DomainStatus::In => {
                                        let qinv = group_inv_cell(bg, cg)?;
                                        let qp = group_op_cell(bg, &qinv, cp)?;
                                        match base.image_cell_exact(ca, cg)? {
                                            None => self.split_both(cx, cg, depth),
                                            Some(img) => {
                                                // (a·q, q⁻¹p) shares q across
                                                // coordinates, so only a pure
                                                // verdict over img × qp is
                                                // conclusive.
                                                match base.status_rec(&img, &qp, depth - 1)? {
                                                    DomainStatus::In => Ok(DomainStatus::In),
                                                    DomainStatus::Out => Ok(DomainStatus::Out),
                                                    DomainStatus::Mixed => {
                                                        self.split_both(cx, cg, depth)
                                                    }
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Node::FactorLift { base, slot, .. } => {
                let (ca, cb) = match cx {
                    Cell::Pair(a, b) => (a.as_ref(), b.as_ref()),
                    _ => unreachable!("admitted product cell"),
                };
                match slot {
                    Slot::First => base.status_rec(ca, cg, depth - 1),
                    Slot::Second => base.status_rec(cb, cg, depth - 1),
                }
            }
            Node::CommutingProduct { left, right, .. } => {
                let (ch, ck) = match cg {
                    Cell::Pair(h, k) => (h.as_ref(), k.as_ref()),
                    _ => unreachable!("admitted product cell"),
                };
                match left.status_rec(cx, ch, depth - 1)? {
                    DomainStatus::Out => Ok(DomainStatus::Out),
                    DomainStatus::Mixed => self.split_both(cx, cg, depth),
                    DomainStatus::In => match right.status_rec(cx, ck, depth - 1)? {
                        DomainStatus::Out => Ok(DomainStatus::Out),
                        DomainStatus::Mixed => self.split_both(cx, cg, depth),
                        DomainStatus::In => match left.image_cell_exact(cx, ch)? {
                            None => self.split_both(cx, cg, depth),
                            // {(x·h, k)} covers img × ck in full.
                            Some(img) => right.status_rec(&img, ck, depth - 1),
                        },
                    },
                }
            }
        }
    }

    fn split_both(&self, cx: &Cell, cg: &Cell, depth: u32) -> Result<DomainStatus> {
        let xs = cx.split();
        let gs = cg.split();
        let pairs = xs
            .iter()
            .flat_map(|a| gs.iter().map(move |b| (a.clone(), b.clone())))
            .collect::<Vec<_>>();
        self.combine(pairs.into_iter(), depth)
    }

    fn combine(
        &self,
        pieces: impl Iterator<Item = (Cell, Cell)>,
        depth: u32,
    ) -> Result<DomainStatus> {
        let mut saw_in = false;
        let mut saw_out = false;
        for (a, b) in pieces {
            match self.status_rec(&a, &b, depth - 1)? {
                DomainStatus::Mixed => return Ok(DomainStatus::Mixed),
                DomainStatus::In => saw_in = true,
                DomainStatus::Out => saw_out = true,
            }
            if saw_in && saw_out {
                return Ok(DomainStatus::Mixed);
            }
        }
        Ok(match (saw_in, saw_out) {
            (true, false) => DomainStatus::In,
            (false, true) => DomainStatus::Out,
            _ => DomainStatus::Mixed,
        })
    }

    // Exact image of (x,g) ↦ x·g over cx × cg as a single cell, for trees
    // whose value map is a translation in disguise. The returned cell is
    // both exact and covered onto, which status computations rely on.
    // Callers must have established that the whole product is in Γ.
    fn image_cell_exact(&self, cx: &Cell, cg: &Cell) -> Result<Option<Cell>> {
        match &*self.node {
            Node::Catalog { group, kind, .. } => match kind {
                Catalog::RightTranslation => Ok(Some(group_op_cell(group, cx, cg)?)),
                Catalog::Trivial => Ok(Some(cx.clone())),
                Catalog::FiniteTable { .. } => Ok(None),
            },
            Node::RestrictOpen { base, .. } | Node::RestrictSubgroup { base, .. } => {
                base.image_cell_exact(cx, cg)
            }
            Node::Derived { base, kind, .. } => {
                let (ca, cp) = match cx {
                    Cell::Pair(a, p) => (a.as_ref(), p.as_ref()),
                    _ => return Ok(None),
                };
                match kind {
                    // (a, pq) ranges over all of ca × (cp·cg).
                    DerivedKind::Second => Ok(Some(Cell::pair(
                        ca.clone(),
                        group_op_cell(base.group(), cp, cg)?,
                    ))),
                    // (a·q, q⁻¹p) does not cover its bounding product (q is
                    // shared), so no exact cell is available.
                    DerivedKind::First => Ok(None),
                }
            }
            Node::FactorLift { base, slot, .. } => {
                let (ca, cb) = match cx {
                    Cell::Pair(a, b) => (a.as_ref(), b.as_ref()),
                    _ => return Ok(None),
                };
                Ok(match slot {
                    Slot::First => base
                        .image_cell_exact(ca, cg)?
                        .map(|img| Cell::pair(img, cb.clone())),
                    Slot::Second => base
                        .image_cell_exact(cb, cg)?
                        .map(|img| Cell::pair(ca.clone(), img)),
                })
            }
            Node::CommutingProduct { left, right, .. } => {
                let (ch, ck) = match cg {
                    Cell::Pair(h, k) => (h.as_ref(), k.as_ref()),
                    _ => return Ok(None),
                };
                match left.image_cell_exact(cx, ch)? {
                    None => Ok(None),
                    Some(mid) => right.image_cell_exact(&mid, ck),
                }
            }
        }
    }

    /// Same trichotomy for a single translator over a cell of points:
    /// whether [x in the universe and (x,g) ∈ Γ] holds for all, no, or
    /// some x in cx. Unlike `domain_status` this is exact on every tree,
    /// since a fixed translator turns all value maps into bijections of
    /// cells.
    pub fn domain_status_at(&self, cx: &Cell, g: &Elt) -> Result<DomainStatus> {
        if !self.space().admits_cell(cx) {
            return Err(Error::NotInModel(format!(
                "cell {cx:?} does not belong to the action's space"
            )));
        }
        if !self.group().contains(g) {
            return Err(Error::NotInModel(format!(
                "{g:?} is not an element of the acting group"
            )));
        }
        self.status_at_rec(cx, g, STATUS_DEPTH)
    }

    fn status_at_rec(&self, cx: &Cell, g: &Elt, depth: u32) -> Result<DomainStatus> {
        if depth == 0 {
            return Err(Error::Unsupported(
                "domain status did not stabilize under refinement".into(),
            ));
        }
        if let Some(x) = cell_point(cx) {
            return Ok(if self.valid_point(&x) && self.domain_holds(&x, g) {
                DomainStatus::In
            } else {
                DomainStatus::Out
            });
        }
        match &*self.node {
            Node::Catalog { kind, .. } => match kind {
                Catalog::RightTranslation | Catalog::Trivial => Ok(DomainStatus::In),
                Catalog::FiniteTable { .. } => {
                    unreachable!("finite cells are points and were decided above")
                }
            },
            Node::RestrictOpen { base, y } => match y.locate(cx) {
                SetRelation::Disjoint => Ok(DomainStatus::Out),
                SetRelation::Straddles => self.combine_at(cx.split(), g, depth),
                SetRelation::Inside => match base.status_at_rec(cx, g, depth - 1)? {
                    DomainStatus::Out => Ok(DomainStatus::Out),
                    DomainStatus::Mixed => self.combine_at(cx.split(), g, depth),
                    DomainStatus::In => {
                        let img = base.image_cell_fixed(cx, g)?;
                        Ok(match y.locate(&img) {
                            SetRelation::Inside => DomainStatus::In,
                            SetRelation::Disjoint => DomainStatus::Out,
                            SetRelation::Straddles => DomainStatus::Mixed,
                        })
                    }
                },
            },
            Node::RestrictSubgroup { base, h } => {
                if subgroup_contains(self.group(), h, g) {
                    base.status_at_rec(cx, g, depth - 1)
                } else {
                    Ok(DomainStatus::Out)
                }
            }
            Node::Derived { base, kind, .. } => {
                let (ca, cp) = match cx {
                    Cell::Pair(a, p) => (a.as_ref(), p.as_ref()),
                    _ => unreachable!("admitted product cell"),
                };
                match base.status_rec(ca, cp, depth - 1)? {
                    DomainStatus::Out => Ok(DomainStatus::Out),
                    DomainStatus::Mixed => self.combine_at(cx.split(), g, depth),
                    DomainStatus::In => {
                        let bg = base.group();
                        match kind {
                            DerivedKind::Second => {
                                let pg = translate_cell_elt(bg, cp, g, Side::Right)?;
                                base.status_rec(ca, &pg, depth - 1)
                            }
                            DerivedKind::First => {
                                match base.status_at_rec(ca, g, depth - 1)? {
                                    DomainStatus::Out => Ok(DomainStatus::Out),
                                    DomainStatus::Mixed => {
                                        self.combine_at(cx.split(), g, depth)
                                    }
                                    DomainStatus::In => {
                                        // (a,p) ↦ (a·g, g⁻¹p) is a bijection
                                        // of ca × cp onto img × g⁻¹cp, so the
                                        // base status over that product is
                                        // the answer.
                                        let img = base.image_cell_fixed(ca, g)?;
                                        let gicp = translate_cell_elt(
                                            bg,
                                            cp,
                                            &bg.inv(g)?,
                                            Side::Left,
                                        )?;
                                        base.status_rec(&img, &gicp, depth - 1)
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Node::FactorLift { base, slot, .. } => {
                let (ca, cb) = match cx {
                    Cell::Pair(a, b) => (a.as_ref(), b.as_ref()),
                    _ => unreachable!("admitted product cell"),
                };
                match slot {
                    Slot::First => base.status_at_rec(ca, g, depth - 1),
                    Slot::Second => base.status_at_rec(cb, g, depth - 1),
                }
            }
            Node::CommutingProduct { left, right, .. } => {
                let (h, k) = match g {
                    Elt::Pair(h, k) => (h.as_ref(), k.as_ref()),
                    _ => unreachable!("validated product element"),
                };
                match left.status_at_rec(cx, h, depth - 1)? {
                    DomainStatus::Out => Ok(DomainStatus::Out),
                    DomainStatus::Mixed => self.combine_at(cx.split(), g, depth),
                    DomainStatus::In => match right.status_at_rec(cx, k, depth - 1)? {
                        DomainStatus::Out => Ok(DomainStatus::Out),
                        DomainStatus::Mixed => self.combine_at(cx.split(), g, depth),
                        DomainStatus::In => {
                            let img = left.image_cell_fixed(cx, h)?;
                            right.status_at_rec(&img, k, depth - 1)
                        }
                    },
                }
            }
        }
    }

    fn combine_at(&self, pieces: Vec<Cell>, g: &Elt, depth: u32) -> Result<DomainStatus> {
        let mut saw_in = false;
        let mut saw_out = false;
        for c in &pieces {
            match self.status_at_rec(c, g, depth - 1)? {
                DomainStatus::Mixed => return Ok(DomainStatus::Mixed),
                DomainStatus::In => saw_in = true,
                DomainStatus::Out => saw_out = true,
            }
            if saw_in && saw_out {
                return Ok(DomainStatus::Mixed);
            }
        }
        Ok(match (saw_in, saw_out) {
            (true, false) => DomainStatus::In,
            (false, true) => DomainStatus::Out,
            _ => DomainStatus::Mixed,
        })
    }

    // Exact image of cx under ·g, valid once status_at has established that
    // cx × {g} lies in Γ. Always a single cell mapped onto bijectively.
    fn image_cell_fixed(&self, cx: &Cell, g: &Elt) -> Result<Cell> {
        match &*self.node {
            Node::Catalog { group, kind, .. } => match kind {
                Catalog::RightTranslation => translate_cell_elt(group, cx, g, Side::Right),
                Catalog::Trivial => Ok(cx.clone()),
                Catalog::FiniteTable { .. } => {
                    let x = cell_point(cx).expect("finite cells are points");
                    Ok(match self.value(&x, g) {
                        Elt::Finite(i) => Cell::FinitePoint(i),
                        _ => unreachable!("finite table values"),
                    })
                }
            },
            Node::RestrictOpen { base, .. } | Node::RestrictSubgroup { base, .. } => {
                base.image_cell_fixed(cx, g)
            }
            Node::Derived { base, kind, .. } => {
                let (ca, cp) = match cx {
                    Cell::Pair(a, p) => (a.as_ref(), p.as_ref()),
                    _ => unreachable!("admitted product cell"),
                };
                let bg = base.group();
                Ok(match kind {
                    DerivedKind::Second => Cell::pair(
                        ca.clone(),
                        translate_cell_elt(bg, cp, g, Side::Right)?,
                    ),
                    DerivedKind::First => Cell::pair(
                        base.image_cell_fixed(ca, g)?,
                        translate_cell_elt(bg, cp, &bg.inv(g)?, Side::Left)?,
                    ),
                })
            }
            Node::FactorLift { base, slot, .. } => {
                let (ca, cb) = match cx {
                    Cell::Pair(a, b) => (a.as_ref(), b.as_ref()),
                    _ => unreachable!("admitted product cell"),
                };
                Ok(match slot {
                    Slot::First => Cell::pair(base.image_cell_fixed(ca, g)?, cb.clone()),
                    Slot::Second => Cell::pair(ca.clone(), base.image_cell_fixed(cb, g)?),
                })
            }
            Node::CommutingProduct { left, right, .. } => {
                let (h, k) = match g {
                    Elt::Pair(h, k) => (h.as_ref(), k.as_ref()),
                    _ => unreachable!("validated product element"),
                };
                right.image_cell_fixed(&left.image_cell_fixed(cx, h)?, k)
            }
        }
    }

    /// Image of a cell under ·g as a cell, for (cx, g) entirely inside Γ.
    /// The map is a bijection onto the returned cell.
    pub fn image_cell(&self, cx: &Cell, g: &Elt) -> Result<Cell> {
        match self.domain_status_at(cx, g)? {
            DomainStatus::In => self.image_cell_fixed(cx, g),
            _ => Err(Error::OutsideDomain(format!(
                "cell {cx:?} is not entirely inside the domain at {g:?}"
            ))),
        }
    }

    /// Axiom check over a probe set: the identity law on every probed
    /// point, and for probed (x,p,q) with (x,p) ∈ Γ, the exchange law
    /// (x,pq) ∈ Γ ⟺ (x·p, q) ∈ Γ together with x·(pq) = (x·p)·q.
    /// Ill-typed probes are skipped.
    pub fn check_axioms(&self, probes: &ProbeSet) -> AxiomReport {
        let mut report = AxiomReport {
            points_checked: 0,
            triples_checked: 0,
            violations: Vec::new(),
        };
        let e = self.group().identity();
        let translators: Vec<&Elt> = probes
            .translators
            .iter()
            .filter(|g| self.group().contains(g))
            .collect();
        for x in &probes.points {
            if !self.space().contains(x) || !self.valid_point(x) {
                continue;
            }
            report.points_checked += 1;
            if !self.domain_holds(x, &e) {
                report.violations.push(AxiomViolation::IdentityOutsideDomain {
                    x: x.clone(),
                });
            } else {
                let xe = self.value(x, &e);
                if &xe != x {
                    report
                        .violations
                        .push(AxiomViolation::IdentityMoves { x: x.clone(), image: xe });
                }
            }
            for p in &translators {
                if !self.domain_holds(x, p) {
                    continue;
                }
                let xp = self.value(x, p);
                for q in &translators {
                    report.triples_checked += 1;
                    let pq = self.group().op(p, q).expect("validated");
                    let joined = self.domain_holds(x, &pq);
                    let stepped = self.valid_point(&xp) && self.domain_holds(&xp, q);
                    if joined != stepped {
                        report.violations.push(AxiomViolation::IffBroken {
                            x: x.clone(),
                            p: (*p).clone(),
                            q: (*q).clone(),
                            joined,
                            stepped,
                        });
                        continue;
                    }
                    if joined {
                        let a = self.value(x, &pq);
                        let b = self.value(&xp, q);
                        if a != b {
                            report.violations.push(AxiomViolation::CompositionMismatch {
                                x: x.clone(),
                                p: (*p).clone(),
                                q: (*q).clone(),
                                joined: a,
                                stepped: b,
                            });
                        }
                    }
                }
            }
        }
        report
    }

    /// Properness of the action map (x,p) ↦ (x, x·p). A finite universe
    /// with a finite group makes every subset compact, so those instances
    /// are decided outright; global translations are proper; restrictions
    /// inherit properness; translator restriction to a compact subgroup
    /// forces it (the preimage of a compact set is a clopen subset of a
    /// compact one). Everything else is reported unknown rather than
    /// guessed.
    pub fn is_proper(&self) -> Properness {
        if self.space().finite_point_cells().is_some()
            && self.group().as_space().finite_point_cells().is_some()
        {
            return Properness::Proper;
        }
        match &*self.node {
            Node::Catalog { space, group, kind } => match kind {
                Catalog::RightTranslation => Properness::Proper,
                Catalog::FiniteTable { .. } => Properness::Proper,
                Catalog::Trivial => {
                    if group.is_compact() {
                        Properness::Proper
                    } else {
                        match sample_space_point(space) {
                            // Every translator fixes x, so the preimage of
                            // the single point (x,x) is {x} × G.
                            Some(x) => Properness::NotProper { witness: x },
                            None => Properness::Proper,
                        }
                    }
                }
            },
            Node::RestrictOpen { base, .. } => match base.is_proper() {
                Properness::Proper => Properness::Proper,
                _ => Properness::Unknown,
            },
            Node::RestrictSubgroup { base, h } => {
                if subgroup_is_compact(self.group(), h) {
                    Properness::Proper
                } else {
                    match base.is_proper() {
                        Properness::Proper => Properness::Proper,
                        _ => Properness::Unknown,
                    }
                }
            }
            _ => Properness::Unknown,
        }
    }

    /// A chart witnessing that p ↦ x·p is injective and open near the
    /// identity: a compact open subgroup V (Full for a global translation)
    /// with x·V inside the universe. Produced for translations and their
    /// restrictions; None elsewhere, or when x lies outside the universe.
    pub fn locally_homeomorphic_witness(&self, x: &Elt) -> Result<Option<LocalHomeoWitness>> {
        if !self.space().contains(x) {
            return Err(Error::NotInModel(format!(
                "{x:?} is not a point of the action's space"
            )));
        }
        if !self.valid_point(x) {
            return Ok(None);
        }
        let v = match self.witness_subgroup(x)? {
            Some(v) => v,
            None => return Ok(None),
        };
        Ok(Some(LocalHomeoWitness { x: x.clone(), v }))
    }

    fn witness_subgroup(&self, x: &Elt) -> Result<Option<SubgroupHandle>> {
        match &*self.node {
            Node::Catalog { kind, .. } => Ok(match kind {
                Catalog::RightTranslation => Some(SubgroupHandle::Full),
                _ => None,
            }),
            Node::RestrictOpen { base, y } => {
                let inner = match base.witness_subgroup(x)? {
                    Some(v) => v,
                    None => return Ok(None),
                };
                // Shrink to {v : x·v ∈ C} for the Y-cell C around x; for a
                // translation that preimage is the cell x⁻¹C, a ball around
                // the identity, hence a subgroup handle.
                let g = self.group();
                let c = y
                    .cells()
                    .iter()
                    .find(|c| c.contains_point(x))
                    .expect("valid points sit in some cell of Y");
                let preimage = translate_cell_elt(g, c, &g.inv(x)?, Side::Left)?;
                let shrink = cell_as_identity_subgroup(g, &preimage)?;
                Ok(Some(subgroup_intersection(g, &inner, &shrink)?))
            }
            Node::RestrictSubgroup { base, h } => {
                let inner = match base.witness_subgroup(x)? {
                    Some(v) => v,
                    None => return Ok(None),
                };
                if !subgroup_is_open(self.group(), h) {
                    return Ok(None);
                }
                Ok(Some(subgroup_intersection(self.group(), &inner, h)?))
            }
            _ => Ok(None),
        }
    }

    /// The inverse chart map: the unique p ∈ V with x·p = y. Errors when y
    /// is not in the chart's image x·V.
    pub fn local_inverse(&self, w: &LocalHomeoWitness, y: &Elt) -> Result<Elt> {
        let g = self.group();
        let p = g.op(&g.inv(&w.x)?, y)?;
        if !subgroup_contains(g, &w.v, &p) {
            return Err(Error::OutsideDomain(format!(
                "{y:?} is outside the chart image"
            )));
        }
        match self.act(&w.x, &p)? {
            Some(img) if &img == y => Ok(p),
            _ => Err(Error::OutsideDomain(format!(
                "{y:?} is outside the chart image"
            ))),
        }
    }
}

const STATUS_DEPTH: u32 = 64;

/// Verdict of `domain_status` over a product of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainStatus {
    In,
    Out,
    Mixed,
}

/// Points and translators to verify laws on. For p-adic instances the
/// caller picks cell representatives at a working level; locally constant
/// structure makes such probing exact rather than sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSet {
    pub points: Vec<Elt>,
    pub translators: Vec<Elt>,
}

impl ProbeSet {
    /// Every universe point and every group element, when both are finite.
    pub fn exhaustive(a: &PartialAction) -> Option<ProbeSet> {
        let points = a
            .space()
            .finite_point_cells()?
            .iter()
            .map(cell_sample_point)
            .filter(|x| a.valid_point(x))
            .collect();
        let translators = a
            .group()
            .as_space()
            .finite_point_cells()?
            .iter()
            .map(cell_sample_point)
            .collect();
        Some(ProbeSet {
            points,
            translators,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxiomViolation {
    /// (x, e) must always be in the domain.
    IdentityOutsideDomain { x: Elt },
    /// x·e must be x.
    IdentityMoves { x: Elt, image: Elt },
    /// With (x,p) ∈ Γ: (x,pq) ∈ Γ and (x·p, q) ∈ Γ must agree.
    IffBroken {
        x: Elt,
        p: Elt,
        q: Elt,
        joined: bool,
        stepped: bool,
    },
    /// Both sides defined but x·(pq) ≠ (x·p)·q.
    CompositionMismatch {
        x: Elt,
        p: Elt,
        q: Elt,
        joined: Elt,
        stepped: Elt,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub points_checked: usize,
    pub triples_checked: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Properness {
    Proper,
    /// The preimage of the single point (witness, witness) under
    /// (x,p) ↦ (x, x·p) already fails to be compact.
    NotProper { witness: Elt },
    Unknown,
}

/// Chart data for `locally_homeomorphic_witness`: p ↦ x·p restricted to V
/// is a homeomorphism onto x·V, inverted by `local_inverse`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalHomeoWitness {
    pub x: Elt,
    pub v: SubgroupHandle,
}

fn sample_space_point(s: &SpaceModel) -> Option<Elt> {
    match s {
        SpaceModel::FinitePoints { labels } => {
            (!labels.is_empty()).then(|| Elt::Finite(0))
        }
        SpaceModel::PAdicLine { .. } => Some(Elt::PAdic(Rational::from_integer(0.into()))),
        SpaceModel::AffineSpace { .. } => Some(Elt::Affine {
            k: 0,
            b: Rational::from_integer(0.into()),
        }),
        SpaceModel::Product { left, right } => Some(Elt::pair(
            sample_space_point(left)?,
            sample_space_point(right)?,
        )),
    }
}

use crate::scalar::Rational;

// Serde mirror: a descriptor names its constructor tree with one key per
// node, e.g. {"restrict_open": {"base": {"catalog": {...}}, "y": {...}}}.
// Deserialization rebuilds through the constructors (shape validation), but
// skips the commuting probe check; descriptors carry no probe budget, so
// lawfulness of a deserialized tree is established by check_axioms.

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ActionRepr {
    Catalog(CatalogRepr),
    RestrictOpen {
        base: Box<ActionRepr>,
        y: OpenSet,
    },
    RestrictSubgroup {
        base: Box<ActionRepr>,
        h: SubgroupHandle,
    },
    DerivedFirst {
        base: Box<ActionRepr>,
    },
    DerivedSecond {
        base: Box<ActionRepr>,
    },
    FirstFactor {
        base: Box<ActionRepr>,
        carried: SpaceModel,
    },
    SecondFactor {
        base: Box<ActionRepr>,
        carried: SpaceModel,
    },
    CommutingProduct {
        left: Box<ActionRepr>,
        right: Box<ActionRepr>,
    },
}

#[derive(Serialize, Deserialize)]
struct CatalogRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    space: Option<SpaceModel>,
    group: GroupModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<Vec<Option<usize>>>>,
}

impl From<PartialAction> for ActionRepr {
    fn from(a: PartialAction) -> ActionRepr {
        let sub = |b: &PartialAction| Box::new(b.clone().into());
        match &*a.node {
            Node::Catalog { space, group, kind } => ActionRepr::Catalog(match kind {
                Catalog::RightTranslation => CatalogRepr {
                    kind: "right_translation".into(),
                    space: None,
                    group: group.clone(),
                    table: None,
                },
                Catalog::Trivial => CatalogRepr {
                    kind: "trivial".into(),
                    space: Some(space.clone()),
                    group: group.clone(),
                    table: None,
                },
                Catalog::FiniteTable { table } => CatalogRepr {
                    kind: if table.iter().flatten().all(Option::is_some) {
                        "finite_permutation".into()
                    } else {
                        "finite_partial".into()
                    },
                    space: Some(space.clone()),
                    group: group.clone(),
                    table: Some(table.clone()),
                },
            }),
            Node::RestrictOpen { base, y } => ActionRepr::RestrictOpen {
                base: sub(base),
                y: y.clone(),
            },
            Node::RestrictSubgroup { base, h } => ActionRepr::RestrictSubgroup {
                base: sub(base),
                h: h.clone(),
            },
            Node::Derived { base, kind, .. } => match kind {
                DerivedKind::First => ActionRepr::DerivedFirst { base: sub(base) },
                DerivedKind::Second => ActionRepr::DerivedSecond { base: sub(base) },
            },
            Node::FactorLift {
                base,
                carried,
                slot,
                ..
            } => match slot {
                Slot::First => ActionRepr::FirstFactor {
                    base: sub(base),
                    carried: carried.clone(),
                },
                Slot::Second => ActionRepr::SecondFactor {
                    base: sub(base),
                    carried: carried.clone(),
                },
            },
            Node::CommutingProduct { left, right, .. } => ActionRepr::CommutingProduct {
                left: sub(left),
                right: sub(right),
            },
        }
    }
}

impl TryFrom<ActionRepr> for PartialAction {
    type Error = Error;

    fn try_from(r: ActionRepr) -> Result<PartialAction> {
        Ok(match r {
            ActionRepr::Catalog(CatalogRepr {
                kind,
                space,
                group,
                table,
            }) => match kind.as_str() {
                "right_translation" => PartialAction::right_translation(group),
                "left_translation_as_right_op" => PartialAction::left_translation(group),
                "trivial" => {
                    let space = space.ok_or_else(|| {
                        Error::Malformed("trivial catalog entry needs a space".into())
                    })?;
                    PartialAction::trivial(space, group)
                }
                "finite_permutation" | "finite_partial" => {
                    let space = space.ok_or_else(|| {
                        Error::Malformed(format!("{kind} needs a space"))
                    })?;
                    let table = table.ok_or_else(|| {
                        Error::Malformed(format!("{kind} needs a table"))
                    })?;
                    PartialAction::finite_table(space, group, table)?
                }
                other => {
                    return Err(Error::Malformed(format!(
                        "unknown catalog action {other:?}"
                    )))
                }
            },
            ActionRepr::RestrictOpen { base, y } => {
                let base: PartialAction = (*base).try_into()?;
                base.restrict_to_open(y)?
            }
            ActionRepr::RestrictSubgroup { base, h } => {
                let base: PartialAction = (*base).try_into()?;
                base.restrict_to_subgroup(h)?
            }
            ActionRepr::DerivedFirst { base } => {
                let base: PartialAction = (*base).try_into()?;
                base.derived_first()
            }
            ActionRepr::DerivedSecond { base } => {
                let base: PartialAction = (*base).try_into()?;
                base.derived_second()
            }
            ActionRepr::FirstFactor { base, carried } => {
                let base: PartialAction = (*base).try_into()?;
                base.first_factor(carried)
            }
            ActionRepr::SecondFactor { base, carried } => {
                let base: PartialAction = (*base).try_into()?;
                PartialAction::second_factor(carried, &base)
            }
            ActionRepr::CommutingProduct { left, right } => {
                PartialAction::commuting_product_unchecked(
                    (*left).try_into()?,
                    (*right).try_into()?,
                )?
            }
        })
    }
}
