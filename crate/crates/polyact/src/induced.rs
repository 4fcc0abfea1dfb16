//! The induced action of translators on functions: the neighborhood V_f on
//! which g·f is defined, the action (g·f)(x) = f(x·g) itself, the
//! composition law relating V_{p·f} to V_f, and the two-sided variant over
//! commuting pairs.
//!
//! V_f = {p : (x, p⁻¹) ∈ Γ for all x ∈ supp f} is clopen whenever Γ is, so
//! it has an exact finite description by translator cells (or it is all of
//! G). Membership queries are exact on every constructor tree; the full
//! description is materialized where a finite translator window exists and
//! reported unsupported otherwise.

use serde::{Deserialize, Serialize};

use crate::action::{DomainStatus, PartialAction};
use crate::func::Func;
use crate::group::{group_inv_cell, GroupModel};
use crate::space::{cell_point, Cell, Elt, OpenSet};
use crate::{Error, Result};

/// Exact description of V_f over the group's cell structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VfSet {
    group: GroupModel,
    description: VfDescription,
}

/// All of G, a finite union of translator cells, or a factorwise
/// description over a product group with an unconstrained factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VfDescription {
    All,
    Cells(OpenSet),
    Pair(Box<VfDescription>, Box<VfDescription>),
}

impl VfSet {
    pub fn group(&self) -> &GroupModel {
        &self.group
    }

    pub fn description(&self) -> &VfDescription {
        &self.description
    }

    pub fn is_all(&self) -> bool {
        matches!(self.description, VfDescription::All)
    }

    pub fn contains(&self, p: &Elt) -> bool {
        self.group.contains(p) && descr_contains(&self.description, p)
    }
}

fn descr_contains(d: &VfDescription, p: &Elt) -> bool {
    match d {
        VfDescription::All => true,
        VfDescription::Cells(o) => o.contains(p),
        VfDescription::Pair(l, r) => match p {
            Elt::Pair(a, b) => descr_contains(l, a) && descr_contains(r, b),
            _ => false,
        },
    }
}

fn check_space(a: &PartialAction, f: &Func) -> Result<()> {
    if f.space() != a.space() {
        return Err(Error::NotInModel(
            "the function does not live on the action's space".into(),
        ));
    }
    Ok(())
}

/// Whether p ∈ V_f, exactly: (x, p⁻¹) ∈ Γ for every x in the support.
pub fn vf_contains(a: &PartialAction, f: &Func, p: &Elt) -> Result<bool> {
    check_space(a, f)?;
    if !a.group().contains(p) {
        return Err(Error::NotInModel(format!(
            "{p:?} is not an element of the acting group"
        )));
    }
    let pinv = a.group().inv(p)?;
    for (cell, _) in f.terms() {
        if a.domain_status_at(cell, &pinv)? != DomainStatus::In {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact description of V_f. The support must lie inside the action's point
/// universe; otherwise the identity would already be missing from V_f and
/// the set is not a neighborhood of e at all.
pub fn compute_vf(a: &PartialAction, f: &Func) -> Result<VfSet> {
    check_space(a, f)?;
    let group = a.group().clone();
    let all = VfSet {
        group: group.clone(),
        description: VfDescription::All,
    };
    if f.is_zero() {
        return Ok(all);
    }
    let e = group.identity();
    for (cell, _) in f.terms() {
        if a.domain_status_at(cell, &e)? != DomainStatus::In {
            return Err(Error::NotInModel(format!(
                "support cell {cell:?} is not inside the action's point universe"
            )));
        }
    }
    // Finite translator sets are enumerated outright.
    if let Some(points) = group.as_space().finite_point_cells() {
        let mut cells = Vec::new();
        for c in points {
            let p = cell_point(&c).expect("finite group cells are points");
            if vf_contains(a, f, &p)? {
                cells.push(c);
            }
        }
        return Ok(VfSet {
            group,
            description: VfDescription::Cells(OpenSet::from_cells(cells)?),
        });
    }
    // A trivial factor of a commuting product is unconstrained; the other
    // factor carries the whole condition.
    if let Some((left, right)) = a.commuting_factors() {
        if left.is_total_trivial() {
            let inner = compute_vf(right, f)?;
            return Ok(VfSet {
                group,
                description: VfDescription::Pair(
                    Box::new(VfDescription::All),
                    Box::new(inner.description),
                ),
            });
        }
        if right.is_total_trivial() {
            let inner = compute_vf(left, f)?;
            return Ok(VfSet {
                group,
                description: VfDescription::Pair(
                    Box::new(inner.description),
                    Box::new(VfDescription::All),
                ),
            });
        }
    }
    let supp: Vec<&Cell> = f.terms().iter().map(|(c, _)| c).collect();
    let window = match a.vf_window(supp[0])? {
        None => return Ok(all),
        Some(w) => OpenSet::from_cells(w)?,
    };
    // Classify the window cells in inverse space (q = p⁻¹), then invert the
    // cells found inside.
    let mut q_cells = Vec::new();
    for b in window.cells() {
        collect_in_cells(a, &supp, b, CLASSIFY_DEPTH, &mut q_cells)?;
    }
    let mut cells = Vec::new();
    for qc in q_cells {
        cells.push(group_inv_cell(&group, &qc)?);
    }
    Ok(VfSet {
        group,
        description: VfDescription::Cells(OpenSet::from_cells(cells)?),
    })
}

const CLASSIFY_DEPTH: u32 = 64;

// Whether (x, q) ∈ Γ for every x in every cell of `supp` and every q ∈ b.
pub(crate) fn forall_translators_in(
    a: &PartialAction,
    supp: &[&Cell],
    b: &Cell,
    depth: u32,
) -> Result<bool> {
    if depth == 0 {
        return Err(Error::Unsupported(
            "translator containment did not stabilize under refinement".into(),
        ));
    }
    let mut mixed = false;
    for c in supp {
        match forall_status(a, c, b, depth)? {
            DomainStatus::In => {}
            DomainStatus::Out => return Ok(false),
            DomainStatus::Mixed => {
                mixed = true;
                break;
            }
        }
    }
    if !mixed {
        return Ok(true);
    }
    if cell_point(b).is_some() {
        return Ok(false);
    }
    for sub in b.split() {
        if !forall_translators_in(a, supp, &sub, depth - 1)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// Pushes the maximal subcells B' ⊆ b with [∀x ∈ supp: (x,q) ∈ Γ] for every
// q ∈ B'.
fn collect_in_cells(
    a: &PartialAction,
    supp: &[&Cell],
    b: &Cell,
    depth: u32,
    out: &mut Vec<Cell>,
) -> Result<()> {
    if depth == 0 {
        return Err(Error::Unsupported(
            "V_f description did not stabilize under refinement".into(),
        ));
    }
    let mut verdict = DomainStatus::In;
    for c in supp {
        match forall_status(a, c, b, depth)? {
            DomainStatus::In => {}
            DomainStatus::Out => {
                verdict = DomainStatus::Out;
                break;
            }
            DomainStatus::Mixed => verdict = DomainStatus::Mixed,
        }
    }
    match verdict {
        DomainStatus::In => out.push(b.clone()),
        DomainStatus::Out => {}
        DomainStatus::Mixed => {
            for sub in b.split() {
                collect_in_cells(a, supp, &sub, depth - 1, out)?;
            }
        }
    }
    Ok(())
}

// Trichotomy of q ∈ b for the statement "(x,q) ∈ Γ for all x ∈ c": In when
// it holds for every q, Out when it fails for every q, Mixed otherwise.
// Refines c (the ∀ distributes over pieces) and falls back to Mixed when
// only a q-split can decide.
fn forall_status(a: &PartialAction, c: &Cell, b: &Cell, depth: u32) -> Result<DomainStatus> {
    if depth == 0 {
        return Err(Error::Unsupported(
            "V_f description did not stabilize under refinement".into(),
        ));
    }
    if let Some(q) = cell_point(b) {
        return Ok(if a.domain_status_at(c, &q)? == DomainStatus::In {
            DomainStatus::In
        } else {
            DomainStatus::Out
        });
    }
    match a.domain_status(c, b)? {
        DomainStatus::In => Ok(DomainStatus::In),
        DomainStatus::Out => Ok(DomainStatus::Out),
        DomainStatus::Mixed => {
            if cell_point(c).is_some() {
                // A single point with a genuinely mixed q-range.
                return Ok(DomainStatus::Mixed);
            }
            let mut saw_mixed = false;
            for piece in c.split() {
                match forall_status(a, &piece, b, depth - 1)? {
                    // Every q already fails on this piece of c.
                    DomainStatus::Out => return Ok(DomainStatus::Out),
                    DomainStatus::In => {}
                    DomainStatus::Mixed => saw_mixed = true,
                }
            }
            Ok(if saw_mixed {
                DomainStatus::Mixed
            } else {
                DomainStatus::In
            })
        }
    }
}

/// The induced function g·f: x ↦ f(x·g) where defined and 0 elsewhere,
/// with support supp(f)·g⁻¹. Defined exactly for g ∈ V_f.
pub fn induced_act(a: &PartialAction, g: &Elt, f: &Func) -> Result<Func> {
    check_space(a, f)?;
    if !a.group().contains(g) {
        return Err(Error::NotInModel(format!(
            "{g:?} is not an element of the acting group"
        )));
    }
    let ginv = a.group().inv(g)?;
    let mut terms = Vec::with_capacity(f.terms().len());
    for (cell, value) in f.terms() {
        if a.domain_status_at(cell, &ginv)? != DomainStatus::In {
            return Err(Error::OutsideDomain(format!(
                "{g:?} is outside V_f: support cell {cell:?} does not move by {ginv:?}"
            )));
        }
        terms.push((a.image_cell(cell, &ginv)?, value.clone()));
    }
    Func::from_terms(f.space().clone(), terms)
}

/// Outcome of checking the composition law on one triple: with p ∈ V_f, whether
/// q ∈ V_{p·f}, whether qp ∈ V_f, and whether (qp)·f = q·(p·f) when both
/// sides exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub q_in_v_pf: bool,
    pub qp_in_vf: bool,
    pub functions_equal: Option<bool>,
}

impl CompositionReport {
    pub fn holds(&self) -> bool {
        self.q_in_v_pf == self.qp_in_vf && self.functions_equal.unwrap_or(true)
    }
}

/// Verifies the composition law at (f, p, q): q ∈ V_{p·f} ⟺ qp ∈ V_f, and
/// the two ways of acting agree when defined. Requires p ∈ V_f.
pub fn composition_law_check(
    a: &PartialAction,
    f: &Func,
    p: &Elt,
    q: &Elt,
) -> Result<CompositionReport> {
    if !vf_contains(a, f, p)? {
        return Err(Error::OutsideDomain(format!("{p:?} is outside V_f")));
    }
    let pf = induced_act(a, p, f)?;
    let q_in_v_pf = vf_contains(a, &pf, q)?;
    let qp = a.group().op(q, p)?;
    let qp_in_vf = vf_contains(a, f, &qp)?;
    let functions_equal = if q_in_v_pf && qp_in_vf {
        Some(induced_act(a, &qp, f)? == induced_act(a, q, &pf)?)
    } else {
        None
    };
    Ok(CompositionReport {
        q_in_v_pf,
        qp_in_vf,
        functions_equal,
    })
}

/// The two-sided action k·f·h, x ↦ f(h·x·k), realized as the induced action
/// of the pair (h,k) under a commuting-product tree.
pub fn two_sided_act(a: &PartialAction, h: &Elt, k: &Elt, f: &Func) -> Result<Func> {
    if a.commuting_factors().is_none() {
        return Err(Error::Unsupported(
            "two-sided action needs a commuting-product tree".into(),
        ));
    }
    induced_act(a, &Elt::pair(h.clone(), k.clone()), f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ProbeSet;
    use crate::group::FiniteGroup;
    use crate::scalar::{rat, rat_int, Cyclotomic};
    use crate::space::SpaceModel;

    fn q3() -> GroupModel {
        GroupModel::PAdicAdditive { p: 3 }
    }

    fn padic(n: i64) -> Elt {
        Elt::PAdic(rat_int(n))
    }

    fn units_y() -> OpenSet {
        OpenSet::from_cells(vec![
            Cell::ball(3, &rat_int(1), 1),
            Cell::ball(3, &rat_int(2), 1),
        ])
        .unwrap()
    }

    fn translation_on_units() -> PartialAction {
        PartialAction::right_translation(q3())
            .restrict_to_open(units_y())
            .unwrap()
    }

    fn one_plus_3z3() -> Func {
        Func::indicator_cell(
            SpaceModel::PAdicLine { p: 3 },
            Cell::ball(3, &rat_int(1), 1),
        )
        .unwrap()
    }

    // Residue brute force at level 1: t + 3Z₃ ⊆ V_f iff 1 + t stays a unit,
    // i.e. (1 - t) mod 3 ≠ 0 in the additive convention (x, p⁻¹) ∈ Γ.
    fn residue_oracle_vf() -> Vec<i64> {
        (0i64..3).filter(|t| (1 - t).rem_euclid(3) != 0).collect()
    }

    #[test]
    fn vf_on_restricted_translation_matches_residue_oracle() {
        let a = translation_on_units();
        let f = one_plus_3z3();
        let vf = compute_vf(&a, &f).unwrap();
        let expected: Vec<Cell> = residue_oracle_vf()
            .into_iter()
            .map(|t| Cell::ball(3, &rat_int(t), 1))
            .collect();
        assert_eq!(residue_oracle_vf(), vec![0, 2]);
        assert_eq!(
            vf.description(),
            &VfDescription::Cells(OpenSet::from_cells(expected).unwrap())
        );
        // Membership agrees with the description on scattered elements.
        for (p, inside) in [
            (padic(0), true),
            (padic(3), true),
            (padic(2), true),
            (padic(5), true),
            (padic(-1), true),
            (padic(1), false),
            (padic(4), false),
        ] {
            assert_eq!(vf.contains(&p), inside, "description at {p:?}");
            assert_eq!(vf_contains(&a, &f, &p).unwrap(), inside, "query at {p:?}");
        }
        assert!(!vf.contains(&Elt::PAdic(rat(1, 3))));
        assert!(!vf_contains(&a, &f, &Elt::PAdic(rat(1, 3))).unwrap());
    }

    #[test]
    fn vf_global_and_empty_are_all() {
        let a = PartialAction::right_translation(q3());
        let f = Func::indicator_cell(
            SpaceModel::PAdicLine { p: 3 },
            Cell::ball(3, &rat_int(0), 0),
        )
        .unwrap();
        assert!(compute_vf(&a, &f).unwrap().is_all());
        let zero = Func::zero(SpaceModel::PAdicLine { p: 3 });
        let vf = compute_vf(&translation_on_units(), &zero).unwrap();
        assert!(vf.is_all());
        assert!(vf.contains(&Elt::PAdic(rat(1, 27))));
    }

    #[test]
    fn vf_of_subgroup_restriction_is_intersection() {
        // Restricting translators to 3Z₃ cuts V_f down to
        // (3Z₃ ∪ 2+3Z₃) ∩ 3Z₃.
        let a = translation_on_units()
            .restrict_to_subgroup(crate::group::SubgroupHandle::Ball { level: 1 })
            .unwrap();
        let vf = compute_vf(&a, &one_plus_3z3()).unwrap();
        assert_eq!(
            vf.description(),
            &VfDescription::Cells(OpenSet::single(Cell::ball(3, &rat_int(0), 1)))
        );
    }

    #[test]
    fn vf_monotone_under_support_shrinking() {
        let a = translation_on_units();
        let f = one_plus_3z3();
        let finer = Func::indicator_cell(
            SpaceModel::PAdicLine { p: 3 },
            Cell::ball(3, &rat_int(1), 2),
        )
        .unwrap();
        for t in [-4i64, -1, 0, 1, 2, 3, 4, 5, 6, 8] {
            let p = padic(t);
            if vf_contains(&a, &f, &p).unwrap() {
                assert!(vf_contains(&a, &finer, &p).unwrap());
            }
        }
    }

    #[test]
    fn vf_errors_on_support_outside_universe() {
        let a = translation_on_units();
        let f = Func::indicator_cell(
            SpaceModel::PAdicLine { p: 3 },
            Cell::ball(3, &rat_int(0), 0),
        )
        .unwrap();
        assert!(matches!(compute_vf(&a, &f), Err(Error::NotInModel(_))));
    }

    #[test]
    fn induced_act_global_shifts() {
        let a = PartialAction::right_translation(q3());
        let z3 = Func::indicator_cell(
            SpaceModel::PAdicLine { p: 3 },
            Cell::ball(3, &rat_int(0), 0),
        )
        .unwrap();
        // Integer shifts fix Z₃.
        assert_eq!(induced_act(&a, &padic(1), &z3).unwrap(), z3);
        // A fractional shift moves the ball exactly.
        let shifted = induced_act(&a, &Elt::PAdic(rat(1, 3)), &z3).unwrap();
        let expected = Func::indicator_cell(
            SpaceModel::PAdicLine { p: 3 },
            Cell::ball(3, &rat(-1, 3), 0),
        )
        .unwrap();
        assert_eq!(shifted, expected);
    }

    #[test]
    fn induced_act_on_restricted_instance() {
        let a = translation_on_units();
        let f = one_plus_3z3();
        // 3 ∈ V_f and the shift by 3 fixes the cell.
        assert_eq!(induced_act(&a, &padic(3), &f).unwrap(), f);
        // 1 ∉ V_f: 1+3Z₃ minus 1 is 3Z₃, outside the universe.
        let err = induced_act(&a, &padic(1), &f);
        assert!(matches!(err, Err(Error::OutsideDomain(_))));
        let msg = format!("{}", err.unwrap_err());
        assert!(msg.contains("support cell"));
    }

    #[test]
    fn induced_act_is_exact_pointwise() {
        let a = translation_on_units();
        let f = one_plus_3z3();
        let e = a.group().identity();
        assert_eq!(induced_act(&a, &e, &f).unwrap(), f);
        for g in [padic(0), padic(3), padic(-3), padic(6)] {
            let gf = induced_act(&a, &g, &f).unwrap();
            for x in [padic(1), padic(2), padic(4), padic(5), padic(7), padic(8)] {
                let expected = match a.act(&x, &g).unwrap() {
                    Some(y) => f.evaluate(&y),
                    None => Cyclotomic::from_int(0),
                };
                assert_eq!(gf.evaluate(&x), expected, "x={x:?}, g={g:?}");
            }
        }
    }

    #[test]
    fn composition_law_on_transversal_pairs() {
        // Composition law over the working-level-2 transversal: p from V_f, q
        // arbitrary; the iff and the equality must hold in every case.
        let a = translation_on_units();
        let f = one_plus_3z3();
        for pt in [0i64, 2, 3, 5, 6, 8] {
            let p = padic(pt);
            if !vf_contains(&a, &f, &p).unwrap() {
                continue;
            }
            for qt in 0i64..9 {
                let q = padic(qt);
                let report = composition_law_check(&a, &f, &p, &q).unwrap();
                assert!(report.holds(), "p={pt}, q={qt}: {report:?}");
            }
        }
        // The frozen instance: p = 3, q = 3, qp = 6 ∈ V_f, equality exact.
        let report = composition_law_check(&a, &f, &padic(3), &padic(3)).unwrap();
        assert!(report.q_in_v_pf && report.qp_in_vf);
        assert_eq!(report.functions_equal, Some(true));
        // q = 1 gives qp = 4 ∉ V_f, and the iff still holds.
        let report = composition_law_check(&a, &f, &padic(3), &padic(1)).unwrap();
        assert!(!report.q_in_v_pf && !report.qp_in_vf);
        assert!(report.holds());
    }

    #[test]
    fn two_sided_agrees_with_commuting_product() {
        let s3 = FiniteGroup::symmetric(3);
        let n = s3.order();
        let g = GroupModel::finite(s3.clone());
        let a = PartialAction::commuting_product_exhaustive(
            PartialAction::left_translation(g.clone()),
            PartialAction::right_translation(g.clone()),
        )
        .unwrap();
        let space = g.as_space();
        let f = Func::indicator_cell(space.clone(), Cell::FinitePoint(s3.identity())).unwrap();
        for h in 0..n {
            for k in 0..n {
                let moved = two_sided_act(&a, &Elt::Finite(h), &Elt::Finite(k), &f).unwrap();
                // (k·f·h)(x) = f(hxk) is 1 exactly at x = h⁻¹k⁻¹.
                let expect_point = s3.op(s3.inv(h), s3.inv(k));
                for x in 0..n {
                    let got = moved.evaluate(&Elt::Finite(x));
                    if x == expect_point {
                        assert!(got.is_one());
                    } else {
                        assert!(got.is_zero());
                    }
                }
                let via_pair = induced_act(
                    &a,
                    &Elt::pair(Elt::Finite(h), Elt::Finite(k)),
                    &f,
                )
                .unwrap();
                assert_eq!(moved, via_pair);
            }
        }
    }

    #[test]
    fn vf_splits_over_trivial_factor() {
        let line = SpaceModel::PAdicLine { p: 3 };
        let z3_set = OpenSet::single(Cell::ball(3, &rat_int(0), 0));
        let left = PartialAction::trivial(line.clone(), q3());
        let right = PartialAction::right_translation(q3())
            .restrict_to_open(z3_set)
            .unwrap();
        let probes = ProbeSet {
            points: vec![padic(0), padic(1), padic(2)],
            translators: vec![
                Elt::pair(padic(1), padic(1)),
                Elt::pair(padic(5), padic(-1)),
            ],
        };
        let a = PartialAction::commuting_product(left, right, &probes).unwrap();
        let f = Func::indicator_cell(line, Cell::ball(3, &rat_int(0), 0)).unwrap();
        let vf = compute_vf(&a, &f).unwrap();
        match vf.description() {
            VfDescription::Pair(l, r) => {
                assert_eq!(**l, VfDescription::All);
                assert_eq!(
                    **r,
                    VfDescription::Cells(OpenSet::single(Cell::ball(3, &rat_int(0), 0)))
                );
            }
            other => panic!("expected factored description, got {other:?}"),
        }
        assert!(vf.contains(&Elt::pair(Elt::PAdic(rat(1, 3)), padic(1))));
        assert!(!vf.contains(&Elt::pair(padic(0), Elt::PAdic(rat(1, 3)))));
    }

    #[test]
    fn vf_on_finite_restriction() {
        // Negation on {-1,0,1} restricted to the nonnegatives: 0 is fixed,
        // so its indicator is movable by everything; 1 leaves, so only the
        // identity keeps its indicator.
        let z2 = GroupModel::finite(FiniteGroup::cyclic(2));
        let space = SpaceModel::FinitePoints {
            labels: vec!["-1".into(), "0".into(), "1".into()],
        };
        let table = vec![
            vec![Some(0), Some(2)],
            vec![Some(1), Some(1)],
            vec![Some(2), Some(0)],
        ];
        let y = OpenSet::from_cells(vec![Cell::FinitePoint(1), Cell::FinitePoint(2)]).unwrap();
        let a = PartialAction::finite_table(space.clone(), z2, table)
            .unwrap()
            .restrict_to_open(y)
            .unwrap();
        let f0 = Func::indicator_cell(space.clone(), Cell::FinitePoint(1)).unwrap();
        let vf0 = compute_vf(&a, &f0).unwrap();
        assert_eq!(
            vf0.description(),
            &VfDescription::Cells(
                OpenSet::from_cells(vec![Cell::FinitePoint(0), Cell::FinitePoint(1)]).unwrap()
            )
        );
        let f1 = Func::indicator_cell(space, Cell::FinitePoint(2)).unwrap();
        let vf1 = compute_vf(&a, &f1).unwrap();
        assert_eq!(
            vf1.description(),
            &VfDescription::Cells(OpenSet::single(Cell::FinitePoint(0)))
        );
    }

    #[test]
    fn vf_window_diagnostic_for_twisted_products() {
        // Two nontrivial factors restricted to an open set: membership stays
        // exact, materialization reports its boundary.
        let z3_set = OpenSet::single(Cell::ball(3, &rat_int(0), 0));
        let left = PartialAction::left_translation(q3())
            .restrict_to_open(z3_set.clone())
            .unwrap();
        let right = PartialAction::right_translation(q3())
            .restrict_to_open(z3_set)
            .unwrap();
        let probes = ProbeSet {
            points: vec![padic(0), padic(1)],
            translators: vec![Elt::pair(padic(1), padic(1))],
        };
        let a = PartialAction::commuting_product(left, right, &probes).unwrap();
        let f = Func::indicator_cell(
            SpaceModel::PAdicLine { p: 3 },
            Cell::ball(3, &rat_int(0), 0),
        )
        .unwrap();
        assert!(matches!(
            compute_vf(&a, &f),
            Err(Error::Unsupported(_))
        ));
        assert!(vf_contains(&a, &f, &Elt::pair(padic(1), padic(1))).unwrap());
        assert!(!vf_contains(&a, &f, &Elt::pair(Elt::PAdic(rat(1, 3)), padic(0))).unwrap());
    }
}
