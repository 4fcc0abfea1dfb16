//! Convolution and the star structure on compactly supported locally
//! constant functions on a group. Integration is exact: supports are cut
//! into cells small enough that the inner translate is literally constant,
//! and the left Haar weights come from the cell measure formulas.

use serde::{Deserialize, Serialize};

use crate::action::PartialAction;
use crate::func::Func;
use crate::group::{
    cell_measure, group_inv_cell, subgroup_cells, subgroup_is_compact, subgroup_is_open,
    subgroup_measure, translate_cell_elt, validate_subgroup, GroupModel, Side, SubgroupHandle,
};
use crate::poly::{
    canonical_chain, func_exponent, is_polynomial, stabilizing_cosets, PolynomialCertificate,
};
use crate::scalar::{Cyclotomic, Rational};
use crate::space::{cell_sample_point, Cell, Elt};
use crate::{Error, Result};

/// Fixes the group, its left Haar measure normalization, and the right
/// translation action used for polynomial certificates.
#[derive(Debug, Clone)]
pub struct ConvolutionContext {
    group: GroupModel,
    action: PartialAction,
}

impl ConvolutionContext {
    pub fn new(group: GroupModel) -> ConvolutionContext {
        ConvolutionContext {
            action: PartialAction::right_translation(group.clone()),
            group,
        }
    }

    pub fn group(&self) -> &GroupModel {
        &self.group
    }

    /// The right translation action of the group on itself.
    pub fn action(&self) -> &PartialAction {
        &self.action
    }

    pub fn measure(&self, cell: &Cell) -> Result<Rational> {
        cell_measure(&self.group, cell)
    }

    pub fn modular(&self, g: &Elt) -> Result<Rational> {
        self.group.modular_function(g)
    }

    fn check_on_group(&self, f: &Func) -> Result<()> {
        if f.space() != &self.group.as_space() {
            return Err(Error::NotInModel(
                "the function does not live on the group".into(),
            ));
        }
        Ok(())
    }
}

fn flip(side: Side) -> Side {
    match side {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    }
}

// Cuts `a` into subcells on which translating `b` by any point of the
// subcell (on the given side) produces one fixed cell.
fn stable_partition(
    group: &GroupModel,
    a: &Cell,
    b: &Cell,
    side: Side,
) -> Result<Vec<(Elt, Cell)>> {
    match (group, a, b) {
        (GroupModel::Finite(_), Cell::FinitePoint(_), Cell::FinitePoint(_)) => {
            Ok(vec![(cell_sample_point(a), a.clone())])
        }
        (
            GroupModel::PAdicAdditive { .. },
            Cell::Ball { level: la, .. },
            Cell::Ball { level: lb, .. },
        ) => {
            let target = (*la).max(*lb);
            Ok(a.subcells_at_level(target)
                .into_iter()
                .map(|d| (cell_sample_point(&d), d))
                .collect())
        }
        (
            GroupModel::PAdicAffine { .. },
            Cell::AffineCell { k: ka, level: la, .. },
            Cell::AffineCell { k: kb, level: lb, .. },
        ) => {
            // Left: q b has precision ka + lb in q's offset. Right: b q
            // moves by p^kb times the offset, so lb - kb suffices.
            let target = match side {
                Side::Left => (*la).max(ka + lb),
                Side::Right => (*la).max(lb - kb),
            };
            Ok(a.subcells_at_level(target)
                .into_iter()
                .map(|d| (cell_sample_point(&d), d))
                .collect())
        }
        (GroupModel::Product { left, right }, Cell::Pair(a1, a2), Cell::Pair(b1, b2)) => {
            let first = stable_partition(left, a1, b1, side)?;
            let second = stable_partition(right, a2, b2, side)?;
            let mut out = Vec::with_capacity(first.len() * second.len());
            for (r1, d1) in &first {
                for (r2, d2) in &second {
                    out.push((
                        Elt::pair(r1.clone(), r2.clone()),
                        Cell::pair(d1.clone(), d2.clone()),
                    ));
                }
            }
            Ok(out)
        }
        (GroupModel::Opposite { base }, x, y) => stable_partition(base, x, y, flip(side)),
        _ => Err(Error::Unsupported(
            "cells do not belong to the group".into(),
        )),
    }
}

/// (f*g)(p) = int f(q) g(q^{-1} p) dq over the left Haar measure.
pub fn convolve(ctx: &ConvolutionContext, f: &Func, g: &Func) -> Result<Func> {
    ctx.check_on_group(f)?;
    ctx.check_on_group(g)?;
    let mut terms = Vec::new();
    for (a_cell, a_val) in f.terms() {
        for (b_cell, b_val) in g.terms() {
            // On each piece D of a_cell, q ranges with q B fixed, so the
            // inner integral contributes mu(D) on the cell q B.
            for (rep, d) in stable_partition(&ctx.group, a_cell, b_cell, Side::Left)? {
                let image = translate_cell_elt(&ctx.group, b_cell, &rep, Side::Left)?;
                let weight = Cyclotomic::from_rational(cell_measure(&ctx.group, &d)?);
                terms.push((image, a_val.mul(b_val).mul(&weight)));
            }
        }
    }
    Func::from_terms(ctx.group.as_space(), terms)
}

/// f^*(p) = delta(p)^{-1} conj(f(p^{-1})).
pub fn convolution_star(ctx: &ConvolutionContext, f: &Func) -> Result<Func> {
    ctx.check_on_group(f)?;
    let mut terms = Vec::new();
    for (cell, v) in f.terms() {
        let inv_cell = group_inv_cell(&ctx.group, cell)?;
        // The modular function is constant on cells of these models.
        let delta = ctx.modular(&cell_sample_point(&inv_cell))?;
        terms.push((
            inv_cell,
            v.conjugate()
                .mul(&Cyclotomic::from_rational(delta.recip())),
        ));
    }
    Func::from_terms(ctx.group.as_space(), terms)
}

/// p -> f(p^{-1}), with no weight or conjugation.
pub fn invert_argument(group: &GroupModel, f: &Func) -> Result<Func> {
    if f.space() != &group.as_space() {
        return Err(Error::NotInModel(
            "the function does not live on the group".into(),
        ));
    }
    let terms = f
        .terms()
        .iter()
        .map(|(cell, v)| Ok((group_inv_cell(group, cell)?, v.clone())))
        .collect::<Result<Vec<_>>>()?;
    Func::from_terms(group.as_space(), terms)
}

// A compact open subgroup under which f is invariant on both sides.
fn invariance_handle(group: &GroupModel, cells: &[&Cell]) -> Result<SubgroupHandle> {
    match group {
        GroupModel::Finite(g) => Ok(SubgroupHandle::finite_set(vec![g.identity()])),
        GroupModel::PAdicAdditive { .. } => {
            let mut m = 0;
            for c in cells {
                match c {
                    Cell::Ball { level, .. } => m = m.max(*level),
                    other => {
                        return Err(Error::Unsupported(format!(
                            "cell does not belong to the group: {other:?}"
                        )))
                    }
                }
            }
            Ok(SubgroupHandle::Ball { level: m })
        }
        GroupModel::PAdicAffine { .. } => {
            let mut m = 0;
            for c in cells {
                match c {
                    // Offset invariance needs level on the left and
                    // level - k on the right.
                    Cell::AffineCell { k, level, .. } => m = m.max(*level).max(level - k),
                    other => {
                        return Err(Error::Unsupported(format!(
                            "cell does not belong to the group: {other:?}"
                        )))
                    }
                }
            }
            Ok(SubgroupHandle::AffineBall { level: m })
        }
        GroupModel::Product { left, right } => {
            let mut firsts = Vec::new();
            let mut seconds = Vec::new();
            for c in cells {
                match c {
                    Cell::Pair(a, b) => {
                        firsts.push(a.as_ref());
                        seconds.push(b.as_ref());
                    }
                    other => {
                        return Err(Error::Unsupported(format!(
                            "cell does not belong to the group: {other:?}"
                        )))
                    }
                }
            }
            Ok(SubgroupHandle::product(
                invariance_handle(left, &firsts)?,
                invariance_handle(right, &seconds)?,
            ))
        }
        GroupModel::Opposite { base } => {
            let inverted = cells
                .iter()
                .map(|c| group_inv_cell(base, c))
                .collect::<Result<Vec<_>>>()?;
            invariance_handle(base, &inverted.iter().collect::<Vec<_>>())
        }
    }
}

/// Local units for a polynomial function: the mass-one-normalized
/// indicator of a small enough compact open subgroup convolves to f from
/// either side. Finite groups get the counting-measure unit at the
/// identity.
pub fn local_unit(ctx: &ConvolutionContext, f: &Func) -> Result<(Func, Func)> {
    ctx.check_on_group(f)?;
    let deepest = (func_exponent(f) + 2).max(2);
    if is_polynomial(&ctx.action, f, &canonical_chain(&ctx.group, deepest))?.is_none() {
        return Err(Error::Malformed(
            "no polynomial certificate for the function".into(),
        ));
    }
    let cells: Vec<&Cell> = f.terms().iter().map(|(c, _)| c).collect();
    let g0 = invariance_handle(&ctx.group, &cells)?;
    let mass = subgroup_measure(&ctx.group, &g0)?;
    let unit = Func::indicator(
        ctx.group.as_space(),
        &crate::space::OpenSet::from_cells(subgroup_cells(&ctx.group, &g0)?)?,
    )?
    .scale(&Cyclotomic::from_rational(mass.recip()));
    Ok((unit.clone(), unit))
}

/// Whether f * xi = xi forces xi to be polynomial, checked on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    /// f * xi = xi held exactly; the implication is vacuous otherwise.
    pub hypothesis_holds: bool,
    pub certificate: Option<PolynomialCertificate>,
    pub implication_ok: bool,
}

pub fn eigen_polynomial_check(
    ctx: &ConvolutionContext,
    f: &Func,
    xi: &Func,
) -> Result<EigenReport> {
    let hypothesis_holds = convolve(ctx, f, xi)? == *xi;
    let certificate = if hypothesis_holds {
        let deepest = (func_exponent(xi) + 2).max(2);
        is_polynomial(&ctx.action, xi, &canonical_chain(&ctx.group, deepest))?
    } else {
        None
    };
    let implication_ok = !hypothesis_holds || certificate.is_some();
    Ok(EigenReport {
        hypothesis_holds,
        certificate,
        implication_ok,
    })
}

/// Mass-one Haar average of phi over the compact open subgroup g0, computed
/// as a coset sum at a level where phi is constant on every coset. Every
/// function here is a finite cell combination, so such a level always exists.
pub fn haar_integrate(group: &GroupModel, g0: &SubgroupHandle, phi: &Func) -> Result<Cyclotomic> {
    if phi.space() != &group.as_space() {
        return Err(Error::NotInModel(
            "the function does not live on the group".into(),
        ));
    }
    validate_subgroup(group, g0)?;
    if !subgroup_is_open(group, g0) || !subgroup_is_compact(group, g0) {
        return Err(Error::NotASubgroup(format!("{g0:?} is not compact open")));
    }
    let total = subgroup_measure(group, g0)?;
    let mut sum = Cyclotomic::from_int(0);
    for (u, d) in stabilizing_cosets(group, g0, func_exponent(phi))? {
        let weight = Cyclotomic::from_rational(cell_measure(group, &d)?);
        sum = sum.add(&phi.evaluate(&u).mul(&weight));
    }
    Ok(sum.scale(&total.recip()))
}

/// g(p) = int_{G0} f(p h) phi(h) dh over the unnormalized Haar measure; a
/// finite combination of right translates of f, hence polynomial with f.
pub fn weighted_average(
    ctx: &ConvolutionContext,
    f: &Func,
    phi: &Func,
    g0: &SubgroupHandle,
) -> Result<Func> {
    ctx.check_on_group(f)?;
    ctx.check_on_group(phi)?;
    let exponent = func_exponent(f).max(func_exponent(phi));
    let mut out = Func::zero(ctx.group.as_space());
    for (u, d) in stabilizing_cosets(&ctx.group, g0, exponent)? {
        let weight = phi
            .evaluate(&u)
            .mul(&Cyclotomic::from_rational(cell_measure(&ctx.group, &d)?));
        if !weight.is_zero() {
            out = out.add(&crate::induced::induced_act(&ctx.action, &u, f)?.scale(&weight))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::express_in_span;
    use crate::poly::build_plateau;
    use crate::scalar::{rat, rat_int};
    use crate::space::{OpenSet, SpaceModel};

    fn q3() -> ConvolutionContext {
        ConvolutionContext::new(GroupModel::PAdicAdditive { p: 3 })
    }

    fn aff3() -> ConvolutionContext {
        ConvolutionContext::new(GroupModel::PAdicAffine { p: 3 })
    }

    fn line() -> SpaceModel {
        SpaceModel::PAdicLine { p: 3 }
    }

    fn ball(center: i64, level: i64) -> Cell {
        Cell::ball(3, &rat_int(center), level)
    }

    fn indicator(cell: Cell) -> Func {
        Func::indicator_cell(line(), cell).unwrap()
    }

    fn acell(k: i64, center: Rational, level: i64) -> Cell {
        Cell::affine_cell(3, k, &center, level)
    }

    fn aff_indicator(cell: Cell) -> Func {
        Func::indicator_cell(SpaceModel::AffineSpace { p: 3 }, cell).unwrap()
    }

    #[test]
    fn convolution_frozen_values() {
        let ctx = q3();
        let unit_ball = indicator(ball(0, 0));
        assert_eq!(convolve(&ctx, &unit_ball, &unit_ball).unwrap(), unit_ball);

        // Translate and scale: the small ball has mass 1/3.
        let third = Cyclotomic::from_rational(rat(1, 3));
        let got = convolve(&ctx, &indicator(ball(0, 1)), &indicator(ball(1, 1))).unwrap();
        assert_eq!(got, indicator(ball(1, 1)).scale(&third));
        let got = convolve(&ctx, &unit_ball, &indicator(ball(1, 1))).unwrap();
        assert_eq!(got, unit_ball.scale(&third));

        // Finite groups carry counting measure: deltas multiply.
        let s3 = crate::group::FiniteGroup::symmetric(3);
        let fctx = ConvolutionContext::new(GroupModel::finite(s3.clone()));
        let space = fctx.group().as_space();
        for a in 0..6 {
            for b in 0..6 {
                let da = Func::indicator_cell(space.clone(), Cell::FinitePoint(a)).unwrap();
                let db = Func::indicator_cell(space.clone(), Cell::FinitePoint(b)).unwrap();
                let dab =
                    Func::indicator_cell(space.clone(), Cell::FinitePoint(s3.op(a, b))).unwrap();
                assert_eq!(convolve(&fctx, &da, &db).unwrap(), dab);
            }
        }
    }

    #[test]
    fn convolution_on_the_affine_group() {
        let ctx = aff3();
        // The subgroup {1} x Z3 is idempotent under convolution.
        let sub = aff_indicator(acell(0, rat_int(0), 0));
        assert_eq!(convolve(&ctx, &sub, &sub).unwrap(), sub);
        // Scaling shifts multiply: supp {3} x Z3 squares to {9} x Z3.
        let dil = aff_indicator(acell(1, rat_int(0), 0));
        assert_eq!(
            convolve(&ctx, &dil, &dil).unwrap(),
            aff_indicator(acell(2, rat_int(0), 0))
        );
        // Noncommutative: the two orders land on different cells.
        let shift = aff_indicator(acell(0, rat(1, 3), 1));
        assert_ne!(
            convolve(&ctx, &dil, &shift).unwrap(),
            convolve(&ctx, &shift, &dil).unwrap()
        );
    }

    #[test]
    fn convolution_is_bilinear_and_associative() {
        let ctx = q3();
        let zeta = Cyclotomic::zeta(3);
        let f = indicator(ball(0, 1)).scale(&zeta);
        let g = Func::from_terms(
            line(),
            vec![
                (ball(1, 1), Cyclotomic::from_int(2)),
                (Cell::ball(3, &rat(1, 3), 2), Cyclotomic::from_int(-1)),
            ],
        )
        .unwrap();
        let h = indicator(ball(2, 1));
        let fg_h = convolve(&ctx, &convolve(&ctx, &f, &g).unwrap(), &h).unwrap();
        let f_gh = convolve(&ctx, &f, &convolve(&ctx, &g, &h).unwrap()).unwrap();
        assert_eq!(fg_h, f_gh);
        // Abelian group: convolution commutes.
        assert_eq!(convolve(&ctx, &f, &g).unwrap(), convolve(&ctx, &g, &f).unwrap());
        // Bilinearity.
        let sum = convolve(&ctx, &f.add(&h).unwrap(), &g).unwrap();
        let split = convolve(&ctx, &f, &g)
            .unwrap()
            .add(&convolve(&ctx, &h, &g).unwrap())
            .unwrap();
        assert_eq!(sum, split);

        let ctx = aff3();
        let f = aff_indicator(acell(1, rat_int(0), 0));
        let g = aff_indicator(acell(0, rat(1, 3), 1)).scale(&zeta);
        let h = aff_indicator(acell(-1, rat_int(2), 1));
        let fg_h = convolve(&ctx, &convolve(&ctx, &f, &g).unwrap(), &h).unwrap();
        let f_gh = convolve(&ctx, &f, &convolve(&ctx, &g, &h).unwrap()).unwrap();
        assert_eq!(fg_h, f_gh);
    }

    #[test]
    fn star_is_an_involutive_antiautomorphism() {
        let zeta = Cyclotomic::zeta(3);
        let q = q3();
        let a = aff3();
        let padic_funcs = vec![
            indicator(ball(0, 0)),
            indicator(ball(1, 1)).scale(&zeta),
            Func::from_terms(
                line(),
                vec![
                    (ball(2, 1), Cyclotomic::from_int(2)),
                    (Cell::ball(3, &rat(1, 3), 2), zeta.clone()),
                ],
            )
            .unwrap(),
        ];
        for f in &padic_funcs {
            assert_eq!(
                &convolution_star(&q, &convolution_star(&q, f).unwrap()).unwrap(),
                f
            );
        }
        for f in &padic_funcs {
            for g in &padic_funcs {
                let lhs = convolution_star(&q, &convolve(&q, f, g).unwrap()).unwrap();
                let rhs = convolve(
                    &q,
                    &convolution_star(&q, g).unwrap(),
                    &convolution_star(&q, f).unwrap(),
                )
                .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        assert_eq!(
            convolution_star(&q, &indicator(ball(0, 0))).unwrap(),
            indicator(ball(0, 0))
        );

        // Affine instances exercise a nontrivial modular weight.
        let aff_funcs = vec![
            aff_indicator(acell(0, rat_int(0), 0)),
            aff_indicator(acell(1, rat_int(0), 0)).scale(&zeta),
            aff_indicator(acell(-1, rat(1, 3), 0)),
        ];
        for f in &aff_funcs {
            assert_eq!(
                &convolution_star(&a, &convolution_star(&a, f).unwrap()).unwrap(),
                f
            );
            for g in &aff_funcs {
                let lhs = convolution_star(&a, &convolve(&a, f, g).unwrap()).unwrap();
                let rhs = convolve(
                    &a,
                    &convolution_star(&a, g).unwrap(),
                    &convolution_star(&a, f).unwrap(),
                )
                .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        // The subgroup indicator is a fixed point of star.
        let sub = aff_indicator(acell(0, rat_int(0), 0));
        assert_eq!(convolution_star(&a, &sub).unwrap(), sub);

        // Finite: star is conjugate-of-inverse-argument.
        let c4 = ConvolutionContext::new(GroupModel::finite(crate::group::FiniteGroup::cyclic(4)));
        let space = c4.group().as_space();
        let f = Func::from_terms(
            space.clone(),
            vec![
                (Cell::FinitePoint(1), Cyclotomic::zeta(4)),
                (Cell::FinitePoint(2), Cyclotomic::from_int(3)),
            ],
        )
        .unwrap();
        let expected = Func::from_terms(
            space,
            vec![
                (Cell::FinitePoint(3), Cyclotomic::zeta(4).conjugate()),
                (Cell::FinitePoint(2), Cyclotomic::from_int(3)),
            ],
        )
        .unwrap();
        assert_eq!(convolution_star(&c4, &f).unwrap(), expected);
    }

    #[test]
    fn modular_function_behaves() {
        let a = aff3();
        // delta is a homomorphism.
        let els = [
            Elt::affine(0, rat_int(0)),
            Elt::affine(1, rat_int(2)),
            Elt::affine(-2, rat(1, 3)),
            Elt::affine(2, rat_int(-1)),
        ];
        for g in &els {
            for h in &els {
                let gh = a.group().op(g, h).unwrap();
                assert_eq!(
                    a.modular(&gh).unwrap(),
                    a.modular(g).unwrap() * a.modular(h).unwrap()
                );
            }
        }
        // And identically 1 on the compact open subgroup {1} x Z3.
        for b in [rat_int(0), rat_int(1), rat(5, 1)] {
            assert_eq!(a.modular(&Elt::affine(0, b)).unwrap(), rat_int(1));
        }
    }

    #[test]
    fn argument_inversion() {
        let g = GroupModel::PAdicAdditive { p: 3 };
        assert_eq!(
            invert_argument(&g, &indicator(ball(0, 0))).unwrap(),
            indicator(ball(0, 0))
        );
        assert_eq!(
            invert_argument(&g, &indicator(ball(1, 1))).unwrap(),
            indicator(ball(2, 1))
        );
        let s3 = crate::group::FiniteGroup::symmetric(3);
        let fg = GroupModel::finite(s3.clone());
        let space = fg.as_space();
        for x in 0..6 {
            let dx = Func::indicator_cell(space.clone(), Cell::FinitePoint(x)).unwrap();
            let dxi = Func::indicator_cell(space.clone(), Cell::FinitePoint(s3.inv(x))).unwrap();
            assert_eq!(invert_argument(&fg, &dx).unwrap(), dxi);
        }
        // Inversion preserves polynomiality on instances.
        let ctx = aff3();
        let f = aff_indicator(acell(1, rat_int(0), 1)).add(
            &aff_indicator(acell(0, rat_int(0), 0)).scale(&Cyclotomic::zeta(3)),
        )
        .unwrap();
        let inv = invert_argument(ctx.group(), &f).unwrap();
        let chain = canonical_chain(ctx.group(), 3);
        assert!(is_polynomial(ctx.action(), &inv, &chain).unwrap().is_some());
    }

    #[test]
    fn local_units_frozen_values() {
        let ctx = q3();
        let f = indicator(ball(0, 0));
        let (gl, gr) = local_unit(&ctx, &f).unwrap();
        assert_eq!(gl, f);
        assert_eq!(convolve(&ctx, &gl, &f).unwrap(), f);
        assert_eq!(convolve(&ctx, &f, &gr).unwrap(), f);

        let f = indicator(ball(1, 1));
        let (gl, gr) = local_unit(&ctx, &f).unwrap();
        assert_eq!(gl, indicator(ball(0, 1)).scale(&Cyclotomic::from_int(3)));
        assert_eq!(convolve(&ctx, &gl, &f).unwrap(), f);
        assert_eq!(convolve(&ctx, &f, &gr).unwrap(), f);
        let chain = canonical_chain(ctx.group(), 3);
        assert!(is_polynomial(ctx.action(), &gl, &chain).unwrap().is_some());

        // Finite groups: the unit is the delta at the identity.
        let s3 = crate::group::FiniteGroup::symmetric(3);
        let fctx = ConvolutionContext::new(GroupModel::finite(s3.clone()));
        let space = fctx.group().as_space();
        let f = Func::from_terms(
            space.clone(),
            vec![
                (Cell::FinitePoint(2), Cyclotomic::from_int(4)),
                (Cell::FinitePoint(5), Cyclotomic::zeta(3)),
            ],
        )
        .unwrap();
        let (gl, gr) = local_unit(&fctx, &f).unwrap();
        let delta_e =
            Func::indicator_cell(space, Cell::FinitePoint(s3.identity())).unwrap();
        assert_eq!(gl, delta_e);
        assert_eq!(convolve(&fctx, &gl, &f).unwrap(), f);
        assert_eq!(convolve(&fctx, &f, &gr).unwrap(), f);

        // Affine: both sides work even though the group is nonabelian.
        let actx = aff3();
        let f = aff_indicator(acell(1, rat_int(0), 0));
        let (gl, gr) = local_unit(&actx, &f).unwrap();
        assert_eq!(gl, aff_indicator(acell(0, rat_int(0), 0)));
        assert_eq!(convolve(&actx, &gl, &f).unwrap(), f);
        assert_eq!(convolve(&actx, &f, &gr).unwrap(), f);
    }

    #[test]
    fn eigen_implication_instances() {
        let ctx = q3();
        let f = indicator(ball(0, 0));
        let report = eigen_polynomial_check(&ctx, &f, &f).unwrap();
        assert!(report.hypothesis_holds && report.certificate.is_some());
        assert!(report.implication_ok);

        let xi = indicator(ball(0, 1));
        let f = indicator(ball(0, 1)).scale(&Cyclotomic::from_int(3));
        let report = eigen_polynomial_check(&ctx, &f, &xi).unwrap();
        assert!(report.hypothesis_holds && report.certificate.is_some());

        let report =
            eigen_polynomial_check(&ctx, &indicator(ball(1, 1)), &indicator(ball(0, 0))).unwrap();
        assert!(!report.hypothesis_holds);
        assert!(report.certificate.is_none() && report.implication_ok);
    }

    #[test]
    fn convolving_with_a_polynomial_stays_polynomial() {
        let ctx = q3();
        let chain = canonical_chain(ctx.group(), 4);
        let poly = indicator(ball(1, 1));
        let other = Func::from_terms(
            line(),
            vec![
                (Cell::ball(3, &rat(1, 3), 2), Cyclotomic::zeta(4)),
                (ball(2, 1), Cyclotomic::from_int(-2)),
            ],
        )
        .unwrap();
        for h in [
            convolve(&ctx, &poly, &other).unwrap(),
            convolve(&ctx, &other, &poly).unwrap(),
        ] {
            assert!(is_polynomial(ctx.action(), &h, &chain).unwrap().is_some());
        }

        let ctx = aff3();
        let chain = canonical_chain(ctx.group(), 4);
        let poly = aff_indicator(acell(0, rat_int(0), 0));
        let other = aff_indicator(acell(1, rat(1, 3), 2)).scale(&Cyclotomic::zeta(3));
        for h in [
            convolve(&ctx, &poly, &other).unwrap(),
            convolve(&ctx, &other, &poly).unwrap(),
        ] {
            assert!(is_polynomial(ctx.action(), &h, &chain).unwrap().is_some());
        }
    }

    #[test]
    fn pointwise_algebra_has_plateau_units() {
        let ctx = q3();
        let f = Func::from_terms(
            line(),
            vec![
                (ball(1, 1), Cyclotomic::zeta(3)),
                (ball(0, 1), Cyclotomic::from_int(2)),
            ],
        )
        .unwrap();
        let g0 = SubgroupHandle::Ball { level: 1 };
        let plateau = build_plateau(ctx.action(), &f.support().unwrap(), &g0).unwrap();
        assert_eq!(plateau.mul_pointwise(&f).unwrap(), f);
        let chain = canonical_chain(ctx.group(), 3);
        assert!(is_polynomial(ctx.action(), &plateau, &chain).unwrap().is_some());
        // Pointwise products and conjugates of polynomials stay polynomial.
        let prod = f.mul_pointwise(&f).unwrap();
        assert!(is_polynomial(ctx.action(), &prod, &chain).unwrap().is_some());
        assert!(is_polynomial(ctx.action(), &f.conjugate_values(), &chain)
            .unwrap()
            .is_some());
    }

    #[test]
    fn compact_group_functions_are_all_polynomial() {
        // On a compact group every locally constant function sits in a
        // finite-dimensional invariant subspace; certificates agree.
        let c4 = crate::group::FiniteGroup::cyclic(4);
        let a = PartialAction::right_translation(GroupModel::finite(c4.clone()));
        let space = a.space().clone();
        let i = Cyclotomic::zeta(4);
        for f in [
            Func::indicator_cell(space.clone(), Cell::FinitePoint(0)).unwrap(),
            Func::from_terms(
                space.clone(),
                vec![
                    (Cell::FinitePoint(1), i.clone()),
                    (Cell::FinitePoint(3), i.mul(&i).mul(&i)),
                ],
            )
            .unwrap(),
        ] {
            let cert = is_polynomial(&a, &f, &[SubgroupHandle::Full]).unwrap().unwrap();
            assert!(cert.dimension() <= 4);
            crate::poly::revalidate_for(&a, &cert, &f).unwrap();
        }

        // Compact open restriction of Q3: all working-level functions on
        // Z3 certify, and every certificate spans inside the same space.
        let z3 = PartialAction::right_translation(GroupModel::PAdicAdditive { p: 3 })
            .restrict_to_open(OpenSet::single(ball(0, 0)))
            .unwrap()
            .restrict_to_subgroup(SubgroupHandle::Ball { level: 0 })
            .unwrap();
        for c in 0..3 {
            let f = indicator(ball(c, 1));
            let cert = is_polynomial(&z3, &f, &[SubgroupHandle::Ball { level: 0 }])
                .unwrap()
                .unwrap();
            assert_eq!(cert.dimension(), 3);
        }
    }

    #[test]
    fn averaging_against_a_weight_is_polynomial() {
        let ctx = q3();
        let g0 = SubgroupHandle::Ball { level: 0 };
        let f = indicator(ball(0, 1));
        let phi = indicator(ball(0, 0));
        // Averaging the small ball over Z3 spreads its mass 1/3 evenly.
        let got = weighted_average(&ctx, &f, &phi, &g0).unwrap();
        assert_eq!(
            got,
            indicator(ball(0, 0)).scale(&Cyclotomic::from_rational(rat(1, 3)))
        );
        let phi = Func::from_terms(
            line(),
            vec![
                (ball(1, 1), Cyclotomic::zeta(3)),
                (ball(0, 1), Cyclotomic::from_int(2)),
            ],
        )
        .unwrap();
        let got = weighted_average(&ctx, &f, &phi, &g0).unwrap();
        let chain = canonical_chain(ctx.group(), 3);
        assert!(is_polynomial(ctx.action(), &got, &chain).unwrap().is_some());
    }

    #[test]
    fn left_translates_of_right_polynomials_span_finitely() {
        // For a right-translation polynomial on the affine group, the
        // family p -> f(q p), with q running over a compact open
        // subgroup, stays inside one finite-dimensional space.
        let group = GroupModel::PAdicAffine { p: 3 };
        let left = PartialAction::left_translation(group.clone());
        let f = aff_indicator(acell(1, rat_int(0), 1));
        let probes = [
            Elt::affine(0, rat_int(0)),
            Elt::affine(0, rat_int(1)),
            Elt::affine(0, rat_int(2)),
            Elt::affine(0, rat_int(4)),
            Elt::affine(0, rat_int(7)),
            Elt::affine(0, rat_int(9)),
            Elt::affine(0, rat_int(-1)),
        ];
        let translates: Vec<Func> = probes
            .iter()
            .map(|q| crate::induced::induced_act(&left, q, &f).unwrap())
            .collect();
        let mut refs: Vec<&Func> = translates.iter().collect();
        refs.push(&f);
        let grid = crate::func::common_grid(&refs).unwrap();
        let rows: Vec<Vec<Cyclotomic>> =
            translates.iter().map(|t| t.values_on_grid(&grid)).collect();
        let basis_idx = crate::linalg::independent_subset(&rows);
        assert_eq!(basis_idx.len(), 3);
        let basis: Vec<Vec<Cyclotomic>> =
            basis_idx.iter().map(|&i| rows[i].clone()).collect();
        for row in &rows {
            assert!(express_in_span(&basis, row).is_some());
        }
    }

    #[test]
    fn haar_integrate_hand_values() {
        let g = GroupModel::PAdicAdditive { p: 3 };
        let z3 = SubgroupHandle::Ball { level: 0 };
        let one = indicator(ball(0, 0));

        // constant 1 on the ball averages to 1, at any enclosing level
        assert_eq!(haar_integrate(&g, &z3, &one).unwrap(), Cyclotomic::from_int(1));
        assert_eq!(
            haar_integrate(&g, &SubgroupHandle::Ball { level: 1 }, &one).unwrap(),
            Cyclotomic::from_int(1)
        );

        // indicator of an index-3 subgroup averages to 1/3
        assert_eq!(
            haar_integrate(&g, &z3, &indicator(ball(0, 1))).unwrap(),
            Cyclotomic::from_rational(rat(1, 3))
        );

        // a nontrivial character of Z/3 sums to zero
        let c3 = GroupModel::finite(crate::group::FiniteGroup::cyclic(3));
        let chi = Func::from_terms(
            c3.as_space(),
            (0..3)
                .map(|k| {
                    (
                        Cell::FinitePoint(k),
                        Cyclotomic::root_of_unity(3, k as i64).unwrap(),
                    )
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(
            haar_integrate(&c3, &SubgroupHandle::Full, &chi).unwrap(),
            Cyclotomic::from_int(0)
        );

        // the whole p-adic line is not compact
        assert!(haar_integrate(&g, &SubgroupHandle::Full, &one).is_err());
    }
}
