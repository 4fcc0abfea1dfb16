//! Acceptance gate for the library: ten numbered criteria, each a test
//! printing a single pass/fail line. Every comparison is exact; there are
//! no tolerances anywhere in this file.

use num_bigint::BigInt;

use polyact::action::{AxiomViolation, PartialAction, ProbeSet};
use polyact::algebras::{
    convolve, convolution_star, eigen_polynomial_check, local_unit, ConvolutionContext,
};
use polyact::func::Func;
use polyact::gen::{self, FiniteInstance};
use polyact::group::{FiniteGroup, GroupModel, SubgroupHandle};
use polyact::induced::{
    composition_law_check, compute_vf, induced_act, vf_contains, VfDescription,
};
use polyact::isotypic::{
    decompose_isotypic, isotypic_projection, schur_orthogonality, verify_representation,
    QuotientSpec, Representation,
};
use polyact::linalg::Mat;
use polyact::poly::{
    canonical_chain, coefficient_functions, converse_polynomiality, decompose_product,
    dual_points, func_exponent, is_polynomial, joint_polynomiality,
    lift_subgroup_polynomiality, revalidate_for, saturate,
};
use polyact::space::{pow_p, Cell, Elt, OpenSet, SpaceModel};
use polyact::{Cyclotomic, Rational};

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn cyc(n: i64) -> Cyclotomic {
    Cyclotomic::from_int(n)
}

fn q3() -> GroupModel {
    GroupModel::PAdicAdditive { p: 3 }
}

fn line() -> SpaceModel {
    SpaceModel::PAdicLine { p: 3 }
}

fn ball(center: i64, level: i64) -> Cell {
    Cell::ball(3, &rat(center, 1), level)
}

fn indicator(cell: Cell) -> Func {
    Func::indicator_cell(line(), cell).unwrap()
}

fn units_action() -> PartialAction {
    let y = OpenSet::from_cells(vec![ball(1, 1), ball(2, 1)]).unwrap();
    PartialAction::right_translation(q3())
        .restrict_to_open(y)
        .unwrap()
}

/// The shared random corpus: 200 finite global actions, seed-pinned so the
/// axiom and groupoid criteria sweep the same instances.
fn corpus() -> Vec<FiniteInstance> {
    let mut rng = gen::rng_from_seed(41);
    (0..200).map(|_| gen::random_global_action(&mut rng)).collect()
}

fn exhaustive(a: &PartialAction) -> ProbeSet {
    ProbeSet::exhaustive(a).expect("finite instance")
}

/// Independent law sweep over the raw table, in the same point and
/// translator order the library uses, so the violation lists are comparable
/// by plain equality.
fn oracle_violations(inst: &FiniteInstance) -> Vec<AxiomViolation> {
    let g = &inst.group;
    let n = inst.labels.len();
    let e = g.identity();
    let t = |x: usize, p: usize| inst.table[x][p];
    let mut out = Vec::new();
    for x in 0..n {
        match t(x, e) {
            None => out.push(AxiomViolation::IdentityOutsideDomain { x: Elt::Finite(x) }),
            Some(y) if y != x => out.push(AxiomViolation::IdentityMoves {
                x: Elt::Finite(x),
                image: Elt::Finite(y),
            }),
            _ => {}
        }
        for p in 0..g.order() {
            let Some(xp) = t(x, p) else { continue };
            for q in 0..g.order() {
                let pq = g.op(p, q);
                let joined = t(x, pq).is_some();
                let stepped = t(xp, q).is_some();
                if joined != stepped {
                    out.push(AxiomViolation::IffBroken {
                        x: Elt::Finite(x),
                        p: Elt::Finite(p),
                        q: Elt::Finite(q),
                        joined,
                        stepped,
                    });
                    continue;
                }
                if joined {
                    let a = t(x, pq).unwrap();
                    let b = t(xp, q).unwrap();
                    if a != b {
                        out.push(AxiomViolation::CompositionMismatch {
                            x: Elt::Finite(x),
                            p: Elt::Finite(p),
                            q: Elt::Finite(q),
                            joined: Elt::Finite(a),
                            stepped: Elt::Finite(b),
                        });
                    }
                }
            }
        }
    }
    out
}

#[test]
fn criterion_01_axiom_sweep_and_fault_oracle() {
    let mut rng = gen::rng_from_seed(43);
    let mut faulted = 0usize;
    for inst in corpus() {
        let a = inst.action().unwrap();
        assert!(a.check_axioms(&exhaustive(&a)).is_clean(), "base instance");
        for _ in 0..3 {
            let y = gen::random_open_subset(&inst.space(), &mut rng).unwrap();
            let r = a.restrict_to_open(y).unwrap();
            assert!(r.check_axioms(&exhaustive(&r)).is_clean(), "restriction");
        }
        for d in [a.derived_first(), a.derived_second()] {
            assert!(d.check_axioms(&exhaustive(&d)).is_clean(), "derived");
        }
        if let Some((bad, _)) = gen::inject_fault(&inst, &mut rng) {
            let expected = oracle_violations(&bad);
            assert!(!expected.is_empty(), "undetectable fault slipped through");
            let b = bad.action().unwrap();
            let got = b.check_axioms(&exhaustive(&b)).violations;
            assert_eq!(got, expected, "library and oracle sweeps disagree");
            faulted += 1;
        }
    }
    assert!(faulted >= 120, "fault corpus too thin: {faulted}");
    println!("criterion 01 (axiom sweep on 200 random actions, fault oracle agreement): PASS");
}

#[test]
fn criterion_02_groupoid_laws_exhaustively() {
    for inst in corpus() {
        let a = inst.action().unwrap();
        let g = &inst.group;
        let n = inst.labels.len();
        let m = g.order();
        let e = Elt::Finite(g.identity());
        let (d1, d2) = a.derived_actions();
        for xi in 0..n {
            let x = Elt::Finite(xi);
            for pi in 0..m {
                let p = Elt::Finite(pi);
                let xp = a.act(&x, &p).unwrap().expect("global");
                // Involution: flipping an arrow twice is the identity.
                let (y, pinv) = a.gamma_map(&x, &p).unwrap();
                assert_eq!(a.gamma_map(&y, &pinv).unwrap(), (x.clone(), p.clone()));
                // Unit arrows absorb on both sides.
                let unit_src = (x.clone(), e.clone());
                assert_eq!(
                    a.groupoid_compose((&unit_src.0, &unit_src.1), (&x, &p)).unwrap(),
                    Some((x.clone(), p.clone()))
                );
                assert_eq!(
                    a.groupoid_compose((&x, &p), (&xp, &e)).unwrap(),
                    Some((x.clone(), p.clone()))
                );
                // The flipped arrow is a two-sided inverse.
                assert_eq!(
                    a.groupoid_compose((&x, &p), (&y, &pinv)).unwrap(),
                    Some((x.clone(), e.clone()))
                );
                assert_eq!(
                    a.groupoid_compose((&y, &pinv), (&x, &p)).unwrap(),
                    Some((xp.clone(), e.clone()))
                );
                for qi in 0..m {
                    let q = Elt::Finite(qi);
                    // Intertwiner between the two derived actions.
                    let pair = Elt::pair(x.clone(), p.clone());
                    let lhs = match d1.act(&pair, &q).unwrap() {
                        Some(Elt::Pair(u, v)) => Some(a.gamma_map(&u, &v).unwrap()),
                        Some(other) => panic!("derived image is not a pair: {other:?}"),
                        None => None,
                    };
                    let flipped = Elt::pair(y.clone(), pinv.clone());
                    let rhs = match d2.act(&flipped, &q).unwrap() {
                        Some(Elt::Pair(u, v)) => Some((*u, *v)),
                        Some(other) => panic!("derived image is not a pair: {other:?}"),
                        None => None,
                    };
                    assert_eq!(lhs, rhs, "intertwiner at ({xi},{pi},{qi})");
                    // Associativity over every composable triple.
                    let xpq = a.act(&xp, &q).unwrap().expect("global");
                    for ri in 0..m {
                        let r = Elt::Finite(ri);
                        let ab = a
                            .groupoid_compose((&x, &p), (&xp, &q))
                            .unwrap()
                            .expect("arrows meet");
                        let bc = a
                            .groupoid_compose((&xp, &q), (&xpq, &r))
                            .unwrap()
                            .expect("arrows meet");
                        let left = a
                            .groupoid_compose((&ab.0, &ab.1), (&xpq, &r))
                            .unwrap()
                            .expect("arrows meet");
                        let right = a
                            .groupoid_compose((&x, &p), (&bc.0, &bc.1))
                            .unwrap()
                            .expect("arrows meet");
                        assert_eq!(left, right, "associativity at ({xi},{pi},{qi},{ri})");
                    }
                }
            }
        }
    }
    println!("criterion 02 (groupoid unit, inverse, associativity, involution, intertwiner): PASS");
}

#[test]
fn criterion_03_translator_domain_and_composition_law() {
    let a = units_action();
    let f = indicator(ball(1, 1));
    let v = compute_vf(&a, &f).unwrap();
    let expected = OpenSet::from_cells(vec![ball(0, 1), ball(2, 1)]).unwrap();
    assert_eq!(v.description(), &VfDescription::Cells(expected));

    // Residue brute force: x + p stays a unit for every unit x exactly when
    // p = 0 or 2 mod 3; anything with a denominator leaves the integers.
    for r in 0..27i64 {
        let p = Elt::int(r);
        let want = r % 3 != 1;
        assert_eq!(v.contains(&p), want, "residue {r}");
        assert_eq!(vf_contains(&a, &f, &p).unwrap(), want, "residue {r}");
    }
    for p in [rat(1, 3), rat(2, 3), rat(1, 9), rat(4, 3)] {
        let p = Elt::PAdic(p);
        assert!(!v.contains(&p));
        assert!(!vf_contains(&a, &f, &p).unwrap());
    }

    // Composition law on all transversal pairs at working level 2, with the
    // function equality re-checked pointwise on the unit residues.
    let units: Vec<i64> = (0..9).filter(|r| r % 3 != 0).collect();
    let mut pairs = 0usize;
    for pr in 0..9i64 {
        let p = Elt::int(pr);
        if !v.contains(&p) {
            continue;
        }
        let pf = induced_act(&a, &p, &f).unwrap();
        for qr in 0..9i64 {
            let q = Elt::int(qr);
            let rep = composition_law_check(&a, &f, &p, &q).unwrap();
            assert!(rep.holds(), "composition law fails at p={pr}, q={qr}");
            if rep.functions_equal.is_some() {
                let qp = Elt::int(qr + pr);
                let lhs = induced_act(&a, &qp, &f).unwrap();
                let rhs = induced_act(&a, &q, &pf).unwrap();
                for &x in &units {
                    let x = Elt::int(x);
                    assert_eq!(lhs.evaluate(&x), rhs.evaluate(&x));
                }
            }
            pairs += 1;
        }
    }
    assert_eq!(pairs, 6 * 9);
    println!("criterion 03 (translator domain frozen, composition law on 54 pairs): PASS");
}

#[test]
fn criterion_04_polynomial_detection_frozen_dimensions() {
    let global = PartialAction::right_translation(q3());
    let z3 = SubgroupHandle::Ball { level: 0 };

    let f1 = indicator(ball(0, 0));
    let cert = is_polynomial(&global, &f1, &[z3.clone()]).unwrap().unwrap();
    assert_eq!(cert.dimension(), 1);
    revalidate_for(&global, &cert, &f1).unwrap();

    let f3 = indicator(ball(0, 1));
    let cert = is_polynomial(&global, &f3, &[z3.clone()]).unwrap().unwrap();
    assert_eq!(cert.dimension(), 3);
    revalidate_for(&global, &cert, &f3).unwrap();

    let units = units_action();
    let fu = indicator(ball(1, 1));
    let cert = is_polynomial(&units, &fu, &[SubgroupHandle::Ball { level: 1 }])
        .unwrap()
        .unwrap();
    assert_eq!(cert.dimension(), 1);
    revalidate_for(&units, &cert, &fu).unwrap();

    // The whole integer ball pushes the units support out of the universe:
    // no saturation, hence no certificate through that subgroup.
    assert!(
        saturate(&units, &fu.support().unwrap(), &z3, 4096)
            .unwrap()
            .is_none()
    );
    assert!(is_polynomial(&units, &fu, &[z3]).unwrap().is_none());
    println!("criterion 04 (certificate dimensions 1, 3, 1 and saturation refusal): PASS");
}

#[test]
fn criterion_05_dual_points_and_reconstruction() {
    let global = PartialAction::right_translation(q3());
    let units = units_action();
    let cases: Vec<(&PartialAction, Func, SubgroupHandle)> = vec![
        (&global, indicator(ball(0, 0)), SubgroupHandle::Ball { level: 0 }),
        (&global, indicator(ball(0, 1)), SubgroupHandle::Ball { level: 0 }),
        (&global, indicator(ball(2, 2)), SubgroupHandle::Ball { level: 1 }),
        (&units, indicator(ball(1, 1)), SubgroupHandle::Ball { level: 1 }),
    ];
    for (a, f, g0) in cases {
        let cert = is_polynomial(a, &f, &[g0]).unwrap().expect("certifies");
        let dp = dual_points(&cert.basis).unwrap();
        assert!(dp.verify(&cert.basis));
        // Independent delta identity, evaluated from scratch.
        let n = cert.basis.len();
        for i in 0..n {
            for k in 0..n {
                let mut sum = cyc(0);
                for (j, x) in dp.points.iter().enumerate() {
                    sum = sum.add(&dp.coeffs[j][k].mul(&cert.basis[i].evaluate(x)));
                }
                assert_eq!(sum, cyc(if i == k { 1 } else { 0 }));
            }
        }
        // Reconstruction at every transversal representative and at the
        // identity, which must return f itself bit for bit.
        let (basis, phis) = coefficient_functions(a, &f, &cert).unwrap();
        let mut reps: Vec<Elt> = cert.coefficients.iter().map(|t| t.rep.clone()).collect();
        reps.push(a.group().identity());
        for v in &reps {
            let mut sum = Func::zero(a.space().clone());
            for (fi, phi) in basis.iter().zip(phis.iter()) {
                sum = sum.add(&fi.scale(&phi.evaluate(v))).unwrap();
            }
            assert_eq!(sum, induced_act(a, v, &f).unwrap(), "at rep {v:?}");
        }
        let e = a.group().identity();
        let mut at_e = Func::zero(a.space().clone());
        for (fi, phi) in basis.iter().zip(phis.iter()) {
            at_e = at_e.add(&fi.scale(&phi.evaluate(&e))).unwrap();
        }
        assert_eq!(at_e, f);
    }
    println!("criterion 05 (dual point deltas and coefficient reconstruction): PASS");
}

#[test]
fn criterion_06_isotypic_projectors_and_normalization() {
    // Characters of Z/3 on the level-1 functions over the integer ball.
    let a = PartialAction::right_translation(q3());
    let g0 = SubgroupHandle::Ball { level: 0 };
    let spec = QuotientSpec::Level { base: 0, depth: 1 };
    let irreps = Representation::cyclic_irreps(3);
    for rho in &irreps {
        let report = verify_representation(rho);
        assert!(report.ok() && report.irreducible && report.matches_claim);
    }
    let family: Vec<Func> = (0..3).map(|c| indicator(ball(c, 1))).collect();
    let proj = |j: usize, f: &Func| isotypic_projection(&a, f, &irreps[j], &g0, &spec).unwrap();
    for f in &family {
        let mut total = Func::zero(line());
        for j in 0..3 {
            let pf = proj(j, f);
            assert_eq!(proj(j, &pf), pf, "idempotent");
            for k in 0..3 {
                if k != j {
                    assert!(proj(k, &pf).is_zero(), "mutually annihilating");
                }
            }
            // Projectors commute with every translation of the subgroup.
            for u in [0i64, 1, 2, 3, 4, 9] {
                let u = Elt::int(u);
                assert_eq!(
                    proj(j, &induced_act(&a, &u, f).unwrap()),
                    induced_act(&a, &u, &pf).unwrap()
                );
            }
            total = total.add(&pf).unwrap();
        }
        assert_eq!(&total, f, "projectors sum to the identity");
    }
    let dec = decompose_isotypic(&a, &OpenSet::single(ball(0, 0)), &g0, &spec, &irreps).unwrap();
    assert!(dec.complete);
    assert_eq!(dec.components.len(), 3);
    for comp in &dec.components {
        assert_eq!((comp.dim, comp.multiplicity), (1, 1));
    }

    // The two-dimensional irreducible of the symmetric group: the measured
    // pairing constant is 1/2 under the mass-one measure, and the report
    // flags that it differs from the often-quoted dimension constant 2.
    let s3 = FiniteGroup::symmetric(3);
    let s3_irreps = Representation::s3_irreps();
    let two = s3_irreps.iter().find(|r| r.dim == 2).unwrap();
    let schur = schur_orthogonality(two, two).unwrap();
    assert!(schur.pattern_holds);
    assert_eq!(schur.constant, Cyclotomic::from_rational(rat(1, 2)));
    assert_eq!(schur.reference_constant, cyc(2));
    assert!(!schur.agrees_with_reference);

    // Brute-force matrix oracle on the regular representation: the adopted
    // projector constant is the unique nonzero kappa with P^2 = P.
    let n = s3.order();
    let t_mat = |u: usize| {
        let mut m = Mat::zeros(n, n);
        for h in 0..n {
            *m.at_mut(s3.op(h, s3.inv(u)), h) = cyc(1);
        }
        m
    };
    let chi = two.character();
    let averaged = {
        let mut acc = Mat::zeros(n, n);
        for u in 0..n {
            acc = acc.add(&t_mat(u).scale(&chi[s3.inv(u)]));
        }
        acc.scale(&Cyclotomic::from_rational(rat(1, n as i64)))
    };
    let proj_mat = |kappa: i64| averaged.scale(&cyc(kappa));
    let adopted = proj_mat(2);
    assert_eq!(adopted.mul(&adopted), adopted);
    assert_ne!(adopted, Mat::zeros(n, n));
    for wrong in [1i64, 3, 4, 6] {
        let m = proj_mat(wrong);
        assert_ne!(m.mul(&m), m, "kappa={wrong} must not be idempotent");
    }
    // Trace = dim * multiplicity of the component in the regular module.
    let mut trace = cyc(0);
    for i in 0..n {
        trace = trace.add(adopted.at(i, i));
    }
    assert_eq!(trace, cyc(4));
    // The library projector matches the oracle matrix column by column.
    let reg = PartialAction::right_translation(GroupModel::finite(s3.clone()));
    for h in 0..n {
        let delta = Func::indicator_cell(reg.space().clone(), Cell::FinitePoint(h)).unwrap();
        let pf =
            isotypic_projection(&reg, &delta, two, &SubgroupHandle::Full, &QuotientSpec::Finite)
                .unwrap();
        for i in 0..n {
            assert_eq!(&pf.evaluate(&Elt::Finite(i)), adopted.at(i, h));
        }
    }
    println!("criterion 06 (projector laws, multiplicities, pairing constant, kappa oracle): PASS");
}

#[test]
fn criterion_07_convolution_identities_and_local_units() {
    let padic = ConvolutionContext::new(q3());
    let affine = ConvolutionContext::new(GroupModel::PAdicAffine { p: 3 });

    let unit_ball = indicator(ball(0, 0));
    assert_eq!(convolve(&padic, &unit_ball, &unit_ball).unwrap(), unit_ball);

    let mut rng = gen::rng_from_seed(53);
    for _ in 0..100 {
        let f = gen::random_padic_func(3, &mut rng);
        let g = gen::random_padic_func(3, &mut rng);
        let h = gen::random_padic_func(3, &mut rng);
        let fg = convolve(&padic, &f, &g).unwrap();
        let gh = convolve(&padic, &g, &h).unwrap();
        assert_eq!(
            convolve(&padic, &fg, &h).unwrap(),
            convolve(&padic, &f, &gh).unwrap()
        );
        assert_eq!(
            convolution_star(&padic, &fg).unwrap(),
            convolve(
                &padic,
                &convolution_star(&padic, &g).unwrap(),
                &convolution_star(&padic, &f).unwrap()
            )
            .unwrap()
        );
    }
    for _ in 0..100 {
        let f = gen::random_affine_func(3, &mut rng);
        let g = gen::random_affine_func(3, &mut rng);
        let h = gen::random_affine_func(3, &mut rng);
        let fg = convolve(&affine, &f, &g).unwrap();
        let gh = convolve(&affine, &g, &h).unwrap();
        assert_eq!(
            convolve(&affine, &fg, &h).unwrap(),
            convolve(&affine, &f, &gh).unwrap()
        );
        assert_eq!(
            convolution_star(&affine, &fg).unwrap(),
            convolve(
                &affine,
                &convolution_star(&affine, &g).unwrap(),
                &convolution_star(&affine, &f).unwrap()
            )
            .unwrap()
        );
    }

    // The modular weight is a homomorphism, trivial on the compact open
    // subgroup, and constant on every cell.
    let samples: Vec<Elt> = [(-2i64, rat(1, 3)), (0, rat(0, 1)), (1, rat(5, 1)), (2, rat(1, 9))]
        .into_iter()
        .map(|(k, b)| Elt::affine(k, b))
        .collect();
    for g in &samples {
        for h in &samples {
            let gh = affine.group().op(g, h).unwrap();
            assert_eq!(
                affine.modular(&gh).unwrap(),
                affine.modular(g).unwrap() * affine.modular(h).unwrap()
            );
        }
    }
    for b in [rat(0, 1), rat(1, 1), rat(2, 1), rat(5, 1), rat(9, 1)] {
        assert_eq!(affine.modular(&Elt::affine(0, b)).unwrap(), rat(1, 1));
    }
    for _ in 0..20 {
        let f = gen::random_affine_func(3, &mut rng);
        for (cell, _) in f.terms() {
            let Cell::AffineCell { k, center, level, .. } = cell else {
                panic!("affine function has a foreign cell");
            };
            let mut seen = Vec::new();
            for t in [0i64, 1, 2, -1, 4] {
                let b = center + pow_p(3, *level) * rat(t, 1);
                seen.push(affine.modular(&Elt::affine(*k, b)).unwrap());
            }
            assert!(seen.windows(2).all(|w| w[0] == w[1]), "cellwise constant");
        }
    }

    // Two-sided local units on generated polynomial functions.
    let mut checked = 0usize;
    while checked < 25 {
        let (f, _) = gen::random_polynomial_padic_func(3, &mut rng);
        if f.is_zero() {
            continue;
        }
        let (g, h) = local_unit(&padic, &f).unwrap();
        assert_eq!(convolve(&padic, &g, &f).unwrap(), f);
        assert_eq!(convolve(&padic, &f, &h).unwrap(), f);
        checked += 1;
    }
    while checked < 50 {
        let (f, _) = gen::random_polynomial_affine_func(3, &mut rng);
        if f.is_zero() {
            continue;
        }
        let (g, h) = local_unit(&affine, &f).unwrap();
        assert_eq!(convolve(&affine, &g, &f).unwrap(), f);
        assert_eq!(convolve(&affine, &f, &h).unwrap(), f);
        checked += 1;
    }
    println!("criterion 07 (convolution identities, modular convention, 50 local units): PASS");
}

#[test]
fn criterion_08_polynomial_ideal_and_eigenfunctions() {
    let padic = ConvolutionContext::new(q3());
    let affine = ConvolutionContext::new(GroupModel::PAdicAffine { p: 3 });
    let mut rng = gen::rng_from_seed(59);

    let assert_ideal = |ctx: &ConvolutionContext, fp: &Func, any: &Func| {
        for product in [
            convolve(ctx, fp, any).unwrap(),
            convolve(ctx, any, fp).unwrap(),
        ] {
            if product.is_zero() {
                continue;
            }
            let deepest = func_exponent(&product)
                .max(func_exponent(fp))
                .max(func_exponent(any))
                .max(0)
                + 2;
            let chain = canonical_chain(ctx.group(), deepest);
            let cert = is_polynomial(ctx.action(), &product, &chain)
                .unwrap()
                .expect("products with a polynomial factor stay polynomial");
            revalidate_for(ctx.action(), &cert, &product).unwrap();
        }
    };
    let mut pairs = 0usize;
    while pairs < 25 {
        let (fp, _) = gen::random_polynomial_padic_func(3, &mut rng);
        if fp.is_zero() {
            continue;
        }
        let any = gen::random_padic_func(3, &mut rng);
        assert_ideal(&padic, &fp, &any);
        pairs += 1;
    }
    while pairs < 50 {
        let (fp, _) = gen::random_polynomial_affine_func(3, &mut rng);
        if fp.is_zero() {
            continue;
        }
        let any = gen::random_affine_func(3, &mut rng);
        assert_ideal(&affine, &fp, &any);
        pairs += 1;
    }

    let mut eigen = 0usize;
    while eigen < 20 {
        let (f, xi) = gen::random_eigen_pair(3, &mut rng);
        if xi.is_zero() {
            continue;
        }
        let report = eigen_polynomial_check(&padic, &f, &xi).unwrap();
        assert!(report.hypothesis_holds, "constructed pair must satisfy f*xi = xi");
        assert!(report.implication_ok);
        assert!(report.certificate.is_some());
        eigen += 1;
    }
    println!("criterion 08 (two-sided polynomial ideal on 50 pairs, 20 eigen instances): PASS");
}

#[test]
fn criterion_09_product_decomposition_suite() {
    let global = PartialAction::right_translation(q3());
    let units = units_action();

    // Pointwise oracle on the full level-2 grid, outliers included.
    let grid: Vec<Elt> = (-9..18i64)
        .map(Elt::int)
        .chain([Elt::PAdic(rat(1, 3)), Elt::PAdic(rat(2, 3)), Elt::PAdic(rat(1, 9))])
        .collect();
    let sweep = |a: &PartialAction, f: &Func, g: &Func, expected_rank: usize| {
        let d = decompose_product(a, f, g).unwrap();
        assert_eq!(d.pairs.len(), expected_rank);
        for x in &grid {
            for p in &grid {
                let direct = match a.act(x, p) {
                    Ok(Some(xp)) => f.evaluate(&xp).mul(&g.evaluate(p)),
                    _ => cyc(0),
                };
                let joint = d.function.evaluate(&Elt::pair(x.clone(), p.clone()));
                assert_eq!(joint, direct, "joint function at ({x:?},{p:?})");
                let mut tensor = cyc(0);
                for (fi, gi) in &d.pairs {
                    tensor = tensor.add(&fi.evaluate(x).mul(&gi.evaluate(p)));
                }
                assert_eq!(tensor, direct, "tensor sum at ({x:?},{p:?})");
            }
        }
        d
    };

    let f = indicator(ball(0, 0));
    let g = indicator(ball(0, 0));
    let d = sweep(&global, &f, &g, 1);
    let verdict = converse_polynomiality(&global, &d.pairs, &g).unwrap();
    assert!(verdict.holds());
    assert_eq!(verdict.reconstructed, Some(f.clone()));
    revalidate_for(&global, &verdict.certificate.as_ref().unwrap(), &f).unwrap();
    // The joint function is polynomial for both coordinate actions.
    let chain = vec![SubgroupHandle::Ball { level: 0 }];
    let first = global.first_factor(line());
    let cert = is_polynomial(&first, &d.function, &chain).unwrap().unwrap();
    revalidate_for(&first, &cert, &d.function).unwrap();
    let second = PartialAction::second_factor(line(), &global);
    let cert = is_polynomial(&second, &d.function, &chain).unwrap().unwrap();
    revalidate_for(&second, &cert, &d.function).unwrap();

    let fu = indicator(ball(1, 1));
    let gu = indicator(ball(0, 1));
    let d = sweep(&units, &fu, &gu, 1);
    let verdict = converse_polynomiality(&units, &d.pairs, &gu).unwrap();
    assert!(verdict.holds());
    assert_eq!(verdict.reconstructed, Some(fu.clone()));
    let chain = vec![SubgroupHandle::Ball { level: 1 }];
    let first = units.first_factor(line());
    let cert = is_polynomial(&first, &d.function, &chain).unwrap().unwrap();
    revalidate_for(&first, &cert, &d.function).unwrap();
    println!("criterion 09 (exact tensor decomposition, converse, joint polynomiality): PASS");
}

#[test]
fn criterion_10_subgroup_lifting_and_joint_certificates() {
    let global = PartialAction::right_translation(q3());
    let h = SubgroupHandle::Ball { level: 0 };
    let f = indicator(ball(0, 1));
    let out = lift_subgroup_polynomiality(&global, &h, &f).unwrap();
    let cert = out.certificate.expect("translation lifts");
    assert_eq!(cert.dimension(), 3);
    revalidate_for(&global, &cert, &f).unwrap();

    let trivial = PartialAction::trivial(line(), q3());
    let out = lift_subgroup_polynomiality(&trivial, &h, &f).unwrap();
    assert!(out.certificate.is_none());
    assert!(out.diagnostics[0].contains("locally homeomorphic"));

    let s3 = FiniteGroup::symmetric(3);
    let gm = GroupModel::finite(s3.clone());
    let two_sided = PartialAction::commuting_product_exhaustive(
        PartialAction::left_translation(gm.clone()),
        PartialAction::right_translation(gm.clone()),
    )
    .unwrap();
    let (l, r) = two_sided.commuting_factors().unwrap();
    let delta = Func::indicator_cell(gm.as_space(), Cell::FinitePoint(s3.identity())).unwrap();
    let cert_l = is_polynomial(l, &delta, &[SubgroupHandle::Full]).unwrap().unwrap();
    let cert_r = is_polynomial(r, &delta, &[SubgroupHandle::Full]).unwrap().unwrap();
    let joint = joint_polynomiality(&two_sided, &delta, &cert_l, &cert_r).unwrap();
    assert_eq!(joint.dimension(), 6);
    revalidate_for(&two_sided, &joint, &delta).unwrap();

    let probes = ProbeSet {
        points: vec![Elt::int(0), Elt::int(1), Elt::int(2)],
        translators: vec![
            Elt::pair(Elt::int(1), Elt::int(1)),
            Elt::pair(Elt::int(2), Elt::int(-1)),
        ],
    };
    let two_sided = PartialAction::commuting_product(
        PartialAction::left_translation(q3()),
        PartialAction::right_translation(q3()),
        &probes,
    )
    .unwrap();
    let (l, r) = two_sided.commuting_factors().unwrap();
    let fz = indicator(ball(0, 1));
    let z3 = SubgroupHandle::Ball { level: 0 };
    let cert_l = is_polynomial(l, &fz, &[z3.clone()]).unwrap().unwrap();
    let cert_r = is_polynomial(r, &fz, &[z3]).unwrap().unwrap();
    let joint = joint_polynomiality(&two_sided, &fz, &cert_l, &cert_r).unwrap();
    assert_eq!(joint.dimension(), 3);
    revalidate_for(&two_sided, &joint, &fz).unwrap();
    println!("criterion 10 (subgroup lift with control, joint certificates): PASS");
}
