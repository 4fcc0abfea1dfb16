//! One function per subcommand. Each builds the scenario's objects, runs
//! the requested operation, sweeps the laws that make sense for it and
//! returns a Report; exit-code policy lives in main.

use serde_json::{json, Value};

use polyact::action::{AxiomViolation, PartialAction, ProbeSet};
use polyact::algebras::{
    convolution_star, convolve, eigen_polynomial_check, local_unit, ConvolutionContext,
};
use polyact::func::Func;
use polyact::gen;
use polyact::group::GroupModel;
use polyact::induced::{composition_law_check, compute_vf, induced_act, vf_contains};
use polyact::isotypic::{
    decompose_isotypic, isotypic_projection, projection_normalization, schur_orthogonality,
    verify_representation,
};
use polyact::poly::{
    canonical_chain, coefficient_functions, decompose_product, dual_points, func_exponent,
    is_polynomial, revalidate_for, converse_polynomiality,
};
use polyact::space::{Cell, Elt, SpaceModel};
use polyact::{Error, Result};

use crate::report::{law, LawResult, Report};
use crate::scenario::Scenario;

fn probe_set(sc: &Scenario, a: &PartialAction) -> Result<ProbeSet> {
    if let Some(p) = &sc.probes {
        return Ok(p.clone());
    }
    ProbeSet::exhaustive(a).ok_or_else(|| {
        Error::Malformed("infinite models need explicit probes in the scenario".into())
    })
}

pub fn verify_axioms(sc: &Scenario) -> Result<Report> {
    let a = sc.build_action()?;
    let probes = probe_set(sc, &a)?;
    let sweep = a.check_axioms(&probes);
    let mut report = Report::new("verify-axioms", &sc.name);

    let mut counts = [0usize; 4];
    let mut first: [Option<Value>; 4] = [None, None, None, None];
    for v in &sweep.violations {
        let slot = match v {
            AxiomViolation::IdentityOutsideDomain { .. } => 0,
            AxiomViolation::IdentityMoves { .. } => 1,
            AxiomViolation::IffBroken { .. } => 2,
            AxiomViolation::CompositionMismatch { .. } => 3,
        };
        counts[slot] += 1;
        if first[slot].is_none() {
            first[slot] = Some(serde_json::to_value(v).expect("violations are plain data"));
        }
    }
    let names = [
        law::AXIOM_IDENTITY_DOMAIN,
        law::AXIOM_IDENTITY_FIXES,
        law::AXIOM_COMPATIBILITY,
        law::AXIOM_COMPOSITION,
    ];
    for i in 0..4 {
        let scope = if i < 2 {
            format!("{} points", sweep.points_checked)
        } else {
            format!("{} triples", sweep.triples_checked)
        };
        let detail = if counts[i] == 0 {
            scope
        } else {
            format!("{} violations over {}", counts[i], scope)
        };
        report
            .laws
            .push(LawResult::checked(names[i], counts[i] == 0, detail, first[i].take()));
    }

    let (gamma_law, intertwiner_law) = groupoid_laws(&a, &probes)?;
    report.laws.push(gamma_law);
    report.laws.push(intertwiner_law);

    report.result = json!({
        "points_checked": sweep.points_checked,
        "triples_checked": sweep.triples_checked,
        "violations": sweep.violations,
    });
    Ok(report)
}

// gamma is an involution of the graph, and it exchanges the two derived
// actions: gamma((x,p) <1 q) = gamma(x,p) <2 q, definedness included.
fn groupoid_laws(a: &PartialAction, probes: &ProbeSet) -> Result<(LawResult, LawResult)> {
    let d1 = a.derived_first();
    let d2 = a.derived_second();
    let mut arrows = 0usize;
    let mut invol_bad = None;
    let mut inter = 0usize;
    let mut inter_bad = None;
    for x in &probes.points {
        if !a.space().contains(x) || !a.valid_point(x) {
            continue;
        }
        for p in &probes.translators {
            if !a.group().contains(p) || !a.in_domain(x, p)? {
                continue;
            }
            arrows += 1;
            let (y, pinv) = a.gamma_map(x, p)?;
            let back = a.gamma_map(&y, &pinv)?;
            if invol_bad.is_none() && back != (x.clone(), p.clone()) {
                invol_bad = Some(json!({"x": x, "p": p, "round_trip": back}));
            }
            let gpair = Elt::pair(y.clone(), pinv.clone());
            let pair = Elt::pair(x.clone(), p.clone());
            for q in &probes.translators {
                if !a.group().contains(q) {
                    continue;
                }
                inter += 1;
                let lhs = match d1.act(&pair, q)? {
                    Some(Elt::Pair(xq, qp)) => Some(a.gamma_map(&xq, &qp)?),
                    Some(other) => {
                        return Err(Error::Malformed(format!(
                            "derived action produced a non-pair {other:?}"
                        )))
                    }
                    None => None,
                };
                let rhs = match d2.act(&gpair, q)? {
                    Some(Elt::Pair(u, v)) => Some((*u, *v)),
                    Some(other) => {
                        return Err(Error::Malformed(format!(
                            "derived action produced a non-pair {other:?}"
                        )))
                    }
                    None => None,
                };
                if inter_bad.is_none() && lhs != rhs {
                    inter_bad =
                        Some(json!({"x": x, "p": p, "q": q, "lhs": lhs, "rhs": rhs}));
                }
            }
        }
    }
    let invol = LawResult::checked(
        law::GROUPOID_INVOLUTION,
        invol_bad.is_none(),
        format!("{arrows} arrows"),
        invol_bad,
    );
    let intertwiner = LawResult::checked(
        law::GROUPOID_INTERTWINER,
        inter_bad.is_none(),
        format!("{inter} composable probes"),
        inter_bad,
    );
    Ok((invol, intertwiner))
}

pub fn vf(sc: &Scenario) -> Result<Report> {
    let a = sc.build_action()?;
    let f = sc.function("f")?;
    let v = compute_vf(&a, f)?;
    let mut report = Report::new("vf", &sc.name);

    let translators: Vec<Elt> = match &sc.probes {
        Some(p) => p.translators.clone(),
        None => a
            .group()
            .as_space()
            .finite_point_cells()
            .map(|cells| cells.iter().map(polyact::space::cell_sample_point).collect())
            .unwrap_or_default(),
    };
    if !translators.is_empty() {
        let mut bad = None;
        for p in &translators {
            let direct = vf_contains(&a, f, p)?;
            if bad.is_none() && direct != v.contains(p) {
                bad = Some(json!({"p": p, "pointwise": direct, "set": v.contains(p)}));
            }
        }
        report.laws.push(LawResult::checked(
            law::VF_MEMBERSHIP,
            bad.is_none(),
            format!("{} translators", translators.len()),
            bad,
        ));

        let mut pairs = 0usize;
        let mut comp_bad = None;
        for p in &translators {
            if !vf_contains(&a, f, p)? {
                continue;
            }
            for q in &translators {
                pairs += 1;
                let check = composition_law_check(&a, f, p, q)?;
                if comp_bad.is_none() && !check.holds() {
                    comp_bad = Some(json!({"p": p, "q": q, "report": check}));
                }
            }
        }
        report.laws.push(LawResult::checked(
            law::VF_COMPOSITION,
            comp_bad.is_none(),
            format!("{pairs} pairs"),
            comp_bad,
        ));
    }

    report.result = json!({ "vf": v });
    Ok(report)
}

pub fn poly_check(sc: &Scenario) -> Result<Report> {
    let a = sc.build_action()?;
    let f = sc.function("f")?;
    let chain = if sc.chain.is_empty() {
        canonical_chain(a.group(), sc.depth())
    } else {
        sc.chain.clone()
    };
    let mut report = Report::new("poly-check", &sc.name);
    let found = is_polynomial(&a, f, &chain)?;
    match found {
        None => {
            report.result = json!({ "found": false, "chain_length": chain.len() });
        }
        Some(cert) => {
            let reval = revalidate_for(&a, &cert, f);
            report.laws.push(match &reval {
                Ok(()) => LawResult::pass(law::POLY_REVALIDATION, "independent revalidation"),
                Err(e) => LawResult::fail(law::POLY_REVALIDATION, e.to_string(), None),
            });

            let duals = dual_points(&cert.basis)?;
            report.laws.push(LawResult::checked(
                law::POLY_DUAL_POINTS,
                duals.verify(&cert.basis),
                format!("{} evaluation points", duals.points.len()),
                None,
            ));

            let (basis, phis) = coefficient_functions(&a, f, &cert)?;
            let mut recon_bad = None;
            let mut checked = 0usize;
            let e = a.group().identity();
            let mut at: Vec<Elt> = cert.coefficients.iter().map(|t| t.rep.clone()).collect();
            at.push(e);
            for u in &at {
                checked += 1;
                let mut sum = Func::zero(a.space().clone());
                for (b, phi) in basis.iter().zip(phis.iter()) {
                    sum = sum.add(&b.scale(&phi.evaluate(u)))?;
                }
                let direct = induced_act(&a, u, f)?;
                if recon_bad.is_none() && sum != direct {
                    recon_bad = Some(json!({"u": u}));
                }
            }
            report.laws.push(LawResult::checked(
                law::POLY_RECONSTRUCTION,
                recon_bad.is_none(),
                format!("{checked} translators, identity included"),
                recon_bad,
            ));

            report.result = json!({
                "found": true,
                "dimension": cert.dimension(),
                "certificate": cert,
            });
        }
    }
    Ok(report)
}

pub fn decompose(sc: &Scenario) -> Result<Report> {
    let a = sc.build_action()?;
    let f = sc.function("f")?;
    let g = sc.function("g")?;
    let d = decompose_product(&a, f, g)?;
    let mut report = Report::new("decompose", &sc.name);

    // Exact tensor reconstruction: sum f_i (x) g_i as one canonical
    // function on X x G and compare representations.
    let prod_space = SpaceModel::product(a.space().clone(), a.group().as_space());
    let mut terms: Vec<(Cell, polyact::Cyclotomic)> = Vec::new();
    for (fi, gi) in &d.pairs {
        for (cx, vx) in fi.terms() {
            for (cp, vp) in gi.terms() {
                terms.push((Cell::pair(cx.clone(), cp.clone()), vx.mul(vp)));
            }
        }
    }
    let tensor = Func::from_terms(prod_space, terms)?;
    report.laws.push(LawResult::checked(
        law::DECOMP_RECONSTRUCTION,
        tensor == d.function,
        format!("{} pure tensors", d.pairs.len()),
        None,
    ));

    let verdict = converse_polynomiality(&a, &d.pairs, g)?;
    report.laws.push(LawResult::checked(
        law::DECOMP_CONVERSE,
        verdict.holds(),
        "certificate recovered from the tensor data",
        Some(json!(verdict.diagnostics)),
    ));

    report.result = json!({
        "rank": d.pairs.len(),
        "function": d.function,
        "pairs": d.pairs,
        "converse_dimension": verdict.certificate.as_ref().map(|c| c.dimension()),
    });
    Ok(report)
}

pub fn isotypic(sc: &Scenario) -> Result<Report> {
    let a = sc.build_action()?;
    let g0 = sc
        .params
        .subgroup
        .clone()
        .ok_or_else(|| Error::Malformed("isotypic scenarios need params.subgroup".into()))?;
    let spec = sc
        .params
        .quotient
        .clone()
        .ok_or_else(|| Error::Malformed("isotypic scenarios need params.quotient".into()))?;
    let family = sc
        .params
        .irreps
        .ok_or_else(|| Error::Malformed("isotypic scenarios need params.irreps".into()))?;
    let reps = family.representations();
    let mut report = Report::new("isotypic", &sc.name);

    let mut rep_bad = None;
    let mut rep_rows = Vec::new();
    for (i, r) in reps.iter().enumerate() {
        let check = verify_representation(r);
        if rep_bad.is_none() && !(check.ok() && check.matches_claim) {
            rep_bad = Some(json!({"index": i}));
        }
        rep_rows.push(json!({
            "index": i,
            "dim": r.dim,
            "character_norm": check.character_norm,
            "irreducible": check.irreducible,
        }));
    }
    report.laws.push(LawResult::checked(
        law::ISO_REPRESENTATION,
        rep_bad.is_none(),
        format!("{} representations", reps.len()),
        rep_bad,
    ));

    let mut schur_rows = Vec::new();
    let mut schur_bad = None;
    for i in 0..reps.len() {
        for j in i..reps.len() {
            let s = schur_orthogonality(&reps[i], &reps[j])?;
            if schur_bad.is_none() && !s.pattern_holds {
                schur_bad = Some(json!({"left": i, "right": j}));
            }
            schur_rows.push(json!({
                "left": i,
                "right": j,
                "equivalent": s.equivalent,
                "constant": s.constant,
                "reference_constant": s.reference_constant,
                "agrees_with_reference": s.agrees_with_reference,
            }));
        }
    }
    report.laws.push(LawResult::checked(
        law::ISO_SCHUR_PATTERN,
        schur_bad.is_none(),
        format!("{} pairings", schur_rows.len()),
        schur_bad,
    ));

    let normalization: Vec<Value> = reps
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let n = projection_normalization(r);
            json!({
                "index": i,
                "adopted_constant": n.adopted_constant,
                "reference_constant": n.reference_constant,
                "agrees_with_reference": n.agrees_with_reference,
            })
        })
        .collect();

    let mut result = json!({
        "representations": rep_rows,
        "schur": schur_rows,
        "normalization": normalization,
    });

    if let Some(set) = &sc.params.set {
        let d = decompose_isotypic(&a, set, &g0, &spec, &reps)?;
        report.laws.push(LawResult::checked(
            law::ISO_COMPLETENESS,
            d.complete,
            "projector images span the working level",
            None,
        ));
        result["components"] = json!(d
            .components
            .iter()
            .map(|c| json!({"dim": c.dim, "multiplicity": c.multiplicity}))
            .collect::<Vec<_>>());
    }

    if let Ok(f) = sc.function("f") {
        let mut proj_bad = None;
        let mut sum = Func::zero(a.space().clone());
        let mut images = Vec::new();
        for (i, r) in reps.iter().enumerate() {
            let pf = isotypic_projection(&a, f, r, &g0, &spec)?;
            let ppf = isotypic_projection(&a, &pf, r, &g0, &spec)?;
            if proj_bad.is_none() && ppf != pf {
                proj_bad = Some(json!({"index": i, "failure": "not idempotent"}));
            }
            sum = sum.add(&pf)?;
            images.push(pf);
        }
        if proj_bad.is_none() && sum != *f {
            proj_bad = Some(json!({"failure": "projections do not sum back to f"}));
        }
        report.laws.push(LawResult::checked(
            law::ISO_PROJECTORS,
            proj_bad.is_none(),
            format!("{} projectors on f", reps.len()),
            proj_bad,
        ));
        result["projections"] = json!(images);
    }

    report.result = result;
    Ok(report)
}

pub fn convolve_cmd(sc: &Scenario) -> Result<Report> {
    let a = sc.build_action()?;
    let ctx = ConvolutionContext::new(a.group().clone());
    let f = sc.function("f")?;
    let g = sc.function("g")?;
    let mut report = Report::new("convolve", &sc.name);

    let product = convolve(&ctx, f, g)?;

    let lhs = convolution_star(&ctx, &product)?;
    let rhs = convolve(
        &ctx,
        &convolution_star(&ctx, g)?,
        &convolution_star(&ctx, f)?,
    )?;
    report.laws.push(LawResult::checked(
        law::CONV_STAR,
        lhs == rhs,
        "(f*g)^* = g^* * f^*",
        None,
    ));

    if let Ok(h) = sc.function("h") {
        let assoc_l = convolve(&ctx, &product, h)?;
        let assoc_r = convolve(&ctx, f, &convolve(&ctx, g, h)?)?;
        report.laws.push(LawResult::checked(
            law::CONV_ASSOCIATIVITY,
            assoc_l == assoc_r,
            "(f*g)*h = f*(g*h)",
            None,
        ));
    }

    report.result = json!({ "product": product });
    Ok(report)
}

pub fn local_unit_cmd(sc: &Scenario) -> Result<Report> {
    let a = sc.build_action()?;
    let ctx = ConvolutionContext::new(a.group().clone());
    let f = sc.function("f")?;
    let (gl, gr) = local_unit(&ctx, f)?;
    let mut report = Report::new("local-unit", &sc.name);
    report.laws.push(LawResult::checked(
        law::CONV_LEFT_UNIT,
        convolve(&ctx, &gl, f)? == *f,
        "g * f = f",
        None,
    ));
    report.laws.push(LawResult::checked(
        law::CONV_RIGHT_UNIT,
        convolve(&ctx, f, &gr)? == *f,
        "f * g = f",
        None,
    ));
    report.result = json!({ "left": gl, "right": gr });
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Finite,
    Padic,
    Affine,
}

impl Family {
    fn name(&self) -> &'static str {
        match self {
            Family::Finite => "finite",
            Family::Padic => "padic",
            Family::Affine => "affine",
        }
    }
}

// Aggregates one law across many generated instances.
struct Tally {
    law: &'static str,
    checked: usize,
    failures: usize,
    first: Option<Value>,
}

impl Tally {
    fn new(law: &'static str) -> Tally {
        Tally {
            law,
            checked: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, instance: &str, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(json!({"instance": instance, "witness": witness()}));
            }
        }
    }

    fn into_law(self) -> LawResult {
        LawResult::checked(
            self.law,
            self.failures == 0,
            format!("{} checks, {} failures", self.checked, self.failures),
            self.first,
        )
    }
}

pub fn suite(family: Family, count: u32, seed: u64) -> Result<Report> {
    let mut report = Report::new("suite", family.name());
    report.seed = Some(seed);
    let mut rng = gen::rng_from_seed(seed);
    report.laws = match family {
        Family::Finite => finite_suite(count, &mut rng)?,
        Family::Padic => convolution_suite(count, &mut rng, false)?,
        Family::Affine => convolution_suite(count, &mut rng, true)?,
    };
    report.result = json!({ "family": family.name(), "count": count });
    Ok(report)
}

fn finite_suite(count: u32, rng: &mut gen::ChaCha8Rng) -> Result<Vec<LawResult>> {
    let mut clean = Tally::new(law::SUITE_CLEAN);
    let mut invol = Tally::new(law::GROUPOID_INVOLUTION);
    let mut inter = Tally::new(law::GROUPOID_INTERTWINER);
    let mut fault = Tally::new(law::SUITE_FAULT);
    for i in 0..count {
        let name = format!("finite-{i:04}");
        let inst = gen::random_global_action(rng);
        let base = inst.action()?;
        let mut variants: Vec<PartialAction> = vec![base.clone()];
        for _ in 0..3 {
            let y = gen::random_open_subset(&inst.space(), rng)?;
            variants.push(base.restrict_to_open(y)?);
        }
        variants.push(base.derived_first());
        variants.push(base.derived_second());
        let mut dirty = None;
        for (vi, v) in variants.iter().enumerate() {
            let probes = ProbeSet::exhaustive(v)
                .ok_or_else(|| Error::Unsupported("finite instances probe exhaustively".into()))?;
            let sweep = v.check_axioms(&probes);
            if dirty.is_none() && !sweep.is_clean() {
                dirty = Some(json!({"variant": vi, "violations": sweep.violations.len()}));
            }
        }
        clean.record(&name, dirty.is_none(), || dirty.clone().unwrap_or(Value::Null));

        let probes = ProbeSet::exhaustive(&base).expect("finite");
        let (ga, gi) = groupoid_laws(&base, &probes)?;
        invol.record(&name, ga.holds, || ga.witness.clone().unwrap_or(Value::Null));
        inter.record(&name, gi.holds, || gi.witness.clone().unwrap_or(Value::Null));

        if let Some((bad, f)) = gen::inject_fault(&inst, rng) {
            let a = bad.action()?;
            let probes = ProbeSet::exhaustive(&a).expect("finite");
            let detected = !a.check_axioms(&probes).is_clean();
            fault.record(&name, detected, || json!({ "fault": f }));
        }
    }
    Ok(vec![
        clean.into_law(),
        invol.into_law(),
        inter.into_law(),
        fault.into_law(),
    ])
}

fn convolution_suite(
    count: u32,
    rng: &mut gen::ChaCha8Rng,
    affine: bool,
) -> Result<Vec<LawResult>> {
    let p = 3;
    let group = if affine {
        GroupModel::PAdicAffine { p }
    } else {
        GroupModel::PAdicAdditive { p }
    };
    let ctx = ConvolutionContext::new(group.clone());
    let mut assoc = Tally::new(law::CONV_ASSOCIATIVITY);
    let mut star = Tally::new(law::CONV_STAR);
    let mut left_unit = Tally::new(law::CONV_LEFT_UNIT);
    let mut right_unit = Tally::new(law::CONV_RIGHT_UNIT);
    let mut ideal = Tally::new(law::CONV_IDEAL);
    let mut eigen = Tally::new(law::CONV_EIGEN);
    for i in 0..count {
        let name = format!("{}-{i:04}", if affine { "affine" } else { "padic" });
        let rand_func = |rng: &mut gen::ChaCha8Rng| {
            if affine {
                gen::random_affine_func(p, rng)
            } else {
                gen::random_padic_func(p, rng)
            }
        };
        let f = rand_func(rng);
        let g = rand_func(rng);
        let h = rand_func(rng);

        let fg = convolve(&ctx, &f, &g)?;
        let assoc_ok = convolve(&ctx, &fg, &h)? == convolve(&ctx, &f, &convolve(&ctx, &g, &h)?)?;
        assoc.record(&name, assoc_ok, || json!({"f": f, "g": g, "h": h}));

        let star_ok = convolution_star(&ctx, &fg)?
            == convolve(
                &ctx,
                &convolution_star(&ctx, &g)?,
                &convolution_star(&ctx, &f)?,
            )?;
        star.record(&name, star_ok, || json!({"f": f, "g": g}));

        let (fp, _m) = if affine {
            gen::random_polynomial_affine_func(p, rng)
        } else {
            gen::random_polynomial_padic_func(p, rng)
        };
        if !fp.is_zero() {
            let (gl, gr) = local_unit(&ctx, &fp)?;
            left_unit.record(&name, convolve(&ctx, &gl, &fp)? == fp, || json!({"f": fp}));
            right_unit.record(&name, convolve(&ctx, &fp, &gr)? == fp, || json!({"f": fp}));

            let product = convolve(&ctx, &fp, &g)?;
            let deepest = func_exponent(&product)
                .max(func_exponent(&g))
                .max(func_exponent(&fp))
                .max(0)
                + 2;
            let chain = canonical_chain(&group, deepest);
            let ideal_ok = product.is_zero()
                || is_polynomial(ctx.action(), &product, &chain)?.is_some();
            ideal.record(&name, ideal_ok, || json!({"product": product}));
        }

        if !affine {
            let (unit, xi) = gen::random_eigen_pair(p, rng);
            if !xi.is_zero() {
                let check = eigen_polynomial_check(&ctx, &unit, &xi)?;
                let ok = check.hypothesis_holds && check.implication_ok;
                eigen.record(&name, ok, || json!({"xi": xi}));
            }
        }
    }
    let mut out = vec![
        assoc.into_law(),
        star.into_law(),
        left_unit.into_law(),
        right_unit.into_law(),
        ideal.into_law(),
    ];
    if !affine {
        out.push(eigen.into_law());
    }
    Ok(out)
}
