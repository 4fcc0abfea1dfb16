//! Regenerates the scenario documents shipped in scenarios/ at the
//! workspace root. Run with `cargo run -p polyact-cli --example gen_scenarios`
//! after changing the schema or the catalogue below.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use num_bigint::BigInt;

use polyact::action::ProbeSet;
use polyact::func::Func;
use polyact::group::{FiniteGroup, GroupModel, SubgroupHandle};
use polyact::isotypic::QuotientSpec;
use polyact::space::{Cell, Elt, OpenSet, SpaceModel};
use polyact::Rational;
use polyact_cli::scenario::{ActionDescriptor, IrrepFamily, Params, Scenario, SCHEMA_VERSION};

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn ball(center: i64, level: i64) -> Cell {
    Cell::ball(3, &rat(center, 1), level)
}

fn acell(k: i64, center: Rational, level: i64) -> Cell {
    Cell::affine_cell(3, k, &center, level)
}

fn q3() -> GroupModel {
    GroupModel::PAdicAdditive { p: 3 }
}

fn right_q3() -> ActionDescriptor {
    ActionDescriptor::RightTranslation { group: q3() }
}

/// The group of units in Z3, modelled as the two cosets 1+3Z3 and 2+3Z3
/// with multiplication delegated to additive translation on the line.
fn units_action() -> ActionDescriptor {
    ActionDescriptor::RestrictOpen {
        base: Box::new(right_q3()),
        y: OpenSet::from_cells(vec![ball(1, 1), ball(2, 1)]).unwrap(),
    }
}

fn scenario(name: &str, action: ActionDescriptor) -> Scenario {
    Scenario {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        action,
        functions: BTreeMap::new(),
        chain: Vec::new(),
        probes: None,
        params: Params::default(),
    }
}

/// Builds the action and attaches an indicator function for each named cell,
/// so every function is guaranteed to live in the action's point space.
fn with_indicators(mut sc: Scenario, cells: &[(&str, Cell)]) -> Scenario {
    let space = sc
        .build_action()
        .expect("catalogue actions must build")
        .space()
        .clone();
    for (name, cell) in cells {
        let f = Func::indicator_cell(space.clone(), cell.clone()).expect("cell fits the space");
        sc.functions.insert((*name).to_string(), f);
    }
    sc
}

fn catalogue() -> Vec<(&'static str, Scenario)> {
    let mut out = Vec::new();

    // verify-axioms: a finite global action, swept exhaustively.
    out.push((
        "finite_dihedral_translation",
        scenario(
            "right translation of the dihedral group of order 8 on itself",
            ActionDescriptor::RightTranslation {
                group: GroupModel::finite(FiniteGroup::dihedral(4)),
            },
        ),
    ));

    // verify-axioms: a hand-written partial table. The swap is undefined on
    // the third point, which is exactly the situation the laws constrain.
    out.push(("finite_partial_swap", {
        let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        scenario(
            "an order-2 swap of two points, undefined on a third",
            ActionDescriptor::FiniteTable {
                space: SpaceModel::FinitePoints { labels },
                group: GroupModel::finite(FiniteGroup::cyclic(2)),
                table: vec![
                    vec![Some(0), Some(1)],
                    vec![Some(1), Some(0)],
                    vec![Some(2), None],
                ],
            },
        )
    }));

    // verify-axioms on a derived action over an infinite model: the probe
    // points are pairs (x, p) with x a unit and p a translator.
    out.push(("derived_pairs_probe", {
        let mut sc = scenario(
            "first derived action of the restricted translation on units",
            ActionDescriptor::DerivedFirst {
                base: Box::new(units_action()),
            },
        );
        let mut points = Vec::new();
        for x in [1i64, 2, 4, 5] {
            for p in [0i64, 1, 3, 6] {
                points.push(Elt::pair(Elt::int(x), Elt::int(p)));
            }
        }
        sc.probes = Some(ProbeSet {
            points,
            translators: vec![Elt::int(0), Elt::int(1), Elt::int(3), Elt::int(-3), Elt::int(7)],
        });
        sc
    }));

    // vf: translator domain of an indicator under the units action.
    out.push(("units_vf", {
        let mut sc = with_indicators(
            scenario(
                "translator domain of the coset indicator on the units",
                units_action(),
            ),
            &[("f", ball(1, 1))],
        );
        sc.probes = Some(ProbeSet {
            points: [1i64, 2, 4, 5, 7, 8].iter().map(|&x| Elt::int(x)).collect(),
            translators: (-3i64..=9)
                .map(Elt::int)
                .chain([Elt::PAdic(rat(1, 3)), Elt::PAdic(rat(2, 3))])
                .collect(),
        });
        sc
    }));

    // poly-check: one-dimensional certificate on the units.
    out.push(("units_poly", {
        let mut sc = with_indicators(
            scenario(
                "polynomiality of the coset indicator over the level-1 ball",
                units_action(),
            ),
            &[("f", ball(1, 1))],
        );
        sc.chain = vec![SubgroupHandle::Ball { level: 1 }];
        sc
    }));

    // poly-check: three translates of the depth-1 ball under the full group.
    out.push(("global_ball_poly", {
        let mut sc = with_indicators(
            scenario(
                "polynomiality of the depth-1 ball indicator under translation",
                right_q3(),
            ),
            &[("f", ball(0, 1))],
        );
        sc.chain = vec![SubgroupHandle::Ball { level: 0 }];
        sc
    }));

    // isotypic: regular representation of the symmetric group on 3 letters.
    out.push(("s3_regular_isotypic", {
        let mut sc = scenario(
            "isotypic decomposition of the regular representation on 6 points",
            ActionDescriptor::RightTranslation {
                group: GroupModel::finite(FiniteGroup::symmetric(3)),
            },
        );
        let space = sc.build_action().unwrap().space().clone();
        let all = space.finite_point_cells().unwrap();
        sc.functions.insert(
            "f".to_string(),
            Func::indicator_cell(space, Cell::FinitePoint(0)).unwrap(),
        );
        sc.params.subgroup = Some(SubgroupHandle::Full);
        sc.params.quotient = Some(QuotientSpec::Finite);
        sc.params.irreps = Some(IrrepFamily::Symmetric3);
        sc.params.set = Some(OpenSet::from_cells(all).unwrap());
        sc
    }));

    // isotypic: level quotient of the additive group, cyclic characters.
    out.push(("z3_level_isotypic", {
        let mut sc = with_indicators(
            scenario(
                "character decomposition over the depth-1 level quotient",
                right_q3(),
            ),
            &[("f", ball(0, 1))],
        );
        sc.params.subgroup = Some(SubgroupHandle::Ball { level: 0 });
        sc.params.quotient = Some(QuotientSpec::Level { base: 0, depth: 1 });
        sc.params.irreps = Some(IrrepFamily::Cyclic { n: 3 });
        sc.params.set = Some(OpenSet::single(ball(0, 0)));
        sc
    }));

    // convolve: the unit ball is an idempotent of mass one.
    out.push((
        "padic_convolve",
        with_indicators(
            scenario("convolution of unit-ball indicators on the line", right_q3()),
            &[("f", ball(0, 0)), ("g", ball(0, 0)), ("h", ball(1, 1))],
        ),
    ));

    // convolve: a noncommutative example with a nontrivial modular weight.
    out.push((
        "affine_convolve",
        with_indicators(
            scenario(
                "convolution on the affine group of the line",
                ActionDescriptor::RightTranslation {
                    group: GroupModel::PAdicAffine { p: 3 },
                },
            ),
            &[
                ("f", acell(1, rat(0, 1), 0)),
                ("g", acell(1, rat(0, 1), 0)),
                ("h", acell(0, rat(0, 1), 0)),
            ],
        ),
    ));

    // local-unit: the coset indicator is flanked by the normalized ball.
    out.push((
        "padic_local_unit",
        with_indicators(
            scenario("two-sided local unit for a coset indicator", right_q3()),
            &[("f", ball(1, 1))],
        ),
    ));

    // decompose: a rank-one product over the full translation action.
    out.push((
        "global_decompose",
        with_indicators(
            scenario("rank-one decomposition over the full translation", right_q3()),
            &[("f", ball(0, 0)), ("g", ball(0, 0))],
        ),
    ));

    // decompose: the restricted variant; g must be supported on translators.
    out.push((
        "units_decompose",
        with_indicators(
            scenario("decomposition over the restricted units action", units_action()),
            &[("f", ball(1, 1)), ("g", ball(0, 1))],
        ),
    ));

    out
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root");
    let dir = root.join("scenarios");
    fs::create_dir_all(&dir).expect("create scenarios/");
    for (stem, sc) in catalogue() {
        let path = dir.join(format!("{stem}.json"));
        let mut text = serde_json::to_string_pretty(&sc).expect("scenario serializes");
        text.push('\n');
        // Round-trip through the loader so a shipped file can never drift
        // from what the binary accepts.
        Scenario::from_json(&text).expect("generated scenario must load");
        fs::write(&path, text).expect("write scenario");
        println!("wrote {}", path.display());
    }
}
