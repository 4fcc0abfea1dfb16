//! Seeded instance generators for the verification suites: finite global
//! actions assembled from coset spaces, open-set restrictions, table fault
//! injection, and random locally constant functions on the p-adic models.
//! Everything is driven by a ChaCha stream so a seed fixes the corpus.

use rand::Rng;
use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::PartialAction;
use crate::func::Func;
use crate::group::{FiniteGroup, GroupModel};
use crate::scalar::{rat, rat_int, Cyclotomic, Rational};
use crate::space::{Cell, OpenSet, SpaceModel};
use crate::{Error, Result};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A finite global action kept with its raw table so independent law
/// sweeps can read the same data the action reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteInstance {
    pub group: FiniteGroup,
    pub labels: Vec<String>,
    pub table: Vec<Vec<Option<usize>>>,
}

impl FiniteInstance {
    pub fn space(&self) -> SpaceModel {
        SpaceModel::FinitePoints {
            labels: self.labels.clone(),
        }
    }

    pub fn action(&self) -> Result<PartialAction> {
        PartialAction::finite_table(
            self.space(),
            GroupModel::finite(self.group.clone()),
            self.table.clone(),
        )
    }
}

/// A group of order at most 24 from the catalog, seed-determined.
pub fn random_finite_group(rng: &mut ChaCha8Rng) -> FiniteGroup {
    match rng.gen_range(0..6u32) {
        0 => FiniteGroup::cyclic(rng.gen_range(1..=24)),
        1 => FiniteGroup::dihedral(rng.gen_range(1..=12)),
        2 => FiniteGroup::symmetric(rng.gen_range(2..=4)),
        3 => FiniteGroup::quaternion(),
        4 => {
            let a = rng.gen_range(2..=6);
            let b = rng.gen_range(2..=(24 / a));
            FiniteGroup::product(&FiniteGroup::cyclic(a), &FiniteGroup::cyclic(b))
        }
        _ => FiniteGroup::dihedral(rng.gen_range(1..=12)).opposite(),
    }
}

/// Element indices of the subgroup generated by the given elements.
pub fn subgroup_closure(g: &FiniteGroup, gens: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; g.order()];
    seen[g.identity()] = true;
    let mut stack = vec![g.identity()];
    while let Some(a) = stack.pop() {
        for &s in gens {
            for b in [g.op(a, s), g.op(a, g.inv(s))] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    (0..g.order()).filter(|&i| seen[i]).collect()
}

pub fn random_subgroup(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let count = rng.gen_range(0..=2usize);
    let gens: Vec<usize> = (0..count).map(|_| rng.gen_range(0..g.order())).collect();
    subgroup_closure(g, &gens)
}

// One orbit of the right action on right cosets Hg, Hg.p = H(gp). Returns
// (coset representative per element, sorted representatives).
fn coset_structure(g: &FiniteGroup, h: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut rep_of = vec![usize::MAX; g.order()];
    for x in 0..g.order() {
        if rep_of[x] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = h.iter().map(|&a| g.op(a, x)).collect();
        members.sort_unstable();
        let rep = members[0];
        for m in members {
            rep_of[m] = rep;
        }
    }
    let mut reps: Vec<usize> = rep_of.clone();
    reps.sort_unstable();
    reps.dedup();
    (rep_of, reps)
}

/// A global action of a random catalog group on at most 12 points, built
/// as a disjoint union of coset orbits. Global means the table is total
/// and every translator permutes the points.
pub fn random_global_action(rng: &mut ChaCha8Rng) -> FiniteInstance {
    let group = random_finite_group(rng);
    let order = group.order();
    let budget = 12usize;
    let mut labels: Vec<String> = Vec::new();
    let mut table: Vec<Vec<Option<usize>>> = Vec::new();
    let orbit_count = rng.gen_range(1..=3u32);
    for oi in 0..orbit_count {
        let remaining = budget - labels.len();
        if remaining == 0 {
            break;
        }
        let mut h = random_subgroup(&group, rng);
        if order / h.len() > remaining {
            // Too wide for the budget: collapse the orbit to a fixed point.
            h = (0..order).collect();
        }
        let (rep_of, reps) = coset_structure(&group, &h);
        let base = labels.len();
        let index_of = |r: usize| base + reps.binary_search(&r).expect("rep listed");
        for &r in &reps {
            labels.push(format!("o{oi}g{r}"));
            table.push(Vec::with_capacity(order));
        }
        for (j, &r) in reps.iter().enumerate() {
            for p in 0..order {
                table[base + j].push(Some(index_of(rep_of[group.op(r, p)])));
            }
        }
    }
    if labels.is_empty() {
        labels.push("o0g0".into());
        table.push(vec![Some(0); order]);
    }
    FiniteInstance {
        group,
        labels,
        table,
    }
}

/// A nonempty open subset of a finite point space.
pub fn random_open_subset(space: &SpaceModel, rng: &mut ChaCha8Rng) -> Result<OpenSet> {
    let cells = space.finite_point_cells().ok_or_else(|| {
        Error::Unsupported("random subsets need a finite point space".into())
    })?;
    let mut chosen: Vec<Cell> = cells
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect();
    if chosen.is_empty() {
        chosen.push(cells[rng.gen_range(0..cells.len())].clone());
    }
    OpenSet::from_cells(chosen)
}

/// What was tampered with in a seeded-fault instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fault {
    /// table[x][e] now names a different point.
    IdentityMoved { x: usize },
    /// table[x][g], g != e, now names a different point.
    EntryRewritten { x: usize, g: usize },
    /// table[x][g], g != e, is gone; the domain is no longer closed.
    EntryDeleted { x: usize, g: usize },
}

/// Tampers one table cell of a global instance. None when the instance is
/// too small to admit a detectable fault (a single point can only be
/// deleted, and a trivial group has no non-identity column).
pub fn inject_fault(
    inst: &FiniteInstance,
    rng: &mut ChaCha8Rng,
) -> Option<(FiniteInstance, Fault)> {
    let n = inst.labels.len();
    let order = inst.group.order();
    let e = inst.group.identity();
    let mut out = inst.clone();
    let x = rng.gen_range(0..n);
    let kind = rng.gen_range(0..3u32);
    match kind {
        0 if n >= 2 => {
            let y = (x + 1 + rng.gen_range(0..n - 1)) % n;
            out.table[x][e] = Some(y);
            Some((out, Fault::IdentityMoved { x }))
        }
        1 if n >= 2 && order >= 2 => {
            let g = pick_non_identity(order, e, rng);
            let old = inst.table[x][g].expect("global table is total");
            let y = (old + 1 + rng.gen_range(0..n - 1)) % n;
            out.table[x][g] = Some(y);
            Some((out, Fault::EntryRewritten { x, g }))
        }
        2 if order >= 2 => {
            let g = pick_non_identity(order, e, rng);
            // In an order-2 group, deleting an entry fixed by g leaves a
            // lawful restriction with nothing to detect.
            if order == 2 && inst.table[x][g] == Some(x) {
                return None;
            }
            out.table[x][g] = None;
            Some((out, Fault::EntryDeleted { x, g }))
        }
        _ => None,
    }
}

fn pick_non_identity(order: usize, e: usize, rng: &mut ChaCha8Rng) -> usize {
    let g = rng.gen_range(0..order - 1);
    if g >= e {
        g + 1
    } else {
        g
    }
}

// Small exact palette; indices beyond the roots wrap to integers.
fn random_value(rng: &mut ChaCha8Rng) -> Cyclotomic {
    match rng.gen_range(0..6u32) {
        0 => Cyclotomic::from_int(1),
        1 => Cyclotomic::from_int(2),
        2 => Cyclotomic::from_int(-1),
        3 => Cyclotomic::zeta(3),
        4 => Cyclotomic::zeta(4),
        _ => Cyclotomic::from_rational(rat(1, 2)),
    }
}

fn random_ball(p: u32, rng: &mut ChaCha8Rng) -> Cell {
    let level = rng.gen_range(0..=2i64);
    let denom = Rational::from_integer(i64::from(p).into());
    let numer = rat_int(rng.gen_range(0..(i64::from(p).pow(3))));
    // Centers of the form a/p land outside Z_p now and then.
    let center = if rng.gen_bool(0.25) {
        numer / denom
    } else {
        numer
    };
    Cell::ball(p, &center, level)
}

/// A random compactly supported locally constant function on Q_p: a few
/// scaled ball indicators, overlaps allowed (they add).
pub fn random_padic_func(p: u32, rng: &mut ChaCha8Rng) -> Func {
    let space = SpaceModel::PAdicLine { p };
    let terms: Vec<(Cell, Cyclotomic)> = (0..rng.gen_range(1..=3usize))
        .map(|_| (random_ball(p, rng), random_value(rng)))
        .collect();
    Func::from_terms(space, terms).expect("ball terms are well-formed")
}

fn random_affine_cell(p: u32, rng: &mut ChaCha8Rng) -> Cell {
    let k = rng.gen_range(-1..=1i64);
    let level = rng.gen_range(0..=2i64);
    let center = rat_int(rng.gen_range(0..(i64::from(p).pow(2))));
    Cell::affine_cell(p, k, &center, level)
}

/// A random compactly supported locally constant function on the affine
/// group p^Z x| Q_p.
pub fn random_affine_func(p: u32, rng: &mut ChaCha8Rng) -> Func {
    let space = SpaceModel::AffineSpace { p };
    let terms: Vec<(Cell, Cyclotomic)> = (0..rng.gen_range(1..=3usize))
        .map(|_| (random_affine_cell(p, rng), random_value(rng)))
        .collect();
    Func::from_terms(space, terms).expect("affine terms are well-formed")
}

/// A function invariant under right translation by the level-m ball, hence
/// polynomial for the right translation action: a combination of level-m
/// cell indicators inside one compact window.
pub fn random_polynomial_padic_func(p: u32, rng: &mut ChaCha8Rng) -> (Func, i64) {
    let m = rng.gen_range(0..=2i64);
    let space = SpaceModel::PAdicLine { p };
    let window = i64::from(p).pow(m as u32);
    let count = rng.gen_range(1..=3usize);
    let terms: Vec<(Cell, Cyclotomic)> = (0..count)
        .map(|_| {
            let c = rat_int(rng.gen_range(0..window));
            (Cell::ball(p, &c, m), random_value(rng))
        })
        .collect();
    (
        Func::from_terms(space, terms).expect("ball terms are well-formed"),
        m,
    )
}

/// Affine analogue: cells {p^k} x (c + p^level Z_p) with level <= k + m are
/// invariant under right translation by {1} x p^m Z_p.
pub fn random_polynomial_affine_func(p: u32, rng: &mut ChaCha8Rng) -> (Func, i64) {
    let m = rng.gen_range(0..=2i64);
    let space = SpaceModel::AffineSpace { p };
    let count = rng.gen_range(1..=2usize);
    let terms: Vec<(Cell, Cyclotomic)> = (0..count)
        .map(|_| {
            let k = rng.gen_range(-1..=1i64);
            let level = (k + m).min(rng.gen_range(0..=2i64));
            let center = rat_int(rng.gen_range(0..(i64::from(p).pow(2))));
            (Cell::affine_cell(p, k, &center, level), random_value(rng))
        })
        .collect();
    (
        Func::from_terms(space, terms).expect("affine terms are well-formed"),
        m,
    )
}

/// An exact fixed-point pair for convolution: f is the mass-one unit of
/// the level-m ball and xi is invariant under it, so f * xi = xi.
pub fn random_eigen_pair(p: u32, rng: &mut ChaCha8Rng) -> (Func, Func) {
    let (xi, m) = random_polynomial_padic_func(p, rng);
    let space = SpaceModel::PAdicLine { p };
    let unit = Func::indicator_cell(space, Cell::ball(p, &rat_int(0), m))
        .expect("ball indicator")
        .scale(&Cyclotomic::from_rational(crate::space::pow_p(p, m)));
    (unit, xi)
}
