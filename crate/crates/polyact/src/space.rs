//! Points, basic compact open cells and space models.
//!
//! A `Cell` is a basic compact open subset: a point of a finite set, a ball
//! `c + p^k Z_p`, a one-slot affine piece `{p^k} x (c + p^m Z_p)`, or a
//! product of cells. Ball centers are kept canonical (the unique
//! representative in [0, p^level) with denominator a power of p), so equal
//! cells are structurally equal. `OpenSet` is a finite disjoint union of
//! cells in merged, sorted normal form; two presentations of the same set
//! normalize to the same value.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{format_rational, parse_rational, Rational};
use crate::Error;

/// p-adic valuation; None for zero (valuation +infinity).
pub fn vp(r: &Rational, p: u32) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |mut n: BigInt| -> i64 {
        let mut v = 0;
        n = n.abs();
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        v
    };
    Some(count(r.numer().clone()) - count(r.denom().clone()))
}

/// True when `r` lies in `p^level Z_p`.
pub fn in_ball_at_origin(r: &Rational, p: u32, level: i64) -> bool {
    vp(r, p).map_or(true, |v| v >= level)
}

fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "inverse exists for units only");
    e.x.mod_floor(m)
}

/// Canonical representative of `c + p^level Z_p`: the unique r in
/// [0, p^level) with a pure p-power denominator and v_p(c - r) >= level.
pub fn canonical_ball_center(c: &Rational, p: u32, level: i64) -> Rational {
    if in_ball_at_origin(c, p, level) {
        return Rational::zero();
    }
    let pb = BigInt::from(p);
    // Write c = a / (p^s d') with gcd(d', p) = 1 and s >= 0 minimal.
    let s = (-vp(c, p).unwrap()).max(0);
    let scale = pb.pow(s as u32);
    let scaled = c * Rational::from_integer(scale.clone());
    // v_p(scaled) >= 0, so its denominator d' is coprime to p.
    let modulus = pb.pow((level + s) as u32);
    let a = scaled.numer().mod_floor(&modulus);
    let d_inv = modinv(scaled.denom(), &modulus);
    let residue = (a * d_inv).mod_floor(&modulus);
    Rational::new(residue, scale)
}

/// A point of a space (or an element of a group; the same data serves both).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Elt {
    Finite(usize),
    PAdic(Rational),
    /// (p^k, b) in the affine group, stored by the exponent k.
    Affine { k: i64, b: Rational },
    Pair(Box<Elt>, Box<Elt>),
}

impl Elt {
    pub fn int(n: i64) -> Elt {
        Elt::PAdic(Rational::from_integer(BigInt::from(n)))
    }

    pub fn pair(a: Elt, b: Elt) -> Elt {
        Elt::Pair(Box::new(a), Box::new(b))
    }

    pub fn affine(k: i64, b: Rational) -> Elt {
        Elt::Affine { k, b }
    }
}

impl fmt::Display for Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elt::Finite(i) => write!(f, "#{i}"),
            Elt::PAdic(r) => write!(f, "{}", format_rational(r)),
            Elt::Affine { k, b } => write!(f, "(p^{k}, {})", format_rational(b)),
            Elt::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

/// Basic compact open cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cell {
    FinitePoint(usize),
    Ball {
        p: u32,
        /// Canonical: in [0, p^level), denominator a power of p.
        center: Rational,
        level: i64,
    },
    /// {p^k} x (center + p^level Z_p) inside the affine group.
    AffineCell {
        p: u32,
        k: i64,
        center: Rational,
        level: i64,
    },
    Pair(Box<Cell>, Box<Cell>),
}

impl Cell {
    pub fn ball(p: u32, center: &Rational, level: i64) -> Cell {
        Cell::Ball {
            p,
            center: canonical_ball_center(center, p, level),
            level,
        }
    }

    pub fn affine_cell(p: u32, k: i64, center: &Rational, level: i64) -> Cell {
        Cell::AffineCell {
            p,
            k,
            center: canonical_ball_center(center, p, level),
            level,
        }
    }

    pub fn pair(a: Cell, b: Cell) -> Cell {
        Cell::Pair(Box::new(a), Box::new(b))
    }

    pub fn contains_point(&self, x: &Elt) -> bool {
        match (self, x) {
            (Cell::FinitePoint(i), Elt::Finite(j)) => i == j,
            (Cell::Ball { p, center, level }, Elt::PAdic(r)) => {
                in_ball_at_origin(&(r - center), *p, *level)
            }
            (
                Cell::AffineCell {
                    p,
                    k,
                    center,
                    level,
                },
                Elt::Affine { k: ek, b },
            ) => ek == k && in_ball_at_origin(&(b - center), *p, *level),
            (Cell::Pair(c1, c2), Elt::Pair(a, b)) => {
                c1.contains_point(a) && c2.contains_point(b)
            }
            _ => false,
        }
    }

    pub fn is_subset_of(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::FinitePoint(i), Cell::FinitePoint(j)) => i == j,
            (
                Cell::Ball { p, center, level },
                Cell::Ball {
                    p: p2,
                    center: c2,
                    level: l2,
                },
            ) => p == p2 && level >= l2 && in_ball_at_origin(&(center - c2), *p, *l2),
            (
                Cell::AffineCell {
                    p,
                    k,
                    center,
                    level,
                },
                Cell::AffineCell {
                    p: p2,
                    k: k2,
                    center: c2,
                    level: l2,
                },
            ) => {
                p == p2
                    && k == k2
                    && level >= l2
                    && in_ball_at_origin(&(center - c2), *p, *l2)
            }
            (Cell::Pair(a1, a2), Cell::Pair(b1, b2)) => {
                a1.is_subset_of(b1) && a2.is_subset_of(b2)
            }
            _ => false,
        }
    }

    pub fn is_disjoint_from(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::FinitePoint(i), Cell::FinitePoint(j)) => i != j,
            (
                Cell::Ball { p, center, level },
                Cell::Ball {
                    p: p2,
                    center: c2,
                    level: l2,
                },
            ) => {
                debug_assert_eq!(p, p2, "cells from one space share p");
                // Two balls are nested or disjoint.
                !in_ball_at_origin(&(center - c2), *p, *(level.min(l2)))
            }
            (
                Cell::AffineCell {
                    p,
                    k,
                    center,
                    level,
                },
                Cell::AffineCell {
                    p: p2,
                    k: k2,
                    center: c2,
                    level: l2,
                },
            ) => {
                debug_assert_eq!(p, p2);
                k != k2 || !in_ball_at_origin(&(center - c2), *p, *(level.min(l2)))
            }
            (Cell::Pair(a1, a2), Cell::Pair(b1, b2)) => {
                a1.is_disjoint_from(b1) || a2.is_disjoint_from(b2)
            }
            _ => true,
        }
    }

    /// Immediate refinement: p subcells for ball-like cells, the cross
    /// product of coordinate refinements for pairs, the cell itself for
    /// finite points.
    pub fn split(&self) -> Vec<Cell> {
        match self {
            Cell::FinitePoint(_) => vec![self.clone()],
            Cell::Ball { level, .. } => self.subcells_at_level(level + 1),
            Cell::AffineCell { level, .. } => self.subcells_at_level(level + 1),
            Cell::Pair(a, b) => {
                let mut out = Vec::new();
                for sa in a.split() {
                    for sb in b.split() {
                        out.push(Cell::pair(sa.clone(), sb));
                    }
                }
                out
            }
        }
    }

    /// The p^(target - level) subcells at the finer level (ball-like cells
    /// only).
    pub fn subcells_at_level(&self, target: i64) -> Vec<Cell> {
        match self {
            Cell::Ball { p, center, level } => {
                assert!(target >= *level);
                let n = (*p as u64).pow((target - level) as u32);
                let step = pow_p(*p, *level);
                (0..n)
                    .map(|j| Cell::Ball {
                        p: *p,
                        center: center + &step * Rational::from_integer(BigInt::from(j)),
                        level: target,
                    })
                    .collect()
            }
            Cell::AffineCell {
                p,
                k,
                center,
                level,
            } => {
                assert!(target >= *level);
                let n = (*p as u64).pow((target - level) as u32);
                let step = pow_p(*p, *level);
                (0..n)
                    .map(|j| Cell::AffineCell {
                        p: *p,
                        k: *k,
                        center: center + &step * Rational::from_integer(BigInt::from(j)),
                        level: target,
                    })
                    .collect()
            }
            _ => panic!("subcells_at_level applies to ball-like cells"),
        }
    }

    /// Parent cell one level up, when one exists (ball-like cells).
    fn parent(&self) -> Option<Cell> {
        match self {
            Cell::Ball { p, center, level } => Some(Cell::ball(*p, center, level - 1)),
            Cell::AffineCell {
                p,
                k,
                center,
                level,
            } => Some(Cell::affine_cell(*p, *k, center, level - 1)),
            _ => None,
        }
    }

    fn modulus(&self) -> Option<u32> {
        match self {
            Cell::Ball { p, .. } | Cell::AffineCell { p, .. } => Some(*p),
            _ => None,
        }
    }
}

/// p^k as an exact rational, k of either sign.
pub fn pow_p(p: u32, k: i64) -> Rational {
    let pk = BigInt::from(p).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        Rational::from_integer(pk)
    } else {
        Rational::new(BigInt::one(), pk)
    }
}

// Coordinate paths address the atomic cells inside a Pair tree; an empty
// path addresses an atom directly.

fn coordinate_paths(c: &Cell) -> Vec<Vec<u8>> {
    match c {
        Cell::Pair(a, b) => {
            let mut out = Vec::new();
            for mut path in coordinate_paths(a) {
                path.insert(0, 0);
                out.push(path);
            }
            for mut path in coordinate_paths(b) {
                path.insert(0, 1);
                out.push(path);
            }
            out
        }
        _ => vec![Vec::new()],
    }
}

fn coord<'c>(c: &'c Cell, path: &[u8]) -> &'c Cell {
    match (c, path.split_first()) {
        (_, None) => c,
        (Cell::Pair(a, b), Some((&head, rest))) => {
            coord(if head == 0 { a } else { b }, rest)
        }
        _ => panic!("path does not match cell shape"),
    }
}

fn with_coord(c: &Cell, path: &[u8], replacement: Cell) -> Cell {
    match (c, path.split_first()) {
        (_, None) => replacement,
        (Cell::Pair(a, b), Some((&head, rest))) => {
            if head == 0 {
                Cell::pair(with_coord(a, rest, replacement), (**b).clone())
            } else {
                Cell::pair((**a).clone(), with_coord(b, rest, replacement))
            }
        }
        _ => panic!("path does not match cell shape"),
    }
}

/// Merges every complete family of p equal-valued sibling cells into its
/// parent, coordinate by coordinate (rightmost coordinate first), until no
/// merge applies. Input cells must be pairwise disjoint.
pub fn merge_siblings<V: Clone + PartialEq>(mut terms: Vec<(Cell, V)>) -> Vec<(Cell, V)> {
    let Some(first) = terms.first() else {
        return terms;
    };
    let mut paths = coordinate_paths(&first.0);
    paths.reverse();
    loop {
        let mut changed = false;
        for path in &paths {
            loop {
                let Some(idx) = find_mergeable(&terms, path) else {
                    break;
                };
                changed = true;
                apply_merge(&mut terms, path, idx);
            }
        }
        if !changed {
            break;
        }
    }
    terms
}

// Looks for an index whose cell belongs to a complete sibling family along
// `path`; returns the indices of the family.
fn find_mergeable<V: Clone + PartialEq>(
    terms: &[(Cell, V)],
    path: &[u8],
) -> Option<Vec<usize>> {
    for (i, (cell, value)) in terms.iter().enumerate() {
        let atom = coord(cell, path);
        let Some(parent) = atom.parent() else {
            continue;
        };
        let p = atom.modulus().unwrap() as usize;
        let siblings = parent.subcells_at_level(match atom {
            Cell::Ball { level, .. } | Cell::AffineCell { level, .. } => *level,
            _ => unreachable!(),
        });
        let template = |sib: &Cell| with_coord(cell, path, sib.clone());
        let mut family = Vec::with_capacity(p);
        for sib in &siblings {
            let wanted = template(sib);
            match terms
                .iter()
                .position(|(c, v)| *c == wanted && *v == *value)
            {
                Some(j) => family.push(j),
                None => break,
            }
        }
        if family.len() == p {
            debug_assert!(family.contains(&i));
            return Some(family);
        }
    }
    None
}

fn apply_merge<V: Clone + PartialEq>(
    terms: &mut Vec<(Cell, V)>,
    path: &[u8],
    mut family: Vec<usize>,
) {
    family.sort_unstable();
    let (cell, value) = terms[family[0]].clone();
    let parent = coord(&cell, path).parent().unwrap();
    let merged = with_coord(&cell, path, parent);
    for &idx in family.iter().rev() {
        terms.remove(idx);
    }
    terms.push((merged, value));
}

/// Finite union of cells in canonical form: pairwise disjoint, maximally
/// merged, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OpenSetRepr", into = "OpenSetRepr")]
pub struct OpenSet {
    cells: Vec<Cell>,
}

impl OpenSet {
    pub fn empty() -> OpenSet {
        OpenSet { cells: Vec::new() }
    }

    pub fn from_cells(cells: Vec<Cell>) -> Result<OpenSet, Error> {
        let cells = disjointify(cells)?;
        let mut cells: Vec<Cell> = merge_siblings(cells.into_iter().map(|c| (c, ())).collect())
            .into_iter()
            .map(|(c, ())| c)
            .collect();
        cells.sort();
        Ok(OpenSet { cells })
    }

    pub fn single(cell: Cell) -> OpenSet {
        OpenSet { cells: vec![cell] }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, x: &Elt) -> bool {
        self.cells.iter().any(|c| c.contains_point(x))
    }

    pub fn union(&self, other: &OpenSet) -> Result<OpenSet, Error> {
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        OpenSet::from_cells(cells)
    }

    pub fn locate(&self, c: &Cell) -> SetRelation {
        cell_vs_cells(c, &self.cells)
    }
}

/// Rewrites a finite family of cells as a pairwise disjoint family with the
/// same union (absorbing nested cells, refining partial overlaps).
pub fn disjointify(mut cells: Vec<Cell>) -> Result<Vec<Cell>, Error> {
    let mut guard = 0;
    'outer: loop {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::Unsupported(
                "cell family too irregular to disjointify".into(),
            ));
        }
        // Absorb cells contained in other cells (covers duplicates).
        let mut i = 0;
        while i < cells.len() {
            let absorbed = cells
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && cells[i].is_subset_of(other) && !(j > i && other == &cells[i]));
            if absorbed {
                cells.remove(i);
            } else {
                i += 1;
            }
        }
        // Partial overlaps (possible for product cells only): refine both
        // cells to their joined per-coordinate levels and restart.
        for i in 0..cells.len() {
            for j in (i + 1)..cells.len() {
                if cells[i].is_disjoint_from(&cells[j]) {
                    continue;
                }
                let a = cells[i].clone();
                let b = cells[j].clone();
                let mut replaced: Vec<Cell> = Vec::new();
                for (k, c) in cells.into_iter().enumerate() {
                    if k != i && k != j {
                        replaced.push(c);
                    }
                }
                replaced.extend(refine_pair_to_common(&a, &b)?);
                cells = replaced;
                continue 'outer;
            }
        }
        cells.sort();
        return Ok(cells);
    }
}

/// Refines two same-shape cells to their coordinatewise maximum levels, so
/// every resulting piece of one is equal to or disjoint from every piece of
/// the other. Returns the refinements of `a` and of `b` separately.
pub fn joint_refinement(a: &Cell, b: &Cell) -> Result<(Vec<Cell>, Vec<Cell>), Error> {
    match (a, b) {
        (Cell::Pair(a1, a2), Cell::Pair(b1, b2)) => {
            let (fa1, fb1) = joint_refinement(a1, b1)?;
            let (fa2, fb2) = joint_refinement(a2, b2)?;
            let cross = |firsts: &[Cell], seconds: &[Cell]| -> Vec<Cell> {
                let mut out = Vec::new();
                for f in firsts {
                    for s in seconds {
                        out.push(Cell::pair(f.clone(), s.clone()));
                    }
                }
                out
            };
            Ok((cross(&fa1, &fa2), cross(&fb1, &fb2)))
        }
        (Cell::Ball { level: la, .. }, Cell::Ball { level: lb, .. })
        | (Cell::AffineCell { level: la, .. }, Cell::AffineCell { level: lb, .. }) => {
            let join = (*la).max(*lb);
            Ok((a.subcells_at_level(join), b.subcells_at_level(join)))
        }
        (Cell::FinitePoint(_), Cell::FinitePoint(_)) => {
            Ok((vec![a.clone()], vec![b.clone()]))
        }
        _ => Err(Error::Unsupported(
            "cells of mismatched shape in one family".into(),
        )),
    }
}

/// The intersection of two cells as a disjoint cell family (possibly empty).
pub fn cell_intersection(a: &Cell, b: &Cell) -> Result<Vec<Cell>, Error> {
    if a.is_disjoint_from(b) {
        return Ok(Vec::new());
    }
    if a.is_subset_of(b) {
        return Ok(vec![a.clone()]);
    }
    if b.is_subset_of(a) {
        return Ok(vec![b.clone()]);
    }
    let (fa, _) = joint_refinement(a, b)?;
    Ok(fa.into_iter().filter(|c| c.is_subset_of(b)).collect())
}

/// How a cell sits relative to another set of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetRelation {
    Inside,
    Disjoint,
    Straddles,
}

/// Relation of `c` to the union of a pairwise disjoint cell family. Decided
/// exactly by refining `c` down to the family's granularity, so the family
/// does not need to be in merged normal form.
pub fn cell_vs_cells(c: &Cell, cells: &[Cell]) -> SetRelation {
    let mut saw_in = false;
    let mut saw_out = false;
    let mut stack = vec![c.clone()];
    while let Some(piece) = stack.pop() {
        if saw_in && saw_out {
            break;
        }
        if cells.iter().any(|u| piece.is_subset_of(u)) {
            saw_in = true;
        } else if cells.iter().all(|u| piece.is_disjoint_from(u)) {
            saw_out = true;
        } else {
            // piece strictly contains some member; splitting converges to
            // the members' levels.
            stack.extend(piece.split());
        }
    }
    match (saw_in, saw_out) {
        (true, false) => SetRelation::Inside,
        (false, true) => SetRelation::Disjoint,
        _ => SetRelation::Straddles,
    }
}

/// The unique point of a point-like cell (finite points and pairs of them).
pub fn cell_point(c: &Cell) -> Option<Elt> {
    match c {
        Cell::FinitePoint(i) => Some(Elt::Finite(*i)),
        Cell::Pair(a, b) => Some(Elt::pair(cell_point(a)?, cell_point(b)?)),
        _ => None,
    }
}

/// Some point inside the cell (its canonical corner).
pub fn cell_sample_point(c: &Cell) -> Elt {
    match c {
        Cell::FinitePoint(i) => Elt::Finite(*i),
        Cell::Ball { center, .. } => Elt::PAdic(center.clone()),
        Cell::AffineCell { k, center, .. } => Elt::Affine {
            k: *k,
            b: center.clone(),
        },
        Cell::Pair(a, b) => Elt::pair(cell_sample_point(a), cell_sample_point(b)),
    }
}

// For two overlapping product cells, refines both to the coordinatewise
// maximum level so the pieces are grid-aligned (and hence nested or equal).
fn refine_pair_to_common(a: &Cell, b: &Cell) -> Result<Vec<Cell>, Error> {
    let (mut fa, fb) = joint_refinement(a, b)?;
    for c in fb {
        if !fa.contains(&c) {
            fa.push(c);
        }
    }
    Ok(fa)
}

/// The shape of a space: what its points look like and which cells fit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceModel {
    FinitePoints { labels: Vec<String> },
    PAdicLine { p: u32 },
    AffineSpace { p: u32 },
    Product { left: Box<SpaceModel>, right: Box<SpaceModel> },
}

impl SpaceModel {
    pub fn product(a: SpaceModel, b: SpaceModel) -> SpaceModel {
        SpaceModel::Product {
            left: Box::new(a),
            right: Box::new(b),
        }
    }

    pub fn contains(&self, x: &Elt) -> bool {
        match (self, x) {
            (SpaceModel::FinitePoints { labels }, Elt::Finite(i)) => *i < labels.len(),
            (SpaceModel::PAdicLine { .. }, Elt::PAdic(_)) => true,
            (SpaceModel::AffineSpace { .. }, Elt::Affine { .. }) => true,
            (SpaceModel::Product { left, right }, Elt::Pair(a, b)) => {
                left.contains(a) && right.contains(b)
            }
            _ => false,
        }
    }

    pub fn admits_cell(&self, c: &Cell) -> bool {
        match (self, c) {
            (SpaceModel::FinitePoints { labels }, Cell::FinitePoint(i)) => *i < labels.len(),
            (SpaceModel::PAdicLine { p }, Cell::Ball { p: cp, .. }) => p == cp,
            (SpaceModel::AffineSpace { p }, Cell::AffineCell { p: cp, .. }) => p == cp,
            (SpaceModel::Product { left, right }, Cell::Pair(a, b)) => {
                left.admits_cell(a) && right.admits_cell(b)
            }
            _ => false,
        }
    }

    /// Every point as a cell, for finite (hence compact) spaces.
    pub fn finite_point_cells(&self) -> Option<Vec<Cell>> {
        match self {
            SpaceModel::FinitePoints { labels } => {
                Some((0..labels.len()).map(Cell::FinitePoint).collect())
            }
            SpaceModel::Product { left, right } => {
                let ls = left.finite_point_cells()?;
                let rs = right.finite_point_cells()?;
                let mut out = Vec::new();
                for l in &ls {
                    for r in &rs {
                        out.push(Cell::pair(l.clone(), r.clone()));
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }
}

// Serde mirrors: rationals travel as "p/q" strings.

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum EltRepr {
    Finite { index: usize },
    Padic { value: String },
    Affine { k: i64, b: String },
    Pair { left: Box<EltRepr>, right: Box<EltRepr> },
}

impl From<Elt> for EltRepr {
    fn from(e: Elt) -> Self {
        match e {
            Elt::Finite(i) => EltRepr::Finite { index: i },
            Elt::PAdic(r) => EltRepr::Padic {
                value: format_rational(&r),
            },
            Elt::Affine { k, b } => EltRepr::Affine {
                k,
                b: format_rational(&b),
            },
            Elt::Pair(a, b) => EltRepr::Pair {
                left: Box::new((*a).into()),
                right: Box::new((*b).into()),
            },
        }
    }
}

impl TryFrom<EltRepr> for Elt {
    type Error = Error;
    fn try_from(r: EltRepr) -> Result<Elt, Error> {
        Ok(match r {
            EltRepr::Finite { index } => Elt::Finite(index),
            EltRepr::Padic { value } => Elt::PAdic(parse_rational(&value)?),
            EltRepr::Affine { k, b } => Elt::Affine {
                k,
                b: parse_rational(&b)?,
            },
            EltRepr::Pair { left, right } => {
                Elt::pair((*left).try_into()?, (*right).try_into()?)
            }
        })
    }
}

impl Serialize for Elt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EltRepr::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Elt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        EltRepr::deserialize(d)?.try_into().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CellRepr {
    FinitePoint {
        index: usize,
    },
    Ball {
        p: u32,
        center: String,
        level: i64,
    },
    AffineCell {
        p: u32,
        k: i64,
        center: String,
        level: i64,
    },
    Pair {
        left: Box<CellRepr>,
        right: Box<CellRepr>,
    },
}

impl From<Cell> for CellRepr {
    fn from(c: Cell) -> Self {
        match c {
            Cell::FinitePoint(i) => CellRepr::FinitePoint { index: i },
            Cell::Ball { p, center, level } => CellRepr::Ball {
                p,
                center: format_rational(&center),
                level,
            },
            Cell::AffineCell {
                p,
                k,
                center,
                level,
            } => CellRepr::AffineCell {
                p,
                k,
                center: format_rational(&center),
                level,
            },
            Cell::Pair(a, b) => CellRepr::Pair {
                left: Box::new((*a).into()),
                right: Box::new((*b).into()),
            },
        }
    }
}

impl TryFrom<CellRepr> for Cell {
    type Error = Error;
    fn try_from(r: CellRepr) -> Result<Cell, Error> {
        Ok(match r {
            CellRepr::FinitePoint { index } => Cell::FinitePoint(index),
            CellRepr::Ball { p, center, level } => {
                Cell::ball(p, &parse_rational(&center)?, level)
            }
            CellRepr::AffineCell {
                p,
                k,
                center,
                level,
            } => Cell::affine_cell(p, k, &parse_rational(&center)?, level),
            CellRepr::Pair { left, right } => {
                Cell::pair((*left).try_into()?, (*right).try_into()?)
            }
        })
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CellRepr::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        CellRepr::deserialize(d)?.try_into().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct OpenSetRepr {
    cells: Vec<Cell>,
}

impl From<OpenSet> for OpenSetRepr {
    fn from(s: OpenSet) -> Self {
        OpenSetRepr { cells: s.cells }
    }
}

impl TryFrom<OpenSetRepr> for OpenSet {
    type Error = Error;
    fn try_from(r: OpenSetRepr) -> Result<OpenSet, Error> {
        OpenSet::from_cells(r.cells)
    }
}
