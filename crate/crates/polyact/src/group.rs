//! Group models: finite groups by multiplication table, the additive group
//! of Q_p, the p-adic affine group p^Z x Q_p, and products and opposites of
//! these. Subgroups are addressed by small handles (balls, finite subsets),
//! which is enough for every compact open subgroup these models expose.
//!
//! The module also owns exact cell arithmetic under the group operations:
//! cells are cosets of compact open subgroups, and the product of two cells,
//! the inverse image of a cell and the translate of a cell by an element are
//! again single cells, computed exactly. Left Haar measure is normalized so
//! the standard maximal compact cells (Z_p, the k = 0 affine slice, a finite
//! point) have the measures p^0, 1 and 1 stated below.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::scalar::Rational;
use crate::space::{pow_p, Cell, Elt, SetRelation, SpaceModel};
use crate::{Error, Result};

/// Finite group presented by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteGroupRepr", into = "FiniteGroupRepr")]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = labels.len();
        if n == 0 || table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::Malformed("table must be square and nonempty".into()));
        }
        if table
            .iter()
            .any(|row| row.iter().any(|&v| v >= n))
        {
            return Err(Error::Malformed("table entry out of range".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Malformed(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::Malformed("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::Malformed(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        Ok(FiniteGroup {
            labels,
            table,
            identity,
            inverses,
        })
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n >= 1);
        let labels = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup::from_table(labels, table).expect("cyclic table is a group")
    }

    /// Dihedral group of order 2n; elements r^i and r^i s.
    pub fn dihedral(n: usize) -> FiniteGroup {
        assert!(n >= 1);
        let idx = |i: usize, j: usize| i + n * j;
        let mut labels = Vec::with_capacity(2 * n);
        for j in 0..2 {
            for i in 0..n {
                labels.push(if j == 0 {
                    format!("r{i}")
                } else {
                    format!("r{i}s")
                });
            }
        }
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..2 {
                for i2 in 0..n {
                    for j2 in 0..2 {
                        // r^i s^j r^i' s^j' = r^(i + (-1)^j i') s^(j + j').
                        let ii = if j == 0 {
                            (i + i2) % n
                        } else {
                            (i + n - i2 % n) % n
                        };
                        table[idx(i, j)][idx(i2, j2)] = idx(ii, (j + j2) % 2);
                    }
                }
            }
        }
        FiniteGroup::from_table(labels, table).expect("dihedral table is a group")
    }

    /// Symmetric group on n letters (n <= 5 keeps tables small), elements in
    /// lexicographic one-line notation, composition (ab)(x) = a(b(x)).
    pub fn symmetric(n: usize) -> FiniteGroup {
        assert!((1..=5).contains(&n));
        let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
        // Lexicographic enumeration by repeated next-permutation.
        loop {
            let mut cur = perms.last().unwrap().clone();
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
            perms.push(cur);
        }
        let labels = perms
            .iter()
            .map(|p| p.iter().map(|d| d.to_string()).collect::<String>())
            .collect();
        let index_of = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let composed: Vec<usize> = (0..n).map(|x| a[b[x]]).collect();
                        index_of(&composed)
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(labels, table).expect("symmetric table is a group")
    }

    /// Quaternion group of order 8: 1, i, j, k and negatives.
    pub fn quaternion() -> FiniteGroup {
        let labels: Vec<String> = ["1", "i", "j", "k", "-1", "-i", "-j", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        // (sign, basis) with index = basis + 4 * sign.
        let base_mul = |a: usize, b: usize| -> (usize, usize) {
            match (a, b) {
                (0, x) => (0, x),
                (x, 0) => (0, x),
                (1, 1) | (2, 2) | (3, 3) => (1, 0),
                (1, 2) => (0, 3),
                (2, 1) => (1, 3),
                (2, 3) => (0, 1),
                (3, 2) => (1, 1),
                (3, 1) => (0, 2),
                (1, 3) => (1, 2),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|x: usize| {
                (0..8)
                    .map(|y: usize| {
                        let (s, b) = base_mul(x % 4, y % 4);
                        let sign = (x / 4 + y / 4 + s) % 2;
                        b + 4 * sign
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(labels, table).expect("quaternion table is a group")
    }

    /// Direct product with pair labels; index = a * |B| + b.
    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let (na, nb) = (a.order(), b.order());
        let mut labels = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                labels.push(format!("({},{})", a.labels[i], b.labels[j]));
            }
        }
        let table = (0..na * nb)
            .map(|x| {
                (0..na * nb)
                    .map(|y| {
                        let (xa, xb) = (x / nb, x % nb);
                        let (ya, yb) = (y / nb, y % nb);
                        a.table[xa][ya] * nb + b.table[xb][yb]
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(labels, table).expect("product table is a group")
    }

    pub fn opposite(&self) -> FiniteGroup {
        let n = self.order();
        let table = (0..n)
            .map(|a| (0..n).map(|b| self.table[b][a]).collect())
            .collect();
        FiniteGroup::from_table(self.labels.clone(), table).expect("opposite table is a group")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    /// Subgroup generated by the given elements.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                for y in [self.table[x][g], self.table[x][self.inv(g)]] {
                    if !seen[y] {
                        seen[y] = true;
                        frontier.push(y);
                    }
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    /// Checks that a sorted index set is a subgroup.
    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        !elems.is_empty()
            && elems.contains(&self.identity)
            && elems.iter().all(|&a| {
                elems.contains(&self.inv(a))
                    && elems.iter().all(|&b| elems.contains(&self.table[a][b]))
            })
    }
}

#[derive(Serialize, Deserialize)]
struct FiniteGroupRepr {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl From<FiniteGroup> for FiniteGroupRepr {
    fn from(g: FiniteGroup) -> Self {
        FiniteGroupRepr {
            labels: g.labels,
            table: g.table,
        }
    }
}

impl TryFrom<FiniteGroupRepr> for FiniteGroup {
    type Error = Error;
    fn try_from(r: FiniteGroupRepr) -> Result<FiniteGroup> {
        FiniteGroup::from_table(r.labels, r.table)
    }
}

/// A totally disconnected group in one of the computable shapes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupModel {
    Finite(Arc<FiniteGroup>),
    /// (Q_p, +).
    PAdicAdditive { p: u32 },
    /// p^Z x Q_p with (k, x)(k', x') = (k + k', x + p^k x').
    PAdicAffine { p: u32 },
    Product {
        left: Box<GroupModel>,
        right: Box<GroupModel>,
    },
    Opposite { base: Box<GroupModel> },
}

impl GroupModel {
    pub fn finite(g: FiniteGroup) -> GroupModel {
        GroupModel::Finite(Arc::new(g))
    }

    pub fn product(a: GroupModel, b: GroupModel) -> GroupModel {
        GroupModel::Product {
            left: Box::new(a),
            right: Box::new(b),
        }
    }

    /// Opposite group. Normalizes: abelian models are their own opposite,
    /// finite tables are transposed in place, double opposites unwrap.
    pub fn opposite(g: GroupModel) -> GroupModel {
        match g {
            GroupModel::Finite(f) => GroupModel::finite(f.opposite()),
            GroupModel::PAdicAdditive { p } => GroupModel::PAdicAdditive { p },
            GroupModel::Opposite { base } => *base,
            GroupModel::Product { left, right } => GroupModel::product(
                GroupModel::opposite(*left),
                GroupModel::opposite(*right),
            ),
            other => GroupModel::Opposite { base: Box::new(other) },
        }
    }

    pub fn contains(&self, a: &Elt) -> bool {
        match (self, a) {
            (GroupModel::Finite(g), Elt::Finite(i)) => *i < g.order(),
            (GroupModel::PAdicAdditive { .. }, Elt::PAdic(_)) => true,
            (GroupModel::PAdicAffine { .. }, Elt::Affine { .. }) => true,
            (GroupModel::Product { left, right }, Elt::Pair(x, y)) => {
                left.contains(x) && right.contains(y)
            }
            (GroupModel::Opposite { base }, x) => base.contains(x),
            _ => false,
        }
    }

    fn check(&self, a: &Elt) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::NotInModel(format!("{a}")))
        }
    }

    pub fn op(&self, a: &Elt, b: &Elt) -> Result<Elt> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.op_unchecked(a, b))
    }

    fn op_unchecked(&self, a: &Elt, b: &Elt) -> Elt {
        match (self, a, b) {
            (GroupModel::Finite(g), Elt::Finite(x), Elt::Finite(y)) => {
                Elt::Finite(g.op(*x, *y))
            }
            (GroupModel::PAdicAdditive { .. }, Elt::PAdic(x), Elt::PAdic(y)) => {
                Elt::PAdic(x + y)
            }
            (
                GroupModel::PAdicAffine { p },
                Elt::Affine { k, b: x },
                Elt::Affine { k: k2, b: y },
            ) => Elt::Affine {
                k: k + k2,
                b: x + pow_p(*p, *k) * y,
            },
            (GroupModel::Product { left, right }, Elt::Pair(x1, x2), Elt::Pair(y1, y2)) => {
                Elt::pair(left.op_unchecked(x1, y1), right.op_unchecked(x2, y2))
            }
            (GroupModel::Opposite { base }, x, y) => base.op_unchecked(y, x),
            _ => unreachable!("checked membership"),
        }
    }

    pub fn inv(&self, a: &Elt) -> Result<Elt> {
        self.check(a)?;
        Ok(self.inv_unchecked(a))
    }

    fn inv_unchecked(&self, a: &Elt) -> Elt {
        match (self, a) {
            (GroupModel::Finite(g), Elt::Finite(x)) => Elt::Finite(g.inv(*x)),
            (GroupModel::PAdicAdditive { .. }, Elt::PAdic(x)) => Elt::PAdic(-x),
            (GroupModel::PAdicAffine { p }, Elt::Affine { k, b }) => Elt::Affine {
                k: -k,
                b: -(pow_p(*p, -k) * b),
            },
            (GroupModel::Product { left, right }, Elt::Pair(x, y)) => {
                Elt::pair(left.inv_unchecked(x), right.inv_unchecked(y))
            }
            (GroupModel::Opposite { base }, x) => base.inv_unchecked(x),
            _ => unreachable!("checked membership"),
        }
    }

    pub fn identity(&self) -> Elt {
        match self {
            GroupModel::Finite(g) => Elt::Finite(g.identity()),
            GroupModel::PAdicAdditive { .. } => Elt::PAdic(Rational::from_integer(BigInt::from(0))),
            GroupModel::PAdicAffine { .. } => Elt::Affine {
                k: 0,
                b: Rational::from_integer(BigInt::from(0)),
            },
            GroupModel::Product { left, right } => {
                Elt::pair(left.identity(), right.identity())
            }
            GroupModel::Opposite { base } => base.identity(),
        }
    }

    /// The group viewed as a topological space.
    pub fn as_space(&self) -> SpaceModel {
        match self {
            GroupModel::Finite(g) => SpaceModel::FinitePoints {
                labels: g.labels().to_vec(),
            },
            GroupModel::PAdicAdditive { p } => SpaceModel::PAdicLine { p: *p },
            GroupModel::PAdicAffine { p } => SpaceModel::AffineSpace { p: *p },
            GroupModel::Product { left, right } => {
                SpaceModel::product(left.as_space(), right.as_space())
            }
            GroupModel::Opposite { base } => base.as_space(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            GroupModel::Finite(g) => g.is_abelian(),
            GroupModel::PAdicAdditive { .. } => true,
            GroupModel::PAdicAffine { .. } => false,
            GroupModel::Product { left, right } => left.is_abelian() && right.is_abelian(),
            GroupModel::Opposite { base } => base.is_abelian(),
        }
    }

    pub fn is_compact(&self) -> bool {
        match self {
            GroupModel::Finite(_) => true,
            GroupModel::PAdicAdditive { .. } | GroupModel::PAdicAffine { .. } => false,
            GroupModel::Product { left, right } => left.is_compact() && right.is_compact(),
            GroupModel::Opposite { base } => base.is_compact(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        match self {
            GroupModel::Finite(_) => true,
            GroupModel::PAdicAdditive { .. } | GroupModel::PAdicAffine { .. } => false,
            GroupModel::Product { left, right } => left.is_discrete() && right.is_discrete(),
            GroupModel::Opposite { base } => base.is_discrete(),
        }
    }

    /// Modular function of left Haar measure: mu(S g) = delta(g) mu(S).
    pub fn modular_function(&self, g: &Elt) -> Result<Rational> {
        self.check(g)?;
        Ok(self.modular_unchecked(g))
    }

    fn modular_unchecked(&self, g: &Elt) -> Rational {
        match (self, g) {
            (GroupModel::Finite(_), _) | (GroupModel::PAdicAdditive { .. }, _) => {
                Rational::from_integer(BigInt::from(1))
            }
            (GroupModel::PAdicAffine { p }, Elt::Affine { k, .. }) => pow_p(*p, *k),
            (GroupModel::Product { left, right }, Elt::Pair(a, b)) => {
                left.modular_unchecked(a) * right.modular_unchecked(b)
            }
            (GroupModel::Opposite { base }, x) => base.modular_unchecked(x).recip(),
            _ => unreachable!("checked membership"),
        }
    }
}

/// Left Haar measure of a cell (a coset of a compact open subgroup).
/// Normalization: a finite point has measure 1, mu(c + p^m Z_p) = p^(-m),
/// mu({p^k} x (c + p^m Z_p)) = p^(k-m); products multiply.
pub fn cell_measure(group: &GroupModel, cell: &Cell) -> Result<Rational> {
    match (group, cell) {
        (GroupModel::Finite(_), Cell::FinitePoint(_)) => {
            Ok(Rational::from_integer(BigInt::from(1)))
        }
        (GroupModel::PAdicAdditive { p }, Cell::Ball { p: cp, level, .. }) if p == cp => {
            Ok(pow_p(*p, -level))
        }
        (
            GroupModel::PAdicAffine { p },
            Cell::AffineCell {
                p: cp, k, level, ..
            },
        ) if p == cp => Ok(pow_p(*p, k - level)),
        (GroupModel::Product { left, right }, Cell::Pair(a, b)) => {
            Ok(cell_measure(left, a)? * cell_measure(right, b)?)
        }
        // Left Haar on the opposite group is right Haar on the base group,
        // i.e. the measure of the inverse set.
        (GroupModel::Opposite { base }, c) => cell_measure(base, &group_inv_cell(base, c)?),
        _ => Err(Error::Unsupported(format!(
            "cell does not belong to the group: {cell:?}"
        ))),
    }
}

/// Exact image of a cell under group inversion. Cells are cosets of compact
/// open subgroups, so the image is again a single cell.
pub fn group_inv_cell(group: &GroupModel, cell: &Cell) -> Result<Cell> {
    match (group, cell) {
        (GroupModel::Finite(g), Cell::FinitePoint(i)) if *i < g.order() => {
            Ok(Cell::FinitePoint(g.inv(*i)))
        }
        (GroupModel::PAdicAdditive { p }, Cell::Ball { p: cp, center, level }) if p == cp => {
            Ok(Cell::ball(*p, &(-center), *level))
        }
        (
            GroupModel::PAdicAffine { p },
            Cell::AffineCell {
                p: cp,
                k,
                center,
                level,
            },
        ) if p == cp => {
            // (k, b)^(-1) = (-k, -p^(-k) b); b runs over center + p^level Z_p.
            Ok(Cell::affine_cell(
                *p,
                -k,
                &(-(pow_p(*p, -k) * center)),
                level - k,
            ))
        }
        (GroupModel::Product { left, right }, Cell::Pair(a, b)) => Ok(Cell::pair(
            group_inv_cell(left, a)?,
            group_inv_cell(right, b)?,
        )),
        (GroupModel::Opposite { base }, c) => group_inv_cell(base, c),
        _ => Err(Error::Unsupported(format!(
            "cell does not belong to the group: {cell:?}"
        ))),
    }
}

/// Exact product set of two cells; again a single cell because the group
/// law is affine in each argument on these models.
pub fn group_op_cell(group: &GroupModel, a: &Cell, b: &Cell) -> Result<Cell> {
    match (group, a, b) {
        (GroupModel::Finite(g), Cell::FinitePoint(x), Cell::FinitePoint(y))
            if *x < g.order() && *y < g.order() =>
        {
            Ok(Cell::FinitePoint(g.op(*x, *y)))
        }
        (
            GroupModel::PAdicAdditive { p },
            Cell::Ball {
                p: p1,
                center: c1,
                level: l1,
            },
            Cell::Ball {
                p: p2,
                center: c2,
                level: l2,
            },
        ) if p == p1 && p == p2 => Ok(Cell::ball(*p, &(c1 + c2), *l1.min(l2))),
        (
            GroupModel::PAdicAffine { p },
            Cell::AffineCell {
                p: p1,
                k: k1,
                center: c1,
                level: m1,
            },
            Cell::AffineCell {
                p: p2,
                k: k2,
                center: c2,
                level: m2,
            },
        ) if p == p1 && p == p2 => {
            // (k1, x)(k2, y) = (k1 + k2, x + p^k1 y).
            Ok(Cell::affine_cell(
                *p,
                k1 + k2,
                &(c1 + pow_p(*p, *k1) * c2),
                *m1.min(&(k1 + m2)),
            ))
        }
        (GroupModel::Product { left, right }, Cell::Pair(a1, a2), Cell::Pair(b1, b2)) => Ok(
            Cell::pair(group_op_cell(left, a1, b1)?, group_op_cell(right, a2, b2)?),
        ),
        (GroupModel::Opposite { base }, x, y) => group_op_cell(base, y, x),
        _ => Err(Error::Unsupported(
            "cells do not belong to the group".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Exact translate of a cell by a group element: g S (left) or S g (right).
pub fn translate_cell_elt(group: &GroupModel, cell: &Cell, g: &Elt, side: Side) -> Result<Cell> {
    group.check(g)?;
    translate_unchecked(group, cell, g, side)
}

fn translate_unchecked(group: &GroupModel, cell: &Cell, g: &Elt, side: Side) -> Result<Cell> {
    match (group, cell, g) {
        (GroupModel::Finite(gr), Cell::FinitePoint(x), Elt::Finite(y)) if *x < gr.order() => {
            Ok(Cell::FinitePoint(match side {
                Side::Left => gr.op(*y, *x),
                Side::Right => gr.op(*x, *y),
            }))
        }
        (GroupModel::PAdicAdditive { p }, Cell::Ball { p: cp, center, level }, Elt::PAdic(y))
            if p == cp =>
        {
            Ok(Cell::ball(*p, &(center + y), *level))
        }
        (
            GroupModel::PAdicAffine { p },
            Cell::AffineCell {
                p: cp,
                k,
                center,
                level,
            },
            Elt::Affine { k: gk, b: gb },
        ) if p == cp => Ok(match side {
            // (gk, gb)(k, x) = (gk + k, gb + p^gk x).
            Side::Left => Cell::affine_cell(
                *p,
                gk + k,
                &(gb + pow_p(*p, *gk) * center),
                gk + level,
            ),
            // (k, x)(gk, gb) = (k + gk, x + p^k gb).
            Side::Right => Cell::affine_cell(
                *p,
                k + gk,
                &(center + pow_p(*p, *k) * gb),
                *level,
            ),
        }),
        (GroupModel::Product { left, right }, Cell::Pair(a, b), Elt::Pair(x, y)) => {
            Ok(Cell::pair(
                translate_unchecked(left, a, x, side)?,
                translate_unchecked(right, b, y, side)?,
            ))
        }
        (GroupModel::Opposite { base }, c, x) => translate_unchecked(
            base,
            c,
            x,
            match side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            },
        ),
        _ => Err(Error::Unsupported(
            "cell or element does not belong to the group".into(),
        )),
    }
}

/// Handle naming a closed subgroup of a group model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubgroupHandle {
    Full,
    /// Sorted element indices of a subgroup of a finite group.
    FiniteSet { elements: Vec<usize> },
    /// p^k Z_p inside the additive group.
    Ball { level: i64 },
    /// {1} x p^m Z_p inside the affine group.
    AffineBall { level: i64 },
    ProductSub {
        left: Box<SubgroupHandle>,
        right: Box<SubgroupHandle>,
    },
}

impl SubgroupHandle {
    pub fn finite_set(mut elements: Vec<usize>) -> SubgroupHandle {
        elements.sort_unstable();
        elements.dedup();
        SubgroupHandle::FiniteSet { elements }
    }

    pub fn product(a: SubgroupHandle, b: SubgroupHandle) -> SubgroupHandle {
        SubgroupHandle::ProductSub {
            left: Box::new(a),
            right: Box::new(b),
        }
    }
}

/// Checks the handle names an actual subgroup of `group`.
pub fn validate_subgroup(group: &GroupModel, h: &SubgroupHandle) -> Result<()> {
    match (group, h) {
        (_, SubgroupHandle::Full) => Ok(()),
        (GroupModel::Finite(g), SubgroupHandle::FiniteSet { elements }) => {
            if elements.iter().any(|&i| i >= g.order()) {
                return Err(Error::NotASubgroup("index out of range".into()));
            }
            if g.is_subgroup(elements) {
                Ok(())
            } else {
                Err(Error::NotASubgroup(format!("{elements:?} is not closed")))
            }
        }
        (GroupModel::PAdicAdditive { .. }, SubgroupHandle::Ball { .. }) => Ok(()),
        (GroupModel::PAdicAffine { .. }, SubgroupHandle::AffineBall { .. }) => Ok(()),
        (GroupModel::Product { left, right }, SubgroupHandle::ProductSub { left: hl, right: hr }) => {
            validate_subgroup(left, hl)?;
            validate_subgroup(right, hr)
        }
        (GroupModel::Opposite { base }, h) => validate_subgroup(base, h),
        _ => Err(Error::NotASubgroup(format!(
            "handle {h:?} does not fit the group shape"
        ))),
    }
}

pub fn subgroup_contains(group: &GroupModel, h: &SubgroupHandle, x: &Elt) -> bool {
    if !group.contains(x) {
        return false;
    }
    match (group, h, x) {
        (_, SubgroupHandle::Full, _) => true,
        (GroupModel::Finite(_), SubgroupHandle::FiniteSet { elements }, Elt::Finite(i)) => {
            elements.contains(i)
        }
        (GroupModel::PAdicAdditive { p }, SubgroupHandle::Ball { level }, Elt::PAdic(r)) => {
            crate::space::in_ball_at_origin(r, *p, *level)
        }
        (
            GroupModel::PAdicAffine { p },
            SubgroupHandle::AffineBall { level },
            Elt::Affine { k, b },
        ) => *k == 0 && crate::space::in_ball_at_origin(b, *p, *level),
        (
            GroupModel::Product { left, right },
            SubgroupHandle::ProductSub { left: hl, right: hr },
            Elt::Pair(a, b),
        ) => subgroup_contains(left, hl, a) && subgroup_contains(right, hr, b),
        (GroupModel::Opposite { base }, h, x) => subgroup_contains(base, h, x),
        _ => false,
    }
}

pub fn subgroup_is_open(group: &GroupModel, h: &SubgroupHandle) -> bool {
    match (group, h) {
        (_, SubgroupHandle::Full) => true,
        (GroupModel::Finite(_), SubgroupHandle::FiniteSet { .. }) => true,
        (GroupModel::PAdicAdditive { .. }, SubgroupHandle::Ball { .. }) => true,
        (GroupModel::PAdicAffine { .. }, SubgroupHandle::AffineBall { .. }) => true,
        (GroupModel::Product { left, right }, SubgroupHandle::ProductSub { left: hl, right: hr }) => {
            subgroup_is_open(left, hl) && subgroup_is_open(right, hr)
        }
        (GroupModel::Opposite { base }, h) => subgroup_is_open(base, h),
        _ => false,
    }
}

pub fn subgroup_is_compact(group: &GroupModel, h: &SubgroupHandle) -> bool {
    match (group, h) {
        (g, SubgroupHandle::Full) => g.is_compact(),
        (GroupModel::Finite(_), SubgroupHandle::FiniteSet { .. }) => true,
        (GroupModel::PAdicAdditive { .. }, SubgroupHandle::Ball { .. }) => true,
        (GroupModel::PAdicAffine { .. }, SubgroupHandle::AffineBall { .. }) => true,
        (GroupModel::Product { left, right }, SubgroupHandle::ProductSub { left: hl, right: hr }) => {
            subgroup_is_compact(left, hl) && subgroup_is_compact(right, hr)
        }
        (GroupModel::Opposite { base }, h) => subgroup_is_compact(base, h),
        _ => false,
    }
}

/// The subgroup as a disjoint cell family (compact subgroups only).
pub fn subgroup_cells(group: &GroupModel, h: &SubgroupHandle) -> Result<Vec<Cell>> {
    match (group, h) {
        (GroupModel::Finite(g), SubgroupHandle::Full) => {
            Ok((0..g.order()).map(Cell::FinitePoint).collect())
        }
        (GroupModel::Finite(_), SubgroupHandle::FiniteSet { elements }) => {
            Ok(elements.iter().map(|&i| Cell::FinitePoint(i)).collect())
        }
        (GroupModel::PAdicAdditive { p }, SubgroupHandle::Ball { level }) => {
            Ok(vec![Cell::ball(*p, &Rational::from_integer(BigInt::from(0)), *level)])
        }
        (GroupModel::PAdicAffine { p }, SubgroupHandle::AffineBall { level }) => Ok(vec![
            Cell::affine_cell(*p, 0, &Rational::from_integer(BigInt::from(0)), *level),
        ]),
        (GroupModel::Product { left, right }, SubgroupHandle::ProductSub { left: hl, right: hr }) => {
            let ls = subgroup_cells(left, hl)?;
            let rs = subgroup_cells(right, hr)?;
            let mut out = Vec::new();
            for l in &ls {
                for r in &rs {
                    out.push(Cell::pair(l.clone(), r.clone()));
                }
            }
            Ok(out)
        }
        (GroupModel::Opposite { base }, h) => subgroup_cells(base, h),
        _ => Err(Error::Unsupported(format!(
            "subgroup {h:?} is not compact in this group"
        ))),
    }
}

/// Whether a group cell lies inside, outside or across a subgroup.
pub fn cell_subgroup_relation(
    group: &GroupModel,
    cell: &Cell,
    h: &SubgroupHandle,
) -> Result<SetRelation> {
    validate_subgroup(group, h)?;
    match h {
        SubgroupHandle::Full => Ok(SetRelation::Inside),
        _ => Ok(crate::space::cell_vs_cells(cell, &subgroup_cells(group, h)?)),
    }
}

/// Reads a cell containing the identity as a compact open subgroup handle.
/// Works because the catalog's identity-containing cells are exactly the
/// standard balls: c + p^m Z_p with 0 inside is p^m Z_p itself, and the
/// k = 0 affine slice through (1, 0) is {1} x p^m Z_p.
pub fn cell_as_identity_subgroup(group: &GroupModel, cell: &Cell) -> Result<SubgroupHandle> {
    let bad = || {
        Error::NotASubgroup(format!(
            "cell {cell:?} does not contain the identity of the group"
        ))
    };
    match (group, cell) {
        (GroupModel::Finite(g), Cell::FinitePoint(i)) => {
            if *i == g.identity() {
                Ok(SubgroupHandle::finite_set(vec![g.identity()]))
            } else {
                Err(bad())
            }
        }
        (GroupModel::PAdicAdditive { p }, Cell::Ball { p: cp, center, level })
            if p == cp && center.is_zero() =>
        {
            Ok(SubgroupHandle::Ball { level: *level })
        }
        (
            GroupModel::PAdicAffine { p },
            Cell::AffineCell { p: cp, k: 0, center, level },
        ) if p == cp && center.is_zero() => Ok(SubgroupHandle::AffineBall { level: *level }),
        (GroupModel::Product { left, right }, Cell::Pair(a, b)) => Ok(SubgroupHandle::product(
            cell_as_identity_subgroup(left, a)?,
            cell_as_identity_subgroup(right, b)?,
        )),
        (GroupModel::Opposite { base }, c) => cell_as_identity_subgroup(base, c),
        _ => Err(bad()),
    }
}

pub fn subgroup_measure(group: &GroupModel, h: &SubgroupHandle) -> Result<Rational> {
    let cells = subgroup_cells(group, h)?;
    let mut total = Rational::from_integer(BigInt::from(0));
    for c in &cells {
        total += cell_measure(group, c)?;
    }
    Ok(total)
}

/// Intersection of two subgroup handles over the same group.
pub fn subgroup_intersection(
    group: &GroupModel,
    a: &SubgroupHandle,
    b: &SubgroupHandle,
) -> Result<SubgroupHandle> {
    validate_subgroup(group, a)?;
    validate_subgroup(group, b)?;
    Ok(match (a, b) {
        (SubgroupHandle::Full, x) | (x, SubgroupHandle::Full) => x.clone(),
        (SubgroupHandle::Ball { level: k }, SubgroupHandle::Ball { level: l }) => {
            SubgroupHandle::Ball { level: *k.max(l) }
        }
        (SubgroupHandle::AffineBall { level: k }, SubgroupHandle::AffineBall { level: l }) => {
            SubgroupHandle::AffineBall { level: *k.max(l) }
        }
        (
            SubgroupHandle::FiniteSet { elements: xs },
            SubgroupHandle::FiniteSet { elements: ys },
        ) => SubgroupHandle::finite_set(
            xs.iter().filter(|x| ys.contains(x)).copied().collect(),
        ),
        (
            SubgroupHandle::ProductSub { left: al, right: ar },
            SubgroupHandle::ProductSub { left: bl, right: br },
        ) => {
            let (gl, gr) = match group {
                GroupModel::Product { left, right } => (left, right),
                GroupModel::Opposite { base } => match base.as_ref() {
                    GroupModel::Product { left, right } => (left, right),
                    _ => unreachable!("validated handle shape"),
                },
                _ => unreachable!("validated handle shape"),
            };
            SubgroupHandle::product(
                subgroup_intersection(gl, al, bl)?,
                subgroup_intersection(gr, ar, br)?,
            )
        }
        _ => unreachable!("validated handles share the group shape"),
    })
}

/// The trivial subgroup handle for a group model, when expressible ({e} is a
/// handle only where the group is discrete in the relevant coordinate; for
/// ball coordinates there is no smallest subgroup, so callers pass a level).
fn identity_handle(group: &GroupModel) -> Option<SubgroupHandle> {
    match group {
        GroupModel::Finite(g) => Some(SubgroupHandle::finite_set(vec![g.identity()])),
        GroupModel::Product { left, right } => Some(SubgroupHandle::product(
            identity_handle(left)?,
            identity_handle(right)?,
        )),
        GroupModel::Opposite { base } => identity_handle(base),
        _ => None,
    }
}

/// Largest subgroup U with u S = S for every u in U (the cell's left
/// stabilizer under left translation).
pub fn cell_left_stabilizer(group: &GroupModel, cell: &Cell) -> Result<SubgroupHandle> {
    match (group, cell) {
        (GroupModel::Finite(g), Cell::FinitePoint(_)) => {
            Ok(SubgroupHandle::finite_set(vec![g.identity()]))
        }
        (GroupModel::PAdicAdditive { p: gp }, Cell::Ball { p, level, .. }) if gp == p => {
            Ok(SubgroupHandle::Ball { level: *level })
        }
        // (0, v)(k, x) = (k, v + x): need v in p^level Z_p.
        (GroupModel::PAdicAffine { p: gp }, Cell::AffineCell { p, level, .. }) if gp == p => {
            Ok(SubgroupHandle::AffineBall { level: *level })
        }
        (GroupModel::Product { left, right }, Cell::Pair(a, b)) => Ok(SubgroupHandle::product(
            cell_left_stabilizer(left, a)?,
            cell_left_stabilizer(right, b)?,
        )),
        (GroupModel::Opposite { base }, c) => cell_right_stabilizer(base, c),
        _ => Err(Error::Unsupported("cell does not fit the group".into())),
    }
}

/// Largest subgroup U with S u = S for every u in U.
pub fn cell_right_stabilizer(group: &GroupModel, cell: &Cell) -> Result<SubgroupHandle> {
    match (group, cell) {
        (GroupModel::Finite(g), Cell::FinitePoint(_)) => {
            Ok(SubgroupHandle::finite_set(vec![g.identity()]))
        }
        (GroupModel::PAdicAdditive { p: gp }, Cell::Ball { p, level, .. }) if gp == p => {
            Ok(SubgroupHandle::Ball { level: *level })
        }
        // (k, x)(0, v) = (k, x + p^k v): need v in p^(level - k) Z_p.
        (
            GroupModel::PAdicAffine { p: gp },
            Cell::AffineCell { p, k, level, .. },
        ) if gp == p => Ok(SubgroupHandle::AffineBall { level: level - k }),
        (GroupModel::Product { left, right }, Cell::Pair(a, b)) => Ok(SubgroupHandle::product(
            cell_right_stabilizer(left, a)?,
            cell_right_stabilizer(right, b)?,
        )),
        (GroupModel::Opposite { base }, c) => cell_left_stabilizer(base, c),
        _ => Err(Error::Unsupported("cell does not fit the group".into())),
    }
}

/// Partitions a group cell into left cosets q_i target (q_i in the cell),
/// returning each representative together with its coset as a cell. The
/// target subgroup must be small enough to fit inside the cell's own coset
/// structure.
pub fn refine_group_cell(
    group: &GroupModel,
    cg: &Cell,
    target: &SubgroupHandle,
) -> Result<Vec<(Elt, Cell)>> {
    match (group, cg, target) {
        (GroupModel::Finite(g), Cell::FinitePoint(i), _) => {
            // A point refines to itself; any subgroup containing only e works.
            let _ = g;
            Ok(vec![(Elt::Finite(*i), cg.clone())])
        }
        (_, _, SubgroupHandle::Full) => {
            Ok(vec![(crate::space::cell_sample_point(cg), cg.clone())])
        }
        (
            GroupModel::PAdicAdditive { p },
            Cell::Ball {
                p: cp,
                center,
                level,
            },
            SubgroupHandle::Ball { level: j },
        ) if p == cp => {
            if j < level {
                // The target is coarser than the cell; one coset covers it.
                return Ok(vec![(Elt::PAdic(center.clone()), cg.clone())]);
            }
            Ok(cg
                .subcells_at_level(*j)
                .into_iter()
                .map(|c| {
                    let rep = crate::space::cell_sample_point(&c);
                    (rep, c)
                })
                .collect())
        }
        (
            GroupModel::PAdicAffine { p },
            Cell::AffineCell {
                p: cp,
                k,
                center,
                level,
            },
            SubgroupHandle::AffineBall { level: j },
        ) if p == cp => {
            // (k, y)(0, v) = (k, y + p^k v): the coset of y is y + p^(k+j).
            let fine = k + j;
            if fine < *level {
                return Ok(vec![(
                    Elt::Affine {
                        k: *k,
                        b: center.clone(),
                    },
                    cg.clone(),
                )]);
            }
            Ok(cg
                .subcells_at_level(fine)
                .into_iter()
                .map(|c| {
                    let rep = crate::space::cell_sample_point(&c);
                    (rep, c)
                })
                .collect())
        }
        (
            GroupModel::Product { left, right },
            Cell::Pair(a, b),
            SubgroupHandle::ProductSub { left: tl, right: tr },
        ) => {
            let ls = refine_group_cell(left, a, tl)?;
            let rs = refine_group_cell(right, b, tr)?;
            let mut out = Vec::new();
            for (le, lc) in &ls {
                for (re, rc) in &rs {
                    out.push((
                        Elt::pair(le.clone(), re.clone()),
                        Cell::pair(lc.clone(), rc.clone()),
                    ));
                }
            }
            Ok(out)
        }
        // Left cosets q *op U are right cosets U q in the base group; for
        // the affine ball handles these are plain subcells, and every other
        // base shape is abelian, where the two coset notions agree.
        (GroupModel::Opposite { base }, c, t) => match (base.as_ref(), c, t) {
            (
                GroupModel::PAdicAffine { p },
                Cell::AffineCell {
                    p: cp,
                    k,
                    center,
                    level,
                },
                SubgroupHandle::AffineBall { level: j },
            ) if p == cp => {
                // (0, v)(k, y) = (k, y + v): the coset of y is y + p^j.
                if j < level {
                    Ok(vec![(
                        Elt::Affine {
                            k: *k,
                            b: center.clone(),
                        },
                        c.clone(),
                    )])
                } else {
                    Ok(c.subcells_at_level(*j)
                        .into_iter()
                        .map(|cc| (crate::space::cell_sample_point(&cc), cc))
                        .collect())
                }
            }
            _ => refine_group_cell(base, c, t),
        },
        _ => Err(Error::Unsupported(format!(
            "cannot refine {cg:?} into {target:?} cosets"
        ))),
    }
}

/// {e} as a finite-set handle where the group is discrete; None otherwise.
pub fn trivial_subgroup(group: &GroupModel) -> Option<SubgroupHandle> {
    identity_handle(group)
}

/// Left coset representatives of `small` in `big` (big = union of t small).
/// Requires small, a subgroup contained in big, of finite index.
pub fn coset_transversal(
    group: &GroupModel,
    big: &SubgroupHandle,
    small: &SubgroupHandle,
) -> Result<Vec<Elt>> {
    validate_subgroup(group, big)?;
    validate_subgroup(group, small)?;
    match (group, big, small) {
        (
            GroupModel::PAdicAdditive { p },
            SubgroupHandle::Ball { level: k0 },
            SubgroupHandle::Ball { level: k1 },
        ) => {
            if k1 < k0 {
                return Err(Error::NotASubgroup(format!(
                    "p^{k1} Z_p is not contained in p^{k0} Z_p"
                )));
            }
            let n = (*p as u64).pow((k1 - k0) as u32);
            let step = pow_p(*p, *k0);
            Ok((0..n)
                .map(|j| Elt::PAdic(&step * Rational::from_integer(BigInt::from(j))))
                .collect())
        }
        (
            GroupModel::PAdicAffine { p },
            SubgroupHandle::AffineBall { level: m0 },
            SubgroupHandle::AffineBall { level: m1 },
        ) => {
            if m1 < m0 {
                return Err(Error::NotASubgroup(format!(
                    "level {m1} ball is not contained in level {m0} ball"
                )));
            }
            let n = (*p as u64).pow((m1 - m0) as u32);
            let step = pow_p(*p, *m0);
            Ok((0..n)
                .map(|j| Elt::Affine {
                    k: 0,
                    b: &step * Rational::from_integer(BigInt::from(j)),
                })
                .collect())
        }
        (GroupModel::Finite(g), _, _) => {
            let elems_of = |h: &SubgroupHandle| -> Vec<usize> {
                match h {
                    SubgroupHandle::Full => (0..g.order()).collect(),
                    SubgroupHandle::FiniteSet { elements } => elements.clone(),
                    _ => unreachable!("validated against a finite group"),
                }
            };
            let big_elems = elems_of(big);
            let small_elems = elems_of(small);
            if !small_elems.iter().all(|i| big_elems.contains(i)) {
                return Err(Error::NotASubgroup("small is not contained in big".into()));
            }
            let mut covered = vec![false; g.order()];
            let mut reps = Vec::new();
            for &t in &big_elems {
                if covered[t] {
                    continue;
                }
                reps.push(Elt::Finite(t));
                for &s in &small_elems {
                    covered[g.op(t, s)] = true;
                }
            }
            Ok(reps)
        }
        (
            GroupModel::Product { left, right },
            SubgroupHandle::ProductSub { left: bl, right: br },
            SubgroupHandle::ProductSub { left: sl, right: sr },
        ) => {
            let ls = coset_transversal(left, bl, sl)?;
            let rs = coset_transversal(right, br, sr)?;
            let mut out = Vec::new();
            for l in &ls {
                for r in &rs {
                    out.push(Elt::pair(l.clone(), r.clone()));
                }
            }
            Ok(out)
        }
        // Left cosets in the opposite group along these handles coincide
        // with the base-group cosets: the handles below Full are balls or
        // finite sets, and the relevant slice of the law is unchanged.
        (GroupModel::Opposite { base }, b, s) => coset_transversal(base, b, s),
        _ => Err(Error::Unsupported(format!(
            "no finite transversal for {small:?} in {big:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn additive3() -> GroupModel {
        GroupModel::PAdicAdditive { p: 3 }
    }

    fn affine3() -> GroupModel {
        GroupModel::PAdicAffine { p: 3 }
    }

    #[test]
    fn affine_law_and_inverse() {
        let g = affine3();
        // (3^1, 0) (3^0, 1) = (3^1, 3).
        let prod = g
            .op(&Elt::affine(1, rat(0, 1)), &Elt::affine(0, rat(1, 1)))
            .unwrap();
        assert_eq!(prod, Elt::affine(1, rat(3, 1)));
        assert_eq!(
            g.inv(&Elt::affine(1, rat(0, 1))).unwrap(),
            Elt::affine(-1, rat(0, 1))
        );
        // Inverse composes to the identity from both sides.
        let x = Elt::affine(-2, rat(5, 9));
        let xi = g.inv(&x).unwrap();
        assert_eq!(g.op(&x, &xi).unwrap(), g.identity());
        assert_eq!(g.op(&xi, &x).unwrap(), g.identity());
    }

    #[test]
    fn small_finite_groups_have_expected_structure() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        let d4 = FiniteGroup::dihedral(4);
        assert_eq!(d4.order(), 8);
        // r1 s != s r1 in D4.
        let r1 = d4.labels().iter().position(|l| l == "r1").unwrap();
        let s = d4.labels().iter().position(|l| l == "r0s").unwrap();
        assert_eq!(d4.label(d4.op(r1, s)), "r1s");
        assert_eq!(d4.label(d4.op(s, r1)), "r3s");
        let q8 = FiniteGroup::quaternion();
        let (i, j, k) = (1, 2, 3);
        assert_eq!(q8.label(q8.op(i, j)), "k");
        assert_eq!(q8.label(q8.op(j, i)), "-k");
        assert_eq!(q8.op(i, i), 4);
        assert_eq!(q8.label(q8.inv(k)), "-k");
        assert!(FiniteGroup::cyclic(5).is_abelian());
        assert_eq!(
            FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(3)).order(),
            6
        );
    }

    #[test]
    fn bad_tables_are_rejected() {
        // A latin square that is not associative (order-5 quasigroup).
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let labels = (0..5).map(|i| i.to_string()).collect();
        assert!(FiniteGroup::from_table(labels, table).is_err());
    }

    #[test]
    fn generated_subgroups_and_validation() {
        let d4 = FiniteGroup::dihedral(4);
        let r1 = d4.labels().iter().position(|l| l == "r1").unwrap();
        let rot = d4.generated(&[r1]);
        assert_eq!(rot.len(), 4);
        assert!(d4.is_subgroup(&rot));
        assert!(!d4.is_subgroup(&[r1]));
        let g = GroupModel::finite(d4);
        assert!(validate_subgroup(&g, &SubgroupHandle::finite_set(rot)).is_ok());
        assert!(validate_subgroup(&g, &SubgroupHandle::finite_set(vec![r1])).is_err());
    }

    #[test]
    fn additive_transversal_is_the_standard_one() {
        let reps = coset_transversal(
            &additive3(),
            &SubgroupHandle::Ball { level: 0 },
            &SubgroupHandle::Ball { level: 2 },
        )
        .unwrap();
        let expected: Vec<Elt> = (0..9).map(Elt::int).collect();
        assert_eq!(reps, expected);
        assert!(coset_transversal(
            &additive3(),
            &SubgroupHandle::Ball { level: 2 },
            &SubgroupHandle::Ball { level: 0 },
        )
        .is_err());
    }

    #[test]
    fn finite_transversal_covers_once() {
        let s3 = GroupModel::finite(FiniteGroup::symmetric(3));
        // The cyclic subgroup generated by the 3-cycle "120".
        let fg = FiniteGroup::symmetric(3);
        let c3 = fg.generated(&[fg.labels().iter().position(|l| l == "120").unwrap()]);
        assert_eq!(c3.len(), 3);
        let reps = coset_transversal(&s3, &SubgroupHandle::Full, &SubgroupHandle::finite_set(c3)).unwrap();
        assert_eq!(reps.len(), 2);
    }

    #[test]
    fn haar_measures_and_modular_function() {
        let g = additive3();
        let z3 = Cell::ball(3, &rat(0, 1), 0);
        let three_z3 = Cell::ball(3, &rat(0, 1), 1);
        assert_eq!(cell_measure(&g, &z3).unwrap(), rat(1, 1));
        assert_eq!(cell_measure(&g, &three_z3).unwrap(), rat(1, 3));
        let aff = affine3();
        let slice = Cell::affine_cell(3, 1, &rat(0, 1), 0);
        assert_eq!(cell_measure(&aff, &slice).unwrap(), rat(3, 1));
        assert_eq!(
            aff.modular_function(&Elt::affine(2, rat(7, 1))).unwrap(),
            rat(9, 1)
        );
        assert_eq!(
            g.modular_function(&Elt::int(5)).unwrap(),
            rat(1, 1)
        );
    }

    #[test]
    fn modular_function_matches_right_translation_of_measure() {
        // mu(S g) = delta(g) mu(S) on a spread of affine cells and elements.
        let aff = affine3();
        let cells = [
            Cell::affine_cell(3, 0, &rat(0, 1), 0),
            Cell::affine_cell(3, 1, &rat(1, 1), 2),
            Cell::affine_cell(3, -2, &rat(1, 3), -1),
        ];
        let elems = [
            Elt::affine(1, rat(0, 1)),
            Elt::affine(-1, rat(2, 1)),
            Elt::affine(3, rat(1, 9)),
        ];
        for s in &cells {
            for gelt in &elems {
                let translated = translate_cell_elt(&aff, s, gelt, Side::Right).unwrap();
                let lhs = cell_measure(&aff, &translated).unwrap();
                let rhs = aff.modular_function(gelt).unwrap() * cell_measure(&aff, s).unwrap();
                assert_eq!(lhs, rhs);
                // Left translation preserves left Haar measure.
                let left = translate_cell_elt(&aff, s, gelt, Side::Left).unwrap();
                assert_eq!(cell_measure(&aff, &left).unwrap(), cell_measure(&aff, s).unwrap());
            }
        }
    }

    #[test]
    fn cell_products_and_inverses_are_exact() {
        let g = additive3();
        let z3 = Cell::ball(3, &rat(0, 1), 0);
        let shifted = Cell::ball(3, &rat(1, 1), 1);
        // Z_3 + (1 + 3 Z_3) = Z_3.
        assert_eq!(group_op_cell(&g, &z3, &shifted).unwrap(), z3);
        let aff = affine3();
        let a = Cell::affine_cell(3, 1, &rat(0, 1), 0);
        let b = Cell::affine_cell(3, 0, &rat(0, 1), 0);
        let ab = group_op_cell(&aff, &a, &b).unwrap();
        assert_eq!(ab, Cell::affine_cell(3, 1, &rat(0, 1), 0));
        // Membership check: products of members land in the product cell.
        let x = Elt::affine(1, rat(2, 1));
        let y = Elt::affine(0, rat(1, 1));
        assert!(a.contains_point(&x) && b.contains_point(&y));
        assert!(ab.contains_point(&aff.op(&x, &y).unwrap()));
        // Inverse of {3} x (1 + 3 Z_3) is {1/3} x (2/3 + Z_3... ) checked
        // pointwise.
        let c = Cell::affine_cell(3, 1, &rat(1, 1), 1);
        let ci = group_inv_cell(&aff, &c).unwrap();
        assert_eq!(ci, Cell::affine_cell(3, -1, &rat(-1, 3), 0));
        let member = Elt::affine(1, rat(4, 1));
        assert!(c.contains_point(&member));
        assert!(ci.contains_point(&aff.inv(&member).unwrap()));
        assert_eq!(group_inv_cell(&aff, &ci).unwrap(), c);
    }

    #[test]
    fn opposite_group_reverses_and_unwraps() {
        let aff = affine3();
        let op = GroupModel::opposite(aff.clone());
        let x = Elt::affine(1, rat(0, 1));
        let y = Elt::affine(0, rat(1, 1));
        assert_eq!(op.op(&x, &y).unwrap(), aff.op(&y, &x).unwrap());
        // Double opposite unwraps; abelian opposite is itself.
        assert_eq!(GroupModel::opposite(op), aff);
        assert_eq!(GroupModel::opposite(additive3()), additive3());
        // Finite opposite transposes the table concretely.
        let s3 = FiniteGroup::symmetric(3);
        let s3op = s3.opposite();
        assert_eq!(s3op.op(1, 2), s3.op(2, 1));
        // Modular function of the opposite is the reciprocal.
        let opp = GroupModel::opposite(affine3());
        assert_eq!(
            opp.modular_function(&Elt::affine(2, rat(0, 1))).unwrap(),
            rat(1, 9)
        );
    }

    #[test]
    fn product_groups_work_componentwise() {
        let g = GroupModel::product(additive3(), GroupModel::finite(FiniteGroup::cyclic(2)));
        let a = Elt::pair(Elt::int(1), Elt::Finite(1));
        let b = Elt::pair(Elt::int(2), Elt::Finite(1));
        assert_eq!(
            g.op(&a, &b).unwrap(),
            Elt::pair(Elt::int(3), Elt::Finite(0))
        );
        let h = SubgroupHandle::product(
            SubgroupHandle::Ball { level: 1 },
            SubgroupHandle::finite_set(vec![0]),
        );
        assert!(validate_subgroup(&g, &h).is_ok());
        assert!(subgroup_contains(&g, &h, &Elt::pair(Elt::int(3), Elt::Finite(0))));
        assert!(!subgroup_contains(&g, &h, &a));
        assert_eq!(subgroup_measure(&g, &h).unwrap(), rat(1, 3));
    }

    #[test]
    fn affine_transversal() {
        let reps = coset_transversal(
            &affine3(),
            &SubgroupHandle::AffineBall { level: 0 },
            &SubgroupHandle::AffineBall { level: 2 },
        )
        .unwrap();
        assert_eq!(reps.len(), 9);
        assert_eq!(reps[4], Elt::affine(0, rat(4, 1)));
        // All reps lie in the big subgroup and in distinct cosets.
        let aff = affine3();
        for (i, a) in reps.iter().enumerate() {
            assert!(subgroup_contains(
                &aff,
                &SubgroupHandle::AffineBall { level: 0 },
                a
            ));
            for b in reps.iter().skip(i + 1) {
                let diff = aff.op(&aff.inv(a).unwrap(), b).unwrap();
                assert!(!subgroup_contains(
                    &aff,
                    &SubgroupHandle::AffineBall { level: 2 },
                    &diff
                ));
            }
        }
    }
}
