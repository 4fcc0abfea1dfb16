//! Locally constant functions of compact support, stored exactly.
//!
//! A `Func` is a finite formal sum of cyclotomic multiples of cell
//! indicators, kept in a canonical presentation: cells pairwise disjoint,
//! zero terms dropped, equal-valued sibling families merged into their
//! parent, terms sorted. Two constructions of the same function compare
//! equal, which the rest of the crate leans on for exact identity checks.

use serde::{Deserialize, Serialize};

use crate::scalar::Cyclotomic;
use crate::space::{
    cell_intersection, cell_sample_point, joint_refinement, merge_siblings, Cell, Elt, OpenSet,
    SpaceModel,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FuncRepr", into = "FuncRepr")]
pub struct Func {
    space: SpaceModel,
    terms: Vec<(Cell, Cyclotomic)>,
}

impl Func {
    pub fn zero(space: SpaceModel) -> Func {
        Func {
            space,
            terms: Vec::new(),
        }
    }

    /// Indicator of a single cell.
    pub fn indicator_cell(space: SpaceModel, cell: Cell) -> Result<Func> {
        Func::from_terms(space, vec![(cell, Cyclotomic::from_int(1))])
    }

    pub fn indicator(space: SpaceModel, set: &OpenSet) -> Result<Func> {
        Func::from_terms(
            space,
            set.cells()
                .iter()
                .map(|c| (c.clone(), Cyclotomic::from_int(1)))
                .collect(),
        )
    }

    /// Builds the sum of the given scaled indicators (overlapping terms
    /// add), then canonicalizes.
    pub fn from_terms(space: SpaceModel, terms: Vec<(Cell, Cyclotomic)>) -> Result<Func> {
        for (c, _) in &terms {
            if !space.admits_cell(c) {
                return Err(Error::Malformed(format!(
                    "cell {c:?} does not fit the space"
                )));
            }
        }
        let terms = canonicalize(terms)?;
        Ok(Func { space, terms })
    }

    pub fn space(&self) -> &SpaceModel {
        &self.space
    }

    /// Canonical term list: disjoint cells, nonzero values, sorted.
    pub fn terms(&self) -> &[(Cell, Cyclotomic)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, x: &Elt) -> Cyclotomic {
        for (c, v) in &self.terms {
            if c.contains_point(x) {
                return v.clone();
            }
        }
        Cyclotomic::from_int(0)
    }

    pub fn support(&self) -> Result<OpenSet> {
        OpenSet::from_cells(self.terms.iter().map(|(c, _)| c.clone()).collect())
    }

    pub fn add(&self, other: &Func) -> Result<Func> {
        if self.space != other.space {
            return Err(Error::Malformed("adding functions on different spaces".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Func::from_terms(self.space.clone(), terms)
    }

    pub fn sub(&self, other: &Func) -> Result<Func> {
        self.add(&other.scale(&Cyclotomic::from_int(-1)))
    }

    pub fn scale(&self, c: &Cyclotomic) -> Func {
        if c.is_zero() {
            return Func::zero(self.space.clone());
        }
        Func {
            space: self.space.clone(),
            terms: self
                .terms
                .iter()
                .map(|(cell, v)| (cell.clone(), v.mul(c)))
                .collect(),
        }
    }

    /// Pointwise product.
    pub fn mul_pointwise(&self, other: &Func) -> Result<Func> {
        if self.space != other.space {
            return Err(Error::Malformed(
                "multiplying functions on different spaces".into(),
            ));
        }
        let mut terms = Vec::new();
        for (c1, v1) in &self.terms {
            for (c2, v2) in &other.terms {
                for piece in cell_intersection(c1, c2)? {
                    terms.push((piece, v1.mul(v2)));
                }
            }
        }
        Func::from_terms(self.space.clone(), terms)
    }

    /// Pointwise restriction to an open set (multiplication by its
    /// indicator).
    pub fn restrict(&self, set: &OpenSet) -> Result<Func> {
        let mut terms = Vec::new();
        for (c, v) in &self.terms {
            for s in set.cells() {
                for piece in cell_intersection(c, s)? {
                    terms.push((piece, v.clone()));
                }
            }
        }
        Func::from_terms(self.space.clone(), terms)
    }

    pub fn conjugate_values(&self) -> Func {
        Func {
            space: self.space.clone(),
            terms: self
                .terms
                .iter()
                .map(|(c, v)| (c.clone(), v.conjugate()))
                .collect(),
        }
    }

    /// Values on a grid each of whose cells is contained in a term cell or
    /// disjoint from all of them (see [`common_grid`]).
    pub fn values_on_grid(&self, grid: &[Cell]) -> Vec<Cyclotomic> {
        grid.iter()
            .map(|c| self.evaluate(&cell_sample_point(c)))
            .collect()
    }
}

// Canonical presentation: resolve overlaps by refining to joint levels and
// adding values, drop zeros, merge equal-valued sibling families, sort.
fn canonicalize(mut terms: Vec<(Cell, Cyclotomic)>) -> Result<Vec<(Cell, Cyclotomic)>> {
    terms.retain(|(_, v)| !v.is_zero());
    let mut guard = 0;
    'outer: loop {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Unsupported(
                "function presentation too irregular to canonicalize".into(),
            ));
        }
        for i in 0..terms.len() {
            for j in (i + 1)..terms.len() {
                if terms[i].0.is_disjoint_from(&terms[j].0) {
                    continue;
                }
                if terms[i].0 == terms[j].0 {
                    let (cell, vi) = terms[i].clone();
                    let vj = terms[j].1.clone();
                    let sum = vi.add(&vj);
                    terms.remove(j);
                    terms.remove(i);
                    if !sum.is_zero() {
                        terms.push((cell, sum));
                    }
                    continue 'outer;
                }
                // Overlapping, not equal: refine both to joint levels.
                let (a, va) = terms[i].clone();
                let (b, vb) = terms[j].clone();
                let (fa, fb) = joint_refinement(&a, &b)?;
                terms.remove(j);
                terms.remove(i);
                terms.extend(fa.into_iter().map(|c| (c, va.clone())));
                terms.extend(fb.into_iter().map(|c| (c, vb.clone())));
                continue 'outer;
            }
        }
        break;
    }
    let mut terms = merge_siblings(terms);
    terms.sort_by(|(a, _), (b, _)| a.cmp(b));
    Ok(terms)
}

/// A common refinement grid for a family of functions: disjoint cells
/// covering the union of all supports, each contained in or disjoint from
/// every term cell of every function. Functions are constant on grid cells.
pub fn common_grid(funcs: &[&Func]) -> Result<Vec<Cell>> {
    let mut all_cells: Vec<Cell> = Vec::new();
    for f in funcs {
        all_cells.extend(f.terms.iter().map(|(c, _)| c.clone()));
    }
    let mut grid = crate::space::disjointify(all_cells.clone())?;
    let mut guard = 0;
    'outer: loop {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Unsupported("grid refinement does not settle".into()));
        }
        for gi in 0..grid.len() {
            for c in &all_cells {
                if grid[gi].is_disjoint_from(c) || grid[gi].is_subset_of(c) {
                    continue;
                }
                // The grid cell straddles a term cell: refine it.
                let (pieces, _) = joint_refinement(&grid[gi], c)?;
                grid.remove(gi);
                grid.extend(pieces);
                continue 'outer;
            }
        }
        grid.sort();
        grid.dedup();
        return Ok(grid);
    }
}

#[derive(Serialize, Deserialize)]
struct FuncRepr {
    space: SpaceModel,
    terms: Vec<FuncTermRepr>,
}

#[derive(Serialize, Deserialize)]
struct FuncTermRepr {
    cell: Cell,
    value: Cyclotomic,
}

impl From<Func> for FuncRepr {
    fn from(f: Func) -> Self {
        FuncRepr {
            space: f.space,
            terms: f
                .terms
                .into_iter()
                .map(|(cell, value)| FuncTermRepr { cell, value })
                .collect(),
        }
    }
}

impl TryFrom<FuncRepr> for Func {
    type Error = Error;
    fn try_from(r: FuncRepr) -> Result<Func> {
        Func::from_terms(
            r.space,
            r.terms.into_iter().map(|t| (t.cell, t.value)).collect(),
        )
    }
}
