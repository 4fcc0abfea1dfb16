//! Polynomial functions: a function is polynomial when its translates over
//! some identity neighborhood stay inside a finite-dimensional space. Over
//! our cell models that space is computed exactly: saturate the support
//! under a compact open subgroup, list the coset translates, and eliminate.
//! Certificates carry the witnessing data and re-validate from scratch.

use serde::{Deserialize, Serialize};

use crate::action::{DomainStatus, PartialAction};
use crate::func::{common_grid, Func};
use crate::group::{
    cell_measure, cell_subgroup_relation, group_inv_cell, refine_group_cell, subgroup_cells,
    subgroup_contains, subgroup_intersection, subgroup_is_compact, subgroup_is_open,
    subgroup_measure, validate_subgroup, GroupModel, SubgroupHandle,
};
use crate::induced::{forall_translators_in, induced_act};
use crate::linalg::{express_in_span, independent_subset};
use crate::scalar::{rat_int, Cyclotomic};
use crate::space::{
    cell_point, cell_sample_point, cell_vs_cells, Cell, Elt, OpenSet, SetRelation, SpaceModel,
};
use crate::{Error, Result};

/// Cell budget for saturation; exceeding it reports absence, never a
/// non-polynomiality verdict.
pub const SATURATION_BOUND: usize = 4096;

const FORALL_DEPTH: u32 = 64;

/// Witness that a function is polynomial: a compact open subgroup, a
/// saturated support, a basis of the translate span, and the exact
/// coefficient matrices on a coset transversal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialCertificate {
    #[serde(rename = "G0")]
    pub g0: SubgroupHandle,
    /// Saturated support: C·G0 = C, checked on coset representatives.
    #[serde(rename = "C")]
    pub c: OpenSet,
    pub basis: Vec<Func>,
    /// psi on the transversal: matrix[i][j] is the coefficient of basis[i]
    /// in rep·basis[j].
    #[serde(rename = "psi")]
    pub coefficients: Vec<TransversalEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalEntry {
    pub cell: Cell,
    pub rep: Elt,
    pub matrix: Vec<Vec<Cyclotomic>>,
}

impl PolynomialCertificate {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Evaluation points and coefficients dual to a basis:
/// sum_j coeffs[j][k] f_i(points[j]) = delta_ik.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPoints {
    pub points: Vec<Elt>,
    pub coeffs: Vec<Vec<Cyclotomic>>,
}

impl DualPoints {
    /// Checks the delta identity against a basis by direct evaluation.
    pub fn verify(&self, basis: &[Func]) -> bool {
        if self.points.len() != basis.len() || self.coeffs.len() != basis.len() {
            return false;
        }
        for (i, f) in basis.iter().enumerate() {
            for k in 0..basis.len() {
                let mut sum = Cyclotomic::from_int(0);
                for (j, x) in self.points.iter().enumerate() {
                    sum = sum.add(&self.coeffs[j][k].mul(&f.evaluate(x)));
                }
                let expect = Cyclotomic::from_int(if i == k { 1 } else { 0 });
                if sum != expect {
                    return false;
                }
            }
        }
        true
    }
}

// Translates of a function whose cells are at most this fine are constant
// on cosets of the matching level handle. Affine cells need level - k for
// the p^k-scaled coordinate and level for the unscaled one; the max covers
// both translation sides.
pub(crate) fn stab_exponent(cell: &Cell) -> i64 {
    match cell {
        Cell::FinitePoint(_) => i64::MIN,
        Cell::Ball { level, .. } => *level,
        Cell::AffineCell { k, level, .. } => (*level).max(*level - *k),
        Cell::Pair(a, b) => stab_exponent(a).max(stab_exponent(b)),
    }
}

/// The finest cell exponent appearing in f's support; translates over a
/// subgroup at this level or deeper are cellwise constant.
pub fn func_exponent(f: &Func) -> i64 {
    f.terms()
        .iter()
        .map(|(c, _)| stab_exponent(c))
        .max()
        .unwrap_or(i64::MIN)
}

fn level_handle(group: &GroupModel, m: i64) -> SubgroupHandle {
    match group {
        // Group cells of finite groups are points; refinement below never
        // consults the handle there.
        GroupModel::Finite(_) => SubgroupHandle::Full,
        GroupModel::PAdicAdditive { .. } => SubgroupHandle::Ball { level: m },
        GroupModel::PAdicAffine { .. } => SubgroupHandle::AffineBall { level: m },
        GroupModel::Product { left, right } => {
            SubgroupHandle::product(level_handle(left, m), level_handle(right, m))
        }
        GroupModel::Opposite { base } => level_handle(base, m),
    }
}

// Coset decomposition of g0, fine enough that functions with cells no
// finer than `exponent` have constant translates on each coset.
pub(crate) fn stabilizing_cosets(
    group: &GroupModel,
    g0: &SubgroupHandle,
    exponent: i64,
) -> Result<Vec<(Elt, Cell)>> {
    let m = if exponent == i64::MIN { 0 } else { exponent };
    let target = level_handle(group, m);
    let mut out = Vec::new();
    for cell in subgroup_cells(group, g0)? {
        out.extend(refine_group_cell(group, &cell, &target)?);
    }
    Ok(out)
}

fn require_compact_open(group: &GroupModel, h: &SubgroupHandle) -> Result<()> {
    validate_subgroup(group, h)?;
    if !subgroup_is_open(group, h) || !subgroup_is_compact(group, h) {
        return Err(Error::NotASubgroup(format!("{h:?} is not compact open")));
    }
    Ok(())
}

/// Whether g0 sits inside V_f, decided exactly cell by cell.
pub fn subgroup_in_vf(a: &PartialAction, f: &Func, g0: &SubgroupHandle) -> Result<bool> {
    let supp: Vec<&Cell> = f.terms().iter().map(|(c, _)| c).collect();
    if supp.is_empty() {
        return Ok(true);
    }
    for b in subgroup_cells(a.group(), g0)? {
        let binv = group_inv_cell(a.group(), &b)?;
        if !forall_translators_in(a, &supp, &binv, FORALL_DEPTH)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn subgroup_contained(group: &GroupModel, inner: &SubgroupHandle, outer: &SubgroupHandle) -> bool {
    use SubgroupHandle::*;
    match (group, inner, outer) {
        (_, _, Full) => true,
        (GroupModel::Finite(g), Full, FiniteSet { elements }) => elements.len() == g.order(),
        (GroupModel::Finite(_), FiniteSet { elements: a }, FiniteSet { elements: b }) => {
            a.iter().all(|i| b.contains(i))
        }
        (GroupModel::PAdicAdditive { .. }, Ball { level: a }, Ball { level: b }) => a >= b,
        (GroupModel::PAdicAffine { .. }, AffineBall { level: a }, AffineBall { level: b }) => {
            a >= b
        }
        (
            GroupModel::Product { left, right },
            ProductSub {
                left: il,
                right: ir,
            },
            ProductSub {
                left: ol,
                right: or,
            },
        ) => subgroup_contained(left, il, ol) && subgroup_contained(right, ir, or),
        (GroupModel::Opposite { base }, i, o) => subgroup_contained(base, i, o),
        _ => false,
    }
}

// Adds the parts of `c` not covered by the (pairwise disjoint) family.
fn push_outside_pieces(c: &Cell, cells: &[Cell], out: &mut Vec<Cell>) {
    match cell_vs_cells(c, cells) {
        SetRelation::Inside => {}
        SetRelation::Disjoint => out.push(c.clone()),
        SetRelation::Straddles => {
            for s in c.split() {
                push_outside_pieces(&s, cells, out);
            }
        }
    }
}

/// Smallest cell set C containing `s` with C·g0 = C (on coset
/// representatives), grown by iterating cell images. None when the
/// iteration exits the action's domain or exceeds `bound` cells.
pub fn saturate(
    a: &PartialAction,
    s: &OpenSet,
    g0: &SubgroupHandle,
    bound: usize,
) -> Result<Option<OpenSet>> {
    require_compact_open(a.group(), g0)?;
    let mut cells: Vec<Cell> = s.cells().to_vec();
    if cells.is_empty() {
        return Ok(Some(OpenSet::empty()));
    }
    loop {
        let exponent = cells.iter().map(stab_exponent).max().unwrap();
        let cosets = stabilizing_cosets(a.group(), g0, exponent)?;
        let mut grew = false;
        let mut i = 0;
        while i < cells.len() {
            let c = cells[i].clone();
            for (u, _) in &cosets {
                if a.domain_status_at(&c, u)? != DomainStatus::In {
                    return Ok(None);
                }
                let img = a.image_cell(&c, u)?;
                let mut fresh = Vec::new();
                push_outside_pieces(&img, &cells, &mut fresh);
                if !fresh.is_empty() {
                    if cells.len() + fresh.len() > bound {
                        return Ok(None);
                    }
                    cells.extend(fresh);
                    grew = true;
                }
            }
            i += 1;
        }
        if !grew {
            break;
        }
        // New cells can be finer than the old exponent; go around again.
    }
    Ok(Some(OpenSet::from_cells(cells)?))
}

struct SpanData {
    cosets: Vec<(Elt, Cell)>,
    grid: Vec<Cell>,
    basis: Vec<Func>,
    basis_rows: Vec<Vec<Cyclotomic>>,
}

fn span_basis(a: &PartialAction, f: &Func, g0: &SubgroupHandle) -> Result<SpanData> {
    let cosets = stabilizing_cosets(a.group(), g0, func_exponent(f))?;
    let translates: Vec<Func> = cosets
        .iter()
        .map(|(u, _)| induced_act(a, u, f))
        .collect::<Result<_>>()?;
    let mut for_grid: Vec<&Func> = translates.iter().collect();
    for_grid.push(f);
    let grid = common_grid(&for_grid)?;
    let rows: Vec<Vec<Cyclotomic>> = translates.iter().map(|t| t.values_on_grid(&grid)).collect();
    let kept = independent_subset(&rows);
    let basis: Vec<Func> = kept.iter().map(|&i| translates[i].clone()).collect();
    let basis_rows: Vec<Vec<Cyclotomic>> = kept.iter().map(|&i| rows[i].clone()).collect();
    Ok(SpanData {
        cosets,
        grid,
        basis,
        basis_rows,
    })
}

/// Linearly independent basis of span{u·f : u in g0}. Requires the support
/// to saturate under g0 and g0 to sit inside V_f.
pub fn translate_span(a: &PartialAction, f: &Func, g0: &SubgroupHandle) -> Result<Vec<Func>> {
    saturate(a, &f.support()?, g0, SATURATION_BOUND)?.ok_or_else(|| {
        Error::OutsideDomain("the support does not saturate under the subgroup".into())
    })?;
    if !subgroup_in_vf(a, f, g0)? {
        return Err(Error::OutsideDomain(
            "the subgroup is not contained in V_f".into(),
        ));
    }
    Ok(span_basis(a, f, g0)?.basis)
}

fn build_certificate(
    a: &PartialAction,
    f: &Func,
    g0: &SubgroupHandle,
    c: OpenSet,
) -> Result<Option<PolynomialCertificate>> {
    let data = span_basis(a, f, g0)?;
    // Translates of basis elements land back among the listed translates
    // (their canonical forms coincide), so the one grid serves throughout.
    let mut entries = Vec::with_capacity(data.cosets.len());
    for (u, cell) in &data.cosets {
        let n = data.basis.len();
        let mut matrix = vec![vec![Cyclotomic::from_int(0); n]; n];
        for (j, fj) in data.basis.iter().enumerate() {
            let ufj = induced_act(a, u, fj)?;
            let coeffs = match express_in_span(&data.basis_rows, &ufj.values_on_grid(&data.grid)) {
                Some(cs) => cs,
                None => return Ok(None),
            };
            for i in 0..n {
                matrix[i][j] = coeffs[i].clone();
            }
        }
        entries.push(TransversalEntry {
            cell: cell.clone(),
            rep: u.clone(),
            matrix,
        });
    }
    if express_in_span(&data.basis_rows, &f.values_on_grid(&data.grid)).is_none() {
        return Ok(None);
    }
    Ok(Some(PolynomialCertificate {
        g0: g0.clone(),
        c,
        basis: data.basis,
        coefficients: entries,
    }))
}

fn poly_search(
    a: &PartialAction,
    f: &Func,
    chain: &[SubgroupHandle],
) -> Result<(Option<PolynomialCertificate>, Vec<String>)> {
    if chain.is_empty() {
        return Err(Error::Malformed("the subgroup chain is empty".into()));
    }
    for w in chain.windows(2) {
        if !subgroup_contained(a.group(), &w[1], &w[0]) {
            return Err(Error::Malformed(format!(
                "chain is not descending: {:?} is not contained in {:?}",
                w[1], w[0]
            )));
        }
    }
    let mut reasons = Vec::new();
    for g0 in chain {
        if let Err(e) = require_compact_open(a.group(), g0) {
            reasons.push(format!("{g0:?}: {e}"));
            continue;
        }
        let c = match saturate(a, &f.support()?, g0, SATURATION_BOUND)? {
            Some(c) => c,
            None => {
                reasons.push(format!(
                    "{g0:?}: support does not saturate within {SATURATION_BOUND} cells"
                ));
                continue;
            }
        };
        if !subgroup_in_vf(a, f, g0)? {
            reasons.push(format!("{g0:?}: subgroup escapes V_f"));
            continue;
        }
        match build_certificate(a, f, g0, c)? {
            Some(cert) => return Ok((Some(cert), reasons)),
            None => {
                reasons.push(format!("{g0:?}: translates do not close into a finite span"));
            }
        }
    }
    Ok((None, reasons))
}

/// First subgroup in the descending chain that certifies f as polynomial;
/// None when none does.
pub fn is_polynomial(
    a: &PartialAction,
    f: &Func,
    chain: &[SubgroupHandle],
) -> Result<Option<PolynomialCertificate>> {
    Ok(poly_search(a, f, chain)?.0)
}

/// The default descending search chain: balls of increasing level for the
/// p-adic models, whole group then trivial subgroup for finite ones.
pub fn canonical_chain(group: &GroupModel, deepest: i64) -> Vec<SubgroupHandle> {
    match group {
        GroupModel::Finite(g) => vec![
            SubgroupHandle::Full,
            SubgroupHandle::finite_set(vec![g.identity()]),
        ],
        GroupModel::PAdicAdditive { .. } => (0..=deepest.max(0))
            .map(|level| SubgroupHandle::Ball { level })
            .collect(),
        GroupModel::PAdicAffine { .. } => (0..=deepest.max(0))
            .map(|level| SubgroupHandle::AffineBall { level })
            .collect(),
        GroupModel::Product { left, right } => {
            let l = canonical_chain(left, deepest);
            let r = canonical_chain(right, deepest);
            let n = l.len().max(r.len());
            (0..n)
                .map(|i| {
                    SubgroupHandle::product(
                        l[i.min(l.len() - 1)].clone(),
                        r[i.min(r.len() - 1)].clone(),
                    )
                })
                .collect()
        }
        GroupModel::Opposite { base } => canonical_chain(base, deepest),
    }
}

fn chain_depth(f: &Func) -> i64 {
    let e = func_exponent(f);
    if e == i64::MIN {
        2
    } else {
        (e + 2).max(2)
    }
}

/// Points and exact coefficients dual to a linearly independent basis.
pub fn dual_points(basis: &[Func]) -> Result<DualPoints> {
    if basis.is_empty() {
        return Ok(DualPoints {
            points: Vec::new(),
            coeffs: Vec::new(),
        });
    }
    let refs: Vec<&Func> = basis.iter().collect();
    let grid = common_grid(&refs)?;
    let rows: Vec<Vec<Cyclotomic>> = basis.iter().map(|f| f.values_on_grid(&grid)).collect();
    let eval = crate::linalg::Mat::from_rows(rows.clone());
    let (_, pivots) = eval.rref();
    if pivots.len() < basis.len() {
        return Err(Error::Malformed("basis is linearly dependent".into()));
    }
    let points: Vec<Elt> = pivots.iter().map(|&j| cell_sample_point(&grid[j])).collect();
    let square = crate::linalg::Mat::from_rows(
        (0..basis.len())
            .map(|i| pivots.iter().map(|&j| rows[i][j].clone()).collect())
            .collect(),
    );
    let inv = square
        .inverse()
        .ok_or_else(|| Error::Malformed("basis is linearly dependent".into()))?;
    let coeffs: Vec<Vec<Cyclotomic>> = (0..basis.len())
        .map(|j| (0..basis.len()).map(|k| inv.at(j, k).clone()).collect())
        .collect();
    Ok(DualPoints { points, coeffs })
}

fn check_matrix_dims(cert: &PolynomialCertificate) -> Result<()> {
    let n = cert.basis.len();
    for entry in &cert.coefficients {
        if entry.matrix.len() != n || entry.matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Malformed(
                "certificate matrices do not match the basis size".into(),
            ));
        }
    }
    Ok(())
}

/// Re-derives every certificate invariant from scratch: supports inside C,
/// C closed under g0 on coset representatives, the transversal covering g0
/// exactly once, and the stored matrices reproducing each translate (also
/// probed one level finer).
pub fn revalidate(a: &PartialAction, cert: &PolynomialCertificate) -> Result<()> {
    require_compact_open(a.group(), &cert.g0)?;
    check_matrix_dims(cert)?;
    for b in &cert.basis {
        if b.space() != a.space() {
            return Err(Error::Malformed("basis function on the wrong space".into()));
        }
        for (cell, _) in b.terms() {
            if cell_vs_cells(cell, cert.c.cells()) != SetRelation::Inside {
                return Err(Error::Malformed(format!(
                    "basis support cell {cell:?} is not inside C"
                )));
            }
        }
    }
    let exponent = cert
        .c
        .cells()
        .iter()
        .map(stab_exponent)
        .max()
        .unwrap_or(i64::MIN);
    let cosets = stabilizing_cosets(a.group(), &cert.g0, exponent)?;
    for cell in cert.c.cells() {
        for (u, _) in &cosets {
            if a.domain_status_at(cell, u)? != DomainStatus::In {
                return Err(Error::Malformed(format!(
                    "C escapes the action's domain at {u:?}"
                )));
            }
            let img = a.image_cell(cell, u)?;
            if cell_vs_cells(&img, cert.c.cells()) != SetRelation::Inside {
                return Err(Error::Malformed(format!("C is not saturated at {u:?}")));
            }
        }
    }
    // The entries partition g0: all inside, pairwise disjoint, full measure.
    let mut total = rat_int(0);
    for (i, entry) in cert.coefficients.iter().enumerate() {
        if cell_subgroup_relation(a.group(), &entry.cell, &cert.g0)? != SetRelation::Inside {
            return Err(Error::Malformed(format!(
                "transversal cell {:?} is not inside the subgroup",
                entry.cell
            )));
        }
        if !entry.cell.contains_point(&entry.rep) || !subgroup_contains(a.group(), &cert.g0, &entry.rep)
        {
            return Err(Error::Malformed(
                "transversal representative outside its coset".into(),
            ));
        }
        for other in &cert.coefficients[..i] {
            if !entry.cell.is_disjoint_from(&other.cell) {
                return Err(Error::Malformed("transversal cells overlap".into()));
            }
        }
        total += cell_measure(a.group(), &entry.cell)?;
    }
    if total != subgroup_measure(a.group(), &cert.g0)? {
        return Err(Error::Malformed(
            "transversal does not cover the subgroup".into(),
        ));
    }
    // Matrices reproduce the translates, at the representative and at a
    // second point of the same coset one level finer.
    for entry in &cert.coefficients {
        let mut probes = vec![entry.rep.clone()];
        if cell_point(&entry.cell).is_none() {
            if let Some(child) = entry
                .cell
                .split()
                .into_iter()
                .find(|ch| !ch.contains_point(&entry.rep))
            {
                probes.push(cell_sample_point(&child));
            }
        }
        for probe in probes {
            for (j, fj) in cert.basis.iter().enumerate() {
                let moved = induced_act(a, &probe, fj)?;
                let mut combo = Func::zero(a.space().clone());
                for (i, fi) in cert.basis.iter().enumerate() {
                    combo = combo.add(&fi.scale(&entry.matrix[i][j]))?;
                }
                if moved != combo {
                    return Err(Error::Malformed(format!(
                        "stored coefficients fail at {probe:?} on basis element {j}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `revalidate` plus the conditions tying the certificate to f: g0 inside
/// V_f and f inside the span of the basis.
pub fn revalidate_for(a: &PartialAction, cert: &PolynomialCertificate, f: &Func) -> Result<()> {
    revalidate(a, cert)?;
    if !subgroup_in_vf(a, f, &cert.g0)? {
        return Err(Error::Malformed("subgroup escapes V_f".into()));
    }
    let mut refs: Vec<&Func> = cert.basis.iter().collect();
    refs.push(f);
    let grid = common_grid(&refs)?;
    let rows: Vec<Vec<Cyclotomic>> = cert.basis.iter().map(|b| b.values_on_grid(&grid)).collect();
    if express_in_span(&rows, &f.values_on_grid(&grid)).is_none() {
        return Err(Error::Malformed(
            "the function lies outside the certified span".into(),
        ));
    }
    Ok(())
}

/// The matrix psi(v) for any v in g0, by direct expression of the moved
/// basis in the basis.
pub fn psi_at(
    a: &PartialAction,
    cert: &PolynomialCertificate,
    v: &Elt,
) -> Result<Vec<Vec<Cyclotomic>>> {
    if !subgroup_contains(a.group(), &cert.g0, v) {
        return Err(Error::NotInModel(format!(
            "{v:?} is not in the certificate's subgroup"
        )));
    }
    let n = cert.basis.len();
    let moved: Vec<Func> = cert
        .basis
        .iter()
        .map(|fj| induced_act(a, v, fj))
        .collect::<Result<_>>()?;
    let mut refs: Vec<&Func> = cert.basis.iter().collect();
    refs.extend(moved.iter());
    let grid = common_grid(&refs)?;
    let rows: Vec<Vec<Cyclotomic>> = cert.basis.iter().map(|b| b.values_on_grid(&grid)).collect();
    let mut matrix = vec![vec![Cyclotomic::from_int(0); n]; n];
    for (j, m) in moved.iter().enumerate() {
        let coeffs = express_in_span(&rows, &m.values_on_grid(&grid)).ok_or_else(|| {
            Error::Malformed("certificate basis does not span its translates".into())
        })?;
        for i in 0..n {
            matrix[i][j] = coeffs[i].clone();
        }
    }
    Ok(matrix)
}

/// Freshly derived transversal coefficient family for a valid certificate.
pub fn closed_system(
    a: &PartialAction,
    cert: &PolynomialCertificate,
) -> Result<Vec<TransversalEntry>> {
    revalidate(a, cert)?;
    cert.coefficients
        .iter()
        .map(|entry| {
            Ok(TransversalEntry {
                cell: entry.cell.clone(),
                rep: entry.rep.clone(),
                matrix: psi_at(a, cert, &entry.rep)?,
            })
        })
        .collect()
}

/// The basis together with the coefficient functions phi_i on the group:
/// v·f = sum_i phi_i(v) basis_i for every v in g0, each phi_i locally
/// constant on the transversal cosets.
pub fn coefficient_functions(
    a: &PartialAction,
    f: &Func,
    cert: &PolynomialCertificate,
) -> Result<(Vec<Func>, Vec<Func>)> {
    revalidate_for(a, cert, f)?;
    let n = cert.basis.len();
    let moved: Vec<Func> = cert
        .coefficients
        .iter()
        .map(|entry| induced_act(a, &entry.rep, f))
        .collect::<Result<_>>()?;
    let mut refs: Vec<&Func> = cert.basis.iter().collect();
    refs.extend(moved.iter());
    let grid = common_grid(&refs)?;
    let rows: Vec<Vec<Cyclotomic>> = cert.basis.iter().map(|b| b.values_on_grid(&grid)).collect();
    let mut phi_terms: Vec<Vec<(Cell, Cyclotomic)>> = vec![Vec::new(); n];
    for (entry, uf) in cert.coefficients.iter().zip(moved.iter()) {
        let coeffs = express_in_span(&rows, &uf.values_on_grid(&grid)).ok_or_else(|| {
            Error::Malformed("certificate basis does not span the translates of f".into())
        })?;
        for i in 0..n {
            if !coeffs[i].is_zero() {
                phi_terms[i].push((entry.cell.clone(), coeffs[i].clone()));
            }
        }
    }
    let gspace = a.group().as_space();
    let phis = phi_terms
        .into_iter()
        .map(|terms| Func::from_terms(gspace.clone(), terms))
        .collect::<Result<Vec<_>>>()?;
    Ok((cert.basis.clone(), phis))
}

/// The function F(x,p) = f(x·p) g(p) on X x G (zero where the action is
/// undefined) together with an exact finite decomposition
/// F(x,p) = sum_i f_i(x) g_i(p) built from a coset cover of supp g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductDecomposition {
    pub function: Func,
    pub pairs: Vec<(Func, Func)>,
}

pub fn decompose_product(a: &PartialAction, f: &Func, g: &Func) -> Result<ProductDecomposition> {
    let gspace = a.group().as_space();
    if f.space() != a.space() {
        return Err(Error::NotInModel(
            "the function does not live on the action's space".into(),
        ));
    }
    if g.space() != &gspace {
        return Err(Error::NotInModel(
            "the second factor does not live on the group".into(),
        ));
    }
    let supp: Vec<&Cell> = f.terms().iter().map(|(c, _)| c).collect();
    for (d, _) in g.terms() {
        let dinv = group_inv_cell(a.group(), d)?;
        if !supp.is_empty() && !forall_translators_in(a, &supp, &dinv, FORALL_DEPTH)? {
            return Err(Error::OutsideDomain(format!(
                "support cell {d:?} is not inside V_f"
            )));
        }
    }
    let product_space = SpaceModel::product(a.space().clone(), gspace.clone());
    if f.is_zero() || g.is_zero() {
        return Ok(ProductDecomposition {
            function: Func::zero(product_space),
            pairs: Vec::new(),
        });
    }
    // On each coset fine enough to stabilize f, p·f is one fixed translate
    // and g is one fixed value.
    let target = level_handle(a.group(), func_exponent(f).max(0));
    let mut pairs = Vec::new();
    let mut big_terms: Vec<(Cell, Cyclotomic)> = Vec::new();
    for (d, gval) in g.terms() {
        for (q, sub) in refine_group_cell(a.group(), d, &target)? {
            let fq = induced_act(a, &q, f)?;
            let gi = Func::indicator_cell(gspace.clone(), sub.clone())?.scale(gval);
            for (cx, v) in fq.terms() {
                big_terms.push((Cell::pair(cx.clone(), sub.clone()), v.mul(gval)));
            }
            pairs.push((fq, gi));
        }
    }
    Ok(ProductDecomposition {
        function: Func::from_terms(product_space, big_terms)?,
        pairs,
    })
}

/// Result of reconstructing a function from a product decomposition and
/// certifying it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseVerdict {
    pub reconstructed: Option<Func>,
    pub certificate: Option<PolynomialCertificate>,
    pub diagnostics: Vec<String>,
}

impl ConverseVerdict {
    pub fn holds(&self) -> bool {
        self.certificate.is_some()
    }
}

/// Recovers f from pairs (f_i, g_i) with F(x,p) = sum f_i(x) g_i(p) by
/// dividing at a point where g does not vanish, then certifies it.
pub fn converse_polynomiality(
    a: &PartialAction,
    pairs: &[(Func, Func)],
    g: &Func,
) -> Result<ConverseVerdict> {
    if g.is_zero() {
        return Err(Error::Malformed("g vanishes identically".into()));
    }
    let q0 = cell_sample_point(&g.terms()[0].0);
    let gq0 = g.evaluate(&q0);
    let mut h = Func::zero(a.space().clone());
    for (fi, gi) in pairs {
        let weight = gi.evaluate(&q0).mul(&gq0.inv()?);
        h = h.add(&fi.scale(&weight))?;
    }
    let q0inv = a.group().inv(&q0)?;
    let reconstructed = match induced_act(a, &q0inv, &h) {
        Ok(f) => f,
        Err(e) => {
            return Ok(ConverseVerdict {
                reconstructed: None,
                certificate: None,
                diagnostics: vec![format!("reconstruction failed: {e}")],
            })
        }
    };
    let chain = canonical_chain(a.group(), chain_depth(&reconstructed));
    let (certificate, diagnostics) = poly_search(a, &reconstructed, &chain)?;
    Ok(ConverseVerdict {
        reconstructed: Some(reconstructed),
        certificate,
        diagnostics,
    })
}

/// Polynomial plateau: identically 1 on c, values in {0,1}, realized as the
/// indicator of the saturation of c under g0.
pub fn build_plateau(a: &PartialAction, c: &OpenSet, g0: &SubgroupHandle) -> Result<Func> {
    let sat = saturate(a, c, g0, SATURATION_BOUND)?.ok_or_else(|| {
        Error::OutsideDomain("the set does not saturate under the subgroup".into())
    })?;
    Func::indicator(a.space().clone(), &sat)
}

/// Outcome of lifting polynomiality from a subgroup action to the whole
/// group: a certificate, or the reason none was assembled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftOutcome {
    pub certificate: Option<PolynomialCertificate>,
    pub diagnostics: Vec<String>,
}

/// Certifies f for the full action given that it behaves polynomially for
/// the restriction to h. Requires the restricted action to be locally
/// homeomorphic at the support representatives.
pub fn lift_subgroup_polynomiality(
    a: &PartialAction,
    h: &SubgroupHandle,
    f: &Func,
) -> Result<LiftOutcome> {
    let restricted = a.restrict_to_subgroup(h.clone())?;
    for (cell, _) in f.terms() {
        let x = cell_sample_point(cell);
        if restricted.locally_homeomorphic_witness(&x)?.is_none() {
            return Ok(LiftOutcome {
                certificate: None,
                diagnostics: vec![format!(
                    "the restricted action is not locally homeomorphic at {x:?}"
                )],
            });
        }
    }
    let deepest = chain_depth(f);
    let mut hchain = Vec::new();
    for g0 in canonical_chain(a.group(), deepest) {
        let cut = subgroup_intersection(a.group(), &g0, h)?;
        if hchain.last() != Some(&cut) {
            hchain.push(cut);
        }
    }
    let (hcert, hreasons) = poly_search(&restricted, f, &hchain)?;
    if hcert.is_none() {
        let mut diagnostics = vec!["not polynomial for the subgroup action".to_string()];
        diagnostics.extend(hreasons);
        return Ok(LiftOutcome {
            certificate: None,
            diagnostics,
        });
    }
    let (certificate, diagnostics) = poly_search(a, f, &canonical_chain(a.group(), deepest))?;
    Ok(LiftOutcome {
        certificate,
        diagnostics,
    })
}

/// Joint certificate for a commuting-product action from certificates for
/// the two factor actions.
pub fn joint_polynomiality(
    ap: &PartialAction,
    f: &Func,
    cert_left: &PolynomialCertificate,
    cert_right: &PolynomialCertificate,
) -> Result<PolynomialCertificate> {
    let (l, r) = ap.commuting_factors().ok_or_else(|| {
        Error::Unsupported("joint polynomiality needs a commuting-product tree".into())
    })?;
    revalidate_for(l, cert_left, f)?;
    revalidate_for(r, cert_right, f)?;
    let g0 = SubgroupHandle::product(cert_left.g0.clone(), cert_right.g0.clone());
    poly_search(ap, f, &[g0])?.0.ok_or_else(|| {
        Error::Malformed("factor certificates do not assemble into a joint certificate".into())
    })
}
