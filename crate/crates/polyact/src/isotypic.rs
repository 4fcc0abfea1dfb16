//! Representation theory of the finite quotients G0/G1 of a compact open
//! subgroup: matrix component functions, characters, orthogonality, and the
//! isotypic projectors. Everything reduces to exact sums over an explicit
//! transversal, weighted by the mass-one Haar measure.

use serde::{Deserialize, Serialize};

use crate::action::PartialAction;
use crate::func::Func;
use crate::group::{FiniteGroup, GroupModel, SubgroupHandle};
use crate::induced::induced_act;
use crate::linalg::Mat;
use crate::poly::{func_exponent, saturate, subgroup_in_vf, SATURATION_BOUND};
use crate::scalar::{rat, Cyclotomic};
use crate::space::{cell_sample_point, pow_p, Cell, Elt, OpenSet};
use crate::{Error, Result};

/// A finite-dimensional representation over the cyclotomics, tabulated on
/// every element of a finite group. `irreducible` is the supplier's claim;
/// `verify_representation` measures the truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub group: FiniteGroup,
    pub dim: usize,
    /// matrices[e][i][j], indexed by element id.
    pub matrices: Vec<Vec<Vec<Cyclotomic>>>,
    pub irreducible: bool,
}

fn mat_rows(m: &Mat) -> Vec<Vec<Cyclotomic>> {
    (0..m.nrows()).map(|i| m.row(i).to_vec()).collect()
}

fn int_rows(rows: &[Vec<i64>]) -> Vec<Vec<Cyclotomic>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| Cyclotomic::from_int(v)).collect())
        .collect()
}

impl Representation {
    pub fn mat(&self, e: usize) -> Mat {
        Mat::from_rows(self.matrices[e].clone())
    }

    pub fn character(&self) -> Vec<Cyclotomic> {
        self.matrices
            .iter()
            .map(|m| {
                let mut tr = Cyclotomic::from_int(0);
                for i in 0..self.dim {
                    tr = tr.add(&m[i][i]);
                }
                tr
            })
            .collect()
    }

    pub fn trivial(group: FiniteGroup) -> Representation {
        let n = group.order();
        Representation {
            group,
            dim: 1,
            matrices: vec![vec![vec![Cyclotomic::from_int(1)]]; n],
            irreducible: true,
        }
    }

    /// Left translation on the group algebra; reducible beyond order 1.
    pub fn regular(group: FiniteGroup) -> Representation {
        let n = group.order();
        let matrices = (0..n)
            .map(|g| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                Cyclotomic::from_int(if group.op(g, j) == i { 1 } else { 0 })
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Representation {
            group,
            dim: n,
            matrices,
            irreducible: n == 1,
        }
    }

    /// The character j of Z/n, sending k to the nk-th root of unity zeta^jk.
    pub fn cyclic_character(n: usize, j: usize) -> Representation {
        let group = FiniteGroup::cyclic(n);
        let matrices = (0..n)
            .map(|k| {
                let z = Cyclotomic::root_of_unity(n as u32, (j * k) as i64 % n as i64)
                    .expect("n is positive");
                vec![vec![z]]
            })
            .collect();
        Representation {
            group,
            dim: 1,
            matrices,
            irreducible: true,
        }
    }

    pub fn cyclic_irreps(n: usize) -> Vec<Representation> {
        (0..n).map(|j| Representation::cyclic_character(n, j)).collect()
    }

    /// Trivial, sign, and the integral two-dimensional representation on
    /// the sum-zero sublattice of Z^3.
    pub fn s3_irreps() -> Vec<Representation> {
        let group = FiniteGroup::symmetric(3);
        let perms: Vec<Vec<usize>> = (0..group.order())
            .map(|e| {
                group
                    .label(e)
                    .chars()
                    .map(|c| c.to_digit(10).unwrap() as usize)
                    .collect()
            })
            .collect();
        let sign = Representation {
            group: group.clone(),
            dim: 1,
            matrices: perms
                .iter()
                .map(|p| {
                    let mut inversions = 0;
                    for i in 0..3 {
                        for j in i + 1..3 {
                            if p[i] > p[j] {
                                inversions += 1;
                            }
                        }
                    }
                    vec![vec![Cyclotomic::from_int(if inversions % 2 == 0 {
                        1
                    } else {
                        -1
                    })]]
                })
                .collect(),
            irreducible: true,
        };
        let standard = Representation {
            group: group.clone(),
            dim: 2,
            matrices: perms
                .iter()
                .map(|p| {
                    // sigma moves coordinate i to p[i]; express images of
                    // e1 = (1,-1,0), e2 = (0,1,-1) back in that basis via
                    // (x,y,z) = x e1 + (x+y) e2 on the sum-zero lattice.
                    let images: Vec<[i64; 2]> = [[1i64, -1, 0], [0, 1, -1]]
                        .iter()
                        .map(|v| {
                            let mut w = [0i64; 3];
                            for i in 0..3 {
                                w[p[i]] = v[i];
                            }
                            [w[0], w[0] + w[1]]
                        })
                        .collect();
                    (0..2)
                        .map(|i| {
                            (0..2)
                                .map(|j| Cyclotomic::from_int(images[j][i]))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            irreducible: true,
        };
        vec![Representation::trivial(group), sign, standard]
    }

    /// Four characters and the rotation representation, on r^i s^j indexing.
    pub fn d4_irreps() -> Vec<Representation> {
        let group = FiniteGroup::dihedral(4);
        let mut out = Vec::new();
        for (a, b) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            let matrices = (0..8)
                .map(|idx| {
                    let (i, j) = (idx % 4, idx / 4);
                    let mut v = 1;
                    if a == -1 && i % 2 == 1 {
                        v = -v;
                    }
                    if b == -1 && j == 1 {
                        v = -v;
                    }
                    vec![vec![Cyclotomic::from_int(v)]]
                })
                .collect();
            out.push(Representation {
                group: group.clone(),
                dim: 1,
                matrices,
                irreducible: true,
            });
        }
        let r = Mat::from_rows(int_rows(&[vec![0, -1], vec![1, 0]]));
        let s = Mat::from_rows(int_rows(&[vec![1, 0], vec![0, -1]]));
        let matrices = (0..8)
            .map(|idx| {
                let (i, j) = (idx % 4, idx / 4);
                let mut m = Mat::identity(2);
                for _ in 0..i {
                    m = m.mul(&r);
                }
                if j == 1 {
                    m = m.mul(&s);
                }
                mat_rows(&m)
            })
            .collect();
        out.push(Representation {
            group,
            dim: 2,
            matrices,
            irreducible: true,
        });
        out
    }

    /// Four characters and the two-dimensional representation over Q(i),
    /// on the basis-plus-sign indexing of the quaternion table.
    pub fn q8_irreps() -> Vec<Representation> {
        let group = FiniteGroup::quaternion();
        let mut out = Vec::new();
        for (a, b) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            let matrices = (0..8)
                .map(|idx| {
                    let v = match idx % 4 {
                        0 => 1,
                        1 => a,
                        2 => b,
                        _ => a * b,
                    };
                    vec![vec![Cyclotomic::from_int(v)]]
                })
                .collect();
            out.push(Representation {
                group: group.clone(),
                dim: 1,
                matrices,
                irreducible: true,
            });
        }
        let zeta = Cyclotomic::zeta(4);
        let neg = |m: &Mat| m.scale(&Cyclotomic::from_int(-1));
        let one = Mat::identity(2);
        let i_m = Mat::from_rows(vec![
            vec![zeta.clone(), Cyclotomic::from_int(0)],
            vec![Cyclotomic::from_int(0), zeta.mul(&Cyclotomic::from_int(-1))],
        ]);
        let j_m = Mat::from_rows(int_rows(&[vec![0, -1], vec![1, 0]]));
        let k_m = i_m.mul(&j_m);
        let basis = [one, i_m, j_m, k_m];
        let matrices = (0..8)
            .map(|idx| {
                let m = &basis[idx % 4];
                mat_rows(&if idx / 4 == 1 { neg(m) } else { m.clone() })
            })
            .collect();
        out.push(Representation {
            group,
            dim: 2,
            matrices,
            irreducible: true,
        });
        out
    }
}

/// Structural audit of a representation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepReport {
    pub shape_ok: bool,
    pub identity_ok: bool,
    pub homomorphism_failures: Vec<(usize, usize)>,
    /// The exact sum (1/|G|) sum_u chi(u) chi(u^{-1}); equals 1 exactly for
    /// irreducibles.
    pub character_norm: Cyclotomic,
    pub irreducible: bool,
    pub matches_claim: bool,
}

impl RepReport {
    pub fn ok(&self) -> bool {
        self.shape_ok && self.identity_ok && self.homomorphism_failures.is_empty()
    }
}

pub fn verify_representation(rho: &Representation) -> RepReport {
    let n = rho.group.order();
    let shape_ok = rho.dim > 0
        && rho.matrices.len() == n
        && rho
            .matrices
            .iter()
            .all(|m| m.len() == rho.dim && m.iter().all(|row| row.len() == rho.dim));
    if !shape_ok {
        return RepReport {
            shape_ok,
            identity_ok: false,
            homomorphism_failures: Vec::new(),
            character_norm: Cyclotomic::from_int(0),
            irreducible: false,
            matches_claim: !rho.irreducible,
        };
    }
    let identity_ok = rho.mat(rho.group.identity()) == Mat::identity(rho.dim);
    let mut homomorphism_failures = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rho.mat(a).mul(&rho.mat(b)) != rho.mat(rho.group.op(a, b)) {
                homomorphism_failures.push((a, b));
            }
        }
    }
    let chi = rho.character();
    let mut norm = Cyclotomic::from_int(0);
    for u in 0..n {
        norm = norm.add(&chi[u].mul(&chi[rho.group.inv(u)]));
    }
    let character_norm = norm.mul(&Cyclotomic::from_rational(rat(1, n as i64)));
    let irreducible =
        identity_ok && homomorphism_failures.is_empty() && character_norm.is_one();
    RepReport {
        shape_ok,
        identity_ok,
        homomorphism_failures,
        character_norm,
        irreducible,
        matches_claim: irreducible == rho.irreducible,
    }
}

/// Outcome of pairing two irreducibles: the exact tensor
/// (1/|G|) sum_u rho_ij(u) rho'_kl(u^{-1}) collapses to c delta_il delta_jk
/// (zero for inequivalent inputs). The measured c is reported next to the
/// often-quoted value n for the equivalent case; under the mass-one measure
/// the two agree only in dimension one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurReport {
    pub equivalent: bool,
    pub constant: Cyclotomic,
    pub pattern_holds: bool,
    pub reference_constant: Cyclotomic,
    pub agrees_with_reference: bool,
}

pub fn schur_orthogonality(
    gamma: &Representation,
    gamma2: &Representation,
) -> Result<SchurReport> {
    if gamma.group != gamma2.group {
        return Err(Error::NotInModel(
            "the representations live on different groups".into(),
        ));
    }
    for rho in [gamma, gamma2] {
        let report = verify_representation(rho);
        if !report.ok() || !report.irreducible {
            return Err(Error::Malformed(
                "orthogonality needs verified irreducible inputs".into(),
            ));
        }
    }
    let n = gamma.group.order();
    let inv_n = Cyclotomic::from_rational(rat(1, n as i64));
    let pair = |i: usize, j: usize, k: usize, l: usize| {
        let mut sum = Cyclotomic::from_int(0);
        for u in 0..n {
            let v = gamma.group.inv(u);
            sum = sum.add(&gamma.matrices[u][i][j].mul(&gamma2.matrices[v][k][l]));
        }
        sum.mul(&inv_n)
    };
    let equivalent = gamma.character() == gamma2.character();
    let constant = if equivalent {
        pair(0, 0, 0, 0)
    } else {
        Cyclotomic::from_int(0)
    };
    let mut pattern_holds = true;
    for i in 0..gamma.dim {
        for j in 0..gamma.dim {
            for k in 0..gamma2.dim {
                for l in 0..gamma2.dim {
                    let expect = if equivalent && i == l && j == k {
                        constant.clone()
                    } else {
                        Cyclotomic::from_int(0)
                    };
                    if pair(i, j, k, l) != expect {
                        pattern_holds = false;
                    }
                }
            }
        }
    }
    let reference_constant = if equivalent {
        Cyclotomic::from_int(gamma.dim as i64)
    } else {
        Cyclotomic::from_int(0)
    };
    let agrees_with_reference = pattern_holds && constant == reference_constant;
    Ok(SchurReport {
        equivalent,
        constant,
        pattern_holds,
        reference_constant,
        agrees_with_reference,
    })
}

/// Which finite quotient of the subgroup a representation lives on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuotientSpec {
    /// A finite model group modulo nothing.
    Finite,
    /// Ball(base)/Ball(base+depth) in a p-adic additive group, identified
    /// with Z/p^depth by u -> u/p^base.
    Level { base: i64, depth: u32 },
}

fn quotient_transversal(
    group: &GroupModel,
    g0: &SubgroupHandle,
    spec: &QuotientSpec,
    gamma: &Representation,
) -> Result<Vec<Elt>> {
    match (group, g0, spec) {
        (GroupModel::Finite(fg), SubgroupHandle::Full, QuotientSpec::Finite) => {
            if gamma.group != **fg {
                return Err(Error::Malformed(
                    "the representation's group does not match the quotient".into(),
                ));
            }
            Ok((0..fg.order()).map(Elt::Finite).collect())
        }
        (
            GroupModel::PAdicAdditive { p },
            SubgroupHandle::Ball { level },
            QuotientSpec::Level { base, depth },
        ) => {
            if level != base {
                return Err(Error::Malformed(
                    "the quotient's base level does not match the subgroup".into(),
                ));
            }
            let order = (*p as i64).pow(*depth);
            if gamma.group != FiniteGroup::cyclic(order as usize) {
                return Err(Error::Malformed(
                    "the representation's group does not match the quotient".into(),
                ));
            }
            Ok((0..order)
                .map(|k| Elt::PAdic(pow_p(*p, *base) * crate::scalar::rat_int(k)))
                .collect())
        }
        _ => Err(Error::Unsupported(
            "no quotient realization for this group and subgroup".into(),
        )),
    }
}

// Translates u_k . f for the whole transversal, indexed by quotient label.
// Checks saturation, V_f membership, and that the quotient is at least as
// fine as f's constancy level.
fn prepared_translates(
    a: &PartialAction,
    f: &Func,
    gamma: &Representation,
    g0: &SubgroupHandle,
    spec: &QuotientSpec,
) -> Result<Vec<Func>> {
    if f.space() != a.space() {
        return Err(Error::NotInModel(
            "the function does not live on the action's space".into(),
        ));
    }
    if let QuotientSpec::Level { base, depth } = spec {
        if base + (*depth as i64) < func_exponent(f) {
            return Err(Error::Malformed(
                "the quotient is coarser than the function's constancy level".into(),
            ));
        }
    }
    if saturate(a, &f.support()?, g0, SATURATION_BOUND)?.is_none() {
        return Err(Error::OutsideDomain(
            "the support does not saturate under the subgroup".into(),
        ));
    }
    if !subgroup_in_vf(a, f, g0)? {
        return Err(Error::OutsideDomain(
            "the subgroup is not contained in V_f".into(),
        ));
    }
    quotient_transversal(a.group(), g0, spec, gamma)?
        .iter()
        .map(|u| induced_act(a, u, f))
        .collect()
}

/// The matrix component functions f_ij(x) = int f(x.u) gamma_ij(u^{-1}) du
/// over the mass-one measure on g0, as an exact transversal sum.
pub fn matrix_components(
    a: &PartialAction,
    f: &Func,
    gamma: &Representation,
    g0: &SubgroupHandle,
    spec: &QuotientSpec,
) -> Result<Vec<Vec<Func>>> {
    let translates = prepared_translates(a, f, gamma, g0, spec)?;
    let weight = Cyclotomic::from_rational(rat(1, translates.len() as i64));
    let mut out = Vec::with_capacity(gamma.dim);
    for i in 0..gamma.dim {
        let mut row = Vec::with_capacity(gamma.dim);
        for j in 0..gamma.dim {
            let mut fij = Func::zero(a.space().clone());
            for (k, uf) in translates.iter().enumerate() {
                let coeff = gamma.matrices[gamma.group.inv(k)][i][j].mul(&weight);
                fij = fij.add(&uf.scale(&coeff))?;
            }
            row.push(fij);
        }
        out.push(row);
    }
    Ok(out)
}

/// How the projector is normalized: the adopted constant is the dimension,
/// forced by idempotency under the mass-one measure; the reciprocal that
/// often accompanies the formula is reported for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub adopted_constant: Cyclotomic,
    pub reference_constant: Cyclotomic,
    pub agrees_with_reference: bool,
}

pub fn projection_normalization(gamma: &Representation) -> NormalizationReport {
    let n = gamma.dim as i64;
    NormalizationReport {
        adopted_constant: Cyclotomic::from_int(n),
        reference_constant: Cyclotomic::from_rational(rat(1, n)),
        agrees_with_reference: n == 1,
    }
}

/// P f = kappa int f(x.u) chi(u^{-1}) du with an explicit constant; the
/// idempotency tests pin the right kappa down.
pub fn projection_with_constant(
    a: &PartialAction,
    f: &Func,
    gamma: &Representation,
    g0: &SubgroupHandle,
    spec: &QuotientSpec,
    kappa: &Cyclotomic,
) -> Result<Func> {
    let translates = prepared_translates(a, f, gamma, g0, spec)?;
    let weight = Cyclotomic::from_rational(rat(1, translates.len() as i64));
    let chi = gamma.character();
    let mut out = Func::zero(a.space().clone());
    for (k, uf) in translates.iter().enumerate() {
        let coeff = chi[gamma.group.inv(k)].mul(&weight).mul(kappa);
        out = out.add(&uf.scale(&coeff))?;
    }
    Ok(out)
}

/// The isotypic projector P_gamma with the idempotent normalization.
pub fn isotypic_projection(
    a: &PartialAction,
    f: &Func,
    gamma: &Representation,
    g0: &SubgroupHandle,
    spec: &QuotientSpec,
) -> Result<Func> {
    projection_with_constant(
        a,
        f,
        gamma,
        g0,
        spec,
        &Cyclotomic::from_int(gamma.dim as i64),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotypicComponent {
    pub dim: usize,
    pub multiplicity: usize,
    /// Projections of the working-level spanning family.
    pub images: Vec<Func>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotypicDecomposition {
    pub components: Vec<IsotypicComponent>,
    /// Whether the projectors sum to the identity on the working span.
    pub complete: bool,
}

/// Projects the indicator family of C at the quotient's working level
/// through every supplied irreducible and counts multiplicities from the
/// exact projector traces.
pub fn decompose_isotypic(
    a: &PartialAction,
    c: &OpenSet,
    g0: &SubgroupHandle,
    spec: &QuotientSpec,
    irreps: &[Representation],
) -> Result<IsotypicDecomposition> {
    match saturate(a, c, g0, SATURATION_BOUND)? {
        Some(sat) if sat == *c => {}
        _ => {
            return Err(Error::Malformed(
                "the set is not saturated under the subgroup".into(),
            ))
        }
    }
    for rho in irreps {
        let report = verify_representation(rho);
        if !report.ok() || !report.irreducible {
            return Err(Error::Malformed(
                "decomposition needs verified irreducible inputs".into(),
            ));
        }
    }
    for (i, rho) in irreps.iter().enumerate() {
        for other in &irreps[..i] {
            if rho.group != other.group {
                return Err(Error::NotInModel(
                    "the representations live on different groups".into(),
                ));
            }
            if rho.character() == other.character() {
                return Err(Error::Malformed(
                    "the irreducibles are not pairwise inequivalent".into(),
                ));
            }
        }
    }
    let mut family_cells: Vec<Cell> = Vec::new();
    for cell in c.cells() {
        match spec {
            QuotientSpec::Finite => family_cells.push(cell.clone()),
            QuotientSpec::Level { base, depth } => {
                let working = base + *depth as i64;
                let level = match cell {
                    Cell::Ball { level, .. } => *level,
                    other => {
                        return Err(Error::Unsupported(format!(
                            "no working-level refinement for {other:?}"
                        )))
                    }
                };
                if level > working {
                    return Err(Error::Malformed(
                        "the set is finer than the working level".into(),
                    ));
                }
                family_cells.extend(cell.subcells_at_level(working));
            }
        }
    }
    family_cells.sort();
    let family: Vec<Func> = family_cells
        .iter()
        .map(|cell| Func::indicator_cell(a.space().clone(), cell.clone()))
        .collect::<Result<_>>()?;
    let samples: Vec<Elt> = family_cells.iter().map(cell_sample_point).collect();
    let dim_w = family.len();
    let mut components = Vec::new();
    let mut total = Mat::zeros(dim_w, dim_w);
    for gamma in irreps {
        let images: Vec<Func> = family
            .iter()
            .map(|f| isotypic_projection(a, f, gamma, g0, spec))
            .collect::<Result<_>>()?;
        // Projected indicators stay inside C at the working level, so
        // sampling recovers exact coordinates.
        let m = Mat::from_rows(
            (0..dim_w)
                .map(|s| (0..dim_w).map(|t| images[t].evaluate(&samples[s])).collect())
                .collect(),
        );
        let mut trace = Cyclotomic::from_int(0);
        for t in 0..dim_w {
            trace = trace.add(&m.at(t, t));
        }
        let multiplicity = (0..=dim_w)
            .find(|&mult| trace == Cyclotomic::from_int((mult * gamma.dim) as i64))
            .ok_or_else(|| {
                Error::Malformed(
                    "projector trace is not an integral multiple of the dimension".into(),
                )
            })?;
        total = total.add(&m);
        components.push(IsotypicComponent {
            dim: gamma.dim,
            multiplicity,
            images,
        });
    }
    let complete = total == Mat::identity(dim_w);
    Ok(IsotypicDecomposition {
        components,
        complete,
    })
}
