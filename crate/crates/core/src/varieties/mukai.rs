//! The genus-7 Mukai fourfold as the image of P^4 under the double-point
//! system of the linked octic surface, and its cubic sections `C_x`.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{Field, JetElement, JetRing, PrimeField};
use crate::groebner::{
    eliminate, hilbert_data, saturate, sweep_emptiness, Emptiness, HilbertData, IdealHandle, QuotientRing, SweepStep,
};
use crate::linalg::{self, Echelon};
use crate::multipoly::{graded, MonomialIndex, MonomialOrder, MultiPoly, PolyRing};
use crate::par::{self, Exec};
use crate::varieties::interpolation::{implicitize_by_interpolation, monomial_values, Interpolation};
use crate::varieties::linear_system::double_point_linear_system;
use crate::varieties::rational_map::RationalMap;
use crate::varieties::sampling::{normalize, points_on_hypersurface};
use crate::varieties::surfaces::{linked_surface, LinkedSurface};

/// Multiplicity of `C_x` at `x` along `X`.
pub const SECTION_ORDER: u32 = 7;

pub struct MukaiModel {
    pub surface: LinkedSurface<PrimeField>,
    /// The unique cubic through the surface.
    pub d3: MultiPoly<PrimeField>,
    /// `P^4 --> X ⊂ P^9`
    pub phi: RationalMap<PrimeField>,
    pub quadrics: Interpolation<PrimeField>,
    pub cubics: Interpolation<PrimeField>,
    pub cubic_index: MonomialIndex,
    cubic_echelon: Echelon<u32>,
    exec: Exec,
}

impl std::fmt::Debug for MukaiModel {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("MukaiModel")
            .field("quadrics", &self.quadrics.dim())
            .field("cubics", &self.cubics.dim())
            .finish()
    }
}

fn random_point<R: Rng + ?Sized>(f: &PrimeField, n: usize, rng: &mut R) -> Vec<u32> {
    (0..n).map(|_| f.random(rng)).collect()
}

impl MukaiModel {
    pub fn build<R: Rng>(field: PrimeField, rng: &mut R, exec: Exec) -> Result<Self> {
        let surface = linked_surface(&field, 7, rng, exec)?;
        let ring = surface.ideal.ring().with_order(MonomialOrder::Grevlex);
        let gens: Vec<MultiPoly<PrimeField>> =
            surface.ideal.gens().iter().map(|g| g.with_order(&MonomialOrder::Grevlex)).collect();
        let piece = graded::graded_piece_basis(&ring, &gens, 3, exec)?;
        if piece.dim != 1 {
            return Err(Error::UnexpectedDimension {
                context: "cubics through the surface".into(),
                expected: 1,
                computed: piece.dim,
            });
        }
        let d3 = piece.basis[0].clone();
        let phi = double_point_linear_system(&surface.ideal, 7, Some(10))?.map;
        let quadrics = implicitize_by_interpolation(&phi, 2, 0, |n| Ok(sample_source(&field, n, rng)), exec)?;
        let cubics = implicitize_by_interpolation(&phi, 3, 0, |n| Ok(sample_source(&field, n, rng)), exec)?;
        let cubic_index = MonomialIndex::of_degree(10, 3, &MonomialOrder::Grevlex);
        let rows = cubics
            .forms
            .iter()
            .map(|c| cubic_index.to_vec(c))
            .collect::<Result<Vec<_>>>()?;
        let cubic_echelon = linalg::echelon(&field, rows, cubic_index.len(), exec);
        Ok(MukaiModel {
            surface,
            d3,
            phi,
            quadrics,
            cubics,
            cubic_index,
            cubic_echelon,
            exec,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.phi.source.field
    }

    pub fn target(&self) -> &PolyRing<PrimeField> {
        &self.phi.target
    }

    /// Ideal of `X` generated by the interpolated quadrics.
    pub fn ideal(&self) -> Result<IdealHandle<PrimeField>> {
        Ok(IdealHandle::new(self.target(), self.quadrics.forms.clone())?.with_exec(self.exec))
    }

    /// A random point of P^4 off the cubic `d3` where the map is defined.
    pub fn general_source_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        let f = self.field();
        loop {
            let u = random_point(&f, 5, rng);
            if self.d3.evaluate(&u) != 0 && self.phi.is_defined_at(&u) {
                return u;
            }
        }
    }

    /// Representative of a cubic modulo `I_X(3)`, zero exactly on `I_X(3)`.
    pub fn reduce_cubic(&self, v: &[u32]) -> Vec<u32> {
        self.cubic_echelon.reduce(&self.field(), v)
    }

    pub fn cubic_from_vector(&self, v: &[u32]) -> MultiPoly<PrimeField> {
        self.cubic_index.to_poly(self.target(), v)
    }

    /// Jets of all cubic monomials of P^9 along the image of an affine arc.
    fn cubic_monomial_jets(&self, jr: &Arc<JetRing<PrimeField>>, u: &[u32], dirs: &[Vec<u32>]) -> Result<Vec<JetElement<PrimeField>>> {
        let coords = self.phi.jets(jr, u, dirs)?;
        let n = coords.len();
        let mut pairs = vec![vec![None; n]; n];
        for i in 0..n {
            for j in i..n {
                pairs[i][j] = Some(coords[i].mul(&coords[j]));
            }
        }
        let monos = &self.cubic_index.monomials;
        Ok(par::map(self.exec, monos, |m| {
            let mut vars = Vec::with_capacity(3);
            for i in 0..n {
                for _ in 0..m.exp(i) {
                    vars.push(i);
                }
            }
            pairs[vars[0]][vars[1]].as_ref().expect("i <= j").mul(&coords[vars[2]])
        }))
    }
}

fn sample_source<R: Rng + ?Sized>(f: &PrimeField, n: usize, rng: &mut R) -> Vec<Vec<u32>> {
    (0..n).map(|_| random_point(f, 5, rng)).collect()
}

/// Cubic sections of `X` modulo `I_X(3)` cut by linear conditions on the
/// 220 cubic coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct SectionSolve {
    /// Dimension of the solution space before reduction modulo `I_X(3)`.
    pub solution_dim: usize,
    /// Dimension of its image modulo `I_X(3)`.
    pub quotient_dim: usize,
    pub conditions: usize,
    pub rank: usize,
    #[serde(skip)]
    pub cubic: Vec<u32>,
}

impl SectionSolve {
    pub fn poly(&self, model: &MukaiModel) -> MultiPoly<PrimeField> {
        model.cubic_from_vector(&self.cubic)
    }
}

fn solve_sections(model: &MukaiModel, columns: Vec<Vec<u32>>) -> Result<SectionSolve> {
    // columns[k] holds the k-th linear condition evaluated on each cubic monomial
    let f = model.field();
    let n = model.cubic_index.len();
    let conditions = columns.len();
    let rank = linalg::rank(&f, columns.clone(), n, model.exec);
    let kernel = linalg::kernel(&f, columns, n, model.exec);
    let reduced: Vec<Vec<u32>> = kernel.iter().map(|v| model.reduce_cubic(v)).collect();
    let ech = linalg::echelon(&f, reduced, n, model.exec);
    let cubic = ech.rows.first().cloned().unwrap_or_default();
    Ok(SectionSolve {
        solution_dim: kernel.len(),
        quotient_dim: ech.rank(),
        conditions,
        rank,
        cubic,
    })
}

/// The cubic section `c_u` whose restriction to `X` vanishes to order 7 at
/// `Φ(u)`: order-6 jets along four affine directions at `u`.
pub fn cubic_section_at_point<R: Rng + ?Sized>(model: &MukaiModel, u: &[u32], rng: &mut R) -> Result<SectionSolve> {
    let f = model.field();
    let jr = JetRing::new(f, 4, SECTION_ORDER - 1);
    let dirs: Vec<Vec<u32>> = (0..4).map(|_| random_point(&f, 5, rng)).collect();
    let jets = model.cubic_monomial_jets(&jr, u, &dirs)?;
    let columns: Vec<Vec<u32>> = (0..jr.dim()).map(|k| jets.iter().map(|j| j.coeffs()[k]).collect()).collect();
    let out = solve_sections(model, columns)?;
    check_unique(&out, "cubic section at a point")?;
    Ok(out)
}

fn check_unique(s: &SectionSolve, what: &str) -> Result<()> {
    if s.quotient_dim != 1 {
        return Err(Error::UnexpectedDimension {
            context: format!("{what} modulo I_X(3) (rank {} of {} conditions)", s.rank, s.conditions),
            expected: 1,
            computed: s.quotient_dim,
        });
    }
    Ok(())
}

/// `c` with `c(f_0, ..., f_9) = λ d3^7`, from evaluations at random points.
#[derive(Clone, Debug, Serialize)]
pub struct ContractedCubic {
    pub samples: usize,
    /// Kernel dimension of the system in `(c, λ)`.
    pub solution_dim: usize,
    /// Solutions with `λ = 0` (cubics vanishing on `X`).
    pub vanishing_dim: usize,
    #[serde(skip)]
    pub cubic: Vec<u32>,
    /// Residual failures at fresh points.
    pub residual_failures: usize,
    pub residual_checks: usize,
}

pub fn contracted_cubic<R: Rng + ?Sized>(model: &MukaiModel, samples: usize, rng: &mut R) -> Result<ContractedCubic> {
    let f = model.field();
    let n = model.cubic_index.len();
    let samples = samples.max(2 * (n + 1));
    let pts = sample_source(&f, samples, rng);
    let rows: Vec<Vec<u32>> = par::map(model.exec, &pts, |u| {
        let mut row = monomial_values(&f, &model.cubic_index, &model.phi.apply(u));
        row.push(f.neg(&f.pow(&model.d3.evaluate(u), SECTION_ORDER as u64)));
        row
    });
    let kernel = linalg::kernel(&f, rows, n + 1, model.exec);
    let vanishing_dim = kernel.iter().filter(|v| v[n] == 0).count();
    let Some(sol) = kernel.iter().find(|v| v[n] != 0) else {
        return Err(Error::UnexpectedDimension {
            context: "contracted cubic with nonzero multiplier".into(),
            expected: 1,
            computed: 0,
        });
    };
    let inv = f.inv(&sol[n])?;
    let c: Vec<u32> = sol[..n].iter().map(|x| f.mul(x, &inv)).collect();
    let cubic = model.reduce_cubic(&c);
    // fresh residual check of c(Φ(u)) = d3(u)^7
    let checks = 1000;
    let fresh = sample_source(&f, checks, rng);
    let poly = model.cubic_from_vector(&cubic);
    let failures = par::map(model.exec, &fresh, |u| {
        poly.evaluate(&model.phi.apply(u)) != f.pow(&model.d3.evaluate(u), SECTION_ORDER as u64)
    })
    .into_iter()
    .filter(|b| *b)
    .count();
    Ok(ContractedCubic {
        samples,
        solution_dim: kernel.len(),
        vanishing_dim,
        cubic,
        residual_failures: failures,
        residual_checks: checks,
    })
}

/// Points of `V(d3)` where the map is defined; all map to one point `x0`.
pub fn contracted_points<R: Rng + ?Sized>(model: &MukaiModel, count: usize, rng: &mut R) -> Result<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 20 {
            return Err(Error::Sampling("points of the contracted cubic".into()));
        }
        for u in points_on_hypersurface(&model.d3, count, rng)? {
            if out.len() < count && model.phi.is_defined_at(&u) {
                out.push(u);
            }
        }
    }
    Ok(out)
}

/// Result of computing `c_{x0}` from arcs `Φ(u0 + t v)` with `u0` on `V(d3)`.
#[derive(Clone, Debug, Serialize)]
pub struct ArcConsistency {
    pub arcs: usize,
    /// Distinct images of the sampled points of `V(d3)`.
    pub image_points: usize,
    pub solve: SectionSolve,
    /// The arc solution is proportional to the contracted cubic modulo `I_X(3)`.
    pub proportional: bool,
    /// Jets of `c ∘ Φ` along the arcs vanish below order 7.
    pub jet_order_ok: bool,
}

pub fn arc_consistency<R: Rng + ?Sized>(
    model: &MukaiModel,
    contracted: &ContractedCubic,
    arcs: usize,
    rng: &mut R,
) -> Result<ArcConsistency> {
    let f = model.field();
    let jr = JetRing::new(f, 1, SECTION_ORDER - 1);
    let base = contracted_points(model, arcs, rng)?;
    let mut images: Vec<Vec<u32>> = base.iter().map(|u| normalize(&f, &model.phi.apply(u))).collect();
    images.sort();
    images.dedup();
    let poly = model.cubic_from_vector(&contracted.cubic);
    let mut columns = Vec::new();
    let mut jet_order_ok = true;
    for u in &base {
        let v = random_point(&f, 5, rng);
        let jets = model.cubic_monomial_jets(&jr, u, std::slice::from_ref(&v))?;
        for k in 0..jr.dim() {
            columns.push(jets.iter().map(|j| j.coeffs()[k]).collect());
        }
        let coords = model.phi.jets(&jr, u, std::slice::from_ref(&v))?;
        jet_order_ok &= poly.evaluate_jet(&coords).is_zero();
    }
    let solve = solve_sections(model, columns)?;
    let ech = linalg::echelon(&f, vec![solve.cubic.clone(), contracted.cubic.clone()], model.cubic_index.len(), model.exec);
    Ok(ArcConsistency {
        arcs,
        image_points: images.len(),
        proportional: solve.quotient_dim == 1 && ech.rank() == 1,
        solve,
        jet_order_ok,
    })
}

/// The covering check: emptiness of `X ∩ C_{x0} ∩ C_{x_1} ∩ ...`.
#[derive(Clone, Debug, Serialize)]
pub struct CoveringResult {
    pub points: Vec<Vec<u32>>,
    pub section_dims: Vec<usize>,
    pub sections: usize,
    pub verdict: Emptiness,
    pub steps: Vec<SweepStep>,
}

pub fn covering_check<R: Rng + ?Sized>(
    model: &MukaiModel,
    contracted: &ContractedCubic,
    npoints: usize,
    bound: u32,
    rng: &mut R,
) -> Result<CoveringResult> {
    let f = model.field();
    let mut sections = vec![model.cubic_from_vector(&contracted.cubic)];
    let mut points = Vec::new();
    let mut dims = Vec::new();
    for _ in 0..npoints {
        let u = model.general_source_point(rng);
        let s = cubic_section_at_point(model, &u, rng)?;
        dims.push(s.solution_dim);
        points.push(normalize(&f, &model.phi.apply(&u)));
        sections.push(model.cubic_from_vector(&s.cubic));
    }
    let base = QuotientRing::new(&model.ideal()?)?;
    let (verdict, steps) = sweep_emptiness(&base, &sections, bound)?;
    Ok(CoveringResult {
        points,
        section_dims: dims,
        sections: sections.len(),
        verdict,
        steps,
    })
}

/// The scheme `X ∩ T_x X` at a point of `X`.
#[derive(Clone, Debug, Serialize)]
pub struct LinesCheck {
    pub tangent_dim: usize,
    pub point_on_section: bool,
    pub section: HilbertData,
    /// Saturation by the ideal of `x`; every line passes through `x`, so
    /// nothing is removed.
    pub saturated: HilbertData,
    /// The section projected from `x` to P^3.
    pub projection: HilbertData,
}

pub fn lines_through_point(quadrics: &[MultiPoly<PrimeField>], x: &[u32], exec: Exec) -> Result<LinesCheck> {
    let ring = quadrics[0].ring().clone();
    let f = ring.field;
    let n = ring.nvars;
    let jac: Vec<Vec<u32>> = quadrics
        .iter()
        .map(|q| q.gradient().iter().map(|g| g.evaluate(x)).collect())
        .collect();
    let tangent = linalg::kernel(&f, jac, n, exec);
    if tangent.len() != 5 {
        return Err(Error::UnexpectedDimension {
            context: "embedded tangent space".into(),
            expected: 5,
            computed: tangent.len(),
        });
    }
    // parametrize T_x by t0 x + t1 w1 + ... + t4 w4
    let mut basis = vec![x.to_vec()];
    let ech = linalg::echelon(&f, vec![x.to_vec()], n, exec);
    for w in tangent {
        let mut rows = ech.rows.clone();
        rows.extend(basis[1..].iter().cloned());
        rows.push(w.clone());
        if linalg::rank(&f, rows, n, exec) == basis.len() + 1 {
            basis.push(w);
        }
        if basis.len() == 5 {
            break;
        }
    }
    if basis.len() != 5 {
        return Err(Error::Degenerate("point does not lie on its tangent space".into()));
    }
    let t = PolyRing::grevlex(f, 5);
    let coords: Vec<MultiPoly<PrimeField>> = (0..n)
        .map(|i| t.linear_form(&basis.iter().map(|b| b[i]).collect::<Vec<_>>()))
        .collect();
    let restricted: Vec<MultiPoly<PrimeField>> =
        quadrics.iter().map(|q| q.compose(&coords)).collect::<Result<_>>()?;
    let restricted: Vec<_> = restricted.into_iter().filter(|p| !p.is_zero()).collect();
    let point_on_section = restricted.iter().all(|p| p.evaluate(&[1, 0, 0, 0, 0]) == 0);
    let section = IdealHandle::new(&t, restricted)?.with_exec(exec);
    let projection = eliminate(&section, &[0])?;
    let point = IdealHandle::new(&t, (1..5).map(|i| t.var(i)).collect())?;
    let saturated = saturate(&section, &point)?;
    Ok(LinesCheck {
        tangent_dim: 5,
        point_on_section,
        section: hilbert_data(&section),
        saturated: hilbert_data(&saturated),
        projection: hilbert_data(&projection),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lines_on_a_quadric_cone() {
        // x0 x1 + x2 x3 = 0 in P^3 through (1:0:0:0) would need 10 variables;
        // instead check the tangent dimension guard on a smooth quadric in P^9
        let r = PolyRing::grevlex(PrimeField::default(), 10);
        let q = &(&r.var(0) * &r.var(1)) + &(&r.var(2) * &r.var(3));
        let x = vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        assert!(matches!(
            lines_through_point(&[q], &x, Exec::Sequential),
            Err(Error::UnexpectedDimension { computed: 9, .. })
        ));
    }

    #[test]
    fn model_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = MukaiModel::build(PrimeField::default(), &mut rng, Exec::Parallel).unwrap();
        assert_eq!(m.quadrics.dim(), 10);
        assert_eq!(m.cubics.dim(), 84);
    }
}
