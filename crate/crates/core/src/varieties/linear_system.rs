//! Forms with double points along a subscheme.

use crate::error::{Error, Result};
use crate::exactalg::Field;
use crate::groebner::{IdealHandle, QuotientRing};
use crate::linalg;
use crate::multipoly::{graded, MonomialOrder, MultiPoly, PolyRing};
use crate::varieties::rational_map::RationalMap;

#[derive(Clone, Debug)]
pub struct DoublePointSystem<F: Field> {
    pub degree: u32,
    /// The forms of the system as a map to `P^(dim-1)`.
    pub map: RationalMap<F>,
    /// `dim I(d)`
    pub ideal_piece_dim: usize,
    /// `dim (I^2)_d`, which can be smaller than the system.
    pub ordinary_square_dim: usize,
}

impl<F: Field> DoublePointSystem<F> {
    pub fn dim(&self) -> usize {
        self.map.forms.len()
    }
}

/// Degree-`d` forms `h` in `I` whose partial derivatives all lie in `I`.
pub fn symbolic_square_piece<F: Field>(i: &IdealHandle<F>, d: u32) -> Result<(Vec<MultiPoly<F>>, usize)> {
    let ring = i.ring().with_order(MonomialOrder::Grevlex);
    let gens: Vec<MultiPoly<F>> = i.gens().iter().map(|g| g.with_order(&MonomialOrder::Grevlex)).collect();
    let piece = graded::graded_piece_basis(&ring, &gens, d as i64, i.exec())?;
    if d == 0 || piece.basis.is_empty() {
        return Ok((Vec::new(), piece.dim));
    }
    let q = QuotientRing::new(i)?;
    let width = q.dim(d - 1);
    let f = &ring.field;
    let rows: Vec<Vec<F::Elem>> = piece
        .basis
        .iter()
        .map(|b| {
            let mut row = Vec::with_capacity(width * ring.nvars);
            for j in 0..ring.nvars {
                let dj = b.derivative(j);
                if dj.is_zero() {
                    row.extend(std::iter::repeat_n(f.zero(), width));
                } else {
                    row.extend(q.nf_vector(&dj)?);
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let relations = linalg::left_kernel(f, &rows, width * ring.nvars, i.exec());
    let forms = relations
        .iter()
        .map(|lam| {
            let mut acc = ring.zero();
            for (c, b) in lam.iter().zip(&piece.basis) {
                if !f.is_zero(c) {
                    acc = &acc + &b.scale(c);
                }
            }
            acc
        })
        .collect();
    Ok((forms, piece.dim))
}

/// The complete linear system of degree-`degree` forms singular along `V(I)`.
/// In characteristic zero, or `p > degree`, these are the forms vanishing to
/// order two along a reduced `V(I)`.
pub fn double_point_linear_system<F: Field>(
    i: &IdealHandle<F>,
    degree: u32,
    expected: Option<usize>,
) -> Result<DoublePointSystem<F>> {
    let (forms, ideal_piece_dim) = symbolic_square_piece(i, degree)?;
    if let Some(e) = expected {
        if forms.len() != e {
            return Err(Error::UnexpectedDimension {
                context: format!("degree-{degree} double-point system"),
                expected: e,
                computed: forms.len(),
            });
        }
    }
    if forms.is_empty() {
        return Err(Error::UnexpectedDimension {
            context: format!("degree-{degree} double-point system"),
            expected: expected.unwrap_or(1),
            computed: 0,
        });
    }
    let sq = i.power(2)?;
    let ring = i.ring().with_order(MonomialOrder::Grevlex);
    let sq_gens: Vec<MultiPoly<F>> = sq.gens().iter().map(|g| g.with_order(&MonomialOrder::Grevlex)).collect();
    let ordinary_square_dim = graded::graded_piece_basis(&ring, &sq_gens, degree as i64, i.exec())?.dim;
    let target = PolyRing::grevlex(ring.field.clone(), forms.len());
    let map = RationalMap::new(&ring, &target, forms, None)?;
    Ok(DoublePointSystem {
        degree,
        map,
        ideal_piece_dim,
        ordinary_square_dim,
    })
}

/// Number of `(form, point)` pairs where the form or one of its partials
/// does not vanish.
pub fn double_vanishing_failures<F: Field>(forms: &[MultiPoly<F>], points: &[Vec<F::Elem>]) -> usize {
    let f = match forms.first() {
        Some(p) => p.field().clone(),
        None => return 0,
    };
    let mut bad = 0;
    for p in forms {
        let grad = p.gradient();
        for x in points {
            if !f.is_zero(&p.evaluate(x)) || grad.iter().any(|g| !f.is_zero(&g.evaluate(x))) {
                bad += 1;
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::PrimeField;
    use crate::multipoly::parse_poly;

    #[test]
    fn hyperplane_squared() {
        let r = PolyRing::grevlex(PrimeField::default(), 5);
        let i = IdealHandle::new(&r, vec![r.var(0)]).unwrap();
        // x0^2 times a linear form
        let sys = double_point_linear_system(&i, 3, Some(5)).unwrap();
        assert_eq!(sys.ordinary_square_dim, 5);
        assert_eq!(sys.ideal_piece_dim, 15);
        let sys = double_point_linear_system(&i, 2, Some(1)).unwrap();
        assert_eq!(sys.map.forms[0], parse_poly(&r, "x0^2").unwrap());
        assert!(double_point_linear_system(&i, 3, Some(6)).is_err());
    }

    #[test]
    fn line_in_plane_symbolic_equals_ordinary() {
        // complete intersections: symbolic and ordinary squares agree
        let r = PolyRing::grevlex(PrimeField::default(), 3);
        let i = IdealHandle::new(&r, vec![r.var(0), r.var(1)]).unwrap();
        let sys = double_point_linear_system(&i, 3, None).unwrap();
        // cubic monomials of degree >= 2 in x0, x1: 10 - 3
        assert_eq!(sys.dim(), 7);
        assert_eq!(sys.ordinary_square_dim, 7);
        let pts = vec![vec![0u32, 0, 1], vec![0, 0, 5]];
        assert_eq!(double_vanishing_failures(&sys.map.forms, &pts), 0);
    }

    #[test]
    fn twisted_cubic_double_quadrics() {
        // secant variety of the twisted cubic is all of P^3, so no quadric is
        // singular along the curve; in degree 4 the ordinary square has 6 forms
        let r = PolyRing::grevlex(PrimeField::default(), 4);
        let gens = ["x0*x2-x1^2", "x0*x3-x1*x2", "x1*x3-x2^2"]
            .iter()
            .map(|s| parse_poly(&r, s).unwrap())
            .collect();
        let i = IdealHandle::new(&r, gens).unwrap();
        let (forms, _) = symbolic_square_piece(&i, 2).unwrap();
        assert!(forms.is_empty());
        let sys = double_point_linear_system(&i, 4, None).unwrap();
        assert_eq!(sys.dim(), 6);
        assert_eq!(sys.ordinary_square_dim, 6);
    }
}
