//! Rational maps between projective spaces given by forms of one degree.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactalg::{Field, JetElement, JetRing};
use crate::groebner::IdealHandle;
use crate::multipoly::{MultiPoly, PolyRing};

#[derive(Clone, Debug)]
pub struct RationalMap<F: Field> {
    pub source: PolyRing<F>,
    pub target: PolyRing<F>,
    pub forms: Vec<MultiPoly<F>>,
    /// The map is only considered on `V(restriction)` when present.
    pub restriction: Option<IdealHandle<F>>,
}

impl<F: Field> RationalMap<F> {
    pub fn new(
        source: &PolyRing<F>,
        target: &PolyRing<F>,
        forms: Vec<MultiPoly<F>>,
        restriction: Option<IdealHandle<F>>,
    ) -> Result<Self> {
        if forms.len() != target.nvars {
            return Err(Error::RingMismatch(format!(
                "{} forms for a target with {} variables",
                forms.len(),
                target.nvars
            )));
        }
        if forms.iter().any(|p| !p.ring().same_as(source)) {
            return Err(Error::RingMismatch("map forms outside the source ring".into()));
        }
        let degrees: Vec<u32> = forms.iter().filter_map(|p| p.total_degree()).collect();
        if degrees.is_empty() {
            return Err(Error::Degenerate("all forms of the map are zero".into()));
        }
        if forms.iter().any(|p| !p.is_homogeneous()) || degrees.iter().any(|&d| d != degrees[0]) {
            return Err(Error::Degenerate("map forms must be homogeneous of one degree".into()));
        }
        if let Some(r) = &restriction {
            if forms.iter().all(|p| r.contains(p)) {
                return Err(Error::Degenerate("map vanishes on its source".into()));
            }
        }
        Ok(RationalMap {
            source: source.clone(),
            target: target.clone(),
            forms,
            restriction,
        })
    }

    pub fn degree(&self) -> u32 {
        self.forms.iter().find_map(|p| p.total_degree()).unwrap_or(0)
    }

    /// Image coordinates; all zero on the base locus.
    pub fn apply(&self, point: &[F::Elem]) -> Vec<F::Elem> {
        self.forms.iter().map(|p| p.evaluate(point)).collect()
    }

    pub fn is_defined_at(&self, point: &[F::Elem]) -> bool {
        let f = &self.source.field;
        self.apply(point).iter().any(|v| !f.is_zero(v))
    }

    /// `p ∘ map` as a form on the source.
    pub fn pullback(&self, p: &MultiPoly<F>) -> Result<MultiPoly<F>> {
        if !p.ring().same_as(&self.target) {
            return Err(Error::RingMismatch("pullback of a form outside the target".into()));
        }
        p.compose(&self.forms)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &RationalMap<F>) -> Result<RationalMap<F>> {
        if !other.source.same_as(&self.target) {
            return Err(Error::RingMismatch("maps do not compose".into()));
        }
        let forms = other.forms.iter().map(|p| self.pullback(p)).collect::<Result<_>>()?;
        RationalMap::new(&self.source, &other.target, forms, self.restriction.clone())
    }

    /// Jets of the coordinate forms along `point + sum_k eps_k dirs[k]`.
    pub fn jets(&self, jr: &Arc<JetRing<F>>, point: &[F::Elem], dirs: &[Vec<F::Elem>]) -> Result<Vec<JetElement<F>>> {
        let args = affine_arcs(jr, point, dirs)?;
        Ok(self.forms.iter().map(|p| p.evaluate_jet(&args)).collect())
    }
}

/// Coordinates `point_i + sum_k eps_k dirs[k]_i` as jets.
pub fn affine_arcs<F: Field>(jr: &Arc<JetRing<F>>, point: &[F::Elem], dirs: &[Vec<F::Elem>]) -> Result<Vec<JetElement<F>>> {
    if dirs.len() != jr.nvars() || dirs.iter().any(|d| d.len() != point.len()) {
        return Err(Error::JetMismatch(format!(
            "{} directions for a jet ring in {} variables",
            dirs.len(),
            jr.nvars()
        )));
    }
    Ok((0..point.len())
        .map(|i| {
            let lin: Vec<F::Elem> = dirs.iter().map(|d| d[i].clone()).collect();
            jr.affine(point[i].clone(), &lin)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::PrimeField;
    use crate::multipoly::{graded, parse_poly};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn veronese() -> RationalMap<PrimeField> {
        let s = PolyRing::grevlex(PrimeField::default(), 3);
        let t = PolyRing::grevlex(PrimeField::default(), 6);
        let forms = ["x0^2", "x0*x1", "x0*x2", "x1^2", "x1*x2", "x2^2"]
            .iter()
            .map(|m| parse_poly(&s, m).unwrap())
            .collect();
        RationalMap::new(&s, &t, forms, None).unwrap()
    }

    #[test]
    fn rejects_mixed_degrees() {
        let s = PolyRing::grevlex(PrimeField::default(), 2);
        let t = PolyRing::grevlex(PrimeField::default(), 2);
        let forms = vec![s.var(0), &s.var(1) * &s.var(1)];
        assert!(RationalMap::new(&s, &t, forms, None).is_err());
        assert!(RationalMap::new(&s, &t, vec![s.var(0)], None).is_err());
    }

    #[test]
    fn pullback_agrees_with_evaluation() {
        let m = veronese();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = graded::random_form(&m.target, 3, &mut rng);
        let pb = m.pullback(&c).unwrap();
        assert_eq!(pb.total_degree(), Some(6));
        let f = PrimeField::default();
        for _ in 0..10 {
            let u: Vec<u32> = (0..3).map(|_| f.random(&mut rng)).collect();
            assert_eq!(pb.evaluate(&u), c.evaluate(&m.apply(&u)));
        }
        // the catalecticant minor x0*x3 - x1^2 vanishes on the image
        let minor = parse_poly(&m.target, "x0*x3-x1^2").unwrap();
        assert!(m.pullback(&minor).unwrap().is_zero());
    }

    #[test]
    fn jets_match_line_evaluation() {
        let m = veronese();
        let f = PrimeField::default();
        let jr = JetRing::new(f, 1, 2);
        let u = vec![1u32, 2, 3];
        let v = vec![4u32, 5, 6];
        let jets = m.jets(&jr, &u, &[v.clone()]).unwrap();
        // x0^2 along (1 + 4t)^2 = 1 + 8t + 16t^2
        assert_eq!(jets[0].coeffs(), &[1, 8, 16]);
        let t = 7u32;
        let pt: Vec<u32> = u.iter().zip(&v).map(|(a, b)| f.add(a, &f.mul(&t, b))).collect();
        let img = m.apply(&pt);
        for (j, val) in jets.iter().zip(img) {
            let c = j.coeffs();
            let e = f.add(&c[0], &f.add(&f.mul(&c[1], &t), &f.mul(&c[2], &f.mul(&t, &t))));
            assert_eq!(e, val);
        }
    }

    #[test]
    fn composition_of_maps() {
        let m = veronese();
        let lin = RationalMap::new(&m.target, &m.target, m.target.vars(), None).unwrap();
        let c = m.then(&lin).unwrap();
        assert_eq!(c.forms, m.forms);
        assert_eq!(c.degree(), 2);
    }
}
