//! Implicit equations of an image from evaluations at sample points.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exactalg::Field;
use crate::linalg;
use crate::multipoly::{monomial_count, MonomialIndex, MultiPoly, PolyRing};
use crate::par::{self, Exec};
use crate::varieties::rational_map::RationalMap;

const MAX_DOUBLINGS: usize = 4;

#[derive(Clone, Debug)]
pub struct Interpolation<F: Field> {
    pub degree: u32,
    pub forms: Vec<MultiPoly<F>>,
    /// `(sample count, kernel dimension)` per round.
    pub history: Vec<(usize, usize)>,
}

impl<F: Field> Interpolation<F> {
    pub fn dim(&self) -> usize {
        self.forms.len()
    }
}

/// Values of the monomials of `index` at a point.
pub fn monomial_values<F: Field>(f: &F, index: &MonomialIndex, point: &[F::Elem]) -> Vec<F::Elem> {
    let top = index.monomials.first().map_or(0, |m| m.degree()) as usize;
    let powers: Vec<Vec<F::Elem>> = point
        .iter()
        .map(|x| {
            let mut pw = vec![f.one()];
            for k in 0..top {
                pw.push(f.mul(&pw[k], x));
            }
            pw
        })
        .collect();
    index
        .monomials
        .iter()
        .map(|m| {
            let mut v = f.one();
            for (i, pw) in powers.iter().enumerate() {
                let e = m.exp(i) as usize;
                if e > 0 {
                    v = f.mul(&v, &pw[e]);
                }
            }
            v
        })
        .collect()
}

/// Degree-`d` forms vanishing at all the given points.
pub fn forms_through_points<F: Field>(
    ring: &PolyRing<F>,
    d: u32,
    points: &[Vec<F::Elem>],
    exec: Exec,
) -> Vec<MultiPoly<F>> {
    let index = MonomialIndex::of_degree(ring.nvars, d, &ring.order);
    let f = &ring.field;
    let rows = par::map(exec, points, |p| monomial_values(f, &index, p));
    linalg::kernel(f, rows, index.len(), exec)
        .iter()
        .map(|v| index.to_poly(ring, v))
        .collect()
}

/// The degree-`d` part of the ideal of the image of `map`. `sampler(n)`
/// returns `n` source points; rounds double the sample count until the
/// kernel dimension repeats.
pub fn implicitize_by_interpolation<F, G>(
    map: &RationalMap<F>,
    d: u32,
    initial: usize,
    mut sampler: G,
    exec: Exec,
) -> Result<Interpolation<F>>
where
    F: Field,
    G: FnMut(usize) -> Result<Vec<Vec<F::Elem>>>,
{
    let f = &map.source.field;
    let mut n = initial.max(2 * monomial_count(map.target.nvars, d));
    let mut images: Vec<Vec<F::Elem>> = Vec::new();
    let mut history = Vec::new();
    let mut last: Option<Vec<MultiPoly<F>>> = None;
    for _ in 0..=MAX_DOUBLINGS {
        while images.len() < n {
            let need = n - images.len();
            let pts = sampler(need)?;
            if pts.is_empty() {
                return Err(Error::Sampling("sampler returned no points".into()));
            }
            let imgs = par::map(exec, &pts, |p| map.apply(p));
            images.extend(imgs.into_iter().filter(|v| v.iter().any(|x| !f.is_zero(x))));
        }
        let forms = forms_through_points(&map.target, d, &images[..n], exec);
        history.push((n, forms.len()));
        if let Some(prev) = &last {
            if prev.len() == forms.len() {
                return Ok(Interpolation {
                    degree: d,
                    forms,
                    history,
                });
            }
        }
        last = Some(forms);
        n *= 2;
    }
    Err(Error::NotStabilized(format!("interpolation dimensions {history:?}")))
}

/// Sampler of uniformly random points of the whole source space.
pub fn uniform_sampler<F: Field, R: Rng>(field: F, nvars: usize, rng: &mut R) -> impl FnMut(usize) -> Result<Vec<Vec<F::Elem>>> + '_ {
    move |n| {
        Ok((0..n)
            .map(|_| (0..nvars).map(|_| field.random(rng)).collect())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::PrimeField;
    use crate::groebner::IdealHandle;
    use crate::multipoly::parse_poly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn monomial_map(src: usize, tgt: usize, monos: &[&str]) -> RationalMap<PrimeField> {
        let s = PolyRing::grevlex(PrimeField::default(), src);
        let t = PolyRing::grevlex(PrimeField::default(), tgt);
        let forms = monos.iter().map(|m| parse_poly(&s, m).unwrap()).collect();
        RationalMap::new(&s, &t, forms, None).unwrap()
    }

    #[test]
    fn veronese_quadrics_are_the_minors() {
        let m = monomial_map(3, 6, &["x0^2", "x0*x1", "x0*x2", "x1^2", "x1*x2", "x2^2"]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let res = implicitize_by_interpolation(&m, 2, 0, uniform_sampler(PrimeField::default(), 3, &mut rng), Exec::Sequential)
            .unwrap();
        assert_eq!(res.dim(), 6);
        // 2x2 minors of [[x0,x1,x2],[x1,x3,x4],[x2,x4,x5]]
        let minors = [
            "x0*x3-x1^2", "x0*x4-x1*x2", "x0*x5-x2^2", "x1*x4-x2*x3", "x1*x5-x2*x4", "x3*x5-x4^2",
        ];
        let oracle = IdealHandle::new(&m.target, minors.iter().map(|s| parse_poly(&m.target, s).unwrap()).collect()).unwrap();
        let found = IdealHandle::new(&m.target, res.forms.clone()).unwrap();
        assert!(found.same_ideal(&oracle));
        assert_eq!(res.history.len(), 2);
    }

    #[test]
    fn twisted_cubic_quadrics() {
        let m = monomial_map(2, 4, &["x0^3", "x0^2*x1", "x0*x1^2", "x1^3"]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let res = implicitize_by_interpolation(&m, 2, 0, uniform_sampler(PrimeField::default(), 2, &mut rng), Exec::Parallel)
            .unwrap();
        assert_eq!(res.dim(), 3);
        let oracle = ["x0*x2-x1^2", "x0*x3-x1*x2", "x1*x3-x2^2"];
        let oracle = IdealHandle::new(&m.target, oracle.iter().map(|s| parse_poly(&m.target, s).unwrap()).collect()).unwrap();
        assert!(oracle.same_ideal(&IdealHandle::new(&m.target, res.forms).unwrap()));
    }

    #[test]
    fn forms_vanish_on_fresh_samples() {
        let m = monomial_map(3, 6, &["x0^2", "x0*x1", "x0*x2", "x1^2", "x1*x2", "x2^2"]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let res = implicitize_by_interpolation(&m, 3, 0, uniform_sampler(PrimeField::default(), 3, &mut rng), Exec::Sequential)
            .unwrap();
        // h^0(O(3)) - h^0(O_P2(6)) = 56 - 28
        assert_eq!(res.dim(), 28);
        let f = PrimeField::default();
        for _ in 0..20 {
            let u: Vec<u32> = (0..3).map(|_| f.random(&mut rng)).collect();
            let x = m.apply(&u);
            assert!(res.forms.iter().all(|c| c.evaluate(&x) == 0));
        }
    }

    #[test]
    fn empty_sampler_is_an_error() {
        let m = monomial_map(2, 4, &["x0^3", "x0^2*x1", "x0*x1^2", "x1^3"]);
        let r = implicitize_by_interpolation(&m, 2, 0, |_| Ok(Vec::new()), Exec::Sequential);
        assert!(matches!(r, Err(Error::Sampling(_))));
    }
}
