use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::exactalg::{Field, JetElement};
use crate::multipoly::monomial::{Monomial, MonomialOrder, MAX_VARS};

/// Coefficient field, number of variables and active monomial order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRing<F: Field> {
    pub field: F,
    pub nvars: usize,
    pub order: MonomialOrder,
}

impl<F: Field> PolyRing<F> {
    pub fn new(field: F, nvars: usize, order: MonomialOrder) -> Result<Self> {
        if nvars > MAX_VARS {
            return Err(Error::TooManyVariables(nvars));
        }
        Ok(PolyRing {
            field,
            nvars,
            order,
        })
    }

    /// Grevlex ring, panicking on too many variables.
    pub fn grevlex(field: F, nvars: usize) -> Self {
        Self::new(field, nvars, MonomialOrder::Grevlex).expect("too many variables")
    }

    pub fn with_order(&self, order: MonomialOrder) -> Self {
        PolyRing {
            field: self.field.clone(),
            nvars: self.nvars,
            order,
        }
    }

    pub fn with_nvars(&self, nvars: usize) -> Result<Self> {
        Self::new(self.field.clone(), nvars, self.order.clone())
    }

    pub fn zero(&self) -> MultiPoly<F> {
        MultiPoly {
            ring: self.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(&self) -> MultiPoly<F> {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: F::Elem) -> MultiPoly<F> {
        self.term(c, Monomial::one())
    }

    pub fn var(&self, i: usize) -> MultiPoly<F> {
        assert!(i < self.nvars, "variable x{i} not in a ring with {} variables", self.nvars);
        self.term(self.field.one(), Monomial::var(i))
    }

    pub fn vars(&self) -> Vec<MultiPoly<F>> {
        (0..self.nvars).map(|i| self.var(i)).collect()
    }

    pub fn term(&self, c: F::Elem, m: Monomial) -> MultiPoly<F> {
        let terms = if self.field.is_zero(&c) {
            Vec::new()
        } else {
            vec![(m, c)]
        };
        MultiPoly {
            ring: self.clone(),
            terms,
        }
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear_form(&self, coeffs: &[F::Elem]) -> MultiPoly<F> {
        self.from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(i), c.clone()))
                .collect(),
        )
    }

    /// Builds a polynomial from arbitrary terms: sorts, merges and drops zeros.
    pub fn from_terms(&self, mut terms: Vec<(Monomial, F::Elem)>) -> MultiPoly<F> {
        let ord = &self.order;
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        let f = &self.field;
        let mut out: Vec<(Monomial, F::Elem)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = f.add(lc, &c),
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if f.is_zero(lc) {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some((_, lc)) = out.last() {
            if f.is_zero(lc) {
                out.pop();
            }
        }
        MultiPoly {
            ring: self.clone(),
            terms: out,
        }
    }

    pub fn from_sorted_terms(&self, terms: Vec<(Monomial, F::Elem)>) -> MultiPoly<F> {
        debug_assert!(terms
            .windows(2)
            .all(|w| self.order.cmp(&w[0].0, &w[1].0) == Ordering::Greater));
        MultiPoly {
            ring: self.clone(),
            terms,
        }
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.order == other.order && self.field == other.field
    }
}

/// Sparse polynomial with terms strictly decreasing in the ring's order.
#[derive(Clone, Debug)]
pub struct MultiPoly<F: Field> {
    ring: PolyRing<F>,
    terms: Vec<(Monomial, F::Elem)>,
}

impl<F: Field> PartialEq for MultiPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_as(&other.ring) && self.terms == other.terms
    }
}

/// Merge two sorted term lists, `a + c * b`.
pub(crate) fn merge_axpy<F: Field>(
    f: &F,
    ord: &MonomialOrder,
    a: &[(Monomial, F::Elem)],
    c: &F::Elem,
    b: &[(Monomial, F::Elem)],
) -> Vec<(Monomial, F::Elem)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match ord.cmp(&a[i].0, &b[j].0) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((b[j].0, f.mul(c, &b[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let s = f.mul_add(&a[i].1, c, &b[j].1);
                if !f.is_zero(&s) {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend(b[j..].iter().map(|(m, x)| (*m, f.mul(c, x))));
    out
}

impl<F: Field> MultiPoly<F> {
    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        &self.ring.field
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, F::Elem)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead_monomial(&self) -> Option<Monomial> {
        self.terms.first().map(|t| t.0)
    }

    pub fn lead_coeff(&self) -> Option<&F::Elem> {
        self.terms.first().map(|t| &t.1)
    }

    /// Largest total degree of a term; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m, _)) => self.terms.iter().all(|t| t.0.degree() == m.degree()),
        }
    }

    pub fn coeff(&self, m: &Monomial) -> F::Elem {
        let ord = &self.ring.order;
        match self.terms.binary_search_by(|t| ord.cmp(m, &t.0)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => self.ring.field.zero(),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring.same_as(&other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!(
                "{} vars / {:?} vs {} vars / {:?}",
                self.ring.nvars, self.ring.order, other.ring.nvars, other.ring.order
            )))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = &self.ring.field;
        Ok(self.with_terms(merge_axpy(f, &self.ring.order, &self.terms, &f.one(), &other.terms)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = &self.ring.field;
        Ok(self.with_terms(merge_axpy(
            f,
            &self.ring.order,
            &self.terms,
            &f.neg(&f.one()),
            &other.terms,
        )))
    }

    /// `self + c * m * other`
    pub fn try_add_scaled(&self, c: &F::Elem, m: &Monomial, other: &Self) -> Result<Self> {
        self.check(other)?;
        let shifted = other.mul_monomial(m);
        Ok(self.with_terms(merge_axpy(
            &self.ring.field,
            &self.ring.order,
            &self.terms,
            c,
            &shifted.terms,
        )))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(self.ring.zero());
        }
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let f = &self.ring.field;
        let mut parts: Vec<Vec<(Monomial, F::Elem)>> = small
            .terms
            .iter()
            .map(|(m, c)| {
                big.terms
                    .iter()
                    .map(|(n, d)| (m.mul(n), f.mul(c, d)))
                    .collect()
            })
            .collect();
        let one = f.one();
        while parts.len() > 1 {
            let mut next = Vec::with_capacity(parts.len().div_ceil(2));
            let mut it = parts.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(merge_axpy(f, &self.ring.order, &a, &one, &b)),
                    None => next.push(a),
                }
            }
            parts = next;
        }
        Ok(self.with_terms(parts.pop().unwrap_or_default()))
    }

    fn with_terms(&self, terms: Vec<(Monomial, F::Elem)>) -> Self {
        MultiPoly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        let f = &self.ring.field;
        self.with_terms(self.terms.iter().map(|(m, c)| (*m, f.neg(c))).collect())
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.ring.field;
        if f.is_zero(c) {
            return self.ring.zero();
        }
        self.with_terms(self.terms.iter().map(|(m, x)| (*m, f.mul(x, c))).collect())
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        self.with_terms(self.terms.iter().map(|(n, c)| (n.mul(m), c.clone())).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.lead_coeff() {
            None => self.clone(),
            Some(c) => {
                let inv = self.ring.field.inv(c).expect("nonzero lead coefficient");
                self.scale(&inv)
            }
        }
    }

    /// The same polynomial under another order.
    pub fn with_order(&self, order: &MonomialOrder) -> Self {
        if *order == self.ring.order {
            return self.clone();
        }
        self.ring.with_order(order.clone()).from_terms(self.terms.clone())
    }

    /// Reinterpret in `ring`, sending variable `i` to `map[i]`.
    pub fn remap(&self, ring: &PolyRing<F>, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.ring.nvars);
        assert!(map.iter().all(|&j| j < ring.nvars));
        ring.from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (m.remap(self.ring.nvars, map), c.clone()))
                .collect(),
        )
    }

    /// Embed into a ring with at least as many variables, keeping indices.
    pub fn embed(&self, ring: &PolyRing<F>) -> Self {
        let map: Vec<usize> = (0..self.ring.nvars).collect();
        self.remap(ring, &map)
    }

    pub fn homogeneous_component(&self, d: u32) -> Self {
        self.with_terms(
            self.terms
                .iter()
                .filter(|t| t.0.degree() == d)
                .cloned()
                .collect(),
        )
    }

    pub fn derivative(&self, i: usize) -> Self {
        let f = &self.ring.field;
        let dv = Monomial::var(i);
        self.ring.from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exp(i) > 0)
                .map(|(m, c)| (m.div(&dv), f.mul(c, &f.from_i64(m.exp(i) as i64))))
                .collect(),
        )
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.ring.nvars).map(|i| self.derivative(i)).collect()
    }

    fn power_table<T: Clone>(
        &self,
        args: &[T],
        one: T,
        mul: impl Fn(&T, &T) -> T,
    ) -> Vec<Vec<T>> {
        (0..self.ring.nvars)
            .map(|i| {
                let top = self.terms.iter().map(|t| t.0.exp(i)).max().unwrap_or(0);
                let mut pw = vec![one.clone()];
                for k in 0..top as usize {
                    let next = mul(&pw[k], &args[i]);
                    pw.push(next);
                }
                pw
            })
            .collect()
    }

    /// Evaluate at a point with one coordinate per variable.
    pub fn evaluate(&self, point: &[F::Elem]) -> F::Elem {
        assert_eq!(point.len(), self.ring.nvars, "point has the wrong length");
        let f = &self.ring.field;
        let pw = self.power_table(point, f.one(), |a, b| f.mul(a, b));
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, p) in pw.iter().enumerate() {
                let e = m.exp(i) as usize;
                if e > 0 {
                    t = f.mul(&t, &p[e]);
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// Evaluate with jet-valued arguments.
    pub fn evaluate_jet(&self, args: &[JetElement<F>]) -> JetElement<F> {
        assert_eq!(args.len(), self.ring.nvars, "wrong number of jet arguments");
        let ring = args[0].ring().clone();
        let pw = self.power_table(args, ring.one(), |a, b| a.mul(b));
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t: Option<JetElement<F>> = None;
            for (i, p) in pw.iter().enumerate() {
                let e = m.exp(i) as usize;
                if e > 0 {
                    t = Some(match t {
                        None => p[e].clone(),
                        Some(x) => x.mul(&p[e]),
                    });
                }
            }
            match t {
                None => acc.add_scaled(c, &ring.one()),
                Some(x) => acc.add_scaled(c, &x),
            }
        }
        acc
    }

    /// Substitute `images[i]` for variable `i`; all images live in one ring.
    pub fn compose(&self, images: &[MultiPoly<F>]) -> Result<MultiPoly<F>> {
        if images.len() != self.ring.nvars {
            return Err(Error::RingMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.ring.nvars
            )));
        }
        let target = match images.first() {
            Some(p) => p.ring.clone(),
            None => {
                return Ok(PolyRing::new(self.ring.field.clone(), 0, self.ring.order.clone())?
                    .from_terms(self.terms.clone()))
            }
        };
        for p in images {
            if !p.ring.same_as(&target) {
                return Err(Error::RingMismatch("composition images in different rings".into()));
            }
        }
        let pw = self.power_table(images, target.one(), |a, b| a * b);
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut t = target.constant(c.clone());
            for (i, p) in pw.iter().enumerate() {
                let e = m.exp(i) as usize;
                if e > 0 {
                    t = &t * &p[e];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }
}

impl<F: Field> Add for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn add(self, rhs: Self) -> MultiPoly<F> {
        self.try_add(rhs).expect("ring mismatch in addition")
    }
}

impl<F: Field> Sub for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn sub(self, rhs: Self) -> MultiPoly<F> {
        self.try_sub(rhs).expect("ring mismatch in subtraction")
    }
}

impl<F: Field> Mul for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn mul(self, rhs: Self) -> MultiPoly<F> {
        self.try_mul(rhs).expect("ring mismatch in multiplication")
    }
}

impl<F: Field> Neg for &MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn neg(self) -> MultiPoly<F> {
        MultiPoly::neg(self)
    }
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::multipoly::text::format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{JetRing, PrimeField, Rationals};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(n: usize) -> PolyRing<PrimeField> {
        PolyRing::grevlex(PrimeField::default(), n)
    }

    #[test]
    fn square_of_binomial() {
        let r = ring(2);
        let s = &r.var(0) + &r.var(1);
        let sq = s.pow(2);
        assert_eq!(sq.to_string(), "1*x0^2+2*x0*x1+1*x1^2");
    }

    #[test]
    fn product_degree_adds() {
        let r = ring(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = crate::multipoly::graded::random_form(&r, 3, &mut rng);
        let b = crate::multipoly::graded::random_form(&r, 4, &mut rng);
        let p = &a * &b;
        assert!(p.is_homogeneous());
        assert_eq!(p.total_degree(), Some(7));
    }

    #[test]
    fn composition_degree_bookkeeping() {
        // a cubic in 10 variables composed with sparse degree-7 forms in 5
        let f = PrimeField::default();
        let src = PolyRing::grevlex(f, 5);
        let tgt = PolyRing::grevlex(f, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let forms: Vec<_> = (0..10)
            .map(|_| crate::multipoly::graded::random_sparse_form(&src, 7, 3, &mut rng))
            .collect();
        let c = crate::multipoly::graded::random_sparse_form(&tgt, 3, 6, &mut rng);
        let comp = c.compose(&forms).unwrap();
        assert!(comp.is_homogeneous());
        assert_eq!(comp.total_degree(), Some(21));
        // the composition agrees with evaluation at a random point
        let pt: Vec<u32> = (0..5).map(|_| f.random(&mut rng)).collect();
        let img: Vec<u32> = forms.iter().map(|g| g.evaluate(&pt)).collect();
        assert_eq!(comp.evaluate(&pt), c.evaluate(&img));
    }

    #[test]
    fn evaluate_product() {
        let r = PolyRing::grevlex(Rationals, 2);
        let p = &r.var(0) * &r.var(1);
        let q = Rationals;
        assert_eq!(p.evaluate(&[q.from_i64(2), q.from_i64(3)]), q.from_i64(6));
    }

    #[test]
    fn segre_cubic_vanishes_at_nodes() {
        // sum of cubes on the hyperplane sum = 0 in six variables
        let r = PolyRing::grevlex(Rationals, 6);
        let cubic = r.vars().iter().fold(r.zero(), |acc, v| &acc + &v.pow(3));
        let linear = r.vars().iter().fold(r.zero(), |acc, v| &acc + v);
        let q = Rationals;
        let mut count = 0;
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            let pt: Vec<_> = (0..6)
                .map(|i| q.from_i64(if mask >> i & 1 == 1 { 1 } else { -1 }))
                .collect();
            assert!(q.is_zero(&cubic.evaluate(&pt)));
            assert!(q.is_zero(&linear.evaluate(&pt)));
            // the two gradients are parallel, so the slice is singular there
            for d in cubic.gradient() {
                assert_eq!(d.evaluate(&pt), q.from_i64(3));
            }
            count += 1;
        }
        // each projective point is counted with both signs
        assert_eq!(count / 2, 10);
    }

    #[test]
    fn mismatched_rings() {
        let a = ring(2).var(0);
        let b = ring(3).var(0);
        assert!(matches!(a.try_add(&b), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn jet_evaluation_matches_truncated_expansion() {
        // jets of f(u + e) against symbolic expansion of f(u + t) truncated
        let f = PrimeField::default();
        let r = ring(2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let jr = JetRing::new(f, 2, 3);
        for _ in 0..20 {
            let p = crate::multipoly::graded::random_form(&r, 3, &mut rng);
            let u: Vec<u32> = (0..2).map(|_| f.random(&mut rng)).collect();
            let l: Vec<Vec<u32>> = (0..2).map(|_| (0..2).map(|_| f.random(&mut rng)).collect()).collect();
            let args: Vec<_> = (0..2).map(|i| jr.affine(u[i], &l[i])).collect();
            let jet = p.evaluate_jet(&args);
            let e = PolyRing::grevlex(f, 2);
            let images: Vec<_> = (0..2)
                .map(|i| &e.constant(u[i]) + &e.linear_form(&l[i]))
                .collect();
            let full = p.compose(&images).unwrap();
            for (m, c) in full.terms() {
                let idx = jr.index_of(&[m.exp(0) as u8, m.exp(1) as u8]).unwrap();
                assert_eq!(jet.coeffs()[idx], *c);
            }
            let nonzero = jet.coeffs().iter().filter(|c| **c != 0).count();
            assert_eq!(nonzero, full.len());
        }
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly<PrimeField>> {
        proptest::collection::vec((proptest::collection::vec(0u32..4, 3), 0u32..10007), 0..8)
            .prop_map(|ts| {
                let r = ring(3);
                r.from_terms(
                    ts.into_iter()
                        .map(|(e, c)| (Monomial::from_exps(&e).unwrap(), c))
                        .collect(),
                )
            })
    }

    proptest! {
        #[test]
        fn resorting_is_identity(p in arb_poly()) {
            let again = p.ring().from_terms(p.terms().to_vec());
            prop_assert_eq!(&again, &p);
            let lex = p.with_order(&MonomialOrder::Lex).with_order(&MonomialOrder::Grevlex);
            prop_assert_eq!(&lex, &p);
        }

        #[test]
        fn evaluation_is_a_homomorphism(p in arb_poly(), q in arb_poly(), pt in proptest::collection::vec(0u32..10007, 3)) {
            let f = PrimeField::default();
            prop_assert_eq!((&p * &q).evaluate(&pt), f.mul(&p.evaluate(&pt), &q.evaluate(&pt)));
            prop_assert_eq!((&p + &q).evaluate(&pt), f.add(&p.evaluate(&pt), &q.evaluate(&pt)));
        }

        #[test]
        fn ring_axioms(p in arb_poly(), q in arb_poly(), s in arb_poly()) {
            prop_assert_eq!(&(&p * &q) * &s, &p * &(&q * &s));
            prop_assert_eq!(&p * &(&q + &s), &(&p * &q) + &(&p * &s));
            prop_assert!((&p - &p).is_zero());
        }

        #[test]
        fn homogeneous_scaling(lambda in 1u32..10007, pt in proptest::collection::vec(0u32..10007, 3), seed in 0u64..1000) {
            let f = PrimeField::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = crate::multipoly::graded::random_form(&ring(3), 4, &mut rng);
            let scaled: Vec<u32> = pt.iter().map(|x| f.mul(x, &lambda)).collect();
            prop_assert_eq!(p.evaluate(&scaled), f.mul(&f.pow(&lambda, 4), &p.evaluate(&pt)));
        }
    }
}
