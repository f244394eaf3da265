use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::exactalg::Field;
use crate::groebner::buchberger::{buchberger, reduce_terms};
use crate::multipoly::{Monomial, MonomialOrder, MultiPoly, PolyRing};
use crate::par::Exec;

/// A reduced Gröbner basis for one monomial order.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<F: Field> {
    ring: PolyRing<F>,
    polys: Vec<MultiPoly<F>>,
}

impl<F: Field> GroebnerBasis<F> {
    pub fn compute(ring: &PolyRing<F>, gens: &[MultiPoly<F>], exec: Exec) -> Self {
        GroebnerBasis {
            ring: ring.clone(),
            polys: buchberger(ring, gens, exec),
        }
    }

    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.ring.order
    }

    /// Monic elements sorted by increasing lead monomial.
    pub fn polys(&self) -> &[MultiPoly<F>] {
        &self.polys
    }

    pub fn leads(&self) -> Vec<Monomial> {
        self.polys.iter().filter_map(|p| p.lead_monomial()).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.polys.iter().any(|p| p.total_degree() == Some(0))
    }

    pub fn max_degree(&self) -> u32 {
        self.polys.iter().filter_map(|p| p.total_degree()).max().unwrap_or(0)
    }

    /// Remainder of `p` on division by the basis, in the basis order.
    pub fn normal_form(&self, p: &MultiPoly<F>) -> MultiPoly<F> {
        let terms = p.with_order(&self.ring.order).into_terms();
        let basis: Vec<&[(Monomial, F::Elem)]> = self.polys.iter().map(|q| q.terms()).collect();
        let r = reduce_terms(&self.ring.field, &self.ring.order, terms, &basis, true);
        self.ring.from_sorted_terms(r)
    }

    pub fn contains(&self, p: &MultiPoly<F>) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Whether a monomial lies outside the lead ideal.
    pub fn is_standard(&self, m: &Monomial) -> bool {
        !self.polys.iter().any(|p| p.lead_monomial().is_some_and(|l| l.divides(m)))
    }

    /// Every S-polynomial reduces to zero.
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        let f = &self.ring.field;
        for (i, a) in self.polys.iter().enumerate() {
            for b in &self.polys[i + 1..] {
                let (la, lb) = (a.lead_monomial().unwrap(), b.lead_monomial().unwrap());
                let l = la.lcm(&lb);
                let s = a
                    .mul_monomial(&l.div(&la))
                    .scale(&f.inv(a.lead_coeff().unwrap()).unwrap())
                    .try_sub(&b.mul_monomial(&l.div(&lb)).scale(&f.inv(b.lead_coeff().unwrap()).unwrap()))
                    .expect("same ring");
                if !self.contains(&s) {
                    return false;
                }
            }
        }
        true
    }
}

/// Generators of a polynomial ideal plus a cache of Gröbner bases by order.
pub struct IdealHandle<F: Field> {
    ring: PolyRing<F>,
    gens: Vec<MultiPoly<F>>,
    exec: Exec,
    cache: Mutex<HashMap<MonomialOrder, Arc<GroebnerBasis<F>>>>,
}

impl<F: Field> Clone for IdealHandle<F> {
    fn clone(&self) -> Self {
        IdealHandle {
            ring: self.ring.clone(),
            gens: self.gens.clone(),
            exec: self.exec,
            cache: Mutex::new(self.cache.lock().expect("cache lock").clone()),
        }
    }
}

impl<F: Field> fmt::Debug for IdealHandle<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdealHandle")
            .field("nvars", &self.ring.nvars)
            .field("gens", &self.gens.iter().map(|g| g.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

impl<F: Field> IdealHandle<F> {
    pub fn new(ring: &PolyRing<F>, gens: Vec<MultiPoly<F>>) -> Result<Self> {
        let mut out = Vec::with_capacity(gens.len());
        for g in gens {
            if g.nvars() != ring.nvars || g.field() != &ring.field {
                return Err(Error::RingMismatch(format!(
                    "generator in {} variables for a ring with {}",
                    g.nvars(),
                    ring.nvars
                )));
            }
            if !g.is_zero() {
                out.push(g.with_order(&ring.order));
            }
        }
        Ok(IdealHandle {
            ring: ring.clone(),
            gens: out,
            exec: Exec::default(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn zero(ring: &PolyRing<F>) -> Self {
        Self::new(ring, Vec::new()).expect("empty generator list")
    }

    /// The ideal `(x_0, ..., x_{n-1})`.
    pub fn irrelevant(ring: &PolyRing<F>) -> Self {
        Self::new(ring, ring.vars()).expect("variables of the ring")
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars
    }

    pub fn gens(&self) -> &[MultiPoly<F>] {
        &self.gens
    }

    pub fn is_homogeneous(&self) -> bool {
        self.gens.iter().all(|g| g.is_homogeneous())
    }

    /// Cached reduced Gröbner basis for `order`.
    pub fn groebner(&self, order: &MonomialOrder) -> Arc<GroebnerBasis<F>> {
        if let Some(gb) = self.cache.lock().expect("cache lock").get(order) {
            return gb.clone();
        }
        let ring = self.ring.with_order(order.clone());
        let gb = Arc::new(GroebnerBasis::compute(&ring, &self.gens, self.exec));
        self.cache
            .lock()
            .expect("cache lock")
            .entry(order.clone())
            .or_insert(gb)
            .clone()
    }

    /// Basis in the ring's own order.
    pub fn gb(&self) -> Arc<GroebnerBasis<F>> {
        self.groebner(&self.ring.order)
    }

    /// Seed the cache with a basis known to be reduced for its order.
    pub fn insert_basis(&self, gb: GroebnerBasis<F>) {
        self.cache
            .lock()
            .expect("cache lock")
            .insert(gb.order().clone(), Arc::new(gb));
    }

    pub fn cached_orders(&self) -> Vec<MonomialOrder> {
        self.cache.lock().expect("cache lock").keys().cloned().collect()
    }

    pub fn normal_form(&self, p: &MultiPoly<F>, order: &MonomialOrder) -> MultiPoly<F> {
        self.groebner(order).normal_form(p)
    }

    pub fn contains(&self, p: &MultiPoly<F>) -> bool {
        self.gb().contains(p)
    }

    pub fn contains_ideal(&self, other: &IdealHandle<F>) -> bool {
        let gb = self.gb();
        other.gens.iter().all(|g| gb.contains(g))
    }

    pub fn same_ideal(&self, other: &IdealHandle<F>) -> bool {
        self.contains_ideal(other) && other.contains_ideal(self)
    }

    pub fn is_unit(&self) -> bool {
        self.gb().is_unit()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    fn check(&self, other: &IdealHandle<F>) -> Result<()> {
        if self.ring.same_as(&other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch("ideals live in different rings".into()))
        }
    }

    pub fn sum(&self, other: &IdealHandle<F>) -> Result<IdealHandle<F>> {
        self.check(other)?;
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ok(IdealHandle::new(&self.ring, gens)?.with_exec(self.exec))
    }

    pub fn add_gens(&self, extra: &[MultiPoly<F>]) -> Result<IdealHandle<F>> {
        let mut gens = self.gens.clone();
        gens.extend(extra.iter().cloned());
        Ok(IdealHandle::new(&self.ring, gens)?.with_exec(self.exec))
    }

    pub fn product(&self, other: &IdealHandle<F>) -> Result<IdealHandle<F>> {
        self.check(other)?;
        let mut gens = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a * b);
            }
        }
        Ok(IdealHandle::new(&self.ring, gens)?.with_exec(self.exec))
    }

    pub fn power(&self, k: u32) -> Result<IdealHandle<F>> {
        let mut acc = IdealHandle::new(&self.ring, vec![self.ring.one()])?.with_exec(self.exec);
        for _ in 0..k {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// Substitute a linear change of coordinates `x_i -> images[i]`.
    pub fn transform(&self, images: &[MultiPoly<F>]) -> Result<IdealHandle<F>> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.compose(images))
            .collect::<Result<Vec<_>>>()?;
        Ok(IdealHandle::new(&self.ring, gens)?.with_exec(self.exec))
    }
}
