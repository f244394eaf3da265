//! Graded pieces of `S/I` with dense normal-form tables.
//!
//! For each degree the normal form of every nonstandard monomial is stored
//! as a dense vector over the standard monomials of that degree. Tables are
//! filled in increasing monomial order: for `w = u * lead(g)` the normal form
//! is `-sum c_t NF(u t)` over the tail of `g`, and every `u t` is smaller.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::exactalg::Field;
use crate::groebner::ideal::{GroebnerBasis, IdealHandle};
use crate::multipoly::{monomials_of_degree, Monomial, MonomialIndex, MonomialOrder, MultiPoly, PolyRing};
use crate::par::{self, Exec};

/// Normal forms of all monomials of one degree.
#[derive(Debug)]
pub struct DegreeTable<F: Field> {
    pub degree: u32,
    /// Standard monomials, decreasing.
    pub standard: MonomialIndex,
    nonstandard: HashMap<Monomial, Vec<F::Elem>>,
}

impl<F: Field> DegreeTable<F> {
    fn build(gb: &GroebnerBasis<F>, d: u32) -> Self {
        let ring = gb.ring();
        let f = &ring.field;
        let mut all = monomials_of_degree(ring.nvars, d, &ring.order);
        all.reverse();
        let leads = gb.leads();
        let standard: Vec<Monomial> = all
            .iter()
            .rev()
            .filter(|m| !leads.iter().any(|l| l.divides(m)))
            .copied()
            .collect();
        let standard = MonomialIndex::new(standard);
        let len = standard.len();
        let mut nonstandard: HashMap<Monomial, Vec<F::Elem>> = HashMap::new();
        for m in all {
            if standard.index.contains_key(&m) {
                continue;
            }
            // the first matching lead has the smallest degree, hence the shortest tail
            let g = gb
                .polys()
                .iter()
                .find(|g| g.lead_monomial().is_some_and(|l| l.divides(&m)))
                .expect("nonstandard monomial has a divisor");
            let u = m.div(&g.lead_monomial().expect("nonzero"));
            let mut unit: Vec<(usize, F::Elem)> = Vec::new();
            let mut combos: Vec<(F::Elem, &[F::Elem])> = Vec::new();
            for (t, c) in &g.terms()[1..] {
                let w = t.mul(&u);
                let c = f.neg(c);
                match standard.index.get(&w) {
                    Some(&i) => unit.push((i, c)),
                    None => combos.push((c, nonstandard.get(&w).expect("smaller monomial done").as_slice())),
                }
            }
            let mut v = f.linear_combination(len, &combos);
            for (i, c) in unit {
                v[i] = f.add(&v[i], &c);
            }
            nonstandard.insert(m, v);
        }
        DegreeTable {
            degree: d,
            standard,
            nonstandard,
        }
    }

    pub fn dim(&self) -> usize {
        self.standard.len()
    }

    /// Dense normal form of a form of this degree.
    pub fn nf_vector(&self, f: &F, p: &MultiPoly<F>) -> Result<Vec<F::Elem>> {
        let mut combos: Vec<(F::Elem, &[F::Elem])> = Vec::new();
        let mut unit: Vec<(usize, &F::Elem)> = Vec::new();
        for (m, c) in p.terms() {
            if m.degree() != self.degree {
                return Err(Error::Degenerate(format!(
                    "term of degree {} in a degree-{} normal form",
                    m.degree(),
                    self.degree
                )));
            }
            match self.standard.index.get(m) {
                Some(&i) => unit.push((i, c)),
                None => combos.push((c.clone(), self.nonstandard[m].as_slice())),
            }
        }
        let mut v = f.linear_combination(self.dim(), &combos);
        for (i, c) in unit {
            v[i] = f.add(&v[i], c);
        }
        Ok(v)
    }

    /// Normal form of the monomial product `m * p` without forming it.
    pub fn nf_shifted(&self, f: &F, m: &Monomial, p: &MultiPoly<F>) -> Vec<F::Elem> {
        let mut combos: Vec<(F::Elem, &[F::Elem])> = Vec::new();
        let mut unit: Vec<(usize, &F::Elem)> = Vec::new();
        for (t, c) in p.terms() {
            let w = t.mul(m);
            match self.standard.index.get(&w) {
                Some(&i) => unit.push((i, c)),
                None => combos.push((c.clone(), self.nonstandard[&w].as_slice())),
            }
        }
        let mut v = f.linear_combination(self.dim(), &combos);
        for (i, c) in unit {
            v[i] = f.add(&v[i], c);
        }
        v
    }
}

/// `S/I` for a homogeneous ideal, computed degree by degree.
pub struct QuotientRing<F: Field> {
    ring: PolyRing<F>,
    gb: Arc<GroebnerBasis<F>>,
    exec: Exec,
    tables: Mutex<HashMap<u32, Arc<DegreeTable<F>>>>,
}

impl<F: Field> std::fmt::Debug for QuotientRing<F> {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("QuotientRing")
            .field("nvars", &self.ring.nvars)
            .field("basis_len", &self.gb.polys().len())
            .finish()
    }
}

impl<F: Field> QuotientRing<F> {
    pub fn new(ideal: &IdealHandle<F>) -> Result<Self> {
        if !ideal.is_homogeneous() {
            return Err(Error::Degenerate("quotient tables need a homogeneous ideal".into()));
        }
        let ring = ideal.ring().with_order(MonomialOrder::Grevlex);
        let gb = ideal.groebner(&MonomialOrder::Grevlex);
        Ok(QuotientRing {
            ring,
            gb,
            exec: ideal.exec(),
            tables: Mutex::new(HashMap::new()),
        })
    }

    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    pub fn basis(&self) -> &GroebnerBasis<F> {
        &self.gb
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn table(&self, d: u32) -> Arc<DegreeTable<F>> {
        if let Some(t) = self.tables.lock().expect("table cache").get(&d) {
            return t.clone();
        }
        let t = Arc::new(DegreeTable::build(&self.gb, d));
        self.tables.lock().expect("table cache").insert(d, t.clone());
        t
    }

    /// Drop the cached table of degree `d`.
    pub fn release(&self, d: u32) {
        self.tables.lock().expect("table cache").remove(&d);
    }

    /// `dim (S/I)_d`.
    pub fn dim(&self, d: u32) -> usize {
        self.table(d).dim()
    }

    pub fn nf_vector(&self, p: &MultiPoly<F>) -> Result<Vec<F::Elem>> {
        let p = p.with_order(&MonomialOrder::Grevlex);
        let Some(d) = p.total_degree() else {
            return Ok(Vec::new());
        };
        if !p.is_homogeneous() {
            return Err(Error::Degenerate("normal form vector of an inhomogeneous form".into()));
        }
        self.table(d).nf_vector(&self.ring.field, &p)
    }

    /// Rows `NF(m g)` spanning the image of `(gens)` in degree `d`, with `m`
    /// running over standard monomials of the complementary degree.
    pub fn ideal_rows(&self, gens: &[MultiPoly<F>], d: u32) -> Vec<Vec<F::Elem>> {
        let table = self.table(d);
        let f = &self.ring.field;
        let mut jobs: Vec<(Monomial, usize)> = Vec::new();
        let gens: Vec<MultiPoly<F>> = gens.iter().map(|g| g.with_order(&MonomialOrder::Grevlex)).collect();
        for (k, g) in gens.iter().enumerate() {
            let Some(e) = g.total_degree() else { continue };
            if e > d {
                continue;
            }
            for m in &self.table(d - e).standard.monomials {
                jobs.push((*m, k));
            }
        }
        par::map(self.exec, &jobs, |(m, k)| table.nf_shifted(f, m, &gens[*k]))
    }

    /// Number of rows `ideal_rows` would produce.
    pub fn ideal_row_count(&self, gens: &[MultiPoly<F>], d: u32) -> usize {
        gens.iter()
            .filter_map(|g| g.total_degree())
            .filter(|&e| e <= d)
            .map(|e| self.dim(d - e))
            .sum()
    }

    /// `dim` of the image of `(gens)` in `(S/I)_d`.
    pub fn ideal_dim(&self, gens: &[MultiPoly<F>], d: u32) -> usize {
        let n = self.dim(d);
        let mut red = self.ring.field.row_reducer(n, self.exec);
        red.insert(self.ideal_rows(gens, d));
        red.rank()
    }

    pub fn to_poly(&self, d: u32, v: &[F::Elem]) -> MultiPoly<F> {
        self.table(d).standard.to_poly(&self.ring, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::PrimeField;
    use crate::groebner::hilbert::hilbert_data;
    use crate::multipoly::{graded, parse_poly};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn twisted_cubic() -> IdealHandle<PrimeField> {
        let r = PolyRing::grevlex(PrimeField::default(), 4);
        let gens = ["x0*x2-x1^2", "x0*x3-x1*x2", "x1*x3-x2^2"]
            .iter()
            .map(|s| parse_poly(&r, s).unwrap())
            .collect();
        IdealHandle::new(&r, gens).unwrap()
    }

    #[test]
    fn dimensions_match_hilbert_function() {
        let i = twisted_cubic();
        let q = QuotientRing::new(&i).unwrap();
        let h = hilbert_data(&i);
        for d in 0..7 {
            assert_eq!(q.dim(d) as i64, h.hilbert_function(d));
        }
    }

    #[test]
    fn inhomogeneous_rejected() {
        let r = PolyRing::grevlex(PrimeField::default(), 2);
        let i = IdealHandle::new(&r, vec![parse_poly(&r, "x0^2+x1").unwrap()]).unwrap();
        assert!(QuotientRing::new(&i).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn tables_agree_with_division(seed in 0u64..10_000) {
            let r = PolyRing::grevlex(PrimeField::default(), 4);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gens: Vec<_> = (0..3).map(|_| graded::random_sparse_form(&r, 2, 4, &mut rng)).collect();
            let i = IdealHandle::new(&r, gens).unwrap();
            let q = QuotientRing::new(&i).unwrap();
            let gb = i.gb();
            for d in 2..5 {
                let p = graded::random_form(&r, d, &mut rng);
                let v = q.nf_vector(&p).unwrap();
                prop_assert_eq!(q.to_poly(d, &v), gb.normal_form(&p));
                // ideal piece plus quotient piece fill the degree
                let piece = graded::graded_piece_basis(&r, i.gens(), d as i64, Exec::Sequential).unwrap();
                prop_assert_eq!(piece.dim + q.dim(d), graded::monomial_count(4, d));
            }
        }
    }

    #[test]
    fn image_of_extra_generators() {
        let i = twisted_cubic();
        let q = QuotientRing::new(&i).unwrap();
        let r = i.ring().clone();
        // the hyperplane x0 cuts 3 points; in high degree its ideal has codimension 3
        let dim = q.ideal_dim(&[r.var(0)], 5);
        assert_eq!(q.dim(5) - dim, 3);
        assert_eq!(q.ideal_row_count(&[r.var(0)], 5), q.dim(4));
    }
}
