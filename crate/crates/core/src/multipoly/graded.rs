use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exactalg::Field;
use crate::linalg;
use crate::multipoly::monomial::{Monomial, MonomialOrder};
use crate::multipoly::poly::{MultiPoly, PolyRing};
use crate::par::Exec;

/// All monomials of degree `d` in `nvars` variables, decreasing in `order`.
pub fn monomials_of_degree(nvars: usize, d: u32, order: &MonomialOrder) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fn rec(out: &mut Vec<Monomial>, exps: &mut Vec<u32>, pos: usize, left: u32) {
        if pos + 1 >= exps.len() {
            if let Some(last) = exps.last_mut() {
                *last = left;
            } else if left > 0 {
                return;
            }
            out.push(Monomial::from_exps(exps).expect("monomial in range"));
            return;
        }
        for e in 0..=left {
            exps[pos] = e;
            rec(out, exps, pos + 1, left - e);
        }
        exps[pos] = 0;
    }
    rec(&mut out, &mut exps, 0, d);
    out.sort_by(|a, b| order.cmp(b, a));
    out
}

/// `C(n + d - 1, d)`, the number of monomials of degree `d` in `n` variables.
pub fn monomial_count(nvars: usize, d: u32) -> usize {
    if nvars == 0 {
        return usize::from(d == 0);
    }
    let mut c: u128 = 1;
    for k in 0..d as u128 {
        c = c * (nvars as u128 + k) / (k + 1);
    }
    c as usize
}

/// Column indexing for coefficient vectors in a fixed degree.
#[derive(Clone, Debug)]
pub struct MonomialIndex {
    pub monomials: Vec<Monomial>,
    pub index: HashMap<Monomial, usize>,
}

impl MonomialIndex {
    pub fn new(monomials: Vec<Monomial>) -> Self {
        let index = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        MonomialIndex { monomials, index }
    }

    pub fn of_degree(nvars: usize, d: u32, order: &MonomialOrder) -> Self {
        Self::new(monomials_of_degree(nvars, d, order))
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Coefficient vector; terms outside the index are an error.
    pub fn to_vec<F: Field>(&self, p: &MultiPoly<F>) -> Result<Vec<F::Elem>> {
        let f = p.field();
        let mut v = vec![f.zero(); self.len()];
        for (m, c) in p.terms() {
            let i = self
                .index
                .get(m)
                .ok_or_else(|| Error::Degenerate(format!("monomial {m:?} outside the index")))?;
            v[*i] = c.clone();
        }
        Ok(v)
    }

    pub fn to_poly<F: Field>(&self, ring: &PolyRing<F>, v: &[F::Elem]) -> MultiPoly<F> {
        ring.from_terms(
            self.monomials
                .iter()
                .zip(v)
                .filter(|(_, c)| !ring.field.is_zero(c))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        )
    }
}

/// A random homogeneous form of degree `d` with every coefficient drawn.
pub fn random_form<F: Field, R: Rng + ?Sized>(ring: &PolyRing<F>, d: u32, rng: &mut R) -> MultiPoly<F> {
    let ms = monomials_of_degree(ring.nvars, d, &ring.order);
    ring.from_terms(ms.into_iter().map(|m| (m, ring.field.random(rng))).collect())
}

/// A random homogeneous form of degree `d` with at most `terms` terms.
pub fn random_sparse_form<F: Field, R: Rng + ?Sized>(
    ring: &PolyRing<F>,
    d: u32,
    terms: usize,
    rng: &mut R,
) -> MultiPoly<F> {
    let ms = monomials_of_degree(ring.nvars, d, &ring.order);
    ring.from_terms(
        (0..terms)
            .map(|_| (ms[rng.gen_range(0..ms.len())], ring.field.random_nonzero(rng)))
            .collect(),
    )
}

/// A random combination of `gens` in degree `d` (multipliers drawn at random).
pub fn random_combination<F: Field, R: Rng + ?Sized>(
    gens: &[MultiPoly<F>],
    d: u32,
    rng: &mut R,
) -> Option<MultiPoly<F>> {
    let ring = gens.first()?.ring().clone();
    let mut acc = ring.zero();
    for g in gens {
        let gd = g.total_degree()?;
        if gd > d {
            continue;
        }
        let mult = random_form(&ring, d - gd, rng);
        acc = &acc + &(&mult * g);
    }
    Some(acc)
}

/// Degree-`d` piece of the ideal generated by `gens`.
#[derive(Clone, Debug)]
pub struct GradedPiece<F: Field> {
    pub degree: u32,
    pub dim: usize,
    /// Reduced echelon basis, one polynomial per pivot.
    pub basis: Vec<MultiPoly<F>>,
    pub index: MonomialIndex,
}

/// Spanning products `m * g` of degree `d`.
pub fn degree_products<F: Field>(gens: &[MultiPoly<F>], d: u32) -> Vec<MultiPoly<F>> {
    let mut out = Vec::new();
    for g in gens {
        let Some(gd) = g.total_degree() else { continue };
        if gd > d {
            continue;
        }
        for m in monomials_of_degree(g.nvars(), d - gd, &g.ring().order) {
            out.push(g.mul_monomial(&m));
        }
    }
    out
}

/// Span of `{sum m_i g_i : deg = d}`; generators must be homogeneous.
pub fn graded_piece_basis<F: Field>(
    ring: &PolyRing<F>,
    gens: &[MultiPoly<F>],
    d: i64,
    exec: Exec,
) -> Result<GradedPiece<F>> {
    if d < 0 {
        return Err(Error::NegativeDegree(d));
    }
    let d = d as u32;
    if let Some(g) = gens.iter().find(|g| !g.is_homogeneous()) {
        return Err(Error::Degenerate(format!("generator {g} is not homogeneous")));
    }
    let index = MonomialIndex::of_degree(ring.nvars, d, &ring.order);
    let rows: Vec<Vec<F::Elem>> = degree_products(gens, d)
        .iter()
        .map(|p| index.to_vec(&p.with_order(&ring.order)))
        .collect::<Result<_>>()?;
    let ech = linalg::echelon(&ring.field, rows, index.len(), exec);
    let basis = ech.rows.iter().map(|r| index.to_poly(ring, r)).collect();
    Ok(GradedPiece {
        degree: d,
        dim: ech.rank(),
        basis,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::PrimeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts() {
        assert_eq!(monomials_of_degree(5, 3, &MonomialOrder::Grevlex).len(), 35);
        assert_eq!(monomial_count(10, 3), 220);
        assert_eq!(monomial_count(4, 6), 84);
        assert_eq!(monomials_of_degree(1, 4, &MonomialOrder::Lex).len(), 1);
    }

    #[test]
    fn single_variable_ideal() {
        let r = PolyRing::grevlex(PrimeField::default(), 5);
        let piece = graded_piece_basis(&r, &[r.var(0)], 1, Exec::Sequential).unwrap();
        assert_eq!(piece.dim, 1);
        let piece = graded_piece_basis(&r, &[r.var(0)], 2, Exec::Sequential).unwrap();
        assert_eq!(piece.dim, 5);
        assert!(matches!(
            graded_piece_basis(&r, &[r.var(0)], -1, Exec::Sequential),
            Err(Error::NegativeDegree(-1))
        ));
    }

    #[test]
    fn dimension_is_order_independent() {
        let f = PrimeField::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let r = PolyRing::grevlex(f, 4);
            let gens: Vec<_> = (0..3).map(|k| random_sparse_form(&r, 2 + k % 2, 4, &mut rng)).collect();
            for d in 2..6 {
                let a = graded_piece_basis(&r, &gens, d, Exec::Sequential).unwrap().dim;
                let lex = r.with_order(MonomialOrder::Lex);
                let lg: Vec<_> = gens.iter().map(|g| g.with_order(&MonomialOrder::Lex)).collect();
                let b = graded_piece_basis(&lex, &lg, d, Exec::Parallel).unwrap().dim;
                assert_eq!(a, b);
            }
        }
    }
}
