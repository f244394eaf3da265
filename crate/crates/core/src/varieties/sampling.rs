//! Rational points over prime fields: univariate roots, points on
//! hypersurfaces along random lines, and points of higher-codimension
//! varieties from random linear sections.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exactalg::{Field, PrimeField};
use crate::groebner::IdealHandle;
use crate::multipoly::{Monomial, MonomialOrder, MultiPoly, PolyRing};

/// Dense univariate polynomial over `F_p`, lowest coefficient first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    pub coeffs: Vec<u32>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, f: &PrimeField, x: u32) -> u32 {
        self.coeffs.iter().rev().fold(0, |acc, c| f.add(&f.mul(&acc, &x), c))
    }

    fn monic(&self, f: &PrimeField) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(l) => {
                let inv = f.inv(l).expect("nonzero lead");
                UniPoly::new(self.coeffs.iter().map(|c| f.mul(c, &inv)).collect())
            }
        }
    }

    fn sub(&self, f: &PrimeField, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Vec<u32>, i: usize| v.get(i).copied().unwrap_or(0);
        UniPoly::new((0..n).map(|i| f.sub(&get(&self.coeffs, i), &get(&other.coeffs, i))).collect())
    }

    fn mul(&self, f: &PrimeField, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UniPoly::new(Vec::new());
        }
        let p = f.modulus() as u64;
        let mut acc = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + *a as u64 * *b as u64) % p;
            }
        }
        UniPoly::new(acc.into_iter().map(|v| v as u32).collect())
    }

    /// Remainder on division by a nonzero `m`.
    fn rem(&self, f: &PrimeField, m: &Self) -> Self {
        let dm = m.degree().expect("nonzero divisor");
        let inv = f.inv(m.coeffs.last().expect("nonzero")).expect("nonzero lead");
        let mut r = self.coeffs.clone();
        while r.len() > dm && !r.is_empty() {
            let top = r.len() - 1;
            let c = f.mul(&r[top], &inv);
            if c != 0 {
                let shift = top - dm;
                for (k, mk) in m.coeffs.iter().enumerate() {
                    r[shift + k] = f.sub(&r[shift + k], &f.mul(&c, mk));
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        UniPoly::new(r)
    }

    fn quo(&self, f: &PrimeField, m: &Self) -> Self {
        let dm = m.degree().expect("nonzero divisor");
        let inv = f.inv(m.coeffs.last().expect("nonzero")).expect("nonzero lead");
        let mut r = self.coeffs.clone();
        if r.len() <= dm {
            return UniPoly::new(Vec::new());
        }
        let mut q = vec![0u32; r.len() - dm];
        while r.len() > dm {
            let top = r.len() - 1;
            let c = f.mul(&r[top], &inv);
            let shift = top - dm;
            q[shift] = c;
            for (k, mk) in m.coeffs.iter().enumerate() {
                r[shift + k] = f.sub(&r[shift + k], &f.mul(&c, mk));
            }
            r.pop();
        }
        UniPoly::new(q)
    }

    pub fn gcd(&self, f: &PrimeField, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `base^e mod m`.
    fn powmod(&self, f: &PrimeField, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(f, m);
        let mut acc = UniPoly::new(vec![1]).rem(f, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base).rem(f, m);
            }
            base = base.mul(f, &base).rem(f, m);
            e >>= 1;
        }
        acc
    }

    /// Distinct roots in `F_p`, sorted.
    pub fn roots<R: Rng + ?Sized>(&self, f: &PrimeField, rng: &mut R) -> Vec<u32> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let p = f.modulus() as u64;
        let x = UniPoly::new(vec![0, 1]);
        // product of the distinct linear factors: gcd(h, x^p - x)
        let xp = x.powmod(f, p, self);
        let g = self.gcd(f, &xp.sub(f, &x));
        let mut out = Vec::new();
        split(f, &g, rng, &mut out);
        out.sort();
        out
    }
}

/// Equal-degree splitting of a squarefree product of linear factors.
fn split<R: Rng + ?Sized>(f: &PrimeField, g: &UniPoly, rng: &mut R, out: &mut Vec<u32>) {
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let g = g.monic(f);
            out.push(f.neg(&g.coeffs[0]));
        }
        Some(_) => {
            let p = f.modulus() as u64;
            if p == 2 {
                for x in 0..2 {
                    if g.eval(f, x) == 0 {
                        out.push(x);
                    }
                }
                return;
            }
            loop {
                let a: u32 = rng.gen_range(0..f.modulus());
                let shifted = UniPoly::new(vec![a, 1]);
                let h = shifted.powmod(f, (p - 1) / 2, g).sub(f, &UniPoly::new(vec![1]));
                let d = g.gcd(f, &h);
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && dd < g.degree().unwrap() {
                    let other = g.quo(f, &d);
                    split(f, &d, rng, out);
                    split(f, &other, rng, out);
                    return;
                }
            }
        }
    }
}

/// Restrict a form to the line `a + t b` as a polynomial in `t`.
pub fn restrict_to_line(f: &PrimeField, poly: &MultiPoly<PrimeField>, a: &[u32], b: &[u32]) -> UniPoly {
    let d = poly.total_degree().unwrap_or(0) as usize;
    // interpolate through d + 1 values of t
    let ts: Vec<u32> = (0..=d as u32).collect();
    let vals: Vec<u32> = ts
        .iter()
        .map(|t| {
            let pt: Vec<u32> = a.iter().zip(b).map(|(x, y)| f.add(x, &f.mul(t, y))).collect();
            poly.evaluate(&pt)
        })
        .collect();
    lagrange(f, &ts, &vals)
}

fn lagrange(f: &PrimeField, xs: &[u32], ys: &[u32]) -> UniPoly {
    let mut acc = UniPoly::new(Vec::new());
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        if yi == 0 {
            continue;
        }
        let mut basis = UniPoly::new(vec![1]);
        let mut denom = 1u32;
        for (j, &xj) in xs.iter().enumerate() {
            if j != i {
                basis = basis.mul(f, &UniPoly::new(vec![f.neg(&xj), 1]));
                denom = f.mul(&denom, &f.sub(&xi, &xj));
            }
        }
        let c = f.mul(&yi, &f.inv(&denom).expect("distinct nodes"));
        let neg_scaled = UniPoly::new(basis.coeffs.iter().map(|b| f.neg(&f.mul(b, &c))).collect());
        acc = acc.sub(f, &neg_scaled);
    }
    acc
}

fn random_point<R: Rng + ?Sized>(f: &PrimeField, n: usize, rng: &mut R) -> Vec<u32> {
    loop {
        let v: Vec<u32> = (0..n).map(|_| f.random(rng)).collect();
        if v.iter().any(|x| *x != 0) {
            return v;
        }
    }
}

/// Normalize a projective point so that its first nonzero coordinate is 1.
pub fn normalize(f: &PrimeField, v: &[u32]) -> Vec<u32> {
    let Some(lead) = v.iter().find(|x| **x != 0) else {
        return v.to_vec();
    };
    let inv = f.inv(lead).expect("nonzero");
    v.iter().map(|x| f.mul(x, &inv)).collect()
}

/// Points of the hypersurface `V(poly)` from roots along random lines.
pub fn points_on_hypersurface<R: Rng + ?Sized>(
    poly: &MultiPoly<PrimeField>,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<u32>>> {
    let f = *poly.field();
    let n = poly.nvars();
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 50 * count + 100 {
            return Err(Error::Sampling(format!("found {} of {count} hypersurface points", out.len())));
        }
        let a = random_point(&f, n, rng);
        let b = random_point(&f, n, rng);
        let u = restrict_to_line(&f, poly, &a, &b);
        if u.is_zero() {
            continue;
        }
        for t in u.roots(&f, rng) {
            if out.len() == count {
                break;
            }
            let pt: Vec<u32> = a.iter().zip(&b).map(|(x, y)| f.add(x, &f.mul(&t, y))).collect();
            if pt.iter().any(|x| *x != 0) {
                out.push(normalize(&f, &pt));
            }
        }
    }
    Ok(out)
}

/// All solutions of a zero-dimensional affine system over `F_p`, by a lex
/// basis and back substitution from the last variable.
pub fn affine_solutions<R: Rng + ?Sized>(
    ring: &PolyRing<PrimeField>,
    eqs: &[MultiPoly<PrimeField>],
    rng: &mut R,
) -> Result<Vec<Vec<u32>>> {
    let f = ring.field;
    let n = ring.nvars;
    if n == 0 {
        return Ok(if eqs.iter().all(|e| e.is_zero()) { vec![Vec::new()] } else { Vec::new() });
    }
    let lex = ring.with_order(MonomialOrder::Lex);
    let eqs: Vec<_> = eqs.iter().map(|e| e.with_order(&MonomialOrder::Lex)).collect();
    let gb = IdealHandle::new(&lex, eqs)?.gb();
    if gb.is_unit() {
        return Ok(Vec::new());
    }
    let last = n - 1;
    let uni: Vec<&MultiPoly<PrimeField>> = gb
        .polys()
        .iter()
        .filter(|p| p.terms().iter().all(|(m, _)| m.partial_degree(0, last) == 0))
        .collect();
    let Some(h) = uni.first() else {
        return Err(Error::UnexpectedDimension {
            context: "affine system".into(),
            expected: 0,
            computed: 1,
        });
    };
    let mut coeffs = vec![0u32; h.total_degree().unwrap_or(0) as usize + 1];
    for (m, c) in h.terms() {
        coeffs[m.exp(last) as usize] = *c;
    }
    let roots = UniPoly::new(coeffs).roots(&f, rng);
    let small = PolyRing::new(f, n - 1, MonomialOrder::Lex)?;
    let mut out = Vec::new();
    for r in roots {
        // substitute x_last = r
        let mut images: Vec<MultiPoly<PrimeField>> = (0..n - 1).map(|i| small.var(i)).collect();
        images.push(small.constant(r));
        let reduced: Vec<MultiPoly<PrimeField>> = gb
            .polys()
            .iter()
            .map(|p| p.compose(&images))
            .collect::<Result<_>>()?;
        for mut s in affine_solutions(&small, &reduced, rng)? {
            s.push(r);
            out.push(s);
        }
    }
    Ok(out)
}

/// Points of a projective variety of dimension `dim` cut by random linear
/// spaces of complementary dimension.
pub fn points_by_linear_sections<R: Rng + ?Sized>(
    ideal: &IdealHandle<PrimeField>,
    dim: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<u32>>> {
    let ring = ideal.ring();
    let f = ring.field;
    let n = ring.nvars;
    let codim = n - 1 - dim;
    // affine chart of a random P^codim: basis vectors w_0 + sum y_k w_k
    let aff = PolyRing::new(f, codim, MonomialOrder::Grevlex)?;
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 40 * count + 50 {
            return Err(Error::Sampling(format!("found {} of {count} points", out.len())));
        }
        let basis: Vec<Vec<u32>> = (0..=codim).map(|_| random_point(&f, n, rng)).collect();
        let images: Vec<MultiPoly<PrimeField>> = (0..n)
            .map(|i| {
                let mut p = aff.constant(basis[0][i]);
                for k in 0..codim {
                    p = &p + &aff.term(basis[k + 1][i], Monomial::var(k));
                }
                p
            })
            .collect();
        let eqs: Vec<MultiPoly<PrimeField>> =
            ideal.gens().iter().map(|g| g.compose(&images)).collect::<Result<_>>()?;
        let sols = match affine_solutions(&aff, &eqs, rng) {
            Ok(s) => s,
            Err(Error::UnexpectedDimension { .. }) => continue,
            Err(e) => return Err(e),
        };
        for s in sols {
            if out.len() == count {
                break;
            }
            let pt: Vec<u32> = (0..n)
                .map(|i| {
                    let mut v = basis[0][i];
                    for k in 0..codim {
                        v = f.add(&v, &f.mul(&s[k], &basis[k + 1][i]));
                    }
                    v
                })
                .collect();
            if pt.iter().any(|x| *x != 0) {
                out.push(normalize(&f, &pt));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipoly::parse_poly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roots_of_split_polynomial() {
        let f = PrimeField::new(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // (x-3)(x-7)(x-50)(x^2+1); -1 is a square mod 101 (101 = 1 mod 4)
        let mut p = UniPoly::new(vec![1]);
        for r in [3u32, 7, 50] {
            p = p.mul(&f, &UniPoly::new(vec![f.neg(&r), 1]));
        }
        p = p.mul(&f, &UniPoly::new(vec![1, 0, 1]));
        let roots = p.roots(&f, &mut rng);
        let i = f.sqrt(&f.neg(&1)).unwrap();
        let mut expect = vec![3, 7, 50, i, f.neg(&i)];
        expect.sort();
        assert_eq!(roots, expect);
        // x^2 + 2 has no root mod 5
        let f5 = PrimeField::new(5).unwrap();
        assert!(UniPoly::new(vec![2, 0, 1]).roots(&f5, &mut rng).is_empty());
    }

    #[test]
    fn roots_match_brute_force() {
        let f = PrimeField::new(211).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let coeffs: Vec<u32> = (0..7).map(|_| f.random(&mut rng)).collect();
            let p = UniPoly::new(coeffs);
            let brute: Vec<u32> = (0..211).filter(|x| p.eval(&f, *x) == 0).collect();
            assert_eq!(p.roots(&f, &mut rng), brute);
        }
    }

    #[test]
    fn hypersurface_points_vanish() {
        let r = PolyRing::grevlex(PrimeField::default(), 4);
        let cubic = parse_poly(&r, "x0^3+x1^3+x2^3+x3^3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = points_on_hypersurface(&cubic, 30, &mut rng).unwrap();
        assert_eq!(pts.len(), 30);
        assert!(pts.iter().all(|p| cubic.evaluate(p) == 0));
    }

    #[test]
    fn curve_points_by_sections() {
        let r = PolyRing::grevlex(PrimeField::default(), 4);
        let gens: Vec<_> = ["x0*x2-x1^2", "x0*x3-x1*x2", "x1*x3-x2^2"]
            .iter()
            .map(|s| parse_poly(&r, s).unwrap())
            .collect();
        let i = IdealHandle::new(&r, gens.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts = points_by_linear_sections(&i, 1, 10, &mut rng).unwrap();
        assert_eq!(pts.len(), 10);
        for p in &pts {
            assert!(gens.iter().all(|g| g.evaluate(p) == 0));
        }
    }
}
