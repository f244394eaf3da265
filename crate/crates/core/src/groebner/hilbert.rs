//! Hilbert series of monomial ideals and the invariants read off from them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactalg::Field;
use crate::groebner::ideal::IdealHandle;
use crate::multipoly::{Monomial, MonomialOrder, MultiPoly};

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    trim(out)
}

fn trim(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn one_minus_t_pow(d: u32) -> Vec<i64> {
    let mut v = vec![0i64; d as usize + 1];
    v[0] += 1;
    v[d as usize] -= 1;
    trim(v)
}

/// Drop generators divisible by another one.
pub fn minimalize(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort_by_key(|m| (m.degree(), m.packed()));
    gens.dedup();
    let mut out: Vec<Monomial> = Vec::with_capacity(gens.len());
    for m in gens {
        if !out.iter().any(|g| g.divides(&m)) {
            out.push(m);
        }
    }
    out
}

/// Numerator `N(t)` with `HS(S/I) = N(t) / (1-t)^n` for a monomial ideal.
pub fn hilbert_numerator(gens: &[Monomial]) -> Vec<i64> {
    numerator_rec(minimalize(gens.to_vec()))
}

fn numerator_rec(gens: Vec<Monomial>) -> Vec<i64> {
    if gens.is_empty() {
        return vec![1];
    }
    let pairwise_coprime = gens
        .iter()
        .enumerate()
        .all(|(i, a)| gens[i + 1..].iter().all(|b| a.is_coprime(b)));
    if pairwise_coprime {
        return gens
            .iter()
            .fold(vec![1], |acc, m| poly_mul(&acc, &one_minus_t_pow(m.degree())));
    }
    // pivot on the variable occurring in the most generators
    let mut counts = [0usize; crate::multipoly::MAX_VARS];
    for m in &gens {
        for (v, c) in counts.iter_mut().enumerate() {
            if m.exp(v) > 0 {
                *c += 1;
            }
        }
    }
    let v = (0..counts.len()).max_by_key(|&v| (counts[v], usize::MAX - v)).expect("variables");
    let x = Monomial::var(v);
    // N(I) = N(I + x) + t N(I : x)
    let mut with_x: Vec<Monomial> = gens.iter().filter(|m| m.exp(v) == 0).copied().collect();
    with_x.push(x);
    let colon: Vec<Monomial> = gens
        .iter()
        .map(|m| if m.exp(v) > 0 { m.div(&x) } else { *m })
        .collect();
    let a = numerator_rec(minimalize(with_x));
    let b = numerator_rec(minimalize(colon));
    let mut tb = vec![0i64];
    tb.extend(b);
    poly_add(&a, &trim(tb))
}

fn binom_big(n: i64, k: i64) -> BigInt {
    if k < 0 || n < k {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Hilbert series data of a homogeneous ideal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HilbertData {
    pub nvars: usize,
    /// Numerator over `(1-t)^nvars`.
    pub numerator: Vec<i64>,
    /// Numerator over `(1-t)^krull_dim`.
    pub h_vector: Vec<i64>,
    pub krull_dim: usize,
    /// Dimension of the projective scheme, `-1` when it is empty.
    pub proj_dim: i64,
    pub degree: i64,
    /// Hilbert polynomial coefficients, constant term first.
    #[serde(skip)]
    pub hilbert_poly: Vec<BigRational>,
}

impl HilbertData {
    pub fn from_numerator(nvars: usize, numerator: Vec<i64>) -> Self {
        let mut h = numerator.clone();
        let mut krull = nvars;
        // divide by (1 - t) while h(1) = 0
        while !h.is_empty() && h.iter().sum::<i64>() == 0 && krull > 0 {
            let mut q = vec![0i64; h.len() - 1];
            let mut carry = 0i64;
            for i in 0..h.len() - 1 {
                carry += h[i];
                q[i] = carry;
            }
            h = trim(q);
            krull -= 1;
        }
        let empty = h.is_empty() || krull == 0;
        let degree = if h.is_empty() { 0 } else { h.iter().sum() };
        let mut hp = vec![BigRational::zero(); krull.max(1)];
        if krull > 0 {
            // sum_j h_j C(t - j + k - 1, k - 1)
            let k = krull as i64;
            for (j, &hj) in h.iter().enumerate() {
                if hj == 0 {
                    continue;
                }
                // product over i = 1..k-1 of (t - j + i), divided by (k-1)!
                let mut p: Vec<BigRational> = vec![BigRational::one()];
                for i in 1..k {
                    let c = BigRational::from_integer(BigInt::from(i - j as i64));
                    let mut next = vec![BigRational::zero(); p.len() + 1];
                    for (e, a) in p.iter().enumerate() {
                        next[e] += a * &c;
                        next[e + 1] += a.clone();
                    }
                    p = next;
                }
                let fact: BigInt = (1..k).map(BigInt::from).product();
                for (e, a) in p.into_iter().enumerate() {
                    hp[e] += a * BigRational::from_integer(BigInt::from(hj)) / BigRational::from_integer(fact.clone());
                }
            }
        }
        HilbertData {
            nvars,
            numerator,
            h_vector: h,
            krull_dim: krull,
            proj_dim: if empty { -1 } else { krull as i64 - 1 },
            degree,
            hilbert_poly: hp,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.proj_dim < 0
    }

    /// `dim (S/I)_d`.
    pub fn hilbert_function(&self, d: u32) -> i64 {
        let n = self.nvars as i64;
        let mut total = BigInt::zero();
        for (j, &c) in self.numerator.iter().enumerate() {
            if j as i64 > d as i64 {
                break;
            }
            total += BigInt::from(c) * binom_big(d as i64 - j as i64 + n - 1, n - 1);
        }
        total.to_i64().expect("hilbert function fits")
    }

    pub fn hilbert_polynomial_at(&self, t: i64) -> BigRational {
        let tt = BigRational::from_integer(BigInt::from(t));
        let mut acc = BigRational::zero();
        for c in self.hilbert_poly.iter().rev() {
            acc = acc * &tt + c;
        }
        acc
    }

    /// Constant term of the Hilbert polynomial.
    pub fn chi(&self) -> BigRational {
        self.hilbert_polynomial_at(0)
    }

    /// For surfaces: `d/2 + 1 - a_1`, where `a_1` is the linear coefficient.
    pub fn sectional_genus(&self) -> Option<BigRational> {
        if self.proj_dim != 2 {
            return None;
        }
        let d = BigRational::from_integer(BigInt::from(self.degree));
        Some(d / BigRational::from_integer(BigInt::from(2)) + BigRational::one() - self.hilbert_poly[1].clone())
    }

    /// Smallest degree from which function and polynomial agree, searched up to `limit`.
    pub fn agreement_start(&self, limit: u32) -> Option<u32> {
        let mut start = None;
        for d in 0..=limit {
            let hf = BigRational::from_integer(BigInt::from(self.hilbert_function(d)));
            if hf == self.hilbert_polynomial_at(d as i64) {
                if start.is_none() {
                    start = Some(d);
                }
            } else {
                start = None;
            }
        }
        start
    }
}

/// Hilbert data from the grevlex lead-term ideal.
pub fn hilbert_data<F: Field>(i: &IdealHandle<F>) -> HilbertData {
    let gb = i.groebner(&MonomialOrder::Grevlex);
    HilbertData::from_numerator(i.nvars(), hilbert_numerator(&gb.leads()))
}

/// Castelnuovo–Mumford regularity of `S/I` from the grevlex basis in random
/// coordinates (valid for generic coordinates).
pub fn regularity<F: Field>(i: &IdealHandle<F>, seed: u64) -> u32 {
    let ring = i.ring().with_order(MonomialOrder::Grevlex);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ring.nvars;
    let images: Vec<MultiPoly<F>> = (0..n)
        .map(|_| {
            let c: Vec<F::Elem> = (0..n).map(|_| ring.field.random(&mut rng)).collect();
            ring.linear_form(&c)
        })
        .collect();
    let gens: Vec<MultiPoly<F>> = i
        .gens()
        .iter()
        .map(|g| g.with_order(&MonomialOrder::Grevlex).compose(&images).expect("same ring"))
        .collect();
    let moved = IdealHandle::new(&ring, gens).expect("same ring").with_exec(i.exec());
    moved.gb().max_degree().saturating_sub(1)
}
