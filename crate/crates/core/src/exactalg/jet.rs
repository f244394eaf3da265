//! Truncated power series ("jets") in a few variables over an exact field.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactalg::field::Field;

/// The ring `K[e_1..e_n] / (e)^(t+1)`.
pub struct JetRing<F: Field> {
    field: F,
    nvars: usize,
    order: u32,
    monomials: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    // for each i, the pairs (j, k) with mono_i * mono_j = mono_k of degree <= order
    table: Vec<Vec<(u32, u32)>>,
}

impl<F: Field> fmt::Debug for JetRing<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetRing")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .finish()
    }
}

fn monomials_up_to(nvars: usize, order: u32) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for d in 0..=order {
        let mut cur = vec![0u8; nvars];
        fill(&mut out, &mut cur, 0, d);
    }
    out
}

fn fill(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left as u8;
        out.push(cur.clone());
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e as u8;
        fill(out, cur, pos + 1, left - e);
    }
    cur[pos] = 0;
}

impl<F: Field> JetRing<F> {
    pub fn new(field: F, nvars: usize, order: u32) -> Arc<Self> {
        let monomials = monomials_up_to(nvars, order);
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let degs: Vec<u32> = monomials
            .iter()
            .map(|m| m.iter().map(|&e| e as u32).sum())
            .collect();
        let mut table = vec![Vec::new(); monomials.len()];
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                if degs[i] + degs[j] > order {
                    continue;
                }
                let prod: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                table[i].push((j as u32, index[&prod] as u32));
            }
        }
        Arc::new(JetRing {
            field,
            nvars,
            order,
            monomials,
            index,
            table,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of retained monomials.
    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    /// Exponent vectors of the basis, graded by degree.
    pub fn monomials(&self) -> &[Vec<u8>] {
        &self.monomials
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    pub fn zero(self: &Arc<Self>) -> JetElement<F> {
        JetElement {
            ring: self.clone(),
            coeffs: vec![self.field.zero(); self.dim()],
        }
    }

    pub fn constant(self: &Arc<Self>, c: F::Elem) -> JetElement<F> {
        let mut z = self.zero();
        z.coeffs[0] = c;
        z
    }

    pub fn one(self: &Arc<Self>) -> JetElement<F> {
        self.constant(self.field.one())
    }

    /// The jet variable `e_i`.
    pub fn var(self: &Arc<Self>, i: usize) -> JetElement<F> {
        let mut z = self.zero();
        if self.order >= 1 {
            let mut e = vec![0u8; self.nvars];
            e[i] = 1;
            z.coeffs[self.index[&e]] = self.field.one();
        }
        z
    }

    /// `c + sum_j l[j] e_j`
    pub fn affine(self: &Arc<Self>, c: F::Elem, l: &[F::Elem]) -> JetElement<F> {
        let mut z = self.constant(c);
        if self.order >= 1 {
            for (j, v) in l.iter().enumerate() {
                let mut e = vec![0u8; self.nvars];
                e[j] = 1;
                z.coeffs[self.index[&e]] = v.clone();
            }
        }
        z
    }

    pub fn from_coeffs(self: &Arc<Self>, coeffs: Vec<F::Elem>) -> Result<JetElement<F>> {
        if coeffs.len() != self.dim() {
            return Err(Error::JetMismatch(format!(
                "{} coefficients for a ring of dimension {}",
                coeffs.len(),
                self.dim()
            )));
        }
        Ok(JetElement {
            ring: self.clone(),
            coeffs,
        })
    }
}

/// An element of a [`JetRing`], stored densely.
#[derive(Clone)]
pub struct JetElement<F: Field> {
    ring: Arc<JetRing<F>>,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for JetElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetElement")
            .field("ring", &self.ring)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<F: Field> PartialEq for JetElement<F> {
    fn eq(&self, other: &Self) -> bool {
        self.same_ring(other) && self.coeffs == other.coeffs
    }
}

impl<F: Field> JetElement<F> {
    pub fn ring(&self) -> &Arc<JetRing<F>> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, exps: &[u8]) -> Option<&F::Elem> {
        self.ring.index_of(exps).map(|i| &self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        let f = &self.ring.field;
        self.coeffs.iter().all(|c| f.is_zero(c))
    }

    /// Lowest degree of a nonzero term, `None` for the zero jet.
    pub fn valuation(&self) -> Option<u32> {
        let f = &self.ring.field;
        self.coeffs
            .iter()
            .zip(&self.ring.monomials)
            .find(|(c, _)| !f.is_zero(c))
            .map(|(_, m)| m.iter().map(|&e| e as u32).sum())
    }

    fn same_ring(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring)
            || (self.ring.nvars == other.ring.nvars
                && self.ring.order == other.ring.order
                && self.ring.field == other.ring.field)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(Error::JetMismatch(format!(
                "({} vars, order {}) vs ({} vars, order {})",
                self.ring.nvars, self.ring.order, other.ring.nvars, other.ring.order
            )))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = &self.ring.field;
        Ok(JetElement {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = &self.ring.field;
        Ok(JetElement {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f.sub(a, b))
                .collect(),
        })
    }

    /// Truncated product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = &self.ring.field;
        let mut out = vec![f.zero(); self.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for &(j, k) in &self.ring.table[i] {
                let b = &other.coeffs[j as usize];
                if !f.is_zero(b) {
                    out[k as usize] = f.mul_add(&out[k as usize], a, b);
                }
            }
        }
        Ok(JetElement {
            ring: self.ring.clone(),
            coeffs: out,
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("jet ring mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("jet ring mismatch")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("jet ring mismatch")
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.ring.field;
        JetElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|a| f.mul(a, c)).collect(),
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &F::Elem, other: &Self) {
        let f = &self.ring.field;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !f.is_zero(b) {
                *a = f.mul_add(a, c, b);
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drop every term of degree above `t`.
    pub fn truncate(&self, t: u32) -> Self {
        let f = &self.ring.field;
        JetElement {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&self.ring.monomials)
                .map(|(c, m)| {
                    if m.iter().map(|&e| e as u32).sum::<u32>() > t {
                        f.zero()
                    } else {
                        c.clone()
                    }
                })
                .collect(),
        }
    }
}
