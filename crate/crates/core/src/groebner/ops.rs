//! Intersection, colon, saturation and elimination.

use crate::error::{Error, Result};
use crate::exactalg::Field;
use crate::groebner::ideal::IdealHandle;
use crate::multipoly::{MonomialOrder, MultiPoly, PolyRing};

/// Saturation gives up after this many colon steps.
pub const SATURATION_LIMIT: usize = 20;

/// Exact quotient `p / h`, `None` if `h` does not divide `p`.
pub fn divide_exact<F: Field>(p: &MultiPoly<F>, h: &MultiPoly<F>) -> Option<MultiPoly<F>> {
    let f = p.field();
    let hl = h.lead_monomial()?;
    let hc = f.inv(h.lead_coeff()?).ok()?;
    let ring = p.ring();
    let mut rest = p.clone();
    let mut q = ring.zero();
    while let Some(m) = rest.lead_monomial() {
        let u = m.try_div(&hl)?;
        let c = f.mul(rest.lead_coeff().expect("nonzero"), &hc);
        q = &q + &ring.term(c.clone(), u);
        rest = rest.try_add_scaled(&f.neg(&c), &u, h).ok()?;
    }
    Some(q)
}

/// Keep the basis elements free of the first `k` variables and drop them.
fn drop_leading_vars<F: Field>(
    big: &PolyRing<F>,
    small: &PolyRing<F>,
    polys: &[MultiPoly<F>],
    k: usize,
) -> Vec<MultiPoly<F>> {
    let _ = big;
    polys
        .iter()
        .filter(|p| p.terms().iter().all(|(m, _)| m.partial_degree(0, k) == 0))
        .map(|p| {
            small.from_terms(
                p.terms()
                    .iter()
                    .map(|(m, c)| {
                        let e = m.exps(p.nvars());
                        (crate::multipoly::Monomial::from_exps(&e[k..]).expect("in range"), c.clone())
                    })
                    .collect(),
            )
        })
        .collect()
}

/// `I ∩ J` via a tag variable: eliminate `t` from `t I + (1 - t) J`.
pub fn intersect<F: Field>(i: &IdealHandle<F>, j: &IdealHandle<F>) -> Result<IdealHandle<F>> {
    let ring = i.ring();
    if !ring.same_as(j.ring()) {
        return Err(Error::RingMismatch("intersection of ideals in different rings".into()));
    }
    if i.is_zero_ideal() || j.is_zero_ideal() {
        return Ok(IdealHandle::zero(ring).with_exec(i.exec()));
    }
    let n = ring.nvars;
    let big = PolyRing::new(ring.field.clone(), n + 1, MonomialOrder::Block(1))?;
    let shift: Vec<usize> = (1..=n).collect();
    let t = big.var(0);
    let one_minus_t = &big.one() - &t;
    let mut gens = Vec::new();
    for g in i.gens() {
        gens.push(&t * &g.remap(&big, &shift));
    }
    for g in j.gens() {
        gens.push(&one_minus_t * &g.remap(&big, &shift));
    }
    let tagged = IdealHandle::new(&big, gens)?.with_exec(i.exec());
    let gb = tagged.gb();
    let kept = drop_leading_vars(&big, ring, gb.polys(), 1);
    Ok(IdealHandle::new(ring, kept)?.with_exec(i.exec()))
}

/// `I : (h)` as `(I ∩ (h)) / h`.
pub fn quotient_by_poly<F: Field>(i: &IdealHandle<F>, h: &MultiPoly<F>) -> Result<IdealHandle<F>> {
    if h.is_zero() {
        return Err(Error::ZeroIdeal);
    }
    let hi = IdealHandle::new(i.ring(), vec![h.clone()])?;
    let inter = intersect(i, &hi)?;
    let gens = inter
        .gens()
        .iter()
        .map(|g| {
            divide_exact(g, h).ok_or_else(|| Error::Inconsistent("intersection element not divisible".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IdealHandle::new(i.ring(), gens)?.with_exec(i.exec()))
}

/// `I : J = {f : f J ⊆ I}`.
pub fn quotient<F: Field>(i: &IdealHandle<F>, j: &IdealHandle<F>) -> Result<IdealHandle<F>> {
    if j.is_zero_ideal() {
        return Err(Error::ZeroIdeal);
    }
    let mut acc: Option<IdealHandle<F>> = None;
    for h in j.gens() {
        let q = quotient_by_poly(i, h)?;
        acc = Some(match acc {
            None => q,
            Some(a) => intersect(&a, &q)?,
        });
    }
    Ok(acc.expect("nonzero divisor ideal"))
}

/// `I : J^∞` by iterated colon until the ideal stops growing.
pub fn saturate<F: Field>(i: &IdealHandle<F>, j: &IdealHandle<F>) -> Result<IdealHandle<F>> {
    let mut cur = i.clone();
    for _ in 0..SATURATION_LIMIT {
        let next = quotient(&cur, j)?;
        if cur.contains_ideal(&next) {
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::IterationLimit(format!("saturation did not stabilize in {SATURATION_LIMIT} steps")))
}

/// `I ∩ k[remaining variables]`, returned in a ring with those variables in
/// their original relative order.
pub fn eliminate<F: Field>(i: &IdealHandle<F>, vars: &[usize]) -> Result<IdealHandle<F>> {
    let ring = i.ring();
    let n = ring.nvars;
    let k = vars.len();
    if vars.iter().any(|&v| v >= n) {
        return Err(Error::RingMismatch("elimination variable out of range".into()));
    }
    let rest: Vec<usize> = (0..n).filter(|v| !vars.contains(v)).collect();
    // variable old -> new position: eliminated ones first
    let mut map = vec![0usize; n];
    for (pos, &v) in vars.iter().chain(rest.iter()).enumerate() {
        map[v] = pos;
    }
    let big = PolyRing::new(ring.field.clone(), n, MonomialOrder::Block(k))?;
    let gens: Vec<_> = i.gens().iter().map(|g| g.remap(&big, &map)).collect();
    let moved = IdealHandle::new(&big, gens)?.with_exec(i.exec());
    let gb = moved.gb();
    let small = PolyRing::new(ring.field.clone(), n - k, ring.order.clone())?;
    let kept = drop_leading_vars(&big, &small, gb.polys(), k);
    Ok(IdealHandle::new(&small, kept)?.with_exec(i.exec()))
}
